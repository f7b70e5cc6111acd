#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "mfou/error.hpp"
#include "mfou/inference.hpp"

using namespace mfou;

namespace {

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

double q_direct_gap(std::size_t cells) {
  const ProcessSpec spec(0.7, 1.0, TimeGrid(5.0, cells));
  const auto k = build_kernel(spec);
  const auto qv = quadratic_variation(k);
  double worst = 0;
  for (std::uint64_t rep = 0; rep < 4; ++rep) {
    RandomStream rng(99, rep);
    const auto path = sample_mixed_path(spec, rng);
    const auto tp = transform_path(path, k, qv);
    auto direct = compute_Q_direct(path, k, qv);
    auto q = tp.q;
    direct.erase(direct.begin());
    q.erase(q.begin());
    worst = std::max(worst, rel_l2(direct, q));
  }
  return worst;
}

}  // namespace

TEST_SUITE("inference") {
  TEST_CASE("Z and Q at H = 1/2") {
    const ProcessSpec spec(0.5, 1.3, TimeGrid(4.0, 200));
    const auto k = build_kernel(spec);
    const auto qv = quadratic_variation(k);
    RandomStream rng(5, 0);
    const auto path = sample_mixed_path(spec, rng);
    const auto tp = transform_path(path, k, qv);
    for (std::size_t i = 0; i <= 200; ++i) {
      CHECK(std::abs(tp.z[i] - path.x[i] / 2) < 1e-12);
      CHECK(std::abs(tp.q[i] - path.x[i]) < 1e-10);
    }
  }

  TEST_CASE("direct Q agrees with the ψ representation and improves under refinement") {
    const double coarse = q_direct_gap(512);
    const double fine = q_direct_gap(1024);
    CHECK(coarse <= 0.05);
    CHECK(fine < coarse);
  }

  TEST_CASE("mle on a noiseless synthetic path returns the drift") {
    const TimeGrid grid(3.0, 60);
    const auto qv = quadratic_variation(0.7, grid);
    const double theta0 = 0.8;
    TransformedPath tp{grid, std::vector<double>(61, 0.0), std::vector<double>(61, 1.0), std::vector<double>(61, 0.0)};
    for (std::size_t i = 0; i < 60; ++i) tp.z[i + 1] = tp.z[i] - theta0 * (qv.bracket[i + 1] - qv.bracket[i]);
    const auto rec = mle(tp, qv);
    CHECK(rec.theta_hat == doctest::Approx(theta0).epsilon(1e-12));
    CHECK(score(theta0, tp, qv) == doctest::Approx(0.0).scale(1.0));
  }

  TEST_CASE("H = 1/2 reduces to the classical estimator") {
    const ProcessSpec spec(0.5, 1.0, TimeGrid(10.0, 500));
    const EstimationPipeline pipe(spec);
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
      RandomStream rng(123, rep);
      const auto path = sample_mixed_path(spec, rng);
      const auto tp = transform_path(path, pipe.kernel(), pipe.qv());
      const auto rec = mle(tp, pipe.qv());
      double num = 0, den = 0;
      const double dt = spec.grid.step();
      for (std::size_t i = 0; i < 500; ++i) {
        num += path.x[i] * (path.x[i + 1] - path.x[i]);
        den += 0.5 * (path.x[i] * path.x[i] + path.x[i + 1] * path.x[i + 1]) * dt;
      }
      CHECK(std::abs(rec.theta_hat - (-num / den)) < 1e-8);
    }
  }

  TEST_CASE("consistency at T = 50") {
    const ProcessSpec spec(0.7, 1.0, TimeGrid(50.0, 1000));
    const EstimationPipeline pipe(spec);
    double sum = 0, sq = 0;
    const int reps = 500;
    for (int r = 0; r < reps; ++r) {
      const double th = pipe.run(2024, static_cast<std::uint64_t>(r)).theta_hat;
      sum += th;
      sq += th * th;
    }
    const double mean = sum / reps;
    const double sd = std::sqrt(sq / reps - mean * mean);
    CHECK(std::abs(mean - 1.0) < 0.05);
    CHECK(sd < 0.35);
  }

  TEST_CASE("log-likelihood and score") {
    const ProcessSpec spec(0.7, 1.0, TimeGrid(5.0, 200));
    const EstimationPipeline pipe(spec);
    RandomStream rng(8, 3);
    const auto path = sample_mixed_path(spec, rng);
    const auto tp = transform_path(path, pipe.kernel(), pipe.qv());
    const double th = mle(tp, pipe.qv()).theta_hat;
    CHECK(std::abs(score(th, tp, pipe.qv())) < 1e-10);
    for (double d : {-0.5, -0.1, 0.1, 0.5}) CHECK(log_likelihood(th + d, tp, pipe.qv()) < log_likelihood(th, tp, pipe.qv()));
    const double h = 1e-5;
    const double fd = (log_likelihood(0.7 + h, tp, pipe.qv()) - log_likelihood(0.7 - h, tp, pipe.qv())) / (2 * h);
    CHECK(fd == doctest::Approx(score(0.7, tp, pipe.qv())).epsilon(1e-6));
  }

  TEST_CASE("estimate is invariant to scaling the path") {
    const ProcessSpec spec(0.7, 1.0, TimeGrid(5.0, 100));
    const EstimationPipeline pipe(spec);
    RandomStream rng(4, 4);
    const auto path = sample_mixed_path(spec, rng);
    auto db = path.d_brownian, dh = path.d_fbm;
    for (auto& v : db) v *= 3.5;
    for (auto& v : dh) v *= 3.5;
    const auto scaled = assemble_path(spec, db, dh);
    const double a = mle(transform_path(path, pipe.kernel(), pipe.qv()), pipe.qv()).theta_hat;
    const double b = mle(transform_path(scaled, pipe.kernel(), pipe.qv()), pipe.qv()).theta_hat;
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
  }

  TEST_CASE("degenerate path") {
    const ProcessSpec spec(0.7, 1.0, TimeGrid(2.0, 40));
    const auto k = build_kernel(spec);
    const auto qv = quadratic_variation(k);
    RandomStream rng(1, 0);
    const auto path = sample_mixed_path(spec, rng, PathOptions{true});
    const auto tp = transform_path(path, k, qv);
    CHECK_THROWS_AS(mle(tp, qv), Error);
    try {
      mle(tp, qv);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::degenerate_path);
    }
  }

  TEST_CASE("martingale part of the numerator has variance E[den]") {
    // ∫Q dZ + θ∫Q² d⟨M⟩ = ∫Q dM, whose variance equals E ∫Q² d⟨M⟩.
    const ProcessSpec spec(0.7, 1.0, TimeGrid(5.0, 250));
    const EstimationPipeline pipe(spec);
    const int reps = 4000;
    double s = 0, s2 = 0, dsum = 0;
    for (int r = 0; r < reps; ++r) {
      const auto rec = pipe.run(77, static_cast<std::uint64_t>(r));
      const double m = rec.numerator + rec.denominator;
      s += m;
      s2 += m * m;
      dsum += rec.denominator;
    }
    const double var = s2 / reps - (s / reps) * (s / reps);
    CHECK(var / (dsum / reps) == doctest::Approx(1.0).epsilon(0.1));
  }

  TEST_CASE("estimates csv") {
    std::ostringstream out;
    write_estimates_header(out);
    CHECK(out.str() == "rep_id,H,theta_true,T,n,theta_hat,numerator,denominator,interpolated_kernel\n");
    EstimateRecord rec;
    rec.theta_hat = 0.5;
    rec.horizon = 5;
    rec.hurst = 0.7;
    write_estimate_row(out, rec, 1.0, 250);
    CHECK(out.str().find("\n0,0.69999999999999996,1,5,250,0.5,0,0,0\n") != std::string::npos);
  }

  TEST_CASE("pipeline rejects a kernel for another process") {
    const ProcessSpec spec(0.7, 1.0, TimeGrid(2.0, 40));
    auto k = build_kernel(ProcessSpec(0.6, 1.0, TimeGrid(2.0, 40)));
    CHECK_THROWS_AS(EstimationPipeline(spec, std::move(k)), Error);
  }
}
