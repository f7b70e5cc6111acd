#include <doctest.h>

#include <cmath>
#include <limits>

#include "mfou/error.hpp"
#include "mfou/ldp/analytic.hpp"
#include "mfou/ldp/monte_carlo.hpp"
#include "mfou/ldp/riccati.hpp"

using namespace mfou;
using namespace mfou::ldp;

namespace {

const QVTable& qv_h07_t5() {
  static const QVTable qv = quadratic_variation(0.7, TimeGrid(5.0, 500));
  return qv;
}

double chernoff_rate(double x, double theta) { return (x - theta) * (x - theta) / (4 * x); }

}  // namespace

TEST_SUITE("ldp") {
  TEST_CASE("cgf_limit") {
    CHECK(*cgf_limit(0, 0, 1.7) == 0.0);
    CHECK(*cgf_limit(1, 0, 1) == doctest::Approx(-0.5));
    CHECK_FALSE(cgf_limit(0, 1, 1).has_value());
    CHECK_FALSE(cgf_limit(0.3, 0.5, 1).has_value());
    const double a = 0.4;
    CHECK(*cgf_limit(a, 0.5 - 1e-12, 1) == doctest::Approx(-0.5 * (a - 1)).epsilon(1e-5));
  }

  TEST_CASE("k_limit") {
    CHECK(*k_limit(0, 2.5) == 0.0);
    CHECK(*k_limit(1.5, 1) == doctest::Approx(-0.5));
    CHECK_FALSE(k_limit(-1, 1).has_value());
    CHECK_FALSE(k_limit(-0.5, 1).has_value());
    CHECK(k_limit(-0.5 + 1e-9, 1).has_value());
    CHECK(*k_limit(0.5, 1) == doctest::Approx(0.5 - std::sqrt(0.5)));
  }

  TEST_CASE("printed rate function") {
    CHECK(rate_function_printed(-1, 1) == 0.0);
    CHECK(rate_function_printed(0, 1) == 1.0);
    CHECK(rate_function_printed(-1.0 / 3, 1) == doctest::Approx(1.0 / 3));
    const double left = -(-1.0 / 3 - 1e-12 + 1) * (-1.0 / 3 - 1e-12 + 1) / (4 * (-1.0 / 3 - 1e-12));
    CHECK(left == doctest::Approx(1.0 / 3));
    for (double theta : {0.5, 1.0, 2.0})
      for (double x = -10; x <= 10; x += 0.01) {
        const double v = rate_function_printed(x, theta);
        CHECK(v >= 0.0);
        if (std::abs(x + theta) > 1e-9) CHECK(v > 0.0);
      }
  }

  TEST_CASE("numeric rate under the chernoff convention") {
    RateQuery q{1.0, 1.0, SignConvention::chernoff};
    auto r = rate_function_numeric(q);
    CHECK(std::abs(r.value) < 1e-12);
    CHECK(std::abs(r.argmin) < 1e-6);
    q.x = 2;
    r = rate_function_numeric(q);
    CHECK(r.value == doctest::Approx(1.0 / 8).epsilon(1e-9));
    CHECK(r.argmin == doctest::Approx(-0.75).epsilon(1e-4));
    CHECK(r.convention == SignConvention::chernoff);
    for (double x : {0.2, 0.5, 0.9, 1.1, 1.5, 3.0, 7.0}) {
      q.x = x;
      const auto v = rate_function_numeric(q).value;
      CHECK(v > 0.0);
      CHECK(v == doctest::Approx(chernoff_rate(x, 1)).epsilon(1e-8));
      if (x > 1.0 / 3) CHECK(v == doctest::Approx(rate_function_printed(-x, 1)).epsilon(1e-8));
    }
    q.x = -0.5;
    CHECK(rate_function_numeric(q).unbounded_below);
  }

  TEST_CASE("numeric rate under the printed convention") {
    RateQuery q{-1.0, 1.0, SignConvention::printed};
    const auto r = rate_function_numeric(q);
    CHECK(std::abs(r.value) < 1e-12);
    for (double x : {-3.0, -2.0, -0.5}) {
      q.x = x;
      CHECK(rate_function_numeric(q).value == doctest::Approx(rate_function_printed(x, 1)).epsilon(1e-8));
    }
    q.x = 0.5;
    const auto u = rate_function_numeric(q);
    CHECK(u.unbounded_below);
    CHECK(std::isinf(u.value));
  }

  TEST_CASE("riccati matrices") {
    const auto one = riccati_matrices(1.0);
    CHECK(one.A.isApprox(Mat2::Ones()));
    CHECK(one.R.isApprox(Mat2::Ones()));
    CHECK(one.B.isApprox(Mat2::Ones()));
    const Mat2 j = swap_matrix();
    for (double psi : {0.3, 1.7, 2.0, 9.0}) {
      const auto m = riccati_matrices(psi);
      CHECK((m.R - j * m.A).norm() < 1e-14);
      CHECK((m.B - m.A * j).norm() < 1e-14);
      CHECK(std::abs(m.A.determinant()) < 1e-14);
      CHECK(m.A.trace() == 2.0);
    }
    CHECK_THROWS_AS(riccati_matrices(0.0), Error);
    CHECK_THROWS_AS(riccati_matrices(-1.0), Error);
  }

  TEST_CASE("riccati run at H = 1/2 stays bounded") {
    const auto qv = quadratic_variation(0.5, TimeGrid(20.0, 1000));
    const auto run = solve_riccati(1.0, 0.5, qv, 20.0);
    CHECK_FALSE(run.blew_up);
    CHECK(run.last_node == 1000);
    double worst = 0;
    for (const auto& g : run.gamma) worst = std::max(worst, g.cwiseAbs().maxCoeff());
    CHECK(worst < 10.0);
    CHECK(run.min_eigenvalue > -1e-10);
    CHECK(run.gamma[0].isZero());
  }

  TEST_CASE("riccati run is positive semidefinite at H = 0.7") {
    const auto run = solve_riccati(1.0, 0.5, qv_h07_t5(), 5.0);
    CHECK_FALSE(run.blew_up);
    for (const auto& g : run.gamma) {
      Eigen::SelfAdjointEigenSolver<Mat2> es(g);
      CHECK(es.eigenvalues().minCoeff() > -1e-10);
      CHECK((g - g.transpose()).norm() == 0.0);
    }
  }

  TEST_CASE("mu = 0 gives zero in both routes") {
    const auto run = solve_riccati(1.0, 0.0, qv_h07_t5(), 5.0);
    CHECK(k_T_via_riccati(run) == 0.0);
    CHECK(std::abs(k_T_via_liouville(1.0, 0.0, qv_h07_t5(), 5.0)) < 1e-6);
  }

  TEST_CASE("linearized ratio matches the riccati solution") {
    const auto& qv = qv_h07_t5();
    const auto ric = solve_riccati(1.0, 0.5, qv, 5.0);
    const auto lin = solve_linearized(1.0, 0.5, qv, 5.0);
    CHECK(lin.det_positive);
    for (std::size_t k = 60; k <= 500; k += 60) {
      const Mat2 a = lin.gamma(k), b = ric.gamma[k];
      CHECK((a - b).norm() / b.norm() < 1e-6);
    }
    CHECK(std::abs(k_T_via_riccati(ric) - k_T_via_liouville(lin)) < 1e-4);
  }

  TEST_CASE("decoupled linearized system") {
    const auto& qv = qv_h07_t5();
    const auto lin = solve_linearized(0.0, 0.0, qv, 5.0);
    CHECK((lin.psi1[500] - Mat2::Identity()).norm() < 1e-8);
    CHECK(std::abs(lin.log_det_psi1[500]) < 1e-8);
    Mat2 integral = Mat2::Zero();
    for (std::size_t k = 1; k < 500; ++k) {
      const double h = qv.grid.step();
      integral += 0.5 * h * (riccati_matrices(qv.psi_diag[k]).B + riccati_matrices(qv.psi_diag[k + 1]).B);
    }
    integral += riccati_matrices(qv.psi_diag[1]).B * qv.grid.step();
    CHECK((lin.psi2[500] - integral).norm() / integral.norm() < 1e-3);
  }

  TEST_CASE("eigen split") {
    auto e = eigen_split(2, 0);
    CHECK(e.lambda == 1.0);
    CHECK(e.a_plus == 2.0);
    CHECK(e.a_minus == 0.0);
    e = eigen_split(1, 1.5);
    CHECK(e.lambda == doctest::Approx(1.0));
    CHECK(e.a_plus == doctest::Approx(1.5));
    CHECK(e.a_minus == doctest::Approx(-0.5));
    CHECK_THROWS_AS(eigen_split(1, -1), Error);
  }

  TEST_CASE("M equation") {
    const auto& qv = qv_h07_t5();
    const auto still = solve_M_equation(0.0, qv, 5.0);
    for (std::size_t k = 0; k <= still.last_node; ++k) CHECK(still.trace(k) == doctest::Approx(-2.0));
    CHECK(still.max_bound_ratio <= 1.0);
    const auto run = solve_M_equation(0.75, qv, 5.0);
    CHECK(run.trace(0) == -2.0);
    CHECK(run.max_bound_ratio > 0.0);
  }

  TEST_CASE("M equation with constant A has tr M = -(1 + e^{4 lambda t})") {
    const auto qv = quadratic_variation(0.5, TimeGrid(2.0, 400));
    const double lambda = 0.75;
    const auto run = solve_M_equation(lambda, qv, 2.0);
    for (std::size_t k : {100, 200, 400}) {
      const double t = qv.grid.node(k);
      CHECK(run.trace(k) == doctest::Approx(-(1 + std::exp(4 * lambda * t))).epsilon(0.02));
    }
  }

  TEST_CASE("girsanov weight") {
    CHECK(ldp::girsanov_log_weight(-1.0, 1.0, 3.7, 11.0) == 0.0);
    CHECK(ldp::girsanov_log_weight(0.5, 1.0, 2.0, 4.0) == doctest::Approx(1.5 * 2.0 - (0.25 - 1.0) / 2 * 4.0));
  }

  TEST_CASE("clopper pearson") {
    auto [lo, hi] = clopper_pearson(0, 100);
    CHECK(lo == 0.0);
    CHECK(hi == doctest::Approx(0.0362).epsilon(0.01));
    std::tie(lo, hi) = clopper_pearson(50, 100);
    CHECK(lo == doctest::Approx(0.3983).epsilon(0.01));
    CHECK(hi == doctest::Approx(0.6017).epsilon(0.01));
    std::tie(lo, hi) = clopper_pearson(100, 100);
    CHECK(hi == 1.0);
  }

  TEST_CASE("log mean exp") {
    std::vector<double> x{1000.0, 1000.0};
    const auto r = log_mean_exp(x);
    CHECK(r.value == doctest::Approx(1000.0));
    CHECK(r.ess == doctest::Approx(2.0));
    CHECK(r.top_share == doctest::Approx(0.5));
  }

  TEST_CASE("Monte Carlo routes at H = 0.7, T = 5") {
    const ProcessSpec spec(0.7, 1.0, TimeGrid(5.0, 250));
    const EstimationPipeline pipe(spec);
    const auto batch = simulate_estimates(pipe, 31, 10000, 0);
    CHECK(batch.records.size() + batch.degenerate == 10000);

    const auto zero = empirical_cgf(batch.records, 0, 0, 5.0, 1);
    CHECK(zero.value == 0.0);

    const auto mc = empirical_cgf(batch.records, 0.0, -0.5, 5.0, 2);
    const double ric = k_T_via_riccati(solve_riccati(1.0, 0.5, pipe.qv(), 5.0));
    CHECK(std::abs(mc.value - ric) < 3 * mc.std_error + 2e-3);
    CHECK_FALSE(mc.unreliable);

    const auto dm = doleans_mean(batch.records, -0.5, 1.0);
    CHECK(std::abs(dm.mean - 1.0) < 3 * dm.std_error);
  }

  TEST_CASE("tilted and plain tail estimates agree") {
    const ProcessSpec spec(0.7, 1.0, TimeGrid(10.0, 400));
    const EstimationPipeline pipe(spec);
    const auto plain = simulate_estimates(pipe, 41, 4000, 0);
    const auto tilted = simulate_estimates(pipe, 42, 4000, 0, 1.3);
    const auto p = tail_probability(plain.records, 1.3);
    const auto q = tail_probability_tilted(tilted.records, 1.0, -1.3, 1.3);
    CHECK(p.ci_low <= p.probability);
    CHECK(p.probability <= p.ci_high);
    CHECK(q.tilted);
    CHECK(q.simulation_drift == 1.3);
    CHECK(q.ci_low <= p.ci_high);
    CHECK(p.ci_low <= q.ci_high);
    const auto lower = tail_probability(plain.records, 0.9, false);
    CHECK(lower.probability > 0.3);
  }

  TEST_CASE("K_T approaches the limit") {
    const auto qv = quadratic_variation(0.7, TimeGrid(80.0, 1600));
    const double limit = *k_limit(0.5, 1.0);
    const auto run = solve_riccati(1.0, 0.5, qv, 80.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double T : {10.0, 20.0, 40.0, 80.0}) {
      const double d = std::abs(k_T_via_riccati(run, qv.grid.index_of(T)) - limit);
      CHECK(d < prev);
      prev = d;
    }
    CHECK(prev < 0.05);
  }
}
