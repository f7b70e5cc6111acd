#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "mfou/csv.hpp"
#include "mfou/error.hpp"
#include "mfou/numerics/grid.hpp"
#include "mfou/numerics/linalg.hpp"
#include "mfou/numerics/parallel.hpp"
#include "mfou/numerics/quadrature.hpp"
#include "mfou/numerics/random.hpp"
#include "mfou/paths.hpp"
#include "mfou/transform.hpp"

using namespace mfou;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::domain_error;
}

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("time grid") {
    const TimeGrid g(2.0, 8);
    CHECK(g.step() == doctest::Approx(0.25));
    CHECK(g.node(0) == 0.0);
    CHECK(g.node(8) == 2.0);
    for (std::size_t k = 0; k < 8; ++k) CHECK(g.node(k + 1) > g.node(k));
    CHECK(g.index_of(1.0) == 4);
    CHECK(code_of([] { TimeGrid(1.0, 7); }) == Errc::grid_too_coarse);
    CHECK(code_of([] { TimeGrid(-1.0, 16); }) == Errc::domain_error);
    CHECK(code_of([&] { g.index_of(2.5); }) == Errc::node_out_of_range);
    CHECK(code_of([&] { require_same_grid(g, TimeGrid(2.0, 16), "test"); }) == Errc::grid_mismatch);
  }

  TEST_CASE("random streams are counter based") {
    RandomStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    std::vector<double> xa, xb, xc, xd;
    for (int i = 0; i < 100; ++i) {
      xa.push_back(a.normal());
      xb.push_back(b.normal());
      xc.push_back(c.normal());
      xd.push_back(d.normal());
    }
    CHECK(xa == xb);
    CHECK(xa != xc);
    CHECK(xa != xd);
    RandomStream e(42, 7);
    CHECK(e.substream(0)() != e.substream(1)());
    CHECK(e.substream(3)() == RandomStream(42, 7).substream(3)());
  }

  TEST_CASE("normal draws have unit variance") {
    RandomStream r(1, 0);
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double z = r.normal();
      s += z;
      s2 += z * z;
    }
    CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
    for (int i = 0; i < 1000; ++i) {
      const double u = r.uniform();
      CHECK((u > 0.0 && u < 1.0));
    }
  }

  TEST_CASE("cholesky examples") {
    const Matrix id = Matrix::Identity(3, 3);
    CHECK((cholesky_factor(SymmetricMatrix(id)) - id).norm() == 0.0);

    Matrix c(2, 2);
    c << 4, 2, 2, 5;
    Matrix expected(2, 2);
    expected << 2, 0, 1, 2;
    CHECK((cholesky_factor(SymmetricMatrix(c)) - expected).cwiseAbs().maxCoeff() < 1e-15);

    const TimeGrid g(1.0, 64);
    Matrix cov(64, 64);
    for (int i = 0; i < 64; ++i)
      for (int j = 0; j < 64; ++j) cov(i, j) = fgn_autocovariance(std::abs(i - j), g.step(), 0.75);
    const Matrix l = cholesky_factor(SymmetricMatrix(cov));
    const Matrix rebuilt = l * l.transpose();
    CHECK(((rebuilt - cov).cwiseAbs().array() / cov.cwiseAbs().maxCoeff()).maxCoeff() < 1e-10);
  }

  TEST_CASE("cholesky rejects indefinite input and jitter rescues a singular one") {
    Matrix c(2, 2);
    c << 1, 2, 2, 1;
    CHECK(code_of([&] { cholesky_factor(SymmetricMatrix(c)); }) == Errc::not_positive_definite);
    try {
      cholesky_factor(SymmetricMatrix(c));
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("pivot 1") != std::string::npos);
    }
    Matrix s(2, 2);
    s << 1, 1, 1, 1;
    const auto j = cholesky_with_jitter(SymmetricMatrix(s));
    CHECK(j.jitter > 0.0);
    CHECK(j.escalations <= 3);
    CHECK(code_of([] {
            Matrix a(2, 2);
            a << 1, 0, 1e-3, 1;
            SymmetricMatrix{a};
          }) == Errc::domain_error);
  }

  TEST_CASE("dense solve") {
    const Vector r = Vector::LinSpaced(4, 1, 4);
    CHECK((solve_dense(Matrix::Identity(4, 4), r) - r).norm() == 0.0);
    CHECK((solve_dense(2.0 * Matrix::Identity(4, 4), Vector::Ones(4)) - 0.5 * Vector::Ones(4)).norm() < 1e-15);
    CHECK(code_of([] { solve_dense(Matrix::Zero(3, 3), Vector::Ones(3)); }) == Errc::singular);

    const auto c = collocation_coefficients(0.5, 0.1, 16);
    Matrix a(16, 16);
    for (int i = 0; i < 16; ++i)
      for (int k = 0; k < 16; ++k) a(i, k) = c[std::abs(i - k)];
    const Vector x = solve_dense(a, Vector::Ones(16));
    CHECK((x.array() - 0.5).abs().maxCoeff() < 1e-12);
  }

  TEST_CASE("nested Levinson matches dense solves") {
    const auto c = collocation_coefficients(0.8, 0.05, 40);
    const std::vector<double> rhs(40, 1.0);
    std::size_t visited = 0;
    solve_toeplitz_nested(c, rhs, [&](std::size_t m, std::span<const double> x) {
      ++visited;
      Matrix a(m, m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < m; ++k) a(i, k) = c[i > k ? i - k : k - i];
      const Vector dense = solve_dense(a, Vector::Ones(static_cast<Eigen::Index>(m)));
      for (std::size_t i = 0; i < m; ++i) CHECK(x[i] == doctest::Approx(dense[i]).epsilon(1e-11));
      CHECK(toeplitz_residual(c, x, std::span<const double>(rhs).first(m)) < 1e-12);
    });
    CHECK(visited == 40);
  }

  TEST_CASE("trapezoid rule") {
    const TimeGrid g(1.0, 100);
    std::vector<double> one(101, 1.0), t(101), t2(101);
    for (std::size_t k = 0; k <= 100; ++k) {
      t[k] = g.node(k);
      t2[k] = t[k] * t[k];
    }
    CHECK(trapezoid_integral(one, g) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(trapezoid_integral(t, g) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(trapezoid_integral(t2, g) - 1.0 / 3.0) < 1e-4);
    CHECK(code_of([&] { trapezoid_integral(std::span<const double>(t).first(50), g); }) == Errc::length_mismatch);
    // against integrator increments
    const std::vector<double> dg(100, 0.02);
    CHECK(trapezoid_integral(one, dg) == doctest::Approx(2.0));
    CHECK(trapezoid_integral(t2, dg) >= 0.0);
  }

  TEST_CASE("ito sums") {
    const std::vector<double> zero(11, 0.0), one(11, 1.0);
    std::vector<double> g(11);
    for (int k = 0; k <= 10; ++k) g[k] = std::sin(k) + 3.0;
    for (double v : ito_sum(zero, g)) CHECK(v == 0.0);
    const auto s = ito_sum(one, g);
    CHECK(s[0] == 0.0);
    for (int k = 0; k <= 10; ++k) CHECK(s[k] == doctest::Approx(g[k] - g[0]));

    // linearity and additivity over adjacent windows
    std::vector<double> f(11), h(11), comb(11);
    for (int k = 0; k <= 10; ++k) {
      f[k] = k * 0.3;
      h[k] = std::cos(k);
      comb[k] = 2 * f[k] - h[k];
    }
    const auto sf = ito_sum(f, g), sh = ito_sum(h, g), sc = ito_sum(comb, g);
    for (int k = 0; k <= 10; ++k) CHECK(sc[k] == doctest::Approx(2 * sf[k] - sh[k]));
    const auto tail = ito_sum(std::span<const double>(f).subspan(4), std::span<const double>(g).subspan(4));
    CHECK(sf[10] == doctest::Approx(sf[4] + tail.back()));
    CHECK(code_of([&] { ito_sum(std::span<const double>(f).first(5), g); }) == Errc::length_mismatch);
  }

  TEST_CASE("ito sum of W dW against (W_T^2 - T)/2") {
    const std::size_t n = 10000, reps = 1000;
    const double T = 1.0, dt = T / n;
    double sum = 0, sum2 = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      RandomStream rng(99, r);
      std::vector<double> w(n + 1, 0.0);
      for (std::size_t k = 0; k < n; ++k) w[k + 1] = w[k] + std::sqrt(dt) * rng.normal();
      const double d = ito_sum(w, w).back() - (w[n] * w[n] - T) / 2;
      sum += d;
      sum2 += d * d;
    }
    const double mean = sum / reps, sd = std::sqrt(sum2 / reps - mean * mean);
    CHECK(std::abs(mean) < 3 * sd / std::sqrt(double(reps)) + 1e-12);
    CHECK(sd < 0.05);
  }

  TEST_CASE("finite differences") {
    const TimeGrid g(1.0, 100);
    std::vector<double> ramp(101), sq(101), c(101, 4.0);
    for (std::size_t k = 0; k <= 100; ++k) {
      ramp[k] = 3.0 * g.node(k);
      sq[k] = g.node(k) * g.node(k);
    }
    for (double d : finite_diff_derivative(ramp, g)) CHECK(d == doctest::Approx(3.0).epsilon(1e-10));
    const auto d2 = finite_diff_derivative(sq, g);
    for (std::size_t k = 1; k < 100; ++k) CHECK(std::abs(d2[k] - 2 * g.node(k)) < 1e-3);
    for (double d : finite_diff_derivative(c, g)) CHECK(std::abs(d) < 1e-12);
    CHECK(code_of([&] { finite_diff_derivative(std::span<const double>(sq).first(20), g); }) == Errc::length_mismatch);
  }

  TEST_CASE("parallel_for is schedule independent") {
    std::vector<double> one(1000), four(1000);
    auto body = [](std::vector<double>& out) {
      return [&out](std::size_t i) {
        RandomStream r(5, i);
        out[i] = r.normal();
      };
    };
    parallel_for(1000, 1, body(one));
    parallel_for(1000, 4, body(four));
    CHECK(one == four);
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                      if (i == 7) throw Error(Errc::blow_up, "x");
                    }),
                    Error);
    CHECK(default_thread_budget() >= 1);
  }

  TEST_CASE("csv number formatting") {
    CHECK(csv::number(0.1) == "0.10000000000000001");
    CHECK(csv::number(2.0) == "2");
    CHECK(csv::number(std::nan("")) == "nan");
    CHECK(csv::split_row("a,b,,c") == std::vector<std::string>{"a", "b", "", "c"});
  }
}
