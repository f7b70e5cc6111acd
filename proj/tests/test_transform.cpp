#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "mfou/error.hpp"
#include "mfou/inference.hpp"
#include "mfou/paths.hpp"
#include "mfou/transform.hpp"

using namespace mfou;

namespace {

// Covariance of the mixed increments ΔB̃_i on the grid: Δ·I + fGn autocovariance.
Matrix mixed_increment_covariance(double hurst, const TimeGrid& grid, std::size_t m) {
  Matrix c(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      c(i, j) = fgn_autocovariance(i > j ? i - j : j - i, grid.step(), hurst) + (i == j ? grid.step() : 0.0);
  return c;
}

Vector column_vector(const TransferKernel& k, std::size_t j, std::size_t pad) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(pad));
  const auto col = k.column(j);
  for (std::size_t i = 0; i < j; ++i) v[static_cast<Eigen::Index>(i)] = col[i];
  return v;
}

double martingale_variance(const TransferKernel& k, std::size_t j) {
  const Matrix c = mixed_increment_covariance(k.hurst(), k.grid(), j);
  const Vector g = column_vector(k, j, j);
  return g.dot(c * g);
}

}  // namespace

TEST_SUITE("transform") {
  TEST_CASE("collocation coefficients at H = 1/2") {
    const auto c = collocation_coefficients(0.5, 0.1, 6);
    CHECK(c[0] == doctest::Approx(2.0));
    for (std::size_t k = 1; k < 6; ++k) CHECK(std::abs(c[k]) < 1e-15);
  }

  TEST_CASE("solve_g") {
    const TimeGrid grid(1.0, 128);
    for (std::size_t j : {1, 17, 128}) {
      const auto col = solve_g(0.5, j, grid);
      for (double v : col.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
    }
    const auto col = solve_g(0.7, 128, grid);
    CHECK(col.residual <= 1e-10);
    CHECK(col.values.size() == 128);
    CHECK_THROWS_AS(solve_g(0.7, 0, grid), Error);
  }

  TEST_CASE("martingale variance oracle at H = 0.7, t = 1") {
    const ProcessSpec spec(0.7, 1.0, TimeGrid(1.0, 128));
    const auto k = build_kernel(spec);
    const auto qv = quadratic_variation(k);
    CHECK(std::abs(martingale_variance(k, 128) / qv.bracket[128] - 1.0) < 0.01);
  }

  TEST_CASE("martingale variance oracle at H = 0.75, t = 1") {
    const ProcessSpec spec(0.75, 1.0, TimeGrid(1.0, 200));
    const auto k = build_kernel(spec);
    const auto qv = quadratic_variation(k);
    CHECK(std::abs(martingale_variance(k, 200) / qv.bracket[200] - 1.0) < 0.01);
  }

  TEST_CASE("martingale orthogonality E[M_s M_t] = <M>_s") {
    const ProcessSpec spec(0.8, 1.0, TimeGrid(2.0, 160));
    const auto k = build_kernel(spec);
    const auto qv = quadratic_variation(k);
    const Matrix c = mixed_increment_covariance(0.8, spec.grid, 160);
    const Vector gt = column_vector(k, 160, 160);
    for (std::size_t s : {20, 60, 100, 140}) {
      const Vector gs = column_vector(k, s, 160);
      CHECK(std::abs(gs.dot(c * gt) / qv.bracket[s] - 1.0) < 0.01);
    }
  }

  TEST_CASE("kernel at H = 1/2 and its bracket") {
    const ProcessSpec spec(0.5, 1.0, TimeGrid(3.0, 64));
    const auto k = build_kernel(spec);
    for (std::size_t j = 1; j <= 65; ++j)
      for (double v : k.column(j)) CHECK(std::abs(v - 0.5) < 1e-9);
    const auto qv = quadratic_variation(k);
    for (std::size_t i = 0; i <= 64; ++i) {
      CHECK(std::abs(qv.bracket[i] - spec.grid.node(i) / 2) < 1e-8);
      CHECK(std::abs(qv.psi_diag[i] - 2.0) < 1e-8);
    }
    for (double s : {0.0, 1.5, 3.0})
      for (double t : {0.75, 3.0}) CHECK(std::abs(psi_offdiag(s, t, qv) - 2.0) < 1e-8);
  }

  TEST_CASE("residuals at n = 128, H = 0.7") {
    const ProcessSpec spec(0.7, 1.0, TimeGrid(1.0, 128));
    const auto k = build_kernel(spec);
    CHECK(k.checked_columns() == 129);
    CHECK(k.max_residual() <= 1e-9);
    CHECK_FALSE(k.interpolated());
  }

  TEST_CASE("Levinson and dense routes agree") {
    const ProcessSpec spec(0.65, 1.0, TimeGrid(4.0, 96));
    const auto lev = build_kernel(spec);
    KernelOptions dense;
    dense.method = KernelMethod::dense;
    const auto den = build_kernel(spec, dense);
    for (std::size_t j = 1; j <= 97; ++j) {
      const auto a = lev.column(j), b = den.column(j);
      for (std::size_t i = 0; i < j; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10));
    }
  }

  TEST_CASE("thinned dense route flags interpolation") {
    const ProcessSpec spec(0.7, 6.0, TimeGrid(6.0, 600));
    KernelOptions dense;
    dense.method = KernelMethod::dense;
    const auto den = build_kernel(spec, dense);
    CHECK(den.interpolated());
    CHECK(den.interpolated_columns() > 0);
    CHECK(den.interpolation_deviation() < 1e-2);
    const auto lev = build_kernel(spec);
    const auto a = quadratic_variation(den), b = quadratic_variation(lev);
    CHECK(std::abs(a.bracket.back() / b.bracket.back() - 1.0) < 1e-3);
  }

  TEST_CASE("bracket is increasing and psi consistent for H in 0.55..0.95") {
    for (double h = 0.55; h < 0.96; h += 0.05) {
      CAPTURE(h);
      const ProcessSpec spec(h, 1.0, TimeGrid(5.0, 256));
      const auto qv = quadratic_variation(build_kernel(spec));
      CHECK(qv.bracket[0] == 0.0);
      for (std::size_t i = 0; i < 256; ++i) CHECK(qv.bracket[i + 1] > qv.bracket[i]);
      for (std::size_t i = 1; i < 256; ++i) {
        CHECK(qv.psi_diag[i] > 0.0);
        CHECK(std::abs(qv.psi_diag[i] * qv.dbracket[i] - 1.0) < 1e-8);
      }
    }
  }

  TEST_CASE("grid refinement changes <M>_T by under 0.5%") {
    for (double h : {0.55, 0.7, 0.85, 0.95}) {
      CAPTURE(h);
      const double a = quadratic_variation(h, TimeGrid(5.0, 256)).bracket.back();
      const double b = quadratic_variation(h, TimeGrid(5.0, 512)).bracket.back();
      CHECK(std::abs(a / b - 1.0) < 0.005);
    }
  }

  TEST_CASE("streaming bracket matches the stored kernel") {
    const ProcessSpec spec(0.7, 1.0, TimeGrid(5.0, 200));
    const auto a = quadratic_variation(build_kernel(spec));
    const auto b = quadratic_variation(0.7, spec.grid);
    for (std::size_t i = 0; i <= 200; ++i) CHECK(a.bracket[i] == doctest::Approx(b.bracket[i]).epsilon(1e-13));
    CHECK(a.bracket_lookahead == doctest::Approx(b.bracket_lookahead).epsilon(1e-13));
  }

  TEST_CASE("psi off-diagonal") {
    const ProcessSpec spec(0.7, 1.0, TimeGrid(2.0, 64));
    const auto qv = quadratic_variation(build_kernel(spec));
    CHECK(psi_offdiag(0.5, 0.5, qv) == doctest::Approx(qv.psi_diag[16]));
    CHECK(psi_offdiag(0.5, 1.5, qv) == psi_offdiag(1.5, 0.5, qv));
    CHECK_THROWS_AS(psi_offdiag(0.5, 3.0, qv), Error);
  }

  TEST_CASE("inverse kernel round trip") {
    for (double h : {0.5, 0.7}) {
      CAPTURE(h);
      const ProcessSpec spec(h, 1.0, TimeGrid(5.0, 512));
      const auto k = build_kernel(spec);
      const auto qv = quadratic_variation(k);
      const auto inv = inverse_kernel(k, qv);
      for (std::size_t j = 1; j <= 512; j += 37)
        for (double v : inv.column(j)) CHECK(std::isfinite(v));
      RandomStream rng(17, 0);
      const auto path = sample_mixed_path(spec, rng);
      const auto z = compute_Z(path, k);
      const auto x = reconstruct_X(z, inv);
      double err = 0, scale = 0;
      for (std::size_t i = 0; i <= 512; ++i) {
        err = std::max(err, std::abs(x[i] - path.x[i]));
        scale = std::max(scale, std::abs(path.x[i]));
      }
      CHECK(err / scale < (h == 0.5 ? 1e-8 : 1e-2));
    }
  }

  TEST_CASE("experimental H < 1/2 still passes the widened oracle") {
    const ProcessSpec spec(0.4, 1.0, TimeGrid(1.0, 128));
    CHECK(spec.experimental());
    const auto k = build_kernel(spec);
    const auto qv = quadratic_variation(k);
    CHECK(std::abs(martingale_variance(k, 128) / qv.bracket[128] - 1.0) < 0.05);
  }

  TEST_CASE("kernel cache serialization") {
    const ProcessSpec spec(0.7, 2.0, TimeGrid(2.0, 40));
    const auto k = build_kernel(spec);
    std::stringstream buf;
    save_kernel(buf, k);
    const auto back = load_kernel(buf, spec);
    for (std::size_t j = 1; j <= 41; ++j) {
      const auto a = k.column(j), b = back.column(j);
      CHECK(std::equal(a.begin(), a.end(), b.begin()));
    }
    CHECK(back.max_residual() == k.max_residual());
    std::stringstream again;
    save_kernel(again, k);
    const ProcessSpec other(0.6, 2.0, TimeGrid(2.0, 40));
    CHECK_THROWS_AS(load_kernel(again, other), Error);
    std::stringstream junk("not a kernel");
    CHECK_THROWS_AS(load_kernel(junk, spec), Error);
  }

  TEST_CASE("kernel and bracket csv") {
    const ProcessSpec spec(0.7, 1.0, TimeGrid(1.0, 8));
    const auto k = build_kernel(spec);
    std::ostringstream a, b;
    write_kernel_csv(a, k);
    write_bracket_csv(b, quadratic_variation(k));
    CHECK(a.str().rfind("s,t,g\n", 0) == 0);
    CHECK(b.str().rfind("t,bracket,psi\n", 0) == 0);
    const std::string text = a.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 36);
  }
}
