#include "mfou/ldp/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mfou/error.hpp"

namespace mfou::ldp {

RiccatiMatrices riccati_matrices(double psi) {
  if (!(psi > 0.0) || !std::isfinite(psi)) {
    throw Error(Errc::psi_not_positive, "psi(t,t) = " + std::to_string(psi));
  }
  const double r = std::sqrt(psi);
  RiccatiMatrices m;
  m.A << 1.0, 1.0 / psi, psi, 1.0;
  m.b << 1.0 / r, r;
  m.R << psi, 1.0, 1.0, 1.0 / psi;
  m.B << 1.0 / psi, 1.0, 1.0, psi;
  return m;
}

RiccatiMatrices riccati_matrices(double t, const QVTable& qv) { return riccati_matrices(qv.psi_at(t)); }

Mat2 swap_matrix() {
  Mat2 j;
  j << 0.0, 1.0, 1.0, 0.0;
  return j;
}

namespace {

template <class State>
double max_abs(const State& s) {
  return s.cwiseAbs().maxCoeff();
}

template <class State, class F>
State rk4(F& f, State y, double t0, double t1, int substeps) {
  const double h = (t1 - t0) / substeps;
  for (int s = 0; s < substeps; ++s) {
    const double t = t0 + s * h;
    const State k1 = f(t, y);
    const State k2 = f(t + h / 2, (y + (h / 2) * k1).eval());
    const State k3 = f(t + h / 2, (y + (h / 2) * k2).eval());
    const State k4 = f(t + h, (y + h * k3).eval());
    y += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return y;
}

// One grid cell with step doubling: accept when two successive refinements
// agree to the tolerance (relative to the state size), else halve again.
template <class State, class F>
State integrate_cell(F& f, const State& y0, double t0, double t1, const OdeOptions& o, int& level_used) {
  State coarse = rk4(f, y0, t0, t1, 1);
  State fine = coarse;
  for (int level = 1; level <= o.max_refinement; ++level) {
    fine = rk4(f, y0, t0, t1, 1 << level);
    const double err = max_abs((fine - coarse).eval()) / std::max(1.0, max_abs(fine));
    level_used = std::max(level_used, level);
    if (err <= o.local_tolerance || !std::isfinite(err)) break;
    coarse = fine;
  }
  return fine;
}

std::size_t last_node_for(const QVTable& qv, double horizon) {
  const std::size_t last = qv.grid.index_of(horizon);
  if (last < 1) throw Error(Errc::domain_error, "horizon shorter than one grid step");
  return last;
}

double min_eigen(const Mat2& g) {
  const double tr = g.trace(), det = g.determinant();
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
  return tr / 2 - disc;
}

}  // namespace

RiccatiRun solve_riccati(double theta, double mu, const QVTable& qv, double horizon, const OdeOptions& options) {
  RiccatiRun run{.theta = theta, .mu = mu, .grid = qv.grid};
  const std::size_t last = last_node_for(qv, horizon);
  const double dt = qv.grid.step();

  auto rhs = [&](double t, const Mat2& g) -> Mat2 {
    const RiccatiMatrices m = riccati_matrices(t, qv);
    return -(theta / 2) * (m.A * g + g * m.A.transpose()) - (mu / 2) * g * m.R * g + m.B;
  };

  run.gamma.reserve(last + 1);
  run.trace_gamma_r.reserve(last + 1);
  run.k_values.reserve(last + 1);
  run.gamma.push_back(Mat2::Zero());
  run.trace_gamma_r.push_back(0.0);
  run.k_values.push_back(0.0);

  Mat2 g = riccati_matrices(qv.grid.node(1), qv).B * dt;
  double integral = 0.0;
  run.min_eigenvalue = std::min(0.0, min_eigen(g));
  for (std::size_t k = 1;; ++k) {
    const double t = qv.grid.node(k);
    const double tr = (g * riccati_matrices(t, qv).R).trace();
    integral += 0.5 * dt * (run.trace_gamma_r.back() + tr);
    run.gamma.push_back(g);
    run.trace_gamma_r.push_back(tr);
    run.k_values.push_back(-mu / (4.0 * t) * integral);
    run.last_node = k;
    if (k == last) break;

    g = integrate_cell(rhs, g, t, qv.grid.node(k + 1), options, run.max_refinement_used);
    g = 0.5 * (g + g.transpose()).eval();
    if (!g.allFinite() || max_abs(g) > options.blowup_threshold) {
      run.blew_up = true;
      run.blowup_time = qv.grid.node(k + 1);
      break;
    }
    run.min_eigenvalue = std::min(run.min_eigenvalue, min_eigen(g));
  }
  return run;
}

double k_T_via_riccati(const RiccatiRun& run) {
  if (run.blew_up) {
    if (run.mu == 0.0) return 0.0;
    throw Error(Errc::blow_up, "Riccati solution blew up at t = " + std::to_string(run.blowup_time));
  }
  return k_T_via_riccati(run, run.last_node);
}

double k_T_via_riccati(const RiccatiRun& run, std::size_t node) {
  if (run.mu == 0.0) return 0.0;
  if (node > run.last_node) {
    throw Error(Errc::blow_up, "Riccati solution blew up at t = " + std::to_string(run.blowup_time));
  }
  return run.k_values[node];
}

Mat2 LinearizedRun::gamma(std::size_t k) const { return psi1.at(k).inverse() * psi2.at(k); }

LinearizedRun solve_linearized(double theta, double mu, const QVTable& qv, double horizon,
                               const OdeOptions& options) {
  using State = Eigen::Matrix<double, 2, 4>;
  LinearizedRun run{.theta = theta, .mu = mu, .grid = qv.grid};
  const std::size_t last = last_node_for(qv, horizon);
  const double dt = qv.grid.step();

  auto rhs = [&](double t, const State& y) -> State {
    const RiccatiMatrices m = riccati_matrices(t, qv);
    const Mat2 p1 = y.leftCols<2>(), p2 = y.rightCols<2>();
    State d;
    d.leftCols<2>() = (theta / 2) * p1 * m.A + (mu / 2) * p2 * m.R;
    d.rightCols<2>() = p1 * m.B - (theta / 2) * p2 * m.A.transpose();
    return d;
  };

  run.psi1.assign(last + 1, Mat2::Identity());
  run.psi2.assign(last + 1, Mat2::Zero());
  run.log_det_factor.assign(last + 1, 0.0);
  run.log_det_psi1.assign(last + 1, 0.0);
  run.det_sign.assign(last + 1, 1.0);

  State y;
  y.leftCols<2>() = Mat2::Identity();
  y.rightCols<2>() = riccati_matrices(qv.grid.node(1), qv).B * dt;
  run.head_trace = (y.rightCols<2>() * riccati_matrices(qv.grid.node(1), qv).R).trace();
  double log_factor = 0.0, factor_sign = 1.0;
  int level = 0;
  for (std::size_t k = 1;; ++k) {
    const Mat2 p1 = y.leftCols<2>();
    run.psi1[k] = p1;
    run.psi2[k] = y.rightCols<2>();
    run.log_det_factor[k] = log_factor;
    const double det = p1.determinant();
    run.det_sign[k] = det * factor_sign > 0.0 ? 1.0 : -1.0;
    if (!(det * factor_sign > 0.0)) run.det_positive = false;
    run.log_det_psi1[k] = std::log(std::abs(det)) + log_factor;
    run.last_node = k;
    if (k == last) break;

    if (k > 1) {
      if (det == 0.0 || !std::isfinite(det)) {
        throw Error(Errc::non_positive_det, "Psi1 singular at t = " + std::to_string(qv.grid.node(k)));
      }
      y = p1.inverse() * y;
      log_factor += std::log(std::abs(det));
      if (det < 0.0) factor_sign = -factor_sign;
    }
    y = integrate_cell(rhs, y, qv.grid.node(k), qv.grid.node(k + 1), options, level);
    if (!y.allFinite()) {
      throw Error(Errc::blow_up, "linearized system overflowed at t = " + std::to_string(qv.grid.node(k + 1)));
    }
  }
  return run;
}

double k_T_via_liouville(const LinearizedRun& run) { return k_T_via_liouville(run, run.last_node); }

double k_T_via_liouville(const LinearizedRun& run, std::size_t node) {
  if (node < 1 || node > run.last_node) {
    throw Error(Errc::node_out_of_range, "node " + std::to_string(node) + " outside the linearized run");
  }
  if (!(run.det_sign[node] > 0.0) || !std::isfinite(run.log_det_psi1[node])) {
    throw Error(Errc::non_positive_det, "det Psi1(T) is not positive at t = " + std::to_string(run.grid.node(node)));
  }
  const double T = run.grid.node(node), t1 = run.grid.node(1), dt = run.grid.step();
  return -run.log_det_psi1[node] / (2.0 * T) + run.theta * (T - t1) / (2.0 * T) -
         run.mu / (4.0 * T) * (dt / 2.0) * run.head_trace;
}

double k_T_via_liouville(double theta, double mu, const QVTable& qv, double horizon, const OdeOptions& options) {
  return k_T_via_liouville(solve_linearized(theta, mu, qv, horizon, options));
}

double MEquationRun::trace(std::size_t k) const { return trace_sign.at(k) * std::exp(log_abs_trace.at(k)); }

MEquationRun solve_M_equation(double lambda, const QVTable& qv, double horizon, const OdeOptions& options) {
  if (lambda < 0.0) throw Error(Errc::domain_error, "lambda must be nonnegative");
  MEquationRun run{.lambda = lambda, .grid = qv.grid};
  const std::size_t last = last_node_for(qv, horizon);
  const double dt = qv.grid.step();
  const double log_bound0 = std::log(2.0 * std::numbers::sqrt2);

  auto rhs = [&](double t, const Mat2& m) -> Mat2 {
    const Mat2 a = riccati_matrices(t, qv).A;
    return lambda * (a * m + m * a);
  };

  run.log_abs_trace.assign(last + 1, std::log(2.0));
  run.trace_sign.assign(last + 1, -1.0);
  run.bound_ratio.assign(last + 1, 0.0);
  run.bound_ratio[0] = 2.0 / (2.0 * std::numbers::sqrt2);
  run.max_bound_ratio = run.bound_ratio[0];

  const Mat2 a1 = riccati_matrices(qv.grid.node(1), qv).A;
  Mat2 m = -Mat2::Identity() - 2.0 * lambda * a1 * dt;
  double log_scale = 0.0;
  int level = 0;
  for (std::size_t k = 1;; ++k) {
    const double t = qv.grid.node(k);
    const double tr = m.trace();
    run.trace_sign[k] = tr < 0.0 ? -1.0 : 1.0;
    run.log_abs_trace[k] = std::log(std::abs(tr)) + log_scale;
    run.bound_ratio[k] = std::exp(run.log_abs_trace[k] - log_bound0 - 2.0 * lambda * t);
    if (run.bound_ratio[k] > run.max_bound_ratio) {
      run.max_bound_ratio = run.bound_ratio[k];
      run.worst_time = t;
    }
    run.last_node = k;
    if (k == last) break;

    m = integrate_cell(rhs, m, t, qv.grid.node(k + 1), options, level);
    if (!m.allFinite()) {
      throw Error(Errc::blow_up, "M equation overflowed at t = " + std::to_string(qv.grid.node(k + 1)));
    }
    const double s = max_abs(m);
    m /= s;
    log_scale += std::log(s);
  }
  return run;
}

}  // namespace mfou::ldp
