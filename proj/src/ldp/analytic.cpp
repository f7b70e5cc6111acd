#include "mfou/ldp/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mfou/error.hpp"

namespace mfou::ldp {

std::optional<double> cgf_limit(double a, double b, double theta) {
  const double disc = theta * theta - 2.0 * b;
  if (!(disc > 0.0)) return std::nullopt;
  return -0.5 * (a - theta + std::sqrt(disc));
}

std::optional<double> k_limit(double mu, double theta) {
  const double disc = theta * theta / 4.0 + mu / 2.0;
  if (!(disc > 0.0)) return std::nullopt;
  return theta / 2.0 - std::sqrt(disc);
}

double rate_function_printed(double x, double theta) {
  if (x < -theta / 3.0) return -(x + theta) * (x + theta) / (4.0 * x);
  return 2.0 * x + theta;
}

const char* to_string(SignConvention c) noexcept {
  return c == SignConvention::printed ? "printed" : "chernoff";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Objective {
  double x, theta, sign;  // b(a) = sign · x · a
  double lo = -kInf, hi = kInf;  // open domain
  double operator()(double a) const {
    const double disc = theta * theta - 2.0 * sign * x * a;
    return -0.5 * (a - theta + std::sqrt(std::max(disc, 0.0)));
  }
};

}  // namespace

RateResult rate_function_numeric(const RateQuery& q) {
  Objective f{q.x, q.theta, q.convention == SignConvention::printed ? -1.0 : 1.0};
  const double slope = f.sign * q.x;  // domain: θ² − 2·slope·a > 0
  if (slope > 0.0) f.hi = q.theta * q.theta / (2.0 * slope);
  if (slope < 0.0) f.lo = q.theta * q.theta / (2.0 * slope);
  const double limit = q.search_limit;

  RateResult out;
  out.convention = q.convention;

  // Moves from `from` by `step`, stepping only halfway to an open boundary.
  auto advance = [&](double from, double step) {
    const double target = from + step;
    if (target >= f.hi) return from + 0.5 * (f.hi - from);
    if (target <= f.lo) return from + 0.5 * (f.lo - from);
    return std::clamp(target, -limit, limit);
  };

  double left, right;
  const double origin = 0.0;
  const double f0 = f(origin);
  const double up = advance(origin, 1.0), down = advance(origin, -1.0);
  if (f(up) >= f0 && f(down) >= f0) {
    left = down;
    right = up;
  } else {
    const double dir = f(up) < f0 ? 1.0 : -1.0;
    double prev = origin, cur = dir > 0 ? up : down, step = 1.0;
    bool bracketed = false;
    for (int iter = 0; iter < 400; ++iter) {
      step *= 2.0;
      const double next = advance(cur, dir * step);
      if (f(next) >= f(cur)) {
        left = std::min(prev, next);
        right = std::max(prev, next);
        bracketed = true;
        break;
      }
      const double boundary = dir > 0 ? f.hi : f.lo;
      if (std::abs(next) >= limit) {
        out.unbounded_below = true;
        out.argmin = next;
        out.value = kInf;
        return out;
      }
      if (std::isfinite(boundary) && std::abs(next - boundary) <= 1e-12 * std::max(1.0, std::abs(boundary))) {
        out.at_boundary = true;
        out.argmin = boundary;
        out.value = -f(boundary);
        return out;
      }
      prev = cur;
      cur = next;
    }
    if (!bracketed) {
      out.unbounded_below = true;
      out.argmin = cur;
      out.value = kInf;
      return out;
    }
  }

  // Golden section on the convex objective.
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = right - ratio * (right - left), d = left + ratio * (right - left);
  double fc = f(c), fd = f(d);
  while (right - left > 1e-10) {
    if (fc < fd) {
      right = d;
      d = c;
      fd = fc;
      c = right - ratio * (right - left);
      fc = f(c);
    } else {
      left = c;
      c = d;
      fc = fd;
      d = left + ratio * (right - left);
      fd = f(d);
    }
  }
  out.argmin = 0.5 * (left + right);
  out.value = -f(out.argmin);
  return out;
}

EigenSplit eigen_split(double theta, double mu) {
  const double disc = theta * theta / 4.0 + mu / 2.0;
  if (disc < 0.0) {
    throw Error(Errc::complex_eigenvalues, "theta^2/4 + mu/2 = " + std::to_string(disc) + " < 0");
  }
  const double lambda = std::sqrt(disc);
  return {lambda, theta / 2.0 + lambda, theta / 2.0 - lambda};
}

double girsanov_log_weight(double phi, double theta, double numerator, double denominator) {
  return (phi + theta) * numerator - 0.5 * (phi * phi - theta * theta) * denominator;
}

}  // namespace mfou::ldp
