#include "krrbw/lambertw.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace krrbw {

namespace {

constexpr double kInvE = 0.36787944117144233;  // 1/e
constexpr double kBranchSlack = 1e-15;
constexpr double kStepTolerance = 1e-13;
constexpr int kMaxIterations = 50;

// Series about the branch point in p = +-sqrt(2 (1 + e x)); the sign picks
// the branch (+ for W_0, - for W_-1).
double branch_point_series(double p) {
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 +
                                                                       p * (769.0 / 17280.0)))));
}

double branch_point_p(double x) {
  const double t = 2.0 * (1.0 + std::numbers::e * x);
  return std::sqrt(std::max(t, 0.0));
}

double initial_guess(double x, Branch branch) {
  if (branch == Branch::Principal) {
    if (x < -0.25) return branch_point_series(branch_point_p(x));
    return x * (1.0 + x * (-1.0 + x * (1.5 - x * 8.0 / 3.0)));
  }
  if (x < -0.25) return branch_point_series(-branch_point_p(x));
  const double l1 = std::log(-x);
  const double l2 = std::log(-l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace

double lambert_w(double x, Branch branch) {
  if (std::isnan(x)) throw std::domain_error("lambert_w: NaN argument");
  if (x < -kInvE) {
    if (x < -kInvE - kBranchSlack) {
      throw std::domain_error("lambert_w: argument " + std::to_string(x) + " is below -1/e");
    }
    x = -kInvE;
  }
  if (x > 0.0) throw std::domain_error("lambert_w: positive arguments are not supported");
  if (x == 0.0) {
    if (branch == Branch::Negative) throw std::domain_error("lambert_w: W_-1(0) is -infinity");
    return 0.0;
  }
  if (x == -kInvE) return -1.0;

  // Close to the branch point the series is already exact to rounding and
  // Halley's denominator degenerates.
  const double p = branch_point_p(x);
  if (p < 1e-3) return branch_point_series(branch == Branch::Principal ? p : -p);

  double w = initial_guess(x, branch);
  for (int it = 0; it < kMaxIterations; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (branch == Branch::Principal) {
      w = std::clamp(w, -1.0, 0.0);
    } else if (w > -1.0) {
      w = -1.0 - 1e-12;
    }
    if (std::abs(step) <= kStepTolerance * (1.0 + std::abs(w))) return w;
  }
  throw std::domain_error("lambert_w: Halley iteration did not converge for x = " +
                          std::to_string(x));
}

}  // namespace krrbw
