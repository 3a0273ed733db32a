#pragma once

#include "krrbw/bandwidth.hpp"
#include "krrbw/data.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace krrbw {

// Numerical checks of the bounds behind the Jacobian bandwidth. Each check
// returns a BoundReport. `worst_margin` is the smallest per-trial margin
// after the check's tolerance has been added, so it is negative exactly
// when `violations > 0`.

enum class Claim {
  Prop1Regimes,      // shape of J(sigma) per lambda regime
  Prop2Chain,        // |grad f| <= sqrt(n) |y| max_i g(d_i) / (s_min(K) + lambda)
  Prop3GradMax,      // max_d (d / sigma^2) exp(-d^2 / (2 sigma^2)) = 1 / (sigma sqrt(e))
  Prop4InverseNorm,  // |(K + lambda I)^{-1}|_2 >= j_b(sigma)
  BermanisCount,     // #{j : s_j / s_1 >= delta} <= (2/pi l_max/sigma sqrt(log 1/delta) + 1)^p
};

std::string_view claim_name(Claim c);

struct BoundReport {
  Claim claim = Claim::Prop1Regimes;
  Index trials = 0;
  Index violations = 0;
  double worst_margin = 0.0;
  std::uint64_t seed = 0;
  std::string config;  // parameter summary; with `seed` it reproduces the report

  bool passed() const noexcept { return violations == 0; }
};

// Margin: lhs - rhs + tolerance, with lhs = 1 / (s_min(K) + lambda) and
// rhs = j_b(sigma). One trial. Requires 3 <= n <= 500.
BoundReport check_prop4(const Matrix& x, double sigma, double lambda, double tolerance = 0.0);

// Margin: bound - count, one trial. delta must lie in (0, 1).
BoundReport check_bermanis_count(const Matrix& x, double sigma, double delta);

enum class ProbeMode {
  BoundingBox,      // uniform in the data bounding box, inflated by 20% per side
  DistanceSigma,    // a training point plus sigma times a random unit vector
};

struct Prop2Options {
  Index trials = 100;
  std::uint64_t seed = 0;
  ProbeMode probe = ProbeMode::BoundingBox;
  double rel_tolerance = 1e-8;
  std::size_t threads = 1;
};

// Fits the model, then for random x* compares the finite-difference gradient
// norm to the three-factor bound. Margin is (bound - |grad|) / bound plus
// the relative tolerance. Requires n <= 500.
BoundReport check_prop2_chain(const Dataset& data, double sigma, double lambda,
                              const Prop2Options& options);

// Grid maximum of the kernel gradient norm on [0, 10 sigma] with `points`
// samples. Two trials: the maximum is within rel_tolerance of
// 1/(sigma sqrt(e)), and its location is within one grid cell of sigma.
BoundReport check_prop3(double sigma, Index points = 10000, double rel_tolerance = 1e-6);

// Scans J(sigma) on 1000 log-spaced points over [1e-3, 1e3] * l_max and
// checks the shape claimed for the lambda regime: blow-up towards 0, the
// limit at infinity, a (global for lambda = 0) minimum at sigma_0, a local
// maximum at sigma_-1, or strict monotone decrease.
BoundReport check_prop1_regimes(const JacobianParams& params);

// One line per report: claim,trials,violations,worst_margin,seed.
void write_reports_csv(std::ostream& out, const std::vector<BoundReport>& reports);

}  // namespace krrbw
