#pragma once

#include "krrbw/data.hpp"
#include "krrbw/lambertw.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace krrbw {

// Jacobian-control bandwidth selection for Gaussian KRR.
//
// The approximate Jacobian norm of the fitted function, up to a factor that
// does not depend on sigma, is
//
//   J(sigma) = j_a(sigma) * j_b(sigma),
//   j_a(sigma) = 1 / sigma,
//   j_b(sigma) = 1 / (n exp(-(((n-1)^{1/p} - 1) pi sigma / (2 l_max))^2) + lambda),
//
// where l_max is the largest pairwise distance among training inputs.
// j_a measures how fast the fit decays away from data, j_b is a lower bound
// on |(K + lambda I)^{-1}|_2. Its stationary points are
//
//   sigma_k = sqrt(2)/pi * l_max / ((n-1)^{1/p} - 1)
//             * sqrt(1 - 2 W_k(-lambda sqrt(e) / (2 n))),   k in {0, -1},
//
// which exist only for lambda <= 2 n e^{-3/2}. sigma_0 is the local (for
// lambda = 0 global) minimum and is the selected bandwidth; above the
// threshold lambda is clamped to it.

enum class Method { Jacobian, Silverman, CV, SeededCV };

std::string_view method_name(Method m);
// Accepts "jacobian", "silverman", "cv", "seeded-cv".
std::optional<Method> parse_method(std::string_view text);

enum class Regime {
  NoRegularization,  // lambda == 0: global minimum at sigma_0
  LocalMinimum,      // 0 < lambda <= 2 n e^{-3/2}: min at sigma_0, max at sigma_-1
  Monotone,          // lambda > 2 n e^{-3/2}: strictly decreasing, no stationary point
};

std::string_view regime_name(Regime r);

// 2 n e^{-3/2}, the largest lambda for which sigma_0 exists.
double regime_threshold(Index n);
Regime classify_regime(Index n, double lambda);

class JacobianParams {
 public:
  // Throws std::invalid_argument unless n >= 3, p >= 1, l_max > 0 and
  // lambda >= 0 (all finite).
  JacobianParams(Index n, Index p, double l_max, double lambda);

  Index n() const noexcept { return n_; }
  Index p() const noexcept { return p_; }
  double l_max() const noexcept { return l_max_; }
  double lambda() const noexcept { return lambda_; }

  // (n - 1)^{1/p} - 1.
  double spacing_factor() const;
  // sqrt(2)/pi * l_max / spacing_factor(): sigma_0 at lambda = 0.
  double base_sigma() const;

  JacobianParams with_lambda(double lambda) const { return {n_, p_, l_max_, lambda}; }

 private:
  Index n_;
  Index p_;
  double l_max_;
  double lambda_;
};

struct JacobianFactors {
  double j_a = 0.0;
  double j_b = 0.0;
  double value = 0.0;  // j_a * j_b
};

JacobianFactors jacobian_factors(double sigma, const JacobianParams& params);
double approx_jacobian_norm(double sigma, const JacobianParams& params);

// sigma_0 (Principal) or sigma_-1 (Negative). Throws std::domain_error when
// lambda exceeds the threshold, and for the Negative branch at lambda = 0
// where sigma_-1 is +infinity.
double jacobian_sigma(const JacobianParams& params, Branch branch);

struct CvPoint {
  double sigma = 0.0;
  double loss = 0.0;          // mean over folds of the fold MSE; +inf if any fold failed
  Index failed_folds = 0;     // folds whose kernel system could not be factored
};

struct BandwidthResult {
  double sigma = 0.0;
  Method method = Method::Jacobian;
  // Jacobian only.
  std::optional<Regime> regime;
  bool clamped = false;
  std::optional<double> j2a_at_sigma;
  // CV variants only.
  std::vector<CvPoint> cv_curve;
};

BandwidthResult select_jacobian(const Matrix& x, double lambda);

// Silverman's rule (4 / (n (p + 2)))^{1/(p+4)} * s, with s the square root
// of the mean per-column sample variance (n - 1 denominator). Ignores lambda.
double silverman_scale(const Matrix& x);
BandwidthResult select_silverman(const Matrix& x);

struct CvOptions {
  Index folds = 10;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

// n log-spaced values from lo to hi inclusive (endpoints exact). A single
// point is the geometric midpoint.
std::vector<double> log_space(double lo, double hi, Index count);

// The default grid: `count` log-spaced values on [grid_min, l_max(X)].
std::vector<double> default_cv_grid(const Matrix& x, Index count = 100, double grid_min = 0.01);

// k-fold CV over `grid`. Folds are drawn once from `options.seed` and shared
// by every grid value. Loss is the per-fold test MSE averaged with equal fold
// weight; a fold whose system fails to factor scores +inf. Ties resolve to
// the smallest sigma. Throws ComputeError if every grid value fails.
BandwidthResult select_cv(const Dataset& data, double lambda, const std::vector<double>& grid,
                          const CvOptions& options);

// select_cv on `grid_size` log-spaced values in [sigma_0/5, 5 sigma_0] with
// sigma_0 from select_jacobian on the full training features. grid_size = 1
// uses {sigma_0}.
BandwidthResult select_seeded_cv(const Dataset& data, double lambda, Index grid_size,
                                 const CvOptions& options);

// Everything a caller needs to run any of the four selectors.
struct SelectorSettings {
  double lambda = 1e-3;
  Index folds = 10;
  Index grid_size = 100;
  double grid_min = 0.01;
  std::optional<double> grid_max;  // defaults to l_max of the training data
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

BandwidthResult select_bandwidth(Method method, const Dataset& data,
                                 const SelectorSettings& settings);

}  // namespace krrbw
