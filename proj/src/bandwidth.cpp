#include "krrbw/bandwidth.hpp"

#include "krrbw/error.hpp"
#include "krrbw/kernel.hpp"
#include "krrbw/krr.hpp"
#include "krrbw/parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace krrbw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Jacobian:
      return "jacobian";
    case Method::Silverman:
      return "silverman";
    case Method::CV:
      return "cv";
    case Method::SeededCV:
      return "seeded-cv";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view text) {
  for (Method m : {Method::Jacobian, Method::Silverman, Method::CV, Method::SeededCV}) {
    if (text == method_name(m)) return m;
  }
  return std::nullopt;
}

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::NoRegularization:
      return "no-regularization";
    case Regime::LocalMinimum:
      return "local-minimum";
    case Regime::Monotone:
      return "monotone";
  }
  return "unknown";
}

double regime_threshold(Index n) { return 2.0 * static_cast<double>(n) * std::exp(-1.5); }

Regime classify_regime(Index n, double lambda) {
  if (lambda == 0.0) return Regime::NoRegularization;
  return lambda <= regime_threshold(n) ? Regime::LocalMinimum : Regime::Monotone;
}

JacobianParams::JacobianParams(Index n, Index p, double l_max, double lambda)
    : n_(n), p_(p), l_max_(l_max), lambda_(lambda) {
  if (n < 3) {
    throw std::invalid_argument("Jacobian bandwidth needs n >= 3 (got n=" + std::to_string(n) +
                                ")");
  }
  if (p < 1) throw std::invalid_argument("Jacobian bandwidth needs p >= 1");
  if (!(l_max > 0.0) || !std::isfinite(l_max)) {
    throw std::invalid_argument("Jacobian bandwidth needs l_max > 0 (all points identical?)");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and >= 0");
  }
}

double JacobianParams::spacing_factor() const {
  return std::pow(static_cast<double>(n_ - 1), 1.0 / static_cast<double>(p_)) - 1.0;
}

double JacobianParams::base_sigma() const {
  return std::numbers::sqrt2 / std::numbers::pi * l_max_ / spacing_factor();
}

JacobianFactors jacobian_factors(double sigma, const JacobianParams& params) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("approx_jacobian_norm: sigma must be finite and > 0");
  }
  const double t = params.spacing_factor() * std::numbers::pi * sigma / (2.0 * params.l_max());
  JacobianFactors f;
  f.j_a = 1.0 / sigma;
  f.j_b = 1.0 / (static_cast<double>(params.n()) * std::exp(-t * t) + params.lambda());
  f.value = f.j_a * f.j_b;
  return f;
}

double approx_jacobian_norm(double sigma, const JacobianParams& params) {
  return jacobian_factors(sigma, params).value;
}

double jacobian_sigma(const JacobianParams& params, Branch branch) {
  if (params.lambda() > regime_threshold(params.n())) {
    throw std::domain_error("sigma_k is undefined for lambda above 2 n e^{-3/2}");
  }
  // -lambda sqrt(e) / (2n), written so lambda == threshold lands on -1/e exactly.
  const double arg = -(params.lambda() / regime_threshold(params.n())) / std::numbers::e;
  const double w = lambert_w(arg, branch);
  return params.base_sigma() * std::sqrt(1.0 - 2.0 * w);
}

BandwidthResult select_jacobian(const Matrix& x, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and >= 0");
  }
  const Index n = static_cast<Index>(x.rows());
  if (n < 3) {
    throw ComputeError("Jacobian selector needs at least 3 training points (got " +
                       std::to_string(n) + ")");
  }
  const double l_max = max_pairwise_distance(x);
  if (!(l_max > 0.0)) throw ComputeError("Jacobian selector: all training points are identical");

  const JacobianParams params(n, static_cast<Index>(x.cols()), l_max, lambda);
  const double threshold = regime_threshold(n);
  BandwidthResult result;
  result.method = Method::Jacobian;
  result.regime = classify_regime(n, lambda);
  result.clamped = lambda > threshold;
  const JacobianParams used = result.clamped ? params.with_lambda(threshold) : params;
  result.sigma = jacobian_sigma(used, Branch::Principal);
  result.j2a_at_sigma = approx_jacobian_norm(result.sigma, params);
  return result;
}

double silverman_scale(const Matrix& x) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw ComputeError("Silverman's rule needs at least 2 observations");
  double total = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    total += (x.col(j).array() - mean).square().sum() / static_cast<double>(n - 1);
  }
  return std::sqrt(total / static_cast<double>(x.cols()));
}

BandwidthResult select_silverman(const Matrix& x) {
  const double s = silverman_scale(x);
  if (!(s > 0.0)) throw ComputeError("Silverman's rule: features have zero variance");
  const double n = static_cast<double>(x.rows());
  const double p = static_cast<double>(x.cols());
  BandwidthResult result;
  result.method = Method::Silverman;
  result.sigma = std::pow(4.0 / (n * (p + 2.0)), 1.0 / (p + 4.0)) * s;
  return result;
}

std::vector<double> log_space(double lo, double hi, Index count) {
  if (count < 1) throw std::invalid_argument("log_space: count must be >= 1");
  if (!(lo > 0.0) || !(hi > 0.0) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("log_space: bounds must be finite and > 0");
  }
  if (count == 1) return {std::sqrt(lo * hi)};
  std::vector<double> out(count);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (Index i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    out[i] = std::exp(a + t * (b - a));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_cv_grid(const Matrix& x, Index count, double grid_min) {
  const double l_max = max_pairwise_distance(x);
  if (!(l_max > 0.0)) throw ComputeError("CV grid: all training points are identical");
  return log_space(grid_min, l_max, count);
}

BandwidthResult select_cv(const Dataset& data, double lambda, const std::vector<double>& grid,
                          const CvOptions& options) {
  if (grid.empty()) throw std::invalid_argument("select_cv: empty grid");
  for (double s : grid) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("select_cv: grid values must be finite and > 0");
    }
  }
  if (options.folds < 2 || options.folds > data.n()) {
    throw std::invalid_argument("select_cv: need 2 <= folds <= n");
  }

  struct Fold {
    Dataset train;
    Matrix test_x;
    Vector test_y;
  };
  std::vector<Fold> folds;
  for (const auto& plan : make_kfold(data.n(), options.folds, options.seed)) {
    folds.push_back({data.subset(plan.train_indices),
                     select_rows(data.features(), plan.test_indices),
                     select_rows(data.response(), plan.test_indices)});
  }

  std::vector<CvPoint> curve(grid.size());
  parallel_for(grid.size(), options.threads, [&](std::size_t g) {
    CvPoint& point = curve[g];
    point.sigma = grid[g];
    double total = 0.0;
    for (const Fold& fold : folds) {
      double mse = kInf;
      try {
        const KrrModel model = fit(fold.train, grid[g], lambda);
        mse = (model.predict(fold.test_x) - fold.test_y).squaredNorm() /
              static_cast<double>(fold.test_y.size());
      } catch (const FactorizationError&) {
      }
      if (!std::isfinite(mse)) {
        ++point.failed_folds;
        mse = kInf;
      }
      total += mse;
    }
    point.loss = total / static_cast<double>(folds.size());
  });

  std::size_t best = curve.size();
  for (std::size_t g = 0; g < curve.size(); ++g) {
    if (!std::isfinite(curve[g].loss)) continue;
    if (best == curve.size() || curve[g].loss < curve[best].loss ||
        (curve[g].loss == curve[best].loss && curve[g].sigma < curve[best].sigma)) {
      best = g;
    }
  }
  if (best == curve.size()) {
    throw ComputeError("cross-validation failed: no grid bandwidth produced a finite loss");
  }
  BandwidthResult result;
  result.method = Method::CV;
  result.sigma = curve[best].sigma;
  result.cv_curve = std::move(curve);
  return result;
}

BandwidthResult select_seeded_cv(const Dataset& data, double lambda, Index grid_size,
                                 const CvOptions& options) {
  const double sigma0 = select_jacobian(data.features(), lambda).sigma;
  const std::vector<double> grid =
      grid_size == 1 ? std::vector<double>{sigma0} : log_space(sigma0 / 5.0, sigma0 * 5.0, grid_size);
  BandwidthResult result = select_cv(data, lambda, grid, options);
  result.method = Method::SeededCV;
  return result;
}

BandwidthResult select_bandwidth(Method method, const Dataset& data,
                                 const SelectorSettings& settings) {
  const CvOptions cv{settings.folds, settings.seed, settings.threads};
  switch (method) {
    case Method::Jacobian:
      return select_jacobian(data.features(), settings.lambda);
    case Method::Silverman:
      return select_silverman(data.features());
    case Method::CV: {
      const double hi = settings.grid_max.value_or(max_pairwise_distance(data.features()));
      if (!(hi > 0.0)) throw ComputeError("CV grid: all training points are identical");
      return select_cv(data, settings.lambda, log_space(settings.grid_min, hi, settings.grid_size),
                       cv);
    }
    case Method::SeededCV:
      return select_seeded_cv(data, settings.lambda, settings.grid_size, cv);
  }
  throw std::invalid_argument("unknown bandwidth method");
}

}  // namespace krrbw
