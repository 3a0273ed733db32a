#pragma once

#include "krrbw/data.hpp"
#include "krrbw/kernel.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>

namespace krrbw {

// Fitted Gaussian kernel ridge regression model:
//   f(x) = K(x, X) alpha,   alpha = (K(X, X) + lambda I)^{-1} y.
// Owns a copy of the training features; immutable after construction.
class KrrModel {
 public:
  KrrModel(Matrix train_features, Vector alpha, double sigma, double lambda);

  const Matrix& train_features() const noexcept { return train_features_; }
  const Vector& alpha() const noexcept { return alpha_; }
  double sigma() const noexcept { return sigma_.value(); }
  double lambda() const noexcept { return lambda_; }
  Index n() const noexcept { return static_cast<Index>(train_features_.rows()); }
  Index p() const noexcept { return static_cast<Index>(train_features_.cols()); }

  Vector predict(const Matrix& x_new) const;
  double predict_one(const Vector& x_star) const;

 private:
  Matrix train_features_;
  Vector alpha_;
  Bandwidth sigma_;
  double lambda_;
};

// Solves the shifted kernel system. A FactorizationError from an
// ill-conditioned K + lambda I is rethrown with a hint about sigma/lambda.
KrrModel fit(const Dataset& data, double sigma, double lambda);

Vector predict(const KrrModel& model, const Matrix& x_new);

// Central-difference gradient of the fitted function at x_star. When `step`
// is empty it defaults to 1e-5 * max(1, |x_star|_inf).
Vector gradient_fd(const KrrModel& model, const Vector& x_star,
                   std::optional<double> step = std::nullopt);

// Text format, one tagged section per block:
//   # krr-model
//   p,n,sigma,lambda
//   <p>,<n>,<sigma>,<lambda>
//   # train_features
//   <n rows of p values>
//   # alpha
//   <n rows of 1 value>
// Numbers use 17 significant digits, so a round trip is exact.
void write_model(std::ostream& out, const KrrModel& model);
KrrModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const KrrModel& model);
KrrModel load_model(const std::filesystem::path& path);

}  // namespace krrbw
