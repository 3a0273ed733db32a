#include "krrbw/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace krrbw {

namespace {

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("bandwidth must be finite and > 0 (got " + std::to_string(sigma) +
                                ")");
  }
}

}  // namespace

Bandwidth::Bandwidth(double sigma) : sigma_(sigma) { check_sigma(sigma); }

double gaussian(double d_squared, double sigma) {
  check_sigma(sigma);
  if (!(d_squared >= 0.0)) throw std::invalid_argument("gaussian: squared distance must be >= 0");
  return std::exp(-d_squared / (2.0 * sigma * sigma));
}

double kernel_gradient_norm(double d, double sigma) {
  check_sigma(sigma);
  if (!(d >= 0.0)) throw std::invalid_argument("kernel_gradient_norm: distance must be >= 0");
  return d / (sigma * sigma) * std::exp(-d * d / (2.0 * sigma * sigma));
}

Matrix squared_distances(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("squared_distances: column counts differ (" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) + ")");
  }
  const Vector an = a.rowwise().squaredNorm();
  const Vector bn = b.rowwise().squaredNorm();
  Matrix d2 = -2.0 * (a * b.transpose());
  d2.colwise() += an;
  d2.rowwise() += bn.transpose();
  return d2.cwiseMax(0.0);
}

Matrix kernel_matrix(const Matrix& a, const Matrix& b, double sigma) {
  if (&a == &b) return kernel_matrix(a, sigma);
  check_sigma(sigma);
  const double scale = -1.0 / (2.0 * sigma * sigma);
  return (squared_distances(a, b) * scale).array().exp().matrix();
}

Matrix kernel_matrix(const Matrix& x, double sigma) {
  check_sigma(sigma);
  const double scale = -1.0 / (2.0 * sigma * sigma);
  const Matrix d2 = squared_distances(x, x);
  const Eigen::Index n = x.rows();
  Matrix k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = 1.0;
    for (Eigen::Index i = 0; i < j; ++i) {
      k(i, j) = std::exp(d2(i, j) * scale);
      k(j, i) = k(i, j);
    }
  }
  return k;
}

double max_pairwise_distance(const Matrix& x) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
      best = std::max(best, (x.row(i) - x.row(j)).squaredNorm());
    }
  }
  return std::sqrt(best);
}

}  // namespace krrbw
