#pragma once

#include "krrbw/data.hpp"

namespace krrbw {

// Gaussian kernel bandwidth. Always finite and strictly positive.
class Bandwidth {
 public:
  explicit Bandwidth(double sigma);
  double value() const noexcept { return sigma_; }

 private:
  double sigma_;
};

// exp(-d^2 / (2 sigma^2)).
double gaussian(double d_squared, double sigma);

// |d/dd exp(-d^2/(2 sigma^2))| = (d / sigma^2) exp(-d^2/(2 sigma^2)), the
// Euclidean norm of the kernel gradient at distance d. Peaks at d = sigma
// with value 1 / (sigma sqrt(e)).
double kernel_gradient_norm(double d, double sigma);

// Squared Euclidean distances between the rows of a (m x p) and b (n x p),
// via |a|^2 + |b|^2 - 2 a.b with negatives clamped to zero.
Matrix squared_distances(const Matrix& a, const Matrix& b);

// K(A, B)_ij = gaussian(|a_i - b_j|^2, sigma). When `a` and `b` are the same
// object the symmetric path is taken.
Matrix kernel_matrix(const Matrix& a, const Matrix& b, double sigma);

// K(X, X): upper triangle computed, lower mirrored, unit diagonal.
Matrix kernel_matrix(const Matrix& x, double sigma);

// Largest pairwise Euclidean distance between rows (0 for a single row).
double max_pairwise_distance(const Matrix& x);

}  // namespace krrbw
