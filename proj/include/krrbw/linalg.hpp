#pragma once

#include "krrbw/data.hpp"

namespace krrbw {

// Cholesky factor L of K + shift * I, with L L^T = K + shift * I.
class SpdSolve {
 public:
  const Matrix& factor() const noexcept { return factor_; }
  double shift() const noexcept { return shift_; }
  Index size() const noexcept { return static_cast<Index>(factor_.rows()); }

  // x with (K + shift I) x = b.
  Vector solve(const Vector& b) const;

 private:
  friend SpdSolve factor_spd(const Matrix& k, double lambda);
  SpdSolve(Matrix factor, double shift) : factor_(std::move(factor)), shift_(shift) {}

  Matrix factor_;
  double shift_;
};

// Factors K + lambda I. Only the lower triangle of K is read. Throws
// FactorizationError carrying the 1-based pivot index when a pivot is not
// strictly positive; lambda is never increased behind the caller's back.
SpdSolve factor_spd(const Matrix& k, double lambda);

Vector solve(const SpdSolve& s, const Vector& b);

struct SingularExtremes {
  double s_max = 0.0;
  double s_min = 0.0;
};

// Largest and smallest singular values of a symmetric PSD matrix (its
// eigenvalues, rounding negatives to zero). Limited to n <= 500.
SingularExtremes singular_extremes(const Matrix& m);

// All singular values of a symmetric PSD matrix, descending.
Vector singular_values_psd(const Matrix& m);

inline constexpr Index kMaxEigenSize = 500;

}  // namespace krrbw
