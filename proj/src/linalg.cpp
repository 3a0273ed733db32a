#include "krrbw/linalg.hpp"

#include "krrbw/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace krrbw {

namespace {

void check_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw std::invalid_argument(std::string(what) + ": expected a non-empty square matrix");
  }
}

Vector eigenvalues_checked(const Matrix& m) {
  check_square(m, "singular_extremes");
  if (static_cast<Index>(m.rows()) > kMaxEigenSize) {
    throw std::invalid_argument("singular_extremes: n > 500 is not supported");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("singular_extremes: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ComputeError("symmetric eigensolver did not converge");
  }
  return solver.eigenvalues().cwiseMax(0.0);
}

}  // namespace

SpdSolve factor_spd(const Matrix& k, double lambda) {
  check_square(k, "factor_spd");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("factor_spd: lambda must be finite and >= 0");
  }
  const Eigen::Index n = k.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = k(j, j) + lambda;
    for (Eigen::Index c = 0; c < j; ++c) pivot -= l(j, c) * l(j, c);
    if (!(pivot > 0.0) || !std::isfinite(pivot)) {
      throw FactorizationError(static_cast<std::size_t>(j) + 1, pivot);
    }
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double v = k(i, j);
      for (Eigen::Index c = 0; c < j; ++c) v -= l(i, c) * l(j, c);
      l(i, j) = v / d;
    }
  }
  return SpdSolve(std::move(l), lambda);
}

Vector SpdSolve::solve(const Vector& b) const {
  if (b.size() != factor_.rows()) {
    throw std::invalid_argument("solve: right-hand side has length " + std::to_string(b.size()) +
                                ", expected " + std::to_string(factor_.rows()));
  }
  const auto tri = factor_.triangularView<Eigen::Lower>();
  Vector z = tri.solve(b);
  return tri.transpose().solve(z);
}

Vector solve(const SpdSolve& s, const Vector& b) { return s.solve(b); }

SingularExtremes singular_extremes(const Matrix& m) {
  const Vector ev = eigenvalues_checked(m);
  return {ev.maxCoeff(), ev.minCoeff()};
}

Vector singular_values_psd(const Matrix& m) {
  Vector ev = eigenvalues_checked(m);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

}  // namespace krrbw
