#include "doctest.h"
#include "oracles.hpp"

#include "krrbw/error.hpp"
#include "krrbw/kernel.hpp"
#include "krrbw/linalg.hpp"
#include "krrbw/rng.hpp"

#include <cmath>

using namespace krrbw;

namespace {

Matrix random_spd(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.normal();
  Matrix s = a * a.transpose();
  s.diagonal().array() += 0.5;
  return s;
}

Vector random_vector(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  return v;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("identity factor and solve") {
  const SpdSolve s = factor_spd(Matrix::Identity(3, 3), 0.0);
  CHECK(s.factor() == Matrix::Identity(3, 3));
  Vector b(3);
  b << 1, 2, 3;
  CHECK(solve(s, b) == b);

  const SpdSolve t = factor_spd(2.0 * Matrix::Identity(2, 2), 0.0);
  Vector c(2);
  c << 2, 4;
  const Vector x = solve(t, c);
  CHECK(x(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(x(1) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("rank one matrix fails at pivot 2") {
  Matrix k(2, 2);
  k << 1, 1, 1, 1;
  try {
    factor_spd(k, 0.0);
    FAIL("expected FactorizationError");
  } catch (const FactorizationError& e) {
    CHECK(e.pivot() == 2);
  }
}

TEST_CASE("shifted rank one matrix matches 2x2 inverse") {
  Matrix k(2, 2);
  k << 1, 1, 1, 1;
  const double lam = 1e-3;
  const SpdSolve s = factor_spd(k, lam);
  Vector b(2);
  b << 1, 1;
  const Vector x = solve(s, b);
  // [[a, c],[c, a]]^{-1} (1,1) = (1,1) / (a + c)
  const double expect = 1.0 / (2.0 + lam);
  CHECK(std::abs(x(0) - expect) <= 1e-12);
  CHECK(std::abs(x(1) - expect) <= 1e-12);
}

TEST_CASE("solve matches gaussian elimination") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Index n = 2 + seed % 12;
    const Matrix k = random_spd(n, seed);
    const Vector b = random_vector(n, seed + 1000);
    const Vector x = solve(factor_spd(k, 0.0), b);
    const Vector ref = oracle::gauss_solve(k, b);
    CHECK((x - ref).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
    const double resid = (k * x - b).norm();
    CHECK(resid <= 1e-10 * (k.norm() * x.norm() + b.norm()));
  }
}

TEST_CASE("only the lower triangle is read") {
  Matrix k = random_spd(6, 3);
  Matrix garbage = k;
  garbage.triangularView<Eigen::StrictlyUpper>().setConstant(1e300);
  const Vector b = random_vector(6, 4);
  CHECK(solve(factor_spd(garbage, 0.1), b) == solve(factor_spd(k, 0.1), b));
}

TEST_CASE("singular extremes") {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 3.0, 1.0, 0.5;
  const auto e = singular_extremes(d);
  CHECK(e.s_max == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(e.s_min == doctest::Approx(0.5).epsilon(1e-14));
  for (Index n : {1, 4, 17}) {
    const auto i = singular_extremes(Matrix::Identity(n, n));
    CHECK(i.s_max == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(i.s_min == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("singular extremes match jacobi oracle on a kernel matrix") {
  Rng rng(17);
  Matrix x(10, 1);
  for (Eigen::Index i = 0; i < 10; ++i) x(i, 0) = rng.uniform(0.0, 1.0);
  const Matrix k = kernel_matrix(x, 0.2);
  const auto e = singular_extremes(k);
  const auto ev = oracle::jacobi_eigenvalues(k);
  CHECK(std::abs(e.s_max - ev.back()) <= 1e-7 * ev.back());
  // The smallest eigenvalue is tiny here; compare at the absolute scale of
  // the spectrum as well as relatively.
  CHECK(std::abs(e.s_min - std::max(0.0, ev.front())) <= 1e-7 * std::max(ev.front(), 1e-9));
  const Vector all = singular_values_psd(k);
  for (Eigen::Index i = 0; i < all.size(); ++i) {
    const double ref = std::max(0.0, ev[ev.size() - 1 - static_cast<std::size_t>(i)]);
    CHECK(std::abs(all(i) - ref) <= 1e-12 * ev.back() + 1e-7 * ref);
  }
}

TEST_CASE("shift property of extremes") {
  const Matrix m = random_spd(8, 9);
  const auto base = singular_extremes(m);
  for (double c : {0.1, 1.0, 10.0}) {
    const Matrix shifted = m + c * Matrix::Identity(8, 8);
    const auto e = singular_extremes(shifted);
    CHECK(std::abs(e.s_max - base.s_max - c) <= 1e-8);
    CHECK(std::abs(e.s_min - base.s_min - c) <= 1e-8);
  }
  Rng rng(3);
  Matrix x(12, 1);
  for (Eigen::Index i = 0; i < 12; ++i) x(i, 0) = rng.uniform(0.0, 1.0);
  const Matrix k = kernel_matrix(x, 0.1);
  const double lam = 0.01;
  const double a = 1.0 / (singular_extremes(k).s_min + lam);
  const double b = 1.0 / singular_extremes(k + lam * Matrix::Identity(12, 12)).s_min;
  CHECK(std::abs(a - b) <= 1e-8 * b);
}

TEST_CASE("asymmetric or oversized input is rejected") {
  Matrix a(2, 2);
  a << 1, 2, 0, 1;
  CHECK_THROWS(singular_extremes(a));
  CHECK_THROWS(singular_extremes(Matrix::Identity(501, 501)));
}

}
