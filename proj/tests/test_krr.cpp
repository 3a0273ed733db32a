#include "doctest.h"
#include "oracles.hpp"

#include "krrbw/bandwidth.hpp"
#include "krrbw/error.hpp"
#include "krrbw/krr.hpp"
#include "krrbw/rng.hpp"

#include <cmath>
#include <sstream>

using namespace krrbw;

namespace {

Dataset single_point(double y) {
  Matrix x(1, 1);
  x << 0.0;
  Vector v(1);
  v << y;
  return Dataset(x, v);
}

Dataset noisy_data(Index n, Index p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(n, p);
  Vector y(n);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform(-1.0, 1.0);
    y(i) = rng.normal();
  }
  return Dataset(x, y);
}

}  // namespace

TEST_SUITE("krr") {

TEST_CASE("one point systems") {
  const KrrModel a = fit(single_point(2.0), 1.0, 0.0);
  CHECK(a.alpha()(0) == 2.0);
  CHECK(a.predict_one(Vector::Zero(1)) == 2.0);
  const KrrModel b = fit(single_point(2.0), 1.0, 1.0);
  CHECK(b.alpha()(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.predict_one(Vector::Zero(1)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("interpolation without regularization") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Index n = 5 + seed * 2;
    const Dataset d = noisy_data(n, 1, seed);
    const double sigma = select_jacobian(d.features(), 0.0).sigma;
    const KrrModel m = fit(d, sigma, 0.0);
    const Vector pred = m.predict(d.features());
    const double tol = 1e-6 * (d.response().cwiseAbs().maxCoeff() + 1.0);
    CHECK((pred - d.response()).cwiseAbs().maxCoeff() <= tol);
  }
}

TEST_CASE("far away prediction decays to zero") {
  const Dataset d = noisy_data(8, 2, 3);
  const KrrModel m = fit(d, 0.2, 1e-3);
  Vector far(2);
  far << 100.0, -100.0;
  CHECK(std::abs(m.predict_one(far)) <= std::exp(-200.0) * m.alpha().lpNorm<1>());
}

TEST_CASE("empty and mismatched prediction inputs") {
  const KrrModel m = fit(noisy_data(6, 2, 4), 0.5, 1e-3);
  CHECK(m.predict(Matrix(0, 2)).size() == 0);
  CHECK_THROWS_AS(m.predict(Matrix::Zero(3, 3)), std::invalid_argument);
  CHECK(predict(m, Matrix::Zero(1, 2))(0) == m.predict_one(Vector::Zero(2)));
}

TEST_CASE("prediction matches explicit kernel sum") {
  const Dataset d = noisy_data(15, 3, 5);
  const KrrModel m = fit(d, 0.7, 1e-2);
  const Matrix xs = noisy_data(6, 3, 6).features();
  const Vector ref = oracle::kernel_loop(xs, d.features(), 0.7) * m.alpha();
  CHECK((m.predict(xs) - ref).cwiseAbs().maxCoeff() <= 1e-12);
  Matrix k = oracle::kernel_loop(d.features(), d.features(), 0.7);
  k.diagonal().array() += 1e-2;
  CHECK((m.alpha() - oracle::gauss_solve(k, d.response())).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("shrinkage with lambda") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset d = noisy_data(12, 2, seed + 20);
    double prev = INFINITY;
    for (double lam : {1e-6, 1e-4, 1e-2, 1.0, 100.0}) {
      const double norm = fit(d, 0.4, lam).alpha().norm();
      CHECK(norm <= prev);
      prev = norm;
    }
  }
}

TEST_CASE("singular system reports the hint") {
  Matrix x(2, 1);
  x << 0.0, 1e-9;
  Vector y(2);
  y << 1.0, 2.0;
  try {
    fit(Dataset(x, y), 100.0, 0.0);
    FAIL("expected FactorizationError");
  } catch (const FactorizationError& e) {
    CHECK(std::string(e.what()).find("sigma") != std::string::npos);
    CHECK(e.pivot() == 2);
  }
}

TEST_CASE("gradient of a single kernel") {
  const KrrModel m = fit(single_point(1.0), 1.0, 0.0);
  Vector x(1);
  x << 1.0;
  const Vector g = gradient_fd(m, x, 1e-5);
  CHECK(std::abs(g(0) + std::exp(-0.5)) <= 1e-6);
  CHECK(std::abs(g(0) - (-0.60653065971263342)) <= 1e-6);
  CHECK(gradient_fd(m, Vector::Zero(1)).norm() <= 1e-6);
}

TEST_CASE("finite difference gradient matches analytic gradient") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Index p = 1 + seed % 3;
    const Dataset d = noisy_data(10, p, seed + 40);
    const KrrModel m = fit(d, 0.6, 1e-2);
    const Vector xs = noisy_data(1, p, seed + 80).features().row(0).transpose();
    const Vector ref = oracle::krr_gradient(d.features(), m.alpha(), 0.6, xs);
    CHECK((gradient_fd(m, xs) - ref).cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, ref.norm()));
  }
}

TEST_CASE("model serialization is exact") {
  const Dataset d = noisy_data(9, 2, 7);
  const KrrModel m = fit(d, 0.33, 1e-3);
  std::stringstream buf;
  write_model(buf, m);
  const KrrModel back = read_model(buf);
  CHECK(back.sigma() == m.sigma());
  CHECK(back.lambda() == m.lambda());
  CHECK(back.alpha() == m.alpha());
  CHECK(back.train_features() == m.train_features());
  const Matrix xs = noisy_data(5, 2, 8).features();
  CHECK((back.predict(xs) - m.predict(xs)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("malformed model files") {
  std::istringstream bad("# krr-model\np,n,sigma,lambda\n1,2,0.5\n");
  CHECK_THROWS_AS(read_model(bad), InputError);
  std::istringstream wrong("hello\n");
  CHECK_THROWS_AS(read_model(wrong), InputError);
}

}
