#include "doctest.h"
#include "oracles.hpp"

#include "krrbw/bandwidth.hpp"
#include "krrbw/kernel.hpp"
#include "krrbw/linalg.hpp"
#include "krrbw/verify.hpp"

#include <cmath>
#include <sstream>

using namespace krrbw;

namespace {

Matrix grid_1d(Index n, double l_max) {
  Matrix x(n, 1);
  for (Index i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i), 0) = l_max * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

void check_sign_consistency(const BoundReport& r) {
  CHECK((r.worst_margin < 0.0) == (r.violations > 0));
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("prop1 regimes for every combination") {
  for (Index n : {3, 10, 100}) {
    for (Index p : {1, 2, 5}) {
      const double thr = regime_threshold(n);
      for (double lam : {0.0, 0.5 * thr, 2.0 * thr}) {
        const auto r = check_prop1_regimes(JacobianParams(n, p, 1.0, lam));
        CAPTURE(n);
        CAPTURE(p);
        CAPTURE(lam);
        CHECK(r.passed());
        CHECK(r.trials > 0);
        check_sign_consistency(r);
      }
    }
  }
}

TEST_CASE("prop3 maximum") {
  for (double s : {0.1, 1.0, 10.0}) {
    const auto r = check_prop3(s);
    CHECK(r.passed());
    CHECK(r.trials == 2);
    check_sign_consistency(r);
  }
}

TEST_CASE("prop2 chain holds on synthetic data") {
  const Dataset d = generate_synthetic(10, 0.1, 4);
  const double s0 = select_jacobian(d.features(), 1e-3).sigma;
  for (ProbeMode mode : {ProbeMode::BoundingBox, ProbeMode::DistanceSigma}) {
    Prop2Options o;
    o.probe = mode;
    o.seed = 9;
    const auto r = check_prop2_chain(d, s0, 1e-3, o);
    CHECK(r.trials == 100);
    CHECK(r.passed());
    check_sign_consistency(r);
  }
}

TEST_CASE("prop2 with one training point") {
  Matrix x(1, 2);
  x << 0.3, -0.2;
  Vector y(1);
  y << 1.5;
  const auto r = check_prop2_chain(Dataset(x, y), 0.5, 0.0, Prop2Options{});
  CHECK(r.passed());
}

TEST_CASE("prop2 report is reproducible and thread independent") {
  const Dataset d = generate_synthetic(15, 0.1, 2);
  Prop2Options o;
  o.seed = 3;
  const auto a = check_prop2_chain(d, 0.3, 1e-3, o);
  o.threads = 4;
  const auto b = check_prop2_chain(d, 0.3, 1e-3, o);
  CHECK(a.worst_margin == b.worst_margin);
  CHECK(a.violations == b.violations);
  CHECK(a.config == b.config);
}

TEST_CASE("prop4 in the identity limit") {
  const Matrix x = grid_1d(10, 1.0);
  for (double lam : {0.0, 1e-3, 1.0}) {
    const auto r = check_prop4(x, 1e-6, lam);
    // lhs ~ 1/(1+lam), rhs ~ 1/(10+lam)
    CHECK(r.worst_margin == doctest::Approx(1.0 / (1.0 + lam) - 1.0 / (10.0 + lam)).epsilon(1e-9));
    CHECK(r.passed());
  }
}

TEST_CASE("prop4 margin agrees with a Jacobi eigensolve") {
  const Matrix x = grid_1d(10, 1.0);
  const double s0 = jacobian_sigma(JacobianParams(10, 1, 1.0, 0.0), Branch::Principal);
  for (double lam : {0.0, 1e3}) {
    const auto r = check_prop4(x, s0, lam);
    const auto ev = oracle::jacobi_eigenvalues(kernel_matrix(x, s0));
    const double lhs = 1.0 / (std::max(ev.front(), 0.0) + lam);
    const double rhs = jacobian_factors(s0, JacobianParams(10, 1, 1.0, lam)).j_b;
    CHECK(r.worst_margin == doctest::Approx(lhs - rhs).epsilon(1e-7));
    if (lam > 1.0) CHECK(r.passed());
    check_sign_consistency(r);
  }
}

TEST_CASE("bermanis count") {
  const Matrix x = grid_1d(10, 1.0);
  const auto wide = check_bermanis_count(x, 10.0, 0.9999);
  CHECK(wide.passed());
  const auto mid = check_bermanis_count(x, 0.2, 0.5);
  const Vector s = singular_values_psd(kernel_matrix(x, 0.2));
  Index count = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) count += s(i) / s(0) >= 0.5 ? 1 : 0;
  const double bound = 2.0 / M_PI * 1.0 / 0.2 * std::sqrt(std::log(2.0)) + 1.0;
  CHECK(mid.worst_margin == doctest::Approx(bound - static_cast<double>(count)).epsilon(1e-12));
  check_sign_consistency(mid);
  Matrix one(1, 1);
  one << 0.0;
  CHECK(check_bermanis_count(one, 1.0, 0.5).passed());
}

TEST_CASE("reports csv") {
  std::ostringstream out;
  write_reports_csv(out, {check_prop3(1.0)});
  const std::string s = out.str();
  CHECK(s.rfind("claim,trials,violations,worst_margin,seed\n", 0) == 0);
  CHECK(s.find("prop3-gradmax,2,0,") != std::string::npos);
}

}
