#include "doctest.h"
#include "oracles.hpp"

#include "krrbw/lambertw.hpp"

#include <cmath>
#include <stdexcept>

using namespace krrbw;

namespace {

const double kInvE = std::exp(-1.0);

double residual(double x, Branch b) {
  const double w = lambert_w(x, b);
  return std::abs(w * std::exp(w) - x);
}

}  // namespace

TEST_SUITE("lambertw") {

TEST_CASE("special values") {
  CHECK(lambert_w(0.0, Branch::Principal) == 0.0);
  CHECK(lambert_w(-kInvE, Branch::Principal) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(lambert_w(-kInvE, Branch::Negative) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("agrees with bisection") {
  auto f = [](double w) { return w * std::exp(w) + 0.1; };
  const double ref_neg = oracle::bisect(f, -20.0, -1.0);
  const double ref_pri = oracle::bisect(f, -1.0, 0.0);
  CHECK(std::abs(lambert_w(-0.1, Branch::Negative) - ref_neg) <= 1e-12 * std::abs(ref_neg));
  CHECK(std::abs(lambert_w(-0.1, Branch::Principal) - ref_pri) <= 1e-12 * std::abs(ref_pri));
  CHECK(lambert_w(-0.1, Branch::Negative) == doctest::Approx(-3.5771520639572971).epsilon(1e-14));
  CHECK(lambert_w(-0.1, Branch::Principal) == doctest::Approx(-0.11183255915896297).epsilon(1e-14));
}

TEST_CASE("round trip over the domain") {
  double worst = 0.0;
  for (int i = 1; i <= 10000; ++i) {
    const double x = -kInvE * static_cast<double>(i) / 10001.0;
    worst = std::max({worst, residual(x, Branch::Principal), residual(x, Branch::Negative)});
  }
  CHECK(worst <= 1e-12);
  for (double eps : {1e-16, 1e-14, 1e-12, 1e-9, 1e-6, 1e-3}) {
    CHECK(residual(-kInvE + eps, Branch::Principal) <= 1e-12);
    CHECK(residual(-kInvE + eps, Branch::Negative) <= 1e-12);
    CHECK(residual(-eps, Branch::Principal) <= 1e-12);
    CHECK(residual(-eps, Branch::Negative) <= 1e-12);
  }
}

TEST_CASE("branch ordering and monotonicity") {
  double prev0 = -2.0;
  double prev1 = 0.0;
  for (int i = 1; i < 2000; ++i) {
    const double x = -kInvE + kInvE * static_cast<double>(i) / 2000.0;
    const double w0 = lambert_w(x, Branch::Principal);
    const double w1 = lambert_w(x, Branch::Negative);
    CHECK(w1 < w0);
    CHECK(w0 > prev0);
    CHECK(w1 < prev1);
    CHECK(w0 >= -1.0);
    CHECK(w1 <= -1.0);
    prev0 = w0;
    prev1 = w1;
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(lambert_w(0.1, Branch::Principal), std::domain_error);
  CHECK_THROWS_AS(lambert_w(0.0, Branch::Negative), std::domain_error);
  CHECK_THROWS_AS(lambert_w(-0.5, Branch::Principal), std::domain_error);
  CHECK_THROWS_AS(lambert_w(std::nan(""), Branch::Negative), std::domain_error);
  CHECK(lambert_w(-kInvE - 1e-17, Branch::Principal) == doctest::Approx(-1.0).epsilon(1e-7));
}

}
