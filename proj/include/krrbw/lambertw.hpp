#pragma once

namespace krrbw {

// Real branches of the Lambert W function on [-1/e, 0].
enum class Branch {
  Principal,  // W_0, values in [-1, 0]
  Negative,   // W_{-1}, values in (-inf, -1]
};

// w with w * exp(w) = x. Principal accepts -1/e <= x <= 0, Negative
// -1/e <= x < 0. Arguments up to 1e-15 below -1/e are treated as -1/e.
// Throws std::domain_error outside the domain.
double lambert_w(double x, Branch branch);

}  // namespace krrbw
