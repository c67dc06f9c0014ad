#pragma once
// Closed forms written directly from their definitions, independent of the
// library code they check.

#include <algorithm>
#include <array>
#include <cmath>

namespace oracle {

inline double rho(double x1, double x2, double y1, double y2) {
  const double d = x1 * x1 - y1 * y1;
  return std::pow(d * d + 4.0 * (x2 - y2) * (x2 - y2), 0.25);
}

/// Naive form of d~ (no cancellation guard).
inline double dtilde(double x1, double x2, double y1, double y2) {
  const double s = x1 * x1 + y1 * y1;
  return std::abs(x1 - y1) + std::sqrt(s + 4.0 * std::abs(x2 - y2)) - std::sqrt(s);
}

inline double F2(double x1, double r) { return r * (std::abs(x1) + r); }

/// The three candidate values of the ring-barrier constant at exponent a.
inline std::array<double, 3> gamma_forms(double a) {
  return {(std::pow(2.0, a) - std::pow(3.0, a)) / (1.0 - std::pow(3.0, a)),
          (std::pow(2.0, a / 2) - std::pow(3.0, a / 2)) / (1.0 - std::pow(3.0, a / 2)),
          (std::pow(6.0, a / 2) - std::pow(3.0, a)) / (std::pow(2.0, a / 2) - std::pow(3.0, a))};
}

inline double gamma(double a) {
  const auto g = gamma_forms(a);
  return std::min({g[0], g[1], g[2]});
}

/// |B((0, y2), r)| = 2 r^3 / 3 from the reduced integral at y1 = 0.
inline double ball_volume_on_axis(double r) { return 2.0 * r * r * r / 3.0; }

}  // namespace oracle
