#pragma once

#include <array>

#include "rothe/grid.hpp"

namespace rothe {

/// Self-similar source solution of dM/dt = Laplace(M^(a+1)/(a+1)) in d
/// dimensions, centred at `center`:
///   M(x, t) = U(x, t/m),  m = a + 1,
///   U(x, s) = s^-al [C - k |x|^2 s^(-2 be)]_+^(1/(m-1)),
///   al = d/(d(m-1)+2), be = al/d, k = al (m-1)/(2 m d).
struct Barenblatt {
  double a = 1.0;
  int d = 1;
  double C = 1.0;
  std::array<double, 2> center{0.5, 0.5};

  [[nodiscard]] double value(std::array<double, 2> x, double t) const;
  /// Radius of the support at time t.
  [[nodiscard]] double support_radius(double t) const;
  /// Cell averages over the grid by a 4-point Gauss rule per axis.
  [[nodiscard]] Field sample(const StructuredGrid& g, double t) const;
  /// Largest value, attained at the centre.
  [[nodiscard]] double peak(double t) const;
};

}  // namespace rothe
