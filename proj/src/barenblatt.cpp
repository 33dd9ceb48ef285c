#include "rothe/barenblatt.hpp"

#include <algorithm>
#include <cmath>

#include "rothe/errors.hpp"

namespace rothe {

namespace {

struct Exponents {
  double m, al, be, k;
};

Exponents exponents(double a, int d) {
  const double m = a + 1.0;
  const double al = d / (d * (m - 1.0) + 2.0);
  const double be = al / d;
  const double k = al * (m - 1.0) / (2.0 * m * d);
  return {m, al, be, k};
}

}  // namespace

double Barenblatt::value(std::array<double, 2> x, double t) const {
  if (!(t > 0.0)) throw DomainError("Barenblatt profile needs t > 0");
  const Exponents e = exponents(a, d);
  const double s = t / e.m;
  double r2 = (x[0] - center[0]) * (x[0] - center[0]);
  if (d == 2) r2 += (x[1] - center[1]) * (x[1] - center[1]);
  const double bracket = C - e.k * r2 * std::pow(s, -2.0 * e.be);
  if (bracket <= 0.0) return 0.0;
  return std::pow(s, -e.al) * std::pow(bracket, 1.0 / (e.m - 1.0));
}

double Barenblatt::support_radius(double t) const {
  const Exponents e = exponents(a, d);
  return std::sqrt(C / e.k) * std::pow(t / e.m, e.be);
}

double Barenblatt::peak(double t) const { return value(center, t); }

Field Barenblatt::sample(const StructuredGrid& g, double t) const {
  static constexpr std::array<double, 4> kNodes{-0.8611363115940526, -0.3399810435848563,
                                                0.3399810435848563, 0.8611363115940526};
  static constexpr std::array<double, 4> kWeights{0.3478548451374538, 0.6521451548625461,
                                                  0.6521451548625461, 0.3478548451374538};
  Field out(g.cells());
  for (std::size_t idx = 0; idx < g.cells(); ++idx) {
    const auto c = g.center(idx);
    double sum = 0.0;
    if (g.dim() == 1) {
      for (std::size_t p = 0; p < 4; ++p) {
        sum += kWeights[p] * value({c[0] + 0.5 * g.h(0) * kNodes[p], 0.0}, t);
      }
      out[idx] = 0.5 * sum;
    } else {
      for (std::size_t p = 0; p < 4; ++p) {
        for (std::size_t q = 0; q < 4; ++q) {
          sum += kWeights[p] * kWeights[q] *
                 value({c[0] + 0.5 * g.h(0) * kNodes[p], c[1] + 0.5 * g.h(1) * kNodes[q]}, t);
        }
      }
      out[idx] = 0.25 * sum;
    }
  }
  return out;
}

}  // namespace rothe
