#pragma once

#include <variant>
#include <vector>

namespace rothe {

/// D(m) = d2 m^a / (1 - m)^b: degenerate at 0, singular at 1.
struct PowerLawSingular {
  double d2 = 1.0;
  double a = 1.0;
  double b = 1.0;
};

/// Porous-medium law D(m) = m^a (degenerate, not singular).
struct PowerLaw {
  double a = 1.0;
};

/// Sampled law, interpolated with monotone piecewise cubics (Fritsch-Carlson).
/// The first sample must be (0, 0); beyond the last sample D is held constant.
struct Tabulated {
  std::vector<double> m;
  std::vector<double> d;
};

/// Biomass diffusion coefficient D0 on [0, 1).
///
/// Construction validates the structural requirements: D0(0) = 0, D0 > 0 on
/// (0, 1), strict increase on [0, eps0), and for the singular law a blow-up
/// of D0 toward 1.
class CoefficientLaw {
 public:
  using Kind = std::variant<PowerLawSingular, PowerLaw, Tabulated>;

  explicit CoefficientLaw(Kind kind, double eps0 = 1.0);

  /// D0(m). Throws DomainError for m < 0, or m >= 1 on the singular law.
  [[nodiscard]] double operator()(double m) const;

  /// Same as operator() without argument checks; m must be in the domain.
  [[nodiscard]] double eval_unchecked(double m) const;

  [[nodiscard]] bool singular() const {
    return std::holds_alternative<PowerLawSingular>(kind_);
  }
  [[nodiscard]] double eps0() const { return eps0_; }
  [[nodiscard]] const Kind& kind() const { return kind_; }

  /// Exponent a with D0(m) >= C m^a near zero, when the law has one.
  [[nodiscard]] double growth_exponent() const;

 private:
  void validate() const;

  Kind kind_;
  double eps0_;
  std::vector<double> slopes_;  // Hermite slopes for Tabulated
};

double eval_D0(const CoefficientLaw& law, double m);

}  // namespace rothe
