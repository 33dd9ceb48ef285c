#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "rothe/coefficient_law.hpp"

namespace rothe {

/// Tables stop at 1 - kEtaCap; bounded solutions never visit the singular tail.
inline constexpr double kEtaCap = 1e-8;

/// Absolute tolerance used by every scalar inversion.
inline double tol_inv(double u) { return 1e-12 * (1.0 + (u < 0 ? -u : u)); }

/// Primitive x -> int_{x0}^x g of a positive integrand that is smooth between
/// the given breakpoints. Panel integrals use an 8-point Gauss rule, so the
/// cumulative table and pointwise evaluation share one quadrature and the
/// primitive stays monotone to rounding.
class PiecewisePrimitive {
 public:
  using Integrand = std::function<double(double)>;

  PiecewisePrimitive(Integrand g, std::vector<double> nodes);

  [[nodiscard]] double value(double x) const;
  /// Inverse on [value(lo), value(hi)]; safeguarded Newton inside one panel.
  [[nodiscard]] double solve(double y) const;
  [[nodiscard]] double integrand(double x) const { return g_(x); }

  [[nodiscard]] double lo() const { return nodes_.front(); }
  [[nodiscard]] double hi() const { return nodes_.back(); }
  [[nodiscard]] double top_value() const { return cumulative_.back(); }
  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }

 private:
  Integrand g_;
  std::vector<double> nodes_;
  std::vector<double> cumulative_;
};

/// Breakpoints on [0, cap]: geometric toward 0, uniform in the bulk and,
/// for singular laws, geometric toward the cap.
std::vector<double> graded_nodes(double cap, bool refine_toward_cap);

/// Phi(m) = int_0^m D0, tabulated on [0, 1 - kEtaCap].
class KirchhoffTransform {
 public:
  explicit KirchhoffTransform(CoefficientLaw law);

  [[nodiscard]] double operator()(double m) const;
  [[nodiscard]] double inverse(double u) const;
  [[nodiscard]] double max_value() const { return table_.top_value(); }
  [[nodiscard]] double cap() const { return table_.hi(); }
  [[nodiscard]] const CoefficientLaw& law() const { return *law_; }

 private:
  std::shared_ptr<const CoefficientLaw> law_;
  PiecewisePrimitive table_;
};

double kirchhoff(const KirchhoffTransform& t, double m);
double kirchhoff_inv(const KirchhoffTransform& t, double u);

/// Phi_eps(m) = int_0^m min{max{eps, D0}, 1/eps}, defined on all of R by
/// continuing the clamped integrand constantly outside the tabulated range.
/// beta_eps is its inverse.
class RegularizedTransform {
 public:
  RegularizedTransform(CoefficientLaw law, double eps);

  [[nodiscard]] double phi(double m) const;
  [[nodiscard]] double beta(double u) const;
  /// Phi_eps'(m), the clamped integrand.
  [[nodiscard]] double dphi(double m) const;
  /// beta_eps'(u) = 1 / Phi_eps'(beta_eps(u)).
  [[nodiscard]] double dbeta(double u) const { return 1.0 / dphi(beta(u)); }

  [[nodiscard]] double eps() const { return eps_; }
  [[nodiscard]] const CoefficientLaw& law() const { return *law_; }

 private:
  std::shared_ptr<const CoefficientLaw> law_;
  double eps_;
  double slope_top_;
  PiecewisePrimitive table_;
};

double phi_eps(const RegularizedTransform& r, double m);
double beta_eps(const RegularizedTransform& r, double u);

}  // namespace rothe
