#include "rothe/coefficient_law.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rothe/errors.hpp"

namespace rothe {

namespace {

double fast_pow(double x, double p) {
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  if (p == 3.0) return x * x * x;
  if (p == 0.5) return std::sqrt(x);
  return std::pow(x, p);
}

// Fritsch-Carlson slopes; keeps the interpolant monotone wherever the data is.
std::vector<double> monotone_slopes(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  }
  std::vector<double> s(n);
  s[0] = delta[0];
  s[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      s[i] = 0.0;
    } else {
      const double h0 = x[i] - x[i - 1];
      const double h1 = x[i + 1] - x[i];
      const double w1 = 2.0 * h1 + h0;
      const double w2 = h1 + 2.0 * h0;
      s[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (delta[i] == 0.0) {
      s[i] = 0.0;
      s[i + 1] = 0.0;
      continue;
    }
    const double alpha = s[i] / delta[i];
    const double beta = s[i + 1] / delta[i];
    const double r = alpha * alpha + beta * beta;
    if (r > 9.0) {
      const double t = 3.0 / std::sqrt(r);
      s[i] = t * alpha * delta[i];
      s[i + 1] = t * beta * delta[i];
    }
  }
  return s;
}

}  // namespace

CoefficientLaw::CoefficientLaw(Kind kind, double eps0)
    : kind_(std::move(kind)), eps0_(eps0) {
  if (!(eps0_ > 0.0 && eps0_ <= 1.0)) {
    throw InvalidProblem("coefficient law: eps0 must lie in (0, 1]");
  }
  if (const auto* t = std::get_if<Tabulated>(&kind_)) {
    if (t->m.size() < 2 || t->m.size() != t->d.size()) {
      throw InvalidProblem("tabulated law: need >= 2 samples of equal length");
    }
    if (t->m.front() != 0.0 || t->d.front() != 0.0) {
      throw InvalidProblem("tabulated law: first sample must be (0, 0)");
    }
    for (std::size_t i = 0; i + 1 < t->m.size(); ++i) {
      if (!(t->m[i + 1] > t->m[i])) {
        throw InvalidProblem("tabulated law: sample grid not increasing");
      }
    }
    if (t->m.back() >= 1.0) {
      throw InvalidProblem("tabulated law: samples must lie in [0, 1)");
    }
    slopes_ = monotone_slopes(t->m, t->d);
  }
  if (const auto* p = std::get_if<PowerLawSingular>(&kind_)) {
    if (!(p->d2 > 0.0 && p->a >= 1.0 && p->b >= 1.0)) {
      throw InvalidProblem("singular law requires d2 > 0, a >= 1, b >= 1");
    }
  }
  if (const auto* p = std::get_if<PowerLaw>(&kind_)) {
    if (!(p->a > 0.0)) throw InvalidProblem("power law requires a > 0");
  }
  validate();
}

double CoefficientLaw::eval_unchecked(double m) const {
  if (const auto* p = std::get_if<PowerLawSingular>(&kind_)) {
    return p->d2 * fast_pow(m, p->a) / fast_pow(1.0 - m, p->b);
  }
  if (const auto* p = std::get_if<PowerLaw>(&kind_)) {
    return fast_pow(m, p->a);
  }
  const auto& t = std::get<Tabulated>(kind_);
  if (m >= t.m.back()) return t.d.back();
  const auto it = std::upper_bound(t.m.begin(), t.m.end(), m);
  const std::size_t i = static_cast<std::size_t>(it - t.m.begin()) - 1;
  const double h = t.m[i + 1] - t.m[i];
  const double s = (m - t.m[i]) / h;
  const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
  const double h10 = s * (1.0 - s) * (1.0 - s);
  const double h01 = s * s * (3.0 - 2.0 * s);
  const double h11 = s * s * (s - 1.0);
  return h00 * t.d[i] + h10 * h * slopes_[i] + h01 * t.d[i + 1] +
         h11 * h * slopes_[i + 1];
}

double CoefficientLaw::operator()(double m) const {
  if (!(m >= 0.0)) {
    throw DomainError("D0 evaluated at negative density " + std::to_string(m));
  }
  if (singular() && m >= 1.0) {
    throw DomainError("singular D0 evaluated at m >= 1");
  }
  return eval_unchecked(m);
}

double CoefficientLaw::growth_exponent() const {
  if (const auto* p = std::get_if<PowerLawSingular>(&kind_)) return p->a;
  if (const auto* p = std::get_if<PowerLaw>(&kind_)) return p->a;
  // Log-log slope between the first two positive samples.
  const auto& t = std::get<Tabulated>(kind_);
  for (std::size_t i = 1; i + 1 < t.m.size(); ++i) {
    if (t.d[i] > 0.0 && t.d[i + 1] > 0.0) {
      return std::log(t.d[i + 1] / t.d[i]) / std::log(t.m[i + 1] / t.m[i]);
    }
  }
  throw DomainError("tabulated law has no positive samples to fit an exponent");
}

void CoefficientLaw::validate() const {
  if (eval_unchecked(0.0) != 0.0) throw InvalidProblem("D0(0) must be 0");
  constexpr int kSamples = 1000;
  const double top = singular() ? 1.0 - 1e-6 : 1.0;
  for (int i = 1; i < kSamples; ++i) {
    const double m = top * i / kSamples;
    if (!(eval_unchecked(m) > 0.0)) {
      throw InvalidProblem("D0 must be positive on (0, 1); fails at m = " +
                           std::to_string(m));
    }
  }
  double prev = eval_unchecked(0.0);
  for (int i = 1; i < kSamples; ++i) {
    const double m = eps0_ * i / kSamples;
    const double d = eval_unchecked(m);
    if (!(d > prev)) {
      throw InvalidProblem("D0 not strictly increasing on [0, eps0) near m = " +
                           std::to_string(m));
    }
    prev = d;
  }
  if (singular() &&
      !(eval_unchecked(1.0 - 1e-6) > 1e3 * eval_unchecked(0.5))) {
    throw InvalidProblem("singular D0 does not blow up toward m = 1");
  }
}

double eval_D0(const CoefficientLaw& law, double m) { return law(m); }

}  // namespace rothe
