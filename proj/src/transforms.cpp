#include "rothe/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rothe/errors.hpp"
#include "rothe/numerics.hpp"

namespace rothe {

PiecewisePrimitive::PiecewisePrimitive(Integrand g, std::vector<double> nodes)
    : g_(std::move(g)), nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
  cumulative_.resize(nodes_.size());
  cumulative_[0] = 0.0;
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
    cumulative_[i + 1] =
        cumulative_[i] + numerics::gauss_legendre8(g_, nodes_[i], nodes_[i + 1]);
  }
}

double PiecewisePrimitive::value(double x) const {
  if (x <= nodes_.front()) return 0.0;
  if (x >= nodes_.back()) return cumulative_.back();
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  if (x == nodes_[i]) return cumulative_[i];
  return cumulative_[i] + numerics::gauss_legendre8(g_, nodes_[i], x);
}

double PiecewisePrimitive::solve(double y) const {
  if (y <= 0.0) return nodes_.front();
  if (y >= cumulative_.back()) return nodes_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), y);
  const std::size_t i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  double lo = nodes_[i];
  double hi = nodes_[i + 1];
  const double base = cumulative_[i];
  const double span = cumulative_[i + 1] - base;
  double x = lo + (hi - lo) * (y - base) / span;
  const double tol = 0.01 * tol_inv(y);
  for (int iter = 0; iter < 100; ++iter) {
    const double r = base + numerics::gauss_legendre8(g_, nodes_[i], x) - y;
    if (r == 0.0) return x;
    if (r > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double slope = g_(x);
    double next = x - r / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (std::abs(r) <= tol &&
        step <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
      return x;
    }
    if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(1e-300, std::abs(x))) {
      return x;
    }
  }
  const double r = value(x) - y;
  if (std::abs(r) <= tol_inv(y)) return x;
  throw NonConvergence("monotone inversion failed at y = " + std::to_string(y));
}

std::vector<double> graded_nodes(double cap, bool refine_toward_cap) {
  std::vector<double> nodes{0.0};
  constexpr double kBulkStart = 1.0 / 1024.0;
  for (double x = 1e-14; x < kBulkStart; x *= 2.0) nodes.push_back(x);
  const double bulk_end = refine_toward_cap ? 0.5 : cap;
  constexpr int kBulkPanels = 1024;
  for (int i = 0; i <= kBulkPanels; ++i) {
    const double x = kBulkStart + (bulk_end - kBulkStart) * i / kBulkPanels;
    if (x <= cap) nodes.push_back(x);
  }
  if (refine_toward_cap) {
    for (double gap = 0.5 / 1.25; gap > 1.0 - cap; gap /= 1.25) {
      nodes.push_back(1.0 - gap);
    }
  }
  nodes.push_back(cap);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  while (nodes.back() > cap) nodes.pop_back();
  return nodes;
}

namespace {

std::vector<double> law_nodes(const CoefficientLaw& law, double cap) {
  auto nodes = graded_nodes(cap, law.singular());
  if (const auto* t = std::get_if<Tabulated>(&law.kind())) {
    for (double m : t->m) {
      if (m > 0.0 && m < cap) nodes.push_back(m);
    }
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

// Adds the points where D0 crosses a clamp level, so every panel of the
// regularized integrand is smooth.
void insert_crossings(const CoefficientLaw& law, double level,
                      std::vector<double>& nodes) {
  std::vector<double> extra;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double a = nodes[i];
    const double b = nodes[i + 1];
    const double fa = law.eval_unchecked(a) - level;
    const double fb = law.eval_unchecked(b) - level;
    if ((fa < 0.0) == (fb < 0.0)) continue;
    auto g = [&](double x) {
      const double v = law.eval_unchecked(x) - level;
      return fa < 0.0 ? v : -v;
    };
    extra.push_back(numerics::bisect_increasing(g, a, b));
  }
  nodes.insert(nodes.end(), extra.begin(), extra.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
}

PiecewisePrimitive make_kirchhoff_table(
    const std::shared_ptr<const CoefficientLaw>& law) {
  const double cap = 1.0 - kEtaCap;
  return PiecewisePrimitive(
      [law](double m) { return law->eval_unchecked(m); }, law_nodes(*law, cap));
}

PiecewisePrimitive make_regularized_table(
    const std::shared_ptr<const CoefficientLaw>& law, double eps) {
  const double cap = 1.0 - kEtaCap;
  auto nodes = law_nodes(*law, cap);
  insert_crossings(*law, eps, nodes);
  insert_crossings(*law, 1.0 / eps, nodes);
  return PiecewisePrimitive(
      [law, eps](double m) {
        return std::clamp(law->eval_unchecked(m), eps, 1.0 / eps);
      },
      std::move(nodes));
}

}  // namespace

KirchhoffTransform::KirchhoffTransform(CoefficientLaw law)
    : law_(std::make_shared<const CoefficientLaw>(std::move(law))),
      table_(make_kirchhoff_table(law_)) {}

double KirchhoffTransform::operator()(double m) const {
  if (!(m >= 0.0 && m < 1.0)) {
    throw DomainError("Kirchhoff transform defined on [0, 1) only; m = " +
                      std::to_string(m));
  }
  if (m > table_.hi()) {
    throw RangeError("density beyond the Kirchhoff table cap 1 - 1e-8");
  }
  return table_.value(m);
}

double KirchhoffTransform::inverse(double u) const {
  if (!(u >= 0.0)) throw DomainError("inverse Kirchhoff needs u >= 0");
  if (u > table_.top_value()) {
    throw RangeError("Kirchhoff value " + std::to_string(u) +
                     " exceeds the tabulated range (density approaching 1)");
  }
  return table_.solve(u);
}

double kirchhoff(const KirchhoffTransform& t, double m) { return t(m); }
double kirchhoff_inv(const KirchhoffTransform& t, double u) {
  return t.inverse(u);
}

RegularizedTransform::RegularizedTransform(CoefficientLaw law, double eps)
    : law_(std::make_shared<const CoefficientLaw>(std::move(law))),
      eps_(eps),
      slope_top_(0.0),
      table_((eps > 0.0 && eps < 1.0)
                 ? make_regularized_table(law_, eps)
                 : throw DomainError("regularization eps must lie in (0, 1)")) {
  slope_top_ = table_.integrand(table_.hi());
}

double RegularizedTransform::dphi(double m) const {
  if (m < 0.0) return eps_;
  if (m > table_.hi()) return slope_top_;
  return table_.integrand(m);
}

double RegularizedTransform::phi(double m) const {
  if (m < 0.0) return eps_ * m;
  if (m > table_.hi()) return table_.top_value() + slope_top_ * (m - table_.hi());
  return table_.value(m);
}

double RegularizedTransform::beta(double u) const {
  if (u < 0.0) return u / eps_;
  if (u > table_.top_value()) {
    return table_.hi() + (u - table_.top_value()) / slope_top_;
  }
  return table_.solve(u);
}

double phi_eps(const RegularizedTransform& r, double m) { return r.phi(m); }
double beta_eps(const RegularizedTransform& r, double u) { return r.beta(u); }

}  // namespace rothe
