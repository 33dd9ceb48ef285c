#include "rothe/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rothe/errors.hpp"

namespace rothe {

double SubstrateOwnDiffusion::operator()(double s) const {
  return floor + d * std::pow(std::max(s, 0.0), p);
}

double SubstrateOwnDiffusion::primitive(double s) const {
  if (s <= 0.0) return floor * s;
  return floor * s + d * std::pow(s, p + 1.0) / (p + 1.0);
}

MixedDiffusion switch_diffusion(double inside, double outside) {
  if (!(inside > 0.0 && outside > 0.0)) {
    throw InvalidProblem("switch diffusion values must be positive");
  }
  MixedDiffusion m;
  m.fn = [inside, outside](double mm, std::span<const double>) {
    return outside + (inside - outside) * std::clamp(mm, 0.0, 1.0);
  };
  m.d_min = std::min(inside, outside);
  m.d_max = std::max(inside, outside);
  m.name = "switch";
  return m;
}

double eval_substrate_diffusion(const SubstrateDiffusion& d, std::size_t j,
                                double m, std::span<const double> s) {
  if (const auto* c = std::get_if<ConstantDiffusion>(&d)) return c->value;
  if (const auto* o = std::get_if<SubstrateOwnDiffusion>(&d)) return (*o)(s[j]);
  return std::get<MixedDiffusion>(d).fn(m, s);
}

DataBounds ProblemSpec::data_bounds() const {
  DataBounds b;
  b.M_lo = *std::min_element(M0.begin(), M0.end());
  b.M_hi = *std::max_element(M0.begin(), M0.end());
  if (substrates.empty()) return b;
  b.S_lo = substrates[0].S0.empty() ? 0.0 : substrates[0].S0[0];
  b.S_hi = b.S_lo;
  for (const auto& sub : substrates) {
    for (double s : sub.S0) {
      b.S_lo = std::min(b.S_lo, s);
      b.S_hi = std::max(b.S_hi, s);
    }
  }
  return b;
}

SamplingBox ProblemSpec::kinetics_box() const {
  const DataBounds b = data_bounds();
  SamplingBox box;
  const double lo = std::min(b.S_lo, 0.0);
  const double hi = std::max(b.S_hi, 1.0);
  box.s.assign(k(), {lo, hi});
  return box;
}

namespace {

std::string fmt(double x) {
  std::ostringstream o;
  o << x;
  return o.str();
}

}  // namespace

void ProblemSpec::validate() const {
  if (!(T > 0.0)) throw InvalidProblem("horizon T must be positive");
  if (M0.size() != grid.cells()) {
    throw InvalidProblem("M0 has " + std::to_string(M0.size()) +
                         " values for " + std::to_string(grid.cells()) + " cells");
  }
  require_finite(M0, "M0");
  const DataBounds b = data_bounds();
  if (b.M_lo < 0.0) throw InvalidProblem("M0 must be nonnegative (min " + fmt(b.M_lo) + ")");
  if (!(b.M_hi < 1.0)) throw InvalidProblem("M0 must stay below 1 (max " + fmt(b.M_hi) + ")");
  if (!grid.gamma1_empty() && (h0 < b.M_lo || h0 > b.M_hi)) {
    throw InvalidProblem("Dirichlet value h0 = " + fmt(h0) + " outside [" +
                         fmt(b.M_lo) + ", " + fmt(b.M_hi) + "]");
  }
  if (kinetics.substrates() != k()) {
    throw InvalidProblem("kinetics " + kinetics.name + " expects " +
                         std::to_string(kinetics.substrates()) +
                         " substrates, problem has " + std::to_string(k()));
  }
  for (std::size_t j = 0; j < k(); ++j) {
    const auto& sub = substrates[j];
    const std::string tag = "substrate " + std::to_string(j + 1);
    if (sub.S0.size() != grid.cells()) throw InvalidProblem(tag + ": S0 size mismatch");
    require_finite(sub.S0, tag + " S0");
    if (sub.nu < 0.0) throw InvalidProblem(tag + ": mobility must be >= 0");
    if (!sub.mobile()) continue;
    if (sub.h < b.S_lo || sub.h > b.S_hi) {
      throw InvalidProblem(tag + ": boundary value " + fmt(sub.h) + " outside [" +
                           fmt(b.S_lo) + ", " + fmt(b.S_hi) + "]");
    }
    if (const auto* c = std::get_if<ConstantDiffusion>(&sub.D)) {
      if (!(c->value > 0.0)) throw InvalidProblem(tag + ": constant D must be > 0");
    } else if (const auto* o = std::get_if<SubstrateOwnDiffusion>(&sub.D)) {
      if (!(o->d >= 0.0 && o->p > 0.0 && o->floor >= 0.0) ||
          (o->d == 0.0 && o->floor == 0.0)) {
        throw InvalidProblem(tag + ": D(s) = floor + d s^p needs d >= 0, p > 0, floor >= 0, not both zero");
      }
      if (o->degenerate()) {
        if (sub.v[0] != 0.0 || sub.v[1] != 0.0) {
          throw InvalidProblem(tag + ": degenerate D(s) requires zero flow");
        }
        if (sub.h < 0.0 || *std::min_element(sub.S0.begin(), sub.S0.end()) < 0.0) {
          throw InvalidProblem(tag + ": degenerate D(s) requires nonnegative data");
        }
      }
    } else {
      const auto& mx = std::get<MixedDiffusion>(sub.D);
      if (!(mx.d_min > 0.0 && mx.d_max >= mx.d_min)) {
        throw InvalidProblem(tag + ": D(m, s) bounds need 0 < d_min <= d_max");
      }
      std::vector<double> s(k(), 0.0);
      for (int im = 0; im <= 20; ++im) {
        for (int is = 0; is <= 20; ++is) {
          const double m = im / 20.0;
          std::fill(s.begin(), s.end(), b.S_lo + (b.S_hi - b.S_lo) * is / 20.0);
          const double d = mx.fn(m, s);
          if (d < mx.d_min * (1 - 1e-12) || d > mx.d_max * (1 + 1e-12)) {
            throw InvalidProblem(tag + ": D(" + fmt(m) + ", s) = " + fmt(d) +
                                 " leaves [d_min, d_max]");
          }
        }
      }
    }
  }
  validate_kinetics(kinetics, kinetics_box());
}

}  // namespace rothe
