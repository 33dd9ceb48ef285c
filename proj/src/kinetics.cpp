#include "rothe/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rothe/errors.hpp"

namespace rothe {

double Kinetics::rate0(double m, std::span<const double> s) const {
  return f0(std::clamp(m, 0.0, 1.0), s);
}

double Kinetics::rate(std::size_t j, double m, std::span<const double> s) const {
  return fj[j](std::clamp(m, 0.0, 1.0), s);
}

namespace {

// Monod saturation of a nonnegative part, Lipschitz on all of R.
double monod(double s, double half) {
  const double sp = std::max(s, 0.0);
  return sp / (half + sp);
}

RateFn passive() {
  return [](double, std::span<const double>) { return 0.0; };
}

}  // namespace

Kinetics eberl2001_kinetics(const EberlConstants& c, std::size_t substrates) {
  if (!(c.k1 > 0 && c.k2 > 0 && c.k3 > 0 && c.k4 > 0)) {
    throw InvalidProblem("eberl2001 constants k1..k4 must be positive");
  }
  if (substrates < 1) throw InvalidProblem("eberl2001 needs a substrate");
  Kinetics k;
  k.name = "eberl2001";
  k.f0 = [c](double m, std::span<const double> s) {
    return c.k3 * monod(s[0], c.k4) * m - c.k2 * m;
  };
  k.fj.push_back([c](double m, std::span<const double> s) {
    return -c.k1 * monod(s[0], c.k4) * m;
  });
  for (std::size_t j = 1; j < substrates; ++j) k.fj.push_back(passive());
  const double growth = std::max(c.k3 - c.k2, 0.0);
  k.f_max = [growth](double m) { return growth * std::clamp(m, 0.0, 1.0); };
  k.lipschitz = std::max({c.k2, c.k3 - c.k2, c.k3 / c.k4, c.k1, c.k1 / c.k4});
  return k;
}

Kinetics cellulolytic2017_kinetics(double lambda, std::size_t substrates) {
  if (!(lambda >= 0.0)) throw InvalidProblem("lambda must be nonnegative");
  if (substrates < 1) throw InvalidProblem("cellulolytic2017 needs a substrate");
  Kinetics k;
  k.name = "cellulolytic2017";
  k.f0 = [lambda](double m, std::span<const double> s) {
    return (monod(s[0], 1.0) - lambda) * m;
  };
  k.fj.push_back([](double m, std::span<const double> s) {
    return -monod(s[0], 1.0) * m;
  });
  for (std::size_t j = 1; j < substrates; ++j) k.fj.push_back(passive());
  const double growth = std::max(1.0 - lambda, 0.0);
  k.f_max = [growth](double m) { return growth * std::clamp(m, 0.0, 1.0); };
  k.lipschitz = std::max(1.0, lambda);
  return k;
}

Kinetics zero_kinetics(std::size_t substrates) {
  Kinetics k;
  k.name = "zero";
  k.f0 = passive();
  for (std::size_t j = 0; j < substrates; ++j) k.fj.push_back(passive());
  k.f_max = [](double) { return 0.0; };
  k.lipschitz = 0.0;
  return k;
}

namespace {

// Visits every point of the tensor grid spanned by the sampling box.
template <class Visit>
void for_each_sample(const SamplingBox& box, std::size_t k, int points,
                     Visit&& visit) {
  const std::size_t dims = k + 1;
  std::vector<int> idx(dims, 0);
  std::vector<double> x(dims);
  auto coord = [&](std::size_t d, int i) {
    const auto& r = d == 0 ? box.m : box.s[d - 1];
    return points == 1 ? r.first
                       : r.first + (r.second - r.first) * i / (points - 1);
  };
  while (true) {
    for (std::size_t d = 0; d < dims; ++d) x[d] = coord(d, idx[d]);
    visit(x, idx, coord);
    std::size_t d = 0;
    while (d < dims && ++idx[d] == points) {
      idx[d] = 0;
      ++d;
    }
    if (d == dims) break;
  }
}

int points_for(const SamplingBox& box, std::size_t k) {
  // Keep the tensor grid near 10^5 points regardless of k.
  const double cap = std::pow(1e5, 1.0 / static_cast<double>(k + 1));
  return std::max(3, std::min(box.points_per_axis, static_cast<int>(cap)));
}

void check_box(const Kinetics& kin, const SamplingBox& box) {
  if (box.s.size() != kin.substrates()) {
    throw InvalidProblem("sampling box has " + std::to_string(box.s.size()) +
                         " substrate ranges for " +
                         std::to_string(kin.substrates()) + " substrates");
  }
}

}  // namespace

double estimate_lipschitz(const Kinetics& kin, const SamplingBox& box) {
  check_box(kin, box);
  const std::size_t k = kin.substrates();
  const int points = points_for(box, k);
  double best = 0.0;
  std::vector<double> shifted;
  for_each_sample(box, k, points, [&](const std::vector<double>& x,
                                      const std::vector<int>& idx,
                                      const auto& coord) {
    const std::span<const double> s(x.data() + 1, k);
    for (std::size_t d = 0; d < x.size(); ++d) {
      if (idx[d] + 1 >= points) continue;
      shifted = x;
      shifted[d] = coord(d, idx[d] + 1);
      const double dx = shifted[d] - x[d];
      if (dx == 0.0) continue;
      const std::span<const double> s2(shifted.data() + 1, k);
      best = std::max(best, std::abs(kin.rate0(shifted[0], s2) -
                                     kin.rate0(x[0], s)) / dx);
      for (std::size_t j = 0; j < k; ++j) {
        best = std::max(best, std::abs(kin.rate(j, shifted[0], s2) -
                                       kin.rate(j, x[0], s)) / dx);
      }
    }
  });
  return best;
}

void validate_kinetics(const Kinetics& kin, const SamplingBox& box) {
  check_box(kin, box);
  const std::size_t k = kin.substrates();
  const int points = points_for(box, k);
  for_each_sample(box, k, points, [&](const std::vector<double>& x,
                                      const std::vector<int>&, const auto&) {
    const std::span<const double> s(x.data() + 1, k);
    const double f0 = kin.rate0(x[0], s);
    if (f0 > kin.fmax(x[0]) + 1e-12) {
      std::ostringstream msg;
      msg << kin.name << ": f0(" << x[0] << ", s) = " << f0
          << " exceeds f_max = " << kin.fmax(x[0]);
      throw InvalidProblem(msg.str());
    }
    if (kin.rate0(0.0, s) < 0.0) {
      throw InvalidProblem(kin.name + ": f0(0, s) < 0 violates nonnegativity");
    }
  });
  const double observed = estimate_lipschitz(kin, box);
  if (observed > kin.lipschitz * (1.0 + 1e-6) + 1e-14) {
    std::ostringstream msg;
    msg << kin.name << ": sampled Lipschitz quotient " << observed
        << " exceeds declared C_L = " << kin.lipschitz;
    throw InvalidProblem(msg.str());
  }
}

}  // namespace rothe
