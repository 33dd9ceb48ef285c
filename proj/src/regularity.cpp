#include "rothe/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rothe/errors.hpp"
#include "rothe/numerics.hpp"

namespace rothe {

RegularityConfig RegularityConfig::for_exponent(double a, double eps) {
  RegularityConfig c;
  c.a = a;
  c.alpha = a < 2.0 ? a : 2.0 - 1e-2;
  c.eps = eps;
  c.validate();
  return c;
}

void RegularityConfig::validate() const {
  if (!(a > 0.0 && alpha > 0.0)) throw ConfigError("regularity needs a > 0 and alpha > 0");
  if (!(eps >= 0.0 && eps < 1.0)) throw ConfigError("regularity eps must lie in [0, 1)");
}

namespace {

// int_x^1 r^-alpha dr for 0 < x <= 1.
double tail(double alpha, double x) {
  if (alpha == 1.0) return -std::log(x);
  return (1.0 - std::pow(x, 1.0 - alpha)) / (1.0 - alpha);
}

}  // namespace

double psi_eps(double alpha, double eps, double m) {
  if (m < 0.0) throw DomainError("psi_eps needs m >= 0");
  if (m >= 1.0) return m - 1.0;
  const double r0 = eps > 0.0 ? std::pow(eps, 1.0 / alpha) : 0.0;
  const double lo = std::max(m, r0);
  if (lo == 0.0) return -std::numeric_limits<double>::infinity();
  double v = tail(alpha, lo);
  if (m < r0) v += (r0 - m) / eps;
  return -v;
}

double psi_eps_primitive(double alpha, double eps, double m) {
  if (m < 0.0) throw DomainError("psi_eps_primitive needs m >= 0");
  if (m >= 1.0) return 0.5 * (m - 1.0) * (m - 1.0);
  const double r0 = eps > 0.0 ? std::pow(eps, 1.0 / alpha) : 0.0;
  auto psi = [&](double r) { return psi_eps(alpha, eps, r); };
  double s = 0.0;
  if (m < r0) s += numerics::adaptive_simpson(psi, m, r0, 1e-13);
  s += numerics::adaptive_simpson(psi, std::max(m, r0), 1.0, 1e-13);
  return -s;
}

double weighted_gradient_functional(const StructuredGrid& g,
                                    const Trajectory& tr, double a,
                                    double alpha) {
  const double p = a - alpha;
  auto weight = [p](double mi, double mj) {
    const double mf = std::max(std::min(mi, mj), 0.0);
    if (p == 0.0) return 1.0;
    if (mf == 0.0) return p > 0.0 ? 0.0 : 1.0;
    return std::min(std::pow(mf, p), 1.0);
  };
  const double vol = g.cell_volume();
  const int n1 = g.n(0);
  const int n2 = g.n(1);
  double total = 0.0;
  for (std::size_t n = 1; n < tr.M.size(); ++n) {
    const Field& m = tr.M[n];
    const double tau = tr.times[n] - tr.times[n - 1];
    double s = 0.0;
    for (int j = 0; j < n2; ++j) {
      for (int i = 0; i < n1; ++i) {
        const std::size_t k = g.index(i, j);
        if (i + 1 < n1) {
          const double d = (m[k + 1] - m[k]) / g.h(0);
          s += weight(m[k], m[k + 1]) * d * d;
        }
        if (g.dim() == 2 && j + 1 < n2) {
          const std::size_t up = k + static_cast<std::size_t>(n1);
          const double d = (m[up] - m[k]) / g.h(1);
          s += weight(m[k], m[up]) * d * d;
        }
      }
    }
    total += tau * s * vol;
  }
  return total;
}

double theoretical_exponent(double a, double essinf_m0) {
  if (!(a > 0.0)) throw DomainError("growth exponent must be positive");
  if (a < 2.0 || essinf_m0 > 0.0) return 1.0;
  return 2.0 / a;
}

namespace {

constexpr double kFitLow = 1e-4;
constexpr double kFitHigh = 1e-1;

struct Regression {
  double slope = 0.0;
  double rms = 0.0;
};

Regression log_fit(const std::vector<double>& x, const std::vector<double>& v,
                   double front) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(x[i] - front);
    ly[i] = std::log(v[i]);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double dn = static_cast<double>(n);
  const double slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / dn;
  double r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ly[i] - icpt - slope * lx[i];
    r += e * e;
  }
  return {slope, std::sqrt(r / dn)};
}

}  // namespace

FrontFit fit_front_exponent(const StructuredGrid& g, const Field& m) {
  const int n1 = g.n(0);
  const int row = g.dim() == 2 ? g.n(1) / 2 : 0;
  std::vector<double> v(static_cast<std::size_t>(n1));
  for (int i = 0; i < n1; ++i) v[static_cast<std::size_t>(i)] = m[g.index(i, row)];
  int cross = -1;
  for (int i = 0; i + 1 < n1; ++i) {
    if ((v[static_cast<std::size_t>(i)] < kFitLow) != (v[static_cast<std::size_t>(i + 1)] < kFitLow)) {
      cross = i;
      break;
    }
  }
  if (cross < 0) throw NoFront("no interface between M < 1e-4 and M >= 1e-4");
  // Orient so that the void lies on the left.
  const bool ascending = v[static_cast<std::size_t>(cross)] < kFitLow;
  const double h = g.h(0);
  auto pos = [&](int i) { return (i + 0.5) * h; };
  std::vector<double> xs, vs;
  // The front may lie well behind the 1e-4 level (flat profiles), so the
  // search starts at the last empty cell.
  double below;
  if (ascending) {
    int z = cross;
    while (z > 0 && v[static_cast<std::size_t>(z)] > 0.0) --z;
    below = pos(z);
    for (int i = cross + 1; i < n1; ++i) {
      const double val = v[static_cast<std::size_t>(i)];
      if (val < kFitLow || val > kFitHigh) break;
      xs.push_back(pos(i));
      vs.push_back(val);
    }
  } else {
    int z = cross + 1;
    while (z + 1 < n1 && v[static_cast<std::size_t>(z)] > 0.0) ++z;
    below = -pos(z);
    for (int i = cross; i >= 0; --i) {
      const double val = v[static_cast<std::size_t>(i)];
      if (val < kFitLow || val > kFitHigh) break;
      xs.push_back(-pos(i));
      vs.push_back(val);
    }
  }
  if (xs.size() < 3) {
    throw NoFront("interface found but fewer than 3 cells with M in [1e-4, 1e-1]");
  }
  const double lo = below - h;
  const double hi = xs.front() - 1e-9 * h;
  constexpr int kScan = 400;
  double best = lo;
  double best_r = log_fit(xs, vs, lo).rms;
  for (int q = 1; q <= kScan; ++q) {
    const double f = lo + (hi - lo) * q / kScan;
    const double r = log_fit(xs, vs, f).rms;
    if (r < best_r) {
      best_r = r;
      best = f;
    }
  }
  // Golden-section refinement around the best scan point.
  const double step = (hi - lo) / kScan;
  double a = std::max(lo, best - step);
  double b = std::min(hi, best + step);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100 && b - a > 1e-14 * (1.0 + std::abs(b)); ++it) {
    const double c = b - gr * (b - a);
    const double d = a + gr * (b - a);
    if (log_fit(xs, vs, c).rms < log_fit(xs, vs, d).rms) {
      b = d;
    } else {
      a = c;
    }
  }
  const double front = 0.5 * (a + b);
  const Regression fit = log_fit(xs, vs, front);
  FrontFit out;
  out.gamma = fit.slope;
  out.r_hat = std::min(1.0, fit.slope + 0.5);
  out.residual = fit.rms;
  out.front = ascending ? front : -front;
  out.points = static_cast<int>(xs.size());
  return out;
}

FrontFit fit_front_exponent(const StructuredGrid& g, const Trajectory& tr,
                            double t_sample) {
  if (tr.times.empty()) throw NoFront("empty trajectory");
  std::size_t best = 0;
  for (std::size_t n = 1; n < tr.times.size(); ++n) {
    if (std::abs(tr.times[n] - t_sample) < std::abs(tr.times[best] - t_sample)) best = n;
  }
  return fit_front_exponent(g, tr.M[best]);
}

}  // namespace rothe
