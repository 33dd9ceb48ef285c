#include "rothe/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "rothe/errors.hpp"

namespace rothe {

void require_finite(std::span<const double> f, const std::string& where) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) {
      throw DomainError(where + ": non-finite value at cell " +
                        std::to_string(i));
    }
  }
}

StructuredGrid::StructuredGrid(int dim, std::array<int, 2> n,
                               std::array<double, 2> extent, FaceMask gamma1)
    : dim_(dim), n_(n), extent_(extent), h_{1.0, 1.0}, gamma1_(gamma1) {
  if (dim != 1 && dim != 2) throw InvalidProblem("grid dimension must be 1 or 2");
  if (dim == 1) {
    n_[1] = 1;
    extent_[1] = 1.0;
    gamma1_[2] = gamma1_[3] = false;
  }
  for (int a = 0; a < dim; ++a) {
    if (n_[a] < 1) throw InvalidProblem("grid needs at least one cell per axis");
    if (!(extent_[a] > 0.0)) throw InvalidProblem("grid extent must be positive");
    h_[a] = extent_[a] / n_[a];
  }
}

std::array<double, 2> StructuredGrid::center(std::size_t idx) const {
  const auto i = static_cast<int>(idx % static_cast<std::size_t>(n_[0]));
  const auto j = static_cast<int>(idx / static_cast<std::size_t>(n_[0]));
  return {(i + 0.5) * h_[0], dim_ == 2 ? (j + 0.5) * h_[1] : 0.0};
}

bool StructuredGrid::gamma1_empty() const {
  for (int f = 0; f < faces(); ++f) {
    if (gamma1_[f]) return false;
  }
  return true;
}

bool StructuredGrid::gamma1_full() const {
  for (int f = 0; f < faces(); ++f) {
    if (!gamma1_[f]) return false;
  }
  return true;
}

Stencil5::Stencil5(int n1_, int n2_)
    : n1(n1_), n2(n2_) {
  const auto n = static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2);
  diag.assign(n, 0.0);
  xm.assign(n, 0.0);
  xp.assign(n, 0.0);
  ym.assign(n, 0.0);
  yp.assign(n, 0.0);
}

void Stencil5::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t w = static_cast<std::size_t>(n1);
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      const std::size_t k = static_cast<std::size_t>(i) + w * static_cast<std::size_t>(j);
      double v = diag[k] * x[k];
      if (i > 0) v += xm[k] * x[k - 1];
      if (i + 1 < n1) v += xp[k] * x[k + 1];
      if (j > 0) v += ym[k] * x[k - w];
      if (j + 1 < n2) v += yp[k] * x[k + w];
      y[k] = v;
    }
  }
}

Field Stencil5::apply(std::span<const double> x) const {
  Field y(size());
  apply(x, y);
  return y;
}

void Stencil5::add_diagonal(std::span<const double> d) {
  for (std::size_t k = 0; k < diag.size(); ++k) diag[k] += d[k];
}

void Stencil5::scale(double a) {
  for (auto* v : {&diag, &xm, &xp, &ym, &yp}) {
    for (double& c : *v) c *= a;
  }
}

void Stencil5::add(const Stencil5& o, double a) {
  for (std::size_t k = 0; k < diag.size(); ++k) {
    diag[k] += a * o.diag[k];
    xm[k] += a * o.xm[k];
    xp[k] += a * o.xp[k];
    ym[k] += a * o.ym[k];
    yp[k] += a * o.yp[k];
  }
}

Field AffineOperator::apply(std::span<const double> x) const {
  Field y = A.apply(x);
  for (std::size_t k = 0; k < y.size(); ++k) y[k] -= bc[k];
  return y;
}

namespace {

double harmonic(double a, double b) {
  return (a + b) > 0.0 ? 2.0 * a * b / (a + b) : 0.0;
}

}  // namespace

AffineOperator diffusion_operator(const StructuredGrid& g,
                                  const FaceMask& dirichlet,
                                  double boundary_value,
                                  std::span<const double> coeff) {
  const int n1 = g.n(0);
  const int n2 = g.n(1);
  AffineOperator op{Stencil5(n1, n2), Field(g.cells(), 0.0)};
  auto& A = op.A;
  const bool variable = !coeff.empty();
  auto c = [&](std::size_t k) { return variable ? coeff[k] : 1.0; };
  const double ix2 = 1.0 / (g.h(0) * g.h(0));
  const double iy2 = 1.0 / (g.h(1) * g.h(1));
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      const std::size_t k = g.index(i, j);
      auto couple = [&](std::size_t nb, double inv2, double& off) {
        const double t = harmonic(c(k), c(nb)) * inv2;
        off = -t;
        A.diag[k] += t;
      };
      auto boundary = [&](Face f, double inv2) {
        if (!dirichlet[static_cast<int>(f)]) return;
        const double t = 2.0 * c(k) * inv2;
        A.diag[k] += t;
        op.bc[k] += t * boundary_value;
      };
      if (i > 0) couple(k - 1, ix2, A.xm[k]); else boundary(Face::Left, ix2);
      if (i + 1 < n1) couple(k + 1, ix2, A.xp[k]); else boundary(Face::Right, ix2);
      if (g.dim() == 2) {
        const auto w = static_cast<std::size_t>(n1);
        if (j > 0) couple(k - w, iy2, A.ym[k]); else boundary(Face::Bottom, iy2);
        if (j + 1 < n2) couple(k + w, iy2, A.yp[k]); else boundary(Face::Top, iy2);
      }
    }
  }
  return op;
}

Field apply_diffusion(const StructuredGrid& g, std::span<const double> u,
                      double h0_dirichlet) {
  require_finite(u, "apply_diffusion");
  return diffusion_operator(g, g.gamma1(), h0_dirichlet).apply(u);
}

FaceVelocity uniform_velocity(const StructuredGrid& g, std::array<double, 2> v) {
  FaceVelocity fv;
  fv.x.assign(static_cast<std::size_t>(g.n(0) + 1) * static_cast<std::size_t>(g.n(1)), v[0]);
  if (g.dim() == 2) {
    fv.y.assign(static_cast<std::size_t>(g.n(0)) * static_cast<std::size_t>(g.n(1) + 1), v[1]);
  }
  return fv;
}

double max_speed(const FaceVelocity& v) {
  double s = 0.0;
  for (double x : v.x) s = std::max(s, std::abs(x));
  for (double y : v.y) s = std::max(s, std::abs(y));
  return s;
}

AffineOperator advection_operator(const StructuredGrid& g,
                                  const FaceVelocity& v, const FaceMask& open,
                                  double inflow_value) {
  const int n1 = g.n(0);
  const int n2 = g.n(1);
  AffineOperator op{Stencil5(n1, n2), Field(g.cells(), 0.0)};
  auto& A = op.A;
  const double ihx = 1.0 / g.h(0);
  const double ihy = 1.0 / g.h(1);
  const auto w = static_cast<std::size_t>(n1);
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i <= n1; ++i) {
      const double vel = v.x[static_cast<std::size_t>(i) + static_cast<std::size_t>(n1 + 1) * static_cast<std::size_t>(j)];
      if (i == 0 || i == n1) {
        const std::size_t k = g.index(i == 0 ? 0 : n1 - 1, j);
        const Face f = i == 0 ? Face::Left : Face::Right;
        if (!open[static_cast<int>(f)]) continue;
        const double outward = i == 0 ? -vel : vel;
        if (outward >= 0.0) {
          A.diag[k] += outward * ihx;
        } else {
          op.bc[k] += -outward * ihx * inflow_value;
        }
        continue;
      }
      const std::size_t lo = g.index(i - 1, j);
      const std::size_t hi = lo + 1;
      if (vel >= 0.0) {
        A.diag[lo] += vel * ihx;
        A.xm[hi] += -vel * ihx;
      } else {
        A.diag[hi] += -vel * ihx;
        A.xp[lo] += vel * ihx;
      }
    }
  }
  if (g.dim() == 2) {
    for (int j = 0; j <= n2; ++j) {
      for (int i = 0; i < n1; ++i) {
        const double vel = v.y[static_cast<std::size_t>(i) + w * static_cast<std::size_t>(j)];
        if (j == 0 || j == n2) {
          const std::size_t k = g.index(i, j == 0 ? 0 : n2 - 1);
          const Face f = j == 0 ? Face::Bottom : Face::Top;
          if (!open[static_cast<int>(f)]) continue;
          const double outward = j == 0 ? -vel : vel;
          if (outward >= 0.0) {
            A.diag[k] += outward * ihy;
          } else {
            op.bc[k] += -outward * ihy * inflow_value;
          }
          continue;
        }
        const std::size_t lo = g.index(i, j - 1);
        const std::size_t hi = lo + w;
        if (vel >= 0.0) {
          A.diag[lo] += vel * ihy;
          A.ym[hi] += -vel * ihy;
        } else {
          A.diag[hi] += -vel * ihy;
          A.yp[lo] += vel * ihy;
        }
      }
    }
  }
  return op;
}

Field apply_advection_upwind(const StructuredGrid& g, std::span<const double> s,
                             const FaceVelocity& v, double inflow_value,
                             const FaceMask& open) {
  require_finite(s, "apply_advection_upwind");
  return advection_operator(g, v, open, inflow_value).apply(s);
}

double integrate(const StructuredGrid& g, std::span<const double> f, Norm norm) {
  require_finite(f, "integrate");
  const double vol = g.cell_volume();
  switch (norm) {
    case Norm::L1: {
      double s = 0.0;
      for (double x : f) s += std::abs(x);
      return s * vol;
    }
    case Norm::L2: {
      double s = 0.0;
      for (double x : f) s += x * x;
      return std::sqrt(s * vol);
    }
    case Norm::Mass: {
      double s = 0.0;
      for (double x : f) s += x;
      return s * vol;
    }
    case Norm::Max:
      return *std::max_element(f.begin(), f.end());
    case Norm::Min:
      return *std::min_element(f.begin(), f.end());
  }
  return 0.0;
}

double gradient_energy(const StructuredGrid& g, std::span<const double> u,
                       const FaceMask& dirichlet, double boundary_value) {
  double e = 0.0;
  const int n1 = g.n(0);
  const int n2 = g.n(1);
  const double ix2 = 1.0 / (g.h(0) * g.h(0));
  const double iy2 = 1.0 / (g.h(1) * g.h(1));
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      const std::size_t k = g.index(i, j);
      if (i + 1 < n1) e += ix2 * (u[k + 1] - u[k]) * (u[k + 1] - u[k]);
      if (g.dim() == 2 && j + 1 < n2) {
        const double d = u[k + static_cast<std::size_t>(n1)] - u[k];
        e += iy2 * d * d;
      }
      const double b = u[k] - boundary_value;
      if (i == 0 && dirichlet[0]) e += 2.0 * ix2 * b * b;
      if (i + 1 == n1 && dirichlet[1]) e += 2.0 * ix2 * b * b;
      if (g.dim() == 2) {
        if (j == 0 && dirichlet[2]) e += 2.0 * iy2 * b * b;
        if (j + 1 == n2 && dirichlet[3]) e += 2.0 * iy2 * b * b;
      }
    }
  }
  return e * g.cell_volume();
}

void write_snapshot(std::ostream& out, const StructuredGrid& g,
                    std::span<const double> f, double time) {
  char buf[64];
  out << g.dim() << ' ' << g.n(0);
  if (g.dim() == 2) out << ' ' << g.n(1);
  std::snprintf(buf, sizeof buf, " %.16e", g.h(0));
  out << buf;
  if (g.dim() == 2) {
    std::snprintf(buf, sizeof buf, " %.16e", g.h(1));
    out << buf;
  }
  std::snprintf(buf, sizeof buf, " %.16e\n", time);
  out << buf;
  for (double x : f) {
    std::snprintf(buf, sizeof buf, "%.16e\n", x);
    out << buf;
  }
}

Snapshot read_snapshot(std::istream& in) {
  Snapshot s;
  if (!(in >> s.dim) || (s.dim != 1 && s.dim != 2)) {
    throw ConfigError("snapshot: bad dimension in header");
  }
  in >> s.n[0];
  if (s.dim == 2) in >> s.n[1];
  in >> s.h[0];
  if (s.dim == 2) in >> s.h[1];
  in >> s.time;
  if (!in || s.n[0] < 1 || s.n[1] < 1) throw ConfigError("snapshot: bad header");
  const auto count = static_cast<std::size_t>(s.n[0]) * static_cast<std::size_t>(s.n[1]);
  s.values.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    if (!(in >> s.values[k])) {
      throw ConfigError("snapshot: expected " + std::to_string(count) +
                        " values, got " + std::to_string(k));
    }
  }
  return s;
}

}  // namespace rothe
