#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rothe {

/// One scalar per cell, row-major with the first axis fastest.
using Field = std::vector<double>;

/// Throws DomainError naming `where` if any value is NaN or infinite.
void require_finite(std::span<const double> f, const std::string& where);

enum class Face : int { Left = 0, Right = 1, Bottom = 2, Top = 3 };

/// Dirichlet flag per boundary face, indexed by Face.
using FaceMask = std::array<bool, 4>;

inline constexpr FaceMask kAllNeumann{false, false, false, false};
inline constexpr FaceMask kAllDirichlet{true, true, true, true};

/// Uniform cell-centered grid on [0, L1] or [0, L1] x [0, L2]. The M-tag of
/// each boundary face is Dirichlet (Gamma_1) or homogeneous Neumann.
class StructuredGrid {
 public:
  StructuredGrid(int dim, std::array<int, 2> n, std::array<double, 2> extent,
                 FaceMask gamma1 = kAllNeumann);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] int n(int axis) const { return n_[axis]; }
  [[nodiscard]] double h(int axis) const { return h_[axis]; }
  [[nodiscard]] double extent(int axis) const { return extent_[axis]; }
  [[nodiscard]] std::size_t cells() const {
    return static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]);
  }
  [[nodiscard]] double cell_volume() const { return h_[0] * h_[1]; }
  [[nodiscard]] std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(j);
  }
  [[nodiscard]] std::array<double, 2> center(std::size_t idx) const;
  [[nodiscard]] int faces() const { return 2 * dim_; }

  [[nodiscard]] const FaceMask& gamma1() const { return gamma1_; }
  [[nodiscard]] bool dirichlet(Face f) const {
    return gamma1_[static_cast<int>(f)];
  }
  [[nodiscard]] bool gamma1_empty() const;
  [[nodiscard]] bool gamma1_full() const;

  [[nodiscard]] Field constant(double value) const {
    return Field(cells(), value);
  }

 private:
  int dim_;
  std::array<int, 2> n_;
  std::array<double, 2> extent_;
  std::array<double, 2> h_;
  FaceMask gamma1_;
};

/// Five-point operator y_i = diag_i x_i + sum over neighbours. Coefficients
/// toward missing neighbours are zero. Need not be symmetric.
struct Stencil5 {
  int n1 = 0;
  int n2 = 1;
  std::vector<double> diag, xm, xp, ym, yp;

  Stencil5() = default;
  Stencil5(int n1_, int n2_);
  [[nodiscard]] std::size_t size() const { return diag.size(); }
  void apply(std::span<const double> x, std::span<double> y) const;
  [[nodiscard]] Field apply(std::span<const double> x) const;
  void add_diagonal(std::span<const double> d);
  void scale(double a);
  void add(const Stencil5& other, double a = 1.0);
};

/// K(x) = A x - bc, where bc carries the known boundary data.
struct AffineOperator {
  Stencil5 A;
  Field bc;

  [[nodiscard]] Field apply(std::span<const double> x) const;
};

/// Two-point flux negative Laplacian. Interior faces use the harmonic mean of
/// the cell coefficients (1 everywhere when `coeff` is empty); Dirichlet faces
/// in `dirichlet` use the cell coefficient over the half-cell distance and the
/// ghost value `boundary_value`; other faces carry no flux.
AffineOperator diffusion_operator(const StructuredGrid& g,
                                  const FaceMask& dirichlet,
                                  double boundary_value,
                                  std::span<const double> coeff = {});

/// The M-equation operator: Dirichlet on Gamma_1 with ghost value
/// `h0_dirichlet`, zero flux on Gamma_2.
Field apply_diffusion(const StructuredGrid& g, std::span<const double> u,
                      double h0_dirichlet);

/// Normal velocities on the faces normal to each axis. x-faces are stored
/// (n1 + 1) per row, y-faces n1 per row with n2 + 1 rows.
struct FaceVelocity {
  std::vector<double> x;
  std::vector<double> y;
};

FaceVelocity uniform_velocity(const StructuredGrid& g,
                              std::array<double, 2> v);
[[nodiscard]] double max_speed(const FaceVelocity& v);

/// First-order upwind discretisation of div(v s). Inflow through faces in
/// `open` carries `inflow_value`; closed faces carry no flux.
AffineOperator advection_operator(const StructuredGrid& g,
                                  const FaceVelocity& v, const FaceMask& open,
                                  double inflow_value);

Field apply_advection_upwind(const StructuredGrid& g, std::span<const double> s,
                             const FaceVelocity& v, double inflow_value,
                             const FaceMask& open = kAllDirichlet);

enum class Norm { L1, L2, Mass, Max, Min };

double integrate(const StructuredGrid& g, std::span<const double> f, Norm norm);

/// Sum over faces of transmissibility times squared jump, i.e. the discrete
/// ||grad u||^2. Dirichlet faces in `dirichlet` use the half-cell distance to
/// `boundary_value`.
double gradient_energy(const StructuredGrid& g, std::span<const double> u,
                       const FaceMask& dirichlet, double boundary_value);

/// Header `dim n1 [n2] h1 [h2] time`, then one value per line.
void write_snapshot(std::ostream& out, const StructuredGrid& g,
                    std::span<const double> f, double time);
struct Snapshot {
  int dim = 1;
  std::array<int, 2> n{1, 1};
  std::array<double, 2> h{1.0, 1.0};
  double time = 0.0;
  Field values;
};
Snapshot read_snapshot(std::istream& in);

}  // namespace rothe
