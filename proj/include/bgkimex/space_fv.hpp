#pragma once

#include <array>
#include <span>
#include <vector>

#include "bgkimex/kinetic.hpp"
#include "bgkimex/mesh.hpp"

namespace bgkimex {

enum class Weno5Weights { Nonlinear, Linear };

/// Jiang-Shu regularization of the nonlinear weights.
inline constexpr double kWenoEps = 1e-6;

/// Endpoint reconstruction of one cell from the five cell averages
/// (m2, m1, c0, p1, p2): lo approximates the value at the left interface,
/// hi at the right interface.
void weno5_cell(const double* stencil, Weno5Weights mode, double& lo, double& hi);

struct LimitedPair {
  double plus_left;    // limited f^+_{j-1/2}
  double minus_right;  // limited f^-_{j+1/2}
  double theta;
};

/// Zhang-Shu bound-preserving limiter in its interface-only form. Scales the
/// two endpoint values toward the cell average until they and the implied
/// interior Lobatto mass xi_j are nonnegative. Requires fbar >= 0.
LimitedPair positivity_limit_interfaces(double fbar, double f_plus_left, double f_minus_right);

/// How to treat negative cell averages when limiting: Strict throws, Lenient
/// passes the unlimited values through (used when running schemes that are
/// known to lose positivity).
enum class LimiterPolicy { Strict, Lenient };

struct TransportConfig {
  Weno5Weights weights = Weno5Weights::Nonlinear;
  bool limiter = true;
  LimiterPolicy policy = LimiterPolicy::Strict;
};

/// Scratch buffers reused across rows.
struct RowWorkspace {
  std::vector<double> padded;  // n_x + 6 cell averages (3 ghosts each side)
  std::vector<double> lo, hi;  // endpoint values for cells -1..n_x
  std::vector<double> flux;    // n_x + 1 interface fluxes
  void resize(int n_x);
};

/// Per-velocity frozen ghost data for DirichletGhost boundaries; null for
/// periodic. Points at 3 cell averages left (j = -3..-1) and right
/// (j = n_x..n_x+2).
struct GhostSpan {
  const double* left = nullptr;
  const double* right = nullptr;
};

/// Unlimited WENO5 interface values of one row: at interface x_{j+1/2}
/// (index i = j+1, i = 0..n_x), `minus[i]` is reconstructed from the left
/// cell and `plus[i]` from the right cell.
struct InterfaceValues {
  std::vector<double> minus, plus;
};
InterfaceValues weno5_interfaces(std::span<const double> row, const SpatialMesh& mesh,
                                 GhostSpan ghosts = {},
                                 Weno5Weights mode = Weno5Weights::Nonlinear);

/// dt-independent transport term T(f)_j = -(F_{j+1/2} - F_{j-1/2}) / dx for
/// one row at velocity v, limited WENO5 + upwind flux.
void transport_rhs_row(std::span<const double> row, double v, const SpatialMesh& mesh,
                       GhostSpan ghosts, const TransportConfig& cfg, RowWorkspace& ws,
                       std::span<double> out);

/// First-order upwind variant (one ghost cell used on each side).
void upwind1_rhs_row(std::span<const double> row, double v, const SpatialMesh& mesh,
                     GhostSpan ghosts, std::span<double> out);

/// Upwind numerical flux at an interface from the two one-sided values.
inline double upwind_flux(double v, double f_minus, double f_plus) {
  return v >= 0.0 ? v * f_minus : v * f_plus;
}

/// CFL bound for guaranteed positivity of one forward Euler transport step.
inline constexpr double kLobattoCfl = 1.0 / 12.0;

struct TransportStepResult {
  bool cfl_exceeded = false;  // dt |v| / dx > 1/12: positivity not guaranteed
};

/// f*_j = f_j - (dt/dx)(F_{j+1/2} - F_{j-1/2}); conservative under periodic
/// boundaries.
TransportStepResult transport_forward_euler(std::span<const double> row, double v, double dt,
                                            const SpatialMesh& mesh, GhostSpan ghosts,
                                            const TransportConfig& cfg, RowWorkspace& ws,
                                            std::span<double> out);

/// Values at the three Gauss-Legendre nodes of the degree-4 polynomial on a
/// cell matching the two endpoint values and the cell averages of the cell
/// and both neighbors.
std::array<double, 3> hermite_gauss_values(double um1, double u0, double up1, double left,
                                           double right);

/// Margin floor applied to rho and internal energy in the admissibility
/// scaling, and the bisection tolerance on theta.
inline constexpr double kAdmissibilityMargin = 1e-13;

struct GaussStatesCell {
  std::array<ConservedState, 3> states;
  double theta = 1.0;
};

struct MacroGhosts {
  std::array<ConservedState, 3> left{};
  std::array<ConservedState, 3> right{};
};

/// Admissible Gauss-point macroscopic states per cell: WENO endpoint
/// reconstruction per component, Hermite fill, then a single scaling factor
/// toward the cell average found by bisection so that all three states lie
/// in G with margin. The weighted sum recovers the cell average.
///
/// t_floor, when positive, additionally keeps each state's temperature at or
/// above min(T_avg/2-ish, t_floor): a discrete-velocity safeguard, since a
/// Maxwellian colder than the velocity spacing cannot be represented on the
/// grid. States are never constrained below half the cell's own internal
/// energy, so the cell average always stays feasible.
void gauss_point_states(std::span<const ConservedState> U, const SpatialMesh& mesh,
                        const MacroGhosts* ghosts, Weno5Weights mode,
                        std::span<GaussStatesCell> out, double t_floor = 0.0);

/// Conservative cell Maxwellian M_j = sum_l w_l M[U_{j,l}] built from the
/// Gauss-point states with the moment-matched discrete Maxwellian, so
/// moments(M_j) = U_j to round-off.
std::vector<double> cell_maxwellian(const GaussStatesCell& cell, const VelocityGrid& grid);
void cell_maxwellian_into(const GaussStatesCell& cell, const VelocityGrid& grid,
                          std::span<double> M_mix, double* gauss_nodes = nullptr);

/// Nonnegative scalar values at the Gauss-Legendre nodes per cell whose
/// weighted sum equals the cell average; same construction with G replaced
/// by { f >= 0 }.
void scalar_gauss_points_row(std::span<const double> row, const SpatialMesh& mesh,
                             GhostSpan ghosts, Weno5Weights mode, RowWorkspace& ws,
                             std::span<std::array<double, 3>> out);

}  // namespace bgkimex
