#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bgkimex/errors.hpp"

namespace bgkimex {

/// Uniform symmetric velocity grid with midpoint nodes
/// v_k = -v_max + (k + 1/2) dv, dv = 2 v_max / n_v; quadrature weight dv.
struct VelocityGrid {
  double v_max = 15.0;
  int n_v = 150;
  double dv = 0.2;
  std::vector<double> nodes;

  VelocityGrid() { *this = VelocityGrid(15.0, 150); }
  VelocityGrid(double v_max, int n_v);

  double node(int k) const { return nodes[k]; }
};

struct ConservedState {
  double rho = 0.0;
  double m = 0.0;
  double E = 0.0;

  double internal_energy() const { return E - 0.5 * m * m / rho; }
  bool admissible() const { return rho > 0.0 && E - 0.5 * m * m / rho > 0.0; }
};

inline ConservedState operator+(ConservedState a, ConservedState b) {
  return {a.rho + b.rho, a.m + b.m, a.E + b.E};
}
inline ConservedState operator-(ConservedState a, ConservedState b) {
  return {a.rho - b.rho, a.m - b.m, a.E - b.E};
}
inline ConservedState operator*(double s, ConservedState a) {
  return {s * a.rho, s * a.m, s * a.E};
}

struct Primitive {
  double rho = 0.0;
  double u = 0.0;
  double T = 0.0;
};

/// tau(rho, T): relaxation rate as a function of the macroscopic state.
using TauFn = std::function<double(double, double)>;
inline double unit_tau(double, double) { return 1.0; }

/// Discrete moments with the collision invariants (1, v, v^2/2), summed in
/// fixed ascending-k order for bitwise reproducibility.
ConservedState moments(std::span<const double> f, const VelocityGrid& grid);

/// Throws AdmissibilityError if U is outside G. (d_v = 1: T = 2E/rho - u^2.)
Primitive primitive_from_conserved(const ConservedState& U);
ConservedState conserved_from_primitive(const Primitive& p);

/// Pointwise Maxwellian rho/sqrt(2 pi T) exp(-(v-u)^2 / (2T)) at the nodes.
/// Throws on rho <= 0 or T <= 0.
std::vector<double> maxwellian(const Primitive& p, const VelocityGrid& grid);
void maxwellian_into(const Primitive& p, const VelocityGrid& grid, std::span<double> out);

/// Relative defect of the discrete mass of maxwellian(p) against p.rho;
/// large when the drift pushes the Gaussian tail outside [-v_max, v_max].
double maxwellian_mass_defect(const Primitive& p, const VelocityGrid& grid);
inline constexpr double kTailWarnThreshold = 1e-8;
bool maxwellian_tail_warning(const Primitive& p, const VelocityGrid& grid);

/// Maxwellian-shaped node values whose *discrete* moments equal U to within
/// kMaxwellianTol: Newton iteration on (rho, u, T) starting from the analytic
/// parameters. Needed so that conservation and the AP identities hold at
/// machine precision on the truncated grid.
inline constexpr double kMaxwellianTol = 1e-13;
inline constexpr int kMaxwellianMaxIter = 25;
std::vector<double> discrete_maxwellian(const ConservedState& U, const VelocityGrid& grid);
void discrete_maxwellian_into(const ConservedState& U, const VelocityGrid& grid,
                              std::span<double> out);

/// Implicit relaxation solve f - b (M - f) = f_star rearranged as the convex
/// combination (f_star + b M) / (1 + b); b >= 0.
void bgk_relax_into(std::span<const double> f_star, std::span<const double> M, double b,
                    std::span<double> out);
std::vector<double> bgk_relax(std::span<const double> f_star, std::span<const double> M,
                              double b);

/// tau_f (M[f] - f) with the moment-matched discrete Maxwellian, so the
/// discrete moments of the result vanish to round-off.
std::vector<double> collision_bgk(std::span<const double> f, const VelocityGrid& grid,
                                  const TauFn& tau = unit_tau);

/// dx * dv * sum f log f with the 0 log 0 = 0 convention; throws on negative
/// entries.
double entropy_of_values(std::span<const double> f, double dx, double dv);

}  // namespace bgkimex
