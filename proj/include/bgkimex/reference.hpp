#pragma once

#include <vector>

#include "bgkimex/imex.hpp"

namespace bgkimex {

/// Safety factor on eps for the explicit reference time step.
inline constexpr double kStiffSafety = 0.5;

struct SspRk2Config {
  double eps = 1.0;
  EpsFn eps_fn;  // overrides eps when set
  TauFn tau = unit_tau;
  bool limiter = true;
  int threads = 1;
};

struct SspRk2Result {
  bool transport_cfl_exceeded = false;  // dt > (1/2)(1/12) dx / v_max
  bool stiffness_exceeded = false;      // dt > kStiffSafety * min eps
};

/// Fully explicit two-stage SSP-RK (Heun) step of the BGK equation with the
/// same limited WENO transport and conservative cell Maxwellians as the IMEX
/// path. Resolves eps; used as the reference solution for mixed-regime runs.
class SspRk2Stepper {
public:
  SspRk2Stepper(SspRk2Config cfg, SpatialMesh mesh, VelocityGrid grid);
  void freeze_boundary(const KineticField& f0);
  SspRk2Result step(KineticField& f, double dt);

private:
  void rhs(const std::vector<double>& values, std::vector<double>& out);

  SspRk2Config cfg_;
  SpatialMesh mesh_;
  VelocityGrid grid_;
  double eps_min_ = 1.0;
  std::optional<DirichletGhosts> ghosts_;
  std::vector<ConservedState> U_, node_moments_;
  std::vector<GaussStatesCell> gauss_states_;
  std::vector<double> M_mix_, gauss_maxw_, scalar_vals_, rate_, s1_, s2_;
  std::vector<RowWorkspace> row_ws_;
};

/// One forward Euler step of the limiting kinetic-flux scheme: transport the
/// conservative cell Maxwellians and take moments. This is the moment scheme
/// the IMEX integrator reduces to stage-wise as eps -> 0.
std::vector<ConservedState> kinetic_euler_step(std::span<const ConservedState> U, double dt,
                                               const SpatialMesh& mesh, const VelocityGrid& grid,
                                               const MacroGhosts* ghosts = nullptr,
                                               int threads = 1);

}  // namespace bgkimex
