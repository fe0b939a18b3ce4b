#pragma once

#include <vector>

#include "bgkimex/imex.hpp"
#include "bgkimex/reference.hpp"

namespace bgkimex {
namespace experiments {

enum class InitKind { Consistent, Inconsistent };

struct AccuracyPoint {
  int nx = 0;
  double error = 0.0;  // L2(x,v) self-convergence error against the nx*2 run
  double order = std::numeric_limits<double>::quiet_NaN();
};

struct AccuracyResult {
  double eps = 0.0;
  std::vector<AccuracyPoint> points;
  double finest_order() const { return points.empty() ? 0.0 : points.back().order; }
};

/// Accuracy protocol: smooth data on [0, 2] (periodic), t_end = 0.1,
/// dt = 0.5 dx / v_max, limiter off. The error of the nx run is measured
/// against the 2 nx run restricted by pairwise averaging; orders are log2
/// ratios of consecutive errors.
AccuracyResult accuracy_case(const TableauPair& scheme, double eps,
                             const std::vector<int>& nx_list, InitKind init, int n_v = 150,
                             double v_max = 15.0, int threads = 1);

struct SodResult {
  std::vector<StepDiagnostics> steps;
  KineticField final_field;
  int max_negative_cells = 0;
  double min_stage_raw = 0.0;
};

/// Sod tube of the positivity test: Dirichlet ghosts, dt = (1/24) dx / v_max.
SodResult sod_run(const TableauPair& scheme, double eps, int n_x, int n_v = 150,
                  double v_max = 15.0, double t_end = 0.3, bool strict = true,
                  bool limiter = true, int threads = 1);

struct Snapshot {
  std::vector<double> x, rho, u, T;
};

Snapshot snapshot_of(const KineticField& f);

struct MixedResult {
  Snapshot ap;
  Snapshot reference;            // on the fine mesh
  Snapshot reference_restricted; // pairwise-averaged onto the AP mesh
  double rel_l2_rho = 0.0;
  double rel_l2_u = 0.0;
  double rel_l2_T = 0.0;
};

/// Mixed-regime comparison: AP run on n_x cells with dt = (1/24) dx / v_max
/// against the explicit SSP-RK2 reference on 2 n_x cells with
/// dt = (1/240) dx_ref / v_max, both to t_end with the variable eps profile.
MixedResult mixed_regime_run(const TableauPair& scheme, int n_x, int n_v = 150,
                             double v_max = 15.0, double t_end = 0.5, int threads = 1);

/// Explicit RK composition of kinetic_euler_step with the scheme's explicit
/// tableau: the limiting moment scheme the IMEX integrator reduces to as
/// eps -> 0.
std::vector<ConservedState> limit_moment_update(const TableauPair& scheme,
                                                const std::vector<ConservedState>& U0,
                                                double dt, const SpatialMesh& mesh,
                                                const VelocityGrid& grid, int threads = 1);

}  // namespace experiments
}  // namespace bgkimex
