#pragma once

#include "bgkimex/broadwell.hpp"
#include "bgkimex/field.hpp"

namespace bgkimex {
namespace problems {

/// Smooth density/velocity/temperature fields of the accuracy and mixed-
/// regime runs: rho = 1 + 0.2 sin(pi x), u = 1, T = 1 / rho.
Primitive smooth_primitive(double x);

/// Consistent data f0 = M_{rho,u,T}.
KineticField smooth_consistent(const SpatialMesh& mesh, const VelocityGrid& grid);

/// Inconsistent data f0 = 0.5 M_{rho,u,T} + 0.3 M_{rho,-0.5u,T}.
KineticField smooth_inconsistent(const SpatialMesh& mesh, const VelocityGrid& grid);

/// Sod data: (rho,u,T) = (1,0,1) for x <= 1, (0.125,0,0.25) for x > 1,
/// realized as cell-averaged Maxwellians.
KineticField sod(const SpatialMesh& mesh, const VelocityGrid& grid);

/// Mixed-regime Knudsen profile
/// eps(x) = eps0 + tanh(1 - 11(x-1)) + tanh(1 + 11(x-1)), eps0 = 1e-5.
double mixed_regime_eps(double x);
inline constexpr double kMixedEps0 = 1e-5;

/// Smooth periodic Broadwell data with positive components.
BroadwellField broadwell_smooth(const SpatialMesh& mesh);

/// Cell-averaged initialization of a pointwise (x,v) function using the
/// 3-point Gauss rule per cell.
KineticField init_cell_averaged(const SpatialMesh& mesh, const VelocityGrid& grid,
                                const std::function<double(double, double)>& f);

}  // namespace problems
}  // namespace bgkimex
