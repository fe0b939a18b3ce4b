#include "bgkimex/problems.hpp"

#include <cmath>
#include <numbers>

#include "bgkimex/quadrature.hpp"

namespace bgkimex {
namespace problems {

Primitive smooth_primitive(double x) {
  const double rho = 1.0 + 0.2 * std::sin(std::numbers::pi * x);
  return {rho, 1.0, 1.0 / rho};
}

namespace {

double maxwellian_value(const Primitive& p, double v) {
  return p.rho / std::sqrt(2.0 * std::numbers::pi * p.T) *
         std::exp(-(v - p.u) * (v - p.u) / (2.0 * p.T));
}

}  // namespace

KineticField init_cell_averaged(const SpatialMesh& mesh, const VelocityGrid& grid,
                                const std::function<double(double, double)>& f) {
  KineticField out(mesh, grid);
  for (int k = 0; k < grid.n_v; ++k) {
    const double v = grid.nodes[k];
    auto row = out.row(k);
    for (int j = 0; j < mesh.n_x; ++j) {
      double acc = 0.0;
      for (int l = 0; l < 3; ++l)
        acc += quadrature::legendre3_weights[l] *
               f(mesh.center(j) + quadrature::legendre3_nodes[l] * mesh.dx, v);
      row[j] = acc;
    }
  }
  return out;
}

KineticField smooth_consistent(const SpatialMesh& mesh, const VelocityGrid& grid) {
  return init_cell_averaged(mesh, grid, [](double x, double v) {
    return maxwellian_value(smooth_primitive(x), v);
  });
}

KineticField smooth_inconsistent(const SpatialMesh& mesh, const VelocityGrid& grid) {
  return init_cell_averaged(mesh, grid, [](double x, double v) {
    const Primitive p = smooth_primitive(x);
    const Primitive q{p.rho, -0.5 * p.u, p.T};
    return 0.5 * maxwellian_value(p, v) + 0.3 * maxwellian_value(q, v);
  });
}

KineticField sod(const SpatialMesh& mesh, const VelocityGrid& grid) {
  // Piecewise-constant states; cell averages are the pointwise Maxwellians
  // (the jump at x = 1 coincides with a cell interface for even n_x).
  return init_cell_averaged(mesh, grid, [](double x, double v) {
    const Primitive p = x <= 1.0 ? Primitive{1.0, 0.0, 1.0} : Primitive{0.125, 0.0, 0.25};
    return maxwellian_value(p, v);
  });
}

double mixed_regime_eps(double x) {
  return kMixedEps0 + std::tanh(1.0 - 11.0 * (x - 1.0)) + std::tanh(1.0 + 11.0 * (x - 1.0));
}

BroadwellField broadwell_smooth(const SpatialMesh& mesh) {
  BroadwellField f(mesh);
  for (int j = 0; j < mesh.n_x; ++j) {
    const double x = mesh.center(j);
    const double rho = 1.0 + 0.2 * std::sin(std::numbers::pi * x);
    const double m = 0.1 * std::cos(std::numbers::pi * x);
    // start halfway between equilibrium z and the admissible midpoint
    const double zeq = broadwell_equilibrium_z(rho, m);
    const double z = 0.5 * (zeq + 0.5 * (rho + std::abs(m)));
    f.set_cell(j, broadwell_triple({rho, m, z}));
  }
  return f;
}

}  // namespace problems
}  // namespace bgkimex
