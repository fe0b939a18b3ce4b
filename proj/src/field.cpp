#include "bgkimex/field.hpp"

namespace bgkimex {

void field_moments(std::span<const double> values, const SpatialMesh& mesh,
                   const VelocityGrid& grid, std::span<ConservedState> out) {
  const int n = mesh.n_x;
  for (int j = 0; j < n; ++j) out[j] = {0.0, 0.0, 0.0};
  for (int k = 0; k < grid.n_v; ++k) {
    const double v = grid.nodes[k];
    const double* row = values.data() + static_cast<std::size_t>(k) * n;
    for (int j = 0; j < n; ++j) {
      out[j].rho += row[j];
      out[j].m += row[j] * v;
      out[j].E += row[j] * v * v;
    }
  }
  for (int j = 0; j < n; ++j) {
    out[j].rho *= grid.dv;
    out[j].m *= grid.dv;
    out[j].E *= 0.5 * grid.dv;
  }
}

ConservedState field_totals(const KineticField& f) {
  std::vector<ConservedState> U(f.mesh.n_x);
  field_moments(f.values, f.mesh, f.grid, U);
  ConservedState tot{0.0, 0.0, 0.0};
  for (const auto& u : U) tot = tot + u;
  return f.mesh.dx * tot;
}

double field_entropy(const KineticField& f) {
  return entropy_of_values(f.values, f.mesh.dx, f.grid.dv);
}

DirichletGhosts DirichletGhosts::freeze_from(const KineticField& f0) {
  const int n = f0.mesh.n_x;
  DirichletGhosts g;
  g.n_v = f0.grid.n_v;
  g.f_left.resize(static_cast<std::size_t>(g.n_v) * 3);
  g.f_right.resize(static_cast<std::size_t>(g.n_v) * 3);
  // Ghost cells replicate the outermost interior cell of the initial data.
  for (int k = 0; k < g.n_v; ++k) {
    for (int i = 0; i < 3; ++i) {
      g.f_left[static_cast<std::size_t>(k) * 3 + i] = f0.at(0, k);
      g.f_right[static_cast<std::size_t>(k) * 3 + i] = f0.at(n - 1, k);
    }
  }
  std::vector<ConservedState> U(n);
  field_moments(f0.values, f0.mesh, f0.grid, U);
  for (int i = 0; i < 3; ++i) {
    g.macro.left[i] = U[0];
    g.macro.right[i] = U[n - 1];
  }
  return g;
}

}  // namespace bgkimex
