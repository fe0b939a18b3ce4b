#pragma once

#include <span>
#include <vector>

#include "bgkimex/kinetic.hpp"
#include "bgkimex/mesh.hpp"
#include "bgkimex/space_fv.hpp"

namespace bgkimex {

/// Cell-averaged distribution values on an n_x x n_v grid, stored
/// velocity-major so each velocity row is contiguous.
struct KineticField {
  SpatialMesh mesh;
  VelocityGrid grid;
  double time = 0.0;
  std::vector<double> values;  // values[k * n_x + j]

  KineticField() = default;
  KineticField(SpatialMesh mesh_, VelocityGrid grid_)
      : mesh(mesh_), grid(grid_),
        values(static_cast<std::size_t>(mesh_.n_x) * grid_.n_v, 0.0) {}

  std::span<double> row(int k) {
    return {values.data() + static_cast<std::size_t>(k) * mesh.n_x,
            static_cast<std::size_t>(mesh.n_x)};
  }
  std::span<const double> row(int k) const {
    return {values.data() + static_cast<std::size_t>(k) * mesh.n_x,
            static_cast<std::size_t>(mesh.n_x)};
  }
  double& at(int j, int k) { return values[static_cast<std::size_t>(k) * mesh.n_x + j]; }
  double at(int j, int k) const { return values[static_cast<std::size_t>(k) * mesh.n_x + j]; }
};

/// Per-cell conserved moments, accumulated in ascending velocity order.
void field_moments(std::span<const double> values, const SpatialMesh& mesh,
                   const VelocityGrid& grid, std::span<ConservedState> out);

/// Domain totals (dx-weighted sums of the cell moments).
ConservedState field_totals(const KineticField& f);

double field_entropy(const KineticField& f);

/// Frozen ghost data for DirichletGhost runs: three cells per side captured
/// from the initial field, both as distribution values and as moments.
struct DirichletGhosts {
  int n_v = 0;
  std::vector<double> f_left;   // [k*3 + g], g = 0..2 -> cells -3..-1
  std::vector<double> f_right;  // [k*3 + g], g = 0..2 -> cells n_x..n_x+2
  MacroGhosts macro;

  static DirichletGhosts freeze_from(const KineticField& f0);
  GhostSpan row(int k) const {
    return {f_left.data() + static_cast<std::size_t>(k) * 3,
            f_right.data() + static_cast<std::size_t>(k) * 3};
  }
};

}  // namespace bgkimex
