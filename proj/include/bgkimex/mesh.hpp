#pragma once

#include "bgkimex/errors.hpp"

namespace bgkimex {

enum class BoundaryMode { Periodic, DirichletGhost };

struct SpatialMesh {
  int n_x = 0;
  double x_lo = 0.0;
  double x_hi = 2.0;
  double dx = 0.0;
  BoundaryMode boundary = BoundaryMode::Periodic;

  SpatialMesh() = default;
  SpatialMesh(int n_x_, double x_lo_, double x_hi_, BoundaryMode b = BoundaryMode::Periodic)
      : n_x(n_x_), x_lo(x_lo_), x_hi(x_hi_), boundary(b) {
    if (n_x < 5) throw SolverError("mesh needs n_x >= 5 (WENO5 stencil)");
    if (!(x_hi > x_lo)) throw SolverError("mesh needs x_hi > x_lo");
    dx = (x_hi - x_lo) / n_x;
  }

  double center(int j) const { return x_lo + (j + 0.5) * dx; }
  double interface(int j) const { return x_lo + j * dx; }  // x_{j-1/2}
};

}  // namespace bgkimex
