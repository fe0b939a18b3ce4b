#include "bgkimex/space_fv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bgkimex/quadrature.hpp"

namespace bgkimex {

void weno5_cell(const double* s, Weno5Weights mode, double& lo, double& hi) {
  const double m2 = s[0], m1 = s[1], c0 = s[2], p1 = s[3], p2 = s[4];

  // Candidate stencil values at the right endpoint x_{j+1/2} ...
  const double q0 = (2.0 * m2 - 7.0 * m1 + 11.0 * c0) / 6.0;
  const double q1 = (-m1 + 5.0 * c0 + 2.0 * p1) / 6.0;
  const double q2 = (2.0 * c0 + 5.0 * p1 - p2) / 6.0;
  // ... and at the left endpoint x_{j-1/2}.
  const double r0 = (-m2 + 5.0 * m1 + 2.0 * c0) / 6.0;
  const double r1 = (2.0 * m1 + 5.0 * c0 - p1) / 6.0;
  const double r2 = (11.0 * c0 - 7.0 * p1 + 2.0 * p2) / 6.0;

  if (mode == Weno5Weights::Linear) {
    hi = 0.1 * q0 + 0.6 * q1 + 0.3 * q2;
    lo = 0.3 * r0 + 0.6 * r1 + 0.1 * r2;
    return;
  }

  const double b0 = (13.0 / 12.0) * (m2 - 2.0 * m1 + c0) * (m2 - 2.0 * m1 + c0) +
                    0.25 * (m2 - 4.0 * m1 + 3.0 * c0) * (m2 - 4.0 * m1 + 3.0 * c0);
  const double b1 = (13.0 / 12.0) * (m1 - 2.0 * c0 + p1) * (m1 - 2.0 * c0 + p1) +
                    0.25 * (m1 - p1) * (m1 - p1);
  const double b2 = (13.0 / 12.0) * (c0 - 2.0 * p1 + p2) * (c0 - 2.0 * p1 + p2) +
                    0.25 * (3.0 * c0 - 4.0 * p1 + p2) * (3.0 * c0 - 4.0 * p1 + p2);
  const double i0 = 1.0 / ((kWenoEps + b0) * (kWenoEps + b0));
  const double i1 = 1.0 / ((kWenoEps + b1) * (kWenoEps + b1));
  const double i2 = 1.0 / ((kWenoEps + b2) * (kWenoEps + b2));

  {
    const double a0 = 0.1 * i0, a1 = 0.6 * i1, a2 = 0.3 * i2;
    const double inv = 1.0 / (a0 + a1 + a2);
    hi = (a0 * q0 + a1 * q1 + a2 * q2) * inv;
  }
  {
    const double a0 = 0.3 * i0, a1 = 0.6 * i1, a2 = 0.1 * i2;
    const double inv = 1.0 / (a0 + a1 + a2);
    lo = (a0 * r0 + a1 * r1 + a2 * r2) * inv;
  }
}

LimitedPair positivity_limit_interfaces(double fbar, double f_plus_left, double f_minus_right) {
  if (fbar < 0.0) {
    std::ostringstream os;
    os << "positivity limiter requires a nonnegative cell average, got " << fbar;
    throw SolverError(os.str());
  }
  const double xi =
      (fbar - quadrature::lobatto4_weights[0] * f_plus_left -
       quadrature::lobatto4_weights[3] * f_minus_right) /
      quadrature::lobatto4_interior;
  const double m = std::min({f_plus_left, f_minus_right, xi});
  if (m >= 0.0) return {f_plus_left, f_minus_right, 1.0};
  const double theta = std::min(fbar / (fbar - m), 1.0);
  return {theta * (f_plus_left - fbar) + fbar, theta * (f_minus_right - fbar) + fbar, theta};
}

void RowWorkspace::resize(int n_x) {
  padded.assign(n_x + 6, 0.0);
  lo.assign(n_x + 2, 0.0);
  hi.assign(n_x + 2, 0.0);
  flux.assign(n_x + 1, 0.0);
}

namespace {

void fill_padded(std::span<const double> row, const SpatialMesh& mesh, GhostSpan ghosts,
                 std::vector<double>& padded) {
  const int n = mesh.n_x;
  for (int j = 0; j < n; ++j) padded[3 + j] = row[j];
  if (mesh.boundary == BoundaryMode::Periodic) {
    for (int g = 0; g < 3; ++g) {
      padded[g] = row[n - 3 + g];
      padded[3 + n + g] = row[g];
    }
  } else {
    if (ghosts.left == nullptr || ghosts.right == nullptr)
      throw SolverError("DirichletGhost boundary requires frozen ghost data");
    for (int g = 0; g < 3; ++g) {
      padded[g] = ghosts.left[g];
      padded[3 + n + g] = ghosts.right[g];
    }
  }
}

}  // namespace

InterfaceValues weno5_interfaces(std::span<const double> row, const SpatialMesh& mesh,
                                 GhostSpan ghosts, Weno5Weights mode) {
  const int n = mesh.n_x;
  RowWorkspace ws;
  ws.resize(n);
  fill_padded(row, mesh, ghosts, ws.padded);
  for (int c = 0; c < n + 2; ++c) weno5_cell(ws.padded.data() + c, mode, ws.lo[c], ws.hi[c]);
  InterfaceValues out;
  out.minus.resize(n + 1);
  out.plus.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    out.minus[i] = ws.hi[i];
    out.plus[i] = ws.lo[i + 1];
  }
  return out;
}

void transport_rhs_row(std::span<const double> row, double v, const SpatialMesh& mesh,
                       GhostSpan ghosts, const TransportConfig& cfg, RowWorkspace& ws,
                       std::span<double> out) {
  const int n = mesh.n_x;
  ws.resize(n);
  fill_padded(row, mesh, ghosts, ws.padded);

  // Endpoint values for cells -1..n (index c = cell + 1).
  for (int c = 0; c < n + 2; ++c) {
    weno5_cell(ws.padded.data() + c, cfg.weights, ws.lo[c], ws.hi[c]);
    if (cfg.limiter) {
      const double fbar = ws.padded[c + 2];
      if (fbar < 0.0 && cfg.policy == LimiterPolicy::Lenient) continue;
      const LimitedPair lim = positivity_limit_interfaces(fbar, ws.lo[c], ws.hi[c]);
      ws.lo[c] = lim.plus_left;
      ws.hi[c] = lim.minus_right;
    }
  }

  // Upwind flux at interfaces x_{j+1/2}, j = -1..n-1.
  for (int i = 0; i <= n; ++i) ws.flux[i] = upwind_flux(v, ws.hi[i], ws.lo[i + 1]);
  const double inv_dx = 1.0 / mesh.dx;
  for (int j = 0; j < n; ++j) out[j] = -(ws.flux[j + 1] - ws.flux[j]) * inv_dx;
}

void upwind1_rhs_row(std::span<const double> row, double v, const SpatialMesh& mesh,
                     GhostSpan ghosts, std::span<double> out) {
  const int n = mesh.n_x;
  const double inv_dx = 1.0 / mesh.dx;
  auto cell = [&](int j) -> double {
    if (j >= 0 && j < n) return row[j];
    if (mesh.boundary == BoundaryMode::Periodic) return row[(j + n) % n];
    if (ghosts.left == nullptr || ghosts.right == nullptr)
      throw SolverError("DirichletGhost boundary requires frozen ghost data");
    return j < 0 ? ghosts.left[3 + j] : ghosts.right[j - n];
  };
  if (v >= 0.0) {
    for (int j = 0; j < n; ++j) out[j] = -v * (row[j] - cell(j - 1)) * inv_dx;
  } else {
    for (int j = 0; j < n; ++j) out[j] = -v * (cell(j + 1) - row[j]) * inv_dx;
  }
}

TransportStepResult transport_forward_euler(std::span<const double> row, double v, double dt,
                                            const SpatialMesh& mesh, GhostSpan ghosts,
                                            const TransportConfig& cfg, RowWorkspace& ws,
                                            std::span<double> out) {
  transport_rhs_row(row, v, mesh, ghosts, cfg, ws, out);
  for (int j = 0; j < mesh.n_x; ++j) out[j] = row[j] + dt * out[j];
  TransportStepResult res;
  res.cfl_exceeded = dt * std::abs(v) / mesh.dx > kLobattoCfl * (1.0 + 1e-12);
  return res;
}

namespace {

// Rows of the 5x5 Vandermonde-type system for the degree-4 polynomial in the
// reference coordinate: two endpoint values, then the cell averages over
// [-3/2,-1/2], [-1/2,1/2], [1/2,3/2].
struct HermiteMap {
  // maps (left, right, um1, u0, up1) to values at the legendre3 nodes
  double map[3][5];
  HermiteMap() {
    double A[5][10] = {
        {1, -0.5, 0.25, -0.125, 0.0625, 1, 0, 0, 0, 0},
        {1, 0.5, 0.25, 0.125, 0.0625, 0, 1, 0, 0, 0},
        {1, -1, 13.0 / 12.0, -1.25, 121.0 / 80.0, 0, 0, 1, 0, 0},
        {1, 0, 1.0 / 12.0, 0, 1.0 / 80.0, 0, 0, 0, 1, 0},
        {1, 1, 13.0 / 12.0, 1.25, 121.0 / 80.0, 0, 0, 0, 0, 1},
    };
    // invert by Gauss-Jordan
    for (int col = 0; col < 5; ++col) {
      int piv = col;
      for (int r = col + 1; r < 5; ++r)
        if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
      std::swap(A[piv], A[col]);
      const double inv = 1.0 / A[col][col];
      for (int c = 0; c < 10; ++c) A[col][c] *= inv;
      for (int r = 0; r < 5; ++r) {
        if (r == col) continue;
        const double f = A[r][col];
        for (int c = 0; c < 10; ++c) A[r][c] -= f * A[col][c];
      }
    }
    for (int l = 0; l < 3; ++l) {
      const double x = quadrature::legendre3_nodes[l];
      const double pw[5] = {1.0, x, x * x, x * x * x, x * x * x * x};
      for (int in = 0; in < 5; ++in) {
        double s = 0.0;
        for (int n = 0; n < 5; ++n) s += pw[n] * A[n][5 + in];
        map[l][in] = s;
      }
    }
  }
};

const HermiteMap& hermite_map() {
  static const HermiteMap m;
  return m;
}

}  // namespace

std::array<double, 3> hermite_gauss_values(double um1, double u0, double up1, double left,
                                           double right) {
  const auto& H = hermite_map();
  const double in[5] = {left, right, um1, u0, up1};
  std::array<double, 3> out{};
  for (int l = 0; l < 3; ++l) {
    double s = 0.0;
    for (int c = 0; c < 5; ++c) s += H.map[l][c] * in[c];
    out[l] = s;
  }
  return out;
}

namespace {

bool admissible_with_margin(const ConservedState& U) {
  return U.rho >= kAdmissibilityMargin &&
         U.E - 0.5 * U.m * U.m / U.rho >= kAdmissibilityMargin;
}

}  // namespace

void gauss_point_states(std::span<const ConservedState> U, const SpatialMesh& mesh,
                        const MacroGhosts* ghosts, Weno5Weights mode,
                        std::span<GaussStatesCell> out, double t_floor) {
  const int n = mesh.n_x;
  // Per-component padded rows and endpoint reconstructions.
  static thread_local std::vector<double> pad[3];
  static thread_local std::vector<double> lo[3], hi[3];
  for (int c = 0; c < 3; ++c) {
    pad[c].assign(n + 6, 0.0);
    lo[c].assign(n, 0.0);
    hi[c].assign(n, 0.0);
  }
  auto comp = [](const ConservedState& s, int c) { return c == 0 ? s.rho : (c == 1 ? s.m : s.E); };
  for (int j = 0; j < n; ++j)
    for (int c = 0; c < 3; ++c) pad[c][3 + j] = comp(U[j], c);
  if (mesh.boundary == BoundaryMode::Periodic) {
    for (int g = 0; g < 3; ++g)
      for (int c = 0; c < 3; ++c) {
        pad[c][g] = comp(U[n - 3 + g], c);
        pad[c][3 + n + g] = comp(U[g], c);
      }
  } else {
    if (ghosts == nullptr) throw SolverError("DirichletGhost boundary requires macro ghosts");
    for (int g = 0; g < 3; ++g)
      for (int c = 0; c < 3; ++c) {
        pad[c][g] = comp(ghosts->left[g], c);
        pad[c][3 + n + g] = comp(ghosts->right[g], c);
      }
  }
  for (int c = 0; c < 3; ++c)
    for (int j = 0; j < n; ++j) weno5_cell(pad[c].data() + j + 1, mode, lo[c][j], hi[c][j]);

  for (int j = 0; j < n; ++j) {
    const ConservedState avg = U[j];
    if (!admissible_with_margin(avg)) {
      std::ostringstream os;
      os << "cell " << j << " average outside admissible set: rho = " << avg.rho
         << ", internal energy = " << (avg.rho > 0 ? avg.internal_energy() : 0.0);
      throw AdmissibilityError(os.str(), avg.rho, avg.rho > 0 ? avg.internal_energy() : 0.0);
    }
    std::array<std::array<double, 3>, 3> vals;  // [component][node]
    for (int c = 0; c < 3; ++c)
      vals[c] = hermite_gauss_values(pad[c][2 + j], pad[c][3 + j], pad[c][4 + j], lo[c][j],
                                     hi[c][j]);
    const double e_margin =
        std::max(kAdmissibilityMargin,
                 std::min(0.5 * avg.internal_energy(), 0.5 * avg.rho * t_floor));
    auto state_at = [&](double theta, int l) -> ConservedState {
      return {theta * (vals[0][l] - avg.rho) + avg.rho, theta * (vals[1][l] - avg.m) + avg.m,
              theta * (vals[2][l] - avg.E) + avg.E};
    };
    auto feasible = [&](double theta) {
      for (int l = 0; l < 3; ++l) {
        const ConservedState s = state_at(theta, l);
        if (!(s.rho >= kAdmissibilityMargin) || !(s.E - 0.5 * s.m * s.m / s.rho >= e_margin))
          return false;
      }
      return true;
    };
    double theta = 1.0;
    if (!feasible(1.0)) {
      // Admissibility is concave along the scaling path, so the feasible set
      // is an interval containing theta = 0; bisect to kAdmissibilityMargin.
      double good = 0.0, bad = 1.0;
      while (bad - good > kAdmissibilityMargin) {
        const double mid = 0.5 * (good + bad);
        (feasible(mid) ? good : bad) = mid;
      }
      theta = good;
    }
    out[j].theta = theta;
    for (int l = 0; l < 3; ++l) out[j].states[l] = state_at(theta, l);
  }
}

void cell_maxwellian_into(const GaussStatesCell& cell, const VelocityGrid& grid,
                          std::span<double> M_mix, double* gauss_nodes) {
  const int nv = grid.n_v;
  static thread_local std::vector<double> buf;
  buf.assign(nv, 0.0);
  std::fill(M_mix.begin(), M_mix.end(), 0.0);
  for (int l = 0; l < 3; ++l) {
    std::span<double> target =
        gauss_nodes != nullptr ? std::span<double>(gauss_nodes + l * nv, nv)
                               : std::span<double>(buf);
    discrete_maxwellian_into(cell.states[l], grid, target);
    const double w = quadrature::legendre3_weights[l];
    for (int k = 0; k < nv; ++k) M_mix[k] += w * target[k];
  }
}

std::vector<double> cell_maxwellian(const GaussStatesCell& cell, const VelocityGrid& grid) {
  std::vector<double> M(grid.n_v);
  cell_maxwellian_into(cell, grid, M);
  return M;
}

void scalar_gauss_points_row(std::span<const double> row, const SpatialMesh& mesh,
                             GhostSpan ghosts, Weno5Weights mode, RowWorkspace& ws,
                             std::span<std::array<double, 3>> out) {
  const int n = mesh.n_x;
  ws.resize(n);
  fill_padded(row, mesh, ghosts, ws.padded);
  for (int j = 0; j < n; ++j) {
    const double fbar = ws.padded[3 + j];
    if (fbar < 0.0) throw SolverError("scalar_gauss_points requires nonnegative cell averages");
    double lo, hi;
    weno5_cell(ws.padded.data() + j + 1, mode, lo, hi);
    const LimitedPair lim = positivity_limit_interfaces(fbar, lo, hi);
    auto vals = hermite_gauss_values(ws.padded[2 + j], fbar, ws.padded[4 + j], lim.plus_left,
                                     lim.minus_right);
    const double m = std::min({vals[0], vals[1], vals[2]});
    if (m < 0.0) {
      const double theta = fbar > 0.0 ? std::min(fbar / (fbar - m), 1.0) : 0.0;
      for (double& v : vals) v = theta * (v - fbar) + fbar;
    }
    out[j] = vals;
  }
}

}  // namespace bgkimex
