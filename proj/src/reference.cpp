#include "bgkimex/reference.hpp"

#include <algorithm>
#include <cmath>

#include "bgkimex/parallel.hpp"
#include "bgkimex/quadrature.hpp"

namespace bgkimex {

SspRk2Stepper::SspRk2Stepper(SspRk2Config cfg, SpatialMesh mesh, VelocityGrid grid)
    : cfg_(std::move(cfg)), mesh_(mesh), grid_(grid) {
  const std::size_t N = static_cast<std::size_t>(mesh_.n_x) * grid_.n_v;
  U_.resize(mesh_.n_x);
  gauss_states_.resize(mesh_.n_x);
  M_mix_.assign(N, 0.0);
  if (cfg_.eps_fn) {
    gauss_maxw_.assign(static_cast<std::size_t>(mesh_.n_x) * 3 * grid_.n_v, 0.0);
    eps_min_ = std::numeric_limits<double>::infinity();
    for (int j = 0; j < mesh_.n_x; ++j)
      for (double node : quadrature::legendre3_nodes)
        eps_min_ = std::min(eps_min_, cfg_.eps_fn(mesh_.center(j) + node * mesh_.dx));
  } else {
    eps_min_ = cfg_.eps;
  }
  s1_.assign(N, 0.0);
  s2_.assign(N, 0.0);
  row_ws_.resize(std::max(1, cfg_.threads));
}

void SspRk2Stepper::freeze_boundary(const KineticField& f0) {
  ghosts_ = DirichletGhosts::freeze_from(f0);
}

void SspRk2Stepper::rhs(const std::vector<double>& values, std::vector<double>& out) {
  const int n = mesh_.n_x;
  const int nv = grid_.n_v;

  TransportConfig tc;
  tc.limiter = cfg_.limiter;

  if (!cfg_.eps_fn) {
    field_moments(values, mesh_, grid_, U_);
    gauss_point_states(U_, mesh_, ghosts_ ? &ghosts_->macro : nullptr, Weno5Weights::Nonlinear,
                       gauss_states_, 2.0 * grid_.dv * grid_.dv);
    parallel_for(n, cfg_.threads, [&](int, int j) {
      cell_maxwellian_into(gauss_states_[j], grid_,
                           {M_mix_.data() + static_cast<std::size_t>(j) * nv,
                            static_cast<std::size_t>(nv)});
    });
    rate_.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
      const Primitive p = primitive_from_conserved(U_[j]);
      rate_[j] = cfg_.tau(p.rho, p.T) / cfg_.eps;
    }
    parallel_for(nv, cfg_.threads, [&](int w, int k) {
      const std::size_t off = static_cast<std::size_t>(k) * n;
      const GhostSpan gs = ghosts_ ? ghosts_->row(k) : GhostSpan{};
      transport_rhs_row({values.data() + off, static_cast<std::size_t>(n)}, grid_.nodes[k],
                        mesh_, gs, tc, row_ws_[w], {out.data() + off, static_cast<std::size_t>(n)});
      for (int j = 0; j < n; ++j)
        out[off + j] +=
            rate_[j] * (M_mix_[static_cast<std::size_t>(j) * nv + k] - values[off + j]);
    });
    return;
  }

  // Variable eps: evaluate the relaxation at the Gauss nodes using the
  // nonnegative scalar reconstruction; the node Maxwellians are matched to
  // the node moments so the collision term has vanishing moments even
  // across steep eps transitions (mirrors the AP path).
  scalar_vals_.resize(static_cast<std::size_t>(nv) * 3 * n);
  parallel_for(nv, cfg_.threads, [&](int w, int k) {
    const std::size_t off = static_cast<std::size_t>(k) * n;
    const GhostSpan gs = ghosts_ ? ghosts_->row(k) : GhostSpan{};
    transport_rhs_row({values.data() + off, static_cast<std::size_t>(n)}, grid_.nodes[k],
                      mesh_, gs, tc, row_ws_[w], {out.data() + off, static_cast<std::size_t>(n)});
    static thread_local std::vector<std::array<double, 3>> pts;
    pts.resize(n);
    scalar_gauss_points_row({values.data() + off, static_cast<std::size_t>(n)}, mesh_, gs,
                            Weno5Weights::Nonlinear, row_ws_[w], pts);
    double* dst = scalar_vals_.data() + static_cast<std::size_t>(k) * 3 * n;
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < 3; ++l) dst[j * 3 + l] = pts[j][l];
  });

  node_moments_.assign(static_cast<std::size_t>(n) * 3, ConservedState{});
  for (int k = 0; k < nv; ++k) {
    const double v = grid_.nodes[k];
    const double* src = scalar_vals_.data() + static_cast<std::size_t>(k) * 3 * n;
    for (int p = 0; p < 3 * n; ++p) {
      node_moments_[p].rho += src[p];
      node_moments_[p].m += src[p] * v;
      node_moments_[p].E += src[p] * v * v;
    }
  }
  for (auto& u : node_moments_) {
    u.rho *= grid_.dv;
    u.m *= grid_.dv;
    u.E *= 0.5 * grid_.dv;
  }

  parallel_for(n, cfg_.threads, [&](int, int j) {
    for (int l = 0; l < 3; ++l)
      discrete_maxwellian_into(node_moments_[j * 3 + l], grid_,
                               {gauss_maxw_.data() + (static_cast<std::size_t>(j) * 3 + l) * nv,
                                static_cast<std::size_t>(nv)});
  });

  rate_.assign(3 * n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < 3; ++l) {
      const double x = mesh_.center(j) + quadrature::legendre3_nodes[l] * mesh_.dx;
      const Primitive p = primitive_from_conserved(node_moments_[j * 3 + l]);
      rate_[j * 3 + l] = cfg_.tau(p.rho, p.T) / cfg_.eps_fn(x);
    }
  parallel_for(nv, cfg_.threads, [&](int, int k) {
    const std::size_t off = static_cast<std::size_t>(k) * n;
    const double* vals = scalar_vals_.data() + static_cast<std::size_t>(k) * 3 * n;
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int l = 0; l < 3; ++l) {
        const double mv = gauss_maxw_[(static_cast<std::size_t>(j) * 3 + l) * nv + k];
        acc += quadrature::legendre3_weights[l] * rate_[j * 3 + l] * (mv - vals[j * 3 + l]);
      }
      out[off + j] += acc;
    }
  });
}

SspRk2Result SspRk2Stepper::step(KineticField& f, double dt) {
  if (mesh_.boundary == BoundaryMode::DirichletGhost && !ghosts_)
    throw SolverError("freeze_boundary must be called before stepping a Dirichlet run");
  const std::size_t N = f.values.size();

  rhs(f.values, s2_);
  for (std::size_t p = 0; p < N; ++p) s1_[p] = f.values[p] + dt * s2_[p];
  for (double& v : s1_)
    if (v < 0.0 && v >= -kClampTol) v = 0.0;
  rhs(s1_, s2_);
  for (std::size_t p = 0; p < N; ++p)
    f.values[p] = 0.5 * (f.values[p] + s1_[p] + dt * s2_[p]);
  for (double& v : f.values)
    if (v < 0.0 && v >= -kClampTol) v = 0.0;
  f.time += dt;

  SspRk2Result res;
  res.transport_cfl_exceeded =
      dt * grid_.v_max / mesh_.dx > 0.5 * kLobattoCfl * (1.0 + 1e-12);
  res.stiffness_exceeded = dt > kStiffSafety * eps_min_ * (1.0 + 1e-12);
  return res;
}

std::vector<ConservedState> kinetic_euler_step(std::span<const ConservedState> U, double dt,
                                               const SpatialMesh& mesh, const VelocityGrid& grid,
                                               const MacroGhosts* ghosts, int threads) {
  const int n = mesh.n_x;
  const int nv = grid.n_v;
  std::vector<GaussStatesCell> cells(n);
  gauss_point_states(U, mesh, ghosts, Weno5Weights::Nonlinear, cells,
                     2.0 * grid.dv * grid.dv);

  std::vector<double> M(static_cast<std::size_t>(n) * nv);  // cell-major
  parallel_for(n, threads, [&](int, int j) {
    cell_maxwellian_into(cells[j], grid,
                         {M.data() + static_cast<std::size_t>(j) * nv,
                          static_cast<std::size_t>(nv)});
  });

  // Dirichlet transport of the Maxwellian field would need frozen kinetic
  // ghosts; the limiting scheme is used on periodic runs.
  if (mesh.boundary != BoundaryMode::Periodic)
    throw SolverError("kinetic_euler_step supports periodic boundaries");

  std::vector<ConservedState> out(n, ConservedState{0.0, 0.0, 0.0});
  TransportConfig tc;
  std::vector<double> row(n), rhs(n);
  RowWorkspace ws;
  for (int k = 0; k < nv; ++k) {
    const double v = grid.nodes[k];
    for (int j = 0; j < n; ++j) row[j] = M[static_cast<std::size_t>(j) * nv + k];
    transport_rhs_row(row, v, mesh, GhostSpan{}, tc, ws, rhs);
    for (int j = 0; j < n; ++j) {
      const double val = row[j] + dt * rhs[j];
      out[j].rho += val;
      out[j].m += val * v;
      out[j].E += val * v * v;
    }
  }
  for (int j = 0; j < n; ++j) {
    out[j].rho *= grid.dv;
    out[j].m *= grid.dv;
    out[j].E *= 0.5 * grid.dv;
  }
  return out;
}

}  // namespace bgkimex
