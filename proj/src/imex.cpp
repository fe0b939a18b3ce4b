#include "bgkimex/imex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bgkimex/parallel.hpp"
#include "bgkimex/quadrature.hpp"

namespace bgkimex {

ImexStepper::ImexStepper(SimConfig cfg, SpatialMesh mesh, VelocityGrid grid)
    : cfg_(std::move(cfg)), mesh_(mesh), grid_(grid) {
  cfg_.scheme.validate();
  if (!cfg_.scheme.gsa)
    throw SolverError("imex stepper requires a globally stiffly accurate tableau");
  if (cfg_.scheme.kind == SchemeKind::TypeCK)
    throw SolverError("imex stepper supports type A and type ARS tableaus");
  // Stages without an implicit solve must never feed later implicit sums.
  for (int i = 0; i < cfg_.scheme.nu; ++i) {
    if (cfg_.scheme.ai(i, i) != 0.0) continue;
    for (int j = i + 1; j < cfg_.scheme.nu; ++j)
      if (cfg_.scheme.ai(j, i) != 0.0)
        throw SolverError("tableau uses the collision term of a stage with a_ii = 0");
  }
  if (cfg_.eps_fn && !cfg_.positivity_strict)
    throw SolverError("variable epsilon runs require strict positivity mode");
  if (!cfg_.eps_fn && !(cfg_.eps > 0.0)) throw SolverError("eps must be positive");

  try {
    const PositivityReport rep = positivity_analysis(cfg_.scheme);
    c_sch_ = (rep.feasible && rep.c_sch) ? *rep.c_sch : 0.0;
  } catch (const TableauError&) {
    c_sch_ = 0.0;
  }

  const int nu = cfg_.scheme.nu;
  const std::size_t N = static_cast<std::size_t>(mesh_.n_x) * grid_.n_v;
  T_.assign(nu, std::vector<double>(N, 0.0));
  QQ_.assign(nu, std::vector<double>(N, 0.0));
  if (cfg_.stage_form == StageForm::ShuOsher) F_.assign(nu, std::vector<double>(N, 0.0));
  g_.assign(N, 0.0);
  M_mix_.assign(static_cast<std::size_t>(mesh_.n_x) * grid_.n_v, 0.0);
  if (cfg_.eps_fn)
    gauss_maxw_.assign(static_cast<std::size_t>(mesh_.n_x) * 3 * grid_.n_v, 0.0);
  tau_star_.assign(mesh_.n_x, 1.0);
  U_stage_.resize(mesh_.n_x);
  gauss_states_.resize(mesh_.n_x);
  row_ws_.resize(std::max(1, cfg_.threads));
}

void ImexStepper::freeze_boundary(const KineticField& f0) {
  ghosts_ = DirichletGhosts::freeze_from(f0);
}

double ImexStepper::positivity_dt() const {
  return c_sch_ * kLobattoCfl * mesh_.dx / grid_.v_max;
}

double ImexStepper::upwind_dt() const { return c_sch_ * mesh_.dx / grid_.v_max; }

void ImexStepper::stage_transport(const std::vector<double>& values, std::vector<double>& out) {
  const int n = mesh_.n_x;
  TransportConfig tc;
  tc.weights = Weno5Weights::Nonlinear;
  tc.limiter = cfg_.spatial == SpatialScheme::Weno5Limited;
  tc.policy = cfg_.positivity_strict ? LimiterPolicy::Strict : LimiterPolicy::Lenient;
  parallel_for(grid_.n_v, cfg_.threads, [&](int w, int k) {
    const std::span<const double> row(values.data() + static_cast<std::size_t>(k) * n, n);
    const std::span<double> rhs(out.data() + static_cast<std::size_t>(k) * n, n);
    const GhostSpan gs = ghosts_ ? ghosts_->row(k) : GhostSpan{};
    if (cfg_.spatial == SpatialScheme::Upwind1)
      upwind1_rhs_row(row, grid_.nodes[k], mesh_, gs, rhs);
    else
      transport_rhs_row(row, grid_.nodes[k], mesh_, gs, tc, row_ws_[w], rhs);
  });
}

void ImexStepper::compute_stage_moments(const std::vector<double>& values, int stage_one_based,
                                        std::vector<ConservedState>& U) const {
  field_moments(values, mesh_, grid_, U);
  for (int j = 0; j < mesh_.n_x; ++j) {
    if (!U[j].admissible()) {
      std::ostringstream os;
      os << "stage " << stage_one_based << ", cell " << j
         << ": inadmissible moments (rho = " << U[j].rho
         << ", internal energy = " << (U[j].rho > 0 ? U[j].internal_energy() : 0.0) << ")";
      throw AdmissibilityError(os.str(), U[j].rho, U[j].rho > 0 ? U[j].internal_energy() : 0.0);
    }
  }
}

double ImexStepper::clamp_field(std::vector<double>& values, int stage_one_based) const {
  double raw_min = 0.0;
  for (double v : values) raw_min = std::min(raw_min, v);
  if (!cfg_.positivity_strict) return raw_min;
  if (raw_min < -kClampTol) {
    std::ostringstream os;
    os << "stage " << stage_one_based << ": negative value " << raw_min
       << " below the round-off clamp tolerance in positivity mode";
    throw SolverError(os.str());
  }
  if (raw_min < 0.0)
    for (double& v : values)
      if (v < 0.0) v = 0.0;
  return raw_min;
}

void ImexStepper::gauss_relax(const std::vector<double>& in,
                              const std::function<double(int, int, const Primitive&, double)>& b_of,
                              std::vector<double>& out) {
  const int n = mesh_.n_x;
  const int nv = grid_.n_v;
  scalar_vals_.resize(static_cast<std::size_t>(nv) * n * 3);
  node_moments_.assign(static_cast<std::size_t>(n) * 3, ConservedState{});

  // Nonnegative scalar values at the Gauss nodes, row by row.
  parallel_for(nv, cfg_.threads, [&](int w, int k) {
    const std::size_t off = static_cast<std::size_t>(k) * n;
    const GhostSpan gs = ghosts_ ? ghosts_->row(k) : GhostSpan{};
    static thread_local std::vector<std::array<double, 3>> pts;
    pts.resize(n);
    scalar_gauss_points_row({in.data() + off, static_cast<std::size_t>(n)}, mesh_, gs,
                            Weno5Weights::Nonlinear, row_ws_[w], pts);
    double* dst = scalar_vals_.data() + static_cast<std::size_t>(k) * 3 * n;
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < 3; ++l) dst[j * 3 + l] = pts[j][l];
  });

  // Node moments in fixed ascending-k order.
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

  // Node Maxwellians matched to the node moments, plus the cell mixture.
  parallel_for(n, cfg_.threads, [&](int, int j) {
    double* mj = M_mix_.data() + static_cast<std::size_t>(j) * nv;
    std::fill(mj, mj + nv, 0.0);
    for (int l = 0; l < 3; ++l) {
      double* ml = gauss_maxw_.data() + (static_cast<std::size_t>(j) * 3 + l) * nv;
      discrete_maxwellian_into(node_moments_[j * 3 + l], grid_,
                               {ml, static_cast<std::size_t>(nv)});
      const double w = quadrature::legendre3_weights[l];
      for (int k = 0; k < nv; ++k) mj[k] += w * ml[k];
    }
  });

  relax_wf_.assign(3 * n, 0.0);
  relax_wm_.assign(3 * n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < 3; ++l) {
      const double x = mesh_.center(j) + quadrature::legendre3_nodes[l] * mesh_.dx;
      const Primitive p = primitive_from_conserved(node_moments_[j * 3 + l]);
      const double b = b_of(j, l, p, x);
      relax_wf_[j * 3 + l] = 1.0 / (1.0 + b);
      relax_wm_[j * 3 + l] = b / (1.0 + b);
    }
  }
  parallel_for(nv, cfg_.threads, [&](int, int k) {
    const std::size_t off = static_cast<std::size_t>(k) * n;
    const double* vals = scalar_vals_.data() + static_cast<std::size_t>(k) * 3 * n;
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int l = 0; l < 3; ++l) {
        const double mv = gauss_maxw_[(static_cast<std::size_t>(j) * 3 + l) * nv + k];
        acc += quadrature::legendre3_weights[l] *
               (relax_wf_[j * 3 + l] * vals[j * 3 + l] + relax_wm_[j * 3 + l] * mv);
      }
      out[off + j] = acc;
    }
  });
}

void ImexStepper::relax_stage(const std::vector<double>& g, const std::vector<ConservedState>& U,
                              double coeff, int stage_one_based, std::vector<double>& out) {
  const int n = mesh_.n_x;
  const int nv = grid_.n_v;
  const bool gauss_mode = cfg_.spatial != SpatialScheme::Upwind1;

  if (coeff == 0.0) {
    out = g;
    return;
  }

  if (cfg_.eps_fn && gauss_mode) {
    gauss_relax(g,
                [&](int, int, const Primitive& p, double x) {
                  return coeff * cfg_.tau(p.rho, p.T) / cfg_.eps_fn(x);
                },
                out);
    return;
  }

  // Stage Maxwellians. WENO modes use the conservative Gauss-point mixture;
  // the upwind mode relaxes against the plain per-cell discrete Maxwellian,
  // which is what the entropy inequality needs.
  if (gauss_mode) {
    try {
      gauss_point_states(U, mesh_, ghosts_ ? &ghosts_->macro : nullptr,
                         Weno5Weights::Nonlinear, gauss_states_, 2.0 * grid_.dv * grid_.dv);
    } catch (const AdmissibilityError& e) {
      throw AdmissibilityError("stage " + std::to_string(stage_one_based) + ": " + e.what(),
                               e.rho, e.internal_energy);
    }
    parallel_for(n, cfg_.threads, [&](int, int j) {
      cell_maxwellian_into(gauss_states_[j], grid_,
                           {M_mix_.data() + static_cast<std::size_t>(j) * nv,
                            static_cast<std::size_t>(nv)});
    });
  } else {
    parallel_for(n, cfg_.threads, [&](int, int j) {
      discrete_maxwellian_into(U[j], grid_,
                               {M_mix_.data() + static_cast<std::size_t>(j) * nv,
                                static_cast<std::size_t>(nv)});
    });
  }

  // Cell-average relaxation (constant eps; the upwind mode samples a
  // variable eps at the cell centers).
  relax_wf_.assign(n, 0.0);
  relax_wm_.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const Primitive p = primitive_from_conserved(U[j]);
    const double e = cfg_.eps_fn ? cfg_.eps_fn(mesh_.center(j)) : cfg_.eps;
    const double b = coeff * cfg_.tau(p.rho, p.T) / e;
    relax_wf_[j] = 1.0 / (1.0 + b);
    relax_wm_[j] = b / (1.0 + b);
  }
  parallel_for(nv, cfg_.threads, [&](int, int k) {
    const std::size_t off = static_cast<std::size_t>(k) * n;
    for (int j = 0; j < n; ++j)
      out[off + j] =
          relax_wf_[j] * g[off + j] + relax_wm_[j] * M_mix_[static_cast<std::size_t>(j) * nv + k];
  });
}

StepDiagnostics ImexStepper::step(KineticField& f, double dt) {
  if (!(dt > 0.0)) throw SolverError("dt must be positive");
  if (mesh_.boundary == BoundaryMode::DirichletGhost && !ghosts_)
    throw SolverError("freeze_boundary must be called before stepping a Dirichlet run");

  const int nu = cfg_.scheme.nu;
  const int n = mesh_.n_x;
  const std::size_t N = static_cast<std::size_t>(n) * grid_.n_v;
  const TableauPair& tb = cfg_.scheme;

  StepDiagnostics diag;
  diag.time = f.time + dt;
  diag.dt = dt;
  switch (cfg_.spatial) {
    case SpatialScheme::Weno5Limited:
      diag.cfl_exceeded = dt > positivity_dt() * (1.0 + 1e-12);
      break;
    case SpatialScheme::Upwind1:
      diag.cfl_exceeded = dt > upwind_dt() * (1.0 + 1e-12);
      break;
    case SpatialScheme::Weno5Unlimited:
      diag.cfl_exceeded = false;
      break;
  }

  const bool need_tau_star = cfg_.fstar == FStarChoice::FN;
  double stage_min = std::numeric_limits<double>::infinity();
  std::vector<double> cur(N);

  const ShuOsherCoefficients so =
      cfg_.stage_form == StageForm::ShuOsher ? shu_osher_coefficients(tb) : ShuOsherCoefficients{};

  for (int i = 0; i < nu; ++i) {
    if (cfg_.stage_form == StageForm::Butcher) {
      g_ = f.values;
      for (int j = 0; j < i; ++j) {
        const double ce = dt * tb.ae(i, j);
        const double ci = dt * tb.ai(i, j);
        if (ce != 0.0) {
          const double* src = T_[j].data();
          for (std::size_t p = 0; p < N; ++p) g_[p] += ce * src[p];
        }
        if (ci != 0.0) {
          const double* src = QQ_[j].data();
          for (std::size_t p = 0; p < N; ++p) g_[p] += ci * src[p];
        }
      }
    } else {
      // Shu-Osher form: convex combination of previous stages and their
      // forward Euler transport pieces.
      const double c0 = so.c0[i];
      for (std::size_t p = 0; p < N; ++p) g_[p] = c0 * f.values[p];
      if (so.ct0[i] != 0.0) {
        const double w = dt * so.ct0[i];
        for (std::size_t p = 0; p < N; ++p) g_[p] += w * T_[0][p];
      }
      for (int j = 0; j < i; ++j) {
        const double cij = so.c[i * nu + j];
        const double ctij = dt * so.ct[i * nu + j];
        if (cij != 0.0)
          for (std::size_t p = 0; p < N; ++p) g_[p] += cij * F_[j][p];
        if (ctij != 0.0)
          for (std::size_t p = 0; p < N; ++p) g_[p] += ctij * T_[j][p];
      }
    }

    stage_min = std::min(stage_min, clamp_field(g_, i + 1));
    compute_stage_moments(g_, i + 1, U_stage_);
    if (i == 0 && need_tau_star) {
      // stage 1 accumulates nothing, so these are the f^n moments
      for (int j = 0; j < n; ++j) {
        const Primitive p = primitive_from_conserved(U_stage_[j]);
        tau_star_[j] = cfg_.tau(p.rho, p.T);
      }
    }

    const double aii = tb.ai(i, i);
    relax_stage(g_, U_stage_, dt * aii, i + 1, cur);
    if (aii != 0.0) {
      const double inv = 1.0 / (dt * aii);
      double* qq = QQ_[i].data();
      for (std::size_t p = 0; p < N; ++p) qq[p] = (cur[p] - g_[p]) * inv;
    }
    if (cfg_.stage_form == StageForm::ShuOsher) F_[i] = cur;
    if (i + 1 < nu) stage_transport(cur, T_[i]);
  }

  // Correction step: one more relaxation with b = alpha dt^2 tau_{f*} /
  // eps^2. The stage-nu Maxwellian data is reused since the correction
  // conserves the moments.
  double eq_dist = std::numeric_limits<double>::quiet_NaN();
  const bool track_eq = cfg_.track_equilibrium_distance;
  if (tb.alpha > 0.0) {
    const int nv = grid_.n_v;
    // tau_star_ already holds tau at f^n (FN); refresh from the stage-nu
    // moments for the FNp1 variant
    if (!need_tau_star) {
      for (int j = 0; j < n; ++j) {
        const Primitive p = primitive_from_conserved(U_stage_[j]);
        tau_star_[j] = cfg_.tau(p.rho, p.T);
      }
    }
    if (!cfg_.eps_fn) {
      relax_wf_.assign(n, 0.0);
      relax_wm_.assign(n, 0.0);
      for (int j = 0; j < n; ++j) {
        const double b = tb.alpha * dt * dt * tau_star_[j] / (cfg_.eps * cfg_.eps);
        relax_wf_[j] = 1.0 / (1.0 + b);
        relax_wm_[j] = b / (1.0 + b);
      }
      parallel_for(nv, cfg_.threads, [&](int, int k) {
        const std::size_t off = static_cast<std::size_t>(k) * n;
        for (int j = 0; j < n; ++j)
          f.values[off + j] = relax_wf_[j] * cur[off + j] +
                              relax_wm_[j] * M_mix_[static_cast<std::size_t>(j) * nv + k];
      });
    } else {
      gauss_relax(cur,
                  [&](int j, int, const Primitive&, double x) {
                    const double e = cfg_.eps_fn(x);
                    return tb.alpha * dt * dt * tau_star_[j] / (e * e);
                  },
                  f.values);
    }
  } else {
    f.values = cur;
  }
  stage_min = std::min(stage_min, clamp_field(f.values, nu + 1));

  if (track_eq) {
    double d = 0.0;
    const int nv = grid_.n_v;
    for (int k = 0; k < nv; ++k) {
      const std::size_t off = static_cast<std::size_t>(k) * n;
      for (int j = 0; j < n; ++j)
        d = std::max(d,
                     std::abs(f.values[off + j] - M_mix_[static_cast<std::size_t>(j) * nv + k]));
    }
    eq_dist = d;
  }

  f.time += dt;
  diag.stage_min_raw = stage_min;
  diag.max_distance_to_equilibrium = eq_dist;
  const ConservedState tot = field_totals(f);
  diag.mass = tot.rho;
  diag.momentum = tot.m;
  diag.energy = tot.E;
  double mn = f.values.empty() ? 0.0 : f.values[0];
  int negs = 0;
  for (double v : f.values) {
    mn = std::min(mn, v);
    if (v < 0.0) ++negs;
  }
  diag.min_value = mn;
  diag.negative_cell_count = negs;
  if (cfg_.track_entropy && mn >= 0.0) diag.entropy = field_entropy(f);
  return diag;
}

RunSummary run(ImexStepper& stepper, KineticField& f, double t_end, double dt,
               const std::function<void(const StepDiagnostics&)>& on_step) {
  RunSummary summary;
  if (!(t_end > f.time)) return summary;
  int step_index = 0;
  while (f.time < t_end - 1e-14 * std::max(1.0, t_end)) {
    const double h = std::min(dt, t_end - f.time);
    StepDiagnostics d = stepper.step(f, h);
    d.step = ++step_index;
    if (on_step) on_step(d);
    summary.diagnostics.push_back(std::move(d));
  }
  summary.steps = step_index;
  return summary;
}

}  // namespace bgkimex
