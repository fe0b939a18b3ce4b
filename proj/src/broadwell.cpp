#include "bgkimex/broadwell.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bgkimex {

BroadwellMoments broadwell_moments(const BroadwellTriple& f) {
  return {f.fp + 2.0 * f.f0 + f.fm, f.fp - f.fm, f.fp + f.fm};
}

BroadwellTriple broadwell_triple(const BroadwellMoments& u) {
  return {0.5 * (u.z + u.m), 0.5 * (u.rho - u.z), 0.5 * (u.z - u.m)};
}

double broadwell_equilibrium_z(double rho, double m) {
  return 0.5 * (rho * rho + m * m) / rho;
}

BroadwellTriple broadwell_collision(const BroadwellTriple& f) {
  const double q = f.f0 * f.f0 - f.fp * f.fm;
  return {q, -q, q};
}

BroadwellTriple broadwell_relax(const BroadwellTriple& g, double b) {
  if (!(b >= 0.0)) throw SolverError("broadwell_relax requires b >= 0");
  if (!broadwell_nonneg(g)) {
    std::ostringstream os;
    os << "broadwell_relax requires a nonnegative triple, got (" << g.fp << ", " << g.f0 << ", "
       << g.fm << ")";
    throw SolverError(os.str());
  }
  const BroadwellMoments mg = broadwell_moments(g);
  const double z = (0.5 * b * (mg.rho * mg.rho + mg.m * mg.m) + mg.z) / (1.0 + b * mg.rho);
  return broadwell_triple({mg.rho, mg.m, z});
}

double broadwell_entropy_cell(const BroadwellTriple& f) {
  if (!broadwell_nonneg(f)) throw SolverError("broadwell entropy undefined for negative values");
  auto xlogx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
  return xlogx(f.fp) + 2.0 * xlogx(f.f0) + xlogx(f.fm);
}

double broadwell_entropy(const BroadwellField& f) {
  double s = 0.0;
  for (int j = 0; j < f.mesh.n_x; ++j) s += broadwell_entropy_cell(f.cell(j));
  return f.mesh.dx * s;
}

BroadwellStepper::BroadwellStepper(BroadwellConfig cfg, SpatialMesh mesh)
    : cfg_(std::move(cfg)), mesh_(mesh) {
  cfg_.scheme.validate();
  if (!cfg_.scheme.gsa || cfg_.scheme.kind == SchemeKind::TypeCK)
    throw SolverError("broadwell stepper requires a GSA type A or ARS tableau");
  if (mesh_.boundary != BoundaryMode::Periodic)
    throw SolverError("broadwell stepper supports periodic boundaries");
  if (!(cfg_.eps > 0.0)) throw SolverError("eps must be positive");
  try {
    const auto rep = positivity_analysis(cfg_.scheme);
    c_sch_ = (rep.feasible && rep.c_sch) ? *rep.c_sch : 0.0;
  } catch (const TableauError&) {
    c_sch_ = 0.0;
  }
  const int nu = cfg_.scheme.nu;
  Tp_.assign(nu, std::vector<double>(mesh_.n_x, 0.0));
  Tm_.assign(nu, std::vector<double>(mesh_.n_x, 0.0));
  QQ_.assign(nu, std::vector<BroadwellTriple>(mesh_.n_x));
  rho_star_.assign(mesh_.n_x, 0.0);
}

double BroadwellStepper::positivity_dt() const { return c_sch_ * kLobattoCfl * mesh_.dx; }

void BroadwellStepper::transport(const BroadwellField& f, std::vector<double>& tp,
                                 std::vector<double>& tm) {
  if (cfg_.spatial == SpatialScheme::Upwind1) {
    upwind1_rhs_row(f.fp, 1.0, mesh_, GhostSpan{}, tp);
    upwind1_rhs_row(f.fm, -1.0, mesh_, GhostSpan{}, tm);
    return;
  }
  TransportConfig tc;
  tc.limiter = cfg_.spatial == SpatialScheme::Weno5Limited;
  tc.policy = cfg_.positivity_strict ? LimiterPolicy::Strict : LimiterPolicy::Lenient;
  transport_rhs_row(f.fp, 1.0, mesh_, GhostSpan{}, tc, ws_, tp);
  transport_rhs_row(f.fm, -1.0, mesh_, GhostSpan{}, tc, ws_, tm);
}

BroadwellDiagnostics BroadwellStepper::step(BroadwellField& f, double dt) {
  if (!(dt > 0.0)) throw SolverError("dt must be positive");
  const int n = mesh_.n_x;
  const int nu = cfg_.scheme.nu;
  const TableauPair& tb = cfg_.scheme;

  for (int j = 0; j < n; ++j) rho_star_[j] = broadwell_moments(f.cell(j)).rho;

  double stage_min = std::numeric_limits<double>::infinity();
  BroadwellField g(mesh_), cur = f;

  auto clamp_triple_field = [&](BroadwellField& h, int stage) {
    double raw = 0.0;
    for (const auto* comp : {&h.fp, &h.f0, &h.fm})
      for (double v : *comp) raw = std::min(raw, v);
    if (cfg_.positivity_strict) {
      if (raw < -kClampTol) {
        std::ostringstream os;
        os << "broadwell stage " << stage << ": negative component " << raw;
        throw SolverError(os.str());
      }
      for (auto* comp : {&h.fp, &h.f0, &h.fm})
        for (double& v : *comp)
          if (v < 0.0) v = 0.0;
    }
    return raw;
  };

  for (int i = 0; i < nu; ++i) {
    g.fp = f.fp;
    g.f0 = f.f0;
    g.fm = f.fm;
    for (int j = 0; j < i; ++j) {
      const double ce = dt * tb.ae(i, j);
      const double ci = dt * tb.ai(i, j);
      if (ce != 0.0)
        for (int c = 0; c < n; ++c) {
          g.fp[c] += ce * Tp_[j][c];
          g.fm[c] += ce * Tm_[j][c];
        }
      if (ci != 0.0)
        for (int c = 0; c < n; ++c) {
          const BroadwellTriple& q = QQ_[j][c];
          g.fp[c] += ci * q.fp;
          g.f0[c] += ci * q.f0;
          g.fm[c] += ci * q.fm;
        }
    }
    stage_min = std::min(stage_min, clamp_triple_field(g, i + 1));

    const double aii = tb.ai(i, i);
    if (aii != 0.0) {
      const double b = dt * aii / cfg_.eps;
      const double inv = 1.0 / (dt * aii);
      for (int c = 0; c < n; ++c) {
        const BroadwellTriple gc = g.cell(c);
        const BroadwellTriple fc = broadwell_relax(gc, b);
        cur.set_cell(c, fc);
        QQ_[i][c] = {(fc.fp - gc.fp) * inv, (fc.f0 - gc.f0) * inv, (fc.fm - gc.fm) * inv};
      }
    } else {
      cur.fp = g.fp;
      cur.f0 = g.f0;
      cur.fm = g.fm;
      for (int c = 0; c < n; ++c) QQ_[i][c] = {};
    }
    if (i + 1 < nu) transport(cur, Tp_[i], Tm_[i]);
  }

  // Correction: f^{n+1} - alpha dt^2 rho_{f*} / eps^2 Q(f^{n+1}) = f^{(nu)}.
  if (tb.alpha > 0.0) {
    const double fac = tb.alpha * dt * dt / (cfg_.eps * cfg_.eps);
    for (int c = 0; c < n; ++c)
      f.set_cell(c, broadwell_relax(cur.cell(c), fac * rho_star_[c]));
  } else {
    f.fp = cur.fp;
    f.f0 = cur.f0;
    f.fm = cur.fm;
  }
  stage_min = std::min(stage_min, clamp_triple_field(f, nu + 1));
  f.time += dt;

  BroadwellDiagnostics diag;
  diag.time = f.time;
  diag.stage_min_raw = stage_min;
  double rho_tot = 0.0, m_tot = 0.0, mn = 0.0, closure = 0.0;
  bool nonneg = true;
  for (int j = 0; j < n; ++j) {
    const BroadwellMoments u = broadwell_moments(f.cell(j));
    rho_tot += u.rho;
    m_tot += u.m;
    mn = std::min({mn, f.fp[j], f.f0[j], f.fm[j]});
    if (f.fp[j] < 0 || f.f0[j] < 0 || f.fm[j] < 0) nonneg = false;
    if (u.rho > 0.0)
      closure = std::max(closure, std::abs(u.z - broadwell_equilibrium_z(u.rho, u.m)));
  }
  diag.rho_total = rho_tot * mesh_.dx;
  diag.m_total = m_tot * mesh_.dx;
  diag.min_component = mn;
  diag.closure_residual = closure;
  if (nonneg) diag.entropy = broadwell_entropy(f);
  return diag;
}

}  // namespace bgkimex
