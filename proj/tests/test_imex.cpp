#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "bgkimex/imex.hpp"
#include "bgkimex/problems.hpp"
#include "bgkimex/experiments.hpp"
#include "bgkimex/reference.hpp"

using namespace bgkimex;

namespace {

const VelocityGrid kGrid(15.0, 60);

KineticField equilibrium_field(const SpatialMesh& mesh, const VelocityGrid& grid,
                               const ConservedState& U) {
  KineticField f(mesh, grid);
  const auto M = discrete_maxwellian(U, grid);
  for (int k = 0; k < grid.n_v; ++k) {
    auto row = f.row(k);
    for (int j = 0; j < mesh.n_x; ++j) row[j] = M[k];
  }
  return f;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("global equilibrium is a fixed point") {
  const SpatialMesh mesh(16, 0.0, 2.0);
  for (double eps : {1.0, 1e-6}) {
    for (const char* name : {"scheme_a", "scheme_ars"}) {
      SimConfig cfg;
      cfg.scheme = get_scheme(name);
      cfg.eps = eps;
      ImexStepper stepper(cfg, mesh, kGrid);
      KineticField f = equilibrium_field(mesh, kGrid, {1.0, 0.0, 0.5});
      const auto before = f.values;
      stepper.step(f, stepper.positivity_dt());
      CHECK(max_abs_diff(before, f.values) < 1e-13);
    }
  }
}

TEST_CASE("periodic runs conserve the invariants per step") {
  const SpatialMesh mesh(24, 0.0, 2.0);
  for (double eps : {1.0, 1e-8}) {
    for (const char* name : {"scheme_a", "scheme_ars"}) {
      SimConfig cfg;
      cfg.scheme = get_scheme(name);
      cfg.eps = eps;
      ImexStepper stepper(cfg, mesh, kGrid);
      KineticField f = problems::smooth_inconsistent(mesh, kGrid);
      ConservedState prev = field_totals(f);
      for (int s = 0; s < 20; ++s) {
        stepper.step(f, stepper.positivity_dt());
        const ConservedState tot = field_totals(f);
        CHECK(std::abs(tot.rho - prev.rho) <= 1e-12 * prev.rho);
        CHECK(std::abs(tot.m - prev.m) <= 1e-12 * std::max(prev.rho, std::abs(prev.m)));
        CHECK(std::abs(tot.E - prev.E) <= 1e-12 * prev.E);
        prev = tot;
      }
    }
  }
}

TEST_CASE("one stiff step projects to the local Maxwellian") {
  const SpatialMesh mesh(24, 0.0, 2.0);
  for (const char* name : {"scheme_a", "scheme_ars"}) {
    SimConfig cfg;
    cfg.scheme = get_scheme(name);
    cfg.eps = 1e-10;
    cfg.track_equilibrium_distance = true;
    ImexStepper stepper(cfg, mesh, kGrid);
    KineticField f = problems::smooth_inconsistent(mesh, kGrid);
    const auto diag = stepper.step(f, stepper.positivity_dt());
    CHECK(diag.max_distance_to_equilibrium <= 1e-6);
  }
}

TEST_CASE("stiff moment updates follow the kinetic-flux Euler scheme") {
  const SpatialMesh mesh(24, 0.0, 2.0);
  SimConfig cfg;
  cfg.scheme = get_scheme("scheme_a");
  cfg.eps = 1e-10;
  ImexStepper stepper(cfg, mesh, kGrid);
  KineticField f = problems::smooth_consistent(mesh, kGrid);
  const double dt = stepper.positivity_dt();
  stepper.step(f, dt);  // projection step
  for (int s = 0; s < 3; ++s) {
    std::vector<ConservedState> U(mesh.n_x);
    field_moments(f.values, mesh, kGrid, U);
    const auto ref = experiments::limit_moment_update(cfg.scheme, U, dt, mesh, kGrid);
    stepper.step(f, dt);
    std::vector<ConservedState> after(mesh.n_x);
    field_moments(f.values, mesh, kGrid, after);
    double rel = 0.0;
    for (int j = 0; j < mesh.n_x; ++j) {
      rel = std::max(rel, std::abs(after[j].rho - ref[j].rho) / ref[j].rho);
      rel = std::max(rel, std::abs(after[j].m - ref[j].m) / std::max(1.0, std::abs(ref[j].m)));
      rel = std::max(rel, std::abs(after[j].E - ref[j].E) / ref[j].E);
    }
    CHECK(rel <= 1e-8);
  }
}

TEST_CASE("Butcher and Shu-Osher stage forms agree") {
  const SpatialMesh mesh(16, 0.0, 2.0);
  for (const char* name : {"scheme_a", "scheme_ars"}) {
    for (double eps : {1.0, 1e-4}) {
      SimConfig cfg;
      cfg.scheme = get_scheme(name);
      cfg.eps = eps;
      SimConfig cfg2 = cfg;
      cfg2.stage_form = StageForm::ShuOsher;
      ImexStepper a(cfg, mesh, kGrid), b(cfg2, mesh, kGrid);
      KineticField fa = problems::smooth_inconsistent(mesh, kGrid);
      KineticField fb = fa;
      for (int s = 0; s < 3; ++s) {
        a.step(fa, a.positivity_dt());
        b.step(fb, b.positivity_dt());
      }
      CHECK(max_abs_diff(fa.values, fb.values) < 1e-12);
    }
  }
}

TEST_CASE("upwind mode decays entropy step by step") {
  const SpatialMesh mesh(24, 0.0, 2.0);
  for (double eps : {1.0, 1e-2, 1e-8}) {
    SimConfig cfg;
    cfg.scheme = get_scheme("scheme_a");
    cfg.eps = eps;
    cfg.spatial = SpatialScheme::Upwind1;
    cfg.track_entropy = true;
    ImexStepper stepper(cfg, mesh, kGrid);
    KineticField f = problems::smooth_inconsistent(mesh, kGrid);
    double prev = field_entropy(f);
    const double dt = 0.95 * stepper.upwind_dt();
    for (int s = 0; s < 60; ++s) {
      const auto diag = stepper.step(f, dt);
      CHECK(diag.entropy <= prev + 1e-12);
      prev = diag.entropy;
    }
  }
}

TEST_CASE("equilibrium keeps the entropy constant in upwind mode") {
  const SpatialMesh mesh(16, 0.0, 2.0);
  SimConfig cfg;
  cfg.scheme = get_scheme("scheme_ars");
  cfg.eps = 1e-2;
  cfg.spatial = SpatialScheme::Upwind1;
  cfg.track_entropy = true;
  ImexStepper stepper(cfg, mesh, kGrid);
  KineticField f = equilibrium_field(mesh, kGrid, {1.0, 0.0, 0.5});
  const double S0 = field_entropy(f);
  for (int s = 0; s < 20; ++s) {
    const auto diag = stepper.step(f, 0.9 * stepper.upwind_dt());
    CHECK(diag.entropy == doctest::Approx(S0).epsilon(1e-12));
  }
}

TEST_CASE("Sod run keeps every stage nonnegative") {
  const VelocityGrid grid(15.0, 100);
  const SpatialMesh mesh(40, 0.0, 2.0, BoundaryMode::DirichletGhost);
  for (const char* name : {"scheme_a", "scheme_ars"}) {
    for (double eps : {1.0, 1e-6}) {  // positivity holds stiff or not
      SimConfig cfg;
      cfg.scheme = get_scheme(name);
      cfg.eps = eps;
      ImexStepper stepper(cfg, mesh, grid);
      KineticField f = problems::sod(mesh, grid);
      stepper.freeze_boundary(f);
      const double dt = (1.0 / 24.0) * mesh.dx / grid.v_max;
      for (int s = 0; s < 60; ++s) {
        const auto diag = stepper.step(f, dt);
        CHECK(diag.stage_min_raw >= -kClampTol);
        CHECK(diag.negative_cell_count == 0);
        CHECK_FALSE(diag.cfl_exceeded);
      }
    }
  }
}

TEST_CASE("run lands exactly on t_end and reports diagnostics") {
  const SpatialMesh mesh(16, 0.0, 2.0);
  SimConfig cfg;
  cfg.scheme = get_scheme("scheme_a");
  cfg.eps = 1.0;
  ImexStepper stepper(cfg, mesh, kGrid);
  KineticField f = problems::smooth_inconsistent(mesh, kGrid);

  const auto before = f.values;
  auto summary = run(stepper, f, 0.0, stepper.positivity_dt());
  CHECK(summary.steps == 0);
  CHECK(f.values == before);

  const double t_end = 3.7 * stepper.positivity_dt();
  summary = run(stepper, f, t_end, stepper.positivity_dt());
  CHECK(summary.steps == 4);
  CHECK(f.time == doctest::Approx(t_end).epsilon(1e-14));
  CHECK(summary.diagnostics.back().time == doctest::Approx(t_end).epsilon(1e-14));
}

TEST_CASE("stepper rejects invalid usage") {
  const SpatialMesh mesh(16, 0.0, 2.0);
  SimConfig cfg;
  cfg.scheme = get_scheme("ssp_rk2_explicit");
  CHECK_THROWS_AS(ImexStepper(cfg, mesh, kGrid), SolverError);

  cfg.scheme = get_scheme("scheme_a");
  ImexStepper stepper(cfg, mesh, kGrid);
  KineticField f = problems::smooth_consistent(mesh, kGrid);
  CHECK_THROWS(stepper.step(f, 0.0));

  const SpatialMesh dm(16, 0.0, 2.0, BoundaryMode::DirichletGhost);
  ImexStepper ds(cfg, dm, kGrid);
  KineticField fd = problems::sod(dm, kGrid);
  CHECK_THROWS_AS(ds.step(fd, 1e-4), SolverError);
}

TEST_CASE("inadmissible stage moments name the stage and cell") {
  const SpatialMesh mesh(16, 0.0, 2.0);
  SimConfig cfg;
  cfg.scheme = get_scheme("scheme_a");
  ImexStepper stepper(cfg, mesh, kGrid);
  KineticField f(mesh, kGrid);  // all-zero field: vacuum everywhere
  try {
    stepper.step(f, 1e-4);
    FAIL("expected AdmissibilityError");
  } catch (const AdmissibilityError& e) {
    CHECK(std::string(e.what()).find("stage 1") != std::string::npos);
    CHECK(std::string(e.what()).find("cell 0") != std::string::npos);
  }
}

TEST_CASE("variable-epsilon runs conserve to round-off") {
  // eps spans eight orders of magnitude across the domain; the Gauss-node
  // relaxation matches its Maxwellians to the node moments, so each node
  // solve preserves its own moments exactly.
  const SpatialMesh mesh(24, 0.0, 2.0);
  SimConfig cfg;
  cfg.scheme = get_scheme("scheme_a");
  cfg.eps_fn = problems::mixed_regime_eps;
  ImexStepper stepper(cfg, mesh, kGrid);
  KineticField f = problems::smooth_consistent(mesh, kGrid);
  const ConservedState t0 = field_totals(f);
  for (int s = 0; s < 10; ++s) stepper.step(f, stepper.positivity_dt());
  const ConservedState t1 = field_totals(f);
  CHECK(std::abs(t1.rho - t0.rho) <= 1e-12 * t0.rho);
  CHECK(std::abs(t1.E - t0.E) <= 1e-12 * t0.E);
  for (double v : f.values) CHECK(v >= 0.0);
}

TEST_CASE("ssp_rk2 reference: equilibrium fixed point and flags") {
  const SpatialMesh mesh(16, 0.0, 2.0);
  SspRk2Config cfg;
  cfg.eps = 1.0;
  SspRk2Stepper stepper(cfg, mesh, kGrid);
  KineticField f = equilibrium_field(mesh, kGrid, {1.0, 0.0, 0.5});
  const auto before = f.values;
  const auto res = stepper.step(f, 1e-4);
  CHECK(max_abs_diff(before, f.values) < 1e-13);
  CHECK_FALSE(res.stiffness_exceeded);

  const auto res2 = stepper.step(f, 0.9);
  CHECK(res2.transport_cfl_exceeded);
  CHECK(res2.stiffness_exceeded);
}

TEST_CASE("results do not depend on the thread count") {
  const SpatialMesh mesh(16, 0.0, 2.0);
  const VelocityGrid grid(15.0, 40);
  auto run_with = [&](int threads, bool mixed) {
    SimConfig cfg;
    cfg.scheme = get_scheme("scheme_a");
    cfg.eps = 1e-3;
    if (mixed) cfg.eps_fn = problems::mixed_regime_eps;
    cfg.threads = threads;
    ImexStepper stepper(cfg, mesh, grid);
    KineticField f = problems::smooth_inconsistent(mesh, grid);
    for (int s = 0; s < 3; ++s) stepper.step(f, stepper.positivity_dt());
    return f.values;
  };
  for (bool mixed : {false, true}) {
    const auto a = run_with(1, mixed);
    const auto b = run_with(4, mixed);
    CHECK(a == b);
  }
}

TEST_CASE("ssp_rk2 is conservative and positive under the halved CFL") {
  const SpatialMesh mesh(24, 0.0, 2.0);
  SspRk2Config cfg;
  cfg.eps = 1.0;
  SspRk2Stepper stepper(cfg, mesh, kGrid);
  KineticField f = problems::smooth_inconsistent(mesh, kGrid);
  const ConservedState t0 = field_totals(f);
  const double dt = 0.5 * kLobattoCfl * mesh.dx / kGrid.v_max;
  for (int s = 0; s < 40; ++s) {
    const auto res = stepper.step(f, dt);
    CHECK_FALSE(res.transport_cfl_exceeded);
    for (double v : f.values) CHECK(v >= 0.0);
  }
  const ConservedState t1 = field_totals(f);
  CHECK(std::abs(t1.rho - t0.rho) <= 1e-12 * t0.rho);
  CHECK(std::abs(t1.E - t0.E) <= 1e-12 * t0.E);
}

TEST_CASE("imex and ssp_rk2 differ at second order in dt") {
  const SpatialMesh mesh(16, 0.0, 2.0);
  const VelocityGrid grid(15.0, 40);
  const double t_end = 0.02;
  auto run_pair = [&](int steps) {
    const double dt = t_end / steps;
    SimConfig ic;
    ic.scheme = get_scheme("scheme_a");
    ic.eps = 1.0;
    ic.spatial = SpatialScheme::Weno5Unlimited;
    ic.positivity_strict = false;
    ImexStepper imex(ic, mesh, grid);
    KineticField fi = problems::smooth_inconsistent(mesh, grid);
    for (int s = 0; s < steps; ++s) imex.step(fi, dt);

    SspRk2Config rc;
    rc.eps = 1.0;
    rc.limiter = false;
    SspRk2Stepper heun(rc, mesh, grid);
    KineticField fh = problems::smooth_inconsistent(mesh, grid);
    for (int s = 0; s < steps; ++s) heun.step(fh, dt);
    return max_abs_diff(fi.values, fh.values);
  };
  const double d1 = run_pair(10);
  const double d2 = run_pair(20);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.3));
}

TEST_CASE("kinetic euler step: constants, conservation, positivity") {
  const SpatialMesh mesh(24, 0.0, 2.0);
  const VelocityGrid grid(15.0, 60);

  std::vector<ConservedState> U(mesh.n_x, ConservedState{1.0, 0.3, 0.8});
  const double dt = kLobattoCfl * mesh.dx / grid.v_max;
  auto out = kinetic_euler_step(U, dt, mesh, grid);
  for (int j = 0; j < mesh.n_x; ++j) {
    CHECK(out[j].rho == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(out[j].m == doctest::Approx(0.3).epsilon(1e-13));
    CHECK(out[j].E == doctest::Approx(0.8).epsilon(1e-13));
  }

  for (int j = 0; j < mesh.n_x; ++j) {
    const Primitive p = problems::smooth_primitive(mesh.center(j));
    U[j] = conserved_from_primitive(p);
  }
  ConservedState sum0{0, 0, 0}, sum1{0, 0, 0};
  for (const auto& u : U) sum0 = sum0 + u;
  for (int s = 0; s < 5; ++s) {
    U = kinetic_euler_step(U, dt, mesh, grid);
    for (const auto& u : U) CHECK(u.rho > 0.0);
  }
  for (const auto& u : U) sum1 = sum1 + u;
  CHECK(sum1.rho == doctest::Approx(sum0.rho).epsilon(1e-13));
  CHECK(sum1.m == doctest::Approx(sum0.m).epsilon(1e-12));
  CHECK(sum1.E == doctest::Approx(sum0.E).epsilon(1e-13));
}
