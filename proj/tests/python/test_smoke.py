import math

import numpy as np
import pytest

import bgkimex as bk


def test_builtin_schemes_and_cfl_constants():
    names = set(bk.builtin_scheme_names())
    assert {"scheme_a", "scheme_ars", "ars222", "ssp_rk2_explicit"} <= names

    ars = bk.positivity_analysis("scheme_ars")
    assert ars["feasible"]
    assert ars["c_sch"] == 0.8125

    a = bk.positivity_analysis("scheme_a")
    assert a["feasible"]
    assert abs(a["c_sch"] - 0.52474575236975) < 1e-11

    base = bk.positivity_analysis("ars222")
    assert not base["feasible"]


def test_order_conditions():
    for name in ("scheme_a", "scheme_ars"):
        conds = bk.check_order_conditions(name, order=2)
        assert len(conds) == 6
        assert max(abs(c["residual"]) for c in conds) < 1e-10


def test_tableau_json_roundtrip():
    t = bk.get_scheme("scheme_ars")
    back = bk.tableau_from_json(bk.tableau_to_json(t))
    assert back.nu == t.nu
    assert back.alpha == t.alpha
    assert back.a_implicit == t.a_implicit


def test_amplification_factor():
    assert bk.amplification_factor("scheme_a", 0j, 0.0) == 1.0 + 0j
    assert abs(bk.amplification_factor("scheme_a", 0j, -1e9)) < 1e-9
    boundary = bk.stability_boundary("scheme_ars", -1.0, resolution=64)
    assert boundary.shape[1] == 2
    assert len(boundary) > 0


def test_moments_and_maxwellian():
    grid = bk.VelocityGrid(15.0, 150)
    M = bk.maxwellian(1.0, 0.0, 1.0, grid)
    rho, m, E = bk.moments(M, grid)
    assert abs(rho - 1.0) < 1e-12
    assert abs(m) < 1e-12
    assert abs(E - 0.5) < 1e-12

    D = bk.discrete_maxwellian(0.125, 0.0, 0.015625, grid)
    rho, m, E = bk.moments(D, grid)
    assert abs(rho - 0.125) < 1e-13
    assert abs(E - 0.015625) < 1e-13

    out = bk.bgk_relax(np.zeros(grid.n_v), M, 1e12)
    assert np.max(np.abs(out - M)) < 1e-11

    q = bk.collision_bgk(M, grid)
    assert np.max(np.abs(q)) < 1e-13


def test_limiter_and_advection():
    left, right, theta = bk.positivity_limit_interfaces(1.0, -0.2, 0.5)
    assert theta == pytest.approx(1.0 / 1.2)
    assert left == pytest.approx(0.0, abs=1e-16)

    row = np.full(32, 0.7)
    out, exceeded = bk.advect_row(row, 2.0, 1e-4)
    assert not exceeded
    assert np.max(np.abs(out - 0.7)) < 1e-14


def test_short_run_conserves_and_projects():
    res = bk.run_bgk(scheme="scheme_a", eps=1e-10, nx=16, nv=60, t_end=3e-3,
                     init="consistent")
    assert res["steps"] >= 1
    mass = res["mass"]
    assert np.max(np.abs(mass - mass[0])) < 1e-11 * mass[0]
    assert res["max_distance_to_equilibrium"][0] < 1e-6
    assert all(n == 0 for n in res["neg_cells"])
    assert np.all(res["rho"] > 0)
    assert np.all(res["T"] > 0)


def test_accuracy_case_returns_orders():
    pts = bk.accuracy_case("scheme_a", 1.0, [10, 20], init="inconsistent", nv=40)
    assert len(pts) == 2
    assert pts[0][0] == 10 and pts[1][0] == 20
    assert math.isnan(pts[0][2])
    assert pts[1][1] < pts[0][1]  # errors decrease


def test_broadwell_bindings():
    q = bk.broadwell_collision(0.5, 0.0, 0.5)
    assert q == (-0.25, 0.25, -0.25)

    f = bk.broadwell_relax(0.5, 0.0, 0.5, 1.0)
    assert f == pytest.approx((0.375, 0.125, 0.375))

    rho, m, z = bk.broadwell_moments(*f)
    assert rho == pytest.approx(1.0)
    assert m == pytest.approx(0.0)
    assert z == pytest.approx(0.75)

    with pytest.raises(RuntimeError):
        bk.broadwell_relax(-0.1, 0.5, 0.5, 1.0)
