import math

import numpy as np
import pytest

from darboux import quadric_dynamics as qd
from darboux.flow import DarbouxState, IntegratorParams, integrate
from darboux.integrals import quadric_integral_value
from darboux.quadrature import grid_derivative


def test_implicit_directions_example(ellipsoid):
    dirs = qd.implicit_directions(ellipsoid, 2.5, 1.5, 1.875)
    assert len(dirs) == 2
    kn_expect = (1.0 / 1.875) * math.sqrt(6.0 / 3.75)
    for d in dirs:
        assert abs(d["k_n"] - kn_expect) < 1e-12
        assert abs(d["k_n_expected"] - kn_expect) < 1e-15
    assert abs(dirs[0]["alpha"] + dirs[1]["alpha"]) < 1e-14
    assert abs(abs(dirs[0]["alpha"]) - math.pi / 4) < 1e-12


def test_implicit_directions_realness(ellipsoid):
    assert qd.implicit_directions(ellipsoid, 2.5, 1.5, 1.2) == []
    with pytest.raises(ValueError):
        qd.implicit_directions(ellipsoid, 2.5, 1.5, 1.5)


def test_angle_from_level_consistency(ellipsoid):
    for lam in (1.6, 1.875, 2.4):
        for (u, v) in [(2.5, 1.5), (2.8, 1.2)]:
            try:
                al = qd.angle_from_level(ellipsoid, u, v, lam)
            except ValueError:
                continue
            I = quadric_integral_value(ellipsoid, u, v, al)
            assert abs(I - 1.0 / lam) < 1e-10


def test_regime_cases_ellipsoid(ellipsoid):
    cases = {0.5: "none", 1.0: "boundary", 1.5: "i", 2.0: "circular",
             2.5: "iii", 3.0: "boundary", 3.5: "none"}
    for lam, case in cases.items():
        assert qd.regime_classify(ellipsoid, lam).case == case
    reg = qd.regime_classify(ellipsoid, 1.5)
    assert reg.bounded and reg.v_band == (1, 1.5) and reg.cusp_axis == "v"


def test_regime_cases_hyperboloids(one_sheet, two_sheet):
    cases1 = {-2.0: "i", -1.0: "boundary", 0.5: "none", 2.0: "none",
              2.5: "ii", 3.0: "boundary", 5.0: "iv"}
    for lam, case in cases1.items():
        assert qd.regime_classify(one_sheet, lam).case == case, lam
    cases2 = {-3.0: "i", -2.0: "circular", -1.5: "iii", -0.5: "none"}
    for lam, case in cases2.items():
        assert qd.regime_classify(two_sheet, lam).case == case, lam
    # unbounded regimes have no finite rectifying rectangle
    rd = qd.sigma_lengths(one_sheet, 2.5)
    assert math.isinf(rd.L2) and math.isinf(rd.rho)


def test_one_sheet_boundary_is_not_ruled(one_sheet):
    # the nominal straight-line boundary levels fail the ruled check in two
    # ways: at the lower end the level set is empty, at the upper end the
    # directions are real but carry nonzero normal curvature
    low = qd.ruled_line_check(one_sheet, -1.0, n=10)
    assert low["real_fraction"] == 0.0
    high = qd.ruled_line_check(one_sheet, 3.0, n=10)
    assert high["real_fraction"] > 0.9
    assert not high["is_ruled"]
    assert high["max_abs_kn"] > 0.1


def test_one_sheet_helix_regime(one_sheet):
    # far levels: real directions everywhere, orbits run unbounded
    A = one_sheet.angle_chart
    reg = qd.regime_classify(one_sheet, 5.0)
    assert reg.case == "iv" and not reg.bounded
    dirs = qd.implicit_directions(one_sheet, 2.5, -2.0, 5.0)
    assert len(dirs) == 2
    al = qd.angle_from_level(one_sheet, 2.5, -2.0, 5.0)
    st = DarbouxState(math.acos((A.um - 2.5) / A.uh), math.sqrt(-1.0 + 2.0), al)
    traj = integrate(A, st, IntegratorParams(max_arc_length=12.0))
    v = np.asarray(A.v_of(traj.v), dtype=float)
    assert traj.termination == "arc_budget"
    assert v.min() < -3.0   # ran away down the sheet


def test_one_sheet_umbilic_level_not_real(one_sheet):
    rng = np.random.default_rng(3)
    for _ in range(20):
        u = rng.uniform(2.05, 2.95)
        v = rng.uniform(-4.0, -1.05)
        assert qd.implicit_directions(one_sheet, float(u), float(v), 2.0) == []


def test_sigma_lengths_convergence(ellipsoid):
    rd = qd.sigma_lengths(ellipsoid, 1.5)
    rd2 = qd.sigma_lengths(ellipsoid, 1.5, tol=5e-10)
    assert math.isfinite(rd.L1) and math.isfinite(rd.L2)
    assert abs(rd.rho - rd2.rho) < 1e-9
    assert abs(rd.L1 - rd2.L1) < 1e-9


def test_sigma_lengths_monotone_toward_umbilic_level(ellipsoid):
    # the v-side length grows monotonically as the level approaches the
    # umbilic section from below
    Ls = [qd.sigma_lengths(ellipsoid, lam).L2 for lam in (1.7, 1.8, 1.9, 1.97)]
    assert all(b > a for a, b in zip(Ls, Ls[1:]))


def test_falpha_rotation_structure(ellipsoid):
    vals = [qd.falpha_rotation(ellipsoid, a).meta["rho_tan_alpha"]
            for a in (0.3, math.pi / 4, 1.0, 1.35)]
    assert max(vals) - min(vals) < 1e-9
    r = qd.falpha_rotation(ellipsoid, math.pi / 4)
    assert abs(r.rho - r.meta["rho_tan_alpha"]) < 1e-12   # tan(pi/4) = 1
    small = qd.falpha_rotation(ellipsoid, 1e-4)
    assert small.rho > 1e3    # rho diverges toward the principal foliation
    with pytest.raises(ValueError):
        qd.falpha_rotation(ellipsoid, 0.0)


def test_falpha_rotation_golden(ellipsoid):
    # frozen value of the alpha-independent ratio for (3, 2, 1), computed by
    # the substitution quadrature at tol 1e-12 and cross-checked at 1e-9
    r = qd.falpha_rotation(ellipsoid, math.pi / 4)
    assert abs(r.meta["rho_tan_alpha"] - 1.2672979716970226) < 1e-9


def test_empirical_rotation_matches_quadrature(ellipsoid):
    A = ellipsoid.angle_chart
    for lam in (2.3, 2.6):
        res = qd.poincare_map(A, lam, n_iterates=40)
        assert abs(res["rho_empirical"] - res["rho_quadrature"]) < 1e-4
        assert len(res["crossings"]) >= 40


def test_rotation_regime_i(ellipsoid):
    res = qd.poincare_map(ellipsoid.angle_chart, 1.5, n_iterates=30)
    assert abs(res["rho_empirical"] - res["rho_quadrature"]) < 1e-4


def test_reflected_start_reverses_winding(ellipsoid):
    A = ellipsoid.angle_chart
    lam = 2.4
    st = qd.level_state(A, lam)
    p = IntegratorParams(max_arc_length=12.0)
    fwd = integrate(A, st, p)
    mir = integrate(A, DarbouxState(st.u, -st.v, -st.alpha), p, backward=True)
    dv_f = fwd.v[-1] - fwd.v[0]
    dv_m = mir.v[-1] - mir.v[0]
    assert abs(dv_f + dv_m) < 1e-6 and abs(dv_f) > 0.5


def test_near_periodic_level_by_bisection(ellipsoid):
    """Bisect the quadrature rotation number to a half-integer and verify the
    orbit closes after two transverse circuits."""
    A = ellipsoid.angle_chart
    lo, hi = 1.2, 1.9          # regime i: rho sweeps (0, 1)
    f = lambda lam: qd.sigma_lengths(ellipsoid, lam).rho - 0.5
    assert f(lo) < 0 < f(hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    res = qd.poincare_map(A, lam, n_iterates=12)
    assert res["periodic_after"] is not None
    cr = res["crossings"]
    x0 = cr[0]["position"]
    ret = cr[res["periodic_after"]]["position"]
    assert np.linalg.norm(ret - x0) < 1e-4


def test_rectification_along_level_orbits(ellipsoid):
    A = ellipsoid.angle_chart
    for lam in (1.5, 2.5):
        st = qd.level_state(A, lam)
        traj = integrate(A, st, IntegratorParams(max_arc_length=20.0, rel_tol=1e-11))
        assert qd.rectification_check(A, traj, lam) < 1e-6


def test_level_coherence_along_trajectory(ellipsoid):
    # the trajectory's own direction appears among the level directions
    A = ellipsoid.angle_chart
    lam = 2.5
    st = qd.level_state(A, lam)
    traj = integrate(A, st, IntegratorParams(max_arc_length=10.0, rel_tol=1e-12,
                                             abs_tol=1e-14, n_samples=4000))
    dt = float(traj.t[1] - traj.t[0])
    du = grid_derivative(np.asarray(A.u_of(traj.u), dtype=float), dt)
    dv = grid_derivative(np.asarray(A.v_of(traj.v), dtype=float), dt)
    worst = 0.0
    checked = 0
    for i in range(30, len(traj.t) - 30, 111):
        u = float(A.u_of(traj.u[i]))
        v = float(A.v_of(traj.v[i]))
        dirs = qd.implicit_directions(A, traj.u[i], traj.v[i], lam)
        if not dirs or math.hypot(du[i], dv[i]) < 1e-2:
            continue
        E = float(ellipsoid.E(u, v))
        G = float(ellipsoid.G(u, v))
        nrm = math.sqrt(E * du[i] ** 2 + G * dv[i] ** 2)
        ang = math.atan2(math.sqrt(G) * abs(dv[i]) / nrm, math.sqrt(E) * abs(du[i]) / nrm)
        worst = max(worst, min(abs(ang - abs(d["alpha"])) for d in dirs))
        checked += 1
    assert checked > 10
    assert worst < 1e-8


def test_circular_sections(ellipsoid):
    reports = qd.circular_sections_check(ellipsoid.angle_chart, n_curves=4)
    for rep in reports:
        assert rep["planarity"] < 1e-8
        assert rep["circle_residual"] < 1e-8
        assert rep["normal_alignment"] < 1e-6


def test_circular_sections_tangent_families(ellipsoid):
    # the two mirror families run parallel where they meet the umbilic section
    A = ellipsoid.angle_chart
    spec = ellipsoid.spec
    a, b, c = spec.a, spec.b, spec.c
    for p0 in (0.7, 1.9):
        u = float(A.u_of(p0))
        # direction magnitudes of both branches at the section v = b (q = pi)
        dp = math.sqrt((u - c) * (b - c)) * math.cos(math.pi / 2)
        assert abs(dp) < 1e-12    # both families move purely along q there
