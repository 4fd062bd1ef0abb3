import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darboux import lorentz as lz
from darboux.flow import DarbouxState, IntegratorParams, falpha_leaf, integrate, integrate_geodesic
from darboux.quadrature import grid_derivative

vec3 = st.tuples(*[st.floats(-4.0, 4.0) for _ in range(3)])


def test_classification_examples():
    assert lz.classify((1, 1, 0, 0, 0)) == "light-like"
    assert lz.lorentz_form((1, 1, 0, 0, 0)) == 0.0
    assert lz.classify((1, 0, 0, 0, 0)) == "time-like"
    assert lz.classify((0, 1, 0, 0, 0)) == "space-like"


def test_polarization_identity():
    rng = np.random.default_rng(5)
    for _ in range(50):
        x, y = rng.normal(size=5), rng.normal(size=5)
        lhs = lz.lorentz_product(x, y)
        rhs = 0.25 * (lz.lorentz_form(x + y) - lz.lorentz_form(x - y))
        assert abs(lhs - rhs) < 1e-12


@settings(max_examples=80, deadline=None)
@given(x=vec3, n=vec3)
def test_lift_identities(x, n):
    nu = np.asarray(n, dtype=float)
    nrm = np.linalg.norm(nu)
    if nrm < 1e-3:
        nu = np.array([1.0, 0.0, 0.0])
        nrm = 1.0
    nu = nu / nrm
    m = lz.lift_point(np.asarray(x, dtype=float))
    nn = lz.lift_normal(np.asarray(x, dtype=float), nu)
    assert abs(lz.lorentz_form(m)) < 1e-12
    assert abs(lz.lorentz_form(nn) - 1.0) < 1e-12
    assert abs(lz.lorentz_product(m, nn)) < 1e-12


def test_lift_examples():
    assert np.allclose(lz.lift_point(np.zeros(3)), [0.5, 0, 0, 0, -0.5])
    assert np.allclose(lz.lift_normal(np.array([1.0, 0, 0]), np.array([1.0, 0, 0])),
                       [1, 1, 0, 0, 1])
    with pytest.raises(ValueError):
        lz.lift_normal(np.zeros(3), np.array([2.0, 0, 0]))


def test_membership_oracle_against_center_radius():
    rng = np.random.default_rng(7)
    for _ in range(100):
        cen = rng.normal(size=3) * 2
        rad = rng.uniform(0.2, 3.0)
        ori = int(rng.choice([-1, 1]))
        sig = lz.sphere_lift(cen, rad, ori)
        assert abs(lz.lorentz_form(sig) - 1.0) < 1e-12
        k, cen2, rad2 = lz.sphere_from_lift(sig)
        assert abs(rad2 - rad) < 1e-9 and np.max(np.abs(cen2 - cen)) < 1e-9
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        assert abs(lz.on_sphere_residual(cen + rad * d, sig)) < 1e-9
        assert abs(lz.on_sphere_residual(cen + 1.5 * rad * d, sig)) > 1e-3


def test_sphere_angle():
    s1 = lz.lift_normal(np.zeros(3), np.array([1.0, 0, 0]))
    s2 = lz.lift_normal(np.zeros(3), np.array([0.0, 1, 0]))
    assert abs(lz.sphere_angle(s1, s2) - math.pi / 2) < 1e-14
    assert lz.sphere_angle(s1, s1 * 1.0) < 1e-7


def test_tangent_sphere_pencil(ellipsoid):
    A = ellipsoid.angle_chart
    s1 = lz.tangent_sphere(A, 1.2, 0.9, 0.3)
    s2 = lz.tangent_sphere(A, 1.2, 0.9, 1.0)
    assert abs(lz.lorentz_form(s1) - 1.0) < 1e-12
    assert abs(lz.lorentz_product(s1, s2)) >= 1.0 - 1e-12
    with pytest.raises(ValueError):
        lz.sphere_angle(s1, s2)
    # the pencil moves along the light ray of the point lift
    m = lz.lift_point(A.embedding(1.2, 0.9))
    diff = s2 - s1
    assert np.max(np.abs(diff / diff[0] - m / m[0])) < 1e-12


def test_tangent_sphere_endpoints(ellipsoid):
    A = ellipsoid.angle_chart
    x = A.embedding(1.2, 0.9)
    nu = A.normal(1.2, 0.9)
    s0 = lz.tangent_sphere(A, 1.2, 0.9, 0.0)
    k1 = float(A.k1(1.2, 0.9))
    assert np.max(np.abs(s0 - (k1 * lz.lift_point(x) + lz.lift_normal(x, nu)))) < 1e-12
    k, cen, rad = lz.sphere_from_lift(s0)
    assert abs(abs(k) - abs(k1)) < 1e-12


def test_congruence_ranks(ellipsoid):
    A = ellipsoid.angle_chart
    assert lz.tangent_sphere_rank(A, 1.2, 0.9, 0.7)[0] == 3
    assert lz.osculating_boundary_rank(A, 1.2, 0.9, "P1")[0] == 2
    assert lz.osculating_boundary_rank(A, 0.0, 0.9, "P1")[0] == 1
    assert lz.osculating_boundary_rank(A, math.pi, 0.9, "P1")[0] == 1
    assert lz.osculating_boundary_rank(A, 1.2, 0.0, "P2")[0] == 1
    assert lz.osculating_boundary_rank(A, 1.2, 0.9, "P2")[0] == 2


def test_intersection_branch_angles(ellipsoid):
    A = ellipsoid.angle_chart
    for beta in (0.4, 0.9, 1.2):
        angles = lz.sphere_surface_intersection_angles(A, 1.2, 0.9, beta)
        assert abs(angles[0] + beta) < 1e-3
        assert abs(angles[1] - beta) < 1e-3


def test_center_contact_has_no_branches(ellipsoid):
    # a curvature k outside [k1, k2] gives an isolated tangency
    A = ellipsoid.angle_chart
    k1 = float(A.k1(1.2, 0.9))
    k2 = float(A.k2(1.2, 0.9))
    x = A.embedding(1.2, 0.9)
    nu = A.normal(1.2, 0.9)
    sig = (max(k1, k2) + 0.5) * lz.lift_point(x) + lz.lift_normal(x, nu)

    def f(uu, vv):
        return lz.lorentz_product(lz.lift_point(A.embedding(uu, vv)), sig)
    from darboux.quadrature import partial_uv
    q11 = partial_uv(f, 1.2, 0.9, 2, 0, 1e-4)
    q22 = partial_uv(f, 1.2, 0.9, 0, 2, 1e-4)
    q12 = partial_uv(f, 1.2, 0.9, 1, 1, 1e-4)
    assert q12 * q12 - q11 * q22 < 0   # definite Hessian: point contact


def test_lift_derivative_relations(ellipsoid, ell_trajectory):
    # along any chart curve: L(sigma, m') = 0 and L(sigma', m') = 0
    A = ellipsoid.angle_chart
    traj = ell_trajectory
    c = traj.positions
    N = A.normal(traj.u, traj.v)
    k1 = np.asarray(A.k1(traj.u, traj.v), dtype=float)
    k2 = np.asarray(A.k2(traj.u, traj.v), dtype=float)
    kn = k1 * np.cos(traj.alpha) ** 2 + k2 * np.sin(traj.alpha) ** 2
    m = lz.lift_point(c)
    sigma = kn[:, None] * m + lz.lift_normal(c, N)
    dt = float(traj.t[1] - traj.t[0])
    dm = grid_derivative(m, dt)
    dsig = grid_derivative(sigma, dt)
    sl = slice(4, -4)
    r1 = np.einsum("ij,ij,j->i", sigma, dm, lz._SIGN)[sl]
    r2 = np.einsum("ij,ij,j->i", dsig, dm, lz._SIGN)[sl]
    assert np.max(np.abs(r1)) < 1e-7
    assert np.max(np.abs(r2)) < 1e-6


def test_canonical_section_discriminates(ellipsoid):
    A = ellipsoid.angle_chart
    p = IntegratorParams(max_arc_length=8.0, rel_tol=1e-12, abs_tol=1e-14)
    traj = integrate(A, DarbouxState(1.2, 0.9, 0.6), p)
    res = lz.canonical_section_analysis(A, traj)
    assert res["rotation_speed_residual"] < 1e-6
    assert res["tangential_component"] < 1e-5
    assert np.max(np.abs(res["kvec_lorentz_form"])) < 1e-3   # light-like on Darboux curves
    leaf = falpha_leaf(A, (1.2, 0.9), math.pi / 4,
                       params=IntegratorParams(max_arc_length=6.0))
    ctrl = lz.canonical_section_analysis(A, leaf)
    assert ctrl["rotation_speed_residual"] < 1e-6   # speed law holds on any curve
    assert ctrl["tangential_component"] > 1e-2
    geo = integrate_geodesic(A, DarbouxState(1.2, 0.9, 0.6),
                             IntegratorParams(max_arc_length=6.0))
    assert lz.canonical_section_analysis(A, geo)["tangential_component"] > 1e-2


def test_fixed_curvature_section_speed(ellipsoid, ell_trajectory):
    # L(sigma_k') = tau_g^2 + (k - k_n)^2: the canonical section is slowest
    A = ellipsoid.angle_chart
    for k in (0.3, 0.9, 1.7):
        sp2, pred = lz.fixed_curvature_section_speed(A, ell_trajectory, k)
        assert np.max(np.abs(sp2 - pred)) < 1e-5
        # space-like section, and never slower than the canonical one whose
        # squared speed is pred - (k - k_n)^2 <= pred
        assert np.all(sp2 > 0)


def test_lorentz_curve_export(tmp_path, ellipsoid, ell_trajectory):
    from darboux.serialize import write_csv
    A = ellipsoid.angle_chart
    c = ell_trajectory.positions
    N = A.normal(ell_trajectory.u, ell_trajectory.v)
    k1 = np.asarray(A.k1(ell_trajectory.u, ell_trajectory.v), dtype=float)
    k2 = np.asarray(A.k2(ell_trajectory.u, ell_trajectory.v), dtype=float)
    kn = k1 * np.cos(ell_trajectory.alpha) ** 2 + k2 * np.sin(ell_trajectory.alpha) ** 2
    sigma = kn[:, None] * lz.lift_point(c) + lz.lift_normal(c, N)
    cols = {"s": ell_trajectory.s}
    for i in range(5):
        cols[f"sigma{i}"] = sigma[:, i]
    cols["lorentz_form"] = np.einsum("ij,ij,j->i", sigma, sigma, lz._SIGN)
    path = tmp_path / "lorentz.csv"
    write_csv(path, cols)
    header = path.read_text().splitlines()[0]
    assert header == "s,sigma0,sigma1,sigma2,sigma3,sigma4,lorentz_form"
    assert np.max(np.abs(cols["lorentz_form"] - 1.0)) < 1e-12
