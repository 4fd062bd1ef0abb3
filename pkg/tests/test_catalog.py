import math

import numpy as np
import pytest

from darboux.catalog import (ChartError, flat_strip_cylinder, load_surface,
                             sin_profile_surface, torus_surface)
from darboux.chart import chart_orthogonality_residual, frame_scalars
from darboux.quadrics import QuadricSpec, make_quadric
from darboux.quadrature import central_derivative
from conftest import interior_points


def test_quadric_spec_validation():
    with pytest.raises(ValueError):
        QuadricSpec("ellipsoid", 1, 2, 3)
    with pytest.raises(ValueError):
        QuadricSpec("one_sheet", 3, -1, -2)
    with pytest.raises(ValueError):
        QuadricSpec("pear", 3, 2, 1)


def test_quadric_metric_positive(ellipsoid):
    assert ellipsoid.E(2.5, 1.5) > 0
    assert ellipsoid.G(2.5, 1.5) > 0


def test_ellipsoid_umbilics(ellipsoid):
    pts = ellipsoid.spec.umbilic_points()
    mags = sorted({(round(abs(p[0]), 6), round(abs(p[1]), 6), round(abs(p[2]), 6))
                   for p in pts})
    assert mags == [(1.224745, 0.0, 0.707107)]
    for p in pts:
        q = p[0] ** 2 / 3 + p[1] ** 2 / 2 + p[2] ** 2 / 1
        assert abs(q - 1) < 1e-12


def test_quadric_embedding_on_surface(ellipsoid, one_sheet, two_sheet):
    for surf in (ellipsoid, one_sheet, two_sheet):
        a, b, c = surf.spec.a, surf.spec.b, surf.spec.c
        for (u, v) in interior_points(surf, n=3):
            x = surf.embedding(u, v)
            assert abs(x[0] ** 2 / a + x[1] ** 2 / b + x[2] ** 2 / c - 1) < 1e-10


def test_quadric_branch_signs():
    surf = make_quadric(QuadricSpec("ellipsoid", 3, 2, 1), branch=(-1, 1, -1))
    x = surf.embedding(2.5, 1.5)
    assert x[0] < 0 and x[1] > 0 and x[2] < 0


def test_quadric_curvature_closed_forms(ellipsoid):
    for (u, v) in interior_points(ellipsoid, n=3):
        w = math.sqrt(6.0 / (u * v))
        assert abs(ellipsoid.k1(u, v) - w / u) < 1e-10
        assert abs(ellipsoid.k2(u, v) - w / v) < 1e-10


def test_angle_chart_matches_classic(ellipsoid, one_sheet, two_sheet):
    for surf in (ellipsoid, one_sheet, two_sheet):
        A = surf.angle_chart
        for (p, q) in [(0.9, 1.3), (2.2, 0.4)]:
            u, v = A.classic_uv(p, q)
            if not surf.domain.contains(float(u), float(v)):
                continue
            assert np.max(np.abs(A.embedding(p, q) - surf.embedding(u, v))) < 1e-12
            assert abs(A.k1(p, q) - surf.k1(u, v)) < 1e-13
            assert abs(A.k2(p, q) - surf.k2(u, v)) < 1e-13


def test_angle_chart_smooth_across_sections(ellipsoid, one_sheet, two_sheet):
    # the embedding stays on the quadric and the analytic jets match finite
    # differences on both sides of the former chart boundaries
    for surf in (ellipsoid, one_sheet, two_sheet):
        A = surf.angle_chart
        a, b, c = surf.spec.a, surf.spec.b, surf.spec.c
        q0 = 0.8 if A.v_is_angle else 0.5
        for p in (math.pi - 0.01, math.pi + 0.01, -0.01, 0.01):
            x = A.embedding(p, q0)
            assert abs(x[0] ** 2 / a + x[1] ** 2 / b + x[2] ** 2 / c - 1) < 1e-10
            _, xu, xv = A.embedding_jet(p, q0)
            h = 1e-6
            xu_fd = (A.embedding(p + h, q0) - A.embedding(p - h, q0)) / (2 * h)
            xv_fd = (A.embedding(p, q0 + h) - A.embedding(p, q0 - h)) / (2 * h)
            assert np.max(np.abs(xu - xu_fd)) < 1e-8
            assert np.max(np.abs(xv - xv_fd)) < 1e-8


def test_revolution_cylinder_limit(cyl_rev):
    assert cyl_rev.k1(0.3) == 0.0
    assert abs(cyl_rev.k2(0.3) - 0.5) < 1e-15


def test_revolution_ridge_function_vs_fd(revolution):
    # R(u) = -0.3 cos u (1 - 0.09 cos^2 u) + 3 (0.3 cos u)(0.09 sin^2 u),
    # and -R/D^2 must equal the finite difference of k1 along the profile
    for u in (0.4, 1.1, 2.8, 4.0):
        cu, su = math.cos(u), math.sin(u)
        expected = -0.3 * cu * (1 - 0.09 * cu * cu) + 3 * (0.3 * cu) * (0.09 * su * su)
        assert abs(revolution.ridge_function(u) - expected) < 1e-14
        fd = central_derivative(lambda x: float(revolution.k1(x)), u, 1e-5)
        assert abs(revolution.dk1_du(u) - fd) < 1e-9


def test_revolution_chart_orthogonality(revolution):
    rng = np.random.default_rng(4)
    for _ in range(50):
        u = rng.uniform(0.0, 2 * math.pi)
        v = rng.uniform(-math.pi, math.pi)
        F, f = chart_orthogonality_residual(revolution, u, v)
        assert F < 1e-10 and f < 1e-8


def test_revolution_normal_formula(revolution):
    # closed-form normal agrees with the normalized cross product of partials
    for (u, v) in [(0.7, 0.9), (2.1, -0.4), (4.4, 2.0)]:
        x, xu, xv = revolution.embedding_jet(u, v)
        n = np.cross(xu, xv)
        n /= np.linalg.norm(n)
        assert np.max(np.abs(n - revolution.normal(u, v))) < 1e-8


def test_canal_invariants_theta(revolution, torus, cone, wcone, ell_cyl):
    for surf in (revolution, torus, cone, wcone, ell_cyl):
        w = surf.scan_window()
        vals = []
        for v in np.linspace(w.v_min + 0.2, w.v_max - 0.2, 5):
            fs = frame_scalars(surf, 0.5 * (w.u_min + w.u_max) + 0.2, float(v), 0.0)
            assert abs(fs.theta2) < 1e-6, surf.name
            vals.append(fs.theta1)
        assert max(vals) - min(vals) < 1e-6, surf.name


def test_torus_is_cyclide_band(torus):
    # constant profile curvature -1/rho and points on the torus equation
    for u in (-1.5, 0.0, 2.2):
        assert abs(torus.k1(u) + 1.25) < 1e-12
        x = torus.embedding(u, 0.7)
        assert abs((math.hypot(x[0], x[1]) - 2.0) ** 2 + x[2] ** 2 - 0.64) < 1e-12


def test_cone_curvature_scaling(cone, wcone):
    for surf in (cone, wcone):
        assert abs(surf.k1(1.0, 2.0) - 2.0 * surf.k1(1.0, 4.0)) < 1e-12
        g, gp = surf.spec.gamma(1.234)
        assert abs(np.linalg.norm(g) - 1) < 1e-8
        assert abs(np.linalg.norm(gp) - 1) < 1e-8
    assert abs(cone.k1(1.0, 2.0) * 2.0 - 1.0 / math.tan(0.6)) < 1e-12


def test_cone_ruling_is_asymptotic(cone):
    # normal curvature along the ruling direction vanishes identically
    u, v = 0.8, 2.0
    fs = frame_scalars(cone, u, v, math.pi / 2)
    assert abs(fs.k_n) < 1e-14
    x, xu, xv = cone.embedding_jet(u, v)
    h = 1e-2   # embedding is exactly linear along rulings
    xpp = (cone.embedding(u, v + h) - 2 * cone.embedding(u, v)
           + cone.embedding(u, v - h)) / h ** 2
    assert abs(float(xpp @ cone.normal(u, v))) < 1e-10


def test_elliptic_cylinder_unit_speed(ell_cyl):
    for u in (0.5, 3.0, 7.5):
        t = ell_cyl.spec.tangent(u)
        assert abs(math.hypot(*t) - 1) < 1e-10
        x, y = ell_cyl.spec.point(u)
        assert abs(x ** 2 / 4 + y ** 2 - 1) < 1e-10


def test_flat_strip_flagged():
    fs = flat_strip_cylinder()
    assert fs.k1(0.3) == 0.0


def test_load_surface_errors():
    with pytest.raises(ChartError):
        load_surface({"type": "moebius"})
    with pytest.raises(ChartError):
        load_surface({})
    with pytest.raises(ChartError):
        load_surface({"type": "ellipsoid", "parameters": {"a": 3, "b": 2}})


def test_load_surface_types():
    for t in ("ellipsoid", "one_sheet", "two_sheet", "revolution_sin", "cylinder",
              "torus", "circular_cylinder", "elliptic_cylinder", "cone", "wavy_cone"):
        params = {"ellipsoid": {"a": 3, "b": 2, "c": 1},
                  "one_sheet": {"a": 3, "b": 2, "c": -1},
                  "two_sheet": {"a": 3, "b": -1, "c": -2}}.get(t, {})
        surf = load_surface({"type": t, "parameters": params})
        assert surf.name


def test_villarceau_circle_is_constant_angle_leaf(torus):
    """The classical bitangent-plane circles of the torus are leaves of the
    constant-angle foliation (cyclide property), checked against the exact
    circle of radius R centered at (0, rho, 0) in the plane z = x tan(xi)."""
    from darboux.flow import IntegratorParams, falpha_leaf
    R, rho = 2.0, 0.8
    xi = math.asin(rho / R)
    e2 = np.array([math.cos(xi), 0.0, math.sin(xi)])
    circle = lambda t: np.array([0.0, rho, 0.0]) + R * (np.cos(t) * np.array([0, 1, 0])
                                                        + np.sin(t) * e2)
    for t in np.linspace(0, 2 * math.pi, 17):
        x = circle(t)
        assert abs((math.hypot(x[0], x[1]) - R) ** 2 + x[2] ** 2 - rho ** 2) < 1e-12
    # the circle meets the inner band at t = pi: chart point (u=0, v=-pi/2)
    p = circle(math.pi)
    assert np.max(np.abs(p - torus.embedding(0.0, -math.pi / 2))) < 1e-12
    tang = np.array([-math.cos(xi), 0.0, -math.sin(xi)])
    _, xu, xv = torus.embedding_jet(0.0, -math.pi / 2)
    e1 = xu / np.linalg.norm(xu)
    eb = xv / np.linalg.norm(xv)
    alpha_star = math.atan2(float(tang @ eb), float(tang @ e1))
    leaf = falpha_leaf(torus, (0.0, -math.pi / 2), alpha_star,
                       params=IntegratorParams(max_arc_length=3.0, rel_tol=1e-12))
    # every traced point lies on the exact circle
    center = np.array([0.0, rho, 0.0])
    normal = np.array([-math.sin(xi), 0.0, math.cos(xi)])
    for ptx in leaf.positions[::40]:
        d = ptx - center
        assert abs(float(d @ normal)) < 1e-8
        assert abs(np.linalg.norm(d - normal * float(d @ normal)) - R) < 1e-8
