"""Five-dimensional Lorentz model of the space of oriented spheres.
A sphere of curvature k through a point x with unit normal nu lifts to
sigma = k * m(x) + n(x, nu) on the unit quadric of the form
L(y) = -y0^2 + y1^2 + ... + y4^2, where
    m(x)      = ((1 + |x|^2)/2, x, (|x|^2 - 1)/2)     light-like point lift
    n(x, nu)  = (<x, nu>, nu, <x, nu>)                unit space-like normal lift
A point y lies on the sphere of sigma iff L(m(y), sigma) = 0.  The family of
spheres tangent to a surface with curvature between the principal ones is
parametrized by sigma(u, v, a) = k_n(a) m + n; along a surface curve the
canonical tangent-sphere section has Lorentz speed |tau_g|, and its
acceleration-plus-position vector has no tangential component exactly on
Darboux curves.
"""
from __future__ import annotations
import math
import numpy as np
from .chart import frame_scalars
from .flow import Trajectory, _oracle_samples
from .quadrature import grid_derivative, partial_uv
_SIGN = np.array([-1.0, 1.0, 1.0, 1.0, 1.0])
LIGHT_TOL = 1e-12


def lorentz_form(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.einsum("...i,...i,i->...", x, x, _SIGN)) if x.ndim == 1 \
        else np.einsum("...i,...i,i->...", x, x, _SIGN)


def lorentz_product(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.einsum("...i,...i,i->...", x, y, _SIGN)
    return float(out) if out.ndim == 0 else out


def classify(x) -> str:
    x = np.asarray(x, dtype=float)
    q = lorentz_form(x)
    if abs(q) < LIGHT_TOL * float(x @ x):
        return "light-like"
    return "space-like" if q > 0 else "time-like"


def lift_point(x):
    """Light-cone lift of an ambient point (vectorized over leading axes)."""
    x = np.asarray(x, dtype=float)
    n2 = np.sum(x * x, axis=-1, keepdims=True)
    return np.concatenate([(1.0 + n2) / 2.0, x, (n2 - 1.0) / 2.0], axis=-1)


def lift_normal(x, nu, tol: float = 1e-8):
    """Unit space-like lift of a unit normal attached at x."""
    x = np.asarray(x, dtype=float)
    nu = np.asarray(nu, dtype=float)
    norms = np.sum(nu * nu, axis=-1)
    if np.any(np.abs(norms - 1.0) > tol):
        raise ValueError("normal vector is not unit length")
    d = np.sum(x * nu, axis=-1, keepdims=True)
    return np.concatenate([d, nu, d], axis=-1)


def sphere_lift(center, radius: float, orientation: int = 1):
    """Lift of the sphere |y - center| = radius with inward (+1) or outward (-1) normal."""
    center = np.asarray(center, dtype=float)
    k = orientation / radius
    p = center + np.array([radius, 0.0, 0.0])
    nu = np.array([-float(orientation), 0.0, 0.0])
    return k * lift_point(p) + lift_normal(p, nu)


def sphere_from_lift(sigma):
    """(curvature, center, radius) back from a unit-quadric lift.
    The signed curvature is sigma0 - sigma4; planes come out as curvature 0
    with center at infinity (None) and radius inf.
    """
    sigma = np.asarray(sigma, dtype=float)
    k = float(sigma[0] - sigma[4])
    if abs(k) < 1e-14:
        return 0.0, None, math.inf
    center = sigma[1:4] / k
    return k, center, 1.0 / abs(k)


def on_sphere_residual(y, sigma):
    """Zero iff the ambient point y lies on the sphere of sigma."""
    return lorentz_product(lift_point(y), sigma)


def sphere_angle(sigma1, sigma2) -> float:
    """Angle between two intersecting spheres = arccos of their Lorentz product."""
    s1 = np.asarray(sigma1, dtype=float)
    s2 = np.asarray(sigma2, dtype=float)
    if np.max(np.abs(s1 - s2)) < 1e-12 * max(1.0, float(np.max(np.abs(s1)))):
        return 0.0
    p = lorentz_product(s1, s2)
    if abs(p) >= 1.0:
        raise ValueError(f"spheres are tangent or nested (product {p:.6f}); no angle")
    return math.acos(p)


# ---------------------------------------------------------------------------
# tangent-sphere congruence of a surface


# ---------------------------------------------------------------------------


def tangent_sphere(surface, u, v, alpha):
    """Lift sigma(u, v, alpha) = k_n m + n of the tangent sphere at angle alpha."""
    x = surface.embedding(u, v)
    nu = surface.normal(u, v)
    k1 = np.asarray(surface.k1(u, v), dtype=float)
    k2 = np.asarray(surface.k2(u, v), dtype=float)
    kn = k1 * np.cos(alpha) ** 2 + k2 * np.sin(alpha) ** 2
    return np.asarray(kn)[..., None] * lift_point(x) + lift_normal(x, nu)


def tangent_sphere_jacobian(surface, u, v, alpha, h: float = 1e-5):
    cols = []
    for dim in range(3):
        def f(x, dim=dim):
            args = [u, v, alpha]
            args[dim] = args[dim] + x
            return tangent_sphere(surface, *args)
        d1 = (f(h) - f(-h)) / (2 * h)
        d2 = (f(h / 2) - f(-h / 2)) / h
        cols.append((4.0 * d2 - d1) / 3.0)
    return np.stack(cols, axis=-1)


def _svd_rank(J, rel_tol: float = 1e-8):
    sv = np.linalg.svd(J, compute_uv=False)
    return int(np.sum(sv > rel_tol * sv[0])), sv


def tangent_sphere_rank(surface, u, v, alpha, h: float = 1e-5):
    """Rank of the three-parameter sphere congruence map at (u, v, alpha)."""
    return _svd_rank(tangent_sphere_jacobian(surface, u, v, alpha, h))


def osculating_boundary_rank(surface, u, v, foliation: str = "P1", h: float = 1e-5):
    """Rank of the boundary sheet (alpha = 0 or pi/2) of the congruence.
    The sheet map is (u, v) -> k_i m + n; its differential loses a dimension
    exactly at ridge points of the corresponding foliation.
    """
    alpha = 0.0 if foliation == "P1" else 0.5 * math.pi
    def f(uu, vv):
        return tangent_sphere(surface, uu, vv, alpha)
    j_u = (f(u + h, v) - f(u - h, v)) / (2 * h)
    j_u2 = (f(u + h / 2, v) - f(u - h / 2, v)) / h
    j_v = (f(u, v + h) - f(u, v - h)) / (2 * h)
    j_v2 = (f(u, v + h / 2) - f(u, v - h / 2)) / h
    J = np.stack([(4 * j_u2 - j_u) / 3.0, (4 * j_v2 - j_v) / 3.0], axis=-1)
    return _svd_rank(J)


def sphere_surface_intersection_angles(surface, u, v, beta, h: float = 1e-4):
    """Tangent directions of (sphere of curvature k_n(beta)) meet the surface.
    Returns the two branch angles (radians, measured from P1) of the local
    intersection curve of the tangent sphere with the surface; they bracket
    the defining angle as +/- beta.
    """
    sigma = tangent_sphere(surface, u, v, beta)
    def f(uu, vv):
        return lorentz_product(lift_point(surface.embedding(uu, vv)), sigma)
    q11 = partial_uv(f, u, v, 2, 0, h)
    q22 = partial_uv(f, u, v, 0, 2, h)
    q12 = partial_uv(f, u, v, 1, 1, h)
    E = float(surface.E(u, v))
    G = float(surface.G(u, v))
    a = q22 / G
    b = q12 / math.sqrt(E * G)
    c = q11 / E
    disc = b * b - a * c
    if disc < 0:
        raise ValueError("no real intersection branches (center contact)")
    r = math.sqrt(disc)
    if abs(a) < 1e-14:
        angles = [0.5 * math.pi, math.atan(-c / (2 * b))] if abs(b) > 1e-14 else [0.5 * math.pi]
    else:
        angles = [math.atan((-b + r) / a), math.atan((-b - r) / a)]
    return sorted(angles)


# ---------------------------------------------------------------------------
# canonical tangent-sphere section along a curve


# ---------------------------------------------------------------------------


def canonical_section_analysis(surface, traj: Trajectory, tau_floor: float = 0.5,
                               min_segment: int = 48) -> dict:
    """Geometry of the canonical sphere section sigma(s) = k_n m + n along a curve.
    Reports the rotation-speed identity | |sigma'| - |tau_g| |, and on
    segments where tau_g is bounded away from zero, the tangential component
    of kvec = d^2 sigma/dzeta^2 + sigma (zeta the Lorentz arc length) together
    with L(kvec).  The tangential component vanishes exactly on Darboux
    curves; tau_g ~ 0 stretches are skipped (section speed degenerates).
    """
    t, u, v, al, c = _oracle_samples(traj)
    dt = float(t[1] - t[0])
    try:
        N = surface.normal(u, v)
        if np.ndim(N) != 2:
            raise TypeError
    except TypeError:
        N = np.array([surface.normal(float(a), float(b)) for a, b in zip(u, v)])
    k1 = np.asarray(surface.k1(u, v), dtype=float)
    k2 = np.asarray(surface.k2(u, v), dtype=float)
    ca, sa = np.cos(al), np.sin(al)
    kn = k1 * ca ** 2 + k2 * sa ** 2
    tau = (k2 - k1) * ca * sa
    m = lift_point(c)
    sigma = kn[:, None] * m + lift_normal(c, N)
    ds_dt = np.linalg.norm(grid_derivative(c, dt), axis=1)
    dsig_dt = grid_derivative(sigma, dt)
    qs = np.einsum("ij,ij,j->i", dsig_dt, dsig_dt, _SIGN)
    speed_L = np.sqrt(np.maximum(qs, 0.0)) / ds_dt
    interior = np.ones(len(t), dtype=bool)
    interior[:4] = interior[-4:] = False
    rot_mask = interior.copy()
    if traj.kind.startswith("darboux"):
        # the rescaled parametrization crawls at principal tangencies;
        # 0/0 speed ratios there are parametrization artifacts
        rot_mask &= np.abs(np.sin(al) * np.cos(al)) > 0.05
    # sqrt of the Lorentz quadratic has a kink where tau_g crosses zero;
    # finite differences cannot resolve the law right at the crossing
    rot_mask &= np.abs(tau) > 0.02 * (np.quantile(np.abs(tau), 0.9) + 1e-30)
    rot_residual = float(np.abs(speed_L - np.abs(tau))[rot_mask].max())
    tau_scale = float(np.quantile(np.abs(tau), 0.9)) + 1e-30
    good = (np.abs(tau) > tau_floor * tau_scale) & interior
    segments = _contiguous(good, min_segment)
    # second derivative with respect to Lorentz arc length zeta by the chain
    # rule on the uniform t grid: no resampling, so no interpolation noise
    zdot = np.sqrt(np.maximum(qs, 1e-300))
    zddot = grid_derivative(zdot, dt)
    d2sig = grid_derivative(sigma, dt, order=2)
    sig_zz = (d2sig - dsig_dt * (zddot / zdot)[:, None]) / (zdot ** 2)[:, None]
    kvec = sig_zz + sigma
    T = grid_derivative(m, dt) / ds_dt[:, None]
    tt = np.einsum("ij,ij,j->i", T, T, _SIGN)
    tcomp = np.einsum("ij,ij,j->i", kvec, T, _SIGN) / tt
    kform = np.einsum("ij,ij,j->i", kvec, kvec, _SIGN)
    t_comp_max = 0.0
    kvec_forms = []
    for lo, hi in segments:
        inner = slice(lo + 6, hi - 6)
        t_comp_max = max(t_comp_max, float(np.abs(tcomp[inner]).max()))
        kvec_forms.append(kform[inner])
    return {
        "rotation_speed_residual": rot_residual,
        "tangential_component": t_comp_max if segments else math.nan,
        "kvec_lorentz_form": np.concatenate(kvec_forms) if kvec_forms else np.array([]),
        "segments": len(segments),
    }


def _contiguous(mask, min_len):
    segs = []
    start = None
    for i, ok in enumerate(mask):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            if i - start >= min_len:
                segs.append((start, i))
            start = None
    if start is not None and len(mask) - start >= min_len:
        segs.append((start, len(mask)))
    return segs


def export_section_csv(surface, traj: Trajectory, path) -> None:
    """Write the canonical section along a trajectory: s, five lift components,
    and the unit-quadric monitor (which must sit at 1)."""
    from .serialize import write_csv

    c = traj.positions
    try:
        N = surface.normal(traj.u, traj.v)
        if np.ndim(N) != 2:
            raise TypeError
    except TypeError:
        N = np.array([surface.normal(float(a), float(b))
                      for a, b in zip(traj.u, traj.v)])
    k1 = np.asarray(surface.k1(traj.u, traj.v), dtype=float)
    k2 = np.asarray(surface.k2(traj.u, traj.v), dtype=float)
    kn = k1 * np.cos(traj.alpha) ** 2 + k2 * np.sin(traj.alpha) ** 2
    sigma = kn[:, None] * lift_point(c) + lift_normal(c, N)
    cols = {"s": traj.s}
    for i in range(5):
        cols[f"sigma{i}"] = sigma[:, i]
    cols["lorentz_form"] = np.einsum("ij,ij,j->i", sigma, sigma, _SIGN)
    write_csv(path, cols)


def fixed_curvature_section_speed(surface, traj: Trajectory, k_const: float):
    """Lorentz speed^2 of the constant-curvature section sigma_k = k m + n.
    Equals tau_g^2 + (k - k_n)^2 pointwise, so the canonical section (k = k_n)
    is the slowest one: the content of the minimal-length property.
    """
    t, u, v, al, c = _oracle_samples(traj)
    dt = float(t[1] - t[0])
    try:
        N = surface.normal(u, v)
        if np.ndim(N) != 2:
            raise TypeError
    except TypeError:
        N = np.array([surface.normal(float(a), float(b)) for a, b in zip(u, v)])
    sig = k_const * lift_point(c) + lift_normal(c, N)
    ds_dt = np.linalg.norm(grid_derivative(c, dt), axis=1)
    d = grid_derivative(sig, dt) / ds_dt[:, None]
    speed2 = np.einsum("ij,ij,j->i", d, d, _SIGN)
    k1 = np.asarray(surface.k1(u, v), dtype=float)
    k2 = np.asarray(surface.k2(u, v), dtype=float)
    ca, sa = np.cos(al), np.sin(al)
    kn = k1 * ca ** 2 + k2 * sa ** 2
    tau = (k2 - k1) * ca * sa
    predicted = tau ** 2 + (k_const - kn) ** 2
    sl = slice(4, -4)
    return speed2[sl], predicted[sl]
