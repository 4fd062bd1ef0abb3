"""Ridge location and classification, jet cross-checks, and phase portraits.

A ridge of the P1 foliation is a point where k1 is critical along its own
curvature line (the u-derivative of k1 vanishes); P2 ridges swap roles.  The
classification quantity is the metric-normalized second derivative

    sigma_1 = X1(X1(k1)) / (k1 - k2)   (= k1_uu / (E (k1 - k2)) at a ridge)

with sigma < 0 giving the zigzag behavior (recurrent cusps near the ridge,
elliptic linearization) and sigma > 0 beak-to-beak (hyperbolic, Darboux
curves cross the ridge tangent to the principal line).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .chart import UmbilicProximityError
from .flow import DarbouxState
from .lorentz import lift_normal, lift_point
from .quadrature import central_derivative

DEGENERACY_BAND = 1e-8


@dataclass
class RidgeRecord:
    u: float
    v: float
    foliation: str               # "P1" | "P2"
    sigma: float
    kind: str                    # "zigzag" | "beak_to_beak" | "degenerate"
    eigenvalues: tuple           # the nonzero pair of the normalized linearization

    def to_dict(self) -> dict:
        return {
            "u": self.u, "v": self.v, "foliation": self.foliation,
            "sigma": self.sigma, "kind": self.kind,
            "eigenvalues": [{"re": z.real, "im": z.imag} for z in self.eigenvalues],
        }


@dataclass
class RidgeScan:
    records: list
    status: str = "ok"           # "ok" | "identically_critical"
    critical_lines: int = 0


def _ridge_function(surface, foliation):
    if foliation == "P1":
        return lambda u, v: float(surface.dk1_du(u, v))
    return lambda u, v: float(surface.dk2_dv(u, v))


def classify_sigma(surface, u: float, v: float, foliation: str = "P1") -> RidgeRecord:
    """Classify a refined ridge point by the sign of sigma (degenerate band excluded)."""
    surface.require_non_umbilic(u, v)
    k1 = float(surface.k1(u, v))
    k2 = float(surface.k2(u, v))
    if foliation == "P1":
        sigma = float(surface.d2k1_du2(u, v)) / (float(surface.E(u, v)) * (k1 - k2))
    else:
        sigma = float(surface.d2k2_dv2(u, v)) / (float(surface.G(u, v)) * (k2 - k1))
    lam = np.sqrt(complex(sigma / 3.0))
    eigen = (lam, -lam)
    if abs(sigma) < DEGENERACY_BAND:
        kind = "degenerate"
    else:
        kind = "zigzag" if sigma < 0 else "beak_to_beak"
    return RidgeRecord(u, v, foliation, sigma, kind, eigen)


def graph_frame_product(surface, record: RidgeRecord) -> float:
    """The quartic-coefficient product used by the catalog classification proofs.

    In the normalized graph frame with vanishing mixed cubic term this equals
    (A - 3 k1^3)(k2 - k1); its sign is opposite to sigma's, so beak-to-beak
    ridges have a negative product.
    """
    k1 = float(surface.k1(record.u, record.v))
    k2 = float(surface.k2(record.u, record.v))
    return -record.sigma * (k1 - k2) ** 2


def ridge_locus_tangent(surface, record: RidgeRecord, h: float = 1e-5):
    """Chart tangent of the ridge curve; its P2-component is nonzero iff sigma != 0."""
    f = _ridge_function(surface, record.foliation)
    fu = central_derivative(lambda x: f(x, record.v), record.u, h)
    fv = central_derivative(lambda y: f(record.u, y), record.v, h)
    t = np.array([-fv, fu])
    n = np.linalg.norm(t)
    return t / n if n > 0 else t


def ridge_locus(surface, foliation: str = "P1", resolution: int = 16,
                window=None, refine_tol: float = 1e-12,
                flat_tol: float = 1e-11) -> RidgeScan:
    """Scan coordinate lines for sign changes of the ridge function and classify.

    For P1 the scan runs along u at fixed v (resolution scan lines, 8x finer
    sampling along the line), each bracketed root polished with Brent's
    method.  Lines on which the ridge function vanishes identically (canal
    surfaces scanned for P2, circular cylinders for P1) are counted and the
    scan is flagged "identically_critical" when every line is flat.
    """
    w = window or surface.scan_window()
    f = _ridge_function(surface, foliation)
    records = []
    flat = 0
    lines = 0
    if foliation == "P1":
        fixed_vals = np.linspace(w.v_min, w.v_max, resolution + 2)[1:-1]
        lo, hi = w.u_min, w.u_max
    else:
        fixed_vals = np.linspace(w.u_min, w.u_max, resolution + 2)[1:-1]
        lo, hi = w.v_min, w.v_max
    grid = np.linspace(lo, hi, 8 * resolution + 1)
    for c in fixed_vals:
        lines += 1
        if foliation == "P1":
            g = lambda x: f(x, float(c))
        else:
            g = lambda x: f(float(c), x)
        vals = np.array([g(float(x)) for x in grid])
        scale = float(np.max(np.abs(vals)))
        if scale < flat_tol:
            flat += 1
            continue
        sgn = np.sign(vals)
        roots = []
        # grid points landing exactly on a root (coordinate-plane folds hit
        # integer grid fractions) produce zero sign products: take them as is
        for i in np.nonzero(np.abs(vals) < 1e-14 * scale)[0]:
            if 0 < i < len(grid) - 1 and sgn[i - 1] * sgn[i + 1] < 0:
                roots.append(float(grid[i]))
        for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
            roots.append(brentq(g, float(grid[i]), float(grid[i + 1]), xtol=refine_tol))
        for root in roots:
            uu, vv = (root, float(c)) if foliation == "P1" else (float(c), root)
            try:
                records.append(classify_sigma(surface, uu, vv, foliation))
            except UmbilicProximityError:
                continue
    status = "identically_critical" if lines > 0 and flat == lines else "ok"
    return RidgeScan(records, status=status, critical_lines=flat)


# ---------------------------------------------------------------------------
# quartic graph jets
# ---------------------------------------------------------------------------

@dataclass
class GraphJet:
    """Coefficients of the quartic graph normal form over the tangent plane:

    h(u, v) = k1/2 u^2 + k2/2 v^2 + a/6 u^3 + d/2 u^2 v + b/2 u v^2 + c/6 v^3
              + A/24 u^4 + B/6 u^3 v + C/4 u^2 v^2 + D/6 u v^3 + E/24 v^4 + ...
    """
    k1: float
    k2: float
    a: float
    b: float
    c: float
    d: float
    A: float
    B: float
    C: float
    D: float
    E: float


def jet_classify(jet: GraphJet, ridge_tol: float = 1e-12) -> dict:
    """Ridge flags and sigma values read directly off a graph jet.

    sigma1/sigma2 are the graph-frame quantities (second derivative of the
    curvature along the straight tangent axes).  The *_invariant values add
    the d^2 (resp. b^2) correction that accounts for the bending of the
    curvature line away from the tangent axis; these equal the sigma of a
    principal chart and coincide with the plain values whenever the mixed
    cubic coefficient vanishes (mirror-symmetric ridge points).
    """
    if jet.k1 == jet.k2:
        raise ValueError("umbilic jet: classification undefined")
    d12 = jet.k1 - jet.k2
    sigma1 = (jet.A - 3.0 * jet.k1 ** 3) / d12 + 2.0 * jet.d ** 2 / d12 ** 2
    sigma2 = (jet.E - 3.0 * jet.k2 ** 3) / (-d12) + 2.0 * jet.b ** 2 / d12 ** 2
    return {
        "is_ridge_P1": abs(jet.a) < ridge_tol,
        "sigma1": sigma1,
        "sigma1_invariant": sigma1 + jet.d ** 2 / d12 ** 2,
        "is_ridge_P2": abs(jet.c) < ridge_tol,
        "sigma2": sigma2,
        "sigma2_invariant": sigma2 + jet.b ** 2 / d12 ** 2,
    }


def jet_from_surface(surface, u: float, v: float, scale: float | None = None,
                     half_width: int = 5, fit_degree: int = 8) -> GraphJet:
    """Quartic jet of the surface as a graph over its tangent plane at (u, v).

    Chart points around (u, v) are projected onto the principal frame
    (e1, e2, N) and a bivariate polynomial of ``fit_degree`` is fitted by
    least squares; the extra degrees absorb the higher-order terms so the
    quartic coefficients converge as the stencil shrinks.
    """
    x0, xu, xv = surface.embedding_jet(u, v)
    E = float(surface.E(u, v))
    G = float(surface.G(u, v))
    e1 = xu / math.sqrt(E)
    e2 = xv / math.sqrt(G)
    N = surface.normal(u, v)
    if scale is None:
        kmax = max(abs(float(surface.k1(u, v))), abs(float(surface.k2(u, v))), 0.2)
        scale = 0.08 / kmax
    du = scale / math.sqrt(E)
    dv = scale / math.sqrt(G)
    pts = []
    for i in range(-half_width, half_width + 1):
        for j in range(-half_width, half_width + 1):
            p = surface.embedding(u + i * du / half_width, v + j * dv / half_width)
            q = p - x0
            pts.append((q @ e1, q @ e2, q @ N))
    pts = np.array(pts)
    xi, eta, zeta = pts[:, 0] / scale, pts[:, 1] / scale, pts[:, 2] / scale
    terms = [(p, q) for p in range(fit_degree + 1) for q in range(fit_degree + 1 - p)]
    M = np.stack([xi ** p * eta ** q for p, q in terms], axis=1)
    coef, *_ = np.linalg.lstsq(M, zeta, rcond=None)
    c = {pq: coef[i] * scale ** (1 - pq[0] - pq[1]) for i, pq in enumerate(terms)}
    return GraphJet(
        k1=2 * c[(2, 0)], k2=2 * c[(0, 2)],
        a=6 * c[(3, 0)], d=2 * c[(2, 1)], b=2 * c[(1, 2)], c=6 * c[(0, 3)],
        A=24 * c[(4, 0)], B=6 * c[(3, 1)], C=4 * c[(2, 2)], D=6 * c[(1, 3)],
        E=24 * c[(0, 4)],
    )


# ---------------------------------------------------------------------------
# equilibrium spectrum and phase portraits
# ---------------------------------------------------------------------------

def equilibrium_eigenvalues(surface, record: RidgeRecord, h: float = 1e-6):
    """Numeric spectrum of the rescaled Darboux field linearized at the ridge.

    The equilibrium sits at (u, v, 0) for P1 ridges, (u, v, pi/2) for P2.
    Eigen-type (real vs imaginary nonzero pair) matches sign(sigma); the
    magnitudes carry the chart/time normalization of the rescaled field.
    """
    from .flow import darboux_field_desingularized

    alpha0 = 0.0 if record.foliation == "P1" else 0.5 * math.pi
    y0 = np.array([record.u, record.v, alpha0])

    def F(y):
        return np.array(darboux_field_desingularized(
            surface, DarbouxState(y[0], y[1], y[2])))

    J = np.zeros((3, 3))
    for j in range(3):
        dy = np.zeros(3)
        dy[j] = h
        J[:, j] = (F(y0 + dy) - F(y0 - dy)) / (2 * h)
    lam = np.linalg.eigvals(J)
    order = np.argsort(np.abs(lam))
    return lam[order]     # ~0 first, then the +/- pair


@dataclass
class PortraitResult:
    kind: str                   # detector verdict
    n_orbits: int
    alternating_orbits: int     # orbits with consecutive cusps on both sides
    crossing_orbits: int        # orbits crossing the ridge transversally
    max_cusps: int
    trajectories: list


def ridge_phase_portrait(surface, record: RidgeRecord, n_orbits: int = 10,
                         width: float | None = None) -> PortraitResult:
    """Classify a ridge from orbit behavior alone (no derivative information).

    A fan of Darboux orbits is launched near the ridge and its principal
    tangency events (cusps of the projection) are collected.  An orbit whose
    consecutive cusps land on opposite sides of the ridge curve is circling
    it: zigzag.  If instead cusps stay one-sided per orbit and orbits cross
    the ridge transversally, the local structure is hyperbolic: beak-to-beak.
    """
    fol = record.foliation
    alpha0 = 0.0 if fol == "P1" else 0.5 * math.pi
    f_ridge = _ridge_function(surface, fol)
    if width is None:
        w = surface.scan_window()
        width = 0.03 * ((w.u_max - w.u_min) if fol == "P1" else (w.v_max - w.v_min))
    # time scale of the linearized pair
    lam_mag = math.sqrt(abs(record.sigma) / 3.0)
    k1 = float(surface.k1(record.u, record.v))
    k2 = float(surface.k2(record.u, record.v))
    # rescaled-field eigenvalue magnitude: sqrt(3|k1-k2| |X^2 k|)
    lam_sigma = math.sqrt(abs(3.0 * (k1 - k2) ** 2 * record.sigma)) + 1e-12
    T = 14.0 * math.pi / lam_sigma

    def rhs(t, y):
        isE, isG, kk1, kk2, dk1, dk2 = surface.flow_terms(y[0], y[1])
        ca, sa = math.cos(y[2]), math.sin(y[2])
        ww = 3.0 * (kk1 - kk2) * sa * ca
        return (ww * ca * isE, ww * sa * isG, dk1 * ca ** 3 * isE + dk2 * sa ** 3 * isG)

    def ev_cusp(t, y):
        return math.sin(y[2]) if fol == "P1" else math.cos(y[2])

    def ev_cross(t, y):
        return f_ridge(y[0], y[1])

    def ev_out(t, y):
        off = (y[0] - record.u) if fol == "P1" else (y[1] - record.v)
        return abs(off) - 3.0 * width
    ev_out.terminal = True

    offsets = np.linspace(-width, width, n_orbits)
    offsets = offsets[np.abs(offsets) > 0.05 * width]
    # cusp generators probe the trapping structure; angled launches probe for
    # transversal ridge crossings (the hyperbolic sectors of a beak ridge)
    fan = [(d, 0.0) for d in offsets]
    for d in (-0.5 * width, 0.5 * width):
        for a in (0.05, 0.15, 0.45):
            fan.append((d, a))
            fan.append((d, -a))
    alternating = 0
    crossing = 0
    max_cusps = 0
    orbits = []
    for d, da in fan:
        if fol == "P1":
            y0 = (record.u + d, record.v, alpha0 + da)
        else:
            y0 = (record.u, record.v + d, alpha0 + da)
        sides_all = []
        crossed = False
        for sgn in (1.0, -1.0):
            sol = solve_ivp(lambda t, y: tuple(sgn * np.array(rhs(t, y))), (0.0, T), y0,
                            method="RK45", rtol=1e-10, atol=1e-12,
                            events=[ev_cusp, ev_cross, ev_out], dense_output=False)
            sides = []
            for ye in sol.y_events[0]:
                val = f_ridge(ye[0], ye[1])
                if abs(val) > 1e-9:
                    sides.append(1 if val > 0 else -1)
            # transversal crossings: ridge function flips while far from tangency
            for ye in sol.y_events[1]:
                tang = math.sin(ye[2]) if fol == "P1" else math.cos(ye[2])
                if abs(tang) > 0.05:
                    crossed = True
            sides_all.extend(sides if sgn > 0 else sides[::-1])
            orbits.append(sol)
        max_cusps = max(max_cusps, len(sides_all))
        if any(s1 * s2 < 0 for s1, s2 in zip(sides_all, sides_all[1:])):
            alternating += 1
        if crossed:
            crossing += 1
    if alternating >= 2:
        kind = "zigzag"
    elif crossing > 0:
        kind = "beak_to_beak"
    else:
        kind = "inconclusive"
    return PortraitResult(kind, len(fan), alternating, crossing, max_cusps, orbits)


# ---------------------------------------------------------------------------
# vertex correspondence on revolution surfaces
# ---------------------------------------------------------------------------

def revolution_vertex_function(surface, u: float, h: float = 1e-5) -> float:
    """Stationarity function of the meridian osculating-circle lifts.

    The meridian's osculating circles trace a curve k(u) m(u) + n(u) in the
    sphere-lift space whose velocity is k'(u) m(u); its first component
    vanishes exactly at vertices of the meridian, which are the surface's
    ridges.  Evaluated by finite differences of the lift, independently of
    the chart ridge function.
    """
    def lift0(x):
        c = surface.embedding(x, 0.0)
        nu = surface.normal(x, 0.0)
        k = float(surface.k1(x, 0.0))
        return float(k * lift_point(c)[0] + lift_normal(c, nu)[0])

    return central_derivative(lift0, u, h)


def revolution_vertex_roots(surface, u_lo: float, u_hi: float, n: int = 400) -> list[float]:
    grid = np.linspace(u_lo, u_hi, n)
    vals = np.array([revolution_vertex_function(surface, float(x)) for x in grid])
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        roots.append(brentq(lambda x: revolution_vertex_function(surface, x),
                            float(grid[i]), float(grid[i + 1]), xtol=1e-12))
    return roots
