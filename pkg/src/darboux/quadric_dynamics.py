"""Global structure of Darboux curves on quadrics: level sets of the confocal
integral, rectifying quadratures, rotation numbers and circular sections.

On a quadric the Darboux curves at level lambda = 1/(cos^2 a / u + sin^2 a / v)
solve the implicit equation (v - lambda) H(u) v'^2 = (u - lambda) H(v) u'^2
with H(x) = (x - a)(x - b)(x - c).  The substitutions
sigma_1' = sqrt(|u - lambda| / |H(u)|), sigma_2' = sqrt(|v - lambda| / |H(v)|)
straighten them to slope +/-1 lines on a flat rectangle whose side lengths
L1, L2 are singular-endpoint quadratures; the rotation number of the induced
return dynamics is L2/L1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .flow import DarbouxState, IntegratorParams, Trajectory, integrate
from .quadrature import integrate_sqrt_endpoints
from .quadrics import QuadricAngleChart, QuadricChart, QuadricSpec

ANGLE_TOL = 1e-10


def _spec_of(surface) -> QuadricSpec:
    if isinstance(surface, (QuadricChart, QuadricAngleChart)):
        return surface.spec
    raise TypeError("operation requires a quadric chart")


# ---------------------------------------------------------------------------
# implicit direction field at fixed level
# ---------------------------------------------------------------------------

def implicit_directions(surface, u: float, v: float, lam: float) -> list[dict]:
    """Chart directions [du : dv] of the level-lambda Darboux field at (u, v).

    Returns zero or two direction records (mirror pair), each carrying the
    unit-speed chart components, the angle from P1, and the normal curvature,
    which must equal (1/lambda) sqrt(abc/(uv)).
    """
    spec = _spec_of(surface)
    if hasattr(surface, "classic_uv"):
        u, v = (float(x) for x in surface.classic_uv(u, v))
    if abs(u - lam) < 1e-14 or abs(v - lam) < 1e-14:
        raise ValueError("level parameter coincides with a coordinate: principal degeneration")
    Hu, Hv = spec.H(u), spec.H(v)
    ratio = (u - lam) * Hv / ((v - lam) * Hu)   # (dv/du)^2
    if ratio < 0:
        return []
    E = (v - u) * u / (4.0 * Hu)
    G = (u - v) * v / (4.0 * Hv)
    kn_expected = (1.0 / lam) * math.sqrt(spec.a * spec.b * spec.c / (u * v))
    out = []
    for sign in (1.0, -1.0):
        du, dv = 1.0, sign * math.sqrt(ratio)
        norm = math.sqrt(E * du * du + G * dv * dv)
        du, dv = du / norm, dv / norm
        e = E * (1.0 / u) * math.sqrt(spec.a * spec.b * spec.c / (u * v))
        g = G * (1.0 / v) * math.sqrt(spec.a * spec.b * spec.c / (u * v))
        kn = e * du * du + g * dv * dv
        alpha = math.atan2(math.sqrt(G) * dv, math.sqrt(E) * du)
        out.append({"du": du, "dv": dv, "alpha": alpha, "k_n": kn,
                    "k_n_expected": kn_expected})
    return out


def angle_from_level(surface, u: float, v: float, lam: float) -> float:
    """Recover |alpha| on the level set: cos^2 a = u (v - lambda) / (lambda (v - u))."""
    if hasattr(surface, "classic_uv"):
        u, v = (float(x) for x in surface.classic_uv(u, v))
    c2 = u * (v - lam) / (lam * (v - u))
    if not -1e-12 <= c2 <= 1.0 + 1e-12:
        raise ValueError(f"level {lam} not attainable at ({u}, {v})")
    return math.acos(math.sqrt(min(max(c2, 0.0), 1.0)))


# ---------------------------------------------------------------------------
# regimes
# ---------------------------------------------------------------------------

@dataclass
class LambdaRegime:
    kind: str
    lam: float
    case: str              # short case id
    label: str
    bounded: bool
    u_band: tuple | None = None
    v_band: tuple | None = None
    cusp_axis: str | None = None   # coordinate whose band is cut by lambda
    notes: str = ""


def regime_classify(surface, lam: float) -> LambdaRegime:
    """Map a level parameter to its qualitative regime for this quadric kind."""
    spec = _spec_of(surface)
    a, b, c = spec.a, spec.b, spec.c
    k = spec.kind
    if k == "ellipsoid":
        if lam < c or lam > a:
            return LambdaRegime(k, lam, "none", "no real Darboux directions", False)
        if abs(lam - c) < 1e-12 or abs(lam - a) < 1e-12:
            which = "z = 0" if abs(lam - c) < 1e-12 else "x = 0"
            return LambdaRegime(k, lam, "boundary",
                                f"degenerate: level collapses onto the {which} principal section",
                                True)
        if lam < b:
            return LambdaRegime(k, lam, "i", "bounded band below the umbilic section",
                                True, (b, a), (c, lam), cusp_axis="v")
        if lam == b:
            return LambdaRegime(k, lam, "circular",
                                "circular sections in planes parallel to the umbilic tangent planes",
                                True, (b, a), (c, b))
        return LambdaRegime(k, lam, "iii", "bounded band beyond the umbilic section",
                            True, (lam, a), (c, b), cusp_axis="u")
    if k == "two_sheet":
        if lam < c:
            return LambdaRegime(k, lam, "i", "unbounded curves, v below the level", False,
                                (c, b), (-math.inf, lam), cusp_axis="v")
        if abs(lam - c) < 1e-12:
            return LambdaRegime(k, lam, "circular", "circular sections of the sheet", False)
        if lam < b:
            return LambdaRegime(k, lam, "iii", "unbounded curves in a bounded u-band", False,
                                (lam, b), (-math.inf, c), cusp_axis="u")
        return LambdaRegime(k, lam, "none", "no real Darboux directions", False)
    # one-sheet
    if lam < c:
        return LambdaRegime(k, lam, "i", "bounded band in v", True,
                            (b, a), (lam, c), cusp_axis="v")
    if abs(lam - c) < 1e-12 or abs(lam - a) < 1e-12:
        return LambdaRegime(k, lam, "boundary",
                            "boundary level (nominally ruled); see ruled_line_check", False,
                            notes="the ruled-line property fails numerically: k_n != 0")
    if lam <= b:
        return LambdaRegime(k, lam, "none", "no real Darboux directions", False)
    if lam < a:
        return LambdaRegime(k, lam, "ii", "unbounded curves in a bounded u-band", False,
                            (b, lam), (-math.inf, c), cusp_axis="u")
    return LambdaRegime(k, lam, "iv", "all Darboux curves regular unbounded helices", False,
                        (b, a), (-math.inf, c))


def ruled_line_check(surface, lam: float, n: int = 24) -> dict:
    """Max |k_n| along the level-lambda directions (zero iff solutions are straight).

    Used for the boundary levels of the one-sheet hyperboloid where straight
    rulings are nominally expected; the check records the actual values.
    """
    spec = _spec_of(surface)
    (u0, u1), (v0, v1) = spec.u_range, spec.v_range
    if not math.isfinite(v0):
        v0 = v1 - 2.0 * (u1 - u0)
    kn_max, n_real = 0.0, 0
    for uu in np.linspace(u0, u1, n + 2)[1:-1]:
        for vv in np.linspace(v0, v1, n + 2)[1:-1]:
            dirs = implicit_directions(surface, float(uu), float(vv), lam)
            if dirs:
                n_real += 1
                kn_max = max(kn_max, abs(dirs[0]["k_n"]))
    return {"lam": lam, "max_abs_kn": kn_max, "real_fraction": n_real / (n * n),
            "is_ruled": kn_max < 1e-10}


# ---------------------------------------------------------------------------
# rectifying quadratures and rotation numbers
# ---------------------------------------------------------------------------

@dataclass
class RotationData:
    L1: float
    L2: float
    rho: float
    lam: float | None = None
    alpha: float | None = None
    meta: dict = field(default_factory=dict)


def _sigma_integrand(spec, lam):
    def f(x):
        return math.sqrt(abs(x - lam) / abs(spec.H(x)))
    return f


def _sigma_reduced(spec, lam, end):
    """f(x) sqrt(|x - end|) with the vanishing factor divided out analytically.

    ``end`` is either a root of H (inverse-square-root endpoint) or the level
    lam itself (square-root zero); both lose no precision this way.
    """
    roots = (spec.a, spec.b, spec.c)
    cancel = [r for r in roots if abs(end - r) < 1e-12]
    if cancel:
        others = [r for r in roots if abs(end - r) >= 1e-12]

        def fr(x):
            den = abs((x - others[0]) * (x - others[1]))
            return math.sqrt(abs(x - lam) / den)
        return fr

    def fr(x):
        return abs(x - lam) / math.sqrt(abs(spec.H(x)))
    return fr


def sigma_antiderivative(surface, lam: float, axis: str, x: float,
                         tol: float = 1e-12) -> float:
    """Rectifying coordinate: integral of sqrt(|t - lam| / |H(t)|) from the band start."""
    spec = _spec_of(surface)
    reg = regime_classify(surface, lam)
    band = reg.u_band if axis == "u" else reg.v_band
    f = _sigma_integrand(spec, lam)
    lo = band[0]
    if x <= lo:
        return 0.0
    return integrate_sqrt_endpoints(f, lo, x, singular_left=True,
                                    singular_right=False, tol=tol,
                                    reduced_left=_sigma_reduced(spec, lam, lo))


def sigma_lengths(surface, lam: float, tol: float = 1e-12) -> RotationData:
    """Side lengths of the rectified rectangle and their ratio rho = L2/L1.

    Singular inverse-square-root endpoints (simple roots of H) are handled by
    the t^2 substitution; unbounded bands give an infinite length and the
    regime is flagged accordingly.
    """
    spec = _spec_of(surface)
    reg = regime_classify(surface, lam)
    if reg.u_band is None or reg.v_band is None:
        raise ValueError(f"regime {reg.case} has no rectifying band")
    f = _sigma_integrand(spec, lam)
    out = []
    for band in (reg.u_band, reg.v_band):
        lo, hi = band
        if not (math.isfinite(lo) and math.isfinite(hi)):
            out.append(math.inf)
            continue
        # both ends take the t^2 substitution (inverse-square-root at roots
        # of H, square-root zero at the level), with reduced integrands so no
        # precision is lost next to the endpoints
        out.append(integrate_sqrt_endpoints(
            f, lo, hi, True, True, tol=tol,
            reduced_left=_sigma_reduced(spec, lam, lo),
            reduced_right=_sigma_reduced(spec, lam, hi)))
    L1, L2 = out
    rho = L2 / L1 if math.isfinite(L1) and math.isfinite(L2) else math.inf
    return RotationData(L1, L2, rho, lam=lam, meta={"case": reg.case, "bounded": reg.bounded})


def falpha_rotation(surface, alpha: float, tol: float = 1e-12) -> RotationData:
    """Rotation data of the constant-angle foliation on a triaxial ellipsoid.

    s1 = 2 sin(a) * Int_c^b sqrt(v/|H(v)|) dv  (arc between umbilics across
    the short way), s2 = 2 cos(a) * Int_b^a sqrt(u/|H(u)|) du, rho = s2/s1.
    rho(a) tan(a) is independent of a.
    """
    spec = _spec_of(surface)
    if spec.kind != "ellipsoid":
        raise ValueError("constant-angle rotation data is defined on the ellipsoid")
    if not 0.0 < alpha < 0.5 * math.pi:
        raise ValueError("alpha must lie strictly between 0 and pi/2")
    a, b, c = spec.a, spec.b, spec.c

    def f(x):
        return math.sqrt(abs(x) / abs(spec.H(x)))

    Lu = integrate_sqrt_endpoints(f, b, a, True, True, tol,
                                  reduced_left=_sigma_reduced(spec, 0.0, b),
                                  reduced_right=_sigma_reduced(spec, 0.0, a))
    Lv = integrate_sqrt_endpoints(f, c, b, True, True, tol,
                                  reduced_left=_sigma_reduced(spec, 0.0, c),
                                  reduced_right=_sigma_reduced(spec, 0.0, b))
    s1 = 2.0 * math.sin(alpha) * Lv
    s2 = 2.0 * math.cos(alpha) * Lu
    return RotationData(Lu, Lv, s2 / s1, alpha=alpha,
                        meta={"s1": s1, "s2": s2, "rho_tan_alpha": (s2 / s1) * math.tan(alpha)})


# ---------------------------------------------------------------------------
# Poincare map / empirical rotation number
# ---------------------------------------------------------------------------

def level_state(surface: QuadricAngleChart, lam: float, frac_u: float = 0.5,
                frac_v: float = 0.37) -> DarbouxState:
    """A start state on the level set, placed by band fractions."""
    reg = regime_classify(surface, lam)
    if reg.u_band is None:
        raise ValueError(f"regime {reg.case} has no band to start in")
    u = reg.u_band[0] + frac_u * (reg.u_band[1] - reg.u_band[0])
    vb = reg.v_band
    v = (vb[0] + frac_v * (vb[1] - vb[0])) if math.isfinite(vb[0]) \
        else vb[1] - 1.0 - frac_v
    c2 = u * (v - lam) / (lam * (v - u))
    if not 0.0 <= c2 <= 1.0:
        raise ValueError(f"level {lam} not attainable at the chosen start")
    al = math.acos(math.sqrt(c2))
    # place in angle-chart coordinates (base tile)
    p = math.acos(min(max((surface.um - u) / surface.uh, -1.0), 1.0))
    if surface.v_is_angle:
        q = math.acos(min(max((surface.vm - v) / surface.vh, -1.0), 1.0))
    else:
        q = math.sqrt(surface.spec.c - v)
    return DarbouxState(p, q, al)


def poincare_map(surface: QuadricAngleChart, lam: float, n_iterates: int = 50,
                 params: IntegratorParams | None = None,
                 start: DarbouxState | None = None) -> dict:
    """Trace the level-lambda Darboux flow and extract its rotation number.

    The trajectory's turning events split it into monotone sweeps of the
    rectifying phases; each full sweep advances sigma_i by exactly L_i, so
    counting sweeps plus quadrature of the partial end sweeps measures the
    phase advance ratio directly.  Crossings of the section u = band midpoint
    are recorded as the return-map data, and a periodicity verdict is issued
    when a crossing revisits the start within 1e-6.
    """
    reg = regime_classify(surface, lam)
    if not reg.bounded:
        raise ValueError(f"rotation number requires a bounded regime, got {reg.case}")
    rd = sigma_lengths(surface, lam)
    if start is None:
        start = level_state(surface, lam)
    params = params or IntegratorParams(rel_tol=1e-11, abs_tol=1e-13)
    return _rotation_from_trajectory(surface, lam, reg, rd, start, params, n_iterates)


def _rotation_from_trajectory(surface, lam, reg, rd, start, params, n_iterates):
    spec = surface.spec
    L1, L2 = rd.L1, rd.L2
    u_sec = 0.5 * (reg.u_band[0] + reg.u_band[1])

    def rhs(t, y):
        isE, isG, k1, k2, dk1, dk2 = surface.flow_terms(y[0], y[1])
        ca, sa = math.cos(y[2]), math.sin(y[2])
        w = 3.0 * (k1 - k2) * sa * ca
        return (w * ca * isE, w * sa * isG, dk1 * ca ** 3 * isE + dk2 * sa ** 3 * isG)

    # events: u-turnings (cusps or u-folds), v-turnings, section crossings
    cusp_is_u = reg.cusp_axis == "u"

    def ev_u_turn(t, y):
        return math.sin(y[2]) * math.sin(y[0]) if cusp_is_u else math.sin(y[0])

    def ev_v_turn(t, y):
        vq = math.sin(y[1]) if surface.v_is_angle else y[1]
        return vq * math.cos(y[2]) if not cusp_is_u else vq

    def ev_sec(t, y):
        return float(surface.u_of(y[0])) - u_sec

    # sigma-time budget: measure one full u-cycle with a short probe that
    # doubles its horizon until three u-turning events have occurred
    T_probe, period = 2.0, None
    for _ in range(16):
        probe = solve_ivp(rhs, (0.0, T_probe), (start.u, start.v, start.alpha),
                          method="RK45", rtol=1e-8, atol=1e-10, events=[ev_u_turn])
        if len(probe.t_events[0]) >= 3:
            period = float(probe.t_events[0][2] - probe.t_events[0][0])
            break
        T_probe *= 2.0
    if period is None:
        raise ValueError("could not estimate the level-cycle period")
    T = 1.1 * (n_iterates + 2) * period

    sol = solve_ivp(rhs, (0.0, T), (start.u, start.v, start.alpha), method="RK45",
                    rtol=params.rel_tol, atol=params.abs_tol,
                    events=[ev_u_turn, ev_v_turn, ev_sec], dense_output=True)
    t_u = list(sol.t_events[0])
    t_v = list(sol.t_events[1])
    t_s = list(sol.t_events[2])
    y_s = list(sol.y_events[2])
    # unfolded phase advance along each axis: full sweeps between turnings
    # advance exactly L_i; partial head/tail sweeps measured by quadrature
    th1 = _unfolded_advance(surface, lam, reg, sol, t_u, axis="u", L=L1)
    th2 = _unfolded_advance(surface, lam, reg, sol, t_v, axis="v", L=L2)
    rho_emp = (th1 / (2.0 * L1)) / (th2 / (2.0 * L2)) if th2 > 0 else math.inf
    crossings = []
    for i, (te, ye) in enumerate(zip(t_s, y_s)):
        pos = surface.embedding(float(ye[0]), float(ye[1]))
        vel = np.array(rhs(te, ye))
        _, xu, xv = surface.embedding_jet(float(ye[0]), float(ye[1]))
        tangent = vel[0] * xu + vel[1] * xv
        nt = np.linalg.norm(tangent)
        crossings.append({"iterate": i, "t": float(te),
                          "v": float(surface.v_of(float(ye[1]))), "q": float(ye[1]),
                          "alpha": float(ye[2]), "position": pos,
                          "tangent": tangent / nt if nt > 0 else tangent})
    periodic = None
    if len(crossings) > 2:
        x0 = crossings[0]["position"]
        t0 = crossings[0]["tangent"]
        for cr in crossings[1:]:
            if (np.linalg.norm(cr["position"] - x0) < 1e-6
                    and np.linalg.norm(cr["tangent"] - t0) < 1e-4):
                periodic = cr["iterate"]
                break
    return {"rho_empirical": rho_emp, "rho_quadrature": rd.rho,
            "L1": L1, "L2": L2, "lam": lam,
            "u_turnings": len(t_u), "v_turnings": len(t_v),
            "crossings": crossings, "periodic_after": periodic,
            "rho_event_ratio": len(t_u) / len(t_v) if t_v else math.inf}


def sigma_phase(surface, lam, reg, coord, axis: str, L: float) -> float:
    """sigma_i value of an angle-chart coordinate within its band.

    Measured from the nearer band end (the far end may be a singular root of
    H, where the plain integrand cannot be evaluated).
    """
    spec = surface.spec
    if axis == "u":
        x = float(surface.u_of(coord))
        band = reg.u_band
    else:
        x = float(surface.v_of(coord))
        band = reg.v_band
    x = min(max(x, band[0]), band[1])
    f = _sigma_integrand(spec, lam)
    if x - band[0] <= band[1] - x:
        return integrate_sqrt_endpoints(f, band[0], x, singular_left=True,
                                        singular_right=False, tol=1e-11,
                                        reduced_left=_sigma_reduced(spec, lam, band[0]))
    return L - integrate_sqrt_endpoints(f, x, band[1], singular_left=False,
                                        singular_right=True, tol=1e-11,
                                        reduced_right=_sigma_reduced(spec, lam, band[1]))


def _unfolded_advance(surface, lam, reg, sol, t_events, axis, L):
    """Total |d sigma_i| along the solution: full inter-event sweeps are
    exactly L; partial head/tail sweeps are measured by quadrature."""
    t0, t1 = sol.t[0], sol.t[-1]
    idx = 0 if axis == "u" else 1
    band = (reg.u_band if axis == "u" else reg.v_band)
    coord_of = surface.u_of if axis == "u" else surface.v_of

    def phase(t):
        return sigma_phase(surface, lam, reg, float(sol.sol(t)[idx]), axis, L)

    def event_phase(t):
        x = float(coord_of(float(sol.sol(t)[idx])))
        return 0.0 if abs(x - band[0]) < abs(x - band[1]) else L

    if not t_events:
        return abs(phase(t1) - phase(t0))
    head = abs(event_phase(t_events[0]) - phase(t0))
    tail = abs(phase(t1) - event_phase(t_events[-1]))
    return head + (len(t_events) - 1) * L + tail


# ---------------------------------------------------------------------------
# circular sections at the umbilic level
# ---------------------------------------------------------------------------

def circular_sections_check(surface: QuadricAngleChart, n_curves: int = 5,
                            arc: float = 16.0, rel_tol: float = 1e-11) -> list[dict]:
    """Integrate the umbilic-level direction field and test that solutions are
    planar circles in planes parallel to the umbilic tangent planes.

    At lambda = b the level equation factorizes across the umbilic section
    and extends smoothly to the whole double-angle chart as

        dp/dt = sqrt((u - c)(b - c)) cos(q/2)
        dq/dt = +/- sqrt((a - v)(a - b)) sin(p/2).
    """
    spec = surface.spec
    if spec.kind != "ellipsoid":
        raise ValueError("circular sections at the umbilic level require an ellipsoid")
    a, b, c = spec.a, spec.b, spec.c

    def rhs(t, y, sgn=1.0):
        u = float(surface.u_of(y[0]))
        v = float(surface.v_of(y[1]))
        dp = math.sqrt((u - c) * (b - c)) * math.cos(y[1] / 2.0)
        dq = sgn * math.sqrt((a - v) * (a - b)) * math.sin(y[0] / 2.0)
        # normalize to unit ambient speed for the arc budget
        E = float(surface.E(y[0], y[1]))
        G = float(surface.G(y[0], y[1]))
        sp = math.sqrt(E * dp * dp + G * dq * dq)
        return (dp / sp, dq / sp)

    umb = spec.umbilic_points()
    n_umb = np.array([umb[0][0] / a, 0.0, umb[0][2] / c])
    n_umb /= np.linalg.norm(n_umb)
    reports = []
    rng_p = np.linspace(0.6, math.pi - 0.6, n_curves)
    for i, p0 in enumerate(rng_p):
        sgn = 1.0 if i % 2 == 0 else -1.0
        sol = solve_ivp(lambda t, y: rhs(t, y, sgn), (0.0, arc), (float(p0), 0.9),
                        method="DOP853", rtol=rel_tol, atol=1e-13, dense_output=True)
        ts = np.linspace(0.0, sol.t[-1], 800)
        Y = sol.sol(ts)
        pts = surface.embedding(Y[0], Y[1])
        centroid = pts.mean(axis=0)
        Q = pts - centroid
        _, sv, Vt = np.linalg.svd(Q, full_matrices=False)
        normal = Vt[2]
        planarity = float(np.abs(Q @ normal).max())
        # in-plane circle fit
        e1, e2 = Vt[0], Vt[1]
        xy = np.stack([Q @ e1, Q @ e2], axis=1)
        A_ = np.concatenate([2.0 * xy, np.ones((len(xy), 1))], axis=1)
        b_ = (xy ** 2).sum(axis=1)
        sol_ls, *_ = np.linalg.lstsq(A_, b_, rcond=None)
        cx, cy, c0 = sol_ls
        r = math.sqrt(c0 + cx * cx + cy * cy)
        circ_res = float(np.abs(np.hypot(xy[:, 0] - cx, xy[:, 1] - cy) - r).max())
        align = min(float(np.linalg.norm(np.cross(normal, nn)))
                    for nn in (n_umb, n_umb * np.array([1, 1, -1])))
        reports.append({"start_p": float(p0), "branch": sgn,
                        "planarity": planarity, "circle_residual": circ_res,
                        "radius": float(r), "normal_alignment": align})
    return reports


def rectification_check(surface: QuadricAngleChart, traj: Trajectory, lam: float,
                        margin: float = 0.08) -> float:
    """Max | |d sigma_1| / |d sigma_2| - 1 | along a level-lambda trajectory.

    Verified away from turning points, where one of the rectifying speeds
    vanishes and the ratio degenerates.
    """
    spec = surface.spec
    u = np.asarray(surface.u_of(traj.u), dtype=float)
    v = np.asarray(surface.v_of(traj.v), dtype=float)
    # coordinate velocities evaluated from the field at the integrated states
    # (finite differences of the dense output drown the 1e-6 signal); the
    # identity still fails whenever integration drifts off the level set
    ca, sa = np.cos(traj.alpha), np.sin(traj.alpha)
    k1 = np.asarray(surface.k1(traj.u, traj.v), dtype=float)
    k2 = np.asarray(surface.k2(traj.u, traj.v), dtype=float)
    w = 3.0 * (k1 - k2) * sa * ca
    isE = 1.0 / np.sqrt(np.asarray(surface.E(traj.u, traj.v), dtype=float))
    isG = 1.0 / np.sqrt(np.asarray(surface.G(traj.u, traj.v), dtype=float))
    du = w * ca * isE * np.asarray(surface.du_dp(traj.u), dtype=float)
    dv = w * sa * isG * np.asarray(surface.dv_dq(traj.v), dtype=float)
    f1 = np.sqrt(np.abs(u - lam) / np.abs(spec.H(u)))
    f2 = np.sqrt(np.abs(v - lam) / np.abs(spec.H(v)))
    d1 = f1 * np.abs(du)
    d2 = f2 * np.abs(dv)
    ok = (np.abs(du) > margin * np.median(np.abs(du))) \
        & (np.abs(dv) > margin * np.median(np.abs(dv)))
    ok[:4] = ok[-4:] = False
    ratio = d1[ok] / d2[ok]
    return float(np.abs(ratio - 1.0).max())
