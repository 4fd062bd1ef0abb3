"""Darboux vector fields, the adaptive integrator, and condition oracles.

The unit-speed system on (u, v, alpha) is singular where the curve is tangent
to a principal direction (sin(alpha) cos(alpha) = 0).  Integration therefore
runs on the polynomial time-rescaled field

    u' = 3 (k1 - k2) sin(a) cos(a)^2 / sqrt(E)
    v' = 3 (k1 - k2) sin(a)^2 cos(a) / sqrt(G)
    a' = (dk1/du) cos(a)^3 / sqrt(E) + (dk2/dv) sin(a)^3 / sqrt(G)

whose orbits agree with the unit-speed ones away from principal tangencies
and continue smoothly through the cusps there.  Arc length is carried as an
extra state variable ds/dt = |3 (k1 - k2) sin cos| and reported with every
sample.  Monitored first integrals are never projected back; their drift is
the accuracy metric.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp

from .chart import PrincipalChartSurface, frame_scalars
from .quadrature import central_derivative, grid_derivative
from .serialize import format_float, write_csv

TWO_PI = 2.0 * math.pi


class FlowError(RuntimeError):
    pass


def normalize_angle(alpha: float) -> float:
    """Reduce to the canonical interval (-pi, pi]."""
    a = math.fmod(alpha, TWO_PI)
    if a > math.pi:
        a -= TWO_PI
    elif a <= -math.pi:
        a += TWO_PI
    return a


@dataclass(frozen=True)
class DarbouxState:
    u: float
    v: float
    alpha: float

    def canonical(self) -> "DarbouxState":
        return DarbouxState(self.u, self.v, normalize_angle(self.alpha))


@dataclass(frozen=True)
class IntegratorParams:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_arc_length: float = 10.0
    max_steps: int = 2_000_000
    alpha_standoff: float = 1e-4      # distance to sin*cos = 0 for the unit-speed field
    umbilic_tol: float = 1e-9         # relative curvature separation at termination
    wall_margin_rel: float = 1e-7     # standoff from finite chart walls
    n_samples: int = 1600             # dense resampling for monitors and oracles
    max_sigma: float = 1e5            # cap on the rescaled time variable


@dataclass
class Trajectory:
    surface: PrincipalChartSurface
    t: np.ndarray
    s: np.ndarray
    u: np.ndarray
    v: np.ndarray
    alpha: np.ndarray
    positions: np.ndarray
    monitors: dict = field(default_factory=dict)
    events: dict = field(default_factory=dict)
    termination: str = "arc_budget"
    params: IntegratorParams | None = None
    kind: str = "darboux"
    dense: object = None            # solver interpolant (u, v, alpha[, s]); in-memory only
    state_columns: tuple = ("u", "v", "alpha", "s")

    @property
    def arc_length(self) -> float:
        return float(self.s[-1])

    def state(self, i: int) -> DarbouxState:
        return DarbouxState(float(self.u[i]), float(self.v[i]), float(self.alpha[i]))

    def metadata(self) -> dict:
        md = {
            "surface": self.surface.name,
            "kind": self.kind,
            "termination": self.termination,
            "arc_length": float(self.s[-1]),
            "samples": int(len(self.t)),
            "partial": self.termination in ("umbilic", "singular_step", "sigma_budget"),
        }
        if self.params is not None:
            md["rel_tol"] = self.params.rel_tol
            md["abs_tol"] = self.params.abs_tol
            md["max_arc_length"] = self.params.max_arc_length
        return md

    def write_csv(self, path) -> None:
        cols = {"s": self.s, "u": self.u, "v": self.v, "alpha": self.alpha,
                "x": self.positions[:, 0], "y": self.positions[:, 1],
                "z": self.positions[:, 2]}
        for name in sorted(self.monitors):
            cols[name] = self.monitors[name]
        write_csv(path, cols)

    def write_metadata(self, path, extra: dict | None = None) -> None:
        md = self.metadata()
        if extra:
            md.update(extra)
        with open(path, "w") as f:
            json.dump(md, f, indent=2, sort_keys=True)
            f.write("\n")


# ---------------------------------------------------------------------------
# vector fields
# ---------------------------------------------------------------------------

def darboux_field_arclength(surface, state: DarbouxState,
                            standoff: float = 1e-4) -> tuple[float, float, float]:
    """Unit-speed field (du/ds, dv/ds, dalpha/ds); singular at principal tangencies."""
    surface.require_interior(state.u, state.v)
    surface.require_non_umbilic(state.u, state.v)
    isE, isG, k1, k2, dk1, dk2 = surface.flow_terms(state.u, state.v)
    ca, sa = math.cos(state.alpha), math.sin(state.alpha)
    if abs(sa * ca) < standoff:
        raise FlowError("principal-direction tangency: use the desingularized field")
    dal = (dk1 * ca ** 3 * isE + dk2 * sa ** 3 * isG) / (3.0 * (k1 - k2) * sa * ca)
    return ca * isE, sa * isG, dal


def darboux_field_desingularized(surface, state: DarbouxState) -> tuple[float, float, float]:
    """Polynomial rescaling of the Darboux field, regular at all alpha."""
    surface.require_interior(state.u, state.v)
    surface.require_non_umbilic(state.u, state.v)
    isE, isG, k1, k2, dk1, dk2 = surface.flow_terms(state.u, state.v)
    ca, sa = math.cos(state.alpha), math.sin(state.alpha)
    w = 3.0 * (k1 - k2) * sa * ca
    return (w * ca * isE, w * sa * isG, dk1 * ca ** 3 * isE + dk2 * sa ** 3 * isG)


# ---------------------------------------------------------------------------
# integration machinery
# ---------------------------------------------------------------------------

def _wall_events(surface, params):
    evs = []
    d = surface.domain
    m = params.wall_margin_rel

    def mk(idx, wall, sign):
        margin = m * abs(wall) + m

        def g(t, y, wall=wall, sign=sign, idx=idx, margin=margin):
            return sign * (y[idx] - wall) - margin
        g.terminal = True
        return g

    if math.isfinite(d.u_min):
        evs.append(("domain_exit", mk(0, d.u_min, 1.0)))
    if math.isfinite(d.u_max):
        evs.append(("domain_exit", mk(0, d.u_max, -1.0)))
    if math.isfinite(d.v_min):
        evs.append(("domain_exit", mk(1, d.v_min, 1.0)))
    if math.isfinite(d.v_max):
        evs.append(("domain_exit", mk(1, d.v_max, -1.0)))
    return evs


def _run(surface, rhs, y0, params, alpha_index, record_alpha_events=True,
         extra_events=(), arc_index=None):
    """solve_ivp wrapper shared by the Darboux, leaf and geodesic integrators."""
    names, events = [], []

    if arc_index is not None:
        def ev_arc(t, y):
            return y[arc_index] - params.max_arc_length
        ev_arc.terminal = True
        names.append("arc_budget")
        events.append(ev_arc)

    def ev_umb(t, y):
        k1 = float(surface.k1(y[0], y[1]))
        k2 = float(surface.k2(y[0], y[1]))
        return abs(k1 - k2) / max(abs(k1), abs(k2), 1.0) - params.umbilic_tol
    ev_umb.terminal = True
    names.append("umbilic")
    events.append(ev_umb)

    for nm, g in _wall_events(surface, params):
        names.append(nm)
        events.append(g)

    if record_alpha_events and alpha_index is not None:
        def ev_a0(t, y):
            return math.sin(y[alpha_index])

        def ev_a1(t, y):
            return math.cos(y[alpha_index])
        names += ["alpha_zero", "alpha_half"]
        events += [ev_a0, ev_a1]

    for nm, g in extra_events:
        names.append(nm)
        events.append(g)

    budget = {"nfev": 0}

    def counted(t, y):
        budget["nfev"] += 1
        if budget["nfev"] > params.max_steps:
            raise FlowError("integration step budget exceeded")
        return rhs(t, y)

    sol = solve_ivp(counted, (0.0, params.max_sigma), y0, method="RK45",
                    rtol=params.rel_tol, atol=params.abs_tol,
                    events=events, dense_output=True)
    if sol.status == -1:
        termination = "singular_step"
    elif sol.status == 1:
        fired = [names[i] for i in range(len(events)) if len(sol.t_events[i]) > 0
                 and abs(sol.t_events[i][-1] - sol.t[-1]) < 1e-12 and getattr(events[i], "terminal", False)]
        termination = fired[0] if fired else "event"
    else:
        termination = "sigma_budget"
    ev_times = {nm: sol.t_events[i] for i, nm in enumerate(names) if len(sol.t_events[i])}
    return sol, termination, ev_times


def _resample(surface, sol, n, cols):
    t_end = sol.t[-1]
    n = max(n, 16)
    tg = np.linspace(0.0, t_end, n)
    Y = sol.sol(tg)
    out = {"t": tg}
    for name, idx in cols.items():
        out[name] = Y[idx]
    return out


def _oracle_samples(traj: Trajectory, dt_target: float = 0.02):
    """(t, u, v, alpha, positions) on a grid suited to second differences.

    Finite differencing the dense solver output amplifies its interpolation
    wiggle by 1/dt^2, so oracles prefer a coarser grid than the monitors use.
    """
    if traj.dense is None:
        return traj.t, traj.u, traj.v, traj.alpha, traj.positions
    t_end = float(traj.t[-1])
    n = int(min(max(t_end / dt_target, 200), 4000))
    tg = np.linspace(0.0, t_end, n)
    Y = traj.dense(tg)
    u, v = Y[0], Y[1]
    al = Y[2] if Y.shape[0] > 2 else np.full_like(u, float(traj.alpha[0]))
    return tg, u, v, al, _positions(traj.surface, u, v)


def _positions(surface, u, v):
    pts = surface.embedding(u, v)
    if pts.ndim == 1:
        pts = np.array([surface.embedding(float(uu), float(vv)) for uu, vv in zip(u, v)])
    return pts


def integrate(surface, state0: DarbouxState, params: IntegratorParams | None = None,
              monitors: dict | None = None, backward: bool = False) -> Trajectory:
    """Trace the Darboux curve through ``state0`` on the rescaled field."""
    params = params or IntegratorParams()
    surface.require_interior(state0.u, state0.v)
    surface.require_non_umbilic(state0.u, state0.v)

    def rhs(t, y):
        isE, isG, k1, k2, dk1, dk2 = surface.flow_terms(y[0], y[1])
        ca, sa = math.cos(y[2]), math.sin(y[2])
        w = 3.0 * (k1 - k2) * sa * ca
        sgn = -1.0 if backward else 1.0
        return (sgn * w * ca * isE, sgn * w * sa * isG,
                sgn * (dk1 * ca ** 3 * isE + dk2 * sa ** 3 * isG), abs(w))

    extra = [(nm, _wrap_event(g)) for nm, g in getattr(surface, "event_functions", lambda: [])()]
    y0 = (state0.u, state0.v, state0.alpha, 0.0)
    sol, termination, ev = _run(surface, rhs, y0, params, alpha_index=2,
                                extra_events=extra, arc_index=3)
    data = _resample(surface, sol, params.n_samples, {"u": 0, "v": 1, "alpha": 2, "s": 3})
    u, v, al = data["u"], data["v"], data["alpha"]
    traj = Trajectory(surface, data["t"], data["s"], u, v, al,
                      _positions(surface, u, v), termination=termination,
                      events=ev, params=params, dense=sol.sol)
    traj.monitors["curvature_gap"] = np.abs(np.asarray(surface.k1(u, v), dtype=float)
                                            - np.asarray(surface.k2(u, v), dtype=float))
    for name, fn in (monitors or {}).items():
        traj.monitors[name] = np.asarray(fn(surface, u, v, al), dtype=float)
    return traj


def _wrap_event(g):
    def ev(t, y):
        return g(y[0], y[1])
    return ev


def integrate_arclength(surface, state0: DarbouxState,
                        params: IntegratorParams | None = None) -> Trajectory:
    """Unit-speed integration of the singular field; stops at principal tangency."""
    params = params or IntegratorParams()

    def rhs(s, y):
        return darboux_field_arclength(surface, DarbouxState(*y), standoff=0.0)

    def ev_sing(s, y):
        return abs(math.sin(y[2]) * math.cos(y[2])) - params.alpha_standoff
    ev_sing.terminal = True

    p = replace(params, max_sigma=params.max_arc_length)
    sol, termination, ev = _run(surface, rhs, (state0.u, state0.v, state0.alpha), p,
                                alpha_index=2, record_alpha_events=False,
                                extra_events=[("principal_tangency", ev_sing)])
    if termination == "sigma_budget":
        termination = "arc_budget"
    data = _resample(surface, sol, params.n_samples, {"u": 0, "v": 1, "alpha": 2})
    u, v, al = data["u"], data["v"], data["alpha"]
    return Trajectory(surface, data["t"], data["t"], u, v, al,
                      _positions(surface, u, v), termination=termination,
                      events=ev, params=params, kind="darboux_arclength", dense=sol.sol)


def falpha_leaf(surface, start: tuple[float, float], alpha0: float, sign: int = 1,
                params: IntegratorParams | None = None) -> Trajectory:
    """Leaf of the constant-angle foliation: angle alpha0 frozen, sign picks the mirror family."""
    params = params or IntegratorParams()
    ca = math.cos(alpha0)
    sa = sign * math.sin(alpha0)

    def rhs(s, y):
        isE, isG, *_ = surface.flow_terms(y[0], y[1])
        return (ca * isE, sa * isG)

    p = replace(params, max_sigma=params.max_arc_length)
    sol, termination, ev = _run(surface, rhs, start, p, alpha_index=None,
                                record_alpha_events=False)
    if termination == "sigma_budget":
        termination = "arc_budget"
    data = _resample(surface, sol, params.n_samples, {"u": 0, "v": 1})
    u, v = data["u"], data["v"]
    al = np.full_like(u, sign * alpha0)
    traj = Trajectory(surface, data["t"], data["t"], u, v, al,
                      _positions(surface, u, v), termination=termination,
                      events=ev, params=params, kind=f"falpha_leaf({alpha0:g})", dense=sol.sol)
    k1 = np.asarray(surface.k1(u, v), dtype=float)
    k2 = np.asarray(surface.k2(u, v), dtype=float)
    traj.monitors["leaf_normal_curvature"] = k1 * ca * ca + k2 * sa * sa
    return traj


def integrate_geodesic(surface, state0: DarbouxState,
                       params: IntegratorParams | None = None) -> Trajectory:
    """Unit-speed geodesic flow in the same (u, v, alpha) representation."""
    params = params or IntegratorParams()

    def rhs(s, y):
        u, v, al = y
        isE, isG, *_ = surface.flow_terms(u, v)
        E = 1.0 / (isE * isE)
        G = 1.0 / (isG * isG)
        kg1 = -float(surface.E_v(u, v)) / (2.0 * E) * isG
        kg2 = float(surface.G_u(u, v)) / (2.0 * G) * isE
        ca, sa = math.cos(al), math.sin(al)
        return (ca * isE, sa * isG, -(kg1 * ca + kg2 * sa))

    p = replace(params, max_sigma=params.max_arc_length)
    sol, termination, ev = _run(surface, rhs, (state0.u, state0.v, state0.alpha), p,
                                alpha_index=2, record_alpha_events=False)
    if termination == "sigma_budget":
        termination = "arc_budget"
    data = _resample(surface, sol, params.n_samples, {"u": 0, "v": 1, "alpha": 2})
    u, v, al = data["u"], data["v"], data["alpha"]
    return Trajectory(surface, data["t"], data["t"], u, v, al,
                      _positions(surface, u, v), termination=termination,
                      events=ev, params=params, kind="geodesic", dense=sol.sol)


def trace_batch(surface, states, params: IntegratorParams | None = None,
                monitors: dict | None = None, jobs: int = 1) -> list[Trajectory]:
    """Integrate many starts; results are returned in input order."""
    if jobs <= 1:
        return [integrate(surface, st, params, monitors) for st in states]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futs = [pool.submit(integrate, surface, st, params, monitors) for st in states]
        return [f.result() for f in futs]


# ---------------------------------------------------------------------------
# condition oracles
# ---------------------------------------------------------------------------

def _tangency_mask(alpha, standoff):
    return np.abs(np.sin(alpha) * np.cos(alpha)) > standoff


def _residual_arrays(surface, traj: Trajectory, standoff: float = 0.05):
    if len(traj.t) < 32:
        raise FlowError("trajectory too sparse for the chart oracle")
    t, u, v, al, positions = _oracle_samples(traj)
    k1 = np.asarray(surface.k1(u, v), dtype=float)
    k2 = np.asarray(surface.k2(u, v), dtype=float)
    ca, sa = np.cos(al), np.sin(al)
    k_n = k1 * ca ** 2 + k2 * sa ** 2
    tau_g = (k2 - k1) * ca * sa
    dt = float(t[1] - t[0])
    ds_dt = np.linalg.norm(grid_derivative(positions, dt), axis=1)
    dkn_ds = grid_derivative(k_n, dt) / ds_dt
    dal_ds = grid_derivative(al, dt) / ds_dt
    kg1 = np.asarray(surface.E_v(u, v), dtype=float) / (-2.0 * np.asarray(surface.E(u, v), dtype=float)
                                                        * np.sqrt(np.asarray(surface.G(u, v), dtype=float)))
    kg2 = np.asarray(surface.G_u(u, v), dtype=float) / (2.0 * np.asarray(surface.G(u, v), dtype=float)
                                                        * np.sqrt(np.asarray(surface.E(u, v), dtype=float)))
    # The rescaled field runs the curve at angle alpha + pi wherever its
    # scalar factor is negative; the frame terms of k_g follow the actual
    # traversal direction while arc-length derivatives are measured signs.
    du_dt = grid_derivative(u, dt)
    dv_dt = grid_derivative(v, dt)
    sqE = np.sqrt(np.asarray(surface.E(u, v), dtype=float))
    sqG = np.sqrt(np.asarray(surface.G(u, v), dtype=float))
    eta = np.sign(du_dt * ca * sqE + dv_dt * sa * sqG)
    eta[eta == 0.0] = 1.0
    k_g = dal_ds + eta * (kg1 * ca + kg2 * sa)
    res = np.abs(dkn_ds + tau_g * k_g)
    mask = _tangency_mask(al, standoff)
    mask[:4] = mask[-4:] = False
    return t, res, mask


def darboux_residual(surface, traj: Trajectory, standoff: float = 0.05) -> float:
    """Max |dk_n/ds + tau_g * k_g| along the trajectory, from measured samples.

    k_n and alpha are differentiated in s by finite differences, independent
    of the field used to produce the trajectory.  Samples within ``standoff``
    of a principal tangency are excluded: k_g diverges there while the
    product stays finite, which finite differences cannot resolve.
    """
    t, res, mask = _residual_arrays(surface, traj, standoff)
    if not mask.any():
        raise FlowError("no samples clear of principal tangencies")
    return float(res[mask].max())


def darboux_residual_profile(surface, traj: Trajectory, standoff: float = 0.05):
    """Per-sample |dk_n/ds + tau_g k_g| aligned with the trajectory grid.

    Masked stretches (principal tangencies, crawling segments) carry zero;
    intended as a monitor column for exports.
    """
    t, res, mask = _residual_arrays(surface, traj, standoff)
    out = np.interp(traj.t, t, np.where(mask, res, 0.0))
    return out


def osculating_contact_residual(surface, traj: Trajectory, standoff: float = 0.05) -> float:
    """Ambient third-order sphere-contact residual; uses no chart quantities.

    Evaluates <c',c'>[2<N',c''> + <N'',c'>] - 3<c',N'><c',c''> along the
    sampled curve with any parametrization (the expression is invariant),
    normalized by |c'|^5 to make it a squared-curvature-scale quantity.
    """
    if len(traj.t) < 32:
        raise FlowError("trajectory too sparse for the ambient oracle")
    t, u, v, al, c = _oracle_samples(traj)
    dt = float(t[1] - t[0])
    try:
        N = surface.normal(u, v)
    except TypeError:
        N = None
    if N is None or np.ndim(N) != 2 or N.shape != c.shape:
        N = np.array([surface.normal(float(uu), float(vv)) for uu, vv in zip(u, v)])
    c1 = grid_derivative(c, dt)
    c2 = grid_derivative(c, dt, order=2)
    N1 = grid_derivative(N, dt)
    N2 = grid_derivative(N, dt, order=2)
    dot = lambda a, b: np.einsum("ij,ij->i", a, b)
    expr = dot(c1, c1) * (2.0 * dot(N1, c2) + dot(N2, c1)) - 3.0 * dot(c1, N1) * dot(c1, c2)
    speed5 = np.maximum(np.linalg.norm(c1, axis=1), 1e-9) ** 5
    res = np.abs(expr) / speed5
    mask = _tangency_mask(al, standoff) if traj.kind.startswith("darboux") \
        else np.ones(len(res), dtype=bool)
    mask[:4] = mask[-4:] = False
    # crawling stretches (near tangencies or umbilics) put |c'|^5 below the
    # finite-difference noise floor; exclude them
    speed = np.linalg.norm(c1, axis=1)
    mask &= speed > 0.25 * np.median(speed)
    if not mask.any():
        raise FlowError("no usable samples for the ambient oracle")
    return float(res[mask].max())


def plane_field_integrability(surface, u: float, v: float,
                              h: float | None = None) -> tuple[float, float]:
    """Integrability residuals of the plane field spanned by the two Darboux fields.

    res1 = xi1(theta2) + theta1*theta2/6, res2 = xi2(theta1) - theta1*theta2/6,
    with xi_i(f) = (2/(k1 - k2)) X_i(f).  Both vanish exactly when the field
    of Darboux 2-planes is tangent to a foliation (canal-type surfaces).
    """
    surface.require_interior(u, v)
    surface.require_non_umbilic(u, v)
    h = h if h is not None else max(1e-4, 100 * surface.fd_step)

    def theta1(uu, vv):
        return frame_scalars(surface, uu, vv, 0.0).theta1

    def theta2(uu, vv):
        return frame_scalars(surface, uu, vv, 0.0).theta2

    fs = frame_scalars(surface, u, v, 0.0)
    k12 = fs.k1 - fs.k2
    sE = math.sqrt(float(surface.E(u, v)))
    sG = math.sqrt(float(surface.G(u, v)))
    x1_theta2 = central_derivative(lambda x: theta2(x, v), u, h) / sE
    x2_theta1 = central_derivative(lambda y: theta1(u, y), v, h) / sG
    res1 = (2.0 / k12) * x1_theta2 + fs.theta1 * fs.theta2 / 6.0
    res2 = (2.0 / k12) * x2_theta1 - fs.theta1 * fs.theta2 / 6.0
    return res1, res2
