"""Closed-form conserved quantities of the Darboux flow per surface family.

Every integral here has the shape f(u) * cos^3(alpha) except the confocal
quadric one, cos^2(a)/u + sin^2(a)/v, whose reciprocal is the confocal
parameter of the osculating-sphere congruence.  The generic canal integral
A(u) cos^3(alpha), with log A the antiderivative of dk1/du / (k1 - k2), is
built by quadrature from a fixed anchor so level values are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .chart import ChartError, PrincipalChartSurface, frame_scalars
from .flow import DarbouxState, IntegratorParams, Trajectory, integrate
from .quadrature import grid_derivative

DRIFT_FLOOR = 1e-30


@dataclass
class FirstIntegral:
    name: str
    family: str
    fn: Callable          # vectorized (surface, u, v, alpha) -> value
    notes: str = ""
    status: str = "verified"

    def evaluate(self, surface, state: DarbouxState) -> float:
        return float(self.fn(surface, state.u, state.v, state.alpha))

    def monitor(self):
        return self.fn


# ---------------------------------------------------------------------------
# per-family closed forms
# ---------------------------------------------------------------------------

def quadric_integral_value(surface, u, v, alpha):
    """cos^2(a)/u + sin^2(a)/v in confocal coordinates (any quadric chart)."""
    if hasattr(surface, "classic_uv"):
        u, v = surface.classic_uv(u, v)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(u == 0.0) or np.any(v == 0.0):
        raise ChartError("confocal coordinate at chart boundary u*v = 0")
    ca, sa = np.cos(alpha), np.sin(alpha)
    return ca * ca / u + sa * sa / v


def confocal_parameter(surface, u, v, alpha):
    """Reciprocal of the quadric integral: the confocal family parameter."""
    return 1.0 / quadric_integral_value(surface, u, v, alpha)


def revolution_integral_value(surface, u, v, alpha):
    """h(u) (k1 - k2) cos^3(alpha) on revolution charts."""
    h = surface.h(u)
    k1 = np.asarray(surface.k1(u, v if v is not None else 0.0), dtype=float)
    k2 = np.asarray(surface.k2(u, v if v is not None else 0.0), dtype=float)
    return h * (k1 - k2) * np.cos(alpha) ** 3


def clairaut_integral_value(surface, u, v, alpha):
    """h(u) sin(alpha): conserved by geodesics of revolution surfaces, not by Darboux flow."""
    return surface.h(u) * np.sin(alpha)


def cone_integral_value(surface, u, v, alpha):
    """kg(u) cos^3(alpha) on cones (kg from the unit spherical directrix)."""
    return np.asarray(surface.spec.kg(u), dtype=float) * np.cos(alpha) ** 3


def cylinder_integral_value(surface, u, v, alpha):
    """k(u) cos^3(alpha) on general cylinders (k = directrix curvature)."""
    return np.asarray(surface.spec.k(u), dtype=float) * np.cos(alpha) ** 3


class CanalIntegral:
    """Generic canal-surface integral A(u) cos^3(alpha) with quadrature table.

    A(u) = exp of the antiderivative of dk1/du / (k1 - k2), anchored to
    A(u0) = 1 at the midpoint of the scan window.  Requires theta2 = 0;
    the constructor verifies this on samples before building the table.
    """

    def __init__(self, surface: PrincipalChartSurface, pad: float = 2.0,
                 theta2_gate: float = 1e-6):
        w = surface.scan_window()
        vmid = 0.5 * (w.v_min + w.v_max)
        for uu in np.linspace(w.u_min, w.u_max, 7)[1:-1]:
            th2 = frame_scalars(surface, float(uu), vmid, 0.0).theta2
            if abs(th2) > theta2_gate:
                raise ChartError(
                    f"{surface.name}: |theta2| = {abs(th2):.2e} exceeds the canal gate")
        self.surface = surface
        span = w.u_max - w.u_min
        lo = max(w.u_min - pad * span, surface.domain.u_min)
        hi = min(w.u_max + pad * span, surface.domain.u_max)
        self.u0 = 0.5 * (w.u_min + w.u_max)
        self.u_range = (lo, hi)

        def rhs(u, y):
            k1 = float(surface.k1(u, vmid))
            k2 = float(surface.k2(u, vmid))
            return [float(surface.dk1_du(u, vmid)) / (k1 - k2)]

        up = solve_ivp(rhs, (self.u0, hi), [0.0], method="DOP853",
                       rtol=1e-12, atol=1e-13, dense_output=True)
        dn = solve_ivp(rhs, (self.u0, lo), [0.0], method="DOP853",
                       rtol=1e-12, atol=1e-13, dense_output=True)
        if not (up.success and dn.success):
            raise ChartError(f"{surface.name}: canal quadrature failed")

        def logA(u):
            u = np.asarray(u, dtype=float)
            if np.any(u < lo) or np.any(u > hi):
                raise ChartError("canal integral evaluated outside its quadrature window")
            out = np.where(u >= self.u0, up.sol(np.clip(u, self.u0, hi))[0],
                           dn.sol(np.clip(u, lo, self.u0))[0])
            return out

        self._logA = logA

    def A(self, u):
        return np.exp(self._logA(u))

    def value(self, surface, u, v, alpha):
        return self.A(u) * np.cos(alpha) ** 3


def canal_integral(surface: PrincipalChartSurface) -> FirstIntegral:
    table = CanalIntegral(surface)
    fi = FirstIntegral("canal_integral", surface.family, table.value,
                       notes="A(u) cos^3(alpha), A anchored to 1 at the window midpoint")
    fi.table = table
    return fi


def canal_implicit_residual(surface, traj: Trajectory, level: float) -> float:
    """Check the implicit form of a canal level set against measured directions.

    On the level set A(u) cos^3 a = c the admissible directions satisfy
    c^(2/3) G dv^2 - E (A^(2/3) - c^(2/3)) du^2 = 0 for unit-speed (du, dv).
    """
    table = CanalIntegral(surface)
    dt = float(traj.t[1] - traj.t[0])
    du = grid_derivative(traj.u, dt)
    dv = grid_derivative(traj.v, dt)
    sp2 = (np.asarray(surface.E(traj.u, traj.v), dtype=float) * du ** 2
           + np.asarray(surface.G(traj.u, traj.v), dtype=float) * dv ** 2)
    ok = sp2 > 1e-12
    du2 = du[ok] ** 2 / sp2[ok]
    dv2 = dv[ok] ** 2 / sp2[ok]
    E = np.asarray(surface.E(traj.u, traj.v), dtype=float)[ok]
    G = np.asarray(surface.G(traj.u, traj.v), dtype=float)[ok]
    A23 = table.A(traj.u[ok]) ** (2.0 / 3.0)
    c23 = abs(level) ** (2.0 / 3.0)
    res = np.abs(c23 * G * dv2 - E * (A23 - c23) * du2)
    return float(res[2:-2].max())


# ---------------------------------------------------------------------------
# applicability and verification
# ---------------------------------------------------------------------------

def _verify_by_integration(surface, integral: FirstIntegral, state: DarbouxState,
                           arc: float = 3.0, tol: float = 1e-6) -> bool:
    traj = integrate(surface, state, IntegratorParams(max_arc_length=arc),
                     monitors={integral.name: integral.fn})
    vals = traj.monitors[integral.name]
    return float(np.ptp(vals)) / max(abs(float(vals[0])), DRIFT_FLOOR) < tol


def standard_integrals(surface: PrincipalChartSurface,
                       verify_cone: bool = True) -> list[FirstIntegral]:
    """The conserved quantities applicable to this surface's family."""
    fam = surface.family
    out: list[FirstIntegral] = []
    if fam == "quadric":
        out.append(FirstIntegral("quadric_integral", fam, quadric_integral_value,
                                 notes="cos^2/u + sin^2/v in confocal coordinates"))
    elif fam == "revolution":
        out.append(FirstIntegral("revolution_integral", fam, revolution_integral_value))
        out.append(canal_integral(surface))
    elif fam == "cone":
        fi = FirstIntegral("cone_integral", fam, cone_integral_value,
                           notes="directrix curvature formula; verified against the integrator")
        if verify_cone:
            w = surface.scan_window()
            st = DarbouxState(0.5 * (w.u_min + w.u_max),
                              0.5 * (surface.domain.v_min + surface.domain.v_max), 0.7)
            fi.status = "verified" if _verify_by_integration(surface, fi, st) else "unverified"
        else:
            fi.status = "unverified"
        out.append(fi)
    elif fam == "cylinder":
        out.append(FirstIntegral("cylinder_integral", fam, cylinder_integral_value))
    return out


def conservation_report(traj: Trajectory, integrals: list[FirstIntegral]) -> dict:
    """Relative drift of each integral along the trajectory, JSON-ready."""
    if len(traj.t) == 0:
        raise ValueError("empty trajectory")
    out = {}
    for fi in integrals:
        vals = traj.monitors.get(fi.name)
        if vals is None:
            vals = np.asarray(fi.fn(traj.surface, traj.u, traj.v, traj.alpha), dtype=float)
        ref = max(abs(float(vals[0])), DRIFT_FLOOR)
        drift = np.abs(vals - vals[0]) / ref
        step = max(1, len(vals) // 64)
        out[fi.name] = {
            "integral": fi.name,
            "family": fi.family,
            "status": fi.status,
            "max_rel_drift": float(drift.max()),
            "partial_trajectory": traj.termination not in ("arc_budget", "domain_exit"),
            "termination": traj.termination,
            "samples": [{"s": float(traj.s[i]), "value": float(vals[i])}
                        for i in range(0, len(vals), step)],
        }
    return out


def monitor_map(integrals: list[FirstIntegral]) -> dict:
    return {fi.name: fi.fn for fi in integrals}
