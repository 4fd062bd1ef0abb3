"""Analytic catalog surfaces: canal-type families and quadrics, plus JSON specs.

Revolution surfaces are built as envelopes of spheres of radius r(u) centered
at (0, 0, u) on the axis; cones over unit-speed spherical directrices; general
cylinders over unit-speed planar directrices.  All three families are canal
surfaces: the conformal curvature theta2 vanishes identically and theta1 is
constant along the characteristic circles (the u = const coordinate curves).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .chart import ChartError, Domain, PrincipalChartSurface
from .quadrics import KINDS as QUADRIC_KINDS
from .quadrics import QuadricSpec, make_quadric
from .quadrature import central_derivative


# ---------------------------------------------------------------------------
# surfaces of revolution as sphere envelopes
# ---------------------------------------------------------------------------

@dataclass
class RevolutionSpec:
    """Radius profile r(u) > 0 with derivatives; r4 may be None (FD fallback)."""
    r: Callable[[float], float]
    r1: Callable[[float], float]
    r2: Callable[[float], float]
    r3: Callable[[float], float]
    r4: Callable[[float], float] | None = None
    u_range: tuple[float, float] = (-math.inf, math.inf)
    name: str = "revolution"


class RevolutionChart(PrincipalChartSurface):
    """Envelope chart: u along the axis of sphere centers, v the rotation angle.

    k1 = -r''/(1 - r'^2 - r r'') along the profile family (P1), k2 = 1/r along
    the characteristic circles.  h(u) = r sqrt(1 - r'^2) is the distance to
    the axis.
    """

    family = "revolution"

    def __init__(self, spec: RevolutionSpec):
        self.spec = spec
        u0, u1 = spec.u_range
        domain = Domain(u0, u1, -math.inf, math.inf)
        super().__init__(domain, None, None, None, None, None, name=spec.name)
        self.fd_step = 1e-6

    def _d(self, u):
        r1 = self.spec.r1(u)
        return 1.0 - r1 * r1 - self.spec.r(u) * self.spec.r2(u)

    def E(self, u, v):
        d = self._d(u)
        r1 = self.spec.r1(u)
        return d * d / (1.0 - r1 * r1)

    def G(self, u, v):
        r = self.spec.r(u)
        r1 = self.spec.r1(u)
        return r * r * (1.0 - r1 * r1)

    def e(self, u, v):
        return self.E(u, v) * self.k1(u, v)

    def g(self, u, v):
        return self.G(u, v) * self.k2(u, v)

    def k1(self, u, v=None):
        return -self.spec.r2(u) / self._d(u)

    def k2(self, u, v=None):
        return 1.0 / self.spec.r(u)

    def ridge_function(self, u):
        """R(u) = r'''(1 - r'^2) + 3 r' r''^2; dk1/du = -R/D^2 so roots mark ridges."""
        r1, r2, r3 = self.spec.r1(u), self.spec.r2(u), self.spec.r3(u)
        return r3 * (1.0 - r1 * r1) + 3.0 * r1 * r2 * r2

    def dk1_du(self, u, v=None):
        d = self._d(u)
        return -self.ridge_function(u) / (d * d)

    def dk1_dv(self, u, v=None):
        return 0.0 * np.asarray(u, dtype=float)

    def dk2_du(self, u, v=None):
        r = self.spec.r(u)
        return -self.spec.r1(u) / (r * r)

    def dk2_dv(self, u, v=None):
        return 0.0 * np.asarray(u, dtype=float)

    def d2k2_dv2(self, u, v=None):
        return 0.0 * np.asarray(u, dtype=float)

    def d2k1_du2(self, u, v=None):
        d = self._d(u)
        R = self.ridge_function(u)
        r1, r2, r3 = self.spec.r1(u), self.spec.r2(u), self.spec.r3(u)
        dD = -3.0 * r1 * r2 - self.spec.r(u) * r3
        if self.spec.r4 is not None:
            dR = self.spec.r4(u) * (1.0 - r1 * r1) + 4.0 * r1 * r2 * r3 + 3.0 * r2 ** 3
        else:
            dR = central_derivative(self.ridge_function, float(u), 1e-4)
        return (-dR * d + 2.0 * R * dD) / (d ** 3)

    def E_v(self, u, v):
        return 0.0 * np.asarray(u, dtype=float)

    def G_u(self, u, v):
        r, r1 = self.spec.r(u), self.spec.r1(u)
        return 2.0 * r * r1 * self._d(u)

    def h(self, u):
        """Distance from the surface point to the axis of revolution."""
        r1 = self.spec.r1(u)
        return self.spec.r(u) * np.sqrt(1.0 - r1 * r1)

    def embedding(self, u, v):
        h = self.h(u)
        z = u - self.spec.r(u) * self.spec.r1(u)
        return np.stack([h * np.cos(v), h * np.sin(v), z + 0.0 * h], axis=-1)

    def embedding_jet(self, u, v):
        r1 = self.spec.r1(u)
        cb = math.sqrt(1.0 - r1 * r1)
        d = self._d(u)
        hp = r1 * d / cb
        h = self.h(u)
        cv, sv = math.cos(v), math.sin(v)
        x = np.array([h * cv, h * sv, u - self.spec.r(u) * r1])
        xu = np.array([hp * cv, hp * sv, d])
        xv = np.array([-h * sv, h * cv, 0.0])
        return x, xu, xv

    def normal(self, u, v):
        r1 = self.spec.r1(u)
        cb = np.sqrt(1.0 - r1 * r1)
        return np.stack([-cb * np.cos(v), -cb * np.sin(v),
                         r1 + 0.0 * np.asarray(v, dtype=float)], axis=-1)

    def flow_terms(self, u, v):
        r = self.spec.r(u)
        r1 = self.spec.r1(u)
        r2 = self.spec.r2(u)
        d = 1.0 - r1 * r1 - r * r2
        one = 1.0 - r1 * r1
        E = d * d / one
        G = r * r * one
        k1 = -r2 / d
        return (1.0 / math.sqrt(E), 1.0 / math.sqrt(G), k1, 1.0 / r,
                -self.ridge_function(u) / (d * d), 0.0)

    def reflection_partner(self, u, v, alpha):
        return (u, -v, -alpha)

    def scan_window(self) -> Domain:
        d = self.domain
        u0 = d.u_min if math.isfinite(d.u_min) else 0.0
        u1 = d.u_max if math.isfinite(d.u_max) else 2.0 * math.pi
        return Domain(u0, u1, -math.pi, math.pi)

    def validate(self, n: int = 64) -> None:
        u0, u1 = self.scan_window().u_min, self.scan_window().u_max
        for u in np.linspace(u0, u1, n):
            if abs(self.spec.r1(u)) >= 1.0:
                raise ChartError(f"|r'({u:.4f})| >= 1: envelope not regular")
            if self._d(u) == 0.0:
                raise ChartError(f"chart degenerate at u={u:.4f} (1 - r'^2 - r r'' = 0)")
            if self.spec.r(u) <= 0.0:
                raise ChartError(f"radius profile not positive at u={u:.4f}")


def make_revolution(spec: RevolutionSpec) -> RevolutionChart:
    surf = RevolutionChart(spec)
    surf.validate()
    return surf


def sin_profile_surface(radius: float = 2.0, amplitude: float = 0.3) -> RevolutionChart:
    """Wavy canal surface r(u) = radius + amplitude*sin(u); umbilic-free for the defaults."""
    a = amplitude
    spec = RevolutionSpec(
        r=lambda u: radius + a * np.sin(u),
        r1=lambda u: a * np.cos(u),
        r2=lambda u: -a * np.sin(u),
        r3=lambda u: -a * np.cos(u),
        r4=lambda u: a * np.sin(u),
        name=f"revolution_sin(r={radius:g},a={a:g})",
    )
    return make_revolution(spec)


def cylinder_of_revolution(radius: float = 2.0) -> RevolutionChart:
    """Cylinder as the r = const limit of the envelope chart: k1 = 0, k2 = 1/r."""
    z = lambda u: 0.0 * np.asarray(u, dtype=float)
    spec = RevolutionSpec(
        r=lambda u: radius + 0.0 * np.asarray(u, dtype=float),
        r1=z, r2=z, r3=z, r4=z,
        name=f"cylinder(r={radius:g})",
    )
    return make_revolution(spec)


def torus_surface(R: float = 2.0, rho: float = 0.8,
                  u_max: float | None = None) -> RevolutionChart:
    """Inner band of a torus of revolution (tube radius rho, center radius R).

    The generating spheres are tangent to the torus from the hole side:
    r(u) = sqrt(R^2 + u^2) - rho, which gives constant profile curvature
    k1 = -1/rho, the Dupin cyclide signature.
    """
    if not (R > rho > 0):
        raise ChartError("torus requires R > rho > 0")
    if u_max is None:
        u_max = 2.0 * R

    def s(u):
        return np.sqrt(R * R + u * u)

    spec = RevolutionSpec(
        r=lambda u: s(u) - rho,
        r1=lambda u: u / s(u),
        r2=lambda u: R * R / s(u) ** 3,
        r3=lambda u: -3.0 * R * R * u / s(u) ** 5,
        r4=lambda u: -3.0 * R * R / s(u) ** 5 + 15.0 * R * R * u * u / s(u) ** 7,
        u_range=(-u_max, u_max),
        name=f"torus(R={R:g},rho={rho:g})",
    )
    return make_revolution(spec)


# ---------------------------------------------------------------------------
# cones over unit-speed spherical directrices
# ---------------------------------------------------------------------------

@dataclass
class ConeSpec:
    """Cone data: spherical geodesic curvature kg(u) of the unit directrix.

    gamma(u) must return the pair (gamma, gamma') of the unit-speed spherical
    directrix; when it is None the directrix is generated by integrating the
    spherical frame equation gamma'' = -gamma + kg * gamma x gamma'.
    """
    kg: Callable[[float], float]
    dkg: Callable[[float], float]
    d2kg: Callable[[float], float]
    gamma: Callable[[float], tuple[np.ndarray, np.ndarray]] | None = None
    u_range: tuple[float, float] = (0.0, 2.0 * math.pi)
    v_range: tuple[float, float] = (0.2, 6.0)
    name: str = "cone"


def _integrate_directrix(kg: Callable[[float], float], u_range):
    y0 = np.array([1.0, 0.0, 0.0, 0.0, 1.0, 0.0])

    def rhs(u, y):
        g = y[:3]
        gp = y[3:]
        gpp = -g + kg(u) * np.cross(g, gp)
        return np.concatenate([gp, gpp])

    pad = 0.05 * (u_range[1] - u_range[0]) + 1e-3
    sol = solve_ivp(rhs, (u_range[0] - pad, u_range[1] + pad), y0,
                    method="DOP853", rtol=1e-12, atol=1e-12, dense_output=True)
    if not sol.success:
        raise ChartError("directrix integration failed")

    def gamma(u):
        y = sol.sol(u)
        return y[:3], y[3:]

    return gamma


class ConeChart(PrincipalChartSurface):
    """Cone X(u, v) = v * gamma(u): rulings are the u = const curves (k2 = 0).

    The nonzero principal curvature scales like 1/v: k1 = kg(u)/v.
    """

    family = "cone"

    def __init__(self, spec: ConeSpec):
        self.spec = spec
        if spec.gamma is None:
            spec.gamma = _integrate_directrix(spec.kg, spec.u_range)
        domain = Domain(spec.u_range[0], spec.u_range[1], spec.v_range[0], spec.v_range[1])
        super().__init__(domain, None, None, None, None, None, name=spec.name)
        self.fd_step = 1e-6

    def E(self, u, v):
        return v * v + 0.0 * np.asarray(u, dtype=float)

    def G(self, u, v):
        return 1.0 + 0.0 * np.asarray(u, dtype=float)

    def e(self, u, v):
        return self.spec.kg(u) * v

    def g(self, u, v):
        return 0.0 * np.asarray(u, dtype=float)

    def k1(self, u, v):
        return self.spec.kg(u) / v

    def k2(self, u, v):
        return 0.0 * np.asarray(u, dtype=float)

    def dk1_du(self, u, v):
        return self.spec.dkg(u) / v

    def dk1_dv(self, u, v):
        return -self.spec.kg(u) / (v * v)

    def dk2_du(self, u, v):
        return 0.0 * np.asarray(u, dtype=float)

    def dk2_dv(self, u, v):
        return 0.0 * np.asarray(u, dtype=float)

    def d2k1_du2(self, u, v):
        return self.spec.d2kg(u) / v

    def d2k2_dv2(self, u, v):
        return 0.0 * np.asarray(u, dtype=float)

    def E_v(self, u, v):
        return 2.0 * v + 0.0 * np.asarray(u, dtype=float)

    def G_u(self, u, v):
        return 0.0 * np.asarray(u, dtype=float)

    def embedding(self, u, v):
        if np.ndim(u) == 0:
            g, _ = self.spec.gamma(float(u))
            return v * g
        return np.stack([vv * self.spec.gamma(float(uu))[0]
                         for uu, vv in zip(np.ravel(u), np.ravel(v))])

    def embedding_jet(self, u, v):
        g, gp = self.spec.gamma(float(u))
        return v * g, v * gp, g

    def normal(self, u, v):
        g, gp = self.spec.gamma(float(u))
        return np.cross(g, gp)

    def flow_terms(self, u, v):
        kg = float(self.spec.kg(u))
        return (1.0 / v, 1.0, kg / v, 0.0, float(self.spec.dkg(u)) / v, 0.0)


def make_cone(spec: ConeSpec) -> ConeChart:
    """Cone from an explicit spec; validates the unit-speed spherical directrix."""
    surf = ConeChart(spec)
    for u in np.linspace(spec.u_range[0], spec.u_range[1], 17):
        g, gp = spec.gamma(float(u))
        if abs(np.linalg.norm(g) - 1.0) > 1e-8 or abs(np.linalg.norm(gp) - 1.0) > 1e-8:
            raise ChartError(f"cone directrix not unit-speed spherical at u={u:.4f}")
    return surf


def cone_of_revolution(beta: float = 0.6, v_range=(0.3, 6.0)) -> ConeChart:
    """Circular cone with half-angle beta; directrix circle has kg = cot(beta)."""
    s = math.sin(beta)
    kg = 1.0 / math.tan(beta)

    def gamma(u):
        g = np.array([s * math.cos(u / s), s * math.sin(u / s), math.cos(beta)])
        gp = np.array([-math.sin(u / s), math.cos(u / s), 0.0])
        return g, gp

    spec = ConeSpec(kg=lambda u: kg + 0.0 * np.asarray(u, dtype=float),
                    dkg=lambda u: 0.0 * np.asarray(u, dtype=float),
                    d2kg=lambda u: 0.0 * np.asarray(u, dtype=float),
                    gamma=gamma,
                    u_range=(0.0, 2.0 * math.pi * s),
                    v_range=v_range,
                    name=f"cone(beta={beta:g})")
    return ConeChart(spec)


def wavy_cone(kg0: float = 1.4, amplitude: float = 0.3, omega: float = 1.0,
              u_range=(0.0, 5.0), v_range=(0.3, 6.0)) -> ConeChart:
    """General cone with oscillating directrix curvature kg(u) = kg0 + amp*sin(omega u)."""
    spec = ConeSpec(
        kg=lambda u: kg0 + amplitude * np.sin(omega * u),
        dkg=lambda u: amplitude * omega * np.cos(omega * u),
        d2kg=lambda u: -amplitude * omega * omega * np.sin(omega * u),
        u_range=u_range, v_range=v_range,
        name=f"wavy_cone(kg0={kg0:g},a={amplitude:g})")
    return ConeChart(spec)


# ---------------------------------------------------------------------------
# general cylinders over unit-speed planar directrices
# ---------------------------------------------------------------------------

@dataclass
class CylinderSpec:
    """Planar unit-speed directrix through (x(u), y(u)) with signed curvature k(u)."""
    point: Callable[[float], tuple[float, float]]
    tangent: Callable[[float], tuple[float, float]]
    k: Callable[[float], float]
    dk: Callable[[float], float]
    d2k: Callable[[float], float]
    u_range: tuple[float, float] = (-math.inf, math.inf)
    name: str = "general_cylinder"


class CylinderChart(PrincipalChartSurface):
    """Right cylinder X(u, v) = c(u) + v e_z; rulings are u = const (k2 = 0)."""

    family = "cylinder"

    def __init__(self, spec: CylinderSpec):
        self.spec = spec
        domain = Domain(spec.u_range[0], spec.u_range[1], -math.inf, math.inf)
        super().__init__(domain, None, None, None, None, None, name=spec.name)
        self.fd_step = 1e-6

    def E(self, u, v):
        return 1.0 + 0.0 * np.asarray(u, dtype=float)

    G = E

    def e(self, u, v):
        return self.spec.k(u) + 0.0 * np.asarray(v, dtype=float)

    def g(self, u, v):
        return 0.0 * np.asarray(u, dtype=float)

    def k1(self, u, v=None):
        return self.spec.k(u)

    def k2(self, u, v=None):
        return 0.0 * np.asarray(u, dtype=float)

    def dk1_du(self, u, v=None):
        return self.spec.dk(u)

    def dk1_dv(self, u, v=None):
        return 0.0 * np.asarray(u, dtype=float)

    def dk2_du(self, u, v=None):
        return 0.0 * np.asarray(u, dtype=float)

    dk2_dv = dk2_du

    def d2k1_du2(self, u, v=None):
        return self.spec.d2k(u)

    def d2k2_dv2(self, u, v=None):
        return 0.0 * np.asarray(u, dtype=float)

    def E_v(self, u, v):
        return 0.0 * np.asarray(u, dtype=float)

    G_u = E_v

    def embedding(self, u, v):
        if np.ndim(u) == 0:
            x, y = self.spec.point(float(u))
            return np.array([x, y, float(v)])
        return np.stack([[*self.spec.point(float(uu)), float(vv)]
                         for uu, vv in zip(np.ravel(u), np.ravel(v))])

    def embedding_jet(self, u, v):
        x, y = self.spec.point(float(u))
        tx, ty = self.spec.tangent(float(u))
        return (np.array([x, y, float(v)]), np.array([tx, ty, 0.0]),
                np.array([0.0, 0.0, 1.0]))

    def normal(self, u, v):
        tx, ty = self.spec.tangent(float(u))
        return np.array([-ty, tx, 0.0])

    def flow_terms(self, u, v):
        return (1.0, 1.0, float(self.spec.k(u)), 0.0, float(self.spec.dk(u)), 0.0)

    def reflection_partner(self, u, v, alpha):
        return (u, -v, -alpha)

    def scan_window(self) -> Domain:
        d = self.domain
        u0 = d.u_min if math.isfinite(d.u_min) else 0.0
        u1 = d.u_max if math.isfinite(d.u_max) else 2.0 * math.pi
        return Domain(u0, u1, -1.0, 1.0)


def make_cylinder(spec: CylinderSpec) -> CylinderChart:
    """Cylinder from an explicit spec; validates the planar unit-speed directrix."""
    surf = CylinderChart(spec)
    w = surf.scan_window()
    for u in np.linspace(w.u_min, w.u_max, 17):
        tx, ty = spec.tangent(float(u))
        if abs(math.hypot(tx, ty) - 1.0) > 1e-8:
            raise ChartError(f"cylinder directrix not unit-speed at u={u:.4f}")
    return surf


def circular_cylinder(radius: float = 2.0) -> CylinderChart:
    r = radius
    spec = CylinderSpec(
        point=lambda u: (r * math.cos(u / r), r * math.sin(u / r)),
        tangent=lambda u: (-math.sin(u / r), math.cos(u / r)),
        k=lambda u: 1.0 / r + 0.0 * np.asarray(u, dtype=float),
        dk=lambda u: 0.0 * np.asarray(u, dtype=float),
        d2k=lambda u: 0.0 * np.asarray(u, dtype=float),
        name=f"circular_cylinder(r={r:g})")
    return CylinderChart(spec)


def elliptic_cylinder(A: float = 2.0, B: float = 1.0) -> CylinderChart:
    """Cylinder over an ellipse, arc-length reparametrized at construction."""
    if A <= 0 or B <= 0:
        raise ChartError("ellipse semi-axes must be positive")

    def w(t):
        return np.sqrt(A * A * np.sin(t) ** 2 + B * B * np.cos(t) ** 2)

    # parameter angle as a function of arc length, dense over several laps
    laps = 4
    sol = solve_ivp(lambda u, t: 1.0 / w(t[0]), (0.0, 2 * math.pi * laps * max(A, B)),
                    [0.0], method="DOP853", rtol=1e-12, atol=1e-12, dense_output=True)
    t_of_u = lambda u: sol.sol(u)[0]
    u_max = float(sol.t[-1])

    def k_of_t(t):
        return A * B / w(t) ** 3

    def dk_dt(t):
        return -3.0 * A * B * (A * A - B * B) * np.sin(t) * np.cos(t) / w(t) ** 5

    def k(u):
        return k_of_t(t_of_u(u))

    def dk(u):
        t = t_of_u(u)
        return dk_dt(t) / w(t)

    spec = CylinderSpec(
        point=lambda u: (A * math.cos(t_of_u(u)), B * math.sin(t_of_u(u))),
        tangent=lambda u: (-A * math.sin(t_of_u(u)) / w(t_of_u(u)),
                           B * math.cos(t_of_u(u)) / w(t_of_u(u))),
        k=k, dk=dk,
        d2k=lambda u: central_derivative(dk, float(u), 1e-4),
        u_range=(0.0, u_max),
        name=f"elliptic_cylinder({A:g},{B:g})")
    return CylinderChart(spec)


def flat_strip_cylinder(length: float = 4.0) -> CylinderChart:
    """Degenerate control case: straight-line directrix (k = 0, flat patch)."""
    z = lambda u: 0.0 * np.asarray(u, dtype=float)
    spec = CylinderSpec(point=lambda u: (float(u), 0.0), tangent=lambda u: (1.0, 0.0),
                        k=z, dk=z, d2k=z, u_range=(-length, length), name="flat_strip")
    return CylinderChart(spec)


# ---------------------------------------------------------------------------
# JSON surface specs
# ---------------------------------------------------------------------------

_CATALOG = {
    "ellipsoid": "triaxial ellipsoid in confocal chart; parameters a > b > c > 0",
    "one_sheet": "one-sheet hyperboloid; parameters a > b > 0 > c",
    "two_sheet": "two-sheet hyperboloid (positive-x sheet); parameters a > 0 > b > c",
    "revolution_sin": "canal surface r(u) = radius + amplitude sin u; parameters radius, amplitude",
    "cylinder": "circular cylinder as revolution envelope; parameter radius",
    "torus": "inner band of a torus of revolution; parameters R, rho",
    "circular_cylinder": "cylinder over a circle directrix; parameter radius",
    "elliptic_cylinder": "cylinder over an ellipse; parameters A, B",
    "cone": "cone of revolution; parameter beta (half-angle)",
    "wavy_cone": "cone with kg(u) = kg0 + amplitude sin(omega u); parameters kg0, amplitude, omega",
}


def catalog_names() -> dict[str, str]:
    return dict(_CATALOG)


def load_surface(spec: dict) -> PrincipalChartSurface:
    """Build a catalog surface from a JSON-style dict {type, parameters, ranges, branch}."""
    if "type" not in spec:
        raise ChartError("surface spec missing required field 'type'")
    stype = spec["type"]
    params = dict(spec.get("parameters", {}))
    if stype in QUADRIC_KINDS:
        try:
            qspec = QuadricSpec(stype, float(params["a"]), float(params["b"]), float(params["c"]))
        except KeyError as k:
            raise ChartError(f"quadric spec missing parameter {k}") from None
        branch = tuple(spec.get("branch", (1, 1, 1)))
        return make_quadric(qspec, branch=branch)
    ranges = spec.get("ranges", {})
    if stype == "revolution_sin":
        surf = sin_profile_surface(float(params.get("radius", 2.0)),
                                   float(params.get("amplitude", 0.3)))
        if "u" in ranges:
            lo, hi = (float(x) for x in ranges["u"])
            surf.spec.u_range = (lo, hi)
            surf.domain = Domain(lo, hi, -math.inf, math.inf)
        return surf
    if stype == "cylinder":
        return cylinder_of_revolution(float(params.get("radius", 2.0)))
    if stype == "torus":
        u_max = None
        if "u" in ranges:
            u_max = float(ranges["u"][1])
        return torus_surface(float(params.get("R", 2.0)), float(params.get("rho", 0.8)),
                             u_max=u_max)
    if stype == "circular_cylinder":
        return circular_cylinder(float(params.get("radius", 2.0)))
    if stype == "elliptic_cylinder":
        return elliptic_cylinder(float(params.get("A", 2.0)), float(params.get("B", 1.0)))
    if stype == "cone":
        v_range = tuple(float(x) for x in ranges.get("v", (0.3, 6.0)))
        return cone_of_revolution(float(params.get("beta", 0.6)), v_range=v_range)
    if stype == "wavy_cone":
        u_range = tuple(float(x) for x in ranges.get("u", (0.0, 5.0)))
        v_range = tuple(float(x) for x in ranges.get("v", (0.3, 6.0)))
        return wavy_cone(float(params.get("kg0", 1.4)), float(params.get("amplitude", 0.3)),
                         float(params.get("omega", 1.0)), u_range=u_range, v_range=v_range)
    raise ChartError(f"unknown surface type {stype!r}; known: {sorted(_CATALOG)}")
