"""Surfaces presented in principal charts and their pointwise frame quantities.

A chart is *principal* when the coordinate curves are lines of curvature:
I = E du^2 + G dv^2 and II = e du^2 + g dv^2 with no cross terms.  The
principal curvatures are then the ratios k1 = e/E (normal curvature of the
v = const family, called P1 here) and k2 = g/G (the u = const family, P2).
Angles are always measured from P1.

Derivatives of the curvatures default to central differences with Richardson
extrapolation; catalog surfaces override them with closed forms because ridge
classification consumes second derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quadrature import central_derivative, partial_uv

UMBILIC_REL_TOL = 1e-12


class ChartError(ValueError):
    pass


class DomainError(ChartError):
    pass


class UmbilicProximityError(ChartError):
    pass


@dataclass(frozen=True)
class Domain:
    u_min: float
    u_max: float
    v_min: float
    v_max: float

    def contains(self, u: float, v: float) -> bool:
        return self.u_min < u < self.u_max and self.v_min < v < self.v_max

    def span(self) -> float:
        du = self.u_max - self.u_min
        dv = self.v_max - self.v_min
        finite = [d for d in (du, dv) if math.isfinite(d)]
        return max(finite) if finite else 1.0


@dataclass(frozen=True)
class FrameScalars:
    """Pointwise Darboux-frame data at (u, v, alpha)."""
    k1: float
    k2: float
    k_n: float      # normal curvature at angle alpha
    tau_g: float    # geodesic torsion
    kg1: float      # geodesic curvature of the v = const coordinate curve
    kg2: float      # geodesic curvature of the u = const coordinate curve
    mu: float       # (k1 - k2) / 2
    theta1: float   # conformal principal curvature along P1
    theta2: float   # conformal principal curvature along P2


class PrincipalChartSurface:
    """A surface given by chart coefficients E, G, e, g and an embedding.

    Subclasses for catalog families override the derivative providers with
    analytic formulas; this base class supplies finite-difference fallbacks
    with step ``fd_step`` (default 1e-5 of the domain span).
    """

    name = "chart"
    family = "generic"

    def __init__(self, domain: Domain,
                 E: Callable, G: Callable, e: Callable, g: Callable,
                 embedding: Callable, normal: Callable | None = None,
                 fd_step: float | None = None, name: str | None = None):
        self.domain = domain
        self._E, self._G, self._e, self._g = E, G, e, g
        self._embedding = embedding
        self._normal = normal
        span = domain.span()
        self.fd_step = fd_step if fd_step is not None else 1e-5 * (span if math.isfinite(span) else 1.0)
        if name is not None:
            self.name = name

    # -- chart coefficients ------------------------------------------------
    def E(self, u, v):
        return self._E(u, v)

    def G(self, u, v):
        return self._G(u, v)

    def e(self, u, v):
        return self._e(u, v)

    def g(self, u, v):
        return self._g(u, v)

    # -- curvatures and derivatives ----------------------------------------
    def k1(self, u, v):
        return self.e(u, v) / self.E(u, v)

    def k2(self, u, v):
        return self.g(u, v) / self.G(u, v)

    def dk1_du(self, u, v):
        return partial_uv(self.k1, u, v, 1, 0, self.fd_step)

    def dk1_dv(self, u, v):
        return partial_uv(self.k1, u, v, 0, 1, self.fd_step)

    def dk2_du(self, u, v):
        return partial_uv(self.k2, u, v, 1, 0, self.fd_step)

    def dk2_dv(self, u, v):
        return partial_uv(self.k2, u, v, 0, 1, self.fd_step)

    def d2k1_du2(self, u, v):
        return central_derivative(lambda x: self.dk1_du(x, v), u, 10 * self.fd_step)

    def d2k2_dv2(self, u, v):
        return central_derivative(lambda y: self.dk2_dv(u, y), v, 10 * self.fd_step)

    def E_v(self, u, v):
        return partial_uv(self.E, u, v, 0, 1, self.fd_step)

    def G_u(self, u, v):
        return partial_uv(self.G, u, v, 1, 0, self.fd_step)

    # -- ambient data --------------------------------------------------------
    def embedding(self, u, v):
        return np.asarray(self._embedding(u, v), dtype=float)

    def embedding_jet(self, u, v):
        """Position and first partials (x, x_u, x_v); FD fallback."""
        h = self.fd_step
        x = self.embedding(u, v)
        xu = (self.embedding(u + h, v) - self.embedding(u - h, v)) / (2 * h)
        xv = (self.embedding(u, v + h) - self.embedding(u, v - h)) / (2 * h)
        return x, xu, xv

    def normal(self, u, v):
        if self._normal is not None:
            return np.asarray(self._normal(u, v), dtype=float)
        _, xu, xv = self.embedding_jet(u, v)
        n = -np.cross(xu, xv)
        return n / np.linalg.norm(n)

    # -- fast scalar path for the flow --------------------------------------
    def flow_terms(self, u: float, v: float):
        """(1/sqrt(E), 1/sqrt(G), k1, k2, dk1/du, dk2/dv) as plain floats."""
        E = float(self.E(u, v))
        G = float(self.G(u, v))
        return (1.0 / math.sqrt(E), 1.0 / math.sqrt(G),
                float(self.k1(u, v)), float(self.k2(u, v)),
                float(self.dk1_du(u, v)), float(self.dk2_dv(u, v)))

    # -- validation helpers -------------------------------------------------
    def require_interior(self, u: float, v: float) -> None:
        if not self.domain.contains(u, v):
            raise DomainError(f"({u}, {v}) outside open domain of {self.name}")

    def curvature_separation(self, u: float, v: float) -> float:
        k1 = float(self.k1(u, v))
        k2 = float(self.k2(u, v))
        return abs(k1 - k2) / max(abs(k1), abs(k2), 1.0)

    def require_non_umbilic(self, u: float, v: float) -> None:
        if self.curvature_separation(u, v) < UMBILIC_REL_TOL:
            raise UmbilicProximityError(
                f"umbilic proximity at ({u}, {v}) on {self.name}")

    def scan_window(self) -> Domain:
        """Bounded window used by grid scans; finite domains return themselves."""
        d = self.domain
        u0 = d.u_min if math.isfinite(d.u_min) else -math.pi
        u1 = d.u_max if math.isfinite(d.u_max) else math.pi
        v0 = d.v_min if math.isfinite(d.v_min) else -math.pi
        v1 = d.v_max if math.isfinite(d.v_max) else math.pi
        return Domain(u0, u1, v0, v1)


class GenericChartSurface(PrincipalChartSurface):
    """User-supplied chart; everything beyond E, G, e, g, embedding is FD."""
    family = "generic"


# --------------------------------------------------------------------------
# pointwise operations
# --------------------------------------------------------------------------

def principal_curvatures(surface: PrincipalChartSurface, u: float, v: float) -> tuple[float, float]:
    surface.require_interior(u, v)
    surface.require_non_umbilic(u, v)
    return float(surface.k1(u, v)), float(surface.k2(u, v))


def frame_scalars(surface: PrincipalChartSurface, u: float, v: float, alpha: float) -> FrameScalars:
    surface.require_interior(u, v)
    surface.require_non_umbilic(u, v)
    E = float(surface.E(u, v))
    G = float(surface.G(u, v))
    k1 = float(surface.k1(u, v))
    k2 = float(surface.k2(u, v))
    ca, sa = math.cos(alpha), math.sin(alpha)
    k_n = k1 * ca * ca + k2 * sa * sa
    tau_g = (k2 - k1) * ca * sa
    kg1 = -float(surface.E_v(u, v)) / (2.0 * E * math.sqrt(G))
    kg2 = float(surface.G_u(u, v)) / (2.0 * G * math.sqrt(E))
    mu = 0.5 * (k1 - k2)
    theta1 = (float(surface.dk1_du(u, v)) / math.sqrt(E)) / (mu * mu)
    theta2 = (float(surface.dk2_dv(u, v)) / math.sqrt(G)) / (mu * mu)
    return FrameScalars(k1, k2, k_n, tau_g, kg1, kg2, mu, theta1, theta2)


def codazzi_residuals(surface: PrincipalChartSurface, u: float, v: float) -> tuple[float, float]:
    """Compatibility residuals of the chart data; both vanish on genuine surfaces.

    res1 = dk1/dv - (E_v / 2E)(k2 - k1), res2 = dk2/du - (G_u / 2G)(k1 - k2).
    Used as a data-integrity gate for catalog and user charts.
    """
    surface.require_interior(u, v)
    E = float(surface.E(u, v))
    G = float(surface.G(u, v))
    k1 = float(surface.k1(u, v))
    k2 = float(surface.k2(u, v))
    res1 = float(surface.dk1_dv(u, v)) - float(surface.E_v(u, v)) / (2.0 * E) * (k2 - k1)
    res2 = float(surface.dk2_du(u, v)) - float(surface.G_u(u, v)) / (2.0 * G) * (k1 - k2)
    return res1, res2


def codazzi_gate(surface: PrincipalChartSurface, n: int = 10, tol: float = 1e-8,
                 window: Domain | None = None) -> float:
    """Max |Codazzi residual| over an n x n interior grid; raises above tol."""
    w = window or surface.scan_window()
    us = np.linspace(w.u_min, w.u_max, n + 2)[1:-1]
    vs = np.linspace(w.v_min, w.v_max, n + 2)[1:-1]
    worst = 0.0
    for u in us:
        for v in vs:
            try:
                r1, r2 = codazzi_residuals(surface, float(u), float(v))
            except UmbilicProximityError:
                continue
            worst = max(worst, abs(r1), abs(r2))
    if worst > tol:
        raise ChartError(f"Codazzi residual {worst:.3e} exceeds gate {tol:g} on {surface.name}")
    return worst


def conformal_fields_bracket_check(surface: PrincipalChartSurface, u: float, v: float,
                                   h: float | None = None) -> float:
    """Residual of the bracket identity for xi_i = X_i / mu.

    In the chart xi_1 = f1 d/du and xi_2 = f2 d/dv with f1 = 1/(mu sqrt(E)),
    f2 = 1/(mu sqrt(G)); the identity [xi1, xi2] = -(theta2 xi1 + theta1 xi2)/2
    becomes two scalar equations whose max residual is returned.
    """
    surface.require_interior(u, v)
    surface.require_non_umbilic(u, v)
    h = h if h is not None else 200 * surface.fd_step

    def f1(uu, vv):
        mu = 0.5 * (float(surface.k1(uu, vv)) - float(surface.k2(uu, vv)))
        return 1.0 / (mu * math.sqrt(float(surface.E(uu, vv))))

    def f2(uu, vv):
        mu = 0.5 * (float(surface.k1(uu, vv)) - float(surface.k2(uu, vv)))
        return 1.0 / (mu * math.sqrt(float(surface.G(uu, vv))))

    fs = frame_scalars(surface, u, v, 0.0)
    df1_dv = central_derivative(lambda y: f1(u, y), v, h)
    df2_du = central_derivative(lambda x: f2(x, v), u, h)
    res_u = -f2(u, v) * df1_dv + 0.5 * fs.theta2 * f1(u, v)
    res_v = f1(u, v) * df2_du + 0.5 * fs.theta1 * f2(u, v)
    return max(abs(res_u), abs(res_v))


def shape_operator_curvatures(surface: PrincipalChartSurface, u: float, v: float,
                              h: float | None = None) -> tuple[float, float]:
    """(k1, k2) from a finite-difference shape operator of the embedding.

    Independent of the chart coefficients e, g; used to cross-check them.
    Eigenvalues are returned ordered to match (e/E, g/G).
    """
    h = h if h is not None else 10 * surface.fd_step
    x, xu, xv = surface.embedding_jet(u, v)
    nu = (surface.normal(u + h, v) - surface.normal(u - h, v)) / (2 * h)
    nv = (surface.normal(u, v + h) - surface.normal(u, v - h)) / (2 * h)
    # first fundamental form and dN in the (xu, xv) basis
    I = np.array([[xu @ xu, xu @ xv], [xv @ xu, xv @ xv]])
    B = np.array([[nu @ xu, nu @ xv], [nv @ xu, nv @ xv]])
    S = -np.linalg.solve(I, B.T).T
    w = np.linalg.eigvals(S)
    w = np.sort(w.real)
    k1_chart = float(surface.k1(u, v))
    k2_chart = float(surface.k2(u, v))
    if abs(w[0] - k1_chart) + abs(w[1] - k2_chart) <= abs(w[1] - k1_chart) + abs(w[0] - k2_chart):
        return float(w[0]), float(w[1])
    return float(w[1]), float(w[0])


def chart_orthogonality_residual(surface: PrincipalChartSurface, u: float, v: float) -> tuple[float, float]:
    """Relative |<x_u, x_v>| and |<N_u, x_v>| -- both vanish in a principal chart."""
    h = 10 * surface.fd_step
    _, xu, xv = surface.embedding_jet(u, v)
    F = float(xu @ xv)
    scale = math.sqrt(float(xu @ xu) * float(xv @ xv))
    nu = (surface.normal(u + h, v) - surface.normal(u - h, v)) / (2 * h)
    f = float(nu @ xv)
    return abs(F) / scale, abs(f) / scale


def dilate(surface: PrincipalChartSurface, s: float) -> PrincipalChartSurface:
    """Surface scaled by a global dilation x -> s x (conformal smoke tests).

    First fundamental form picks up s^2, the second picks up s, so the
    curvatures scale by 1/s while conformal quantities are unchanged.
    """
    scaled = PrincipalChartSurface(
        surface.domain,
        E=lambda u, v: s * s * surface.E(u, v),
        G=lambda u, v: s * s * surface.G(u, v),
        e=lambda u, v: s * surface.e(u, v),
        g=lambda u, v: s * surface.g(u, v),
        embedding=lambda u, v: s * surface.embedding(u, v),
        normal=surface.normal,
        fd_step=surface.fd_step,
        name=f"{surface.name}*{s:g}",
    )
    scaled.family = surface.family
    # analytic derivative providers carry over with the 1/s curvature scaling
    scaled.k1 = lambda u, v: surface.k1(u, v) / s
    scaled.k2 = lambda u, v: surface.k2(u, v) / s
    scaled.dk1_du = lambda u, v: surface.dk1_du(u, v) / s
    scaled.dk1_dv = lambda u, v: surface.dk1_dv(u, v) / s
    scaled.dk2_du = lambda u, v: surface.dk2_du(u, v) / s
    scaled.dk2_dv = lambda u, v: surface.dk2_dv(u, v) / s
    scaled.d2k1_du2 = lambda u, v: surface.d2k1_du2(u, v) / s
    scaled.d2k2_dv2 = lambda u, v: surface.d2k2_dv2(u, v) / s
    scaled.E_v = lambda u, v: s * s * surface.E_v(u, v)
    scaled.G_u = lambda u, v: s * s * surface.G_u(u, v)
    return scaled
