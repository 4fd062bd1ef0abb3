"""Triaxial quadrics x^2/a + y^2/b + z^2/c = 1 in confocal principal charts.

Two chart presentations are provided per quadric:

* ``QuadricChart`` -- the classic confocal coordinates (u, v).  The chart
  covers one open octant (one sheet component for two-sheet hyperboloids);
  the coordinate-plane sections are chart boundaries where the cubic
  H(x) = (x - a)(x - b)(x - c) has roots and the metric blows up.

* ``QuadricAngleChart`` -- a globally smooth reparametrization that unfolds
  those boundaries.  Bounded coordinate bands [r1, r2] between roots of H are
  written t = (r1 + r2)/2 - ((r2 - r1)/2) cos(angle), unbounded bands t <= c
  as t = c - w^2.  Squared half-angle identities make the metric, curvatures
  and embedding real-analytic across the former boundaries, so trajectories
  can run over the whole surface (away from umbilics).  This is the chart
  the integrator uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chart import Domain, PrincipalChartSurface

KINDS = ("ellipsoid", "one_sheet", "two_sheet")


@dataclass(frozen=True)
class QuadricSpec:
    """Semi-axis-squared parameters with the admissible ordering per kind."""
    kind: str
    a: float
    b: float
    c: float

    def __post_init__(self):
        a, b, c = self.a, self.b, self.c
        if self.kind == "ellipsoid":
            ok = a > b > c > 0
        elif self.kind == "one_sheet":
            ok = a > b > 0 > c
        elif self.kind == "two_sheet":
            ok = a > 0 > b > c
        else:
            raise ValueError(f"unknown quadric kind {self.kind!r}")
        if not ok:
            raise ValueError(f"parameter ordering violated for {self.kind}: a={a}, b={b}, c={c}")

    def H(self, x):
        return (x - self.a) * (x - self.b) * (x - self.c)

    @property
    def u_range(self) -> tuple[float, float]:
        if self.kind == "two_sheet":
            return (self.c, self.b)
        return (self.b, self.a)

    @property
    def v_range(self) -> tuple[float, float]:
        if self.kind == "ellipsoid":
            return (self.c, self.b)
        return (-math.inf, self.c)

    def umbilic_points(self) -> list[np.ndarray]:
        a, b, c = self.a, self.b, self.c
        if self.kind == "ellipsoid":
            x0 = math.sqrt(a * (a - b) / (a - c))
            z0 = math.sqrt(c * (b - c) / (a - c))
            return [np.array([sx * x0, 0.0, sz * z0]) for sx in (1, -1) for sz in (1, -1)]
        if self.kind == "two_sheet":
            # chart corner u = v = c on the positive sheet
            x0 = math.sqrt(a * (a - c) / (a - b))
            y0 = math.sqrt(-b * (b - c) / (a - b))
            return [np.array([x0, sy * y0, 0.0]) for sy in (1, -1)]
        return []  # one-sheet hyperboloids have no real umbilics


def _curv(spec: QuadricSpec, u, v):
    w = np.sqrt(spec.a * spec.b * spec.c / (u * v))
    return w / u, w / v


class QuadricChart(PrincipalChartSurface):
    """Classic confocal chart on one octant, with analytic partials.

    The embedding takes branch signs (sx, sy, sz) selecting the octant; the
    default (+, +, +) octant is used unless overridden.  P1 is the v = const
    family (normal curvature k1 = e/E).
    """

    family = "quadric"

    def __init__(self, spec: QuadricSpec, branch=(1, 1, 1)):
        self.spec = spec
        self.branch = tuple(branch)
        (u0, u1), (v0, v1) = spec.u_range, spec.v_range
        domain = Domain(u0, u1, v0, v1)
        super().__init__(domain, E=None, G=None, e=None, g=None, embedding=None,
                         name=f"{spec.kind}({spec.a:g},{spec.b:g},{spec.c:g})")
        span = min(u1 - u0, 1.0 if not math.isfinite(v1 - v0) else v1 - v0)
        self.fd_step = 1e-5 * span
        self.angle_chart = QuadricAngleChart(spec)

    # chart coefficients ----------------------------------------------------
    def E(self, u, v):
        return (v - u) * u / (4.0 * self.spec.H(u))

    def G(self, u, v):
        return (u - v) * v / (4.0 * self.spec.H(v))

    def e(self, u, v):
        return self.E(u, v) * self.k1(u, v)

    def g(self, u, v):
        return self.G(u, v) * self.k2(u, v)

    def k1(self, u, v):
        return _curv(self.spec, u, v)[0]

    def k2(self, u, v):
        return _curv(self.spec, u, v)[1]

    def dk1_du(self, u, v):
        return -1.5 * self.k1(u, v) / u

    def dk1_dv(self, u, v):
        return -0.5 * self.k1(u, v) / v

    def dk2_du(self, u, v):
        return -0.5 * self.k2(u, v) / u

    def dk2_dv(self, u, v):
        return -1.5 * self.k2(u, v) / v

    def d2k1_du2(self, u, v):
        return 3.75 * self.k1(u, v) / (u * u)

    def d2k2_dv2(self, u, v):
        return 3.75 * self.k2(u, v) / (v * v)

    def E_v(self, u, v):
        return u / (4.0 * self.spec.H(u))

    def G_u(self, u, v):
        return v / (4.0 * self.spec.H(v))

    # ambient ---------------------------------------------------------------
    def embedding(self, u, v):
        a, b, c = self.spec.a, self.spec.b, self.spec.c
        sx, sy, sz = self.branch
        x2 = a * (u - a) * (v - a) / ((b - a) * (c - a))
        y2 = b * (u - b) * (v - b) / ((b - a) * (b - c))
        z2 = c * (u - c) * (v - c) / ((c - a) * (c - b))
        arr = np.stack([sx * np.sqrt(np.abs(x2)),
                        sy * np.sqrt(np.abs(y2)),
                        sz * np.sqrt(np.abs(z2))], axis=-1)
        return arr

    def embedding_jet(self, u, v):
        a, b, c = self.spec.a, self.spec.b, self.spec.c
        x = self.embedding(u, v)
        xu = x * np.array([0.5 / (u - a), 0.5 / (u - b), 0.5 / (u - c)])
        xv = x * np.array([0.5 / (v - a), 0.5 / (v - b), 0.5 / (v - c)])
        return x, xu, xv

    def normal(self, u, v):
        # Gradient direction of the defining quadratic form, oriented so the
        # chart curvatures equal the closed forms (inward for the ellipsoid).
        p = self.embedding(u, v)
        n = -np.stack([p[..., 0] / self.spec.a,
                       p[..., 1] / self.spec.b,
                       p[..., 2] / self.spec.c], axis=-1)
        return n / np.linalg.norm(n, axis=-1, keepdims=True)

    def flow_terms(self, u, v):
        spec = self.spec
        w = math.sqrt(spec.a * spec.b * spec.c / (u * v))
        k1 = w / u
        k2 = w / v
        E = (v - u) * u / (4.0 * spec.H(u))
        G = (u - v) * v / (4.0 * spec.H(v))
        return (1.0 / math.sqrt(E), 1.0 / math.sqrt(G), k1, k2,
                -1.5 * k1 / u, -1.5 * k2 / v)


class QuadricAngleChart(PrincipalChartSurface):
    """Smooth global chart (p, q) for quadric integration.

    p parametrizes the bounded u-band: u = um - uh*cos(p).  For the ellipsoid
    q does the same for v; for the hyperboloids v = c - q^2.  Computations
    reduce to the classic confocal quantities evaluated at (u(p), v(q)),
    rescaled with the substitution Jacobians, whose squares cancel the metric
    poles at the band endpoints.
    """

    family = "quadric"

    def __init__(self, spec: QuadricSpec):
        self.spec = spec
        u0, u1 = spec.u_range
        self.um, self.uh = 0.5 * (u0 + u1), 0.5 * (u1 - u0)
        self.v_is_angle = spec.kind == "ellipsoid"
        if self.v_is_angle:
            v0, v1 = spec.v_range
            self.vm, self.vh = 0.5 * (v0 + v1), 0.5 * (v1 - v0)
        domain = Domain(-math.inf, math.inf, -math.inf, math.inf)
        super().__init__(domain, E=None, G=None, e=None, g=None, embedding=None,
                         name=f"{spec.kind}({spec.a:g},{spec.b:g},{spec.c:g})[smooth]")
        self.fd_step = 1e-6
        # third root left over after the substitution cancels the band roots
        self.u_third = spec.c if spec.kind != "two_sheet" else spec.a

    # substitutions ----------------------------------------------------------
    def u_of(self, p):
        return self.um - self.uh * np.cos(p)

    def du_dp(self, p):
        return self.uh * np.sin(p)

    def d2u_dp2(self, p):
        return self.uh * np.cos(p)

    def v_of(self, q):
        if self.v_is_angle:
            return self.vm - self.vh * np.cos(q)
        return self.spec.c - q * q

    def dv_dq(self, q):
        if self.v_is_angle:
            return self.vh * np.sin(q)
        return -2.0 * q

    def d2v_dq2(self, q):
        if self.v_is_angle:
            return self.vh * np.cos(q)
        return -2.0 * np.ones_like(np.asarray(q, dtype=float))

    def classic_uv(self, p, q):
        return self.u_of(p), self.v_of(q)

    # chart coefficients ------------------------------------------------------
    def E(self, p, q):
        u, v = self.classic_uv(p, q)
        if self.spec.kind == "two_sheet":
            return (v - u) * u / (4.0 * (self.spec.a - u))
        return (u - v) * u / (4.0 * (u - self.spec.c))

    def G(self, p, q):
        u, v = self.classic_uv(p, q)
        if self.v_is_angle:
            return (u - v) * v / (4.0 * (self.spec.a - v))
        return (u - v) * (-v) / ((self.spec.a - v) * (self.spec.b - v))

    def e(self, p, q):
        return self.E(p, q) * self.k1(p, q)

    def g(self, p, q):
        return self.G(p, q) * self.k2(p, q)

    def k1(self, p, q):
        return _curv(self.spec, *self.classic_uv(p, q))[0]

    def k2(self, p, q):
        return _curv(self.spec, *self.classic_uv(p, q))[1]

    def dk1_du(self, p, q):
        u, v = self.classic_uv(p, q)
        return -1.5 * _curv(self.spec, u, v)[0] / u * self.du_dp(p)

    def dk1_dv(self, p, q):
        u, v = self.classic_uv(p, q)
        return -0.5 * _curv(self.spec, u, v)[0] / v * self.dv_dq(q)

    def dk2_du(self, p, q):
        u, v = self.classic_uv(p, q)
        return -0.5 * _curv(self.spec, u, v)[1] / u * self.du_dp(p)

    def dk2_dv(self, p, q):
        u, v = self.classic_uv(p, q)
        return -1.5 * _curv(self.spec, u, v)[1] / v * self.dv_dq(q)

    def d2k1_du2(self, p, q):
        u, v = self.classic_uv(p, q)
        k1 = _curv(self.spec, u, v)[0]
        up = self.du_dp(p)
        return 3.75 * k1 / (u * u) * up * up + (-1.5 * k1 / u) * self.d2u_dp2(p)

    def d2k2_dv2(self, p, q):
        u, v = self.classic_uv(p, q)
        k2 = _curv(self.spec, u, v)[1]
        vq = self.dv_dq(q)
        return 3.75 * k2 / (v * v) * vq * vq + (-1.5 * k2 / v) * self.d2v_dq2(q)

    def E_v(self, p, q):
        u, v = self.classic_uv(p, q)
        if self.spec.kind == "two_sheet":
            return u / (4.0 * (self.spec.a - u)) * self.dv_dq(q)
        return -u / (4.0 * (u - self.spec.c)) * self.dv_dq(q)

    def G_u(self, p, q):
        u, v = self.classic_uv(p, q)
        if self.v_is_angle:
            return v / (4.0 * (self.spec.a - v)) * self.du_dp(p)
        return -v / ((self.spec.a - v) * (self.spec.b - v)) * self.du_dp(p)

    # ambient ------------------------------------------------------------------
    def embedding(self, p, q):
        a, b, c = self.spec.a, self.spec.b, self.spec.c
        u, v = self.classic_uv(p, q)
        kind = self.spec.kind
        if kind == "ellipsoid":
            x = np.sqrt(a * (a - v) / (a - c)) * np.cos(p / 2)
            y = math.sqrt(b) * np.sin(p / 2) * np.cos(q / 2)
            z = np.sqrt(c * (u - c) / (a - c)) * np.sin(q / 2)
        elif kind == "one_sheet":
            x = np.sqrt(a * (a - v) / (a - c)) * np.cos(p / 2)
            y = np.sqrt(b * (b - v) / (b - c)) * np.sin(p / 2)
            z = q * np.sqrt(-c * (u - c) / ((a - c) * (b - c)))
        else:  # two_sheet, positive-x sheet
            x = np.sqrt(a * (a - u) * (a - v) / ((a - b) * (a - c)))
            y = np.sqrt(-b * (b - v) / (a - b)) * np.cos(p / 2)
            z = math.sqrt(-c / (a - c)) * np.sin(p / 2) * q
        return np.stack([x, y, z], axis=-1)

    def embedding_jet(self, p, q):
        a, b, c = self.spec.a, self.spec.b, self.spec.c
        u, v = self.classic_uv(p, q)
        up, vq = self.du_dp(p), self.dv_dq(q)
        kind = self.spec.kind
        x = self.embedding(p, q)
        if kind == "ellipsoid":
            Ax = math.sqrt(a * (a - v) / (a - c))
            Az = math.sqrt(c * (u - c) / (a - c))
            xu = np.array([-0.5 * Ax * math.sin(p / 2),
                           0.5 * math.sqrt(b) * math.cos(p / 2) * math.cos(q / 2),
                           Az / (2 * (u - c)) * up * math.sin(q / 2)])
            xv = np.array([-Ax / (2 * (a - v)) * vq * math.cos(p / 2),
                           -0.5 * math.sqrt(b) * math.sin(p / 2) * math.sin(q / 2),
                           0.5 * Az * math.cos(q / 2)])
        elif kind == "one_sheet":
            Ax = math.sqrt(a * (a - v) / (a - c))
            Ay = math.sqrt(b * (b - v) / (b - c))
            Bz = math.sqrt(-c * (u - c) / ((a - c) * (b - c)))
            xu = np.array([-0.5 * Ax * math.sin(p / 2),
                           0.5 * Ay * math.cos(p / 2),
                           q * Bz / (2 * (u - c)) * up])
            xv = np.array([Ax * q / (a - v) * math.cos(p / 2),
                           Ay * q / (b - v) * math.sin(p / 2),
                           Bz])
        else:
            Cy = math.sqrt(-b * (b - v) / (a - b))
            sc = math.sqrt(-c / (a - c))
            xu = np.array([-x[0] / (2 * (a - u)) * up,
                           -0.5 * Cy * math.sin(p / 2),
                           0.5 * sc * math.cos(p / 2) * q])
            xv = np.array([x[0] * q / (a - v),
                           Cy * q / (b - v) * math.cos(p / 2),
                           sc * math.sin(p / 2)])
        return x, xu, xv

    def normal(self, p, q):
        pt = self.embedding(p, q)
        n = -np.stack([pt[..., 0] / self.spec.a,
                       pt[..., 1] / self.spec.b,
                       pt[..., 2] / self.spec.c], axis=-1)
        return n / np.linalg.norm(n, axis=-1, keepdims=True)

    def flow_terms(self, p, q):
        spec = self.spec
        a, c = spec.a, spec.c
        u = self.um - self.uh * math.cos(p)
        up = self.uh * math.sin(p)
        if self.v_is_angle:
            v = self.vm - self.vh * math.cos(q)
            vq = self.vh * math.sin(q)
            G = (u - v) * v / (4.0 * (a - v))
        else:
            v = c - q * q
            vq = -2.0 * q
            G = (u - v) * (-v) / ((a - v) * (spec.b - v))
        if spec.kind == "two_sheet":
            E = (v - u) * u / (4.0 * (a - u))
        else:
            E = (u - v) * u / (4.0 * (u - c))
        w = math.sqrt(spec.a * spec.b * spec.c / (u * v))
        k1 = w / u
        k2 = w / v
        return (1.0 / math.sqrt(E), 1.0 / math.sqrt(G), k1, k2,
                -1.5 * k1 / u * up, -1.5 * k2 / v * vq)

    def scan_window(self) -> Domain:
        if self.v_is_angle:
            return Domain(-0.5 * math.pi, 1.5 * math.pi, -0.5 * math.pi, 1.5 * math.pi)
        qmax = math.sqrt(2.0 * (self.spec.b - self.spec.c))
        return Domain(-0.5 * math.pi, 1.5 * math.pi, -qmax, qmax)


def make_quadric(spec: QuadricSpec | None = None, *, kind: str | None = None,
                 a: float | None = None, b: float | None = None, c: float | None = None,
                 branch=(1, 1, 1)) -> QuadricChart:
    """Build the classic confocal chart (with .angle_chart attached)."""
    if spec is None:
        spec = QuadricSpec(kind=kind, a=a, b=b, c=c)
    return QuadricChart(spec, branch=branch)
