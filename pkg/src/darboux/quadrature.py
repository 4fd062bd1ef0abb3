"""Quadrature and finite-difference helpers shared across the package.

The integrals arising from confocal charts have inverse-square-root
singularities at interval endpoints (simple roots of the cubic H).  They are
regularized by the substitution x = endpoint +/- t**2 and then evaluated with
an adaptively refined composite Simpson rule, which keeps results
deterministic and lets tests check self-convergence under grid halving.
"""

from __future__ import annotations

import math
from typing import Callable


class QuadratureError(RuntimeError):
    pass


def _simpson_refine(f: Callable[[float], float], a: float, b: float,
                    tol: float, max_doublings: int = 22) -> tuple[float, float]:
    """Composite Simpson with panel doubling until two refinements agree."""
    n = 8
    h = (b - a) / n
    xs = [a + i * h for i in range(n + 1)]
    fs = [f(x) for x in xs]
    total = fs[0] + fs[-1] + 4.0 * sum(fs[1:-1:2]) + 2.0 * sum(fs[2:-1:2])
    prev = total * h / 3.0
    for _ in range(max_doublings):
        # new midpoints only
        mids = [a + (i + 0.5) * h for i in range(n)]
        fm = [f(x) for x in mids]
        # Simpson on doubled grid reuses old values: S = (h/6)(ends + 2*interior + 4*mids)
        interior = sum(fs[1:-1])
        cur = (h / 6.0) * (fs[0] + fs[-1] + 2.0 * interior + 4.0 * sum(fm))
        # interleave for the next round
        new_fs = []
        for i in range(n):
            new_fs.append(fs[i])
            new_fs.append(fm[i])
        new_fs.append(fs[-1])
        fs = new_fs
        n *= 2
        h *= 0.5
        err = abs(cur - prev)
        if err < tol * max(1.0, abs(cur)):
            return cur, err
        prev = cur
    raise QuadratureError(f"composite Simpson did not converge to {tol:g} on [{a}, {b}]")


def integrate_sqrt_endpoints(f: Callable[[float], float], a: float, b: float,
                             singular_left: bool = False, singular_right: bool = False,
                             tol: float = 1e-12, reduced_left: Callable | None = None,
                             reduced_right: Callable | None = None) -> float:
    """Integrate f on [a, b] where f may blow up like 1/sqrt(distance) at an endpoint.

    Singular ends are absorbed by x = a + t^2 (resp. x = b - t^2); the interval
    is split at the midpoint when both ends are singular.  ``reduced_left`` /
    ``reduced_right``, when given, must evaluate f(x) * sqrt(|x - endpoint|)
    in a cancellation-free form; the substituted integrand then keeps full
    precision arbitrarily close to the endpoint.  Without them the endpoint
    node is filled by extrapolation, which costs a few digits.
    """
    if not (b > a):
        if b == a:
            return 0.0
        raise ValueError("integrate_sqrt_endpoints expects a < b")
    if singular_left and singular_right:
        mid = 0.5 * (a + b)
        return (integrate_sqrt_endpoints(f, a, mid, True, False, tol,
                                         reduced_left=reduced_left)
                + integrate_sqrt_endpoints(f, mid, b, False, True, tol,
                                           reduced_right=reduced_right))

    def substituted(end, sign, reduced):
        tmax = math.sqrt(b - a)
        if reduced is not None:
            def g(t):
                return 2.0 * reduced(end + sign * t * t)
        else:
            # the t = 0 node sits on the singular endpoint where f divides by
            # zero although 2 t f(end + sign t^2) has a finite limit; fill it
            # by extrapolation (delta balances truncation against the
            # cancellation in x - end, worth ~1e-8 node accuracy)
            delta = 6e-4 * max(tmax, 1.0)

            def g(t):
                if t <= 0.0:
                    g1 = 2.0 * delta * f(end + sign * delta * delta)
                    g2 = 4.0 * delta * f(end + sign * 4.0 * delta * delta)
                    g3 = 8.0 * delta * f(end + sign * 16.0 * delta * delta)
                    # quadratic Lagrange extrapolation from nodes d, 2d, 4d
                    return (8.0 * g1 - 6.0 * g2 + g3) / 3.0
                return 2.0 * t * f(end + sign * t * t)
        val, _ = _simpson_refine(g, 0.0, tmax, tol)
        return val

    if singular_left:
        return substituted(a, 1.0, reduced_left)
    if singular_right:
        return substituted(b, -1.0, reduced_right)
    val, _ = _simpson_refine(f, a, b, tol)
    return val


def cumulative_sqrt_left(f: Callable[[float], float], a: float, xs,
                         tol: float = 1e-12) -> list[float]:
    """Antiderivative F(x) = int_a^x f with a 1/sqrt singularity at a, for sorted xs > a."""
    out = []
    acc = 0.0
    prev = a
    first = True
    for x in xs:
        if x < prev:
            raise ValueError("xs must be nondecreasing")
        if x > prev:
            acc += integrate_sqrt_endpoints(f, prev, x, singular_left=first, tol=tol)
        out.append(acc)
        prev = x
        first = False
    return out


def central_derivative(f: Callable[[float], float], x: float, h: float,
                       order: int = 1, richardson: bool = True) -> float:
    """Central finite difference of first or second order, optionally Richardson-extrapolated."""
    def d(hh: float) -> float:
        if order == 1:
            return (f(x + hh) - f(x - hh)) / (2.0 * hh)
        if order == 2:
            return (f(x + hh) - 2.0 * f(x) + f(x - hh)) / (hh * hh)
        raise ValueError("order must be 1 or 2")

    if not richardson:
        return d(h)
    d1 = d(h)
    d2 = d(h / 2.0)
    return (4.0 * d2 - d1) / 3.0


def partial_uv(f: Callable[[float, float], float], u: float, v: float,
               du: int, dv: int, h: float, richardson: bool = True) -> float:
    """Mixed partial of f(u, v) up to total order 2 via nested central differences."""
    if du == 0 and dv == 0:
        return f(u, v)
    if dv == 0:
        return central_derivative(lambda x: f(x, v), u, h, order=du, richardson=richardson)
    if du == 0:
        return central_derivative(lambda y: f(u, y), v, h, order=dv, richardson=richardson)
    if du == 1 and dv == 1:
        g = lambda x: central_derivative(lambda y: f(x, y), v, h, order=1, richardson=richardson)
        return central_derivative(g, u, h, order=1, richardson=richardson)
    raise ValueError("unsupported derivative multi-index")


_D1_W = (1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0)
_D2_W = (-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0)


def grid_derivative(y, h: float, order: int = 1):
    """Fourth-order accurate derivative of uniformly sampled data (numpy array in, array out).

    One-sided second-order stencils fill the two boundary samples on each
    side; interior points use five-point central formulas.
    """
    import numpy as np

    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if n < 7:
        raise ValueError("grid too short for fourth-order differences")
    out = np.empty_like(y)
    if order == 1:
        out[2:-2] = (_D1_W[0] * y[:-4] + _D1_W[1] * y[1:-3]
                     + _D1_W[2] * y[3:-1] + _D1_W[3] * y[4:]) / h
        out[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h)
        out[1] = (y[2] - y[0]) / (2.0 * h)
        out[-2] = (y[-1] - y[-3]) / (2.0 * h)
        out[-1] = (3.0 * y[-1] - 4.0 * y[-2] + y[-3]) / (2.0 * h)
        return out
    if order == 2:
        h2 = h * h
        out[2:-2] = (_D2_W[0] * y[:-4] + _D2_W[1] * y[1:-3] + _D2_W[2] * y[2:-2]
                     + _D2_W[3] * y[3:-1] + _D2_W[4] * y[4:]) / h2
        out[0] = (y[0] - 2.0 * y[1] + y[2]) / h2
        out[1] = (y[0] - 2.0 * y[1] + y[2]) / h2
        out[-2] = (y[-3] - 2.0 * y[-2] + y[-1]) / h2
        out[-1] = (y[-3] - 2.0 * y[-2] + y[-1]) / h2
        return out
    raise ValueError("order must be 1 or 2")
