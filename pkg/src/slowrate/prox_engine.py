"""Proximal mappings and the projection onto an epigraph, via safeguarded
monotone root-finding.

Both solvers work on strictly increasing scalar maps (the resolvent equation
y + t f'(y) = x and the epigraph optimality equation y + (f(y) - r) f'(y) = x),
so plain bisection to a certified bracket width is unconditionally safe; a
fixed number of Newton steps then sharpens the root to machine-relative
accuracy, which the long iterations in :mod:`slowrate.drivers` rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

from .funlib import ScalarConvexFunction

__all__ = ["ProxConfig", "PlanePoint", "prox", "project_epigraph", "project_A", "reflect_A"]

INF = math.inf

# keep an open sliver below a finite domain endpoint so derivative blowups
# (circle) are never evaluated at the boundary itself
_BOUNDARY_SHRINK = 1.0 - 1e-12


@dataclass(frozen=True)
class ProxConfig:
    """Root-finder tolerances shared by prox and epigraph projection."""

    abs_tol: float = 1e-14
    rel_tol: float = 1e-14
    max_bisections: int = 200
    newton_polish_steps: int = 3

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise ValueError("tolerances must be positive")
        if self.max_bisections < 60:
            raise ValueError("max_bisections must be at least 60")


DEFAULT_CONFIG = ProxConfig()


class PlanePoint(NamedTuple):
    """A point (x, r) of the Euclidean plane."""

    x: float
    r: float


def _solve_increasing(
    phi: Callable[[float], float],
    dphi: Callable[[float], float] | None,
    hi: float,
    cfg: ProxConfig,
) -> float:
    """Root of an increasing map phi on (0, hi] with phi(0+) < 0 <= phi(hi).

    Bisection shrinks the bracket until its width is small relative to the
    bracketed root (an absolute width is meaningless for the tiny roots of
    superlinear steps) or adjacent floats are reached; Newton polish (when a
    derivative is supplied) then pushes the root to ~1 ulp.
    """
    lo = 0.0
    rel_tol = max(cfg.abs_tol, cfg.rel_tol)
    for it in range(cfg.max_bisections):
        if lo > 0.0 and hi - lo <= rel_tol * lo:
            break
        if lo == 0.0 and it >= 40:
            # root is far below the bracket (superlinear steps); descend
            # geometrically until it is bracketed from below
            mid = hi * 2.0**-40
        else:
            mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # float resolution reached
            break
        if phi(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    y = 0.5 * (lo + hi)
    if y <= 0.0:
        y = hi
    if dphi is not None:
        for _ in range(cfg.newton_polish_steps):
            fval = phi(y)
            dval = dphi(y)
            if not (math.isfinite(fval) and math.isfinite(dval)) or dval <= 0.0:
                break
            step = fval / dval
            y_next = y - step
            if not (lo < y_next < hi) or y_next == y:
                break
            y = y_next
    return y


def _upper_bracket(f: ScalarConvexFunction, x: float) -> float:
    hi = f.domain[1]
    if math.isinf(hi):
        return x
    return min(x, hi * _BOUNDARY_SHRINK)


def prox(
    f: ScalarConvexFunction,
    t: float,
    x: float,
    cfg: ProxConfig = DEFAULT_CONFIG,
) -> float:
    """The unique minimizer of t*f(y) + (1/2)(x - y)^2.

    Uses the catalog closed form when available.  Otherwise the minimizer is 0
    exactly when |x| <= t * f'_+(0), and for larger |x| it is the root of
    y + t f'(y) = x, which lies strictly between 0 and |x|.
    """
    if not (t > 0.0):
        raise ValueError(f"prox scale t must be positive, got {t}")
    if not math.isfinite(x):
        raise ValueError(f"prox input must be finite, got {x}")
    if f.closed_form_prox is not None:
        return f.closed_form_prox(t, x)

    fp0 = f.right_derivative_at_zero
    if abs(x) <= t * fp0 or x == 0.0:
        return 0.0

    sign = 1.0 if x > 0.0 else -1.0
    ax = abs(x)
    hi = _upper_bracket(f, ax)

    der = f.derivative
    dom_hi = f.domain[1]
    if math.isfinite(dom_hi):
        # the minimizer sits on the domain boundary once x exceeds the range
        # of y + t f'(y); only possible when f' stays finite at the boundary
        edge_slope = der(dom_hi)
        if math.isfinite(edge_slope) and dom_hi + t * edge_slope <= ax:
            return sign * dom_hi

    def phi(y: float) -> float:
        return y + t * der(y) - ax

    dphi = None
    if f.second_derivative is not None:
        sec = f.second_derivative

        def dphi(y: float) -> float:
            return 1.0 + t * sec(y)

    y = _solve_increasing(phi, dphi, hi, cfg)
    return sign * y


def project_epigraph(
    f: ScalarConvexFunction,
    pt: PlanePoint,
    cfg: ProxConfig = DEFAULT_CONFIG,
) -> PlanePoint:
    """Nearest point of the epigraph of f to pt = (x, r).

    Points already in the epigraph are returned unchanged.  For outside points
    with x in the domain closure the projection is (y, f(y)) with y solving
    x = y + (f(y) - r) f'(y); y = 0 exactly when x = 0, and y = 0 can also
    occur for r < 0 through the subgradient interval at a kink.
    """
    x, r = float(pt[0]), float(pt[1])
    if not (math.isfinite(x) and math.isfinite(r)):
        raise ValueError(f"plane point must be finite, got ({x}, {r})")
    if f.closed_form_epigraph_projection is not None:
        y, s = f.closed_form_epigraph_projection(x, r)
        return PlanePoint(y, s)
    if not f.in_domain(x):
        raise ValueError(
            f"abscissa {x} outside the domain {list(f.domain)} of {f.label}"
        )
    fx = f.value(x)
    if r >= fx:
        return PlanePoint(x, r)
    if x == 0.0:
        return PlanePoint(0.0, 0.0)
    fp0 = f.right_derivative_at_zero
    if r < 0.0 and fp0 > 0.0 and abs(x) <= -r * fp0:
        return PlanePoint(0.0, 0.0)

    sign = 1.0 if x > 0.0 else -1.0
    ax = abs(x)
    hi = _upper_bracket(f, ax)
    val, der = f.value, f.derivative

    def phi(y: float) -> float:
        return y + (val(y) - r) * der(y) - ax

    dphi = None
    if f.second_derivative is not None:
        sec = f.second_derivative

        def dphi(y: float) -> float:
            d = der(y)
            return 1.0 + d * d + (val(y) - r) * sec(y)

    y = _solve_increasing(phi, dphi, hi, cfg)
    return PlanePoint(sign * y, val(y))


def project_A(pt: PlanePoint) -> PlanePoint:
    """Projection onto the real axis: (x, r) -> (x, 0)."""
    return PlanePoint(pt[0], 0.0)


def reflect_A(pt: PlanePoint) -> PlanePoint:
    """Reflection through the real axis: (x, r) -> (x, -r)."""
    return PlanePoint(pt[0], -pt[1])
