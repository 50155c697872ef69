"""Compiled iteration loops for the smooth catalog entries.

The drivers fall back to these numba kernels for long runs (>= ~5e4 steps);
they implement exactly the same bisection-plus-Newton-polish step as the pure
Python path in :mod:`slowrate.prox_engine`, specialized to the catalog
functions identified by small integer codes.  Iterates are always positive
here, so no kink or threshold handling is needed.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .funlib import K_CIRCLE, K_COSH, K_EXP_ABS, K_FLAT, K_POWER_P, K_POWER_Q

STOP_BUDGET = 0
STOP_UNDERFLOW = 1
STOP_FIXED_POINT = 2

_SHRINK = 1.0 - 1e-12
_MAX_BISECT = 200
_NEWTON_STEPS = 3


@njit(cache=True)
def _fval(code: int, a: float, x: float) -> float:
    if code == K_POWER_Q:
        return x ** a
    if code == K_POWER_P:
        return x ** a / a
    if code == K_CIRCLE:
        return x * x / (a + math.sqrt(max(a * a - x * x, 0.0)))
    if code == K_EXP_ABS:
        return math.expm1(x) - x
    if code == K_COSH:
        s = math.sinh(0.5 * x)
        return 2.0 * s * s
    # flat
    if x == 0.0:
        return 0.0
    return math.exp(-1.0 / (x * x))


@njit(cache=True)
def _fder(code: int, a: float, x: float) -> float:
    if code == K_POWER_Q:
        return a * x ** (a - 1.0)
    if code == K_POWER_P:
        return x ** (a - 1.0)
    if code == K_CIRCLE:
        s = a * a - x * x
        if s <= 0.0:
            return math.inf
        return x / math.sqrt(s)
    if code == K_EXP_ABS:
        return math.expm1(x)
    if code == K_COSH:
        return math.sinh(x)
    if x == 0.0:
        return 0.0
    return math.exp(-1.0 / (x * x)) * 2.0 / (x * x * x)


@njit(cache=True)
def _fder2(code: int, a: float, x: float) -> float:
    if code == K_POWER_Q:
        return a * (a - 1.0) * x ** (a - 2.0)
    if code == K_POWER_P:
        return (a - 1.0) * x ** (a - 2.0)
    if code == K_CIRCLE:
        s = a * a - x * x
        if s <= 0.0:
            return math.inf
        return a * a / s ** 1.5
    if code == K_EXP_ABS:
        return math.exp(x)
    if code == K_COSH:
        return math.cosh(x)
    if x == 0.0:
        return 0.0
    x2 = x * x
    return math.exp(-1.0 / x2) * (4.0 - 6.0 * x2) / (x2 * x2 * x2)


@njit(cache=True)
def _step_root(code: int, a: float, x: float, r: float, mode: int, dom_hi: float) -> float:
    """Root of the step equation on (0, min(x, dom_hi)).

    mode 0 (PPA):  y + f'(y) = x
    mode 1 (MAP):  y + f(y) f'(y) = x
    mode 2 (DRA):  y + (r + f(y)) f'(y) = x
    """
    hi = x
    if dom_hi < hi:
        hi = dom_hi * _SHRINK
    lo = 0.0
    for it in range(_MAX_BISECT):
        if lo > 0.0 and hi - lo <= 1e-15 * lo:
            break
        if lo == 0.0 and it >= 40:
            # superlinear steps put the root far below the bracket; descend
            # geometrically until it is bracketed from below
            mid = hi * 2.0**-40
        else:
            mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        d = _fder(code, a, mid)
        if mode == 0:
            res = mid + d - x
        elif mode == 1:
            res = mid + _fval(code, a, mid) * d - x
        else:
            res = mid + (r + _fval(code, a, mid)) * d - x
        if res < 0.0:
            lo = mid
        else:
            hi = mid
    y = 0.5 * (lo + hi)
    if y <= 0.0:
        y = hi
    for _ in range(_NEWTON_STEPS):
        d = _fder(code, a, y)
        d2 = _fder2(code, a, y)
        if mode == 0:
            res = y + d - x
            slope = 1.0 + d2
        elif mode == 1:
            v = _fval(code, a, y)
            res = y + v * d - x
            slope = 1.0 + d * d + v * d2
        else:
            v = _fval(code, a, y)
            res = y + (r + v) * d - x
            slope = 1.0 + d * d + (r + v) * d2
        if not (math.isfinite(res) and math.isfinite(slope)) or slope <= 0.0:
            break
        y_next = y - res / slope
        if not (lo < y_next < hi) or y_next == y:
            break
        y = y_next
    return y


@njit(cache=True)
def scalar_loop(code: int, a: float, x0: float, max_iter: int, floor: float,
                dom_hi: float, mode: int):
    """Run a PPA (mode 0) or MAP (mode 1) iteration; returns (xs, stop)."""
    xs = np.empty(max_iter + 1)
    xs[0] = x0
    x = x0
    n = 1
    stop = STOP_BUDGET
    for _ in range(max_iter):
        y = _step_root(code, a, x, 0.0, mode, dom_hi)
        if y < floor:
            stop = STOP_UNDERFLOW
            break
        if y >= x:
            stop = STOP_FIXED_POINT
            break
        xs[n] = y
        n += 1
        x = y
    return xs[:n], stop


@njit(cache=True)
def dra_loop(code: int, a: float, x0: float, max_iter: int, floor: float,
             dom_hi: float):
    """Run the Douglas-Rachford recursion; returns (xs, rs, stop)."""
    xs = np.empty(max_iter + 1)
    rs = np.empty(max_iter + 1)
    xs[0] = x0
    rs[0] = 0.0
    x = x0
    r = 0.0
    n = 1
    stop = STOP_BUDGET
    for _ in range(max_iter):
        y = _step_root(code, a, x, r, 2, dom_hi)
        if y < floor:
            stop = STOP_UNDERFLOW
            break
        if y >= x:
            stop = STOP_FIXED_POINT
            break
        r = r + _fval(code, a, y)
        xs[n] = y
        rs[n] = r
        n += 1
        x = y
    return xs[:n], rs[:n], stop
