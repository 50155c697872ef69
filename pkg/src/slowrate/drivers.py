"""Iteration drivers for the proximal point algorithm, alternating
projections, and Douglas-Rachford on the plane geometry (real axis versus
epigraph), plus the per-step Fejer monotonicity checker.

Traces hold the full iterate history as float arrays.  Long runs on smooth
catalog entries are dispatched to the compiled kernels; the pure Python path
remains the reference implementation and is used for everything else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .funlib import ScalarConvexFunction, tilted
from .prox_engine import (
    DEFAULT_CONFIG,
    PlanePoint,
    ProxConfig,
    project_A,
    project_epigraph,
    prox,
    reflect_A,
)

__all__ = [
    "UNDERFLOW_FLOOR",
    "ScalarTrace",
    "PlaneTrace",
    "run_ppa",
    "run_map",
    "run_dra",
    "check_fejer",
    "FejerReport",
    "decimate_indices",
]

UNDERFLOW_FLOOR = 1e-300

# superlinear traces die in tens of steps and sublinear steps cost little, so
# compilation only pays off for long sublinear runs
_COMPILED_MIN_ITERS = 50_000

# accumulated root-finder drift over 1e6 logarithmic-rate steps must stay
# below the asymptotic-constant test tolerances, hence the tight per-step tol
_STEP_CFG = ProxConfig(abs_tol=1e-15, rel_tol=1e-15)

_STOP_NAMES = {
    _kernels.STOP_BUDGET: "budget",
    _kernels.STOP_UNDERFLOW: "underflow",
    _kernels.STOP_FIXED_POINT: "fixed_point",
}


@dataclass
class ScalarTrace:
    """Iterate history x_0..x_N of a scalar algorithm run."""

    algorithm: str
    function: ScalarConvexFunction
    x0: float
    xs: np.ndarray
    stop_reason: str

    def __len__(self) -> int:
        return len(self.xs)


@dataclass
class PlaneTrace:
    """Iterate history (x_n, r_n) of a plane algorithm run."""

    algorithm: str
    function: ScalarConvexFunction
    z0: PlanePoint
    xs: np.ndarray
    rs: np.ndarray
    stop_reason: str

    @property
    def shadow_xs(self) -> np.ndarray:
        """The governing scalar sequence (the abscissas)."""
        return self.xs

    @property
    def zs(self) -> list[PlanePoint]:
        return [PlanePoint(x, r) for x, r in zip(self.xs, self.rs)]

    def __len__(self) -> int:
        return len(self.xs)


def _validate_start(f: ScalarConvexFunction, x0: float, max_iter: int,
                    require_domain: bool) -> None:
    if not (math.isfinite(x0) and x0 > 0.0):
        raise ValueError(f"x0 must be a positive finite real, got {x0}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    if require_domain and f.closed_form_epigraph_projection is None:
        if not f.in_domain(x0):
            raise ValueError(
                f"x0={x0} outside the domain {list(f.domain)} of {f.label}"
            )


def _use_compiled(f: ScalarConvexFunction, max_iter: int, engine: str) -> bool:
    if engine == "python":
        return False
    if engine == "compiled":
        if f.kernel is None:
            raise ValueError(f"{f.label} has no compiled kernel")
        return True
    if engine != "auto":
        raise ValueError(f"engine must be auto, python, or compiled: {engine!r}")
    return f.kernel is not None and max_iter >= _COMPILED_MIN_ITERS


def run_ppa(
    f: ScalarConvexFunction,
    x0: float,
    max_iter: int,
    cfg: ProxConfig | None = None,
    engine: str = "auto",
) -> ScalarTrace:
    """Proximal point iteration x_{n+1} = prox of f at x_n (unit step).

    Stops at the iteration budget, at an exact zero (finite convergence), at
    the underflow floor, or when an iterate stops decreasing at float
    resolution (recorded as a numerical fixed point).
    """
    _validate_start(f, x0, max_iter, require_domain=False)
    cfg = cfg or _STEP_CFG
    if _use_compiled(f, max_iter, engine):
        code, a = f.kernel
        xs, stop = _kernels.scalar_loop(
            code, a, x0, max_iter, UNDERFLOW_FLOOR, f.domain[1], 0
        )
        return ScalarTrace("ppa", f, x0, xs, _STOP_NAMES[stop])

    xs = [x0]
    x = x0
    stop = "budget"
    for _ in range(max_iter):
        y = prox(f, 1.0, x, cfg)
        if y == 0.0:
            xs.append(0.0)
            stop = "fixed_point"
            break
        if y < UNDERFLOW_FLOOR:
            stop = "underflow"
            break
        if y >= x:
            stop = "fixed_point"
            break
        xs.append(y)
        x = y
    return ScalarTrace("ppa", f, x0, np.asarray(xs), stop)


def run_map(
    f: ScalarConvexFunction,
    x0: float,
    max_iter: int,
    cfg: ProxConfig | None = None,
    engine: str = "auto",
) -> PlaneTrace:
    """Alternating projections a_{n+1} = P_A P_B a_n started at (x0, 0)."""
    _validate_start(f, x0, max_iter, require_domain=True)
    cfg = cfg or _STEP_CFG
    if _use_compiled(f, max_iter, engine):
        code, a = f.kernel
        xs, stop = _kernels.scalar_loop(
            code, a, x0, max_iter, UNDERFLOW_FLOOR, f.domain[1], 1
        )
        return PlaneTrace("map", f, PlanePoint(x0, 0.0), xs,
                          np.zeros_like(xs), _STOP_NAMES[stop])

    xs = [x0]
    x = x0
    stop = "budget"
    for _ in range(max_iter):
        pb = project_epigraph(f, PlanePoint(x, 0.0), cfg)
        y = project_A(pb).x
        if y == 0.0:
            xs.append(0.0)
            stop = "fixed_point"
            break
        if y < UNDERFLOW_FLOOR:
            stop = "underflow"
            break
        if y >= x:
            stop = "fixed_point"
            break
        xs.append(y)
        x = y
    arr = np.asarray(xs)
    return PlaneTrace("map", f, PlanePoint(x0, 0.0), arr, np.zeros_like(arr), stop)


def run_dra(
    f: ScalarConvexFunction,
    x0: float,
    max_iter: int,
    cfg: ProxConfig | None = None,
    engine: str = "auto",
    route: str = "geometric",
) -> PlaneTrace:
    """Douglas-Rachford iteration z_{n+1} = (Id - P_A + P_B R_A) z_n from (x0, 0).

    The geometric route assembles the operator literally from the projections
    and the reflector.  The reduced route checks it by solving the equivalent
    scalar step: x_+ is the proximal point of r f + (1/2) f^2 at x, and
    r_+ = r + f(x_+).
    """
    _validate_start(f, x0, max_iter, require_domain=True)
    if route not in ("geometric", "reduced"):
        raise ValueError(f"route must be geometric or reduced, got {route!r}")
    cfg = cfg or _STEP_CFG
    if route == "geometric" and _use_compiled(f, max_iter, engine):
        code, a = f.kernel
        xs, rs, stop = _kernels.dra_loop(
            code, a, x0, max_iter, UNDERFLOW_FLOOR, f.domain[1]
        )
        return PlaneTrace("dra", f, PlanePoint(x0, 0.0), xs, rs, _STOP_NAMES[stop])

    xs = [x0]
    rs = [0.0]
    x, r = x0, 0.0
    stop = "budget"
    for _ in range(max_iter):
        if route == "geometric":
            z = PlanePoint(x, r)
            pb = project_epigraph(f, reflect_A(z), cfg)
            pa = project_A(z)
            y = z.x - pa.x + pb.x
            r_next = z.r - pa.r + pb.r
        else:
            y = prox(tilted(f, r), 1.0, x, cfg)
            r_next = r + f.value(y)
        if y == 0.0:
            xs.append(0.0)
            rs.append(r_next)
            stop = "fixed_point"
            break
        if y < UNDERFLOW_FLOOR:
            stop = "underflow"
            break
        if y >= x:
            stop = "fixed_point"
            break
        xs.append(y)
        rs.append(r_next)
        x, r = y, r_next
    return PlaneTrace("dra", f, PlanePoint(x0, 0.0), np.asarray(xs),
                      np.asarray(rs), stop)


@dataclass
class FejerReport:
    """Worst-case violations of the per-step decrease inequalities."""

    algorithm: str
    steps: int
    max_violation: float
    epigraph_identity_max: float | None = None

    def conforming(self, tol: float = 1e-9) -> bool:
        ok = self.max_violation <= tol
        if self.epigraph_identity_max is not None:
            ok = ok and self.epigraph_identity_max <= tol
        return ok


def check_fejer(trace) -> FejerReport:
    """Verify the Fejer inequalities of a PPA or MAP trace toward the solution.

    For PPA with solution 0:   x_{n+1}^2 + (x_n - x_{n+1})^2 <= x_n^2.
    For MAP with solution (0,0) the three-term inequality additionally counts
    the intermediate epigraph projection (x_{n+1}, f(x_{n+1})), and the step
    identity x_{n+1} (x_{n+1} - x_n) + f(x_{n+1})^2 <= 0 is checked as well.
    DRA traces are rejected: no such inequality toward A cap B is asserted.
    """
    if trace.algorithm == "ppa":
        xs = trace.xs
        if len(xs) < 2:
            return FejerReport("ppa", 0, 0.0)
        lhs = xs[1:] ** 2 + (xs[:-1] - xs[1:]) ** 2
        viol = lhs - xs[:-1] ** 2
        return FejerReport("ppa", len(xs) - 1, float(np.max(viol)))
    if trace.algorithm == "map":
        xs = trace.xs
        if len(xs) < 2:
            return FejerReport("map", 0, 0.0, 0.0)
        fvals = np.array([trace.function.value(x) for x in xs[1:]])
        lhs = xs[1:] ** 2 + 2.0 * fvals**2 + (xs[1:] - xs[:-1]) ** 2
        viol = lhs - xs[:-1] ** 2
        ident = xs[1:] * (xs[1:] - xs[:-1]) + fvals**2
        return FejerReport("map", len(xs) - 1, float(np.max(viol)),
                           float(np.max(ident)))
    raise ValueError(
        f"no Fejer inequality is checked for {trace.algorithm!r} traces"
    )


def decimate_indices(n: int, stride: int, tail_window: int = 1000) -> np.ndarray:
    """Indices kept when thinning a length-n trace: every stride-th entry plus
    a dense tail window (rate classification needs dense tails, not heads)."""
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    keep = np.zeros(n, dtype=bool)
    keep[::stride] = True
    keep[max(0, n - tail_window):] = True
    keep[n - 1] = True
    return np.flatnonzero(keep)
