"""Sequence-rate toolkit: discrete Stolz-Cesaro bounds, the H-transform of
one-dimensional decrease recursions, two-sided envelope checks, an empirical
convergence-class classifier, and the theory-side rate predictors for the
three algorithms on the catalog functions.

Estimates of liminf/limsup quantities are taken as min/max over a tail
window; heads are deliberately discarded since all quantities of interest
are asymptotic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .funlib import ScalarConvexFunction

__all__ = [
    "RecursionModel",
    "RateReport",
    "RatePrediction",
    "StolzBounds",
    "stolz_bounds",
    "make_recursion_model",
    "sandwich_check",
    "SandwichReport",
    "envelope_check",
    "EnvelopeReport",
    "classify_rate",
    "predict",
    "estimate_r_infinity",
    "guler_product",
    "GulerReport",
    "ppa_superlinear_majorant",
    "linear_rate_bound_check",
    "LinearRateBoundReport",
]

_TAIL_CAP = 10_000  # tail window: last 25% of the trace, capped here
_RATIO_TO_ONE_CUT = 0.98
_LINEAR_SPREAD = 1e-3
_LOG_DIFF_TOL = 0.02
_SUPERLINEAR_CUT = 0.01
_ORDER_REPORT_CUT = 1.1


# ---------------------------------------------------------------------------
# H-transform machinery

@dataclass(frozen=True)
class RecursionModel:
    """The map g(x) = x^q together with H, an antiderivative of -1/g.

    H is strictly increasing as its argument decreases toward 0, and converts
    the recursion beta_{n+1} = beta_n - delta_n g(beta_n) into near-linear
    growth of H(beta_n).  All three callables accept scalars or arrays.
    """

    q: float
    g: callable
    H: callable
    H_inv: callable


def make_recursion_model(q: float) -> RecursionModel:
    """H and its inverse for g(x) = x^q: x^(1-q)/(q-1) for q > 1, -ln for q = 1."""
    if q < 1.0:
        raise ValueError(f"recursion exponent must satisfy q >= 1, got {q}")
    if q == 1.0:
        return RecursionModel(
            q=1.0,
            g=lambda x: x,
            H=lambda x: -np.log(x),
            H_inv=lambda t: np.exp(-t),
        )

    def H(x):
        return x ** (1.0 - q) / (q - 1.0)

    def H_inv(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.where(t > 0.0, ((q - 1.0) * t) ** (-1.0 / (q - 1.0)), np.inf)
        return float(out) if out.ndim == 0 else out

    return RecursionModel(q=q, g=lambda x: x**q, H=H, H_inv=H_inv)


class StolzBounds(NamedTuple):
    """Tail estimates of the four members of the Stolz-Cesaro chain."""

    diff_liminf: float
    ratio_liminf: float
    ratio_limsup: float
    diff_limsup: float


def stolz_bounds(a, b) -> StolzBounds:
    """Tail estimates of liminf/limsup of the difference quotients
    (a_{n+1}-a_n)/(b_{n+1}-b_n) and of the ratios a_n/b_n.

    The ratio estimates are taken on tail-anchored difference quotients
    (a_n - a_m)/(b_n - b_m), which converge to liminf/limsup of a_n/b_n
    for unbounded monotone b and are convex combinations of the one-step
    quotients over the same window, so the chain
    diff_liminf <= ratio_liminf <= ratio_limsup <= diff_limsup
    holds exactly up to rounding; it is asserted with 1e-9 slack.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("sequences must be equal-length 1-d arrays")
    if len(a) < 32:
        raise ValueError(f"need at least 32 entries, got {len(a)}")
    db = np.diff(b)
    if not (np.all(db > 0.0) or np.all(db < 0.0)):
        raise ValueError("denominator sequence must be strictly monotone")
    if abs(b[-1]) <= abs(b[0]):
        raise ValueError("denominator sequence must be unbounded (growing magnitude)")

    m = len(a) // 2
    d_tail = (np.diff(a) / db)[m:]
    # ratio estimates span at least half the tail so single-step spikes
    # average out while staying convex combinations of d_tail entries
    lo = m + (len(a) - m) // 2
    windowed = (a[lo:] - a[m]) / (b[lo:] - b[m])
    bounds = StolzBounds(
        diff_liminf=float(np.min(d_tail)),
        ratio_liminf=float(np.min(windowed)),
        ratio_limsup=float(np.max(windowed)),
        diff_limsup=float(np.max(d_tail)),
    )
    slack = 1e-9
    if not (
        bounds.diff_liminf <= bounds.ratio_liminf + slack
        and bounds.ratio_liminf <= bounds.ratio_limsup + slack
        and bounds.ratio_limsup <= bounds.diff_limsup + slack
    ):
        raise ValueError(f"Stolz-Cesaro chain violated: {bounds}")
    return bounds


@dataclass
class SandwichReport:
    form: str
    q: float
    steps: int
    max_violation: float
    h_over_n_last: float
    h_over_n_tail_mean: float

    def holds(self, tol: float = 1e-9) -> bool:
        return self.max_violation <= tol


def sandwich_check(beta, model: RecursionModel, form: str = "update") -> SandwichReport:
    """Two-sided H-increment inequality along a decreasing positive sequence.

    form='update' reads the data as beta_{n+1} = beta_n - delta_n g(beta_n)
    and verifies delta_n <= H(beta_{n+1}) - H(beta_n) <= delta_n g(beta_n)/g(beta_{n+1});
    form='implicit' reads x_n = x_{n+1} + delta_n g(x_{n+1}) and verifies
    delta_n g(x_{n+1})/g(x_n) <= H(x_{n+1}) - H(x_n) <= delta_n.
    Violations are normalized by the local increment scale (relative slack).
    """
    beta = np.asarray(beta, dtype=float)
    if len(beta) < 3:
        raise ValueError("need at least 3 entries")
    if np.any(beta <= 0.0) or np.any(np.diff(beta) >= 0.0):
        raise ValueError("sequence must be positive and strictly decreasing")
    if form not in ("update", "implicit"):
        raise ValueError(f"form must be update or implicit, got {form!r}")

    g_cur = model.g(beta[:-1])
    g_next = model.g(beta[1:])
    dH = model.H(beta[1:]) - model.H(beta[:-1])
    drop = beta[:-1] - beta[1:]
    if form == "update":
        delta = drop / g_cur
        lower = delta
        upper = delta * g_cur / g_next
    else:
        delta = drop / g_next
        lower = delta * g_next / g_cur
        upper = delta
    scale = np.maximum(np.abs(dH), np.abs(delta))
    scale = np.maximum(scale, 1e-300)
    viol = np.maximum((lower - dH) / scale, (dH - upper) / scale)

    n = np.arange(len(beta))
    h_over_n = model.H(beta[1:]) / n[1:]
    k = max(len(h_over_n) // 4, 1)
    return SandwichReport(
        form=form,
        q=model.q,
        steps=len(beta) - 1,
        max_violation=float(np.max(viol)),
        h_over_n_last=float(h_over_n[-1]),
        h_over_n_tail_mean=float(np.mean(h_over_n[-k:])),
    )


@dataclass
class EnvelopeReport:
    side: str
    q: float
    rho: float
    eps: float
    first_index: Optional[int]
    holds: bool
    exponent: Optional[float]  # power form O(1/n^exponent) when q > 1
    gamma: Optional[float]  # geometric form gamma^n when q = 1
    constant: Optional[float]


def envelope_check(beta, rho: float, q: float, side: str, eps: float) -> EnvelopeReport:
    """Check the one-sided envelope beta_n <=/>= H_inv(n (rho -/+ eps)).

    side='upper' needs 0 < eps < rho and certifies an upper envelope, which
    for q > 1 is the power bound 1/((q-1) n (rho-eps))^(1/(q-1)) and for
    q = 1 the geometric bound gamma^n with gamma = exp(eps - rho).
    side='lower' needs eps > 0 and certifies the mirrored lower envelope.
    Returns the first index from which the envelope holds to the end of the
    window, or a failure report.
    """
    beta = np.asarray(beta, dtype=float)
    if side not in ("upper", "lower"):
        raise ValueError(f"side must be upper or lower, got {side!r}")
    if side == "upper" and not (0.0 < eps < rho):
        raise ValueError(f"upper side needs 0 < eps < rho, got eps={eps}, rho={rho}")
    if side == "lower" and not eps > 0.0:
        raise ValueError(f"lower side needs eps > 0, got {eps}")

    model = make_recursion_model(q)
    n = np.arange(len(beta), dtype=float)
    level = rho - eps if side == "upper" else rho + eps
    bound = model.H_inv(n * level)
    ok = beta <= bound if side == "upper" else beta >= bound

    if not ok[-1]:
        first, holds = None, False
    else:
        bad = np.flatnonzero(~ok)
        first, holds = (int(bad[-1]) + 1 if bad.size else 0), True

    exponent = constant = gamma = None
    if q > 1.0:
        exponent = 1.0 / (q - 1.0)
        constant = ((q - 1.0) * level) ** (-1.0 / (q - 1.0))
    else:
        gamma = math.exp(-level)
    return EnvelopeReport(side, q, rho, eps, first, holds, exponent, gamma, constant)


# ---------------------------------------------------------------------------
# Empirical classification

@dataclass
class RateReport:
    """Empirical convergence class of a positive decreasing sequence."""

    category: str
    estimated_order: Optional[float] = None
    estimated_ratio_c: Optional[float] = None
    estimated_exponent: Optional[float] = None
    estimated_constant: Optional[float] = None
    tail_window: tuple[int, int] = (0, 0)
    diagnostics: dict = field(default_factory=dict)

    @property
    def is_superlinear(self) -> bool:
        return self.category in ("superlinear", "order_q")


def _slope(x, y) -> float:
    return float(np.polyfit(x, y, 1)[0])


def classify_rate(xs, underflow_floor: float = 1e-300) -> RateReport:
    """Classify the decay of a positive decreasing sequence toward 0.

    Categories follow the ratio/difference-ratio limits: finite (an exact
    zero is reached), order_q / superlinear (ratio tail collapsing below
    0.01, order fitted on log log(1/x_n)), linear (ratio tail flat inside
    [0.001, 0.98]), sublinear (ratio tail above 0.98 and rising), and
    logarithmic (sublinear with difference-ratio tail within 0.02 of 1).
    Inputs shorter than 64 entries are rejected unless they were truncated
    at the underflow floor by the driver.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1:
        raise ValueError("expected a 1-d sequence")
    if np.any(~np.isfinite(xs)) or np.any(xs < 0.0):
        raise ValueError("sequence must be finite and nonnegative")

    # an exact zero reached from a healthy value is finite convergence; a
    # zero (or sub-floor entry) at the end of a collapsing tail is underflow
    truncated = False
    dead = np.flatnonzero(xs <= underflow_floor)
    if dead.size:
        k = int(dead[0])
        if np.any(np.diff(xs[:k]) >= 0.0):
            raise ValueError("sequence must strictly decrease until its first zero")
        if xs[k] == 0.0 and (k == 0 or xs[k - 1] > 1e-100):
            return RateReport(
                category="finite",
                tail_window=(k, len(xs)),
                diagnostics={"zero_index": k},
            )
        xs = xs[:k]
        truncated = True
    elif np.any(np.diff(xs) >= 0.0):
        raise ValueError("sequence must be strictly decreasing")

    # short traces are admissible only when they visibly died at the floor
    # (drivers stop before recording sub-floor iterates); extrapolating the
    # log-reciprocal growth one step detects that
    if not truncated and len(xs) >= 2 and 0.0 < xs[-1] < 1.0:
        big, prev = -math.log(xs[-1]), -math.log(xs[-2])
        if 0.0 < prev < big:
            nxt = big + (big - prev) * max(1.0, big / prev)
            truncated = nxt > -math.log(underflow_floor)
    if not truncated and len(xs) < 64:
        raise ValueError(f"need at least 64 entries, got {len(xs)}")
    if len(xs) < 4:
        return RateReport(category="inconclusive", diagnostics={"usable": len(xs)})

    n_all = np.arange(len(xs))
    k = min(max(len(xs) // 4, 8), _TAIL_CAP)
    k = min(k, len(xs) - 1)
    lo = len(xs) - k
    window = (int(lo), int(len(xs)))

    rho = xs[1:] / xs[:-1]
    rho_tail = rho[lo - 1:]
    diag = {
        "ratio_tail": rho_tail[:: max(1, len(rho_tail) // 16)].tolist(),
        "truncated_at_floor": truncated,
    }

    # superlinear family: ratio tail collapsing toward 0
    if rho_tail[-1] < _SUPERLINEAR_CUT and rho_tail[-1] <= rho_tail[0]:
        small = np.flatnonzero(xs < 0.3)
        order = None
        if small.size >= 3:
            # only the deepest samples are free of the O(1/log(1/x)) bias,
            # and underflow leaves just a handful of them anyway
            sel = small[-min(6, small.size):]
            loglog = np.log(np.log(1.0 / xs[sel]))
            order = math.exp(_slope(n_all[sel].astype(float), loglog))
            diag["order_samples"] = int(sel.size)
            diag["low_sample_count"] = bool(sel.size < 8)
        if order is not None and order > _ORDER_REPORT_CUT:
            return RateReport("order_q", estimated_order=order,
                              estimated_ratio_c=float(rho_tail[-1]),
                              tail_window=window, diagnostics=diag)
        return RateReport("superlinear", estimated_order=order,
                          estimated_ratio_c=float(rho_tail[-1]),
                          tail_window=window, diagnostics=diag)

    ratio_mean = float(np.mean(rho_tail))
    spread = float(np.max(rho_tail) - np.min(rho_tail))
    if spread < _LINEAR_SPREAD and 1e-3 <= ratio_mean <= _RATIO_TO_ONE_CUT:
        return RateReport("linear", estimated_ratio_c=ratio_mean,
                          tail_window=window, diagnostics=diag)

    if ratio_mean > _RATIO_TO_ONE_CUT and rho_tail[-1] >= rho_tail[0]:
        d = (xs[1:-1] - xs[2:]) / (xs[:-2] - xs[1:-1])
        d_tail = d[max(lo - 1, 0):]
        diag["diff_ratio_tail"] = d_tail[:: max(1, len(d_tail) // 16)].tolist()
        sel = n_all[lo:]
        slope = _slope(np.log(sel.astype(float)), np.log(xs[lo:]))
        exponent = -slope
        constant = float(np.mean(xs[lo:] * sel.astype(float) ** exponent))
        category = "sublinear"
        if d_tail.size and abs(float(np.mean(d_tail)) - 1.0) <= _LOG_DIFF_TOL:
            category = "logarithmic"
        return RateReport(category, estimated_ratio_c=ratio_mean,
                          estimated_exponent=float(exponent),
                          estimated_constant=constant,
                          tail_window=window, diagnostics=diag)

    return RateReport("inconclusive", estimated_ratio_c=ratio_mean,
                      tail_window=window, diagnostics=diag)


# ---------------------------------------------------------------------------
# Theory-side predictions

@dataclass
class RatePrediction:
    """Predicted convergence class and constants for one (algorithm, f) pair."""

    algorithm: str
    function: str
    category: str
    order: Optional[float] = None
    rate: Optional[float] = None
    exponent: Optional[float] = None
    constant: Optional[float] = None
    source: str = ""
    requires_r_infinity: bool = False
    r_infinity: Optional[float] = None


def predict(
    algorithm: str,
    f: ScalarConvexFunction,
    r_inf_estimate: Optional[float] = None,
) -> RatePrediction:
    """Theoretical rate of x_n -> 0 for one algorithm on a catalog function.

    PPA predictions come straight from the catalog metadata (finite exactly
    when the right derivative at 0 is positive).  MAP is always sublinear;
    when f f'/x^q has a positive finite limit c_q the decay is logarithmic
    with x_n ~ ((q-1) c_q)^(-1/(q-1)) (1/n)^(1/(q-1)).  DRA follows the
    trichotomy in the second right derivative at 0, with constants that
    depend on the trace-dependent limit r_infinity; those constants are
    filled only when an estimate is supplied, never guessed.
    """
    alg = algorithm.lower()
    meta = f.meta
    if alg == "ppa":
        c = meta.ppa
        return RatePrediction("ppa", f.label, c.kind, order=c.order, rate=c.rate,
                              exponent=c.exponent, constant=c.constant,
                              source="resolvent-recursion")

    if alg == "map":
        if f.right_derivative_at_zero > 0.0:
            return RatePrediction("map", f.label, "unavailable",
                                  source="nonzero-slope-at-origin")
        if meta.map_exponent_q is not None:
            q, cq = meta.map_exponent_q, meta.map_constant_cq
            e = 1.0 / (q - 1.0)
            return RatePrediction("map", f.label, "logarithmic", exponent=e,
                                  constant=((q - 1.0) * cq) ** (-e),
                                  source="projection-product-limit")
        return RatePrediction("map", f.label, "sublinear",
                              source="degenerate-product-limit")

    if alg == "dra":
        if f.right_derivative_at_zero > 0.0:
            return RatePrediction("dra", f.label, "unavailable",
                                  source="nonzero-slope-at-origin")
        fpp = f.second_right_derivative_at_zero
        if fpp is None:
            return RatePrediction("dra", f.label, "unavailable",
                                  source="missing-curvature")
        if math.isinf(fpp):
            order = constant = None
            if meta.dra_exponent_q is not None:
                s, c = meta.dra_exponent_q, meta.dra_constant_c
                order = 1.0 / s
                if r_inf_estimate is not None:
                    constant = (1.0 / (c * r_inf_estimate)) ** (1.0 / s)
            return RatePrediction("dra", f.label, "superlinear", order=order,
                                  constant=constant,
                                  source="curvature-trichotomy",
                                  requires_r_infinity=True,
                                  r_infinity=r_inf_estimate)
        if fpp > 0.0:
            rate = None
            if r_inf_estimate is not None:
                rate = 1.0 / (1.0 + r_inf_estimate * fpp)
            return RatePrediction("dra", f.label, "linear", rate=rate,
                                  source="curvature-trichotomy",
                                  requires_r_infinity=True,
                                  r_infinity=r_inf_estimate)
        if meta.dra_exponent_q is not None and meta.dra_exponent_q > 1.0:
            s, c = meta.dra_exponent_q, meta.dra_constant_c
            e = 1.0 / (s - 1.0)
            constant = None
            if r_inf_estimate is not None:
                constant = ((s - 1.0) * r_inf_estimate * c) ** (-e)
            return RatePrediction("dra", f.label, "logarithmic", exponent=e,
                                  constant=constant,
                                  source="curvature-trichotomy",
                                  requires_r_infinity=True,
                                  r_infinity=r_inf_estimate)
        return RatePrediction("dra", f.label, "sublinear",
                              source="curvature-trichotomy")

    raise ValueError(f"unknown algorithm {algorithm!r}")


def estimate_r_infinity(trace) -> tuple[float, float]:
    """Estimate the limit of the DRA ordinate sequence from a trace.

    Returns (last r_n, trailing increment over the last tenth of the trace).
    The uncertainty is a trailing increment, not a rigorous bound.  Accepts
    traces of at least 1000 steps, or shorter traces that terminated
    naturally (underflow/fixed point) rather than on the iteration budget.
    """
    if getattr(trace, "algorithm", None) != "dra":
        raise ValueError("r_infinity is estimated from DRA traces only")
    rs = np.asarray(trace.rs, dtype=float)
    n = len(rs)
    if n < 1000 and trace.stop_reason == "budget":
        raise ValueError(
            "need >= 1000 steps or a naturally terminated trace to estimate r_infinity"
        )
    if np.any(np.diff(rs) < 0.0):
        raise ValueError("ordinate sequence must be nondecreasing")
    if n < 2:
        return float(rs[-1]), 0.0
    k = min(max(1, n // 10), n - 1)
    return float(rs[-1]), float(rs[-1] - rs[-1 - k])


@dataclass
class GulerReport:
    products: np.ndarray
    tends_to_zero: bool
    tail_slope: Optional[float]
    final_value: float


def guler_product(trace, f: Optional[ScalarConvexFunction] = None,
                  threshold: float = 1e-3) -> GulerReport:
    """The sequence n f(x_n)^2 along an alternating-projection trace.

    Verdict 'tends to zero' requires a decreasing tail with final value below
    the threshold.  The reported tail slope of log(n f^2) against log n is
    the sharpness exponent (about -1/(p-1) for the scaled power functions).
    """
    alg = getattr(trace, "algorithm", None)
    if alg == "dra":
        raise ValueError("the product law applies to MAP (and PPA) traces only")
    fn = f if f is not None else trace.function
    xs = np.asarray(trace.xs, dtype=float)
    n = np.arange(len(xs), dtype=float)
    fv = np.array([fn.value(x) for x in xs])
    prod = n * fv * fv

    k = min(max(len(prod) // 4, 2), _TAIL_CAP)
    tail = prod[-k:]
    decreasing = bool(tail[-1] < tail[0]) and bool(np.all(np.diff(tail) <= 0.0))
    slope = None
    sel = (n >= 1.0) & (prod > 0.0)
    sel[: len(prod) - k] = False
    if np.count_nonzero(sel) >= 3:
        slope = _slope(np.log(n[sel]), np.log(prod[sel]))
    return GulerReport(
        products=prod,
        tends_to_zero=decreasing and float(prod[-1]) < threshold,
        tail_slope=slope,
        final_value=float(prod[-1]),
    )


def ppa_superlinear_majorant(q: float, rho0: float, n: int) -> float:
    """Closed-form majorant of the proximal-point iterates of |x|^q, 1 < q < 2.

    rho_n = rho_0^(k^n) (1/q)^((k^n - 1)/(2-q)) with k = 1/(q-1); for small
    rho_0 it dominates the true iterates x_n for every n >= 1.  Evaluated in
    log space so deep superlinear tails underflow cleanly to 0.
    """
    if not 1.0 < q < 2.0:
        raise ValueError(f"majorant requires 1 < q < 2, got {q}")
    if not 0.0 < rho0 <= 0.5:
        raise ValueError(f"majorant requires 0 < rho0 <= 0.5, got {rho0}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    k = (1.0 / (q - 1.0)) ** n
    log_rho = k * math.log(rho0) - (k - 1.0) / (2.0 - q) * math.log(q)
    try:
        return math.exp(log_rho)
    except OverflowError:
        return 0.0 if log_rho < 0 else math.inf


@dataclass
class LinearRateBoundReport:
    bound: float
    first_index: Optional[int]
    holds: bool
    variant: str


def linear_rate_bound_check(trace, lam: float, alpha0: float, eps: float = 0.0,
                            variant: str = "refined") -> LinearRateBoundReport:
    """Check the linear-rate ratio bound along a proximal-point trace.

    The refined variant bounds |x_{n+1}| <= alpha0/sqrt(1 + alpha0^2 (1 + 2 lam
    - 2 eps)) |x_n|; the basic variant uses alpha0/sqrt(1 + alpha0^2).  The
    modulus alpha0 must lie in [1/(2 lam), 1/lam].  Returns the first index
    from which the bound holds through the end of the trace, or a failure.
    """
    if not (0.0 < lam < math.inf):
        raise ValueError(f"lam must be positive and finite, got {lam}")
    slack = 1e-12
    if not (1.0 / (2.0 * lam) - slack <= alpha0 <= 1.0 / lam + slack):
        raise ValueError(f"alpha0={alpha0} outside [1/(2 lam), 1/lam] for lam={lam}")
    if eps < 0.0:
        raise ValueError(f"eps must be nonnegative, got {eps}")
    if variant == "refined":
        bound = alpha0 / math.sqrt(1.0 + alpha0**2 * (1.0 + 2.0 * lam - 2.0 * eps))
    elif variant == "basic":
        bound = alpha0 / math.sqrt(1.0 + alpha0**2)
    else:
        raise ValueError(f"variant must be refined or basic, got {variant!r}")

    xs = np.asarray(getattr(trace, "xs", trace), dtype=float)
    pos = xs[:-1] > 0.0
    ratios = np.where(pos, xs[1:] / np.where(pos, xs[:-1], 1.0), 0.0)
    ok = ratios <= bound + 1e-15
    if not ok[-1]:
        return LinearRateBoundReport(bound, None, False, variant)
    bad = np.flatnonzero(~ok)
    first = int(bad[-1]) + 1 if bad.size else 0
    return LinearRateBoundReport(bound, first, True, variant)
