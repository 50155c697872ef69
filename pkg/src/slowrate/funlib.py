"""Catalog of scalar convex test functions.

Every entry is an even, lower-semicontinuous convex function with f(0) = 0 and
f(x) > 0 for x != 0 on its domain, packaged together with hand-coded
derivatives and the analytic rate metadata that the predictors in
:mod:`slowrate.ratekit` consume.  Values outside the domain are the extended
real +inf (``math.inf``), never a floating overflow artifact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

__all__ = [
    "PpaCategory",
    "TheoryMeta",
    "ScalarConvexFunction",
    "catalog_get",
    "catalog_names",
    "theory_meta",
    "half_square",
    "tilted",
]

INF = math.inf

# Kernel codes consumed by slowrate._kernels; one per smooth catalog entry.
K_POWER_Q = 0
K_POWER_P = 1
K_CIRCLE = 2
K_EXP_ABS = 3
K_COSH = 4
K_FLAT = 5

FLAT_SUP = math.sqrt(2.0 / 3.0)  # convexity interval endpoint of exp(-1/x^2)


@dataclass(frozen=True)
class PpaCategory:
    """Convergence class of the proximal-point iteration for one catalog entry.

    ``kind`` is one of ``finite``, ``superlinear``, ``linear``, ``sublinear``,
    ``logarithmic``; the numeric fields are populated only where a closed form
    exists (order for superlinear, rate for linear, exponent/constant for
    logarithmic decay x_n ~ constant * (1/n)^exponent).
    """

    kind: str
    order: Optional[float] = None
    rate: Optional[float] = None
    exponent: Optional[float] = None
    constant: Optional[float] = None


@dataclass(frozen=True)
class TheoryMeta:
    """Analytic rate metadata attached to a catalog function.

    lam:
        liminf of f(x)/x^2 as x decreases to 0, in [0, inf].  Equals half the
        right second derivative at 0 whenever that derivative exists.
    map_exponent_q / map_constant_cq:
        the pair (q, c_q) with f(x) f'(x) / x^q -> c_q in (0, inf), when such
        a q exists; both ``None`` otherwise (degenerate c_q = 0 chain).
    dra_exponent_q / dra_constant_c:
        the pair (q, c) with f'(x) / x^q -> c in (0, inf), when such a q
        exists; both ``None`` otherwise.
    ppa:
        the PpaCategory of the proximal point iteration x_{n+1} = P_f(x_n).
    alpha0:
        tight Lipschitz modulus of (df)^{-1} at 0 for the linear-rate bound
        checker; shipped only where the tight value is known.
    """

    lam: float
    map_exponent_q: Optional[float] = None
    map_constant_cq: Optional[float] = None
    dra_exponent_q: Optional[float] = None
    dra_constant_c: Optional[float] = None
    ppa: PpaCategory = field(default_factory=lambda: PpaCategory("sublinear"))
    alpha0: Optional[float] = None


@dataclass(frozen=True)
class ScalarConvexFunction:
    """A scalar convex test function with derivatives and rate metadata.

    The callables are scalar maps float -> float.  ``value`` returns +inf
    outside the closed domain; ``derivative`` and ``second_derivative`` are
    defined on the interior of the domain minus kinks.  ``closed_form_prox``
    maps (t, x) to the proximal point of t*f at x when a closed form exists.
    """

    name: str
    params: tuple[float, ...]
    domain: tuple[float, float]
    value: Callable[[float], float]
    derivative: Callable[[float], float]
    second_derivative: Optional[Callable[[float], float]]
    subgradient_at_zero: tuple[float, float]
    right_derivative_at_zero: float
    second_right_derivative_at_zero: Optional[float]
    meta: TheoryMeta
    closed_form_prox: Optional[Callable[[float, float], float]] = None
    closed_form_epigraph_projection: Optional[
        Callable[[float, float], tuple[float, float]]
    ] = None
    kernel: Optional[tuple[int, float]] = None

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ",".join("%g" % p for p in self.params)

    def in_domain(self, x: float) -> bool:
        return self.domain[0] <= x <= self.domain[1]

    def __repr__(self) -> str:  # keep trace dumps readable
        return f"ScalarConvexFunction({self.label})"


def _ppa_category(fp0: float, fpp0: Optional[float], dra_pair) -> PpaCategory:
    """Classify the PPA recursion x_n = x_{n+1} + f'(x_{n+1}).

    With a positive right derivative at 0 the iteration reaches 0 exactly;
    otherwise the ratio x_{n+1}/x_n tends to 1/(1 + f''_+(0)), which sorts the
    remaining entries into superlinear / linear / sublinear.  When f''_+(0)=0
    and f'(x)/x^s -> c in (0, inf) with s > 1, the decay is logarithmic with
    x_n ~ ((s-1) c)^{-1/(s-1)} * (1/n)^{1/(s-1)}.
    """
    if fp0 > 0.0:
        return PpaCategory("finite")
    if fpp0 is None:
        return PpaCategory("sublinear")
    if math.isinf(fpp0):
        order = None
        if dra_pair is not None:
            s, _ = dra_pair
            order = 1.0 / s
        return PpaCategory("superlinear", order=order)
    if fpp0 > 0.0:
        return PpaCategory("linear", rate=1.0 / (1.0 + fpp0))
    if dra_pair is not None:
        s, c = dra_pair
        if s > 1.0:
            exponent = 1.0 / (s - 1.0)
            constant = ((s - 1.0) * c) ** (-1.0 / (s - 1.0))
            return PpaCategory("logarithmic", exponent=exponent, constant=constant)
    return PpaCategory("sublinear")


def _no_derivative(x: float) -> float:
    raise ValueError("function has an empty domain interior; no derivative")


def _indicator_zero() -> ScalarConvexFunction:
    def value(x: float) -> float:
        return 0.0 if x == 0.0 else INF

    return ScalarConvexFunction(
        name="indicator_zero",
        params=(),
        domain=(0.0, 0.0),
        value=value,
        derivative=_no_derivative,
        second_derivative=None,
        subgradient_at_zero=(-INF, INF),
        right_derivative_at_zero=INF,
        second_right_derivative_at_zero=None,
        meta=TheoryMeta(lam=INF, ppa=PpaCategory("finite")),
        closed_form_prox=lambda t, x: 0.0,
        closed_form_epigraph_projection=lambda x, r: (0.0, max(r, 0.0)),
    )


def _abs() -> ScalarConvexFunction:
    def prox(t: float, x: float) -> float:
        return math.copysign(max(abs(x) - t, 0.0), x)

    return ScalarConvexFunction(
        name="abs",
        params=(),
        domain=(-INF, INF),
        value=abs,
        derivative=lambda x: math.copysign(1.0, x),
        second_derivative=lambda x: 0.0,
        subgradient_at_zero=(-1.0, 1.0),
        right_derivative_at_zero=1.0,
        # in the sense lim_{x -> 0+} f'(x)/x used by the rate trichotomy
        second_right_derivative_at_zero=INF,
        meta=TheoryMeta(lam=INF, ppa=PpaCategory("finite")),
        closed_form_prox=prox,
    )


def _power_q(q: float) -> ScalarConvexFunction:
    if not q > 1.0:
        raise ValueError(f"power_q requires q > 1, got {q}")

    def value(x: float) -> float:
        return abs(x) ** q

    def derivative(x: float) -> float:
        return math.copysign(q * abs(x) ** (q - 1.0), x)

    def second(x: float) -> float:
        return q * (q - 1.0) * abs(x) ** (q - 2.0) if x != 0.0 else _fpp0

    if q < 2.0:
        _fpp0, lam = INF, INF
    elif q == 2.0:
        _fpp0, lam = 2.0, 1.0
    else:
        _fpp0, lam = 0.0, 0.0

    dra_pair = (q - 1.0, q)
    meta = TheoryMeta(
        lam=lam,
        map_exponent_q=2.0 * q - 1.0,
        map_constant_cq=q,
        dra_exponent_q=dra_pair[0],
        dra_constant_c=dra_pair[1],
        ppa=_ppa_category(0.0, _fpp0, dra_pair),
        alpha0=0.5 if q == 2.0 else None,
    )
    prox = (lambda t, x: x / (1.0 + 2.0 * t)) if q == 2.0 else None
    return ScalarConvexFunction(
        name="power_q",
        params=(q,),
        domain=(-INF, INF),
        value=value,
        derivative=derivative,
        second_derivative=second,
        subgradient_at_zero=(0.0, 0.0),
        right_derivative_at_zero=0.0,
        second_right_derivative_at_zero=_fpp0,
        meta=meta,
        closed_form_prox=prox,
        kernel=(K_POWER_Q, q),
    )


def _power_p_scaled(p: float) -> ScalarConvexFunction:
    if not p > 1.0:
        raise ValueError(f"power_p_scaled requires p > 1, got {p}")

    def value(x: float) -> float:
        return abs(x) ** p / p

    def derivative(x: float) -> float:
        return math.copysign(abs(x) ** (p - 1.0), x)

    def second(x: float) -> float:
        return (p - 1.0) * abs(x) ** (p - 2.0) if x != 0.0 else _fpp0

    if p < 2.0:
        _fpp0, lam = INF, INF
    elif p == 2.0:
        _fpp0, lam = 1.0, 0.5
    else:
        _fpp0, lam = 0.0, 0.0

    dra_pair = (p - 1.0, 1.0)
    meta = TheoryMeta(
        lam=lam,
        map_exponent_q=2.0 * p - 1.0,
        map_constant_cq=1.0 / p,
        dra_exponent_q=dra_pair[0],
        dra_constant_c=dra_pair[1],
        ppa=_ppa_category(0.0, _fpp0, dra_pair),
    )
    return ScalarConvexFunction(
        name="power_p_scaled",
        params=(p,),
        domain=(-INF, INF),
        value=value,
        derivative=derivative,
        second_derivative=second,
        subgradient_at_zero=(0.0, 0.0),
        right_derivative_at_zero=0.0,
        second_right_derivative_at_zero=_fpp0,
        meta=meta,
        kernel=(K_POWER_P, p),
    )


def _circle(R: float) -> ScalarConvexFunction:
    if not R > 0.0:
        raise ValueError(f"circle requires R > 0, got {R}")

    def value(x: float) -> float:
        if abs(x) > R:
            return INF
        # stable form of R - sqrt(R^2 - x^2); avoids cancellation near 0
        return x * x / (R + math.sqrt(max(R * R - x * x, 0.0)))

    def derivative(x: float) -> float:
        s = R * R - x * x
        if s <= 0.0:
            return math.copysign(INF, x)
        return x / math.sqrt(s)

    def second(x: float) -> float:
        s = R * R - x * x
        if s <= 0.0:
            return INF
        return R * R / s ** 1.5

    dra_pair = (1.0, 1.0 / R)
    meta = TheoryMeta(
        lam=1.0 / (2.0 * R),
        map_exponent_q=3.0,
        map_constant_cq=1.0 / (2.0 * R * R),
        dra_exponent_q=dra_pair[0],
        dra_constant_c=dra_pair[1],
        ppa=_ppa_category(0.0, 1.0 / R, dra_pair),
    )
    return ScalarConvexFunction(
        name="circle",
        params=(R,),
        domain=(-R, R),
        value=value,
        derivative=derivative,
        second_derivative=second,
        subgradient_at_zero=(0.0, 0.0),
        right_derivative_at_zero=0.0,
        second_right_derivative_at_zero=1.0 / R,
        meta=meta,
        kernel=(K_CIRCLE, R),
    )


def _exp_abs() -> ScalarConvexFunction:
    def value(x: float) -> float:
        a = abs(x)
        try:
            return math.expm1(a) - a
        except OverflowError:
            return INF

    def derivative(x: float) -> float:
        try:
            return math.copysign(math.expm1(abs(x)), x)
        except OverflowError:
            return math.copysign(INF, x)

    def second(x: float) -> float:
        try:
            return math.exp(abs(x))
        except OverflowError:
            return INF

    dra_pair = (1.0, 1.0)
    meta = TheoryMeta(
        lam=0.5,
        map_exponent_q=3.0,
        map_constant_cq=0.5,
        dra_exponent_q=dra_pair[0],
        dra_constant_c=dra_pair[1],
        ppa=_ppa_category(0.0, 1.0, dra_pair),
    )
    return ScalarConvexFunction(
        name="exp_abs",
        params=(),
        domain=(-INF, INF),
        value=value,
        derivative=derivative,
        second_derivative=second,
        subgradient_at_zero=(0.0, 0.0),
        right_derivative_at_zero=0.0,
        second_right_derivative_at_zero=1.0,
        meta=meta,
        kernel=(K_EXP_ABS, 0.0),
    )


def _cosh_shifted() -> ScalarConvexFunction:
    # stored as cosh(x) - 1 so that f(0) = 0 holds; the shift leaves f' and
    # hence all prox/projection recursions unchanged
    def value(x: float) -> float:
        try:
            s = math.sinh(0.5 * x)
            return 2.0 * s * s
        except OverflowError:
            return INF

    def derivative(x: float) -> float:
        try:
            return math.sinh(x)
        except OverflowError:
            return math.copysign(INF, x)

    def second(x: float) -> float:
        try:
            return math.cosh(x)
        except OverflowError:
            return INF

    dra_pair = (1.0, 1.0)
    meta = TheoryMeta(
        lam=0.5,
        map_exponent_q=3.0,
        map_constant_cq=0.5,
        dra_exponent_q=dra_pair[0],
        dra_constant_c=dra_pair[1],
        ppa=_ppa_category(0.0, 1.0, dra_pair),
    )
    return ScalarConvexFunction(
        name="cosh_shifted",
        params=(),
        domain=(-INF, INF),
        value=value,
        derivative=derivative,
        second_derivative=second,
        subgradient_at_zero=(0.0, 0.0),
        right_derivative_at_zero=0.0,
        second_right_derivative_at_zero=1.0,
        meta=meta,
        kernel=(K_COSH, 0.0),
    )


def _flat() -> ScalarConvexFunction:
    # exp(-1/x^2), convex exactly on [-sqrt(2/3), sqrt(2/3)]; the removable
    # singularity at 0 is repaired by defining f(0) = 0
    def value(x: float) -> float:
        if x == 0.0:
            return 0.0
        if abs(x) > FLAT_SUP:
            return INF
        return math.exp(-1.0 / (x * x))

    def derivative(x: float) -> float:
        if x == 0.0:
            return 0.0
        return math.exp(-1.0 / (x * x)) * 2.0 / (x * x * x)

    def second(x: float) -> float:
        if x == 0.0:
            return 0.0
        x2 = x * x
        return math.exp(-1.0 / x2) * (4.0 - 6.0 * x2) / (x2 * x2 * x2)

    meta = TheoryMeta(lam=0.0, ppa=PpaCategory("sublinear"))
    return ScalarConvexFunction(
        name="flat",
        params=(),
        domain=(-FLAT_SUP, FLAT_SUP),
        value=value,
        derivative=derivative,
        second_derivative=second,
        subgradient_at_zero=(0.0, 0.0),
        right_derivative_at_zero=0.0,
        second_right_derivative_at_zero=0.0,
        meta=meta,
        kernel=(K_FLAT, 0.0),
    )


_BUILDERS: dict[str, tuple[int, Callable[..., ScalarConvexFunction]]] = {
    "indicator_zero": (0, _indicator_zero),
    "abs": (0, _abs),
    "power_q": (1, _power_q),
    "power_p_scaled": (1, _power_p_scaled),
    "power_p": (1, _power_p_scaled),  # CLI alias
    "circle": (1, _circle),
    "exp_abs": (0, _exp_abs),
    "cosh_shifted": (0, _cosh_shifted),
    "flat": (0, _flat),
}


def catalog_names() -> tuple[str, ...]:
    """Canonical entry names (aliases excluded)."""
    return (
        "indicator_zero",
        "abs",
        "power_q",
        "power_p_scaled",
        "circle",
        "exp_abs",
        "cosh_shifted",
        "flat",
    )


def catalog_get(name: str, *params: float) -> ScalarConvexFunction:
    """Look up a catalog entry by name with its real parameters.

    Raises ValueError for unknown names, wrong arity, or out-of-range
    parameters (q <= 1, p <= 1, R <= 0).
    """
    try:
        arity, builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown catalog function {name!r}") from None
    if len(params) != arity:
        raise ValueError(
            f"{name} takes {arity} parameter(s), got {len(params)}"
        )
    for p in params:
        if not math.isfinite(p):
            raise ValueError(f"{name}: parameter must be finite, got {p}")
    return builder(*(float(p) for p in params))


def theory_meta(f: ScalarConvexFunction) -> TheoryMeta:
    """Analytic rate metadata of a catalog (or derived) function."""
    return f.meta


def half_square(f: ScalarConvexFunction) -> ScalarConvexFunction:
    """The function (1/2) f^2, convex whenever f is convex and nonnegative.

    The proximal iteration of this function reproduces the alternating
    projection recursion x_n = x_{n+1} + f(x_{n+1}) f'(x_{n+1}).
    """
    if f.name == "indicator_zero":
        return f  # squaring an indicator returns the same indicator

    def value(x: float) -> float:
        v = f.value(x)
        return 0.5 * v * v

    def derivative(x: float) -> float:
        return f.value(x) * f.derivative(x)

    second = None
    if f.second_derivative is not None:
        fv, fd, fs = f.value, f.derivative, f.second_derivative

        def second(x: float) -> float:
            d = fd(x)
            return d * d + fv(x) * fs(x)

    return ScalarConvexFunction(
        name=f"half_square({f.label})",
        params=(),
        domain=f.domain,
        value=value,
        derivative=derivative,
        second_derivative=second,
        subgradient_at_zero=(0.0, 0.0),
        right_derivative_at_zero=0.0,
        second_right_derivative_at_zero=None,
        meta=TheoryMeta(lam=0.0),
    )


def tilted(f: ScalarConvexFunction, r: float) -> ScalarConvexFunction:
    """The function r*f + (1/2) f^2 for r >= 0.

    Its proximal step at x solves y + (r + f(y)) f'(y) = x, which is the
    reduced form of one Douglas-Rachford step from (x, r).
    """
    if r < 0.0:
        raise ValueError(f"tilt weight must be nonnegative, got {r}")
    if f.name == "indicator_zero":
        return f

    def value(x: float) -> float:
        v = f.value(x)
        return r * v + 0.5 * v * v

    def derivative(x: float) -> float:
        return (r + f.value(x)) * f.derivative(x)

    second = None
    if f.second_derivative is not None:
        fv, fd, fs = f.value, f.derivative, f.second_derivative

        def second(x: float) -> float:
            d = fd(x)
            return d * d + (r + fv(x)) * fs(x)

    fp0 = r * f.right_derivative_at_zero if f.right_derivative_at_zero > 0.0 else 0.0
    return ScalarConvexFunction(
        name=f"tilted({f.label},{r:g})",
        params=(),
        domain=f.domain,
        value=value,
        derivative=derivative,
        second_derivative=second,
        subgradient_at_zero=(-fp0, fp0),
        right_derivative_at_zero=fp0,
        second_right_derivative_at_zero=None,
        meta=TheoryMeta(lam=0.0),
    )
