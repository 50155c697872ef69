"""Experiment runner and command-line interface.

Subcommands: run, classify, predict, compare, figure1, figure2, table.
All outputs are flat CSV/JSON files; identical configurations produce
byte-identical outputs (17-significant-digit float rendering, sorted JSON
keys, no timestamps).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .drivers import decimate_indices, run_dra, run_map, run_ppa
from .funlib import ScalarConvexFunction, catalog_get
from .prox_engine import ProxConfig
from .ratekit import classify_rate, estimate_r_infinity, predict

__all__ = [
    "ExperimentConfig",
    "parse_function_spec",
    "compare_quotient",
    "figure_grid",
    "main",
]

FIGURE_GRID_START = 1.05
FIGURE_GRID_STOP = 3.0
FIGURE_GRID_POINTS = 41
FIGURE_TERMS = 100
CALIBRATION_ITERS = 20_000

_ALGORITHMS = {"ppa": run_ppa, "map": run_map, "dra": run_dra}


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment cell; echoed verbatim into the run manifest."""

    algorithm: str
    function: str
    x0: float
    max_iter: int
    stride: int = 1
    out: str = "."
    abs_tol: Optional[float] = None
    rel_tol: Optional[float] = None

    def __post_init__(self) -> None:
        if self.algorithm not in _ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if not (math.isfinite(self.x0) and self.x0 > 0.0):
            raise ValueError(f"x0 must be positive, got {self.x0}")
        if self.max_iter < 1:
            raise ValueError(f"iters must be >= 1, got {self.max_iter}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")


def parse_function_spec(spec: str) -> ScalarConvexFunction:
    """Parse a CLI function spec like ``abs``, ``power_p:1.5``, ``circle:2.0``."""
    name, _, rest = spec.partition(":")
    name = name.strip()
    if not name:
        raise ValueError(f"empty function spec {spec!r}")
    params: list[float] = []
    if rest:
        for tok in rest.split(","):
            try:
                params.append(float(tok))
            except ValueError:
                raise ValueError(f"bad parameter {tok!r} in spec {spec!r}") from None
    return catalog_get(name, *params)


def _fmt(v: float) -> str:
    return "%.17g" % v


def _run_trace(cfg: ExperimentConfig):
    f = parse_function_spec(cfg.function)
    prox_cfg = None
    if cfg.abs_tol is not None or cfg.rel_tol is not None:
        prox_cfg = ProxConfig(abs_tol=cfg.abs_tol or 1e-15,
                              rel_tol=cfg.rel_tol or 1e-15)
    runner = _ALGORITHMS[cfg.algorithm]
    return runner(f, cfg.x0, cfg.max_iter, cfg=prox_cfg)


def _trace_basename(cfg: ExperimentConfig) -> str:
    fn = cfg.function.replace(":", "_").replace(",", "_")
    return f"{cfg.algorithm}_{fn}_x0_{cfg.x0:g}"


def write_trace_csv(trace, path: Path, stride: int = 1) -> int:
    """Write a trace as ``n,x,r`` rows (r blank for scalar traces)."""
    n = len(trace.xs)
    kept = decimate_indices(n, stride) if stride > 1 else np.arange(n)
    rs = getattr(trace, "rs", None)
    lines = ["n,x,r"]
    for i in kept:
        r_field = "" if rs is None else _fmt(rs[i])
        lines.append(f"{i},{_fmt(trace.xs[i])},{r_field}")
    path.write_text("\n".join(lines) + "\n")
    return len(kept)


def read_trace_csv(path: Path) -> tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
    """Read ``n,x[,r]`` rows back into arrays; r is None when blank."""
    lines = path.read_text().strip().splitlines()
    if not lines or not lines[0].lower().startswith("n,"):
        raise ValueError(f"{path}: missing n,x,r header")
    ns, xs, rs = [], [], []
    has_r = True
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) < 2:
            raise ValueError(f"{path}: ragged row {line!r}")
        ns.append(int(parts[0]))
        xs.append(float(parts[1]))
        if len(parts) < 3 or parts[2] == "":
            has_r = False
        else:
            rs.append(float(parts[2]))
    return (np.asarray(ns), np.asarray(xs),
            np.asarray(rs) if has_r and rs else None)


def _json_dump(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _dataclass_json(obj) -> dict:
    d = dataclasses.asdict(obj)
    for k, v in list(d.items()):
        if isinstance(v, np.ndarray):
            d[k] = v.tolist()
        elif isinstance(v, tuple):
            d[k] = list(v)
    return d


def compare_quotient(f: ScalarConvexFunction, x0: float, iters: int):
    """Run MAP and DRA on the same cell; quotient x_n^MAP / x_n^DRA.

    Once the DRA iterates underflow the quotient is clamped to +inf (the
    comparison's message is divergence); entries are NaN if DRA stopped for
    any other reason before MAP did.
    """
    map_trace = run_map(f, x0, iters)
    dra_trace = run_dra(f, x0, iters)
    n = len(map_trace.xs)
    quot = np.full(n, np.nan)
    m = min(n, len(dra_trace.xs))
    quot[:m] = map_trace.xs[:m] / dra_trace.xs[:m]
    if len(dra_trace.xs) < n and dra_trace.stop_reason == "underflow":
        quot[len(dra_trace.xs):] = np.inf
    return map_trace, dra_trace, quot


def figure_grid(points: int = FIGURE_GRID_POINTS) -> np.ndarray:
    """The p grid of the figure reproductions: uniform on [1.05, 3]."""
    return np.linspace(FIGURE_GRID_START, FIGURE_GRID_STOP, points)


def _padded_xs(trace, terms: int) -> tuple[np.ndarray, np.ndarray]:
    """First ``terms`` iterates, zero-padded with a clamp flag past the end."""
    xs = np.zeros(terms)
    clamped = np.ones(terms, dtype=int)
    m = min(terms, len(trace.xs))
    xs[:m] = trace.xs[:m]
    clamped[:m] = 0
    return xs, clamped


# ---------------------------------------------------------------------------
# subcommands

def _cmd_run(args) -> int:
    cfg = ExperimentConfig(args.alg, args.function, args.x0, args.iters,
                           args.stride, args.out)
    trace = _run_trace(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    base = _trace_basename(cfg)
    kept = write_trace_csv(trace, out / f"{base}.csv", cfg.stride)
    manifest = {
        "config": dataclasses.asdict(cfg),
        "stop_reason": trace.stop_reason,
        "steps_recorded": len(trace.xs),
        "rows_written": kept,
    }
    _json_dump(manifest, out / f"{base}.manifest.json")
    print(out / f"{base}.csv")
    return 0


def _cmd_classify(args) -> int:
    _, xs, _ = read_trace_csv(Path(args.input))
    report = classify_rate(xs)
    _json_dump(_dataclass_json(report), Path(args.output))
    print(f"{args.output}: {report.category}")
    return 0


def _cmd_predict(args) -> int:
    f = parse_function_spec(args.function)
    r_hat = uncertainty = None
    pred = predict(args.alg, f)
    if pred.requires_r_infinity:
        calib = run_dra(f, args.x0, args.iters)
        r_hat, uncertainty = estimate_r_infinity(calib)
        pred = predict(args.alg, f, r_inf_estimate=r_hat)
    payload = _dataclass_json(pred)
    if r_hat is not None:
        payload["r_infinity_uncertainty"] = uncertainty
    _json_dump(payload, Path(args.output))
    print(f"{args.output}: {pred.category}")
    return 0


def _cmd_compare(args) -> int:
    f = parse_function_spec(args.function)
    map_trace, dra_trace, quot = compare_quotient(f, args.x0, args.iters)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fn = args.function.replace(":", "_").replace(",", "_")
    write_trace_csv(map_trace, out / f"compare_map_{fn}.csv")
    write_trace_csv(dra_trace, out / f"compare_dra_{fn}.csv")
    lines = ["n,quotient,clamped"]
    for i, q in enumerate(quot):
        if math.isfinite(q):
            lines.append(f"{i},{_fmt(q)},0")
        else:
            lines.append(f"{i},,1")
    (out / f"compare_quotient_{fn}.csv").write_text("\n".join(lines) + "\n")
    print(out / f"compare_quotient_{fn}.csv")
    return 0


def _figure_rows(alg: str, grid: np.ndarray) -> list[str]:
    runner = _ALGORITHMS[alg]
    lines = ["p,n,x,clamped"]
    for p in grid:
        f = catalog_get("power_p_scaled", p)
        trace = runner(f, 1.0, FIGURE_TERMS, engine="python")
        xs, clamped = _padded_xs(trace, FIGURE_TERMS)
        for n in range(FIGURE_TERMS):
            lines.append(f"{_fmt(p)},{n},{_fmt(xs[n])},{clamped[n]}")
    return lines


def _cmd_figure1(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = figure_grid(args.grid_points)
    (out / "fig1a.csv").write_text("\n".join(_figure_rows("map", grid)) + "\n")
    (out / "fig1b.csv").write_text("\n".join(_figure_rows("dra", grid)) + "\n")
    print(out / "fig1a.csv")
    print(out / "fig1b.csv")
    return 0


def _cmd_figure2(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = figure_grid(args.grid_points)
    lines = ["p,n,quotient,clamped"]
    for p in grid:
        f = catalog_get("power_p_scaled", p)
        _, _, quot = compare_quotient(f, 1.0, FIGURE_TERMS)
        for n in range(FIGURE_TERMS):
            if n < len(quot) and math.isfinite(quot[n]):
                lines.append(f"{_fmt(p)},{n},{_fmt(quot[n])},0")
            else:
                lines.append(f"{_fmt(p)},{n},,1")
    (out / "fig2.csv").write_text("\n".join(lines) + "\n")
    print(out / "fig2.csv")
    return 0


def _prediction_row(pred, extra: dict) -> dict:
    row = {k: v for k, v in _dataclass_json(pred).items() if v is not None}
    row.pop("requires_r_infinity", None)
    row.update(extra)
    return row


def _cmd_table(args) -> int:
    ppa_rows = []
    for regime, q in (("1<q<2", 1.5), ("q=2", 2.0), ("2<q", 3.0)):
        pred = predict("ppa", catalog_get("power_q", q))
        ppa_rows.append(_prediction_row(pred, {"regime": regime, "sample_q": q}))

    map_rows = []
    dra_rows = []
    for regime, p in (("1<p<2", 1.5), ("p=2", 2.0), ("2<p", 3.0)):
        f = catalog_get("power_p_scaled", p)
        map_rows.append(_prediction_row(predict("map", f), {"regime": "1<p", "sample_p": p}))
        calib = run_dra(f, 1.0, CALIBRATION_ITERS)
        r_hat, _ = estimate_r_infinity(calib)
        dra_rows.append(_prediction_row(predict("dra", f, r_inf_estimate=r_hat),
                                        {"regime": regime, "sample_p": p}))

    table = {
        "ppa_power_q": ppa_rows,
        "map_power_p": map_rows,
        "dra_power_p": dra_rows,
    }
    _json_dump(table, Path(args.output))
    print(args.output)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slowrate",
        description="Run and analyze PPA / MAP / DRA on axis-vs-epigraph geometries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, alg=True, x0=True, iters_default=1000):
        if alg:
            sp.add_argument("--alg", choices=("ppa", "map", "dra"), required=True)
        sp.add_argument("--function", required=True,
                        help="catalog spec, e.g. power_p:1.5 or circle:2.0")
        if x0:
            sp.add_argument("--x0", type=float, default=1.0)
        sp.add_argument("--iters", type=int, default=iters_default)

    sp = sub.add_parser("run", help="run one (algorithm, function, x0) cell")
    add_common(sp)
    sp.add_argument("--stride", type=int, default=1)
    sp.add_argument("--out", default=".")
    sp.set_defaults(fn=_cmd_run)

    sp = sub.add_parser("classify", help="classify a trace CSV")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)
    sp.set_defaults(fn=_cmd_classify)

    sp = sub.add_parser("predict", help="theoretical rate prediction")
    add_common(sp, iters_default=CALIBRATION_ITERS)
    sp.add_argument("--output", required=True)
    sp.set_defaults(fn=_cmd_predict)

    sp = sub.add_parser("compare", help="MAP vs DRA quotient on one cell")
    add_common(sp, alg=False, iters_default=100)
    sp.add_argument("--out", default=".")
    sp.set_defaults(fn=_cmd_compare)

    for name in ("figure1", "figure2"):
        sp = sub.add_parser(name, help=f"write the {name} data CSVs")
        sp.add_argument("--out", default=".")
        sp.add_argument("--grid-points", type=int, default=FIGURE_GRID_POINTS)
        sp.set_defaults(fn=_cmd_figure1 if name == "figure1" else _cmd_figure2)

    sp = sub.add_parser("table", help="summary rate tables as JSON")
    sp.add_argument("--output", required=True)
    sp.set_defaults(fn=_cmd_table)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ValueError as exc:
        print(f"slowrate: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, RuntimeError) as exc:
        print(f"slowrate: numeric failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
