"""Unified command line: dispatch, deterministic artifacts, run manifests.

Usage:
    heisenweyl count --config cfg.json --t 16
    heisenweyl spectrum --config cfg.json --tmax 400 --out runs/spec.csv
    heisenweyl psi-check --config cfg.json --xmin 100 --xmax 1e4 \
        --samples 60 --out runs/psi.csv
    heisenweyl vaaler-check --H 50 --grid 10000
    heisenweyl vdc-check --config cfg.json --x 1e4 --h 1 --j1 0 --j 0
    heisenweyl voronoi --config cfg.json --T 1e4 --samples 200 --out runs/v.csv
    heisenweyl alpha-count --config cfg.json --H1 4 --H2 4 --N1 8 --N2 8 \
        --delta 0.05 --out runs/gaps.json
    heisenweyl meansquare --config cfg.json --Tmin 1e3 --Tmax 1e6 \
        --ladder 8 --out runs/ms.json
    heisenweyl constant --config cfg.json --eps 1e-8
    heisenweyl metric-map --h11 1 --h12 0 --h22 1 --g3 4.44288293815837
    heisenweyl accept --suite primary

The config file is JSON: {"theta": {"kind": "quadratic-surd", "p": 0, "q": 1,
"s": 1, "d": 2}, "l": 1} plus optional "precision_bits", "workers", "seed",
and "budgets": {"tuples": int, "seconds": real, "megabytes": real}.
HW_PRECISION_BITS overrides precision_bits; --workers and --seed override the
file.  Tuple budgets are enforced by the box scans; time and memory budgets
are advisory caps recorded in the manifest.

Every file artifact is written atomically (temp + rename) and accompanied by
``<artifact>.manifest.json`` recording the tool version, config hash, seed,
wall time, boundary-flag tallies, dropped-mass reports, and the frozen
constant registry.  Artifact bytes depend only on config and seed; manifests
carry the wall time and are the one output excluded from byte-identity.
Report-style subcommands also render a matplotlib figure beside the delimited
output unless --no-figure is given.

Exit codes: 0 success; 1 usage error or missing config; 2 precondition
violation; 3 budget exhaustion or I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .expsum import (
    load_registry,
    transformed_block_sum,
    voronoi_terms,
)
from .gapcount import BoxSpec, count_solutions
from .kernel import BudgetError, ConfigurationError, IrrationalParameter
from .meansquare import (
    SpectrumDepthError,
    TorusMetricConfig,
    compute_C,
    fit_mean_square,
    theoretical_constant,
    torus_metric_map,
)
from .psiexpr import BoundaryTally, psi_sum_R, vaaler_grid
from .spectrum import ManifoldConfig, SpectrumCounter, enumerate_spectrum

_ENV_BITS = "HW_PRECISION_BITS"


class UsageError(Exception):
    """Bad invocation: unknown flags, malformed arguments, missing config."""


# -- run configuration ----------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Manifold selection plus the run-wide knobs every subcommand shares."""

    manifold: ManifoldConfig
    precision_bits: int = 192
    workers: int = 1
    budget_tuples: int = 10 ** 9
    budget_seconds: float = 86400.0
    budget_megabytes: float = 8192.0
    seed: int = 0

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ConfigurationError("precision_bits must be >= 64")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        for name in ("budget_tuples", "budget_seconds", "budget_megabytes"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        if self.seed < 0:
            raise ConfigurationError("seed must be >= 0")

    def to_dict(self) -> dict:
        return {
            "l": self.manifold.l,
            "theta": self.manifold.theta.to_config(),
            "precision_bits": self.precision_bits,
            "workers": self.workers,
            "budgets": {
                "tuples": self.budget_tuples,
                "seconds": self.budget_seconds,
                "megabytes": self.budget_megabytes,
            },
            "seed": self.seed,
        }

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True,
                           separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def load_run_config(path: str, *, workers: Optional[int] = None,
                    seed: Optional[int] = None) -> RunConfig:
    """Read the JSON config; flags and HW_PRECISION_BITS override the file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError as exc:
        raise UsageError(f"config file not found: {path}") from exc
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict) or "theta" not in raw or "l" not in raw:
        raise UsageError(f"config {path} must carry 'theta' and 'l'")
    theta = IrrationalParameter.from_config(raw["theta"])
    manifold = ManifoldConfig(l=int(raw["l"]), theta=theta)
    budgets = raw.get("budgets", {})
    bits = int(raw.get("precision_bits", 192))
    env_bits = os.environ.get(_ENV_BITS)
    if env_bits is not None:
        try:
            bits = int(env_bits)
        except ValueError as exc:
            raise UsageError(f"{_ENV_BITS} must be an integer, "
                             f"got {env_bits!r}") from exc
    return RunConfig(
        manifold=manifold,
        precision_bits=bits,
        workers=int(workers if workers is not None
                    else raw.get("workers", 1)),
        budget_tuples=int(budgets.get("tuples", 10 ** 9)),
        budget_seconds=float(budgets.get("seconds", 86400.0)),
        budget_megabytes=float(budgets.get("megabytes", 8192.0)),
        seed=int(seed if seed is not None else raw.get("seed", 0)),
    )


# -- artifact emission ------------------------------------------------------------


@dataclass
class RunManifest:
    """Provenance record written beside every file artifact."""

    tool_version: str
    command: str
    config_hash: str
    seed: int
    precision_bits: int
    workers: int
    wall_seconds: float
    boundary_flags: int
    dropped_mass: dict
    registry: dict
    artifacts: tuple


def _atomic_write(path: str, text: str) -> None:
    # single-owner writes: a temp file in the target directory, then rename
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp = os.path.join(directory,
                       f".{os.path.basename(path)}.{os.getpid()}.tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _format_cell(value, kind: str, precision: int) -> str:
    if kind == "real":
        return format(float(value), f".{precision}g")
    if kind == "int":
        return str(int(value))
    return str(value)


def emit_csv(rows: Sequence[Sequence], schema: Sequence[tuple[str, str]],
             path: str, *, precision: int = 17) -> None:
    """RFC-4180-style CSV with a header row and "\\n" line endings.

    ``schema`` pairs column names with kinds in {"real", "int", "str"}; real
    cells carry ``precision`` significant digits, so identical config and
    seed reproduce identical bytes.
    """
    if precision < 1:
        raise ConfigurationError("precision must be >= 1")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([name for name, _ in schema])
    for row in rows:
        if len(row) != len(schema):
            raise ConfigurationError("row width does not match schema")
        writer.writerow([_format_cell(v, kind, precision)
                         for v, (_, kind) in zip(row, schema)])
    _atomic_write(path, buf.getvalue())


def _emit_json(payload: dict, path: str) -> None:
    _atomic_write(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _write_manifest(command: str, rc: Optional[RunConfig],
                    artifacts: Sequence[str], started: float, *,
                    boundary_flags: int = 0,
                    dropped_mass: Optional[dict] = None) -> None:
    if not artifacts:
        return
    manifest = RunManifest(
        tool_version=__version__,
        command=command,
        config_hash=rc.config_hash() if rc is not None else "",
        seed=rc.seed if rc is not None else 0,
        precision_bits=rc.precision_bits if rc is not None else 0,
        workers=rc.workers if rc is not None else 1,
        wall_seconds=time.monotonic() - started,
        boundary_flags=boundary_flags,
        dropped_mass=dropped_mass or {},
        registry=load_registry(),
        artifacts=tuple(artifacts),
    )
    _atomic_write(artifacts[0] + ".manifest.json",
                  json.dumps(asdict(manifest), sort_keys=True, indent=2) + "\n")


def _render_figure(path: str, draw, no_figure: bool) -> Optional[str]:
    """Agg-rendered PNG beside the delimited output; None when opted out."""
    if no_figure:
        return None
    import matplotlib
    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(7.0, 4.5), dpi=120)
    draw(ax)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
    return path


def _print_json(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _complex_dict(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


# -- subcommands -----------------------------------------------------------------


def _cmd_spectrum(args) -> int:
    started = time.monotonic()
    rc = load_run_config(args.config, workers=args.workers, seed=args.seed)
    lines = enumerate_spectrum(rc.manifold, args.tmax)
    rows = [(math.nextafter(ln.eigenvalue, -math.inf),
             math.nextafter(ln.eigenvalue, math.inf),
             ln.multiplicity, ln.source, ln.m, ln.k, ln.shell)
            for ln in lines]
    schema = [("lambda_lo", "real"), ("lambda_hi", "real"),
              ("multiplicity", "int"), ("source", "str"),
              ("m", "int"), ("k", "int"), ("n", "int")]
    emit_csv(rows, schema, args.out, precision=args.precision)
    artifacts = [args.out]

    def draw(ax):
        ts = np.array([ln.eigenvalue for ln in lines])
        steps = np.cumsum([ln.multiplicity for ln in lines]) + 1.0
        ax.step(ts, steps, where="post", lw=0.8, label="count")
        grid = np.linspace(0.0, float(args.tmax), 400)
        main = rc.manifold.weyl_main(1.0) * 0.0 + \
            rc.manifold.main_coefficient() * (grid / (2 * math.pi)) \
            ** (rc.manifold.l + 0.5)
        ax.plot(grid, main, lw=0.8, label="main term")
        ax.set_xlabel("t")
        ax.set_ylabel("N(t)")
        ax.legend()

    fig = _render_figure(os.path.splitext(args.out)[0] + ".png", draw,
                         args.no_figure)
    if fig:
        artifacts.append(fig)
    _write_manifest("spectrum", rc, artifacts, started)
    return 0


def _cmd_count(args) -> int:
    started = time.monotonic()
    rc = load_run_config(args.config, workers=args.workers, seed=args.seed)
    if (args.t is None) == (args.x is None):
        raise UsageError("give exactly one of --t, --x")
    counter = SpectrumCounter(rc.manifold)
    if args.t is not None:
        t = Fraction(args.t)
        count = counter.count_t(t)
        x = float(t) / (2.0 * math.pi)
        payload = {"t": float(t)}
    else:
        x_exact = Fraction(args.x)
        count = counter.count_x(x_exact)
        x = float(x_exact)
        payload = {"t": 2.0 * math.pi * x}
    main = rc.manifold.weyl_main(x)
    payload.update({"x": x, "count": count, "main": main,
                    "remainder": count - main})
    _print_json(payload)
    if args.out:
        _emit_json(payload, args.out)
        _write_manifest("count", rc, [args.out], started)
    return 0


def _cmd_psi_check(args) -> int:
    started = time.monotonic()
    rc = load_run_config(args.config, workers=args.workers, seed=args.seed)
    if not (0 < args.xmin < args.xmax) or args.samples < 2:
        raise ConfigurationError("need 0 < xmin < xmax and samples >= 2")
    ratio = (args.xmax / args.xmin) ** (1.0 / (args.samples - 1))
    xs = [args.xmin * ratio ** i for i in range(args.samples)]
    counter = SpectrumCounter(rc.manifold)
    tally = BoundaryTally()
    rows = []
    for x in xs:
        xf = Fraction(x)
        r_exact = counter.count_x(xf) - rc.manifold.weyl_main(x)
        psi_val = psi_sum_R(rc.manifold, xf, tally)
        rows.append((x, r_exact, psi_val, r_exact - psi_val))
    schema = [("x", "real"), ("R_exact", "real"), ("psi_sum", "real"),
              ("residual", "real")]
    emit_csv(rows, schema, args.out, precision=args.precision)
    artifacts = [args.out]
    logs = [(math.log(r[0]), math.log(abs(r[3]))) for r in rows if r[3] != 0.0]
    slope = None
    if len(logs) >= 2:
        slope = float(np.polyfit([p[0] for p in logs],
                                 [p[1] for p in logs], 1)[0])

    def draw(ax):
        ax.loglog([r[0] for r in rows], [abs(r[3]) + 1e-300 for r in rows],
                  ".", ms=3.0)
        ax.set_xlabel("x")
        ax.set_ylabel("|R - sawtooth sum|")
        if slope is not None:
            ax.set_title(f"fitted slope {slope:.3f}")

    fig = _render_figure(os.path.splitext(args.out)[0] + ".png", draw,
                         args.no_figure)
    if fig:
        artifacts.append(fig)
    _write_manifest("psi-check", rc, artifacts, started,
                    boundary_flags=tally.count)
    _print_json({"samples": args.samples, "slope": slope,
                 "boundary_flags": tally.count})
    return 0


def _cmd_vaaler_check(args) -> int:
    started = time.monotonic()
    if args.grid < 2:
        raise ConfigurationError("grid must be >= 2")
    us = (np.arange(args.grid) + 0.5) / args.grid
    values, envelopes = vaaler_grid(us, args.H)
    exact = us - np.floor(us) - 0.5
    err = np.abs(exact - values)
    violations = int(np.sum(err > envelopes))
    payload = {"H": args.H, "grid": args.grid, "violations": violations,
               "max_error": float(np.max(err)),
               "max_envelope": float(np.max(envelopes))}
    _print_json(payload)
    if args.out:
        schema = [("u", "real"), ("value", "real"), ("envelope", "real"),
                  ("abs_error", "real")]
        emit_csv(list(zip(us, values, envelopes, err)), schema, args.out,
                 precision=args.precision)
        _write_manifest("vaaler-check", None, [args.out], started)
    return 0


def _cmd_vdc_check(args) -> int:
    started = time.monotonic()
    rc = load_run_config(args.config, workers=args.workers, seed=args.seed)
    report = transformed_block_sum(rc.manifold, args.x, args.h, args.j1,
                                   args.j)
    payload = {
        "direct": _complex_dict(report.direct),
        "transformed": _complex_dict(report.transformed),
        "difference": abs(report.direct - report.transformed),
        "envelope": report.envelope,
        "envelope_log": report.envelope_log,
        "envelope_length": report.envelope_length,
        "envelope_endpoint": report.envelope_endpoint,
        "r_first": report.r_first,
        "r_last": report.r_last,
        "block": asdict(report.block),
        "boundary_flagged": report.boundary_flagged,
        "half_weight_r": report.half_weight_r,
    }
    _print_json(payload)
    if args.out:
        _emit_json(payload, args.out)
        _write_manifest("vdc-check", rc, [args.out], started,
                        boundary_flags=int(report.boundary_flagged))
    return 0


def _cmd_voronoi(args) -> int:
    started = time.monotonic()
    rc = load_run_config(args.config, workers=args.workers, seed=args.seed)
    if args.samples < 1:
        raise ConfigurationError("samples must be >= 1")
    terms = voronoi_terms(rc.manifold, args.T, args.H)
    xs = args.T + (np.arange(args.samples) + 0.5) * (args.T / args.samples)
    series = terms.evaluate_many(xs)
    counter = SpectrumCounter(rc.manifold)
    rows = []
    for x, s in zip(np.asarray(xs, dtype=np.float64), series):
        r_exact = counter.count_x(Fraction(float(x))) \
            - rc.manifold.weyl_main(float(x))
        rows.append((float(x), float(s), r_exact))
    schema = [("x", "real"), ("series", "real"), ("R_exact", "real")]
    emit_csv(rows, schema, args.out, precision=args.precision)
    artifacts = [args.out]
    corr = None
    if args.samples >= 3:
        corr = float(np.corrcoef([r[1] for r in rows],
                                 [r[2] for r in rows])[0, 1])

    def draw(ax):
        ax.plot([r[0] for r in rows], [r[2] for r in rows], lw=0.7,
                label="R exact")
        ax.plot([r[0] for r in rows], [r[1] for r in rows], lw=0.7,
                label="oscillating series")
        ax.set_xlabel("x")
        title = f"kept {terms.kept} terms"
        if corr is not None:
            title += f", correlation {corr:.4f}"
        ax.set_title(title)
        ax.legend()

    fig = _render_figure(os.path.splitext(args.out)[0] + ".png", draw,
                         args.no_figure)
    if fig:
        artifacts.append(fig)
    _write_manifest("voronoi", rc, artifacts, started,
                    dropped_mass={"series_mass": terms.dropped_mass_bound})
    _print_json({"kept": terms.kept, "correlation": corr,
                 "dropped_mass_bound": terms.dropped_mass_bound})
    return 0


def _cmd_alpha_count(args) -> int:
    started = time.monotonic()
    rc = load_run_config(args.config, workers=args.workers, seed=args.seed)
    box = BoxSpec(args.H1, args.H2, args.N1, args.N2, args.delta)
    stats = count_solutions(rc.manifold.theta, box,
                            budget=rc.budget_tuples, workers=rc.workers)
    payload = asdict(stats)
    payload["ratio"] = stats.ratio
    _emit_json(payload, args.out)
    _write_manifest("alpha-count", rc, [args.out], started)
    _print_json(payload)
    return 0


def _cmd_meansquare(args) -> int:
    started = time.monotonic()
    rc = load_run_config(args.config, workers=args.workers, seed=args.seed)
    if args.ladder < 5:
        raise ConfigurationError("ladder must be >= 5")
    if not 1.0 < args.Tmin < args.Tmax:
        raise ConfigurationError("need 1 < Tmin < Tmax")
    ratio = (args.Tmax / args.Tmin) ** (1.0 / (args.ladder - 1))
    ladder = [args.Tmin * ratio ** k for k in range(args.ladder)]
    report = fit_mean_square(rc.manifold, ladder, target_eps=args.eps)
    payload = asdict(report)
    payload["t_ladder"] = list(report.t_ladder)
    payload["integrals"] = list(report.integrals)
    _emit_json(payload, args.out)
    artifacts = [args.out]

    def draw(ax):
        ts = np.array(report.t_ladder)
        ax.loglog(ts, report.integrals, "o", ms=4.0, label="window integral")
        ax.loglog(ts, report.theoretical_constant
                  * ts ** report.theoretical_exponent, lw=0.8,
                  label="predicted law")
        ax.set_xlabel("T")
        ax.set_ylabel("integral of R^2 over [1, T]")
        ax.set_title(f"fitted exponent {report.fitted_exponent:.3f}, "
                     f"constant ratio {report.constant_ratio:.3f}")
        ax.legend()

    fig = _render_figure(os.path.splitext(args.out)[0] + ".png", draw,
                         args.no_figure)
    if fig:
        artifacts.append(fig)
    _write_manifest("meansquare", rc, artifacts, started,
                    dropped_mass={"c_tail_bound": report.c_tail_bound})
    _print_json({"fitted_exponent": report.fitted_exponent,
                 "constant_ratio": report.constant_ratio})
    return 0


def _cmd_constant(args) -> int:
    started = time.monotonic()
    rc = load_run_config(args.config, workers=args.workers, seed=args.seed)
    value_a, bound_a = compute_C(rc.manifold, args.eps, schedule="a")
    value_b, bound_b = compute_C(rc.manifold, args.eps, schedule="b")
    payload = {
        "value": value_a,
        "tail_bound": bound_a,
        "schedule_b_value": value_b,
        "schedule_b_bound": bound_b,
        "schedule_gap": abs(value_a - value_b),
        "theoretical_constant": theoretical_constant(rc.manifold, value_a),
    }
    _print_json(payload)
    if args.out:
        _emit_json(payload, args.out)
        _write_manifest("constant", rc, [args.out], started,
                        dropped_mass={"c_tail_bound": bound_a})
    return 0


def _cmd_metric_map(args) -> int:
    started = time.monotonic()
    metric = TorusMetricConfig(args.h11, args.h12, args.h22, args.g3,
                               theta_rational=args.rational)
    result = torus_metric_map(metric, target_eps=args.eps)
    payload = {
        "d_squared": result.d_squared,
        "d": result.d,
        "theta_value": result.theta_value,
        "manifold": {"l": result.manifold.l,
                     "theta": result.manifold.theta.to_config()},
        "constant_scale": result.constant_scale,
        "c_value": result.c_value,
        "c_tail_bound": result.c_tail_bound,
        "scaled_constant": result.scaled_constant,
    }
    _print_json(payload)
    if args.out:
        _emit_json(payload, args.out)
        _write_manifest("metric-map", None, [args.out], started,
                        dropped_mass={"c_tail_bound": result.c_tail_bound})
    return 0


def _cmd_accept(args) -> int:
    from .acceptance import run_suite
    if args.suite != "primary":
        raise UsageError(f"unknown suite {args.suite!r}")
    numbers = None
    if args.criteria:
        try:
            numbers = sorted({int(tok) for tok in args.criteria.split(",")})
        except ValueError as exc:
            raise UsageError("--criteria wants comma-separated integers") \
                from exc
    results = run_suite(numbers=numbers, workers=args.workers or 1,
                        seed=args.seed or 0)
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        failed += not res.passed
        sys.stdout.write(f"{status}  {res.number:>2}  {res.name:<28} "
                         f"{res.measured}  [pinned {res.pinned}]  "
                         f"({res.seconds:.1f}s)\n")
    sys.stdout.write(f"{len(results) - failed}/{len(results)} criteria "
                     f"passed\n")
    return 0 if failed == 0 else 1


# -- parser ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        raise UsageError(message)


def _add_common(sub, *, config=True, out_required=False, out=True):
    if config:
        sub.add_argument("--config", required=True,
                         help="JSON manifold/run configuration")
    if out:
        sub.add_argument("--out", required=out_required,
                         help="artifact path" + ("" if out_required
                                                 else " (optional)"))
    sub.add_argument("--workers", type=int, default=None,
                     help="worker pool size (overrides config)")
    sub.add_argument("--seed", type=int, default=None,
                     help="seed for randomized sampling (overrides config)")
    sub.add_argument("--precision", type=int, default=17,
                     help="significant digits per real CSV column")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="heisenweyl",
                     description="exact spectra, remainder analysis, and "
                                 "mean-square verification")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("spectrum", help="enumerate eigenvalue lines to CSV")
    _add_common(p, out_required=True)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(func=_cmd_spectrum)

    p = subs.add_parser("count", help="exact counting point as JSON")
    _add_common(p)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--x", type=float, default=None)
    p.set_defaults(func=_cmd_count)

    p = subs.add_parser("psi-check", help="remainder vs sawtooth sum profile")
    _add_common(p, out_required=True)
    p.add_argument("--xmin", type=float, required=True)
    p.add_argument("--xmax", type=float, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(func=_cmd_psi_check)

    p = subs.add_parser("vaaler-check", help="sawtooth majorant grid check")
    _add_common(p, config=False)
    p.add_argument("--H", type=float, required=True)
    p.add_argument("--grid", type=int, required=True)
    p.set_defaults(func=_cmd_vaaler_check)

    p = subs.add_parser("vdc-check",
                        help="direct vs transformed block sum report")
    _add_common(p)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--j1", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.set_defaults(func=_cmd_vdc_check)

    p = subs.add_parser("voronoi",
                        help="oscillating remainder series vs exact R")
    _add_common(p, out_required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--H", type=float, default=None)
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(func=_cmd_voronoi)

    p = subs.add_parser("alpha-count",
                        help="exact near-collision count in a dyadic box")
    _add_common(p, out_required=True)
    p.add_argument("--H1", type=int, required=True)
    p.add_argument("--H2", type=int, required=True)
    p.add_argument("--N1", type=int, required=True)
    p.add_argument("--N2", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.set_defaults(func=_cmd_alpha_count)

    p = subs.add_parser("meansquare",
                        help="window-integral ladder against the power law")
    _add_common(p, out_required=True)
    p.add_argument("--Tmin", type=float, required=True)
    p.add_argument("--Tmax", type=float, required=True)
    p.add_argument("--ladder", type=int, required=True)
    p.add_argument("--eps", type=float, default=1e-8)
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(func=_cmd_meansquare)

    p = subs.add_parser("constant",
                        help="diagonal series constant with certified tail")
    _add_common(p)
    p.add_argument("--eps", type=float, required=True)
    p.set_defaults(func=_cmd_constant)

    p = subs.add_parser("metric-map",
                        help="torus metric data to manifold parameters")
    _add_common(p, config=False)
    p.add_argument("--h11", type=float, required=True)
    p.add_argument("--h12", type=float, required=True)
    p.add_argument("--h22", type=float, required=True)
    p.add_argument("--g3", type=float, required=True)
    p.add_argument("--rational", action="store_true",
                   help="declare the derived theta rational")
    p.add_argument("--eps", type=float, default=1e-8)
    p.set_defaults(func=_cmd_metric_map)

    p = subs.add_parser("accept", help="run the acceptance criteria matrix")
    _add_common(p, config=False, out=False)
    p.add_argument("--suite", required=True)
    p.add_argument("--criteria", default=None,
                   help="comma-separated criterion numbers (default: all)")
    p.set_defaults(func=_cmd_accept)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except (ConfigurationError, SpectrumDepthError, ValueError) as exc:
        sys.stderr.write(f"precondition error: {exc}\n")
        return 2
    except BudgetError as exc:
        sys.stderr.write(f"budget exhausted: {exc}\n")
        return 3
    except OSError as exc:
        sys.stderr.write(f"i/o failure: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
