"""Acceptance criteria matrix: thirteen pinned checks behind one driver.

Each criterion function measures one guaranteed property end to end and
returns a CriterionResult with the measured value, the pinned tolerance, and
the wall time.  ``run_suite`` executes a selection in order and never hides
an exception: a crash inside a criterion is reported as a failure carrying
the message.  The ``accept`` subcommand prints one PASS/FAIL line per
criterion; tests/test_acceptance.py asserts each result.

Usage:
    heisenweyl accept --suite primary
    heisenweyl accept --suite primary --criteria 5,6,7 --workers 4

Criterion 10 pins the stated distinct-index scaling of the gap lower bound;
the measured trend fails that pin (the square-normalized diagnostic in the
same report passes).  The failure is intentional and left visible.
"""

from __future__ import annotations

import json
import math
import os
import random
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .expsum import (
    diagonal_constant_extract,
    dyadic_block,
    load_registry,
    stationary_identity_gap,
    transformed_block_sum,
    voronoi_terms,
)
from .gapcount import BoxSpec, alpha_lower_bounds, bound_value, count_solutions
from .kernel import IrrationalParameter
from .meansquare import compute_C, diagonal_tail_bound, fit_mean_square
from .psiexpr import g_integral, residual_profile, truncated_fourier_grid, vaaler_grid
from .spectrum import (
    ManifoldConfig,
    SpectrumCounter,
    enumerate_spectrum,
    eval_theta_cached,
)

SQRT2 = IrrationalParameter.sqrt2()
GOLDEN = IrrationalParameter.golden()
L1 = ManifoldConfig(l=1, theta=SQRT2)
L2 = ManifoldConfig(l=2, theta=SQRT2)


@dataclass
class CriterionResult:
    """One acceptance check: what was measured against what was pinned."""

    number: int
    name: str
    passed: bool
    measured: str
    pinned: str
    seconds: float


def _log_spaced(lo: float, hi: float, n: int) -> list[float]:
    ratio = (hi / lo) ** (1.0 / (n - 1))
    return [lo * ratio ** i for i in range(n)]


# -- criteria -------------------------------------------------------------------


def criterion_01(workers: int = 1, seed: int = 0) -> CriterionResult:
    """Sawtooth-sum residual slope, l=1, theta in {sqrt2, golden}."""
    t0 = time.monotonic()
    xs = _log_spaced(1e2, 1e5, 200)
    slopes = {}
    for name, theta in (("sqrt2", SQRT2), ("golden", GOLDEN)):
        prof = residual_profile(ManifoldConfig(l=1, theta=theta), xs)
        slopes[name] = prof.slope
    passed = all(s is not None and s <= 0.60 for s in slopes.values())
    measured = ", ".join(f"{k} slope {v:.4f}" for k, v in slopes.items())
    return CriterionResult(1, "residual slope l=1", passed, measured,
                           "slope <= 0.60", time.monotonic() - t0)


def criterion_02(workers: int = 1, seed: int = 0) -> CriterionResult:
    """Sawtooth-sum residual slope, l=2."""
    t0 = time.monotonic()
    prof = residual_profile(L2, _log_spaced(1e2, 1e4, 200))
    passed = prof.slope is not None and prof.slope <= 1.60
    return CriterionResult(2, "residual slope l=2", passed,
                           f"slope {prof.slope:.4f}", "slope <= 1.60",
                           time.monotonic() - t0)


@lru_cache(maxsize=1)
def _ladder_report():
    # shared by criteria 3 and 4: one 8-rung geometric ladder on [1e3, 1e6]
    ratio = (1e6 / 1e3) ** (1.0 / 7.0)
    ladder = [1e3 * ratio ** k for k in range(8)]
    return fit_mean_square(L1, ladder)


def criterion_03(workers: int = 1, seed: int = 0) -> CriterionResult:
    """Mean-square growth exponent over the window ladder."""
    t0 = time.monotonic()
    report = _ladder_report()
    passed = abs(report.fitted_exponent - 2.5) <= 0.1
    return CriterionResult(3, "mean-square exponent", passed,
                           f"exponent {report.fitted_exponent:.4f}",
                           "2.5 +- 0.1", time.monotonic() - t0)


def criterion_04(workers: int = 1, seed: int = 0) -> CriterionResult:
    """Fitted-to-theoretical constant ratio at the ladder top."""
    t0 = time.monotonic()
    report = _ladder_report()
    passed = 0.4 <= report.constant_ratio <= 2.5
    return CriterionResult(4, "mean-square constant", passed,
                           f"ratio {report.constant_ratio:.4f}",
                           "ratio in [0.4, 2.5]", time.monotonic() - t0)


def criterion_05(workers: int = 1, seed: int = 0) -> CriterionResult:
    """Diagonal constant: schedule agreement and block-sum cross-check."""
    t0 = time.monotonic()
    value_a, bound_a = compute_C(L1, 1e-8, schedule="a")
    value_b, _ = compute_C(L1, 1e-8, schedule="b")
    gap = abs(value_a - value_b) / abs(value_a)
    extract = diagonal_constant_extract(L1, 1000, 20)
    tail = diagonal_tail_bound(L1, 1000, 20) + bound_a
    deficit = abs(value_a - extract)
    passed = gap <= 1e-8 and deficit <= tail
    measured = f"schedule gap {gap:.2e}, extract deficit {deficit:.3e}"
    return CriterionResult(5, "diagonal constant stability", passed, measured,
                           f"gap <= 1e-08, deficit <= {tail:.3e}",
                           time.monotonic() - t0)


def criterion_06(workers: int = 1, seed: int = 0) -> CriterionResult:
    """Majorant sawtooth expansion: zero envelope violations."""
    t0 = time.monotonic()
    us = (np.arange(10 ** 4) + 0.5) / 10 ** 4
    exact = us - np.floor(us) - 0.5
    violations = 0
    for H in (10, 50, 250):
        values, envelopes = vaaler_grid(us, H)
        violations += int(np.sum(np.abs(exact - values) > envelopes))
    return CriterionResult(6, "majorant envelope", violations == 0,
                           f"{violations} violations", "0 violations",
                           time.monotonic() - t0)


def criterion_07(workers: int = 1, seed: int = 0) -> CriterionResult:
    """Finite Fourier sawtooth: zero violations of 3 min(1, 1/(H||u||))."""
    t0 = time.monotonic()
    us = (np.arange(10 ** 4) + 0.5) / 10 ** 4
    exact = us - np.floor(us) - 0.5
    frac = us - np.floor(us)
    interior = np.minimum(frac, 1.0 - frac) > 1e-12  # skip jump points
    violations = 0
    for H in (10, 50, 250):
        values, envelopes = truncated_fourier_grid(us, H)
        err = np.abs(exact - values)
        violations += int(np.sum(err[interior] > 3.0 * envelopes[interior]))
    return CriterionResult(7, "fourier envelope", violations == 0,
                           f"{violations} violations", "0 violations",
                           time.monotonic() - t0)


def criterion_08(workers: int = 1, seed: int = 0) -> CriterionResult:
    """Block transform within frozen envelopes; stationary identity."""
    t0 = time.monotonic()
    worst_ratio = 0.0
    cases = 0
    for config in (L1, L2):
        for j1 in range(config.l):
            for x in (1e3, 1e4, 5e4):
                for h in (1, 3, 5):
                    for j in (0, 2, 3):
                        if dyadic_block(config, x, j).is_empty:
                            continue
                        rep = transformed_block_sum(config, x, h, j1, j)
                        deficit = abs(rep.direct - rep.transformed)
                        worst_ratio = max(worst_ratio, deficit / rep.envelope)
                        cases += 1
    rng = random.Random(seed if seed else 20260814)
    theta_f = float(eval_theta_cached(SQRT2, 64)[0])
    worst_gap = 0.0
    for _ in range(1000):
        h = rng.randint(1, 50)
        x = rng.uniform(100.0, 1e5)
        r_lo = int(theta_f * h) + 1
        r = rng.randint(r_lo, r_lo + 500)
        worst_gap = max(worst_gap, stationary_identity_gap(theta_f, x, h, r))
    passed = worst_ratio <= 1.0 and worst_gap < 2.0 ** -60 and cases >= 81
    measured = (f"{cases} blocks, worst deficit/envelope {worst_ratio:.4f}, "
                f"identity gap {worst_gap:.2e}")
    return CriterionResult(8, "block transform envelope", passed, measured,
                           "ratio <= 1, gap < 2^-60",
                           time.monotonic() - t0)


_BOX_LADDER: tuple[tuple[IrrationalParameter, tuple[int, int, int, int], float], ...] = (
    (SQRT2, (2, 2, 4, 4), 0.01),
    (GOLDEN, (2, 2, 4, 4), 0.05),
    (SQRT2, (4, 4, 8, 8), 0.2),
    (GOLDEN, (4, 4, 8, 8), 0.01),
    (SQRT2, (8, 8, 16, 16), 0.05),
    (GOLDEN, (8, 8, 16, 16), 0.2),
    (SQRT2, (16, 16, 32, 32), 0.01),
    (GOLDEN, (16, 16, 32, 32), 0.05),
    (SQRT2, (32, 32, 64, 64), 0.2),
    (GOLDEN, (32, 32, 64, 64), 0.01),
    (SQRT2, (64, 64, 64, 64), 0.05),
    (GOLDEN, (64, 64, 64, 64), 0.2),
)


def criterion_09(workers: int = 1, seed: int = 0) -> CriterionResult:
    """Box-count ceiling with the frozen multiplier; prune equivalence."""
    t0 = time.monotonic()
    c_box = load_registry()["box_bound_c"]["c"]
    worst_ratio = 0.0
    prune_mismatch = 0
    for theta, sides, delta in _BOX_LADDER:
        box = BoxSpec(*sides, delta)
        stats = count_solutions(theta, box, workers=workers)
        worst_ratio = max(worst_ratio, stats.count / (c_box * bound_value(box)))
        if sides[0] * sides[1] * sides[2] * sides[3] <= 10 ** 6:
            full = count_solutions(theta, box, pruned=False, workers=workers)
            prune_mismatch += int(full.count != stats.count)
    passed = worst_ratio <= 1.0 and prune_mismatch == 0
    measured = (f"worst count/(c*bound) {worst_ratio:.4f}, "
                f"{prune_mismatch} prune mismatches")
    return CriterionResult(9, "box-count ceiling", passed, measured,
                           "ratio <= 1, 0 mismatches",
                           time.monotonic() - t0)


def criterion_10(workers: int = 1, seed: int = 0) -> CriterionResult:
    """Gap lower-bound minima positive with non-decaying rung trends.

    The distinct-index trend under the stated scaling measures near -0.38
    and fails the -0.10 pin; report.distinct_sq_trend is the passing
    square-normalized diagnostic.  Left failing on purpose.
    """
    t0 = time.monotonic()
    report = alpha_lower_bounds(SQRT2, 1.0, 16, 64)
    positive = report.equal_h_min > 0 and report.distinct_h_min > 0
    witnessed = (report.equal_h_witness is not None
                 and report.distinct_h_witness is not None)
    trends_ok = (report.equal_h_trend is not None
                 and report.distinct_h_trend is not None
                 and report.equal_h_trend >= -0.10
                 and report.distinct_h_trend >= -0.10)
    passed = positive and witnessed and trends_ok
    measured = (f"minima {report.equal_h_min:.4f}/{report.distinct_h_min:.4f}, "
                f"trends {report.equal_h_trend:.4f}/"
                f"{report.distinct_h_trend:.4f} "
                f"(sq diagnostic {report.distinct_sq_trend:.4f})")
    return CriterionResult(10, "gap lower bounds", passed, measured,
                           "minima > 0, trends >= -0.10",
                           time.monotonic() - t0)


def criterion_11(workers: int = 1, seed: int = 0) -> CriterionResult:
    """Smoothing-kernel integral under its stated ceiling."""
    t0 = time.monotonic()
    T = 1e3
    value = g_integral(L1, T, 2.0 * T, T * T)
    ceiling = T ** 1.5 * T ** -2.0 * math.log(T * T)
    c_measured = value / ceiling
    return CriterionResult(11, "kernel integral ceiling", c_measured <= 10.0,
                           f"c {c_measured:.4f}", "c <= 10",
                           time.monotonic() - t0)


def criterion_12(workers: int = 1, seed: int = 0) -> CriterionResult:
    """Oscillating-series correlation with the exact remainder."""
    t0 = time.monotonic()
    T = 1e4
    terms = voronoi_terms(L1, T)
    xs = T + (np.arange(1000) + 0.5) * (T / 1000.0)
    series = np.asarray(terms.evaluate_many(xs), dtype=np.float64)
    counter = SpectrumCounter(L1)
    exact = np.array([counter.count_x(Fraction(float(x))) - L1.weyl_main(float(x))
                      for x in xs])
    corr = float(np.corrcoef(series, exact)[0, 1])
    return CriterionResult(12, "series correlation", corr >= 0.9,
                           f"correlation {corr:.4f}", ">= 0.9",
                           time.monotonic() - t0)


def _run_cli(argv: list[str], cwd: str) -> None:
    proc = subprocess.run([sys.executable, "-m", "heisenweyl"] + argv,
                          cwd=cwd, capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"cli {' '.join(argv)} exited {proc.returncode}: "
                           f"{proc.stderr.strip()}")


def criterion_13(workers: int = 1, seed: int = 0) -> CriterionResult:
    """Byte-identical artifacts across reruns and worker counts."""
    t0 = time.monotonic()
    mismatches = []
    with tempfile.TemporaryDirectory() as tmp:
        cfg = os.path.join(tmp, "cfg.json")
        with open(cfg, "w", encoding="utf-8") as fh:
            json.dump({"theta": SQRT2.to_config(), "l": 1, "seed": seed}, fh)

        def read(name: str) -> bytes:
            with open(os.path.join(tmp, name), "rb") as fh:
                return fh.read()

        pairs = []
        for run in ("a", "b"):
            _run_cli(["spectrum", "--config", cfg, "--tmax", "200",
                      "--out", os.path.join(tmp, f"s{run}.csv"),
                      "--no-figure"], tmp)
            _run_cli(["psi-check", "--config", cfg, "--xmin", "100",
                      "--xmax", "1000", "--samples", "24",
                      "--out", os.path.join(tmp, f"p{run}.csv"),
                      "--no-figure"], tmp)
        pairs.append(("spectrum rerun", "sa.csv", "sb.csv"))
        pairs.append(("psi-check rerun", "pa.csv", "pb.csv"))
        for w in (1, 4):
            _run_cli(["alpha-count", "--config", cfg, "--H1", "4",
                      "--H2", "4", "--N1", "8", "--N2", "8",
                      "--delta", "0.05", "--workers", str(w),
                      "--out", os.path.join(tmp, f"g{w}.json")], tmp)
        pairs.append(("alpha-count workers 1 vs 4", "g1.json", "g4.json"))
        for label, one, two in pairs:
            if read(one) != read(two):
                mismatches.append(label)
    # stream repartitioning: a shorter enumeration is a prefix of a longer one
    full = enumerate_spectrum(L1, 240.0)
    part = enumerate_spectrum(L1, 120.0)
    if part != full[:len(part)] or full[len(part)].eigenvalue <= 120.0:
        mismatches.append("spectrum repartition")
    passed = not mismatches
    measured = "all identical" if passed else "; ".join(mismatches)
    return CriterionResult(13, "artifact determinism", passed, measured,
                           "byte-identical", time.monotonic() - t0)


_CRITERIA: dict[int, Callable[[int, int], CriterionResult]] = {
    1: criterion_01, 2: criterion_02, 3: criterion_03, 4: criterion_04,
    5: criterion_05, 6: criterion_06, 7: criterion_07, 8: criterion_08,
    9: criterion_09, 10: criterion_10, 11: criterion_11, 12: criterion_12,
    13: criterion_13,
}


def run_suite(numbers: Optional[Sequence[int]] = None, workers: int = 1,
              seed: int = 0) -> list[CriterionResult]:
    """Run the selected criteria in order; crashes become failed results."""
    chosen = sorted(_CRITERIA) if numbers is None else list(numbers)
    results = []
    for n in chosen:
        if n not in _CRITERIA:
            raise ValueError(f"no criterion {n}")
        t0 = time.monotonic()
        try:
            results.append(_CRITERIA[n](workers, seed))
        except Exception as exc:  # a crash is a failure, never a skip
            results.append(CriterionResult(
                n, _CRITERIA[n].__doc__.splitlines()[0].rstrip("."),
                False, f"raised {type(exc).__name__}: {exc}", "no exception",
                time.monotonic() - t0))
    return results
