"""Gap statistics for the two-radical quantity

    alpha(theta; h1, h2, n1, n2) = sqrt(h1 (2 n1 - theta h1))
                                 - sqrt(h2 (2 n2 - theta h2)),

whose near-collisions control the off-diagonal mass of the remainder's mean
square.  The module provides a certified evaluator for alpha, an exact
counter for |alpha| <= delta over dyadic boxes (with the rearranged-band
pruning used to bound the count), and empirical lower-bound scans for the
two collision regimes (equal h and distinct h).

The counting predicate |alpha| <= delta is decided in exact surd arithmetic:
with r_i = h_i (2 n_i - theta h_i) and s = r1 + r2 - delta^2,

    |alpha| <= delta  <=>  s <= 0  or  s^2 <= 4 r1 r2,

so no tuple near the threshold is ever misclassified.

Usage:
    >>> from heisenweyl.kernel import IrrationalParameter
    >>> from heisenweyl.gapcount import BoxSpec, count_solutions
    >>> theta = IrrationalParameter.sqrt2()
    >>> stats = count_solutions(theta, BoxSpec(4, 4, 8, 8, 0.05))
    >>> stats.count <= stats.bound
    True
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath as mp
import numpy as np

from .kernel import (
    BudgetError,
    ConfigurationError,
    ExactReal,
    IrrationalParameter,
)
from .spectrum import eval_theta_cached

# float |alpha| farther than this from the threshold is decided in floats;
# anything closer goes through the exact predicate (float error ~1e-11)
_EXACT_WINDOW = 1e-6


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class BoxSpec:
    """Dyadic box: h_i in (H_i, 2H_i], n_i in (N_i, 2N_i], threshold delta."""

    H1: int
    H2: int
    N1: int
    N2: int
    delta: float

    def __post_init__(self) -> None:
        for name in ("H1", "H2", "N1", "N2"):
            v = getattr(self, name)
            if not (isinstance(v, int) and v >= 2):
                raise ConfigurationError(f"{name} must be an integer >= 2")
        if not self.delta > 0:
            raise ConfigurationError("delta must be positive")

    @property
    def volume(self) -> int:
        return self.H1 * self.H2 * self.N1 * self.N2


@dataclass(frozen=True)
class GapStatistics:
    """Exact solution count of |alpha| <= delta plus the analytic bound."""

    count: int
    bound: float
    min_alpha_nonzero: float
    min_alpha_witness: Optional[tuple[int, int, int, int]]
    box: BoxSpec
    pruned: bool
    admissible: int  # tuples with both radicands positive

    @property
    def ratio(self) -> float:
        return self.count / self.bound


@dataclass(frozen=True)
class LowerBoundReport:
    """Scaled |alpha| minima for the equal-h and distinct-h regimes.

    The distinct_sq_* fields rescale the same tuples by
    |h1^2 - h2^2|^{gamma+epsilon} instead of (h1 h2)^{(gamma+epsilon)/2}.
    The square difference is the integer whose theta-multiples must stay
    away from integers for alpha to stay away from zero, so this scaling
    isolates the rational-approximation mechanism behind the gap.
    """

    equal_h_min: float
    equal_h_witness: Optional[tuple[int, int, int, int]]
    distinct_h_min: float
    distinct_h_witness: Optional[tuple[int, int, int, int]]
    rungs: tuple[tuple[int, int], ...]
    equal_h_rung_minima: tuple[float, ...]
    distinct_h_rung_minima: tuple[float, ...]
    equal_h_trend: Optional[float]
    distinct_h_trend: Optional[float]
    gamma: float
    epsilon: float
    distinct_sq_min: float = math.inf
    distinct_sq_witness: Optional[tuple[int, int, int, int]] = None
    distinct_sq_rung_minima: tuple[float, ...] = ()
    distinct_sq_trend: Optional[float] = None


# ---------------------------------------------------------------------------
# alpha


def _radicand(theta: IrrationalParameter, h: int, n: int) -> ExactReal:
    """h (2n - theta h) = 2hn - theta h^2, exact."""
    return theta.linear(2 * h * n, -h * h)


def alpha(theta: IrrationalParameter, h1: int, h2: int, n1: int,
          n2: int) -> float:
    """Certified evaluation of the radical gap; exact zeros return 0.0.

    Zero is decided exactly: both radicands are (rational + rational * surd)
    values, and sqrt(r1) = sqrt(r2) with r1, r2 > 0 iff r1 = r2, which for
    irrational theta forces h1 = h2 and n1 = n2.
    """
    for h, n in ((h1, n1), (h2, n2)):
        if h < 1 or n < 1:
            raise ConfigurationError("h and n must be positive integers")
    r1 = _radicand(theta, h1, n1)
    r2 = _radicand(theta, h2, n2)
    if r1.sign() <= 0 or r2.sign() <= 0:
        raise ConfigurationError("radicand nonpositive: need n > theta h")
    if r1 == r2:
        return 0.0
    bits = 160
    while True:
        with mp.workprec(bits):
            diff = mp.sqrt(r1.to_mpf(bits)) - mp.sqrt(r2.to_mpf(bits))
        if diff != 0:
            return float(diff)
        bits *= 2  # r1 != r2 exactly, so refinement terminates
        if bits > (1 << 13):
            raise ArithmeticError("alpha enclosure failed to separate from 0")


def _alpha_within_delta(r1: ExactReal, r2: ExactReal,
                        delta_sq: Fraction) -> bool:
    """Exact predicate |sqrt(r1) - sqrt(r2)| <= delta (r1, r2 > 0).

    (sqrt(r1) - sqrt(r2))^2 <= delta^2 rearranges to
    r1 + r2 - delta^2 <= 2 sqrt(r1 r2); a nonpositive left side is immediate,
    otherwise both sides are positive and squaring decides exactly.
    """
    s = (r1 + r2) - delta_sq
    if s.sign() <= 0:
        return True
    return (s * s - (r1 * r2).scale(4)).sign() <= 0


# ---------------------------------------------------------------------------
# counting


def bound_value(box: BoxSpec) -> float:
    """Analytic ceiling delta V^{3/4} + V^{1/2} log^2 V, V = H1 H2 N1 N2."""
    V = float(box.volume)
    return box.delta * V ** 0.75 + math.sqrt(V) * math.log(V) ** 2


def _theta_floor_table(theta: IrrationalParameter, h_max: int) -> dict[int, int]:
    return {h: theta.linear(0, h).floor() for h in range(1, h_max + 1)}


def count_solutions(theta: IrrationalParameter, box: BoxSpec, *,
                    budget: int = 10 ** 9, pruned: bool = True,
                    margin: float = 0.5, workers: int = 1) -> GapStatistics:
    """Exact count of box tuples with |alpha| <= delta, plus box minima.

    The pruned scan restricts n2 to the rearranged band
    |2(h1 n1 - h2 n2) - theta (h1^2 - h2^2)| <= delta (sqrt(h1 n1) +
    sqrt(h2 n2)) (1 + margin); since sqrt(r_i) <= sqrt(2 h_i n_i), any
    margin >= sqrt(2) - 1 makes the band a proven superset of the solution
    set (the default 0.5 qualifies).  Candidates are then decided by the
    exact surd predicate, so pruned and unpruned scans agree tuple-for-tuple.

    The nominal tuple budget is consumed per (h1, h2) sub-box; exceeding it
    raises BudgetError carrying the completed sub-box list.
    """
    if margin < math.sqrt(2.0) - 1.0:
        raise ConfigurationError("margin below sqrt(2)-1 breaks the band superset")
    if workers < 1:
        raise ConfigurationError("workers must be >= 1")
    lo, _ = eval_theta_cached(theta, 64)
    theta_f = float(lo)
    delta = box.delta
    delta_sq = Fraction(delta) ** 2
    floors = _theta_floor_table(theta, 2 * max(box.H1, box.H2))
    h1_range = range(box.H1 + 1, 2 * box.H1 + 1)
    h2_range = range(box.H2 + 1, 2 * box.H2 + 1)
    pairs = [(a, b) for a in h1_range for b in h2_range]
    # workers partition the (h1, h2) list; merges below are order-invariant
    chunks = [pairs[w::workers] for w in range(workers)]
    count = 0
    admissible = 0
    best = math.inf
    witness: Optional[tuple[int, int, int, int]] = None
    spent = 0
    completed: list[tuple[int, int]] = []
    sub_volume = box.N1 * box.N2
    per_pair: dict[tuple[int, int], tuple] = {}
    for chunk in chunks:
        for h1, h2 in chunk:
            if spent + sub_volume > budget:
                raise BudgetError(
                    f"tuple budget {budget} exhausted",
                    completed=sorted(completed))
            spent += sub_volume
            res = _scan_pair(theta, theta_f, floors, box, h1, h2, delta,
                             delta_sq, pruned, margin)
            per_pair[(h1, h2)] = res
            completed.append((h1, h2))
    for key in sorted(per_pair):
        c, adm, mn, wit = per_pair[key]
        count += c
        admissible += adm
        if wit is not None and (mn < best or (mn == best and
                                              (witness is None or wit < witness))):
            best = mn
            witness = wit
    return GapStatistics(
        count=count,
        bound=bound_value(box),
        min_alpha_nonzero=best,
        min_alpha_witness=witness,
        box=box,
        pruned=pruned,
        admissible=admissible,
    )


def _scan_pair(theta, theta_f, floors, box, h1, h2, delta, delta_sq,
               pruned, margin):
    """Count and minima contribution of one (h1, h2) sub-box."""
    n1_lo = max(box.N1 + 1, floors[h1] + 1)
    n2_lo = max(box.N2 + 1, floors[h2] + 1)
    n1_hi, n2_hi = 2 * box.N1, 2 * box.N2
    if n1_lo > n1_hi or n2_lo > n2_hi:
        return 0, 0, math.inf, None
    n1s = np.arange(n1_lo, n1_hi + 1, dtype=float)
    shift = theta_f * (h1 * h1 - h2 * h2)
    count = 0
    admissible = (n1_hi - n1_lo + 1) * (n2_hi - n2_lo + 1)
    # nonzero-|alpha| minimum: alpha is monotone in n2, so for each n1 the
    # minimizer sits at the rounded band center; check offsets -1, 0, 1
    centers = (2.0 * h1 * n1s - shift) / (2.0 * h2)
    best = math.inf
    witness = None
    r1_vals = h1 * (2.0 * n1s - theta_f * h1)
    for off in (-1, 0, 1):
        n2c = np.clip(np.round(centers) + off, n2_lo, n2_hi)
        r2_vals = h2 * (2.0 * n2c - theta_f * h2)
        av = np.abs(np.sqrt(r1_vals) - np.sqrt(r2_vals))
        zero = (h1 == h2) & (n1s == n2c)  # the only exact zeros in the box
        av = np.where(zero, np.inf, av)
        k = int(np.argmin(av))
        val = float(av[k])
        cand = (h1, h2, int(n1s[k]), int(n2c[k]))
        if val < best or (val == best and witness is not None and cand < witness):
            best = val
            witness = cand if val < math.inf else None
    if pruned:
        width = (delta * (np.sqrt(h1 * n1s)
                          + np.sqrt(np.maximum(h2 * centers, 0.0)))
                 * (1.0 + margin)) / (2.0 * h2) + 1.0
        lo_band = np.maximum(np.ceil(centers - width), n2_lo).astype(int)
        hi_band = np.minimum(np.floor(centers + width), n2_hi).astype(int)
        for i, n1 in enumerate(range(n1_lo, n1_hi + 1)):
            if lo_band[i] > hi_band[i]:
                continue
            count += _count_candidates(theta, theta_f, h1, h2, n1,
                                       lo_band[i], hi_band[i], delta, delta_sq)
    else:
        for n1 in range(n1_lo, n1_hi + 1):
            count += _count_candidates(theta, theta_f, h1, h2, n1,
                                       n2_lo, n2_hi, delta, delta_sq)
    return count, admissible, best, witness


def _count_candidates(theta, theta_f, h1, h2, n1, n2_lo, n2_hi, delta,
                      delta_sq) -> int:
    """Decide |alpha| <= delta for n2 in [n2_lo, n2_hi]; exact near ties."""
    n2_lo, n2_hi = int(n2_lo), int(n2_hi)
    n2s = np.arange(n2_lo, n2_hi + 1, dtype=float)
    a1 = math.sqrt(h1 * (2.0 * n1 - theta_f * h1))
    av = np.abs(a1 - np.sqrt(h2 * (2.0 * n2s - theta_f * h2)))
    clear_in = av <= delta - _EXACT_WINDOW
    near = np.abs(av - delta) < _EXACT_WINDOW
    count = int(np.count_nonzero(clear_in))
    for idx in np.nonzero(near)[0]:
        n2 = n2_lo + int(idx)
        r1 = _radicand(theta, h1, n1)
        r2 = _radicand(theta, h2, n2)
        if _alpha_within_delta(r1, r2, delta_sq):
            count += 1
    return count


# ---------------------------------------------------------------------------
# lower-bound scans


def _trend(minima: list[float]) -> Optional[float]:
    pts = [(i, math.log(v)) for i, v in enumerate(minima) if v < math.inf and v > 0]
    if len(pts) < 2:
        return None
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    return float(np.polyfit(xs, ys, 1)[0])


def alpha_lower_bounds(theta: IrrationalParameter, gamma: float, h_max: int,
                       n_max: int, epsilon: float = 0.05) -> LowerBoundReport:
    """Scaled minima of |alpha| over the collision-relevant tuples.

    Scans 1 <= h1, h2 <= h_max, theta h_i < n_i <= n_max, keeping tuples with
    0 < |alpha| < (1/10) beta^{1/4}, beta = r1 r2.  Equal-h tuples are scored
    by |alpha| (n1 n2)^{1/4} / h^{1/2}; distinct-h tuples by
    |alpha| (h1 h2 n1 n2)^{1/4} (h1 h2)^{(gamma+epsilon)/2}.  Minima are also
    recorded on a dyadic ladder of sub-ranges to expose the trend.
    """
    if h_max < 2 or n_max < 4:
        raise ConfigurationError("need h_max >= 2 and n_max >= 4")
    if gamma <= 0:
        raise ConfigurationError("gamma must be positive")
    lo, _ = eval_theta_cached(theta, 64)
    theta_f = float(lo)
    floors = _theta_floor_table(theta, h_max)
    # dyadic ladder: n scales with h so every rung sees both regimes
    rungs = []
    h_cap, n_cap = 2, max(4, n_max // (h_max // 2))
    while h_cap <= h_max:
        rungs.append((h_cap, min(n_cap, n_max)))
        h_cap *= 2
        n_cap *= 2
    exp_he = 0.5 * (gamma + epsilon)
    best_eq, wit_eq = math.inf, None
    best_ne, wit_ne = math.inf, None
    best_sq, wit_sq = math.inf, None
    rung_eq = [math.inf] * len(rungs)
    rung_ne = [math.inf] * len(rungs)
    rung_sq = [math.inf] * len(rungs)
    for h1 in range(1, h_max + 1):
        n1_lo = floors[h1] + 1
        if n1_lo > n_max:
            continue
        n1s = np.arange(n1_lo, n_max + 1, dtype=float)
        r1 = h1 * (2.0 * n1s - theta_f * h1)
        for h2 in range(1, h_max + 1):
            n2_lo = floors[h2] + 1
            if n2_lo > n_max:
                continue
            n2s = np.arange(n2_lo, n_max + 1, dtype=float)
            r2 = h2 * (2.0 * n2s - theta_f * h2)
            a = np.abs(np.sqrt(r1)[:, None] - np.sqrt(r2)[None, :])
            beta = r1[:, None] * r2[None, :]
            # a == 0.0 occurs exactly on the h1==h2, n1==n2 diagonal
            keep = (a > 0.0) & (a < 0.1 * beta ** 0.25)
            scores = []
            if h1 == h2:
                base = a * (n1s[:, None] * n2s[None, :]) ** 0.25 / math.sqrt(h1)
                scores.append(("eq", np.where(keep, base, np.inf)))
            else:
                base = a * (h1 * h2 * n1s[:, None] * n2s[None, :]) ** 0.25
                sq = abs(h1 * h1 - h2 * h2)
                scores.append(
                    ("ne", np.where(keep, base * (h1 * h2) ** exp_he, np.inf)))
                scores.append(
                    ("sq", np.where(keep, base * sq ** (gamma + epsilon),
                                    np.inf)))
            for regime, score in scores:
                k = int(np.argmin(score))
                val = float(score.flat[k])
                if val < math.inf:
                    i, jdx = divmod(k, score.shape[1])
                    cand = (h1, h2, int(n1s[i]), int(n2s[jdx]))
                    if regime == "eq":
                        if val < best_eq or (val == best_eq and
                                             (wit_eq is None or cand < wit_eq)):
                            best_eq, wit_eq = val, cand
                    elif regime == "ne":
                        if val < best_ne or (val == best_ne and
                                             (wit_ne is None or cand < wit_ne)):
                            best_ne, wit_ne = val, cand
                    else:
                        if val < best_sq or (val == best_sq and
                                             (wit_sq is None or cand < wit_sq)):
                            best_sq, wit_sq = val, cand
                # rung minima: restrict to h <= cap and n <= ncap
                for ri, (hc, nc) in enumerate(rungs):
                    if h1 > hc or h2 > hc:
                        continue
                    sub = score[n1s <= nc][:, n2s <= nc]
                    if sub.size:
                        m = float(sub.min())
                        if regime == "eq":
                            rung_eq[ri] = min(rung_eq[ri], m)
                        elif regime == "ne":
                            rung_ne[ri] = min(rung_ne[ri], m)
                        else:
                            rung_sq[ri] = min(rung_sq[ri], m)
    return LowerBoundReport(
        equal_h_min=best_eq,
        equal_h_witness=wit_eq,
        distinct_h_min=best_ne,
        distinct_h_witness=wit_ne,
        rungs=tuple(rungs),
        equal_h_rung_minima=tuple(rung_eq),
        distinct_h_rung_minima=tuple(rung_ne),
        equal_h_trend=_trend(rung_eq),
        distinct_h_trend=_trend(rung_ne),
        gamma=gamma,
        epsilon=epsilon,
        distinct_sq_min=best_sq,
        distinct_sq_witness=wit_sq,
        distinct_sq_rung_minima=tuple(rung_sq),
        distinct_sq_trend=_trend(rung_sq),
    )
