"""Exact Laplace spectrum of the (2l+1)-dimensional model manifolds.

The spectrum splits into a torus family (eigenvalue 4 pi^2 n carrying the
lattice-shell multiplicity r_{2l}(n)) and a center family (eigenvalue
2 pi (theta m^2 + m k) for m >= 1 and k >= l with k = l mod 2, carrying
multiplicity 2 m^l times the number of odd compositions of k into l parts).
All threshold decisions are exact: center eigenvalues compare to a rational
cut through surd arithmetic, torus eigenvalues through certified pi
enclosures with precision escalation.

Counting uses closed forms only - the cumulative composition count collapses
to one binomial per m - so a single N(t) query needs O(sqrt(t)) exact floors
and no spectral enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import mpmath as mp
import numpy as np

from .kernel import (DEFAULT_BITS, ExactReal, IrrationalParameter, PrecisionError,
                     eval_theta)

_MAX_BITS = 1 << 14


@dataclass(frozen=True)
class ManifoldConfig:
    """Geometry selector: half-dimension parameter l >= 1 and the metric parameter."""

    l: int
    theta: IrrationalParameter

    def __post_init__(self):
        if self.l < 1:
            raise ValueError("l must be >= 1")

    @property
    def dimension(self) -> int:
        return 2 * self.l + 1

    def volume(self) -> float:
        """Riemannian volume sqrt(2 pi / theta) of the quotient."""
        return math.sqrt(2.0 * math.pi / float(self.theta.exact()))

    def main_coefficient(self) -> float:
        """A in main(2 pi x) = A x^(l + 1/2)."""
        l = self.l
        return 2.0 ** -l * math.sqrt(math.pi) / (math.gamma(l + 1.5)
                                                 * math.sqrt(float(self.theta.exact())))

    def weyl_main(self, x: float) -> float:
        """Smooth main term of the counting function at eigenvalue cut 2 pi x."""
        return self.main_coefficient() * float(x) ** (self.l + 0.5)


@dataclass(frozen=True)
class SpectralLine:
    """One distinct eigenvalue with its multiplicity and lattice label."""

    eigenvalue: float
    multiplicity: int
    source: str  # "torus" or "center"
    m: int = 0
    k: int = 0
    shell: int = -1


@dataclass(frozen=True)
class CountingPoint:
    """Counting function sampled at eigenvalue cut t = 2 pi x."""

    x: float
    count: int
    main: float
    remainder: float


def ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n."""
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


# ---------------------------------------------------------------------------
# Multiplicities
# ---------------------------------------------------------------------------


def composition_count(k: int, l: int) -> int:
    """Number of l-tuples of odd positive integers summing to k."""
    if l < 1:
        raise ValueError("l must be >= 1")
    if k < l or (k - l) % 2:
        return 0
    return math.comb((k - l) // 2 + l - 1, l - 1)


def _cumulative_compositions(k_max: int, l: int) -> int:
    """Sum of composition_count(k, l) over k <= k_max (hockey-stick identity)."""
    if k_max < l:
        return 0
    return math.comb((k_max - l) // 2 + l, l)


def r2l_shell_histogram(l: int, n_max: int) -> np.ndarray:
    """r_{2l}(n) for n = 0..n_max: lattice points of squared norm n in Z^{2l}."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    h2 = np.zeros(n_max + 1, dtype=np.int64)
    for a in range(math.isqrt(n_max) + 1):
        b_max = math.isqrt(n_max - a * a)
        b = np.arange(b_max + 1)
        w = np.full(b_max + 1, 2 if a else 1, dtype=np.int64)
        w[1:] *= 2
        np.add.at(h2, a * a + b * b, w)
    out = h2
    for _ in range(l - 1):
        out = np.convolve(out, h2)[: n_max + 1]
    return out


# ---------------------------------------------------------------------------
# Certified floors of pi-dependent cuts
# ---------------------------------------------------------------------------


def _certified_floor(interval_fn, bits: int = 128) -> int:
    """Floor of a real given by a shrinking-interval oracle interval_fn(bits)."""
    while bits <= _MAX_BITS:
        lo, hi = interval_fn(bits)
        flo = mp.floor(lo)
        if flo == mp.floor(hi):
            return int(flo)
        bits *= 2
    raise PrecisionError("floor undecidable at maximum precision")


def _floor_div_2pi(x: Fraction, bits: int = 128) -> int:
    """Exact floor of x / (2 pi) for rational x >= 0."""
    num, den = x.numerator, x.denominator

    def oracle(b):
        with mp.workprec(b):
            pi_lo = mp.mpf(mp.libmp.mpf_pi(b, "d"))
            pi_hi = mp.mpf(mp.libmp.mpf_pi(b, "u"))
            with mp.workprec(b + 8):
                return (mp.mpf(num) / (2 * pi_hi * den),
                        mp.mpf(num) / (2 * pi_lo * den) * (1 + mp.mpf(2) ** (4 - b)))

    return _certified_floor(oracle, bits)


# ---------------------------------------------------------------------------
# Counting
# ---------------------------------------------------------------------------


class SpectrumCounter:
    """Counting-function evaluator with a cached torus shell table."""

    def __init__(self, config: ManifoldConfig):
        self.config = config
        self._torus_cum: Optional[np.ndarray] = None

    def _torus_cumulative(self, n: int) -> int:
        """Number of lattice points in Z^{2l} of squared norm <= n."""
        if n < 0:
            return 0
        cum = self._torus_cum
        if cum is None or n >= len(cum):
            size = max(2 * n + 16, 1024)
            self._torus_cum = np.cumsum(r2l_shell_histogram(self.config.l, size))
            cum = self._torus_cum
        return int(cum[n])

    def count_x(self, x: Union[Fraction, float, int]) -> int:
        """N(2 pi x): eigenvalues <= 2 pi x, exactly."""
        x = Fraction(x)
        if x < 0:
            return 0
        theta = self.config.theta
        l = self.config.l
        total = self._torus_cumulative(_floor_div_2pi(x))
        m = 1
        while True:
            # center eigenvalue cut: theta m^2 + m k <= x
            k_cut = theta.linear(Fraction(x, m), -m)
            if k_cut.compare(l) < 0:
                break
            total += 2 * m ** l * _cumulative_compositions(k_cut.floor(), l)
            m += 1
        return total

    def count_t(self, t: Union[Fraction, float, int]) -> int:
        """N(t): eigenvalues <= t, exactly (t rational)."""
        return _count_t_units(self, Fraction(t))

    def point(self, x: Union[Fraction, float]) -> CountingPoint:
        n = self.count_x(Fraction(x))
        main = self.config.weyl_main(float(x))
        return CountingPoint(float(x), n, main, n - main)


def count_N(theta: IrrationalParameter, l: int, t: Union[float, Fraction, None] = None,
            *, x: Union[float, Fraction, None] = None) -> int:
    """Exact count of Laplace eigenvalues <= t (or <= 2 pi x if x is given)."""
    if (t is None) == (x is None):
        raise ValueError("give exactly one of t, x")
    counter = SpectrumCounter(ManifoldConfig(l, theta))
    if x is not None:
        return counter.count_x(Fraction(x))
    return _count_t_units(counter, Fraction(t))


def _count_t_units(counter: SpectrumCounter, t: Fraction) -> int:
    if t < 0:
        return 0
    config = counter.config
    theta = config.theta
    l = config.l
    # torus: 4 pi^2 n <= t
    def torus_oracle(b):
        with mp.workprec(b):
            pi_lo = mp.mpf(mp.libmp.mpf_pi(b, "d"))
            pi_hi = mp.mpf(mp.libmp.mpf_pi(b, "u"))
            tv = mp.mpf(t.numerator) / t.denominator
            return tv / (4 * pi_hi * pi_hi) * (1 - mp.mpf(2) ** (4 - b)), \
                tv / (4 * pi_lo * pi_lo) * (1 + mp.mpf(2) ** (4 - b))

    total = counter._torus_cumulative(_certified_floor(torus_oracle) if t > 0 else -1)
    # center: 2 pi (theta m^2 + m k) <= t, i.e. k <= t/(2 pi m) - theta m
    m = 1
    while True:
        def center_oracle(b, m=m):
            lo_t, hi_t = eval_theta_cached(theta, b)
            with mp.workprec(b):
                pi_lo = mp.mpf(mp.libmp.mpf_pi(b, "d"))
                pi_hi = mp.mpf(mp.libmp.mpf_pi(b, "u"))
                tv = mp.mpf(t.numerator) / t.denominator
                pad = mp.mpf(2) ** (4 - b)
                return tv / (2 * pi_hi * m) * (1 - pad) - hi_t * m, \
                    tv / (2 * pi_lo * m) * (1 + pad) - lo_t * m

        lo, hi = center_oracle(128)
        if hi < l:
            break
        k_max = _certified_floor(center_oracle)
        if k_max >= l:
            total += 2 * m ** config.l * _cumulative_compositions(k_max, l)
        m += 1
    return total


_THETA_CACHE: dict[tuple[IrrationalParameter, int], tuple[mp.mpf, mp.mpf]] = {}


def eval_theta_cached(theta: IrrationalParameter, bits: int):
    key = (theta, bits)
    got = _THETA_CACHE.get(key)
    if got is None:
        got = eval_theta(theta, bits)
        _THETA_CACHE[key] = got
    return got


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def enumerate_spectrum(config: ManifoldConfig, t_max: float) -> list[SpectralLine]:
    """All distinct eigenvalues <= t_max, ascending, with multiplicities.

    Distinctness is structural: center lines with different (m, k) differ by
    irrationality of theta, torus lines by their shell index, and torus never
    meets center (the ratio would make pi algebraic).  Order is decided by
    high-precision enclosures with escalation.
    """
    t_max = Fraction(t_max)
    theta = config.theta
    l = config.l
    lines: list[tuple[mp.mpf, SpectralLine]] = []
    with mp.workprec(DEFAULT_BITS):
        two_pi = 2 * mp.pi
        # torus family
        def torus_oracle(b):
            with mp.workprec(b):
                pi_lo = mp.mpf(mp.libmp.mpf_pi(b, "d"))
                pi_hi = mp.mpf(mp.libmp.mpf_pi(b, "u"))
                tv = mp.mpf(t_max.numerator) / t_max.denominator
                pad = mp.mpf(2) ** (4 - b)
                return tv / (4 * pi_hi * pi_hi) * (1 - pad), \
                    tv / (4 * pi_lo * pi_lo) * (1 + pad)

        n_cut = _certified_floor(torus_oracle) if t_max > 0 else -1
        if n_cut >= 0:
            hist = r2l_shell_histogram(l, n_cut)
            for n in range(n_cut + 1):
                mult = int(hist[n])
                if mult:
                    ev = 4 * mp.pi ** 2 * n
                    lines.append((ev, SpectralLine(float(ev), mult, "torus", shell=n)))
        # center family: 2 pi (theta m^2 + m k) <= t_max
        m = 1
        while True:
            def center_oracle(b, m=m):
                lo_t, hi_t = eval_theta_cached(theta, b)
                with mp.workprec(b):
                    pi_lo = mp.mpf(mp.libmp.mpf_pi(b, "d"))
                    pi_hi = mp.mpf(mp.libmp.mpf_pi(b, "u"))
                    tv = mp.mpf(t_max.numerator) / t_max.denominator
                    pad = mp.mpf(2) ** (4 - b)
                    return tv / (2 * pi_hi * m) * (1 - pad) - hi_t * m, \
                        tv / (2 * pi_lo * m) * (1 + pad) - lo_t * m

            lo, hi = center_oracle(128)
            if hi < l:
                break
            k_max = _certified_floor(center_oracle)
            for k in range(l, k_max + 1, 2):
                mult = 2 * m ** l * composition_count(k, l)
                if mult:
                    ev = two_pi * (theta.exact().to_mpf(DEFAULT_BITS) * m * m + m * k)
                    lines.append((ev, SpectralLine(float(ev), mult, "center", m=m, k=k)))
            m += 1
    lines.sort(key=lambda pair: (pair[0], pair[1].source, pair[1].m, pair[1].k, pair[1].shell))
    _check_separation(lines)
    return [line for _, line in lines]


def _check_separation(lines) -> None:
    """Adjacent distinct lines must be separated beyond enclosure error."""
    sep = mp.mpf(2) ** (32 - DEFAULT_BITS)
    for (a, la), (b, lb) in zip(lines, lines[1:]):
        if b - a < sep * max(1, abs(a)):
            raise PrecisionError(
                f"eigenvalue separation below certification: {la} vs {lb}")


# ---------------------------------------------------------------------------
# Jump table (vectorized; positions in x-units)
# ---------------------------------------------------------------------------


def jump_table(config: ManifoldConfig, x_max: float) -> tuple[np.ndarray, np.ndarray]:
    """(positions, counts): N(2 pi x) as a step function on (0, x_max].

    positions is the ascending float64 array of jump locations; counts[i] is
    the eigenvalue count on [positions[i], positions[i+1]).  The zero
    eigenvalue contributes the base count 1 before the first jump.  Positions
    carry float rounding only; counts are exact integers.
    """
    x_max_f = Fraction(x_max)
    theta = config.theta
    l = config.l
    theta_f = float(config.theta.exact())
    pos_parts = [np.empty(0)]
    mult_parts = [np.empty(0, dtype=np.int64)]
    # torus jumps at x = 2 pi n for shells with r_{2l}(n) > 0, n >= 1
    n_cut = _floor_div_2pi(x_max_f)
    if n_cut >= 1:
        hist = r2l_shell_histogram(l, n_cut)
        shells = np.nonzero(hist[1:])[0] + 1
        pos_parts.append(2.0 * math.pi * shells.astype(np.float64))
        mult_parts.append(hist[shells])
    # center jumps at x = theta m^2 + m k
    m = 1
    while True:
        k_cut = theta.linear(Fraction(x_max_f, m), -m)
        if k_cut.compare(l) < 0:
            break
        k_hi = k_cut.floor()
        if k_hi >= l:
            ks = np.arange(l, k_hi + 1, 2, dtype=np.int64)
            pos_parts.append(theta_f * m * m + float(m) * ks.astype(np.float64))
            comps = np.array([composition_count(int(k), l) for k in ks], dtype=np.int64)
            mult_parts.append(2 * m ** l * comps)
        m += 1
    pos = np.concatenate(pos_parts)
    mult = np.concatenate(mult_parts)
    order = np.argsort(pos, kind="stable")
    pos = pos[order]
    counts = np.cumsum(mult[order]) + 1  # +1 for the zero eigenvalue
    return pos, counts
