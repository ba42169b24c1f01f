"""Dyadic exponential-sum blocks, their stationary-phase transform, and the
oscillating series that reconstructs the counting remainder.

The object of study is the block sum

    S(x; h, j1, j) = sum_{M 2^{-j-1} < m <= M 2^{-j}} x^{l-1-j1} m^{2j1+1}
                     e(-h (x/2m - theta m/2)),        M = sqrt(x/theta),

whose stationary-phase dual runs over integers r in the exact window
(beta(h,j), beta(h,j+1)] with beta(h,j) = theta h (2^{2j-1} + 1/2).  The
transform carries three error envelopes whose absolute constants are
calibrated once (tools/calibrate.py) and frozen in registry.json.

Usage:
    >>> from heisenweyl.kernel import IrrationalParameter
    >>> from heisenweyl.spectrum import ManifoldConfig
    >>> from heisenweyl.expsum import direct_block_sum, transformed_block_sum
    >>> cfg = ManifoldConfig(l=1, theta=IrrationalParameter.sqrt2())
    >>> rep = transformed_block_sum(cfg, 10_000, h=1, j1=0, j=0)
    >>> abs(rep.direct - rep.transformed) <= rep.envelope
    True

The series evaluator `voronoi_series` sums selected (h, r) terms of

    (2^{2-l} x^{l-1/4} / ((l-1)! pi)) sum_h sum_r u(h, r)
        cos(2 pi sqrt(x h (2r - theta h)) - pi/4),

    u(h, r) = (-1)^{lh} h^{-1/4} (2r - theta h)^{-5/4}
              (1 - theta h / (2r - theta h))^{l-1},

and reports the kept term count together with a certified bound on the
mean-square mass of dropped terms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Optional, Union

import mpmath as mp
import numpy as np

from .kernel import (
    ConfigurationError,
    ExactReal,
    IrrationalParameter,
    dist_to_int_exact,
    zeta_tail,
)
from .spectrum import ManifoldConfig, eval_theta_cached

Real = Union[int, float, Fraction]

_TWO_PI = 2.0 * math.pi
# working precision for phase reduction; magnitudes stay far below 2^60,
# leaving > 100 certified fractional bits
_PHASE_BITS = 192


# ---------------------------------------------------------------------------
# dyadic blocks


@dataclass(frozen=True)
class DyadicBlock:
    """Integer m-range (sqrt(x/theta) 2^{-j-1}, sqrt(x/theta) 2^{-j}]."""

    j: int
    m_first: int
    m_last: int
    cap: int  # largest admissible j for the controlling parameter T

    @property
    def is_empty(self) -> bool:
        return self.m_first > self.m_last

    @property
    def width(self) -> int:
        return max(0, self.m_last - self.m_first + 1)


def dyadic_cap(T: Real) -> int:
    """Largest dyadic index J = floor((L - log L) / (2 log 2)), L = log T."""
    T = float(T)
    if not T > math.e:
        raise ConfigurationError("dyadic cap needs T > e")
    L = math.log(T)
    return int(math.floor((L - math.log(L)) / (2.0 * math.log(2.0))))


def _floor_sqrt_ratio(config: ManifoldConfig, x: Fraction, shift: int) -> int:
    """Exact floor(sqrt(x/theta) / 2^shift); theta > 0, x >= 0."""
    theta = config.theta
    lo, hi = eval_theta_cached(theta, 64)
    est = int(math.sqrt(max(0.0, float(x) / float(lo))) / float(1 << shift))
    # n qualifies iff theta (n 2^shift)^2 <= x
    def ok(n: int) -> bool:
        return theta.linear(-x, (n << shift) ** 2).sign() <= 0

    n = max(est, 0)
    while ok(n + 1):
        n += 1
    while n > 0 and not ok(n):
        n -= 1
    return n


def dyadic_block(config: ManifoldConfig, x: Real, j: int,
                 T: Optional[Real] = None) -> DyadicBlock:
    """The j-th dyadic block of the m-range m <= sqrt(x/theta)."""
    x_frac = Fraction(x)
    if x_frac <= 0:
        raise ConfigurationError("x must be positive")
    if j < 0:
        raise ConfigurationError("j must be >= 0")
    cap = dyadic_cap(x if T is None else T)
    if j > cap:
        raise ConfigurationError(f"j={j} exceeds dyadic cap J={cap}")
    m_last = _floor_sqrt_ratio(config, x_frac, j)
    m_first = _floor_sqrt_ratio(config, x_frac, j + 1) + 1
    return DyadicBlock(j=j, m_first=m_first, m_last=m_last, cap=cap)


# ---------------------------------------------------------------------------
# direct block sum


def _validate_indices(config: ManifoldConfig, h: int, j1: int) -> None:
    if h == 0:
        raise ConfigurationError("h must be a nonzero integer")
    if not 0 <= j1 <= config.l - 1:
        raise ConfigurationError("need 0 <= j1 <= l-1")


def _phase_unit(value: ExactReal) -> tuple[mp.mpf, mp.mpf]:
    """(cos, sin) of 2 pi value, reducing the argument exactly mod 1."""
    v = value.to_mpf(_PHASE_BITS)
    frac = v - mp.floor(v)
    ang = 2 * mp.pi * frac
    return mp.cos(ang), mp.sin(ang)


def direct_block_sum(config: ManifoldConfig, x: Real, h: int, j1: int,
                     j: int) -> complex:
    """Literal block sum with exact phase reduction.

    The phase -h(x/2m - theta m/2) is reduced mod 1 in exact arithmetic
    before any trigonometry; terms are accumulated at 192-bit precision, so
    the result is the correctly rounded sum up to ~1e-40 relative slack.
    Negating h conjugates the value.  An empty m-range sums to 0.
    """
    _validate_indices(config, h, j1)
    block = dyadic_block(config, x, j)
    if block.is_empty:
        return complex(0.0)
    x_frac = Fraction(x)
    theta = config.theta
    power = config.l - 1 - j1
    with mp.workprec(_PHASE_BITS):
        re_acc = mp.mpf(0)
        im_acc = mp.mpf(0)
        for m in range(block.m_first, block.m_last + 1):
            # -h(x/2m - theta m/2) = -hx/(2m) + (hm/2) theta
            arg = theta.linear(Fraction(-h, 2 * m) * x_frac, Fraction(h * m, 2))
            c, s = _phase_unit(arg)
            amp = mp.mpf(float(x)) ** power * mp.mpf(m) ** (2 * j1 + 1)
            re_acc += amp * c
            im_acc += amp * s
        return complex(float(re_acc), float(im_acc))


# ---------------------------------------------------------------------------
# envelope registry


@lru_cache(maxsize=1)
def load_registry() -> dict:
    """Frozen numeric constants (envelope calibrations, bound multipliers)."""
    path = resources.files("heisenweyl").joinpath("registry.json")
    with path.open("r", encoding="utf-8") as fh:
        return json.load(fh)


def envelope_constants() -> tuple[float, float, float]:
    reg = load_registry()["transform_envelope"]
    return reg["c_log"], reg["c_length"], reg["c_endpoint"]


# ---------------------------------------------------------------------------
# stationary-phase transform


@dataclass(frozen=True)
class TransformReport:
    """Direct and transformed block sums with a certified-style envelope.

    The three envelope components correspond to the transform's error
    sources: a logarithmic boundary term, a block-length term, and an
    endpoint term governed by the distance of the window endpoints to the
    nearest integer.  The components are reported raw (constant 1) so they
    can be calibrated; ``envelope`` combines them with the frozen registry
    constants.
    """

    direct: complex
    transformed: complex
    envelope: float
    envelope_log: float
    envelope_length: float
    envelope_endpoint: float
    r_first: int
    r_last: int
    block: DyadicBlock
    boundary_flagged: bool
    half_weight_r: Optional[int]

    @property
    def r_count(self) -> int:
        return max(0, self.r_last - self.r_first + 1)


def _beta(theta: IrrationalParameter, h: int, j: int) -> ExactReal:
    """Window endpoint beta(h, j) = theta h (2^{2j-1} + 1/2), exact."""
    return theta.linear(0, Fraction(h * ((1 << (2 * j)) + 1), 2))


def _endpoint_gap(beta: ExactReal, span: float) -> float:
    """<t> of the transform: ||t|| for non-integers, window span otherwise."""
    if beta.is_integer():
        return span
    gap, _ = dist_to_int_exact(beta)
    return gap


def raw_envelope_components(config: ManifoldConfig, x: Real, h: int, j1: int,
                            j: int) -> tuple[float, float, float]:
    """The three error-term shapes of the transform, with constant 1.

    For the phase f(m) = -hx/(2m) + h theta m/2 on the block (b/2, b],
    b = sqrt(x/theta) 2^{-j}: |f''| ~ 1/R with R = b^3/(|h| x), the amplitude
    scale is G = x^{l-1-j1} b^{2j1+1}, and the smoothness lengths are
    U = b/2, U1 = b.
    """
    theta = config.theta
    lo, _ = eval_theta_cached(theta, 64)
    xf = float(x)
    b = math.sqrt(xf / float(lo)) / float(1 << j)
    G = xf ** (config.l - 1 - j1) * b ** (2 * j1 + 1)
    R = b ** 3 / (abs(h) * xf)
    beta_lo = _beta(theta, abs(h), j)
    beta_hi = _beta(theta, abs(h), j + 1)
    span = (beta_hi - beta_lo).to_float()
    e_log = G * math.log(span + 2.0)
    e_length = G * (b / 2.0 + R) * (3.0 / b)
    gap = max(_endpoint_gap(beta_lo, span), 1e-300)
    gap_hi = max(_endpoint_gap(beta_hi, span), 1e-300)
    e_endpoint = G * min(math.sqrt(R), max(1.0 / gap, 1.0 / gap_hi))
    return e_log, e_length, e_endpoint


def transformed_block_sum(config: ManifoldConfig, x: Real, h: int, j1: int,
                          j: int) -> TransformReport:
    """Stationary-phase dual of `direct_block_sum` over the exact r-window.

    Evaluates e^{-i pi/4} sum_{beta(h,j) < r <= beta(h,j+1)}
    x^{l-1/4} h^{j1+3/4} (2r - theta h)^{-j1-5/4} e(-sqrt(x h (2r - theta h)))
    with exact window endpoints; an integer upper endpoint receives weight
    1/2.  The envelope uses the frozen constants of registry.json.
    """
    _validate_indices(config, h, j1)
    if h < 0:
        raise ConfigurationError("transform is stated for h >= 1")
    block = dyadic_block(config, x, j)
    if block.is_empty:
        raise ConfigurationError("m-range is empty; transform undefined")
    x_frac = Fraction(x)
    theta = config.theta
    l = config.l
    beta_lo = _beta(theta, h, j)
    beta_hi = _beta(theta, h, j + 1)
    r_first = beta_lo.floor() + 1
    r_last = beta_hi.floor()
    half_weight_r = r_last if beta_hi.is_integer() else None
    xf = float(x)
    with mp.workprec(_PHASE_BITS):
        re_acc = mp.mpf(0)
        im_acc = mp.mpf(0)
        for r in range(r_first, r_last + 1):
            two_r_theta_h = theta.linear(2 * r, -h)
            amp = (mp.mpf(xf) ** (l - Fraction(1, 4))
                   * mp.mpf(h) ** (j1 + Fraction(3, 4))
                   * two_r_theta_h.to_mpf(_PHASE_BITS) ** (-j1 - Fraction(5, 4)))
            if r == half_weight_r:
                amp /= 2
            # phase -sqrt(x h (2r - theta h)), reduced mod 1 at full precision
            radicand = theta.linear(2 * r * h * x_frac, -h * h * x_frac)
            root = mp.sqrt(radicand.to_mpf(_PHASE_BITS))
            frac = root - mp.floor(root)
            ang = 2 * mp.pi * frac
            re_acc += amp * mp.cos(ang)
            im_acc -= amp * mp.sin(ang)
        # e^{-i pi/4} = (1 - i)/sqrt(2)
        inv_sqrt2 = 1 / mp.sqrt(2)
        re_out = inv_sqrt2 * (re_acc + im_acc)
        im_out = inv_sqrt2 * (im_acc - re_acc)
        transformed = complex(float(re_out), float(im_out))
    direct = direct_block_sum(config, x, h, j1, j)
    e1, e2, e3 = raw_envelope_components(config, x, h, j1, j)
    c1, c2, c3 = envelope_constants()
    return TransformReport(
        direct=direct,
        transformed=transformed,
        envelope=c1 * e1 + c2 * e2 + c3 * e3,
        envelope_log=e1,
        envelope_length=e2,
        envelope_endpoint=e3,
        r_first=r_first,
        r_last=r_last,
        block=block,
        boundary_flagged=False,
        half_weight_r=half_weight_r,
    )


def stationary_identity_gap(theta_value: float, x: float, h: int,
                            r: int) -> float:
    """Relative gap |(f(m_r) - r m_r) + sqrt(x h (2r - theta h))| / sqrt(...).

    f(m) = -hx/(2m) + h theta m/2 and m_r = sqrt(hx / (2r - theta h)) is the
    stationary point of f(m) - r m.  Evaluated at 200 bits; the identity
    should hold to roundoff for every admissible (x, h, r).
    """
    with mp.workprec(200):
        th = mp.mpf(theta_value)
        xx = mp.mpf(x)
        dd = 2 * r - th * h
        if dd <= 0:
            raise ConfigurationError("need 2r - theta h > 0")
        m_r = mp.sqrt(h * xx / dd)
        f = -h * xx / (2 * m_r) + h * th * m_r / 2
        lhs = f - r * m_r
        rhs = -mp.sqrt(xx * h * dd)
        return float(abs(lhs - rhs) / abs(rhs))


def assemble_f_component(config: ManifoldConfig, x: Real, j1: int, H: int,
                         T: Optional[Real] = None) -> complex:
    """Assemble (1/(pi i)) sum_{1<=|h|<=H} ((-1)^{l h}/h) sum_j S(x;h,j1,j).

    Both h-signs are summed literally (no conjugation shortcut), so the
    imaginary part of the result measures genuine numerical asymmetry; the
    exact value is real.
    """
    if H < 1:
        raise ConfigurationError("H must be >= 1")
    cap = dyadic_cap(x if T is None else T)
    total = complex(0.0)
    for h in range(1, H + 1):
        sign = -1.0 if (config.l * h) % 2 else 1.0
        for signed_h in (h, -h):
            inner = complex(0.0)
            for j in range(cap + 1):
                inner += direct_block_sum(config, x, signed_h, j1, j)
            total += (sign / signed_h) * inner
    # divide by pi*i
    return total / complex(0.0, math.pi)


# ---------------------------------------------------------------------------
# oscillating series reconstruction


@dataclass(frozen=True)
class VoronoiCoefficient:
    """One (h, r) coefficient u(h, r) of the oscillating series."""

    h: int
    r: int
    value: complex

    @property
    def magnitude_bound(self) -> float:
        return abs(self.value)


def _two_r_minus_theta_h(config: ManifoldConfig, h: int, r: int) -> ExactReal:
    return config.theta.linear(2 * r, -h)


def voronoi_coefficient(config: ManifoldConfig, h: int, r: int) -> VoronoiCoefficient:
    """u(h, r) = (-1)^{lh} h^{-1/4} (2r-theta h)^{-5/4} (1-theta h/(2r-theta h))^{l-1}."""
    if h < 1 or r < 1:
        raise ConfigurationError("h and r must be positive integers")
    if config.theta.linear(-r, h).sign() >= 0:  # theta h - r >= 0
        raise ConfigurationError("need r > theta h")
    gap = _two_r_minus_theta_h(config, h, r)
    d = gap.to_float()
    lo, _ = eval_theta_cached(config.theta, 64)
    ratio = 1.0 - float(lo) * h / d
    sign = -1.0 if (config.l * h) % 2 else 1.0
    mag = h ** -0.25 * d ** -1.25 * ratio ** (config.l - 1)
    return VoronoiCoefficient(h=h, r=r, value=complex(sign * mag))


@dataclass(frozen=True)
class VoronoiTermSet:
    """Precomputed series terms: signed coefficients and phase radicals.

    ``sqrt_radicand[k]`` holds sqrt(h (2r - theta h)) for term k in canonical
    (h, r) order; evaluation at x only needs cos(2 pi sqrt(x) sqrt_radicand -
    pi/4).  ``dropped_mass_bound`` bounds sum u^2 over all admissible terms
    outside the kept set, so the rms of the omitted series part on [T, 2T] is
    about prefactor * x^{l-1/4} * sqrt(dropped_mass_bound / 2).
    """

    l: int
    prefactor: float
    coeff: np.ndarray
    sqrt_radicand: np.ndarray
    kept: int
    dropped_mass_bound: float
    H: float
    cap: int

    def evaluate(self, x: Real) -> float:
        xf = float(x)
        phase = _TWO_PI * math.sqrt(xf) * self.sqrt_radicand - 0.25 * math.pi
        return float(self.prefactor * xf ** (self.l - 0.25)
                     * np.dot(self.coeff, np.cos(phase)))

    def evaluate_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        phase = (_TWO_PI * np.sqrt(xs)[:, None] * self.sqrt_radicand[None, :]
                 - 0.25 * math.pi)
        return (self.prefactor * xs ** (self.l - 0.25)
                * (np.cos(phase) @ self.coeff))


def voronoi_terms(config: ManifoldConfig, T: Real, H: Optional[Real] = None,
                  *, window: float = 830.0, h_cap: int = 2000) -> VoronoiTermSet:
    """Select series terms by mean-square mass and report the dropped bound.

    Keeps (h, r) with h <= min(H, h_cap) and 2r - theta h <= window h^{-1/5};
    the window shape equalizes the marginal mass of the per-h tails.  All
    dropped admissible terms (larger r, larger h up to H) are covered by the
    certified ``dropped_mass_bound`` via the integral bounds
    sum_{r > R} (2r - theta h)^{-5/2} <= (1/3)(2R - theta h)^{-3/2} and
    2(floor(theta h) + 1) - theta h >= theta h.
    """
    T = float(T)
    if H is None:
        H = T * T  # default series length
    H = float(H)
    if H < 2:
        raise ConfigurationError("H must be >= 2")
    cap = dyadic_cap(T)
    theta = config.theta
    lo, _ = eval_theta_cached(theta, 64)
    theta_f = float(lo)
    l = config.l
    h_max = int(min(H, float(h_cap)))
    # spec'd r-limit multiplier: r <= theta h (2^{2J+1} + 1/2)
    r_cap_mult = (1 << (2 * cap + 1)) + 0.5
    coeffs: list[float] = []
    roots: list[float] = []
    dropped: list[float] = []
    for h in range(1, h_max + 1):
        r_first = theta.linear(0, h).floor() + 1
        gap0 = 2.0 * r_first - theta_f * h
        cut = window * h ** -0.2
        r_win = int((cut + theta_f * h) / 2.0)
        r_spec = int(theta_f * h * r_cap_mult)  # float bound is ample here
        r_last = min(r_win, r_spec)
        sign = -1.0 if (l * h) % 2 else 1.0
        h_quarter = h ** -0.25
        if r_last < r_first:
            # whole h-row dropped: mass <= h^{-1/2}(g0^{-5/2} + (1/3) g0^{-3/2})
            dropped.append(h ** -0.5 * (gap0 ** -2.5 + gap0 ** -1.5 / 3.0))
            continue
        for r in range(r_first, r_last + 1):
            d = 2.0 * r - theta_f * h
            ratio = 1.0 - theta_f * h / d
            coeffs.append(sign * h_quarter * d ** -1.25 * ratio ** (l - 1))
            roots.append(math.sqrt(h * d))
        if r_last == r_win and r_win < r_spec:
            edge = 2.0 * (r_last + 1) - theta_f * h
            dropped.append(h ** -0.5 * edge ** -1.5 / 3.0)
    if H > h_max:
        # analytic h-tail: sum_{h>n} h^{-3} < 1/(2n^2), sum_{h>n} h^{-2} < 1/n
        n = h_max
        dropped.append(theta_f ** -2.5 / (2.0 * n * n)
                       + theta_f ** -1.5 / (3.0 * n))
    prefactor = 2.0 ** (2 - l) / (math.factorial(l - 1) * math.pi)
    return VoronoiTermSet(
        l=l,
        prefactor=prefactor,
        coeff=np.asarray(coeffs, dtype=float),
        sqrt_radicand=np.asarray(roots, dtype=float),
        kept=len(coeffs),
        dropped_mass_bound=math.fsum(dropped),
        H=H,
        cap=cap,
    )


def voronoi_series(config: ManifoldConfig, x: Real, T: Real,
                   H: Optional[Real] = None,
                   terms: Optional[VoronoiTermSet] = None) -> float:
    """Evaluate the oscillating remainder series at x in [T, 2T]."""
    xf = float(x)
    Tf = float(T)
    if not Tf * (1.0 - 1e-12) <= xf <= 2.0 * Tf * (1.0 + 1e-12):
        raise ConfigurationError("need T <= x <= 2T")
    if terms is None:
        terms = voronoi_terms(config, Tf, H)
    return terms.evaluate(xf)


def voronoi_term_value(config: ManifoldConfig, x: Real, h: int, r: int) -> float:
    """The single (h, r) term of the series, prefactor included."""
    u = voronoi_coefficient(config, h, r)
    xf = float(x)
    radicand = _two_r_minus_theta_h(config, h, r).to_float() * h * xf
    prefactor = 2.0 ** (2 - config.l) / (math.factorial(config.l - 1) * math.pi)
    return (prefactor * xf ** (config.l - 0.25) * u.value.real
            * math.cos(_TWO_PI * math.sqrt(radicand) - 0.25 * math.pi))


# ---------------------------------------------------------------------------
# diagonal constant


def diagonal_constant_extract(config: ManifoldConfig, H: Real, J: int) -> float:
    """Partial diagonal mass sum_{h<=H} sum_r u^2(h, r) over the exact window.

    The r-window is theta h < r <= theta h (2^{2J+1} + 1/2); the inner sum is
    evaluated in closed form through Hurwitz-zeta windows
    sum_{r=r1}^{r2} (2r - theta h)^{-5/2-i} =
    2^{-5/2-i} [zeta(5/2+i, r1 - theta h/2) - zeta(5/2+i, r2 + 1 - theta h/2)]
    after expanding (1 - theta h/(2r - theta h))^{2l-2} binomially, so J = 20
    windows with ~10^15 lattice terms cost a handful of zeta evaluations.
    """
    H = int(H)
    if H < 2:
        raise ConfigurationError("H must be >= 2")
    if J < 0:
        raise ConfigurationError("J must be >= 0")
    theta = config.theta
    lo, _ = eval_theta_cached(theta, 64)
    theta_f = float(lo)
    l = config.l
    mult = Fraction((1 << (2 * J + 2)) + 1, 2)  # 2^{2J+1} + 1/2
    total: list[float] = []
    for h in range(1, H + 1):
        r1 = theta.linear(0, h).floor() + 1
        r2 = theta.linear(0, h * mult).floor()
        if r2 < r1:
            continue
        a1 = r1 - theta_f * h / 2.0
        a2 = (r2 + 1) - theta_f * h / 2.0
        inner = 0.0
        for i in range(2 * l - 1):
            s = 2.5 + i
            win = zeta_tail(s, a1)[0] - zeta_tail(s, a2)[0]
            inner += (math.comb(2 * l - 2, i) * (-theta_f * h) ** i
                      * 2.0 ** -s * win)
        total.append(h ** -0.5 * inner)
    return math.fsum(total)
