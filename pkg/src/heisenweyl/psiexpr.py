"""Sawtooth expansions of the counting remainder.

The remainder R(2 pi x) of the counting function collapses, up to an
O(x^(l-1/2)) error, to a finite sawtooth sum

    -(4 / (2^l (l-1)!)) * sum_{1 <= m <= sqrt(x/theta)}
        m (x - theta m^2)^(l-1) psi(x/2m - theta m/2 - l/2)

whose psi arguments are decided in exact arithmetic.  This module evaluates
that sum, profiles the residual against the exact spectrum count, and provides
the two classical finite approximations of psi itself: the plain truncated
Fourier series with its min(1, 1/(H||u||)) envelope, and the Vaaler-type
Fejer-weighted polynomial whose error is majorized by a nonnegative
trigonometric kernel.  The clamped-reciprocal sum G(x, H) and its exact
interval integral close out the error bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .kernel import dist_to_int_exact, psi
from .spectrum import ManifoldConfig, SpectrumCounter

# float-rounding guard added to certified envelopes (covers fsum and the
# evaluation noise of both sides of the majorant inequality)
_ENVELOPE_SLOP = 1e-12


@dataclass(frozen=True)
class PsiExpansionParams:
    """Truncation length and flavor of the finite psi approximation."""

    H: float
    mode: str = "vaaler"  # or "plain-fourier"

    def __post_init__(self):
        if not self.H >= 2:
            raise ValueError("H must be >= 2")
        if self.mode not in ("vaaler", "plain-fourier"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class ExpansionReport:
    """Finite approximation value with a certified error envelope."""

    value: float
    envelope: float
    boundary_count: int = 0

    def __post_init__(self):
        if self.envelope < 0:
            raise ValueError("envelope must be >= 0")


@dataclass
class BoundaryTally:
    """Side channel counting sawtooth arguments that sit on a jump."""

    count: int = 0


# ---------------------------------------------------------------------------
# The finite sawtooth form of R(2 pi x)
# ---------------------------------------------------------------------------


def psi_sum_R(config: ManifoldConfig, x: Union[float, Fraction],
              tally: Optional[BoundaryTally] = None) -> float:
    """Finite sawtooth sum approximating R(2 pi x) up to O(x^(l-1/2)).

    Exact m-range 1 <= m <= sqrt(x/theta); each psi argument
    x/2m - theta m/2 - l/2 is resolved exactly, boundary hits contribute the
    midpoint value and are tallied.
    """
    x = Fraction(x)
    l = config.l
    theta = config.theta
    if x <= 0:
        return 0.0
    coef = -4.0 / (2 ** l * math.factorial(l - 1))
    terms = []
    m = 1
    while True:
        gap = theta.linear(x, -m * m)  # x - theta m^2
        if gap.sign() < 0:
            break
        arg = theta.linear(Fraction(x, 2 * m) - Fraction(l, 2), Fraction(-m, 2))
        val = psi(arg)
        if val.boundary and tally is not None:
            tally.count += 1
        terms.append(m * gap.to_float() ** (l - 1) * val.value)
        m += 1
    return coef * math.fsum(terms)


@dataclass
class ResidualProfile:
    """Exact remainder minus its sawtooth sum over a sample set."""

    points: list[tuple[float, float]]
    slope: Optional[float]
    boundary_count: int


def residual_profile(config: ManifoldConfig, xs: Sequence[float]) -> ResidualProfile:
    """R(2 pi x) - psi_sum_R(x) on sorted positive samples, with fitted slope.

    The slope is the least-squares fit of log|residual| against log x (samples
    with residual exactly zero are left out of the fit); fewer than two usable
    samples leave it None.
    """
    counter = SpectrumCounter(config)
    tally = BoundaryTally()
    points: list[tuple[float, float]] = []
    for x in xs:
        if x <= 0:
            raise ValueError("samples must be positive")
        xf = Fraction(x)
        r_exact = counter.count_x(xf) - config.weyl_main(float(x))
        points.append((float(x), r_exact - psi_sum_R(config, xf, tally)))
    fit = [(math.log(x), math.log(abs(r))) for x, r in points if r != 0.0]
    slope: Optional[float] = None
    if len(fit) >= 2:
        mx = sum(p[0] for p in fit) / len(fit)
        my = sum(p[1] for p in fit) / len(fit)
        sxx = sum((p[0] - mx) ** 2 for p in fit)
        if sxx > 0:
            slope = sum((p[0] - mx) * (p[1] - my) for p in fit) / sxx
    return ResidualProfile(points, slope, tally.count)


# ---------------------------------------------------------------------------
# Truncated Fourier expansion of psi
# ---------------------------------------------------------------------------


def truncated_fourier_grid(us: np.ndarray, H: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (-1/pi) sum_{h<=H} sin(2 pi h u)/h with min(1, 1/(H||u||)) envelopes."""
    if not H >= 2:
        raise ValueError("H must be >= 2")
    us = np.asarray(us, dtype=np.float64)
    K = int(math.floor(H))
    h = np.arange(1, K + 1, dtype=np.float64)
    values = -(np.sin(2.0 * math.pi * np.outer(us, h)) @ (1.0 / h)) / math.pi
    frac = us - np.floor(us)
    dist = np.minimum(frac, 1.0 - frac)
    with np.errstate(divide="ignore"):
        envelopes = np.minimum(1.0, 1.0 / (H * dist))
    return values, envelopes


def truncated_fourier_psi(u: float, H: float) -> ExpansionReport:
    """Plain finite Fourier sawtooth at one point; envelope min(1, 1/(H||u||))."""
    values, envelopes = truncated_fourier_grid(np.array([u]), H)
    return ExpansionReport(float(values[0]), float(envelopes[0]))


# ---------------------------------------------------------------------------
# Vaaler polynomial with nonnegative majorant
# ---------------------------------------------------------------------------


def _vaaler_weights(K: int) -> np.ndarray:
    """V(h/(K+1)) for h = 1..K with V(t) = pi t (1-t) cot(pi t) + t."""
    t = np.arange(1, K + 1, dtype=np.float64) / (K + 1)
    return math.pi * t * (1.0 - t) / np.tan(math.pi * t) + t


def vaaler_grid(us: np.ndarray, H: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized Vaaler sawtooth values and certified Fejer majorant envelopes.

    value(u) = -sum_{h<=K} V(h/(K+1)) sin(2 pi h u)/(pi h), K = floor(H);
    envelope(u) = Fejer_K(u)/(2K+2) + slop, a nonnegative trigonometric
    polynomial of degree K with |psi(u) - value(u)| <= envelope(u) everywhere,
    the slop covering float summation noise on both sides.
    """
    if not H >= 2:
        raise ValueError("H must be >= 2")
    us = np.asarray(us, dtype=np.float64)
    K = int(math.floor(H))
    h = np.arange(1, K + 1, dtype=np.float64)
    phases = 2.0 * math.pi * np.outer(us, h)
    values = -(np.sin(phases) @ (_vaaler_weights(K) / h)) / math.pi
    fejer = np.cos(phases) @ (1.0 - h / (K + 1))
    envelopes = (0.5 + fejer) / (K + 1) + _ENVELOPE_SLOP
    return values, envelopes


def vaaler_psi(u: float, H: float) -> ExpansionReport:
    """Vaaler sawtooth approximation at one point with its majorant envelope."""
    values, envelopes = vaaler_grid(np.array([u]), H)
    return ExpansionReport(float(values[0]), float(envelopes[0]))


def vaaler_coefficient_bounds(H: float) -> dict:
    """Decay constants of the construction: |h a(h)|, H |b(h)|, and their cap C.

    a(h) = +- V(|h|/(K+1)) / (2 pi i h) so |h a(h)| = V/(2 pi) <= 1/(2 pi);
    b(h) = (1 - |h|/(K+1))/(2K+2) so H b(h) <= H/(2 floor(H) + 2) < 1.
    """
    K = int(math.floor(H))
    weights = _vaaler_weights(K)
    max_ha = float(np.max(np.abs(weights))) / (2.0 * math.pi)
    h = np.arange(0, K + 1, dtype=np.float64)
    b = (1.0 - h / (K + 1)) / (2 * K + 2)
    max_Hb = float(H * np.max(b))
    return {"max_h_a": max_ha, "max_H_b": max_Hb, "C": 1.0}


# ---------------------------------------------------------------------------
# The clamped-reciprocal sum G(x, H) and its exact interval integral
# ---------------------------------------------------------------------------


def g_sum(config: ManifoldConfig, x: Union[float, Fraction], H: float) -> float:
    """G(x, H) = sum_{m <= sqrt(x/theta)} min(1, 1/(H ||x/2m - theta m/2 + l/2||))."""
    if not H >= 2:
        raise ValueError("H must be >= 2")
    x = Fraction(x)
    if x <= 0:
        return 0.0
    theta = config.theta
    l = config.l
    terms = []
    m = 1
    while True:
        if theta.linear(x, -m * m).sign() < 0:
            break
        arg = theta.linear(Fraction(x, 2 * m) + Fraction(l, 2), Fraction(-m, 2))
        dist, _ = dist_to_int_exact(arg)
        terms.append(1.0 if dist <= 1.0 / H else 1.0 / (H * dist))
        m += 1
    return math.fsum(terms)


def _w_period(H: float) -> float:
    """Integral of min(1, 1/(H||u||)) over one period."""
    return 2.0 / H + 2.0 * math.log(H / 2.0) / H


def _w_partial(frac: float, H: float) -> float:
    """Integral of min(1, 1/(H||u||)) du over [0, frac], 0 <= frac <= 1."""
    if frac > 0.5:
        return _w_period(H) - _w_partial(1.0 - frac, H)
    if frac <= 1.0 / H:
        return frac
    return 1.0 / H + math.log(H * frac) / H


def g_integral(config: ManifoldConfig, x_lo: Union[float, Fraction],
               x_hi: Union[float, Fraction], H: float) -> float:
    """Exact integral of G(x, H) dx over [x_lo, x_hi] via per-m antiderivatives.

    For fixed m the integrand is periodic in u = x/2m - theta m/2 + l/2 with
    dx = 2m du, so the integral is a whole-period count plus two fractional
    pieces; the m-entry threshold x = theta m^2 is honored exactly.
    """
    if not H >= 2:
        raise ValueError("H must be >= 2")
    x_lo, x_hi = Fraction(x_lo), Fraction(x_hi)
    if not 0 < x_lo <= x_hi:
        raise ValueError("need 0 < x_lo <= x_hi")
    theta = config.theta
    l = config.l
    period = _w_period(H)
    total = []
    m = 1
    while True:
        entry = theta.linear(0, m * m)  # theta m^2
        if entry.compare(x_hi) > 0:
            break
        # integrate over [max(x_lo, theta m^2), x_hi]
        if entry.compare(x_lo) >= 0:
            # at x = theta m^2 the phase collapses: u = l/2 exactly
            u_lo = theta.linear(Fraction(l, 2), 0)
        else:
            u_lo = theta.linear(Fraction(x_lo, 2 * m) + Fraction(l, 2), Fraction(-m, 2))
        u_hi = theta.linear(Fraction(x_hi, 2 * m) + Fraction(l, 2), Fraction(-m, 2))
        flo, klo = u_lo.frac_float()
        fhi, khi = u_hi.frac_float()
        integral_u = (khi - klo) * period + _w_partial(fhi, H) - _w_partial(flo, H)
        total.append(2.0 * m * integral_u)
        m += 1
    return math.fsum(total)
