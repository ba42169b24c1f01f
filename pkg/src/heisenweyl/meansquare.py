"""Mean square of the lattice-count remainder over a growing window.

The remainder R(t) = N(t) - A (t / 2 pi)^(l + 1/2) oscillates; its mean square
grows like a clean power of the window length with a computable coefficient.
This module carries both sides of that comparison:

  integrate_R_squared   exact piecewise integral of R(t)^2 over [t_lo, T]
  compute_C             diagonal series constant with a certified tail bound
  theoretical_constant  predicted mean-square coefficient built from C
  fit_mean_square       power-law fit of the integral ladder against the theory
  torus_metric_map      2-torus bundle metric data -> manifold parameters

Usage:
    config = ManifoldConfig(l=1, theta=IrrationalParameter.sqrt2())
    value = integrate_R_squared(config, 1.0e4)
    c_value, c_tail = compute_C(config, 1.0e-8)
    report = fit_mean_square(config, [1.0e3 * 2.0 ** k for k in range(6)])

The integral is exact per step interval: substituting s = sqrt(t) makes the
integrand a polynomial of degree 4l + 3 in s, which 2l + 2 Gauss-Legendre
nodes integrate without truncation error.  The series constant is summed
row-exactly up to a cut and the rest is enclosed by integral brackets of the
Euler-Maclaurin expansion, so the reported tail bound is a true enclosure
half-width, not an estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .kernel import ConfigurationError, IrrationalParameter, zeta_tail
from .spectrum import ManifoldConfig, eval_theta_cached, jump_table

Real = Union[int, float]

_TWO_PI = 2.0 * math.pi


class SpectrumDepthError(RuntimeError):
    """Raised when a supplied spectrum table does not reach the requested T."""


# -- exact window integral ----------------------------------------------------


@dataclass
class SpectrumTable:
    """Step data of N(t): ascending jump locations and the count after each.

    Before positions[0] the count is 1 (the zero eigenvalue).  t_covered is
    the cut the enumeration was run to; integrals beyond it must re-enumerate.
    """

    positions: np.ndarray
    counts: np.ndarray
    t_covered: float


def spectrum_table(config: ManifoldConfig, t_max: Real) -> SpectrumTable:
    """Enumerate every eigenvalue jump with t <= t_max, in t units."""
    t_max = float(t_max)
    if not t_max > 0 or not math.isfinite(t_max):
        raise ConfigurationError("t_max must be positive and finite")
    pos_x, counts = jump_table(config, t_max / _TWO_PI)
    return SpectrumTable(_TWO_PI * pos_x, counts, t_max)


_LEG_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _leg_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _LEG_CACHE:
        _LEG_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _LEG_CACHE[n]


def integrate_R_squared(config: ManifoldConfig, T: Real, *, t_lo: Real = 1.0,
                        table: Optional[SpectrumTable] = None,
                        with_error: bool = False):
    """integral_{t_lo}^{T} R(t)^2 dt, exact per step of the counting function.

    On each interval where N is constant the substitution s = sqrt(t) turns
    the integrand into a polynomial of degree 4l + 3, integrated exactly by
    the 2l + 2 point Gauss-Legendre rule; only float rounding remains.  Pass
    ``table`` (from :func:`spectrum_table`) to reuse one enumeration across a
    ladder of T values; a table that stops short of T raises
    :class:`SpectrumDepthError`.  With ``with_error`` the return is
    ``(value, bound)`` where bound accumulates the rounding budget of the
    cancellation N - main per node plus the jump-placement rounding.
    """
    T = float(T)
    t_lo = float(t_lo)
    if not math.isfinite(T) or not T > t_lo:
        raise ConfigurationError("need T > t_lo")
    if t_lo < 0:
        raise ConfigurationError("t_lo must be >= 0")
    if table is None:
        table = spectrum_table(config, T)
    elif table.t_covered < T:
        raise SpectrumDepthError(
            f"table covers t <= {table.t_covered}, need {T}: enumerate deeper")
    pos = table.positions
    counts = table.counts
    lo = int(np.searchsorted(pos, t_lo, side="right"))
    hi = int(np.searchsorted(pos, T, side="left"))
    edges = np.concatenate(([t_lo], pos[lo:hi], [T]))
    base = 1.0 if lo == 0 else float(counts[lo - 1])
    nvals = np.concatenate(([base], counts[lo:hi].astype(np.float64)))

    l = config.l
    a_t = config.main_coefficient() / _TWO_PI ** (l + 0.5)
    power = 2 * l + 1
    s_edges = np.sqrt(edges)
    mid = 0.5 * (s_edges[1:] + s_edges[:-1])
    half = 0.5 * (s_edges[1:] - s_edges[:-1])
    xi, weight = _leg_nodes(2 * l + 2)
    total = 0.0
    err = 0.0
    eps = 2.0 ** -52
    for k in range(len(xi)):
        s = mid + half * xi[k]
        main = a_t * s ** power
        r = nvals - main
        piece = half * (2.0 * s) * r * r
        total += weight[k] * float(np.sum(piece))
        if with_error:
            # r loses |main| eps (power + 3) absolutely to cancellation
            r_err = eps * (power + 3.0) * (np.abs(nvals) + main)
            err += weight[k] * float(np.sum(half * (2.0 * s)
                                            * (2.0 * np.abs(r) + r_err) * r_err))
    if with_error:
        # jump positions carry ~eps relative placement error
        jump_t = edges[1:-1]
        if jump_t.size:
            r_hi = np.abs(nvals[1:] - a_t * jump_t ** (l + 0.5))
            r_lo = np.abs(nvals[:-1] - a_t * jump_t ** (l + 0.5))
            err += float(np.sum((r_hi + r_lo) * (4.0 * eps * jump_t)))
        err += abs(total) * eps * (4.0 + math.log2(len(edges) + 2))
        return float(total), float(err)
    return float(total)


# -- diagonal series constant --------------------------------------------------


def _row_inner(config: ManifoldConfig, theta_f: float, h: int) -> tuple[float, float]:
    """(value, error) of sum_r (2r - theta h)^(-5/2) (1 - theta h/(2r - theta h))^(2l-2).

    The sum runs over integers r > theta h; with a_h = floor(theta h) + 1
    - theta h / 2 the binomial expansion reduces it to 2l - 1 Hurwitz zeta
    values at ladder arguments a_h, carrying certified evaluation errors.
    """
    l = config.l
    a_h = float(config.theta.linear(0, h).floor() + 1) - theta_f * h / 2.0
    value = 0.0
    err = 0.0
    for i in range(2 * l - 1):
        s = 2.5 + i
        z, z_err = zeta_tail(s, a_h)
        coef = math.comb(2 * l - 2, i) * (-theta_f * h) ** i * 2.0 ** -s
        value += coef * z
        err += abs(coef) * z_err
    return value, err + 1e-14 * abs(value)


def _i_tail(p: float, v: float, alpha: float, c: float) -> tuple[float, float]:
    """(value, error) of integral_v^inf (alpha u^2 + c)^(-p) du, p >= 3/2.

    Substituting u = v/t gives v (alpha v^2)^(-p) integral_0^1 t^(2p-2)
    (1 + mu t^2)^(-p) dt with mu = c/(alpha v^2); the binomial series in mu
    converges geometrically since mu is tiny at every call site.
    """
    mu = c / (alpha * v * v)
    if mu >= 0.25:
        raise ConfigurationError("tail integral needs alpha v^2 >> c")
    scale = v ** (1.0 - 2.0 * p) * alpha ** -p
    term = 1.0
    total = 0.0
    m = 0
    while True:
        piece = term / (2.0 * p + 2.0 * m - 1.0)
        total += piece
        term *= -(p + m) * mu / (m + 1.0)
        m += 1
        nxt = abs(term) / (2.0 * p + 2.0 * m - 1.0)
        if nxt < 1e-18 * abs(total) or m > 80:
            break
    if mu * (p + m + 1.0) >= 0.5:  # geometric remainder needs ratio < 1/2
        raise ConfigurationError("tail integral series failed to contract")
    return scale * total, scale * (2.0 * nxt + 1e-16 * abs(total) * (m + 4))


def _tail_power_integral(i: int, q: float, n: float, alpha: float,
                         c: float) -> tuple[float, float]:
    """(value, error) of integral_n^inf h^(i - 1/2) (alpha h + c)^(-q) dh."""
    v = math.sqrt(n)
    total = 0.0
    err = 0.0
    mag = 0.0
    for j in range(i + 1):
        val, val_err = _i_tail(q - j, v, alpha, c)
        coef = 2.0 * alpha ** -i * math.comb(i, j) * (-c) ** (i - j)
        total += coef * val
        err += abs(coef) * val_err
        mag += abs(coef * val)
    return total, err + 1e-15 * mag


# Euler-Maclaurin power expansion of zeta(s, a) through the B_6 term; the
# remainder for the completely monotone integrand is below the first omitted
# term, integrated here with the same power machinery.
def _em_terms(s: float) -> tuple[list[tuple[float, float]], tuple[float, float]]:
    terms = [
        (1.0 / (s - 1.0), s - 1.0),
        (0.5, s),
        (s / 12.0, s + 1.0),
        (-s * (s + 1.0) * (s + 2.0) / 720.0, s + 3.0),
        (s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) / 30240.0, s + 5.0),
    ]
    rem = (s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * (s + 5) * (s + 6)
           / 1209600.0, s + 7.0)
    return terms, rem


def _zeta_tail_integral(i: int, s: float, n: float, alpha: float,
                        c: float) -> tuple[float, float]:
    """Enclosure of integral_n^inf h^(i-1/2) zeta(s, alpha h + c) dh as (lo, hi)."""
    terms, (rem_coef, rem_q) = _em_terms(s)
    center = 0.0
    width = 0.0
    for coef, q in terms:
        val, val_err = _tail_power_integral(i, q, n, alpha, c)
        center += coef * val
        width += abs(coef) * val_err
    rem_val, rem_err = _tail_power_integral(i, rem_q, n, alpha, c)
    width += abs(rem_coef) * (abs(rem_val) + rem_err)
    return center - width, center + width


def _zeta_tail_sum(i: int, s: float, n: int, alpha: float,
                   c: float) -> tuple[float, float]:
    """Enclosure of sum_{h > n} h^(i-1/2) zeta(s, alpha h + c) as (lo, hi).

    The summand is decreasing in h once alpha n + c is large (enforced by the
    caller's cut), so the sum is bracketed by the integrals from n + 1 and n.
    """
    lo = _zeta_tail_integral(i, s, float(n + 1), alpha, c)[0]
    hi = _zeta_tail_integral(i, s, float(n), alpha, c)[1]
    return max(lo, 0.0), hi


def _tail_bracket(config: ManifoldConfig, theta_f: float,
                  n: int) -> tuple[float, float]:
    """Enclosure of sum_{h > n} h^(-1/2) row_inner(h) as (lo, hi).

    Row h evaluates zeta at a_h = theta h / 2 + eps_h with eps_h in (0, 1];
    zeta decreases in its second argument, so each binomial term is bracketed
    between its eps = 1 and eps = 0 ends, signed by the term coefficient.
    """
    l = config.l
    alpha = theta_f / 2.0
    lo = 0.0
    hi = 0.0
    for i in range(2 * l - 1):
        s = 2.5 + i
        coef = math.comb(2 * l - 2, i) * alpha ** i * 2.0 ** -2.5
        s_eps1 = _zeta_tail_sum(i, s, n, alpha, 1.0)
        s_eps0 = _zeta_tail_sum(i, s, n, alpha, 0.0)
        if i % 2 == 0:
            lo += coef * s_eps1[0]
            hi += coef * s_eps0[1]
        else:
            lo -= coef * s_eps0[1]
            hi -= coef * s_eps1[0]
    return lo, hi


_SCHEDULES = {"a": (4096, 1.25), "b": (6144, 1.6)}


def compute_C(config: ManifoldConfig, target_eps: float, *,
              schedule: str = "a") -> tuple[float, float]:
    """(value, tail_bound) for the diagonal constant C with certified tail.

    C = sum_{h >= 1} h^(-1/2) sum_{r > theta h} (2r - theta h)^(-5/2)
    (1 - theta h / (2r - theta h))^(2l - 2).  Rows h <= n are summed through
    exact-floor Hurwitz zeta windows; the h > n rest is enclosed by integral
    brackets, and n grows until the enclosure half-width plus accumulated
    evaluation error is below ``target_eps`` relative.  The two schedules
    reach different cuts n, giving independent truncations of the same sum.
    """
    if not 0.0 < target_eps <= 0.1:
        raise ConfigurationError("target_eps must be in (0, 0.1]")
    if schedule not in _SCHEDULES:
        raise ConfigurationError(f"unknown schedule {schedule!r}")
    n, growth = _SCHEDULES[schedule]
    theta_f = float(eval_theta_cached(config.theta, 64)[0])
    n = max(n, int(math.ceil(130.0 / theta_f)))  # keep the tail summand monotone
    rows: list[float] = []
    errs: list[float] = []
    done = 0
    while True:
        for h in range(done + 1, n + 1):
            inner, inner_err = _row_inner(config, theta_f, h)
            w = h ** -0.5
            rows.append(w * inner)
            errs.append(w * inner_err)
        done = n
        exact = math.fsum(rows)
        exact_err = math.fsum(errs)
        tail_lo, tail_hi = _tail_bracket(config, theta_f, n)
        value = exact + 0.5 * (tail_lo + tail_hi)
        bound = 0.5 * (tail_hi - tail_lo) + exact_err
        if bound <= 0.4 * target_eps * value:
            return value, bound
        if n > 5 * 10 ** 7:
            raise ConfigurationError(
                f"row cut {n} exceeded without reaching eps = {target_eps}")
        shortfall = bound / (0.4 * target_eps * max(value, 1e-300))
        n = max(2 * n, int(n * math.sqrt(shortfall) * growth))


def diagonal_tail_bound(config: ManifoldConfig, H: Real,
                        J: Optional[int] = None) -> float:
    """Certified upper bound on the mass the partial diagonal sum misses.

    Bounds sum_{h > H} h^(-1/2) row_inner(h) by theta^(-5/2)/(2 H^2)
    + theta^(-3/2)/(3 H) via integral comparison; with J given it adds the
    r-window residue (1/3) (2 r_end - theta h)^(-3/2) of each finished row.
    """
    H = int(H)
    if H < 1:
        raise ConfigurationError("H must be >= 1")
    theta = config.theta
    theta_f = float(eval_theta_cached(theta, 64)[0])
    bound = theta_f ** -2.5 / (2.0 * H * H) + theta_f ** -1.5 / (3.0 * H)
    if J is not None:
        if J < 0:
            raise ConfigurationError("J must be >= 0")
        mult = Fraction((1 << (2 * J + 2)) + 1, 2)
        residues = []
        for h in range(1, H + 1):
            r_end = theta.linear(0, h * mult).floor()
            gap = 2.0 * float(r_end) - theta_f * h
            if gap <= 0:
                gap = 2.0 * float(theta.linear(0, h).floor() + 1) - theta_f * h
            residues.append(h ** -0.5 * gap ** -1.5 / 3.0)
        bound += math.fsum(residues)
    return bound


def theoretical_constant(config: ManifoldConfig, c_value: Optional[float] = None,
                         *, target_eps: float = 1e-8) -> float:
    """Predicted coefficient of T^(2l + 1/2) in the mean square integral.

    Equals 2^(9/2 - 4l) C / ((4l + 1) ((l-1)!)^2 pi^(2l + 3/2)); C is computed
    at ``target_eps`` when not supplied.
    """
    if c_value is None:
        c_value = compute_C(config, target_eps)[0]
    l = config.l
    return (2.0 ** (4.5 - 4.0 * l) * c_value
            / ((4 * l + 1) * math.factorial(l - 1) ** 2
               * math.pi ** (2 * l + 1.5)))


def error_exponent(gamma: float) -> float:
    """Saving exponent (4 gamma + 1)/(8 gamma + 4) of the mean-square remainder."""
    if not gamma >= 1.0:
        raise ConfigurationError("gamma must be >= 1")
    return (4.0 * gamma + 1.0) / (8.0 * gamma + 4.0)


# -- ladder fit ----------------------------------------------------------------


@dataclass(frozen=True)
class MeanSquareReport:
    """Ladder of window integrals against the predicted power law.

    fitted_constant normalizes the top-of-ladder integral by the theoretical
    exponent, so constant_ratio compares like with like even when the fitted
    exponent drifts; c_tail_bound is the certified enclosure half-width of
    c_value.
    """

    t_ladder: tuple[float, ...]
    integrals: tuple[float, ...]
    fitted_exponent: float
    fitted_constant: float
    theoretical_exponent: float
    theoretical_constant: float
    constant_ratio: float
    c_value: float
    c_tail_bound: float
    gamma: float
    error_exponent: float


def fit_power_law(ts: Sequence[Real], values: Sequence[Real], *,
                  skip_first: bool = True) -> tuple[float, float]:
    """(exponent, constant): least-squares log-log slope and top-point constant.

    The smallest window is excluded by default since it carries the largest
    relative transient; the constant is read off the largest window.
    """
    ts = np.asarray(ts, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if ts.shape != values.shape or ts.ndim != 1:
        raise ConfigurationError("ts and values must be 1D of equal length")
    start = 1 if skip_first else 0
    if ts.size - start < 2:
        raise ConfigurationError("need at least two fitted points")
    if np.any(ts <= 0) or np.any(values <= 0):
        raise ConfigurationError("fit needs positive windows and integrals")
    exponent = float(np.polyfit(np.log(ts[start:]), np.log(values[start:]), 1)[0])
    constant = float(values[-1] / ts[-1] ** exponent)
    return exponent, constant


def fit_mean_square(config: ManifoldConfig, t_ladder: Sequence[Real], *,
                    target_eps: float = 1e-8,
                    table: Optional[SpectrumTable] = None) -> MeanSquareReport:
    """Integrate the ladder, fit the growth law, and compare constants.

    The ladder must hold at least five geometrically spaced increasing windows
    (ratios equal to 1e-6 relative); one spectrum enumeration at the top
    window serves every integral.
    """
    ladder = tuple(float(t) for t in t_ladder)
    if len(ladder) < 5:
        raise ConfigurationError("t ladder must have at least 5 points")
    if any(b <= a for a, b in zip(ladder, ladder[1:])) or ladder[0] <= 1.0:
        raise ConfigurationError("t ladder must increase and start above 1")
    ratios = [b / a for a, b in zip(ladder, ladder[1:])]
    if any(abs(r - ratios[0]) > 1e-6 * ratios[0] for r in ratios):
        raise ConfigurationError("t ladder must be geometric")
    if table is None:
        table = spectrum_table(config, ladder[-1])
    integrals = tuple(integrate_R_squared(config, t, table=table)
                      for t in ladder)
    fitted_exp, _ = fit_power_law(ladder, integrals)
    c_value, c_tail = compute_C(config, target_eps)
    theo_exp = 2 * config.l + 0.5
    theo_const = theoretical_constant(config, c_value)
    fitted_const = integrals[-1] / ladder[-1] ** theo_exp
    gamma = config.theta.gamma
    return MeanSquareReport(
        t_ladder=ladder,
        integrals=integrals,
        fitted_exponent=fitted_exp,
        fitted_constant=fitted_const,
        theoretical_exponent=theo_exp,
        theoretical_constant=theo_const,
        constant_ratio=fitted_const / theo_const,
        c_value=c_value,
        c_tail_bound=c_tail,
        gamma=gamma,
        error_exponent=error_exponent(gamma),
    )


# -- metric dictionary ----------------------------------------------------------


@dataclass(frozen=True)
class TorusMetricConfig:
    """Left-invariant metric data: 2x2 base form h and center length g3.

    theta_exact optionally supplies the derived metric parameter in exact
    form (it must match 2 pi / (g3 d^2) to 1e-9 relative); theta_rational
    declares the derived parameter rational, which routes to the lattice-point
    regime instead of the mean-square law.
    """

    h11: float
    h12: float
    h22: float
    g3: float
    theta_exact: Optional[IrrationalParameter] = None
    theta_rational: bool = False

    def __post_init__(self):
        for name in ("h11", "h12", "h22", "g3"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigurationError(f"{name} must be finite")
        if self.h11 <= 0 or self.determinant <= 0:
            raise ConfigurationError("base form must be positive definite")
        if self.g3 <= 0:
            raise ConfigurationError("g3 must be positive")

    @property
    def determinant(self) -> float:
        return self.h11 * self.h22 - self.h12 * self.h12


@dataclass(frozen=True)
class TorusMetricResult:
    """Derived manifold parameters and the d^(-3)-scaled constant."""

    d_squared: float
    d: float
    theta_value: float
    manifold: ManifoldConfig
    constant_scale: float
    c_value: float
    c_tail_bound: float
    scaled_constant: float


def torus_metric_map(metric: TorusMetricConfig, *,
                     target_eps: float = 1e-8) -> TorusMetricResult:
    """Map metric data to (theta, d) and scale the mean-square constant by d^(-3).

    d^2 = 1/sqrt(det h) normalizes the base torus area and theta
    = 2 pi / (g3 d^2).  A declared-rational theta has no mean-square law (the
    remainder is only O(T^(9/4 + eps))), so the map refuses it.
    """
    d_squared = metric.determinant ** -0.5
    d = math.sqrt(d_squared)
    theta_value = _TWO_PI / (metric.g3 * d_squared)
    if metric.theta_rational:
        raise ConfigurationError(
            f"theta = {theta_value!r} is declared rational: the remainder is "
            "O(T^(9/4+eps)) there and the mean-square map does not apply")
    if metric.theta_exact is not None:
        exact_f = float(eval_theta_cached(metric.theta_exact, 64)[0])
        if abs(exact_f - theta_value) > 1e-9 * abs(theta_value):
            raise ConfigurationError(
                f"theta_exact = {exact_f!r} does not match derived "
                f"theta = {theta_value!r}")
        theta = metric.theta_exact
    else:
        theta = IrrationalParameter(kind="literal", decimal=repr(theta_value),
                                    bits=53)
    manifold = ManifoldConfig(l=1, theta=theta)
    c_value, c_tail = compute_C(manifold, target_eps)
    base = theoretical_constant(manifold, c_value)
    scale = d ** -3
    return TorusMetricResult(
        d_squared=d_squared,
        d=d,
        theta_value=theta_value,
        manifold=manifold,
        constant_scale=scale,
        c_value=c_value,
        c_tail_bound=c_tail,
        scaled_constant=base * scale,
    )
