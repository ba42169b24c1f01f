"""Exact scalar arithmetic for an irrational metric parameter.

The metric parameter theta is carried symbolically (quadratic surd, partial
quotient stream, or exact decimal literal) and every theta-dependent quantity
that feeds a discontinuous function (floor, sawtooth psi, distance to the
nearest integer) is decided in exact integer arithmetic.  Linear expressions
c0 + c1*theta are closed under the operations we need, so they get a dedicated
value type ``ExactReal`` representing (a + b*sqrt(d))/den with integer a, b,
den.  Smooth factors are evaluated in floating point afterwards.

Also provided: continued fractions with exact convergents, an empirical
approximation-type estimator, the q*theta distance lower-bound scan over
integer and half-integer q, and a certified Hurwitz-zeta tail evaluator used
by the series modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import mpmath as mp

DEFAULT_BITS = 192

Real = Union[int, float, Fraction, "ExactReal"]


class ConfigurationError(ValueError):
    """Raised when a parameter description is structurally invalid."""


class PrecisionError(ArithmeticError):
    """Raised when a certified decision cannot be made at any allowed precision."""


class BudgetError(RuntimeError):
    """Raised when a scan exhausts its tuple budget; carries completed work."""

    def __init__(self, message: str, completed: Optional[list] = None):
        super().__init__(message)
        self.completed = completed if completed is not None else []


def _is_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def _square_free_split(d: int) -> tuple[int, int]:
    """Return (f, d0) with d = f^2 * d0 and d0 free of small square factors."""
    f = 1
    p = 2
    while p * p <= d and p < 100000:
        while d % (p * p) == 0:
            d //= p * p
            f *= p
        p += 1 if p == 2 else 2
    r = math.isqrt(d)
    if r * r == d:
        f *= r
        d = 1
    return f, d


class ExactReal:
    """(a + b*sqrt(d))/den with integers a, b, den > 0 and d not a perfect square.

    b == 0 encodes an exact rational (d is then ignored and stored as 0).
    All order decisions are exact; floating point only enters through the
    explicit ``to_float`` / ``frac_float`` accessors.
    """

    __slots__ = ("a", "b", "den", "d")

    def __init__(self, a: int, b: int, den: int, d: int):
        # coerce to Python ints so fixed-width integers (numpy) cannot leak in
        a, b, den, d = int(a), int(b), int(den), int(d)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            a, b, den = -a, -b, -den
        if b == 0:
            d = 0
        elif d <= 1 or _is_square(d):
            raise ConfigurationError(f"radicand {d} is a perfect square or < 2")
        g = math.gcd(math.gcd(abs(a), abs(b)), den)
        if g > 1:
            a //= g
            b //= g
            den //= g
        self.a = a
        self.b = b
        self.den = den
        self.d = d

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_fraction(cls, value: Union[int, Fraction]) -> "ExactReal":
        fr = Fraction(value)
        return cls(fr.numerator, 0, fr.denominator, 0)

    @classmethod
    def from_parts(cls, rational: Fraction, surd_coeff: Fraction, d: int) -> "ExactReal":
        if surd_coeff == 0:
            return cls.from_fraction(rational)
        den = math.lcm(rational.denominator, surd_coeff.denominator)
        return cls(
            rational.numerator * (den // rational.denominator),
            surd_coeff.numerator * (den // surd_coeff.denominator),
            den,
            d,
        )

    # -- ring operations (closed for a fixed d) ------------------------------

    def _coerce(self, other: Real) -> "ExactReal":
        if isinstance(other, ExactReal):
            if other.b != 0 and self.b != 0 and other.d != self.d:
                raise ValueError("mixed radicands")
            return other
        return ExactReal.from_fraction(Fraction(other))

    def __add__(self, other: Real) -> "ExactReal":
        o = self._coerce(other)
        d = self.d or o.d
        den = self.den * o.den
        return ExactReal(self.a * o.den + o.a * self.den, self.b * o.den + o.b * self.den, den, d)

    __radd__ = __add__

    def __neg__(self) -> "ExactReal":
        return ExactReal(-self.a, -self.b, self.den, self.d)

    def __sub__(self, other: Real) -> "ExactReal":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Real) -> "ExactReal":
        return (-self) + other

    def scale(self, value: Union[int, Fraction]) -> "ExactReal":
        fr = Fraction(value)
        return ExactReal(self.a * fr.numerator, self.b * fr.numerator, self.den * fr.denominator, self.d)

    def __mul__(self, other: Real) -> "ExactReal":
        if not isinstance(other, ExactReal):
            return self.scale(Fraction(other))
        o = self._coerce(other)
        d = self.d or o.d
        return ExactReal(self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a,
                         self.den * o.den, d)

    __rmul__ = __mul__

    def inverse(self) -> "ExactReal":
        # 1/((a+b sqrt d)/den) = den (a - b sqrt d) / (a^2 - b^2 d)
        norm = self.a * self.a - self.b * self.b * self.d
        if norm == 0:
            raise ZeroDivisionError("inverse of zero")
        return ExactReal(self.den * self.a, -self.den * self.b, norm, self.d)

    # -- exact order decisions ------------------------------------------------

    def sign(self) -> int:
        """Exact sign of the value."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a >= 0 and b > 0:
            return 1
        if a <= 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with b^2 d (equality impossible, d non-square)
        lhs, rhs = a * a, b * b * self.d
        if lhs == rhs:
            return 0
        if lhs > rhs:
            return 1 if a > 0 else -1
        return 1 if b > 0 else -1

    def compare(self, other: Real) -> int:
        return (self - other).sign()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (int, float, Fraction, ExactReal)):
            return NotImplemented
        return self.compare(other) == 0

    def __lt__(self, other: Real) -> bool:
        return self.compare(other) < 0

    def __le__(self, other: Real) -> bool:
        return self.compare(other) <= 0

    def __gt__(self, other: Real) -> bool:
        return self.compare(other) > 0

    def __ge__(self, other: Real) -> bool:
        return self.compare(other) >= 0

    def __hash__(self):
        return hash((self.a, self.b, self.den, self.d))

    def is_integer(self) -> bool:
        return self.b == 0 and self.den == 1

    def floor(self) -> int:
        """Exact floor via integer square-root bracketing."""
        a, b, den = self.a, self.b, self.den
        if b == 0:
            return a // den
        s = math.isqrt(b * b * self.d)
        # b*sqrt(d) lies in [s, s+1) for b > 0 and (-(s+1), -s] for b < 0
        lo_num = a + (s if b > 0 else -(s + 1))
        n = lo_num // den
        # at most two corrections; the bracket has width 1/den < 1
        while self.compare(n + 1) >= 0:
            n += 1
        while self.compare(n) < 0:
            n -= 1
        return n

    # -- numeric accessors ----------------------------------------------------

    def to_mpf(self, bits: int = DEFAULT_BITS) -> mp.mpf:
        with mp.workprec(bits):
            v = mp.mpf(self.a)
            if self.b:
                v += mp.mpf(self.b) * mp.sqrt(mp.mpf(self.d))
            return v / self.den

    def to_float(self) -> float:
        bits = max(96, (abs(self.a) + abs(self.b)).bit_length() + self.d.bit_length() // 2 + 64)
        return float(self.to_mpf(bits))

    __float__ = to_float

    def frac_float(self) -> tuple[float, int]:
        """({t} as float, floor(t)); the fractional part carries >= 60 certified bits.

        {t} < 1 always; a value that rounds up to 1.0 is clamped to the float
        below so the half-open contract survives the conversion.
        """
        k = self.floor()
        f = (self - k).to_float()
        if f >= 1.0:
            f = math.nextafter(1.0, 0.0)
        return f, k

    def __repr__(self):
        if self.b == 0:
            return f"ExactReal({Fraction(self.a, self.den)})"
        return f"ExactReal(({self.a}{self.b:+d}*sqrt({self.d}))/{self.den})"


# ---------------------------------------------------------------------------
# Parameter descriptions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IrrationalParameter:
    """Symbolic description of the positive irrational parameter theta.

    kind is one of:
      * "quadratic-surd": theta = (p + q*sqrt(d))/s, d not a perfect square
      * "partial-quotients": continued fraction [a0; a1, a2, ...] given by a
        finite prefix and a continuation rule ("periodic" repeats the quotients
        after a0, "constant" repeats the last quotient); reduced internally to
        an exact quadratic surd
      * "literal": an exact decimal string taken at face value; ``bits`` records
        the declared meaningful precision and irrationality is declared, not
        verified

    declared_gamma optionally pins the Diophantine approximation type; surd and
    quotient kinds default to 1 (bounded partial quotients).
    """

    kind: str
    p: int = 0
    q: int = 0
    s: int = 1
    d: int = 0
    prefix: tuple[int, ...] = ()
    rule: str = ""
    decimal: str = ""
    bits: int = 0
    declared_gamma: Optional[float] = None
    note: str = ""
    _exact: ExactReal = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.kind == "quadratic-surd":
            if self.q == 0 or self.s == 0:
                raise ConfigurationError("quadratic surd needs q != 0 and s != 0")
            if self.d <= 1 or _is_square(self.d):
                raise ConfigurationError(f"d = {self.d} must be > 1 and not a perfect square")
            f, d0 = _square_free_split(self.d)
            exact = ExactReal.from_parts(Fraction(self.p, self.s), Fraction(self.q * f, self.s), d0)
        elif self.kind == "partial-quotients":
            exact = _surd_from_quotients(self.prefix, self.rule)
        elif self.kind == "literal":
            if not self.decimal:
                raise ConfigurationError("literal kind needs a decimal string")
            if self.bits < 1:
                raise ConfigurationError("literal kind needs a positive declared bit count")
            exact = ExactReal.from_fraction(_fraction_from_decimal(self.decimal))
        else:
            raise ConfigurationError(f"unknown theta kind {self.kind!r}")
        if exact.sign() <= 0:
            raise ConfigurationError("theta must be positive")
        object.__setattr__(self, "_exact", exact)

    # -- exact access ---------------------------------------------------------

    def exact(self) -> ExactReal:
        return self._exact

    def linear(self, c0: Union[int, Fraction], c1: Union[int, Fraction]) -> ExactReal:
        """Exact value of c0 + c1 * theta."""
        t = self._exact
        c0 = Fraction(c0)
        c1 = Fraction(c1)
        rational = c0 + c1 * Fraction(t.a, t.den)
        surd = c1 * Fraction(t.b, t.den)
        return ExactReal.from_parts(rational, surd, t.d)

    @property
    def gamma(self) -> float:
        if self.declared_gamma is not None:
            return self.declared_gamma
        if self.kind in ("quadratic-surd", "partial-quotients"):
            return 1.0
        raise ConfigurationError("literal theta requires a declared approximation type")

    def is_rational(self) -> bool:
        return self._exact.b == 0

    # -- convenience constructors ---------------------------------------------

    @classmethod
    def surd(cls, p: int, q: int, s: int, d: int, **kw) -> "IrrationalParameter":
        return cls(kind="quadratic-surd", p=p, q=q, s=s, d=d, **kw)

    @classmethod
    def sqrt2(cls) -> "IrrationalParameter":
        return cls.surd(0, 1, 1, 2)

    @classmethod
    def golden(cls) -> "IrrationalParameter":
        return cls.surd(1, 1, 2, 5)

    @classmethod
    def from_config(cls, cfg: dict) -> "IrrationalParameter":
        kind = cfg.get("kind")
        gamma = cfg.get("gamma")
        if kind == "quadratic-surd":
            return cls.surd(int(cfg["p"]), int(cfg["q"]), int(cfg["s"]), int(cfg["d"]),
                            declared_gamma=gamma)
        if kind == "partial-quotients":
            return cls(kind=kind, prefix=tuple(int(a) for a in cfg["prefix"]),
                       rule=str(cfg["rule"]), declared_gamma=gamma)
        if kind == "literal":
            return cls(kind=kind, decimal=str(cfg["decimal"]), bits=int(cfg["bits"]),
                       declared_gamma=gamma)
        raise ConfigurationError(f"unknown theta kind {kind!r}")

    def to_config(self) -> dict:
        if self.kind == "quadratic-surd":
            cfg = {"kind": self.kind, "p": self.p, "q": self.q, "s": self.s, "d": self.d}
        elif self.kind == "partial-quotients":
            cfg = {"kind": self.kind, "prefix": list(self.prefix), "rule": self.rule}
        else:
            cfg = {"kind": self.kind, "decimal": self.decimal, "bits": self.bits}
        if self.declared_gamma is not None:
            cfg["gamma"] = self.declared_gamma
        return cfg


def _fraction_from_decimal(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigurationError(f"bad decimal literal {text!r}") from exc


def _surd_from_quotients(prefix: Sequence[int], rule: str) -> ExactReal:
    if not prefix:
        raise ConfigurationError("partial-quotient prefix must be nonempty")
    if any(a < 1 for a in prefix[1:]) or prefix[0] < 0:
        raise ConfigurationError("partial quotients a_i must be >= 1 for i >= 1")
    if rule == "constant":
        block = [prefix[-1]]
        head = list(prefix[:-1])
    elif rule == "periodic":
        if len(prefix) < 2:
            raise ConfigurationError("periodic rule needs at least one quotient after a0")
        block = list(prefix[1:])
        head = [prefix[0]]
    else:
        raise ConfigurationError(f"unsupported continuation rule {rule!r}")
    # tail tau = [block repeating]: tau = (A tau + B)/(C tau + D) for the
    # product of the block's Moebius matrices, hence C tau^2 + (D-A) tau - B = 0
    A, B, C, D = 1, 0, 0, 1
    for a in block:
        A, B, C, D = A * a + B, A, C * a + D, C
    disc = (A - D) * (A - D) + 4 * B * C
    if disc <= 0 or _is_square(disc):
        raise ConfigurationError("quotient stream does not describe an irrational")
    f, d0 = _square_free_split(disc)
    tau = ExactReal.from_parts(Fraction(A - D, 2 * C), Fraction(f, 2 * C), d0)
    value = tau
    for a in reversed(head):
        value = value.inverse() + a
    return value


# ---------------------------------------------------------------------------
# Enclosures, psi and the distance to the nearest integer
# ---------------------------------------------------------------------------


def eval_theta(theta: IrrationalParameter, precision_bits: int) -> tuple[mp.mpf, mp.mpf]:
    """Enclosure [lo, hi] of theta with hi - lo <= 2^(1-precision_bits)."""
    if precision_bits < 64:
        raise ConfigurationError("precision must be at least 64 bits")
    t = theta.exact()
    bits = precision_bits + 16
    while True:
        if t.b == 0:
            with mp.workprec(bits):
                v = mp.mpf(t.a) / t.den
                pad = abs(v) * mp.mpf(2) ** (2 - bits) + mp.mpf(2) ** (-4 * bits)
                lo, hi = v - pad, v + pad
                width = hi - lo
        else:
            # sqrt(d) in [s, s+1] / 2^shift with s = isqrt(d << 2 shift)
            shift = bits
            s = math.isqrt(t.d << (2 * shift))
            with mp.workprec(bits + 8):
                lo_s = mp.mpf(s) / mp.mpf(2) ** shift
                hi_s = mp.mpf(s + 1) / mp.mpf(2) ** shift
                if t.b > 0:
                    lo = (t.a + t.b * lo_s) / t.den
                    hi = (t.a + t.b * hi_s) / t.den
                else:
                    lo = (t.a + t.b * hi_s) / t.den
                    hi = (t.a + t.b * lo_s) / t.den
                # one-ulp outward guard for the divisions above
                eps = mp.mpf(2) ** (-bits)
                lo -= abs(lo) * eps
                hi += abs(hi) * eps
                width = hi - lo
        if width <= mp.mpf(2) ** (1 - precision_bits):
            return lo, hi
        bits *= 2


@dataclass(frozen=True)
class PsiValue:
    """Sawtooth value {t} - 1/2 together with a discontinuity flag."""

    value: float
    boundary: bool = False


def _as_exact(t: Real) -> ExactReal:
    if isinstance(t, ExactReal):
        return t
    if isinstance(t, float):
        if not math.isfinite(t):
            raise ValueError("psi argument must be finite")
        return ExactReal.from_fraction(Fraction(t))
    return ExactReal.from_fraction(Fraction(t))


def psi(t: Union[Real, tuple]) -> PsiValue:
    """psi(t) = {t} - 1/2 on an exact value or an (lo, hi) enclosure.

    Exact integers report the jump convention {k} = 0 (value -1/2) with the
    boundary flag set; an enclosure straddling an integer is evaluated at its
    midpoint and flagged.
    """
    if isinstance(t, tuple):
        lo, hi = t
        if math.floor(lo) != math.floor(hi):
            mid = (float(lo) + float(hi)) / 2.0
            return PsiValue(mid - math.floor(mid) - 0.5, True)
        return PsiValue(float(lo) - math.floor(lo) - 0.5 + (float(hi) - float(lo)) / 2.0, False)
    x = _as_exact(t)
    frac, _ = x.frac_float()
    if x.is_integer():
        return PsiValue(-0.5, True)
    return PsiValue(frac - 0.5, False)


def dist_to_int(t: Union[Real, tuple]) -> float:
    """||t|| = min({t}, 1 - {t})."""
    if isinstance(t, tuple):
        mid = (float(t[0]) + float(t[1])) / 2.0
        fr = mid - math.floor(mid)
        return min(fr, 1.0 - fr)
    x = _as_exact(t)
    frac, _ = x.frac_float()
    return min(frac, 1.0 - frac)


def dist_to_int_exact(x: ExactReal) -> tuple[float, bool]:
    """(||x||, lower-half flag): exact branch choice, float magnitude."""
    frac, _ = x.frac_float()
    half = (x - x.floor()).compare(Fraction(1, 2))
    if half <= 0:
        return frac, True
    return 1.0 - frac, False


# ---------------------------------------------------------------------------
# Continued fractions
# ---------------------------------------------------------------------------


@dataclass
class ContinuedFractionState:
    """Partial quotients with exact convergents p_k/q_k."""

    quotients: list[int]
    convergents: list[tuple[int, int]]
    certified_depth: int

    def check_determinant(self) -> bool:
        ps = [1, self.convergents[0][0]] + [p for p, _ in self.convergents[1:]]
        qs = [0, self.convergents[0][1]] + [q for _, q in self.convergents[1:]]
        for k in range(1, len(self.convergents)):
            if ps[k + 1] * qs[k] - ps[k] * qs[k + 1] != (-1) ** (k - 1):
                return False
        return True


def continued_fraction(theta: IrrationalParameter, k: int) -> ContinuedFractionState:
    """First k partial quotients of theta with exact convergents.

    For surd-backed parameters every quotient is certified by exact
    arithmetic.  A rational literal has a finite expansion: the state then
    stops at the last certified index (certified_depth < k).
    """
    if k < 1:
        raise ValueError("depth must be >= 1")
    t = theta.exact()
    quotients: list[int] = []
    for _ in range(k):
        a = t.floor()
        quotients.append(a)
        rem = t - a
        if rem.sign() == 0:
            break
        t = rem.inverse()
    ps: list[int] = []
    qs: list[int] = []
    for i, a in enumerate(quotients):
        if i == 0:
            ps.append(a)
            qs.append(1)
        elif i == 1:
            ps.append(a * ps[0] + 1)
            qs.append(a)
        else:
            ps.append(a * ps[i - 1] + ps[i - 2])
            qs.append(a * qs[i - 1] + qs[i - 2])
    return ContinuedFractionState(quotients, list(zip(ps, qs)), len(quotients))


# ---------------------------------------------------------------------------
# Approximation type
# ---------------------------------------------------------------------------


def _half_integer_distances(theta: IrrationalParameter, q_max: int,
                            half_integers: bool = True):
    """Yield (q, ||q theta||) for q = 1/2, 1, 3/2, ..., q_max, exactly.

    q theta = u theta / 2 for u = 1..2 q_max; the doubled modulus keeps the
    floor decision in integer arithmetic.  half_integers=False restricts the
    scan to integer q.
    """
    t = theta.exact()
    a, b, den, d = t.a, t.b, t.den, t.d
    start, step = (1, 1) if half_integers else (2, 2)
    for u in range(start, 2 * q_max + 1, step):
        x = ExactReal(u * a, u * b, 2 * den, d)
        frac, _ = x.frac_float()
        dist = min(frac, 1.0 - frac)
        yield Fraction(u, 2), dist


@dataclass
class TypeEstimate:
    """Empirical approximation type from a q-scan."""

    estimate: float
    sup_ratio: float
    sup_witness: Fraction
    records: list[tuple[Fraction, float]]


def estimate_type(theta: IrrationalParameter, q_max: int) -> TypeEstimate:
    """Empirical approximation type of theta from all q <= q_max in (1/2)Z.

    estimate is the least-squares slope of log(1/||q theta||) against log q
    over the record-setting q (the running minima of ||q theta||, i.e. the
    best-approximation subsequence); it converges to the type (1 for quadratic
    surds).  The raw pointwise supremum of -log||q theta||/log q over q > 1 is
    also reported with its witness; small q keep that supremum well above the
    type, so it is diagnostic only.
    """
    if q_max < 10:
        raise ValueError("q_max must be >= 10")
    records: list[tuple[Fraction, float]] = []
    best = math.inf
    sup_ratio = -math.inf
    sup_witness = Fraction(1)
    for q, dist in _half_integer_distances(theta, q_max):
        if dist <= 0.0:
            continue
        if dist < best:
            best = dist
            records.append((q, dist))
        if q > 1:
            ratio = -math.log(dist) / math.log(float(q))
            if ratio > sup_ratio:
                sup_ratio = ratio
                sup_witness = q
    pts = [(math.log(float(q)), -math.log(dist)) for q, dist in records if q >= 1]
    n = len(pts)
    if n < 2:
        slope = math.nan
    else:
        mx = sum(x for x, _ in pts) / n
        my = sum(y for _, y in pts) / n
        sxx = sum((x - mx) ** 2 for x, _ in pts)
        sxy = sum((x - mx) * (y - my) for x, y in pts)
        slope = sxy / sxx
    return TypeEstimate(slope, sup_ratio, sup_witness, records)


@dataclass
class QThetaBound:
    """Result of the ||q theta|| >> q^(-gamma-eps) scan."""

    holds: bool
    min_ratio: float
    witness_q: Fraction
    window_mins: list[float]
    trend_slope: float


def check_qtheta_lower_bound(theta: IrrationalParameter, gamma: float, epsilon: float,
                             q_max: int, half_integers: bool = True) -> QThetaBound:
    """Scan min over q <= q_max of ||q theta|| q^(gamma+eps), q in (1/2)Z.

    holds requires a positive minimum and a non-vanishing trend: the fitted
    slope of log(window minimum) over dyadic q-windows must stay above -0.1
    (a true type gamma' > gamma would drift like -(gamma'-gamma-eps) log 2 per
    window).  half_integers=False restricts to integer q, where e.g. the
    golden ratio's minimum sits on Fibonacci denominators just above 5^(-1/2).
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    expo = gamma + epsilon
    min_ratio = math.inf
    witness = Fraction(1)
    window_mins: list[float] = []
    window_hi = 2.0
    current = math.inf
    for q, dist in _half_integer_distances(theta, q_max, half_integers):
        if dist <= 0.0:
            continue
        ratio = dist * float(q) ** expo
        if ratio < min_ratio:
            min_ratio = ratio
            witness = q
        while float(q) >= window_hi:
            if math.isfinite(current):
                window_mins.append(current)
            current = math.inf
            window_hi *= 2.0
        current = min(current, ratio)
    if math.isfinite(current):
        window_mins.append(current)
    if len(window_mins) >= 2:
        ys = [math.log(w) for w in window_mins]
        n = len(ys)
        mx = (n - 1) / 2.0
        my = sum(ys) / n
        sxx = sum((i - mx) ** 2 for i in range(n))
        trend = sum((i - mx) * (ys[i] - my) for i in range(n)) / sxx
    else:
        trend = 0.0
    holds = min_ratio > 0.0 and trend >= -0.1
    return QThetaBound(holds, min_ratio, witness, window_mins, trend)


# ---------------------------------------------------------------------------
# Certified Hurwitz zeta tails (used by the series modules)
# ---------------------------------------------------------------------------

_ZETA_EM_CUTOFF = 40.0


def zeta_tail(s: float, a: float) -> tuple[float, float]:
    """(value, certified absolute error) for sum_{n>=0} (n+a)^(-s), s > 1, a > 0.

    Below the cutoff the value comes from mpmath at 80 bits; above it from the
    Euler-Maclaurin expansion through the B_6 term, whose remainder for the
    completely monotone integrand x^(-s) is bounded by the first omitted term.
    """
    if s <= 1 or a <= 0:
        raise ValueError("need s > 1 and a > 0")
    if a < _ZETA_EM_CUTOFF:
        with mp.workprec(120):
            v = mp.zeta(s, a)
            return float(v), abs(float(v)) * 2.0 ** -52 + 5e-300
    inv = 1.0 / a
    t0 = a ** (1.0 - s) / (s - 1.0)
    t1 = 0.5 * a ** -s
    t2 = s * a ** (-s - 1.0) / 12.0
    t4 = -s * (s + 1.0) * (s + 2.0) * a ** (-s - 3.0) / 720.0
    t6 = s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * a ** (-s - 5.0) / 30240.0
    value = t0 + t1 + t2 + t4 + t6
    rem = s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * (s + 5) * (s + 6) \
        * a ** (-s - 7.0) / 1209600.0
    return value, abs(rem) + 1e-15 * abs(value)
