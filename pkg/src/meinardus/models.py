"""Model definitions and the built-in catalogue.

A weighted model is f(z) = prod_{k>=1} (S(a_k z^k))^{b_k}: an inner series
S with unit constant term and nonnegative coefficients, a weight sequence
b_k >= 0, a frequency sequence 0 < a_k <= 1, and optionally the analytic
profile of its coefficient Dirichlet series.  Inner series come in four
kinds:

  geometric   S = 1/(1-z)          (pole at z = 1)
  binomial    S = 1+z              (zero at z = -1)
  ratio(p)    S = (1+z)/(1-z^p)    (zero at -1, poles at p-th roots of 1)
  explicit    finite d_0..d_J with a declared tail rule (zero or periodic)

Unit-circle singularities are declared metadata of the kind, not detected
numerically.  The JSON loader is strict: unknown fields are rejected.
"""

from __future__ import annotations

import cmath
import json
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from . import series
from .dirichlet import (
    AsymptoticProfile,
    profile_distinct,
    profile_partitions,
    profile_prime_powers,
    profile_q4_indicator,
)
from .errors import ParseError, UnknownModel, UnsupportedForm, ValidationError
from .precision import DEFAULT_CONTEXT, PrecisionContext, working_precision

POLE = "pole"
ZERO = "zero"

_SERIES_TOL_BITS_MARGIN = 8


@dataclass(frozen=True)
class SingularityDescriptor:
    """Declared unit-circle singularity of the inner series."""

    location: complex
    order: int
    kind: str                     # "pole" | "zero"
    regular_part_modulus: float = 1.0

    def __post_init__(self):
        if abs(abs(self.location) - 1.0) > 1e-9:
            raise ValidationError("singularities must sit on the unit circle")
        if self.kind not in (POLE, ZERO):
            raise ValidationError(f"unknown singularity kind {self.kind!r}")
        if self.kind == POLE and self.order != 1:
            raise ValidationError("pole order is normalized to 1")
        if self.order < 1:
            raise ValidationError("singularity order must be positive")
        if not self.regular_part_modulus > 0:
            raise ValidationError("regular part modulus must be positive")


# ----------------------------------------------------------------------
# Inner series
# ----------------------------------------------------------------------

GEOMETRIC = "geometric"
BINOMIAL = "binomial"
RATIO = "ratio"
EXPLICIT = "explicit"

ZERO_TAIL = "zero"


def _is_mpc(x) -> bool:
    return isinstance(x, (mpc, complex))


def _log1p_any(x):
    if _is_mpc(x):
        return gmpy2.log(1 + x)
    return gmpy2.log1p(x)


@dataclass(frozen=True)
class InnerSeriesSpec:
    """The factor series S(z) = sum_j d_j z^j, d_0 = 1, d_j >= 0."""

    kind: str
    p: int = 1
    coeffs: tuple = ()
    tail: object = ZERO_TAIL      # "zero" or a tuple repeated forever

    def __post_init__(self):
        if self.kind not in (GEOMETRIC, BINOMIAL, RATIO, EXPLICIT):
            raise ValidationError(f"unknown inner-series kind {self.kind!r}")
        if self.kind == RATIO and (self.p < 1 or self.p != int(self.p)):
            raise ValidationError("ratio kernel needs an integer p >= 1")
        if self.kind == EXPLICIT:
            if not self.coeffs:
                raise ValidationError("explicit inner series needs coefficients")
            if float(self.coeffs[0]) != 1.0:
                raise ValidationError(f"d_0 must be 1, got {self.coeffs[0]}")
            if any(float(c) < 0 for c in self.coeffs):
                raise ValidationError("inner-series coefficients must be >= 0")
            if self.tail != ZERO_TAIL:
                if not isinstance(self.tail, tuple) or not self.tail:
                    raise ValidationError(
                        "tail rule must be 'zero' or a nonempty periodic block")
                if any(float(c) < 0 for c in self.tail):
                    raise ValidationError("tail coefficients must be >= 0")
            # radius-of-convergence check on the declared part
            for j, c in enumerate(self.coeffs):
                if j >= 1 and float(c) > 0 and float(c) ** (1.0 / j) > 1.0 + 1e-12:
                    raise ValidationError(
                        f"d_{j} = {c} puts the radius of convergence below 1")
            if self.l0 is None:
                raise ValidationError("inner series must not be identically 1")

    # -- coefficient access ------------------------------------------

    def d(self, j: int) -> float:
        if j < 0:
            raise ValueError("coefficient index must be nonnegative")
        if self.kind == GEOMETRIC:
            return 1.0
        if self.kind == BINOMIAL:
            return 1.0 if j <= 1 else 0.0
        if self.kind == RATIO:
            return float(sum(1 for e in (0, 1) if j - e >= 0 and (j - e) % self.p == 0))
        if j < len(self.coeffs):
            return float(self.coeffs[j])
        if self.tail == ZERO_TAIL:
            return 0.0
        block = self.tail
        return float(block[(j - len(self.coeffs)) % len(block)])

    @property
    def l0(self) -> int | None:
        """min{j >= 1 : d_j > 0}; None only for the excluded S == 1 case."""
        if self.kind in (GEOMETRIC, BINOMIAL, RATIO):
            return 1
        for j in range(1, len(self.coeffs)):
            if float(self.coeffs[j]) > 0:
                return j
        if self.tail != ZERO_TAIL:
            for i, c in enumerate(self.tail):
                if float(c) > 0:
                    return len(self.coeffs) + i
        return None

    @property
    def singularities(self) -> tuple[SingularityDescriptor, ...]:
        if self.kind == GEOMETRIC:
            return (SingularityDescriptor(1 + 0j, 1, POLE),)
        if self.kind == BINOMIAL:
            return (SingularityDescriptor(-1 + 0j, 1, ZERO),)
        if self.kind == RATIO:
            poles = tuple(
                SingularityDescriptor(
                    complex(cmath.exp(2j * cmath.pi * v / self.p)), 1, POLE)
                for v in range(self.p))
            return (SingularityDescriptor(-1 + 0j, 1, ZERO),) + poles
        return ()

    # -- log coefficients --------------------------------------------

    def log_coeffs(self, J: int, ctx: PrecisionContext | None = None) -> series.LogCoefficients:
        ctx = ctx or DEFAULT_CONTEXT
        return _log_coeffs_cached(self, J, ctx.bits)

    # -- pointwise evaluation ----------------------------------------

    def log_at(self, w):
        """log S(w) by the closed kernel form (series route for explicit).

        For the kernel kinds the argument of every elementary log has
        positive real part whenever |w| < 1, so the principal branch
        agrees with the power series."""
        if self.kind == GEOMETRIC:
            return -_log1p_any(-w)
        if self.kind == BINOMIAL:
            return _log1p_any(w)
        if self.kind == RATIO:
            return _log1p_any(w) - _log1p_any(-(w ** self.p))
        return self.log_at_series(w)

    def log_at_series(self, w, ctx: PrecisionContext | None = None):
        """log S(w) through sum_j xi_j w^j (|w| < 1)."""
        ctx = ctx or DEFAULT_CONTEXT
        r = float(abs(w))
        if r >= 1.0:
            from .errors import SeriesDivergence
            raise SeriesDivergence(f"|w| = {r} leaves the unit disk")
        if r == 0.0:
            return w * 0
        J = self._series_depth(r, ctx)
        xi = self.log_coeffs(J, ctx).values
        acc = w * 0
        power = w * 0 + 1
        for j in range(1, J + 1):
            power = power * w
            x = xi[j - 1]
            if x != 0:
                acc += x * power
        return acc

    def _series_depth(self, r: float, ctx: PrecisionContext) -> int:
        bits_target = (ctx.bits + _SERIES_TOL_BITS_MARGIN) * math.log(2.0)
        return max(8, min(int(bits_target / -math.log(r)) + 4, 1_000_000))

    def dlog_at(self, w, ctx: PrecisionContext | None = None):
        """(q1, q2, q3) with q_m = (w d/dw)^m log S at w; the tilted factor
        moments are b_k k^m q_m."""
        if self.kind == GEOMETRIC:
            om = 1 - w
            return (w / om, w / om ** 2, w * (1 + w) / om ** 3)
        if self.kind == BINOMIAL:
            op = 1 + w
            return (w / op, w / op ** 2, w * (1 - w) / op ** 3)
        if self.kind == RATIO:
            op = 1 + w
            u = w ** self.p
            ou = 1 - u
            p = self.p
            return (w / op + p * u / ou,
                    w / op ** 2 + p * p * u / ou ** 2,
                    w * (1 - w) / op ** 3 + p ** 3 * u * (1 + u) / ou ** 3)
        ctx = ctx or DEFAULT_CONTEXT
        r = float(abs(w))
        J = self._series_depth(r, ctx) if 0.0 < r < 1.0 else 8
        xi = self.log_coeffs(J, ctx).values
        q1 = w * 0
        q2 = w * 0
        q3 = w * 0
        power = w * 0 + 1
        for j in range(1, J + 1):
            power = power * w
            x = xi[j - 1]
            if x != 0:
                t = x * power
                q1 += j * t
                q2 += j * j * t
                q3 += j * j * j * t
        return (q1, q2, q3)

    def log_at_np(self, w: np.ndarray) -> np.ndarray:
        """Vectorized float/complex log S(w) for the quadrature driver."""
        if self.kind == GEOMETRIC:
            return -np.log1p(-w)
        if self.kind == BINOMIAL:
            return np.log1p(w)
        if self.kind == RATIO:
            return np.log1p(w) - np.log1p(-(w ** self.p))
        r = float(np.max(np.abs(w)))
        if r >= 1.0:
            from .errors import SeriesDivergence
            raise SeriesDivergence(f"|w| = {r} leaves the unit disk")
        J = max(8, int(41.0 / -math.log(r)) + 4) if r > 0 else 8
        xi = [float(x) for x in self.log_coeffs(J, DEFAULT_CONTEXT).values]
        acc = np.zeros_like(w)
        power = np.ones_like(w)
        for j in range(1, J + 1):
            power = power * w
            if xi[j - 1] != 0.0:
                acc = acc + xi[j - 1] * power
        return acc

    # -- constructors ------------------------------------------------

    @staticmethod
    def geometric() -> "InnerSeriesSpec":
        return InnerSeriesSpec(kind=GEOMETRIC)

    @staticmethod
    def binomial() -> "InnerSeriesSpec":
        return InnerSeriesSpec(kind=BINOMIAL)

    @staticmethod
    def ratio(p: int) -> "InnerSeriesSpec":
        return InnerSeriesSpec(kind=RATIO, p=int(p))

    @staticmethod
    def explicit(coeffs, tail=ZERO_TAIL) -> "InnerSeriesSpec":
        tail_val = ZERO_TAIL if tail == ZERO_TAIL else tuple(float(c) for c in tail)
        return InnerSeriesSpec(kind=EXPLICIT,
                               coeffs=tuple(float(c) for c in coeffs),
                               tail=tail_val)


@lru_cache(maxsize=256)
def _log_coeffs_cached(inner: InnerSeriesSpec, J: int, bits: int) -> series.LogCoefficients:
    ctx = PrecisionContext(bits=bits)
    with working_precision(ctx):
        if inner.kind == GEOMETRIC:
            return series.LogCoefficients(
                values=tuple(1 / mpfr(j) for j in range(1, J + 1)))
        if inner.kind == BINOMIAL:
            return series.LogCoefficients(
                values=tuple((-1) ** (j - 1) / mpfr(j) for j in range(1, J + 1)))
        if inner.kind == RATIO:
            p = inner.p
            vals = []
            for j in range(1, J + 1):
                x = mpfr((-1) ** (j - 1)) / j
                if j % p == 0:
                    x += mpfr(p) / j
                vals.append(x)
            return series.LogCoefficients(values=tuple(vals))
        d = [mpfr(inner.d(j)) for j in range(J + 1)]
        return series.log_series(d, ctx)


# ----------------------------------------------------------------------
# Weight / frequency sequences
# ----------------------------------------------------------------------

CONSTANT = "constant"
POWER = "power"
VON_MANGOLDT = "von-mangoldt"
EXAMPLE3 = "example3"
INDICATOR = "indicator"
TABLE = "table"

_SEQ_KINDS = (CONSTANT, POWER, VON_MANGOLDT, EXAMPLE3, INDICATOR, TABLE)


def _prime_power_base(k: int) -> int | None:
    """p when k = p^r for a prime p, else None."""
    if k < 2:
        return None
    for p in range(2, math.isqrt(k) + 1):
        if k % p == 0:
            while k % p == 0:
                k //= p
            return p if k == 1 else None
    return k    # k itself is prime


def von_mangoldt(k: int) -> float:
    """log p when k = p^r (p prime), else 0."""
    if k < 1:
        raise ValueError("k must be positive")
    p = _prime_power_base(k)
    return math.log(p) if p else 0.0


_LOG_CACHE: dict[tuple[int, int], mpfr] = {}


def _log_int_hp(p: int, bits: int) -> mpfr:
    key = (p, bits)
    v = _LOG_CACHE.get(key)
    if v is None:
        v = gmpy2.log(mpfr(p))
        _LOG_CACHE[key] = v
    return v


@dataclass(frozen=True)
class SequenceSpec:
    """One of the model's two parameter sequences (weights b_k or
    frequencies a_k); calling it yields the value at k as an mpfr under
    the active precision."""

    kind: str
    value: float = 1.0            # constant
    coeff: float = 1.0            # power law: coeff * k^exponent
    exponent: float = 0.0
    eps: float = 0.5              # log-damping exponent of the example model
    modulus: int = 4              # indicator of multiples
    values: tuple = ()            # explicit table, zero tail (weights)

    def __post_init__(self):
        if self.kind not in _SEQ_KINDS:
            raise ValidationError(f"unknown sequence kind {self.kind!r}")
        if self.kind == EXAMPLE3 and not 0.0 < self.eps < 1.0:
            raise ValidationError("example3 needs eps in (0, 1)")
        if self.kind == INDICATOR and self.modulus < 1:
            raise ValidationError("indicator modulus must be >= 1")

    def __call__(self, k: int) -> mpfr:
        if self.kind == CONSTANT:
            return mpfr(self.value)
        if self.kind == POWER:
            return mpfr(self.coeff) * mpfr(k) ** mpfr(self.exponent)
        if self.kind == VON_MANGOLDT:
            p = _prime_power_base(k)
            if p is None:
                return mpfr(0)
            return _log_int_hp(p, gmpy2.get_context().precision)
        if self.kind == EXAMPLE3:
            if k < 2:
                return mpfr(0)
            base = 1 / (k * gmpy2.log(mpfr(k)) ** mpfr(self.eps))
            return base + 1 if k % 4 == 0 else base
        if self.kind == INDICATOR:
            return mpfr(1) if k % self.modulus == 0 else mpfr(0)
        return mpfr(self.values[k - 1]) if k <= len(self.values) else mpfr(0)

    def value_float(self, k: int) -> float:
        if self.kind == CONSTANT:
            return self.value
        if self.kind == POWER:
            return self.coeff * float(k) ** self.exponent
        if self.kind == VON_MANGOLDT:
            return von_mangoldt(k)
        if self.kind == EXAMPLE3:
            if k < 2:
                return 0.0
            base = 1.0 / (k * math.log(k) ** self.eps)
            return base + 1.0 if k % 4 == 0 else base
        if self.kind == INDICATOR:
            return 1.0 if k % self.modulus == 0 else 0.0
        return float(self.values[k - 1]) if k <= len(self.values) else 0.0

    def is_constant_one(self) -> bool:
        return self.kind == CONSTANT and self.value == 1.0

    def is_identically_zero(self) -> bool:
        if self.kind == CONSTANT:
            return self.value == 0.0
        if self.kind == POWER:
            return self.coeff == 0.0
        if self.kind == TABLE:
            return all(float(v) == 0.0 for v in self.values)
        return False

    # constructors
    @staticmethod
    def constant(v: float) -> "SequenceSpec":
        return SequenceSpec(kind=CONSTANT, value=float(v))

    @staticmethod
    def power(coeff: float, exponent: float) -> "SequenceSpec":
        return SequenceSpec(kind=POWER, coeff=float(coeff), exponent=float(exponent))

    @staticmethod
    def von_mangoldt_weights() -> "SequenceSpec":
        return SequenceSpec(kind=VON_MANGOLDT)

    @staticmethod
    def example3(eps: float) -> "SequenceSpec":
        return SequenceSpec(kind=EXAMPLE3, eps=float(eps))

    @staticmethod
    def indicator(modulus: int) -> "SequenceSpec":
        return SequenceSpec(kind=INDICATOR, modulus=int(modulus))

    @staticmethod
    def table(values) -> "SequenceSpec":
        return SequenceSpec(kind=TABLE, values=tuple(float(v) for v in values))


def _validate_weights(seq: SequenceSpec) -> None:
    if seq.kind == CONSTANT and seq.value < 0:
        raise ValidationError(f"negative weight: constant {seq.value}")
    if seq.kind == POWER and seq.coeff < 0:
        raise ValidationError(f"negative weight: coefficient {seq.coeff}")
    if seq.kind == TABLE and any(float(v) < 0 for v in seq.values):
        raise ValidationError("negative weight in table")


def _validate_frequencies(seq: SequenceSpec) -> None:
    bad = ValidationError("frequency outside (0, 1]")
    if seq.kind == CONSTANT:
        if not 0.0 < seq.value <= 1.0:
            raise bad
    elif seq.kind == POWER:
        # c * k^beta stays in (0,1] for all k iff 0 < c <= 1 and beta <= 0
        if not (0.0 < seq.coeff <= 1.0 and seq.exponent <= 0.0):
            raise bad
    elif seq.kind == TABLE:
        if any(not 0.0 < float(v) <= 1.0 for v in seq.values):
            raise bad
    else:
        raise ValidationError(
            f"sequence kind {seq.kind!r} cannot serve as frequencies")


# ----------------------------------------------------------------------
# The model
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class WeightedModel:
    name: str
    inner: InnerSeriesSpec
    weights: SequenceSpec
    frequencies: SequenceSpec
    profile: AsymptoticProfile | None = field(default=None, compare=False)

    def __post_init__(self):
        _validate_weights(self.weights)
        _validate_frequencies(self.frequencies)
        # AsymptoticProfile validates its own pole ordering/positivity

    def has_mass(self) -> bool:
        return not self.weights.is_identically_zero()

    def equivalent(self, other: "WeightedModel", rtol: float = 1e-25) -> bool:
        """Structural equality with numeric profile comparison."""
        if (self.inner, self.weights, self.frequencies) != \
                (other.inner, other.weights, other.frequencies):
            return False
        a, b = self.profile, other.profile
        if (a is None) != (b is None):
            return False
        if a is None:
            return True

        def close(x, y):
            return abs(float(x - y)) <= rtol * (1 + abs(float(x)))

        if a.r != b.r or a.L != b.L or a.main_term_only != b.main_term_only:
            return False
        return (all(close(x1, y1) and close(x2, y2)
                    for (x1, x2), (y1, y2) in zip(a.poles, b.poles))
                and close(a.A0, b.A0) and close(a.h0, b.h0)
                and all(close(x, y)
                        for x, y in zip(a.delta_coeffs, b.delta_coeffs)))


# ----------------------------------------------------------------------
# Catalogue
# ----------------------------------------------------------------------

BUILTIN_NAMES = (
    "partitions", "distinct", "prime-powers", "example3",
    "ratio-kernel", "q4-indicator", "empty-weights",
)


def builtin(name: str, ctx: PrecisionContext | None = None,
            eps: float | None = None, p: int | None = None) -> WeightedModel:
    """Built-in model by name; "example3(0.5)" / "ratio-kernel(3)" forms
    are accepted as well as explicit eps/p arguments."""
    ctx = ctx or DEFAULT_CONTEXT
    base = name.strip()
    if "(" in base and base.endswith(")"):
        base, arg = base[:-1].split("(", 1)
        base = base.strip()
        if base == "example3":
            eps = float(arg)
        elif base == "ratio-kernel":
            p = int(arg)
        else:
            raise UnknownModel(f"model {name!r} takes no parameter")
    one = SequenceSpec.constant(1.0)
    if base == "partitions":
        return WeightedModel("partitions", InnerSeriesSpec.geometric(),
                             one, one, profile_partitions(ctx))
    if base == "distinct":
        return WeightedModel("distinct", InnerSeriesSpec.binomial(),
                             one, one, profile_distinct(ctx))
    if base == "prime-powers":
        return WeightedModel("prime-powers", InnerSeriesSpec.geometric(),
                             SequenceSpec.von_mangoldt_weights(), one,
                             profile_prime_powers(ctx))
    if base == "example3":
        e = 0.5 if eps is None else float(eps)
        return WeightedModel(f"example3({e})", InnerSeriesSpec.geometric(),
                             SequenceSpec.example3(e), one, None)
    if base == "ratio-kernel":
        q = 2 if p is None else int(p)
        return WeightedModel(f"ratio-kernel({q})", InnerSeriesSpec.ratio(q),
                             one, one, None)
    if base == "q4-indicator":
        return WeightedModel("q4-indicator", InnerSeriesSpec.geometric(),
                             SequenceSpec.indicator(4), one,
                             profile_q4_indicator(ctx))
    if base == "empty-weights":
        return WeightedModel("empty-weights", InnerSeriesSpec.geometric(),
                             SequenceSpec.constant(0.0), one, None)
    if base in ("primes", "prime-partitions"):
        raise UnsupportedForm(
            "partitions into primes are not supported: the prime zeta "
            "function has a natural barrier at Re(s) = 0, so no pole/residue "
            "profile exists (use prime-powers for the tractable relative)")
    raise UnknownModel(
        f"unknown model {name!r}; catalogue: {', '.join(BUILTIN_NAMES)}")


# ----------------------------------------------------------------------
# JSON schema
# ----------------------------------------------------------------------

def _reject_unknown(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ParseError(f"unknown field(s) {sorted(unknown)} in {where}")


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ParseError(f"missing field {key!r} in {where}")
    return obj[key]


def _inner_from_dict(obj: dict) -> InnerSeriesSpec:
    kind = _require(obj, "kind", "inner")
    if kind == GEOMETRIC:
        _reject_unknown(obj, {"kind"}, "inner")
        return InnerSeriesSpec.geometric()
    if kind == BINOMIAL:
        _reject_unknown(obj, {"kind"}, "inner")
        return InnerSeriesSpec.binomial()
    if kind == RATIO:
        _reject_unknown(obj, {"kind", "p"}, "inner")
        return InnerSeriesSpec.ratio(int(_require(obj, "p", "inner")))
    if kind == EXPLICIT:
        _reject_unknown(obj, {"kind", "coeffs", "tail"}, "inner")
        coeffs = _require(obj, "coeffs", "inner")
        tail = obj.get("tail", ZERO_TAIL)
        if isinstance(tail, dict):
            _reject_unknown(tail, {"period"}, "inner.tail")
            tail = tuple(float(c) for c in _require(tail, "period", "inner.tail"))
        elif tail != ZERO_TAIL:
            raise ParseError("inner.tail must be \"zero\" or {\"period\": [...]}")
        return InnerSeriesSpec.explicit(coeffs, tail)
    raise ParseError(f"unknown inner kind {kind!r}")


def _sequence_from_dict(obj: dict, where: str) -> SequenceSpec:
    kind = _require(obj, "kind", where)
    if kind == CONSTANT:
        _reject_unknown(obj, {"kind", "value"}, where)
        return SequenceSpec.constant(float(_require(obj, "value", where)))
    if kind == POWER:
        _reject_unknown(obj, {"kind", "coeff", "exponent"}, where)
        return SequenceSpec.power(float(_require(obj, "coeff", where)),
                                  float(_require(obj, "exponent", where)))
    if kind == VON_MANGOLDT:
        _reject_unknown(obj, {"kind"}, where)
        return SequenceSpec.von_mangoldt_weights()
    if kind == EXAMPLE3:
        _reject_unknown(obj, {"kind", "eps"}, where)
        return SequenceSpec.example3(float(_require(obj, "eps", where)))
    if kind == INDICATOR:
        _reject_unknown(obj, {"kind", "modulus"}, where)
        return SequenceSpec.indicator(int(_require(obj, "modulus", where)))
    if kind == TABLE:
        _reject_unknown(obj, {"kind", "values"}, where)
        return SequenceSpec.table(_require(obj, "values", where))
    raise ParseError(f"unknown sequence kind {kind!r} in {where}")


def _profile_from_dict(obj: dict) -> AsymptoticProfile:
    _reject_unknown(obj, {"poles", "A0", "h0", "D_neg", "main_term_only"}, "profile")
    raw_poles = _require(obj, "poles", "profile")
    poles = []
    for entry in raw_poles:
        _reject_unknown(entry, {"rho", "residue"}, "profile.poles[]")
        poles.append((mpfr(str(_require(entry, "rho", "profile.poles[]"))),
                      mpfr(str(_require(entry, "residue", "profile.poles[]")))))
    prev = mpfr(0)
    for rho, res in poles:
        if not rho > prev:
            raise ValidationError("non-increasing poles in profile")
        if not res > 0:
            raise ValidationError("pole residues must be positive")
        prev = rho
    return AsymptoticProfile(
        poles=tuple(poles),
        A0=mpfr(str(obj.get("A0", 0))),
        h0=mpfr(str(obj.get("h0", 0))),
        delta_coeffs=tuple(mpfr(str(v)) for v in obj.get("D_neg", [])),
        main_term_only=bool(obj.get("main_term_only", False)),
    )


def model_from_dict(obj: dict, ctx: PrecisionContext | None = None) -> WeightedModel:
    ctx = ctx or DEFAULT_CONTEXT
    if not isinstance(obj, dict):
        raise ParseError("model document must be a JSON object")
    _reject_unknown(obj, {"name", "inner", "weights", "frequencies", "profile"},
                    "model")
    with working_precision(ctx):
        profile = None
        if obj.get("profile") is not None:
            profile = _profile_from_dict(obj["profile"])
        return WeightedModel(
            name=str(_require(obj, "name", "model")),
            inner=_inner_from_dict(_require(obj, "inner", "model")),
            weights=_sequence_from_dict(_require(obj, "weights", "model"), "weights"),
            frequencies=_sequence_from_dict(
                _require(obj, "frequencies", "model"), "frequencies"),
            profile=profile,
        )


def load_model(path: str, ctx: PrecisionContext | None = None) -> WeightedModel:
    """Load and validate a model file (strict JSON schema)."""
    if not os.path.exists(path):
        raise ParseError(f"model file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    return model_from_dict(obj, ctx)


def _mpfr_str(x, digits: int = 40) -> str:
    if x == 0:
        return "0"
    mant, exp, _ = x.digits(10, digits)
    sign = "-" if mant.startswith("-") else ""
    mant = mant.lstrip("-").rstrip("0") or "0"
    return f"{sign}0.{mant}e{exp}"


def _inner_to_dict(inner: InnerSeriesSpec) -> dict:
    if inner.kind == GEOMETRIC:
        return {"kind": GEOMETRIC}
    if inner.kind == BINOMIAL:
        return {"kind": BINOMIAL}
    if inner.kind == RATIO:
        return {"kind": RATIO, "p": inner.p}
    out = {"kind": EXPLICIT, "coeffs": list(inner.coeffs)}
    out["tail"] = "zero" if inner.tail == ZERO_TAIL else {"period": list(inner.tail)}
    return out


def _sequence_to_dict(seq: SequenceSpec) -> dict:
    if seq.kind == CONSTANT:
        return {"kind": CONSTANT, "value": seq.value}
    if seq.kind == POWER:
        return {"kind": POWER, "coeff": seq.coeff, "exponent": seq.exponent}
    if seq.kind == VON_MANGOLDT:
        return {"kind": VON_MANGOLDT}
    if seq.kind == EXAMPLE3:
        return {"kind": EXAMPLE3, "eps": seq.eps}
    if seq.kind == INDICATOR:
        return {"kind": INDICATOR, "modulus": seq.modulus}
    return {"kind": TABLE, "values": list(seq.values)}


def model_to_dict(model: WeightedModel) -> dict:
    out = {
        "name": model.name,
        "inner": _inner_to_dict(model.inner),
        "weights": _sequence_to_dict(model.weights),
        "frequencies": _sequence_to_dict(model.frequencies),
    }
    if model.profile is not None:
        prof = model.profile
        out["profile"] = {
            "poles": [{"rho": _mpfr_str(rho), "residue": _mpfr_str(res)}
                      for rho, res in prof.poles],
            "A0": _mpfr_str(prof.A0),
            "h0": _mpfr_str(prof.h0),
            "D_neg": [_mpfr_str(v) for v in prof.delta_coeffs],
            "main_term_only": prof.main_term_only,
        }
    return out


def save_model(model: WeightedModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2)
        fh.write("\n")
