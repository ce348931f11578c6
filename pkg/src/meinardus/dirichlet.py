"""Dirichlet-series machinery.

Special values feeding the residue expansion of an exponential model:
Bernoulli numbers, the Riemann zeta function on the real line (three
routes: Euler-Maclaurin, values at nonpositive integers via Bernoulli
numbers, and the functional equation), analytic profiles (pole/residue
lists, the residue at 0, and values D(-l) at negative integers) for the
built-in models, numeric evaluation of the coefficient Dirichlet series by
direct double summation, and the Euler-Maclaurin continuation of the
smooth weight series used by the log-damped example model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import numpy as np
from gmpy2 import mpfr

from .errors import (
    MissingDeltaCoeffs,
    NotConvergent,
    NumericError,
    PoleAtOne,
    UnsupportedForm,
)
from .precision import DEFAULT_CONTEXT, PrecisionContext, working_precision
from . import quadrature

# ----------------------------------------------------------------------
# Bernoulli numbers
# ----------------------------------------------------------------------

_BERNOULLI: list[Fraction] = [Fraction(1)]


def _extend_bernoulli(upto: int) -> None:
    # sum_{j=0}^{m} C(m+1, j) B_j = 0, convention B_1 = -1/2
    while len(_BERNOULLI) <= upto:
        m = len(_BERNOULLI)
        acc = Fraction(0)
        for j, bj in enumerate(_BERNOULLI):
            acc += math.comb(m + 1, j) * bj
        _BERNOULLI.append(-acc / (m + 1))


def bernoulli(m: int) -> Fraction:
    """B_m as an exact rational (B_1 = -1/2 convention)."""
    if m < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    if m >= len(_BERNOULLI):
        _extend_bernoulli(m)
    return _BERNOULLI[m]


def bernoulli_mpfr(m: int) -> mpfr:
    b = bernoulli(m)
    return mpfr(b.numerator) / mpfr(b.denominator)


# cache is write-once per index and filled eagerly at import
_extend_bernoulli(64)


# ----------------------------------------------------------------------
# Riemann zeta on the real line
# ----------------------------------------------------------------------

_ZETA_CACHE: dict[tuple[float, int], mpfr] = {}


def zeta_euler_maclaurin(s, ctx: PrecisionContext | None = None) -> mpfr:
    """zeta(s) by Euler-Maclaurin summation.

    Continues left of s = 1 as long as enough Bernoulli correction terms
    are kept; with the cache extended on demand this covers the range of
    real s used anywhere in this package (|s| <= ~60).
    """
    ctx = ctx or DEFAULT_CONTEXT
    with working_precision(ctx.bits + 16):
        s = mpfr(s)
        if s == 1:
            raise PoleAtOne("zeta has a simple pole at s = 1")
        M = max(64, ctx.bits, 2 * int(abs(s)) + 16)
        acc = mpfr(0)
        for k in range(1, M + 1):
            acc += mpfr(k) ** (-s)
        acc += mpfr(M) ** (1 - s) / (s - 1)
        acc -= mpfr(M) ** (-s) / 2
        target = mpfr(2) ** (-(ctx.bits + 8))
        scale = max(abs(acc), mpfr(1))
        rising = s                      # s(s+1)...(s+2j-2), here j = 1
        mpow = mpfr(M) ** (-s - 1)      # M^(-s-2j+1), here j = 1
        minv2 = mpfr(M) ** (-2)
        prev = None
        for j in range(1, 200):
            term = bernoulli_mpfr(2 * j) / mpfr(gmpy2.fac(2 * j)) * rising * mpow
            acc += term
            mag = abs(term)
            if mag < target * scale:
                break
            if prev is not None and mag > prev:
                raise NumericError(
                    f"Euler-Maclaurin tail diverging for zeta({float(s)})")
            prev = mag
            rising *= (s + 2 * j - 1) * (s + 2 * j)
            mpow *= minv2
        else:
            raise NumericError(f"zeta({float(s)}): correction terms exhausted")
    with working_precision(ctx):
        return mpfr(acc)


def zeta_functional_equation(s, ctx: PrecisionContext | None = None) -> mpfr:
    """zeta(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1-s) zeta(1-s)."""
    ctx = ctx or DEFAULT_CONTEXT
    inner = PrecisionContext(ctx.bits + 16, ctx.tol)
    with working_precision(inner):
        s = mpfr(s)
        if s == 1:
            raise PoleAtOne("zeta has a simple pole at s = 1")
        pi = gmpy2.const_pi()
        refl = zeta_euler_maclaurin(1 - s, inner)
        val = (mpfr(2) ** s) * pi ** (s - 1) * gmpy2.sin(pi * s / 2) \
            * gmpy2.gamma(1 - s) * refl
    with working_precision(ctx):
        return mpfr(val)


def zeta_real(s, ctx: PrecisionContext | None = None) -> mpfr:
    """zeta at real s != 1.

    Dispatch: nonpositive integers through Bernoulli numbers, s > 0
    through Euler-Maclaurin (the reflection of (0,1) lands back in (0,1),
    so that strip is summed directly), negative non-integers through the
    functional equation.
    """
    ctx = ctx or DEFAULT_CONTEXT
    sf = float(s)
    key = (sf, ctx.bits)
    with working_precision(ctx):
        s = mpfr(s)
        cacheable = mpfr(sf) == s        # exact at >= 64 bits
        if cacheable:
            cached = _ZETA_CACHE.get(key)
            if cached is not None:
                return cached
        if s == 1:
            raise PoleAtOne("zeta has a simple pole at s = 1")
        if s <= 0 and s == gmpy2.floor(s):
            ell = int(-s)
            # zeta(-l) = (-1)^l B_{l+1} / (l+1)
            val = (-1) ** ell * bernoulli_mpfr(ell + 1) / (ell + 1)
        elif s > 0:
            val = zeta_euler_maclaurin(s, ctx)
        else:
            val = zeta_functional_equation(s, ctx)
    if cacheable:
        _ZETA_CACHE[key] = val
    return val


def zeta_prime_zero(ctx: PrecisionContext | None = None) -> mpfr:
    """zeta'(0) = -log(2 pi) / 2."""
    ctx = ctx or DEFAULT_CONTEXT
    with working_precision(ctx):
        return -gmpy2.log(2 * gmpy2.const_pi()) / 2


# ----------------------------------------------------------------------
# Analytic profiles
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticProfile:
    """Pole/residue data of the coefficient Dirichlet series D(s).

    ``poles`` holds (rho_l, A_l) with 0 < rho_1 < ... < rho_r and
    A_l > 0.  ``A0`` is the residue of D at s = 0 (0 when D is regular
    there), ``h0`` the constant term of the expansion, and
    ``delta_coeffs`` the values D(-1) .. D(-L) feeding the remainder
    series.  The rendered expansion is

        log f(e^{-delta}) = sum_l h_l delta^{-rho_l} + h0
                            - A0 log(delta) + Delta(delta)

    with h_l = A_l Gamma(rho_l).  ``main_term_only`` marks profiles that
    carry a trustworthy rightmost pole but no constant/remainder data.
    """

    poles: tuple[tuple[mpfr, mpfr], ...]
    A0: mpfr
    h0: mpfr
    delta_coeffs: tuple[mpfr, ...] = ()
    main_term_only: bool = False

    def __post_init__(self):
        if not self.poles:
            raise ValueError("profile needs at least one pole")
        prev = mpfr(0)
        for rho, res in self.poles:
            if not rho > prev:
                raise ValueError("poles must be strictly increasing and positive")
            if not res > 0:
                raise ValueError("pole residues must be positive")
            prev = rho

    @property
    def r(self) -> int:
        return len(self.poles)

    @property
    def rho_r(self) -> mpfr:
        return self.poles[-1][0]

    @property
    def L(self) -> int:
        return len(self.delta_coeffs)

    def h(self, l: int) -> mpfr:
        """h_l = A_l Gamma(rho_l) for l = 1..r; h_0 for l = 0."""
        if l == 0:
            return self.h0
        rho, res = self.poles[l - 1]
        return res * gmpy2.gamma(rho)

    @property
    def h_r(self) -> mpfr:
        return self.h(self.r)


@dataclass(frozen=True)
class DirichletValue:
    s: float
    value: mpfr
    abs_error: float


def delta_remainder(profile: AsymptoticProfile, tau, L: int,
                    ctx: PrecisionContext | None = None):
    """Remainder series sum_{l=1}^{L} (-1)^l D(-l) tau^l / l!."""
    ctx = ctx or DEFAULT_CONTEXT
    if L < 0:
        raise ValueError("L must be nonnegative")
    if L > profile.L:
        raise MissingDeltaCoeffs(
            f"profile carries {profile.L} remainder coefficients, {L} requested")
    with working_precision(ctx):
        if isinstance(tau, complex):
            tau = gmpy2.mpc(tau)
        elif not isinstance(tau, gmpy2.mpc):
            tau = mpfr(tau)
        acc = tau * 0
        power = tau * 0 + 1
        fact = mpfr(1)
        for l in range(1, L + 1):
            power = power * tau
            fact = fact * l
            acc += (-1) ** l * profile.delta_coeffs[l - 1] * power / fact
        return acc


def _zeros(n: int) -> tuple[mpfr, ...]:
    return tuple(mpfr(0) for _ in range(n))


def profile_partitions(ctx: PrecisionContext | None = None) -> AsymptoticProfile:
    """D(s) = zeta(s) zeta(s+1): single pole at 1 with residue zeta(2),
    residue at 0 equal to zeta(0), constant term zeta'(0), and
    D(-1) = zeta(-1) zeta(0) = 1/24 the only surviving remainder value."""
    ctx = ctx or DEFAULT_CONTEXT
    with working_precision(ctx):
        z2 = zeta_real(2, ctx)
        a0 = zeta_real(0, ctx)                # -1/2
        d1 = zeta_real(-1, ctx) * zeta_real(0, ctx)   # 1/24
        return AsymptoticProfile(
            poles=((mpfr(1), z2),),
            A0=a0,
            h0=zeta_prime_zero(ctx),
            delta_coeffs=(d1,) + _zeros(7),
        )


def profile_distinct(ctx: PrecisionContext | None = None) -> AsymptoticProfile:
    """D(s) = zeta(s) (1 - 2^{-s}) zeta(s+1): the (1 - 2^{-s}) zero cancels
    the pole of zeta(s+1) at 0, leaving residue 1/2 * zeta(2) at s = 1,
    no pole at 0, constant term zeta(0) log 2 and D(-1) = -1/24."""
    ctx = ctx or DEFAULT_CONTEXT
    with working_precision(ctx):
        z2 = zeta_real(2, ctx)
        log2 = gmpy2.log(mpfr(2))
        d1 = zeta_real(-1, ctx) * (1 - mpfr(2)) * zeta_real(0, ctx)   # -1/24
        return AsymptoticProfile(
            poles=((mpfr(1), z2 / 2),),
            A0=mpfr(0),
            h0=zeta_real(0, ctx) * log2,      # -log(2)/2
            delta_coeffs=(d1,) + _zeros(7),
        )


def profile_q4_indicator(ctx: PrecisionContext | None = None) -> AsymptoticProfile:
    """D(s) = 4^{-s} zeta(s) zeta(s+1) for unit weights supported on 4Z."""
    ctx = ctx or DEFAULT_CONTEXT
    with working_precision(ctx):
        z2 = zeta_real(2, ctx)
        log4 = gmpy2.log(mpfr(4))
        d1 = 4 * zeta_real(-1, ctx) * zeta_real(0, ctx)   # 1/6
        return AsymptoticProfile(
            poles=((mpfr(1), z2 / 4),),
            A0=zeta_real(0, ctx),
            h0=zeta_prime_zero(ctx) - zeta_real(0, ctx) * log4,
            delta_coeffs=(d1,) + _zeros(7),
        )


def profile_prime_powers(ctx: PrecisionContext | None = None) -> AsymptoticProfile:
    """Main term only: D(s) = zeta(s+1) (-zeta'/zeta)(s) has its rightmost
    pole at 1 with residue zeta(2); the continuation puts poles at every
    zeta zero, so no constant/remainder data is carried."""
    ctx = ctx or DEFAULT_CONTEXT
    with working_precision(ctx):
        z2 = zeta_real(2, ctx)
        return AsymptoticProfile(
            poles=((mpfr(1), z2),),
            A0=mpfr(0),
            h0=mpfr(0),
            delta_coeffs=(),
            main_term_only=True,
        )


# ----------------------------------------------------------------------
# Direct evaluation of D(s)
# ----------------------------------------------------------------------

def eval_D_direct(model, s, K: int, ctx: PrecisionContext | None = None) -> DirichletValue:
    """Truncated double sum sum_{k,j<=K} b_k xi_j a_k^j (jk)^{-s}.

    Requires s inside the convergence half-plane; when the model declares
    a profile the rightmost pole is enforced.  The reported abs_error is a
    Richardson-style estimate: twice the difference between the K and K/2
    truncations.
    """
    ctx = ctx or DEFAULT_CONTEXT
    if K < 2:
        raise ValueError("K must be at least 2")
    sf = float(s)
    if model.profile is not None and sf <= float(model.profile.rho_r):
        raise NotConvergent(
            f"s = {sf} is not to the right of the declared pole "
            f"rho_r = {float(model.profile.rho_r)}")
    with working_precision(ctx):
        s = mpfr(s)
        xi = model.inner.log_coeffs(K, ctx).values
        jpow = [mpfr(0)] * (K + 1)
        for j in range(1, K + 1):
            jpow[j] = mpfr(j) ** (-s)
        const_freq = model.frequencies.is_constant_one()
        inner_full = None
        if const_freq:
            inner_full = [mpfr(0)] * (K + 1)
            acc = mpfr(0)
            for j in range(1, K + 1):
                acc += xi[j - 1] * jpow[j]
                inner_full[j] = acc

        def partial(kmax: int) -> mpfr:
            total = mpfr(0)
            for k in range(1, kmax + 1):
                bk = model.weights(k)
                if bk == 0:
                    continue
                if const_freq:
                    inner = inner_full[kmax]
                else:
                    ak = model.frequencies(k)
                    inner = mpfr(0)
                    apow = mpfr(1)
                    for j in range(1, kmax + 1):
                        apow *= ak
                        if xi[j - 1] != 0:
                            inner += xi[j - 1] * apow * jpow[j]
                total += bk * jpow[k] * inner
            return total

        half = partial(K // 2)
        full = partial(K)
        err = 2.0 * abs(float(full - half))
        return DirichletValue(s=sf, value=full, abs_error=err)


# ----------------------------------------------------------------------
# Euler-Maclaurin continuation for the smooth weight series
# ----------------------------------------------------------------------

def _q_integral_direct(s: float, eps: float) -> tuple[float, float]:
    """Q(s) = int_2^inf x^{-s-1} log^{-eps} x dx for s > 0, via x = e^t."""

    def g(t):
        return np.exp(-s * t) * t ** (-eps)

    upper = (45.0 + 12.0) / s + 5.0
    val, err = quadrature.adaptive(g, math.log(2.0), upper, abs_tol=1e-15)
    # tail beyond `upper` bounded by a pure exponential
    tail = math.exp(-s * upper) * upper ** (-eps) / s
    return val + tail, err + tail


def _q_small_s(s: float, eps: float) -> tuple[float, float]:
    """Q(s) for small positive s through the closed form
    Q(s) = s^{eps-1} (C - log^{1-eps}(2) * int_0^s 2^{-u} u^{-eps} du),
    the integrating-factor solution of (sQ)' = eps Q - 2^{-s} log^{1-eps} 2
    with C calibrated against the direct integral at s = 1/2."""
    onem = 1.0 - eps
    log2 = math.log(2.0)

    def kernel_integral(upper: float) -> tuple[float, float]:
        # substitute u = v^{1/(1-eps)} to remove the endpoint singularity
        if upper <= 0.0:
            return 0.0, 0.0

        def g(v):
            u = v ** (1.0 / onem)
            return np.exp(-u * log2) / onem

        return quadrature.adaptive(g, 0.0, upper ** onem, abs_tol=1e-15)

    s0 = 0.5
    q0, e0 = _q_integral_direct(s0, eps)
    i0, ei0 = kernel_integral(s0)
    c_const = s0 ** onem * q0 + log2 ** onem * i0
    i_s, ei_s = kernel_integral(s)
    val = s ** (eps - 1.0) * (c_const - log2 ** onem * i_s)
    err = s ** (eps - 1.0) * (e0 + ei0 + ei_s) + abs(val) * 1e-13
    return val, err


def euler_maclaurin_Db(weights, s, terms: int = 20000,
                       ctx: PrecisionContext | None = None) -> DirichletValue:
    """Euler-Maclaurin value of the smooth weight series
    sum_{k>=2} k^{-s-1} log^{-eps} k (the bump-free part of the log-damped
    example weights): integral term + boundary term + sawtooth remainder,
    each evaluated numerically.

    Supported for real s > 0; the continuation below 0 involves the
    branch factor s^{eps-1}, so the analysis at 0 is exposed through the
    s -> 0+ limit rather than evaluation at negative arguments.
    """
    if getattr(weights, "kind", None) != "example3":
        raise UnsupportedForm(
            "Euler-Maclaurin evaluation needs the smooth log-damped weight form")
    sf = float(s)
    eps = weights.eps
    if sf <= 0.0:
        raise NotConvergent(
            "smooth-series continuation is evaluated for s > 0 "
            "(use the s -> 0+ limit for the residue analysis)")

    def f(x):
        return x ** (-sf - 1.0) * np.log(x) ** (-eps)

    if sf >= 0.25:
        q_val, q_err = _q_integral_direct(sf, eps)
    else:
        q_val, q_err = _q_small_s(sf, eps)

    boundary = float(f(np.array([2.0]))[0]) / 2.0

    # sawtooth remainder int_2^M f'(x)(x - [x] - 1/2) dx, summed per unit
    # interval through the parts form (f(m) + f(m+1))/2 - int_m^{m+1} f;
    # the early high-curvature intervals get adaptive refinement
    m_top = max(64, int(terms))
    rem = 0.0
    rem_err = 0.0
    fvals = f(np.arange(2.0, m_top + 1.0))
    for m in range(2, m_top):
        if m < 64:
            seg, err = quadrature.adaptive(f, float(m), float(m + 1),
                                           abs_tol=1e-16, rel_tol=1e-14)
        else:
            seg, err = quadrature.gk15(f, float(m), float(m + 1))
        rem += 0.5 * float(fvals[m - 2] + fvals[m - 1]) - seg
        rem_err += err
    f_top = float(fvals[-1])
    tail = 2.0 * f_top * (sf + 2.0) / m_top
    rem_err += abs(tail)

    value = q_val + boundary + rem
    ctx = ctx or DEFAULT_CONTEXT
    with working_precision(ctx):
        return DirichletValue(s=sf, value=mpfr(value),
                              abs_error=q_err + rem_err + abs(value) * 1e-12)
