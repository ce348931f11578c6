"""Residue expansion of the log generating function and coefficient
estimates.

Three independent evaluations of log f(e^{-delta}) are exposed: the
truncated log-coefficient sum, the per-factor sum, and (for models with a
profile) the rendered pole expansion

    sum_l h_l delta^{-rho_l} + h_0 - A_0 log(delta) + Delta(delta),

where A_0 is the residue of the coefficient Dirichlet series at 0.  The
coefficient estimate multiplies the tilted representation
c_n = e^{n delta} f(e^{-delta}) P(Z_n = n) out with the Gaussian local
value P ~ 1/sqrt(2 pi B_n^2); the pure variant substitutes the leading
moment asymptotics B_n^2 ~ h_r rho_r (rho_r + 1) delta^{-rho_r-2}, the
semi-exact variant keeps the exactly summed tilted variance so the two
error sources can be told apart.  Reports always state the variant.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
import numpy as np
from gmpy2 import mpfr

from . import series as series_mod
from .dirichlet import AsymptoticProfile, delta_remainder, zeta_real, zeta_prime_zero
from .errors import MissingProfile, OutOfRange, TruncationTooShallow
from .precision import DEFAULT_CONTEXT, PrecisionContext, working_precision
from .saddle import (
    _tail_bound,
    solve_khintchine,
    tilted_moments,
    truncation_depth,
)

ENUMERATION_CAP = 20_000

PURE = "pure"
SEMI_EXACT = "semi-exact"


@dataclass(frozen=True)
class GenFnEvaluation:
    """Direct vs residue evaluation of log f(e^{-delta}); the gap is
    recorded, never hidden."""

    delta: mpfr
    log_value_direct: mpfr
    log_value_residue: mpfr
    gap: mpfr
    L_used: int
    K_used: int


@dataclass(frozen=True)
class EnumerationReport:
    """Estimate of log c_n with its additive component breakdown:
    tilt n*delta, log generating function, Gaussian -log(2 pi B^2)/2."""

    n: int
    variant: str
    delta: mpfr
    comp_tilt: mpfr
    comp_log_gen_fn: mpfr
    comp_gaussian: mpfr
    log_cn_estimate: mpfr
    log_cn_exact: mpfr | None = None
    ratio: float | None = None
    delta_tail_bound: float | None = None


def log_gen_fn_direct(model, delta, K: int | None = None,
                      ctx: PrecisionContext | None = None) -> mpfr:
    """sum_{k<=K} Lambda_k e^{-k delta} with the tail certified below tol."""
    ctx = ctx or DEFAULT_CONTEXT
    if not float(delta) > 0:
        raise ValueError("delta must be positive")
    if K is None:
        K = truncation_depth(float(delta), ctx)
    lam = series_mod.lambda_from_model(model, K, ctx)
    with working_precision(ctx):
        d = mpfr(delta)
        r = gmpy2.exp(-d)
        p = mpfr(1)
        acc = mpfr(0)
        for k in range(1, K + 1):
            p *= r
            v = lam.values[k - 1]
            if v != 0:
                acc += v * p
        lam_abs = np.abs(lam.floats())
        tail = _tail_bound(lam_abs, K, float(delta)) / max(K, 1)
        if tail > ctx.tol * max(abs(float(acc)), 1.0):
            raise TruncationTooShallow(
                f"log-gen-fn tail {tail:.3e} above tol at K={K}")
        return acc


def log_gen_fn_factors(model, delta, K: int,
                       ctx: PrecisionContext | None = None) -> mpfr:
    """sum_{k<=K} b_k log S(a_k e^{-k delta}), the per-factor route; with
    K = n this is exactly the truncated generating function of the tilted
    ensemble."""
    ctx = ctx or DEFAULT_CONTEXT
    with working_precision(ctx):
        d = mpfr(delta)
        r = gmpy2.exp(-d)
        p = mpfr(1)
        acc = mpfr(0)
        for k in range(1, K + 1):
            p *= r
            b = model.weights(k)
            if b == 0:
                continue
            acc += b * model.inner.log_at(model.frequencies(k) * p)
        return acc


def log_gen_fn_residue(profile: AsymptoticProfile, delta, L: int | None = None,
                       ctx: PrecisionContext | None = None) -> mpfr:
    """Rendered pole expansion of log f(e^{-delta}) (see module docstring)."""
    ctx = ctx or DEFAULT_CONTEXT
    if not float(delta) > 0:
        raise ValueError("delta must be positive")
    if L is None:
        L = min(profile.L, 8)
    with working_precision(ctx):
        d = mpfr(delta)
        acc = profile.h0 - profile.A0 * gmpy2.log(d)
        for l in range(1, profile.r + 1):
            rho, _ = profile.poles[l - 1]
            acc += profile.h(l) * d ** (-rho)
        acc += delta_remainder(profile, d, L, ctx)
        return acc


def evaluate_gen_fn(model, delta, ctx: PrecisionContext | None = None,
                    L: int | None = None) -> GenFnEvaluation:
    """Both routes side by side, gap recorded."""
    ctx = ctx or DEFAULT_CONTEXT
    if model.profile is None:
        raise MissingProfile(f"model {model.name!r} carries no profile")
    K = truncation_depth(float(delta), ctx)
    direct = log_gen_fn_direct(model, delta, K, ctx)
    L_used = min(model.profile.L, 8) if L is None else L
    resid = log_gen_fn_residue(model.profile, delta, L_used, ctx)
    with working_precision(ctx):
        return GenFnEvaluation(delta=mpfr(delta), log_value_direct=direct,
                               log_value_residue=resid, gap=direct - resid,
                               L_used=L_used, K_used=K)


def hardy_expansion(delta, ctx: PrecisionContext | None = None) -> mpfr:
    """zeta(2)/delta + log(delta)/2 - log(2 pi)/2 - delta/24, the classical
    unit-weight geometric-kernel expansion; exact up to the
    exp(-(2 pi)^2/delta) residual reported by hardy_error_bound."""
    ctx = ctx or DEFAULT_CONTEXT
    if not float(delta) > 0:
        raise ValueError("delta must be positive")
    with working_precision(ctx):
        d = mpfr(delta)
        return (zeta_real(2, ctx) / d + gmpy2.log(d) / 2
                + zeta_prime_zero(ctx) - d / 24)


def hardy_error_bound(delta, ctx: PrecisionContext | None = None) -> mpfr:
    """exp(-(2 pi)^2 / delta)."""
    ctx = ctx or DEFAULT_CONTEXT
    with working_precision(ctx):
        d = mpfr(delta)
        return gmpy2.exp(-(2 * gmpy2.const_pi()) ** 2 / d)


def _log_exact_coefficient(model, n: int, ctx: PrecisionContext) -> mpfr:
    if n > ENUMERATION_CAP:
        raise OutOfRange(f"n={n} exceeds the enumeration cap {ENUMERATION_CAP}")
    coeffs = series_mod.enumerate_exact(model, n, ctx)
    c = coeffs[n]
    with working_precision(ctx):
        if c < 0:
            raise OutOfRange(f"c_{n} < 0; no log-domain comparison possible")
        return gmpy2.log(c) if c > 0 else mpfr("-inf")


def estimate_cn(model, n: int, variant: str = SEMI_EXACT,
                ctx: PrecisionContext | None = None, compare: bool = False,
                L: int = 8) -> EnumerationReport:
    """Asymptotic estimate of log c_n, optionally against the exact value.

    pure: residue expansion + leading-order variance (tests the corollary
    formula verbatim, needs a full profile).  semi-exact: directly summed
    log f and exactly summed tilted variance (isolates the local-limit
    error from the residue-expansion error).
    """
    ctx = ctx or DEFAULT_CONTEXT
    if variant not in (PURE, SEMI_EXACT):
        raise ValueError(f"unknown variant {variant!r}")
    sol = solve_khintchine(model, n, ctx)
    delta = sol.delta
    tail_bound = None
    with working_precision(ctx):
        comp_tilt = n * delta
        two_pi = 2 * gmpy2.const_pi()
        if variant == PURE:
            prof = model.profile
            if prof is None or prof.main_term_only:
                raise MissingProfile(
                    f"pure estimate needs a full profile; model {model.name!r} "
                    + ("carries a main-term-only profile" if prof else "has none"))
            L_used = min(L, prof.L)
            comp_gen = log_gen_fn_residue(prof, delta, L_used, ctx)
            rho = prof.rho_r
            k2 = prof.h_r * rho * (rho + 1)
            b2 = k2 * delta ** (-rho - 2)
            if prof.L > L_used:
                nxt = abs(float(prof.delta_coeffs[L_used]))
                tail_bound = nxt * float(delta) ** (L_used + 1) \
                    / float(gmpy2.fac(L_used + 1))
        else:
            comp_gen = log_gen_fn_direct(model, delta, None, ctx)
            b2 = tilted_moments(model, delta, None, ctx).variance
        comp_gauss = -gmpy2.log(two_pi * b2) / 2
        log_est = comp_tilt + comp_gen + comp_gauss
    report = EnumerationReport(
        n=n, variant=variant, delta=delta, comp_tilt=comp_tilt,
        comp_log_gen_fn=comp_gen, comp_gaussian=comp_gauss,
        log_cn_estimate=log_est, delta_tail_bound=tail_bound)
    if compare:
        log_exact = _log_exact_coefficient(model, n, ctx)
        with working_precision(ctx):
            diff = float(log_est - log_exact)
        ratio = float("inf") if diff > 700 else float(gmpy2.exp(mpfr(diff)))
        report = EnumerationReport(
            n=n, variant=variant, delta=delta, comp_tilt=comp_tilt,
            comp_log_gen_fn=comp_gen, comp_gaussian=comp_gauss,
            log_cn_estimate=log_est, log_cn_exact=log_exact, ratio=ratio,
            delta_tail_bound=tail_bound)
    return report
