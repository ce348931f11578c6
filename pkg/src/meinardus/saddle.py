"""Tilt selection: solve sum_k k Lambda_k e^{-k delta} = n for delta and
compute moments of the tilted ensemble.

The left-hand side decreases from +infinity to 0 on delta > 0, so a sign
bracket always exists; the solver brackets around the closed-form initial
guess (rho_r h_r)^{1/(rho_r+1)} n^{-1/(rho_r+1)} when the model carries a
profile (geometric scan otherwise), bisects in float64, then polishes
with MPFR Newton steps using the analytic derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2
import numpy as np
from gmpy2 import mpfr

from . import series
from .dirichlet import AsymptoticProfile
from .errors import NoPositiveMass, NotConvergent, TruncationTooShallow
from .precision import DEFAULT_CONTEXT, PrecisionContext, working_precision

_K_CAP = 1_500_000
_TRUNCATION_C = 2.0           # K = ceil(C * log(1/tol) / delta)
_RESIDUAL_REL = 1e-9          # solver contract |residual| <= 1e-9 * n
_MIN_CERTIFIABLE_KDELTA = 8.0

BISECTION = "bisection"
NEWTON_POLISHED = "newton-polished"


@dataclass(frozen=True)
class SaddleSolution:
    n: int
    delta: mpfr
    residual: mpfr
    iterations: int
    K: int
    method: str


@dataclass(frozen=True)
class TiltedMoments:
    """First three delta-derivatives of the tilted log generating function:
    mean = sum k Lam e^{-k d}, variance = sum k^2 Lam e^{-k d},
    third = sum k^3 Lam e^{-k d}."""

    mean: mpfr
    variance: mpfr
    third: mpfr
    delta: mpfr
    K: int


def truncation_depth(delta: float, ctx: PrecisionContext) -> int:
    """K = ceil(C log(1/tol) / delta), capped; exponential decay swamps the
    polynomial growth of the coefficients well before this depth."""
    k = int(math.ceil(_TRUNCATION_C * math.log(1.0 / ctx.tol) / float(delta))) + 1
    return min(max(k, 8), _K_CAP)


def _tail_bound(lam_abs: np.ndarray, K: int, delta: float) -> float:
    """Bound on sum_{k>K} k |Lambda_k| e^{-k delta} assuming quadratic
    coefficient growth calibrated on the trailing window."""
    lo = max(1, K // 2)
    window = lam_abs[lo: K + 1]
    ks = np.arange(lo, K + 1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = window / ks ** 2
    c_hat = float(np.max(ratios)) if window.size else 0.0
    if c_hat == 0.0:
        c_hat = float(np.max(lam_abs / np.maximum(
            np.arange(len(lam_abs), dtype=float), 1.0) ** 2))
    kd = K * delta
    if kd < _MIN_CERTIFIABLE_KDELTA:
        return math.inf
    return 3.5 * c_hat * K ** 3 * math.exp(-kd) / min(delta, 1.0)


def khintchine_lhs(lam: series.LambdaSequence, delta, K: int,
                   ctx: PrecisionContext | None = None,
                   n: int | None = None) -> mpfr:
    """sum_{k=1}^{K} k Lambda_k e^{-k delta}.

    When a target n is supplied, the dropped tail is certified below
    tol * n (TruncationTooShallow otherwise); without a target the plain
    truncated sum is returned.
    """
    ctx = ctx or DEFAULT_CONTEXT
    if K < 1:
        raise ValueError("K must be positive")
    if K > lam.degree:
        raise ValueError(f"Lambda known to degree {lam.degree}, K={K} requested")
    if not float(delta) > 0:
        raise ValueError("delta must be positive")
    with working_precision(ctx):
        d = mpfr(delta)
        r = gmpy2.exp(-d)
        p = mpfr(1)
        acc = mpfr(0)
        vals = lam.values
        for k in range(1, K + 1):
            p *= r
            v = vals[k - 1]
            if v != 0:
                acc += k * v * p
        if n is not None:
            lam_abs = np.zeros(K + 1)
            lam_abs[1:] = [abs(float(v)) for v in vals[:K]]
            tail = _tail_bound(lam_abs, K, float(delta))
            if tail > ctx.tol * max(float(n), 1.0):
                raise TruncationTooShallow(
                    f"tail bound {tail:.3e} exceeds tol*n = {ctx.tol * n:.3e} "
                    f"at K={K}, delta={float(delta):.3e}")
        return acc


def asymptotic_delta(profile: AsymptoticProfile, n: int,
                     ctx: PrecisionContext | None = None) -> mpfr:
    """Leading-order tilt (rho_r h_r)^{1/(rho_r+1)} n^{-1/(rho_r+1)}."""
    ctx = ctx or DEFAULT_CONTEXT
    with working_precision(ctx):
        rho = profile.rho_r
        h = profile.h_r
        e = 1 / (rho + 1)
        return (rho * h) ** e * mpfr(n) ** (-e)


def _lambda_floats(model, K: int, ctx: PrecisionContext) -> np.ndarray:
    """Float64 mirror of the divisor sieve (index 0 unused)."""
    xi = [float(x) for x in model.inner.log_coeffs(K, ctx).values]
    lam = np.zeros(K + 1)
    for j in range(1, K + 1):
        bj = model.weights.value_float(j)
        if bj == 0.0:
            continue
        aj = model.frequencies.value_float(j)
        if aj == 1.0:
            for i in range(1, K // j + 1):
                lam[i * j] += bj * xi[i - 1]
        else:
            apow = 1.0
            for i in range(1, K // j + 1):
                apow *= aj
                lam[i * j] += bj * apow * xi[i - 1]
    return lam


def _lhs_float(klam: np.ndarray, karr: np.ndarray, delta: float) -> float:
    with np.errstate(under="ignore"):
        return float(np.dot(klam, np.exp(-delta * karr)))


def _scan_initial(model, n: int, ctx: PrecisionContext) -> float:
    """Geometric scan for a sign change when no profile is available."""
    delta = 64.0
    cache_k = 0
    lam = None
    karr = None
    for _ in range(200):
        K = truncation_depth(delta, ctx)
        if K > cache_k:
            lam = _lambda_floats(model, K, ctx)
            karr = np.arange(K + 1, dtype=float)
            cache_k = K
        val = _lhs_float((lam * karr)[: K + 1], karr[: K + 1], delta)
        if val >= n:
            return delta
        if K >= _K_CAP and delta < 1e-12:
            raise TruncationTooShallow(
                f"no sign change found above delta = {delta:.3e} "
                f"within the K = {_K_CAP} truncation cap")
        delta *= 0.5
    raise NotConvergent("geometric scan did not bracket the tilt equation")


def solve_khintchine(model, n: int,
                     ctx: PrecisionContext | None = None) -> SaddleSolution:
    """Tilt delta_n with |sum k Lambda_k e^{-k delta} - n| <= 1e-9 n."""
    ctx = ctx or DEFAULT_CONTEXT
    if n < 1:
        raise ValueError("n must be positive")
    if not model.has_mass():
        raise NoPositiveMass(f"model {model.name!r} has identically zero weights")

    if model.profile is not None:
        delta0 = float(asymptotic_delta(model.profile, n, ctx))
    else:
        delta0 = _scan_initial(model, n, ctx)

    K = truncation_depth(delta0 / 2.0, ctx)
    lam = series.lambda_from_model(model, K, ctx)
    if not any(v > 0 for v in lam.values):
        raise NoPositiveMass("all log-coefficients vanish through the "
                             f"truncation depth K={K}")
    lam_f = lam.floats()
    karr = np.arange(K + 1, dtype=float)
    klam = lam_f * karr

    iterations = 0
    lo, hi = delta0 / 8.0, delta0 * 8.0
    for _ in range(40):
        if lo < delta0 / 16.0:
            # initial guess was far off: re-sieve at the new scale
            K = truncation_depth(lo / 2.0, ctx)
            lam = series.lambda_from_model(model, K, ctx)
            lam_f = lam.floats()
            karr = np.arange(K + 1, dtype=float)
            klam = lam_f * karr
        if _lhs_float(klam, karr, lo) >= n:
            break
        hi = lo
        lo /= 8.0
        iterations += 1
    for _ in range(40):
        if _lhs_float(klam, karr, hi) <= n:
            break
        lo = hi
        hi *= 8.0
        iterations += 1

    # float64 bisection to a narrow bracket
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        iterations += 1
        if _lhs_float(klam, karr, mid) >= n:
            lo = mid
        else:
            hi = mid
    delta_f = 0.5 * (lo + hi)

    method = NEWTON_POLISHED
    with working_precision(ctx):
        target = mpfr(_RESIDUAL_REL) * n / 8
        vals = lam.values
        d = mpfr(delta_f)

        def sums(dd):
            r = gmpy2.exp(-dd)
            p = mpfr(1)
            s1 = mpfr(0)
            s2 = mpfr(0)
            for k in range(1, K + 1):
                p *= r
                v = vals[k - 1]
                if v != 0:
                    t = k * v * p
                    s1 += t
                    s2 += k * t
            return s1, s2

        ok = False
        for _ in range(30):
            s1, s2 = sums(d)
            resid = s1 - n
            iterations += 1
            if abs(resid) <= target:
                ok = True
                break
            step = resid / s2
            nd = d + step
            if not (nd > 0 and gmpy2.is_finite(nd)):
                break
            d = nd
        if not ok:
            # pure-bisection fallback on an MPFR bracket
            method = BISECTION
            blo, bhi = mpfr(lo) / 2, mpfr(hi) * 2
            for _ in range(ctx.bits + 64):
                mid = (blo + bhi) / 2
                s1, _ = sums(mid)
                resid = s1 - n
                iterations += 1
                if abs(resid) <= target:
                    d = mid
                    ok = True
                    break
                if resid > 0:
                    blo = mid
                else:
                    bhi = mid
            if not ok:
                raise NotConvergent(
                    f"saddle residual did not reach {float(target):.3e}")
        final = khintchine_lhs(lam, d, K, ctx, n=n)
        return SaddleSolution(n=n, delta=d, residual=final - n,
                              iterations=iterations, K=K, method=method)


def tilted_moments(model, delta, K: int | None = None,
                   ctx: PrecisionContext | None = None) -> TiltedMoments:
    """Moments of the tilted ensemble along the log-coefficient route."""
    ctx = ctx or DEFAULT_CONTEXT
    if not float(delta) > 0:
        raise ValueError("delta must be positive")
    if K is None:
        K = truncation_depth(float(delta), ctx)
    lam = series.lambda_from_model(model, K, ctx)
    with working_precision(ctx):
        d = mpfr(delta)
        r = gmpy2.exp(-d)
        p = mpfr(1)
        s1 = mpfr(0)
        s2 = mpfr(0)
        s3 = mpfr(0)
        for k in range(1, K + 1):
            p *= r
            v = lam.values[k - 1]
            if v != 0:
                t = k * v * p
                s1 += t
                t *= k
                s2 += t
                s3 += k * t
        lam_abs = np.abs(lam.floats())
        tail = _tail_bound(lam_abs, K, float(delta))
        # third-moment tail carries two extra powers of k
        if tail * K * K > ctx.tol * max(abs(float(s3)), 1.0):
            raise TruncationTooShallow(
                f"moment tail not below tol at K={K}, delta={float(delta):.3e}")
        return TiltedMoments(mean=s1, variance=s2, third=s3, delta=d, K=K)


def moments_by_factors(model, delta, n: int,
                       ctx: PrecisionContext | None = None) -> TiltedMoments:
    """Moments summed per independent factor Y_k, k <= n, through the
    closed kernel derivatives; the probabilistic cross-check of
    tilted_moments (exact for the n-truncated ensemble)."""
    ctx = ctx or DEFAULT_CONTEXT
    with working_precision(ctx):
        d = mpfr(delta)
        r = gmpy2.exp(-d)
        p = mpfr(1)
        s1 = mpfr(0)
        s2 = mpfr(0)
        s3 = mpfr(0)
        for k in range(1, n + 1):
            p *= r
            b = model.weights(k)
            if b == 0:
                continue
            w = model.frequencies(k) * p
            q1, q2, q3 = model.inner.dlog_at(w, ctx)
            s1 += b * k * q1
            s2 += b * k * k * q2
            s3 += b * k * k * k * q3
        return TiltedMoments(mean=s1, variance=s2, third=s3, delta=d, K=n)
