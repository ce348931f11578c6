"""Formal power-series kernels.

Coefficients live in MPFR.  The three workhorses: the log recurrence
j xi_j = j d_j - sum_{m<j} m xi_m d_{j-m}, the exp recurrence
n c_n = sum_k k Lambda_k c_{n-k}, and the divisor sieve assembling
Lambda_m = sum_{j | m} b_j a_j^{m/j} xi_{m/j} in O(N log N) divisor-pair
visits.  Exact enumeration composes sieve and exp; an independent
per-factor product path cross-checks it.

Roundoff is tracked by a float64 shadow of the recurrences: each
coefficient carries a first-order absolute error bound, and a result with
fewer than 10 significant bits raises PrecisionExhausted (enumeration
retries once at doubled mantissa).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpfr

from .errors import NonUnitConstantTerm, PrecisionExhausted
from .precision import DEFAULT_CONTEXT, PrecisionContext, working_precision

_MIN_SIGNIFICANT_BITS = 10
_RESCALE_LIMIT = 1e280


@dataclass(frozen=True)
class PowerSeriesReal:
    """Truncated real power series, coefficients indexed 0..degree."""

    coeffs: tuple
    flagged_negative: tuple = field(default=(), compare=False)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int):
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def floats(self) -> list[float]:
        return [float(c) for c in self.coeffs]


@dataclass(frozen=True)
class LogCoefficients:
    """xi_1..xi_J of log S(z) = sum_j xi_j z^j."""

    values: tuple

    @property
    def degree(self) -> int:
        return len(self.values)

    def xi(self, j: int):
        return self.values[j - 1]


@dataclass(frozen=True)
class LambdaSequence:
    """Lambda_1..Lambda_N of log f(z) = sum_k Lambda_k z^k."""

    values: tuple

    @property
    def degree(self) -> int:
        return len(self.values)

    def lam(self, k: int):
        return self.values[k - 1]

    def floats(self) -> np.ndarray:
        return np.array([0.0] + [float(v) for v in self.values])


def log_series(d, ctx: PrecisionContext | None = None) -> LogCoefficients:
    """Log-coefficients of a series with unit constant term.

    j xi_j = j d_j - sum_{m=1}^{j-1} m xi_m d_{j-m}.
    """
    ctx = ctx or DEFAULT_CONTEXT
    coeffs = d.coeffs if isinstance(d, PowerSeriesReal) else tuple(d)
    with working_precision(ctx):
        dd = [mpfr(c) for c in coeffs]
        if dd[0] != 1:
            raise NonUnitConstantTerm(
                f"log recurrence needs d_0 = 1, got {float(dd[0])}")
        J = len(dd) - 1
        xi: list[mpfr] = []
        for j in range(1, J + 1):
            acc = j * dd[j]
            for m in range(1, j):
                acc -= m * xi[m - 1] * dd[j - m]
            xi.append(acc / j)
        return LogCoefficients(values=tuple(xi))


def exp_series(lam: LambdaSequence, N: int,
               ctx: PrecisionContext | None = None) -> PowerSeriesReal:
    """Coefficients of exp(sum_k Lambda_k z^k) through degree N."""
    ctx = ctx or DEFAULT_CONTEXT
    if lam.degree < N:
        raise ValueError(f"need Lambda through degree {N}, have {lam.degree}")
    with working_precision(ctx):
        kl = [mpfr(0)] + [k * lam.values[k - 1] for k in range(1, N + 1)]
        c = [mpfr(1)]
        for n in range(1, N + 1):
            acc = mpfr(0)
            for k in range(1, n + 1):
                acc += kl[k] * c[n - k]
            c.append(acc / n)
        return PowerSeriesReal(coeffs=tuple(c))


def lambda_from_model(model, N: int,
                      ctx: PrecisionContext | None = None) -> LambdaSequence:
    """Divisor sieve for Lambda_m = sum_{j | m} b_j a_j^{m/j} xi_{m/j}.

    Visits multiples of each j with nonzero weight, iterating powers of
    a_j along the way; O(N log N) pair visits, fixed summation order.
    """
    ctx = ctx or DEFAULT_CONTEXT
    if N < 1:
        raise ValueError("N must be positive")
    xi = model.inner.log_coeffs(N, ctx).values
    with working_precision(ctx):
        lam = [mpfr(0)] * (N + 1)
        for j in range(1, N + 1):
            bj = model.weights(j)
            if bj == 0:
                continue
            aj = model.frequencies(j)
            if aj == 1:
                for i in range(1, N // j + 1):
                    x = xi[i - 1]
                    if x != 0:
                        lam[i * j] += bj * x
            else:
                apow = mpfr(1)
                for i in range(1, N // j + 1):
                    apow *= aj
                    x = xi[i - 1]
                    if x != 0:
                        lam[i * j] += bj * apow * x
        return LambdaSequence(values=tuple(lam[1:]))


class _ErrorShadow:
    """Float64 mirror of a coefficient array with running error bounds."""

    def __init__(self, n: int, eps: float):
        self.val = np.zeros(n + 1)
        self.err = np.zeros(n + 1)
        self.val[0] = 1.0
        self.eps = eps
        self.peak = 1.0
        self.scale_log2 = 0

    def rescale_if_needed(self) -> None:
        top = np.max(np.abs(self.val))
        if top > _RESCALE_LIMIT:
            self.val *= 2.0 ** -512
            self.err *= 2.0 ** -512
            self.peak *= 2.0 ** -512
            self.scale_log2 += 512

    def check(self, n: int, what: str, tol: float) -> None:
        """Raise when a coefficient carries fewer than 10 significant bits.

        Values certified below tol * (running series peak), absolute error
        included, are negligible at the requested tolerance and exempt:
        models whose exact coefficients vanish leave rounding residues
        there, and no fixed-precision pass can give those residues
        relative significance.
        """
        v, e = abs(self.val[n]), self.err[n]
        if e == 0.0:
            return
        if not np.isfinite(v) or not np.isfinite(e):
            raise PrecisionExhausted(f"{what}: error tracking overflowed at n={n}")
        self.peak = max(self.peak, v)
        if v + e <= tol * self.peak:
            return
        if v < e * 2.0 ** _MIN_SIGNIFICANT_BITS:
            raise PrecisionExhausted(
                f"{what}: fewer than {_MIN_SIGNIFICANT_BITS} significant bits "
                f"at coefficient {n}")


def _flag_negatives(coeffs, tol: float) -> tuple[int, ...]:
    flagged = tuple(n for n, c in enumerate(coeffs) if c < -tol)
    if flagged:
        shown = f"{flagged[:8]}..." if len(flagged) > 8 else f"{flagged}"
        warnings.warn(
            f"coefficients at indices {shown} are negative "
            f"(non-integer weights can do this)",
            RuntimeWarning, stacklevel=3)
    return flagged


def _enumerate_once(model, N: int, ctx: PrecisionContext) -> PowerSeriesReal:
    lam = lambda_from_model(model, N, ctx) if N >= 1 else LambdaSequence(())
    with working_precision(ctx):
        kl = [mpfr(0)] + [k * lam.values[k - 1] for k in range(1, N + 1)]
        klf = np.array([float(x) for x in kl])
        akl = np.abs(klf)
        shadow = _ErrorShadow(N, ctx.eps)
        c = [mpfr(1)]
        for n in range(1, N + 1):
            acc = mpfr(0)
            for k in range(1, n + 1):
                acc += kl[k] * c[n - k]
            c.append(acc / n)
            seg_v = shadow.val[n - 1 :: -1][:n]
            seg_e = shadow.err[n - 1 :: -1][:n]
            w = klf[1 : n + 1]
            aw = akl[1 : n + 1]
            amag = float(np.dot(aw, np.abs(seg_v)))
            shadow.val[n] = float(np.dot(w, seg_v)) / n
            shadow.err[n] = (float(np.dot(aw, seg_e)) + (n + 2) * ctx.eps * amag) / n
            shadow.check(n, "enumerate_exact", ctx.tol)
            shadow.rescale_if_needed()
        flagged = _flag_negatives(c, ctx.tol)
        return PowerSeriesReal(coeffs=tuple(c), flagged_negative=flagged)


def enumerate_exact(model, N: int,
                    ctx: PrecisionContext | None = None) -> PowerSeriesReal:
    """Exact coefficients c_0..c_N of the model's generating function.

    Divisor sieve followed by the exp recurrence; negative coefficients
    are flagged (and warned about), not rejected.  On PrecisionExhausted
    the computation retries once with a doubled mantissa.
    """
    ctx = ctx or DEFAULT_CONTEXT
    if N < 0:
        raise ValueError("N must be nonnegative")
    try:
        return _enumerate_once(model, N, ctx)
    except PrecisionExhausted:
        return _enumerate_once(model, N, ctx.escalated())


def _exp_compressed(lamk: list, ctx: PrecisionContext) -> list:
    """exp recurrence on the compressed index of a single factor."""
    J = len(lamk)
    il = [mpfr(0)] + [i * lamk[i - 1] for i in range(1, J + 1)]
    out = [mpfr(1)]
    for i in range(1, J + 1):
        acc = mpfr(0)
        for t in range(1, i + 1):
            acc += il[t] * out[i - t]
        out.append(acc / i)
    return out


def _factor_product_once(model, N: int, ctx: PrecisionContext) -> PowerSeriesReal:
    xi = model.inner.log_coeffs(max(N, 1), ctx).values
    with working_precision(ctx):
        prod = [mpfr(1)] + [mpfr(0)] * N
        shadow = _ErrorShadow(N, ctx.eps)
        for k in range(1, N + 1):
            bk = model.weights(k)
            if bk == 0:
                continue
            ak = model.frequencies(k)
            J = N // k
            lamk = []
            apow = mpfr(1)
            for i in range(1, J + 1):
                apow = apow * ak
                lamk.append(bk * apow * xi[i - 1])
            fk = _exp_compressed(lamk, ctx)
            new = [mpfr(0)] * (N + 1)
            nv = np.zeros(N + 1)
            ne = np.zeros(N + 1)
            for i, coef in enumerate(fk):
                if coef == 0:
                    continue
                base = i * k
                cf = float(coef)
                acf = abs(cf)
                for m in range(base, N + 1):
                    new[m] += coef * prod[m - base]
                lim = N + 1 - base
                nv[base:] += cf * shadow.val[:lim]
                ne[base:] += acf * (shadow.err[:lim]
                                    + 2 * ctx.eps * np.abs(shadow.val[:lim]))
            prod = new
            shadow.val, shadow.err = nv, ne
            shadow.rescale_if_needed()
        for n in range(N + 1):
            shadow.check(n, "direct_factor_oracle", ctx.tol)
        flagged = _flag_negatives(prod, ctx.tol)
        return PowerSeriesReal(coeffs=tuple(prod), flagged_negative=flagged)


def direct_factor_oracle(model, N: int,
                         ctx: PrecisionContext | None = None) -> PowerSeriesReal:
    """Independent enumeration: prod_{k<=N} exp(b_k log S(a_k z^k)).

    Each factor is exponentiated on its own compressed index and the
    truncated product is accumulated densely; no divisor sieve and no
    global exp recurrence are shared with enumerate_exact.
    """
    ctx = ctx or DEFAULT_CONTEXT
    if N < 0:
        raise ValueError("N must be nonnegative")
    try:
        return _factor_product_once(model, N, ctx)
    except PrecisionExhausted:
        return _factor_product_once(model, N, ctx.escalated())
