"""Working-precision plumbing for the MPFR-backed numeric kernels.

Every quantity that feeds an asymptotic comparison is computed with gmpy2
``mpfr``/``mpc`` values.  A :class:`PrecisionContext` carries the mantissa
width and the target relative tolerance together; operations install the
width on gmpy2's thread-local context for the duration of a computation,
so results are bitwise reproducible at a fixed width regardless of caller
state.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr


@dataclass(frozen=True)
class PrecisionContext:
    """Mantissa width in bits plus the relative tolerance used by truncations."""

    bits: int = 256
    tol: float = 1e-30

    def __post_init__(self):
        if self.bits < 64:
            raise ValueError("precision must be at least 64 bits")
        if not 0.0 < self.tol < 1.0:
            raise ValueError("tol must lie in (0, 1)")

    @property
    def eps(self) -> float:
        """Unit roundoff at this mantissa width."""
        return 2.0 ** (1 - self.bits)

    def escalated(self) -> "PrecisionContext":
        """Context with doubled mantissa, used for the single retry."""
        return PrecisionContext(bits=2 * self.bits, tol=self.tol)


DEFAULT_CONTEXT = PrecisionContext()


@contextlib.contextmanager
def working_precision(ctx: PrecisionContext | int):
    """Install ``ctx.bits`` (or a raw bit count) as the active mpfr precision."""
    bits = ctx if isinstance(ctx, int) else ctx.bits
    saved = gmpy2.get_context()
    gmpy2.set_context(gmpy2.context(precision=bits))
    try:
        yield
    finally:
        gmpy2.set_context(saved)


def to_mpfr(x) -> mpfr:
    """Convert under the active context (floats and decimal strings accepted)."""
    return mpfr(x)


def round_to_int(x: mpfr) -> int:
    """Exact round-half-away of an mpfr to a Python int.

    Works on the exact mantissa/exponent pair, so the result does not
    depend on the active context precision (gmpy2.rint does).
    """
    if not gmpy2.is_finite(x):
        raise ValueError("cannot round a non-finite value")
    num, exp = x.as_mantissa_exp()
    num = int(num)
    exp = int(exp)
    if exp >= 0:
        return num << exp
    shift = -exp
    sign = -1 if num < 0 else 1
    q, r = divmod(abs(num), 1 << shift)
    if 2 * r >= (1 << shift):
        q += 1
    return sign * q
