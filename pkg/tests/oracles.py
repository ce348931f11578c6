"""Independent reference computations for the test suite.

Everything here avoids the library's own code paths: integer dynamic
programming for coefficient counts, literal series summation with
bracketing tails for special values, and mpmath for cross-checks.
"""

from __future__ import annotations

from fractions import Fraction


def dp_coefficients(model, N: int) -> list[int]:
    """Exact integer coefficients of prod_k S(z^k)^{b_k} by direct
    polynomial multiplication; requires integer weights, unit frequencies
    and integer inner coefficients."""
    assert model.frequencies.kind == "constant" and model.frequencies.value == 1.0
    prod = [0] * (N + 1)
    prod[0] = 1
    inner = model.inner
    for k in range(1, N + 1):
        b = model.weights.value_float(k)
        assert b == int(b) and b >= 0, "DP oracle needs integer weights"
        for _ in range(int(b)):
            prod = _multiply_inner(prod, inner, k, N)
    return prod


def _multiply_inner(prod: list[int], inner, k: int, N: int) -> list[int]:
    if inner.kind == "geometric":
        out = list(prod)
        for m in range(k, N + 1):          # 1/(1 - z^k)
            out[m] += out[m - k]
        return out
    if inner.kind == "binomial":
        out = list(prod)
        for m in range(N, k - 1, -1):      # (1 + z^k)
            out[m] += out[m - k]
        return out
    if inner.kind == "ratio":
        out = list(prod)
        for m in range(N, k - 1, -1):      # (1 + z^k)
            out[m] += out[m - k]
        step = inner.p * k
        for m in range(step, N + 1):       # 1/(1 - z^{pk})
            out[m] += out[m - step]
        return out
    # explicit with zero tail: plain convolution
    assert inner.tail == "zero"
    coeffs = [int(c) for c in inner.coeffs]
    assert all(float(c) == int(c) for c in inner.coeffs)
    out = [0] * (N + 1)
    for j, d in enumerate(coeffs):
        if d == 0 or j * k > N:
            continue
        base = j * k
        for m in range(base, N + 1):
            out[m] += d * prod[m - base]
    return out


def partition_numbers(N: int) -> list[int]:
    """p(0..N) by the textbook coin-counting recurrence."""
    dp = [0] * (N + 1)
    dp[0] = 1
    for k in range(1, N + 1):
        for m in range(k, N + 1):
            dp[m] += dp[m - k]
    return dp


def distinct_partition_numbers(N: int) -> list[int]:
    """q(0..N): partitions into distinct parts."""
    dp = [0] * (N + 1)
    dp[0] = 1
    for k in range(1, N + 1):
        for m in range(N, k - 1, -1):
            dp[m] += dp[m - k]
    return dp


def zeta2_bracket(K: int = 20000) -> tuple[float, float]:
    """Bracket of sum 1/k^2 from the partial sum plus integral tail bounds."""
    partial = float(sum(Fraction(1, k * k) for k in range(1, K + 1)))
    return partial + 1.0 / (K + 1), partial + 1.0 / K


def alternating_dirichlet(s: float, terms: int = 200000) -> tuple[float, float]:
    """Bracket of sum (-1)^{j-1} j^{-s} from consecutive partial sums."""
    acc = 0.0
    prev = 0.0
    for j in range(1, terms + 1):
        prev = acc
        acc += (-1) ** (j - 1) * j ** (-s)
    lo, hi = sorted((acc, prev))
    return lo, hi


def log_damped_sum(s: float, eps: float, K: int = 200000) -> float:
    """sum_{k>=2} k^{-s-1} log^{-eps} k by partial sum plus a midpoint
    integral tail (error well under 1e-10 for s >= 1)."""
    import mpmath
    mpmath.mp.dps = 30
    partial = mpmath.fsum(1 / (mpmath.mpf(k) ** (s + 1) * mpmath.log(k) ** eps)
                          for k in range(2, K + 1))
    tail = mpmath.quad(lambda x: x ** (-s - 1) * mpmath.log(x) ** (-eps),
                       [K + 0.5, mpmath.inf])
    return float(partial + tail)


def harmonic_sigma_lambda(N: int) -> list[Fraction]:
    """Lambda_k = sigma(k)/k for the unit-weight geometric model, by
    direct divisor enumeration."""
    out = [Fraction(0)] * (N + 1)
    for m in range(1, N + 1):
        out[m] = sum(Fraction(j, m) for j in range(1, m + 1) if m % j == 0)
    return out
