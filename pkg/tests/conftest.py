import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import meinardus as M  # noqa: E402
import oracles  # noqa: E402


@pytest.fixture(scope="session")
def ctx():
    return M.DEFAULT_CONTEXT


@pytest.fixture(scope="session")
def partitions():
    return M.builtin("partitions")


@pytest.fixture(scope="session")
def distinct():
    return M.builtin("distinct")


@pytest.fixture(scope="session")
def prime_powers():
    return M.builtin("prime-powers")


@pytest.fixture(scope="session")
def example3():
    return M.builtin("example3", eps=0.5)


@pytest.fixture(scope="session")
def q4_indicator():
    return M.builtin("q4-indicator")


@pytest.fixture(scope="session")
def ratio2():
    return M.builtin("ratio-kernel", p=2)


@pytest.fixture(scope="session")
def gcd2_model():
    """S = 1 + z^2 with unit weights: coefficients supported on 2Z.
    D(s) = zeta(s) 2^{-s} eta(s+1): pole at 1 with residue zeta(2)/4,
    regular at 0 with value -log(2)/2."""
    import gmpy2
    from gmpy2 import mpfr
    with M.working_precision(M.DEFAULT_CONTEXT):
        profile = M.AsymptoticProfile(
            poles=((mpfr(1), M.zeta_real(2) / 4),),
            A0=mpfr(0), h0=M.zeta_real(0) * gmpy2.log(mpfr(2)))
    return M.WeightedModel(
        "gcd2", M.InnerSeriesSpec.explicit([1, 0, 1]),
        M.SequenceSpec.constant(1.0), M.SequenceSpec.constant(1.0),
        profile=profile)


@pytest.fixture(scope="session")
def partitions_2000(partitions):
    return M.enumerate_exact(partitions, 2000)


@pytest.fixture(scope="session")
def distinct_2000(distinct):
    return M.enumerate_exact(distinct, 2000)


@pytest.fixture(scope="session")
def dp_partitions_2000():
    return oracles.partition_numbers(2000)


@pytest.fixture(scope="session")
def dp_distinct_2000():
    return oracles.distinct_partition_numbers(2000)


def assert_decreasing_with_one_inversion(gaps, slack=0.10):
    """Strictly improving sequence of error gaps, allowing one inversion of
    at most `slack` times the previous gap."""
    inversions = 0
    for a, b in zip(gaps, gaps[1:]):
        if b > a:
            inversions += 1
            assert b - a <= slack * a, f"inversion too large: {a} -> {b}"
    assert inversions <= 1, f"more than one inversion in {gaps}"
