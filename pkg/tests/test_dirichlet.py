"""Special values: Bernoulli, zeta routes, profiles, Dirichlet sums."""

import math
from fractions import Fraction

import mpmath
import pytest

import meinardus as M
from meinardus.dirichlet import bernoulli

import oracles

mpmath.mp.prec = 300


class TestBernoulli:
    def test_known_values(self):
        assert bernoulli(0) == 1
        assert bernoulli(1) == Fraction(-1, 2)
        assert bernoulli(2) == Fraction(1, 6)
        assert bernoulli(4) == Fraction(-1, 30)
        assert bernoulli(12) == Fraction(-691, 2730)
        assert all(bernoulli(m) == 0 for m in (3, 5, 7, 9, 11))

    def test_matches_mpmath_through_64(self):
        for m in range(0, 65, 2):
            ours = float(bernoulli(m))
            assert ours == pytest.approx(float(mpmath.bernoulli(m)), rel=1e-12)


class TestZeta:
    def test_zeta2_within_series_bracket(self):
        lo, hi = oracles.zeta2_bracket()
        val = float(M.zeta_real(2))
        assert lo <= val <= hi
        assert val == pytest.approx(math.pi ** 2 / 6, rel=1e-15)

    def test_nonpositive_integers(self):
        assert float(M.zeta_real(0)) == -0.5
        assert float(M.zeta_real(-1)) == pytest.approx(-1 / 12, rel=1e-15)
        assert float(M.zeta_real(-2)) == 0.0
        assert float(M.zeta_real(-3)) == pytest.approx(1 / 120, rel=1e-15)

    def test_pole(self):
        with pytest.raises(M.PoleAtOne):
            M.zeta_real(1)

    def test_matches_mpmath_across_line(self):
        for s in (-7.3, -2.5, -0.9, 0.25, 0.5, 0.99, 1.01, 2, 3, 7.5, 30):
            ours = float(M.zeta_real(s))
            ref = float(mpmath.zeta(s))
            assert ours == pytest.approx(ref, rel=1e-25, abs=1e-28), s

    def test_functional_equation_agrees_with_euler_maclaurin(self):
        for s in (-0.5, -1.5, -2.5):
            fe = float(M.zeta_functional_equation(s))
            em = float(M.zeta_euler_maclaurin(s))
            assert abs(fe - em) <= 1e-15 * max(1.0, abs(fe))

    def test_512_bit_agreement_with_mpmath(self):
        import gmpy2
        ctx512 = M.PrecisionContext(bits=512)
        mpmath.mp.prec = 560
        with M.working_precision(M.PrecisionContext(bits=560)):
            for s in (2, 0.5, -2.5, 7.0, -0.25):
                ours = M.zeta_real(s, ctx512)
                ref = gmpy2.mpfr(mpmath.nstr(mpmath.zeta(s), 175))
                assert abs((ours - ref) / ref) < gmpy2.mpfr(2) ** -500, s
        mpmath.mp.prec = 300

    def test_zeta_prime_zero(self):
        assert float(M.zeta_prime_zero()) == pytest.approx(
            -0.5 * math.log(2 * math.pi), rel=1e-16)


class TestDeltaRemainder:
    def test_zero_argument(self, partitions):
        assert float(M.delta_remainder(partitions.profile, 0.0, 4)) == 0.0

    def test_partitions_first_order(self, partitions):
        d = 0.17
        val = float(M.delta_remainder(partitions.profile, d, 1))
        assert val == pytest.approx(-d / 24, rel=1e-14)

    def test_second_order_vanishes(self, partitions):
        d = 0.17
        v1 = float(M.delta_remainder(partitions.profile, d, 1))
        v2 = float(M.delta_remainder(partitions.profile, d, 2))
        assert v1 == v2      # D(-2) = 0

    def test_depth_guard(self, partitions):
        with pytest.raises(M.MissingDeltaCoeffs):
            M.delta_remainder(partitions.profile, 0.1, 99)

    def test_vanishes_monotonically(self, partitions):
        vals = [abs(float(M.delta_remainder(partitions.profile, d, 8)))
                for d in (0.1, 0.05, 0.02, 0.01, 0.001)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-4


class TestEvalDDirect:
    def test_partitions_factors_as_zeta_product(self, partitions):
        dv = M.eval_D_direct(partitions, 2.0, 2000)
        target = float(M.zeta_real(2) * M.zeta_real(3))
        assert abs(float(dv.value) - target) <= dv.abs_error + 1e-12
        assert dv.abs_error < 0.01

    def test_distinct_alternating_factor(self, distinct):
        dv = M.eval_D_direct(distinct, 2.0, 2000)
        lo, hi = oracles.alternating_dirichlet(3.0)
        target = float(M.zeta_real(2)) * 0.5 * (lo + hi)
        assert abs(float(dv.value) - target) <= dv.abs_error + 1e-9

    def test_zero_weights(self):
        model = M.builtin("empty-weights")
        dv = M.eval_D_direct(model, 2.0, 200)
        assert float(dv.value) == 0.0

    def test_not_convergent_inside_pole(self, partitions):
        with pytest.raises(M.NotConvergent):
            M.eval_D_direct(partitions, 0.5, 100)

    @pytest.mark.parametrize("shift", [0.5, 1.0, 2.0])
    def test_factorization_partitions(self, partitions, shift):
        # D(s) = D_b(s) D_{(xi,1)}(s) = zeta(s) zeta(s+1) for unit weights
        s = 1.0 + shift
        dv = M.eval_D_direct(partitions, s, 3000)
        target = float(M.zeta_real(s) * M.zeta_real(s + 1))
        assert abs(float(dv.value) - target) <= 2 * dv.abs_error + 1e-9

    @pytest.mark.parametrize("shift", [0.5, 1.0, 2.0])
    def test_factorization_distinct(self, distinct, shift):
        s = 1.0 + shift
        dv = M.eval_D_direct(distinct, s, 3000)
        target = float(M.zeta_real(s) * (1 - 2.0 ** -s) * M.zeta_real(s + 1))
        assert abs(float(dv.value) - target) <= 2 * dv.abs_error + 1e-9


class TestEulerMaclaurinDb:
    def test_matches_direct_sum_s1(self, example3):
        dv = M.euler_maclaurin_Db(example3.weights, 1.0)
        ref = oracles.log_damped_sum(1.0, 0.5)
        assert abs(float(dv.value) - ref) <= 1e-8

    def test_matches_direct_sum_s2(self, example3):
        dv = M.euler_maclaurin_Db(example3.weights, 2.0)
        ref = oracles.log_damped_sum(2.0, 0.5)
        assert abs(float(dv.value) - ref) <= 1e-8
        assert float(dv.value) > 0

    def test_residue_at_zero_vanishes(self, example3):
        vals = [s * float(M.euler_maclaurin_Db(example3.weights, s, terms=2000).value)
                for s in (0.1, 0.01, 0.001, 0.0001)]
        assert all(abs(b) < abs(a) for a, b in zip(vals, vals[1:]))
        assert abs(vals[-1]) < 0.02

    def test_unsupported_form(self, partitions):
        with pytest.raises(M.UnsupportedForm):
            M.euler_maclaurin_Db(partitions.weights, 1.0)

    def test_small_s_route_consistent_with_direct(self, example3):
        # the closed-form continuation and the direct integral cross at 0.3
        import meinardus.dirichlet as D
        qd, _ = D._q_integral_direct(0.3, 0.5)
        qs, _ = D._q_small_s(0.3, 0.5)
        assert qd == pytest.approx(qs, rel=1e-12)


class TestProfiles:
    def test_profile_partitions_op(self):
        prof = M.profile_partitions()
        assert float(prof.h(1)) == pytest.approx(math.pi ** 2 / 6, rel=1e-15)
        assert float(prof.delta_coeffs[0]) == pytest.approx(1 / 24, rel=1e-15)
        assert float(prof.delta_coeffs[2]) == 0.0      # zeta(-3) zeta(-2) = 0

    def test_h_requires_positive_gamma_argument(self):
        from gmpy2 import mpfr
        with M.working_precision(M.DEFAULT_CONTEXT):
            prof = M.AsymptoticProfile(poles=((mpfr(2), mpfr(1)),),
                                       A0=mpfr(0), h0=mpfr(0))
            assert float(prof.h(1)) == pytest.approx(1.0)   # Gamma(2) = 1

    def test_profile_validation(self):
        from gmpy2 import mpfr
        with M.working_precision(M.DEFAULT_CONTEXT):
            with pytest.raises(ValueError):
                M.AsymptoticProfile(poles=((mpfr(1), mpfr(-1)),),
                                    A0=mpfr(0), h0=mpfr(0))
            with pytest.raises(ValueError):
                M.AsymptoticProfile(poles=((mpfr(2), mpfr(1)), (mpfr(1), mpfr(1))),
                                    A0=mpfr(0), h0=mpfr(0))
