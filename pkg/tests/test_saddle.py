"""Tilt equation: truncated sums, solver contract, tilted moments."""

import math
import random

import pytest
from gmpy2 import mpfr

import meinardus as M


class TestKhintchineLhs:
    def test_partitions_leading_term_window(self, partitions):
        lam = M.lambda_from_model(partitions, 50_000)
        val = float(M.khintchine_lhs(lam, 0.1, 2000))
        ref = float(M.khintchine_lhs(lam, 0.1, 50_000))
        assert val == pytest.approx(ref, rel=1e-40)
        # window around the measured leading-term deviation (~3.01%)
        leading = float(M.zeta_real(2)) / 0.01
        assert 0.025 < abs(val / leading - 1) < 0.035

    def test_empty_and_single(self):
        with M.working_precision(M.DEFAULT_CONTEXT):
            zero = M.LambdaSequence(values=(mpfr(0),) * 4)
            assert float(M.khintchine_lhs(zero, 0.3, 4)) == 0.0
            one = M.LambdaSequence(values=(mpfr(1), mpfr(0), mpfr(0)))
            assert float(M.khintchine_lhs(one, 0.3, 3)) == pytest.approx(
                math.exp(-0.3), rel=1e-15)

    def test_truncation_guard(self, partitions):
        lam = M.lambda_from_model(partitions, 50)
        with pytest.raises(M.TruncationTooShallow):
            M.khintchine_lhs(lam, 0.01, 50, n=10_000)

    def test_strictly_decreasing_in_delta(self, partitions):
        lam = M.lambda_from_model(partitions, 4000)
        rng = random.Random(7)
        for _ in range(20):
            d = rng.uniform(0.05, 2.0)
            h = d * 1e-4
            lo = float(M.khintchine_lhs(lam, d + h, 4000))
            hi = float(M.khintchine_lhs(lam, d - h, 4000))
            assert hi > lo


class TestSolve:
    def test_partitions_1e4(self, partitions):
        sol = M.solve_khintchine(partitions, 10_000)
        asym = float(M.asymptotic_delta(partitions.profile, 10_000))
        assert abs(float(sol.delta) / asym - 1) < 0.02
        assert abs(float(sol.residual)) <= 1e-9 * 10_000
        assert sol.method == "newton-polished"

    def test_monotone_in_n(self, partitions):
        deltas = [float(M.solve_khintchine(partitions, n).delta)
                  for n in range(10, 101, 10)]
        assert all(b < a for a, b in zip(deltas, deltas[1:]))

    def test_n_delta_grows(self, partitions):
        nd = [n * float(M.solve_khintchine(partitions, n).delta)
              for n in (100, 1000, 10_000)]
        assert nd[0] < nd[1] < nd[2]

    def test_residual_contract_all_builtins(self, partitions, distinct, prime_powers):
        for model in (partitions, distinct, prime_powers):
            for n in (100, 1000, 10_000, 100_000):
                sol = M.solve_khintchine(model, n)
                assert abs(float(sol.residual)) <= 1e-9 * n, (model.name, n)

    def test_no_mass(self):
        with pytest.raises(M.NoPositiveMass):
            M.solve_khintchine(M.builtin("empty-weights"), 10)

    def test_scan_path_without_profile(self, ratio2):
        sol = M.solve_khintchine(ratio2, 500)
        assert abs(float(sol.residual)) <= 1e-9 * 500

    def test_scan_path_log_damped_weights(self, example3):
        sol = M.solve_khintchine(example3, 200)
        assert abs(float(sol.residual)) <= 1e-9 * 200
        assert float(sol.delta) > 0

    def test_truncation_depth_stability(self, partitions):
        # doubling K beyond the rule leaves delta unchanged at tolerance
        sol = M.solve_khintchine(partitions, 1000)
        lam = M.lambda_from_model(partitions, 2 * sol.K)
        v1 = float(M.khintchine_lhs(lam, sol.delta, sol.K))
        v2 = float(M.khintchine_lhs(lam, sol.delta, 2 * sol.K))
        assert v1 == pytest.approx(v2, rel=1e-25)


class TestAsymptoticDelta:
    def test_partitions_closed_form(self, partitions):
        val = float(M.asymptotic_delta(partitions.profile, 400))
        assert val == pytest.approx(math.sqrt(math.pi ** 2 / 6 / 400), rel=1e-14)

    def test_synthetic_profile(self):
        with M.working_precision(M.DEFAULT_CONTEXT):
            prof = M.AsymptoticProfile(poles=((mpfr(2), mpfr(1)),),
                                       A0=mpfr(0), h0=mpfr(0))
        # h_r = Gamma(2) = 1: (2*1)^{1/3} * 64^{-1/3} = 2^{1/3}/4
        assert float(M.asymptotic_delta(prof, 64)) == pytest.approx(
            2.0 ** (1 / 3) / 4.0, rel=1e-14)

    def test_ratio_to_solver_approaches_one(self, partitions):
        ratios = []
        for n in (1000, 10_000, 100_000):
            sol = M.solve_khintchine(partitions, n)
            ratios.append(float(sol.delta)
                          / float(M.asymptotic_delta(partitions.profile, n)))
        gaps = [abs(r - 1) for r in ratios]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 0.01


class TestMoments:
    def test_variance_window_partitions(self, partitions):
        mom = M.tilted_moments(partitions, 0.05)
        k2 = 2 * float(M.zeta_real(2))
        assert 0.9 < float(mom.variance) / (k2 * 0.05 ** -3) < 1.1

    def test_single_factor_closed_form(self):
        # S = e^z truncated far out, weight only at k = 1: log S = z, so
        # Lambda_1 = 1 is the only log-coefficient and every tilted moment
        # is e^{-delta}
        fact = 1.0
        coeffs = [1.0]
        for j in range(1, 65):
            fact *= j
            coeffs.append(1.0 / fact)
        model = M.WeightedModel(
            "expz", M.InnerSeriesSpec.explicit(coeffs),
            M.SequenceSpec.table([1.0]), M.SequenceSpec.constant(1.0))
        d = 0.4
        mom = M.tilted_moments(model, d)
        for v in (mom.mean, mom.variance, mom.third):
            assert float(v) == pytest.approx(math.exp(-d), rel=1e-12)
        # the factor route agrees through the series derivatives
        mom2 = M.moments_by_factors(model, d, 64)
        assert float(mom2.variance) == pytest.approx(math.exp(-d), rel=1e-12)

    def test_moments_vanish_for_large_delta(self, partitions):
        mom = M.tilted_moments(partitions, 40.0)
        assert float(mom.mean) < 1e-15
        assert float(mom.third) < 1e-13

    @pytest.mark.parametrize("d", [0.5, 0.1, 0.05])
    def test_lambda_vs_factor_paths(self, partitions, distinct, d):
        # K = ceil(60/d) leaves an e^{-60}-scale tail, so the certification
        # tolerance is set accordingly; the cross-path agreement target is 1e-10
        K = math.ceil(60 / d)
        ctx = M.PrecisionContext(bits=256, tol=1e-12)
        for model in (partitions, distinct):
            a = M.tilted_moments(model, d, K=K, ctx=ctx)
            b = M.moments_by_factors(model, d, K, ctx=ctx)
            for x, y in ((a.mean, b.mean), (a.variance, b.variance),
                         (a.third, b.third)):
                assert abs(float((x - y) / y)) < 1e-10, model.name

    def test_k2_k3_asymptotics_along_saddle(self, partitions):
        prof = partitions.profile
        rho = float(prof.rho_r)
        h = float(prof.h_r)
        k2 = h * rho * (rho + 1)
        k3 = h * rho * (rho + 1) * (rho + 2)
        sol = M.solve_khintchine(partitions, 100_000)
        d = float(sol.delta)
        mom = M.tilted_moments(partitions, sol.delta)
        assert abs(float(mom.variance) * d ** (rho + 2) / k2 - 1) < 0.1
        assert abs(float(mom.third) * d ** (rho + 3) / k3 - 1) < 0.1
