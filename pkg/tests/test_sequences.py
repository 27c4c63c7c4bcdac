import threading

import numpy as np
import pytest

from oracles import almost_decreasing_all_pairs, cesaro_gamma
from summakit import (
    ClassId,
    DomainError,
    Verdict,
    cesaro_coeff,
    cesaro_coeff_asymptotic,
    certify_sequence_class,
    constant,
    from_array,
    partial_sums,
    sequence,
)
from summakit.sequences import (
    Tolerances,
    cesaro_coeffs,
    flatness,
    from_scalar,
    loglog_slope,
    product,
    trend_verdict,
)


def seq_of(name, f):
    return sequence(name, lambda i: f(i.astype(float)))


class TestRealSequence:
    def test_values_are_deterministic_and_readonly(self):
        s = seq_of("sqrt", np.sqrt)
        a = s.values(100).copy()
        s.values(5000)
        assert np.array_equal(s.values(100), a)
        with pytest.raises(ValueError):
            s.values(10)[0] = 1.0

    def test_call_matches_values(self):
        s = seq_of("n^2", lambda n: n**2)
        assert s(7) == 49.0
        assert s(0) == 0.0

    def test_negative_index_rejected(self):
        with pytest.raises(DomainError):
            constant(1.0)(-1)

    def test_finite_sequence_bounds(self):
        s = from_array("x", [1.0, 2.0, 3.0])
        assert s(2) == 3.0
        with pytest.raises(DomainError):
            s.values(4)

    def test_scalar_wrapper(self):
        s = from_scalar("cube", lambda n: n**3)
        assert s.values(4).tolist() == [0, 1, 8, 27]

    def test_partial_sums_difference_recovers_terms(self):
        t = seq_of("alt", lambda n: (-1.0) ** n / (n + 1))
        s = partial_sums(t).values(300)
        assert np.allclose(np.diff(s, prepend=0.0), t.values(300), rtol=0, atol=1e-15)

    def test_product(self):
        s = product(constant(2.0), seq_of("n", lambda n: n))
        assert s.values(4).tolist() == [0, 2, 4, 6]

    def test_concurrent_reads_agree(self):
        s = seq_of("sin", np.sin)
        results = []

        def work(stop):
            results.append(s.values(stop)[:50].copy())

        threads = [threading.Thread(target=work, args=(64 * (i + 1),)) for i in range(8)]
        for th in threads:
            th.start()
        for th in threads:
            th.join()
        assert all(np.array_equal(r, results[0]) for r in results)


class TestCesaroNumbers:
    @pytest.mark.parametrize("n,alpha,expected", [(0, 0.7, 1.0), (5, 1, 6.0), (2, 0.5, 1.875)])
    def test_examples(self, n, alpha, expected):
        assert cesaro_coeff(n, alpha) == expected

    def test_domain(self):
        with pytest.raises(DomainError):
            cesaro_coeff(3, -1.0)
        with pytest.raises(DomainError):
            cesaro_coeff(-1, 0.5)

    @pytest.mark.parametrize("alpha", [-0.9, -0.5, 0.5, 0.7, 1.3, 2.5])
    @pytest.mark.parametrize("n", [1, 3, 10, 1000, 100_000, 1_000_000])
    def test_against_gamma_quotient(self, n, alpha):
        assert cesaro_coeff(n, alpha) == pytest.approx(cesaro_gamma(n, alpha), rel=1e-12)

    @pytest.mark.parametrize("alpha", [1, 2, 3])
    def test_integer_orders_exact(self, alpha):
        v = cesaro_coeffs(2001, alpha)
        n = np.arange(2001)
        expected = {1: n + 1, 2: (n + 1) * (n + 2) / 2, 3: (n + 1) * (n + 2) * (n + 3) / 6}[alpha]
        assert np.array_equal(v, expected)

    @pytest.mark.parametrize("alpha", [-0.5, 0.5, 1, 2])
    def test_positive(self, alpha):
        assert np.all(cesaro_coeffs(10_001, alpha) > 0)

    @pytest.mark.parametrize("alpha", [-0.5, 0.5, 1, 2])
    def test_hockey_stick(self, alpha):
        lower = cesaro_coeffs(501, alpha - 1)
        upper = cesaro_coeffs(501, alpha)
        assert np.allclose(np.cumsum(lower), upper, rtol=1e-10, atol=0)

    @pytest.mark.parametrize("alpha", [-0.5, 0.5, 1, 2])
    def test_asymptotic_ratio(self, alpha):
        n = 10_000
        assert abs(cesaro_coeff(n, alpha) / cesaro_coeff_asymptotic(n, alpha) - 1) <= 10 / n

    def test_asymptotic_examples(self):
        assert cesaro_coeff_asymptotic(100, 1) == pytest.approx(100)
        assert cesaro_coeff_asymptotic(1, 0) == 1.0
        v = cesaro_coeff_asymptotic(1000, 0.5)
        assert v == pytest.approx(35.6824823, rel=1e-8)
        assert abs(v / cesaro_coeff(1000, 0.5) - 1) < 2e-3


class TestTrendRules:
    def test_slope_of_power_law(self):
        x = np.array([10, 100, 1000.0])
        assert loglog_slope(x, x**-0.5) == pytest.approx(-0.5)

    def test_bounded_above_supported(self):
        v, _ = trend_verdict((256, 512, 1024), (1.0, 1.0, 1.0), "above", Tolerances())
        assert v is Verdict.SUPPORTED

    def test_bounded_above_violated(self):
        v, slope = trend_verdict((256, 512, 1024), (1.0, 2.0, 4.0), "above", Tolerances())
        assert v is Verdict.VIOLATED and slope == pytest.approx(1.0)

    def test_bounded_above_inconclusive(self):
        v, _ = trend_verdict((256, 512, 1024), (1.0, 1.2, 1.3), "above", Tolerances())
        assert v is Verdict.INCONCLUSIVE

    def test_bounded_below_rules(self):
        tol = Tolerances()
        assert trend_verdict((25, 50, 100), (0.5, 0.5, 0.5), "below", tol)[0] is Verdict.SUPPORTED
        assert trend_verdict((25, 50, 100), (0.08, 0.04, 0.02), "below", tol)[0] is Verdict.VIOLATED

    def test_flatness(self):
        n = np.arange(4096, dtype=float)
        tol = Tolerances()
        assert flatness(np.concatenate([[0.0], n[1:] ** -2.0]), tol).verdict == "flat"
        assert flatness(np.ones(4096), tol).verdict == "growing"
        assert flatness(np.zeros(100), tol).verdict == "flat"


class TestSequenceClasses:
    def test_decreasing(self):
        c = certify_sequence_class(seq_of("1/(n+1)", lambda n: 1 / (n + 1)), "ALMOST_DECREASING", N=100)
        assert c.witness == 1.0 and c.verdict is Verdict.SUPPORTED

    def test_increasing_violated(self):
        c = certify_sequence_class(seq_of("n+1", lambda n: n + 1), ClassId.ALMOST_DECREASING, N=100)
        assert c.witness == pytest.approx(2 / 101, rel=1e-15)
        assert c.verdict is Verdict.VIOLATED

    def test_oscillating_almost_decreasing(self):
        s = seq_of("osc", lambda n: (2 + (-1) ** n) / (n + 1))
        c = certify_sequence_class(s, ClassId.ALMOST_DECREASING, N=200)
        assert c.witness >= 1 / 3
        assert c.witness == almost_decreasing_all_pairs(s.values(201).tolist())
        assert c.verdict is Verdict.SUPPORTED

    def test_alternating_not_bv(self):
        c = certify_sequence_class(seq_of("alt", lambda n: (-1.0) ** n), ClassId.BV, N=100)
        assert c.witness == 198.0
        assert c.verdict is Verdict.VIOLATED

    def test_bv_supported(self):
        c = certify_sequence_class(seq_of("1/log", lambda n: 1 / np.log(n + 2)), ClassId.BV, N=2048)
        assert c.verdict is Verdict.SUPPORTED

    def test_quasi_power(self):
        s = seq_of("n^-0.5", lambda n: np.where(n > 0, n, 1.0) ** -0.5)
        ok = certify_sequence_class(s, ClassId.QUASI_POWER_DECREASING, {"beta": 0.25}, N=1024)
        bad = certify_sequence_class(s, ClassId.QUASI_POWER_DECREASING, {"beta": 1.0}, N=1024)
        assert ok.verdict is Verdict.SUPPORTED
        assert bad.verdict is Verdict.VIOLATED

    def test_quasi_power_needs_beta(self):
        with pytest.raises(DomainError):
            certify_sequence_class(constant(1.0), ClassId.QUASI_POWER_DECREASING, {}, N=16)

    def test_ratio_bounded(self):
        c = certify_sequence_class(seq_of("2^-n", lambda n: 2.0**-n), ClassId.RATIO_BOUNDED, N=64)
        assert c.witness == 0.5 and c.verdict is Verdict.SUPPORTED
        grow = certify_sequence_class(seq_of("exp(n^1.5/50)", lambda n: np.exp(n**1.5 / 50)),
                                      ClassId.RATIO_BOUNDED, N=512)
        assert grow.verdict is not Verdict.SUPPORTED

    def test_ratio_all_zero_inconclusive(self):
        c = certify_sequence_class(constant(0.0), ClassId.RATIO_BOUNDED, N=16)
        assert c.verdict is Verdict.INCONCLUSIVE and c.witness == 0.0

    def test_negative_terms_rejected(self):
        with pytest.raises(DomainError):
            certify_sequence_class(constant(-1.0), ClassId.ALMOST_DECREASING, N=16)

    def test_prefix_minimum(self):
        with pytest.raises(DomainError):
            certify_sequence_class(constant(1.0), ClassId.BV, N=4)

    @pytest.mark.parametrize("seed", range(5))
    def test_brute_force_oracle(self, seed):
        rng = np.random.default_rng(seed)
        for N in (8, 17, 33, 64):
            data = rng.uniform(0.01, 1.0, N + 1)
            c = certify_sequence_class(from_array("r", data), ClassId.ALMOST_DECREASING, N=N)
            assert c.witness == almost_decreasing_all_pairs(data.tolist())
