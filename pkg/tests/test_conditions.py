import json
import math

import numpy as np
import pytest

import oracles
from summakit import (
    ConfigurationError,
    Verdict,
    build_matrix,
    catalog,
    constant,
    evaluate_condition,
    evaluate_scenario,
    preset_weights,
    diagonal_weight_inputs,
    sequence,
)
from summakit.conditions import (
    SCENARIOS,
    TAIL_CONDITIONS,
    ConditionInputs,
    bundle_verdict,
    sample_indices,
    scenario_inputs,
)
from summakit.presets import (
    cesaro_phi,
    inverse_power_phi,
    lambda_preset,
    theta_preset,
)
from summakit.reports import to_json

ALL_IDS = {"T1", "T2", "T3", "T4", "A", "B", "N1", "N2", "N11", "N12",
           "TA_i", "TA_ii", "TA_iii", "TA_iv", "TA_v", "TA_vi", "TA_vii", "TA_viii",
           "L4_I", "L4_II", "L4_III", "L4_IV", "L4_V", "M1", "LAMBDA_RATIO", "QPD", "NPN", "BV"}


def riesz_ones():
    return build_matrix("RIESZ", {"pn": constant(1.0)})


def matrix_only(m):
    return ConditionInputs(matrix=m)


class TestCatalog:
    def test_complete(self):
        ids = {c.id for c in catalog()}
        assert ids == ALL_IDS
        assert {"T1", "T2", "T3", "T4", "M1"} <= ids
        assert {f"TA_{r}" for r in ("i", "ii", "iii", "iv", "v", "vi", "vii", "viii")} <= ids

    def test_rules(self):
        rules = {c.id: c.rule for c in catalog()}
        assert {i for i, r in rules.items() if r == "tail"} == set(TAIL_CONDITIONS)
        assert {i for i, r in rules.items() if r == "exact"} == {"TA_i", "TA_ii", "L4_I", "L4_II"}

    def test_sample_indices(self):
        idx = sample_indices(1024)
        assert idx[0] == 1 and idx[-1] == 1024
        assert {256, 512, 1024} <= set(idx.tolist())
        assert np.all(np.diff(idx) > 0)


class TestExactConditions:
    def test_rhaly_row_sums_violated(self):
        c = evaluate_condition("TA_ii", matrix_only(build_matrix("RHALY", {"t": 0.5})), 64)
        assert c.verdict is Verdict.VIOLATED
        assert "n=9: 0.1998046875" in c.notes

    def test_p_cesaro_row_sums_violated(self):
        c = evaluate_condition("TA_ii", matrix_only(build_matrix("P_CESARO", {"p": 2})), 64)
        assert c.verdict is Verdict.VIOLATED
        assert c.sup_ratio == pytest.approx(1 - 1 / 65)

    def test_riesz_row_sums_supported(self):
        c = evaluate_condition("TA_ii", matrix_only(riesz_ones()), 64)
        assert c.verdict is Verdict.SUPPORTED and c.sup_ratio <= 1e-15
        assert c.slope is None

    def test_cesaro_alpha_not_one_flagged(self):
        c = evaluate_condition("TA_ii", matrix_only(build_matrix("CESARO", {"alpha": 2})), 64)
        assert c.verdict is Verdict.SUPPORTED
        assert "hockey-stick" in c.notes

    @pytest.mark.parametrize("m", [
        build_matrix("CESARO", {"alpha": 0.5}),
        build_matrix("RHALY", {"t": 0.7}),
        build_matrix("P_CESARO", {"p": 1.5}),
        build_matrix("RIESZ", {"pn": sequence("n+1", lambda i: i + 1.0)}),
    ], ids=lambda m: m.label)
    def test_soundness_against_direct_evaluation(self, m):
        c = evaluate_condition("TA_ii", matrix_only(m), 128)
        direct = max(abs(oracles.abar(lambda n, v: float(m.row(n)[v]), n, 0) - 1) for n in range(129))
        assert (c.verdict is Verdict.SUPPORTED) == (direct <= 1e-10)

    def test_monotone_columns(self):
        assert evaluate_condition("TA_i", matrix_only(build_matrix("CESARO")), 64).verdict is Verdict.SUPPORTED
        grow = build_matrix("CUSTOM", {"entry": lambda n, v: (n + 1.0) / 100})
        c = evaluate_condition("TA_i", matrix_only(grow), 32)
        assert c.verdict is Verdict.VIOLATED and "worst violation" in c.notes


class TestRatioConditions:
    def test_t1_cesaro(self):
        m = build_matrix("CESARO", {"alpha": 1})
        c = evaluate_condition("T1", ConditionInputs(matrix=m, phi=cesaro_phi(1)), 512)
        assert c.verdict is Verdict.SUPPORTED and math.isfinite(c.sup_ratio)
        # brute force: sum_i |Delta_i chat(n, i)| against 1/(n+1)
        entry = oracles.cesaro_entry(1)
        for n, ratio in c.samples[:6]:
            h = [oracles.ahat(entry, n, i) for i in range(n + 1)]
            expected = math.fsum(abs(h[i] - h[i + 1]) for i in range(n)) * (n + 1)
            assert ratio == pytest.approx(expected, rel=1e-9)

    def test_unbounded_ratio_violated(self):
        m = build_matrix("CESARO", {"alpha": 1})
        c = evaluate_condition("T2", ConditionInputs(matrix=m, phi=inverse_power_phi(2.0)), 1024)
        assert c.verdict is Verdict.VIOLATED

    def test_npn(self):
        c = evaluate_condition("NPN", ConditionInputs(matrix=riesz_ones()), 512)
        assert c.verdict is Verdict.SUPPORTED and c.sup_ratio <= 1

    def test_missing_input(self):
        with pytest.raises(ConfigurationError, match="T1.*phi"):
            evaluate_condition("T1", matrix_only(riesz_ones()), 64)

    def test_unknown_condition(self):
        with pytest.raises(ConfigurationError):
            evaluate_condition("T9", matrix_only(riesz_ones()), 64)

    def test_zero_denominators_skipped(self):
        phi = sequence("gappy", lambda i: np.where(i % 4 == 0, 0.0, 1.0 / np.maximum(i, 1)))
        c = evaluate_condition("T2", ConditionInputs(matrix=build_matrix("CESARO"), phi=phi), 256)
        assert c.verdict is Verdict.INCONCLUSIVE and "skipped" in c.notes


class TestTailConditions:
    def inputs(self):
        m = build_matrix("CESARO", {"alpha": 1})
        return ConditionInputs(matrix=m, alpha=preset_weights("classic", k=2), phi=cesaro_phi(1), k=2.0)

    def test_horizon_check(self):
        with pytest.raises(ConfigurationError):
            evaluate_condition("T3", self.inputs(), 64, M=100)

    def test_default_horizon(self):
        c = evaluate_condition("T4", self.inputs(), 64)
        assert c.M == 256 and "truncation diagnostic" in c.notes

    def test_tails_grow_with_horizon(self):
        inp = self.inputs()
        small = evaluate_condition("T3", inp, 64, M=128)
        big = evaluate_condition("T3", inp, 64, M=1024)
        for (i, a), (j, b) in zip(small.samples, big.samples):
            assert i == j and b >= a

    def test_truncation_diagnostic_decreases(self):
        inp = self.inputs()
        diag = []
        for M in (128, 512, 2048):
            note = evaluate_condition("T3", inp, 64, M=M).notes
            diag.append(float(note.split("truncation diagnostic ")[1].split(";")[0]))
        assert diag[0] > diag[1] > diag[2]

    def test_short_horizon_inconclusive(self):
        # exponential weights make the column tails diverge
        m = build_matrix("CESARO", {"alpha": 1})
        inp = ConditionInputs(matrix=m, alpha=sequence("exp(n/20)", lambda i: np.exp(np.minimum(i, 600) / 20.0)),
                              phi=cesaro_phi(1), k=2.0)
        c = evaluate_condition("T4", inp, 64)
        assert c.verdict is not Verdict.SUPPORTED

    def test_brute_force_t4_column(self):
        inp = self.inputs()
        N, M = 16, 64
        c = evaluate_condition("T4", inp, N, M=M)
        entry = oracles.cesaro_entry(1)
        for i, ratio in c.samples[:4]:
            tail = math.fsum(n * (1 / (n + 1)) * abs(oracles.ahat(entry, n, i + 1)) for n in range(i + 1, M + 1))
            assert ratio == pytest.approx(tail / (i * (1 / (i + 1))), rel=1e-10)

    def test_diagonal_weight_bridge(self):
        m = riesz_ones()
        inp = diagonal_weight_inputs(m, theta_preset("n"), 2.0)
        for a, b in (("T3", "TA_vii"), ("T4", "TA_viii")):
            x = evaluate_condition(a, inp, 256)
            y = evaluate_condition(b, inp, 256)
            assert [i for i, _ in x.samples] == [i for i, _ in y.samples]
            assert all(abs(p - q) <= 1e-12 * max(1, abs(p)) for (_, p), (_, q) in zip(x.samples, y.samples))


class TestSeriesAndSequenceConditions:
    def test_a_and_b_supported_for_invlog(self):
        m = build_matrix("CESARO", {"alpha": 1})
        inp = ConditionInputs(matrix=m, alpha=preset_weights("classic", k=2), phi=inverse_power_phi(1),
                              k=2.0, lam=lambda_preset("invlog"), X=constant(1.0))
        assert evaluate_condition("A", inp, 2048).verdict is Verdict.SUPPORTED
        assert evaluate_condition("B", inp, 2048).verdict is Verdict.SUPPORTED

    def test_a_fails_for_unit_lambda(self):
        inp = ConditionInputs(alpha=preset_weights("classic", k=2), phi=inverse_power_phi(1), k=2.0,
                              lam=constant(1.0), X=constant(1.0))
        assert evaluate_condition("A", inp, 2048).verdict is not Verdict.SUPPORTED

    def test_sequence_conditions(self):
        inp = ConditionInputs(lam=sequence("alt", lambda i: np.where(i % 2 == 0, 1.0, -1.0)))
        assert evaluate_condition("BV", inp, 256).verdict is Verdict.VIOLATED
        assert evaluate_condition("LAMBDA_RATIO", inp, 256).verdict is Verdict.SUPPORTED

    def test_ta_vi_note(self):
        m = build_matrix("CESARO", {"alpha": 1})
        inp = ConditionInputs(matrix=m, k=2.0, lam=lambda_preset("invlog"), X=constant(1.0),
                              theta=theta_preset("n"))
        assert "absolute value" in evaluate_condition("TA_vi", inp, 256).notes


class TestScenarios:
    def test_cesaro_bundle(self):
        certs = evaluate_scenario("LEMMA1", {"alpha": 1, "k": 2, "weights": "classic"}, N=1024, M=4096)
        by_id = {c.id: c for c in certs}
        for cid in ("T1", "T2", "T3", "T4"):
            assert by_id[cid].verdict is Verdict.SUPPORTED
            assert math.isfinite(by_id[cid].sup_ratio) and by_id[cid].slope <= 0.05
        assert bundle_verdict(certs) is Verdict.SUPPORTED

    def test_cesaro_bundle_frozen_sup(self):
        certs = evaluate_scenario("LEMMA1", {"alpha": 1, "k": 2}, N=1024, M=4096)
        t3 = next(c for c in certs if c.id == "T3")
        # frozen from the first run; a tail sum of (n+1)^-1 |Delta ahat| weights
        assert t3.sup_ratio == pytest.approx(1.578760062394709, rel=1e-9)

    @pytest.mark.parametrize("name", ["lemma2", "lemma3"])
    def test_other_class_bundles(self, name):
        assert bundle_verdict(evaluate_scenario(name, {}, N=512)) is Verdict.SUPPORTED

    def test_p_cesaro_constraint_note(self):
        certs = evaluate_scenario("LEMMA3", {"p": 2.5}, N=128)
        assert all("1 < p <= 2" in c.notes for c in certs)

    def test_riesz_bundle(self):
        certs = evaluate_scenario("LEMMA4", {"matrix": "riesz", "pn": "ones", "k": 2}, N=512)
        ids = [c.id for c in certs]
        assert ids[:5] == ["L4_I", "L4_II", "L4_III", "L4_IV", "L4_V"] and "NPN" in ids
        assert bundle_verdict(certs) is Verdict.SUPPORTED
        npn = next(c for c in certs if c.id == "NPN")
        assert npn.sup_ratio <= 1

    def test_triangle_hypotheses_on_rhaly(self):
        certs = evaluate_scenario("THMA_HYP", {"matrix": "rhaly", "t": 0.5}, N=256)
        by_id = {c.id: c.verdict for c in certs}
        assert by_id["TA_ii"] is Verdict.VIOLATED
        assert bundle_verdict(certs) is Verdict.VIOLATED

    def test_log_weight_series_conditions(self):
        certs = evaluate_scenario("COR1", {"delta": 0, "gamma": 0, "k": 2, "lam": "invlog"}, N=2048)
        by_id = {c.id: c.verdict for c in certs}
        assert by_id["A"] is Verdict.SUPPORTED and by_id["B"] is Verdict.SUPPORTED

    def test_log_weight_series_oracle(self):
        # the A series of COR1 is sum lambda_n^2 / n; its high-precision tail beyond N is small
        import mpmath as mp

        f = lambda n: 1 / (n * mp.log(n + 2) ** 2)
        tail_after_2048 = mp.nsum(f, [2049, mp.inf])
        head = mp.nsum(f, [1, 2048])
        assert tail_after_2048 / head < 0.5

    @pytest.mark.parametrize("name", sorted(SCENARIOS))
    def test_every_scenario_runs(self, name):
        certs = evaluate_scenario(name, {}, N=128)
        assert certs and all(c.N == 128 for c in certs)
        assert bundle_verdict(certs) in Verdict

    def test_unknown_scenario(self):
        with pytest.raises(ConfigurationError):
            evaluate_scenario("LEMMA9", {}, N=64)

    def test_aliases(self):
        assert scenario_inputs("thmA", {})[2] == SCENARIOS["THMA_HYP"].conditions

    def test_deterministic_and_threaded(self):
        a = evaluate_scenario("LEMMA1", {}, N=256)
        b = evaluate_scenario("LEMMA1", {}, N=256, workers=4)
        assert [to_json(c.to_dict()) for c in a] == [to_json(c.to_dict()) for c in b]


class TestCertificateShape:
    def test_to_dict_keys_and_json(self):
        c = evaluate_condition("TA_ii", matrix_only(riesz_ones()), 32)
        d = c.to_dict()
        assert list(d) == ["id", "params", "N", "M", "samples", "sup_ratio", "slope", "verdict", "notes"]
        parsed = json.loads(to_json(d))
        assert parsed["verdict"] == "supported"
        assert parsed["sup_ratio"] == max(r for _, r in parsed["samples"])
