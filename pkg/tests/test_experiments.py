import hashlib

import pytest

from diqkd.chsh_math import TSIRELSON
from diqkd.experiments import (
    CSV_COLUMNS,
    ExperimentRecord,
    asymptotic_rate,
    builtin_experiments,
    evaluate_experiment,
    experiments_csv,
)

GOLDEN_SHA256 = "56a664b9cf174de3e499cfff7f9bf9223035c5cab85a944b69fc6c074d2b3137"

ROWS = [
    (2.22, 0.07, 0.041, 0.003),
    (2.414, 0.058, 0.041, 0.003),
    (2.02096, 0.00032, 0.0297, 0.0003),
    (2.00022, 0.00003, 0.0244, 0.0009),
    (2.000030, 0.000002, 0.0379, 0.0002),
    (2.00004, 0.00001, 0.0292, 0.0002),
    (2.38, 0.14, 0.06, 0.03),
    (2.221, 0.033, 0.035, 0.003),
    (2.47, 0.0, 0.051, 0.0),
]
ATTACKS = ("coherent", "collective-aep", "collective-h2")


class TestDataset:
    def test_golden_checksum(self):
        assert hashlib.sha256(experiments_csv().encode()).hexdigest() == GOLDEN_SHA256

    def test_columns(self):
        assert experiments_csv().splitlines()[0] == ",".join(CSV_COLUMNS)

    def test_rows(self):
        records = builtin_experiments()
        assert len(records) == 9
        assert [(r.beta, r.beta_err, r.q, r.q_err) for r in records] == ROWS

    def test_identical_across_calls(self):
        assert builtin_experiments() == builtin_experiments()

    def test_record_validation(self):
        with pytest.raises(ValueError):
            ExperimentRecord("x", 3.5, 0.1, 0.01, 0.0, "p")
        with pytest.raises(ValueError):
            ExperimentRecord("x", 2.5, 0.1, 0.5, 0.0, "p")
        with pytest.raises(ValueError):
            ExperimentRecord("x", 2.5, -0.1, 0.1, 0.0, "p")


class TestAsymptoticRate:
    def test_examples(self):
        assert asymptotic_rate(TSIRELSON, 0.0, "von_neumann") == 1.0
        assert asymptotic_rate(2.414, 0.041, "von_neumann") > 0
        assert asymptotic_rate(2.02096, 0.0297, "von_neumann") < 0


class TestCorner:
    def test_clamps_to_quantum_bound(self):
        rec = ExperimentRecord("x", 2.83, 0.01, 0.0, 0.0, "p")
        assert rec.corner(False)[0] == TSIRELSON

    def test_pessimistic_shift(self):
        rec = builtin_experiments()[1]
        assert rec.corner(True) == pytest.approx((2.414 - 0.058, 0.041 + 0.003))


@pytest.fixture(scope="module")
def verdicts():
    out = {}
    for i, rec in enumerate(builtin_experiments()):
        for attack in ATTACKS:
            for pess in (False, True):
                out[i, attack, pess] = evaluate_experiment(rec, attack, pessimistic=pess)
    return out


class TestVerdicts:
    def test_nv_coherent_order(self, verdicts):
        v = verdicts[8, "coherent", False]
        assert v.verdict == "feasible"
        assert 3e7 <= v.min_rounds <= 3e8

    @pytest.mark.parametrize("row", [2, 3, 4, 5])
    def test_photonic_infeasible(self, verdicts, row):
        for attack in ATTACKS:
            assert verdicts[row, attack, False].verdict == "infeasible"

    def test_row_seven_infeasible(self, verdicts):
        for attack in ATTACKS:
            assert verdicts[6, attack, False].verdict == "infeasible"

    def test_row_two_in_allowed_region(self, verdicts):
        assert verdicts[1, "collective-aep", False].asymptotic_rate > 0

    def test_infeasible_iff_no_rate(self, verdicts):
        for v in verdicts.values():
            assert (v.verdict == "infeasible") == (v.asymptotic_rate <= 0)

    def test_pessimistic_never_more_feasible(self, verdicts):
        for (row, attack, pess), v in verdicts.items():
            if not pess:
                continue
            central = verdicts[row, attack, False]
            assert v.asymptotic_rate <= central.asymptotic_rate
            if v.verdict == "feasible":
                assert central.verdict == "feasible"
                assert v.min_rounds >= central.min_rounds
