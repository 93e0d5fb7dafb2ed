import math

import numpy as np
import pytest

from diqkd.bell_oracle import (
    BellDiagonalState,
    ConsistencyError,
    HermitianMatrix,
    bell_diagonal_beta_max,
    bell_diagonal_h2_closed_form,
    construct_rho_star,
    cq_state,
    numeric_h2_oracle,
    theorem_check,
)
from diqkd.chsh_math import TSIRELSON, DomainError


def _random_states(count, seed):
    rng = np.random.default_rng(seed)
    for w in rng.dirichlet(np.ones(4), size=count):
        w = w / w.sum()
        # put the rounding residue on the largest weight so the sum is 1 to 1e-12
        w[np.argmax(w)] += 1.0 - w.sum()
        yield BellDiagonalState(*w)


class TestBellDiagonalState:
    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            BellDiagonalState(1.1, -0.1, 0.0, 0.0)

    def test_rejects_unnormalized(self):
        with pytest.raises(DomainError):
            BellDiagonalState(0.5, 0.4, 0.0, 0.0)


class TestClosedForms:
    def test_h2_examples(self):
        assert bell_diagonal_h2_closed_form(BellDiagonalState(1, 0, 0, 0)) == 1.0
        assert bell_diagonal_h2_closed_form(BellDiagonalState(0.5, 0.5, 0, 0)) == 0.0

    def test_h2_rho_star_like_weights(self):
        # oracle value 0.11356934...; the rounded figure quoted for R = 0.8 is 0.1134
        value = bell_diagonal_h2_closed_form(BellDiagonalState(0.76452, 0.23548, 0, 0))
        assert value == pytest.approx(0.1135693404406429, abs=1e-14)
        assert value == pytest.approx(0.1134, abs=5e-4)

    def test_beta_max_examples(self):
        assert bell_diagonal_beta_max(BellDiagonalState(1, 0, 0, 0)) == pytest.approx(TSIRELSON)
        assert bell_diagonal_beta_max(BellDiagonalState(0.25, 0.25, 0.25, 0.25)) == 0.0
        assert bell_diagonal_beta_max(BellDiagonalState(0.5, 0.5, 0, 0)) == pytest.approx(2.0, abs=1e-15)


class TestRhoStar:
    def test_examples(self):
        st = construct_rho_star(1.0)
        assert st.weights.tolist() == [1.0, 0.0, 0.0, 0.0]
        st = construct_rho_star(0.8)
        assert st.lambda_00 + st.lambda_01 == pytest.approx(1.0, abs=1e-15)
        assert math.sqrt(st.lambda_00 * st.lambda_01) == pytest.approx(math.sqrt(0.18), abs=1e-12)
        st = construct_rho_star(1 / math.sqrt(2) + 1e-9)
        assert st.lambda_00 == pytest.approx(0.5, abs=1e-4)
        assert st.lambda_01 == pytest.approx(0.5, abs=1e-4)

    def test_branch_choice(self):
        for r in np.linspace(0.71, 1.0, 30):
            st = construct_rho_star(r)
            assert st.lambda_00 >= st.lambda_01

    @pytest.mark.parametrize("r", [0.7, 1.01, 1 / math.sqrt(2)])
    def test_domain(self, r):
        with pytest.raises(DomainError):
            construct_rho_star(r)

    def test_beta_max(self):
        for r in np.linspace(1 / math.sqrt(2) + 1e-6, 1.0, 50):
            assert bell_diagonal_beta_max(construct_rho_star(r)) == pytest.approx(TSIRELSON * r, abs=1e-10)


class TestNumericOracle:
    def test_examples(self):
        assert numeric_h2_oracle(BellDiagonalState(1, 0, 0, 0)) == pytest.approx(1.0, abs=1e-9)
        assert numeric_h2_oracle(BellDiagonalState(0.5, 0.5, 0, 0)) == pytest.approx(0.0, abs=1e-9)

    def test_matches_closed_form_on_random_states(self):
        for st in _random_states(100, seed=2024):
            assert numeric_h2_oracle(st) == pytest.approx(bell_diagonal_h2_closed_form(st), abs=1e-9)

    def test_cq_state_structure(self):
        for st in _random_states(20, seed=7):
            m = cq_state(st).entries
            assert np.trace(m).real == pytest.approx(1.0, abs=1e-12)
            for a in (0, 1):
                block = m[4 * a : 4 * a + 4, 4 * a : 4 * a + 4]
                assert np.linalg.eigvalsh(block).min() >= -1e-12

    def test_theorem_check(self):
        report = theorem_check(50)
        assert report["passed"]
        assert report["max_deviation"] <= 1e-9
        assert len(report["rows"]) == 50
        assert report["rows"][-1]["R"] == 1.0

    def test_theorem_check_endpoints_only(self):
        assert theorem_check(2)["passed"]

    def test_perturbation_fails(self):
        assert not theorem_check(5, perturbation=1e-6)["passed"]


class TestHermitianMatrix:
    def test_rejects_non_hermitian(self):
        with pytest.raises(ConsistencyError):
            HermitianMatrix([[1, 1], [0, 1]])

    def test_rejects_large(self):
        with pytest.raises(ValueError):
            HermitianMatrix(np.eye(17))

    def test_pseudo_power_on_support(self):
        m = HermitianMatrix(np.diag([4.0, 0.0]))
        np.testing.assert_allclose(m.power(-0.5), np.diag([0.5, 0.0]))
