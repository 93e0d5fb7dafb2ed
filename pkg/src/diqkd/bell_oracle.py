"""Bell-diagonal states and a numeric collision-entropy oracle.

The oracle builds the purification of a Bell-diagonal state with a
four-dimensional environment, measures Alice in the Z basis, and evaluates
the conditional collision entropy H_2(A|E) of the resulting cq-state by
dense Hermitian eigendecomposition. It shares no formula with the closed
forms it is used to check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chsh_math import TSIRELSON, DomainError, ChshViolation

HERMITIAN_TOL = 1e-12
SUPPORT_TOL = 1e-12


class ConsistencyError(RuntimeError):
    """An intermediate matrix broke a structural invariant (Hermiticity, trace)."""


@dataclass(frozen=True)
class BellDiagonalState:
    """Weights on the Bell basis |Phi_ij> = (I x X^i Z^j)|Phi+>."""

    lambda_00: float
    lambda_01: float
    lambda_10: float
    lambda_11: float

    def __post_init__(self):
        lam = self.weights
        if np.any(lam < 0.0):
            raise DomainError(f"Bell-diagonal weights must be non-negative, got {lam.tolist()}")
        if abs(lam.sum() - 1.0) > 1e-12:
            raise DomainError(f"Bell-diagonal weights sum to {lam.sum()!r}, expected 1")

    @property
    def weights(self) -> np.ndarray:
        return np.array([self.lambda_00, self.lambda_01, self.lambda_10, self.lambda_11], dtype=float)


class HermitianMatrix:
    """Small dense complex matrix checked for Hermiticity on construction."""

    MAX_DIM = 16

    def __init__(self, entries, tol: float = HERMITIAN_TOL):
        a = np.asarray(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] > self.MAX_DIM:
            raise ValueError(f"dimension {a.shape[0]} exceeds {self.MAX_DIM}")
        dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
        if dev > tol:
            raise ConsistencyError(f"matrix deviates from Hermitian by {dev:.3e}")
        # symmetrize away the sub-tolerance residue
        self.entries = 0.5 * (a + a.conj().T)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def eigh(self):
        return np.linalg.eigh(self.entries)

    def power(self, exponent: float, cutoff: float = SUPPORT_TOL) -> np.ndarray:
        """Matrix power on the support; eigenvalues below ``cutoff`` map to 0."""
        vals, vecs = self.eigh()
        keep = vals > cutoff
        powered = np.zeros_like(vals)
        powered[keep] = vals[keep] ** exponent
        return (vecs * powered) @ vecs.conj().T


def bell_diagonal_h2_closed_form(state: BellDiagonalState) -> float:
    """-log2(1/2 + sqrt(l00 l01) + sqrt(l10 l11)) for a Z measurement on Alice."""
    l00, l01, l10, l11 = state.weights
    return -math.log2(0.5 + math.sqrt(l00 * l01) + math.sqrt(l10 * l11))


def bell_diagonal_beta_max(state: BellDiagonalState) -> float:
    """Maximal CHSH violation of a Bell-diagonal state (Horodecki criterion)."""
    l00, l01, l10, l11 = state.weights
    first = math.hypot(l00 - l11, l01 - l10)
    second = math.hypot(l00 - l10, l01 - l11)
    return TSIRELSON * max(first, second)


def construct_rho_star(r: float) -> BellDiagonalState:
    """Rank-two Bell-diagonal state with beta_max = 2*sqrt(2)*r.

    Weights are ``r cos(theta)`` and ``r sin(theta)`` with
    cos(theta) + sin(theta) = 1/r, taking the root with theta in [0, pi/4].
    """
    r = float(r)
    if not (1.0 / math.sqrt(2.0) < r <= 1.0):
        raise DomainError(f"R={r!r} is outside (1/sqrt(2), 1]")
    # cos and sin are the roots of x^2 - x/r + (1/r^2 - 1)/2
    disc = max(2.0 - 1.0 / (r * r), 0.0)
    cos_t = 0.5 * (1.0 / r + math.sqrt(disc))
    sin_t = 0.5 * (1.0 / r - math.sqrt(disc))
    l00 = r * cos_t
    l01 = r * sin_t
    # normalize the 1-ulp residue so the state invariant holds exactly
    total = l00 + l01
    return BellDiagonalState(l00 / total, l01 / total, 0.0, 0.0)


# ----------------------------------------------------------------------
# numeric oracle

_KET0 = np.array([1.0, 0.0], dtype=complex)
_KET1 = np.array([0.0, 1.0], dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PHI_PLUS = (np.kron(_KET0, _KET0) + np.kron(_KET1, _KET1)) / math.sqrt(2.0)


def _bell_vector(i: int, j: int) -> np.ndarray:
    op = np.linalg.matrix_power(_X, i) @ np.linalg.matrix_power(_Z, j)
    return np.kron(np.eye(2), op) @ _PHI_PLUS


def purification(state: BellDiagonalState) -> np.ndarray:
    """|Psi>_{ABE} = sum_ij sqrt(l_ij) |Phi_ij>_{AB} |e_ij>_E, ordered A, B, E."""
    psi = np.zeros(16, dtype=complex)
    for k, (i, j) in enumerate([(0, 0), (0, 1), (1, 0), (1, 1)]):
        env = np.zeros(4, dtype=complex)
        env[k] = 1.0
        psi += math.sqrt(state.weights[k]) * np.kron(_bell_vector(i, j), env)
    return psi


def cq_state(state: BellDiagonalState) -> HermitianMatrix:
    """rho_AE after Alice's Z measurement, Bob traced out (8x8, A then E)."""
    psi = purification(state).reshape(2, 2, 4)
    rho_ae = np.zeros((8, 8), dtype=complex)
    for a in (0, 1):
        # amplitude tensor of Bob and Eve conditioned on Alice's outcome a
        branch = psi[a]
        rho_e_given_a = np.einsum("be,bf->ef", branch, branch.conj())
        block = slice(4 * a, 4 * a + 4)
        rho_ae[block, block] = rho_e_given_a
    return HermitianMatrix(rho_ae)


def numeric_h2_oracle(state: BellDiagonalState) -> float:
    """-log2 Tr(rho_E^{-1/2} rho_AE rho_E^{-1/2} rho_AE) from the purification."""
    rho_ae = cq_state(state)
    m = rho_ae.entries
    trace = np.trace(m).real
    if abs(trace - 1.0) > HERMITIAN_TOL:
        raise ConsistencyError(f"rho_AE has trace {trace!r}")
    for a in (0, 1):
        block = HermitianMatrix(m[4 * a : 4 * a + 4, 4 * a : 4 * a + 4])
        if block.eigh()[0].min() < -HERMITIAN_TOL:
            raise ConsistencyError("conditional block of rho_AE is not positive semidefinite")
    rho_e = HermitianMatrix(m[:4, :4] + m[4:, 4:])
    inv_sqrt = np.kron(np.eye(2), rho_e.power(-0.5))
    sandwiched = inv_sqrt @ m @ inv_sqrt
    value = np.trace(sandwiched @ m)
    if abs(value.imag) > 1e-10:
        raise ConsistencyError(f"collision trace has imaginary part {value.imag:.3e}")
    return -math.log2(value.real)


def theorem_check(grid_points: int = 50, perturbation: float = 0.0) -> dict:
    """Compare the oracle on rho*(R) with the closed collision bound at beta = 2 sqrt(2) R.

    The grid is uniform in R over (1/sqrt(2), 1], including R = 1 and
    excluding the open endpoint. ``perturbation`` is added to the oracle
    output (negative control).
    """
    from .chsh_math import collision_bound

    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    lo = 1.0 / math.sqrt(2.0)
    rs = lo + (1.0 - lo) * np.arange(1, grid_points + 1) / grid_points
    rows = []
    for r in rs:
        st = construct_rho_star(float(r))
        beta = min(TSIRELSON * float(r), TSIRELSON)
        oracle = numeric_h2_oracle(st) + perturbation
        closed = collision_bound(ChshViolation(beta))
        rows.append(
            {
                "R": float(r),
                "beta": beta,
                "beta_max": bell_diagonal_beta_max(st),
                "oracle_h2": oracle,
                "closed_form": closed,
                "deviation": abs(oracle - closed),
            }
        )
    max_dev = max(row["deviation"] for row in rows)
    return {"grid_points": grid_points, "max_deviation": max_dev, "passed": max_dev <= 1e-9, "rows": rows}
