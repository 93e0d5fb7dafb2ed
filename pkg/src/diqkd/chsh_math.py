"""Scalar formula layer for CHSH-based DIQKD.

Binary entropy, the beta/omega conversion of the CHSH game, the
depolarizing noise model, Hoeffding tails and the three single-round
entropy bounds (von Neumann, min-entropy, collision) as functions of the
CHSH violation.

Logs are base 2 throughout except the Hoeffding exponentials, which use
the natural base.

The underscore-prefixed helpers accept numpy arrays and skip validation;
the optimizer in :mod:`diqkd.param_search` leans on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SQRT2 = math.sqrt(2.0)
TSIRELSON = 2.0 * SQRT2
# 2*sqrt(2) - TSIRELSON, keeps 2 - beta^2/4 accurate right below the maximum
_TSIRELSON_LO = -1.9334586626905827e-16
_OMEGA_MAX_LO = 3.1342917947625543e-17
CLASSICAL_BOUND = 2.0
OMEGA_CLASSICAL = 0.75
OMEGA_MAX = (2.0 + SQRT2) / 4.0

# slack for float noise when validating a value against 2*sqrt(2)
_QUANTUM_SLACK = 1e-12


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of a formula."""


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0) or math.isnan(value):
        raise DomainError(f"{name}={value!r} is outside [0, 1]")
    return value


@dataclass(frozen=True)
class ChshViolation:
    """CHSH value beta.

    Values in [0, 2) are accepted but flagged classical; every entropy
    bound is zero there.
    """

    beta: float
    # exact omega this value was converted from, so typed round-trips are lossless
    _source: float | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        b = float(self.beta)
        if math.isnan(b) or b < 0.0 or b > TSIRELSON * (1.0 + _QUANTUM_SLACK):
            raise DomainError(f"beta={b!r} is outside [0, 2*sqrt(2)]")
        object.__setattr__(self, "beta", min(b, TSIRELSON))

    @property
    def classical(self) -> bool:
        return self.beta <= CLASSICAL_BOUND


@dataclass(frozen=True)
class WinningProbability:
    """CHSH game winning probability omega."""

    omega: float
    _source: float | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        w = _check_unit("omega", self.omega)
        if w > OMEGA_MAX * (1.0 + _QUANTUM_SLACK):
            raise DomainError(f"omega={w!r} exceeds the quantum maximum (2+sqrt(2))/4")
        object.__setattr__(self, "omega", min(w, OMEGA_MAX))

    @property
    def classical(self) -> bool:
        return self.omega <= OMEGA_CLASSICAL


@dataclass(frozen=True)
class NoisePoint:
    """Consistent (nu, Q, beta) triple of the depolarizing model."""

    nu: float
    q: float
    beta: float


def _as_beta(beta) -> float:
    if isinstance(beta, ChshViolation):
        return beta.beta
    return ChshViolation(beta).beta


def _as_omega(omega) -> float:
    if isinstance(omega, WinningProbability):
        return omega.omega
    return WinningProbability(omega).omega


# ----------------------------------------------------------------------
# binary entropy


def _h(p):
    """Vectorized binary entropy with h(0) = h(1) = 0."""
    p = np.asarray(p, dtype=float)
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -p * np.log2(p) - q * np.log2(q)
    return np.where((p <= 0.0) | (p >= 1.0), 0.0, out)


def binary_entropy(p: float) -> float:
    """Binary Shannon entropy in bits.

    >>> binary_entropy(0.5)
    1.0
    """
    p = _check_unit("p", p)
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def binary_entropy_derivative(p: float) -> float:
    """Derivative h'(p) = log2((1-p)/p); diverges at the endpoints."""
    p = float(p)
    if not (0.0 < p < 1.0):
        raise DomainError(f"p={p!r}: the derivative of h is only finite on (0, 1)")
    return math.log2((1.0 - p) / p)


# ----------------------------------------------------------------------
# CHSH conversions and noise


def beta_to_omega(beta) -> float:
    return (4.0 + _as_beta(beta)) / 8.0


def omega_to_beta(omega) -> float:
    return 8.0 * _as_omega(omega) - 4.0


def beta_omega_convert(value):
    """Map a ChshViolation to a WinningProbability and vice versa.

    Floating point cannot represent (4 + beta)/8 for every beta, so the
    result remembers its source and converting back returns it unchanged.
    """
    if isinstance(value, ChshViolation):
        if value._source is not None:
            return WinningProbability(value._source)
        return WinningProbability((4.0 + value.beta) / 8.0, _source=value.beta)
    if isinstance(value, WinningProbability):
        if value._source is not None:
            return ChshViolation(value._source)
        return ChshViolation(8.0 * value.omega - 4.0, _source=value.omega)
    raise TypeError(f"expected ChshViolation or WinningProbability, got {type(value).__name__}")


def depolarizing_point(nu: float) -> NoisePoint:
    """Honest depolarized maximally entangled state: Q = nu/2, beta = 2*sqrt(2)*(1-nu)."""
    nu = _check_unit("nu", nu)
    return NoisePoint(nu=nu, q=nu / 2.0, beta=TSIRELSON * (1.0 - nu))


def depolarizing_beta(q: float) -> float:
    """beta = 2*sqrt(2)*(1 - 2Q) along the depolarizing curve."""
    q = float(q)
    if not (0.0 <= q <= 0.5):
        raise DomainError(f"qber={q!r} is outside [0, 1/2]")
    return TSIRELSON * (1.0 - 2.0 * q)


# ----------------------------------------------------------------------
# Hoeffding


def hoeffding_tail(gamma: float, n: float, delta: float) -> float:
    """exp(-2 gamma n delta^2), the tail for a width-delta deviation over gamma*n tests."""
    if not (0.0 < gamma <= 1.0):
        raise DomainError(f"gamma={gamma!r} is outside (0, 1]")
    if n < 1:
        raise DomainError(f"n={n!r} must be at least 1")
    if delta < 0:
        raise DomainError(f"delta={delta!r} must be non-negative")
    return math.exp(-2.0 * gamma * n * delta * delta)


def hoeffding_width(gamma: float, n: float, eps: float) -> float:
    """Inverse of :func:`hoeffding_tail`: sqrt(ln(1/eps) / (2 gamma n))."""
    if not (0.0 < eps < 1.0):
        raise DomainError(f"eps={eps!r} is outside (0, 1)")
    if not (0.0 < gamma <= 1.0):
        raise DomainError(f"gamma={gamma!r} is outside (0, 1]")
    if n < 1:
        raise DomainError(f"n={n!r} must be at least 1")
    return math.sqrt(math.log(1.0 / eps) / (2.0 * gamma * n))


# ----------------------------------------------------------------------
# single-round entropy bounds
#
# The omega forms below are the beta forms after beta = 8*omega - 4:
# (beta/2)^2 - 1 = 16 omega (omega - 1) + 3 and 2 - beta^2/4 = 16 omega (1 - omega) - 2.


def _vn_root(omega):
    w = np.asarray(omega, dtype=float)
    return np.sqrt(np.clip(16.0 * w * (w - 1.0) + 3.0, 0.0, 1.0))


def _vn_bound_omega(omega):
    """1 - h(1/2 + 1/2 sqrt(16w(w-1)+3)); zero for w <= 3/4."""
    w = np.asarray(omega, dtype=float)
    val = 1.0 - _h(0.5 + 0.5 * _vn_root(w))
    return np.where(w <= OMEGA_CLASSICAL, 0.0, np.maximum(val, 0.0))


def _vn_bound_slope(omega):
    """d/domega of the von Neumann bound (finite at 3/4, infinite at the maximum)."""
    w = np.asarray(omega, dtype=float)
    x = _vn_root(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        logit = np.log2((1.0 + x) / (1.0 - x))
        slope = logit * (8.0 * w - 4.0) / x
    # x -> 0: log2((1+x)/(1-x)) ~ 2x/ln 2
    limit = (8.0 * w - 4.0) * 2.0 / math.log(2.0)
    slope = np.where(x < 1e-8, limit, slope)
    return np.where(x >= 1.0, np.inf, slope)


def _hmin_bound_omega(omega):
    """-log2(1/2 + 1/2 sqrt(16w(1-w)-2)); zero for w <= 3/4."""
    w = np.asarray(omega, dtype=float)
    # with d = omega_max - w: 16w(1-w) - 2 = d (8 sqrt2 - 16 d), free of cancellation near the maximum
    d = (OMEGA_MAX - w) + _OMEGA_MAX_LO
    root = np.sqrt(np.clip(d * (8.0 * SQRT2 - 16.0 * d), 0.0, 2.0))
    val = -np.log2(0.5 + 0.5 * root)
    return np.where(w <= OMEGA_CLASSICAL, 0.0, np.maximum(val, 0.0))


def von_neumann_bound(beta) -> float:
    """Tight lower bound on H(A|E) for a CHSH violation beta."""
    b = _as_beta(beta)
    if b <= CLASSICAL_BOUND:
        return 0.0
    root = math.sqrt(min(max((b / 2.0) ** 2 - 1.0, 0.0), 1.0))
    return max(0.0, 1.0 - binary_entropy(min(0.5 + 0.5 * root, 1.0)))


def min_entropy_bound(beta) -> float:
    """Lower bound on H_min(A|E) for a CHSH violation beta."""
    b = _as_beta(beta)
    if b <= CLASSICAL_BOUND:
        return 0.0
    # 2 - b^2/4 = (2 sqrt2 - b)(2 sqrt2 + b)/4; the gap is formed without cancellation
    gap = (TSIRELSON - b) + _TSIRELSON_LO
    root = math.sqrt(min(max(gap * (TSIRELSON + b) / 4.0, 0.0), 2.0))
    return max(0.0, -math.log2(0.5 + 0.5 * root))


def collision_bound(beta) -> float:
    """Tight lower bound on H_2(A|E); numerically the min-entropy bound."""
    return min_entropy_bound(beta)


def asymptotic_rate(beta, q: float, bound_kind: str = "von_neumann") -> float:
    """bound(beta) - h(Q): the n -> infinity, gamma -> 0 key rate."""
    bound = {"von_neumann": von_neumann_bound, "collision": collision_bound}
    try:
        fn = bound[bound_kind]
    except KeyError:
        raise ValueError(f"unknown bound kind {bound_kind!r}") from None
    return fn(beta) - binary_entropy(q)
