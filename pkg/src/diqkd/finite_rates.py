"""Finite-size key lengths for CHSH-based DIQKD.

Three bounds are provided:

* ``key_length_coherent`` -- entropy accumulation over the blocked
  protocol (general coherent attacks),
* ``key_length_collective_aep`` -- asymptotic equipartition (IID),
* ``key_length_collective_h2`` -- additivity of the collision entropy (IID).

Each returns a :class:`KeyLengthBreakdown` whose four signed components
sum exactly to the key length. The ``*_terms`` functions broadcast over
numpy arrays and are what the optimizer calls; the public functions wrap
them for single parameter points.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .chsh_math import (
    OMEGA_CLASSICAL,
    OMEGA_MAX,
    DomainError,
    _h,
    _hmin_bound_omega,
    _vn_bound_omega,
    _vn_bound_slope,
)

ATTACK_KINDS = ("coherent", "collective-aep", "collective-h2")

# 4 log2(2 sqrt(2) + 1): the AEP prefactor with eta <= 2 sqrt(2) + 1
AEP_PREFACTOR = 4.0 * math.log2(2.0 * math.sqrt(2.0) + 1.0)

TANGENT_GRID = 64
TANGENT_TOL = 1e-10
# keep tangent points strictly inside the open domain
_TANGENT_MARGIN = 1e-9

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class InfeasibleBudget(ValueError):
    """The security budget violates a hard constraint (e.g. eps'_EC <= 2 sqrt(eps_t))."""


# ----------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class SecurityBudget:
    """Error parameters of one protocol run.

    ``eps_ea`` and ``eps_t`` belong to the coherent analysis, ``eps_con`` to
    the collective ones; unused fields stay ``None``.
    """

    eps_smooth: float
    eps_ec: float
    eps_ec_prime: float
    eps_pa: float
    eps_ea: Optional[float] = None
    eps_con: Optional[float] = None
    eps_t: Optional[float] = None

    def __post_init__(self):
        for name, value in asdict(self).items():
            if value is None:
                continue
            if not (0.0 < value < 1.0):
                raise DomainError(f"{name}={value!r} is outside (0, 1)")
        if self.eps_t is not None and not self.eps_ec_prime > 2.0 * math.sqrt(self.eps_t):
            raise InfeasibleBudget(
                f"eps_ec_prime={self.eps_ec_prime!r} must exceed 2*sqrt(eps_t)={2.0 * math.sqrt(self.eps_t)!r}"
            )


@dataclass(frozen=True)
class ProtocolParams:
    """Honest-implementation parameters: rounds, test fraction, expected omega, QBER, widths."""

    n: float
    gamma: float
    omega_exp: float
    q: float
    delta_est: float = 0.0
    delta_con: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.gamma <= 1.0):
            raise DomainError(f"gamma={self.gamma!r} is outside (0, 1]")
        if self.gamma * self.n < 1.0:
            raise DomainError(f"gamma*n={self.gamma * self.n!r} must be at least 1")
        if not (0.0 <= self.omega_exp <= OMEGA_MAX * (1 + 1e-12)):
            raise DomainError(f"omega_exp={self.omega_exp!r} is outside [0, (2+sqrt(2))/4]")
        if not (0.0 <= self.q <= 0.5):
            raise DomainError(f"q={self.q!r} is outside [0, 1/2]")
        if self.delta_est < 0.0 or self.delta_con < 0.0:
            raise DomainError("statistical widths must be non-negative")

    @property
    def omega_worst(self) -> float:
        return self.omega_exp - self.delta_est - self.delta_con


@dataclass(frozen=True)
class BlockStructure:
    s_max: int
    s_bar: float
    m: float


@dataclass(frozen=True)
class TradeoffTangent:
    """Normalized tangent point p_t(1) / (1 - (1-gamma)^s_max), an omega value."""

    pt_ratio: float

    def __post_init__(self):
        if not (OMEGA_CLASSICAL < self.pt_ratio < OMEGA_MAX):
            raise DomainError(f"pt_ratio={self.pt_ratio!r} is outside (3/4, (2+sqrt(2))/4)")


@dataclass
class KeyLengthBreakdown:
    """Signed decomposition: total_l = entropy - leakage - sqrt(n) terms - constants."""

    attack: str
    n: float
    entropy_term: float
    ec_leakage: float
    sqrt_n_corrections: float
    constant_penalties: float
    total_l: float
    rate: float
    feasible: bool
    soundness: float
    abort_threshold: float
    chosen_params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _breakdown(attack, n, entropy, leak, sqrt_terms, const, soundness, abort, params, valid=True):
    entropy, leak, sqrt_terms, const = (float(v) for v in (entropy, leak, sqrt_terms, const))
    total = entropy - leak - sqrt_terms - const
    return KeyLengthBreakdown(
        attack=attack,
        n=float(n),
        entropy_term=entropy,
        ec_leakage=leak,
        sqrt_n_corrections=sqrt_terms,
        constant_penalties=const,
        total_l=total,
        rate=total / n,
        feasible=bool(valid and total > 0.0 and math.isfinite(total)),
        soundness=float(soundness),
        abort_threshold=float(abort),
        chosen_params=params,
    )


# ----------------------------------------------------------------------
# security composition


def compose_security(budget: SecurityBudget, attack_kind: str):
    """Soundness sum and abort-probability threshold for an attack model.

    Returns ``(soundness, abort_threshold)``; the protocol either aborts
    with probability above ``1 - abort_threshold`` or outputs a
    ``soundness``-correct-and-secret key.
    """
    b = budget
    if attack_kind == "coherent":
        return 2 * b.eps_ec + b.eps_pa + b.eps_smooth, _need(b.eps_ea, "eps_ea") + b.eps_ec
    if attack_kind == "collective-aep":
        return 2 * b.eps_ec + b.eps_smooth + b.eps_pa, _need(b.eps_con, "eps_con") + b.eps_ec
    if attack_kind == "collective-h2":
        return 2 * b.eps_ec + b.eps_pa, _need(b.eps_con, "eps_con") + b.eps_ec
    raise ValueError(f"unknown attack kind {attack_kind!r}; expected one of {ATTACK_KINDS}")


def _need(value, name):
    if value is None:
        raise DomainError(f"{name} is required for this attack model")
    return value


def completeness_bound(params: ProtocolParams, budget: SecurityBudget) -> float:
    """Honest abort probability bound eps'_EC + 2 eps_EC + exp(-2 gamma n delta_est^2)."""
    est = math.exp(-2.0 * params.gamma * params.n * params.delta_est**2)
    return budget.eps_ec_prime + 2.0 * budget.eps_ec + est


# ----------------------------------------------------------------------
# error-correction leakage


def _ec_constants(eps_ec, eps_ec_prime):
    eps_ec = np.asarray(eps_ec, dtype=float)
    ep = np.asarray(eps_ec_prime, dtype=float)
    return np.log2(8.0 / ep**2 + 2.0 / (2.0 - ep)) + np.log2(1.0 / eps_ec)


def ec_leakage_collective(params: ProtocolParams, budget: SecurityBudget) -> float:
    """Minimum EC leakage for the fixed-length protocol (IID AEP bound)."""
    p, b = params, budget
    leading = p.n * ((1 - p.gamma) * float(_h(p.q)) + p.gamma * float(_h(p.omega_exp)))
    sqrt_term = math.sqrt(p.n) * AEP_PREFACTOR * math.sqrt(math.log2(8.0 / b.eps_ec_prime**2))
    return leading + sqrt_term + float(_ec_constants(b.eps_ec, b.eps_ec_prime))


def _round_tail_t(m, gamma, eps_t):
    """Overshoot t with P[N >= n + t] <= eps_t (natural log)."""
    return np.sqrt(m * (1.0 - gamma) ** 2 * np.log(1.0 / eps_t) / (2.0 * gamma**2))


def _nu_ec(eps_ec_prime, eps_t):
    margin = eps_ec_prime - 2.0 * np.sqrt(eps_t)
    with np.errstate(divide="ignore", invalid="ignore"):
        return AEP_PREFACTOR * np.sqrt(2.0 * np.log2(8.0 / margin**2))


def ec_leakage_coherent(params: ProtocolParams, budget: SecurityBudget) -> float:
    """EC leakage for the blocked protocol, evaluated at the n + t round-count tail."""
    p, b = params, budget
    if b.eps_t is None:
        raise DomainError("eps_t is required for the coherent leakage")
    if not b.eps_ec_prime > 2.0 * math.sqrt(b.eps_t):
        raise InfeasibleBudget("eps_ec_prime must exceed 2*sqrt(eps_t)")
    blocks = block_structure(p.gamma, p.n)
    t = float(_round_tail_t(blocks.m, p.gamma, b.eps_t))
    per_round = (1 - p.gamma) * float(_h(p.q)) + p.gamma * float(_h(p.omega_exp))
    nt = p.n + t
    return nt * per_round + math.sqrt(nt) * float(_nu_ec(b.eps_ec_prime, b.eps_t)) + float(
        _ec_constants(b.eps_ec, b.eps_ec_prime)
    )


# ----------------------------------------------------------------------
# collective attacks


def collective_terms(
    kind, n, gamma, omega_exp, q, delta_est, delta_con, eps_smooth, eps_ec, eps_ec_prime, eps_pa, eps_con
):
    """Broadcasting evaluation of the two IID bounds.

    Returns ``(entropy, leak, sqrt_terms, const)``; the key length is
    ``entropy - leak - sqrt_terms - const``.
    """
    n = np.asarray(n, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    omega_w = np.asarray(omega_exp, dtype=float) - delta_est - delta_con
    leak = n * ((1.0 - gamma) * _h(q) + gamma * _h(omega_exp))
    ec_sqrt = np.sqrt(np.log2(8.0 / np.asarray(eps_ec_prime, dtype=float) ** 2))
    const = _ec_constants(eps_ec, eps_ec_prime) + 2.0 * np.log2(1.0 / (2.0 * np.asarray(eps_pa, dtype=float)))
    if kind == "collective-aep":
        entropy = n * _vn_bound_omega(omega_w)
        smooth = np.sqrt(np.log2(2.0 / np.asarray(eps_smooth, dtype=float) ** 2))
        sqrt_terms = np.sqrt(n) * AEP_PREFACTOR * (smooth + ec_sqrt)
    elif kind == "collective-h2":
        entropy = n * _hmin_bound_omega(omega_w)
        sqrt_terms = np.sqrt(n) * AEP_PREFACTOR * ec_sqrt
        const = const + 2.0 * np.log2(1.0 / (np.asarray(eps_con, dtype=float) + eps_ec))
    else:
        raise ValueError(f"not a collective attack kind: {kind!r}")
    return entropy, leak, sqrt_terms, const


def _collective(kind, params: ProtocolParams, budget: SecurityBudget) -> KeyLengthBreakdown:
    p, b = params, budget
    soundness, abort = compose_security(b, kind)
    entropy, leak, sqrt_terms, const = collective_terms(
        kind, p.n, p.gamma, p.omega_exp, p.q, p.delta_est, p.delta_con,
        b.eps_smooth, b.eps_ec, b.eps_ec_prime, b.eps_pa, b.eps_con,
    )
    chosen = {**asdict(p), **asdict(b)}
    return _breakdown(kind, p.n, entropy, leak, sqrt_terms, const, soundness, abort, chosen,
                      valid=p.omega_worst > OMEGA_CLASSICAL)


def key_length_collective_aep(params: ProtocolParams, budget: SecurityBudget) -> KeyLengthBreakdown:
    """IID key length from the asymptotic equipartition property and the von Neumann bound."""
    return _collective("collective-aep", params, budget)


def key_length_collective_h2(params: ProtocolParams, budget: SecurityBudget) -> KeyLengthBreakdown:
    """IID key length from collision-entropy additivity; no smoothing sqrt(n) term."""
    return _collective("collective-h2", params, budget)


# ----------------------------------------------------------------------
# coherent attacks: blocks and min-tradeoff machinery


def _test_prob(gamma, s_max):
    """1 - (1-gamma)^s_max: probability a block ends in a test round."""
    gamma = np.asarray(gamma, dtype=float)
    return np.where(gamma >= 1.0, 1.0, -np.expm1(s_max * np.log1p(-np.minimum(gamma, 1.0 - 1e-16))))


def _s_max(gamma):
    # 1/gamma is often within an ulp of an integer (gamma = 1/k); snap before ceiling
    inv = 1.0 / np.asarray(gamma, dtype=float)
    return np.ceil(inv - 1e-9 * inv)


def block_structure(gamma: float, n: float) -> BlockStructure:
    """Blocks end at the first test round or after s_max = ceil(1/gamma) rounds."""
    if not (0.0 < gamma <= 1.0):
        raise DomainError(f"gamma={gamma!r} is outside (0, 1]")
    s_max = int(_s_max(gamma))
    s_bar = float(_test_prob(gamma, s_max)) / gamma
    return BlockStructure(s_max=s_max, s_bar=s_bar, m=n / s_bar)


def _check_ratio(p1_ratio):
    if not (OMEGA_CLASSICAL - 1e-15 <= p1_ratio <= OMEGA_MAX + 1e-15):
        raise DomainError(f"p1_ratio={p1_ratio!r} is outside [3/4, (2+sqrt(2))/4]")


def g_tradeoff(p1_ratio: float, gamma: float) -> float:
    """Block min-tradeoff function s_bar * vN(p1_ratio)."""
    _check_ratio(p1_ratio)
    s_bar = block_structure(gamma, 1.0).s_bar
    return s_bar * float(_vn_bound_omega(p1_ratio))


def g_tradeoff_slope(pt_ratio: float, gamma: float) -> float:
    """d g / d p(1) at the unnormalized point; equals vN'(pt_ratio)/gamma."""
    _check_ratio(pt_ratio)
    blocks = block_structure(gamma, 1.0)
    norm = float(_test_prob(gamma, blocks.s_max))
    return blocks.s_bar / norm * float(_vn_bound_slope(pt_ratio))


def f_min_tangent(p1_ratio: float, tangent: TradeoffTangent, gamma: float) -> float:
    """Tangent of g at the tangent point, evaluated at p1_ratio.

    Written in unnormalized p(1) coordinates:
    g'(p_t) p(1) + g(p_t) - g'(p_t) p_t(1).
    """
    _check_ratio(p1_ratio)
    blocks = block_structure(gamma, 1.0)
    norm = float(_test_prob(gamma, blocks.s_max))
    p1 = p1_ratio * norm
    pt1 = tangent.pt_ratio * norm
    slope = g_tradeoff_slope(tangent.pt_ratio, gamma)
    return slope * p1 + (g_tradeoff(tangent.pt_ratio, gamma) - slope * pt1)


def _log2_one_plus_six_pow2(s_max):
    """log2(1 + 6 * 2^s_max) without overflow."""
    return np.logaddexp2(0.0, np.asarray(s_max, dtype=float) + math.log2(6.0))


def _eat_factor(eps_smooth, p_omega=None):
    arg = np.asarray(eps_smooth, dtype=float) if p_omega is None else np.asarray(eps_smooth) * p_omega
    return np.sqrt(1.0 - 2.0 * np.log2(arg))


def nu_one(omega_exp: float, delta_est: float, gamma: float, eps_smooth: float, p_omega=None) -> float:
    """sqrt(m) prefactor of the max-entropy term of the test-outcome register."""
    w = omega_exp + delta_est
    if not (0.0 < w < 1.0):
        raise DomainError(f"omega_exp + delta_est = {w!r}: h' is undefined")
    s_max = int(_s_max(gamma))
    norm = float(_test_prob(gamma, s_max))
    grad = math.ceil(abs(math.log2((1.0 - w) / w)) / norm)
    return 2.0 * (math.log2(7.0) + grad) * float(_eat_factor(eps_smooth, p_omega))


def nu_tradeoff(tangent: TradeoffTangent, gamma: float, eps_smooth: float, p_omega=None) -> float:
    """EAT second-order prefactor of the tangent min-tradeoff function."""
    s_max = int(_s_max(gamma))
    slope = g_tradeoff_slope(tangent.pt_ratio, gamma)
    first = float(_log2_one_plus_six_pow2(s_max))
    return 2.0 * (first + math.ceil(slope)) * float(_eat_factor(eps_smooth, p_omega))


def _tangent_objective(pt, omega_obs, gamma, s_bar, root_m, factor, log_term):
    """F_min(omega_obs; pt)/1 - nu_tradeoff(pt)/sqrt(m), per block."""
    slope_w = _vn_bound_slope(pt)
    tangent_val = s_bar * (_vn_bound_omega(pt) + slope_w * (omega_obs - pt))
    nu = 2.0 * (log_term + np.ceil(slope_w / gamma)) * factor
    return tangent_val - nu / root_m


def optimize_tangent(omega_obs, gamma, s_bar, root_m, factor, log_term, grid=TANGENT_GRID, tol=TANGENT_TOL):
    """Maximize the tangent objective over pt in (3/4, (2+sqrt(2))/4).

    A uniform interior grid picks the best cell, then golden-section search
    shrinks the bracket around it to width ``tol``. All candidate rows are
    refined in lockstep, so the result is deterministic and vectorized.

    Returns ``(best_pt, best_value)`` arrays broadcast over the inputs.
    """
    args = np.broadcast_arrays(
        np.asarray(omega_obs, float), np.asarray(gamma, float), np.asarray(s_bar, float),
        np.asarray(root_m, float), np.asarray(factor, float), np.asarray(log_term, float),
    )
    shape = args[0].shape
    flat = [a.reshape(-1, 1) for a in args]
    lo_dom = OMEGA_CLASSICAL + _TANGENT_MARGIN
    hi_dom = OMEGA_MAX - _TANGENT_MARGIN
    nodes = lo_dom + (hi_dom - lo_dom) * np.arange(grid + 2) / (grid + 1)
    values = _tangent_objective(nodes[None, :], *flat)
    k = np.argmax(values[:, 1:-1], axis=1) + 1
    a = nodes[k - 1]
    b = nodes[k + 1]
    cols = [f[:, 0] for f in flat]

    def obj(x):
        return _tangent_objective(x, *cols)

    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = obj(c), obj(d)
    width = (hi_dom - lo_dom) * 2.0 / (grid + 1)
    steps = int(math.ceil(math.log(tol / width) / math.log(_INV_PHI)))
    for _ in range(max(steps, 0)):
        left = fc >= fd
        # keep [a, d] where the left probe wins, else [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - _INV_PHI * (b - a)
        new_d = a + _INV_PHI * (b - a)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        f_c_next = np.where(left, obj(new_c), fd)
        f_d_next = np.where(left, fc, obj(new_d))
        c, d, fc, fd = c_next, d_next, f_c_next, f_d_next
    mid = 0.5 * (a + b)
    f_mid = obj(mid)
    grid_best = values[np.arange(len(k)), k]
    best_pt = np.where(f_mid >= grid_best, mid, nodes[k])
    best_val = np.maximum(f_mid, grid_best)
    return best_pt.reshape(shape), best_val.reshape(shape)


def coherent_terms(
    n, gamma, omega_exp, q, delta_est, eps_smooth, eps_ec, eps_ec_prime, eps_pa, eps_ea, eps_t,
    pt_ratio=None, eat_factor: str = "table",
):
    """Broadcasting evaluation of the coherent-attack key length.

    Returns ``(entropy, leak, sqrt_terms, const, pt, valid)``. When
    ``pt_ratio`` is None the tangent point is optimized per element.
    ``eat_factor`` picks sqrt(1 - 2 log2 eps_s) ("table") or
    sqrt(1 - 2 log2(eps_s p(Omega))) with p(Omega) >= eps_EA + eps_EC
    ("appendix").
    """
    n = np.asarray(n, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    omega_exp = np.asarray(omega_exp, dtype=float)
    eps_s = np.asarray(eps_smooth, dtype=float)
    eps_ec = np.asarray(eps_ec, dtype=float)
    eps_ecp = np.asarray(eps_ec_prime, dtype=float)
    eps_ea = np.asarray(eps_ea, dtype=float)
    eps_t = np.asarray(eps_t, dtype=float)

    s_max = _s_max(gamma)
    norm = _test_prob(gamma, s_max)
    s_bar = norm / gamma
    m = n / s_bar
    root_m = np.sqrt(m)
    omega_obs = np.minimum(omega_exp - delta_est, OMEGA_MAX)

    p_omega = None if eat_factor == "table" else eps_ea + eps_ec
    if eat_factor not in ("table", "appendix"):
        raise ValueError(f"unknown eat_factor {eat_factor!r}")
    factor = _eat_factor(eps_s, p_omega)
    log_term = _log2_one_plus_six_pow2(s_max)

    if pt_ratio is None:
        pt, _ = optimize_tangent(omega_obs, gamma, s_bar, root_m, factor, log_term)
    else:
        pt = np.broadcast_to(np.asarray(pt_ratio, dtype=float), np.broadcast(omega_obs, gamma).shape)
    slope_w = _vn_bound_slope(pt)
    nu_trade = 2.0 * (log_term + np.ceil(slope_w / gamma)) * factor
    first_order = s_bar * (_vn_bound_omega(pt) + slope_w * (omega_obs - pt))

    w_plus = omega_exp + delta_est
    with np.errstate(divide="ignore", invalid="ignore"):
        grad1 = np.ceil(np.abs(np.log2((1.0 - w_plus) / w_plus)) / norm)
    nu1 = 2.0 * (math.log2(7.0) + grad1) * factor

    t = _round_tail_t(m, gamma, eps_t)
    nt = n + t
    leak = nt * ((1.0 - gamma) * _h(q) + gamma * _h(omega_exp))

    x = eps_s / (4.0 * (eps_ea + eps_ec))
    with np.errstate(invalid="ignore", divide="ignore"):
        one_minus = x**2 / (1.0 + np.sqrt(1.0 - x**2))
        chain_penalty = -3.0 * np.log2(one_minus)

    entropy = m * first_order - m * _h(omega_obs)
    sqrt_terms = root_m * nu_trade + root_m * nu1 + np.sqrt(nt) * _nu_ec(eps_ecp, eps_t)
    const = _ec_constants(eps_ec, eps_ecp) + chain_penalty + 2.0 * np.log2(1.0 / (2.0 * np.asarray(eps_pa, float)))
    valid = (
        (omega_obs > OMEGA_CLASSICAL)
        & (w_plus < 1.0)
        & (x < 1.0)
        & (eps_ecp > 2.0 * np.sqrt(eps_t))
    )
    return entropy, leak, sqrt_terms, const, pt, valid


def key_length_coherent(
    params: ProtocolParams,
    budget: SecurityBudget,
    tangent: Optional[TradeoffTangent] = None,
    eat_factor: str = "table",
) -> KeyLengthBreakdown:
    """Key length against coherent attacks via entropy accumulation.

    With ``tangent=None`` the tangent point of the min-tradeoff function is
    optimized; otherwise the given point is used.
    """
    p, b = params, budget
    for name in ("eps_ea", "eps_t"):
        _need(getattr(b, name), name)
    soundness, abort = compose_security(b, "coherent")
    entropy, leak, sqrt_terms, const, pt, valid = coherent_terms(
        p.n, p.gamma, p.omega_exp, p.q, p.delta_est,
        b.eps_smooth, b.eps_ec, b.eps_ec_prime, b.eps_pa, b.eps_ea, b.eps_t,
        pt_ratio=None if tangent is None else tangent.pt_ratio,
        eat_factor=eat_factor,
    )
    valid = bool(valid)
    if not valid:
        entropy = 0.0
    chosen = {**asdict(p), **asdict(b), "pt_ratio": float(pt), "eat_factor": eat_factor}
    return _breakdown("coherent", p.n, entropy, leak, sqrt_terms, const, soundness, abort, chosen, valid=valid)


def key_length(attack_kind: str, params: ProtocolParams, budget: SecurityBudget, **kwargs) -> KeyLengthBreakdown:
    if attack_kind == "coherent":
        return key_length_coherent(params, budget, **kwargs)
    if attack_kind == "collective-aep":
        return key_length_collective_aep(params, budget)
    if attack_kind == "collective-h2":
        return key_length_collective_h2(params, budget)
    raise ValueError(f"unknown attack kind {attack_kind!r}; expected one of {ATTACK_KINDS}")
