"""Deterministic optimization of the free protocol parameters.

``optimize_rate`` searches the test fraction, the statistical widths,
the tangent point and round-count tail (coherent) and, optionally, the
split of the security budget, all on fixed grids followed by
golden-section refinement. ``min_rounds`` brackets and bisects the
smallest feasible round count, and ``region_scan`` maps it over a
(QBER, beta) grid.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import finite_rates as fr
from .chsh_math import OMEGA_MAX, TSIRELSON, asymptotic_rate, beta_to_omega

DEFAULT_SOUNDNESS = 1e-5
DEFAULT_COMPLETENESS = 1e-2

INFEASIBLE = "infeasible"
INFEASIBLE_AT_BOUND = "infeasible-at-bound"

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

# parameters that can be pinned instead of searched
FIXABLE = (
    "gamma", "delta_est", "delta_con", "pt_ratio",
    "eps_smooth", "eps_ec", "eps_ec_prime", "eps_pa", "eps_ea", "eps_con", "eps_t",
)


class MonotonicityError(RuntimeError):
    """Feasibility was observed to be non-monotone in the number of rounds."""


@dataclass(frozen=True)
class OptimizerConfig:
    gamma_points: int = 24
    gamma_min: float = 1e-4
    gamma_max: float = 0.5
    gamma_refine_tol: float = 1e-3  # width in log10(gamma)
    delta_multipliers: tuple = (0.5, 1.0, 2.0)
    # 2 sqrt(eps_t) = margin * eps'_EC; 0.5 is the default eps_t = (eps'_EC / 4)^2
    eps_t_margins: tuple = (0.1, 0.5, 0.9)
    split_policy: str = "equal"
    split_weights: tuple = (0.1, 10**-0.5, 1.0, 10**0.5, 10.0)
    log_n_min: float = 3.0
    log_n_max: float = 20.0
    bisection_rel_width: float = 0.01
    eat_factor: str = "table"

    def __post_init__(self):
        if self.gamma_points < 3:
            raise ValueError("gamma grid needs at least 3 points")
        if not (0.0 < self.gamma_min < self.gamma_max <= 1.0):
            raise ValueError("need 0 < gamma_min < gamma_max <= 1")
        if self.gamma_refine_tol <= 0 or self.bisection_rel_width <= 0:
            raise ValueError("tolerances must be positive")
        if len(self.delta_multipliers) < 1 or min(self.delta_multipliers) <= 0:
            raise ValueError("delta multipliers must be positive")
        if any(not (0.0 < r < 1.0) for r in self.eps_t_margins):
            raise ValueError("eps_t margins must lie in (0, 1)")
        if self.split_policy not in ("equal", "refine"):
            raise ValueError(f"unknown split policy {self.split_policy!r}")
        if self.split_policy == "refine" and len(self.split_weights) < 3:
            raise ValueError("split weight grid needs at least 3 points")
        if self.log_n_max <= self.log_n_min:
            raise ValueError("log_n_max must exceed log_n_min")
        if self.eat_factor not in ("table", "appendix"):
            raise ValueError(f"unknown eat_factor {self.eat_factor!r}")

    def to_dict(self) -> dict:
        return asdict(self)


# ----------------------------------------------------------------------
# budget splits


def _soundness_splits(attack, soundness, config, fixed):
    """Candidate (eps_ec, eps_pa, eps_smooth, eps_abort) tuples meeting the target exactly."""
    uses_smooth = attack != "collective-h2"
    if config.split_policy == "equal":
        weight_sets = [(1.0, 1.0, 1.0)]
    else:
        grid = config.split_weights
        if uses_smooth:
            weight_sets = [(1.0, wp, ws) for wp, ws in itertools.product(grid, grid)]
        else:
            weight_sets = [(1.0, wp, 1.0) for wp in grid]
    out = []
    for w_ec, w_pa, w_s in weight_sets:
        denom = 2 * w_ec + w_pa + (w_s if uses_smooth else 0.0)
        eps_ec = fixed.get("eps_ec", soundness * w_ec / denom)
        eps_pa = fixed.get("eps_pa", soundness * w_pa / denom)
        eps_s = fixed.get("eps_smooth", soundness * w_s / denom)
        abort_key = "eps_ea" if attack == "coherent" else "eps_con"
        eps_abort = fixed.get(abort_key, soundness - eps_ec)
        out.append((eps_ec, eps_pa, eps_s, eps_abort))
    return sorted(set(out))


# ----------------------------------------------------------------------
# vectorized evaluation


def _evaluate(attack, n, omega_exp, q, gammas, soundness, completeness, config, fixed):
    """Key lengths on the full candidate grid for the given gamma values.

    Returns ``(total, params)`` where both are flattened over candidates.
    Candidates violating a constraint get ``-inf``.
    """
    splits = _soundness_splits(attack, soundness, config, fixed)
    mults = (1.0,) if "delta_est" in fixed else tuple(config.delta_multipliers)
    margins = (0.5,) if (attack != "coherent" or "eps_t" in fixed) else tuple(config.eps_t_margins)

    g, mu, mg, sp = np.meshgrid(
        np.asarray(gammas, dtype=float), np.asarray(mults, dtype=float),
        np.asarray(margins, dtype=float), np.arange(len(splits)), indexing="ij",
    )
    g, mu, mg, sp = (a.ravel() for a in (g, mu, mg, sp))
    split_arr = np.asarray(splits, dtype=float)[sp]
    eps_ec, eps_pa, eps_s, eps_abort = split_arr.T

    gn = g * n
    ok = gn >= 1.0
    gn_safe = np.where(ok, gn, 1.0)
    if "delta_est" in fixed:
        delta_est = np.full_like(g, fixed["delta_est"])
    else:
        delta_est = mu * np.sqrt(math.log(2.0 / completeness) / (2.0 * gn_safe))
    eps_est = np.exp(-2.0 * gn * delta_est**2)
    if "eps_ec_prime" in fixed:
        eps_ecp = np.full_like(g, fixed["eps_ec_prime"])
    else:
        eps_ecp = completeness - 2.0 * eps_ec - eps_est
    ok &= (eps_ecp > 0.0) & (eps_ecp < 1.0)
    ok &= eps_ecp + 2.0 * eps_ec + eps_est <= completeness * (1.0 + 1e-12)
    ok &= (eps_abort > 0.0) & (eps_abort + eps_ec <= soundness * (1.0 + 1e-12))
    eps_ecp = np.where(ok, eps_ecp, 0.5 * completeness)

    params = {
        "gamma": g, "delta_est": delta_est, "eps_ec": eps_ec, "eps_pa": eps_pa,
        "eps_smooth": eps_s, "eps_ec_prime": eps_ecp,
    }
    with np.errstate(all="ignore"):
        if attack == "coherent":
            eps_t = np.full_like(g, fixed["eps_t"]) if "eps_t" in fixed else (mg * eps_ecp / 2.0) ** 2
            ok &= eps_ecp > 2.0 * np.sqrt(eps_t)
            entropy, leak, sqrt_terms, const, pt, valid = fr.coherent_terms(
                n, g, omega_exp, q, delta_est, eps_s, eps_ec, eps_ecp, eps_pa, eps_abort, eps_t,
                pt_ratio=fixed.get("pt_ratio"), eat_factor=config.eat_factor,
            )
            ok &= valid
            params.update(eps_ea=eps_abort, eps_t=eps_t, pt_ratio=pt, delta_con=np.zeros_like(g))
        else:
            if "delta_con" in fixed:
                delta_con = np.full_like(g, fixed["delta_con"])
            else:
                delta_con = np.sqrt(np.log(1.0 / eps_abort) / (2.0 * gn_safe))
            entropy, leak, sqrt_terms, const = fr.collective_terms(
                attack, n, g, omega_exp, q, delta_est, delta_con,
                eps_s, eps_ec, eps_ecp, eps_pa, eps_abort,
            )
            ok &= omega_exp - delta_est - delta_con > 0.75
            params.update(eps_con=eps_abort, delta_con=delta_con)
        total = entropy - leak - sqrt_terms - const
    total = np.where(ok & np.isfinite(total), total, -np.inf)
    return total, params


def _gamma_grid(config, fixed):
    if "gamma" in fixed:
        return np.array([fixed["gamma"]])
    return np.logspace(math.log10(config.gamma_min), math.log10(config.gamma_max), config.gamma_points)


def _best_over_rest(attack, n, omega_exp, q, gamma, soundness, completeness, config, fixed):
    total, params = _evaluate(attack, n, omega_exp, q, [gamma], soundness, completeness, config, fixed)
    i = int(np.argmax(total))
    return total[i], {k: float(v[i]) for k, v in params.items()}


def _search(attack, n, omega_exp, q, soundness, completeness, config, fixed):
    gammas = _gamma_grid(config, fixed)
    total, params = _evaluate(attack, n, omega_exp, q, gammas, soundness, completeness, config, fixed)
    i = int(np.argmax(total))
    best_total = total[i]
    best = {k: float(v[i]) for k, v in params.items()}
    if "gamma" in fixed or not np.isfinite(best_total):
        return best_total, best

    # golden-section refinement in log10(gamma) between the grid neighbours
    k = int(np.argmin(np.abs(gammas - best["gamma"])))
    a = math.log10(gammas[max(k - 1, 0)])
    b = math.log10(gammas[min(k + 1, len(gammas) - 1)])

    def f(log_g):
        return _best_over_rest(attack, n, omega_exp, q, 10.0**log_g, soundness, completeness, config, fixed)

    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > config.gamma_refine_tol:
        if fc[0] >= fd[0]:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    for cand in (fc, fd):
        if cand[0] > best_total:
            best_total, best = cand
    return best_total, best


def _normalize_point(beta, q):
    beta = float(beta)
    if beta < 0:
        raise ValueError(f"beta={beta!r} must be non-negative")
    beta = min(beta, TSIRELSON)
    if not (0.0 <= q <= 0.5):
        raise ValueError(f"q={q!r} is outside [0, 1/2]")
    return beta, float(q)


def optimize_rate(
    attack_kind: str,
    beta: float,
    q: float,
    n: float,
    soundness_target: float = DEFAULT_SOUNDNESS,
    completeness_target: float = DEFAULT_COMPLETENESS,
    config: Optional[OptimizerConfig] = None,
    fixed: Optional[dict] = None,
) -> fr.KeyLengthBreakdown:
    """Best key length over all free parameters, subject to the security targets.

    ``fixed`` pins any of :data:`FIXABLE` instead of searching it. When no
    candidate is feasible the least-negative breakdown found is returned
    with ``feasible=False``.
    """
    if attack_kind not in fr.ATTACK_KINDS:
        raise ValueError(f"unknown attack kind {attack_kind!r}; expected one of {fr.ATTACK_KINDS}")
    if not (0.0 < soundness_target < 1.0 and 0.0 < completeness_target < 1.0):
        raise ValueError("security targets must lie in (0, 1)")
    config = config or OptimizerConfig()
    fixed = dict(fixed or {})
    unknown = set(fixed) - set(FIXABLE)
    if unknown:
        raise ValueError(f"cannot fix {sorted(unknown)}; fixable: {FIXABLE}")
    beta, q = _normalize_point(beta, q)
    n = float(n)
    omega_exp = min(beta_to_omega(beta), OMEGA_MAX)

    total, best = _search(attack_kind, n, omega_exp, q, soundness_target, completeness_target, config, fixed)
    context = {
        "beta": beta, "qber": q, "soundness_target": soundness_target,
        "completeness_target": completeness_target, "optimizer": config.to_dict(),
        "fixed": sorted(fixed),
    }
    if not np.isfinite(total):
        return _infeasible(attack_kind, n, omega_exp, q, context)

    params = fr.ProtocolParams(
        n=n, gamma=best["gamma"], omega_exp=omega_exp, q=q,
        delta_est=best["delta_est"], delta_con=best.get("delta_con", 0.0),
    )
    budget = fr.SecurityBudget(
        eps_smooth=best["eps_smooth"], eps_ec=best["eps_ec"], eps_ec_prime=best["eps_ec_prime"],
        eps_pa=best["eps_pa"], eps_ea=best.get("eps_ea"), eps_con=best.get("eps_con"), eps_t=best.get("eps_t"),
    )
    if attack_kind == "coherent":
        result = fr.key_length_coherent(
            params, budget, tangent=fr.TradeoffTangent(best["pt_ratio"]), eat_factor=config.eat_factor
        )
    else:
        result = fr.key_length(attack_kind, params, budget)
    result.chosen_params.update(context)
    result.chosen_params["completeness"] = fr.completeness_bound(params, budget)
    return result


def _infeasible(attack, n, omega_exp, q, context):
    leak = n * float(fr._h(q))
    out = fr._breakdown(attack, n, 0.0, leak, 0.0, 0.0, float("nan"), float("nan"), {}, valid=False)
    out.chosen_params.update(context)
    out.chosen_params["omega_exp"] = omega_exp
    return out


# ----------------------------------------------------------------------
# minimum rounds


@dataclass
class MinRoundsResult:
    attack: str
    beta: float
    q: float
    status: str  # "feasible", "infeasible" or "infeasible-at-bound"
    n_min: Optional[int]
    asymptotic_rate: float
    history: list = field(default_factory=list)
    breakdown: Optional[fr.KeyLengthBreakdown] = None

    @property
    def value(self):
        """The count, or the status string when no count exists."""
        return self.n_min if self.status == "feasible" else self.status

    def to_dict(self) -> dict:
        out = asdict(self)
        out["breakdown"] = None if self.breakdown is None else self.breakdown.to_dict()
        return out


def bound_kind_for(attack_kind: str) -> str:
    return "collision" if attack_kind == "collective-h2" else "von_neumann"


def min_rounds(
    attack_kind: str,
    beta: float,
    q: float,
    soundness_target: float = DEFAULT_SOUNDNESS,
    completeness_target: float = DEFAULT_COMPLETENESS,
    config: Optional[OptimizerConfig] = None,
    fixed: Optional[dict] = None,
    upper_hint: Optional[float] = None,
) -> MinRoundsResult:
    """Smallest n with a positive optimized key length.

    Decade bracketing in n followed by bisection on log n down to
    ``config.bisection_rel_width``. ``upper_hint`` is a round count believed
    feasible (e.g. from a neighbouring cell); it only narrows the bracket
    and is verified before use.
    """
    config = config or OptimizerConfig()
    beta, q = _normalize_point(beta, q)
    asym = asymptotic_rate(beta, q, bound_kind_for(attack_kind))
    result = MinRoundsResult(attack_kind, beta, q, INFEASIBLE, None, asym)
    if asym <= 0.0:
        return result

    cache = {}

    def probe(n):
        n = float(n)
        if n not in cache:
            bd = optimize_rate(attack_kind, beta, q, n, soundness_target, completeness_target, config, fixed)
            cache[n] = bd
            result.history.append({"n": n, "feasible": bd.feasible, "total_l": bd.total_l})
        return cache[n].feasible

    lo = hi = None
    if upper_hint is not None and upper_hint <= 10.0**config.log_n_max and probe(upper_hint):
        hi = float(upper_hint)
        cand = hi / 10.0
        while cand >= 10.0**config.log_n_min and probe(cand):
            hi, cand = cand, cand / 10.0
        lo = cand
    else:
        exp10 = config.log_n_min
        if probe(10.0**exp10):
            hi = 10.0**exp10
            lo = 0.0
        else:
            while True:
                lo = 10.0**exp10
                exp10 += 1.0
                if exp10 > config.log_n_max:
                    result.status = INFEASIBLE_AT_BOUND
                    return result
                if probe(10.0**exp10):
                    hi = 10.0**exp10
                    break

    if lo >= 10.0**config.log_n_min:
        while hi / lo > 1.0 + config.bisection_rel_width:
            mid = math.sqrt(lo * hi)
            if probe(mid):
                hi = mid
            else:
                lo = mid

    # monotonicity: everything probed above hi must be feasible, everything at or below lo not
    bad = [h for h in result.history if (h["n"] >= hi and not h["feasible"]) or (h["n"] <= lo and h["feasible"])]
    if bad:
        raise MonotonicityError(f"feasibility not monotone in n for {attack_kind} beta={beta} q={q}: {bad}")
    # report a whole number of rounds; rounding up keeps the count feasible
    n_min = math.ceil(hi - 1e-9 * hi)
    if not probe(n_min):
        raise MonotonicityError(f"n={n_min} infeasible although n={hi!r} is feasible")
    result.status = "feasible"
    result.n_min = int(n_min)
    result.breakdown = cache[float(n_min)]
    return result


# ----------------------------------------------------------------------
# region scan


@dataclass
class RegionCell:
    q: float
    beta: float
    asymptotic_rate: float
    min_rounds: object  # float count or a status string
    feasible_at: dict = field(default_factory=dict)

    @property
    def infeasible(self) -> bool:
        return isinstance(self.min_rounds, str)


def _scan_row(args):
    q, betas, attack, thresholds, soundness, completeness, config = args
    row = []
    hint = None
    # walk beta downward so each feasible cell bounds the next one from above
    for beta in sorted(betas, reverse=True):
        res = min_rounds(attack, beta, q, soundness, completeness, config, upper_hint=hint)
        value = res.value
        hint = res.n_min if res.status == "feasible" else None
        feasible_at = {t: (not isinstance(value, str)) and value <= t for t in thresholds}
        row.append(RegionCell(q=q, beta=beta, asymptotic_rate=res.asymptotic_rate, min_rounds=value, feasible_at=feasible_at))
    row.sort(key=lambda c: c.beta)
    return row


def region_scan(
    beta_range: Sequence[float],
    q_range: Sequence[float],
    grid_counts: Sequence[int],
    attack_kind: str,
    n_thresholds: Sequence[float] = (),
    soundness_target: float = DEFAULT_SOUNDNESS,
    completeness_target: float = DEFAULT_COMPLETENESS,
    config: Optional[OptimizerConfig] = None,
    workers: int = 1,
) -> list:
    """Minimum rounds over a (QBER, beta) grid, row-major with QBER as the row index.

    ``grid_counts`` is ``(rows, cols)``: the number of QBER values and of
    beta values. Rows are independent and may be evaluated by ``workers``
    processes; the output order does not depend on it.
    """
    rows, cols = (int(c) for c in grid_counts)
    if rows < 2 or cols < 2:
        raise ValueError("grid counts must be at least 2")
    config = config or OptimizerConfig()
    qs = np.linspace(q_range[0], q_range[1], rows)
    betas = [float(b) for b in np.linspace(beta_range[0], beta_range[1], cols)]
    thresholds = tuple(float(t) for t in n_thresholds)
    tasks = [(float(q), betas, attack_kind, thresholds, soundness_target, completeness_target, config) for q in qs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_row, tasks))
    else:
        results = [_scan_row(t) for t in tasks]
    return [cell for row in results for cell in row]


def qber_threshold(bound_kind: str = "von_neumann", tol: float = 1e-12) -> float:
    """QBER where the asymptotic depolarizing rate bound(2 sqrt(2)(1-2Q)) - h(Q) crosses zero."""
    from scipy.optimize import brentq

    def rate(q):
        return asymptotic_rate(TSIRELSON * (1.0 - 2.0 * q), q, bound_kind)

    return brentq(rate, 1e-6, 0.25, xtol=tol)
