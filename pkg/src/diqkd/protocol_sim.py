"""Monte-Carlo simulation of the honest protocols.

An honest IID implementation shares the depolarized maximally entangled
state and measures along fixed Bloch directions. Outcomes are drawn from
the exact two-qubit distributions; the only stochastic element is the
seeded sampling. Protocol 2 runs a fixed number of rounds, Protocol 1
runs blocks that end at the first test round or after ``s_max`` rounds.

Randomness: numpy's PCG64 bit generator, one independent stream per
trial seeded by ``SeedSequence([seed, trial])``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .finite_rates import _s_max, _test_prob

GENERATOR_ID = "numpy.random.PCG64 seeded by SeedSequence([seed, trial])"

_Z = (0.0, 0.0, 1.0)
_X = (1.0, 0.0, 0.0)
_R = 1.0 / math.sqrt(2.0)
# correlation <sigma_u x sigma_v> on |Phi+> is u . diag(1, -1, 1) . v
_PHI_PLUS_CORR = np.diag([1.0, -1.0, 1.0])


def _unit(v, name):
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector, got shape {v.shape}")
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise ValueError(f"{name} must be unit norm, got |v| = {np.linalg.norm(v)!r}")
    return tuple(float(c) for c in v)


@dataclass(frozen=True)
class DeviceModel:
    """Measurement directions and depolarizing strength of an honest device pair.

    Defaults to the CHSH-optimal strategy: Alice Z, X; Bob (Z+X)/sqrt2,
    (Z-X)/sqrt2 and Z for key generation.
    """

    nu: float = 0.0
    alice: tuple = (_Z, _X)
    bob: tuple = ((_R, 0.0, _R), (-_R, 0.0, _R), _Z)

    def __post_init__(self):
        if not (0.0 <= self.nu <= 1.0):
            raise ValueError(f"nu={self.nu!r} is outside [0, 1]")
        if len(self.alice) != 2 or len(self.bob) != 3:
            raise ValueError("Alice needs 2 measurement directions and Bob 3")
        object.__setattr__(self, "alice", tuple(_unit(v, f"alice[{i}]") for i, v in enumerate(self.alice)))
        object.__setattr__(self, "bob", tuple(_unit(v, f"bob[{i}]") for i, v in enumerate(self.bob)))

    def correlator(self, x: int, y: int) -> float:
        u = np.asarray(self.alice[x])
        v = np.asarray(self.bob[y])
        return (1.0 - self.nu) * float(u @ _PHI_PLUS_CORR @ v)

    def winning_probability(self) -> float:
        """CHSH game winning probability with uniform inputs x, y in {0, 1}."""
        total = 0.0
        for x in (0, 1):
            for y in (0, 1):
                p = outcome_distribution(self, x, y)
                total += p[0, 0] + p[1, 1] if x * y == 0 else p[0, 1] + p[1, 0]
        return total / 4.0


def outcome_distribution(model: DeviceModel, x: int, y: int) -> np.ndarray:
    """2x2 array ``p[a, b]`` with bit 0 for eigenvalue +1.

    Marginals are uniform, so p(ab|xy) = (1 + (-1)^(a xor b) E_xy) / 4.
    """
    if x not in (0, 1) or y not in (0, 1, 2):
        raise ValueError(f"invalid inputs x={x!r}, y={y!r}")
    e = model.correlator(x, y)
    same = (1.0 + e) / 4.0
    diff = (1.0 - e) / 4.0
    return np.array([[same, diff], [diff, same]])


@dataclass(frozen=True)
class SimConfig:
    protocol: int
    gamma: float
    seed: int
    n: Optional[int] = None  # protocol 2
    blocks: Optional[int] = None  # protocol 1
    trials: int = 1

    def __post_init__(self):
        if self.protocol not in (1, 2):
            raise ValueError(f"protocol must be 1 or 2, got {self.protocol!r}")
        if not (0.0 < self.gamma <= 1.0):
            raise ValueError(f"gamma={self.gamma!r} is outside (0, 1]")
        if self.seed is None or not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise ValueError("an integer seed is required")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.protocol == 2:
            if self.n is None or self.n < 1 or self.blocks is not None:
                raise ValueError("protocol 2 needs n >= 1 rounds and no block count")
        elif self.blocks is None or self.blocks < 1 or self.n is not None:
            raise ValueError("protocol 1 needs blocks >= 1 and no round count")


@dataclass(frozen=True)
class AbortRule:
    omega_exp: float
    delta_est: float = 0.0


@dataclass
class TrialSummary:
    trial: int
    rounds: int
    test_rounds: int
    wins: int
    key_rounds: int
    key_errors: int
    bottom: int
    threshold: float
    aborted: bool


@dataclass
class SimReport:
    """Counts pooled over trials plus the per-trial summaries.

    ``aborted`` is set when any trial aborted; ``abort_count`` gives how many.
    """

    config: dict
    generator: str
    rounds_executed: int
    test_rounds: int
    c_counts: dict
    empirical_omega: float
    empirical_qber: float
    key_rounds: int
    mean_block_length: Optional[float]
    aborted: bool
    abort_count: int
    trials: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(trial)])))


def _sample_tests(rng, model, n_tests):
    """Number of won CHSH games among ``n_tests`` rounds with uniform inputs."""
    per_pair = rng.multinomial(n_tests, [0.25] * 4)
    wins = 0
    for k, (x, y) in zip(per_pair, ((0, 0), (0, 1), (1, 0), (1, 1))):
        p = outcome_distribution(model, x, y)
        p_win = p[0, 0] + p[1, 1] if x * y == 0 else p[0, 1] + p[1, 0]
        wins += int(rng.binomial(k, min(max(p_win, 0.0), 1.0)))
    return wins


def _sample_key_errors(rng, model, n_key):
    p = outcome_distribution(model, 0, 2)
    return int(rng.binomial(n_key, min(max(p[0, 1] + p[1, 0], 0.0), 1.0)))


def _run_trial(config, model, rule, trial):
    rng = _trial_rng(config.seed, trial)
    if config.protocol == 2:
        n = int(config.n)
        tests = int(rng.binomial(n, config.gamma))
        rounds = n
        bottom = 0
        block_rounds = None
        threshold = config.gamma * n * (rule.omega_exp - rule.delta_est)
    else:
        m = int(config.blocks)
        s_max = int(_s_max(config.gamma))
        first_test = rng.geometric(config.gamma, size=m)
        tested = first_test <= s_max
        lengths = np.minimum(first_test, s_max)
        # each block holds at most one test round, its last one
        tests = int(tested.sum())
        rounds = int(lengths.sum())
        bottom = m - tests
        block_rounds = rounds
        threshold = m * (rule.omega_exp - rule.delta_est) * float(_test_prob(config.gamma, s_max))
    wins = _sample_tests(rng, model, tests)
    key_rounds = rounds - tests
    key_errors = _sample_key_errors(rng, model, key_rounds)
    summary = TrialSummary(
        trial=trial, rounds=rounds, test_rounds=tests, wins=wins, key_rounds=key_rounds,
        key_errors=key_errors, bottom=bottom, threshold=threshold, aborted=bool(wins < threshold),
    )
    return summary, block_rounds


def run_protocol(config: SimConfig, model: Optional[DeviceModel] = None, abort_rule: Optional[AbortRule] = None) -> SimReport:
    """Simulate ``config.trials`` independent honest executions.

    Without an abort rule the threshold uses the model's own winning
    probability and zero width.
    """
    model = model or DeviceModel()
    rule = abort_rule or AbortRule(model.winning_probability(), 0.0)
    summaries = []
    total_blocks = 0
    total_block_rounds = 0
    for trial in range(config.trials):
        s, block_rounds = _run_trial(config, model, rule, trial)
        summaries.append(s)
        if block_rounds is not None:
            total_blocks += int(config.blocks)
            total_block_rounds += block_rounds
    tests = sum(s.test_rounds for s in summaries)
    wins = sum(s.wins for s in summaries)
    key_rounds = sum(s.key_rounds for s in summaries)
    key_errors = sum(s.key_errors for s in summaries)
    aborts = sum(s.aborted for s in summaries)
    echo = asdict(config)
    echo.update(nu=model.nu, omega_exp=rule.omega_exp, delta_est=rule.delta_est)
    return SimReport(
        config=echo,
        generator=GENERATOR_ID,
        rounds_executed=sum(s.rounds for s in summaries),
        test_rounds=tests,
        c_counts={"wins": wins, "losses": tests - wins, "bottom": sum(s.bottom for s in summaries)},
        empirical_omega=wins / tests if tests else float("nan"),
        empirical_qber=key_errors / key_rounds if key_rounds else float("nan"),
        key_rounds=key_rounds,
        mean_block_length=(total_block_rounds / total_blocks) if total_blocks else None,
        aborted=aborts > 0,
        abort_count=aborts,
        trials=summaries,
    )


@dataclass
class CompletenessEstimate:
    trials: int
    aborts: int
    frequency: float
    sigma: float
    interval: tuple  # Wilson score interval at z = 3

    def to_dict(self) -> dict:
        return asdict(self)


def empirical_completeness(
    config: SimConfig, model: Optional[DeviceModel], abort_rule: AbortRule, trials: int
) -> CompletenessEstimate:
    """Honest abort frequency over ``trials`` seed-derived executions."""
    if trials < 100:
        raise ValueError("empirical completeness needs at least 100 trials")
    cfg = SimConfig(
        protocol=config.protocol, gamma=config.gamma, seed=config.seed,
        n=config.n, blocks=config.blocks, trials=int(trials),
    )
    report = run_protocol(cfg, model, abort_rule)
    k, t = report.abort_count, cfg.trials
    f = k / t
    sigma = math.sqrt(f * (1.0 - f) / t)
    z = 3.0
    centre = (f + z * z / (2 * t)) / (1 + z * z / t)
    half = z * math.sqrt(f * (1 - f) / t + z * z / (4 * t * t)) / (1 + z * z / t)
    return CompletenessEstimate(t, k, f, sigma, (max(centre - half, 0.0), min(centre + half, 1.0)))
