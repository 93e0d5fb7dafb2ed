"""Reported Bell-test parameters and their DIQKD feasibility.

The dataset ships as ``data/experiments.csv`` (columns name, beta,
beta_err, qber, qber_err, platform) and is parsed once per call into
immutable records.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass
from importlib import resources
from typing import Optional

from .chsh_math import TSIRELSON, asymptotic_rate
from .param_search import (
    DEFAULT_COMPLETENESS,
    DEFAULT_SOUNDNESS,
    OptimizerConfig,
    bound_kind_for,
    min_rounds,
)

__all__ = [
    "ExperimentRecord", "ExperimentVerdict", "builtin_experiments", "experiments_csv",
    "asymptotic_rate", "evaluate_experiment",
]

CSV_COLUMNS = ("name", "beta", "beta_err", "qber", "qber_err", "platform")


@dataclass(frozen=True)
class ExperimentRecord:
    name: str
    beta: float
    beta_err: float
    q: float
    q_err: float
    platform: str

    def __post_init__(self):
        if self.beta_err < 0 or self.q_err < 0:
            raise ValueError(f"{self.name}: error bars must be non-negative")
        if not (0.0 < self.beta <= TSIRELSON + 3.0 * self.beta_err):
            raise ValueError(f"{self.name}: beta={self.beta!r} is outside (0, 2 sqrt2 + 3 err]")
        if not (0.0 <= self.q < 0.5):
            raise ValueError(f"{self.name}: qber={self.q!r} is outside [0, 1/2)")

    def corner(self, pessimistic: bool) -> tuple:
        """(beta, q) at central values or shifted one error bar against the key rate."""
        if not pessimistic:
            return min(self.beta, TSIRELSON), self.q
        beta = min(max(self.beta - self.beta_err, 0.0), TSIRELSON)
        return beta, min(self.q + self.q_err, 0.5)


def experiments_csv() -> str:
    """Raw text of the bundled dataset."""
    return resources.files("diqkd").joinpath("data/experiments.csv").read_text(encoding="utf-8")


def builtin_experiments() -> tuple:
    reader = csv.DictReader(io.StringIO(experiments_csv()))
    if tuple(reader.fieldnames) != CSV_COLUMNS:
        raise RuntimeError(f"unexpected dataset columns {reader.fieldnames}")
    return tuple(
        ExperimentRecord(
            name=row["name"], beta=float(row["beta"]), beta_err=float(row["beta_err"]),
            q=float(row["qber"]), q_err=float(row["qber_err"]), platform=row["platform"],
        )
        for row in reader
    )


@dataclass
class ExperimentVerdict:
    name: str
    platform: str
    attack: str
    corner: str
    beta: float
    q: float
    asymptotic_rate: float
    verdict: str  # "feasible", "infeasible" or "infeasible-at-bound"
    min_rounds: object

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate_experiment(
    record: ExperimentRecord,
    attack_kind: str,
    soundness_target: float = DEFAULT_SOUNDNESS,
    completeness_target: float = DEFAULT_COMPLETENESS,
    pessimistic: bool = False,
    config: Optional[OptimizerConfig] = None,
) -> ExperimentVerdict:
    """Feasibility and minimum rounds for one record at one corner."""
    beta, q = record.corner(pessimistic)
    res = min_rounds(attack_kind, beta, q, soundness_target, completeness_target, config)
    return ExperimentVerdict(
        name=record.name, platform=record.platform, attack=attack_kind,
        corner="pessimistic" if pessimistic else "central",
        beta=beta, q=q, asymptotic_rate=asymptotic_rate(beta, q, bound_kind_for(attack_kind)),
        verdict=res.status, min_rounds=res.value,
    )
