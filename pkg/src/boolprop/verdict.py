"""Tester outcomes shared by the quantum and classical testers."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

IDENTICAL = "identical"
EPS_FAR = "eps_far"
CORR_ONE = "corr_one"
CORR_EPS = "corr_eps"
BALANCED = "balanced"
EPS_FAR_BALANCED = "eps_far_balanced"
PROMISE_VIOLATED = "promise_violated"

DECISIONS = (
    IDENTICAL, EPS_FAR, CORR_ONE, CORR_EPS, BALANCED, EPS_FAR_BALANCED, PROMISE_VIOLATED,
)


@dataclass
class Verdict:
    """Decision of one tester run plus everything needed to audit it.

    ``outcome_probabilities`` maps each possible decision to its exact
    probability when the tester is simulated exactly (quantum testers,
    deterministic classical decisions); it is None for Monte Carlo runs.
    """

    algorithm: str
    decision: str
    quantum_queries: int = 0
    classical_queries: int = 0
    measured_z: int | None = None
    outcome_probabilities: dict[str, float] | None = None
    plan: dict | None = None
    seed: int | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.decision not in DECISIONS:
            raise ValueError(f"unknown decision {self.decision!r}")

    def probability(self, decision: str) -> float:
        if self.outcome_probabilities is None:
            raise ValueError("verdict carries no exact outcome distribution")
        return self.outcome_probabilities.get(decision, 0.0)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Verdict":
        return cls(**d)
