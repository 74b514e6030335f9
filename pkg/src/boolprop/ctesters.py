"""Classical baselines: randomized identity and balancedness testers and the
zero-error deterministic correlation decider.

Every point evaluation of every function is one classical query, so a loop
iteration of the identity tester costs two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from boolprop.boolfn import to_fraction
from boolprop.errors import ArityError, RepresentabilityError
from boolprop.oracle import OracleHandle, as_handle
from boolprop.verdict import (
    BALANCED,
    CORR_EPS,
    CORR_ONE,
    EPS_FAR,
    EPS_FAR_BALANCED,
    IDENTICAL,
    PROMISE_VIOLATED,
    Verdict,
)


@dataclass(frozen=True)
class ClassicalConfig:
    """Sample sizes and thresholds derived from epsilon.

    r_identity is the number of loop iterations of "while r <= ln3/eps"
    starting from r = 0, i.e. the smallest integer exceeding ln3/eps.
    T_balance = ceil(25/eps^2) is the smallest size meeting
    delta*T / sqrt(T c (1-c)) >= 1 with delta = eps/10 and c(1-c) <= 1/4.
    """

    epsilon: Fraction
    r_identity: int
    T_balance: int
    delta: Fraction
    threshold: Fraction

    @classmethod
    def from_epsilon(cls, epsilon) -> "ClassicalConfig":
        eps = to_fraction(epsilon)
        if not 0 < eps < 1:
            raise ValueError(f"epsilon={epsilon} outside (0, 1)")
        r = math.floor(math.log(3) / float(eps)) + 1
        T = math.ceil(25 / eps ** 2)
        return cls(eps, r, T, eps / 10, eps / 2)


def _rng(seed, rng) -> np.random.Generator:
    return rng if rng is not None else np.random.default_rng(seed)


def _pair(of, og):
    of, og = as_handle(of), as_handle(og)
    if of.n != og.n:
        raise ArityError(f"arity mismatch: {of.n} vs {og.n}")
    return of, og


def classical_identity(of: OracleHandle, og: OracleHandle, epsilon, seed: int | None = None,
                       rng: np.random.Generator | None = None) -> Verdict:
    """Sample points uniformly with replacement; reject at the first disagreement."""
    of, og = _pair(of, og)
    cfg = ClassicalConfig.from_epsilon(epsilon)
    gen = _rng(seed, rng)
    size = 1 << of.n
    before = of.classical_queries + og.classical_queries
    witness = None
    for _ in range(cfg.r_identity):
        x = int(gen.integers(size))
        if of.query(x) != og.query(x):
            witness = x
            break
    used = of.classical_queries + og.classical_queries - before
    return Verdict(
        algorithm="classical_identity",
        decision=IDENTICAL if witness is None else EPS_FAR,
        classical_queries=used,
        seed=seed,
        details={"r_identity": cfg.r_identity, "witness": witness},
    )


def classical_balance(of: OracleHandle, epsilon, seed: int | None = None,
                      rng: np.random.Generator | None = None) -> Verdict:
    """Estimate C(f) from T i.i.d. uniform samples; balanced iff |C'| <= eps/2.

    C' is normalised by T, so it is an unbiased estimate of C(f).
    """
    of = as_handle(of)
    cfg = ClassicalConfig.from_epsilon(epsilon)
    gen = _rng(seed, rng)
    T = cfg.T_balance
    before = of.classical_queries
    values = of.query_many(gen.integers(0, 1 << of.n, size=T))
    total = T - 2 * int(values.sum(dtype=np.int64))
    estimate = Fraction(total, T)
    return Verdict(
        algorithm="classical_balance",
        decision=BALANCED if abs(estimate) <= cfg.threshold else EPS_FAR_BALANCED,
        classical_queries=of.classical_queries - before,
        seed=seed,
        details={"T": T, "estimate": total / T},
    )


def correlation_hypotheses(n: int, epsilon) -> list[tuple[int, str]]:
    """Possible agreement counts under the promise |C(f,g)| in {eps, 1}."""
    size = 1 << n
    eps = to_fraction(epsilon)
    if not 0 <= eps < 1:
        raise ValueError(f"epsilon={epsilon} outside [0, 1)")
    low = (1 - eps) * size / 2
    if low.denominator != 1:
        raise RepresentabilityError(
            f"(1 - eps) N / 2 = {low} is not an integer for n={n}, eps={epsilon}"
        )
    low = int(low)
    return [(size, CORR_ONE), (0, CORR_ONE), (size - low, CORR_EPS), (low, CORR_EPS)]


def deterministic_correlation(of: OracleHandle, og: OracleHandle, epsilon) -> Verdict:
    """Zero-error decision between |C(f,g)| = 1 and |C(f,g)| = epsilon.

    Inputs are evaluated in index order.  After each point the agreement
    totals still consistent with the observations are those A with
    agreements <= A and disagreements <= N - A; the decider halts once all
    of them belong to one promise branch, or reports a promise violation if
    none is left.
    """
    of, og = _pair(of, og)
    size = 1 << of.n
    hyps = correlation_hypotheses(of.n, epsilon)
    before = of.classical_queries + og.classical_queries
    agree = disagree = 0
    decision = PROMISE_VIOLATED
    for x in range(size):
        if of.query(x) == og.query(x):
            agree += 1
        else:
            disagree += 1
        branches = {b for A, b in hyps if agree <= A and disagree <= size - A}
        if len(branches) == 1:
            decision = branches.pop()
            break
        if not branches:
            break
    used = of.classical_queries + og.classical_queries - before
    return Verdict(
        algorithm="deterministic_correlation",
        decision=decision,
        classical_queries=used,
        outcome_probabilities={decision: 1.0},
        details={"points": agree + disagree, "agreements": agree, "disagreements": disagree},
    )


def worst_case_queries(n: int, epsilon) -> tuple[int, int]:
    """((1 - eps) N + 2, (1 + eps) N + 2)."""
    size = 1 << n
    eps = to_fraction(epsilon)
    return int((1 - eps) * size) + 2, int((1 + eps) * size) + 2
