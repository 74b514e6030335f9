"""Quantum testers for identity, exact correlation and balancedness.

All three start from A|0> = sum_z W_h(z)|z> and decide on the zero/nonzero
partition of the measured basis state.  Outcome probabilities are computed
exactly from the amplitudes; a measurement is also sampled so that a Verdict
looks like a real run.

Iteration counts come in three modes:

``oracle``
    m = floor(pi / (4 theta_a)) with the true success probability a.
``single``
    the same formula with a replaced by its epsilon-only lower bound.
``bound`` (default)
    independent rounds whose iteration counts are chosen from epsilon alone so
    that every success probability in the promised range is amplified to at
    least 3/4 overall; the tester rejects if any round sees a good state.
    Each round keeps the certain branch certain.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from boolprop.amplify import (
    GOOD_NONZERO,
    GOOD_ZERO,
    AmplificationPlan,
    apply_Q,
    cover_schedule,
    good_probability,
    grover_iterations,
    prepare_A,
    sample,
    theta_of,
)
from boolprop.boolfn import bias, dist, to_fraction
from boolprop.errors import ArityError
from boolprop.oracle import OracleHandle, as_handle
from boolprop.verdict import (
    BALANCED,
    CORR_EPS,
    CORR_ONE,
    EPS_FAR,
    EPS_FAR_BALANCED,
    IDENTICAL,
    Verdict,
)

MODES = ("bound", "single", "oracle")

# Largest distance for which identity testing keeps a <= 56/225 < 1/4.
IDENTITY_MAX_DIST = Fraction(1, 15)
# Largest |C(f)| for which balancedness testing keeps a <= 1/4.
BALANCE_MAX_BIAS = Fraction(1, 2)
CORRELATION_MAX_EPS = math.sqrt(3) / 2


def _eps(epsilon) -> float:
    return float(to_fraction(epsilon)) if isinstance(epsilon, (str, Fraction)) else float(epsilon)


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def _rng(seed, rng) -> np.random.Generator:
    if rng is not None:
        return rng
    return np.random.default_rng(seed)


def identity_success_bound(epsilon: float) -> float:
    """Lower bound on a when Dist(f, g) >= epsilon: 1 - (1 - 2 eps)^2."""
    return 4 * epsilon - 4 * epsilon * epsilon


def plan_identity(epsilon, mode: str = "bound", true_dist=None) -> AmplificationPlan:
    """Iteration plan for the identity tester; good states are z != 0.

    In bound/single modes an epsilon outside (0, 1/15] still yields a plan,
    but one carrying a warning: the 3/4 guarantee is not established there.
    """
    _check_mode(mode)
    eps = _eps(epsilon)
    if not 0 < eps < 1:
        raise ValueError(f"epsilon={epsilon} outside (0, 1)")
    warning = None
    if mode == "oracle":
        if true_dist is None:
            raise ValueError("oracle mode needs the true distance")
        d = _eps(true_dist)
        a = 1 - (1 - 2 * d) ** 2
        theta = theta_of(a)
        m = grover_iterations(theta)
        return AmplificationPlan(eps, GOOD_NONZERO, (m,), mode=mode, a=a, theta=theta,
                                 grover_iterations=m)
    a = identity_success_bound(eps)
    theta = theta_of(a)
    m = grover_iterations(theta)
    if eps > IDENTITY_MAX_DIST:
        warning = f"epsilon={eps:g} > 1/15: success probability 3/4 not guaranteed"
    if mode == "single" or warning:
        rounds = (m,)
    else:
        theta_hi = theta_of(float(identity_success_bound(IDENTITY_MAX_DIST)))
        rounds = cover_schedule(theta, theta_hi)
    return AmplificationPlan(eps, GOOD_NONZERO, rounds, mode=mode, a=a, theta=theta,
                             grover_iterations=m, warning=warning)


def plan_balance(epsilon, mode: str = "bound", true_bias=None) -> AmplificationPlan:
    """Iteration plan for the balancedness tester; the only good state is z = 0."""
    _check_mode(mode)
    eps = _eps(epsilon)
    if not 0 < eps <= BALANCE_MAX_BIAS:
        raise ValueError(f"epsilon={epsilon} outside (0, 1/2]")
    if mode == "oracle":
        if true_bias is None:
            raise ValueError("oracle mode needs the true bias")
        a = _eps(true_bias) ** 2
        theta = theta_of(a)
        m = grover_iterations(theta)
        return AmplificationPlan(eps, GOOD_ZERO, (m,), mode=mode, a=a, theta=theta,
                                 grover_iterations=m)
    a = eps * eps
    theta = math.asin(eps)
    m = grover_iterations(theta)
    if mode == "single":
        rounds = (m,)
    else:
        rounds = cover_schedule(theta, math.asin(float(BALANCE_MAX_BIAS)))
    return AmplificationPlan(eps, GOOD_ZERO, rounds, mode=mode, a=a, theta=theta,
                             grover_iterations=m)


def correlation_phase(epsilon: float) -> float:
    """2 arcsin(1 / (2 sqrt(1 - eps^2))), used for both phases."""
    x = 1.0 / (2.0 * math.sqrt(1.0 - epsilon * epsilon))
    return 2.0 * math.asin(min(x, 1.0))


def plan_correlation(epsilon) -> AmplificationPlan:
    eps = _eps(epsilon)
    if not 0 <= eps <= CORRELATION_MAX_EPS + 1e-12:
        raise ValueError(f"epsilon={epsilon} outside [0, sqrt(3)/2]")
    eps = min(eps, CORRELATION_MAX_EPS)
    phase = correlation_phase(eps)
    return AmplificationPlan(eps, GOOD_NONZERO, (1,), phase_s0=phase, phase_schi=phase,
                             mode="exact", a=1 - eps * eps, theta=theta_of(1 - eps * eps))


def _run_rounds(handles, plan: AmplificationPlan, rng):
    """Prepare, amplify and measure once per round.

    Returns per-round good probabilities, the sampled outcomes and the last
    final state.
    """
    p_good, outcomes, state = [], [], None
    for m in plan.rounds:
        state = prepare_A(handles)
        for _ in range(m):
            apply_Q(state, handles, plan)
        # rounding can push a certain outcome a few ulps past 1
        p_good.append(min(max(good_probability(state, plan.good), 0.0), 1.0))
        outcomes.append(sample(state, rng))
    return p_good, outcomes, state


def _quantum_total(handles) -> int:
    return sum(h.quantum_queries for h in handles)


def _pair(of, og):
    of, og = as_handle(of), as_handle(og)
    if of.n != og.n:
        raise ArityError(f"arity mismatch: {of.n} vs {og.n}")
    return of, og


def test_identity(of: OracleHandle, og: OracleHandle, epsilon, mode: str = "bound",
                  seed: int | None = None, rng: np.random.Generator | None = None,
                  true_dist=None, keep_state: bool = False) -> Verdict:
    """Decide f == g versus Dist(f, g) >= epsilon.

    Accepts ("identical") iff every round measures z = 0.  If f == g each
    round ends in |0> exactly, so the acceptance is certain.  Costs 4m + 2
    queries per round of m iterations.
    """
    of, og = _pair(of, og)
    if mode == "oracle" and true_dist is None:
        true_dist = dist(of.function, og.function)
    plan = plan_identity(epsilon, mode, true_dist)
    gen = _rng(seed, rng)
    before = _quantum_total((of, og))
    p_good, outcomes, state = _run_rounds((of, og), plan, gen)
    used = _quantum_total((of, og)) - before
    expected = sum(4 * m + 2 for m in plan.rounds)
    assert used == expected, f"identity tester used {used} queries, expected {expected}"

    p_accept = float(np.prod([1.0 - p for p in p_good]))
    rejected = [z for z in outcomes if z != 0]
    details = {"round_good_probabilities": p_good, "outcomes": outcomes}
    if keep_state:
        details["final_state"] = state
    return Verdict(
        algorithm="quantum_identity",
        decision=EPS_FAR if rejected else IDENTICAL,
        quantum_queries=used,
        measured_z=rejected[0] if rejected else 0,
        outcome_probabilities={IDENTICAL: p_accept, EPS_FAR: 1.0 - p_accept},
        plan=plan.to_dict(),
        seed=seed,
        details=details,
    )


def test_correlation_exact(of: OracleHandle, og: OracleHandle, epsilon,
                           seed: int | None = None, rng: np.random.Generator | None = None,
                           keep_state: bool = False) -> Verdict:
    """Decide |C(f, g)| = 1 versus |C(f, g)| = epsilon with one generalised
    iterate; both branches are certain under the promise.  Six queries."""
    of, og = _pair(of, og)
    plan = plan_correlation(epsilon)
    gen = _rng(seed, rng)
    before = _quantum_total((of, og))
    p_good, outcomes, state = _run_rounds((of, og), plan, gen)
    used = _quantum_total((of, og)) - before
    assert used == 6, f"correlation tester used {used} queries, expected 6"

    p_zero = 1.0 - p_good[0]
    z = outcomes[0]
    details = {"round_good_probabilities": p_good}
    if keep_state:
        details["final_state"] = state
    return Verdict(
        algorithm="quantum_correlation",
        decision=CORR_ONE if z == 0 else CORR_EPS,
        quantum_queries=used,
        measured_z=z,
        outcome_probabilities={CORR_ONE: p_zero, CORR_EPS: 1.0 - p_zero},
        plan=plan.to_dict(),
        seed=seed,
        details=details,
    )


def test_balance(of: OracleHandle, epsilon, mode: str = "bound", seed: int | None = None,
                 rng: np.random.Generator | None = None, true_bias=None,
                 keep_state: bool = False) -> Verdict:
    """Decide C(f) = 0 versus |C(f)| >= epsilon.

    Here z = 0 is the good state: the tester reports "balanced" iff no round
    measures z = 0, which is certain for balanced f since W_f(0) = 0 is
    preserved by every iterate.  Costs 2m + 1 queries per round.
    """
    of = as_handle(of)
    if mode == "oracle" and true_bias is None:
        true_bias = bias(of.function)
    plan = plan_balance(epsilon, mode, true_bias)
    gen = _rng(seed, rng)
    before = of.quantum_queries
    p_good, outcomes, state = _run_rounds((of,), plan, gen)
    used = of.quantum_queries - before
    expected = sum(2 * m + 1 for m in plan.rounds)
    assert used == expected, f"balance tester used {used} queries, expected {expected}"

    p_balanced = float(np.prod([1.0 - p for p in p_good]))
    hit = any(z == 0 for z in outcomes)
    details = {"round_good_probabilities": p_good, "outcomes": outcomes}
    if keep_state:
        details["final_state"] = state
    return Verdict(
        algorithm="quantum_balance",
        decision=EPS_FAR_BALANCED if hit else BALANCED,
        quantum_queries=used,
        measured_z=0 if hit else outcomes[-1],
        outcome_probabilities={BALANCED: p_balanced, EPS_FAR_BALANCED: 1.0 - p_balanced},
        plan=plan.to_dict(),
        seed=seed,
        details=details,
    )


# keep pytest from collecting the testers as tests when imported into test modules
for _fn in (test_identity, test_correlation_exact, test_balance):
    _fn.__test__ = False
