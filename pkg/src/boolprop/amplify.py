"""Exact statevector simulation of the n-qubit working register.

The |-> ancilla that turns U_f into a phase kick-back is never stored: because
U_f |x>|-> = (-1)^f(x) |x>|->, the register stays in product form and every
oracle is a diagonal +-1 on n qubits.  Amplitudes are complex128; the state
is updated in place.

Amplitude amplification follows Q = -A S_0(phi0) A^-1 S_chi(phichi), with the
leading minus sign kept literally.  A is H^n . D_fk ... D_f1 . H^n and its
inverse applies the same diagonals in reverse order (they are involutions and
H^n is self-inverse), so each application of A or A^-1 charges one query per
function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence, Union

import numpy as np

from boolprop.boolfn import BooleanFunction, fwht
from boolprop.errors import ArityError
from boolprop.oracle import OracleHandle

MAX_QUBITS = 16

GOOD_NONZERO = "nonzero"
GOOD_ZERO = "zero"

Good = Union[str, np.ndarray, Callable[[np.ndarray], np.ndarray]]
FunctionLike = Union[BooleanFunction, OracleHandle]


class StateVector:
    """2**n complex amplitudes indexed like truth tables (x_1 most significant)."""

    __slots__ = ("n", "amps")

    def __init__(self, n: int, amps: np.ndarray | None = None):
        if not 1 <= n <= MAX_QUBITS:
            raise ArityError(f"statevector arity {n} outside 1..{MAX_QUBITS}")
        self.n = n
        if amps is None:
            amps = np.zeros(1 << n, dtype=np.complex128)
            amps[0] = 1.0
        else:
            amps = np.array(amps, dtype=np.complex128)
            if amps.shape != (1 << n,):
                raise ArityError(f"expected {1 << n} amplitudes, got shape {amps.shape}")
        self.amps = amps

    @classmethod
    def zero(cls, n: int) -> "StateVector":
        return cls(n)

    @classmethod
    def uniform(cls, n: int) -> "StateVector":
        return cls(n, np.full(1 << n, (1 << n) ** -0.5, dtype=np.complex128))

    @property
    def arity(self) -> int:
        return self.n

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def __repr__(self):
        return f"StateVector(n={self.n}, norm2={self.norm_squared():.15g})"

    def dump(self) -> str:
        """One ``index real imag`` line per amplitude, 17 significant digits."""
        return "".join(
            f"{i} {a.real:.17g} {a.imag:.17g}\n" for i, a in enumerate(self.amps)
        )


def _phase(angle: float) -> complex:
    # exact +-1 for the sign-flip special cases keeps real states real
    if angle == math.pi or angle == -math.pi:
        return -1.0 + 0.0j
    if angle == 0.0:
        return 1.0 + 0.0j
    return complex(math.cos(angle), math.sin(angle))


def good_mask(n: int, good: Good) -> np.ndarray:
    """Boolean mask over basis indices selecting the good states."""
    size = 1 << n
    if isinstance(good, str):
        mask = np.ones(size, dtype=bool)
        if good == GOOD_NONZERO:
            mask[0] = False
        elif good == GOOD_ZERO:
            mask[:] = False
            mask[0] = True
        else:
            raise ValueError(f"unknown good predicate {good!r}")
        return mask
    if callable(good):
        mask = np.asarray(good(np.arange(size)), dtype=bool)
    else:
        mask = np.asarray(good, dtype=bool)
    if mask.shape != (size,):
        raise ArityError(f"good mask has shape {mask.shape}, expected ({size},)")
    return mask


def _check(state: StateVector, n: int) -> None:
    if state.n != n:
        raise ArityError(f"arity mismatch: state has {state.n} qubits, function has {n}")


def apply_hadamard(state: StateVector) -> StateVector:
    """H on every qubit."""
    fwht(state.amps)
    state.amps *= (1 << state.n) ** -0.5
    return state


def apply_phase_oracle(state: StateVector, f: FunctionLike) -> StateVector:
    """amps[x] <- (-1)^f(x) amps[x]; one quantum query if ``f`` is a handle."""
    _check(state, f.n)
    signs = f.phase_signs() if isinstance(f, OracleHandle) else f.signs
    state.amps *= signs
    return state


def apply_S_chi(state: StateVector, good: Good, phi: float) -> StateVector:
    """Multiply good amplitudes by e^{i phi}."""
    mask = good_mask(state.n, good)
    state.amps[mask] *= _phase(phi)
    return state


def apply_S_0(state: StateVector, phi: float) -> StateVector:
    """Multiply the |0...0> amplitude by e^{i phi}."""
    state.amps[0] *= _phase(phi)
    return state


def _functions(fs) -> tuple:
    if isinstance(fs, (BooleanFunction, OracleHandle)):
        fs = (fs,)
    fs = tuple(fs)
    if not fs:
        raise ValueError("at least one function is required")
    n = fs[0].n
    for f in fs[1:]:
        if f.n != n:
            raise ArityError(f"arity mismatch: {n} vs {f.n}")
    if n > MAX_QUBITS:
        raise ArityError(f"arity {n} exceeds the statevector limit of {MAX_QUBITS}")
    return fs


def apply_A(state: StateVector, fs: Sequence[FunctionLike]) -> StateVector:
    fs = _functions(fs)
    _check(state, fs[0].n)
    apply_hadamard(state)
    for f in fs:
        apply_phase_oracle(state, f)
    return apply_hadamard(state)


def apply_A_inverse(state: StateVector, fs: Sequence[FunctionLike]) -> StateVector:
    fs = _functions(fs)
    _check(state, fs[0].n)
    apply_hadamard(state)
    for f in reversed(fs):
        apply_phase_oracle(state, f)
    return apply_hadamard(state)


def prepare_A(fs) -> StateVector:
    """A|0> for A = H^n D_f (D_g) H^n, i.e. sum_z W_h(z)|z> with h = f xor g."""
    fs = _functions(fs)
    return apply_A(StateVector.zero(fs[0].n), fs)


@dataclass(frozen=True)
class AmplificationPlan:
    """Parameters for a run of amplitude amplification.

    ``rounds`` lists the number of Q applications in each independent run of
    prepare-amplify-measure; ``iterations`` is their total.  ``a`` and
    ``theta`` are the success probability (exact, or a lower bound in bound
    mode) and its angle, sin^2(theta) = a.
    """

    epsilon: float
    good: str
    rounds: tuple[int, ...]
    phase_s0: float = math.pi
    phase_schi: float = math.pi
    mode: str = "bound"
    a: float | None = None
    theta: float | None = None
    grover_iterations: int | None = None
    warning: str | None = None

    def __post_init__(self):
        if any(m < 0 for m in self.rounds) or not self.rounds:
            raise ValueError(f"rounds must be non-empty and non-negative, got {self.rounds}")
        for name in ("phase_s0", "phase_schi"):
            p = getattr(self, name)
            if not -math.pi < p <= math.pi:
                raise ValueError(f"{name}={p} outside (-pi, pi]")

    @property
    def iterations(self) -> int:
        return sum(self.rounds)

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "good": self.good,
            "rounds": list(self.rounds),
            "iterations": self.iterations,
            "phase_s0": self.phase_s0,
            "phase_schi": self.phase_schi,
            "mode": self.mode,
            "a": self.a,
            "theta": self.theta,
            "grover_iterations": self.grover_iterations,
            "warning": self.warning,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AmplificationPlan":
        return cls(
            epsilon=d["epsilon"],
            good=d["good"],
            rounds=tuple(d["rounds"]),
            phase_s0=d["phase_s0"],
            phase_schi=d["phase_schi"],
            mode=d["mode"],
            a=d.get("a"),
            theta=d.get("theta"),
            grover_iterations=d.get("grover_iterations"),
            warning=d.get("warning"),
        )


def apply_Q(
    state: StateVector,
    fs,
    plan: AmplificationPlan | None = None,
    *,
    good: Good | None = None,
    phase_s0: float | None = None,
    phase_schi: float | None = None,
) -> StateVector:
    """One application of -A S_0(phase_s0) A^-1 S_chi(phase_schi).

    Phases and the good predicate come from ``plan`` unless given explicitly;
    pi phases recover the plain sign-flip iterate.
    """
    fs = _functions(fs)
    _check(state, fs[0].n)
    if good is None:
        good = plan.good if plan is not None else GOOD_NONZERO
    if phase_s0 is None:
        phase_s0 = plan.phase_s0 if plan is not None else math.pi
    if phase_schi is None:
        phase_schi = plan.phase_schi if plan is not None else math.pi
    apply_S_chi(state, good, phase_schi)
    apply_A_inverse(state, fs)
    apply_S_0(state, phase_s0)
    apply_A(state, fs)
    state.amps *= -1.0
    return state


def good_probability(state: StateVector, good: Good) -> float:
    mask = good_mask(state.n, good)
    a = state.amps[mask]
    return float(np.vdot(a, a).real)


def split_good_bad(state: StateVector, good: Good) -> tuple[np.ndarray, np.ndarray]:
    """Projections of the amplitudes onto the good and bad subspaces."""
    mask = good_mask(state.n, good)
    good_part = np.where(mask, state.amps, 0)
    return good_part, state.amps - good_part


def measure_distribution(state: StateVector) -> np.ndarray:
    p = np.abs(state.amps) ** 2
    return p


def sample(state: StateVector, rng: np.random.Generator) -> int:
    p = measure_distribution(state)
    return int(rng.choice(p.size, p=p / p.sum()))


# --- iteration counts ---------------------------------------------------------

def theta_of(a: float) -> float:
    """theta in [0, pi/2] with sin^2(theta) = a."""
    a = min(max(a, 0.0), 1.0)
    return math.asin(math.sqrt(a))


def grover_iterations(theta: float) -> int:
    """floor(pi / (4 theta)); zero when there is nothing to amplify."""
    if theta <= 0.0:
        return 0
    # absorb rounding so theta = pi/4 from asin(sqrt(1/2)) still gives 1
    return math.floor(math.pi / (4.0 * theta) + 1e-9)


def _first_bad(fail: np.ndarray, theta: np.ndarray, k: int | None, start: int,
               limit: float, chunk: int = 4096) -> int:
    """Index of the first grid point at or after ``start`` whose failure
    (optionally times cos^2(k theta)) exceeds ``limit``."""
    size = fail.size
    i = start
    while i < size:
        seg = fail[i:i + chunk]
        if k is not None:
            seg = seg * np.cos(k * theta[i:i + chunk]) ** 2
        bad = np.flatnonzero(seg > limit)
        if bad.size:
            return i + int(bad[0])
        i += chunk
    return size


def _greedy_cover(theta: np.ndarray, limit: float, k_cap: int) -> list[int]:
    fail = np.ones(theta.size)
    ks: list[int] = []
    start = 0
    while True:
        start = _first_bad(fail, theta, None, start, limit)
        if start == theta.size:
            return ks
        t, f_t = theta[start], fail[start]
        best = None
        for k in range(1, k_cap + 1, 2):
            if k in ks or f_t * math.cos(k * t) ** 2 > limit:
                continue
            reach = _first_bad(fail, theta, k, start, limit)
            if best is None or reach > best[0]:
                best = (reach, k)
        if best is None:
            raise ValueError(f"no round covers theta={t:.6g}")
        ks.append(best[1])
        fail *= np.cos(best[1] * theta) ** 2


@lru_cache(maxsize=256)
def cover_schedule(theta_lo: float, theta_hi: float, target: float = 0.25) -> tuple[int, ...]:
    """Iteration counts m_1, m_2, ... for independent amplification rounds such
    that for every theta in [theta_lo, theta_hi] the probability that no round
    ends in a good state, prod_j cos^2((2 m_j + 1) theta), is at most ``target``.

    Greedy from the bottom of the interval: at the lowest uncovered angle, add
    the round that extends the covered prefix furthest (ties go to fewer
    iterations).  The grid spacing is charged against the Lipschitz constant
    of the failure product (at most sum_j (2 m_j + 1)), so the bound also holds
    between grid points.
    """
    if theta_hi <= theta_lo:
        return (grover_iterations(theta_lo),)
    k_cap = 2 * grover_iterations(theta_lo) + 3
    width = theta_hi - theta_lo
    points = max(4097, int(64 * width * k_cap / target) + 1)
    for _ in range(6):
        h = width / (points - 1)
        limit = target - 1e-6 - 0.5 * h * 2 * k_cap
        theta = np.linspace(theta_lo, theta_hi, points)
        ks = _greedy_cover(theta, limit, k_cap)
        # recheck with the Lipschitz constant of the schedule actually chosen
        fail = np.prod([np.cos(k * theta) ** 2 for k in ks], axis=0)
        if fail.max() + 0.5 * h * sum(ks) <= target:
            return tuple((k - 1) // 2 for k in ks)
        points = 4 * points - 3
    raise ValueError(f"could not certify a cover of [{theta_lo}, {theta_hi}]")
