import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boolprop.amplify import (
    GOOD_NONZERO,
    GOOD_ZERO,
    MAX_QUBITS,
    AmplificationPlan,
    StateVector,
    apply_A,
    apply_A_inverse,
    apply_hadamard,
    apply_phase_oracle,
    apply_Q,
    cover_schedule,
    good_mask,
    good_probability,
    grover_iterations,
    measure_distribution,
    prepare_A,
    sample,
    split_good_bad,
    theta_of,
)
from boolprop.boolfn import builtin, gen_random, walsh_spectrum_fast, xor
from boolprop.errors import ArityError
from boolprop.oracle import OracleHandle


def dense_hadamard(n):
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    out = np.array([[1.0]])
    for _ in range(n):
        out = np.kron(out, h)
    return out


def random_instance(rng, n_max=8):
    n = int(rng.integers(2, n_max + 1))
    fs = (gen_random(n, rng), gen_random(n, rng)) if rng.integers(2) else (gen_random(n, rng),)
    good = GOOD_NONZERO if rng.integers(2) else GOOD_ZERO
    return n, fs, good


def components(fs, good):
    """|Psi1>, |Psi0> (unnormalised good/bad parts of A|0>) and a."""
    psi = prepare_A(fs)
    g, b = split_good_bad(psi, good)
    return g, b, float(np.vdot(g, g).real)


def apply_Q_to(vec, n, fs, good, p0, pchi):
    s = StateVector(n, vec)
    apply_Q(s, fs, good=good, phase_s0=p0, phase_schi=pchi)
    return s.amps


class TestPrimitives:
    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_hadamard_matches_dense(self, n):
        v = np.random.default_rng(n).normal(size=1 << n) + 0j
        s = StateVector(n, v)
        apply_hadamard(s)
        assert np.allclose(s.amps, dense_hadamard(n) @ v, atol=1e-12)

    def test_hadamard_is_involution(self):
        v = np.random.default_rng(1).normal(size=256) * (1 + 1j)
        s = StateVector(8, v)
        apply_hadamard(apply_hadamard(s))
        assert np.allclose(s.amps, v, atol=1e-12)

    def test_A_prepares_walsh_amplitudes(self):
        rng = np.random.default_rng(2)
        f, g = gen_random(7, rng), gen_random(7, rng)
        psi = prepare_A((f, g))
        assert np.allclose(psi.amps.real, walsh_spectrum_fast(xor(f, g)).coeffs, atol=1e-12)
        assert np.allclose(psi.amps.imag, 0)

    def test_A_inverse_undoes_A(self):
        rng = np.random.default_rng(3)
        fs = (gen_random(6, rng), gen_random(6, rng))
        v = rng.normal(size=64) + 1j * rng.normal(size=64)
        s = StateVector(6, v)
        apply_A_inverse(apply_A(s, fs), fs)
        assert np.allclose(s.amps, v, atol=1e-12)

    def test_query_accounting(self):
        f, g = OracleHandle(gen_random(4, 0)), OracleHandle(gen_random(4, 1))
        s = prepare_A((f, g))
        assert f.quantum_queries == g.quantum_queries == 1
        apply_Q(s, (f, g))
        assert f.quantum_queries + g.quantum_queries == 6
        apply_phase_oracle(s, builtin("parity", 4))      # bare function: not counted
        assert f.quantum_queries + g.quantum_queries == 6

    def test_arity_checks(self):
        with pytest.raises(ArityError):
            apply_A(StateVector(3), (builtin("parity", 4),))
        with pytest.raises(ArityError):
            prepare_A((builtin("parity", 3), builtin("parity", 4)))
        with pytest.raises(ArityError):
            StateVector(MAX_QUBITS + 1)

    def test_good_mask(self):
        assert list(good_mask(2, GOOD_ZERO)) == [True, False, False, False]
        assert list(good_mask(2, GOOD_NONZERO)) == [False, True, True, True]
        assert list(good_mask(2, lambda z: z % 2 == 1)) == [False, True, False, True]

    def test_sampling_and_distribution(self):
        s = prepare_A((builtin("parity", 5),))
        assert measure_distribution(s)[31] == pytest.approx(1.0)
        assert sample(s, np.random.default_rng(0)) == 31

    def test_dump_format(self):
        s = StateVector(2, [0.5, -0.5, 0.5j, 1 / 3])
        lines = s.dump().splitlines()
        assert lines[0] == "0 0.5 0"
        assert lines[1] == "1 -0.5 0"
        assert lines[2] == "2 0 0.5"
        assert lines[3] == "3 0.33333333333333331 0"
        assert float(lines[3].split()[1]) == 1 / 3


class TestIterateAction:
    """Action of the generalised iterate on the two components of A|0>."""

    def test_coefficients_on_random_tuples(self):
        rng = np.random.default_rng(2024)
        checked = 0
        while checked < 200:
            n, fs, good = random_instance(rng)
            psi1, psi0, a = components(fs, good)
            if a < 1e-9 or a > 1 - 1e-9:
                continue
            p0, pchi = rng.uniform(-math.pi, math.pi, size=2)
            e0, echi = cmath.exp(1j * p0), cmath.exp(1j * pchi)
            got1 = apply_Q_to(psi1, n, fs, good, p0, pchi)
            want1 = echi * ((1 - e0) * a - 1) * psi1 + echi * (1 - e0) * a * psi0
            got0 = apply_Q_to(psi0, n, fs, good, p0, pchi)
            want0 = (1 - e0) * (1 - a) * psi1 - ((1 - e0) * a + e0) * psi0
            assert np.max(np.abs(got1 - want1)) < 1e-10
            assert np.max(np.abs(got0 - want0)) < 1e-10
            checked += 1

    def test_sign_flip_special_case(self):
        # with both phases pi: Q|Psi1> = (1 - 2a)|Psi1> - 2a|Psi0>
        rng = np.random.default_rng(7)
        for _ in range(20):
            n, fs, good = random_instance(rng)
            psi1, psi0, a = components(fs, good)
            got = apply_Q_to(psi1, n, fs, good, math.pi, math.pi)
            assert np.allclose(got, (1 - 2 * a) * psi1 - 2 * a * psi0, atol=1e-12)

    @pytest.mark.parametrize("seed", range(6))
    def test_rotation_closed_form(self, seed):
        rng = np.random.default_rng(100 + seed)
        a = 0.0
        while a < 1e-9 or a > 1 - 1e-9:
            n, fs, good = random_instance(rng)
            psi1, psi0, a = components(fs, good)
        theta = theta_of(a)
        state = prepare_A(fs)
        for j in range(6):
            want = (math.sin((2 * j + 1) * theta) / math.sqrt(a) * psi1
                    + math.cos((2 * j + 1) * theta) / math.sqrt(1 - a) * psi0)
            assert np.max(np.abs(state.amps - want)) < 1e-10
            assert good_probability(state, good) == pytest.approx(
                math.sin((2 * j + 1) * theta) ** 2, abs=1e-10)
            apply_Q(state, fs, good=good)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.floats(-math.pi, math.pi),
           st.floats(-math.pi, math.pi), st.integers(1, 4))
    def test_norm_preserved(self, seed, p0, pchi, reps):
        rng = np.random.default_rng(seed)
        n, fs, good = random_instance(rng, n_max=6)
        s = prepare_A(fs)
        for _ in range(reps):
            apply_Q(s, fs, good=good, phase_s0=p0, phase_schi=pchi)
        assert abs(s.norm_squared() - 1) < 1e-12


class TestIterationCounts:
    def test_grover_iteration_values(self):
        assert grover_iterations(math.pi / 4) == 1
        assert grover_iterations(theta_of(0.5)) == 1
        assert grover_iterations(0.0) == 0
        assert grover_iterations(math.asin(1 / 8)) == 6
        assert grover_iterations(theta_of(1.0)) == 0

    def test_theta_of_clamps(self):
        assert theta_of(-1e-17) == 0.0
        assert theta_of(1 + 1e-15) == pytest.approx(math.pi / 2)

    def test_oracle_count_succeeds(self):
        # with the exact angle, floor(pi/(4 theta)) iterations give >= max(1-a, a)
        for a in np.linspace(0.001, 0.999, 200):
            theta = theta_of(a)
            m = grover_iterations(theta)
            assert math.sin((2 * m + 1) * theta) ** 2 >= max(1 - a, a) - 1e-12

    @pytest.mark.parametrize("lo,hi", [
        (math.asin(1 / 8), math.pi / 6),
        (math.asin(1 / 128), math.pi / 6),
        (theta_of(4 / 32 - 4 / 32 ** 2), theta_of(56 / 225)),
    ])
    def test_cover_schedule_guarantee(self, lo, hi):
        rounds = cover_schedule(lo, hi)
        theta = np.linspace(lo, hi, 200_001)
        fail = np.prod([np.cos((2 * m + 1) * theta) ** 2 for m in rounds], axis=0)
        assert fail.max() <= 0.25

    def test_cover_schedule_degenerate(self):
        assert cover_schedule(0.6, 0.5) == (grover_iterations(0.6),)


class TestPlan:
    def test_round_trip(self):
        p = AmplificationPlan(0.1, GOOD_NONZERO, (3, 1), phase_s0=1.0, mode="bound",
                              a=0.36, theta=0.6435, grover_iterations=1)
        assert AmplificationPlan.from_dict(p.to_dict()) == p
        assert p.iterations == 4

    @pytest.mark.parametrize("kw", [
        {"rounds": ()}, {"rounds": (-1,)}, {"phase_s0": 4.0}, {"phase_schi": -math.pi},
    ])
    def test_validation(self, kw):
        args = {"epsilon": 0.1, "good": GOOD_NONZERO, "rounds": (1,)} | kw
        with pytest.raises(ValueError):
            AmplificationPlan(**args)
