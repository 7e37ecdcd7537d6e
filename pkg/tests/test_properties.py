"""Invariants checked on randomly drawn inputs."""

import numpy as np
from hypothesis import assume, given
from hypothesis import strategies as st

from ddphase.classical import ClassicalSignal, auto_slices, classical_propagator, simulate_classical
from ddphase.core import ControlErrors, SensorPreparation, transition_probability
from ddphase.disambiguation import PhaseCycleSet, witness
from ddphase.quantum import NuclearSpin, QuantumScene, quantum_propagator, simulate_quantum
from ddphase.sequences import (
    SequenceKind,
    admissible_xi,
    build_axy8,
    build_standard,
    filter_fourier_coefficients,
    solve_axy_timings,
)

MHZ = 2 * np.pi * 1e6
KHZ = 2 * np.pi * 1e3

phases = st.floats(-np.pi, np.pi)


@st.composite
def classical_cases(draw):
    alpha = draw(st.floats(0.3, 5.0))
    t_free = np.pi / (alpha * MHZ)
    rabi = draw(st.floats(5.0, 50.0)) * MHZ
    assume(np.pi / rabi < 0.9 * t_free)
    kind = draw(st.sampled_from([SequenceKind.XY8, SequenceKind.CPMG]))
    seq = build_standard(kind, draw(st.integers(1, 3)), t_free, np.pi / rabi, theta_pulse=draw(phases))
    signal = ClassicalSignal(draw(st.floats(0.0, 0.5)) * MHZ, MHZ, draw(phases))
    errors = ControlErrors(draw(st.floats(-2, 2)) * MHZ, draw(st.floats(-0.1, 0.1)))
    return seq, signal, errors


@given(classical_cases(), phases)
def test_classical_unitary_and_probability(case, phi):
    seq, signal, errors = case
    res = simulate_classical(seq, signal, SensorPreparation(phi), errors)
    U = res.propagator
    assert np.allclose(U @ U.conj().T, np.eye(2), atol=1e-10)
    assert -1e-12 <= res.probability <= 1 + 1e-12
    rho = res.final_state
    assert abs(np.trace(rho) - 1) < 1e-10
    assert np.all(np.linalg.eigvalsh(rho) > -1e-10)
    overlap = np.real(np.trace(rho @ SensorPreparation(phi).density_matrix()))
    assert abs(res.probability - (1 - overlap)) < 1e-10


@given(classical_cases())
def test_slice_refinement(case):
    seq, signal, errors = case
    n = auto_slices([signal], seq.pulses[0].duration)
    coarse = classical_propagator(seq, signal, errors, slices_per_pulse=n)
    fine = classical_propagator(seq, signal, errors, slices_per_pulse=2 * n)
    prep = SensorPreparation()
    assert abs(transition_probability(coarse, prep) - transition_probability(fine, prep)) < 1e-6


@given(classical_cases(), phases)
def test_phase_equivalence(case, phi):
    """Preparing with phase phi equals shifting every pulse axis by -phi."""
    seq, signal, errors = case
    shifted = build_standard(
        seq.kind, seq.n_units, seq.t_free, seq.pulses[0].duration, theta_pulse=seq.global_pulse_phase - phi
    )
    a = simulate_classical(seq, signal, SensorPreparation(phi), errors).probability
    b = simulate_classical(shifted, signal, SensorPreparation(0.0), errors).probability
    assert abs(a - b) < 1e-9


@st.composite
def quantum_cases(draw):
    n_spins = draw(st.integers(1, 2))
    spins = tuple(
        NuclearSpin(
            tuple(draw(st.floats(-50, 50)) * KHZ for _ in range(3)),
            draw(st.sampled_from([1070.5, 4257.7])) * 2 * np.pi,
        )
        for _ in range(n_spins)
    )
    scene = QuantumScene(draw(st.floats(50, 500)), spins)
    t_free = draw(st.floats(0.2, 2.0)) * 1e-6
    rabi = 20 * MHZ
    seq = build_standard(SequenceKind.XY8, 1, t_free, np.pi / rabi, theta_pulse=draw(phases))
    return seq, scene, ControlErrors(draw(st.floats(-1, 1)) * MHZ, draw(st.floats(-0.05, 0.05)))


@given(quantum_cases(), phases)
def test_quantum_unitary_and_state(case, phi):
    seq, scene, errors = case
    res = simulate_quantum(seq, scene, SensorPreparation(phi), errors)
    U = res.propagator
    assert np.allclose(U @ U.conj().T, np.eye(U.shape[0]), atol=1e-9)
    assert -1e-12 <= res.probability <= 1 + 1e-12
    rho = res.final_state
    assert abs(np.trace(rho) - 1) < 1e-10
    assert np.all(np.linalg.eigvalsh(rho) > -1e-10)


@given(quantum_cases(), phases)
def test_quantum_phase_equivalence(case, phi):
    seq, scene, errors = case
    shifted = build_standard(
        seq.kind, seq.n_units, seq.t_free, seq.pulses[0].duration, theta_pulse=seq.global_pulse_phase - phi
    )
    a = transition_probability(quantum_propagator(seq, scene, errors), SensorPreparation(phi))
    b = transition_probability(quantum_propagator(shifted, scene, errors), SensorPreparation(0.0))
    assert abs(a - b) < 1e-9


@given(
    st.lists(st.lists(st.floats(0, 1), min_size=6, max_size=6), min_size=1, max_size=5),
    st.randoms(use_true_random=False),
)
def test_witness_permutation_invariant(rows, rnd):
    p = np.array(rows)
    alphas = np.arange(1.0, 7.0)
    order = list(range(len(rows)))
    rnd.shuffle(order)
    a = witness(PhaseCycleSet(alphas, np.arange(len(rows), dtype=float), p)).w
    b = witness(PhaseCycleSet(alphas, np.array(order, dtype=float), p[order])).w
    assert np.array_equal(a, b)
    assert np.all(a >= 0) and np.all(a <= 1)


@given(st.lists(st.lists(st.floats(0, 1), min_size=4, max_size=4), min_size=2, max_size=6))
def test_witness_grows_with_phases(rows):
    p = np.array(rows)
    alphas = np.arange(1.0, 5.0)
    prev = np.zeros(4)
    for k in range(1, len(rows) + 1):
        w = witness(PhaseCycleSet(alphas, np.arange(k, dtype=float), p[:k])).w
        assert np.all(w >= prev)
        prev = w


def _xi(harmonic, frac):
    lo, hi = admissible_xi(harmonic)
    return lo + (hi - lo) * frac


@given(st.sampled_from([1, 3]), st.floats(0.02, 0.98))
def test_axy_filter_pattern(harmonic, frac):
    xi = _xi(harmonic, frac)
    t = solve_axy_timings(harmonic, xi)
    x = np.array(t.x)
    assert np.allclose(x + x[::-1], 0.5, atol=1e-14)
    assert np.all(np.diff(x) > 0)
    f = filter_fourier_coefficients(build_axy8(1, 1.0, t, 0.0), 5)
    for l in range(1, 5):
        assert abs(f[l] - (xi if l == harmonic else 0.0)) < 1e-9
    assert abs(f[5]) <= 4 / np.pi + 1e-12


@given(st.sampled_from([1, 3]), st.floats(0.02, 0.98), st.integers(1, 4), st.floats(0.1, 10))
def test_axy_grid(harmonic, frac, n_units, t_free):
    t = solve_axy_timings(harmonic, _xi(harmonic, frac))
    seq = build_axy8(n_units, t_free, t, 0.0)
    assert len(seq) == 40 * n_units
    assert np.isclose(seq.total_time, 8 * n_units * t_free)
    # each block of five flips sits symmetrically inside its 2 t_free window
    c = seq.centers.reshape(-1, 5)
    mid = (c[:, 0] + c[:, 4]) / 2
    assert np.allclose(np.diff(mid), t_free)


@given(st.integers(1, 6), st.floats(0.05, 10), st.one_of(st.just(0.0), st.floats(1e-6, 0.9)), phases)
def test_xy8_grid(n_units, t_free, flip_fraction, theta):
    seq = build_standard(SequenceKind.XY8, n_units, t_free, flip_fraction * t_free, theta_pulse=theta)
    assert len(seq) == 8 * n_units
    assert np.allclose(seq.centers, t_free * (np.arange(8 * n_units) + 0.5))
    assert np.isclose(seq.total_time, 8 * n_units * t_free)
    pattern = np.array([0, 1, 0, 1, 1, 0, 1, 0] * n_units) * np.pi / 2 + theta
    assert np.allclose(seq.phases, pattern)
    assert seq.min_gap() >= -1e-12 * t_free
