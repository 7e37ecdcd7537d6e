from functools import reduce

import numpy as np
import pytest
from scipy.linalg import expm

from ddphase.classical import ClassicalSignal, classical_propagator
from ddphase.core import SX, SY, SZ, ControlErrors, SensorPreparation, transition_probability
from ddphase.quantum import (
    GAMMA_13C,
    GAMMA_1H,
    NuclearSpin,
    QuantumScene,
    coupling_warnings,
    larmor_frequency,
    larmor_vectors,
    quantum_propagator,
    simulate_quantum,
)
from ddphase.sequences import build_axy8, build_standard, solve_axy_timings

KHZ = 2 * np.pi * 1e3
MHZ = 2 * np.pi * 1e6


def full_hamiltonian(scene, errors, pulse=None):
    """Sensor x register Hamiltonian assembled directly from Pauli products."""
    m = len(scene.spins)
    eye = np.eye(2)

    def op(sensor, j=None, sigma=None):
        factors = [sensor] + [eye] * m
        if j is not None:
            factors[1 + j] = 0.5 * sigma
        return reduce(np.kron, factors)

    h = -0.5 * errors.detuning * op(SZ)
    for j, s in enumerate(scene.spins):
        w = 0.5 * np.array(s.hyperfine) - np.array([0, 0, s.gyromagnetic * scene.b_field])
        for k, sigma in enumerate((SX, SY, SZ)):
            h = h + w[k] * op(eye, j, sigma) + 0.5 * s.hyperfine[k] * op(SZ, j, sigma)
    if pulse is not None:
        r = pulse.rabi * (1 + errors.rabi_relative_error)
        h = h + 0.5 * r * op(np.cos(pulse.axis_phase) * SX + np.sin(pulse.axis_phase) * SY)
    return h


def brute_force_propagator(seq, scene, errors):
    U = np.eye(2 * 2 ** len(scene.spins), dtype=complex)
    h0 = full_hamiltonian(scene, errors)
    for (a, b), p in zip(seq.free_intervals(), seq.pulses):
        U = expm(-1j * h0 * (b - a)) @ U
        U = expm(-1j * full_hamiltonian(scene, errors, p) * p.duration) @ U
    a, b = seq.free_intervals()[-1]
    return expm(-1j * h0 * (b - a)) @ U


@pytest.fixture
def carbon():
    return QuantumScene(100.0, (NuclearSpin((15.0 * KHZ, 6.4 * KHZ, 11.9 * KHZ), GAMMA_13C, "13C"),))


def test_larmor_examples():
    bare = QuantumScene(100.0, (NuclearSpin((0, 0, 0), GAMMA_13C),))
    assert larmor_frequency(bare) / (2 * np.pi) == pytest.approx(107.05e3)
    a = (3 * KHZ, -2 * KHZ, 5 * KHZ)
    zero_field = QuantumScene(0.0, (NuclearSpin(a, GAMMA_13C),))
    assert np.allclose(larmor_vectors(zero_field)[0], 0.5 * np.array(a))
    proton = QuantumScene(600.0, (NuclearSpin((1.0, 0, 0), GAMMA_1H),))
    assert larmor_frequency(proton) / (2 * np.pi) == pytest.approx(2.555e6, rel=1e-3)


def test_nuclear_spin_validation():
    with pytest.raises(ValueError):
        NuclearSpin((1.0, 2.0), GAMMA_13C)
    with pytest.raises(ValueError):
        NuclearSpin((1.0, 2.0, np.inf), GAMMA_13C)
    with pytest.raises(ValueError):
        NuclearSpin((1.0, 2.0, 3.0), 0.0)


def test_dimension_cap():
    spins = tuple(NuclearSpin((KHZ, 0, 0), GAMMA_13C) for _ in range(5))
    with pytest.raises(ValueError, match="dimension"):
        QuantumScene(100.0, spins)
    assert QuantumScene(100.0, spins, max_dim=64).dim == 64


@pytest.mark.parametrize(
    "errors",
    [ControlErrors(), ControlErrors(0.8 * MHZ, 0.03), ControlErrors(-0.3 * MHZ, -0.02)],
)
def test_matches_brute_force_exponentials(carbon, errors):
    t_free = np.pi / (1.3 * larmor_frequency(carbon))
    seq = build_standard("XY8", 2, t_free, np.pi / (30 * MHZ), theta_pulse=0.3)
    U = quantum_propagator(seq, carbon, errors)
    assert np.allclose(U, brute_force_propagator(seq, carbon, errors), atol=1e-10)


def test_two_spins_match_brute_force():
    scene = QuantumScene(
        500.0,
        (NuclearSpin((14.5 * KHZ, 0, 50 * KHZ), GAMMA_1H, "1H"), NuclearSpin((10 * KHZ, 10 * KHZ, 7 * KHZ), GAMMA_13C, "13C")),
    )
    errors = ControlErrors(1 * MHZ, 0.03)
    t_free = np.pi / larmor_frequency(scene, 0)
    seq = build_axy8(1, t_free * 4, solve_axy_timings(1, 4 / (5 * np.pi)), np.pi / (20 * MHZ))
    U = quantum_propagator(seq, scene, errors)
    assert np.allclose(U, brute_force_propagator(seq, scene, errors), atol=1e-9)


def test_decoupled_sensor(carbon):
    bare = QuantumScene(100.0, (NuclearSpin((0, 0, 0), GAMMA_13C),))
    for seq in (
        build_standard("XY8", 3, 0.7e-6, 20e-9),
        build_axy8(2, 1.9e-6, solve_axy_timings(1, 0.3), 20e-9),
    ):
        assert simulate_quantum(seq, bare, SensorPreparation(0.4)).probability <= 1e-10


@pytest.mark.parametrize("kind", ["XY8", "CPMG"])
def test_parallel_coupling_refocuses(kind):
    scene = QuantumScene(100.0, (NuclearSpin((0, 0, 40 * KHZ), GAMMA_13C),))
    seq = build_standard(kind, 4, 0.83e-6, 0.0)
    for phi in (0.0, 0.9):
        assert simulate_quantum(seq, scene, SensorPreparation(phi)).probability == pytest.approx(0.0, abs=1e-12)


def test_slicing_is_neutral(carbon):
    seq = build_standard("XY8", 1, 1e-6, 30e-9)
    u1 = quantum_propagator(seq, carbon, ControlErrors(MHZ, 0.01), slices_per_pulse=1)
    u7 = quantum_propagator(seq, carbon, ControlErrors(MHZ, 0.01), slices_per_pulse=7)
    assert np.allclose(u1, u7, atol=1e-11)
    with pytest.raises(ValueError):
        quantum_propagator(seq, carbon, slices_per_pulse=0)


def test_result_state_invariants(carbon):
    seq = build_standard("XY8", 5, np.pi / larmor_frequency(carbon), 1 / (60e6))
    r = simulate_quantum(seq, carbon, SensorPreparation(0.6), ControlErrors(MHZ, 0.03))
    rho = r.final_state
    assert rho.shape == (2, 2)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.linalg.eigvalsh(rho).min() > -1e-10
    rho0 = SensorPreparation(0.6).density_matrix()
    assert r.probability == pytest.approx(1 - np.trace(rho @ rho0).real, abs=1e-12)
    U = r.propagator
    assert np.abs(U.conj().T @ U - np.eye(4)).max() < 1e-10


def test_coupling_warning():
    proton = QuantumScene(1836.0, (NuclearSpin((14.5 * KHZ, 0, 500 * KHZ), GAMMA_1H, "1H"),))
    assert coupling_warnings(proton, 20 * MHZ)
    weak = QuantumScene(100.0, (NuclearSpin((15 * KHZ, 6.4 * KHZ, 11.9 * KHZ), GAMMA_13C),))
    assert coupling_warnings(weak, 30 * MHZ) == ()
    seq = build_standard("XY8", 1, 1e-6, 25e-9)
    with pytest.warns(UserWarning, match="1H"):
        r = simulate_quantum(seq, proton, warn=True)
    assert r.warnings


def test_weak_coupling_peak_matches_classical():
    """A weakly coupled spin shows its resonance where an equivalent classical tone does."""
    spin = NuclearSpin((4 * KHZ, 0.0, 0.0), GAMMA_13C)
    scene = QuantumScene(300.0, (spin,))
    w = larmor_frequency(scene)
    tone = ClassicalSignal(2 * KHZ, w, 0.0)
    alphas = np.arange(0.9, 1.1, 0.004)
    prep = SensorPreparation(0.0)
    q, c = [], []
    for a in alphas:
        seq = build_standard("XY8", 16, np.pi / (a * w), 10e-9)
        q.append(transition_probability(quantum_propagator(seq, scene), prep))
        c.append(transition_probability(classical_propagator(seq, tone), prep))
    assert abs(alphas[np.argmax(q)] - alphas[np.argmax(c)]) <= 0.004 + 1e-12
