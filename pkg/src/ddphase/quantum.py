"""Sensor qubit coupled to a small register of nuclear spins.

Hamiltonian in the frame rotating with the sensor transition (spin-1/2 nuclei,
``I = sigma / 2``)::

    H = sum_j w_j . I_j + sz/2 sum_j A_j . I_j - detuning sz/2 + H_c
    w_j = A_j / 2 - gamma_j B z

The uncontrolled part is time independent and block diagonal in the sensor
``sz`` eigenbasis, so free segments are exponentiated exactly per branch. A
pulse is a single time-independent exponential; slicing it is supported for
parity with the classical engine but does not change the result.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .core import (
    SX,
    SY,
    SZ,
    ControlErrors,
    EvolutionResult,
    SensorPreparation,
    evolve_state,
    ordered_product,
    reduce_to_sensor,
    su2,
    transition_probability,
)
from .sequences import PulseSequence

TWO_PI = 2 * np.pi
GAMMA_13C = TWO_PI * 1.0705e3  # rad/(s G)
GAMMA_1H = TWO_PI * 4.2576e3

#: |A| / rabi above which tilts stop being small
COUPLING_GUARD = 0.01


@dataclass(frozen=True)
class NuclearSpin:
    hyperfine: tuple[float, float, float]  # rad/s
    gyromagnetic: float  # rad/(s G)
    label: str = ""

    def __post_init__(self):
        a = np.asarray(self.hyperfine, dtype=float)
        if a.shape != (3,) or not np.all(np.isfinite(a)):
            raise ValueError("hyperfine must be a finite 3-vector")
        if self.gyromagnetic == 0 or not np.isfinite(self.gyromagnetic):
            raise ValueError("gyromagnetic ratio must be finite and nonzero")
        object.__setattr__(self, "hyperfine", tuple(float(v) for v in a))


@dataclass(frozen=True)
class QuantumScene:
    b_field: float  # Gauss, along z
    spins: tuple[NuclearSpin, ...]
    max_dim: int = 2 * 2**4

    def __post_init__(self):
        object.__setattr__(self, "spins", tuple(self.spins))
        if self.dim > self.max_dim:
            raise ValueError(
                f"register dimension {self.dim} exceeds the cap {self.max_dim}"
            )

    @property
    def dim(self) -> int:
        return 2 * 2 ** len(self.spins)


def larmor_vectors(scene: QuantumScene) -> np.ndarray:
    """Mean precession vector of every nuclear spin, shape ``(m, 3)``."""
    if not scene.spins:
        return np.zeros((0, 3))
    a = np.array([s.hyperfine for s in scene.spins])
    g = np.array([s.gyromagnetic for s in scene.spins])
    w = 0.5 * a
    w[:, 2] -= g * scene.b_field
    return w


def larmor_frequency(scene: QuantumScene, index: int = 0) -> float:
    return float(np.linalg.norm(larmor_vectors(scene)[index]))


def coupling_warnings(scene: QuantumScene, rabi: float) -> tuple[str, ...]:
    out = []
    for s in scene.spins:
        ratio = np.linalg.norm(s.hyperfine) / rabi
        if ratio > COUPLING_GUARD:
            out.append(
                f"|A|/rabi = {ratio:.3g} for spin {s.label or '?'} exceeds "
                f"{COUPLING_GUARD}; tilts are not small"
            )
    return tuple(out)


def _kron_all(mats):
    return reduce(np.kron, mats, np.eye(1, dtype=complex))


class _Register:
    """Per-call operator workspace for one scene and error set."""

    def __init__(self, scene: QuantumScene, errors: ControlErrors):
        self.m = len(scene.spins)
        self.nd = 2**self.m
        w = larmor_vectors(scene)
        a = np.array([s.hyperfine for s in scene.spins]).reshape(self.m, 3)
        self.h_up = w + 0.5 * a  # nuclear field when sz = +1
        self.h_dn = w - 0.5 * a
        self.detuning = errors.detuning
        self.scale = 1.0 + errors.rabi_relative_error
        self.h0 = self._static_hamiltonian()
        self._free_cache: dict[float, np.ndarray] = {}
        self._pulse_cache: dict[tuple, np.ndarray] = {}

    def _nuc_op(self, j, sigma):
        ops = [np.eye(2, dtype=complex)] * self.m
        ops[j] = 0.5 * sigma
        return _kron_all(ops)

    def _static_hamiltonian(self):
        nd = self.nd
        up = np.zeros((nd, nd), dtype=complex) - 0.5 * self.detuning * np.eye(nd)
        dn = np.zeros((nd, nd), dtype=complex) + 0.5 * self.detuning * np.eye(nd)
        for j in range(self.m):
            for k, sigma in enumerate((SX, SY, SZ)):
                op = self._nuc_op(j, sigma)
                up += self.h_up[j, k] * op
                dn += self.h_dn[j, k] * op
        h = np.zeros((2 * nd, 2 * nd), dtype=complex)
        h[:nd, :nd] = up
        h[nd:, nd:] = dn
        return h

    def free(self, tau: float) -> np.ndarray:
        key = round(tau, 18)
        u = self._free_cache.get(key)
        if u is None:
            nd = self.nd
            up = _kron_all(su2(*self.h_up.T, tau)) if self.m else np.eye(1)
            dn = _kron_all(su2(*self.h_dn.T, tau)) if self.m else np.eye(1)
            u = np.zeros((2 * nd, 2 * nd), dtype=complex)
            u[:nd, :nd] = np.exp(0.5j * self.detuning * tau) * up
            u[nd:, nd:] = np.exp(-0.5j * self.detuning * tau) * dn
            self._free_cache[key] = u
        return u

    def pulse(self, rabi, phase, duration, slices) -> np.ndarray:
        key = (rabi, phase, duration, slices)
        u = self._pulse_cache.get(key)
        if u is None:
            eye = np.eye(self.nd, dtype=complex)
            if duration == 0:
                angle = np.pi * self.scale
                u = np.kron(su2(angle * np.cos(phase), angle * np.sin(phase), 0.0, 1.0), eye)
            else:
                r = rabi * self.scale
                hc = 0.5 * r * (np.cos(phase) * SX + np.sin(phase) * SY)
                evals, evecs = np.linalg.eigh(self.h0 + np.kron(hc, eye))
                dt = duration / slices
                step = (evecs * np.exp(-1j * evals * dt)) @ evecs.conj().T
                u = np.linalg.matrix_power(step, slices)
            self._pulse_cache[key] = u
        return u


def quantum_propagator(
    seq: PulseSequence,
    scene: QuantumScene,
    errors: ControlErrors = ControlErrors(),
    slices_per_pulse: int = 1,
) -> np.ndarray:
    """Propagator on sensor x register (sensor is the leading tensor factor).

    Overlapping pulses are allowed: every pulse then acts at its center through
    its interaction-picture propagator, which coincides with the time-ordered
    evolution whenever pulses are disjoint.
    """
    if int(slices_per_pulse) != slices_per_pulse or slices_per_pulse < 1:
        raise ValueError("slices_per_pulse must be a positive integer")
    reg = _Register(scene, errors)
    mats = []
    for (t0, t1), p in zip(seq.free_intervals(), seq.pulses):
        mats.append(reg.free(t1 - t0))
        mats.append(reg.pulse(p.rabi, p.axis_phase, p.duration, int(slices_per_pulse)))
    t0, t1 = seq.free_intervals()[-1]
    mats.append(reg.free(t1 - t0))
    return ordered_product(np.array(mats))


def simulate_quantum(
    seq: PulseSequence,
    scene: QuantumScene,
    prep: SensorPreparation = SensorPreparation(),
    errors: ControlErrors = ControlErrors(),
    slices_per_pulse: int = 1,
    warn: bool = False,
) -> EvolutionResult:
    """Transition probability of the sensor; the register starts maximally mixed."""
    U = quantum_propagator(seq, scene, errors, slices_per_pulse)
    rabi = min(p.rabi for p in seq.pulses)
    flags = coupling_warnings(scene, rabi)
    if warn:
        for f in flags:
            warnings.warn(f, stacklevel=2)
    return EvolutionResult(
        probability=transition_probability(U, prep),
        final_state=reduce_to_sensor(evolve_state(U, prep)),
        propagator=U,
        warnings=flags,
    )
