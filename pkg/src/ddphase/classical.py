"""Two-level sensor driven by a classical ac field and finite-width control pulses.

In the frame rotating with the static field the Hamiltonian is

    H(t) = b sin(w_ac t + theta) sz/2 - detuning sz/2 + H_c(t),
    H_c  = rabi/2 [cos(p) sx + sin(p) sy]   (only while a pulse is on)

with ``b`` the field amplitude expressed as an angular frequency. Free segments
commute with themselves at all times and are integrated exactly. Pulse segments
are sliced; every slice is the product of two exact exponentials of the
Hamiltonian sampled at the slice's Gauss points (a fourth-order commutator-free
Magnus step), so each factor stays exactly unitary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import (
    ControlErrors,
    EvolutionResult,
    SensorPreparation,
    ordered_product,
    su2,
    transition_probability,
    evolve_state,
)
from .sequences import PulseSequence

#: largest w_ac * dt allowed inside a pulse when slices are chosen automatically
SLICE_TOLERANCE = 0.01

_GAUSS = (0.5 - np.sqrt(3) / 6, 0.5 + np.sqrt(3) / 6)
_CF4 = ((3 - 2 * np.sqrt(3)) / 12, (3 + 2 * np.sqrt(3)) / 12)


@dataclass(frozen=True)
class ClassicalSignal:
    amplitude: float  # gamma_n * B, rad/s
    omega_ac: float  # rad/s
    theta: float = 0.0

    def __post_init__(self):
        if not self.amplitude >= 0:
            raise ValueError("amplitude must be >= 0")
        if not self.omega_ac > 0:
            raise ValueError("omega_ac must be > 0")

    def field(self, t):
        return self.amplitude * np.sin(self.omega_ac * np.asarray(t) + self.theta)


def _as_signals(signal) -> tuple[ClassicalSignal, ...]:
    if isinstance(signal, ClassicalSignal):
        return (signal,)
    return tuple(signal)


def free_phase(signal: ClassicalSignal | Iterable[ClassicalSignal], t_a, t_b):
    """Phase picked up from the ac field between ``t_a`` and ``t_b``."""
    t_a = np.asarray(t_a, dtype=float)
    t_b = np.asarray(t_b, dtype=float)
    total = 0.0
    for s in _as_signals(signal):
        total = total + s.amplitude / s.omega_ac * (
            np.cos(s.omega_ac * t_a + s.theta) - np.cos(s.omega_ac * t_b + s.theta)
        )
    return total


def ideal_signal(seq: PulseSequence, signal) -> float:
    """Transition probability for instantaneous perfect pulses at the pulse centers."""
    edges = np.concatenate([[0.0], seq.centers, [seq.total_time]])
    kappa = free_phase(signal, edges[:-1], edges[1:])
    signs = np.where(np.arange(len(kappa)) % 2 == 0, 1.0, -1.0)
    return float(np.sin(0.5 * np.sum(signs * kappa)) ** 2)


def pulse_axis_tilt(signal: ClassicalSignal, omega: float, t) -> np.ndarray:
    """Out-of-plane tilt of the rotation axis of a pulse centered at ``t``."""
    if not omega > 0:
        raise ValueError("omega must be > 0")
    return np.arctan(signal.field(t) / omega)


def _z_field(signals, detuning, t):
    hz = -detuning * np.ones_like(t)
    for s in signals:
        hz = hz + s.field(t)
    return hz


def auto_slices(signals, duration):
    w = max(s.omega_ac for s in signals)
    return max(1, int(np.ceil(w * duration / SLICE_TOLERANCE)))


def classical_propagator(
    seq: PulseSequence,
    signal: ClassicalSignal | Sequence[ClassicalSignal],
    errors: ControlErrors = ControlErrors(),
    slices_per_pulse: int | None = None,
    slices_free: int | None = None,
) -> np.ndarray:
    """2x2 propagator of the whole sequence.

    ``slices_per_pulse=None`` picks the slice count from ``SLICE_TOLERANCE``;
    ``slices_free=None`` integrates free segments exactly, an integer switches to
    midpoint slicing (only useful for cross-checks).
    """
    signals = _as_signals(signal)
    if not signals:
        raise ValueError("need at least one signal (use amplitude 0 for none)")
    if seq.min_gap() < 0:
        raise ValueError("classical engine cannot propagate overlapping pulses")
    for name, n in (("slices_per_pulse", slices_per_pulse), ("slices_free", slices_free)):
        if n is not None and (int(n) != n or n < 1):
            raise ValueError(f"{name} must be a positive integer, got {n}")

    n_p = len(seq.pulses)
    durations = seq.durations
    scale = 1.0 + errors.rabi_relative_error
    phases = seq.phases

    # free segments
    starts, ends = np.array(seq.free_intervals()).T
    if slices_free is None:
        kappa = free_phase(signals, starts, ends) - errors.detuning * (ends - starts)
        free = su2(0.0, 0.0, kappa, 1.0)[:, None]
    else:
        frac = (np.arange(slices_free) + 0.5) / slices_free
        dt = ((ends - starts) / slices_free)[:, None]
        tm = starts[:, None] + (ends - starts)[:, None] * frac
        free = su2(0.0, 0.0, _z_field(signals, errors.detuning, tm), dt)

    # pulses
    if np.all(durations == 0):
        angle = np.pi * scale
        pulse = su2(angle * np.cos(phases), angle * np.sin(phases), 0.0, 1.0)[:, None]
    else:
        if np.any(durations == 0):
            raise ValueError("mixing ideal and finite-width pulses is not supported")
        n_s = slices_per_pulse or auto_slices(signals, durations.max())
        rabi = np.array([p.rabi for p in seq.pulses]) * scale
        dt = (durations / n_s)[:, None]
        t0 = np.array([p.start for p in seq.pulses])[:, None] + dt * np.arange(n_s)
        # two Gauss samples per slice, two exponentials (fourth order)
        hz1 = _z_field(signals, errors.detuning, t0 + _GAUSS[0] * dt)
        hz2 = _z_field(signals, errors.detuning, t0 + _GAUSS[1] * dt)
        hx = (0.5 * rabi * np.cos(phases))[:, None]
        hy = (0.5 * rabi * np.sin(phases))[:, None]
        early = su2(hx, hy, _CF4[1] * hz1 + _CF4[0] * hz2, dt)
        late = su2(hx, hy, _CF4[0] * hz1 + _CF4[1] * hz2, dt)
        pulse = np.stack([early, late], axis=2).reshape(n_p, 2 * n_s, 2, 2)

    k = free.shape[1] + pulse.shape[1]
    stack = np.empty((n_p, k, 2, 2), dtype=complex)
    stack[:, : free.shape[1]] = free[:-1]
    stack[:, free.shape[1] :] = pulse
    stack = np.concatenate([stack.reshape(-1, 2, 2), free[-1]], axis=0)
    return ordered_product(stack)


def simulate_classical(
    seq: PulseSequence,
    signal: ClassicalSignal | Sequence[ClassicalSignal],
    prep: SensorPreparation = SensorPreparation(),
    errors: ControlErrors = ControlErrors(),
    slices_per_pulse: int | None = None,
    slices_free: int | None = None,
) -> EvolutionResult:
    U = classical_propagator(seq, signal, errors, slices_per_pulse, slices_free)
    return EvolutionResult(
        probability=transition_probability(U, prep),
        final_state=evolve_state(U, prep),
        propagator=U,
    )
