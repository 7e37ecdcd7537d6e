"""Dynamical-decoupling sensing with finite-width pulses and phase cycling."""

__version__ = "0.1.0"

from .core import ControlErrors, EvolutionResult, SensorPreparation  # noqa: E402
from .sequences import (  # noqa: E402
    PulseSequence,
    SequenceKind,
    build_axy8,
    build_standard,
    filter_fourier_coefficients,
    solve_axy_timings,
)
from .classical import ClassicalSignal, simulate_classical  # noqa: E402
from .quantum import NuclearSpin, QuantumScene, simulate_quantum  # noqa: E402
from .disambiguation import (  # noqa: E402
    PhaseCycleSet,
    SequenceSpec,
    SweepConfig,
    classify_peaks,
    run_sweep,
    witness,
)

__all__ = [
    "ClassicalSignal",
    "ControlErrors",
    "EvolutionResult",
    "NuclearSpin",
    "PhaseCycleSet",
    "PulseSequence",
    "QuantumScene",
    "SensorPreparation",
    "SequenceKind",
    "SequenceSpec",
    "SweepConfig",
    "build_axy8",
    "build_standard",
    "classify_peaks",
    "filter_fourier_coefficients",
    "run_sweep",
    "simulate_classical",
    "simulate_quantum",
    "solve_axy_timings",
    "witness",
]
