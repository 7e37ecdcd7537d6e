"""Phase-cycled frequency sweeps, the witness W and real/spurious peak labels.

A sweep evaluates the transition probability on a grid of ``alpha =
omega_dd / omega_ref`` for several initial sensor phases. Real resonances are
phase independent up to sixth order in the pulse-axis tilt, spurious ones move
at second order, so the pointwise spread across phases (the witness) separates
them. The criterion only works one way: a real resonance that coincides with a
spurious harmonic of another line is still flagged as spurious.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .classical import ClassicalSignal, classical_propagator
from .core import ControlErrors, SensorPreparation, transition_probability
from .quantum import QuantumScene, larmor_frequency, quantum_propagator
from .sequences import (
    PulseSequence,
    SequenceKind,
    build_axy8,
    build_standard,
    solve_axy_timings,
)

DEFAULT_PHASES = (0.0, np.pi / 4, -np.pi / 4)


class SweepError(RuntimeError):
    """An engine failure at a specific grid point."""


@dataclass(frozen=True)
class SequenceSpec:
    """Everything needed to build a sequence once ``t_free`` is known."""

    kind: SequenceKind | str
    n_units: int
    rabi: float  # rad/s
    t_flip: float | None = None  # default pi / rabi
    theta_pulse: float = 0.0
    xi: float | None = None  # AXY target coefficient
    allow_overlap: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", SequenceKind(self.kind))
        if self.kind in (SequenceKind.AXY8_F1, SequenceKind.AXY8_F3) and self.xi is None:
            raise ValueError("AXY sequences need xi")

    @property
    def flip_time(self) -> float:
        return np.pi / self.rabi if self.t_flip is None else self.t_flip

    def build(self, t_free: float, theta_pulse: float | None = None) -> PulseSequence:
        theta = self.theta_pulse if theta_pulse is None else theta_pulse
        if self.kind in (SequenceKind.XY8, SequenceKind.CPMG):
            return build_standard(
                self.kind, self.n_units, t_free, self.flip_time, self.rabi, theta
            )
        harmonic = 1 if self.kind is SequenceKind.AXY8_F1 else 3
        timings = solve_axy_timings(harmonic, self.xi)
        return build_axy8(
            self.n_units,
            t_free,
            timings,
            self.flip_time,
            self.rabi,
            theta,
            allow_overlap=self.allow_overlap,
        )


@dataclass(frozen=True)
class SweepConfig:
    alphas: tuple[float, ...]
    sequence: SequenceSpec
    phases: tuple[float, ...] = DEFAULT_PHASES
    signals: tuple[ClassicalSignal, ...] = ()
    scene: QuantumScene | None = None
    errors: ControlErrors = ControlErrors()
    slices_per_pulse: int | None = None
    slices_free: int | None = None
    reference_omega: float | None = None
    reference_spin: int = 0

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))
        object.__setattr__(self, "signals", tuple(self.signals))
        if not self.alphas:
            raise ValueError("alpha grid is empty")
        if np.any(np.diff(self.alphas) <= 0) or self.alphas[0] <= 0:
            raise ValueError("alpha grid must be positive and strictly increasing")
        if not self.phases:
            raise ValueError("need at least one phase")
        if len(set(np.round(np.mod(self.phases, 2 * np.pi), 12))) != len(self.phases):
            raise ValueError("phases must be distinct modulo 2 pi")
        if (self.scene is None) == (not self.signals):
            raise ValueError("give either classical signals or a quantum scene")

    @property
    def engine(self) -> str:
        return "quantum" if self.scene is not None else "classical"

    @property
    def omega_ref(self) -> float:
        if self.reference_omega is not None:
            return self.reference_omega
        if self.scene is not None:
            return larmor_frequency(self.scene, self.reference_spin)
        return self.signals[0].omega_ac

    def t_free(self, alpha: float) -> float:
        return np.pi / (alpha * self.omega_ref)

    def propagator(self, alpha: float) -> np.ndarray:
        seq = self.sequence.build(self.t_free(alpha))
        if self.scene is not None:
            return quantum_propagator(seq, self.scene, self.errors, self.slices_per_pulse or 1)
        return classical_propagator(
            seq, self.signals, self.errors, self.slices_per_pulse, self.slices_free
        )


@dataclass(frozen=True)
class Spectrum:
    alphas: np.ndarray
    probabilities: np.ndarray

    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.alphas.tolist(), self.probabilities.tolist()))


@dataclass(frozen=True)
class PhaseCycleSet:
    """Spectra for several sensor phases on one alpha grid.

    ``probabilities[i, k]`` is the spectrum of ``phases[i]`` at ``alphas[k]``.
    """

    alphas: np.ndarray
    phases: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.shape != (len(self.phases), len(self.alphas)):
            raise ValueError(
                f"probabilities shape {p.shape} does not match "
                f"{len(self.phases)} phases x {len(self.alphas)} grid points"
            )

    @classmethod
    def from_spectra(cls, spectra: Mapping[float, Spectrum]) -> "PhaseCycleSet":
        items = list(spectra.items())
        if not items:
            raise ValueError("no spectra")
        grid = np.asarray(items[0][1].alphas, dtype=float)
        for phi, s in items[1:]:
            if len(s.alphas) != len(grid) or np.any(np.asarray(s.alphas) != grid):
                raise ValueError(f"spectrum for phi={phi} is on a different alpha grid")
        return cls(
            alphas=grid,
            phases=np.array([phi for phi, _ in items], dtype=float),
            probabilities=np.array([s.probabilities for _, s in items], dtype=float),
        )

    def spectrum(self, i: int) -> Spectrum:
        return Spectrum(self.alphas, self.probabilities[i])

    @property
    def spectra(self) -> dict[float, Spectrum]:
        return {float(phi): self.spectrum(i) for i, phi in enumerate(self.phases)}


class PeakClass(str, Enum):
    REAL = "real"
    SPURIOUS = "spurious"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class PeakLabel:
    alpha_at_peak: float
    height: float
    w_at_peak: float
    classification: PeakClass
    harmonic_guess: tuple[int, int]
    index: int

    @property
    def ratio(self) -> float:
        return self.w_at_peak / self.height if self.height > 0 else 0.0


@dataclass(frozen=True)
class WitnessReport:
    alphas: np.ndarray
    w: np.ndarray
    peaks: tuple[PeakLabel, ...] = field(default=())


def _evaluate_point(args):
    cfg, index = args
    alpha = cfg.alphas[index]
    try:
        U = cfg.propagator(alpha)
        return [transition_probability(U, SensorPreparation(phi)) for phi in cfg.phases]
    except Exception as exc:  # re-raised with the grid point attached
        raise SweepError(f"grid point {index} (alpha={alpha:.10g}): {exc}") from exc


def run_sweep(cfg: SweepConfig, workers: int = 1) -> PhaseCycleSet:
    """Evaluate every phase on every grid point; one propagator per grid point."""
    jobs = [(cfg, i) for i in range(len(cfg.alphas))]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_evaluate_point, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_evaluate_point(j) for j in jobs]
    return PhaseCycleSet(
        alphas=np.array(cfg.alphas),
        phases=np.array(cfg.phases),
        probabilities=np.array(rows, dtype=float).T.reshape(len(cfg.phases), len(cfg.alphas)),
    )


def witness(pcs: PhaseCycleSet) -> WitnessReport:
    """Largest pairwise difference between phases at every grid point."""
    p = np.asarray(pcs.probabilities)
    if p.shape[0] < 1:
        raise ValueError("need at least one phase")
    return WitnessReport(alphas=np.asarray(pcs.alphas), w=p.max(axis=0) - p.min(axis=0))


def harmonic_guess(alpha: float, k_max: int = 8, l_max: int = 9) -> tuple[int, int]:
    """Closest reduced fraction k/l with odd l.

    Ties prefer k = 1 or even k (odd k > 1 does not occur for symmetric
    sequences), then the smaller denominator.
    """
    best = None
    for l in range(1, l_max + 1, 2):
        for k in range(1, k_max + 1):
            if math.gcd(k, l) != 1:
                continue
            key = (round(abs(alpha - k / l), 12), not (k == 1 or k % 2 == 0), l, k)
            if best is None or key < best[0]:
                best = (key, (k, l))
    return best[1]


def _refine(x, y, i):
    denom = y[i - 1] - 2 * y[i] + y[i + 1]
    if denom >= 0:
        return x[i]
    shift = 0.5 * (y[i - 1] - y[i + 1]) / denom
    return x[i] + shift * 0.5 * (x[i + 1] - x[i - 1])


def classify_peaks(
    pcs: PhaseCycleSet,
    report: WitnessReport | None = None,
    rel_threshold: float = 0.3,
    min_height: float = 0.02,
    refine: bool = False,
) -> WitnessReport:
    """Label local maxima of the phase-averaged spectrum.

    A peak is spurious when ``W >= rel_threshold * height`` and real when
    ``W <= rel_threshold / 10 * height``; anything between is inconclusive.
    """
    if not (0 < rel_threshold < 1 and 0 < min_height < 1):
        raise ValueError("thresholds must lie in (0, 1)")
    if report is None:
        report = witness(pcs)
    if len(report.w) != len(pcs.alphas):
        raise ValueError("witness report does not match the phase-cycle grid")
    x = np.asarray(pcs.alphas)
    p = np.asarray(pcs.probabilities)
    mean = p.mean(axis=0)
    peaks = []
    for i in range(1, len(x) - 1):
        if not (mean[i] > mean[i - 1] and mean[i] >= mean[i + 1] and mean[i] >= min_height):
            continue
        height = float(p[:, i].max())
        w = float(report.w[i])
        if w >= rel_threshold * height:
            label = PeakClass.SPURIOUS
        elif w <= 0.1 * rel_threshold * height:
            label = PeakClass.REAL
        else:
            label = PeakClass.INCONCLUSIVE
        a = _refine(x, mean, i) if refine else float(x[i])
        peaks.append(PeakLabel(float(a), height, w, label, harmonic_guess(a), i))
    return WitnessReport(alphas=report.alphas, w=report.w, peaks=tuple(peaks))


def dominant_peak(report: WitnessReport, lo: float, hi: float) -> PeakLabel | None:
    """Highest labelled peak with ``lo <= alpha <= hi``."""
    inside = [p for p in report.peaks if lo <= p.alpha_at_peak <= hi]
    return max(inside, key=lambda p: p.height) if inside else None
