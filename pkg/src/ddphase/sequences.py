"""Finite-width decoupling sequences (XY-8, CPMG, AXY-8) and their filter coefficients.

Conventions
-----------
* Pulse centers sit on the ideal instantaneous-pulse grid. ``t_free`` is the
  center-to-center spacing, the first center is at ``t_free / 2`` and
  ``omega_dd = pi / t_free``.
* The toggling function starts at +1 at ``t = 0`` and flips at every pulse center.
  Its cosine coefficients are taken with respect to the filter period
  ``2 * t_free``, which gives ``f_1 = 4 / pi`` for equally spaced XY-8.
* An AXY-8 composite block occupies one ``t_free`` window; its five sub-pulses sit
  at ``2 * x_i * t_free`` from the start of the window, i.e. ``x_i`` are fractions
  of the filter period.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

XY8_PATTERN = (0.0, np.pi / 2, 0.0, np.pi / 2, np.pi / 2, 0.0, np.pi / 2, 0.0)
KNILL_PHASES = (np.pi / 6, 0.0, np.pi / 2, 0.0, np.pi / 6)

_EPS = 1e-12


class SequenceKind(str, Enum):
    XY8 = "XY8"
    CPMG = "CPMG"
    AXY8_F1 = "AXY8-f1"
    AXY8_F3 = "AXY8-f3"


@dataclass(frozen=True)
class Pulse:
    """A constant-amplitude rotation about an equatorial axis.

    ``duration == 0`` (with ``rabi == inf``) marks an instantaneous ideal pulse.
    """

    center_time: float
    duration: float
    rabi: float
    axis_phase: float
    nominal_angle: float = np.pi

    def __post_init__(self):
        if self.duration < 0 or not np.isfinite(self.duration):
            raise ValueError(f"pulse duration must be >= 0, got {self.duration}")
        if not self.rabi > 0:
            raise ValueError(f"rabi frequency must be > 0, got {self.rabi}")
        if self.duration > 0 and not np.isfinite(self.rabi):
            raise ValueError("finite-width pulse needs a finite rabi frequency")

    @property
    def ideal(self) -> bool:
        return self.duration == 0

    @property
    def start(self) -> float:
        return self.center_time - 0.5 * self.duration

    @property
    def end(self) -> float:
        return self.center_time + 0.5 * self.duration


@dataclass(frozen=True)
class PulseSequence:
    pulses: tuple[Pulse, ...]
    total_time: float
    t_free: float
    kind: SequenceKind
    global_pulse_phase: float = 0.0
    n_units: int = 1
    allow_overlap: bool = False
    timings: "AxyTimings | None" = field(default=None, compare=False)

    def __post_init__(self):
        if not (self.t_free > 0 and np.isfinite(self.t_free)):
            raise ValueError("t_free must be positive and finite")
        if not self.pulses:
            raise ValueError("sequence has no pulses")
        c = self.centers
        if np.any(np.diff(c) <= 0):
            raise ValueError("pulse centers must be strictly increasing")
        if self.pulses[0].start < -_EPS * self.total_time or (
            self.pulses[-1].end > self.total_time * (1 + _EPS)
        ):
            raise ValueError("pulse support leaves the sequence window")
        if not self.allow_overlap and self.min_gap() < -_EPS * self.t_free:
            raise ValueError("pulses overlap")

    @property
    def omega_dd(self) -> float:
        return np.pi / self.t_free

    @property
    def centers(self) -> np.ndarray:
        return np.array([p.center_time for p in self.pulses])

    @property
    def durations(self) -> np.ndarray:
        return np.array([p.duration for p in self.pulses])

    @property
    def phases(self) -> np.ndarray:
        return np.array([p.axis_phase for p in self.pulses])

    def min_gap(self) -> float:
        """Smallest edge-to-edge spacing between consecutive pulses (negative on overlap)."""
        if len(self.pulses) < 2:
            return np.inf
        starts = np.array([p.start for p in self.pulses[1:]])
        ends = np.array([p.end for p in self.pulses[:-1]])
        return float(np.min(starts - ends))

    def free_intervals(self) -> list[tuple[float, float]]:
        """(start, end) of the free segments, including leading and trailing ones."""
        edges = [0.0]
        for p in self.pulses:
            edges.extend([p.start, p.end])
        edges.append(self.total_time)
        return list(zip(edges[0::2], edges[1::2]))

    def __len__(self):
        return len(self.pulses)


def _check_positive(**kw):
    for name, val in kw.items():
        if not (val > 0 and np.isfinite(val)):
            raise ValueError(f"{name} must be positive and finite, got {val}")


def _rabi_for(t_flip: float, omega: float | None) -> float:
    if t_flip == 0:
        return np.inf
    rabi = np.pi / t_flip if omega is None else omega
    if not np.isfinite(rabi):
        raise ValueError(f"t_flip={t_flip} is too short to give a finite Rabi frequency; use 0 for ideal pulses")
    return rabi


def build_standard(
    kind: SequenceKind | str,
    n_units: int,
    t_free: float,
    t_flip: float,
    omega: float | None = None,
    theta_pulse: float = 0.0,
) -> PulseSequence:
    """XY-8 (8 pulses per unit) or CPMG (2 pulses per unit, single axis).

    ``t_flip = 0`` builds ideal instantaneous pulses. If ``omega`` is omitted the
    Rabi frequency is ``pi / t_flip``.
    """
    kind = SequenceKind(kind)
    if kind not in (SequenceKind.XY8, SequenceKind.CPMG):
        raise ValueError(f"build_standard handles XY8 and CPMG, not {kind.value}")
    if int(n_units) != n_units or n_units < 1:
        raise ValueError("n_units must be a positive integer")
    _check_positive(t_free=t_free)
    if t_flip < 0:
        raise ValueError("t_flip must be >= 0")
    if t_flip >= t_free:
        raise ValueError(f"t_flip={t_flip} >= t_free={t_free}: pulses would overlap")
    if omega is not None:
        _check_positive(omega=omega)
    rabi = _rabi_for(t_flip, omega)
    angle = np.pi if t_flip == 0 else rabi * t_flip

    pattern = XY8_PATTERN if kind is SequenceKind.XY8 else (0.0, 0.0)
    n = len(pattern) * n_units
    pulses = tuple(
        Pulse(
            center_time=t_free * (j + 0.5),
            duration=t_flip,
            rabi=rabi,
            axis_phase=pattern[j % len(pattern)] + theta_pulse,
            nominal_angle=angle,
        )
        for j in range(n)
    )
    return PulseSequence(
        pulses=pulses,
        total_time=n * t_free,
        t_free=t_free,
        kind=kind,
        global_pulse_phase=theta_pulse,
        n_units=int(n_units),
    )


@dataclass(frozen=True)
class AxyTimings:
    """Sub-pulse positions of an AXY composite block as fractions of the filter period."""

    x: tuple[float, float, float, float, float]
    xi: float
    harmonic: int

    def __post_init__(self):
        x = self.x
        if len(x) != 5:
            raise ValueError("AXY timings need five fractions")
        if x[2] != 0.25:
            raise ValueError("x3 must be exactly 1/4")
        if not (0 < x[0] < x[1] < x[2] < x[3] < x[4] < 0.5):
            raise ValueError(f"AXY fractions not ordered inside (0, 1/2): {x}")
        if abs(x[0] + x[4] - 0.5) > 1e-14 or abs(x[1] + x[3] - 0.5) > 1e-14:
            raise ValueError("AXY fractions must be symmetric about 1/4")


def admissible_xi(harmonic: int) -> tuple[float, float]:
    """Open interval of achievable target coefficients for ``harmonic``."""
    if harmonic == 1:
        edge = (8 * np.cos(np.pi / 9) - 4) / np.pi
        return -edge, edge
    if harmonic == 3:
        return -4 / np.pi, 4 / np.pi
    raise ValueError(f"harmonic must be 1 or 3, got {harmonic}")


def solve_axy_timings(harmonic: int, xi: float) -> AxyTimings:
    """Sub-pulse fractions giving ``f_harmonic = xi`` with the other of f_1..f_4 zero.

    For the antisymmetric five-flip block the odd coefficients are
    ``f_l = 2/(pi l) [4 sin(2 pi l x1) - 4 sin(2 pi l x2) + 2 sin(pi l / 2)]``
    and even ones vanish, so two conditions fix ``x1, x2``.
    """
    lo, hi = admissible_xi(harmonic)
    if not (lo < xi < hi):
        raise ValueError(
            f"xi={xi} outside the admissible interval ({lo:.6g}, {hi:.6g}) "
            f"for harmonic {harmonic}"
        )
    if harmonic == 1:
        # f1 = xi and f3 = 0 in terms of a = sin(2 pi x1), b = sin(2 pi x2)
        d = (np.pi * xi - 4) / 8  # a - b
        k = (3 * d - 0.5) / (4 * d)  # a^2 + ab + b^2
        b = (-3 * d + np.sqrt(12 * k - 3 * d * d)) / 6
        a = b + d
        x1, x2 = np.arcsin(a) / (2 * np.pi), np.arcsin(b) / (2 * np.pi)
    else:
        root = np.sqrt(5 + np.pi * xi)
        q = [4 / (root + (-1) ** j) for j in (1, 2)]
        x1, x2 = (0.25 - np.arctan(np.sqrt(qj * qj - 1)) / (2 * np.pi) for qj in q)
    if x1 > x2:
        x1, x2 = x2, x1
    x1, x2 = float(x1), float(x2)
    return AxyTimings(x=(x1, x2, 0.25, 0.5 - x2, 0.5 - x1), xi=float(xi), harmonic=harmonic)


def build_axy8(
    n_units: int,
    t_free: float,
    timings: AxyTimings,
    t_flip_sub: float,
    omega: float | None = None,
    theta_pulse: float = 0.0,
    allow_overlap: bool = False,
) -> PulseSequence:
    """AXY-8: XY-8 ordering of composite Knill blocks, 40 pi pulses per unit.

    ``allow_overlap`` lets sub-pulses overlap in time; only the quantum engine
    can propagate such a sequence (each pulse then acts at its center).
    """
    if int(n_units) != n_units or n_units < 1:
        raise ValueError("n_units must be a positive integer")
    _check_positive(t_free=t_free)
    if t_flip_sub < 0:
        raise ValueError("t_flip_sub must be >= 0")
    rabi = _rabi_for(t_flip_sub, omega)
    angle = np.pi if t_flip_sub == 0 else rabi * t_flip_sub
    offsets = 2 * np.asarray(timings.x) * t_free

    gaps = np.diff(np.concatenate([offsets, [offsets[0] + t_free]]))
    if not allow_overlap and np.min(gaps) < t_flip_sub:
        raise ValueError(
            f"AXY sub-pulses overlap: smallest spacing {np.min(gaps):.4g} s "
            f"< pulse duration {t_flip_sub:.4g} s"
        )
    pulses = []
    for block in range(8 * int(n_units)):
        axis = XY8_PATTERN[block % 8] + theta_pulse
        for off, knill in zip(offsets, KNILL_PHASES):
            pulses.append(
                Pulse(
                    center_time=block * t_free + off,
                    duration=t_flip_sub,
                    rabi=rabi,
                    axis_phase=axis + knill,
                    nominal_angle=angle,
                )
            )
    kind = SequenceKind.AXY8_F1 if timings.harmonic == 1 else SequenceKind.AXY8_F3
    return PulseSequence(
        pulses=tuple(pulses),
        total_time=8 * int(n_units) * t_free,
        t_free=t_free,
        kind=kind,
        global_pulse_phase=theta_pulse,
        n_units=int(n_units),
        allow_overlap=allow_overlap,
        timings=timings,
    )


@dataclass(frozen=True)
class FilterSpectrum:
    coefficients: dict[int, float]

    def __getitem__(self, l: int) -> float:
        return self.coefficients[l]

    def as_array(self) -> np.ndarray:
        return np.array([self.coefficients[l] for l in sorted(self.coefficients)])


def toggling_function(seq: PulseSequence, t) -> np.ndarray:
    """+/-1 modulation imposed on a z-coupling by ideal flips at the pulse centers."""
    flips = np.searchsorted(seq.centers, np.asarray(t, dtype=float), side="right")
    return np.where(flips % 2 == 0, 1.0, -1.0)


def filter_fourier_coefficients(seq: PulseSequence, l_max: int) -> FilterSpectrum:
    """Cosine coefficients of the toggling function w.r.t. the period ``2 t_free``.

    The integral of the piecewise-constant toggling function is evaluated segment
    by segment and averaged over the whole sequence duration.
    """
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    period = 2 * seq.t_free
    edges = np.concatenate([[0.0], seq.centers, [seq.total_time]])
    signs = np.where(np.arange(len(edges) - 1) % 2 == 0, 1.0, -1.0)
    coeffs = {}
    for l in range(1, l_max + 1):
        k = 2 * np.pi * l / period
        s = np.sin(k * edges)
        coeffs[l] = float(2 / seq.total_time * np.sum(signs * np.diff(s)) / k)
    return FilterSpectrum(coeffs)
