"""Closed-form leading-order expressions for the XY-8 transition probability.

Every function evaluates its expression as written, with no simplification, so
that it stays independent of the numerical engines. Only the leading order is
returned; callers must account for the neglected remainder.

Sign convention: ``signal_ratio`` is the signed ratio ``gamma_n B / w_ac`` of a
field that peaks at the first pulse. Against the simulated Hamiltonian
``+b sin(w_ac t + theta) sz/2`` with ``theta = 0`` this corresponds to
``signal_ratio = -b / w_ac`` (see :func:`tilt_input_for`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class TiltExpansionInput:
    beta_max: float
    phi: float = 0.0
    signal_ratio: float = 0.0
    alpha: float = 1.0
    theta: float = 0.0

    def __post_init__(self):
        if self.beta_max < 0:
            raise ValueError("beta_max must be >= 0")


@dataclass(frozen=True)
class ErrorExpansionInput:
    beta_t: float
    gamma_t: float
    delta_t: float
    eta: float
    phi: float = 0.0

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError("eta must be >= 0")


def tilt_input_for(amplitude, omega_ac, rabi, theta=0.0, phi=0.0, alpha=1.0):
    """Expansion input matching a simulated field ``amplitude sin(w_ac t + theta)``.

    Only ``theta`` = 0 or pi (pulses on the field antinodes for alpha = 1) is
    covered by the expansions.
    """
    wrapped = np.mod(theta, 2 * np.pi)
    if np.isclose(wrapped, 0) or np.isclose(wrapped, 2 * np.pi):
        sign = -1.0
    elif np.isclose(wrapped, np.pi):
        sign = 1.0
    else:
        raise ValueError("tilt expansions assume theta = 0 or pi")
    return TiltExpansionInput(
        beta_max=amplitude / rabi,
        phi=phi,
        signal_ratio=sign * amplitude / omega_ac,
        alpha=alpha,
        theta=theta,
    )


def oracle_alpha1(inp: TiltExpansionInput):
    """Real resonance: the tilt enters only at sixth order."""
    return -16 * (np.sin(2 * inp.signal_ratio - 2 * inp.phi) - 1) * inp.beta_max**6


def oracle_alpha2(inp: TiltExpansionInput):
    r = inp.signal_ratio
    return (
        8
        * np.cos(r / SQRT2) ** 2
        * (1 + np.sin(2 * (SQRT2 - 1) * r + 2 * inp.phi))
        * inp.beta_max**2
    )


def oracle_alpha4(inp: TiltExpansionInput):
    """Valid for ``signal_ratio << 1``; the O(signal_ratio) correction is dropped."""
    return 2 * (SQRT2 - 2) * (np.sin(2 * inp.phi) - 1) * inp.beta_max**2


def oracle_ideal_first_order(alpha, theta, signal_ratio_abs, omega_ac=1.0):
    """Single XY-8 unit, zero tilt.

    ``signal_ratio_abs`` is ``gamma_n B`` in rad/s when ``omega_ac`` is given in
    rad/s, or the ratio ``gamma_n B / w_ac`` with the default ``omega_ac = 1``.
    """
    alpha = np.asarray(alpha, dtype=float)
    csum = (
        np.cos(3 * np.pi / (4 * alpha))
        + np.cos(5 * np.pi / (4 * alpha))
        + np.cos(11 * np.pi / (4 * alpha))
        + np.cos(13 * np.pi / (4 * alpha))
    )
    arg = (
        16
        * signal_ratio_abs
        * csum
        * np.sin(np.pi / (4 * alpha)) ** 3
        * np.sin(4 * np.pi / alpha + theta)
        / omega_ac
    )
    return 0.5 * (1 - np.cos(arg))


def oracle_second_order_single(alpha, phi):
    """Coefficient of beta_max^2 after one XY-8 unit (signal_ratio << 1)."""
    a = np.asarray(alpha, dtype=float)
    c = (
        np.sin(np.pi / (2 * a))
        - np.sin(5 * np.pi / (2 * a))
        + np.sin(11 * np.pi / (2 * a))
        - np.sin(15 * np.pi / (2 * a))
    )
    s = (
        np.sin(3 * np.pi / (2 * a))
        - np.sin(7 * np.pi / (2 * a))
        + np.sin(9 * np.pi / (2 * a))
        - np.sin(13 * np.pi / (2 * a))
    )
    return (c * np.cos(phi) + s * np.sin(phi)) ** 2


def oracle_second_order_triple(alpha, phi):
    """Coefficient of beta_max^2 after three XY-8 units (signal_ratio << 1)."""
    a = np.asarray(alpha, dtype=float)
    sines = (
        np.sin(7 * np.pi / (2 * a))
        - np.sin(9 * np.pi / (2 * a))
        + np.sin(23 * np.pi / (2 * a))
        - np.sin(25 * np.pi / (2 * a))
        + np.sin(39 * np.pi / (2 * a))
        - np.sin(41 * np.pi / (2 * a))
    )
    phase = (
        np.cos(phi)
        + 2 * np.cos(2 * np.pi / a) * np.cos(phi)
        - np.sin(phi)
        + 2 * np.cos(np.pi / a) * (np.sin(phi) - np.cos(phi))
    )
    return 16 * np.cos(np.pi / (4 * a)) ** 4 * sines**2 * phase**2


def oracle_error_expansion_alpha1(inp: ErrorExpansionInput):
    """Real resonance with tilt, detuning and flip-angle errors all of order eta."""
    b, g, d, phi = inp.beta_t, inp.gamma_t, inp.delta_t, inp.phi
    return (
        0.25
        * (4 * b**2 - 4 * g**2 + d**2) ** 2
        * ((2 * b + d) * np.cos(phi) + (2 * b - d) * np.sin(phi)) ** 2
        * inp.eta**6
    )


ORACLES = {
    "alpha1": oracle_alpha1,
    "alpha2": oracle_alpha2,
    "alpha4": oracle_alpha4,
    "ideal_first_order": oracle_ideal_first_order,
    "second_order_single": oracle_second_order_single,
    "second_order_triple": oracle_second_order_triple,
    "error_expansion_alpha1": oracle_error_expansion_alpha1,
}
