"""Shared two-level algebra, sensor preparation and result containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
ID2 = np.eye(2, dtype=complex)


def su2(hx, hy, hz, dt):
    """Exact ``exp(-i dt (hx sx + hy sy + hz sz) / 2)`` for arrays of field components.

    Returns an array of shape ``broadcast(hx, hy, hz, dt).shape + (2, 2)``.
    """
    hx, hy, hz, dt = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (hx, hy, hz, dt))
    )
    norm = np.sqrt(hx**2 + hy**2 + hz**2)
    half = 0.5 * norm * dt
    c = np.cos(half)
    # sin(half)/norm, finite at norm == 0
    s = 0.5 * dt * np.sinc(half / np.pi)
    out = np.empty(hx.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c - 1j * s * hz
    out[..., 1, 1] = c + 1j * s * hz
    out[..., 0, 1] = -1j * s * (hx - 1j * hy)
    out[..., 1, 0] = -1j * s * (hx + 1j * hy)
    return out


def ordered_product(mats: np.ndarray) -> np.ndarray:
    """Time-ordered product ``M[n-1] @ ... @ M[1] @ M[0]`` of a stack of square matrices."""
    mats = np.asarray(mats)
    if mats.shape[0] == 0:
        raise ValueError("empty product")
    eye = np.eye(mats.shape[-1], dtype=mats.dtype)
    while mats.shape[0] > 1:
        if mats.shape[0] % 2:
            mats = np.concatenate([mats, eye[None]], axis=0)
        mats = mats[1::2] @ mats[0::2]
    return mats[0]


@dataclass(frozen=True)
class SensorPreparation:
    """Equatorial initial sensor state with phase ``phi`` (radians)."""

    phi: float = 0.0

    def ket(self) -> np.ndarray:
        return np.array([1.0, np.exp(1j * self.phi)]) / np.sqrt(2.0)

    def orthogonal_ket(self) -> np.ndarray:
        return np.array([1.0, -np.exp(1j * self.phi)]) / np.sqrt(2.0)

    def density_matrix(self) -> np.ndarray:
        e = np.exp(-1j * self.phi)
        return 0.5 * np.array([[1.0, e], [np.conj(e), 1.0]])


@dataclass(frozen=True)
class ControlErrors:
    """Static detuning (rad/s) and fractional Rabi-frequency error."""

    detuning: float = 0.0
    rabi_relative_error: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.detuning):
            raise ValueError("detuning must be finite")
        if not abs(self.rabi_relative_error) < 1:
            raise ValueError("|rabi_relative_error| must be < 1")

    @property
    def flip_angle_error(self) -> float:
        """Rotation-angle excess of a nominal pi pulse."""
        return np.pi * self.rabi_relative_error


@dataclass
class EvolutionResult:
    probability: float
    final_state: np.ndarray
    propagator: np.ndarray | None = field(default=None, repr=False)
    warnings: tuple[str, ...] = ()


def transition_probability(U: np.ndarray, prep: SensorPreparation) -> float:
    """``1 - Tr[rho(t) rho0]`` for a sensor (2x2) or sensor x register propagator.

    The register (if any) starts maximally mixed and is traced out. Computed as the
    population of the state orthogonal to the preparation, which avoids the
    cancellation in ``1 - Tr`` when the signal is tiny.
    """
    dim = U.shape[0]
    m = dim // 2
    psi = prep.ket()
    perp = prep.orthogonal_ket()
    blocks = U.reshape(2, m, 2, m)
    # <perp| U |psi> as an m x m operator on the register
    amp = np.einsum("a,aibj,b->ij", perp.conj(), blocks, psi)
    return float(np.sum(np.abs(amp) ** 2) / m)


def evolve_state(U: np.ndarray, prep: SensorPreparation) -> np.ndarray:
    """Full final density matrix for sensor prepared by ``prep`` and mixed register."""
    m = U.shape[0] // 2
    rho0 = np.kron(prep.density_matrix(), np.eye(m) / m)
    return U @ rho0 @ U.conj().T


def reduce_to_sensor(rho: np.ndarray) -> np.ndarray:
    m = rho.shape[0] // 2
    return np.einsum("aibi->ab", rho.reshape(2, m, 2, m))
