"""Rabi Hamiltonian, its frame transformations and derived scalars.

The parity unitary is ``exp(-i pi/4 (1 - Pi) sigma_y)`` with the standard
``sigma_y``; with that sign the transformed Hamiltonian reads
``w_c a^dag a - g sigma_z (a + a^dag) + (w_q/2) Pi sigma_z`` and a parity-frame
state ``psi (x) |-z>`` maps back to ``psi_even |-z> + psi_odd |+z>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from . import qops
from .errors import ParameterRangeError, ResonanceError


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the Rabi model (all in the same energy unit)."""

    omega_c: float = 1.0
    omega_q: float = 1.0
    g: float = 0.0

    def __post_init__(self):
        if not self.omega_c > 0:
            raise ParameterRangeError(f"omega_c must be > 0, got {self.omega_c}")
        if not self.omega_q >= 0:
            raise ParameterRangeError(f"omega_q must be >= 0, got {self.omega_q}")
        if not self.g >= 0:
            raise ParameterRangeError(f"g must be >= 0, got {self.g}")

    @classmethod
    def from_ratio(cls, omega_q: float, g_over_gstar: float, omega_c: float = 1.0) -> "ModelParams":
        """Coupling given in units of the approximate crossover ``sqrt(w_c w_q)/2``."""
        gs = 0.5 * math.sqrt(omega_c * omega_q)
        return cls(omega_c=omega_c, omega_q=omega_q, g=g_over_gstar * gs)


def rabi_hamiltonian(p: ModelParams, dim: int, sparse_format: bool = False):
    """``w_c a^dag a + g sigma_x (a + a^dag) + (w_q/2) sigma_z`` on qubit (x) cavity."""
    a = sparse.diags(np.sqrt(np.arange(1, dim, dtype=float)), 1, format="csr")
    n = sparse.diags(np.arange(dim, dtype=float), format="csr")
    eye2 = sparse.identity(2, format="csr")
    eye = sparse.identity(dim, format="csr")
    sx = sparse.csr_matrix(qops.SIGMA_X.real)
    sz = sparse.csr_matrix(qops.SIGMA_Z.real)
    h = p.omega_c * sparse.kron(eye2, n) + p.g * sparse.kron(sx, a + a.T) + 0.5 * p.omega_q * sparse.kron(sz, eye)
    h = h.tocsr()
    return h if sparse_format else h.toarray().astype(complex)


def apply_rabi(p: ModelParams, state: np.ndarray) -> np.ndarray:
    """``H |state>`` in O(dim) without building the matrix."""
    up, down = qops.cavity_blocks(state)
    dim = up.shape[0]
    nvec = np.arange(dim, dtype=float)
    sq = np.sqrt(nvec[1:])

    def x_op(v):
        out = np.zeros_like(v)
        out[:-1] += sq * v[1:]
        out[1:] += sq * v[:-1]
        return out

    h_up = p.omega_c * nvec * up + p.g * x_op(down) + 0.5 * p.omega_q * up
    h_down = p.omega_c * nvec * down + p.g * x_op(up) - 0.5 * p.omega_q * down
    return np.concatenate([h_up, h_down])


def energy(p: ModelParams, state: np.ndarray) -> float:
    return float(np.vdot(state, apply_rabi(p, state)).real / np.vdot(state, state).real)


def total_parity(dim: int) -> np.ndarray:
    """Conserved excitation parity ``-sigma_z (x) Pi``."""
    return qops.tensor(-qops.SIGMA_Z, qops.parity(dim))


def total_parity_expectation(state: np.ndarray) -> float:
    up, down = qops.cavity_blocks(state)
    sign = (-1.0) ** np.arange(up.shape[0])
    val = -np.sum(sign * np.abs(up) ** 2) + np.sum(sign * np.abs(down) ** 2)
    return float(val / np.vdot(state, state).real)


def parity_unitary(dim: int) -> np.ndarray:
    """``U_Pi``: identity on even Fock levels, ``-i sigma_y`` on odd ones."""
    u = np.zeros((2 * dim, 2 * dim), dtype=complex)
    for n in range(dim):
        up, down = n, dim + n
        if n % 2 == 0:
            u[up, up] = u[down, down] = 1.0
        else:
            # -i sigma_y = [[0, -1], [1, 0]]
            u[up, down] = -1.0
            u[down, up] = 1.0
    return u


def parity_frame_hamiltonian(p: ModelParams, dim: int) -> np.ndarray:
    a = qops.annihilation(dim)
    x = a + a.T
    return (
        p.omega_c * qops.tensor(np.eye(2), qops.number(dim))
        - p.g * qops.tensor(qops.SIGMA_Z, x)
        + 0.5 * p.omega_q * qops.tensor(qops.SIGMA_Z, qops.parity(dim))
    )


def parity_block_tridiagonal(p: ModelParams, dim: int, sector: int = -1) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of the parity-frame block with ``<sigma_z> = sector``.

    ``sector=-1`` is ``w_c n + g (a + a^dag) - (w_q/2) Pi`` (even total parity);
    ``sector=+1`` flips the signs of the coupling and qubit terms.
    """
    if sector not in (-1, 1):
        raise ValueError("sector must be -1 or +1")
    n = np.arange(dim, dtype=float)
    diag = p.omega_c * n + sector * 0.5 * p.omega_q * (-1.0) ** n
    off = -sector * p.g * np.sqrt(n[1:])
    return diag, off


def parity_block(p: ModelParams, dim: int, sector: int = -1) -> np.ndarray:
    diag, off = parity_block_tridiagonal(p, dim, sector)
    return (np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)).astype(complex)


def parity_minus_block(p: ModelParams, dim: int) -> np.ndarray:
    return parity_block(p, dim, -1)


def to_lab_frame(block_state: np.ndarray, sector: int = -1) -> np.ndarray:
    """Map a parity-frame cavity vector ``psi (x) |sector z>`` back to the lab frame."""
    psi = np.asarray(block_state)
    dim = psi.shape[0]
    even = np.zeros(dim, dtype=complex)
    odd = np.zeros(dim, dtype=complex)
    even[0::2] = psi[0::2]
    odd[1::2] = psi[1::2]
    if sector == -1:
        up, down = odd, even
    elif sector == 1:
        up, down = even, -odd
    else:
        raise ValueError("sector must be -1 or +1")
    return np.concatenate([up, down])


def polaron_unitary(dim: int, alpha: float) -> np.ndarray:
    proj_p = np.outer(qops.PLUS_X, qops.PLUS_X.conj())
    proj_m = np.outer(qops.MINUS_X, qops.MINUS_X.conj())
    return qops.tensor(proj_p, qops.displacement(dim, alpha)) + qops.tensor(proj_m, qops.displacement(dim, -alpha))


def _check_resonance(p: ModelParams):
    if abs(p.omega_q - p.omega_c) < 1e-9 * p.omega_c:
        raise ResonanceError("Schrieffer-Wolff transformation is singular at omega_q = omega_c")


def sw_generator(p: ModelParams, dim: int) -> np.ndarray:
    """Anti-Hermitian generator ``A`` that removes the coupling to first order."""
    _check_resonance(p)
    a = qops.annihilation(dim)
    pref = p.g * p.omega_c / (p.omega_q**2 - p.omega_c**2)
    return pref * (
        qops.tensor(qops.SIGMA_X, a - a.T) + 1j * (p.omega_q / p.omega_c) * qops.tensor(qops.SIGMA_Y, a + a.T)
    )


def sw_effective_hamiltonian(p: ModelParams, dim: int) -> np.ndarray:
    _check_resonance(p)
    a = qops.annihilation(dim)
    x = a + a.T
    kappa = p.g**2 * p.omega_q / (p.omega_q**2 - p.omega_c**2)
    return (
        p.omega_c * qops.tensor(np.eye(2), qops.number(dim))
        + kappa * qops.tensor(qops.SIGMA_Z, x @ x)
        + 0.5 * p.omega_q * qops.tensor(qops.SIGMA_Z, np.eye(dim))
    )


def g_star(p: ModelParams, approximate: bool = True) -> float:
    """Crossover coupling; ``sqrt(w_c w_q)/2`` or the exact instability point."""
    if approximate:
        return 0.5 * math.sqrt(p.omega_c * p.omega_q)
    if p.omega_q <= p.omega_c:
        raise ParameterRangeError("exact g* requires omega_q > omega_c")
    return 0.5 * math.sqrt(p.omega_c * p.omega_q * (1.0 - (p.omega_c / p.omega_q) ** 2))


def weak_coupling_squeeze(p: ModelParams) -> float:
    """Squeeze parameter of the second-order effective Hamiltonian's ground state."""
    _check_resonance(p)
    arg = 1.0 - 4.0 * p.g**2 * p.omega_q / (p.omega_c * (p.omega_q**2 - p.omega_c**2))
    if arg <= 0.0:
        raise ParameterRangeError(f"g={p.g} is at or beyond the parametric instability")
    return -0.25 * math.log(arg)
