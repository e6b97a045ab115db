"""Hermitian eigensolves and the cavity truncation policy.

``lowest_eigenpairs`` is the general dense solver. Rabi-model spectra are
computed sector by sector instead: each parity-frame block is a real
symmetric tridiagonal matrix, so the lowest levels of both sectors come from
``eigh_tridiagonal`` and are mapped back to the lab frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal

from . import model, qops
from .errors import ConvergenceError, NonHermitianError
from .model import ModelParams

ENERGY_TOL = 1e-9
FIDELITY_TOL = 1e-9
MIN_DIM = 50
DEGENERACY_TOL = 1e-12


@dataclass
class EigenResult:
    eigenvalues: np.ndarray
    # columns are eigenvectors
    vectors: np.ndarray
    parities: np.ndarray = field(default=None)

    @property
    def eigenvectors(self) -> list[np.ndarray]:
        return [self.vectors[:, k] for k in range(self.vectors.shape[1])]

    def vector(self, k: int = 0) -> np.ndarray:
        return self.vectors[:, k]

    @property
    def dim(self) -> int:
        return self.vectors.shape[0] // 2


def truncation_dim(p: ModelParams) -> int:
    """Cavity dimension ``max(50, nearest integer to 5 (g/w_c)^2)``."""
    return max(MIN_DIM, int(math.floor(5.0 * (p.g / p.omega_c) ** 2 + 0.5)))


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column real and positive."""
    vectors = np.array(vectors, dtype=complex, copy=True)
    if vectors.ndim == 1:
        return fix_phases(vectors[:, None])[:, 0]
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    cols = np.arange(vectors.shape[1])
    vectors /= (pivots / np.abs(pivots))[None, :]
    # the rotation leaves rounding noise on the pivot itself
    vectors[idx, cols] = np.abs(pivots)
    return vectors


def _residuals(h, values, vectors):
    return np.linalg.norm(h @ vectors - vectors * values[None, :], axis=0)


def lowest_eigenpairs(h: np.ndarray, k: int = 1) -> EigenResult:
    """The ``k`` lowest eigenpairs of a dense Hermitian matrix."""
    h = np.asarray(h)
    n = h.shape[0]
    if h.ndim != 2 or h.shape[1] != n:
        raise ValueError("expected a square matrix")
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    herm = qops.hermiticity_error(h)
    if herm > 1e-10:
        raise NonHermitianError(f"matrix is not Hermitian (max deviation {herm:.2e})")
    values, vectors = eigh(h, subset_by_index=[0, k - 1])
    vectors = fix_phases(vectors)
    scale = max(float(np.max(np.abs(h))), 1.0)
    res = _residuals(h, values, vectors)
    if np.any(res > 1e-9 * scale * n):
        raise ConvergenceError(f"eigenpair residuals too large: max {res.max():.3e}")
    return EigenResult(values, vectors)


def sector_eigenpairs(p: ModelParams, dim: int, sector: int, k: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Lowest ``k`` levels of one parity sector, as lab-frame vectors."""
    diag, off = model.parity_block_tridiagonal(p, dim, sector)
    values, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, k - 1))
    lab = np.column_stack([model.to_lab_frame(vecs[:, j], sector) for j in range(k)])
    return values, fix_phases(lab)


def _sector_solutions(p: ModelParams, dim: int, k: int) -> dict:
    k_sector = min(k, dim)
    return {sector: sector_eigenpairs(p, dim, sector, k_sector) for sector in (-1, 1)}


def _merge(solutions: dict, k: int) -> EigenResult:
    vals_e, vecs_e = solutions[-1]
    vals_o, vecs_o = solutions[1]
    values = np.concatenate([vals_e, vals_o])
    vectors = np.concatenate([vecs_e, vecs_o], axis=1)
    parities = np.concatenate([np.ones(len(vals_e)), -np.ones(len(vals_o))])
    order = list(np.argsort(values, kind="stable"))
    # levels degenerate to rounding keep the even state first, so the ground
    # state has a definite (even) parity even when tunnelling is unresolvable
    tol = DEGENERACY_TOL * max(1.0, float(np.max(np.abs(values))))
    for i in range(len(order) - 1):
        a, b = order[i], order[i + 1]
        if parities[a] < parities[b] and values[b] - values[a] < tol:
            order[i], order[i + 1] = b, a
    order = np.array(order[:k])
    return EigenResult(values[order], vectors[:, order], parities[order])


def rabi_lowest_states(p: ModelParams, dim: int, k: int = 1) -> EigenResult:
    """The ``k`` lowest Rabi eigenstates, merged from both parity sectors."""
    return _merge(_sector_solutions(p, dim, k), k)


def _agreement(small: dict, big: dict, omega_c: float) -> tuple[float, float]:
    # compared sector by sector so near-degenerate levels cannot swap places
    d_energy, infid = 0.0, 0.0
    for sector in (-1, 1):
        vals_s, vecs_s = small[sector]
        vals_b, vecs_b = big[sector]
        d_energy = max(d_energy, float(np.max(np.abs(vals_s - vals_b))))
        dim_b = vecs_b.shape[0] // 2
        for j in range(vecs_s.shape[1]):
            padded = qops.pad_cavity(vecs_s[:, j], dim_b)
            infid = max(infid, 1.0 - abs(np.vdot(padded, vecs_b[:, j])))
    return d_energy / omega_c, infid


def converged_ground_state(p: ModelParams, k: int = 1, dim: int | None = None) -> tuple[EigenResult, int]:
    """Lowest ``k`` eigenstates at a cavity dimension that passes a convergence test.

    The solve at ``dim`` (default: ``truncation_dim(p)``) is accepted when a
    solve at ``ceil(1.25 dim)`` reproduces its energies within 1e-9 w_c and
    its vectors with fidelity above 1 - 1e-9. One further escalation is tried
    before giving up.
    """
    current = truncation_dim(p) if dim is None else int(dim)
    sols = _sector_solutions(p, current, k)
    for _ in range(2):
        bigger = int(math.ceil(1.25 * current))
        check = _sector_solutions(p, bigger, k)
        d_energy, infid = _agreement(sols, check, p.omega_c)
        if d_energy < ENERGY_TOL and infid < FIDELITY_TOL:
            return _merge(sols, k), current
        current, sols = bigger, check
    raise ConvergenceError(
        f"no convergence up to cavity dim {current} for {p} (dE={d_energy:.2e}, 1-F={infid:.2e})"
    )


@lru_cache(maxsize=64)
def cached_exact(p: ModelParams, k: int = 2, dim: int | None = None) -> tuple[EigenResult, int]:
    return converged_ground_state(p, k=k, dim=dim)
