"""Truncated Fock-space and qubit operator algebra.

Composite qubit (x) cavity vectors use the qubit as the slow index:
``index = s * dim + n`` with ``s = 0`` for ``|+z>`` and ``s = 1`` for ``|-z>``.
A partial trace over the qubit is then a sum over two ``dim``-long blocks.

The squeeze operator follows the textbook convention
``S(r) = exp(r/2 (a^2 - a^dag^2))``: for ``r > 0`` the quadrature
``x = (a + a^dag)/sqrt(2)`` of ``S(r)|0>`` has variance ``exp(-2r)/2``.
The displaced squeezed state ``|alpha, r> = D(alpha) S(-r)|0>`` is therefore
stretched along ``x`` for ``r > 0``, and ``<alpha, r|-alpha, r> = exp(-2 alpha^2 e^{-2r})``.
"""

from __future__ import annotations

import math

import numba
import numpy as np
from scipy.linalg import expm

from .errors import InvalidDimensionError, TruncationError

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

PLUS_Z = np.array([1.0, 0.0], dtype=complex)
MINUS_Z = np.array([0.0, 1.0], dtype=complex)
PLUS_X = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
MINUS_X = np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0)

# tolerated loss of norm when a Gaussian state is cut at the top Fock level
TRUNCATION_TOL = 1e-6


def _check_dim(dim: int) -> int:
    if int(dim) != dim or dim < 1:
        raise InvalidDimensionError(f"cavity dimension must be a positive integer, got {dim!r}")
    return int(dim)


def annihilation(dim: int) -> np.ndarray:
    """Ladder operator ``a`` with ``a[n-1, n] = sqrt(n)``."""
    dim = _check_dim(dim)
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def creation(dim: int) -> np.ndarray:
    return annihilation(dim).T.copy()


def number(dim: int) -> np.ndarray:
    dim = _check_dim(dim)
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def identity(dim: int) -> np.ndarray:
    return np.eye(_check_dim(dim), dtype=complex)


def parity(dim: int) -> np.ndarray:
    """Cavity parity ``(-1)^n`` as a diagonal matrix."""
    dim = _check_dim(dim)
    return np.diag((-1.0) ** np.arange(dim)).astype(complex)


def displacement(dim: int, alpha: complex) -> np.ndarray:
    """``D(alpha) = exp(alpha a^dag - alpha^* a)`` in the truncated space."""
    a = annihilation(dim)
    return expm(alpha * a.T - np.conj(alpha) * a)


def squeeze(dim: int, r: float) -> np.ndarray:
    """``S(r) = exp(r/2 (a^2 - a^dag^2))`` for real ``r``."""
    a = annihilation(dim)
    a2 = a @ a
    return expm(0.5 * r * (a2 - a2.T))


@numba.njit(cache=True)
def _gaussian_recurrence(dim, drive, ch, sh):
    c = np.zeros(dim)
    c[0] = 1.0
    log_scale = 0.0
    if dim > 1:
        c[1] = drive / ch
    big = 1e150
    for n in range(1, dim - 1):
        nxt = (drive * c[n] + sh * math.sqrt(n) * c[n - 1]) / (ch * math.sqrt(n + 1))
        c[n + 1] = nxt
        # rescale to dodge overflow; entries that underflow are negligible anyway
        if abs(nxt) > big:
            for k in range(n + 2):
                c[k] /= big
            log_scale += math.log(big)
    return c, log_scale


def displaced_squeezed_amplitudes(dim: int, alpha: float, r: float) -> tuple[np.ndarray, float]:
    """Fock amplitudes of ``D(alpha) S(-r)|0>`` for ``n < dim``.

    Returns the (unrenormalized) truncated amplitudes and their squared norm.
    The amplitudes come from the annihilation condition
    ``cosh r sqrt(n+1) c[n+1] - sinh r sqrt(n) c[n-1] = alpha e^{-r} c[n]``,
    which gives the infinite-space state exactly, so the squared norm measures
    how much weight lives above the cut.
    """
    dim = _check_dim(dim)
    alpha = float(alpha)
    r = float(r)
    ch, sh = math.cosh(r), math.sinh(r)
    drive = alpha * math.exp(-r)
    # log of the exact vacuum amplitude
    log_c0 = -alpha * alpha / (1.0 + math.exp(2.0 * r)) - 0.5 * math.log(ch)

    c, log_scale = _gaussian_recurrence(dim, drive, ch, sh)

    s = float(np.dot(c, c))
    if s == 0.0 or not math.isfinite(s):
        raise TruncationError(f"amplitude recurrence failed for alpha={alpha}, r={r}")
    log_norm2 = math.log(s) + 2.0 * (log_scale + log_c0)
    c *= math.exp(-0.5 * math.log(s))
    norm2 = math.exp(min(log_norm2, 1.0))
    return c * math.sqrt(norm2), norm2


def displaced_squeezed_state(dim: int, alpha_c: float, r: float, check: bool = True) -> np.ndarray:
    """Normalized cavity state ``D(alpha_c) S(-r)|0>``.

    Raises TruncationError when more than ``TRUNCATION_TOL`` of the weight
    falls above the top Fock level (unless ``check`` is False).
    """
    amps, norm2 = displaced_squeezed_amplitudes(dim, alpha_c, r)
    if check and abs(1.0 - norm2) > TRUNCATION_TOL:
        raise TruncationError(
            f"dim={dim} loses {1.0 - norm2:.3e} of |{alpha_c}, {r}>; increase the cavity dimension"
        )
    return (amps / math.sqrt(norm2)).astype(complex)


def coherent_state(dim: int, alpha: float, check: bool = True) -> np.ndarray:
    return displaced_squeezed_state(dim, alpha, 0.0, check=check)


def gaussian_overlap(alpha_c: float, r: float) -> float:
    """``<alpha_c, r|-alpha_c, r> = exp(-2 alpha_c^2 e^{-2r})``."""
    return math.exp(-2.0 * alpha_c * alpha_c * math.exp(-2.0 * r))


def fock(dim: int, n: int) -> np.ndarray:
    v = np.zeros(_check_dim(dim), dtype=complex)
    v[n] = 1.0
    return v


def qubit_ops() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return SIGMA_X.copy(), SIGMA_Y.copy(), SIGMA_Z.copy()


def tensor(a_qubit: np.ndarray, b_cavity: np.ndarray) -> np.ndarray:
    """Kronecker product with the qubit as the slow index (works for vectors too)."""
    return np.kron(a_qubit, b_cavity)


def qubit_pointer(phi: float) -> tuple[np.ndarray, np.ndarray]:
    """Pointer states ``|+-[phi]> = cos(phi/2)|+z> -+ sin(phi/2)|-z>``."""
    c, s = math.cos(phi / 2.0), math.sin(phi / 2.0)
    return np.array([c, -s], dtype=complex), np.array([c, s], dtype=complex)


def normalize(v: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return v / nrm


def cavity_blocks(state: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a composite vector into its ``|+z>`` and ``|-z>`` cavity blocks."""
    dim = state.shape[0] // 2
    return state[:dim], state[dim:]


def pad_cavity(state: np.ndarray, dim: int) -> np.ndarray:
    """Zero-pad a composite vector to a larger cavity dimension."""
    up, down = cavity_blocks(state)
    old = up.shape[0]
    if dim < old:
        raise InvalidDimensionError(f"cannot pad from cavity dim {old} down to {dim}")
    out = np.zeros(2 * dim, dtype=complex)
    out[:old] = up
    out[dim : dim + old] = down
    return out


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


def unitarity_error(m: np.ndarray, interior: int | None = None) -> float:
    """``max |M M^dag - I|`` optionally restricted to the leading ``interior`` block."""
    prod = m @ m.conj().T
    if interior is not None:
        prod = prod[:interior, :interior]
    return float(np.max(np.abs(prod - np.eye(prod.shape[0]))))
