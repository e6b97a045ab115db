"""Variational states, reduced cavity states, purity and Wigner functions.

All composite vectors follow the qubit-slow layout of ``qops``. The NOQ
family is

    (|a, r>|+[phi]> - |-a, r>|-[phi]>) / sqrt(2 N),   N = 1 - e cos(phi),

with ``e = exp(-2 a^2 e^{-2r})``. Its Schmidt form is

    sqrt(p) |Phi+>|-z> - sqrt(1 - p) |Phi->|+z>,

with ``p = 1/2 + (e - cos phi) / (2 N)`` and ``Phi+-`` the normalized squeezed
cats of even/odd parity.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import qops
from .errors import ParameterRangeError, VanishingNormError

_NORM_FLOOR = 1e-12
_PHI_SLACK = 1e-12


@dataclass(frozen=True)
class NOQParams:
    alpha_c: float
    r: float
    phi: float

    def __post_init__(self):
        if self.alpha_c < 0:
            raise ParameterRangeError(f"alpha_c must be >= 0, got {self.alpha_c}")
        if not (math.pi / 2 - _PHI_SLACK <= self.phi <= math.pi + _PHI_SLACK):
            raise ParameterRangeError(f"phi must lie in [pi/2, pi], got {self.phi}")

    @property
    def overlap(self) -> float:
        return qops.gaussian_overlap(self.alpha_c, self.r)

    @property
    def norm(self) -> float:
        return 1.0 - self.overlap * math.cos(self.phi)

    @property
    def norm_excited(self) -> float:
        return 1.0 + self.overlap * math.cos(self.phi)

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha_c, self.r, self.phi])


@dataclass(frozen=True)
class SchmidtParams:
    p_minus: float
    alpha_c: float
    r: float

    def __post_init__(self):
        if not (0.5 - 1e-12 <= self.p_minus <= 1.0 + 1e-12):
            raise ParameterRangeError(f"p_minus must lie in [0.5, 1], got {self.p_minus}")
        if self.alpha_c < 0:
            raise ParameterRangeError(f"alpha_c must be >= 0, got {self.alpha_c}")

    def as_array(self) -> np.ndarray:
        return np.array([self.p_minus, self.alpha_c, self.r])


@dataclass(frozen=True)
class DSSParams:
    """Double squeezed state: two squeezed cat pairs mixed by ``t``."""

    alpha1: float
    alpha2: float
    r1: float
    r2: float
    t: float

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise ParameterRangeError(f"t must lie in [0, 1], got {self.t}")


@dataclass(frozen=True)
class GridSpec:
    """Phase-space grid in quadrature units, ``alpha = (x + i p) / sqrt(2)``."""

    x_min: float = -5.0
    x_max: float = 5.0
    nx: int = 101
    p_min: float = -5.0
    p_max: float = 5.0
    np_: int = 101

    @classmethod
    def around(cls, alpha_c: float, n: int = 101) -> "GridSpec":
        half = math.sqrt(2.0) * (1.5 * abs(alpha_c) + 3.0)
        return cls(-half, half, n, -half, half, n)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def ps(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.np_)


@dataclass
class WignerGrid:
    xs: np.ndarray
    ps: np.ndarray
    # values[j, i] is W at (xs[i], ps[j]); rows run over p
    values: np.ndarray

    @property
    def dx(self) -> float:
        return float(self.xs[1] - self.xs[0]) if len(self.xs) > 1 else 0.0

    @property
    def dp(self) -> float:
        return float(self.ps[1] - self.ps[0]) if len(self.ps) > 1 else 0.0

    def integral(self) -> float:
        """``(1/pi) sum W dx dp``; equals 2 Tr(rho) for a grid covering the state."""
        return float(self.values.sum() * self.dx * self.dp / math.pi)

    def value_at(self, x: float, p: float) -> float:
        i = int(np.argmin(np.abs(self.xs - x)))
        j = int(np.argmin(np.abs(self.ps - p)))
        return float(self.values[j, i])


# --- Gaussian building blocks -------------------------------------------------


def _branches(dim: int, alpha_c: float, r: float, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """``|alpha_c, r>`` and ``|-alpha_c, r>`` as normalized cavity vectors."""
    plus = qops.displaced_squeezed_state(dim, alpha_c, r, check=check)
    minus = plus * (-1.0) ** np.arange(dim)
    return plus, minus


def _finish(up: np.ndarray, down: np.ndarray) -> np.ndarray:
    state = np.concatenate([up, down]).astype(complex)
    nrm = np.linalg.norm(state)
    if nrm < _NORM_FLOOR:
        raise VanishingNormError("state vanishes")
    return state / nrm


def noq_ground(q: NOQParams, dim: int, check: bool = True) -> np.ndarray:
    """NOQ variational ground state (even total parity)."""
    if q.norm < _NORM_FLOOR:
        raise VanishingNormError("NOQ normalization vanishes")
    plus, minus = _branches(dim, q.alpha_c, q.r, check)
    c, s = math.cos(q.phi / 2), math.sin(q.phi / 2)
    # |+[phi]> = (c, -s), |-[phi]> = (c, s) in (|+z>, |-z>)
    up = c * (plus - minus)
    down = -s * (plus + minus)
    return _finish(up, down)


def noq_excited(q: NOQParams, dim: int, check: bool = True) -> np.ndarray:
    """NOQ variational first excited state (odd total parity)."""
    if q.norm_excited < _NORM_FLOOR:
        raise VanishingNormError(f"excited-state normalization N1={q.norm_excited:.3e} vanishes")
    plus, minus = _branches(dim, q.alpha_c, q.r, check)
    c, s = math.cos(q.phi / 2), math.sin(q.phi / 2)
    up = c * (plus + minus)
    down = -s * (plus - minus)
    return _finish(up, down)


def p_minus_from_noq(alpha_c: float, r: float, phi: float) -> float:
    e = qops.gaussian_overlap(alpha_c, r)
    cphi = math.cos(phi)
    return 0.5 + (e - cphi) / (2.0 * (1.0 - e * cphi))


def schmidt_from_noq(q: NOQParams) -> SchmidtParams:
    p = p_minus_from_noq(q.alpha_c, q.r, q.phi)
    return SchmidtParams(min(max(p, 0.5), 1.0), q.alpha_c, q.r)


def cos_phi_from_schmidt(s: SchmidtParams) -> float:
    """Inverse of the p-formula for ``cos(phi)``; may fall outside ``[-1, 0]``."""
    e = qops.gaussian_overlap(s.alpha_c, s.r)
    p = s.p_minus
    den = 1.0 + e - 2.0 * p * e
    if abs(den) < 1e-300:
        raise ParameterRangeError("p_minus does not determine phi at this point")
    return (1.0 + e - 2.0 * p) / den


def noq_from_schmidt(s: SchmidtParams) -> NOQParams:
    cphi = cos_phi_from_schmidt(s)
    if not (-1.0 - 1e-12 <= cphi <= 1e-12):
        raise ParameterRangeError(
            f"p_minus={s.p_minus} at alpha_c={s.alpha_c}, r={s.r} needs cos(phi)={cphi:.6g}, outside [pi/2, pi]"
        )
    phi = math.acos(min(max(cphi, -1.0), 0.0))
    return NOQParams(s.alpha_c, s.r, phi)


def squeezed_cat(alpha_c: float, r: float, parity_sign: int, dim: int, check: bool = True) -> np.ndarray:
    """Normalized ``(|a, r> +- |-a, r>) / sqrt(2 N+-)``."""
    if parity_sign not in (1, -1):
        raise ValueError("parity_sign must be +1 or -1")
    e = qops.gaussian_overlap(alpha_c, r)
    n_pm = 1.0 + parity_sign * e
    if n_pm < _NORM_FLOOR:
        raise VanishingNormError(f"cat normalization {n_pm:.3e} vanishes")
    plus, minus = _branches(dim, alpha_c, r, check)
    cat = plus + parity_sign * minus
    return (cat / np.linalg.norm(cat)).astype(complex)


def noq_schmidt(s: SchmidtParams, dim: int, check: bool = True) -> np.ndarray:
    """Lab-frame NOQ state built from its Schmidt form."""
    even = squeezed_cat(s.alpha_c, s.r, 1, dim, check)
    if s.p_minus < 1.0:
        odd = squeezed_cat(s.alpha_c, s.r, -1, dim, check)
    else:
        odd = np.zeros(dim, dtype=complex)
    up = -math.sqrt(max(1.0 - s.p_minus, 0.0)) * odd
    down = math.sqrt(s.p_minus) * even
    return _finish(up, down)


def noq_parity_frame(s: SchmidtParams, dim: int, check: bool = True) -> np.ndarray:
    """``(sqrt(p) |Phi+> - sqrt(1-p) |Phi->) (x) |-z>`` in the parity frame."""
    even = squeezed_cat(s.alpha_c, s.r, 1, dim, check)
    if s.p_minus < 1.0:
        odd = squeezed_cat(s.alpha_c, s.r, -1, dim, check)
    else:
        odd = np.zeros(dim, dtype=complex)
    cav = math.sqrt(s.p_minus) * even - math.sqrt(max(1.0 - s.p_minus, 0.0)) * odd
    return _finish(np.zeros(dim, dtype=complex), cav)


def _ecs(alpha: float, dim: int, sign: int, check: bool) -> np.ndarray:
    plus, minus = _branches(dim, alpha, 0.0, check)
    # |a>|+x> + sign |-a>|-x>, |+-x> = (1, +-1)/sqrt(2)
    return _finish(plus + sign * minus, plus - sign * minus)


def ecs_ground(alpha: float, dim: int, check: bool = True) -> np.ndarray:
    """Entangled cat ``(|a>|+x> - |-a>|-x>)/sqrt(2)`` (even parity).

    The branches are orthogonal through the qubit, so the norm is exact for
    every ``alpha``; the low-energy choice is ``alpha = -g/w_c``.
    """
    return _ecs(alpha, dim, -1, check)


def ecs_excited(alpha: float, dim: int, check: bool = True) -> np.ndarray:
    """Entangled cat ``(|a>|+x> + |-a>|-x>)/sqrt(2)`` (odd parity)."""
    return _ecs(alpha, dim, 1, check)


def dss_state(d: DSSParams, dim: int, check: bool = True) -> np.ndarray:
    """Double squeezed state, normalized numerically.

    Uses ``S(r)|a> = D(a e^{-r}) S(r)|0>`` so every branch is a Gaussian
    built from exact Fock amplitudes.
    """
    up = np.zeros(dim, dtype=complex)
    down = np.zeros(dim, dtype=complex)
    for weight, alpha, r in ((1.0 - d.t, d.alpha1, d.r1), (d.t, d.alpha2, d.r2)):
        if weight == 0.0:
            continue
        plus = qops.displaced_squeezed_state(dim, alpha * math.exp(-r), -r, check=check)
        minus = plus * (-1.0) ** np.arange(dim)
        down += weight * (plus + minus)
        up += weight * (plus - minus)
    return _finish(up, down)


def dss_from_schmidt(s: SchmidtParams) -> DSSParams:
    """DSS parameters whose restricted form (``alpha2 = -alpha1``, ``r2 = r1``) is this NOQ state.

    The restriction has ``p = N+ / (N+ + (1 - 2t)^2 N-)``; the branch
    ``t >= 1/2`` carries the NOQ sign convention.
    """
    e = qops.gaussian_overlap(s.alpha_c, s.r)
    n_plus, n_minus = 1.0 + e, 1.0 - e
    if s.p_minus >= 1.0:
        t = 0.5
    else:
        if n_minus < _NORM_FLOOR:
            raise ParameterRangeError("p_minus < 1 needs a non-vanishing odd cat")
        ratio = n_plus * (1.0 - s.p_minus) / (s.p_minus * n_minus)
        if ratio > 1.0 + 1e-12:
            raise ParameterRangeError(f"p_minus={s.p_minus} is not reachable with t in [0, 1]")
        t = 0.5 * (1.0 + math.sqrt(min(ratio, 1.0)))
    a1 = s.alpha_c * math.exp(-s.r)
    return DSSParams(a1, -a1, -s.r, -s.r, t)


# --- reduced states ----------------------------------------------------------


def reduced_cavity(state: np.ndarray) -> np.ndarray:
    """Partial trace over the qubit."""
    up, down = qops.cavity_blocks(np.asarray(state))
    return np.outer(up, up.conj()) + np.outer(down, down.conj())


def reduced_qubit(state: np.ndarray) -> np.ndarray:
    up, down = qops.cavity_blocks(np.asarray(state))
    blocks = (up, down)
    return np.array([[np.vdot(blocks[j], blocks[i]) for j in range(2)] for i in range(2)])


def purity_exact(rho: np.ndarray) -> float:
    return float(np.real(np.sum(rho * rho.T)))


def purity_from_state(state: np.ndarray) -> float:
    """Cavity purity of a pure composite state via the 2x2 qubit Gram matrix."""
    return purity_exact(reduced_qubit(state))


def purity_noq(p_minus: float) -> float:
    return (1.0 - p_minus) ** 2 + p_minus**2


def fidelity(a: np.ndarray, b: np.ndarray, composite: bool = True) -> float:
    """``|<a|b>|`` with the smaller cavity space zero-padded."""
    a = np.asarray(a)
    b = np.asarray(b)
    if composite:
        if a.shape[0] % 2 or b.shape[0] % 2:
            raise ValueError("composite vectors must have length 2 * dim")
        dim = max(a.shape[0], b.shape[0]) // 2
        a = qops.pad_cavity(a, dim) if a.shape[0] < 2 * dim else a
        b = qops.pad_cavity(b, dim) if b.shape[0] < 2 * dim else b
    else:
        n = max(a.shape[0], b.shape[0])
        a = np.pad(a, (0, n - a.shape[0]))
        b = np.pad(b, (0, n - b.shape[0]))
    return min(float(abs(np.vdot(a, b))), 1.0)


# --- Wigner function -----------------------------------------------------------


def wigner(rho: np.ndarray, grid: GridSpec | None = None) -> WignerGrid:
    """``W(alpha) = 2 Tr[rho D(alpha) Pi D(alpha)^dag]`` on a quadrature grid.

    ``rho`` is written as a sum of weighted pure states and each is displaced
    with the truncated ``D`` in a padded space large enough for the grid.
    """
    grid = grid or GridSpec()
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    diag = np.real(np.diag(rho))
    if dim > 10 and diag[-10:].sum() > 1e-6:
        warnings.warn(
            f"{diag[-10:].sum():.2e} of the state sits in the top 10 Fock levels; Wigner values may be truncated",
            RuntimeWarning,
            stacklevel=2,
        )

    lam, vecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    keep = lam > 1e-14 * max(lam.max(), 1e-300)
    psi = vecs[:, keep] * np.sqrt(lam[keep])[None, :]

    tail = np.cumsum(diag[::-1])[::-1]
    n_eff = int(np.max(np.nonzero(tail > 1e-14)[0], initial=0)) + 1
    reach = max(abs(grid.x_min), abs(grid.x_max)) + max(abs(grid.p_min), abs(grid.p_max))
    reach /= math.sqrt(2.0)
    work = max(dim, int((math.sqrt(n_eff) + reach + 6.0) ** 2) + 10)
    psi_w = np.zeros((work, psi.shape[1]), dtype=complex)
    psi_w[:dim] = psi

    a = qops.annihilation(work)
    # D(X + iP) = D(X) D(iP) up to a phase; exponentiate via one eigh per generator
    mu, v_q = np.linalg.eigh(a + a.T)
    nu, v_m = np.linalg.eigh(1j * (a.T - a))

    xs, ps = grid.xs, grid.ps
    big_x = xs / math.sqrt(2.0)
    big_p = ps / math.sqrt(2.0)
    sign = (-1.0) ** np.arange(work)

    # D(-iP) = exp(-iP (a + a^dag)) applied to every weighted component
    coeff = v_q.conj().T @ psi_w
    kicked = np.stack([v_q @ (np.exp(-1j * pj * mu)[:, None] * coeff) for pj in big_p], axis=1)
    kicked = kicked.reshape(work, -1)
    # D(-X) = exp(-X (a^dag - a)) = exp(i X * [i (a^dag - a)])
    proj = v_m.conj().T @ kicked
    values = np.empty((len(ps), len(xs)))
    k = psi_w.shape[1]
    for i, xi in enumerate(big_x):
        shifted = v_m @ (np.exp(1j * xi * nu)[:, None] * proj)
        weights = (sign[:, None] * np.abs(shifted) ** 2).sum(axis=0)
        values[:, i] = 2.0 * weights.reshape(len(ps), k).sum(axis=1)
    return WignerGrid(xs, ps, values)
