"""Differential evolution and the variational objectives built on it."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from . import ansatz, eig, model, qops
from .ansatz import NOQParams, SchmidtParams
from .errors import DegenerateObjectiveError, ParameterRangeError, TruncationError, VanishingNormError
from .model import ModelParams

Objective = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class DEConfig:
    """rand/1/bin settings. ``population_size=None`` means 15 per dimension."""

    bounds: tuple[tuple[float, float], ...] = ()
    population_size: int | None = None
    mutation_factor: float = 0.8
    crossover_rate: float = 0.9
    max_generations: int = 2000
    convergence_tol: float = 1e-10
    rng_seed: int = 0
    keep_history: bool = False
    workers: int = 1
    # bounded Nelder-Mead refinement of the DE winner
    polish: bool = True

    def __post_init__(self):
        object.__setattr__(self, "bounds", tuple((float(lo), float(hi)) for lo, hi in self.bounds))
        if not self.bounds:
            raise ValueError("bounds must be non-empty")
        for lo, hi in self.bounds:
            if not lo < hi:
                raise ValueError(f"bad bound interval ({lo}, {hi})")
        if self.population_size is not None and self.population_size < 4:
            raise ValueError("rand/1 mutation needs a population of at least 4")
        if not 0.0 < self.mutation_factor <= 2.0:
            raise ValueError("mutation_factor must lie in (0, 2]")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must lie in [0, 1]")
        if self.max_generations < 1 or self.convergence_tol <= 0:
            raise ValueError("max_generations must be >= 1 and convergence_tol > 0")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be non-negative")

    @property
    def npop(self) -> int:
        return self.population_size or 15 * len(self.bounds)

    def with_bounds(self, bounds) -> "DEConfig":
        return replace(self, bounds=tuple(bounds))


@dataclass
class OptResult:
    best_params: np.ndarray
    best_objective: float
    generations_used: int
    converged: bool
    evaluations: int = 0
    history: list[float] = field(default_factory=list)


def _reflect(v: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    width = hi - lo
    y = np.mod(v - lo, 2.0 * width)
    y = np.where(y > width, 2.0 * width - y, y)
    return lo + y


def _safe(objective: Objective, x: np.ndarray) -> float:
    try:
        val = float(objective(x))
    except (TruncationError, VanishingNormError, FloatingPointError, OverflowError, ZeroDivisionError):
        return math.inf
    return val if math.isfinite(val) else math.inf


def differential_evolution(objective: Objective, cfg: DEConfig) -> OptResult:
    """Minimize ``objective`` over the bounds box with rand/1/bin.

    Candidates whose objective is non-finite (or that raise a truncation or
    vanishing-norm error) are treated as +inf. Mutants leaving the box are
    reflected back. Trials of a generation are evaluated as a batch, which
    is where ``cfg.workers`` threads are used; all random numbers are drawn
    in a fixed order so the result does not depend on the worker count.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    lo = np.array([b[0] for b in cfg.bounds])
    hi = np.array([b[1] for b in cfg.bounds])
    ndim, npop = len(lo), cfg.npop

    pool = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None

    def evaluate(batch):
        if pool is None:
            return np.array([_safe(objective, x) for x in batch])
        return np.array(list(pool.map(lambda x: _safe(objective, x), batch)))

    try:
        pop = lo + rng.random((npop, ndim)) * (hi - lo)
        fit = evaluate(pop)
        evals = npop
        if not np.isfinite(fit).any():
            raise DegenerateObjectiveError("every candidate of the initial population was rejected")
        history = []
        converged = False
        gen = 0
        for gen in range(1, cfg.max_generations + 1):
            trials = np.empty_like(pop)
            for i in range(npop):
                choices = rng.choice(npop - 1, 3, replace=False)
                r1, r2, r3 = choices + (choices >= i)
                mutant = _reflect(pop[r1] + cfg.mutation_factor * (pop[r2] - pop[r3]), lo, hi)
                cross = rng.random(ndim) < cfg.crossover_rate
                cross[rng.integers(ndim)] = True
                trials[i] = np.where(cross, mutant, pop[i])
            trial_fit = evaluate(trials)
            evals += npop
            if not np.isfinite(trial_fit).any():
                raise DegenerateObjectiveError(f"every trial of generation {gen} was rejected")
            better = trial_fit <= fit
            pop[better] = trials[better]
            fit[better] = trial_fit[better]
            if cfg.keep_history:
                history.append(float(fit.min()))
            if np.isfinite(fit).all() and fit.max() - fit.min() < cfg.convergence_tol:
                converged = True
                break
    finally:
        if pool is not None:
            pool.shutdown()

    best = int(np.argmin(fit))
    x_best, f_best = pop[best].copy(), float(fit[best])
    if cfg.polish:
        x_best, f_best, extra = _polish(objective, x_best, f_best, lo, hi)
        evals += extra
    return OptResult(x_best, f_best, gen, converged, evals, history)


def _polish(objective: Objective, x0: np.ndarray, f0: float, lo: np.ndarray, hi: np.ndarray):
    # the search is scaled to the unit box so one simplex size fits all coordinates
    width = hi - lo

    def scaled(u):
        return _safe(objective, np.clip(lo + u * width, lo, hi))

    u0 = (x0 - lo) / width
    res = minimize(
        scaled,
        u0,
        method="Nelder-Mead",
        bounds=[(0.0, 1.0)] * len(lo),
        options={"xatol": 1e-12, "fatol": 1e-18, "maxfev": 2000 * len(lo)},
    )
    x = np.clip(lo + res.x * width, lo, hi)
    f = _safe(objective, x)
    if f < f0:
        return x, f, int(res.nfev) + 1
    return x0, f0, int(res.nfev) + 1


# --- default search boxes ------------------------------------------------------

R_BOUNDS = (-0.5, 1.5)
PHI_BOUNDS = (math.pi / 2, math.pi)
P_BOUNDS = (0.5, 1.0)


def alpha_bound(p: ModelParams) -> float:
    return 2.0 * p.g / p.omega_c + 1.0


def noq_bounds(p: ModelParams):
    return ((0.0, alpha_bound(p)), R_BOUNDS, PHI_BOUNDS)


def schmidt_bounds(p: ModelParams):
    return (P_BOUNDS, (0.0, alpha_bound(p)), R_BOUNDS)


def ecs_bounds(p: ModelParams):
    return ((-alpha_bound(p), alpha_bound(p)),)


def default_config(bounds, seed: int = 0, **overrides) -> DEConfig:
    return DEConfig(bounds=tuple(bounds), rng_seed=seed, **overrides)


# --- fidelity objectives -------------------------------------------------------


def exact_states(p: ModelParams, dim: int | None = None) -> tuple[eig.EigenResult, int]:
    """Two lowest exact eigenstates, cached per parameter set."""
    return eig.cached_exact(p, 2, dim)


def _infidelity(up, down, target_up, target_down) -> float:
    """``1 - |<v|t>|`` for real vectors, evaluated as ``|v/|v| - s t|^2 / 2``.

    The squared-distance form has no cancellation, so infidelities far below
    machine epsilon remain resolvable.
    """
    nrm = math.sqrt(float(np.dot(up, up) + np.dot(down, down)))
    if nrm < 1e-12:
        raise VanishingNormError("state vanishes")
    up, down = up / nrm, down / nrm
    sign = 1.0 if np.dot(up, target_up) + np.dot(down, target_down) >= 0 else -1.0
    du, dd = up - sign * target_up, down - sign * target_down
    return 0.5 * float(np.dot(du, du) + np.dot(dd, dd))


def _noq_infidelity(x, target_up, target_down, excited: bool) -> float:
    alpha_c, r, phi = float(x[0]), float(x[1]), float(x[2])
    dim = target_up.shape[0]
    amps, norm2 = qops.displaced_squeezed_amplitudes(dim, alpha_c, r)
    if abs(1.0 - norm2) > qops.TRUNCATION_TOL:
        raise TruncationError("candidate does not fit in the cavity space")
    e = qops.gaussian_overlap(alpha_c, r)
    big_n = 1.0 + e * math.cos(phi) if excited else 1.0 - e * math.cos(phi)
    if big_n < 1e-12:
        raise VanishingNormError("normalization vanishes")
    minus = amps * (-1.0) ** np.arange(dim)
    c, s = math.cos(phi / 2), math.sin(phi / 2)
    if excited:
        up, down = c * (amps + minus), -s * (amps - minus)
    else:
        up, down = c * (amps - minus), -s * (amps + minus)
    return _infidelity(up, down, target_up, target_down)


def _target(p: ModelParams, level: int, dim: int | None):
    res, _ = exact_states(p, dim)
    vec = res.vector(level)
    up, down = qops.cavity_blocks(vec)
    # exact eigenvectors are real after phase fixing
    return np.ascontiguousarray(up.real), np.ascontiguousarray(down.real)


def fidelity_objective(p: ModelParams, dim: int | None = None) -> Objective:
    """``(alpha_c, r, phi) -> 1 - |<NOQ|exact ground>|``."""
    up, down = _target(p, 0, dim)
    return lambda x: _noq_infidelity(x, up, down, excited=False)


def excited_fidelity_objective(p: ModelParams, dim: int | None = None) -> Objective:
    """Same as ``fidelity_objective`` for the NOQ first excited state."""
    up, down = _target(p, 1, dim)
    return lambda x: _noq_infidelity(x, up, down, excited=True)


def ecs_fidelity_objective(p: ModelParams, excited: bool = False, dim: int | None = None) -> Objective:
    """``alpha -> 1 - |<ECS(alpha)|exact>|`` over signed displacements."""
    t_up, t_down = _target(p, 1 if excited else 0, dim)
    size = t_up.shape[0]
    build = ansatz.ecs_excited if excited else ansatz.ecs_ground

    def obj(x):
        up, down = qops.cavity_blocks(build(float(x[0]), size).real)
        return _infidelity(up, down, t_up, t_down)

    return obj


@dataclass
class Fit:
    """Optimized state with its parameters and the optimizer record."""

    state: np.ndarray
    params: object
    opt: OptResult


def _with_orthogonality_penalty(obj: Objective, ground: np.ndarray, weight: float) -> Objective:
    size = ground.shape[0] // 2

    def penalized(x):
        q = NOQParams(float(x[0]), float(x[1]), float(x[2]))
        trial = ansatz.noq_excited(q, size, check=False)
        return obj(x) + weight * abs(np.vdot(ground, trial)) ** 2

    return penalized


def fit_noq(
    p: ModelParams,
    excited: bool = False,
    seed: int = 0,
    dim: int | None = None,
    orthogonality_penalty: float = 0.0,
    **de,
) -> Fit:
    """Fidelity-optimized NOQ ground or excited state.

    Ground and excited fits are independent by default. A positive
    ``orthogonality_penalty`` adds ``weight * |<ground fit|trial>|^2`` to the
    excited objective, with the ground fit taken at the same seed.
    """
    if orthogonality_penalty < 0:
        raise ValueError("orthogonality_penalty must be >= 0")
    obj = excited_fidelity_objective(p, dim) if excited else fidelity_objective(p, dim)
    size = exact_states(p, dim)[0].dim
    if excited and orthogonality_penalty > 0:
        ground = fit_noq(p, seed=seed, dim=dim, **de).state
        obj = _with_orthogonality_penalty(obj, ground, orthogonality_penalty)
    cfg = default_config(noq_bounds(p), seed, **de)
    opt = differential_evolution(obj, cfg)
    alpha_c, r, phi = opt.best_params
    q = NOQParams(float(alpha_c), float(r), float(phi))
    state = ansatz.noq_excited(q, size) if excited else ansatz.noq_ground(q, size)
    return Fit(state, q, opt)


def fit_ecs(p: ModelParams, excited: bool = False, seed: int = 0, dim: int | None = None, **de) -> Fit:
    obj = ecs_fidelity_objective(p, excited, dim)
    cfg = default_config(ecs_bounds(p), seed, **de)
    opt = differential_evolution(obj, cfg)
    alpha = float(opt.best_params[0])
    size = exact_states(p, dim)[0].dim
    state = ansatz.ecs_excited(alpha, size) if excited else ansatz.ecs_ground(alpha, size)
    return Fit(state, alpha, opt)


# --- analytic energy -----------------------------------------------------------


def _y_over_nminus(y: float) -> float:
    """``y / (1 - exp(-2y))`` with its finite limit 1/2 at ``y -> 0``."""
    if y < 1e-6:
        return 0.5 * (1.0 + y + y * y / 3.0)
    return y / -math.expm1(-2.0 * y)


def photon_number_analytic(s: SchmidtParams) -> float:
    """``<a^dag a>`` of the parity-frame NOQ state."""
    a, r, p = s.alpha_c, s.r, s.p_minus
    y = a * a * math.exp(-2.0 * r)
    e2 = math.exp(-2.0 * y)
    n_plus = 1.0 + e2
    n_minus = -math.expm1(-2.0 * y)
    ch2, th2 = math.cosh(2.0 * r), math.tanh(2.0 * r)
    # y (1 - p) N+/N- stays finite as alpha -> 0
    cat_terms = y * p * n_minus / n_plus + (1.0 - p) * n_plus * _y_over_nminus(y) + y * th2
    return math.sinh(r) ** 2 + ch2 * cat_terms


def displacement_analytic(s: SchmidtParams) -> float:
    """``<a + a^dag>`` of the parity-frame NOQ state."""
    a, r, p = s.alpha_c, s.r, s.p_minus
    y = a * a * math.exp(-2.0 * r)
    n_plus = 1.0 + math.exp(-2.0 * y)
    # alpha / sqrt(N-) = e^{r} sqrt(y / N-)
    return -4.0 * math.exp(r) * math.sqrt(max(p * (1.0 - p), 0.0) / n_plus * _y_over_nminus(y))


def energy_expectation_analytic(s: SchmidtParams, p: ModelParams) -> float:
    """Closed-form ``<H>`` of the NOQ state in Schmidt parametrization."""
    return (
        p.omega_c * photon_number_analytic(s)
        + p.g * displacement_analytic(s)
        - p.omega_q * (s.p_minus - 0.5)
    )


def energy_objective(p: ModelParams) -> Objective:
    def obj(x):
        return energy_expectation_analytic(SchmidtParams(float(x[0]), float(x[1]), float(x[2])), p)

    return obj


def minimize_energy(p: ModelParams, cfg: DEConfig | None = None, seed: int = 0, **de) -> tuple[SchmidtParams, OptResult]:
    """Variational minimum of ``<H>`` over ``(p_minus, alpha_c, r)``."""
    cfg = cfg or default_config(schmidt_bounds(p), seed, **de)
    opt = differential_evolution(energy_objective(p), cfg)
    pm, a, r = (float(v) for v in opt.best_params)
    return SchmidtParams(pm, a, r), opt


# --- asymptotics ---------------------------------------------------------------


def _coupling_ratio(p: ModelParams) -> float:
    """``(g*/g)^2`` with the approximate crossover; requires ``g >= g*``."""
    gs = model.g_star(p, approximate=True)
    if p.g < gs * (1.0 - 1e-12):
        raise ParameterRangeError(f"large-coupling formulas need g >= g* = {gs:.6g}, got g = {p.g:.6g}")
    return min((gs / p.g) ** 2, 1.0)


def asymptotic_purity(p: ModelParams) -> float:
    x = _coupling_ratio(p)
    return 0.5 * (1.0 + x * x)


def asymptotic_alpha(p: ModelParams) -> float:
    x = _coupling_ratio(p)
    return p.g / p.omega_c * math.sqrt(1.0 - x * x)


def asymptotic_p_minus(p: ModelParams) -> float:
    return 0.5 * (1.0 + _coupling_ratio(p))


def purity_vs_displacement(alpha_c: float, p: ModelParams) -> float:
    """Large-coupling purity written as a function of the cat displacement."""
    if alpha_c == 0:
        return 1.0
    ratio = (p.omega_q / p.omega_c) / (2.0 * alpha_c**2)
    return 1.0 / (1.0 + 1.0 / math.sqrt(1.0 + ratio**2))


def coupling_for_alpha(alpha_c: float, p: ModelParams) -> float:
    """Coupling at which the large-coupling displacement equals ``alpha_c``."""
    gs = model.g_star(p, approximate=True)
    a2 = (alpha_c * p.omega_c) ** 2
    return math.sqrt(0.5 * (a2 + math.sqrt(a2 * a2 + 4.0 * gs**4)))


# --- energies ------------------------------------------------------------------


def exact_energy_shift(p: ModelParams, dim: int | None = None) -> float:
    """Exact ground energy measured from its ``g = 0`` value ``-w_q/2``."""
    res, _ = exact_states(p, dim)
    return float(res.eigenvalues[0]) + 0.5 * p.omega_q


def energy_error(trial: np.ndarray, p: ModelParams, level: int = 0, dim: int | None = None) -> float:
    """``<trial|H|trial> - E_level``."""
    res, _ = exact_states(p, dim)
    size = max(res.dim, trial.shape[0] // 2)
    vec = qops.pad_cavity(trial, size) if trial.shape[0] < 2 * size else trial
    return model.energy(p, vec) - float(res.eigenvalues[level])


def infidelity(trial: np.ndarray, target: np.ndarray) -> float:
    """``1 - |<trial|target>|`` for composite states of possibly different cavity size."""
    dim = max(trial.shape[0], target.shape[0]) // 2
    a = qops.pad_cavity(trial, dim) if trial.shape[0] < 2 * dim else np.asarray(trial, dtype=complex)
    b = qops.pad_cavity(target, dim) if target.shape[0] < 2 * dim else np.asarray(target, dtype=complex)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    ov = np.vdot(a, b)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    diff = a * phase - b
    return 0.5 * float(np.vdot(diff, diff).real)
