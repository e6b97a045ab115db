"""Batch command-line frontend: sweeps to CSV, single points to JSON, Wigner grids to text.

Sweep CSV columns, in order:

    omega_q, g, g_over_gstar, dim, fidelity_error, energy_error,
    exact_energy_shift, alpha_c, r, phi, p_minus, purity_noq, purity_exact,
    de_generations, seed, status

``point`` emits the same fields as a JSON object plus ``params`` (the
optimized parameter vector by name), ``schmidt`` (p_minus, alpha_c, r),
``eigenvalues`` (two lowest exact levels), ``de`` (generations, converged,
evaluations, best_objective) and ``config`` (the resolved settings).

Couplings are given in units of ``g* = sqrt(w_c w_q)/2`` and ``w_c = 1``.
Settings resolve as command-line flag, then ``--config`` file
(``key=value`` lines, ``#`` comments), then built-in default.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import ansatz, optimize
from .ansatz import GridSpec
from .errors import ParameterRangeError
from .model import ModelParams

CSV_COLUMNS = (
    "omega_q",
    "g",
    "g_over_gstar",
    "dim",
    "fidelity_error",
    "energy_error",
    "exact_energy_shift",
    "alpha_c",
    "r",
    "phi",
    "p_minus",
    "purity_noq",
    "purity_exact",
    "de_generations",
    "seed",
    "status",
)

ANSATZE = ("noq-ground", "noq-excited", "ecs-ground", "ecs-excited")
OBJECTIVES = ("fidelity", "energy")
WIGNER_STATES = ("exact-ground", "noq-optimized", "ecs")

# DE knobs that may be set from a config file
DE_KEYS = {
    "population-size": int,
    "mutation-factor": float,
    "crossover-rate": float,
    "max-generations": int,
    "convergence-tol": float,
    "polish": lambda v: v.strip().lower() in ("1", "true", "yes", "on"),
}


@dataclass
class SweepSpec:
    omega_q: list[float]
    g_over_gstar: list[float]
    ansatz: str = "noq-ground"
    objective: str = "fidelity"
    seed: int = 0
    dim_override: int | None = None
    de: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.omega_q or not self.g_over_gstar:
            raise ValueError("sweep needs at least one omega_q and one g/g* value")
        if any(w <= 0 for w in self.omega_q):
            raise ValueError("omega_q values must be positive")
        if any(x < 0 for x in self.g_over_gstar):
            raise ValueError("g/g* values must be non-negative")
        if self.ansatz not in ANSATZE:
            raise ValueError(f"unknown ansatz {self.ansatz!r}")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"unknown objective {self.objective!r}")
        if self.objective == "energy" and self.ansatz != "noq-ground":
            raise ValueError("the energy objective is only defined for noq-ground")

    def points(self) -> list[tuple[float, float]]:
        return [(w, x) for w in self.omega_q for x in self.g_over_gstar]


# --- parsing helpers -------------------------------------------------------------


def parse_range(text: str) -> list[float]:
    """``"1.5"`` or ``"start:stop:count"`` (inclusive, evenly spaced)."""
    text = str(text).strip()
    if ":" not in text:
        return [float(text)]
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"expected start:stop:count, got {text!r}")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ValueError("count must be >= 1")
    return [float(v) for v in np.linspace(start, stop, count)]


def parse_list(text: str) -> list[float]:
    return [float(v) for v in str(text).split(",") if v.strip()]


def read_config(path: str | os.PathLike) -> dict[str, str]:
    """``key=value`` lines; keys are normalized to dashed lower case."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip().lower().replace("_", "-")] = value.strip()
    return out


def _resolve(args, cfg: dict, key: str, default, cast=str):
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    if key in cfg:
        return cast(cfg[key])
    return default


def _de_overrides(cfg: dict) -> dict:
    out = {}
    for key, cast in DE_KEYS.items():
        if key in cfg:
            out[key.replace("-", "_")] = cast(cfg[key])
    return out


def worker_count(n_jobs: int) -> int:
    env = os.environ.get("RABIVAR_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, n_jobs))


# --- one grid point ----------------------------------------------------------------


def _summary(alpha_c: float, r: float, phi: float, schmidt=None) -> dict:
    return {"alpha_c": float(alpha_c), "r": float(r), "phi": float(phi), "schmidt": schmidt}


def _fit(p: ModelParams, ansatz_name: str, objective: str, seed: int, dim, de: dict):
    """Optimized trial state, named parameters, a row summary and the optimizer record."""
    size = optimize.exact_states(p, dim)[0].dim
    if objective == "energy":
        s, opt = optimize.minimize_energy(p, seed=seed, **de)
        try:
            phi = ansatz.noq_from_schmidt(s).phi
        except ParameterRangeError:
            phi = math.nan
        schmidt = {"p_minus": s.p_minus, "alpha_c": s.alpha_c, "r": s.r}
        # the energy optimum may be strongly squeezed, so build it on a roomier cavity
        return ansatz.noq_schmidt(s, 4 * size), dict(schmidt), _summary(s.alpha_c, s.r, phi, schmidt), opt
    excited = ansatz_name.endswith("excited")
    if ansatz_name.startswith("noq"):
        f = optimize.fit_noq(p, excited=excited, seed=seed, dim=dim, **de)
        q = f.params
        schmidt = None
        if not excited:
            sp = ansatz.schmidt_from_noq(q)
            schmidt = {"p_minus": sp.p_minus, "alpha_c": sp.alpha_c, "r": sp.r}
        named = {"alpha_c": q.alpha_c, "r": q.r, "phi": q.phi}
        return f.state, named, _summary(q.alpha_c, q.r, q.phi, schmidt), f.opt
    f = optimize.fit_ecs(p, excited=excited, seed=seed, dim=dim, **de)
    return f.state, {"alpha": f.params}, _summary(abs(f.params), 0.0, math.pi / 2), f.opt


def evaluate_point(
    omega_q: float,
    g_over_gstar: float,
    ansatz_name: str = "noq-ground",
    objective: str = "fidelity",
    seed: int = 0,
    dim: int | None = None,
    de: dict | None = None,
    detail: bool = False,
) -> dict:
    """Optimize one point and collect the report fields. Failures become a status string."""
    de = de or {}
    p = ModelParams.from_ratio(omega_q, g_over_gstar)
    row = {"omega_q": float(omega_q), "g": p.g, "g_over_gstar": float(g_over_gstar)}
    try:
        res, used = optimize.exact_states(p, dim)
        level = 1 if ansatz_name.endswith("excited") else 0
        state, named, summ, opt = _fit(p, ansatz_name, objective, seed, dim, de)
        exact = res.vector(level)
        qubit = ansatz.reduced_qubit(state)
        row.update(
            dim=used,
            fidelity_error=optimize.infidelity(state, exact),
            energy_error=optimize.energy_error(state, p, level=level, dim=dim),
            exact_energy_shift=optimize.exact_energy_shift(p, dim),
            alpha_c=summ["alpha_c"],
            r=summ["r"],
            phi=summ["phi"],
            p_minus=float(qubit[1, 1].real),
            purity_noq=ansatz.purity_from_state(state),
            purity_exact=ansatz.purity_from_state(exact),
            de_generations=opt.generations_used,
            seed=seed,
            status="ok",
        )
        if detail:
            row["params"] = named
            row["schmidt"] = summ["schmidt"]
            row["eigenvalues"] = [float(v) for v in res.eigenvalues]
            row["de"] = {
                "generations": opt.generations_used,
                "converged": opt.converged,
                "evaluations": opt.evaluations,
                "best_objective": opt.best_objective,
            }
    except Exception as exc:  # a failed point is reported, not fatal
        for col in CSV_COLUMNS[3:]:
            row.setdefault(col, "")
        row["seed"] = seed
        row["status"] = f"error: {type(exc).__name__}: {exc}"
    return row


def run_sweep(spec: SweepSpec) -> list[dict]:
    jobs = spec.points()

    def job(pt):
        return evaluate_point(pt[0], pt[1], spec.ansatz, spec.objective, spec.seed, spec.dim_override, spec.de)

    n = worker_count(len(jobs))
    if n == 1:
        return [job(pt) for pt in jobs]
    with ThreadPoolExecutor(n) as pool:
        # map keeps input order
        return list(pool.map(job, jobs))


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row.get(col, "")) for col in CSV_COLUMNS])
    return buf.getvalue()


def wigner_text(grid, values: np.ndarray, echo: str) -> str:
    lines = [
        f"{grid.x_min!r} {grid.x_max!r} {grid.nx}",
        f"{grid.p_min!r} {grid.p_max!r} {grid.np_}",
        f"# {echo}",
    ]
    lines += [" ".join(repr(float(v)) for v in row) for row in values]
    return "\n".join(lines) + "\n"


def _json_safe(obj):
    # strict JSON has no NaN or infinity
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _emit(text: str, out: str | None):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# --- commands ------------------------------------------------------------------------


def _spec_from(args, cfg: dict, ansatz_default: str, objective_default: str) -> SweepSpec:
    omega_q = _resolve(args, cfg, "omega-q", None)
    g_range = _resolve(args, cfg, "g-over-gstar", None)
    if omega_q is None or g_range is None:
        raise ValueError("--omega-q and --g-over-gstar are required (flag or config file)")
    dim = _resolve(args, cfg, "dim-override", None, int)
    return SweepSpec(
        omega_q=parse_list(omega_q),
        g_over_gstar=parse_range(g_range),
        ansatz=_resolve(args, cfg, "ansatz", ansatz_default),
        objective=_resolve(args, cfg, "objective", objective_default),
        seed=int(_resolve(args, cfg, "seed", 0, int)),
        dim_override=None if dim is None else int(dim),
        de=_de_overrides(cfg),
    )


def _config(args) -> dict:
    return read_config(args.config) if args.config else {}


def cmd_sweep(args, ansatz_default="noq-ground") -> int:
    cfg = _config(args)
    spec = _spec_from(args, cfg, ansatz_default, "fidelity")
    rows = run_sweep(spec)
    _emit(rows_to_csv(rows), _resolve(args, cfg, "out", None))
    failed = [r for r in rows if r["status"] != "ok"]
    for r in failed:
        print(f"point omega_q={r['omega_q']} g/g*={r['g_over_gstar']}: {r['status']}", file=sys.stderr)
    return 1 if failed else 0


def cmd_point(args, objective_default="fidelity") -> int:
    cfg = _config(args)
    spec = _spec_from(args, cfg, "noq-ground", objective_default)
    if len(spec.points()) != 1:
        raise ValueError("point takes a single omega_q and a single g/g* value")
    w, x = spec.points()[0]
    row = evaluate_point(w, x, spec.ansatz, spec.objective, spec.seed, spec.dim_override, spec.de, detail=True)
    row["config"] = {
        "ansatz": spec.ansatz,
        "objective": spec.objective,
        "seed": spec.seed,
        "dim_override": spec.dim_override,
        "de": spec.de,
    }
    _emit(json.dumps(_json_safe(row), indent=2) + "\n", _resolve(args, cfg, "out", None))
    return 0 if row["status"] == "ok" else 1


def _wigner_state(p: ModelParams, which: str, seed: int, dim, de: dict) -> np.ndarray:
    if which == "exact-ground":
        return optimize.exact_states(p, dim)[0].vector(0)
    if which == "noq-optimized":
        return optimize.fit_noq(p, seed=seed, dim=dim, **de).state
    return optimize.fit_ecs(p, seed=seed, dim=dim, **de).state


def wigner_grid_spec(text: str | None, alpha_c: float) -> GridSpec:
    """``"lo:hi:n"`` used for both axes, or a box sized to the displacement."""
    if not text:
        return GridSpec.around(alpha_c)
    lo, hi, n = text.split(":")
    return GridSpec(float(lo), float(hi), int(n), float(lo), float(hi), int(n))


def cmd_wigner(args) -> int:
    cfg = _config(args)
    spec = _spec_from(args, cfg, "noq-ground", "fidelity")
    if len(spec.points()) != 1:
        raise ValueError("wigner takes a single omega_q and a single g/g* value")
    w, x = spec.points()[0]
    p = ModelParams.from_ratio(w, x)
    which = _resolve(args, cfg, "state", "exact-ground")
    if which not in WIGNER_STATES:
        raise ValueError(f"unknown state {which!r}")
    state = _wigner_state(p, which, spec.seed, spec.dim_override, spec.de)
    grid = wigner_grid_spec(_resolve(args, cfg, "grid", None), p.g / p.omega_c)
    rho = ansatz.reduced_cavity(state)
    wg = ansatz.wigner(rho, grid)
    echo = f"omega_c=1.0 omega_q={w!r} g={p.g!r} g_over_gstar={x!r} state={which} seed={spec.seed}"
    _emit(wigner_text(grid, wg.values, echo), _resolve(args, cfg, "out", None))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rabivar",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--omega-q", help="qubit frequency in units of w_c; comma list for sweeps")
        sp.add_argument("--g-over-gstar", help="coupling in units of g*: value or start:stop:count")
        sp.add_argument("--ansatz", choices=ANSATZE, default=None)
        sp.add_argument("--objective", choices=OBJECTIVES, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--dim-override", type=int, default=None, help="starting cavity dimension")
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--config", default=None, help="key=value settings file")

    for name, helptext in (
        ("sweep", "CSV sweep over omega_q and g/g*"),
        ("excited-sweep", "sweep with ansatz noq-excited"),
        ("point", "JSON report for one point"),
        ("energy-min", "point with the energy objective"),
        ("wigner", "cavity Wigner grid as plain text"),
    ):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        if name == "wigner":
            sp.add_argument("--state", choices=WIGNER_STATES, default=None)
            sp.add_argument("--grid", default=None, help="lo:hi:n for both quadratures")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "excited-sweep":
            return cmd_sweep(args, ansatz_default="noq-excited")
        if args.command == "point":
            return cmd_point(args)
        if args.command == "energy-min":
            return cmd_point(args, objective_default="energy")
        return cmd_wigner(args)
    except (ValueError, OSError) as exc:
        print(f"rabivar: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
