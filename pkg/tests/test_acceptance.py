"""Acceptance gate: one reported line per criterion (criteria 3 and 5 report per part).

Run alone with ``pytest tests/test_acceptance.py -v -s``; the summary block at
the end of the session lists every line again.
"""

import math

import numpy as np
import pytest

from rabivar import ansatz, model, optimize, qops
from rabivar.ansatz import NOQParams, SchmidtParams
from rabivar.model import ModelParams
from rabivar.optimize import DEConfig, differential_evolution

RATIOS = (0.2, 0.5, 0.8, 1.0, 1.2, 1.5, 2.0, 3.0)
OMEGAS = (5.0, 20.0, 176.0)


@pytest.fixture(scope="module")
def grid_fits():
    fits = {}
    for wq in OMEGAS:
        for x in RATIOS:
            p = ModelParams.from_ratio(wq, x)
            fits[wq, x] = {
                "noq_ground": optimize.fit_noq(p).opt.best_objective,
                "noq_excited": optimize.fit_noq(p, excited=True).opt.best_objective,
                "ecs_ground": optimize.fit_ecs(p).opt.best_objective,
                "ecs_excited": optimize.fit_ecs(p, excited=True).opt.best_objective,
            }
    return fits


def test_criterion_01_fidelity_grid(grid_fits, report):
    worst_key = max(grid_fits, key=lambda k: grid_fits[k]["noq_ground"])
    worst = grid_fits[worst_key]["noq_ground"]
    ok = report(
        "criterion 1 (NOQ ground fidelity >= 0.99 on grid)",
        1.0 - worst >= 0.99,
        f"min fidelity {1 - worst:.6f} at omega_q={worst_key[0]}, g/g*={worst_key[1]}",
    )
    assert ok


def test_criterion_02_noq_dominance(grid_fits, report):
    bad = []
    for key, f in grid_fits.items():
        for level in ("ground", "excited"):
            if f[f"noq_{level}"] > f[f"ecs_{level}"]:
                bad.append((key, level, f[f"noq_{level}"], f[f"ecs_{level}"]))
    ok = report(
        "criterion 2 (NOQ infidelity <= ECS, ground and excited)",
        not bad,
        f"{2 * len(grid_fits) - len(bad)}/{2 * len(grid_fits)} comparisons hold" + (f"; violations {bad}" if bad else ""),
    )
    assert ok


@pytest.mark.parametrize("wq", [20.0, 176.0])
def test_criterion_03_weak_coupling_squeeze(wq, report):
    p = ModelParams.from_ratio(wq, 0.1)
    q = optimize.fit_noq(p).params
    r_ref = model.weak_coupling_squeeze(p)
    rel = abs(q.r - r_ref) / r_ref
    ok = report(
        f"criterion 3 (omega_q={wq:g}: r within 10% of weak-coupling value, alpha_c < 0.05)",
        rel <= 0.10 and q.alpha_c < 0.05,
        f"r={q.r:.6f} ref={r_ref:.6f} rel={rel:.4f} alpha_c={q.alpha_c:.4f}",
    )
    assert ok


def test_criterion_04_strong_coupling_manifold(report):
    p = ModelParams(1.0, 0.01, 2.0)
    fit = optimize.fit_ecs(p)
    res, _ = optimize.exact_states(p)
    dim = max(res.dim, fit.state.shape[0] // 2)
    psi = qops.normalize(qops.pad_cavity(fit.state, dim))
    basis = [qops.pad_cavity(res.vector(k), dim) for k in range(2)]
    overlap = sum(abs(np.vdot(b, psi)) ** 2 for b in basis)
    ok = report(
        "criterion 4 (ECS in exact two-level ground manifold >= 1 - 1e-5)",
        overlap >= 1 - 1e-5,
        f"projector overlap 1 - {1 - overlap:.3e}, alpha={fit.params:.6f}",
    )
    assert ok


def test_criterion_05a_ninety_percent_purity(report):
    p = ModelParams(1.0, 176.0)
    val = optimize.purity_vs_displacement(0.24 * math.sqrt(176.0), p)
    ok = report(
        "criterion 5a (purity at alpha_c = 0.24 sqrt(176) is 0.90 +- 0.02)",
        abs(val - 0.90) <= 0.02,
        f"purity {val:.6f}",
    )
    assert ok


def test_criterion_05b_energy_minimized_purity(report):
    alpha = 0.24 * math.sqrt(176.0)
    ref = optimize.purity_vs_displacement(alpha, ModelParams(1.0, 176.0))
    g = optimize.coupling_for_alpha(alpha, ModelParams(1.0, 176.0))
    p = ModelParams(1.0, 176.0, g)
    s, opt = optimize.minimize_energy(p)
    mu = ansatz.purity_noq(s.p_minus)
    ok = report(
        "criterion 5b (energy-minimized NOQ purity within 0.03 of 5a)",
        abs(mu - ref) <= 0.03,
        f"g={g:.5f} (g/g*={g / model.g_star(p):.4f}) purity {mu:.6f} vs {ref:.6f}; "
        f"optimum p_minus={s.p_minus:.4f} alpha_c={s.alpha_c:.4f} r={s.r:.4f} E={opt.best_objective:.6f}",
    )
    assert ok


def test_criterion_06_asymptotics(report):
    lines = []
    ok = True
    for x in (1.5, 2.0, 3.0):
        p = ModelParams.from_ratio(176.0, x)
        s, _ = optimize.minimize_energy(p)
        a_ref = optimize.asymptotic_alpha(p)
        mu_ref = optimize.asymptotic_purity(p)
        mu = ansatz.purity_noq(s.p_minus)
        rel = abs(s.alpha_c - a_ref) / a_ref
        dmu = abs(mu - mu_ref)
        ok &= rel <= 0.02 and dmu <= 0.02
        lines.append(f"g/g*={x}: alpha rel {rel:.2e}, purity diff {dmu:.2e}")
    ok = report("criterion 6 (energy-minimized alpha_c and purity vs asymptotic forms)", ok, "; ".join(lines))
    assert ok


def test_criterion_07_analytic_energy(report):
    rng = np.random.default_rng(2024)
    worst = 0.0
    dim = 200
    for _ in range(100):
        s = SchmidtParams(rng.uniform(0.5, 1.0), rng.uniform(1e-3, 3.0), rng.uniform(-0.5, 1.0))
        p = ModelParams(1.0, rng.uniform(0.0, 50.0), rng.uniform(0.0, 4.0))
        v = ansatz.noq_parity_frame(s, dim)
        ref = np.vdot(v, model.parity_frame_hamiltonian(p, dim) @ v).real
        got = optimize.energy_expectation_analytic(s, p)
        worst = max(worst, abs(got - ref) / abs(ref))
    ok = report("criterion 7 (analytic vs matrix energy, 100 draws, rel < 1e-9)", worst < 1e-9, f"worst rel error {worst:.2e}")
    assert ok


def test_criterion_08_frame_identities(report):
    rng = np.random.default_rng(8)
    dim = 40
    worst_frame = worst_comm = 0.0
    for _ in range(5):
        p = ModelParams(1.0, rng.uniform(0.1, 20.0), rng.uniform(0.0, 3.0))
        h = model.rabi_hamiltonian(p, dim)
        u = model.parity_unitary(dim)
        worst_frame = max(worst_frame, np.max(np.abs(u @ h @ u.conj().T - model.parity_frame_hamiltonian(p, dim))))
        ptot = model.total_parity(dim)
        worst_comm = max(worst_comm, np.max(np.abs(h @ ptot - ptot @ h)))
    worst_form = 0.0
    for _ in range(50):
        q = NOQParams(rng.uniform(0.01, 2.5), rng.uniform(-0.5, 1.0), rng.uniform(math.pi / 2, math.pi))
        direct = ansatz.noq_ground(q, 120)
        schmidt = ansatz.noq_schmidt(ansatz.schmidt_from_noq(q), 120)
        worst_form = max(worst_form, 1.0 - ansatz.fidelity(direct, schmidt))
    ok = report(
        "criterion 8 (frame map, parity commutation, Schmidt form)",
        worst_frame < 1e-10 and worst_comm < 1e-12 and worst_form < 1e-10,
        f"frame {worst_frame:.1e}, commutator {worst_comm:.1e}, Schmidt 1-F {worst_form:.1e}",
    )
    assert ok


def test_criterion_09_energy_errors(report):
    lines = []
    ok = True
    for x in (0.3, 3.0):
        p = ModelParams.from_ratio(176.0, x)
        res, _ = optimize.exact_states(p)
        shift = optimize.exact_energy_shift(p)
        de_fid = optimize.energy_error(optimize.fit_noq(p).state, p)
        s, _ = optimize.minimize_energy(p)
        de_en = optimize.energy_error(ansatz.noq_schmidt(s, 4 * res.dim), p)
        ok &= abs(de_fid) <= 0.01 * abs(shift) and de_en <= de_fid and de_en >= -1e-9
        lines.append(f"g/g*={x}: dE_fid={de_fid:.3e} shift={shift:.4e} dE_energy={de_en:.3e}")
    ok = report("criterion 9 (energy-error ordering and variational bound)", ok, "; ".join(lines))
    assert ok


def test_criterion_10_wigner(report):
    dim = 30
    grid = ansatz.GridSpec(-1.0, 1.0, 3, -1.0, 1.0, 3)
    cat = qops.normalize(qops.coherent_state(dim, 1.3) + qops.coherent_state(dim, -1.3))
    worst = 0.0
    for psi in (qops.fock(dim, 0), qops.fock(dim, 1), cat):
        rho = np.outer(psi, psi.conj())
        w0 = ansatz.wigner(rho, grid).value_at(0.0, 0.0)
        worst = max(worst, abs(w0 - 2.0 * np.vdot(psi, qops.parity(dim) @ psi).real))
    vac = np.outer(qops.fock(dim, 0), qops.fock(dim, 0))
    integral = ansatz.wigner(vac, ansatz.GridSpec(-6.0, 6.0, 121, -6.0, 6.0, 121)).integral()
    ok = report(
        "criterion 10 (Wigner origin and normalization)",
        worst < 1e-8 and abs(integral - 2.0) < 1e-3,
        f"origin error {worst:.1e}, vacuum integral {integral:.8f}",
    )
    assert ok


def rastrigin(x):
    x = np.asarray(x)
    return 10.0 * len(x) + float(np.sum(x * x - 10.0 * np.cos(2 * np.pi * x)))


def test_criterion_11_de(report):
    cfg = DEConfig(bounds=((-5.12, 5.12),) * 3, rng_seed=0, keep_history=True)
    a = differential_evolution(rastrigin, cfg)
    b = differential_evolution(rastrigin, cfg)
    same = (
        np.array_equal(a.best_params, b.best_params)
        and a.best_objective == b.best_objective
        and a.generations_used == b.generations_used
        and a.converged == b.converged
        and a.history == b.history
    )
    ok = report(
        "criterion 11 (DE bit-identical rerun, Rastrigin-3D < 1e-3)",
        same and a.best_objective < 1e-3,
        f"identical={same}, best={a.best_objective:.2e} in {a.generations_used} generations",
    )
    assert ok
