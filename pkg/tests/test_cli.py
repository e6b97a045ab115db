import csv
import io
import json
import math

import numpy as np
import pytest

from rabivar import cli, optimize
from rabivar.model import ModelParams


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def parse_wigner(text):
    lines = text.splitlines()
    x0, x1, nx = lines[0].split()
    p0, p1, np_ = lines[1].split()
    assert lines[2].startswith("#")
    values = np.array([[float(v) for v in row.split()] for row in lines[3:]])
    return (float(x0), float(x1), int(nx), float(p0), float(p1), int(np_)), values


class TestParsing:
    def test_single_value(self):
        assert cli.parse_range("1.5") == [1.5]

    def test_range_inclusive(self):
        assert cli.parse_range("0:1:5") == [0.0, 0.25, 0.5, 0.75, 1.0]

    @pytest.mark.parametrize("bad", ["0:1", "0:1:0", "a:b:c"])
    def test_range_rejects(self, bad):
        with pytest.raises(ValueError):
            cli.parse_range(bad)

    def test_list(self):
        assert cli.parse_list("5, 20,176") == [5.0, 20.0, 176.0]

    def test_config_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# comment\nomega_q = 20\nG-over-gstar=0.5  # trailing\n\nmax_generations=50\n")
        cfg = cli.read_config(path)
        assert cfg == {"omega-q": "20", "g-over-gstar": "0.5", "max-generations": "50"}
        assert cli._de_overrides(cfg) == {"max_generations": 50}

    def test_config_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("omega_q 20\n")
        with pytest.raises(ValueError):
            cli.read_config(path)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            cli.SweepSpec([5.0], [0.5], ansatz="ecs-ground", objective="energy")
        with pytest.raises(ValueError):
            cli.SweepSpec([-1.0], [0.5])
        with pytest.raises(ValueError):
            cli.SweepSpec([5.0], [])
        assert cli.SweepSpec([5.0, 20.0], [0.0, 1.0]).points() == [(5.0, 0.0), (5.0, 1.0), (20.0, 0.0), (20.0, 1.0)]

    def test_worker_cap(self, monkeypatch):
        monkeypatch.setenv("RABIVAR_THREADS", "2")
        assert cli.worker_count(10) == 2
        assert cli.worker_count(1) == 1


class TestPrecedence:
    def test_flag_beats_config_beats_default(self, tmp_path, capsys):
        path = tmp_path / "run.cfg"
        path.write_text("omega_q=5\ng_over_gstar=0.5\nseed=3\nansatz=ecs-ground\n")
        code, out, _ = run(capsys, "point", "--config", str(path), "--seed", "7")
        assert code == 0
        report = json.loads(out)
        assert report["seed"] == 7
        assert report["config"]["ansatz"] == "ecs-ground"
        assert report["config"]["objective"] == "fidelity"
        assert report["omega_q"] == 5.0


class TestSweep:
    def test_header_and_free_point(self, capsys):
        code, out, _ = run(capsys, "sweep", "--omega-q", "5", "--g-over-gstar", "0")
        assert code == 0
        assert out.splitlines()[0].split(",") == list(cli.CSV_COLUMNS)
        (row,) = parse_csv(out)
        assert float(row["fidelity_error"]) < 1e-8
        assert float(row["p_minus"]) == pytest.approx(1.0, abs=1e-12)
        assert float(row["purity_noq"]) == pytest.approx(1.0, abs=1e-12)
        assert float(row["purity_exact"]) == pytest.approx(1.0, abs=1e-12)
        assert row["status"] == "ok"

    def test_byte_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["sweep", "--omega-q", "5,20", "--g-over-gstar", "0.5:1.5:2", "--seed", "4"]
        assert run(capsys, *args, "--out", str(a))[0] == 0
        assert run(capsys, *args, "--out", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_thread_count_keeps_order(self, monkeypatch):
        spec = cli.SweepSpec([5.0], [0.2, 0.6, 1.0])
        monkeypatch.setenv("RABIVAR_THREADS", "1")
        serial = cli.rows_to_csv(cli.run_sweep(spec))
        monkeypatch.setenv("RABIVAR_THREADS", "3")
        threaded = cli.rows_to_csv(cli.run_sweep(spec))
        assert serial == threaded

    def test_excited_alias(self, capsys):
        code, out, _ = run(capsys, "excited-sweep", "--omega-q", "5", "--g-over-gstar", "0.5")
        assert code == 0
        (row,) = parse_csv(out)
        assert float(row["fidelity_error"]) < 0.01
        # below the qubit gap the first excitation is a photon, qubit still down
        assert float(row["p_minus"]) > 0.9

    def test_failed_point_reported(self, capsys):
        # a starting cavity of 10 cannot hold g = 3
        code, out, err = run(capsys, "sweep", "--omega-q", "5", "--g-over-gstar", "0.5:2.7:2", "--dim-override", "10")
        assert code == 1
        rows = parse_csv(out)
        assert rows[-1]["status"].startswith("error: ConvergenceError")
        assert "g/g*=2.7" in err

    def test_bad_arguments(self, capsys):
        assert run(capsys, "sweep", "--omega-q", "5")[0] == 2
        assert run(capsys, "sweep", "--omega-q", "5", "--g-over-gstar", "1", "--ansatz", "ecs-ground", "--objective", "energy")[0] == 2
        assert run(capsys, "point", "--omega-q", "5,6", "--g-over-gstar", "1")[0] == 2


@pytest.fixture(scope="module")
def sweep_176():
    spec = cli.SweepSpec([176.0], [0.2, 0.5, 0.8, 1.0, 1.2, 1.5, 2.0, 3.0])
    return cli.run_sweep(spec)


class TestSweepShapes:
    def test_all_ok_and_accurate(self, sweep_176):
        for row in sweep_176:
            assert row["status"] == "ok"
            assert row["fidelity_error"] < 0.01

    def test_p_minus_decreasing(self, sweep_176):
        pm = [row["p_minus"] for row in sweep_176]
        assert all(b < a for a, b in zip(pm, pm[1:]))

    def test_alpha_increasing(self, sweep_176):
        al = [row["alpha_c"] for row in sweep_176]
        assert all(b > a for a, b in zip(al, al[1:]))


class TestPoint:
    def test_schema(self, capsys):
        code, out, _ = run(capsys, "point", "--omega-q", "10", "--g-over-gstar", "1")
        assert code == 0
        report = json.loads(out)
        for key in cli.CSV_COLUMNS:
            assert key in report
            if key != "status":
                assert isinstance(report[key], (int, float)) and math.isfinite(report[key])
        assert set(report["params"]) == {"alpha_c", "r", "phi"}
        assert set(report["schmidt"]) == {"p_minus", "alpha_c", "r"}
        assert len(report["eigenvalues"]) == 2
        assert set(report["de"]) == {"generations", "converged", "evaluations", "best_objective"}
        assert all(math.isfinite(v) for v in report["params"].values())
        assert all(math.isfinite(v) for v in report["schmidt"].values())

    def test_energy_min_strong(self, capsys):
        code, out, _ = run(capsys, "energy-min", "--omega-q", "176", "--g-over-gstar", "5")
        assert code == 0
        report = json.loads(out)
        ref = optimize.asymptotic_alpha(ModelParams.from_ratio(176.0, 5.0))
        assert abs(report["alpha_c"] - ref) / ref < 0.02
        assert report["energy_error"] >= -1e-9

    def test_seed_robust(self, capsys):
        reports = []
        for seed in ("0", "1", "2"):
            code, out, _ = run(capsys, "point", "--omega-q", "5", "--g-over-gstar", "0.8", "--seed", seed)
            assert code == 0
            reports.append(json.loads(out))
        base = reports[0]
        for other in reports[1:]:
            assert other["seed"] != base["seed"]
            for key in ("fidelity_error", "energy_error", "p_minus", "purity_noq", "alpha_c", "r", "phi"):
                assert other[key] == pytest.approx(base[key], abs=1e-5)
            assert other["exact_energy_shift"] == base["exact_energy_shift"]
            assert other["eigenvalues"] == base["eigenvalues"]


class TestWigner:
    def test_vacuum(self, tmp_path, capsys):
        path = tmp_path / "w.txt"
        code, _, _ = run(capsys, "wigner", "--omega-q", "5", "--g-over-gstar", "0", "--grid=-3:3:7", "--out", str(path))
        assert code == 0
        header, values = parse_wigner(path.read_text())
        assert header == (-3.0, 3.0, 7, -3.0, 3.0, 7)
        assert values.shape == (7, 7)
        assert values[3, 3] == pytest.approx(2.0, abs=1e-6)
        assert "state=exact-ground" in path.read_text().splitlines()[2]

    def test_exact_vs_noq(self, capsys):
        grids = {}
        for state in ("exact-ground", "noq-optimized"):
            code, out, _ = run(
                capsys, "wigner", "--omega-q", "176", "--g-over-gstar", "1", "--state", state, "--grid=-5:5:41"
            )
            assert code == 0
            grids[state] = parse_wigner(out)[1]
        assert np.max(np.abs(grids["exact-ground"] - grids["noq-optimized"])) < 0.05

    def test_mixed_cat_lobes(self, capsys):
        code, out, _ = run(capsys, "wigner", "--omega-q", "0.0001", "--g-over-gstar", "400", "--state", "ecs", "--grid=-4:4:33")
        assert code == 0
        (x0, x1, nx, *_), values = parse_wigner(out)
        xs = np.linspace(x0, x1, nx)
        g = ModelParams.from_ratio(0.0001, 400).g
        mid = values.shape[0] // 2
        row = values[mid]
        # lobes sit at x = +-sqrt(2) g in this quadrature convention
        peaks = xs[np.argsort(row)[-2:]]
        assert np.allclose(sorted(np.abs(peaks)), [math.sqrt(2) * g] * 2, atol=0.25)
        # no fringes: nothing negative along the momentum axis between the lobes
        assert values[:, nx // 2].min() > -1e-6
