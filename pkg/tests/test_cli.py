import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from tenstab import cli
from tenstab.config import load_config, to_dict, write_config


def run(*args):
    return cli.main(list(args))


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def cfg_file(tmp_path):
    def make(data):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(data))
        return str(p)
    return make


def test_landscape_argmins(tmp_path):
    assert run("landscape", "--config", "paper.json", "--out", str(tmp_path), "-q") == 0
    for k in (1, 20):
        rows = read_csv(tmp_path / f"landscape_k{k}.csv")
        assert len(rows) == 721
        assert list(rows[0]) == ["beta_rad", "u_total", "u_spring", "u_gravity"]
        u = np.array([float(r["u_total"]) for r in rows])
        beta = np.array([float(r["beta_rad"]) for r in rows])
        assert abs(beta[u.argmin()] + math.atan(35.2 / (50.82 * k))) < math.pi / 720
        if k == 1:
            assert u.min() < u[np.argmin(np.abs(beta))]


def test_landscape_gravity_free_is_symmetric(tmp_path, cfg_file):
    path = cfg_file({"reduced": {"A": 0, "B": 312.8, "C": 50.82}, "k": 5})
    assert run("landscape", "--config", path, "--out", str(tmp_path), "-q") == 0
    u = np.array([float(r["u_total"]) for r in read_csv(tmp_path / "landscape_k5.csv")])
    np.testing.assert_allclose(u, u[::-1], atol=1e-9)


def test_landscape_svg_and_degrees(tmp_path):
    assert run("landscape", "--config", "paper.json", "--out", str(tmp_path), "--svg",
               "--degrees", "-q") == 0
    assert (tmp_path / "landscape_k20.svg").read_text().lstrip().startswith("<?xml")
    rows = read_csv(tmp_path / "landscape_k20.csv")
    assert float(rows[0]["beta_deg"]) == pytest.approx(-90.0)


def test_equilibria_reference_preset(tmp_path, capsys):
    assert run("equilibria", "--config", "paper.json", "--out", str(tmp_path), "-q") == 0
    k20 = read_csv(tmp_path / "equilibria_k20.csv")
    k1 = read_csv(tmp_path / "equilibria_k1.csv")
    assert len(k20) == len(k1) == 1
    assert k20[0]["classification"] == k1[0]["classification"] == "Stable"
    assert k20[0]["within_operational_range"] == "true"
    assert k1[0]["within_operational_range"] == "false"
    assert "OUTSIDE" in capsys.readouterr().out


def test_equilibria_gravity_free(tmp_path, cfg_file):
    path = cfg_file({"reduced": {"A": 0, "B": 312.8, "C": 50.82}, "k": 5})
    assert run("equilibria", "--config", path, "--out", str(tmp_path), "-q") == 0
    row, = read_csv(tmp_path / "equilibria_k5.csv")
    assert abs(float(row["beta_rad"])) < 1e-12 and row["classification"] == "Stable"


def test_equilibria_geometric_uses_2d(tmp_path):
    assert run("equilibria", "--config", "paper_geometric.json", "--out", str(tmp_path), "-q") == 0
    rows = read_csv(tmp_path / "equilibria_k20.csv")
    stable = [r for r in rows if r["classification"] == "Stable"]
    assert len(stable) == 1
    assert float(stable[0]["beta_rad"]) == pytest.approx(-math.atan(35.2 / (50.82 * 20)), abs=1e-9)


def test_sweep_monotone(tmp_path, cfg_file):
    path = cfg_file({"reduced": {"A": 35.2, "B": 312.8, "C": 50.82},
                     "k_list": list(range(1, 31))})
    assert run("sweep", "--config", path, "--out", str(tmp_path), "-q") == 0
    rows = read_csv(tmp_path / "sweep.csv")
    assert list(rows[0]) == ["k", "beta_star_rad", "u_star", "classification",
                             "within_operational_range"]
    defl = np.abs([float(r["beta_star_rad"]) for r in rows])
    assert np.all(np.diff(defl) < 0)


def test_sweep_respects_thread_cap(tmp_path, monkeypatch):
    monkeypatch.setenv("STAB_THREADS", "1")
    assert run("sweep", "--config", "paper.json", "--out", str(tmp_path / "a"), "-q") == 0
    monkeypatch.setenv("STAB_THREADS", "4")
    assert run("sweep", "--config", "paper.json", "--out", str(tmp_path / "b"), "-q") == 0
    assert (tmp_path / "a/sweep.csv").read_bytes() == (tmp_path / "b/sweep.csv").read_bytes()
    monkeypatch.setenv("STAB_THREADS", "zero")
    assert run("sweep", "--config", "paper.json", "--out", str(tmp_path / "c"), "-q") == 2


def test_critical_k(capsys):
    assert run("critical-k", "--config", "paper.json", "-q") == 0
    out = capsys.readouterr().out
    k_star = float(out.split("k_star = ")[1].split()[0])
    assert k_star == pytest.approx(13.84, abs=5e-3)
    assert "closed form" in out


def test_critical_k_lower_edge(capsys):
    assert run("critical-k", "--config", "paper.json", "--beta-tol", "1.5", "-q") == 0
    assert "k_star = 0.1 " in capsys.readouterr().out


def test_critical_k_bracket_failure(cfg_file, capsys):
    path = cfg_file({"reduced": {"A": 35.2, "B": 312.8, "C": 50.82}, "k": 1,
                     "k_bracket": [0.1, 2]})
    assert run("critical-k", "--config", path, "-q") == 2
    assert "upper bracket" in capsys.readouterr().err


def test_fit_geometric_report(capsys):
    assert run("fit", "--config", "paper_geometric.json", "-q") == 0
    out = capsys.readouterr().out
    line_a = next(l for l in out.splitlines() if l.strip().startswith("A "))
    assert float(line_a.split()[1]) == pytest.approx(35.2, abs=1e-9)
    assert "max residual" in out


def test_fit_reduced_exact(capsys):
    assert run("fit", "--config", "paper.json", "-q") == 0
    line_b = next(l for l in capsys.readouterr().out.splitlines() if l.strip().startswith("B "))
    assert float(line_b.split()[1]) == pytest.approx(312.8, abs=1e-9)


def test_fit_degenerate(cfg_file, capsys):
    path = cfg_file({"reduced": {"A": 35.2, "B": 312.8, "C": 50.82}, "k": 1,
                     "beta_range": [0.0, 1e-12], "fit_samples": 3})
    assert run("fit", "--config", path, "-q") == 2
    assert "do not separate" in capsys.readouterr().err


def test_validation_error_exit_code(cfg_file, capsys):
    assert run("sweep", "--config", cfg_file({"reduced": {"A": 1, "B": 1, "C": 1}, "k": -1}),
               "-q") == 2
    assert "k:" in capsys.readouterr().err


def test_verify_passes(tmp_path):
    assert run("sweep", "--config", "paper_geometric.json", "--out", str(tmp_path),
               "--verify", "-q") == 0


def test_verify_fails_loudly(monkeypatch, tmp_path, capsys):
    real = cli.total_energy

    class Skewed:
        def __init__(self, ev):
            self.grad = ev.grad * 1.01

    monkeypatch.setattr(cli, "total_energy", lambda m, c: Skewed(real(m, c)))
    assert run("sweep", "--config", "paper.json", "--out", str(tmp_path), "--verify", "-q") == 3
    assert "VERIFY FAILED" in capsys.readouterr().err


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run("sweep", "--config", "paper.json", "--out", str(blocker / "sub"), "-q") == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "tenstab.cli", "sweep", "--config", "paper.json",
                           "--out", str(tmp_path), "-q"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "sweep.csv").read_text().splitlines()[1].startswith("1,-0.605769737")
