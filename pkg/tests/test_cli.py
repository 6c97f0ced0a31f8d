import csv
import json

import numpy as np
import pytest

from qsurf.cli import main, reference_integral, run_scene
from qsurf.cli import test_functions as integrands


def test_integrand_examples():
    g1, g2, g3 = integrands([0, 0, 0])
    P = np.array([[0.0, 0.0, 0.0], [3.0, 4.0, 0.0]])
    assert np.allclose(g1(P), [1.0, np.exp(-5)])
    assert np.allclose(g2(P), [1.0, np.cos(7)])
    assert np.allclose(g3(P), [0.0, 5.0**5])


def test_run_torus_degree3(scenes):
    report, sample = run_scene(scenes["torus"], [3], M0=20_000, ref_factor=0)
    r = report.results[0]
    assert r.N == 20 and r.rule.nu <= 20 and r.rule.converged
    assert r.baseline is not None and r.baseline.converged
    assert report.M == sample.M


def test_run_full_torus_degree0(full_torus):
    report, sample = run_scene(full_torus, [0], M0=5000, ref_factor=0, baseline="off")
    rule = report.results[0].rule
    assert rule.nu == 1
    assert rule.weights[0] == pytest.approx(sample.sigma_S, rel=1e-12)


def test_run_franke_degree6(scenes):
    report, _ = run_scene(scenes["franke_3balls"], [6], M0=50_000, ref_factor=0, baseline="off")
    r = report.results[0]
    assert r.N == 84 and r.rule.nu <= 84 and r.rule.converged


def _run(tmp_path, name, *extra):
    out = tmp_path / name
    code = main(["run", "--scene", "torus", "--degrees", "2,3", "--m0", "5000",
                 "--ref-factor", "2", "--out", str(out), *extra])
    return code, out


def test_cli_deterministic_artifacts(tmp_path):
    c1, a = _run(tmp_path, "a")
    c2, b = _run(tmp_path, "b")
    assert c1 == c2 == 0
    for f in ("report.csv", "rule_deg2.json", "rule_deg3.json", "points.csv", "errors.csv"):
        assert (a / f).read_bytes() == (b / f).read_bytes()
    rows = list(csv.DictReader(open(a / "report.csv")))
    assert [int(r["degree"]) for r in rows] == [2, 3]
    rule = json.loads((a / "rule_deg3.json").read_text())
    assert rule["nu"] <= 20 and all(w > 0 for w in rule["weights"])
    errs = list(csv.DictReader(open(a / "errors.csv")))
    assert {e["method"] for e in errs} == {"qmc", "compressed", "baseline"}


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["run", "--scene", "no_such_scene", "--out", str(tmp_path / "x")]) == 1
    assert "error" in capsys.readouterr().err
    code, out = _run(tmp_path, "tight", "--eps", "1e-30")
    assert code == 2
    assert (out / "report.csv").exists()
    assert "trace" in capsys.readouterr().err
    assert main(["scenes"]) == 0
    assert "torus" in capsys.readouterr().out


def test_qsurf_out_env_override(tmp_path, monkeypatch):
    target = tmp_path / "env_out"
    monkeypatch.setenv("QSURF_OUT", str(target))
    assert main(["run", "--scene", "torus", "--degrees", "1", "--m0", "2000", "--ref-factor", "0",
                 "--out", str(tmp_path / "ignored")]) == 0
    assert (target / "report.csv").exists()
    assert not (tmp_path / "ignored").exists()


def test_reference_integral_consistency(scenes):
    sc = scenes["torus"]
    one = lambda P: np.ones(len(P))
    zed = lambda P: P[:, 2]
    v1, vz = reference_integral(sc, [one, zed], 200_000, chunk=30_000)
    S = sc.sample(M0=200_000)
    assert v1 == pytest.approx(S.sigma_J, rel=1e-12)
    assert abs(v1 - 99.75) <= 0.01 * 99.75
    # chunking does not change the sum
    w1, wz = reference_integral(sc, [one, zed], 200_000, chunk=10**6)
    assert wz == pytest.approx(vz, rel=1e-12, abs=1e-12)


@pytest.mark.slow
def test_reference_prefix_stability(scenes):
    sc = scenes["torus"]
    g3 = integrands(sc.P0)[2]
    (a,) = reference_integral(sc, [g3], 2_000_000)
    (b,) = reference_integral(sc, [g3], 2_000_000, start_index=2_000_001)
    assert abs(a - b) <= 1e-3 * abs(a)
