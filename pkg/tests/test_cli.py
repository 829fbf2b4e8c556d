import csv
import hashlib
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from extropy import __version__
from extropy.cli import main
from extropy.datasets import BLOOD_CANCER
from extropy.empirical import Sample, empirical_dfe, empirical_fe, empirical_wdfe, empirical_wfe


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def manifest_of(err):
    line = next(l for l in err.splitlines() if l.startswith("manifest: "))
    return json.loads(line[len("manifest: "):])


def test_analytic_examples(capsys):
    code, out, err = run(capsys, "analytic", "uniform(0,6)", "fe")
    assert code == 0 and out.split()[0] == "-1"
    m = manifest_of(err)
    assert m["version"] == __version__ and m["command"] == ["analytic", "uniform(0,6)", "fe"]
    code, out, _ = run(capsys, "analytic", "exp(1)", "fe")
    assert code == 0 and out.strip() == "-inf (unbounded support)"
    code, out, _ = run(capsys, "analytic", "uniform(0,6)", "dfe", "--t", "3")
    assert code == 0 and float(out.split()[0]) == -0.5


def test_analytic_bounds_and_weights(capsys):
    code, out, _ = run(capsys, "analytic", "uniform(0,6)", "dfe", "--t", "3", "--bounds")
    assert code == 0 and "bounds:" in out
    lo, hi = json.loads(out.split("bounds:")[1])
    assert lo <= -0.5 <= hi
    code, out, _ = run(capsys, "analytic", "uniform(0,1)", "wdfe", "--t", "1", "--weight", "id")
    assert code == 0 and float(out.split()[0]) == pytest.approx(-0.1)


def test_analytic_errors(capsys):
    assert run(capsys, "analytic", "unif(0", "fe")[0] == 2
    assert run(capsys, "analytic", "uniform(2,1)", "fe")[0] == 2
    assert run(capsys, "analytic", "uniform(1,2)", "dfe", "--t", "0.5")[0] == 3
    assert run(capsys, "analytic", "uniform(0,1)", "dfe")[0] == 2
    assert run(capsys, "nosuch")[0] == 2


def test_curve_uniform_line(capsys, tmp_path):
    out_path = tmp_path / "u.csv"
    code, _, _ = run(capsys, "curve", "uniform(0,1)", "--out", str(out_path))
    assert code == 0
    raw = out_path.read_bytes()
    assert b"\r" not in raw
    rows = list(csv.reader(io.StringIO(raw.decode())))
    assert rows[0] == ["t", "value"] and len(rows) == 201
    t = np.array([float(r[0]) for r in rows[1:]])
    v = np.array([float(r[1]) for r in rows[1:]])
    assert np.allclose(v, -t / 6, atol=1e-15)
    m = json.loads((tmp_path / "u.csv.manifest.json").read_text())
    assert m["outputs"][str(out_path)] == hashlib.sha256(raw).hexdigest()


def test_curve_single_point_at_lower_endpoint(capsys):
    code, out, _ = run(capsys, "curve", "uniform(0,1)", "--grid", "1", "--tmax", "0")
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0] == "t,value" and len(rows) == 2 and float(rows[1].split(",")[1]) == 0.0


def test_figure1_batch_ordering(capsys):
    code, out, _ = run(capsys, "curve", "--figure1", "--grid", "50")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["t", "exp(0.5)", "exp(1)", "exp(1.5)", "exp(2)", "exp(2.5)"]
    vals = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
    assert vals.shape == (50, 5)
    # each curve decreases in t; at fixed t a larger rate sits lower
    assert np.all(np.diff(vals, axis=0) < 0)
    assert np.all(np.diff(vals, axis=1) < 0)


def test_empirical_examples(capsys, tmp_path):
    code, out, _ = run(capsys, "empirical", "--dataset", "blood-cancer", "fe")
    assert code == 0 and out.split()[0] == "-222.752"
    code, out, _ = run(capsys, "empirical", "--dataset", "neuron-spikes", "dfe", "--t", "340")
    assert code == 0 and out.split()[0] == "-39.8138"
    f = tmp_path / "two.txt"
    f.write_text("1\n3\n")
    code, out, _ = run(capsys, "empirical", str(f), "fe")
    assert code == 0 and out.split()[0] == "-0.25"


def test_empirical_all_matches_library(capsys):
    code, out, err = run(capsys, "empirical", "--dataset", "blood-cancer", "--all", "--t", "1000")
    assert code == 0
    got = dict(line.split("\t") for line in out.strip().splitlines())
    s = Sample(BLOOD_CANCER)
    lib = [empirical_fe(s), empirical_dfe(s, 1000), empirical_wfe(s, "id"), empirical_wdfe(s, "id", 1000)]
    for printed, r in zip(got.values(), lib):
        assert printed == f"{r.value:.6g}"
    assert manifest_of(err)["variant_used"] == "paper"


def test_empirical_errors(capsys, tmp_path):
    assert run(capsys, "empirical", str(tmp_path / "missing.txt"), "fe")[0] == 2
    empty = tmp_path / "empty.txt"
    empty.write_text("# only a comment\n")
    assert run(capsys, "empirical", str(empty), "fe")[0] == 2
    assert run(capsys, "empirical", "--dataset", "blood-cancer", "dfe", "--t", "1")[0] == 3


def test_fig2(capsys):
    code, out, err = run(capsys, "fig2", "--dataset", "blood-cancer", "--t", "1000")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert float(rows[0]["w=id"]) == pytest.approx(-55.237, abs=5e-3)
    assert manifest_of(err)["variant_used"] == "paper"
    code, out, _ = run(capsys, "fig2", "--grid", "40")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert {r["dataset"] for r in rows} == {"blood-cancer", "neuron-spikes"} and len(rows) == 80
    cols = ["w=sqrt", "w=id", "w=square", "w=cube"]
    for r in rows:
        v = [float(r[c]) for c in cols]
        assert all(x <= 0 for x in v)
        assert v == sorted(v)
    firsts = [r for r in rows if float(r["t"]) in (115.0, 136.842)]
    assert len(firsts) == 2 and all(float(r[c]) == 0.0 for r in firsts for c in cols)


def test_orders(capsys):
    code, out, _ = run(capsys, "orders", "power(1)", "power(2)", "--kinds", "st,fe")
    assert code == 0 and out.split() == ["st", "yes", "fe", "yes"]
    code, out, _ = run(capsys, "orders", "uniform(0,2)", "uniform(0,2)")
    assert code == 0 and all(line.split("\t")[1] == "yes" for line in out.strip().splitlines())
    assert run(capsys, "orders", "power(1)", "power(2)", "--kinds", "st,nope")[0] == 2


def test_harness_exit_codes(capsys, tmp_path):
    out_path = tmp_path / "h.json"
    code, _, _ = run(capsys, "harness", "--seed", "2", "--pairs", "12", "--grid", "128", "--out", str(out_path))
    assert code == 0
    assert json.loads(out_path.read_text())["falsification_count"] == 0
    m = json.loads((tmp_path / "h.json.manifest.json").read_text())
    assert m["seed"] == 2 and m["falsification_count"] == 0
    code, out, _ = run(capsys, "harness", "--seed", "1", "--pairs", "40", "--grid", "256", "--any-support")
    assert code == 1 and json.loads(out)["falsification_count"] > 0


def test_mc(capsys):
    code, out, _ = run(capsys, "mc", "uniform01", "--n", "10", "--replicates", "20000", "--seed", "42")
    assert code == 0
    row = json.loads(out)[0]
    assert row["seed"] == 42 and abs(row["z_mean"]) < 3
    code, out, _ = run(capsys, "mc", "exponential", "--rate", "1", "--n", "10", "--replicates", "20000")
    assert code == 0 and abs(json.loads(out)[0]["z_mean"]) < 3
    assert run(capsys, "mc", "uniform01", "--n", "10", "--replicates", "999")[0] == 2


def test_manifest_determinism(capsys, tmp_path):
    sums = []
    for name in ("a", "b"):
        p = tmp_path / f"{name}.json"
        assert run(capsys, "mc", "uniform01", "--n", "10", "--n", "20", "--replicates", "1000",
                   "--seed", "5", "--out", str(p))[0] == 0
        m = json.loads((tmp_path / f"{name}.json.manifest.json").read_text())
        sums.append(m["outputs"][str(p)])
        assert m["seed"] == 5
    assert sums[0] == sums[1]
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "extropy", "analytic", "power(1)", "fe"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.split()[0] == "-0.166667"
    assert "manifest:" in proc.stderr
