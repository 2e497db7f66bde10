import csv
import io
import json

import pytest

from coded_caching.cli import main


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def test_simulate_example(capsys):
    code, out = run(["simulate", "--scheme", "proposed", "-N", "2", "-K", "5", "-M", "4/5", "-F", "1000", "--demands", "1,1,1,2,2"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["transmitted_bits"] == 900 and rep["load"] == 0.9
    assert rep["success"] and rep["exact_match"]


def test_simulate_mns(capsys):
    code, out = run(["simulate", "--scheme", "mns", "-N", "2", "-K", "5", "-M", "4/5", "-F", "1000"], capsys)
    assert code == 0 and json.loads(out)["transmitted_bits"] == 1000


def test_simulate_transcript_and_field(capsys):
    code, out = run(["simulate", "-N", "2", "-K", "4", "-M", "1", "-F", "12", "--field", "16", "--transcript"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["success"]
    assert len(rep["transcript"]) > 0


def test_simulate_bad_config(capsys):
    assert main(["simulate", "-N", "5", "-K", "3", "-M", "1", "-F", "3"]) == 2
    assert main(["simulate", "-N", "2", "-K", "5", "-M", "4/5", "-F", "15"]) == 2
    assert main(["simulate", "-N", "2", "-K", "5", "-M", "9", "-F", "10"]) == 2
    assert main(["simulate", "-N", "2", "-K", "5", "-M", "1", "-F", "10", "--demands", "1,2"]) == 2
    assert main(["bogus"]) == 2


def test_simulate_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["simulate", "--mode", "decentralized", "-N", "2", "-K", "4", "-M", "1", "-F", "400", "--seed", "3", "--transcript"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_tradeoff_n2_k10(capsys):
    code, out = run(["tradeoff", "-N", "2", "-K", "10"], capsys)
    assert code == 0
    rows = _rows(out)
    at1 = {r["scheme"]: float(r["load"]) for r in rows if (r["M_num"], r["M_den"]) == ("1", "1")}
    assert abs(at1["proposed_centralized"] - 0.722) <= 0.001
    assert abs(at1["mns_centralized"] - 0.794) <= 0.001
    at_n = {r["scheme"]: float(r["load"]) for r in rows if (r["M_num"], r["M_den"]) == ("2", "1")}
    assert len(at_n) == 6 and all(v == pytest.approx(0, abs=1e-12) for v in at_n.values())
    keys = [(r["scheme"], int(r["M_num"]) / int(r["M_den"])) for r in rows]
    assert keys == sorted(keys)


def test_tradeoff_n4_k8_json(capsys):
    code, out = run(["tradeoff", "-N", "4", "-K", "8", "--format", "json"], capsys)
    curves = json.loads(out)["curves"]
    pt = next(p for p in curves["proposed_decentralized"] if p["M"] == "6/5")
    assert code == 0 and abs(pt["load"] - 1.894) <= 0.001


def test_certify(capsys):
    code, out = run(["certify", "-N", "2", "-K", "5"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["certified"] is True
    assert any(p["M"] == "4/5" and p["achievable"] == p["bound"] == "9/10" for p in rep["points"])
    code, out = run(["certify", "-N", "2", "-K", "10"], capsys)
    assert code == 0 and json.loads(out)["certified"] is True
    code, out = run(["certify", "-N", "3", "-K", "5"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["certified"] is False and rep["claim"] == "bound-only"


def test_verify_quick(capsys):
    code, out = run(["verify", "--quick"], capsys)
    assert code == 0
    assert out.count("PASS") == 5 and "FAIL" not in out
