import io
import json
import math
import subprocess
import sys

import pytest

from currents import boundary, fixture, fixture_path
from currents.complex import chain_from_json
from currents.cli import COMMANDS, run


def curr(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def ok(*argv):
    code, out, err = curr(*argv)
    assert code == 0, err
    assert err == ""
    return json.loads(out)


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")

    def write(name, doc):
        p = d / name
        p.write_text(json.dumps(doc))
        return p

    tri = fixture("tri")
    return {
        "tri": fixture_path("tri"),
        "edge1": fixture_path("edge1"),
        "square": fixture_path("square"),
        "dsigma": write("dsigma.json", {"dim": 1, "coefficients": [[tri.index((0, 1)), 1], [tri.index((0, 2)), -1], [tri.index((1, 2)), 1]]}),
        "sigma": write("sigma.json", {"dim": 2, "coefficients": [[0, 1]]}),
        "bad": write("bad.json", {"dim": 1, "coefficients": [[99, 1]]}),
        "k1": write("k1.json", {"dim": 1, "coefficients": [[tri.index((0, 1)), 2.0], [tri.index((1, 2)), -1.0]]}),
        "k2": write("k2.json", {"dim": 2, "coefficients": [[0, 1.5]]}),
        "quarter": write("quarter.json", {"dim": 1, "coefficients": [[0, math.pi / 2]]}),
        "garbled": write("garbled.json", {"dim": 1}),
        "dir": d,
    }


def test_flatnorm_of_triangle_boundary(files):
    doc = ok("chain", "flatnorm", "--complex", files["tri"], "--chain", files["dsigma"], "--mode", "real")
    assert doc["value"] == pytest.approx(0.5, abs=1e-12)
    doc = ok("chain", "flatnorm", "--complex", files["tri"], "--chain", files["dsigma"], "--mode", "integer")
    assert doc["value"] == pytest.approx(0.5, abs=1e-12)


def test_validate(files):
    doc = ok("complex", "validate", "--complex", files["tri"])
    assert doc["passed"] and doc["counts"] == [3, 3, 1]


def test_bad_index_is_usage_error(files):
    code, out, err = curr("chain", "mass", "--complex", files["tri"], "--chain", files["bad"])
    assert code == 2 and out == ""
    assert "99" in err and err.count("\n") == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["chain", "mass", "--complex", "nowhere.scx", "--chain", "x.json"],
        ["chain", "mass", "--bogus"],
        ["chain", "teleport", "--complex", "x"],
        ["ball", "enum", "--complex", "{tri}"],
        ["chain", "mass", "--complex", "{tri}"],
        ["chain", "mass", "--complex", "{tri}", "--chain", "{garbled}"],
        ["ball", "sample", "--complex", "{tri}", "--dim", "1", "--seed", "-1"],
        ["mean", "estimate", "--complex", "{tri}", "--dim", "1", "--function", "wobble"],
    ],
)
def test_usage_errors(files, argv):
    argv = [a.format(**files) for a in argv]
    code, out, err = curr(*argv)
    assert code == 2 and out == ""
    assert err.startswith("curr: ") and err.count("\n") == 1


def test_guard_is_computational_failure(files):
    code, out, err = curr("ball", "enum", "--complex", files["square"], "--dim", "1", "--cap", "40")
    assert code == 1 and out == "" and "guard" in err


def test_chain_commands(files):
    bd = ok("chain", "boundary", "--complex", files["tri"], "--chain", files["sigma"])
    tri = fixture("tri")
    assert chain_from_json(tri, bd) == chain_from_json(tri, json.loads(files["dsigma"].read_text()))
    m = ok("chain", "mass", "--complex", files["tri"], "--chain", files["sigma"])
    assert m["mass"] == pytest.approx(0.5) and m["normal_norm"] == pytest.approx(2.5 + math.sqrt(2))


def test_form_commands(files):
    assert ok("form", "pair", "--complex", files["tri"], "--cochain", files["k1"], "--chain", files["dsigma"])["value"] == pytest.approx(1.0)
    c = ok("form", "comass", "--complex", files["tri"], "--cochain", files["k2"])
    assert c["comass"] == pytest.approx(3.0) and c["coboundary_comass"] == 0
    k = ok("form", "discretize", "--complex", files["tri"], "--form", "const:1,0", "--dim", "1")
    assert dict(map(tuple, k["coefficients"]))[fixture("tri").index((0, 1))] == pytest.approx(1.0)


def test_gk_commands(files):
    doc = ok("gk", "eval", "--complex", files["tri"], "--cochain", files["k2"], "--chain", files["sigma"])
    # pairing 1.5 * 1, flat norm of sigma 0.5
    assert doc["phase"] == pytest.approx(2.0)
    assert doc["value"]["re"] == pytest.approx(math.cos(2.0)) and doc["value"]["im"] == pytest.approx(math.sin(2.0))
    rep = ok("gk", "lipcheck", "--complex", files["tri"], "--cochain", files["k2"], "--trials", "40", "--cap", "10", "--seed", "5")
    assert rep["passed"] and rep["seed"] == 5


def test_ball_and_cycles(files):
    doc = ok("ball", "enum", "--complex", files["edge1"], "--dim", "1", "--cap", "6.5")
    assert doc["count"] == 5
    sample = ok("ball", "sample", "--complex", files["square"], "--dim", "1", "--cap", "5", "--count", "7", "--seed", "3")
    assert len(sample["chains"]) == 7
    assert ok("cycles", "basis", "--complex", files["square"], "--dim", "1")["rank"] == 2


def test_mean_commands(files):
    base = ["--complex", files["edge1"], "--dim", "1", "--cap", "6.5", "--cochain", files["quarter"], "--function", "phase"]
    est = ok("mean", "estimate", *base, "--shifts", "5", "--probes", "12", "--seed", "8")
    assert est["certified_on"] == "probe set" and len(est["lambda"]) == len(est["shifts"]) == 5
    # the five points of this ball are -2..2, a full residue system mod 4 among the shifts
    assert est["epsilon"] <= 1e-9
    rep = ok("mean", "shiftcheck", *base, "--shifts", "5", "--seed", "8")
    assert rep["passed"]
    cyc = ok("mean", "estimate", "--complex", files["tri"], "--dim", "1", "--cap", "8", "--cycles-only", "--shifts", "3", "--probes", "5")
    assert cyc["cycles_only"] and cyc["epsilon"] <= 1e-9


def test_round_trip_of_emitted_chains(files):
    tri = fixture("tri")
    doc = ok("ball", "enum", "--complex", files["tri"], "--dim", "1", "--cap", "7")
    for item in doc["chains"]:
        T = chain_from_json(tri, item)
        path = files["dir"] / "rt.json"
        path.write_text(json.dumps(item))
        again = ok("chain", "boundary", "--complex", files["tri"], "--chain", path)
        assert chain_from_json(tri, again) == boundary(T)


def test_every_command_is_reachable(files):
    groups = {g for g, _ in COMMANDS}
    assert groups == {"complex", "chain", "form", "gk", "ball", "cycles", "mean"}
    assert len(COMMANDS) == 14


def test_module_entry_point_is_deterministic(files):
    argv = [sys.executable, "-m", "currents", "ball", "sample", "--complex", str(files["square"]), "--dim", "1", "--cap", "5", "--seed", "77"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["seed"] == 77
