"""Command line surface, exercised through click's test runner.

Covers every command group, the 0/1/2 exit code convention, the global
--json flag, and the error wrapper around the console entry point.
"""
import json
import sys

import numpy as np
import pytest
from click.testing import CliRunner

from finquo import jsonio
from finquo.aperm import OrbitSpectrum, WindowMap
from finquo.canon import saturation_class
from finquo.cli import cli, main
from finquo.descriptors import (
    AffineTail,
    ConstantTail,
    GeometricTail,
    SequenceDescriptor,
)
from finquo.fmcheck.hintikka import fingerprint

GEO_EVEN = SequenceDescriptor((), GeometricTail(1, 4))
GEO_ODD = SequenceDescriptor((), GeometricTail(2, 4))


@pytest.fixture
def runner():
    return CliRunner()


def _save(path, obj):
    jsonio.save_json(path, obj)
    return str(path)


def _descriptor_file(tmp_path, name, desc):
    return _save(tmp_path / name, desc.to_json())


def _spectrum_file(tmp_path, name, spec):
    return _save(tmp_path / name, jsonio.spectrum_to_json(spec))


# --- aperm -----------------------------------------------------------------

def test_aperm_spectrum_closed_cycle(tmp_path, runner):
    f = WindowMap(8, tuple((i, (i + 1) % 8) for i in range(8)))
    p = _save(tmp_path / "map.json", jsonio.window_map_to_json(f))
    res = runner.invoke(cli, ["--json", "aperm", "spectrum", "--map", p])
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert payload["censored"] == 0
    assert payload["spectrum"]["cycles"]["prefix"] == [8]


def test_aperm_index_exit_codes(tmp_path, runner):
    closed = WindowMap(8, tuple((i, (i + 1) % 8) for i in range(8)))
    p = _save(tmp_path / "closed.json", jsonio.window_map_to_json(closed))
    res = runner.invoke(cli, ["aperm", "index", "--map", p])
    assert res.exit_code == 0
    assert "index 0" in res.output

    # a path running off both edges of the window cannot be priced
    escaping = WindowMap(8, tuple((i, i + 1) for i in range(7)))
    p = _save(tmp_path / "escaping.json", jsonio.window_map_to_json(escaping))
    res = runner.invoke(cli, ["aperm", "index", "--map", p])
    assert res.exit_code == 2


# --- canon -----------------------------------------------------------------

def test_canon_decompose(tmp_path, runner):
    s = OrbitSpectrum(
        cycles=SequenceDescriptor((), ConstantTail(4)),
        n_like=3, rev_n_like=1, z_like=2,
    )
    p = _spectrum_file(tmp_path, "s.json", s)
    res = runner.invoke(cli, ["--json", "canon", "decompose", "--spectrum", p])
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert payload["decomposition"]["sPart"] == 2
    assert payload["decomposition"]["zPart"] == 3
    assert payload["star"] is True       # index 2 is even


def test_canon_saturation(tmp_path, runner):
    s = OrbitSpectrum(n_like=1)
    p = _spectrum_file(tmp_path, "s.json", s)
    res = runner.invoke(cli, ["canon", "saturation", "--spectrum", p])
    assert res.exit_code == 0
    assert saturation_class(s).label in res.output


def test_canon_conjugate_trivial(tmp_path, runner):
    pa = _spectrum_file(tmp_path, "a.json", OrbitSpectrum(n_like=1))
    pb = _spectrum_file(tmp_path, "b.json", OrbitSpectrum(rev_n_like=1))
    res = runner.invoke(cli, ["canon", "conjugate", "--a", pa, "--b", pa])
    assert res.exit_code == 0
    res = runner.invoke(cli, ["canon", "conjugate", "--a", pa, "--b", pb])
    assert res.exit_code == 1


def test_canon_conjugate_potential_obstruction(tmp_path, runner):
    pa = _spectrum_file(tmp_path, "a.json", OrbitSpectrum(cycles=GEO_EVEN))
    pb = _spectrum_file(tmp_path, "b.json", OrbitSpectrum(cycles=GEO_ODD))
    res = runner.invoke(cli, ["--json", "canon", "conjugate", "--a", pa,
                              "--b", pb, "--mode", "potential"])
    assert res.exit_code == 1
    payload = json.loads(res.output)
    assert payload["verdict"] == "no"
    assert payload["detail"]["modulus"] == 3


# --- fmcheck ---------------------------------------------------------------

def test_fmcheck_eval_exit_codes(runner):
    res = runner.invoke(cli, ["fmcheck", "eval", "--n", "3",
                              "--formula", "(exists x (= x x))"])
    assert res.exit_code == 0
    assert "True" in res.output
    res = runner.invoke(cli, ["fmcheck", "eval", "--n", "3",
                              "--formula", "(forall x (= x 0))"])
    assert res.exit_code == 1


def test_fmcheck_eval_from_file_and_backend(tmp_path, runner):
    p = tmp_path / "sentence.sexpr"
    p.write_text("(exists x (and (not (= x 0)) (= (a x) x)))")
    args = ["--json", "fmcheck", "eval", "--n", "4", "--formula", str(p),
            "--backend", "python", "--no-symmetry"]
    res = runner.invoke(cli, args)
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert payload["value"] is True          # even n: swap-invariant sets exist
    assert payload["backend"] == "python"


def test_fmcheck_fingerprint_matches_library(runner):
    res = runner.invoke(cli, ["--json", "fmcheck", "fingerprint",
                              "--n", "3", "--rank", "1"])
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert payload == fingerprint(3, 1, 2)
    res = runner.invoke(cli, ["fmcheck", "fingerprint", "--n", "3", "--rank", "1"])
    assert res.output.strip() == payload["hash"]


def test_fmcheck_ee_identical_is_yes(tmp_path, runner):
    p = _descriptor_file(tmp_path, "c3.json",
                         SequenceDescriptor((), ConstantTail(3)))
    res = runner.invoke(cli, ["fmcheck", "ee", "--seq-a", p, "--seq-b", p])
    assert res.exit_code == 0


def test_fmcheck_ee_arithmetic_separation(tmp_path, runner):
    pa = _descriptor_file(tmp_path, "a.json", GEO_EVEN)
    pb = _descriptor_file(tmp_path, "b.json", GEO_ODD)
    res = runner.invoke(cli, ["--json", "fmcheck", "ee",
                              "--seq-a", pa, "--seq-b", pb])
    assert res.exit_code == 1
    payload = json.loads(res.output)
    assert payload["verdict"] == "no"
    assert payload["detail"]["modulus"] == 3


def test_fmcheck_ee_unknown(tmp_path, runner):
    pa = _descriptor_file(tmp_path, "a.json",
                          SequenceDescriptor((), AffineTail(1, 1)))
    pb = _descriptor_file(tmp_path, "b.json",
                          SequenceDescriptor((), AffineTail(1, 2)))
    res = runner.invoke(cli, ["fmcheck", "ee", "--seq-a", pa, "--seq-b", pb])
    assert res.exit_code == 2


def test_fmcheck_obstruction(tmp_path, runner):
    p = _descriptor_file(tmp_path, "geo.json", GEO_EVEN)
    res = runner.invoke(cli, ["fmcheck", "obstruction", "--m", "3", "--j", "1",
                              "--seq", p])
    assert res.exit_code == 0
    res = runner.invoke(cli, ["fmcheck", "obstruction", "--m", "3", "--j", "2",
                              "--seq", p])
    assert res.exit_code == 1


def test_fmcheck_formula_round_trips(runner):
    from finquo.fmcheck import parse_formula, to_sexpr
    res = runner.invoke(cli, ["--json", "fmcheck", "formula",
                              "--m", "3", "--j", "1"])
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert payload["variant"] == "plain"
    assert to_sexpr(parse_formula(payload["formula"])) == payload["formula"]


# --- digraph ---------------------------------------------------------------

def test_digraph_represent_verdicts(tmp_path, runner):
    loop = _save(tmp_path / "loop.json", {"vertices": 1, "edges": [[0, 0]]})
    win = _save(tmp_path / "win.json", [2, 2])
    res = runner.invoke(cli, ["digraph", "represent", "--graph", loop,
                              "--window", win])
    assert res.exit_code == 0

    big = _save(tmp_path / "big.json", {"vertices": 20, "edges": []})
    five = _save(tmp_path / "five.json", [5, 5])
    res = runner.invoke(cli, ["digraph", "represent", "--graph", big,
                              "--window", five])
    assert res.exit_code == 1

    tri = _save(tmp_path / "tri.json",
                {"vertices": 3, "edges": [[0, 1], [1, 2], [2, 0]]})
    res = runner.invoke(cli, ["digraph", "represent", "--graph", tri,
                              "--window", win])
    assert res.exit_code == 2


def test_digraph_embed(tmp_path, runner):
    pa = _descriptor_file(tmp_path, "a.json", GEO_EVEN)
    pb = _descriptor_file(tmp_path, "b.json", GEO_ODD)
    res = runner.invoke(cli, ["--json", "--seed", "1", "digraph", "embed",
                              "--m", pa, "--n", pb, "--count", "4"])
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert payload["report"]["passed"] is True

    # 2*4^i does not divide 4^i, so the identity index map cannot wrap
    res = runner.invoke(cli, ["--json", "digraph", "embed",
                              "--m", pb, "--n", pa, "--count", "4"])
    assert res.exit_code == 1
    assert "error" in json.loads(res.output)


# --- coarse ----------------------------------------------------------------

def test_coarse_metric_with_csv(tmp_path, runner):
    win = _save(tmp_path / "win.json", [3, 4])
    out = tmp_path / "dist.csv"
    res = runner.invoke(cli, ["--json", "coarse", "metric", "--window", win,
                              "--out", str(out)])
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert payload["n"] == 7
    assert len(payload["components"]) == 2
    dist = jsonio.load_matrix(out)
    assert dist.shape == (7, 7)
    assert np.array_equal(dist, dist.T)
    assert np.all(np.diag(dist) == 0)


def test_coarse_equiv_verdicts(tmp_path, runner):
    pa = _descriptor_file(tmp_path, "a.json",
                          SequenceDescriptor((), GeometricTail(1, 2)))
    pb = _descriptor_file(tmp_path, "b.json",
                          SequenceDescriptor((), GeometricTail(2, 2)))
    res = runner.invoke(cli, ["coarse", "equiv", "--m", pa, "--n", pb])
    assert res.exit_code == 0

    pc = _descriptor_file(tmp_path, "c.json",
                          SequenceDescriptor((), AffineTail(1, 1)))
    res = runner.invoke(cli, ["coarse", "equiv", "--m", pa, "--n", pc])
    assert res.exit_code == 1


def test_coarse_cover(tmp_path, runner):
    win = _save(tmp_path / "win.json", [10])
    res = runner.invoke(cli, ["--json", "coarse", "cover", "--window", win,
                              "--k", "3"])
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert payload["passed"] is True
    assert payload["pieces"]


def test_coarse_bands(tmp_path, runner):
    n = 6
    t = np.zeros((n, n))
    for i in range(n):
        t[i, i] = 2.0
        t[i, (i + 1) % n] = -1.0
        t[(i + 1) % n, i] = -1.0
    mat = tmp_path / "t.csv"
    jsonio.save_matrix(mat, t)
    win = _save(tmp_path / "win.json", [6])
    res = runner.invoke(cli, ["--json", "coarse", "bands", "--matrix", str(mat),
                              "--window", win])
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert payload["propagation"] == 1
    assert payload["reconstructionError"] == 0.0


# --- scenarios -------------------------------------------------------------

def test_scenario_commands(runner):
    res = runner.invoke(cli, ["--json", "scenario", "parity"])
    assert res.exit_code == 0
    assert len(json.loads(res.output)["rows"]) == 6

    res = runner.invoke(cli, ["scenario", "biembeddable", "--intervals", "4"])
    assert res.exit_code == 0

    res = runner.invoke(cli, ["scenario", "family", "--count", "3"])
    assert res.exit_code == 0


# --- entry point wrapper ---------------------------------------------------

def test_main_reports_budget_errors(monkeypatch, capsys):
    argv = ["finquo", "--budget", "4", "fmcheck", "eval", "--n", "6",
            "--formula", "(exists x (eq x x))"]
    monkeypatch.setattr(sys, "argv", argv)
    with pytest.raises(SystemExit) as exc:
        main()
    assert exc.value.code == 2
    assert "error:" in capsys.readouterr().err
