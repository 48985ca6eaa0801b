import json
from importlib import resources
from pathlib import Path

import pytest

from limulrich import cli

SCENARIOS = resources.files("limulrich") / "scenarios"
EXPECTED_EXIT = {"residue_infinite_resolution.json": cli.EXIT_CAP}


def shipped():
    return sorted(p.name for p in SCENARIOS.iterdir() if p.name.endswith(".json"))


def test_list_suites():
    names = [n for n, _ in cli.list_suites()]
    assert "sci" in names and "p1c-limits" in names and len(names) >= 7


def test_every_suite_has_a_passing_scenario():
    covered = set()
    for name in shipped():
        if name in EXPECTED_EXIT:
            continue
        data = json.loads((SCENARIOS / name).read_text())
        covered |= {s["suite"] for s in data["suites"]}
    assert covered == set(cli.SUITES)


@pytest.mark.parametrize("name", [n for n in shipped() if n != "segre_lim_ulrich.json"])
def test_shipped_scenarios(name, tmp_path, capsys):
    code = cli.run(SCENARIOS / name, tmp_path)
    assert code == EXPECTED_EXIT.get(name, cli.EXIT_OK)
    assert (tmp_path / "summary.txt").exists()


def test_segre_scenario_and_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.run(SCENARIOS / "segre_lim_ulrich.json", a) == 0
    assert cli.run(SCENARIOS / "segre_lim_ulrich.json", b) == 0
    rows = (a / "lim-ulrich-segre.csv").read_text().splitlines()
    assert len(rows) == 6  # header plus n = 0..4
    for f in a.iterdir():
        assert f.read_bytes() == (b / f.name).read_bytes()


def test_main_entry(tmp_path, capsys):
    assert cli.main(["suites"]) == 0
    assert "lim-ulrich-segre" in capsys.readouterr().out
    out = tmp_path / "o"
    assert cli.main(["run", str(SCENARIOS / "lech.json"), "--out", str(out), "--threads", "2"]) == 0
    header = (out / "lech.csv").read_text().splitlines()[0]
    assert header == "ideal,m,colength,multiplicity,bound,bound_decimal,verdict"


def _write(tmp_path, text):
    p = tmp_path / "s.json"
    p.write_text(text)
    return p


def test_malformed_json_reports_position(tmp_path, capsys):
    p = _write(tmp_path, '{\n  "schema": 1,\n  "field": {"p": 2}\n  "suites": []\n}\n')
    assert cli.run(p, tmp_path / "o") == cli.EXIT_INPUT
    assert ":4:3:" in capsys.readouterr().err


@pytest.mark.parametrize("doc", [
    {"schema": 1, "field": {"p": 2}, "suites": [{"suite": "lech", "m_max": 2, "ideals": [[[1, 0], [0, 1]]],
                                                 "typo": 1}]},
    {"schema": 2, "field": {"p": 2}, "suites": [{"suite": "lech", "m_max": 1, "ideals": [[[1, 0], [0, 1]]]}]},
    {"schema": 1, "field": {"p": 2}, "suites": [{"suite": "walker", "complexes": ["missing"]}]},
    {"schema": 1, "field": {"p": 4}, "suites": [{"suite": "lech", "m_max": 1, "ideals": [[[1, 0], [0, 1]]]}]},
    {"schema": 1, "field": {"p": 2}, "rings": {"R": {"kind": "segre", "c": 0}},
     "suites": [{"suite": "lech", "m_max": 1, "ideals": [[[1, 0], [0, 1]]]}]},
])
def test_invalid_scenarios(doc, tmp_path):
    assert cli.run(_write(tmp_path, json.dumps(doc)), tmp_path / "o") == cli.EXIT_INPUT


def test_not_primary_ideal_is_input_error(tmp_path):
    doc = {"schema": 1, "field": {"p": 2}, "suites": [{"suite": "lech", "m_max": 1, "ideals": [[[1, 1]]]}]}
    assert cli.run(_write(tmp_path, json.dumps(doc)), tmp_path / "o") == cli.EXIT_INPUT


def test_degree_cap_override(tmp_path):
    doc = {"schema": 1, "field": {"p": 2}, "rings": {"S": {"kind": "poly", "nvars": 2}},
           "complexes": {"K": {"kind": "koszul", "ring": "S", "elements": ["x", "y"]}},
           "suites": [{"suite": "dutta", "complexes": ["K"], "n_max": 3}]}
    p = _write(tmp_path, json.dumps(doc))
    assert cli.run(p, tmp_path / "a") == 0
    assert cli.run(p, tmp_path / "b", degree_cap=6) == cli.EXIT_CAP


def test_failing_guaranteed_verdict_exits_2(tmp_path, monkeypatch):
    doc = {"schema": 1, "field": {"p": 2}, "suites": [{"suite": "lech", "m_max": 1, "ideals": [[[1, 0], [0, 1]]]}]}
    monkeypatch.setattr(cli.mult.LechReport, "passed", property(lambda self: False))
    assert cli.run(_write(tmp_path, json.dumps(doc)), tmp_path / "o") == cli.EXIT_VERDICT


def test_rational_formatting():
    from fractions import Fraction
    assert cli.rational(Fraction(6, 4)) == "3/2"
    assert cli.rational(2) == "2/1"
    assert cli.decimal6(Fraction(1, 3)) == "0.333333"
    assert cli.decimal6(Fraction(-7, 512)) == "-0.013672"
