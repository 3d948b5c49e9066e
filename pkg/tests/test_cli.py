"""CLI surface: exit codes, JSON round-trips, DOT export, report files."""

import json

import pytest

from fairdiv.cli import run
from fairdiv.core import dump_json


@pytest.fixture
def capture(capsys):
    def invoke(*argv):
        code = run(list(argv))
        out = capsys.readouterr().out
        payload = json.loads(out) if out.strip().startswith(("{", "[")) else out
        return code, payload
    return invoke


@pytest.fixture
def k4_chores_path(tmp_path):
    pairs = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]
    doc = {"vertices": 4,
           "edges": [{"id": f"e{i}", "a": a, "b": b, "wa": "-1", "wb": "-1"}
                     for i, (a, b) in enumerate(pairs)]}
    path = tmp_path / "k4.json"
    dump_json(doc, str(path))
    return str(path)


@pytest.fixture
def rr_instance_path(tmp_path):
    doc = {"agents": 3, "items": ["o1", "o2", "o3", "o4"],
           "utilities": [["1", "2", "0", "5"], ["2", "1", "0", "2"],
                         ["1", "1", "1", "0"]]}
    path = tmp_path / "inst.json"
    dump_json(doc, str(path))
    return str(path)


def test_orient_k4_chores_negative_exit(capture, k4_chores_path):
    code, payload = capture("orient", "--graph", k4_chores_path,
                            "--chores", "--criterion", "ef1")
    assert code == 1
    assert payload["exists"] is False


def test_orient_goods_pipeline(capture, tmp_path):
    doc = {"vertices": 2, "edges": [
        {"id": "h1", "a": 0, "b": 1, "wa": "5", "wb": "5"},
        {"id": "h2", "a": 0, "b": 1, "wa": "5", "wb": "5"},
        {"id": "l1", "a": 0, "b": 1, "wa": "1", "wb": "1"}]}
    path = tmp_path / "g.json"
    dump_json(doc, str(path))
    dot_path = tmp_path / "out.dot"
    code, payload = capture("orient", "--graph", str(path), "--goods",
                            "--criterion", "efx0", "--emit-dot", str(dot_path))
    assert code == 0
    assert payload["verdict"] == "oriented"
    text = dot_path.read_text()
    assert text.startswith("digraph {") and "style=dashed" in text


def test_allocate_and_check_round_trip(capture, rr_instance_path, tmp_path):
    code, payload = capture("allocate", "--algo", "rr",
                            "--instance", rr_instance_path, "--order", "0,1,2")
    assert code == 0
    assert payload["ef1"]["holds"] is True
    alloc_path = tmp_path / "alloc.json"
    dump_json(payload["allocation"], str(alloc_path))
    code, reports = capture("check", "--instance", rr_instance_path,
                            "--allocation", str(alloc_path),
                            "--criteria", "ef1,prop,po")
    assert code in (0, 1)
    assert [r["criterion"] for r in reports] == ["ef1", "prop", "po"]
    assert reports[0]["holds"] is True


def test_mms_command(capture, tmp_path):
    doc = {"agents": 3, "items": [f"o{j}" for j in range(1, 7)],
           "utilities": [["1", "2", "3", "4", "5", "6"],
                         ["1", "10", "6", "0", "0", "0"],
                         ["10", "1", "1", "1", "1", "1"]]}
    path = tmp_path / "mms.json"
    dump_json(doc, str(path))
    code, payload = capture("mms", "--instance", str(path))
    assert code == 0
    assert payload["thresholds"] == ["7", "1", "2"]
    assert payload["verdict"] == "found"
    code, payload = capture("mms", "--instance", str(path), "--thresholds-only")
    assert code == 0 and payload == {"thresholds": ["7", "1", "2"]}


def test_gadget_then_oracle_pipeline(capture, tmp_path):
    out = tmp_path / "gadget.json"
    code, payload = capture("gadget", "partition", "--set", "1",
                            "--variant", "selfloop", "-o", str(out))
    assert code == 0 and payload == {"written": str(out)}
    code, payload = capture("oracle", "--graph", str(out),
                            "--exists", "ef1-orientation")
    assert code == 1
    assert payload["exists"] is False


def test_gadget_circuit_command(capture, tmp_path):
    circuit = tmp_path / "c.txt"
    circuit.write_text("t = TRUE\nOUTPUT t\n")
    code, payload = capture("gadget", "circuit", "--file", str(circuit),
                            "--q", "2", "--alpha", "5", "--beta", "1")
    assert code == 0
    assert payload["vertices"] == 9
    assert payload["alpha"] == "5"


def test_oracle_instance_mode(capture, tmp_path):
    doc = {"agents": 2, "items": ["o1"], "utilities": [["1"], ["1"]]}
    path = tmp_path / "one.json"
    dump_json(doc, str(path))
    code, payload = capture("oracle", "--instance", str(path), "--exists", "ef")
    assert code == 1 and payload["exists"] is False
    code, payload = capture("oracle", "--instance", str(path), "--exists", "ef1")
    assert code == 0 and payload["exists"] is True


def test_oracle_budget_exit(capture, k4_chores_path):
    code, payload = capture("oracle", "--graph", k4_chores_path,
                            "--exists", "ef1-orientation", "--budget", "4")
    assert code == 3
    assert payload["exists"] == "unknown"


def test_export_dot_plain_and_oriented(capture, tmp_path):
    doc = {"vertices": 2, "edges": [{"id": "e1", "a": 0, "b": 1,
                                     "wa": "1", "wb": "1"}]}
    gpath = tmp_path / "g.json"
    dump_json(doc, str(gpath))
    code, text = capture("export-dot", "--graph", str(gpath))
    assert code == 0
    assert "graph {" in text and "0 -- 1" in text and 'label="e1"' in text
    opath = tmp_path / "pi.json"
    dump_json({"assign": {"e1": 1}}, str(opath))
    code, text = capture("export-dot", "--graph", str(gpath),
                         "--orientation", str(opath))
    assert "digraph {" in text and "0 -> 1" in text


def test_usage_errors(capture, tmp_path, k4_chores_path):
    code, _ = capture("orient", "--graph", k4_chores_path,
                      "--criterion", "ef1")
    assert code == 2  # neither --goods nor --chores
    code, _ = capture("check", "--instance", "missing.json",
                      "--allocation", "missing.json", "--criteria", "ef")
    assert code == 2


def test_report_command(capture, tmp_path):
    out_dir = tmp_path / "report"
    code, payload = capture("report", "--out", str(out_dir),
                            "--sizes", "4,8", "--trials", "1")
    assert code == 0
    assert (out_dir / "timings.csv").exists()
    assert (out_dir / "growth.png").exists()
    csv_text = (out_dir / "timings.csv").read_text()
    assert csv_text.splitlines()[0] == "edges,vertices,trial,ef1_seconds,efx0_seconds"


def test_export_dot_ntom_figure_convention(capture, tmp_path):
    # the two-vertex family: one solid heavy edge, 2q dashed light self-loops
    doc = {"vertices": 2, "edges": [
        {"id": "h", "a": 0, "b": 1, "wa": "3", "wb": "3"},
        {"id": "la0", "a": 0, "b": 0, "wa": "1", "wb": "1"},
        {"id": "la1", "a": 0, "b": 0, "wa": "1", "wb": "1"},
        {"id": "lb0", "a": 1, "b": 1, "wa": "1", "wb": "1"},
        {"id": "lb1", "a": 1, "b": 1, "wa": "1", "wb": "1"}]}
    path = tmp_path / "ntom.json"
    dump_json(doc, str(path))
    code, text = capture("export-dot", "--graph", str(path))
    assert code == 0
    lines = text.splitlines()
    assert sum(1 for line in lines if "style=dashed" in line) == 4
    assert any('label="h"' in line and "dashed" not in line for line in lines)


def test_export_dot_unknown_edge_orientation(capture, tmp_path):
    doc = {"vertices": 2, "edges": [{"id": "e1", "a": 0, "b": 1,
                                     "wa": "1", "wb": "1"}]}
    gpath = tmp_path / "g.json"
    dump_json(doc, str(gpath))
    opath = tmp_path / "bad.json"
    dump_json({"assign": {"nope": 0}}, str(opath))
    code, _ = capture("export-dot", "--graph", str(gpath),
                      "--orientation", str(opath))
    assert code == 2


def test_pretty_flag(capture, rr_instance_path):
    code, payload = capture("--pretty", "allocate", "--algo", "rr",
                            "--instance", rr_instance_path)
    assert code == 0 and payload["ef1"]["holds"] is True
