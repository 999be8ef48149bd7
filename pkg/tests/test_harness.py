import csv
import io
import json
from importlib import resources

import pytest

from fw_sliding.core import TRACE_FIELDS
from fw_sliding.harness import cli
from fw_sliding.harness.config import ConfigError, load_run_config, parse_run_config
from fw_sliding.harness.runner import fmt, run_suite

SEGMENT = {"instance": {"family": "SEGMENT", "m": 2, "n": 2}, "algorithm": "CGSLS",
           "solver": {"epsilon": 1e-6, "l0": 1.0}}


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc, indent=2))
    return path


def shipped(name):
    return json.loads(resources.files("fw_sliding.harness").joinpath("suites", name).read_text())


# --- config ---------------------------------------------------------------------

def test_negative_epsilon_names_field_and_line(tmp_path):
    doc = json.loads(json.dumps(SEGMENT))
    doc["solver"]["epsilon"] = -1.0
    path = write(tmp_path, "bad.json", doc)
    with pytest.raises(ConfigError) as info:
        load_run_config(path)
    msg = str(info.value)
    assert "solver.epsilon" in msg
    line = next(i for i, l in enumerate(path.read_text().splitlines(), 1) if '"epsilon"' in l)
    assert f"bad.json:{line}:" in msg


@pytest.mark.parametrize("mutate,field", [
    (lambda d: d["solver"].update(tolerance=1), "solver.tolerance"),
    (lambda d: d.update(extra=1), "extra"),
    (lambda d: d["instance"].update(family="BALL"), "instance.family"),
    (lambda d: d["instance"].update(m="10"), "instance.m"),
    (lambda d: d.update(algorithm="ADAM"), "algorithm"),
    (lambda d: d["solver"].update(verify_certificates=1), "solver.verify_certificates"),
    (lambda d: d["solver"].update(schedule="WEEKLY"), "solver.schedule"),
    (lambda d: d["solver"].update(schedule="FIXED_N_QUAD"), "fixed_n"),
    (lambda d: d.pop("solver"), "solver"),
])
def test_schema_errors(mutate, field):
    doc = json.loads(json.dumps(SEGMENT))
    mutate(doc)
    with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
        parse_run_config(doc, json.dumps(doc, indent=2))


def test_baseline_solver_fields():
    doc = {"instance": {"family": "SIMPLEX", "m": 5, "n": 3}, "algorithm": "CG",
           "solver": {"epsilon": 0.1, "max_iters": 10}}
    cfg = parse_run_config(doc)
    assert cfg.solver.max_iters == 10
    doc["solver"]["l0"] = 3.0  # CGS-ls only
    with pytest.raises(ConfigError, match="solver.l0"):
        parse_run_config(doc)


def test_config_round_trip():
    cfg = parse_run_config(SEGMENT)
    assert parse_run_config(cfg.to_json()) == cfg


def test_invalid_json_reports_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "algorithm": "CG",\n  oops\n}')
    with pytest.raises(ConfigError, match=r"broken\.json:3:"):
        load_run_config(path)


# --- run ------------------------------------------------------------------------

def test_run_segment_demo(tmp_path, capsys):
    doc = dict(SEGMENT, outputs={"trace_csv": str(tmp_path / "t.csv"), "summary_json": str(tmp_path / "s.json")})
    assert cli.main(["run", str(write(tmp_path, "c.json", doc))]) == 0
    summary = json.loads((tmp_path / "s.json").read_text())
    assert summary["termination"] == "CERTIFIED"
    assert summary["f_final"] <= 0.25 + 1e-6
    rows = list(csv.reader(io.StringIO((tmp_path / "t.csv").read_text())))
    assert tuple(rows[0]) == TRACE_FIELDS
    assert [int(r[0]) for r in rows[1:]] == list(range(1, len(rows)))
    last = dict(zip(rows[0], rows[-1]))
    assert int(last["cum_lmo"]) == summary["inner_lmo"] + summary["cert_check_lmo"]
    assert int(last["cum_backtracks"]) == summary["backtracks"]
    assert int(last["k"]) == summary["outer_iters"]
    assert float(last["f_y"]) == summary["f_final"]


def test_shipped_demo_config(tmp_path, capsys):
    path = resources.files("fw_sliding.harness").joinpath("suites", "segment_demo.json")
    assert cli.main(["run", str(path)]) == 0


def test_run_cap_exit_code(tmp_path):
    doc = {"instance": {"family": "SIMPLEX", "m": 20, "n": 10}, "algorithm": "CGSLS",
           "solver": {"epsilon": 1e-12, "max_outer": 5}}
    assert cli.main(["run", str(write(tmp_path, "c.json", doc))]) == 2


def test_run_bad_config_exit_code(tmp_path, capsys):
    doc = json.loads(json.dumps(SEGMENT))
    doc["solver"]["epsilon"] = -1
    assert cli.main(["run", str(write(tmp_path, "c.json", doc))]) == 1
    assert "solver.epsilon" in capsys.readouterr().err
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 1


def test_spectrahedron_summary_bound_checks(tmp_path):
    doc = {"instance": {"family": "SPECTRAHEDRON", "m": 60, "n": 6, "density": 0.5, "seed": 1},
           "algorithm": "CGSLS", "solver": {"epsilon": 1e-3},
           "outputs": {"summary_json": str(tmp_path / "s.json")}}
    assert cli.main(["run", str(write(tmp_path, "c.json", doc))]) == 0
    checks = json.loads((tmp_path / "s.json").read_text())["bound_checks"]
    for name in ("n_grad_bound", "n_lin_bound", "gamma_sandwich", "l_bound", "sumone_residual"):
        assert checks[name]["pass"], name


def test_fmt_round_trips():
    x = 0.1 + 0.2
    assert float(fmt(x)) == x
    assert fmt(None) == "" and fmt(3) == "3" and fmt(True) == "true"


# --- bench ----------------------------------------------------------------------

def _without_time(csv_text):
    rows = list(csv.reader(io.StringIO(csv_text)))
    keep = [i for i, h in enumerate(rows[0]) if not h.endswith("_time")]
    return [[r[i] for i in keep] for r in rows]


def test_smoke_suite():
    text, report, code = run_suite(shipped("smoke.json"))
    assert code == 0
    assert len(text.splitlines()) == 4
    assert all(row["invariants_pass"] for row in report["rows"])


def test_parallel_matches_serial():
    suite = shipped("smoke.json")
    serial = run_suite(suite, parallel=1)[0]
    parallel = run_suite(suite, parallel=3)[0]
    assert _without_time(serial) == _without_time(parallel)


def test_bad_row_does_not_stop_suite(tmp_path, capsys):
    suite = {"runs": [
        {"instance": {"family": "SIMPLEX", "m": 10, "n": 4}, "algorithm": "NEWTON", "solver": {"epsilon": 0.1}},
        {"instance": {"family": "SIMPLEX", "m": 10, "n": 5}, "algorithm": "CG", "solver": {"epsilon": 0.1}},
    ], "outputs": {"aggregate_csv": "agg.csv", "report_json": "report.json"}}
    assert cli.main(["bench", str(write(tmp_path, "suite.json", suite))]) == 2
    report = json.loads((tmp_path / "report.json").read_text())
    errors = {r["instance"]["n"]: r["errors"] for r in report["rows"]}
    assert errors[4] and "NEWTON" in errors[4][0]["error"]
    assert not errors[5]
    assert len((tmp_path / "agg.csv").read_text().splitlines()) == 3


def test_failed_comparison_sets_exit_code(tmp_path):
    suite = {"runs": [
        {"instance": {"family": "SIMPLEX", "m": 10, "n": 5}, "algorithm": "CG", "solver": {"epsilon": 0.1}},
        {"instance": {"family": "SIMPLEX", "m": 10, "n": 5}, "algorithm": "CGSLS", "solver": {"epsilon": 0.1}},
    ], "comparisons": [{"lhs": "CGSLS.outer_iters", "op": ">", "rhs": "CG.outer_iters"},
                       {"lhs": "CGSLS.outer_iters", "op": ">=", "rhs": "CGSLS.outer_iters"}]}
    _, report, code = run_suite(suite)
    comps = report["rows"][0]["comparisons"]
    assert comps[1]["pass"]
    assert code == (0 if comps[0]["pass"] else 2)


def test_empty_suite_is_an_error(tmp_path):
    assert cli.main(["bench", str(write(tmp_path, "s.json", {"runs": []}))]) == 1


# --- demo and oracle checks ------------------------------------------------------

def test_demo_segment_output_is_stable(capsys):
    assert cli.main(["demo-segment"]) == 0
    first = capsys.readouterr().out
    cli.main(["demo-segment"])
    assert capsys.readouterr().out == first
    assert "x_k=(1, 0)" in first.splitlines()[0]


@pytest.mark.parametrize("args", [["hamiltonian", "8", "5", "1"], ["simplex", "6", "10", "1"],
                                  ["spectrahedron", "3", "10", "1"]])
def test_lmo_check_passes(args, capsys):
    assert cli.main(["lmo-check", *args]) == 0


def test_lmo_check_out_of_range(capsys):
    assert cli.main(["lmo-check", "hamiltonian", "12", "1", "0"]) == 1
    assert "sizes" in capsys.readouterr().err


def test_lmo_check_reports_mismatch(monkeypatch, capsys):
    from fw_sliding.harness import checks
    monkeypatch.setitem(checks._TRIALS, "simplex",
                        lambda n, rng: (rng.standard_normal(n), 0.0, 1.0, False))
    assert cli.main(["lmo-check", "simplex", "2", "1", "0"]) == 1
    out = capsys.readouterr().out
    assert "MISMATCH" in out and "g=[" in out


def test_log_level_from_environment(monkeypatch, tmp_path, capsys):
    import logging
    monkeypatch.setenv("FW_SLIDING_LOG", "debug")
    root = logging.getLogger()
    saved = root.handlers[:], root.level
    root.handlers = []
    try:
        cli.main(["run", str(write(tmp_path, "c.json", SEGMENT))])
        assert "k=1" in capsys.readouterr().err
    finally:
        root.handlers, level = saved
        root.setLevel(level)
