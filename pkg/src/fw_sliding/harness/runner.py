"""Execute run configs and write traces, summaries and benchmark aggregates."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .. import baselines, cgsls
from ..core import TRACE_FIELDS, FwSlidingError, SolveResult, Termination
from ..instances import Family, InstanceSpec, estimate_lmin, generate
from ..oracles import make_lmo
from .config import ALGORITHMS, ConfigError, RunConfig, parse_run_config

log = logging.getLogger(__name__)


def fmt(value) -> str:
    """Lossless CSV cell: 17 significant digits for floats, empty for missing."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def trace_csv_text(result: SolveResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_FIELDS)
    for rec in result.trace:
        w.writerow([fmt(getattr(rec, name)) for name in TRACE_FIELDS])
    return buf.getvalue()


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, (np.floating,)):
        return _jsonable(float(value))
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def build_problem(cfg: RunConfig):
    obj, planted = generate(cfg.instance)
    kwargs = {"eig_tol": cfg.eig_tol} if cfg.eig_tol and cfg.instance.family is Family.SPECTRAHEDRON else {}
    n = cfg.instance.n
    lmo = make_lmo(cfg.instance.family.value, n, **kwargs)
    return obj, lmo, planted


def execute(cfg: RunConfig) -> tuple[SolveResult, dict]:
    """Run one config; returns the result and its summary report."""
    obj, lmo, _ = build_problem(cfg)
    l_min = estimate_lmin(obj) if cfg.algorithm != "CG" else None
    if cfg.algorithm == "CGSLS":
        result = cgsls.run(obj, lmo, cfg.solver)
    elif cfg.algorithm == "CGS":
        obj.lipschitz_hint = obj.lipschitz_hint or l_min
        result = baselines.cgs_run(obj, lmo, cfg.solver)
    else:
        result = baselines.cg_run(obj, lmo, cfg.solver)

    summary = {
        "instance": cfg.instance.to_json(),
        "algorithm": cfg.algorithm,
        "termination": result.termination.value,
        "outer_iters": result.outer_iters,
        "grad_evals": result.grad_evals,
        "inner_lmo": result.inner_lmo,
        "cert_check_lmo": result.cert_check_lmo,
        "backtracks": result.total_backtracks,
        "f_final": result.f_final,
        "f_optimal": cfg.instance.optimal_value,
        "cert_gap": result.cert_gap_final,
        "wolfe_gap": result.wolfe_gap_final,
        "elapsed_seconds": result.elapsed_seconds,
        "bound_checks": {},
    }
    if cfg.algorithm == "CGSLS":
        s = cfg.solver
        summary["l_min"] = l_min
        summary["bound_checks"] = cgsls.check_invariants(
            result, s.l0, l_min, s.d_estimate, lmo.diameter_exact, s.epsilon)
    return result, _jsonable(summary)


def write_outputs(cfg: RunConfig, result: SolveResult, summary: dict) -> None:
    if cfg.trace_csv:
        Path(cfg.trace_csv).parent.mkdir(parents=True, exist_ok=True)
        Path(cfg.trace_csv).write_text(trace_csv_text(result))
    if cfg.summary_json:
        Path(cfg.summary_json).parent.mkdir(parents=True, exist_ok=True)
        Path(cfg.summary_json).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


def exit_code(result: SolveResult) -> int:
    return 0 if result.termination is Termination.CERTIFIED else 2


# --- benchmark suites ------------------------------------------------------------

AGG_COLUMNS = ("family", "m", "n", "density", "seed")
ALG_COLUMNS = ("outer", "inner", "time", "obj", "termination")


def _bench_one(doc: dict) -> dict:
    """Worker: run one suite entry; never raises."""
    try:
        cfg = parse_run_config(doc, None, "suite")
        result, summary = execute(cfg)
        write_outputs(cfg, result, summary)
        return {"ok": True, "summary": summary}
    except (ConfigError, FwSlidingError, ValueError, TypeError) as exc:
        inst = doc.get("instance") if isinstance(doc, dict) else None
        return {"ok": False, "error": str(exc), "algorithm": doc.get("algorithm") if isinstance(doc, dict) else None,
                "instance": inst}


def _metric(summary: dict, name: str):
    if name == "inner_lmo" and summary["algorithm"] == "CG":
        return summary["outer_iters"]
    return summary[name]


_OPS = {"<": lambda a, b: a < b, "<=": lambda a, b: a <= b, ">": lambda a, b: a > b,
        ">=": lambda a, b: a >= b}


def run_suite(suite: dict, parallel: int = 1) -> tuple[str, dict, int]:
    """Run every entry of ``suite``; returns (aggregate CSV text, report, exit code).

    ``suite`` is ``{"runs": [...], "comparisons": [{"lhs": "CGSLS.inner_lmo",
    "op": "<", "rhs": "CG.outer_iters"}, ...]}``.
    """
    runs = suite.get("runs")
    if not isinstance(runs, list) or not runs:
        raise ConfigError("runs: expected a non-empty list")
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            outcomes = list(pool.map(_bench_one, runs))
    else:
        outcomes = [_bench_one(doc) for doc in runs]

    rows: dict[tuple, dict] = {}
    for doc, out in zip(runs, outcomes):
        inst = out["summary"]["instance"] if out["ok"] else out.get("instance") or {}
        try:
            key_inst = InstanceSpec(**inst).to_json()
        except (TypeError, ValueError):
            key_inst = {k: inst.get(k) for k in AGG_COLUMNS} if isinstance(inst, dict) else {}
        key = tuple(key_inst.get(c) for c in AGG_COLUMNS)
        row = rows.setdefault(key, {"instance": key_inst, "runs": {}, "errors": []})
        if out["ok"]:
            row["runs"][out["summary"]["algorithm"]] = out["summary"]
        else:
            row["errors"].append({"algorithm": out.get("algorithm"), "error": out["error"]})

    failed = False
    report_rows = []
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(AGG_COLUMNS) + [f"{a}_{c}" for a in ALGORITHMS for c in ALG_COLUMNS]
               + ["invariants", "comparisons", "errors"])
    for key, row in rows.items():
        cells = [fmt(v) if not isinstance(v, str) else v for v in key]
        for alg in ALGORITHMS:
            s = row["runs"].get(alg)
            if s is None:
                cells += [""] * len(ALG_COLUMNS)
            else:
                cells += [fmt(s["outer_iters"]), fmt(_metric(s, "inner_lmo")), fmt(s["elapsed_seconds"]),
                          fmt(s["f_final"]), s["termination"]]
        inv_ok = all(c["pass"] for s in row["runs"].values() for c in s["bound_checks"].values())
        comps = []
        for comp in suite.get("comparisons", []):
            la, lm = comp["lhs"].split(".")
            ra, rm = comp["rhs"].split(".")
            if la in row["runs"] and ra in row["runs"]:
                lv, rv = _metric(row["runs"][la], lm), _metric(row["runs"][ra], rm)
                comps.append({**comp, "lhs_value": lv, "rhs_value": rv, "pass": _OPS[comp["op"]](lv, rv)})
        comp_ok = all(c["pass"] for c in comps)
        failed |= bool(row["errors"]) or not inv_ok or not comp_ok
        cells += ["pass" if inv_ok else "fail", "pass" if comp_ok else "fail", str(len(row["errors"]))]
        w.writerow(cells)
        report_rows.append({"instance": row["instance"], "invariants_pass": inv_ok,
                            "comparisons": comps, "errors": row["errors"],
                            "runs": row["runs"]})
    report = _jsonable({"rows": report_rows, "all_pass": not failed})
    return buf.getvalue(), report, 2 if failed else 0
