"""Run-config parsing and validation.

A run config is a JSON document::

    {
      "instance": {"family": "SIMPLEX", "m": 100, "n": 50, "density": 1.0, "seed": 0},
      "algorithm": "CGSLS",
      "solver": {"epsilon": 1e-3, "l0": 10, "d_estimate": 1.4142135623730951},
      "outputs": {"trace_csv": "trace.csv", "summary_json": "summary.json"}
    }

``solver`` takes the SolverConfig fields for CGSLS and the BaselineConfig
fields for CG and CGS.  Unknown keys are rejected.  Errors name the field
and the line of the config where it sits.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, fields
from pathlib import Path

from ..baselines import BaselineConfig
from ..core import Schedule, SolverConfig
from ..instances import Family, InstanceSpec

ALGORITHMS = ("CG", "CGS", "CGSLS")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "<config>"):
        where = f"{source}:{line}: " if line else f"{source}: "
        super().__init__(where + message)
        self.line = line


@dataclass(frozen=True)
class RunConfig:
    instance: InstanceSpec
    algorithm: str
    solver: SolverConfig | BaselineConfig
    trace_csv: str | None = None
    summary_json: str | None = None
    eig_tol: float | None = None

    def to_json(self) -> dict:
        solver = {f.name: getattr(self.solver, f.name) for f in fields(self.solver)}
        if "schedule" in solver:
            solver["schedule"] = solver["schedule"].value
        doc = {"instance": self.instance.to_json(), "algorithm": self.algorithm, "solver": solver}
        outputs = {k: v for k, v in (("trace_csv", self.trace_csv), ("summary_json", self.summary_json)) if v}
        if outputs:
            doc["outputs"] = outputs
        return doc


class _Locator:
    """Maps dotted field paths to line numbers in the raw JSON text."""

    def __init__(self, text: str | None):
        self.text = text

    def line(self, path: str) -> int | None:
        if not self.text:
            return None
        pos = 0
        for part in path.split("."):
            if part.isdigit():
                continue
            m = re.compile(r'"%s"\s*:' % re.escape(part)).search(self.text, pos)
            if m is None:
                break
            pos = m.start()
        return self.text.count("\n", 0, pos) + 1 if pos else None


_INSTANCE_KEYS = {"family": str, "m": int, "n": int, "density": float, "seed": int}
_OUTPUT_KEYS = {"trace_csv": str, "summary_json": str}
_TOP_KEYS = {"instance", "algorithm", "solver", "outputs", "eig_tol"}


def _solver_types(cls) -> dict[str, type]:
    types = {}
    for f in fields(cls):
        ann = str(f.type)
        if "bool" in ann:
            types[f.name] = bool
        elif "Schedule" in ann:
            types[f.name] = str
        elif "int" in ann and "float" not in ann:
            types[f.name] = int
        else:
            types[f.name] = float
    return types


def _typed(value, kind, path, err):
    if value is None:
        return None
    if kind is bool:
        if not isinstance(value, bool):
            err(f"{path}: expected true/false, got {value!r}", path)
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            err(f"{path}: expected an integer, got {value!r}", path)
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            err(f"{path}: expected a number, got {value!r}", path)
        return float(value)
    if not isinstance(value, str):
        err(f"{path}: expected a string, got {value!r}", path)
    return value


def _section(doc, name, allowed: dict, err) -> dict:
    sec = doc.get(name)
    if not isinstance(sec, dict):
        err(f"{name}: expected an object", name)
    unknown = sorted(set(sec) - set(allowed))
    if unknown:
        err(f"{name}.{unknown[0]}: unknown field", f"{name}.{unknown[0]}")
    return {k: _typed(v, allowed[k], f"{name}.{k}", err) for k, v in sec.items()}


def parse_run_config(doc: dict, text: str | None = None, source: str = "<config>") -> RunConfig:
    """Validate a decoded run config; ``text`` (the raw JSON) enables line numbers."""
    loc = _Locator(text)

    def err(message, path=None):
        raise ConfigError(message, loc.line(path) if path else None, source)

    if not isinstance(doc, dict):
        err("top level must be an object")
    unknown = sorted(set(doc) - _TOP_KEYS)
    if unknown:
        err(f"{unknown[0]}: unknown field", unknown[0])
    for key in ("instance", "algorithm", "solver"):
        if key not in doc:
            err(f"{key}: missing required field")

    algorithm = doc["algorithm"]
    if algorithm not in ALGORITHMS:
        err(f"algorithm: must be one of {', '.join(ALGORITHMS)}, got {algorithm!r}", "algorithm")

    inst = _section(doc, "instance", _INSTANCE_KEYS, err)
    for key in ("family", "m", "n"):
        if key not in inst:
            err(f"instance.{key}: missing required field", "instance")
    if inst["family"] not in Family.__members__:
        err(f"instance.family: must be one of {', '.join(Family.__members__)}", "instance.family")
    for key in ("m", "n"):
        if inst[key] < 1:
            err(f"instance.{key}: must be >= 1", f"instance.{key}")
    if "density" in inst and not 0.0 < inst["density"] <= 1.0:
        err("instance.density: must lie in (0, 1]", "instance.density")
    if inst["family"] == "HAMILTONIAN" and not 3 <= inst["n"] <= 16:
        err("instance.n: Hamiltonian instances need 3 <= n <= 16", "instance.n")
    if inst["family"] == "SEGMENT" and inst["n"] != 2:
        err("instance.n: the segment instance has n = 2", "instance.n")
    spec = InstanceSpec(**inst)

    cls = SolverConfig if algorithm == "CGSLS" else BaselineConfig
    solver_kw = _section(doc, "solver", _solver_types(cls), err)
    if "epsilon" not in solver_kw:
        err("solver.epsilon: missing required field", "solver")
    for key, value in solver_kw.items():
        if isinstance(value, (int, float)) and not isinstance(value, bool) and key != "seed":
            if not (math.isfinite(value) and value > 0):
                err(f"solver.{key}: must be a finite positive number, got {value!r}", f"solver.{key}")
    if "schedule" in solver_kw and solver_kw["schedule"] not in Schedule.__members__:
        err(f"solver.schedule: must be one of {', '.join(Schedule.__members__)}", "solver.schedule")
    try:
        solver = cls(**solver_kw)
    except ValueError as exc:
        err(f"solver: {exc}", "solver")

    outputs = _section(doc, "outputs", _OUTPUT_KEYS, err) if "outputs" in doc else {}
    eig_tol = _typed(doc.get("eig_tol"), float, "eig_tol", err)
    if eig_tol is not None and not eig_tol > 0:
        err("eig_tol: must be positive", "eig_tol")
    return RunConfig(spec, algorithm, solver, outputs.get("trace_csv"), outputs.get("summary_json"), eig_tol)


def load_json(path: str | Path) -> tuple[dict, str]:
    text = Path(path).read_text()
    try:
        return json.loads(text), text
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", exc.lineno, str(path)) from None


def load_run_config(path: str | Path) -> RunConfig:
    doc, text = load_json(path)
    return parse_run_config(doc, text, str(path))
