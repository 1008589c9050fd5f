"""Scenario files: JSON schema, builders, law runs and report serialization.

A scenario is a JSON object::

    {"kind": "two_bath",
     "parameters": {"gap": 1, "T_A": 1, "T_B": 2, "alpha": "max"},
     "checks": ["clausius", "cop"],
     "optimizer": {"restarts": 4, "seed": 0},
     "tol": 1e-7}

Reports are JSON; sweeps and summaries are CSV.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from . import laws
from .laws import CopUndefinedError, LawReport
from .linalg import BipartiteLayout, reduce_state
from .optimize import SearchConfig, angle_grid, block_rotation, maximize_anomalous_flow, maximize_cop
from .process import Transition, apply_unitary, box1_ledger, erasure, example1, example2, two_bath_transition
from .states import DensityMatrix, Hamiltonian, correlated_thermal_pair, gibbs, max_correlation

KINDS = ("example1", "example2", "two_bath", "erasure", "zeroth", "custom")
CHECKS = ("first", "info_second", "landauer", "landauer_classic", "clausius", "cop", "clausius_chain", "zeroth")

DEFAULT_CHECKS = {
    "example1": ["first", "info_second", "landauer"],
    "example2": ["first", "info_second", "landauer"],
    "erasure": ["first", "info_second", "landauer", "landauer_classic", "clausius_chain"],
    "two_bath": ["clausius", "cop"],
    "zeroth": ["zeroth"],
    "custom": ["first", "info_second", "landauer"],
}

_number = {"type": "number"}
_positive = {"type": "number", "exclusiveMinimum": 0}
_matrix = {
    "oneOf": [
        {"type": "array", "items": {"type": "array", "items": _number}},
        {
            "type": "object",
            "properties": {
                "re": {"type": "array", "items": {"type": "array", "items": _number}},
                "im": {"type": "array", "items": {"type": "array", "items": _number}},
            },
            "required": ["re"],
            "additionalProperties": False,
        },
    ]
}
_alpha = {"oneOf": [_number, {"const": "max"}]}
_probs = {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1}

_PARAMS = {
    "example1": {
        "properties": {"p": _probs, "T": _positive, "hamiltonian": {"enum": ["zero", "thermal"]}},
        "required": ["p", "T"],
    },
    "erasure": {
        "properties": {"T": _positive, "system_probs": _probs, "bath_energies": {"type": "array", "items": _number, "minItems": 2}},
        "required": ["T"],
    },
    "two_bath": {
        "properties": {
            "gap": _positive, "T_A": _positive, "T_B": _positive, "alpha": _alpha,
            "theta": _number, "grid_points": {"type": "integer", "minimum": 2},
            "objective": {"enum": ["dQ_A", "cop"]},
        },
        "required": ["gap", "T_A", "T_B", "alpha"],
    },
    "zeroth": {
        "properties": {
            "gap": _positive, "T": _positive, "alpha": _alpha,
            "temperatures": {"type": "array", "items": _positive, "minItems": 3, "maxItems": 3},
        },
        "required": ["gap", "T"],
    },
    "custom": {
        "properties": {
            "dims": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 2, "maxItems": 2},
            "initial": _matrix, "final": _matrix, "unitary": _matrix,
            "H_first": _matrix, "H_second": _matrix, "T": _positive, "T_first": _positive,
        },
        "required": ["dims", "initial", "H_first", "H_second", "T"],
        "oneOf": [{"required": ["final"]}, {"required": ["unitary"]}],
    },
}
_PARAMS["example2"] = _PARAMS["example1"]

SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": list(KINDS)},
        "parameters": {"type": "object"},
        "checks": {"type": "array", "items": {"enum": list(CHECKS)}},
        "optimizer": {"type": "object"},
        "tol": _positive,
        "name": {"type": "string"},
    },
    "required": ["kind", "parameters"],
    "additionalProperties": False,
    "allOf": [
        {
            "if": {"properties": {"kind": {"const": k}}},
            "then": {"properties": {"parameters": dict(v, type="object", additionalProperties=False)}},
        }
        for k, v in _PARAMS.items()
    ],
}


class ScenarioError(ValueError):
    """Malformed or unsupported scenario input."""


def _path(err) -> str:
    return "/".join(str(p) for p in err.absolute_path) or "<root>"


def validate(data: dict) -> dict:
    errors = sorted(jsonschema.Draft202012Validator(SCHEMA).iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise ScenarioError(f"field '{_path(e)}': {e.message}")
    if "optimizer" in data:
        try:
            SearchConfig.from_dict(data["optimizer"])
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"field 'optimizer': {exc}") from exc
    return data


def load(path) -> dict:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return validate(data)


def parse_matrix(m) -> np.ndarray:
    if isinstance(m, dict):
        re = np.asarray(m["re"], dtype=float)
        im = np.asarray(m.get("im", np.zeros_like(re)), dtype=float)
        if im.shape != re.shape:
            raise ScenarioError("matrix 're' and 'im' parts differ in shape")
        return re + 1j * im
    return np.asarray(m, dtype=float).astype(complex)


def qubit(gap: float) -> Hamiltonian:
    return Hamiltonian.diagonal([0.0, gap])


def resolve_alpha(p: dict) -> float:
    h = qubit(p["gap"])
    bound = max_correlation(h, h, p["T_A"], p["T_B"])
    return bound if p["alpha"] == "max" else float(p["alpha"])


def two_bath_state(p: dict) -> DensityMatrix:
    h = qubit(p["gap"])
    return correlated_thermal_pair(h, h, p["T_A"], p["T_B"], resolve_alpha(p))


def two_bath_angle(p: dict) -> float:
    """The scenario's swap angle, or the best angle on a uniform grid when absent."""
    if "theta" in p:
        return float(p["theta"])
    h = qubit(p["gap"])
    grid = angle_grid(two_bath_state(p), h, h, p["T_A"], p["T_B"], n=p.get("grid_points", 10_000))
    return float(grid.theta[grid.argmax()])


def zeroth_state(p: dict):
    """Parties ordered (A, C, B): correlated A-C pair times an independent thermal B."""
    h = qubit(p["gap"])
    temps = p.get("temperatures", [p["T"]] * 3)
    t_a, t_c, t_b = temps
    alpha = p.get("alpha", 0.0)
    rho_ac = correlated_thermal_pair(h, h, t_a, t_c, alpha)
    rho = np.kron(rho_ac.matrix, gibbs(h, t_b).matrix)
    return rho, [2, 2, 2], [h, h, h], temps


def build_transition(data: dict) -> Transition:
    kind, p = data["kind"], data["parameters"]
    if kind in ("example1", "example2"):
        builder = example1 if kind == "example1" else example2
        ham = None if p.get("hamiltonian", "zero") == "zero" else "thermal"
        return builder(p["p"], p["T"], hamiltonian=ham)
    if kind == "erasure":
        probs = p.get("system_probs", [0.5, 0.5])
        kwargs = {}
        if "bath_energies" in p:
            kwargs["bath_energies"] = p["bath_energies"]
        return erasure(p["T"], rho_s=DensityMatrix(np.diag(np.asarray(probs, dtype=float))), **kwargs)
    if kind == "two_bath":
        h = qubit(p["gap"])
        return two_bath_transition(two_bath_state(p), h, h, p["T_A"], p["T_B"], block_rotation(two_bath_angle(p)))
    if kind == "custom":
        d1, d2 = p["dims"]
        initial = DensityMatrix(parse_matrix(p["initial"]))
        final = apply_unitary(initial, parse_matrix(p["unitary"])) if "unitary" in p else parse_matrix(p["final"])
        return Transition(
            initial, final, BipartiteLayout(d1, d2), parse_matrix(p["H_first"]), parse_matrix(p["H_second"]),
            p["T"], T_first=p.get("T_first"), label="custom",
        )
    raise ScenarioError(f"kind {kind!r} has no transition")


_RUNNERS = {
    "first": laws.first_law_report,
    "info_second": laws.info_second_law_report,
    "landauer": laws.landauer_report,
    "landauer_classic": laws.classic_landauer_report,
    "clausius": laws.clausius_report,
    "cop": laws.cop_report,
    "clausius_chain": laws.clausius_chain_report,
}


@dataclass
class RunResult:
    scenario: dict
    reports: list
    extras: dict = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "all_passed": self.all_passed,
            "reports": [r.to_dict() for r in self.reports],
            "extras": self.extras,
        }


def _tol_kwargs(data: dict) -> dict:
    return {"tol": data["tol"]} if "tol" in data else {}


def run_checks(data: dict) -> RunResult:
    """Build the scenario and run each requested law."""
    validate(data)
    kind = data["kind"]
    checks = data.get("checks", DEFAULT_CHECKS[kind])
    reports: list[LawReport] = []
    extras: dict = {}
    if kind == "zeroth":
        unsupported = [c for c in checks if c != "zeroth"]
        if unsupported:
            raise ScenarioError(f"field 'checks': {unsupported} not available for kind 'zeroth'")
        rho, dims, hams, temps = zeroth_state(data["parameters"])
        t = temps if len(set(temps)) > 1 else temps[0]
        reports.append(laws.zeroth_law_report(rho, dims, hams, t))
        h = hams[0]
        ac = reduce_state(rho, dims, [0, 1])
        extras["party_order"] = ["A", "C", "B"]
        extras["free_energy_gap_AC"] = laws.correlation_free_energy_gap(ac, h, h, min(temps))
        return RunResult(data, reports, extras)
    if "zeroth" in checks:
        raise ScenarioError(f"field 'checks': 'zeroth' needs kind 'zeroth', got {kind!r}")
    t = build_transition(data)
    for name in checks:
        try:
            reports.append(_RUNNERS[name](t, **_tol_kwargs(data)))
        except CopUndefinedError as exc:
            extras.setdefault("skipped", {})[name] = str(exc)
    if kind in ("example1", "example2", "custom"):
        extras["box1"] = box1_ledger(t.initial, t.T_second, t.layout).to_dict()
    if kind == "two_bath":
        extras["theta"] = two_bath_angle(data["parameters"])
        extras["alpha"] = resolve_alpha(data["parameters"])
    return RunResult(data, reports, extras)


def run_optimizer(data: dict) -> RunResult:
    validate(data)
    if data["kind"] != "two_bath":
        raise ScenarioError(f"field 'kind': optimizer needs 'two_bath', got {data['kind']!r}")
    p = data["parameters"]
    cfg = SearchConfig.from_dict(data.get("optimizer", {}))
    if "tol" in data:
        cfg.bound_tol = data["tol"]
    h = qubit(p["gap"])
    rho = two_bath_state(p)
    search = maximize_cop if p.get("objective", "dQ_A") == "cop" else maximize_anomalous_flow
    res = search(rho, h, h, p["T_A"], p["T_B"], cfg)
    reports = [r for r in res.report.values() if r is not None]
    grid = angle_grid(rho, h, h, p["T_A"], p["T_B"], n=p.get("grid_points", 10_000))
    extras = {
        "search": res.to_dict(),
        "alpha": resolve_alpha(p),
        "grid_best_dQ_A": float(grid.dq_a.max()),
        "grid_best_theta": float(grid.theta[grid.argmax()]),
    }
    return RunResult(data, reports, extras)


SWEEP_PARAMS = ("alpha", "theta", "T_A", "T_B", "gap")
SWEEP_COLUMNS = ("param", "value", "alpha", "theta", "dQ_A", "dI", "clausius_slack", "eta", "carnot_bound", "carnot_slack")


def parse_range(text: str, data: dict, param: str) -> np.ndarray:
    """``lo:hi:n`` inclusive; ``hi`` may be ``max`` when sweeping alpha."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ScenarioError(f"range must look like lo:hi:n, got {text!r}")
    lo = float(parts[0])
    if parts[1] == "max":
        if param != "alpha":
            raise ScenarioError("'max' is only valid as the upper end of an alpha sweep")
        hi = resolve_alpha(dict(data["parameters"], alpha="max"))
    else:
        hi = float(parts[1])
    n = int(parts[2])
    if n < 1:
        raise ScenarioError("sweep needs at least one point")
    return np.linspace(lo, hi, n)


def sweep(data: dict, param: str, values) -> list[dict]:
    """One row per grid point: dQ_A, dI, Clausius slack and COP of the two-bath swap."""
    validate(data)
    if data["kind"] != "two_bath":
        raise ScenarioError(f"field 'kind': sweeps need 'two_bath', got {data['kind']!r}")
    if param not in SWEEP_PARAMS:
        raise ScenarioError(f"--param must be one of {SWEEP_PARAMS}, got {param!r}")
    rows = []
    for v in values:
        p = dict(data["parameters"], **{param: float(v)})
        h = qubit(p["gap"])
        rho = two_bath_state(p)
        theta = two_bath_angle(p)
        t = two_bath_transition(rho, h, h, p["T_A"], p["T_B"], block_rotation(theta))
        c = laws.clausius_report(t, **_tol_kwargs(data))
        bound = laws.carnot_cop(p["T_A"], p["T_B"])
        try:
            eta = laws.cop_report(t, min_delta_i=1e-12).quantities["eta"]
        except CopUndefinedError:
            eta = math.nan
        rows.append({
            "param": param,
            "value": float(v),
            "alpha": resolve_alpha(p),
            "theta": theta,
            "dQ_A": c.quantities["dQ_first"],
            "dI": c.quantities["dI"],
            "clausius_slack": c.slack,
            "eta": eta,
            "carnot_bound": bound,
            "carnot_slack": bound - eta,
        })
    return rows


def rows_to_csv(rows: list[dict], columns=SWEEP_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def summary_rows(result: RunResult) -> list[dict]:
    return [
        {"law": r.law.value, "lhs": r.lhs, "rhs": r.rhs, "slack": r.slack, "tol": r.tol, "verdict": r.verdict}
        for r in result.reports
    ]


def write_outputs(result: RunResult, out_dir, stem: str) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jp = out / f"{stem}.report.json"
    cp = out / f"{stem}.summary.csv"
    jp.write_text(dumps(result.to_dict()))
    cp.write_text(rows_to_csv(summary_rows(result), ("law", "lhs", "rhs", "slack", "tol", "verdict")))
    return jp, cp


def _default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, default=_default, allow_nan=True)


def read_reports(path) -> list[LawReport]:
    data = json.loads(Path(path).read_text())
    return [LawReport.from_dict(d) for d in data["reports"]]
