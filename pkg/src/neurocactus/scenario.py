"""Declarative experiments: graph + parameters + inputs + expectations."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .control import boundedness_condition, lqr_regulate, rank_report, solve_care, state_matrix
from .dynamics import (
    Constant,
    Impulse,
    InputSignal,
    NetworkParams,
    Sinusoid,
    Trajectory,
    Zero,
    equilibrium,
    input_bound,
    monitor_report,
    simulate,
    write_trajectory_csv,
    write_weights_csv,
    x_max_bound,
)
from .errors import ConditionViolated, DanglingReference, SchemaError, TargetResidualWarning
from .graph import SignedGraph, WeightBounds, dumps_canonical, graph_from_dict

SCHEMA_VERSION = 1

_number = {"type": "number"}
_node_map = {
    "type": "object",
    "patternProperties": {"^[0-9]+$": _number},
    "additionalProperties": False,
}

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["schema", "graph", "t_end"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "seed": {"type": "integer"},
        "graph": {"oneOf": [{"type": "string"}, {"type": "object"}]},
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "c_n": {"type": "number", "exclusiveMinimum": 0},
                "c_a_plus": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "c_a_minus": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "tau": {"type": "number", "exclusiveMinimum": 0},
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "phi": {"enum": ["tanh", "logistic", "algebraic"]},
                "bounds": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["a_minus_lo", "a_minus_hi", "a_plus_lo", "a_plus_hi"],
                    "properties": {
                        k: _number for k in ("a_minus_lo", "a_minus_hi", "a_plus_lo", "a_plus_hi")
                    },
                },
            },
        },
        "inputs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["node", "type"],
                "additionalProperties": False,
                "properties": {
                    "node": {"type": "integer", "minimum": 1},
                    "type": {"enum": ["zero", "constant", "impulse", "sinusoid"]},
                    "value": _number,
                    "amplitude": _number,
                    "hold": {"type": "number", "exclusiveMinimum": 0},
                    "angular_frequency": _number,
                    "phase": _number,
                },
            },
        },
        "x0": {"oneOf": [_number, {"type": "array", "items": _number}]},
        "t_end": {"type": "number", "exclusiveMinimum": 0},
        "lqr": {
            "type": "object",
            "required": ["target"],
            "additionalProperties": False,
            "properties": {
                "target": {"oneOf": [{"type": "array", "items": _number}, _node_map]},
                "q": {"oneOf": [_number, {"type": "array"}]},
                "r": {"oneOf": [_number, {"type": "array"}]},
                "recompute_each_slot": {"type": "boolean"},
            },
        },
        "expectations": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["check"],
                "additionalProperties": False,
                "properties": {
                    "check": {
                        "enum": ["bound", "convergence", "rank", "target", "boundedness_condition"]
                    },
                    "state_tol": {"type": "number", "exclusiveMinimum": 0},
                    "weight_tol": {"type": "number", "exclusiveMinimum": 0},
                    "max_gap": {"type": "number", "exclusiveMinimum": 0},
                    "stated_x_max": _number,
                },
            },
        },
    },
}


@dataclass
class Scenario:
    name: str
    graph: SignedGraph
    params: NetworkParams
    inputs: InputSignal
    x0: np.ndarray
    t_end: float
    expectations: list[dict] = field(default_factory=list)
    target: np.ndarray | None = None
    lqr_options: dict = field(default_factory=dict)
    source: Path | None = None


@dataclass
class CheckResult:
    check: str
    passed: bool
    measured: dict

    def to_dict(self) -> dict:
        return {"check": self.check, "passed": self.passed, **self.measured}


@dataclass
class ScenarioResult:
    scenario: Scenario
    trajectory: Trajectory
    checks: list[CheckResult]
    report: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def shipped_path(name: str) -> Path:
    """Path of a data file bundled with the package (``scenarios/impulse14.json`` etc.)."""
    return Path(str(resources.files("neurocactus") / "data" / name))


def resolve_scenario_path(path) -> Path:
    p = Path(path)
    if p.exists():
        return p
    bundled = shipped_path("scenarios") / p.name
    if bundled.exists():
        return bundled
    raise FileNotFoundError(f"scenario file {path} not found")


def _pointer(err: jsonschema.ValidationError) -> str:
    return "/" + "/".join(str(part) for part in err.absolute_path)


def _parse_channel(spec: dict):
    kind = spec["type"]
    if kind == "zero":
        return Zero()
    if kind == "constant":
        return Constant(float(spec.get("value", 0.0)))
    if kind == "impulse":
        return Impulse(float(spec.get("amplitude", 1.0)), spec.get("hold"))
    return Sinusoid(
        float(spec.get("amplitude", 1.0)),
        float(spec.get("angular_frequency", 1.0)),
        float(spec.get("phase", 0.0)),
    )


def parse_target(raw, n: int) -> np.ndarray:
    """Target vector from a length-n list or a sparse ``{"node": value}`` map."""
    if isinstance(raw, dict):
        target = np.zeros(n)
        for key, val in raw.items():
            node = int(key)
            if not 1 <= node <= n:
                raise DanglingReference(f"target references node {node} outside 1..{n}")
            target[node - 1] = float(val)
        return target
    target = np.asarray(raw, dtype=float)
    if target.shape != (n,):
        raise DanglingReference(f"target has {target.size} entries for {n} nodes")
    return target


def scenario_from_dict(data, base: Path | None = None, source: Path | None = None) -> Scenario:
    if not isinstance(data, dict):
        raise SchemaError("scenario must be a JSON object")
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        raise SchemaError(errors[0].message, _pointer(errors[0]))

    graph_ref = data["graph"]
    if isinstance(graph_ref, str):
        gpath = Path(graph_ref)
        if not gpath.is_absolute() and base is not None:
            gpath = base / gpath
        if not gpath.exists():
            raise DanglingReference(f"graph file {graph_ref} not found")
        with open(gpath) as fh:
            graph_data = json.load(fh)
    else:
        graph_data = graph_ref

    raw = dict(data.get("params", {}))
    bounds = WeightBounds(**raw.pop("bounds")) if "bounds" in raw else WeightBounds()
    try:
        params = NetworkParams(bounds=bounds, **raw)
        g = graph_from_dict(graph_data, bounds)
    except (ValueError, KeyError, TypeError) as exc:
        raise SchemaError(str(exc), "/params" if not isinstance(exc, KeyError) else "/graph") from exc

    by_node = {}
    for k, spec in enumerate(data.get("inputs", [])):
        node = spec["node"]
        if node not in g.control_nodes:
            raise DanglingReference(f"/inputs/{k}: node {node} is not a control node")
        by_node[node] = _parse_channel(spec)
    inputs = InputSignal(tuple(by_node.get(k, Zero()) for k in g.control_nodes))

    x0 = data.get("x0", 0.0)
    x0 = np.full(g.n, float(x0)) if not isinstance(x0, list) else np.asarray(x0, dtype=float)
    if x0.shape != (g.n,):
        raise DanglingReference(f"x0 has {x0.size} entries for {g.n} nodes")

    t_end = float(data["t_end"])
    slots = round(t_end / params.tau)
    if abs(slots * params.tau - t_end) > 1e-9 * t_end:
        raise SchemaError(f"t_end={t_end} is not a multiple of tau={params.tau}", "/t_end")

    target = None
    lqr_options = {}
    if "lqr" in data:
        lqr = data["lqr"]
        target = parse_target(lqr["target"], g.n)
        lqr_options = {k: v for k, v in lqr.items() if k != "target"}

    expectations = list(data.get("expectations", []))
    for k, exp in enumerate(expectations):
        if exp["check"] == "target" and target is None:
            raise DanglingReference(f"/expectations/{k}: target check without an lqr block")

    return Scenario(
        name=data.get("name", source.stem if source else "scenario"),
        graph=g,
        params=params,
        inputs=inputs,
        x0=x0,
        t_end=t_end,
        expectations=expectations,
        target=target,
        lqr_options=lqr_options,
        source=source,
    )


def load_scenario(path) -> Scenario:
    path = resolve_scenario_path(path)
    text = Path(path).read_text()
    if not text.strip():
        raise SchemaError("empty scenario file")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return scenario_from_dict(data, base=Path(path).parent, source=Path(path))


def _lqr_signal(s: Scenario, target, recompute: bool):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TargetResidualWarning)
        return lqr_regulate(
            s.graph, s.params, target, recompute_each_slot=recompute,
            q=s.lqr_options.get("q"), r=s.lqr_options.get("r"),
        )


def run_scenario(s: Scenario, target=None, recompute_each_slot: bool | None = None) -> ScenarioResult:
    """Simulate ``s`` and evaluate each declared expectation.

    ``target`` and ``recompute_each_slot`` override the scenario's LQR block.
    """
    g, p = s.graph, s.params
    target = s.target if target is None else np.asarray(target, dtype=float)
    recompute = s.lqr_options.get("recompute_each_slot", True) if recompute_each_slot is None else recompute_each_slot
    lqr_info = None
    signal = s.inputs
    if target is not None:
        signal = _lqr_signal(s, target, recompute)
        signal = InputSignal(s.inputs.channels, signal.feedback)
        sol = solve_care(state_matrix(g.weight_matrix(), p.c_n), g.input_matrix(),
                         np.eye(g.n) if s.lqr_options.get("q") is None else s.lqr_options["q"],
                         np.eye(len(g.control_nodes)) if s.lqr_options.get("r") is None else s.lqr_options["r"])
        lqr_info = sol.to_dict()
        lqr_info["feedforward"] = signal.feedback.feedforward.tolist()
        lqr_info["target_residual"] = signal.feedback.target_residual
        lqr_info["recompute_each_slot"] = recompute

    traj = simulate(g, p, signal, s.x0, s.t_end)
    report = monitor_report(traj, g, p)
    report["scenario"] = s.name
    if lqr_info is not None:
        report["lqr"] = lqr_info

    checks = [_evaluate(exp, s, traj, report, target) for exp in s.expectations]
    report["checks"] = [c.to_dict() for c in checks]
    report["passed"] = all(c.passed for c in checks)
    return ScenarioResult(s, traj, checks, report)


def _evaluate(exp: dict, s: Scenario, traj: Trajectory, report: dict, target) -> CheckResult:
    g, p = s.graph, s.params
    kind = exp["check"]
    if kind == "boundedness_condition":
        ok, slack = boundedness_condition(g, p)
        return CheckResult(kind, ok, {"slack": slack})
    if kind == "bound":
        measured = {"max_abs_state": float(np.abs(traj.x).max())}
        if "stated_x_max" in exp:
            measured["stated_x_max"] = exp["stated_x_max"]
        try:
            x_max = x_max_bound(g, p, input_bound(g, s.inputs))
        except ConditionViolated as exc:
            measured["error"] = str(exc)
            return CheckResult(kind, False, measured)
        measured["x_max"] = x_max
        in_box = not np.any(traj.flags)
        start_inside = bool(np.all(np.abs(s.x0) <= x_max))
        measured["x0_inside"] = start_inside
        return CheckResult(kind, in_box and start_inside, measured)
    if kind == "convergence":
        state_tol = exp.get("state_tol", 1e-3)
        weight_tol = exp.get("weight_tol", 1e-2)
        _, A_eq = equilibrium(g, p.bounds)
        gap_x = float(np.abs(traj.x[-1]).max())
        gap_a = float(np.abs(traj.weight_matrix(g) - A_eq).max(initial=0.0))
        return CheckResult(
            kind,
            gap_x < state_tol and gap_a < weight_tol,
            {"final_state_norm": gap_x, "final_weight_gap": gap_a,
             "state_tol": state_tol, "weight_tol": weight_tol},
        )
    if kind == "rank":
        B = g.input_matrix()
        ranks = [rank_report(traj.weight_matrix(g, k), B, p.c_n).rank for k in range(len(traj.weights))]
        return CheckResult(
            kind,
            min(ranks) == g.n,
            {"min_rank": min(ranks), "n": g.n, "snapshots": len(ranks)},
        )
    # target
    gap = float(np.abs(traj.x[-1] - target).max())
    measured = {
        "steady_state_gap": gap,
        "target_residual": report.get("lqr", {}).get("target_residual"),
    }
    passed = True
    if "max_gap" in exp:
        measured["max_gap"] = exp["max_gap"]
        passed = gap <= exp["max_gap"]
    return CheckResult(kind, passed, measured)


def write_outputs(result: ScenarioResult, out_dir, plot: bool = False) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "trajectory.csv", out / "weights.csv", out / "report.json"]
    write_trajectory_csv(result.trajectory, written[0])
    write_weights_csv(result.trajectory, written[1])
    written[2].write_text(dumps_canonical(result.report))
    if plot:
        written += plot_outputs(result, out)
    return written


def plot_outputs(result: ScenarioResult, out: Path) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    traj, p = result.trajectory, result.scenario.params
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(traj.times, traj.x, lw=0.8)
    if traj.x_max is not None:
        for level in (traj.x_max, -traj.x_max):
            ax.axhline(level, color="r", ls=":", lw=1)
    ax.set_xlabel("t")
    ax.set_ylabel("x")
    fig.tight_layout()
    fig.savefig(out / "state.svg")
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(traj.snapshot_times, traj.weights, lw=0.8)
    for level in (p.bounds.a_minus_lo, p.bounds.a_plus_hi):
        ax.axhline(level, color="r", ls=":", lw=1)
    ax.set_xlabel("t")
    ax.set_ylabel("weight")
    fig.tight_layout()
    fig.savefig(out / "weights.svg")
    plt.close(fig)
    return [out / "state.svg", out / "weights.svg"]
