"""Batch pipelines: simulate -> estimate -> qlra, plus standalone bell stages.

Each stage reads its predecessor's files from the output directory and
writes its own. A ``manifest.json`` records seeds, versions, outputs and
residuals of every stage.
"""

from __future__ import annotations

import math
import os
import platform
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .bell import BellTriple, check_inequality, verify_on_random_spaces, violation_scan
from .errors import BornRuleViolation, PreconditionError, SchemaError, StageFailure, VaxjoError
from .flybox.config import scenario_from_dict, validate
from .flybox.experiments import EXPERIMENTS, run_scenario
from .frequency import OutcomeSequence, detect_stabilization, read_sequence_csv, write_sequence_csv
from .kolmogorov import ContextualData, check_conditions
from .qlra import (
    build_amplitude,
    build_operators,
    interference_coefficients,
    verify_interference_formula,
)
from .serialization import csv_text, read_json, write_json

BORN_TOLERANCE = 1e-12
STAGES = ("simulate", "estimate", "qlra", "bell")
SEED_ENV = "QLRA_SEED"

SEQUENCE_FILES = {
    "first": "first.csv",
    "second": "second.csv",
    "second|first=+1": "second_given_first_plus.csv",
    "second|first=-1": "second_given_first_minus.csv",
    "first|second=+1": "first_given_second_plus.csv",
    "first|second=-1": "first_given_second_minus.csv",
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "output_dir": {"type": "string"},
        "stages": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {"stage": {"enum": list(STAGES)}},
                "required": ["stage"],
            },
        },
    },
    "required": ["output_dir", "stages"],
    "additionalProperties": False,
}

_STAGE_SCHEMAS = {
    "simulate": {
        "type": "object",
        "properties": {
            "stage": {"const": "simulate"},
            "scenario": {"type": "object"},
            "scenario_file": {"type": "string"},
        },
        "oneOf": [{"required": ["scenario"]}, {"required": ["scenario_file"]}],
        "additionalProperties": False,
    },
    "estimate": {
        "type": "object",
        "properties": {
            "stage": {"const": "estimate"},
            "window": {"type": "integer", "minimum": 1},
            "tol": {"type": "number", "exclusiveMinimum": 0},
            "symmetrize": {"type": "boolean"},
            "r1_tolerance": {"type": "number", "exclusiveMinimum": 0},
            "sequences_dir": {"type": "string"},
        },
        "additionalProperties": False,
    },
    "qlra": {
        "type": "object",
        "properties": {
            "stage": {"const": "qlra"},
            "input": {"type": "string"},
            "tolerance": {"type": "number", "exclusiveMinimum": 0},
            "mirror_phase": {"type": "boolean"},
            "a_eigenvalues": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            "b_eigenvalues": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        },
        "additionalProperties": False,
    },
    "bell": {
        "type": "object",
        "properties": {
            "stage": {"const": "bell"},
            "action": {"enum": ["check", "verify", "scan"]},
            "input": {"type": "string"},
            "trials": {"type": "integer", "minimum": 1},
            "grid": {"type": "integer", "minimum": 2},
            "tol": {"type": "number", "exclusiveMinimum": 0},
        },
        "required": ["action"],
        "additionalProperties": False,
    },
}


@dataclass
class PipelineConfig:
    stages: list
    output_dir: Path
    seed: int = 0
    seed_source: str = "default"
    base_dir: Path = field(default_factory=Path.cwd)

    @classmethod
    def from_dict(cls, doc: dict, base_dir=None) -> PipelineConfig:
        validate(doc, CONFIG_SCHEMA, "pipeline config")
        for i, stage in enumerate(doc["stages"]):
            validate(stage, _STAGE_SCHEMAS[stage["stage"]], f"stage {i}")
        base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
        seed, source = doc.get("seed", 0), "config" if "seed" in doc else "default"
        env = os.environ.get(SEED_ENV)
        if env is not None:
            try:
                seed, source = int(env), "env"
            except ValueError:
                raise SchemaError(f"{SEED_ENV} must be an integer, got {env!r}") from None
        out = Path(doc["output_dir"])
        config = cls(
            stages=list(doc["stages"]),
            output_dir=out if out.is_absolute() else base_dir / out,
            seed=seed,
            seed_source=source,
            base_dir=base_dir,
        )
        config.check_order()
        return config

    def check_order(self) -> None:
        names = [s["stage"] for s in self.stages]

        def first(name):
            return names.index(name) if name in names else None

        sim, est = first("simulate"), first("estimate")
        for i, stage in enumerate(self.stages):
            if stage["stage"] == "estimate" and "sequences_dir" not in stage and (sim is None or sim > i):
                raise SchemaError("estimate needs a preceding simulate stage or 'sequences_dir'")
            if stage["stage"] == "qlra" and "input" not in stage and (est is None or est > i):
                raise SchemaError("qlra needs a preceding estimate stage or 'input'")
            if stage["stage"] == "simulate" and est is not None and est < i:
                raise SchemaError("simulate must come before estimate")

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p


def _stage_simulate(cfg: PipelineConfig, params: dict) -> dict:
    doc = params["scenario"] if "scenario" in params else read_json(cfg.resolve(params["scenario_file"]))
    seed = cfg.seed if cfg.seed_source != "default" else None
    scenario = scenario_from_dict(doc, seed=seed)
    result = run_scenario(scenario)
    seq_dir = cfg.output_dir / "sequences"
    seq_dir.mkdir(parents=True, exist_ok=True)
    names = {"first": scenario.first.name, "second": scenario.second.name}
    outputs = []
    for experiment, filename in SEQUENCE_FILES.items():
        target = experiment.split("|")[0]
        seq = OutcomeSequence(names[target], result.outcomes[experiment], values=(1, -1))
        write_sequence_csv(seq_dir / filename, seq)
        outputs.append(f"sequences/{filename}")
    write_json(cfg.output_dir / "simulation.json", {"scenario": scenario.to_dict(), **result.to_dict()})
    outputs.append("simulation.json")
    return {"outputs": outputs, "seed": scenario.seed, "scenario": scenario.digest()}


def _counts(seq: OutcomeSequence) -> tuple:
    plus = int(np.count_nonzero(seq.outcomes == 1))
    return plus, len(seq) - plus


def symmetrized_estimate(p_a, p_b, counts: dict) -> ContextualData:
    """Pool the four transition experiments into one symmetric doubly
    stochastic matrix [[q, 1-q], [1-q, q]]; q is the overall fraction of
    same-sign outcomes."""
    same = (
        counts["second|first=+1"][0]
        + counts["second|first=-1"][1]
        + counts["first|second=+1"][0]
        + counts["first|second=-1"][1]
    )
    total = sum(sum(counts[k]) for k in EXPERIMENTS[2:])
    q = same / total
    t = [[q, 1.0 - q], [1.0 - q, q]]
    return ContextualData((1, -1), (1, -1), p_a, p_b, t, t)


def _stage_estimate(cfg: PipelineConfig, params: dict) -> dict:
    seq_dir = cfg.resolve(params["sequences_dir"]) if "sequences_dir" in params else cfg.output_dir / "sequences"
    reports, counts = {}, {}
    for experiment, filename in SEQUENCE_FILES.items():
        seq = read_sequence_csv(seq_dir / filename)
        seq = OutcomeSequence(seq.observable_name, seq.outcomes, values=(1, -1))
        window = params.get("window")
        if window is not None and len(seq) < 2 * window:
            window = None
        reports[experiment] = detect_stabilization(seq, window, params.get("tol", 1e-2))
        counts[experiment] = _counts(seq)

    def freq(name):
        plus, minus = counts[name]
        if plus + minus == 0:
            raise PreconditionError(f"no outcomes recorded for {name!r}")
        return [plus / (plus + minus), minus / (plus + minus)]

    raw = ContextualData(
        (1, -1),
        (1, -1),
        freq("first"),
        freq("second"),
        [freq("second|first=+1"), freq("second|first=-1")],
        [freq("first|second=+1"), freq("first|second=-1")],
    )
    n_min = min(sum(counts[k]) for k in EXPERIMENTS[2:])
    r1_tol = params.get("r1_tolerance", 6.0 * math.sqrt(0.5 / n_min))
    raw_report = check_conditions(raw, r1_tol)
    symmetrize = params.get("symmetrize", True)
    if symmetrize:
        if not (raw_report.r1 and raw_report.doubly_stochastic):
            raise PreconditionError(
                f"estimated transitions break symmetric conditioning beyond sampling noise "
                f"(R1 residual {raw_report.r1_residual:.3g} > {r1_tol:.3g})"
            )
        data = symmetrized_estimate(raw.p_a, raw.p_b, counts)
    else:
        data = raw
    write_json(cfg.output_dir / "data.json", data)
    write_json(
        cfg.output_dir / "estimate.json",
        {
            "raw_data": raw,
            "raw_conditions": raw_report,
            "r1_tolerance": r1_tol,
            "symmetrized": symmetrize,
            "stabilization": {k: r for k, r in reports.items()},
        },
    )
    return {
        "outputs": ["data.json", "estimate.json"],
        "residuals": {"raw_r1": raw_report.r1_residual},
        "all_stabilized": all(r.stabilized for r in reports.values()),
    }


def qlra_outputs(data: ContextualData, tolerance: float, mirror_phase=False, a_eigenvalues=(1.0, -1.0), b_eigenvalues=(1.0, -1.0)):
    """Build the amplitude (and operators for complex amplitudes) with the
    precondition and residual checks used by the CLI and the pipeline."""
    conditions = check_conditions(data, tolerance)
    if not conditions.r2a:
        raise PreconditionError("context is degenerate for a or b (R2a)")
    if not conditions.r2:
        raise PreconditionError("observables are mutually degenerate (R2)")
    if not conditions.r1:
        raise PreconditionError(f"symmetric conditioning (R1) fails: residual {conditions.r1_residual:.3g}")
    report = interference_coefficients(data)
    amplitude = build_amplitude(data, tolerance, mirror_phase=mirror_phase)
    if amplitude.born_residual > BORN_TOLERANCE:
        raise BornRuleViolation(f"Born residual {amplitude.born_residual:.3g} exceeds {BORN_TOLERANCE:g}")
    operators = None
    if amplitude.kind == "complex":
        operators = build_operators(data, amplitude, a_eigenvalues, b_eigenvalues)
    residuals = {
        "born": amplitude.born_residual,
        "phase": amplitude.phase_residual,
        "interference": verify_interference_formula(data, report, amplitude),
    }
    if operators is not None:
        residuals["gram"] = operators.gram_residual
        residuals["decomposition"] = operators.decomposition_residual
    return amplitude, operators, report, residuals


def _stage_qlra(cfg: PipelineConfig, params: dict) -> dict:
    source = cfg.resolve(params["input"]) if "input" in params else cfg.output_dir / "data.json"
    data = ContextualData.from_dict(read_json(source))
    amplitude, operators, report, residuals = qlra_outputs(
        data,
        params.get("tolerance", 1e-9),
        params.get("mirror_phase", False),
        tuple(params.get("a_eigenvalues", (1.0, -1.0))),
        tuple(params.get("b_eigenvalues", (1.0, -1.0))),
    )
    write_json(cfg.output_dir / "psi.json", amplitude)
    outputs = ["psi.json"]
    if operators is not None:
        write_json(cfg.output_dir / "operators.json", operators)
        outputs.append("operators.json")
    write_json(cfg.output_dir / "interference.json", report)
    outputs.append("interference.json")
    return {"outputs": outputs, "kind": amplitude.kind, "residuals": residuals}


def _stage_bell(cfg: PipelineConfig, params: dict) -> dict:
    action = params["action"]
    if action == "scan":
        points = violation_scan(params.get("grid", 16), params.get("tol", 1e-9))
        (cfg.output_dir / "bell_scan.csv").write_text(scan_csv(points))
        return {"outputs": ["bell_scan.csv"], "violations": len(points)}
    if action == "verify":
        result = verify_on_random_spaces(params.get("trials", 10_000), cfg.seed)
        write_json(cfg.output_dir / "bell_verify.json", result)
        return {"outputs": ["bell_verify.json"], "residuals": {"min_slack": result.min_slack}}
    if "input" not in params:
        raise SchemaError("bell check needs 'input'")
    triple = BellTriple.from_dict(read_json(cfg.resolve(params["input"])))
    result = check_inequality(triple, params.get("tol", 1e-9))
    write_json(cfg.output_dir / "bell_check.json", result)
    return {"outputs": ["bell_check.json"], "residuals": {"slack": result.slack}}


def scan_csv(points) -> str:
    return csv_text(("phi_a", "phi_b", "phi_c", "slack"), ((p.phi_a, p.phi_b, p.phi_c, p.slack) for p in points))


_RUNNERS = {
    "simulate": _stage_simulate,
    "estimate": _stage_estimate,
    "qlra": _stage_qlra,
    "bell": _stage_bell,
}


def run_pipeline(config: PipelineConfig) -> dict:
    """Run every stage in order and write ``manifest.json``.

    Raises :class:`StageFailure` wrapping the first module error; the
    manifest is written either way.
    """
    config.output_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "seed": config.seed,
        "seed_source": config.seed_source,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "stages": [],
        "status": "ok",
    }
    try:
        for params in config.stages:
            name = params["stage"]
            try:
                info = _RUNNERS[name](config, params)
            except VaxjoError as exc:
                raise StageFailure(name, exc) from exc
            except (OSError, ValueError, KeyError) as exc:
                raise StageFailure(name, SchemaError(str(exc))) from exc
            manifest["stages"].append({"stage": name, "params": params, **info})
    except StageFailure as exc:
        manifest["status"] = "failed"
        manifest["error"] = error_record(exc)
        raise
    finally:
        write_json(config.output_dir / "manifest.json", manifest)
    return manifest


def error_record(exc: BaseException) -> dict:
    cause = getattr(exc, "cause", exc)
    return {
        "stage": getattr(exc, "stage", None),
        "code": getattr(cause, "code", type(cause).__name__),
        "exit_code": getattr(exc, "exit_code", 1),
        "message": str(cause),
    }
