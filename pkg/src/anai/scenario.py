"""Scenario files and CSV wire formats.

Scenarios are JSON documents validated strictly: unknown keys are rejected
and every violation is reported with the offending field path, so a typo
in a parameter name can never silently fall back to a default. All numeric
CSV output uses 9 significant digits, which keeps files byte-reproducible
and round-trippable well below every tolerance used elsewhere.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Any

import numpy as np

from .calibration import ObservedSeries, SweepEntry
from .dynamics import (
    CouplingFunction,
    FeedbackParams,
    LogisticParams,
    ScenarioConfig,
    TimeGrid,
    Trajectory,
)
from .indices import (
    AutonomyComponents,
    ClassifierConfig,
    DomainAssessment,
    DomainReport,
    InfraComponents,
)
from .phase_space import BoundaryCurve, PositionedDomain, RegimeGrid

__all__ = [
    "ScenarioError",
    "ScenarioParseError",
    "ValidationError",
    "boundary_csv",
    "domain_reports_csv",
    "format_scenario",
    "grid_csv",
    "parse_domains_csv",
    "parse_scenario",
    "parse_series_csv",
    "parse_trajectory_csv",
    "positioned_domains_csv",
    "scenario_to_dict",
    "sweep_csv",
    "trajectory_csv",
]

TRAJECTORY_HEADER = "t,aix,icc,ttp,compute,energy"
SERIES_HEADER = "t,value"
DOMAINS_HEADER = "name,d,e,r,m,e_p,d_p,p_p"


class ScenarioError(Exception):
    """Base class for scenario/CSV ingestion failures."""


class ScenarioParseError(ScenarioError):
    """Document is not syntactically valid."""


class ValidationError(ScenarioError):
    """Document is well-formed but violates a field constraint."""


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


# ---------------------------------------------------------------------------
# scenario documents


def _check_keys(obj: dict, path: str, required: tuple[str, ...], optional: tuple[str, ...] = ()) -> None:
    unknown = sorted(set(obj) - set(required) - set(optional))
    if unknown:
        raise ValidationError(f"{path}: unknown key(s) {unknown}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise ValidationError(f"{path}: missing required key(s) {missing}")


def _mapping(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise ValidationError(f"{path}: expected an object")
    return value


def _number(obj: dict, path: str, key: str) -> float:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{path}.{key}: expected a number, got {value!r}")
    return float(value)


def _build(path: str, ctor, *args, **kwargs):
    try:
        return ctor(*args, **kwargs)
    except ValueError as exc:
        prefix = f"{path}." if path else ""
        raise ValidationError(f"{prefix}{exc}") from exc


def _logistic_from_dict(obj: Any, path: str) -> LogisticParams:
    obj = _mapping(obj, path)
    _check_keys(obj, path, ("rate", "capacity", "x0"))
    return _build(
        path,
        LogisticParams,
        rate=_number(obj, path, "rate"),
        capacity=_number(obj, path, "capacity"),
        x0=_number(obj, path, "x0"),
    )


def _feedback_from_dict(obj: Any, path: str) -> FeedbackParams:
    obj = _mapping(obj, path)
    _check_keys(
        obj,
        path,
        ("kappa_e", "beta_f", "gamma_c", "c0"),
        ("coupling_fn", "c_half", "combine_logistic"),
    )
    coupling = CouplingFunction.SATURATING
    if "coupling_fn" in obj:
        raw = obj["coupling_fn"]
        try:
            coupling = CouplingFunction(raw)
        except ValueError:
            choices = [c.value for c in CouplingFunction]
            raise ValidationError(f"{path}.coupling_fn: expected one of {choices}, got {raw!r}") from None
    combine = False
    if "combine_logistic" in obj:
        combine = obj["combine_logistic"]
        if not isinstance(combine, bool):
            raise ValidationError(f"{path}.combine_logistic: expected a boolean, got {combine!r}")
    c_half = _number(obj, path, "c_half") if "c_half" in obj else None
    return _build(
        path,
        FeedbackParams,
        kappa_e=_number(obj, path, "kappa_e"),
        beta_f=_number(obj, path, "beta_f"),
        gamma_c=_number(obj, path, "gamma_c"),
        c0=_number(obj, path, "c0"),
        coupling=coupling,
        c_half=c_half,
        combine_logistic=combine,
    )


def _classifier_from_dict(obj: Any, path: str, tau: float) -> ClassifierConfig:
    obj = _mapping(obj, path)
    _check_keys(obj, path, (), ("high_cut", "stage_bands"))
    high_cut = _number(obj, path, "high_cut") if "high_cut" in obj else 0.5
    if "stage_bands" not in obj:
        return _build(path, ClassifierConfig.for_tau, tau, high_cut=high_cut)
    bands = obj["stage_bands"]
    if (
        not isinstance(bands, list)
        or len(bands) != 3
        or any(isinstance(b, bool) or not isinstance(b, (int, float)) for b in bands)
    ):
        raise ValidationError(f"{path}.stage_bands: expected a list of 3 numbers")
    return _build(
        path, ClassifierConfig, tau=tau, high_cut=high_cut, stage_bands=tuple(float(b) for b in bands)
    )


def scenario_from_dict(doc: Any) -> ScenarioConfig:
    """Validate a parsed scenario document into a config."""
    doc = _mapping(doc, "scenario")
    _check_keys(
        doc,
        "scenario",
        ("autonomy", "infra", "tau", "grid"),
        ("feedback", "classifier", "time_unit_label"),
    )
    tau = _number(doc, "scenario", "tau")
    autonomy = _logistic_from_dict(doc["autonomy"], "autonomy")
    infra = _logistic_from_dict(doc["infra"], "infra")
    grid_obj = _mapping(doc["grid"], "grid")
    _check_keys(grid_obj, "grid", ("t_start", "t_end", "dt"))
    grid = _build(
        "grid",
        TimeGrid,
        t_start=_number(grid_obj, "grid", "t_start"),
        t_end=_number(grid_obj, "grid", "t_end"),
        dt=_number(grid_obj, "grid", "dt"),
    )
    feedback = None
    if "feedback" in doc:
        feedback = _feedback_from_dict(doc["feedback"], "feedback")
    classifier = None
    if "classifier" in doc:
        classifier = _classifier_from_dict(doc["classifier"], "classifier", tau)
    label = None
    if "time_unit_label" in doc:
        label = doc["time_unit_label"]
        if not isinstance(label, str):
            raise ValidationError(f"time_unit_label: expected a string, got {label!r}")
    return _build(
        "",
        ScenarioConfig,
        autonomy=autonomy,
        infra=infra,
        tau=tau,
        grid=grid,
        feedback=feedback,
        classifier=classifier,
        time_unit_label=label,
    )


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse and fully validate a scenario JSON document.

    Raises:
        ScenarioParseError: malformed JSON, with line/column position.
        ValidationError: valid JSON violating a constraint, naming the
            offending field path.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return scenario_from_dict(doc)


def scenario_to_dict(config: ScenarioConfig) -> dict:
    """Canonical document form of a config; inverse of :func:`scenario_from_dict`."""
    doc: dict[str, Any] = {
        "autonomy": {
            "rate": config.autonomy.rate,
            "capacity": config.autonomy.capacity,
            "x0": config.autonomy.x0,
        },
        "infra": {
            "rate": config.infra.rate,
            "capacity": config.infra.capacity,
            "x0": config.infra.x0,
        },
        "tau": config.tau,
        "grid": {
            "t_start": config.grid.t_start,
            "t_end": config.grid.t_end,
            "dt": config.grid.dt,
        },
    }
    fb = config.feedback
    if fb is not None:
        block: dict[str, Any] = {
            "kappa_e": fb.kappa_e,
            "beta_f": fb.beta_f,
            "gamma_c": fb.gamma_c,
            "c0": fb.c0,
            "coupling_fn": fb.coupling.value,
            "combine_logistic": fb.combine_logistic,
        }
        if fb.c_half is not None:
            block["c_half"] = fb.c_half
        doc["feedback"] = block
    if config.classifier is not None:
        doc["classifier"] = {
            "high_cut": config.classifier.high_cut,
            "stage_bands": list(config.classifier.stage_bands),
        }
    if config.time_unit_label is not None:
        doc["time_unit_label"] = config.time_unit_label
    return doc


def format_scenario(config: ScenarioConfig) -> str:
    """Serialize a config to canonical (sorted, indented) JSON text."""
    return json.dumps(scenario_to_dict(config), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# CSV formats


def trajectory_csv(traj: Trajectory) -> str:
    """Render a trajectory; compute/energy cells stay empty for decoupled runs."""
    lines = [TRAJECTORY_HEADER]
    has_feedback = traj.compute is not None
    for i in range(len(traj)):
        cells = [_fmt(traj.t[i]), _fmt(traj.aix[i]), _fmt(traj.icc[i]), _fmt(traj.ttp[i])]
        if has_feedback:
            cells += [_fmt(traj.compute[i]), _fmt(traj.energy[i])]
        else:
            cells += ["", ""]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _read_rows(text: str, expected_header: str, path_label: str) -> list[list[str]]:
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if not rows:
        raise ValidationError(f"{path_label}: empty file")
    header = ",".join(cell.strip() for cell in rows[0])
    if header != expected_header:
        raise ValidationError(
            f"{path_label}: expected header '{expected_header}', got '{header}'"
        )
    return rows[1:]


def _cell_float(cell: str, path_label: str, line: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise ValidationError(f"{path_label}, line {line}: not a number: {cell!r}") from None


def parse_trajectory_csv(text: str) -> Trajectory:
    """Read a trajectory back from its CSV form (crossing data is not stored)."""
    rows = _read_rows(text, TRAJECTORY_HEADER, "trajectory")
    if not rows:
        raise ValidationError("trajectory: no data rows")
    cols: list[list[float]] = [[], [], [], []]
    compute: list[float] = []
    energy: list[float] = []
    n_empty = 0
    for line_no, row in enumerate(rows, start=2):
        if len(row) != 6:
            raise ValidationError(f"trajectory, line {line_no}: expected 6 cells, got {len(row)}")
        for k in range(4):
            cols[k].append(_cell_float(row[k], "trajectory", line_no))
        if row[4] == "" and row[5] == "":
            n_empty += 1
        else:
            compute.append(_cell_float(row[4], "trajectory", line_no))
            energy.append(_cell_float(row[5], "trajectory", line_no))
    if n_empty and compute:
        raise ValidationError("trajectory: compute/energy must be empty on all rows or none")
    return Trajectory(
        t=np.array(cols[0]),
        aix=np.array(cols[1]),
        icc=np.array(cols[2]),
        ttp=np.array(cols[3]),
        compute=np.array(compute) if compute else None,
        energy=np.array(energy) if energy else None,
    )


def parse_series_csv(text: str, label: str = "") -> ObservedSeries:
    """Read an observed series (header ``t,value``)."""
    rows = _read_rows(text, SERIES_HEADER, "series")
    t, v = [], []
    for line_no, row in enumerate(rows, start=2):
        if len(row) != 2:
            raise ValidationError(f"series, line {line_no}: expected 2 cells, got {len(row)}")
        t.append(_cell_float(row[0], "series", line_no))
        v.append(_cell_float(row[1], "series", line_no))
    try:
        return ObservedSeries(t=np.array(t), value=np.array(v), label=label)
    except ValueError as exc:
        raise ValidationError(f"series: {exc}") from exc


def parse_domains_csv(text: str) -> list[DomainAssessment]:
    """Read domain component scores (header ``name,d,e,r,m,e_p,d_p,p_p``)."""
    rows = _read_rows(text, DOMAINS_HEADER, "domains")
    if not rows:
        raise ValidationError("domains: no data rows")
    out = []
    for line_no, row in enumerate(rows, start=2):
        if len(row) != 8:
            raise ValidationError(f"domains, line {line_no}: expected 8 cells, got {len(row)}")
        name = row[0].strip()
        scores = [_cell_float(cell, "domains", line_no) for cell in row[1:]]
        try:
            out.append(
                DomainAssessment(
                    name=name,
                    autonomy=AutonomyComponents(*scores[:4]),
                    infra=InfraComponents(*scores[4:]),
                )
            )
        except ValueError as exc:
            raise ValidationError(f"domains, line {line_no}: {exc}") from exc
    return out


def boundary_csv(curve: BoundaryCurve) -> str:
    lines = ["aix,icc"]
    lines += [f"{_fmt(a)},{_fmt(b)}" for a, b in zip(curve.aix, curve.icc)]
    return "\n".join(lines) + "\n"


def grid_csv(grid: RegimeGrid) -> str:
    lines = ["aix,icc,regime"]
    for i in range(grid.resolution):
        for j in range(grid.resolution):
            aix, icc = grid.center(i, j)
            lines.append(f"{_fmt(aix)},{_fmt(icc)},{grid.label(i, j).value}")
    return "\n".join(lines) + "\n"


def sweep_csv(entries: list[SweepEntry]) -> str:
    lines = ["value,t_cross"]
    for entry in entries:
        cell = "" if entry.t_cross is None else _fmt(entry.t_cross)
        lines.append(f"{_fmt(entry.value)},{cell}")
    return "\n".join(lines) + "\n"


def positioned_domains_csv(domains: list[PositionedDomain]) -> str:
    lines = ["name,aix,icc,ttp,stage,above_boundary"]
    for d in domains:
        lines.append(
            f"{d.name},{_fmt(d.aix)},{_fmt(d.icc)},{_fmt(d.ttp)},"
            f"{d.stage.label},{str(d.above_boundary).lower()}"
        )
    return "\n".join(lines) + "\n"


def domain_reports_csv(reports: list[DomainReport]) -> str:
    lines = ["name,aix,icc,ttp,regime,stage,tau_distance,near_boundary"]
    for r in reports:
        lines.append(
            f"{r.name},{_fmt(r.aix)},{_fmt(r.icc)},{_fmt(r.ttp)},{r.regime.value},"
            f"{r.stage.label},{_fmt(r.tau_distance)},{str(r.near_boundary).lower()}"
        )
    return "\n".join(lines) + "\n"
