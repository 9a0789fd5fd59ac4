"""Domain types for the near/far edge task-allocation model.

All quantities are stored in base SI units as floats: cycles, bits, seconds,
cycles/s and bits/s.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping

TaskKey = tuple[int, int]  # (cell_id, ue_index)


class Decision(str, enum.Enum):
    """Where a task runs. Declaration order is the tie-break order."""

    FEC = "FEC"
    NEC = "NEC"
    REJECT = "REJECT"

    @property
    def a(self) -> int:
        return int(self is Decision.FEC)

    @property
    def b(self) -> int:
        return int(self is Decision.NEC)


@dataclass(frozen=True)
class TaskSpec:
    compute_demand: float  # cycles
    data_size: float  # bits
    deadline: float  # seconds


@dataclass(frozen=True)
class UeLink:
    wireless_rate: float  # bits/s, UE -> RRH
    fronthaul_rate: float  # bits/s, RRH -> BBU pool
    nec_cpu_grant: float  # cycles/s
    fec_cpu_grant: float  # cycles/s


@dataclass(frozen=True)
class Ue:
    index: int
    task: TaskSpec
    link: UeLink


@dataclass(frozen=True)
class CellSpec:
    cell_id: int
    nec_capacity: float  # cycles/s
    fronthaul_capacity: float  # bits/s
    ues: tuple[Ue, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "ues", tuple(self.ues))


@dataclass(frozen=True)
class Scenario:
    cells: tuple[CellSpec, ...]
    fec_capacity: float  # cycles/s
    metadata: Mapping[str, Any] = field(default_factory=dict, compare=True)

    def __post_init__(self) -> None:
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "metadata", dict(self.metadata))

    def __hash__(self) -> int:  # metadata is a dict
        return hash((self.cells, self.fec_capacity))

    def tasks(self) -> Iterator[tuple[TaskKey, CellSpec, Ue]]:
        """Yield every task in (cell_id, ue_index) lexicographic order."""
        for cell in sorted(self.cells, key=lambda c: c.cell_id):
            for ue in sorted(cell.ues, key=lambda u: u.index):
                yield (cell.cell_id, ue.index), cell, ue

    def keys(self) -> list[TaskKey]:
        return [key for key, _, _ in self.tasks()]

    def cell(self, cell_id: int) -> CellSpec:
        for c in self.cells:
            if c.cell_id == cell_id:
                return c
        raise KeyError(cell_id)

    def with_fec_capacity(self, fec_capacity: float) -> "Scenario":
        meta = dict(self.metadata)
        meta["fec_capacity_override"] = fec_capacity
        return Scenario(self.cells, fec_capacity, meta)


def total_task_count(scenario: Scenario) -> int:
    return sum(len(c.ues) for c in scenario.cells)


def _is_pos(x: float) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x) and x > 0


def _is_nonneg(x: float) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x) and x >= 0


def validate_scenario(scenario: Scenario) -> list[str]:
    """Return a list of human-readable invariant violations (empty if well-formed)."""
    problems: list[str] = []
    if not scenario.cells:
        problems.append("scenario: cells is empty")
    if not _is_nonneg(scenario.fec_capacity):
        problems.append(f"scenario: fec_capacity={scenario.fec_capacity!r} must be finite and >= 0")

    seen_cells: set[int] = set()
    for cell in scenario.cells:
        where = f"cell {cell.cell_id}"
        if cell.cell_id in seen_cells:
            problems.append(f"{where}: duplicate cell_id")
        seen_cells.add(cell.cell_id)
        for name in ("nec_capacity", "fronthaul_capacity"):
            value = getattr(cell, name)
            if not _is_nonneg(value):
                problems.append(f"{where}: {name}={value!r} must be finite and >= 0")
        if not cell.ues:
            problems.append(f"{where}: ues is empty")
        seen_ues: set[int] = set()
        for ue in cell.ues:
            tag = f"task ({cell.cell_id}, {ue.index})"
            if ue.index in seen_ues:
                problems.append(f"{tag}: duplicate ue_index in cell {cell.cell_id}")
            seen_ues.add(ue.index)
            for obj in (ue.task, ue.link):
                for name in obj.__dataclass_fields__:
                    value = getattr(obj, name)
                    if not _is_pos(value):
                        problems.append(f"{tag}: {name}={value!r} must be finite and > 0")
    return problems


class AssignmentError(ValueError):
    """Assignment keys do not match the scenario's task set."""


@dataclass(frozen=True)
class Assignment:
    """One decision per task, stored sorted by task key."""

    decisions: tuple[tuple[TaskKey, Decision], ...]

    def __post_init__(self) -> None:
        items = sorted(((tuple(k), Decision(d)) for k, d in self.decisions), key=lambda kv: kv[0])
        keys = [k for k, _ in items]
        if len(set(keys)) != len(keys):
            dup = sorted({k for k in keys if keys.count(k) > 1})
            raise AssignmentError(f"duplicate task keys in assignment: {dup}")
        object.__setattr__(self, "decisions", tuple(items))

    @classmethod
    def for_scenario(cls, scenario: Scenario, decisions: Mapping[TaskKey, Decision] | Iterable) -> "Assignment":
        """Build an assignment and check it is total over ``scenario``."""
        items = decisions.items() if isinstance(decisions, Mapping) else decisions
        assignment = cls(tuple(items))
        assignment.check_matches(scenario)
        return assignment

    @classmethod
    def all_reject(cls, scenario: Scenario) -> "Assignment":
        return cls(tuple((k, Decision.REJECT) for k in scenario.keys()))

    def check_matches(self, scenario: Scenario) -> None:
        mine = set(self.as_dict())
        theirs = scenario.keys()
        if len(set(theirs)) != len(theirs):
            raise AssignmentError("scenario has duplicate task keys")
        if mine != set(theirs):
            missing = sorted(set(theirs) - mine)
            extra = sorted(mine - set(theirs))
            raise AssignmentError(f"assignment does not match scenario: missing={missing[:5]} extra={extra[:5]}")

    def as_dict(self) -> dict[TaskKey, Decision]:
        return dict(self.decisions)

    def __getitem__(self, key: TaskKey) -> Decision:
        return self.as_dict()[key]

    def accepted(self) -> int:
        return sum(d is not Decision.REJECT for _, d in self.decisions)

    def replace(self, key: TaskKey, decision: Decision) -> "Assignment":
        d = self.as_dict()
        if key not in d:
            raise AssignmentError(f"unknown task {key}")
        d[key] = decision
        return Assignment(tuple(d.items()))


@dataclass(frozen=True)
class ResourceUsage:
    fec: float
    nec: Mapping[int, float]
    fronthaul: Mapping[int, float]


@dataclass(frozen=True)
class AllocationResult:
    assignment: Assignment
    objective: int
    success_rate: float
    usage: ResourceUsage
    solver_name: str
    # wall clock; informational only, so excluded from equality
    solve_time: float = field(default=0.0, compare=False)


# --------------------------------------------------------------------------
# serialization

_TASK_FIELDS = ("compute_demand", "data_size", "deadline")
_LINK_FIELDS = ("wireless_rate", "fronthaul_rate", "nec_cpu_grant", "fec_cpu_grant")


class FormatError(ValueError):
    """A document does not follow the expected interchange layout."""


def scenario_to_dict(scenario: Scenario) -> dict:
    cells = []
    for cell in scenario.cells:
        ues = []
        for ue in cell.ues:
            entry: dict[str, Any] = {"ue_index": ue.index}
            entry.update({k: getattr(ue.task, k) for k in _TASK_FIELDS})
            entry.update({k: getattr(ue.link, k) for k in _LINK_FIELDS})
            ues.append(entry)
        cells.append(
            {
                "cell_id": cell.cell_id,
                "nec_capacity": cell.nec_capacity,
                "fronthaul_capacity": cell.fronthaul_capacity,
                "ues": ues,
            }
        )
    meta = dict(scenario.metadata)
    meta.setdefault("seed", None)
    meta.setdefault("preset", None)
    return {"fec_capacity": scenario.fec_capacity, "cells": cells, "metadata": meta}


def scenario_from_dict(doc: Mapping) -> Scenario:
    try:
        cells = []
        for c in doc["cells"]:
            ues = []
            for pos, u in enumerate(c["ues"]):
                task = TaskSpec(*(float(u[k]) for k in _TASK_FIELDS))
                link = UeLink(*(float(u[k]) for k in _LINK_FIELDS))
                ues.append(Ue(int(u.get("ue_index", pos)), task, link))
            cells.append(
                CellSpec(int(c["cell_id"]), float(c["nec_capacity"]), float(c["fronthaul_capacity"]), tuple(ues))
            )
        return Scenario(tuple(cells), float(doc["fec_capacity"]), dict(doc.get("metadata") or {}))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed scenario document: {exc!r}") from exc


def assignment_to_list(assignment: Assignment) -> list[dict]:
    return [{"cell_id": c, "ue_index": i, "decision": d.value} for (c, i), d in assignment.decisions]


def assignment_from_list(rows: Iterable[Mapping]) -> Assignment:
    try:
        return Assignment(tuple(((int(r["cell_id"]), int(r["ue_index"])), Decision(r["decision"])) for r in rows))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, AssignmentError):
            raise
        raise FormatError(f"malformed assignment: {exc!r}") from exc


def result_to_dict(result: AllocationResult, *, include_time: bool = False) -> dict:
    doc = {
        "solver_name": result.solver_name,
        "objective": result.objective,
        "success_rate": result.success_rate,
        "usage": {
            "fec": result.usage.fec,
            "nec": {str(k): v for k, v in sorted(result.usage.nec.items())},
            "fronthaul": {str(k): v for k, v in sorted(result.usage.fronthaul.items())},
        },
        "assignment": assignment_to_list(result.assignment),
    }
    if include_time:
        doc["solve_time"] = result.solve_time
    return doc


def result_from_dict(doc: Mapping) -> AllocationResult:
    try:
        usage = ResourceUsage(
            float(doc["usage"]["fec"]),
            {int(k): float(v) for k, v in doc["usage"]["nec"].items()},
            {int(k): float(v) for k, v in doc["usage"]["fronthaul"].items()},
        )
        return AllocationResult(
            assignment_from_list(doc["assignment"]),
            int(doc["objective"]),
            float(doc["success_rate"]),
            usage,
            str(doc["solver_name"]),
            float(doc.get("solve_time", 0.0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (AssignmentError, FormatError)):
            raise
        raise FormatError(f"malformed result document: {exc!r}") from exc


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_json(doc: Any, path: str | Path) -> None:
    Path(path).write_text(dumps(doc))


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    write_json(scenario_to_dict(scenario), path)


def load_scenario(path: str | Path) -> Scenario:
    return scenario_from_dict(read_json(path))
