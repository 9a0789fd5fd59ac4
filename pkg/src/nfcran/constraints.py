"""Evaluation of the allocation problem's constraints.

Latency checks (C1 on FEC, C2 on NEC) are per task; capacity checks are
C3 (global FEC compute), C4 (per-cell NEC compute) and C5 (per-cell
fronthaul). C6/C7 hold by construction of :class:`~nfcran.model.Assignment`.

Resource sums use :func:`math.fsum`, which is correctly rounded and so does
not depend on summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from .model import (
    Assignment,
    Decision,
    ResourceUsage,
    Scenario,
    TaskKey,
    TaskSpec,
    UeLink,
    total_task_count,
)

TOLERANCE = 1e-9  # absolute slack, in each constraint's own units

GLOBAL = "GLOBAL"
Where = Union[TaskKey, int, str]


class InfeasibleAssignmentError(ValueError):
    pass


def within(value: float, bound: float) -> bool:
    return value <= bound + TOLERANCE


def _check_positive(**values: float) -> None:
    for name, v in values.items():
        if not (math.isfinite(v) and v > 0):
            raise ValueError(f"{name} must be finite and > 0, got {v!r}")


def fec_latency(task: TaskSpec, link: UeLink) -> float:
    """Wireless upload + fronthaul forward + FEC compute time."""
    _check_positive(
        wireless_rate=link.wireless_rate, fronthaul_rate=link.fronthaul_rate, fec_cpu_grant=link.fec_cpu_grant
    )
    d = task.data_size
    return d / link.wireless_rate + d / link.fronthaul_rate + task.compute_demand / link.fec_cpu_grant


def nec_latency(task: TaskSpec, link: UeLink) -> float:
    """Wireless upload + NEC compute time."""
    _check_positive(wireless_rate=link.wireless_rate, nec_cpu_grant=link.nec_cpu_grant)
    return task.data_size / link.wireless_rate + task.compute_demand / link.nec_cpu_grant


def is_task_feasible_on(target: Decision, task: TaskSpec, link: UeLink) -> bool:
    if target is Decision.FEC:
        latency = fec_latency(task, link)
    elif target is Decision.NEC:
        latency = nec_latency(task, link)
    else:
        raise ValueError(f"target must be FEC or NEC, got {target}")
    return within(latency, task.deadline)


@dataclass(frozen=True)
class Violation:
    constraint: str  # "C1".."C5"
    where: Where
    measured: float
    bound: float

    def to_dict(self) -> dict:
        where = list(self.where) if isinstance(self.where, tuple) else self.where
        return {"constraint": self.constraint, "where": where, "measured": self.measured, "bound": self.bound}


@dataclass(frozen=True)
class ConstraintReport:
    violations: tuple[Violation, ...] = ()
    structural: tuple[str, ...] = field(default=("C6", "C7"))

    @property
    def feasible(self) -> bool:
        return not self.violations

    def by_constraint(self, tag: str) -> list[Violation]:
        return [v for v in self.violations if v.constraint == tag]

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "violations": [v.to_dict() for v in self.violations],
            "structurally_satisfied": list(self.structural),
        }


def resource_usage(scenario: Scenario, assignment: Assignment) -> ResourceUsage:
    decisions = assignment.as_dict()
    fec: list[float] = []
    nec: dict[int, list[float]] = {}
    fronthaul: dict[int, list[float]] = {}
    for key, cell, ue in scenario.tasks():
        nec.setdefault(cell.cell_id, [])
        fronthaul.setdefault(cell.cell_id, [])
        d = decisions[key]
        if d is Decision.FEC:
            fec.append(ue.link.fec_cpu_grant)
            fronthaul[cell.cell_id].append(ue.link.fronthaul_rate)
        elif d is Decision.NEC:
            nec[cell.cell_id].append(ue.link.nec_cpu_grant)
    return ResourceUsage(
        math.fsum(fec),
        {c: math.fsum(v) for c, v in nec.items()},
        {c: math.fsum(v) for c, v in fronthaul.items()},
    )


def audit(scenario: Scenario, assignment: Assignment) -> ConstraintReport:
    """Check every constraint; raises AssignmentError if keys do not match."""
    assignment.check_matches(scenario)
    decisions = assignment.as_dict()
    violations: list[Violation] = []

    for key, _, ue in scenario.tasks():
        d = decisions[key]
        if d is Decision.FEC:
            lat = fec_latency(ue.task, ue.link)
            if not within(lat, ue.task.deadline):
                violations.append(Violation("C1", key, lat, ue.task.deadline))
        elif d is Decision.NEC:
            lat = nec_latency(ue.task, ue.link)
            if not within(lat, ue.task.deadline):
                violations.append(Violation("C2", key, lat, ue.task.deadline))

    usage = resource_usage(scenario, assignment)
    if not within(usage.fec, scenario.fec_capacity):
        violations.append(Violation("C3", GLOBAL, usage.fec, scenario.fec_capacity))
    for cell in sorted(scenario.cells, key=lambda c: c.cell_id):
        if not within(usage.nec[cell.cell_id], cell.nec_capacity):
            violations.append(Violation("C4", cell.cell_id, usage.nec[cell.cell_id], cell.nec_capacity))
    for cell in sorted(scenario.cells, key=lambda c: c.cell_id):
        if not within(usage.fronthaul[cell.cell_id], cell.fronthaul_capacity):
            violations.append(Violation("C5", cell.cell_id, usage.fronthaul[cell.cell_id], cell.fronthaul_capacity))
    return ConstraintReport(tuple(violations))


def success_rate(scenario: Scenario, assignment: Assignment) -> float:
    report = audit(scenario, assignment)
    if not report.feasible:
        tags = sorted({v.constraint for v in report.violations})
        raise InfeasibleAssignmentError(f"assignment violates {', '.join(tags)}; success rate undefined")
    total = total_task_count(scenario)
    if total == 0:
        raise ValueError("scenario has no tasks")
    return assignment.accepted() / total
