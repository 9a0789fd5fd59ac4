"""Solvers for the binary NEC/FEC task-allocation problem.

Each task picks one option from {FEC, NEC, REJECT}; FEC consumes the task's
FEC CPU grant from the shared pool and its fronthaul rate from its cell's
link, NEC consumes the NEC CPU grant from its cell. This is a
multi-dimensional multiple-choice knapsack with unit values.

Three solvers are provided:

* ``solve_exact``: depth-first branch and bound, tractable up to ~20 tasks.
* ``solve_greedy``: MMKP-style greedy with two scoring rules.
* ``solve_fec_only``: either of the above with NEC removed from every
  choice set (the classic C-RAN baseline).

All ties are broken in (cell_id, ue_index) order and then FEC < NEC < REJECT.
"""

from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from .constraints import TOLERANCE, audit, is_task_feasible_on, resource_usage, within
from .model import AllocationResult, Assignment, Decision, Scenario, TaskKey, total_task_count

log = logging.getLogger(__name__)

EXACT_HARD_CAP = 25


class SolverKind(str, enum.Enum):
    EXACT = "exact"
    GREEDY = "greedy"
    FEC_ONLY_EXACT = "fec-only-exact"
    FEC_ONLY_GREEDY = "fec-only-greedy"

    @property
    def fec_only(self) -> bool:
        return self in (SolverKind.FEC_ONLY_EXACT, SolverKind.FEC_ONLY_GREEDY)

    @property
    def exact(self) -> bool:
        return self in (SolverKind.EXACT, SolverKind.FEC_ONLY_EXACT)


class Scoring(str, enum.Enum):
    MIN_FOOTPRINT = "min-footprint"
    PENALTY = "penalty"


@dataclass(frozen=True)
class SolverConfig:
    solver: SolverKind = SolverKind.GREEDY
    exact_task_limit: int = 20
    greedy_scoring: Scoring = Scoring.MIN_FOOTPRINT

    def __post_init__(self) -> None:
        object.__setattr__(self, "solver", SolverKind(self.solver))
        object.__setattr__(self, "greedy_scoring", Scoring(self.greedy_scoring))
        if self.exact_task_limit < 0:
            raise ValueError("exact_task_limit must be >= 0")

    @property
    def effective_exact_limit(self) -> int:
        return min(self.exact_task_limit, EXACT_HARD_CAP)

    @property
    def label(self) -> str:
        if self.solver.exact:
            return self.solver.value
        return f"{self.solver.value}[{self.greedy_scoring.value}]"

    def with_fec_only(self) -> "SolverConfig":
        kind = SolverKind.FEC_ONLY_EXACT if self.solver.exact else SolverKind.FEC_ONLY_GREEDY
        return SolverConfig(kind, self.exact_task_limit, self.greedy_scoring)


class InstanceTooLargeError(ValueError):
    pass


class SolverBugError(RuntimeError):
    """A solver produced an assignment its own audit rejects."""


# ---------------------------------------------------------------------------
# shared preprocessing


@dataclass(frozen=True)
class _Option:
    decision: Decision
    # (dimension, amount) pairs; dimension is "fec", ("nec", cell) or ("fh", cell)
    uses: tuple[tuple[object, float], ...]


@dataclass(frozen=True)
class _Item:
    key: TaskKey
    options: tuple[_Option, ...]  # admissible by latency, in FEC < NEC order


def _prepare(scenario: Scenario, fec_only: bool) -> tuple[list[_Item], dict[object, float]]:
    caps: dict[object, float] = {"fec": scenario.fec_capacity}
    for cell in scenario.cells:
        caps[("nec", cell.cell_id)] = cell.nec_capacity
        caps[("fh", cell.cell_id)] = cell.fronthaul_capacity
    items = []
    for key, cell, ue in scenario.tasks():
        opts = []
        if is_task_feasible_on(Decision.FEC, ue.task, ue.link):
            opts.append(
                _Option(
                    Decision.FEC,
                    (("fec", ue.link.fec_cpu_grant), (("fh", cell.cell_id), ue.link.fronthaul_rate)),
                )
            )
        if not fec_only and is_task_feasible_on(Decision.NEC, ue.task, ue.link):
            opts.append(_Option(Decision.NEC, ((("nec", cell.cell_id), ue.link.nec_cpu_grant),)))
        items.append(_Item(key, tuple(opts)))
    return items, caps


class _Ledger:
    """Per-dimension lists of accepted amounts; fits() is exact via fsum."""

    def __init__(self, caps: dict[object, float]):
        self.caps = caps
        self.used: dict[object, list[float]] = {d: [] for d in caps}

    def fits(self, option: _Option) -> bool:
        return all(within(math.fsum(self.used[d] + [amt]), self.caps[d]) for d, amt in option.uses)

    def push(self, option: _Option) -> None:
        for d, amt in option.uses:
            self.used[d].append(amt)

    def pop(self, option: _Option) -> None:
        for d, _ in option.uses:
            self.used[d].pop()

    def remaining(self, dim: object) -> float:
        return self.caps[dim] - math.fsum(self.used[dim])

    def loosely_fits(self, option: _Option, sums: dict[object, float]) -> bool:
        # relaxed check for bounding only; must never reject a truly fitting option
        return all(
            sums[d] + amt <= self.caps[d] * (1 + 1e-12) + 2 * TOLERANCE for d, amt in option.uses
        )


def _finish(scenario: Scenario, decisions: dict[TaskKey, Decision], name: str, t0: float) -> AllocationResult:
    assignment = Assignment.for_scenario(scenario, decisions)
    report = audit(scenario, assignment)
    if not report.feasible:
        raise SolverBugError(f"{name} produced an infeasible assignment: {report.violations[:3]}")
    objective = assignment.accepted()
    total = total_task_count(scenario)
    return AllocationResult(
        assignment=assignment,
        objective=objective,
        success_rate=objective / total if total else 0.0,
        usage=resource_usage(scenario, assignment),
        solver_name=name,
        solve_time=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# exact


def _check_size(scenario: Scenario, config: SolverConfig) -> None:
    if config.exact_task_limit > EXACT_HARD_CAP:
        log.warning("exact_task_limit=%d exceeds hard cap; using %d", config.exact_task_limit, EXACT_HARD_CAP)
    n = total_task_count(scenario)
    limit = config.effective_exact_limit
    if n > limit:
        raise InstanceTooLargeError(f"instance too large for exact solver: {n} tasks > limit {limit}")


def _branch_and_bound(items: list[_Item], caps: dict[object, float]) -> list[Decision]:
    n = len(items)
    ledger = _Ledger(caps)
    current: list[Decision] = [Decision.REJECT] * n
    best_value = -1
    best: list[Decision] = list(current)

    def bound(i: int, accepted: int) -> int:
        # every remaining task that could still fit on its own counts as 1
        sums = {d: math.fsum(v) for d, v in ledger.used.items()}
        return accepted + sum(
            1 for it in items[i:] if any(ledger.loosely_fits(o, sums) for o in it.options)
        )

    def dfs(i: int, accepted: int) -> None:
        nonlocal best_value, best
        if i == n:
            if accepted > best_value:
                best_value = accepted
                best = list(current)
            return
        if bound(i, accepted) <= best_value:
            return
        for opt in items[i].options:
            if ledger.fits(opt):
                ledger.push(opt)
                current[i] = opt.decision
                dfs(i + 1, accepted + 1)
                ledger.pop(opt)
        current[i] = Decision.REJECT
        dfs(i + 1, accepted)

    dfs(0, 0)
    return best


def solve_exact(scenario: Scenario, config: SolverConfig | None = None) -> AllocationResult:
    config = config or SolverConfig(SolverKind.EXACT)
    _check_size(scenario, config)
    t0 = time.perf_counter()
    items, caps = _prepare(scenario, config.solver.fec_only)
    chosen = _branch_and_bound(items, caps)
    decisions = {it.key: d for it, d in zip(items, chosen)}
    return _finish(scenario, decisions, config.label, t0)


# ---------------------------------------------------------------------------
# greedy


def _footprint(option: _Option, remaining: dict[object, float]) -> float:
    total = 0.0
    for d, amt in option.uses:
        rem = remaining[d]
        if rem <= 0:
            return math.inf
        total += amt / rem
    return total


def _greedy_min_footprint(items: list[_Item], caps: dict[object, float]) -> dict[TaskKey, Decision]:
    ledger = _Ledger(caps)
    decisions = {it.key: Decision.REJECT for it in items}
    full = dict(caps)

    ranked = []
    for pos, it in enumerate(items):
        if it.options:
            best_fp = min(_footprint(o, full) for o in it.options)
            ranked.append((best_fp, pos, it))
    ranked.sort(key=lambda r: (r[0], r[1]))

    def place(it: _Item) -> bool:
        remaining = {d: ledger.remaining(d) for o in it.options for d, _ in o.uses}
        order = sorted(range(len(it.options)), key=lambda k: (_footprint(it.options[k], remaining), k))
        for k in order:
            opt = it.options[k]
            if ledger.fits(opt):
                ledger.push(opt)
                decisions[it.key] = opt.decision
                return True
        return False

    for _, _, it in ranked:
        place(it)
    # second chance for rejected tasks, lexicographic order
    for it in items:
        if it.options and decisions[it.key] is Decision.REJECT:
            place(it)
    return decisions


def _greedy_penalty(items: list[_Item], caps: dict[object, float]) -> dict[TaskKey, Decision]:
    """Toyoda-style aggregate-resource greedy.

    At every step each fitting option is scored by its capacity-normalized
    demand weighted by how loaded each dimension currently is; the cheapest
    option overall is accepted. With nothing loaded yet all dimensions get
    equal weight.
    """
    dims = list(caps)
    dim_ix = {d: k for k, d in enumerate(dims)}
    cap = np.array([caps[d] for d in dims], dtype=float)
    safe_cap = np.where(cap > 0, cap, 1.0)

    rows = []  # (item position, option position, dim_a, amt_a, dim_b, amt_b)
    for pos, it in enumerate(items):
        for k, o in enumerate(it.options):
            (da, aa), *rest = o.uses
            db, ab = rest[0] if rest else (da, 0.0)
            rows.append((pos, k, dim_ix[da], aa, dim_ix[db], ab))
    decisions = {it.key: Decision.REJECT for it in items}
    if not rows:
        return decisions
    arr = np.array(rows, dtype=float)
    opt_item = arr[:, 0].astype(int)
    opt_k = arr[:, 1].astype(int)
    dim_a, dim_b = arr[:, 2].astype(int), arr[:, 4].astype(int)
    amt_a, amt_b = arr[:, 3], arr[:, 5]
    norm_a, norm_b = amt_a / safe_cap[dim_a], amt_b / safe_cap[dim_b]
    full_fp = norm_a + norm_b

    ledger = _Ledger(caps)
    used = np.zeros(len(dims))
    alive = np.ones(len(rows), dtype=bool)

    while alive.any():
        approx_fit = (used[dim_a] + amt_a <= cap[dim_a] + TOLERANCE) & (used[dim_b] + amt_b <= cap[dim_b] + TOLERANCE)
        # capacities only shrink, so an option that does not fit now never will
        alive &= approx_fit
        if not alive.any():
            break
        load = used / safe_cap
        weight = load if load.any() else np.ones_like(load)
        score = norm_a * weight[dim_a] + norm_b * weight[dim_b]
        cand = np.flatnonzero(alive)
        order = np.lexsort((opt_k[cand], opt_item[cand], full_fp[cand], score[cand]))
        r = cand[order[0]]
        it = items[opt_item[r]]
        opt = it.options[opt_k[r]]
        if not ledger.fits(opt):
            alive[r] = False  # rounding-boundary case; exact check is authoritative
            continue
        ledger.push(opt)
        decisions[it.key] = opt.decision
        for d, a in opt.uses:
            used[dim_ix[d]] = math.fsum(ledger.used[d])
        alive &= opt_item != opt_item[r]
    return decisions


def solve_greedy(scenario: Scenario, config: SolverConfig | None = None) -> AllocationResult:
    config = config or SolverConfig(SolverKind.GREEDY)
    t0 = time.perf_counter()
    items, caps = _prepare(scenario, config.solver.fec_only)
    if config.greedy_scoring is Scoring.PENALTY:
        decisions = _greedy_penalty(items, caps)
    else:
        decisions = _greedy_min_footprint(items, caps)
    return _finish(scenario, decisions, config.label, t0)


def solve_fec_only(scenario: Scenario, config: SolverConfig | None = None) -> AllocationResult:
    """Baseline without NEC. The scenario's FEC capacity is used as given."""
    config = (config or SolverConfig(SolverKind.FEC_ONLY_GREEDY)).with_fec_only()
    if config.solver.exact:
        return solve_exact(scenario, config)
    return solve_greedy(scenario, config)


def solve(scenario: Scenario, config: SolverConfig) -> AllocationResult:
    if config.solver.fec_only:
        return solve_fec_only(scenario, config)
    if config.solver.exact:
        return solve_exact(scenario, config)
    return solve_greedy(scenario, config)
