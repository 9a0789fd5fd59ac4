"""Task allocation between near-edge (per-RRH) and far-edge (BBU pool) clouds in C-RAN."""

from .constraints import ConstraintReport, audit, fec_latency, is_task_feasible_on, nec_latency, success_rate
from .model import (
    AllocationResult,
    Assignment,
    CellSpec,
    Decision,
    Scenario,
    TaskSpec,
    Ue,
    UeLink,
    total_task_count,
    validate_scenario,
)
from .scenarios import GenParams, generate, paper_preset, positioning_preset
from .solvers import SolverConfig, SolverKind, Scoring, solve, solve_exact, solve_fec_only, solve_greedy

__version__ = "0.1.0"
