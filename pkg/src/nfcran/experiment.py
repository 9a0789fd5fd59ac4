"""Success-rate-versus-load sweeps comparing NFC-RAN with an FEC-only C-RAN."""

from __future__ import annotations

import csv
import enum
import io
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .scenarios import PAPER_BASELINE_FEC_CAPACITY, PAPER_UES_PER_CELL, GenParams, generate, paper_preset
from .solvers import Scoring, SolverConfig, SolverKind, solve

CSV_HEADER = ("ues_per_cell", "architecture", "solver", "mean_success_rate", "std_success_rate", "n_seeds")


class Architecture(str, enum.Enum):
    NFC_RAN = "NFC_RAN"
    CRAN_FEC_ONLY = "CRAN_FEC_ONLY"  # FEC capacity replaced by the baseline value
    CRAN_FEC_ONLY_MATCHED = "CRAN_FEC_ONLY_MATCHED"  # FEC capacity left as generated


# sweep solver label -> full-problem config; the baseline uses its FEC-only twin
SOLVER_MODES: dict[str, SolverConfig] = {
    "greedy": SolverConfig(SolverKind.GREEDY, greedy_scoring=Scoring.MIN_FOOTPRINT),
    "greedy-penalty": SolverConfig(SolverKind.GREEDY, greedy_scoring=Scoring.PENALTY),
    "exact": SolverConfig(SolverKind.EXACT),
}


class SweepError(RuntimeError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    base_params: GenParams = field(default_factory=paper_preset)
    ues_per_cell_values: tuple[int, ...] = PAPER_UES_PER_CELL
    seeds: tuple[int, ...] = tuple(range(20))
    baseline_fec_capacity: float = PAPER_BASELINE_FEC_CAPACITY
    solvers_to_run: tuple[str, ...] = ("greedy",)
    include_matched: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "ues_per_cell_values", tuple(int(n) for n in self.ues_per_cell_values))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "solvers_to_run", tuple(self.solvers_to_run))
        if not self.ues_per_cell_values:
            raise ValueError("ues_per_cell_values is empty")
        if not self.seeds:
            raise ValueError("seeds is empty")
        if not (self.baseline_fec_capacity > 0 and math.isfinite(self.baseline_fec_capacity)):
            raise ValueError("baseline_fec_capacity must be finite and > 0")
        unknown = [s for s in self.solvers_to_run if s not in SOLVER_MODES]
        if unknown or not self.solvers_to_run:
            raise ValueError(f"unknown solver modes {unknown}; choose from {sorted(SOLVER_MODES)}")

    @property
    def architectures(self) -> tuple[Architecture, ...]:
        if self.include_matched:
            return tuple(Architecture)
        return (Architecture.NFC_RAN, Architecture.CRAN_FEC_ONLY)

    def to_dict(self) -> dict:
        return {
            "base_params": self.base_params.to_dict(),
            "ues_per_cell_values": list(self.ues_per_cell_values),
            "seeds": list(self.seeds),
            "baseline_fec_capacity": self.baseline_fec_capacity,
            "solvers_to_run": list(self.solvers_to_run),
            "include_matched": self.include_matched,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "SweepSpec":
        return cls(
            base_params=GenParams.from_dict(doc["base_params"]),
            ues_per_cell_values=tuple(doc["ues_per_cell_values"]),
            seeds=tuple(doc["seeds"]),
            baseline_fec_capacity=float(doc.get("baseline_fec_capacity", PAPER_BASELINE_FEC_CAPACITY)),
            solvers_to_run=tuple(doc.get("solvers_to_run", ("greedy",))),
            include_matched=bool(doc.get("include_matched", False)),
        )


@dataclass(frozen=True)
class SweepRow:
    ues_per_cell: int
    architecture: Architecture
    solver: str
    mean: float
    std: float
    per_seed: tuple[float, ...]

    @property
    def sort_key(self) -> tuple:
        return (self.ues_per_cell, self.architecture.value, self.solver)


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    spec: SweepSpec | None = None

    def row(self, n: int, arch: Architecture, solver: str) -> SweepRow:
        for r in self.rows:
            if (r.ues_per_cell, r.architecture, r.solver) == (n, arch, solver):
                return r
        raise KeyError((n, arch, solver))

    def curve(self, arch: Architecture, solver: str) -> list[SweepRow]:
        return sorted((r for r in self.rows if r.architecture == arch and r.solver == solver), key=lambda r: r.ues_per_cell)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict() if self.spec else None,
            "rows": [
                {
                    "ues_per_cell": r.ues_per_cell,
                    "architecture": r.architecture.value,
                    "solver": r.solver,
                    "mean_success_rate": r.mean,
                    "std_success_rate": r.std,
                    "per_seed": list(r.per_seed),
                }
                for r in self.rows
            ],
        }


def run_cell(base: GenParams, n: int, seed: int, arch: Architecture, solver: str, baseline_fec_capacity: float) -> float:
    """Success rate of one (N, seed, architecture, solver) sweep cell."""
    scenario = generate(base.replace(ues_per_cell=n, seed=seed))
    config = SOLVER_MODES[solver]
    if arch is Architecture.NFC_RAN:
        return solve(scenario, config).success_rate
    if arch is Architecture.CRAN_FEC_ONLY:
        scenario = scenario.with_fec_capacity(baseline_fec_capacity)
    return solve(scenario, config.with_fec_only()).success_rate


def _run_cell_tagged(args: tuple) -> float:
    base, n, seed, arch, solver, cap = args
    try:
        return run_cell(base, n, seed, arch, solver, cap)
    except Exception as exc:
        raise SweepError(f"sweep cell N={n} seed={seed} arch={arch.value} solver={solver} failed: {exc}") from exc


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    jobs = [
        (spec.base_params, n, seed, arch, solver, spec.baseline_fec_capacity)
        for n in spec.ues_per_cell_values
        for arch in spec.architectures
        for solver in spec.solvers_to_run
        for seed in spec.seeds
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rates = list(pool.map(_run_cell_tagged, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rates = [_run_cell_tagged(j) for j in jobs]

    grouped: dict[tuple, list[float]] = {}
    for job, rate in zip(jobs, rates):
        _, n, _, arch, solver, _ = job
        grouped.setdefault((n, arch, solver), []).append(rate)
    rows = [
        SweepRow(n, arch, solver, statistics.fmean(v), statistics.pstdev(v), tuple(v))
        for (n, arch, solver), v in grouped.items()
    ]
    rows.sort(key=lambda r: r.sort_key)
    return SweepResult(tuple(rows), spec)


def format_table(result: SweepResult, comment: str | None = None) -> str:
    if not result.rows:
        raise ValueError("empty sweep result")
    buf = io.StringIO()
    if comment:
        for line in comment.splitlines():
            buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in sorted(result.rows, key=lambda r: r.sort_key):
        w.writerow([r.ues_per_cell, r.architecture.value, r.solver, f"{r.mean:.6f}", f"{r.std:.6f}", len(r.per_seed)])
    return buf.getvalue()


def emit_table(result: SweepResult, path: str | Path, comment: str | None = None) -> None:
    """Write the sweep as CSV. Population std-dev, so one seed gives 0."""
    text = format_table(result, comment)  # raises before touching the file
    Path(path).write_text(text)


def curves_text(result: SweepResult, solvers: Iterable[str] | None = None) -> str:
    """Mean success rates as aligned columns, one column per (architecture, solver)."""
    solvers = list(solvers or sorted({r.solver for r in result.rows}))
    archs = [a for a in Architecture if any(r.architecture == a for r in result.rows)]
    cols = [(a, s) for s in solvers for a in archs]
    ns = sorted({r.ues_per_cell for r in result.rows})
    heads = ["N"] + [f"{a.value}/{s}" for a, s in cols]
    widths = [max(6, len(h)) for h in heads]
    lines = ["  ".join(h.rjust(w) for h, w in zip(heads, widths))]
    for n in ns:
        cells = [str(n)] + [f"{result.row(n, a, s).mean:.4f}" for a, s in cols]
        lines.append("  ".join(c.rjust(w) for c, w in zip(cells, widths)))
    return "\n".join(lines)


def pooled_std(a: float, b: float) -> float:
    return math.sqrt((a * a + b * b) / 2)


def non_increasing_within_noise(rows: Sequence[SweepRow]) -> bool:
    return all(nxt.mean <= cur.mean + pooled_std(cur.std, nxt.std) for cur, nxt in zip(rows, rows[1:]))
