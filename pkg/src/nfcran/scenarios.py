"""Seeded scenario generation.

Random draws come from numpy's PCG64 bit generator (PCG-XSL-RR 128/64),
seeded through ``numpy.random.SeedSequence``. Each draw takes one raw 64-bit
output ``x`` and maps it to ``u = (x >> 11) * 2**-53`` in [0, 1); a field is
then ``low + (high - low) * u`` (or the log-scale equivalent). Draw order:
cells ascending; per cell ``nec_capacity`` then ``fronthaul_capacity``; then
UEs ascending, each drawing ``data_size, compute_demand, wireless_rate,
fronthaul_rate, nec_cpu_grant, fec_cpu_grant``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .model import CellSpec, Scenario, TaskSpec, Ue, UeLink

UE_FIELDS = ("data_size", "compute_demand", "wireless_rate", "fronthaul_rate", "nec_cpu_grant", "fec_cpu_grant")
CELL_FIELDS = ("nec_capacity", "fronthaul_capacity")
RANGE_FIELDS = UE_FIELDS + CELL_FIELDS

# Simulation parameter table of the reference setup, in base units.
PAPER_RANGES: dict[str, tuple[float, float]] = {
    "data_size": (1e6, 1e9),  # bits, 1M - 1G
    "compute_demand": (1e6, 1e9),  # cycles, 1M - 1G
    "wireless_rate": (1e9, 1e10),  # bits/s, 1G - 10G
    "fronthaul_rate": (1e9, 1e10),  # bits/s, 1G - 10G
    "nec_cpu_grant": (1e9, 1e10),  # cycles/s, 1G - 10G
    "fec_cpu_grant": (1e11, 1e12),  # cycles/s, 100G - 1000G
    "nec_capacity": (1e11, 1e12),  # cycles/s, 100G - 1000G
    "fronthaul_capacity": (1e12, 1e13),  # bits/s, 10^3 G - 10^4 G
}
PAPER_CELLS = 5
PAPER_DEADLINE = 3.0  # s
PAPER_FEC_CAPACITY = 1e14  # cycles/s, 10^5 G
PAPER_BASELINE_FEC_CAPACITY = 1e16  # cycles/s, 10^7 GHz for the FEC-only C-RAN
PAPER_UES_PER_CELL = (10, 20, 30, 40, 50)

# Wi-Fi fingerprint stream of one walking UE.
AP_OBSERVATIONS_PER_S = 25
BYTES_PER_OBSERVATION = 8  # lower bound: MAC, RSS, frequency, timestamp
STREAM_BYTES_PER_S = 200
OBSERVATION_WINDOW_S = 25
POSITIONING_DEADLINE = 1.0  # s; chosen here, no measured value exists


def observation_record_bits() -> int:
    return BYTES_PER_OBSERVATION * 8


def nominal_stream_bits(window_s: float = OBSERVATION_WINDOW_S, bytes_per_s: float = STREAM_BYTES_PER_S) -> float:
    return window_s * bytes_per_s * 8


class InvalidParamsError(ValueError):
    pass


@dataclass(frozen=True)
class GenParams:
    cell_count: int
    ues_per_cell: int
    deadline: float
    ranges: Mapping[str, tuple[float, float]]
    fec_capacity: float
    seed: int = 0
    log_uniform: bool = False
    preset: str = "custom"
    notes: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "ranges", {k: (float(lo), float(hi)) for k, (lo, hi) in self.ranges.items()})
        object.__setattr__(self, "notes", dict(self.notes))

    def __hash__(self) -> int:
        return hash((self.cell_count, self.ues_per_cell, self.deadline, self.fec_capacity, self.seed, self.preset))

    def replace(self, **changes: Any) -> "GenParams":
        return dataclasses.replace(self, **changes)

    def with_range(self, name: str, low: float, high: float) -> "GenParams":
        if name not in RANGE_FIELDS:
            raise InvalidParamsError(f"unknown range field {name!r}")
        ranges = dict(self.ranges)
        ranges[name] = (low, high)
        return self.replace(ranges=ranges)

    def problems(self) -> list[str]:
        out = []
        if self.cell_count < 1:
            out.append("cell_count must be >= 1")
        if self.ues_per_cell < 1:
            out.append("ues_per_cell must be >= 1")
        if not (math.isfinite(self.deadline) and self.deadline > 0):
            out.append("deadline must be finite and > 0")
        if not (math.isfinite(self.fec_capacity) and self.fec_capacity >= 0):
            out.append("fec_capacity must be finite and >= 0")
        if not 0 <= self.seed < 2**64:
            out.append("seed must fit in an unsigned 64-bit integer")
        for name in RANGE_FIELDS:
            if name not in self.ranges:
                out.append(f"missing range for {name}")
                continue
            lo, hi = self.ranges[name]
            if not (math.isfinite(lo) and math.isfinite(hi)):
                out.append(f"{name}: bounds must be finite")
            elif lo <= 0:
                out.append(f"{name}: low must be > 0")
            elif lo > hi:
                out.append(f"{name}: low > high")
        return out

    def to_dict(self) -> dict:
        return {
            "cell_count": self.cell_count,
            "ues_per_cell": self.ues_per_cell,
            "deadline": self.deadline,
            "ranges": {k: list(self.ranges[k]) for k in RANGE_FIELDS if k in self.ranges},
            "fec_capacity": self.fec_capacity,
            "seed": self.seed,
            "log_uniform": self.log_uniform,
            "preset": self.preset,
            "notes": dict(self.notes),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "GenParams":
        try:
            return cls(
                cell_count=int(doc["cell_count"]),
                ues_per_cell=int(doc["ues_per_cell"]),
                deadline=float(doc["deadline"]),
                ranges={k: tuple(v) for k, v in doc["ranges"].items()},
                fec_capacity=float(doc["fec_capacity"]),
                seed=int(doc.get("seed", 0)),
                log_uniform=bool(doc.get("log_uniform", False)),
                preset=str(doc.get("preset", "custom")),
                notes=doc.get("notes", {}),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidParamsError(f"malformed GenParams: {exc!r}") from exc


def paper_preset(ues_per_cell: int = 10, seed: int = 0) -> GenParams:
    return GenParams(
        cell_count=PAPER_CELLS,
        ues_per_cell=ues_per_cell,
        deadline=PAPER_DEADLINE,
        ranges=dict(PAPER_RANGES),
        fec_capacity=PAPER_FEC_CAPACITY,
        seed=seed,
        preset="paper",
    )


def positioning_preset(ues_per_cell: int = 10, seed: int = 0) -> GenParams:
    """Paper preset with fingerprint-stream task sizes and a 1 s deadline."""
    nominal = nominal_stream_bits()
    ranges = dict(PAPER_RANGES)
    ranges["data_size"] = (nominal, 100 * nominal)  # up to 100 aggregated streams
    return GenParams(
        cell_count=PAPER_CELLS,
        ues_per_cell=ues_per_cell,
        deadline=POSITIONING_DEADLINE,
        ranges=ranges,
        fec_capacity=PAPER_FEC_CAPACITY,
        seed=seed,
        preset="positioning",
        notes={"deadline_source": "artifact choice, not a measured value", "nominal_stream_bits": nominal},
    )


PRESETS = {"paper": paper_preset, "positioning": positioning_preset}


class _Stream:
    def __init__(self, seed: int):
        self._bits = np.random.PCG64(seed)

    def unit(self) -> float:
        raw = int(self._bits.random_raw())
        return (raw >> 11) * 2.0**-53

    def draw(self, low: float, high: float, log_scale: bool) -> float:
        u = self.unit()
        if low == high:
            return low
        if log_scale:
            a, b = math.log(low), math.log(high)
            x = math.exp(a + (b - a) * u)
        else:
            x = low + (high - low) * u
        return min(max(x, low), high)


def generate(params: GenParams) -> Scenario:
    problems = params.problems()
    if problems:
        raise InvalidParamsError("; ".join(problems))
    rng = _Stream(params.seed)
    r = params.ranges
    lg = params.log_uniform

    cells = []
    for j in range(params.cell_count):
        nec_cap = rng.draw(*r["nec_capacity"], lg)
        fh_cap = rng.draw(*r["fronthaul_capacity"], lg)
        ues = []
        for i in range(params.ues_per_cell):
            v = {name: rng.draw(*r[name], lg) for name in UE_FIELDS}
            task = TaskSpec(v["compute_demand"], v["data_size"], params.deadline)
            link = UeLink(v["wireless_rate"], v["fronthaul_rate"], v["nec_cpu_grant"], v["fec_cpu_grant"])
            ues.append(Ue(i, task, link))
        cells.append(CellSpec(j, nec_cap, fh_cap, tuple(ues)))

    metadata = {
        "seed": params.seed,
        "preset": params.preset,
        "prng": "PCG64",
        "distribution": "log-uniform" if lg else "uniform",
        "params": params.to_dict(),
    }
    return Scenario(tuple(cells), params.fec_capacity, metadata)
