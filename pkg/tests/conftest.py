import pytest

from nfcran.model import CellSpec, Scenario, TaskSpec, Ue, UeLink
from nfcran.scenarios import paper_preset

ACCEPTANCE_LINES: list[str] = []


def contention_params(cells=1, ues_per_cell=8, seed=0):
    """Paper ranges with capacities shrunk so every constraint can bind."""
    p = paper_preset(ues_per_cell=ues_per_cell, seed=seed).replace(
        cell_count=cells, fec_capacity=1.2e12, deadline=1.6, preset="contention"
    )
    p = p.with_range("nec_capacity", 5e9, 2.5e10)
    return p.with_range("fronthaul_capacity", 5e9, 3e10)


def make_scenario(cells, fec_capacity=1e14):
    """cells: list of (nec_capacity, fronthaul_capacity, [(task_kwargs, link_kwargs), ...])."""
    out = []
    for j, (nec, fh, ues) in enumerate(cells):
        out.append(CellSpec(j, nec, fh, tuple(Ue(i, TaskSpec(**t), UeLink(**l)) for i, (t, l) in enumerate(ues))))
    return Scenario(tuple(out), fec_capacity, {"seed": None, "preset": "hand"})


def task(F=1e9, D=1e9, T=3.0):
    return dict(compute_demand=F, data_size=D, deadline=T)


def link(rw=1e9, rf=1e9, fne=1e9, ffe=1e11):
    return dict(wireless_rate=rw, fronthaul_rate=rf, nec_cpu_grant=fne, fec_cpu_grant=ffe)


@pytest.fixture
def acceptance_report():
    def record(line: str):
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
