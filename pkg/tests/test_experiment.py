import statistics

import pytest

from conftest import contention_params
from nfcran.experiment import (
    CSV_HEADER,
    Architecture,
    SweepResult,
    SweepRow,
    SweepSpec,
    emit_table,
    non_increasing_within_noise,
    run_cell,
    run_sweep,
)
from nfcran.scenarios import RANGE_FIELDS, paper_preset


def small_spec(**kw):
    defaults = dict(base_params=contention_params(2, 3), ues_per_cell_values=(2, 4), seeds=(0, 1, 2))
    defaults.update(kw)
    return SweepSpec(**defaults)


def test_row_cardinality():
    spec = SweepSpec(ues_per_cell_values=(10,), seeds=(0,), solvers_to_run=("greedy", "greedy-penalty"))
    res = run_sweep(spec)
    assert len(res.rows) == 2 * 2
    assert {r.architecture for r in res.rows} == {Architecture.NFC_RAN, Architecture.CRAN_FEC_ONLY}


def test_matched_baseline_adds_rows():
    res = run_sweep(small_spec(include_matched=True))
    assert len(res.rows) == 2 * 3


def test_unbounded_capacities_accept_everything():
    p = paper_preset().replace(fec_capacity=1e30)
    for name in ("nec_capacity", "fronthaul_capacity"):
        p = p.with_range(name, 1e30, 1e30)
    res = run_sweep(SweepSpec(base_params=p, ues_per_cell_values=(10, 30), seeds=(0, 1), baseline_fec_capacity=1e30))
    assert all(r.mean == 1.0 and r.std == 0.0 for r in res.rows)


def test_per_seed_reproducibility():
    spec = small_spec(solvers_to_run=("greedy", "exact"), include_matched=True)
    res = run_sweep(spec)
    for row in res.rows:
        for seed, rate in zip(spec.seeds, row.per_seed):
            assert run_cell(spec.base_params, row.ues_per_cell, seed, row.architecture, row.solver,
                            spec.baseline_fec_capacity) == rate


def test_stats_match_per_seed_list():
    res = run_sweep(small_spec())
    for row in res.rows:
        assert row.mean == statistics.fmean(row.per_seed)
        assert row.std == statistics.pstdev(row.per_seed)
        assert all(0.0 <= x <= 1.0 for x in row.per_seed)


def test_exact_matched_dominance_on_small_sweep():
    spec = small_spec(solvers_to_run=("exact",), include_matched=True, seeds=tuple(range(6)))
    res = run_sweep(spec)
    for n in spec.ues_per_cell_values:
        full = res.row(n, Architecture.NFC_RAN, "exact")
        matched = res.row(n, Architecture.CRAN_FEC_ONLY_MATCHED, "exact")
        assert all(a >= b for a, b in zip(full.per_seed, matched.per_seed))


def test_parallel_equals_serial():
    spec = small_spec(solvers_to_run=("greedy", "greedy-penalty"))
    assert run_sweep(spec, workers=2).rows == run_sweep(spec).rows


def test_bad_specs():
    with pytest.raises(ValueError):
        small_spec(ues_per_cell_values=())
    with pytest.raises(ValueError):
        small_spec(seeds=())
    with pytest.raises(ValueError):
        small_spec(baseline_fec_capacity=0.0)
    with pytest.raises(ValueError):
        small_spec(solvers_to_run=("annealing",))


def test_spec_round_trip():
    spec = small_spec(include_matched=True)
    assert SweepSpec.from_dict(spec.to_dict()) == spec


def _row(n, arch, mean, std=0.0):
    return SweepRow(n, arch, "greedy", mean, std, (mean,))


def test_emit_table(tmp_path):
    res = SweepResult((_row(20, Architecture.NFC_RAN, 0.5), _row(10, Architecture.CRAN_FEC_ONLY, 1 / 3)))
    path = tmp_path / "t.csv"
    emit_table(res, path)
    lines = path.read_text().splitlines()
    assert lines == [
        ",".join(CSV_HEADER),
        "10,CRAN_FEC_ONLY,greedy,0.333333,0.000000,1",
        "20,NFC_RAN,greedy,0.500000,0.000000,1",
    ]
    first = path.read_bytes()
    emit_table(res, path)
    assert path.read_bytes() == first


def test_emit_table_comment(tmp_path):
    res = SweepResult((_row(10, Architecture.NFC_RAN, 1.0),))
    emit_table(res, tmp_path / "t.csv", comment="hello")
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "# hello"


def test_emit_empty_refuses(tmp_path):
    with pytest.raises(ValueError):
        emit_table(SweepResult(()), tmp_path / "t.csv")
    assert not (tmp_path / "t.csv").exists()


def test_shape_check_helper():
    rows = [_row(10, Architecture.NFC_RAN, 0.9, 0.02), _row(20, Architecture.NFC_RAN, 0.91, 0.02),
            _row(30, Architecture.NFC_RAN, 0.8, 0.0)]
    assert non_increasing_within_noise(rows)
    rows.append(_row(40, Architecture.NFC_RAN, 0.9, 0.0))
    assert not non_increasing_within_noise(rows)
