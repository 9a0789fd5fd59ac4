"""Success rate vs UEs per cell for NFC-RAN and FEC-only C-RAN.

Runs the paper-faithful comparison (baseline FEC capacity 1e16 c/s) next to
a capacity-matched FEC-only baseline, for both greedy scorings, and writes
CSV + per-seed JSON into --outdir.

    python scripts/run_fig4_sweep.py --seeds 20 --workers 4
"""

import argparse
import time
from pathlib import Path

from nfcran.experiment import SweepSpec, curves_text, emit_table, run_sweep
from nfcran.model import write_json
from nfcran.scenarios import PAPER_UES_PER_CELL, paper_preset, positioning_preset

PRESETS = {"paper": paper_preset, "positioning": positioning_preset}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--preset", choices=sorted(PRESETS), default="paper")
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--log-uniform", action="store_true")
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    spec = SweepSpec(
        base_params=PRESETS[args.preset]().replace(log_uniform=args.log_uniform),
        ues_per_cell_values=PAPER_UES_PER_CELL,
        seeds=tuple(range(args.seeds)),
        solvers_to_run=("greedy", "greedy-penalty"),
        include_matched=True,
    )
    t0 = time.perf_counter()
    result = run_sweep(spec, workers=args.workers)
    stem = f"fig4_{args.preset}{'_log' if args.log_uniform else ''}"
    emit_table(result, outdir / f"{stem}.csv", comment=f"preset={args.preset} seeds={args.seeds}")
    write_json(result.to_dict(), outdir / f"{stem}.json")
    print(curves_text(result))
    print(f"{len(result.rows)} rows in {time.perf_counter() - t0:.1f}s -> {outdir / (stem + '.csv')}")


if __name__ == "__main__":
    main()
