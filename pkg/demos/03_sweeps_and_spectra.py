#!/usr/bin/env python3
"""Reduced-scale branch sweep and before/after spectra, written as CSVs.

The full-scale (M=500) runs live behind the CLI:

    memlin sweep-branches --config paper.json -o out/
    memlin spectrum       --config paper.json -o out/
"""

import dataclasses
from pathlib import Path

from memlin import ExperimentConfig, run_branch_sweep, run_spectrum_case
from memlin.harness import write_sweep_csv

out = Path("demo_out")
out.mkdir(exist_ok=True)

cfg = dataclasses.replace(
    ExperimentConfig(),
    ensemble_size=24,
    branch_sweep=tuple(range(2, 21, 2)),
    hammerstein_sweep=tuple(range(2, 11)),
)

rows = run_branch_sweep(cfg)
write_sweep_csv(out / "sweep_branches.csv", rows)
print(f"{'type':<14} {'N':>3} {'mults':>5} {'mean dB':>8}")
for r in rows:
    if r.valid and r.type != "proposed-relu":
        print(f"{r.type:<14} {r.branches:>3} {r.mults:>5} {r.mean_sndr_db:>8.2f}")

before, after = run_spectrum_case(cfg, n_branches=16)
before.save_csv(out / "spectrum_before.csv")
after.save_csv(out / "spectrum_after.csv")
print(f"\nwrote {out}/sweep_branches.csv and {out}/spectrum_before|after.csv")
print("feed these to the figures package to regenerate the three plots.")
