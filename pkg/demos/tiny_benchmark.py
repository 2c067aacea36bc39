"""
A tiny benchmark, start to finish
=================================

Three cells, two processes, one replicate, and a very small grid. The output
directory gets the same report files as a full run.
"""

import dataclasses
from pathlib import Path

from rnnbench import PRESETS, ExperimentSpec, emit_report, run_experiment
from rnnbench.harness import aggregate, build_guideline, write_records
from rnnbench.training import TrainConfig

# Shrink the desk preset further: 20 epochs, hidden sizes 1..2, windows 1..2.
tiny = dataclasses.replace(PRESETS["desk"], name="tiny", reps=1, train=TrainConfig(max_epochs=20),
                           hidden_range=(1, 2), window_cap=2, runs_per_config=2)
spec = ExperimentSpec(experiment=2, cells=("ELMAN", "GRU", "MGU-SLIM3"), dgps=("SAR2", "HENON"),
                      scale=tiny)

outcome = run_experiment(spec, seed=7, jobs=1)
print(len(outcome.records), "training runs,", len(outcome.failures), "failed jobs")

# Each result is one (cell, process) pair averaged over replicates.
results = aggregate(outcome.records)
for r in results:
    print(f"{r.cell:10s} {r.dgp:6s} test RMSE {r.mean_test_rmse:.4f} at (n_H, w) = ({r.n_H}, {r.w})")

# Stars mark the best cell per process; ties go to the smaller cell.
table = build_guideline(results, experiment=2)
# A Mean row over a subset of a behavior's processes is flagged as partial.
for row in table.rows:
    label = row.label if row.complete else row.label + " (partial)"
    print(f"{row.behavior:13s} {label:16s} yellow star: {row.yellow}")

out = Path("tiny_bench")
write_records(outcome.records, out)
emit_report(results, out)
print(sorted(p.name for p in out.iterdir()))
