"""Run the cell x process grid, aggregate replicates, star the winners, write reports."""

from __future__ import annotations

import csv
import enum
import io
import json
import logging
import os
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import dgp as dgps
from .cells import (EXPERIMENT_1, EXPERIMENT_2, REFERENCE_DIMS, CellDims, CellKind,
                    param_count, parse_cell, theoretic_complexity)
from .dgp import BEHAVIORS, DgpKind, DgpSpec, NoiseSpec, parse_dgp
from .training import (ExperimentError, GridSpec, SplitSpec, TrainConfig, derive_seed,
                       grid_search, retrain_and_test)

log = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_TOL",
    "BenchmarkResult",
    "ExperimentOutcome",
    "ExperimentSpec",
    "GuidelineRow",
    "GuidelineTable",
    "IncompleteBehaviorError",
    "ScalePreset",
    "Star",
    "aggregate",
    "behavior_mean",
    "build_guideline",
    "emit_report",
    "run_experiment",
    "select_stars",
    "summary_rows",
]

# Half a unit in the fourth decimal, the precision of the published RMSEs.
DEFAULT_TOL = 5e-5

ROSTERS = {1: EXPERIMENT_1, 2: EXPERIMENT_2}


class IncompleteBehaviorError(KeyError):
    """A behavior mean was requested but some of its processes have no result."""


@dataclass(frozen=True)
class ScalePreset:
    name: str
    length: int
    split: SplitSpec
    reps: int
    train: TrainConfig
    hidden_range: Tuple[int, ...]
    window_cap: Optional[int]
    runs_per_config: int
    noise_std: float = 0.2
    min_success: float = 0.8

    def grid_for(self, kind: DgpKind) -> GridSpec:
        wmax = dgps.WINDOW_MAX[kind]
        if self.window_cap is not None:
            wmax = min(wmax, self.window_cap)
        return GridSpec(tuple(self.hidden_range), tuple(range(1, wmax + 1)),
                        self.runs_per_config, self.min_success)


PRESETS = {
    "paper": ScalePreset("paper", 3000, SplitSpec(2000, 500, 500), 30, TrainConfig(),
                         tuple(range(1, 11)), None, 10),
    "desk": ScalePreset("desk", 600, SplitSpec(400, 100, 100), 3,
                        TrainConfig(max_epochs=100), tuple(range(1, 5)), 5, 3),
}


@dataclass(frozen=True)
class ExperimentSpec:
    experiment: int = 2
    cells: Optional[Tuple[CellKind, ...]] = None
    dgps: Optional[Tuple[DgpKind, ...]] = None
    reps: Optional[int] = None
    scale: ScalePreset = PRESETS["desk"]

    def __post_init__(self):
        if self.experiment not in ROSTERS:
            raise ValueError(f"experiment must be 1 or 2, got {self.experiment}")
        roster = ROSTERS[self.experiment]
        cells = tuple(roster) if self.cells is None else tuple(parse_cell(c) for c in self.cells)
        stray = [c.value for c in cells if c not in roster]
        if stray:
            raise ValueError(f"cells {stray} are not in the experiment {self.experiment} roster")
        object.__setattr__(self, "cells", cells)
        kinds = tuple(DgpKind) if self.dgps is None else tuple(parse_dgp(d) for d in self.dgps)
        object.__setattr__(self, "dgps", kinds)
        if self.reps is None:
            object.__setattr__(self, "reps", self.scale.reps)
        if self.reps < 1:
            raise ValueError("reps must be >= 1")


# -- jobs -----------------------------------------------------------------------------


def replicate_seed(top_seed: int, kind: DgpKind, rep: int) -> int:
    """Noise seed of replicate ``rep``: a per-process base plus the replicate index.

    Independent of the experiment, so both experiments see the same series.
    """
    base = derive_seed(top_seed, "series", kind.value) % (2 ** 62)
    return base + rep


def _job(args) -> Tuple[List[dict], Optional[dict]]:
    experiment, cell, kind, rep, scale, top_seed = args
    spec = DgpSpec(kind, length=scale.length, noise=NoiseSpec(0.0, scale.noise_std))
    key = dict(experiment=experiment, kind=cell.value, dgp=kind.value, replicate=rep)
    try:
        series = dgps.generate(spec.with_seed(replicate_seed(top_seed, kind, rep)), rep).values
        job_seed = derive_seed(top_seed, cell.value, kind.value, rep)
        grid = grid_search(cell, series, scale.grid_for(kind), scale.train, scale.split,
                           seed=job_seed)
        final = retrain_and_test(cell, grid.best, series, scale.train, scale.split,
                                 seed=job_seed)
    except (ExperimentError, ArithmeticError, ValueError) as exc:
        return [], {**key, "error": f"{type(exc).__name__}: {exc}"}
    records = [_record(key, r) for r in grid.runs + [final]]
    failure = None
    if final.failed:
        failure = {**key, "error": final.error}
    return records, failure


def _record(key: dict, run) -> dict:
    return {
        **key,
        "phase": run.phase,
        "n_H": run.n_H,
        "w": run.w,
        "run_index": run.run_index,
        "seed": run.seed,
        "val_rmse": run.val_rmse,
        "test_rmse": run.test_rmse,
        "epochs": run.epochs,
        "failed": run.failed,
        "wall_time": run.wall_time,
    }


TIMING_KEYS = ("wall_time",)


@dataclass
class ExperimentOutcome:
    records: List[dict]
    results: List["BenchmarkResult"]
    failures: List[dict]


def run_experiment(spec: ExperimentSpec, seed: int = 0, jobs: Optional[int] = None
                   ) -> ExperimentOutcome:
    """Grid search then retrain/test every (cell, process, replicate)."""
    tasks = [(spec.experiment, c, k, r, spec.scale, seed)
             for c in spec.cells for k in spec.dgps for r in range(spec.reps)]
    jobs = jobs or os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_job, tasks))
    else:
        outcomes = [_job(t) for t in tasks]
    records, failures = [], []
    for recs, fail in outcomes:
        records.extend(recs)
        if fail is not None:
            failures.append(fail)
    return ExperimentOutcome(records, aggregate(records), failures)


# -- aggregation ------------------------------------------------------------------------


@dataclass(frozen=True)
class BenchmarkResult:
    experiment: int
    cell: str
    dgp: str
    mean_test_rmse: float
    std_test_rmse: float
    reps: int
    n_H: int
    w: int
    empirical_complexity: int


def _mode(configs: Sequence[Tuple[int, int]]) -> Tuple[int, int]:
    counts = Counter(configs)
    top = max(counts.values())
    return min(c for c, n in counts.items() if n == top)


def aggregate(records: Iterable[dict]) -> List[BenchmarkResult]:
    """Mean/std of retrained test RMSE over replicates, per (experiment, cell, process)."""
    groups: Dict[tuple, list] = defaultdict(list)
    for r in records:
        if r["phase"] == "retrain" and not r["failed"] and r["test_rmse"] is not None:
            groups[(r["experiment"], r["kind"], r["dgp"])].append(r)
    out = []
    for (exp, cell, kind), rs in sorted(groups.items()):
        scores = np.array([r["test_rmse"] for r in rs])
        n_H, w = _mode([(r["n_H"], r["w"]) for r in rs])
        out.append(BenchmarkResult(
            exp, cell, kind, float(scores.mean()), float(scores.std()), len(rs), n_H, w,
            param_count(cell, CellDims(n_I=1, n_H=n_H)).params,
        ))
    return out


def behavior_mean(results: Iterable[BenchmarkResult], behavior: str,
                  require_complete: bool = True) -> float:
    """Unweighted mean of the per-process mean RMSEs of one cell within a behavior."""
    kinds = {k.value for k in BEHAVIORS[behavior]}
    by_dgp = {r.dgp: r.mean_test_rmse for r in results if r.dgp in kinds}
    if not by_dgp or (require_complete and set(by_dgp) != kinds):
        missing = sorted(kinds - set(by_dgp))
        raise IncompleteBehaviorError(f"{behavior}: no results for {missing}")
    return float(np.mean(list(by_dgp.values())))


# -- stars ---------------------------------------------------------------------------------


class Star(str, enum.Enum):
    NONE = ""
    GRAY = "gray"
    YELLOW = "yellow"


def select_stars(row: Mapping[str, Tuple[float, float]], tol: float = DEFAULT_TOL
                 ) -> Dict[str, Star]:
    """Star the cells of one table row.

    ``row`` maps cell name to ``(rmse, empirical complexity)``. Cells within
    ``tol`` of the best RMSE are tied; the lightest tied cell (then the
    alphabetically first) gets the yellow star, the rest of the tie gray.
    """
    if not row:
        raise ValueError("cannot star an empty row")
    best = min(r for r, _ in row.values())
    tied = [c for c, (r, _) in row.items() if r <= best + tol]
    yellow = min(tied, key=lambda c: (row[c][1], c))
    return {c: Star.YELLOW if c == yellow else Star.GRAY if c in tied else Star.NONE
            for c in row}


@dataclass
class GuidelineRow:
    behavior: str
    label: str
    values: Dict[str, Tuple[float, float]]
    stars: Dict[str, Star]
    complete: bool = True

    @property
    def yellow(self) -> str:
        return next(c for c, s in self.stars.items() if s is Star.YELLOW)


@dataclass
class GuidelineTable:
    experiment: int
    cells: List[str]
    rows: List[GuidelineRow] = field(default_factory=list)

    def mean_rows(self) -> Dict[str, GuidelineRow]:
        return {r.behavior: r for r in self.rows if r.label == "Mean"}


def build_guideline(results: Iterable[BenchmarkResult], experiment: int,
                    tol: float = DEFAULT_TOL) -> GuidelineTable:
    """One row per process plus a Mean row per behavior, starred."""
    results = [r for r in results if r.experiment == experiment]
    roster = [c.value for c in ROSTERS[experiment]]
    present = {r.cell for r in results}
    table = GuidelineTable(experiment, [c for c in roster if c in present])
    by_key = {(r.cell, r.dgp): r for r in results}
    for behavior, kinds in BEHAVIORS.items():
        names = [k.value for k in kinds]
        seen = [d for d in names if any((c, d) in by_key for c in table.cells)]
        if not seen:
            continue
        for d in seen:
            vals = {c: (by_key[c, d].mean_test_rmse, by_key[c, d].empirical_complexity)
                    for c in table.cells if (c, d) in by_key}
            table.rows.append(GuidelineRow(behavior, d, vals, select_stars(vals, tol)))
        means = {}
        for c in table.cells:
            mine = [by_key[c, d] for d in seen if (c, d) in by_key]
            if not mine:
                continue
            rmse = behavior_mean(mine, behavior, require_complete=False)
            means[c] = (rmse, float(np.mean([r.empirical_complexity for r in mine])))
        table.rows.append(GuidelineRow(behavior, "Mean", means, select_stars(means, tol),
                                       complete=len(seen) == len(names)))
    return table


def summary_rows(best: Mapping[str, Mapping[int, Tuple[str, float, float]]],
                 tol: float = DEFAULT_TOL) -> List[dict]:
    """Summary layout: per behavior, each experiment's winner and the recommendation.

    ``best[behavior][experiment] = (cell, rmse, complexity)``; the
    recommendation applies the star rule to the experiment winners.
    """
    rows = []
    for behavior in BEHAVIORS:
        if behavior not in best:
            continue
        entry = best[behavior]
        row = {"behavior": behavior}
        candidates = {}
        for e in (1, 2):
            if e in entry:
                cell, rmse, cx = entry[e]
                row[f"exp{e}_cell"], row[f"exp{e}_rmse"] = cell, rmse
                candidates[cell] = (rmse, cx)
            else:
                row[f"exp{e}_cell"], row[f"exp{e}_rmse"] = "", None
        stars = select_stars(candidates, tol)
        row["recommended"] = next(c for c, s in stars.items() if s is Star.YELLOW)
        rows.append(row)
    return rows


# -- report files ---------------------------------------------------------------------------

_BEHAVIOR_TITLES = {"deterministic": "Deterministic", "random-walk": "Random-walk",
                    "nonlinear": "Nonlinear", "long-memory": "Long-memory",
                    "chaotic": "Chaotic"}


def fmt_rmse(x: Optional[float]) -> str:
    return "" if x is None else f"{x:.4g}"


def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _guideline_files(table: GuidelineTable) -> Tuple[str, str]:
    header = ["behavior", "dgp"] + table.cells
    csv_rows, md = [], []
    md.append(f"# Guideline table, experiment {table.experiment}\n")
    md.append("Yellow star: smallest error and smallest empirical complexity. "
              "Gray star: tied error, heavier cell.\n")
    md.append("| " + " | ".join(["Behavior", "DGP"] + table.cells) + " |")
    md.append("|" + "---|" * len(header))
    glyph = {Star.YELLOW: "★", Star.GRAY: "☆", Star.NONE: ""}
    for row in table.rows:
        label = row.label if row.complete else f"{row.label} (partial)"
        csv_rows.append([row.behavior, label] + [row.stars.get(c, Star.NONE).value
                                                  for c in table.cells])
        label_md = f"**{label}**" if row.label == "Mean" else label
        md.append("| " + " | ".join([_BEHAVIOR_TITLES[row.behavior], label_md]
                                    + [glyph[row.stars.get(c, Star.NONE)]
                                       for c in table.cells]) + " |")
    return _csv_text(header, csv_rows), "\n".join(md) + "\n"


def _summary_files(rows: List[dict]) -> Tuple[str, str]:
    header = ["behavior", "exp1_best_cell", "exp1_rmse", "exp2_best_cell", "exp2_rmse",
              "recommended_cell"]
    body = [[_BEHAVIOR_TITLES[r["behavior"]], r["exp1_cell"], fmt_rmse(r["exp1_rmse"]),
             r["exp2_cell"], fmt_rmse(r["exp2_rmse"]), r["recommended"]] for r in rows]
    md = ["# Summary of the two experiments\n",
          "| Behavior | Exp. 1 best cell | RMSE | Exp. 2 best cell | RMSE | Recommended cell |",
          "|---|---|---|---|---|---|"]
    md += ["| " + " | ".join(b) + " |" for b in body]
    return _csv_text(header, body), "\n".join(md) + "\n"


def figure_order(cells: Iterable[str], experiment: int) -> List[str]:
    roster = [c.value for c in ROSTERS[experiment]]
    return sorted(cells, key=lambda c: (theoretic_complexity(c, REFERENCE_DIMS),
                                        roster.index(c) if c in roster else 99, c))


def _figure_rows(results: List[BenchmarkResult], behavior: str) -> List[list]:
    kinds = [k.value for k in BEHAVIORS[behavior]]
    rows = []
    for exp in sorted({r.experiment for r in results}):
        mine = {(r.cell, r.dgp): r for r in results if r.experiment == exp}
        cells = figure_order({c for c, _ in mine}, exp)
        for c in cells:
            for d in kinds:
                r = mine.get((c, d))
                if r is None:
                    continue
                rows.append([exp, c, d, theoretic_complexity(c, REFERENCE_DIMS),
                             repr(r.mean_test_rmse), repr(r.std_test_rmse), r.reps])
    return rows


def _render_svg(rows: List[list], behavior: str, path: Path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "rnnbench"
    fig, axes = plt.subplots(1, len({r[0] for r in rows}), squeeze=False,
                             figsize=(11, 4))
    for ax, exp in zip(axes[0], sorted({r[0] for r in rows})):
        mine = [r for r in rows if r[0] == exp]
        cells = list(dict.fromkeys(r[1] for r in mine))
        for d in dict.fromkeys(r[2] for r in mine):
            ys = {r[1]: float(r[4]) for r in mine if r[2] == d}
            xs = [i for i, c in enumerate(cells) if c in ys]
            ax.plot(xs, [ys[cells[i]] for i in xs], marker="o", label=d)
        means = [np.mean([float(r[4]) for r in mine if r[1] == c]) for c in cells]
        ax.bar(range(len(cells)), means, color="0.85", zorder=0, label="mean")
        ax.set_xticks(range(len(cells)))
        ax.set_xticklabels(cells, rotation=90, fontsize=7)
        ax.set_ylabel("test RMSE")
        ax.set_title(f"{_BEHAVIOR_TITLES[behavior]}, experiment {exp}")
        ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def emit_report(results: Sequence[BenchmarkResult], out_dir, tol: float = DEFAULT_TOL,
                figures: bool = True) -> List[Path]:
    """Write guideline tables, the summary table and per-behavior figure data."""
    results = list(results)
    if not results:
        raise ValueError("no benchmark results to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name, text):
        path = out / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        written.append(path)

    best: Dict[str, Dict[int, tuple]] = defaultdict(dict)
    for exp in sorted({r.experiment for r in results}):
        table = build_guideline(results, exp, tol)
        csv_text, md_text = _guideline_files(table)
        put(f"guideline_exp{exp}.csv", csv_text)
        put(f"guideline_exp{exp}.md", md_text)
        for behavior, row in table.mean_rows().items():
            cell = row.yellow
            best[behavior][exp] = (cell, *row.values[cell])
    csv_text, md_text = _summary_files(summary_rows(best, tol))
    put("summary.csv", csv_text)
    put("summary.md", md_text)

    for behavior in BEHAVIORS:
        rows = _figure_rows(results, behavior)
        if not rows:
            continue
        put(f"figures/{behavior}.csv", _csv_text(
            ["experiment", "cell", "dgp", "theoretic_complexity", "mean_test_rmse",
             "std_test_rmse", "reps"], rows))
        if figures:
            path = out / "figures" / f"{behavior}.svg"
            _render_svg(rows, behavior, path)
            written.append(path)
    return written


# -- persistence ------------------------------------------------------------------------------


def write_records(records: Iterable[dict], out_dir) -> Tuple[Path, Path]:
    """``results.jsonl`` (reproducible fields) and ``timings.jsonl`` (wall clock)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    res_lines, time_lines = [], []
    for r in records:
        stable = {k: v for k, v in r.items() if k not in TIMING_KEYS}
        res_lines.append(json.dumps(stable, sort_keys=True))
        timing = {k: r[k] for k in ("experiment", "kind", "dgp", "replicate", "phase",
                                    "n_H", "w", "run_index")}
        timing.update({k: r[k] for k in TIMING_KEYS if k in r})
        time_lines.append(json.dumps(timing, sort_keys=True))
    res_path, time_path = out / "results.jsonl", out / "timings.jsonl"
    res_path.write_text("".join(line + "\n" for line in res_lines))
    time_path.write_text("".join(line + "\n" for line in time_lines))
    return res_path, time_path


def read_records(path) -> List[dict]:
    lines = Path(path).read_text().splitlines()
    return [json.loads(line) for line in lines if line.strip()]
