"""``rnnbench`` command line: generate, train, grid, bench, report, gradcheck, catalog.

Configuration is one JSON document. The scale preset fills every field, a
``--config`` file overlays it, and positional ``key=value`` overrides (dotted
paths such as ``grid.hidden_range=1..4``) are applied last. The effective
document is written to ``<out>/resolved_config.json`` and can be fed back
with ``--config`` to repeat the run.
"""

from __future__ import annotations

import argparse
import copy
import difflib
import json
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path
from typing import List, Optional, Sequence

from . import dgp as dgps
from . import harness
from .cells import (CellKind, EXPERIMENT_1, EXPERIMENT_2, catalog_json, check_gradients,
                    parse_cell)
from .dgp import DgpKind, DgpSpec, NoiseSpec
from .training import (ExperimentError, SplitSpec, TrainConfig, derive_seed,
                       fit_normalizer, grid_search, make_windows, retrain_and_test, split,
                       train)

log = logging.getLogger("rnnbench")

COMMANDS = ("generate", "train", "grid", "bench", "report", "gradcheck", "catalog")
CELL_NAMES = [k.value for k in CellKind]
DGP_NAMES = [k.value for k in DgpKind]
GRADCHECK_TOL = 1e-5


class UsageError(Exception):
    """Bad flags, config keys or names (exit code 1)."""


# -- configuration ---------------------------------------------------------------------


def preset_config(scale: str) -> dict:
    """Fully expanded default configuration for a scale preset."""
    if scale not in harness.PRESETS:
        raise UsageError(f"unknown scale {scale!r}; choose from {sorted(harness.PRESETS)}")
    p = harness.PRESETS[scale]
    return {
        "seed": 0,
        "experiment": 2,
        "scale": scale,
        "cells": None,
        "dgps": None,
        "reps": p.reps,
        "tol": harness.DEFAULT_TOL,
        "series": {"length": p.length, "noise_std": p.noise_std},
        "split": asdict(p.split),
        "train": asdict(p.train),
        "grid": {"hidden_range": list(p.hidden_range), "window_cap": p.window_cap,
                 "runs_per_config": p.runs_per_config, "min_success": 0.8},
        "run": {"cell": "LSTM-VANILLA", "dgp": "T", "replicate": 0, "n_H": 4, "w": 5},
    }


def parse_value(text: str):
    """``1..4`` is an inclusive integer range; otherwise JSON, else a bare string."""
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            return list(range(int(lo), int(hi) + 1))
        except ValueError:
            pass
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _merge(base: dict, patch: dict, path: str = ""):
    for key, value in patch.items():
        where = f"{path}{key}"
        if key not in base:
            raise UsageError(f"unknown config key {where!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise UsageError(f"config key {where!r} must be an object")
            _merge(base[key], value, where + ".")
        else:
            base[key] = value


def apply_override(config: dict, assignment: str):
    if "=" not in assignment:
        raise UsageError(f"override {assignment!r} is not of the form key=value")
    dotted, _, raw = assignment.partition("=")
    keys = dotted.strip().split(".")
    patch = parse_value(raw)
    for key in reversed(keys):
        patch = {key: patch}
    _merge(config, patch)


def _check_names(values, valid: Sequence[str], what: str) -> List[str]:
    parse = dgps.parse_dgp if what == "DGP" else parse_cell
    out = []
    upper = {v.upper(): v for v in valid}
    for v in values:
        try:
            out.append(parse(v).value)
            continue
        except ValueError:
            pass
        close = difflib.get_close_matches(str(v).upper(), list(upper), n=1, cutoff=0.6)
        hint = f" Did you mean {upper[close[0]]!r}?" if close else ""
        raise UsageError(f"unknown {what} {v!r}.{hint} Valid names: {', '.join(valid)}")
    return out


def _as_list(value) -> Optional[List[str]]:
    if value is None:
        return None
    if isinstance(value, str):
        return [v for v in value.split(",") if v]
    return list(value)


def validate(config: dict) -> dict:
    """Normalize names and types; raise :class:`UsageError` on anything invalid."""
    cfg = copy.deepcopy(config)
    if cfg["experiment"] not in (1, 2):
        raise UsageError("experiment must be 1 or 2")
    if cfg["cells"] is not None:
        cfg["cells"] = _check_names(_as_list(cfg["cells"]), CELL_NAMES, "cell")
        roster = {k.value for k in (EXPERIMENT_1 if cfg["experiment"] == 1 else EXPERIMENT_2)}
        stray = [c for c in cfg["cells"] if c not in roster]
        if stray:
            raise UsageError(f"cells {stray} are not part of experiment {cfg['experiment']}")
    if cfg["dgps"] is not None:
        cfg["dgps"] = _check_names(_as_list(cfg["dgps"]), DGP_NAMES, "DGP")
    cfg["run"]["cell"] = _check_names([cfg["run"]["cell"]], CELL_NAMES, "cell")[0]
    cfg["run"]["dgp"] = _check_names([cfg["run"]["dgp"]], DGP_NAMES, "DGP")[0]
    hr = cfg["grid"]["hidden_range"]
    if isinstance(hr, int):
        cfg["grid"]["hidden_range"] = [hr]
    try:
        scale_of(cfg)
        TrainConfig(**cfg["train"])
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid configuration: {exc}") from None
    if sum(cfg["split"].values()) != cfg["series"]["length"]:
        raise UsageError("split sizes must sum to series.length")
    return cfg


def scale_of(cfg: dict) -> harness.ScalePreset:
    g = cfg["grid"]
    return harness.ScalePreset(
        name=cfg["scale"], length=int(cfg["series"]["length"]),
        split=SplitSpec(**cfg["split"]), reps=int(cfg["reps"]),
        train=TrainConfig(**cfg["train"]), hidden_range=tuple(int(h) for h in g["hidden_range"]),
        window_cap=g["window_cap"], runs_per_config=int(g["runs_per_config"]),
        noise_std=float(cfg["series"]["noise_std"]), min_success=float(g["min_success"]),
    )


def resolve(args) -> dict:
    """Preset, then config file, then flags, then positional overrides."""
    file_cfg = {}
    if args.config:
        try:
            file_cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(file_cfg, dict):
            raise UsageError("config file must hold a JSON object")
    scale = args.scale or file_cfg.get("scale", "desk")
    cfg = preset_config(scale)
    _merge(cfg, {k: v for k, v in file_cfg.items() if k != "scale"})
    flags = {
        "seed": args.seed, "experiment": getattr(args, "experiment", None),
        "reps": getattr(args, "reps", None), "cells": getattr(args, "cells", None),
        "dgps": getattr(args, "dgps", None), "tol": getattr(args, "tol", None),
    }
    _merge(cfg, {k: v for k, v in flags.items() if v is not None})
    run = {"cell": getattr(args, "cell", None), "dgp": getattr(args, "dgp", None),
           "replicate": getattr(args, "replicate", None), "n_H": getattr(args, "n_h", None),
           "w": getattr(args, "w", None)}
    _merge(cfg["run"], {k: v for k, v in run.items() if v is not None})
    for assignment in args.overrides or []:
        apply_override(cfg, assignment)
    return validate(cfg)


def _dump(path: Path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


# -- commands -------------------------------------------------------------------------


def _series(cfg: dict, kind: str, rep: int) -> dgps.SeriesReplicate:
    spec = DgpSpec(kind, length=cfg["series"]["length"],
                   noise=NoiseSpec(0.0, cfg["series"]["noise_std"]))
    seed = harness.replicate_seed(cfg["seed"], dgps.parse_dgp(kind), rep)
    return dgps.generate(spec.with_seed(seed), rep)


def cmd_generate(cfg, out: Path, args) -> int:
    kinds = cfg["dgps"] or DGP_NAMES
    for kind in kinds:
        for rep in range(cfg["reps"]):
            dgps.save_replicate(_series(cfg, kind, rep), out / "series")
    print(f"wrote {len(kinds) * cfg['reps']} series to {out / 'series'}")
    return 0


def cmd_train(cfg, out: Path, args) -> int:
    run = cfg["run"]
    scale = scale_of(cfg)
    values = _series(cfg, run["dgp"], run["replicate"]).values
    job_seed = derive_seed(cfg["seed"], run["cell"], run["dgp"], run["replicate"])
    tr, va, _ = split(values, scale.split)
    norm = fit_normalizer(tr)
    fit = train(run["cell"], make_windows(norm.apply(tr), run["w"]), run["n_H"], scale.train,
                seed=derive_seed(job_seed, "train", run["n_H"], run["w"]),
                validation=make_windows(norm.apply(va), run["w"]))
    final = retrain_and_test(run["cell"], (run["n_H"], run["w"]), values, scale.train,
                             scale.split, seed=job_seed)
    report = {"cell": run["cell"], "dgp": run["dgp"], "replicate": run["replicate"],
              "n_H": run["n_H"], "w": run["w"], "train_curve": fit.train_curve,
              "val_rmse": fit.val_rmse, "test_rmse": final.test_rmse,
              "failed": fit.failed or final.failed, "error": fit.error or final.error}
    _dump(out / "train_result.json", report)
    print(f"{run['cell']} on {run['dgp']}: val RMSE {fit.val_rmse}, test RMSE {final.test_rmse}")
    return 2 if report["failed"] else 0


def cmd_grid(cfg, out: Path, args) -> int:
    run = cfg["run"]
    scale = scale_of(cfg)
    kind = dgps.parse_dgp(run["dgp"])
    values = _series(cfg, kind, run["replicate"]).values
    job_seed = derive_seed(cfg["seed"], run["cell"], kind.value, run["replicate"])
    grid = grid_search(run["cell"], values, scale.grid_for(kind), scale.train, scale.split,
                       seed=job_seed)
    final = retrain_and_test(run["cell"], grid.best, values, scale.train, scale.split,
                             seed=job_seed)
    key = dict(experiment=cfg["experiment"], kind=run["cell"], dgp=kind.value,
               replicate=run["replicate"])
    harness.write_records([harness._record(key, r) for r in grid.runs + [final]], out)
    rows = [[s.n_H, s.w, "" if s.mean_val_rmse is None else repr(s.mean_val_rmse),
             s.successes, s.runs, s.complexity] for s in grid.stats]
    (out / "grid.csv").write_text(harness._csv_text(
        ["n_H", "w", "mean_val_rmse", "successes", "runs", "complexity"], rows))
    print(f"best (n_H, w) = {grid.best}; test RMSE {final.test_rmse}")
    return 2 if final.failed else 0


def cmd_bench(cfg, out: Path, args) -> int:
    spec = harness.ExperimentSpec(cfg["experiment"], cells=cfg["cells"], dgps=cfg["dgps"],
                                  reps=cfg["reps"], scale=scale_of(cfg))
    outcome = harness.run_experiment(spec, seed=cfg["seed"], jobs=args.jobs)
    harness.write_records(outcome.records, out)
    _dump(out / "failures.json", outcome.failures)
    if not outcome.results:
        log.error("every job failed; see failures.json")
        return 2
    harness.emit_report(outcome.results, out, tol=cfg["tol"])
    print(f"{len(outcome.results)} cell/DGP results, {len(outcome.failures)} failures -> {out}")
    return 0


def cmd_report(cfg, out: Path, args) -> int:
    src = Path(args.results) if args.results else out / "results.jsonl"
    try:
        records = harness.read_records(src)
    except OSError as exc:
        raise UsageError(f"cannot read {src}: {exc}") from None
    results = harness.aggregate(records)
    if not results:
        log.error("no successful retrain records in %s", src)
        return 2
    harness.emit_report(results, out, tol=cfg["tol"])
    print(f"report for {len(results)} cell/DGP results -> {out}")
    return 0


def cmd_gradcheck(cfg, out: Path, args) -> int:
    kinds = CELL_NAMES if args.all or not cfg["cells"] else cfg["cells"]
    rows, worst = [], 0.0
    for kind in kinds:
        err = check_gradients(kind, n_H=args.hidden, steps=args.steps, seed=cfg["seed"])
        worst = max(worst, err)
        ok = err < GRADCHECK_TOL
        rows.append([kind, f"{err:.3e}", "ok" if ok else "FAIL"])
        print(f"{kind:14s} {err:.3e} {'ok' if ok else 'FAIL'}")
    (out / "gradcheck.csv").write_text(harness._csv_text(["cell", "max_rel_error", "status"],
                                                         rows))
    return 0 if worst < GRADCHECK_TOL else 2


def cmd_catalog(cfg, out: Path, args) -> int:
    text = catalog_json()
    (out / "catalog.json").write_text(text + "\n")
    print(text)
    return 0


HANDLERS = {"generate": cmd_generate, "train": cmd_train, "grid": cmd_grid,
            "bench": cmd_bench, "report": cmd_report, "gradcheck": cmd_gradcheck,
            "catalog": cmd_catalog}


# -- argument parsing ------------------------------------------------------------------


COMMAND_HELP = {
    "generate": "write Monte Carlo replicates as CSV",
    "train": "train one cell on one replicate with a fixed (n_H, w)",
    "grid": "grid-search one cell on one replicate, then retrain and test",
    "bench": "run an experiment and write the full report",
    "report": "rebuild tables and figures from results.jsonl",
    "gradcheck": "finite-difference gradient check of the cells",
    "catalog": "print the cell catalog as JSON",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _names_epilog() -> str:
    return ("DGP names: " + ", ".join(DGP_NAMES) + "\n\nCell names: " + ", ".join(CELL_NAMES)
            + "\n\nOverrides are dotted key=value pairs, e.g. grid.hidden_range=1..4 "
              "train.max_epochs=50 cells=ELMAN,GRU.")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.RawDescriptionHelpFormatter
    parser = _Parser(prog="rnnbench", description="Benchmark recurrent cells on synthetic "
                     "time series.", epilog=_names_epilog(), formatter_class=fmt)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, help=COMMAND_HELP[name],
                           epilog=_names_epilog(), formatter_class=fmt)
        p.add_argument("overrides", nargs="*", metavar="key=value")
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output directory (default: $RNNBENCH_OUT)")
        p.add_argument("--seed", type=int)
        p.add_argument("--scale", choices=sorted(harness.PRESETS))
        if name in ("generate", "bench", "gradcheck", "report"):
            p.add_argument("--cells", help="comma-separated cell names")
            p.add_argument("--dgps", help="comma-separated DGP names")
        if name in ("generate", "bench"):
            p.add_argument("--reps", type=int)
        if name in ("bench", "grid", "report"):
            p.add_argument("--experiment", type=int, choices=(1, 2))
            p.add_argument("--tol", type=float, help="RMSE tie tolerance for stars")
        if name in ("train", "grid"):
            p.add_argument("--cell")
            p.add_argument("--dgp")
            p.add_argument("--replicate", type=int)
        if name == "train":
            p.add_argument("--n-h", type=int, dest="n_h")
            p.add_argument("--w", type=int)
        if name == "bench":
            p.add_argument("--jobs", type=int, default=None,
                           help="worker processes (default: CPU count)")
        if name == "report":
            p.add_argument("--results", help="results.jsonl to rebuild from")
        if name == "gradcheck":
            p.add_argument("--all", action="store_true", help="check every cell")
            p.add_argument("--hidden", type=int, default=3)
            p.add_argument("--steps", type=int, default=5)
    return parser


def out_dir(args) -> Path:
    chosen = args.out or os.environ.get("RNNBENCH_OUT")
    if not chosen:
        raise UsageError("no output directory: pass --out or set RNNBENCH_OUT")
    return Path(chosen)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help
            return int(exc.code or 0)
        if args.command is None:
            parser.print_help()
            return 1
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        cfg = resolve(args)
        out = out_dir(args)
        out.mkdir(parents=True, exist_ok=True)
        _dump(out / "resolved_config.json", cfg)
        return HANDLERS[args.command](cfg, out, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ExperimentError, ArithmeticError, OSError, ValueError) as exc:
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
