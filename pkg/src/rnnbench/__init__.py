"""Recurrent cells, synthetic series and a benchmark harness, in plain numpy."""

from .autodiff import DimensionError, NumericError, Parameter, Tape, Tensor, grad_check
from .cells import (EXPERIMENT_1, EXPERIMENT_2, CellDims, CellKind, CellParams,
                    check_gradients, init_params, param_count, predict, theoretic_complexity)
from .dgp import BEHAVIORS, DgpKind, DgpSpec, GenerationDiverged, NoiseSpec, generate, replicate
from .harness import (BenchmarkResult, ExperimentSpec, PRESETS, emit_report, run_experiment,
                      select_stars)
from .training import (ExperimentError, GridSpec, SplitSpec, TrainConfig, grid_search,
                       retrain_and_test, train)

__version__ = "0.1.0"

__all__ = [
    "BEHAVIORS", "BenchmarkResult", "CellDims", "CellKind", "CellParams", "DgpKind", "DgpSpec",
    "DimensionError", "EXPERIMENT_1", "EXPERIMENT_2", "ExperimentError", "ExperimentSpec",
    "GenerationDiverged", "GridSpec", "NoiseSpec", "NumericError", "PRESETS", "Parameter",
    "SplitSpec", "Tape", "Tensor", "TrainConfig", "check_gradients", "emit_report", "generate",
    "grad_check", "grid_search", "init_params", "param_count", "predict", "replicate",
    "retrain_and_test", "run_experiment", "select_stars", "theoretic_complexity", "train",
]
