"""Split, normalize, window, train with Adam, grid-search, retrain, score.

All RMSEs are on the min-max normalized scale of whichever partition the
normalizer was fit on (train for grid search, train+validation for the
final retrain).
"""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import autodiff as ad
from .autodiff import Tape
from .cells import CellDims, CellParams, init_params, param_count, parse_cell, predict

__all__ = [
    "AdamState",
    "ConfigStats",
    "ExperimentError",
    "GridResult",
    "GridSpec",
    "Normalizer",
    "RunResult",
    "SplitSpec",
    "TrainConfig",
    "WindowedDataset",
    "adam_step",
    "derive_seed",
    "evaluate_rmse",
    "fit_normalizer",
    "grid_search",
    "make_windows",
    "retrain_and_test",
    "rmse",
    "select_config",
    "split",
    "train",
]


class ExperimentError(RuntimeError):
    """Every configuration of a grid failed."""


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from an arbitrary tuple of labels."""
    text = "|".join(str(p) for p in parts).encode()
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "big") >> 1


# -- data preparation ----------------------------------------------------------------


@dataclass(frozen=True)
class SplitSpec:
    train: int = 2000
    validation: int = 500
    test: int = 500

    @property
    def total(self) -> int:
        return self.train + self.validation + self.test


def split(series, spec: SplitSpec = SplitSpec()):
    series = np.asarray(series, dtype=np.float64)
    if spec.total != series.size:
        raise ValueError(f"split {spec.train}/{spec.validation}/{spec.test} does not "
                         f"sum to series length {series.size}")
    a, b = spec.train, spec.train + spec.validation
    return series[:a], series[a:b], series[b:]


@dataclass(frozen=True)
class Normalizer:
    min: float
    max: float

    def __post_init__(self):
        if not self.max > self.min:
            raise ValueError("degenerate scale: max must exceed min")

    def apply(self, values):
        return (np.asarray(values, dtype=np.float64) - self.min) / (self.max - self.min)

    def invert(self, values):
        return np.asarray(values, dtype=np.float64) * (self.max - self.min) + self.min


def fit_normalizer(train) -> Normalizer:
    train = np.asarray(train, dtype=np.float64)
    lo, hi = float(train.min()), float(train.max())
    if not hi > lo:
        raise ValueError("degenerate scale: training partition is constant")
    return Normalizer(lo, hi)


@dataclass
class WindowedDataset:
    inputs: np.ndarray   # (m, w)
    targets: np.ndarray  # (m,)
    window: int
    horizon: int = 1

    def __len__(self):
        return self.targets.size


def make_windows(values, w: int, horizon: int = 1) -> WindowedDataset:
    values = np.asarray(values, dtype=np.float64)
    if w < 1 or horizon < 1:
        raise ValueError("window and horizon must be >= 1")
    m = values.size - w - horizon + 1
    if m < 1:
        raise ValueError(f"partition of length {values.size} too short for window {w}")
    inputs = np.lib.stride_tricks.sliding_window_view(values, w)[:m].copy()
    targets = values[w + horizon - 1: w + horizon - 1 + m].copy()
    return WindowedDataset(inputs, targets, w, horizon)


def rmse(pred, target) -> float:
    pred = np.asarray(pred, dtype=np.float64).ravel()
    target = np.asarray(target, dtype=np.float64).ravel()
    return float(np.sqrt(np.mean((target - pred) ** 2)))


# -- optimizer -----------------------------------------------------------------------


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 100
    max_epochs: int = 500
    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.batch_size < 1 or self.max_epochs < 0 or self.learning_rate <= 0:
            raise ValueError("invalid training configuration")


@dataclass
class AdamState:
    t: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(params: CellParams, grads: Dict[str, np.ndarray], state: AdamState,
              config: TrainConfig = TrainConfig()) -> AdamState:
    """In-place bias-corrected Adam update; frozen parameters are skipped."""
    state.t += 1
    b1, b2 = config.beta1, config.beta2
    c1 = 1.0 - b1 ** state.t
    c2 = 1.0 - b2 ** state.t
    for p in params.values():
        if not p.trainable:
            continue
        g = grads.get(p.name)
        if g is None:
            continue
        m = state.m.get(p.name)
        if m is None:
            m = state.m[p.name] = np.zeros_like(p.value)
            state.v[p.name] = np.zeros_like(p.value)
        v = state.v[p.name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p.value -= config.learning_rate * (m / c1) / (np.sqrt(v / c2) + config.eps)
    return state


# -- training -------------------------------------------------------------------------


@dataclass
class RunResult:
    kind: str
    n_H: int
    w: int
    seed: int
    phase: str = "grid"
    run_index: int = 0
    train_curve: List[float] = field(default_factory=list)
    val_rmse: Optional[float] = None
    test_rmse: Optional[float] = None
    epochs: int = 0
    wall_time: float = 0.0
    failed: bool = False
    error: Optional[str] = None
    params: Optional[CellParams] = field(default=None, repr=False, compare=False)


def forecast(params: CellParams, inputs: np.ndarray) -> np.ndarray:
    tape = Tape()
    return predict(params, tape.constant(inputs), tape).value[:, 0]


def evaluate_rmse(params: CellParams, data: WindowedDataset) -> float:
    return rmse(forecast(params, data.inputs), data.targets)


def train(kind, dataset: WindowedDataset, n_H: int, config: TrainConfig = TrainConfig(),
          seed: int = 0, validation: Optional[WindowedDataset] = None,
          params: Optional[CellParams] = None) -> RunResult:
    """Mini-batch Adam on MSE for ``config.max_epochs`` epochs.

    Samples are reshuffled every epoch from a generator seeded by ``seed``.
    A non-finite value anywhere marks the run failed instead of raising.
    """
    kind = parse_cell(kind)
    start = time.perf_counter()
    if params is None:
        params = init_params(kind, CellDims(n_I=1, n_H=n_H), seed=seed)
    result = RunResult(kind.value, n_H, dataset.window, seed, params=params)
    rng = np.random.default_rng([seed, 1])
    state = AdamState()
    m = len(dataset)
    targets = dataset.targets[:, None]
    try:
        for _ in range(config.max_epochs):
            order = rng.permutation(m)
            total = 0.0
            for lo in range(0, m, config.batch_size):
                idx = order[lo:lo + config.batch_size]
                tape = Tape()
                pred = predict(params, tape.constant(dataset.inputs[idx]), tape)
                loss = ad.mse_loss(pred, targets[idx])
                grads = tape.backward(loss)
                adam_step(params, grads, state, config)
                total += loss.value[0, 0] * idx.size
            result.train_curve.append(total / m)
            result.epochs += 1
        if validation is not None:
            result.val_rmse = evaluate_rmse(params, validation)
            if not math.isfinite(result.val_rmse):
                raise ad.NumericError("validation forecast is non-finite")
    except (ad.NumericError, FloatingPointError) as exc:
        result.failed = True
        result.error = f"{type(exc).__name__}: {exc} (epoch {result.epochs})"
        result.val_rmse = None
    result.wall_time = time.perf_counter() - start
    return result


# -- grid search ------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    hidden_range: Tuple[int, ...] = tuple(range(1, 11))
    window_range: Tuple[int, ...] = tuple(range(1, 11))
    runs_per_config: int = 10
    min_success: float = 0.8

    def __post_init__(self):
        if not self.hidden_range or not self.window_range or self.runs_per_config < 1:
            raise ValueError("grid must be non-empty")

    def configs(self) -> List[Tuple[int, int]]:
        return [(h, w) for h in self.hidden_range for w in self.window_range]


@dataclass
class ConfigStats:
    n_H: int
    w: int
    mean_val_rmse: Optional[float]
    successes: int
    runs: int
    complexity: int

    @property
    def qualified(self) -> bool:
        return self.mean_val_rmse is not None


def config_stats(kind, n_H: int, w: int, runs: Sequence[RunResult],
                 min_success: float = 0.8) -> ConfigStats:
    """Mean validation RMSE over successful runs, or None if too many failed."""
    ok = [r.val_rmse for r in runs if not r.failed and r.val_rmse is not None]
    needed = math.ceil(min_success * len(runs) - 1e-9)
    mean = float(np.mean(ok)) if ok and len(ok) >= needed else None
    complexity = param_count(kind, CellDims(n_I=1, n_H=n_H)).params
    return ConfigStats(n_H, w, mean, len(ok), len(runs), complexity)


def select_config(stats: Iterable[ConfigStats]) -> Tuple[int, int]:
    """Lowest mean validation RMSE; ties go to fewer parameters, then smaller window."""
    qualified = [s for s in stats if s.qualified]
    if not qualified:
        raise ExperimentError("every configuration failed")
    best = min(qualified, key=lambda s: (s.mean_val_rmse, s.complexity, s.w, s.n_H))
    return best.n_H, best.w


@dataclass
class GridResult:
    best: Tuple[int, int]
    stats: List[ConfigStats]
    runs: List[RunResult]


def _partitions(series, split_spec: SplitSpec, w: int):
    tr, va, _ = split(series, split_spec)
    norm = fit_normalizer(tr)
    return make_windows(norm.apply(tr), w), make_windows(norm.apply(va), w)


def grid_search(kind, series, grid: GridSpec, config: TrainConfig = TrainConfig(),
                split_spec: SplitSpec = SplitSpec(), seed: int = 0,
                runner: Optional[Callable[..., RunResult]] = None) -> GridResult:
    """Train every (n_H, w) ``grid.runs_per_config`` times and pick the best."""
    kind = parse_cell(kind)
    runner = runner or train
    runs, stats = [], []
    for n_H, w in grid.configs():
        tr, va = _partitions(series, split_spec, w)
        batch = []
        for k in range(grid.runs_per_config):
            run_seed = derive_seed(seed, "grid", n_H, w, k)
            res = runner(kind, tr, n_H, config, seed=run_seed, validation=va)
            res.run_index = k
            res.params = None
            batch.append(res)
        runs.extend(batch)
        stats.append(config_stats(kind, n_H, w, batch, grid.min_success))
    return GridResult(select_config(stats), stats, runs)


def retrain_and_test(kind, best: Tuple[int, int], series, config: TrainConfig = TrainConfig(),
                     split_spec: SplitSpec = SplitSpec(), seed: int = 0) -> RunResult:
    """Refit on train+validation for ``config.max_epochs`` epochs and score the test part."""
    n_H, w = best
    tr, va, te = split(series, split_spec)
    blended = np.concatenate([tr, va])
    norm = fit_normalizer(blended)
    data = make_windows(norm.apply(blended), w)
    test = make_windows(norm.apply(te), w)
    res = train(kind, data, n_H, config, seed=derive_seed(seed, "retrain", n_H, w))
    res.phase = "retrain"
    if not res.failed:
        try:
            score = evaluate_rmse(res.params, test)
        except ad.NumericError as exc:
            res.failed, res.error = True, f"NumericError: {exc}"
        else:
            res.test_rmse = score
    res.params = None
    return res
