"""Synthetic series for the five behaviors: 21 data generating processes.

Closed-form kinds are evaluated at ``t = 1..length``. Recursive and ARFIMA
kinds start from zero pre-sample values and drop a burn-in prefix. Chaotic
kinds integrate the noise-free system, keep the x coordinate, standardize it
over the emitted window, then add the Gaussian noise.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.special import expit

__all__ = [
    "BEHAVIORS",
    "DgpKind",
    "DgpSpec",
    "FractionalConfig",
    "GenerationDiverged",
    "IntegratorConfig",
    "NoiseSpec",
    "SeriesReplicate",
    "arfima_weights",
    "behavior_of",
    "default_spec",
    "gaussian_noise",
    "generate",
    "generate_arfima",
    "generate_chaotic",
    "generate_closed_form",
    "generate_recursive",
    "henon_orbit",
    "integrate_chaotic",
    "load_replicate",
    "lorenz_field",
    "parse_dgp",
    "recursive_path",
    "replicate",
    "rossler_field",
    "save_replicate",
]


class DgpKind(str, enum.Enum):
    T = "T"
    SS = "SS"
    CS = "CS"
    TSS = "TSS"
    TCS = "TCS"
    TRW = "TRW"
    SRW = "SRW"
    TSRW = "TSRW"
    SAR2 = "SAR2"
    NMA2 = "NMA2"
    NAR2 = "NAR2"
    BL2 = "BL2"
    STAR2 = "STAR2"
    TAR2 = "TAR2"
    ARFIMA_d0 = "ARFIMA_d0"
    ARFIMA_d02 = "ARFIMA_d02"
    ARFIMA_d04 = "ARFIMA_d04"
    MACKEY = "MACKEY"
    HENON = "HENON"
    ROSSLER = "ROSSLER"
    LORENZ = "LORENZ"

    def __str__(self):
        return self.value


D = DgpKind

BEHAVIORS: Dict[str, tuple] = {
    "deterministic": (D.T, D.SS, D.CS, D.TSS, D.TCS),
    "random-walk": (D.TRW, D.SRW, D.TSRW),
    "nonlinear": (D.SAR2, D.NMA2, D.NAR2, D.BL2, D.STAR2, D.TAR2),
    "long-memory": (D.ARFIMA_d0, D.ARFIMA_d02, D.ARFIMA_d04),
    "chaotic": (D.MACKEY, D.HENON, D.ROSSLER, D.LORENZ),
}

CLOSED_FORM = BEHAVIORS["deterministic"]
RECURSIVE = BEHAVIORS["random-walk"] + BEHAVIORS["nonlinear"]
LONG_MEMORY = BEHAVIORS["long-memory"]
CHAOTIC = BEHAVIORS["chaotic"]

# Largest estimation window searched per process.
WINDOW_MAX = {
    D.T: 10, D.SS: 5, D.CS: 5, D.TSS: 5, D.TCS: 5,
    D.TRW: 10, D.SRW: 4, D.TSRW: 5,
    D.SAR2: 5, D.NMA2: 5, D.NAR2: 5, D.BL2: 5, D.STAR2: 5, D.TAR2: 5,
    D.ARFIMA_d0: 5, D.ARFIMA_d02: 20, D.ARFIMA_d04: 40,
    D.MACKEY: 7, D.HENON: 3, D.ROSSLER: 14, D.LORENZ: 25,
}

_D_VALUES = {D.ARFIMA_d0: 0.0, D.ARFIMA_d02: 0.2, D.ARFIMA_d04: 0.4}

_ALIASES = {
    "SAR": "SAR2", "SAR(2)": "SAR2", "NMA": "NMA2", "NMA(2)": "NMA2", "NAR": "NAR2",
    "NAR(2)": "NAR2", "BL": "BL2", "BL(2)": "BL2", "STAR": "STAR2", "STAR(2)": "STAR2",
    "TAR": "TAR2", "TAR(2)": "TAR2", "MACKEY-GLASS": "MACKEY", "HÉNON": "HENON",
    "RÖSSLER": "ROSSLER", "ARFIMA(2,0,2)": "ARFIMA_D0", "ARFIMA(2,0.2,2)": "ARFIMA_D02",
    "ARFIMA(2,0.4,2)": "ARFIMA_D04",
}


def parse_dgp(name) -> DgpKind:
    if isinstance(name, DgpKind):
        return name
    key = str(name).strip().upper()
    key = _ALIASES.get(key, key)
    for kind in DgpKind:
        if kind.value.upper() == key:
            return kind
    raise ValueError(f"unknown DGP {name!r}")


def behavior_of(kind) -> str:
    kind = parse_dgp(kind)
    for behavior, kinds in BEHAVIORS.items():
        if kind in kinds:
            return behavior
    raise KeyError(kind)


class GenerationDiverged(ArithmeticError):
    """A recursion or trajectory produced a non-finite value."""


# -- configuration types -----------------------------------------------------------


@dataclass(frozen=True)
class NoiseSpec:
    mean: float = 0.0
    std: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.std < 0:
            raise ValueError("noise std must be non-negative")


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    stride: int
    burn_in: int = 1000
    initial_state: tuple = ()

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")


@dataclass(frozen=True)
class FractionalConfig:
    d: float
    truncation: int = 1000
    burn_in: int = 200

    def __post_init__(self):
        if not 0 <= self.d < 0.5:
            raise ValueError(f"fractional order d={self.d} must lie in [0, 0.5)")
        if self.truncation < 100:
            raise ValueError("truncation must be >= 100")


_DEFAULT_INTEGRATORS = {
    D.MACKEY: IntegratorConfig(dt=0.1, stride=10, burn_in=1000, initial_state=(1.2,)),
    D.HENON: IntegratorConfig(dt=1.0, stride=1, burn_in=1000, initial_state=(0.0, 0.0)),
    D.ROSSLER: IntegratorConfig(dt=0.01, stride=25, burn_in=1000,
                                initial_state=(10.0, 0.0, 0.0)),
    D.LORENZ: IntegratorConfig(dt=0.01, stride=10, burn_in=1000,
                               initial_state=(1.0, 1.0, 1.0)),
}

RECURSIVE_BURN_IN = 200


@dataclass(frozen=True)
class DgpSpec:
    kind: DgpKind
    length: int = 3000
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    integrator: Optional[IntegratorConfig] = None
    fractional: Optional[FractionalConfig] = None
    burn_in: int = RECURSIVE_BURN_IN

    def __post_init__(self):
        object.__setattr__(self, "kind", parse_dgp(self.kind))
        if self.length < 10:
            raise ValueError("length must be >= 10")
        if self.kind in CHAOTIC and self.integrator is None:
            object.__setattr__(self, "integrator", _DEFAULT_INTEGRATORS[self.kind])
        if self.kind in LONG_MEMORY and self.fractional is None:
            object.__setattr__(self, "fractional", FractionalConfig(d=_D_VALUES[self.kind]))

    @property
    def behavior(self) -> str:
        return behavior_of(self.kind)

    def with_seed(self, seed: int) -> "DgpSpec":
        return replace(self, noise=replace(self.noise, seed=int(seed)))

    def to_dict(self) -> dict:
        out = asdict(self)
        out["kind"] = self.kind.value
        for key in ("integrator",):
            if out[key] is not None:
                out[key]["initial_state"] = list(out[key]["initial_state"])
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "DgpSpec":
        data = dict(data)
        data["noise"] = NoiseSpec(**data.get("noise", {}))
        if data.get("integrator") is not None:
            integ = dict(data["integrator"])
            integ["initial_state"] = tuple(integ.get("initial_state", ()))
            data["integrator"] = IntegratorConfig(**integ)
        if data.get("fractional") is not None:
            data["fractional"] = FractionalConfig(**data["fractional"])
        return cls(**data)


def default_spec(kind, length: int = 3000, std: float = 0.2, seed: int = 0) -> DgpSpec:
    return DgpSpec(parse_dgp(kind), length=length, noise=NoiseSpec(0.0, std, seed))


@dataclass
class SeriesReplicate:
    dgp: DgpSpec
    replicate_index: int
    seed: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.dgp.length,):
            raise ValueError(f"expected {self.dgp.length} values, got {self.values.shape}")
        if not np.isfinite(self.values).all():
            raise GenerationDiverged(f"{self.dgp.kind}: non-finite values in replicate")


# -- noise ----------------------------------------------------------------------------


def gaussian_noise(n: int, spec: NoiseSpec) -> np.ndarray:
    """``n`` i.i.d. Normal(mean, std^2) draws, reproducible from ``spec.seed``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(spec.seed)
    return spec.mean + spec.std * rng.standard_normal(n)


# -- deterministic behavior ---------------------------------------------------------

_CLOSED: Dict[DgpKind, Callable[[np.ndarray], np.ndarray]] = {
    D.T: lambda t: 10 + 0.02 * t,
    D.SS: lambda t: 2 * np.sin(2 * np.pi * t / 5),
    D.CS: lambda t: np.sin(2 * np.pi * t / 100) + 0.5 * np.sin(2 * np.pi * t / 5),
    D.TSS: lambda t: 10 + 0.02 * t + 5 * np.sin(2 * np.pi * t / 5),
    D.TCS: lambda t: 10 + 0.02 * t + np.sin(2 * np.pi * t / 100)
    + 0.5 * np.sin(2 * np.pi * t / 5),
}


def closed_form_signal(kind, length: int) -> np.ndarray:
    kind = parse_dgp(kind)
    if kind not in _CLOSED:
        raise ValueError(f"{kind} is not a closed-form process")
    return _CLOSED[kind](np.arange(1, length + 1, dtype=np.float64))


def generate_closed_form(spec: DgpSpec, replicate_index: int = 0) -> SeriesReplicate:
    signal = closed_form_signal(spec.kind, spec.length)
    eps = gaussian_noise(spec.length, spec.noise)
    return SeriesReplicate(spec, replicate_index, spec.noise.seed, signal + eps)


# -- random-walk and nonlinear recursions -------------------------------------------

_LAGS = 5


def _sign(v: float) -> float:
    return 1.0 if v > 0 else (-1.0 if v < 0 else 0.0)


def recursive_path(kind, eps: Sequence[float], init: Sequence[float] = ()) -> np.ndarray:
    """Run one recursion over the noise vector ``eps``.

    ``init`` holds pre-sample values ``(..., z_{-1}, z_0)``; missing ones and
    all pre-sample noise terms are zero. Returns ``z_1 .. z_n``.
    """
    kind = parse_dgp(kind)
    if kind not in RECURSIVE:
        raise ValueError(f"{kind} is not a recursive process")
    eps = np.asarray(eps, dtype=np.float64)
    n = eps.size
    z = np.zeros(n + _LAGS)
    e = np.zeros(n + _LAGS)
    init = list(init)[-_LAGS:]
    if init:
        z[_LAGS - len(init):_LAGS] = init
    e[_LAGS:] = eps
    with np.errstate(over="ignore", invalid="ignore"):
        return _recurse(kind, z, e, n)


def _recurse(kind, z, e, n):
    for t in range(_LAGS, n + _LAGS):
        z1, z2, e0, e1, e2 = z[t - 1], z[t - 2], e[t], e[t - 1], e[t - 2]
        if kind is D.TRW:
            v = z1 + e0
        elif kind is D.SRW:
            v = z[t - 4] + e0
        elif kind is D.TSRW:
            v = z1 + z[t - 4] - z[t - 5] + e0
        elif kind is D.SAR2:
            v = _sign(z1 + z2) + e0
        elif kind is D.NMA2:
            v = e0 - 0.3 * e1 + 0.2 * e2 + 0.4 * e1 * e2 - 0.25 * e2 ** 2
        elif kind is D.NAR2:
            v = 0.7 * abs(z1) / (abs(z1) + 2) + 0.35 * abs(z2) / (abs(z2) + 2) + e0
        elif kind is D.BL2:
            v = 0.4 * z1 - 0.3 * z2 + 0.5 * z1 * e1 + e0
        elif kind is D.STAR2:
            v = 0.3 * z1 + 0.6 * z2 + (0.1 - 0.9 * z1 + 0.8 * z2) * expit(10 * z1) + e0
        else:  # TAR2
            if abs(z1) <= 1:
                v = 0.9 * z1 + 0.05 * z2 + e0
            else:
                v = -0.3 * z1 + 0.65 * z2 - e0
        if not math.isfinite(v):
            raise GenerationDiverged(f"{kind} diverged at step {t - _LAGS + 1}")
        z[t] = v
    return z[_LAGS:]


def generate_recursive(spec: DgpSpec, replicate_index: int = 0) -> SeriesReplicate:
    if spec.kind not in RECURSIVE:
        raise ValueError(f"{spec.kind} is not a recursive process")
    eps = gaussian_noise(spec.burn_in + spec.length, spec.noise)
    path = recursive_path(spec.kind, eps)
    return SeriesReplicate(spec, replicate_index, spec.noise.seed, path[spec.burn_in:])


# -- long memory --------------------------------------------------------------------


def arfima_weights(d: float, truncation: int) -> np.ndarray:
    """MA(inf) weights of ``(1 - B)^-d``: psi_0 = 1, psi_k = psi_{k-1} (k - 1 + d) / k."""
    if not 0 <= d < 0.5:
        raise ValueError(f"fractional order d={d} is non-stationary (need 0 <= d < 0.5)")
    psi = np.empty(truncation + 1)
    psi[0] = 1.0
    for k in range(1, truncation + 1):
        psi[k] = psi[k - 1] * (k - 1 + d) / k
    return psi


def fractional_noise(eps: np.ndarray, d: float, truncation: int) -> np.ndarray:
    psi = arfima_weights(d, truncation)
    return np.convolve(eps, psi)[: eps.size]


def arma22_path(u: np.ndarray) -> np.ndarray:
    """z_t = 0.7 z_{t-1} - 0.1 z_{t-2} - 0.5 u_{t-1} + 0.4 u_{t-2} + u_t, zero pre-sample."""
    n = u.size
    z = np.zeros(n + 2)
    uu = np.concatenate([np.zeros(2), u])
    for t in range(2, n + 2):
        z[t] = 0.7 * z[t - 1] - 0.1 * z[t - 2] - 0.5 * uu[t - 1] + 0.4 * uu[t - 2] + uu[t]
    return z[2:]


def generate_arfima(spec: DgpSpec, replicate_index: int = 0) -> SeriesReplicate:
    if spec.kind not in LONG_MEMORY:
        raise ValueError(f"{spec.kind} is not an ARFIMA process")
    frac = spec.fractional
    eps = gaussian_noise(frac.burn_in + spec.length, spec.noise)
    u = fractional_noise(eps, frac.d, frac.truncation)
    path = arma22_path(u)
    if not np.isfinite(path).all():
        raise GenerationDiverged(f"{spec.kind} diverged")
    return SeriesReplicate(spec, replicate_index, spec.noise.seed, path[frac.burn_in:])


# -- chaotic systems -----------------------------------------------------------------

LORENZ = dict(sigma=16.0, r=45.92, b=4.0)
ROSSLER = dict(a=0.15, b=0.2, c=10.0)
HENON = dict(a=1.4, b=0.3)
MACKEY = dict(tau=17.0, a=0.2, b=0.1, c=10.0)


def lorenz_field(state, sigma=LORENZ["sigma"], r=LORENZ["r"], b=LORENZ["b"]) -> np.ndarray:
    x, y, z = state
    return np.array([sigma * (y - x), -x * z + r * x - y, x * y - b * z])


def rossler_field(state, a=ROSSLER["a"], b=ROSSLER["b"], c=ROSSLER["c"]) -> np.ndarray:
    x, y, z = state
    return np.array([-y - z, x + a * y, b + z * (x - c)])


def _rk4_orbit(field_fn, x0, dt, stride, n_out) -> np.ndarray:
    """x coordinate every ``stride`` RK4 steps, ``n_out`` points, starting at x0."""
    s = np.array(x0, dtype=np.float64)
    out = np.empty(n_out)
    out[0] = s[0]
    half = 0.5 * dt
    for k in range(1, n_out):
        for _ in range(stride):
            k1 = field_fn(s)
            k2 = field_fn(s + half * k1)
            k3 = field_fn(s + half * k2)
            k4 = field_fn(s + dt * k3)
            s = s + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.isfinite(s).all():
            raise GenerationDiverged(f"trajectory diverged at output {k}")
        out[k] = s[0]
    return out


def henon_orbit(n: int, x0: float = 0.0, y0: float = 0.0,
                a: float = HENON["a"], b: float = HENON["b"]) -> np.ndarray:
    """``x_1 .. x_n`` of the Henon map from ``(x0, y0)``."""
    out = np.empty(n)
    x, y = x0, y0
    for t in range(n):
        x, y = 1.0 + y - a * x * x, b * x
        if not math.isfinite(x):
            raise GenerationDiverged(f"HENON diverged at step {t + 1}")
        out[t] = x
    return out


def mackey_glass_orbit(dt: float, stride: int, n_out: int, history: float = 1.2,
                       tau=MACKEY["tau"], a=MACKEY["a"], b=MACKEY["b"],
                       c=MACKEY["c"]) -> np.ndarray:
    """RK4 over a circular delay buffer; half-step delays use linear interpolation.

    Output point ``k`` is x at time ``k * stride * dt``; x(t <= 0) = history.
    """
    lag = tau / dt
    if abs(lag - round(lag)) > 1e-9 or round(lag) < 1:
        raise ValueError(f"tau/dt = {lag} must be a positive integer")
    lag = int(round(lag))
    buf = np.full(lag, float(history))  # x at t - tau, ..., t - dt
    head = 0  # index of x(t - tau)

    def f(x, xd):
        return a * xd / (1.0 + xd ** c) - b * x

    x = float(history)
    out = np.empty(n_out)
    out[0] = x
    for k in range(1, n_out):
        for _ in range(stride):
            d0 = buf[head]
            d1 = buf[(head + 1) % lag] if lag > 1 else x
            dmid = 0.5 * (d0 + d1)
            k1 = f(x, d0)
            k2 = f(x + 0.5 * dt * k1, dmid)
            k3 = f(x + 0.5 * dt * k2, dmid)
            k4 = f(x + dt * k3, d1)
            buf[head] = x
            head = (head + 1) % lag
            x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not math.isfinite(x):
            raise GenerationDiverged(f"MACKEY diverged at output {k}")
        out[k] = x
    return out


def integrate_chaotic(kind, n_out: int, integrator: Optional[IntegratorConfig] = None
                      ) -> np.ndarray:
    """Noise-free x-coordinate signal, ``n_out`` points from the initial state."""
    kind = parse_dgp(kind)
    cfg = integrator or _DEFAULT_INTEGRATORS[kind]
    init = cfg.initial_state or _DEFAULT_INTEGRATORS[kind].initial_state
    if kind is D.HENON:
        return henon_orbit(n_out, *init)
    if kind is D.MACKEY:
        return mackey_glass_orbit(cfg.dt, cfg.stride, n_out, history=init[0])
    field_fn = lorenz_field if kind is D.LORENZ else rossler_field
    return _rk4_orbit(field_fn, init, cfg.dt, cfg.stride, n_out)


def generate_chaotic(spec: DgpSpec, replicate_index: int = 0) -> SeriesReplicate:
    if spec.kind not in CHAOTIC:
        raise ValueError(f"{spec.kind} is not a chaotic process")
    cfg = spec.integrator
    signal = integrate_chaotic(spec.kind, cfg.burn_in + spec.length, cfg)[cfg.burn_in:]
    std = signal.std()
    if not np.isfinite(std) or std == 0:
        raise GenerationDiverged(f"{spec.kind}: degenerate signal")
    signal = (signal - signal.mean()) / std
    eps = gaussian_noise(spec.length, spec.noise)
    return SeriesReplicate(spec, replicate_index, spec.noise.seed, signal + eps)


# -- dispatch, replication, persistence ---------------------------------------------


def generate(spec: DgpSpec, replicate_index: int = 0) -> SeriesReplicate:
    if spec.kind in CLOSED_FORM:
        return generate_closed_form(spec, replicate_index)
    if spec.kind in RECURSIVE:
        return generate_recursive(spec, replicate_index)
    if spec.kind in LONG_MEMORY:
        return generate_arfima(spec, replicate_index)
    return generate_chaotic(spec, replicate_index)


def replicate(spec: DgpSpec, reps: int = 30, base_seed: int = 0) -> List[SeriesReplicate]:
    """Monte Carlo copies; replicate ``i`` draws its noise from seed ``base_seed + i``."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    return [generate(spec.with_seed(base_seed + i), i) for i in range(reps)]


def replicate_stem(kind, index: int) -> str:
    return f"{parse_dgp(kind).value}_rep{index:02d}"


def save_replicate(rep: SeriesReplicate, out_dir) -> Path:
    """Write ``<kind>_rep<ii>.csv`` plus a JSON sidecar with the full spec."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = replicate_stem(rep.dgp.kind, rep.replicate_index)
    lines = ["t,value"] + [f"{t},{float(v)!r}" for t, v in enumerate(rep.values, start=1)]
    path = out_dir / f"{stem}.csv"
    path.write_text("\n".join(lines) + "\n")
    meta = {"dgp": rep.dgp.to_dict(), "replicate_index": rep.replicate_index,
            "seed": rep.seed, "length": rep.dgp.length}
    (out_dir / f"{stem}.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def load_replicate(csv_path) -> SeriesReplicate:
    csv_path = Path(csv_path)
    meta = json.loads(csv_path.with_suffix(".json").read_text())
    rows = csv_path.read_text().splitlines()[1:]
    values = np.array([float(r.split(",")[1]) for r in rows])
    return SeriesReplicate(DgpSpec.from_dict(meta["dgp"]), meta["replicate_index"],
                           meta["seed"], values)
