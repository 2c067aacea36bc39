"""The 31 recurrent cells compared in the benchmark.

Each cell is described by the set of nomenclature symbols appearing in its
equations (``W_xi``, ``b_c~`` ...). ``init_params`` allocates exactly those
symbols; ``step`` reads whichever are present, so a variant is defined by
what it drops or adds relative to its family.

Symbol conventions: ``W_<src><dst>`` maps ``src`` to ``dst`` where ``x`` is
the input, ``h`` the hidden state, ``c`` the cell state, ``y`` the readout,
``s`` the SCRN context, ``i/f/o/u/r`` gates and ``c~``/``h~`` candidates.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import autodiff as ad
from .autodiff import Parameter, Tape, Tensor

__all__ = [
    "CellDims",
    "CellKind",
    "CellParams",
    "CellState",
    "EXPERIMENT_1",
    "EXPERIMENT_2",
    "Complexity",
    "REFERENCE_DIMS",
    "allocated_count",
    "catalog",
    "catalog_json",
    "cell_symbols",
    "check_gradients",
    "complexity_table",
    "init_params",
    "param_count",
    "parse_cell",
    "predict",
    "readout",
    "step",
    "theoretic_complexity",
    "unroll",
    "zero_state",
]


class CellKind(str, enum.Enum):
    LSTM_VANILLA = "LSTM-VANILLA"
    NIG = "NIG"
    NFG = "NFG"
    NOG = "NOG"
    NIAF = "NIAF"
    NFAF = "NFAF"
    NOAF = "NOAF"
    NCAF = "NCAF"
    FB1 = "FB1"
    CIFG = "CIFG"
    PC = "PC"
    FGR = "FGR"
    ELMAN = "ELMAN"
    IRNN = "IRNN"
    JORDAN = "JORDAN"
    MRNN = "MRNN"
    SCRN = "SCRN"
    MGU = "MGU"
    MGU_SLIM1 = "MGU-SLIM1"
    MGU_SLIM2 = "MGU-SLIM2"
    MGU_SLIM3 = "MGU-SLIM3"
    GRU = "GRU"
    GRU_SLIM1 = "GRU-SLIM1"
    GRU_SLIM2 = "GRU-SLIM2"
    GRU_SLIM3 = "GRU-SLIM3"
    MUT1 = "MUT1"
    MUT2 = "MUT2"
    MUT3 = "MUT3"
    LSTM_SLIM1 = "LSTM-SLIM1"
    LSTM_SLIM2 = "LSTM-SLIM2"
    LSTM_SLIM3 = "LSTM-SLIM3"

    def __str__(self):
        return self.value


K = CellKind

# Column order of the guideline tables.
EXPERIMENT_1 = (K.NIG, K.NFG, K.NOG, K.CIFG, K.FB1, K.NIAF, K.NFAF, K.NOAF, K.NCAF,
                K.LSTM_VANILLA, K.PC, K.FGR)
EXPERIMENT_2 = (K.ELMAN, K.IRNN, K.JORDAN, K.MRNN, K.SCRN, K.MGU_SLIM3, K.MGU_SLIM2,
                K.MGU_SLIM1, K.MGU, K.GRU_SLIM3, K.GRU_SLIM2, K.GRU_SLIM1, K.MUT1, K.MUT2,
                K.MUT3, K.GRU, K.LSTM_SLIM3, K.LSTM_SLIM2, K.LSTM_SLIM1, K.LSTM_VANILLA)


def parse_cell(name) -> CellKind:
    """Look up a kind by value or member name (``"LSTM-VANILLA"``, ``"lstm_vanilla"``)."""
    if isinstance(name, CellKind):
        return name
    key = str(name).strip().upper().replace("_", "-")
    aliases = {"VANILLA": "LSTM-VANILLA", "LSTM": "LSTM-VANILLA", "MU3": "MUT3"}
    key = aliases.get(key, key)
    try:
        return CellKind(key)
    except ValueError:
        raise ValueError(f"unknown cell {name!r}") from None


# -- equation symbol sets -------------------------------------------------------

_LSTM_FAMILY = {K.LSTM_VANILLA, K.NIG, K.NFG, K.NOG, K.NIAF, K.NFAF, K.NOAF, K.NCAF,
                K.FB1, K.CIFG, K.PC, K.FGR, K.LSTM_SLIM1, K.LSTM_SLIM2, K.LSTM_SLIM3}
_GRU_FAMILY = {K.GRU, K.GRU_SLIM1, K.GRU_SLIM2, K.GRU_SLIM3, K.MUT1, K.MUT2, K.MUT3}
_MGU_FAMILY = {K.MGU, K.MGU_SLIM1, K.MGU_SLIM2, K.MGU_SLIM3}


def _full(*gates):
    out = []
    for g in gates:
        out += [f"W_x{g}", f"W_h{g}", f"b_{g}"]
    return out


def _slim(level, *gates):
    keep = {1: ("h", "b"), 2: ("h",), 3: ("b",)}[level]
    out = []
    for g in gates:
        if "h" in keep:
            out.append(f"W_h{g}")
        if "b" in keep:
            out.append(f"b_{g}")
    return out


def _build_symbols() -> Dict[CellKind, Tuple[str, ...]]:
    vanilla = _full("c~", "i", "f", "o")
    table = {
        K.LSTM_VANILLA: vanilla,
        K.NIG: _full("c~", "f", "o"),
        K.NFG: _full("c~", "i", "o"),
        K.NOG: _full("c~", "i", "f"),
        K.NIAF: vanilla,
        K.NFAF: vanilla,
        K.NOAF: vanilla,
        K.NCAF: vanilla,
        K.FB1: vanilla,
        K.CIFG: _full("c~", "i", "o"),
        K.PC: vanilla + ["W_ci", "W_cf", "W_co"],
        K.FGR: vanilla + [f"W_{a}{b}" for b in "ifo" for a in "ifo"],
        K.ELMAN: ["W_xh", "W_hh", "b_h"],
        K.IRNN: ["W_xh", "W_hh", "b_h"],
        K.JORDAN: ["W_xh", "W_yh", "b_h"],
        K.MRNN: ["W_xh", "W_hh", "W_yh", "b_h"],
        K.SCRN: ["W_xs", "W_xh", "W_hh", "W_sh", "b_h"],
        K.MGU: _full("f", "h~"),
        K.GRU: _full("u", "r", "h~"),
        K.MUT1: ["W_xu", "b_u", "W_xr", "W_hr", "b_r", "W_hh~", "b_h~"],
        K.MUT2: ["W_xu", "W_hu", "b_u", "W_hr", "b_r"] + _full("h~"),
        K.MUT3: _full("u", "r", "h~"),
    }
    for level in (1, 2, 3):
        table[K[f"LSTM_SLIM{level}"]] = _full("c~") + _slim(level, "i", "f", "o")
        table[K[f"GRU_SLIM{level}"]] = _slim(level, "u", "r") + _full("h~")
        table[K[f"MGU_SLIM{level}"]] = _slim(level, "f") + _full("h~")
    return {k: tuple(v) for k, v in table.items()}


_SYMBOLS = _build_symbols()

# Nonlinearity applied to each LSTM gate; the "no activation function" variants
# use the raw affine map.
_LINEAR_GATE = {K.NIAF: "i", K.NFAF: "f", K.NOAF: "o", K.NCAF: "c~"}

SCRN_ALPHA = 0.95


def cell_symbols(kind: CellKind) -> Tuple[str, ...]:
    """Symbols in the cell equations, excluding the shared readout."""
    return _SYMBOLS[parse_cell(kind)]


# -- dims, params, state ----------------------------------------------------------


@dataclass(frozen=True)
class CellDims:
    n_I: int = 1
    n_H: int = 1
    n_S: Optional[int] = None
    n_O: int = 1

    def __post_init__(self):
        for name in ("n_I", "n_H", "n_O"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.n_S is not None and self.n_S < 1:
            raise ValueError("n_S must be >= 1")

    @property
    def context(self) -> int:
        return self.n_H if self.n_S is None else self.n_S


def _width(token: str, dims: CellDims) -> int:
    if token == "x":
        return dims.n_I
    if token == "y":
        return dims.n_O
    if token == "s":
        return dims.context
    return dims.n_H


def _shape(symbol: str, dims: CellDims) -> Tuple[int, int]:
    body = symbol[2:]
    if symbol.startswith("b_"):
        return 1, _width(body, dims)
    return _width(body[0], dims), _width(body[1:], dims)


@dataclass
class CellParams:
    kind: CellKind
    dims: CellDims
    params: Dict[str, Parameter]
    alpha: float = SCRN_ALPHA

    def __getitem__(self, name) -> Parameter:
        return self.params[name]

    def __contains__(self, name):
        return name in self.params

    def values(self):
        return self.params.values()

    def trainable(self) -> List[Parameter]:
        return [p for p in self.params.values() if p.trainable]

    def copy(self) -> "CellParams":
        return CellParams(self.kind, self.dims,
                          {k: p.copy() for k, p in self.params.items()}, self.alpha)


def init_params(kind, dims: CellDims, seed: int = 0, alpha: float = SCRN_ALPHA) -> CellParams:
    """Glorot-uniform weights, zero biases, plus the readout ``W_hy``/``b_y``.

    IRNN starts from an identity recurrent matrix; FB1's forget bias is fixed
    at 1 and never trained.
    """
    kind = parse_cell(kind)
    if kind is not K.SCRN and dims.n_S is not None:
        raise ValueError("n_S only applies to SCRN")
    rng = np.random.default_rng(seed)
    symbols = list(_SYMBOLS[kind]) + ["W_hy", "b_y"]
    if kind is K.SCRN:
        symbols.append("W_sy")
    params = {}
    for sym in symbols:
        shape = _shape(sym, dims)
        if sym.startswith("b_"):
            value = np.zeros(shape)
        else:
            limit = np.sqrt(6.0 / (shape[0] + shape[1]))
            value = rng.uniform(-limit, limit, size=shape)
        params[sym] = Parameter(sym, value)
    if kind is K.IRNN:
        params["W_hh"].value = np.eye(dims.n_H)
    if kind is K.FB1:
        params["b_f"] = Parameter("b_f", np.ones((1, dims.n_H)), trainable=False)
    return CellParams(kind, dims, params, alpha)


@dataclass
class CellState:
    h: Tensor
    c: Optional[Tensor] = None
    s: Optional[Tensor] = None
    y_prev: Optional[Tensor] = None
    gate_prev: Optional[Dict[str, Tensor]] = None
    gates: Dict[str, Tensor] = field(default_factory=dict)


def zero_state(cp: CellParams, tape: Tape, batch: int = 1) -> CellState:
    kind, dims = cp.kind, cp.dims
    zeros = lambda n: tape.constant(np.zeros((batch, n)))  # noqa: E731
    state = CellState(h=zeros(dims.n_H))
    if kind in _LSTM_FAMILY:
        state.c = zeros(dims.n_H)
    if kind is K.FGR:
        state.gate_prev = {g: zeros(dims.n_H) for g in "ifo"}
    if kind is K.SCRN:
        state.s = zeros(dims.context)
    if kind in (K.JORDAN, K.MRNN):
        state.y_prev = zeros(dims.n_O)
    return state


# -- forward equations ------------------------------------------------------------


class _Ctx:
    """Per-step helper resolving parameter leaves on one tape."""

    def __init__(self, cp: CellParams, tape: Tape, batch: int):
        self.cp = cp
        self.tape = tape
        self.batch = batch

    def p(self, name) -> Tensor:
        return self.tape.watch(self.cp.params[name])

    def has(self, name) -> bool:
        return name in self.cp.params

    def affine(self, gate: str, sources: Dict[str, Tensor], extra=()) -> Tensor:
        """Sum of ``src . W_<src><gate>`` over present weights, extra terms and bias."""
        acc = None
        params = self.cp.params
        terms = []
        for k, v in sources.items():
            w = params.get("W_" + k + gate)
            if w is not None:
                terms.append(ad.matmul(v, self.tape.watch(w)))
        terms += list(extra)
        for t in terms:
            acc = t if acc is None else ad.add(acc, t)
        bias = f"b_{gate}"
        if acc is None:
            # bias-only gate: lift the row vector to batch shape
            acc = self.tape.constant(np.zeros((self.batch, self.cp.dims.n_H)))
        if self.has(bias):
            acc = ad.add(acc, self.p(bias))
        return acc

    def raw_input(self, x: Tensor) -> Tensor:
        """Raw ``x_t`` used where the equations add it to an ``n_H``-wide term.

        A scalar input is broadcast to every hidden unit; otherwise the input
        is zero-padded or truncated to ``n_H`` columns.
        """
        n_I, n_H = self.cp.dims.n_I, self.cp.dims.n_H
        if n_I == n_H:
            return x
        adapter = np.ones((1, n_H)) if n_I == 1 else np.eye(n_I, n_H)
        return ad.matmul(x, self.tape.constant(adapter))


def _lstm_step(ctx: _Ctx, st: CellState, x: Tensor) -> CellState:
    kind = ctx.cp.kind
    h_prev, c_prev = st.h, st.c

    def act(gate, pre):
        if _LINEAR_GATE.get(kind) == gate:
            return pre
        return ad.tanh(pre) if gate == "c~" else ad.sigmoid(pre)

    def gate(name, cell=None):
        if f"b_{name}" not in ctx.cp and f"W_h{name}" not in ctx.cp:
            return None
        src = {"x": x, "h": h_prev}
        if cell is not None:
            src["c"] = cell
        if st.gate_prev is not None:
            src.update(st.gate_prev)
        return act(name, ctx.affine(name, src))

    cand = act("c~", ctx.affine("c~", {"x": x, "h": h_prev}))
    g_i = gate("i", c_prev)
    g_f = gate("f", c_prev)

    if kind is K.NIG:
        c = ad.add(ad.hadamard(g_f, c_prev), cand)
    elif kind is K.NFG:
        c = ad.add(c_prev, ad.hadamard(g_i, cand))
    elif kind is K.CIFG:
        c = ad.add(ad.hadamard(ad.one_minus(g_i), c_prev), ad.hadamard(g_i, cand))
    else:
        c = ad.add(ad.hadamard(g_f, c_prev), ad.hadamard(g_i, cand))

    g_o = gate("o", c)
    h = ad.tanh(c) if g_o is None else ad.hadamard(g_o, ad.tanh(c))

    gates = {k: v for k, v in (("i", g_i), ("f", g_f), ("o", g_o)) if v is not None}
    new = CellState(h=h, c=c, gates=gates)
    if kind is K.FGR:
        new.gate_prev = gates
    return new


def _gru_step(ctx: _Ctx, st: CellState, x: Tensor) -> CellState:
    kind = ctx.cp.kind
    h_prev = st.h
    if kind is K.MUT3:
        g_u = ad.sigmoid(ctx.affine("u", {"x": x, "h": ad.tanh(h_prev)}))
    else:
        g_u = ad.sigmoid(ctx.affine("u", {"x": x, "h": h_prev}))
    if kind is K.MUT2:
        g_r = ad.sigmoid(ctx.affine("r", {"h": h_prev}, extra=[ctx.raw_input(x)]))
    else:
        g_r = ad.sigmoid(ctx.affine("r", {"x": x, "h": h_prev}))
    gated = {"h": ad.hadamard(g_r, h_prev)}
    if kind is K.MUT1:
        cand = ad.tanh(ctx.affine("h~", gated, extra=[ad.tanh(ctx.raw_input(x))]))
    else:
        cand = ad.tanh(ctx.affine("h~", {"x": x, **gated}))
    h = ad.add(ad.hadamard(g_u, cand), ad.hadamard(ad.one_minus(g_u), h_prev))
    return CellState(h=h, gates={"u": g_u, "r": g_r})


def _mgu_step(ctx: _Ctx, st: CellState, x: Tensor) -> CellState:
    h_prev = st.h
    g_f = ad.sigmoid(ctx.affine("f", {"x": x, "h": h_prev}))
    cand = ad.tanh(ctx.affine("h~", {"x": x, "h": ad.hadamard(g_f, h_prev)}))
    h = ad.add(ad.hadamard(g_f, cand), ad.hadamard(ad.one_minus(g_f), h_prev))
    return CellState(h=h, gates={"f": g_f})


def _simple_step(ctx: _Ctx, st: CellState, x: Tensor) -> CellState:
    kind = ctx.cp.kind
    if kind is K.SCRN:
        a = ctx.cp.alpha
        s = ad.add(ad.scalar_mul(1.0 - a, ad.matmul(x, ctx.p("W_xs"))), ad.scalar_mul(a, st.s))
        pre = ctx.affine("h", {"x": x, "h": st.h, "s": st.s})
        return CellState(h=ad.tanh(pre), s=s)
    src = {"x": x, "h": st.h}
    if st.y_prev is not None:
        src["y"] = st.y_prev
    pre = ctx.affine("h", src)
    h = ad.relu(pre) if kind is K.IRNN else ad.tanh(pre)
    new = CellState(h=h)
    if kind in (K.JORDAN, K.MRNN):
        # free-running: the model's own readout feeds the next step
        new.y_prev = readout(h, ctx.cp, ctx.tape)
    return new


def step(cp: CellParams, state: CellState, x_t: Tensor) -> CellState:
    """Advance ``cp.kind`` by one time step on ``x_t`` (``batch x n_I``)."""
    if x_t.shape[1] != cp.dims.n_I:
        raise ad.DimensionError(f"input width {x_t.shape[1]} != n_I={cp.dims.n_I}")
    ctx = _Ctx(cp, x_t.tape, x_t.shape[0])
    kind = cp.kind
    if kind in _LSTM_FAMILY:
        return _lstm_step(ctx, state, x_t)
    if kind in _GRU_FAMILY:
        return _gru_step(ctx, state, x_t)
    if kind in _MGU_FAMILY:
        return _mgu_step(ctx, state, x_t)
    return _simple_step(ctx, state, x_t)


def readout(h: Tensor, cp: CellParams, tape: Tape, s: Optional[Tensor] = None) -> Tensor:
    """``h . W_hy + b_y`` with identity output activation (plus ``s . W_sy`` for SCRN)."""
    y = ad.matmul(h, tape.watch(cp["W_hy"]))
    if s is not None:
        y = ad.add(y, ad.matmul(s, tape.watch(cp["W_sy"])))
    return ad.add(y, tape.watch(cp["b_y"]))


def unroll(cp: CellParams, x_window, tape: Tape) -> CellState:
    """Run a fresh zero state over a lag window.

    ``x_window`` is ``(batch, w)``: each column is one time step of scalar
    input (or a list of ``(batch, n_I)`` tensors for wider inputs).
    """
    if isinstance(x_window, (list, tuple)):
        steps = list(x_window)
        batch = steps[0].shape[0]
    else:
        xv = x_window.value if isinstance(x_window, Tensor) else np.asarray(x_window, float)
        if xv.ndim == 1:
            xv = xv[None, :]
        batch = xv.shape[0]
        if isinstance(x_window, Tensor) and x_window.index is not None:
            # differentiable window: slice columns on the tape
            steps = [ad.matmul(x_window, tape.constant(np.eye(xv.shape[1])[:, [j]]))
                     for j in range(xv.shape[1])]
        else:
            steps = [tape.constant(xv[:, [j]]) for j in range(xv.shape[1])]
    if not steps:
        raise ValueError("window must contain at least one step")
    state = zero_state(cp, tape, batch)
    for x_t in steps:
        state = step(cp, state, x_t)
    return state


def predict(cp: CellParams, x_window, tape: Tape) -> Tensor:
    """One-step-ahead forecast for each row of ``x_window``."""
    state = unroll(cp, x_window, tape)
    return readout(state.h, cp, tape, state.s if cp.kind is K.SCRN else None)


# -- complexity --------------------------------------------------------------------


@dataclass(frozen=True)
class Complexity:
    """Trainable parameter total and the (weight matrix, bias vector) counts."""

    params: int
    weight_matrices: int
    bias_vectors: int


# Closed forms transcribed from the evaluated-models table:
# (n_I*n_H coeff, n_H^2 coeff, n_H coeff, #matrices, #biases).
# JORDAN/MRNN add n_O*n_H; SCRN adds n_I*n_S + n_S*n_H.
_TABLE = {
    K.NIG: (3, 3, 3, 6, 3), K.NFG: (3, 3, 3, 6, 3), K.NOG: (3, 3, 3, 6, 3),
    K.CIFG: (3, 3, 3, 6, 3), K.FB1: (4, 4, 3, 6, 3),
    K.NIAF: (4, 4, 4, 8, 4), K.NFAF: (4, 4, 4, 8, 4), K.NOAF: (4, 4, 4, 8, 4),
    K.NCAF: (4, 4, 4, 8, 4), K.LSTM_VANILLA: (4, 4, 4, 8, 4),
    K.PC: (4, 7, 4, 11, 4), K.FGR: (4, 13, 4, 17, 4),
    K.ELMAN: (1, 1, 1, 2, 1), K.IRNN: (1, 1, 1, 2, 1), K.JORDAN: (1, 0, 1, 2, 1),
    K.MRNN: (1, 1, 1, 3, 1), K.SCRN: (1, 1, 1, 4, 1),
    K.MGU_SLIM3: (1, 1, 2, 2, 2), K.MGU_SLIM2: (1, 2, 1, 3, 1),
    K.MGU_SLIM1: (1, 2, 2, 3, 2), K.MGU: (2, 2, 2, 4, 2),
    K.GRU_SLIM3: (1, 1, 3, 2, 3), K.GRU_SLIM2: (1, 3, 1, 4, 1),
    K.GRU_SLIM1: (1, 3, 3, 4, 3), K.MUT1: (2, 2, 3, 4, 3), K.MUT2: (2, 3, 3, 5, 3),
    K.MUT3: (3, 3, 3, 6, 3), K.GRU: (3, 3, 3, 6, 3),
    K.LSTM_SLIM3: (1, 1, 4, 2, 4), K.LSTM_SLIM2: (1, 4, 1, 5, 1),
    K.LSTM_SLIM1: (1, 4, 4, 5, 4),
}

_FORMULA_TEXT = {
    K.JORDAN: "n_I*n_H + n_O*n_H + n_H",
    K.MRNN: "n_I*n_H + n_H^2 + n_O*n_H + n_H",
    K.SCRN: "n_I*n_S + n_I*n_H + n_H^2 + n_S*n_H + n_H",
}


def complexity_table(kind) -> Tuple[int, int, int, int, int]:
    """Row of the published complexity table for ``kind``."""
    return _TABLE[parse_cell(kind)]


def theoretic_complexity(kind, dims: CellDims) -> int:
    """Parameter count from the published closed form (readout excluded)."""
    kind = parse_cell(kind)
    a, b, c, _, _ = _TABLE[kind]
    n_I, n_H = dims.n_I, dims.n_H
    total = a * n_I * n_H + b * n_H ** 2 + c * n_H
    if kind in (K.JORDAN, K.MRNN):
        total += dims.n_O * n_H
    if kind is K.SCRN:
        total += n_I * dims.context + dims.context * n_H
    return total


def param_count(kind, dims: CellDims) -> Complexity:
    """Closed-form parameter count with weight/bias tallies from the equations."""
    kind = parse_cell(kind)
    syms = _SYMBOLS[kind]
    weights = sum(1 for s in syms if s.startswith("W_"))
    biases = sum(1 for s in syms if s.startswith("b_")) - (1 if kind is K.FB1 else 0)
    return Complexity(theoretic_complexity(kind, dims), weights, biases)


def allocated_count(cp: CellParams) -> int:
    """Trainable entries actually allocated, readout excluded."""
    readout_syms = {"W_hy", "b_y", "W_sy"}
    return sum(p.size for p in cp.values() if p.trainable and p.name not in readout_syms)


def formula_text(kind) -> str:
    kind = parse_cell(kind)
    if kind in _FORMULA_TEXT:
        return _FORMULA_TEXT[kind]
    a, b, c, _, _ = _TABLE[kind]
    parts = []
    for coef, term in ((a, "n_I*n_H"), (b, "n_H^2"), (c, "n_H")):
        if coef:
            parts.append(term if coef == 1 else f"{coef}{term}")
    return " + ".join(parts)


REFERENCE_DIMS = CellDims(n_I=1, n_H=10)


def catalog() -> dict:
    """Machine-readable description of every cell."""
    rows = []
    for kind in CellKind:
        a, b, c, w, nb = _TABLE[kind]
        rows.append({
            "kind": kind.value,
            "experiments": [e for e, roster in ((1, EXPERIMENT_1), (2, EXPERIMENT_2))
                            if kind in roster],
            "symbols": list(_SYMBOLS[kind]),
            "frozen": ["b_f"] if kind is K.FB1 else [],
            "readout": ["W_hy", "b_y"] + (["W_sy"] if kind is K.SCRN else []),
            "complexity": {
                "formula": formula_text(kind),
                "n_I*n_H": a, "n_H^2": b, "n_H": c,
                "table_weight_matrices": w, "table_bias_vectors": nb,
                "at_reference_dims": theoretic_complexity(kind, REFERENCE_DIMS),
            },
        })
    return {"reference_dims": {"n_I": 1, "n_H": 10}, "cells": rows}


def catalog_json() -> str:
    return json.dumps(catalog(), indent=2)


def check_gradients(kind, n_H: int = 3, steps: int = 5, seed: int = 0, batch: int = 2,
                    eps: float = 1e-5) -> float:
    """Max relative error of tape vs central-difference gradients on a short unroll.

    Every parameter, biases included, is redrawn from N(0, 0.5^2) so no
    derivative is trivially zero at the checkpoint.
    """
    kind = parse_cell(kind)
    rng = np.random.default_rng(seed)
    cp = init_params(kind, CellDims(n_I=1, n_H=n_H), seed=seed)
    for p in cp.values():
        p.value = rng.normal(0.0, 0.5, size=p.shape)
    x = rng.normal(size=(batch, steps))
    target = rng.normal(size=(batch, 1))

    def loss(tape, _leaves):
        return ad.mse_loss(predict(cp, tape.constant(x), tape), target)

    return ad.grad_check(loss, list(cp.values()), eps=eps)
