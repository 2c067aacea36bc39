import itertools
import math

import numpy as np
import pytest

from rnnbench import autodiff as ad
from rnnbench.autodiff import Tape
from rnnbench.cells import (EXPERIMENT_1, EXPERIMENT_2, CellDims, CellKind, CellState,
                            allocated_count, cell_symbols, check_gradients, complexity_table,
                            init_params, param_count, parse_cell, predict, readout, step,
                            unroll, zero_state)

from oracles import TABLE_COUNTS, formula

K = CellKind

ALL = list(CellKind)


def zeroed(kind, n_H=1, n_I=1):
    cp = init_params(kind, CellDims(n_I=n_I, n_H=n_H))
    for p in cp.values():
        p.value = np.zeros_like(p.value)
    return cp


def test_rosters_cover_all_31_kinds():
    assert len(EXPERIMENT_1) == 12 and len(EXPERIMENT_2) == 20
    assert set(EXPERIMENT_1) | set(EXPERIMENT_2) == set(CellKind)
    assert len(CellKind) == 31
    assert set(EXPERIMENT_1) & set(EXPERIMENT_2) == {K.LSTM_VANILLA}


def test_parse_cell_accepts_aliases():
    assert parse_cell("lstm_vanilla") is K.LSTM_VANILLA
    assert parse_cell("mgu-slim3") is K.MGU_SLIM3
    with pytest.raises(ValueError):
        parse_cell("LSTM-VANILA")


# -- complexity ----------------------------------------------------------------


def test_complexity_hand_examples():
    c = param_count(K.LSTM_VANILLA, CellDims(n_I=3, n_H=5))
    assert (c.params, c.weight_matrices, c.bias_vectors) == (180, 8, 4)
    assert param_count(K.ELMAN, CellDims(1, 1)).params == 3
    c = param_count(K.MGU_SLIM3, CellDims(n_I=2, n_H=4))
    assert (c.params, c.weight_matrices, c.bias_vectors) == (32, 2, 2)


@pytest.mark.parametrize("kind", ALL, ids=lambda k: k.value)
def test_param_count_matches_formula_and_allocation(kind):
    for n_I, n_H in itertools.product(range(1, 7), repeat=2):
        dims = CellDims(n_I=n_I, n_H=n_H)
        expected = formula(kind, n_I, n_H)
        assert param_count(kind, dims).params == expected
        assert allocated_count(init_params(kind, dims)) == expected


def test_scrn_context_width_is_independent():
    dims = CellDims(n_I=2, n_H=3, n_S=5)
    assert param_count(K.SCRN, dims).params == 2 * 5 + 2 * 3 + 9 + 5 * 3 + 3
    assert allocated_count(init_params(K.SCRN, dims)) == param_count(K.SCRN, dims).params


@pytest.mark.parametrize("kind", ALL, ids=lambda k: k.value)
def test_matrix_and_bias_counts_match_table(kind):
    c = param_count(kind, CellDims(2, 3))
    assert complexity_table(kind)[3:] == TABLE_COUNTS[kind]
    if kind is K.FB1:
        # FB1 keeps all eight LSTM matrices (its formula has 4n_I n_H + 4n_H^2);
        # the table's count of 6 disagrees with its own formula.
        assert (c.weight_matrices, c.bias_vectors) == (8, 3)
    else:
        assert (c.weight_matrices, c.bias_vectors) == TABLE_COUNTS[kind]


# -- initialization ----------------------------------------------------------------


def test_irnn_identity_recurrence_and_zero_bias():
    cp = init_params(K.IRNN, CellDims(1, 3))
    np.testing.assert_array_equal(cp["W_hh"].value, np.eye(3))
    np.testing.assert_array_equal(cp["b_h"].value, np.zeros((1, 3)))


def test_fb1_forget_bias_frozen_at_one():
    cp = init_params(K.FB1, CellDims(1, 4))
    assert not cp["b_f"].trainable
    np.testing.assert_array_equal(cp["b_f"].value, np.ones((1, 4)))


@pytest.mark.parametrize("kind", ALL, ids=lambda k: k.value)
def test_init_is_seeded_and_glorot_bounded(kind):
    a = init_params(kind, CellDims(2, 3), seed=11)
    b = init_params(kind, CellDims(2, 3), seed=11)
    for name, p in a.params.items():
        np.testing.assert_array_equal(p.value, b[name].value)
        if name.startswith("W_") and not (kind is K.IRNN and name == "W_hh"):
            r, c = p.shape
            assert np.abs(p.value).max() <= math.sqrt(6.0 / (r + c))
        if name.startswith("b_") and not (kind is K.FB1 and name == "b_f"):
            assert not p.value.any()


# -- forward equations ----------------------------------------------------------------


def test_lstm_zero_fixed_point():
    cp = zeroed(K.LSTM_VANILLA, n_H=2)
    tape = Tape()
    st = step(cp, zero_state(cp, tape), tape.constant([[0.7]]))
    for g in st.gates.values():
        np.testing.assert_array_equal(g.value, 0.5)
    assert not st.c.value.any() and not st.h.value.any()


def test_nfg_hand_evaluation():
    cp = zeroed(K.NFG)
    tape = Tape()
    st = zero_state(cp, tape)
    st.c = tape.constant([[1.0]])
    out = step(cp, st, tape.constant([[0.3]]))
    assert out.c.value[0, 0] == 1.0
    assert out.h.value[0, 0] == pytest.approx(0.5 * math.tanh(1.0), abs=1e-15)
    assert out.h.value[0, 0] == pytest.approx(0.380797, abs=1e-6)


def test_cifg_couples_forget_to_input():
    cp = zeroed(K.CIFG)
    assert "b_f" not in cp and "W_hf" not in cp
    tape = Tape()
    st = zero_state(cp, tape)
    st.c = tape.constant([[1.0]])
    assert step(cp, st, tape.constant([[2.0]])).c.value[0, 0] == 0.5


def test_mgu_slim3_convex_fixed_point():
    cp = zeroed(K.MGU_SLIM3, n_H=2)
    cp["b_h~"].value[:] = np.arctanh([[0.3, -0.6]])
    cp["b_f"].value[:] = 1.7
    tape = Tape()
    st = zero_state(cp, tape)
    st.h = tape.constant([[0.3, -0.6]])
    out = step(cp, st, tape.constant([[5.0]]))
    np.testing.assert_allclose(out.h.value, [[0.3, -0.6]], atol=1e-15)


@pytest.mark.parametrize("kind", [K.LSTM_SLIM3, K.GRU_SLIM3, K.MGU_SLIM3],
                         ids=lambda k: k.value)
def test_slim3_gates_ignore_input_and_state(kind):
    cp = init_params(kind, CellDims(1, 3), seed=2)
    rng = np.random.default_rng(0)
    for p in cp.values():
        p.value = rng.normal(size=p.shape)
    tape = Tape()
    st = zero_state(cp, tape, batch=4)
    seen = []
    for t in range(3):
        st = step(cp, st, tape.constant(rng.normal(size=(4, 1))))
        seen.append({k: v.value.copy() for k, v in st.gates.items()})
    for gates in seen:
        for name, g in gates.items():
            np.testing.assert_allclose(g, seen[0][name])
            np.testing.assert_allclose(g, np.repeat(g[:1], 4, axis=0))


def _random_cell(kind, n_H=3, seed=0):
    cp = init_params(kind, CellDims(1, n_H), seed=seed)
    rng = np.random.default_rng(seed)
    for p in cp.values():
        p.value = rng.normal(0, 1.0, size=p.shape)
    return cp


LINEAR = {K.NIAF: "i", K.NFAF: "f", K.NOAF: "o"}


@pytest.mark.parametrize("kind", ALL, ids=lambda k: k.value)
def test_gate_values_lie_in_unit_interval(kind):
    cp = _random_cell(kind)
    tape = Tape()
    st = zero_state(cp, tape, batch=8)
    rng = np.random.default_rng(1)
    for _ in range(4):
        st = step(cp, st, tape.constant(rng.normal(size=(8, 1))))
        for name, g in st.gates.items():
            if LINEAR.get(kind) == name:
                continue
            assert ((g.value > 0) & (g.value < 1)).all(), name


def test_fgr_gate_recurrence_is_live():
    cp = _random_cell(K.FGR)
    tape = Tape()
    y = predict(cp, tape.constant(np.random.default_rng(0).normal(size=(3, 4))), tape)
    grads = tape.backward(ad.total(y))
    for a in "ifo":
        for b in "ifo":
            assert np.abs(grads[f"W_{a}{b}"]).max() > 0


def test_unroll_window_of_one_is_single_step():
    cp = _random_cell(K.GRU)
    tape = Tape()
    x = np.array([[0.4], [-1.0]])
    a = unroll(cp, x, tape).h.value
    b = step(cp, zero_state(cp, tape, 2), tape.constant(x)).h.value
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("kind", [k for k in ALL if k is not K.IRNN], ids=lambda k: k.value)
def test_zero_window_with_zero_params_stays_at_zero(kind):
    cp = zeroed(kind, n_H=2)
    tape = Tape()
    assert not unroll(cp, np.zeros((1, 5)), tape).h.value.any()


def test_bptt_reaches_first_input():
    cp = _random_cell(K.LSTM_VANILLA)
    x0 = np.random.default_rng(5).normal(size=(1, 5))
    tape = Tape()
    xw = tape.variable(x0)
    root = ad.total(predict(cp, xw, tape))
    g = tape.grad(root, xw)[0, 0]
    eps = 1e-6

    def f(v):
        x = x0.copy()
        x[0, 0] = v
        t = Tape()
        return predict(cp, t.constant(x), t).value[0, 0]

    numeric = (f(x0[0, 0] + eps) - f(x0[0, 0] - eps)) / (2 * eps)
    assert abs(g) > 1e-8
    assert g == pytest.approx(numeric, rel=1e-6)


def test_readout_is_affine_with_identity_activation():
    cp = zeroed(K.ELMAN, n_H=2)
    tape = Tape()
    cp["b_y"].value[:] = 0.3
    assert readout(tape.constant([[1.0, 2.0]]), cp, tape).value[0, 0] == 0.3
    cp["b_y"].value[:] = 0.0
    cp["W_hy"].value[:] = [[0.5], [0.25]]
    assert readout(tape.constant([[1.0, 2.0]]), cp, tape).value[0, 0] == 1.0


def test_mut_raw_input_adapter_handles_wide_inputs():
    cp = init_params(K.MUT1, CellDims(n_I=3, n_H=2), seed=0)
    tape = Tape()
    out = step(cp, zero_state(cp, tape, 2), tape.constant(np.ones((2, 3))))
    assert out.h.shape == (2, 2)


def test_jordan_feeds_back_its_readout():
    cp = _random_cell(K.JORDAN)
    tape = Tape()
    st = step(cp, zero_state(cp, tape), tape.constant([[0.5]]))
    np.testing.assert_allclose(st.y_prev.value, readout(st.h, cp, tape).value)


@pytest.mark.parametrize("kind", ALL, ids=lambda k: k.value)
def test_five_step_gradient_check(kind):
    assert check_gradients(kind, n_H=3, steps=5, seed=0) < 1e-5


def test_symbols_exclude_readout():
    for kind in ALL:
        assert not {"W_hy", "b_y", "W_sy"} & set(cell_symbols(kind))


def test_state_dataclass_defaults():
    tape = Tape()
    st = CellState(h=tape.constant([[0.0]]))
    assert st.c is None and st.gates == {}
