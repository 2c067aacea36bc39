import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rnnbench import autodiff as ad
from rnnbench.autodiff import DimensionError, NumericError, Parameter, Tape


def test_activation_identities():
    tape = Tape()
    assert ad.sigmoid(tape.variable(0.0)).value[0, 0] == 0.5
    assert ad.tanh(tape.variable(0.0)).value[0, 0] == 0.0
    assert ad.relu(tape.variable(-1.0)).value[0, 0] == 0.0


def test_hadamard_and_mse_values():
    tape = Tape()
    prod = ad.hadamard(tape.variable([[1.0, 2.0]]), tape.variable([[3.0, 4.0]]))
    np.testing.assert_array_equal(prod.value, [[3.0, 8.0]])
    loss = ad.mse_loss(tape.variable([[1.0, 2.0, 3.0]]), [[2.0, 2.0, 2.0]])
    assert loss.value[0, 0] == pytest.approx(2.0 / 3.0, abs=1e-15)


def test_shape_mismatch_names_both_shapes():
    tape = Tape()
    a, b = tape.variable(np.ones((2, 3))), tape.variable(np.ones((2, 2)))
    with pytest.raises(DimensionError, match=r"\(2, 3\).*\(2, 2\)"):
        ad.hadamard(a, b)
    with pytest.raises(DimensionError):
        ad.matmul(a, b)


@pytest.mark.filterwarnings("ignore:overflow:RuntimeWarning")
def test_non_finite_output_raises():
    tape = Tape()
    big = tape.variable([[1e308]])
    with pytest.raises(NumericError):
        ad.scalar_mul(10.0, big)


def test_bias_row_broadcast_gradient():
    tape = Tape()
    x = tape.variable(np.arange(6.0).reshape(3, 2))
    b = tape.variable([[1.0, -1.0]])
    root = ad.total(ad.add(x, b))
    np.testing.assert_array_equal(tape.grad(root, b), [[3.0, 3.0]])


def test_grad_of_sum_of_squares():
    p = Parameter("x", [[1.0, 2.0, 3.0]])
    tape = Tape()
    x = tape.watch(p)
    root = ad.total(ad.hadamard(x, x))
    np.testing.assert_allclose(tape.backward(root)["x"], [[2.0, 4.0, 6.0]])


def test_unreachable_parameter_gets_zero():
    p, q = Parameter("p", [[2.0, 5.0]]), Parameter("q", [[1.0]])
    tape = Tape()
    tape.watch(q)
    root = ad.total(tape.watch(p))
    grads = tape.backward(root)
    np.testing.assert_array_equal(grads["q"], [[0.0]])


def test_linear_in_parameter():
    p = Parameter("p", [[0.7]])
    tape = Tape()
    root = ad.scalar_mul(-3.5, tape.watch(p))
    assert tape.backward(root)["p"][0, 0] == -3.5


def test_fan_out_accumulates():
    # x used three times: d/dx (x*x + x) = 2x + 1
    p = Parameter("x", [[1.5]])
    tape = Tape()
    x = tape.watch(p)
    root = ad.add(ad.hadamard(x, x), x)
    assert tape.backward(root)["x"][0, 0] == pytest.approx(4.0)


def test_backward_requires_scalar_root():
    tape = Tape()
    v = tape.variable(np.ones((2, 2)))
    with pytest.raises(ValueError):
        tape.backward(ad.tanh(v))


def test_sign_has_zero_derivative():
    p = Parameter("p", [[0.3, -2.0]])
    tape = Tape()
    root = ad.total(ad.sign(tape.watch(p)))
    np.testing.assert_array_equal(tape.backward(root)["p"], [[0.0, 0.0]])


def test_grad_check_two_layer_tanh():
    rng = np.random.default_rng(3)
    params = [Parameter("W1", rng.normal(size=(3, 4))), Parameter("b1", rng.normal(size=(1, 4))),
              Parameter("W2", rng.normal(size=(4, 1))), Parameter("b2", rng.normal(size=(1, 1)))]
    x = rng.normal(size=(5, 3))
    y = rng.normal(size=(5, 1))

    def f(tape, p):
        h = ad.tanh(ad.add(ad.matmul(tape.constant(x), p["W1"]), p["b1"]))
        return ad.mse_loss(ad.add(ad.matmul(h, p["W2"]), p["b2"]), y)

    assert ad.grad_check(f, params) < 1e-5


def test_grad_check_linear_is_exact():
    p = Parameter("p", [[0.2, -1.0, 4.0]])
    c = np.array([[1.5], [-2.0], [0.25]])
    err = ad.grad_check(lambda tape, leaves: ad.matmul(leaves["p"], tape.constant(c)), [p])
    assert err < 1e-9


_UNARY = [ad.tanh, ad.sigmoid, ad.one_minus, lambda t: ad.scalar_mul(0.7, t)]
_BINARY = [ad.add, ad.subtract, ad.hadamard]


@settings(max_examples=40, deadline=None)
@given(ops=st.lists(st.tuples(st.integers(0, 6), st.integers(0, 100)), min_size=1, max_size=20),
       seed=st.integers(0, 2 ** 16))
def test_random_compositions_match_finite_differences(ops, seed):
    rng = np.random.default_rng(seed)
    params = [Parameter(f"p{i}", rng.uniform(-1, 1, size=(2, 3))) for i in range(3)]

    def f(tape, leaves):
        pool = [leaves[p.name] for p in params]
        for op, pick in ops:
            a = pool[pick % len(pool)]
            if op < len(_UNARY):
                pool.append(_UNARY[op](a))
            else:
                b = pool[(pick // 7) % len(pool)]
                pool.append(_BINARY[op - len(_UNARY)](a, b))
        return ad.total(ad.tanh(pool[-1]))

    assert ad.grad_check(f, params) < 1e-6
