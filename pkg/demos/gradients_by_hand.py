"""
Checking backpropagation through time
=====================================

The tape records every primitive op of an unrolled cell. Here we compare its
gradients against central differences, first on a toy function, then on
every cell.
"""

import numpy as np

from rnnbench import CellKind, Parameter, Tape, check_gradients
from rnnbench import autodiff as ad

# A scalar loss of a single 1x3 parameter: sum(x * x) has gradient 2x.
x = Parameter("x", [[1.0, 2.0, 3.0]])
tape = Tape()
leaf = tape.watch(x)
loss = ad.total(ad.hadamard(leaf, leaf))
print("tape gradient:", tape.backward(loss)["x"])

# grad_check rebuilds the graph for every perturbed coordinate and returns
# the worst relative disagreement.
err = ad.grad_check(lambda t, p: ad.total(ad.tanh(ad.hadamard(p["x"], p["x"]))), [x])
print(f"tanh(x*x) check: {err:.2e}")

# Five steps of every cell, three hidden units, all parameters randomized.
errors = {k.value: check_gradients(k, n_H=3, steps=5) for k in CellKind}
worst = max(errors, key=errors.get)
print(f"{len(errors)} cells checked, worst is {worst} at {errors[worst]:.2e}")
assert np.all(np.array(list(errors.values())) < 1e-5)
