"""
A look at the synthetic processes
=================================

One replicate of one process per behavior, drawn at desk length.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rnnbench import BEHAVIORS, DgpSpec, NoiseSpec, generate

# Every process adds N(0, 0.2^2) noise to its signal. Chaotic signals are
# standardized first, so their noise level is comparable across systems.
picks = {behavior: kinds[-1] for behavior, kinds in BEHAVIORS.items()}

fig, axes = plt.subplots(len(picks), 1, figsize=(9, 10), sharex=True)
for ax, (behavior, kind) in zip(axes, picks.items()):
    series = generate(DgpSpec(kind, length=600, noise=NoiseSpec(0.0, 0.2, seed=3)))
    ax.plot(np.arange(1, 601), series.values, lw=0.8)
    ax.set_title(f"{behavior}: {kind.value}", fontsize=9)

# The first 400 points train, the next 100 validate, the last 100 test.
for ax in axes:
    ax.axvline(400, color="0.6", ls="--", lw=0.7)
    ax.axvline(500, color="0.6", ls="--", lw=0.7)

fig.tight_layout()
fig.savefig("processes.png", dpi=110)
print("saved processes.png")
