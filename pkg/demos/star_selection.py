"""
Yellow and gray stars
=====================

Cells whose errors sit within a small tolerance of the best are treated as
tied. Among tied cells the one with the fewest parameters gets the yellow
star and the rest get gray.
"""

from rnnbench import select_stars
from rnnbench.cells import REFERENCE_DIMS, theoretic_complexity

row = {"A": (0.050, 100), "B": (0.050, 120), "C": (0.060, 50)}
print({cell: star.value or "-" for cell, star in select_stars(row).items()})

# Two cells with an identical reported error: the lighter one wins.
for cell in ("CIFG", "MGU-SLIM2"):
    print(cell, theoretic_complexity(cell, REFERENCE_DIMS), "parameters at n_H = 10")
row = {c: (0.0286, theoretic_complexity(c, REFERENCE_DIMS)) for c in ("CIFG", "MGU-SLIM2")}
print({cell: star.value for cell, star in select_stars(row).items()})

# A gap of three units in the fourth decimal is larger than the tolerance,
# so the lower error wins regardless of size.
row = {"FB1": (0.1163, theoretic_complexity("FB1", REFERENCE_DIMS)),
       "MGU-SLIM3": (0.1166, theoretic_complexity("MGU-SLIM3", REFERENCE_DIMS))}
print({cell: star.value or "-" for cell, star in select_stars(row).items()})
