"""
Lambda-variation of grid functions
==================================

Axis, sharp, mixed and star variations of a few catalog functions, with
the certificate that attains each value.
"""

import numpy as np

from genvar import make_catalog, make_lambda
from genvar import variation as va
from genvar.gridfn import random_grid_function

harmonic = make_lambda("harmonic")
root = make_lambda("power", p=0.5)

# sign(x - y) on an 8x8 grid: every row jumps up once and down once
f = make_catalog("sign_diag", grid=(8, 8))
res = va.axis_lambda_variation(f, 0, harmonic)
print(res.functional_id, res.value, res.certificate.intervals)

# letting each interval pick its own row picks up the extra jump
f4 = make_catalog("sign_diag", grid=(4, 4))
sharp = va.axis_lambda_variation(f4, 0, harmonic, "SHARP")
print(sharp.functional_id, sharp.value, sharp.certificate.points)

# slower-growing weights give larger sums once several intervals count
r = random_grid_function(np.random.default_rng(1), (6, 6))
for seq in (harmonic, root):
    print(seq.label, round(va.axis_lambda_variation(r, 0, seq).value, 6))

###############################################################################
# Mixed and star variation of a product of steps

g = make_catalog("separable", grid=(6, 6), factors=["step_1d", "step_1d"])
print("mixed", va.mixed_lambda_variation(g, harmonic).value)
print("star ", va.star_variation(g, harmonic).value)

###############################################################################
# Greedy search against exhaustive search on random samples

rng = np.random.default_rng(0)
gaps = []
for _ in range(20):
    h = random_grid_function(rng, (6, 6))
    ex = va.axis_lambda_variation(h, 0, harmonic, "SHARP").value
    gr = va.axis_lambda_variation(h, 0, harmonic, "SHARP", "GREEDY").value
    gaps.append((ex - gr) / ex)
print("greedy relative gap: max %.3g, mean %.3g" % (max(gaps), np.mean(gaps)))

###############################################################################
# Modulus of variation of the sawtooth cascade grows like sqrt(n)

m = make_catalog("modulus_family", gamma=0.5, grid=(256,))
v = va.modulus_of_variation(m, 0, 64, method="DYNAMIC").values
n = np.arange(1, 65)
for k in (1, 4, 16, 64):
    print("v(%d) / sqrt(%d) = %.4f" % (k, k, v[k - 1] / np.sqrt(k)))
