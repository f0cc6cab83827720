"""
Partial sums and Cesaro means at corners of a step
==================================================

Error traces of rectangular partial sums and of Cesaro means with negative
orders, at a regular point where four quadrant limits differ.  Writes
two-column plot data next to the script.
"""

import math
from pathlib import Path

from genvar import make_catalog
from genvar import summability as sm

f = make_catalog("step_product")
out = Path(__file__).with_name("traces.dat")
blocks = []

for point in [(math.pi, math.pi), (math.pi / 2, math.pi)]:
    for method, orders in [("PARTIAL_SUM", None), ("CESARO", (-0.3, -0.3)), ("CESARO", (0.5, 0.5))]:
        tr = sm.pringsheim_diagnostic(f, point, method, orders, "16:512:dyadic")
        print("%-18s at (%.4f, %.4f): f* = %.3f, final error %.2e, %s"
              % (tr.method, point[0], point[1], tr.target, tr.errors[-1], tr.verdict.value))
        rows = ["%d %.6e" % (n, e) for n, e in zip(tr.degrees, tr.errors)]
        blocks.append("# %s %s\n" % (tr.method, point) + "\n".join(rows))

# unrestricted rectangles: worst error over all degree pairs past n
lat = sm.pringsheim_diagnostic(f, (math.pi / 2, math.pi), dyadic=[16, 32, 64, 128, 256], lattice=True)
print("lattice sup errors:", ["%.2e" % e for e in lat.errors])

###############################################################################
# Gibbs overshoot of the square wave

table = sm.fourier_coefficients(make_catalog("square_wave_1d"), 2048)
x, peak = sm.partial_sum_maximum(table, 2048, 0.0, 0.05)
print("max S_2048 = %.6f at x = %.3e" % (peak, x))

out.write_text("\n\n".join(blocks) + "\n")
print("wrote", out)
