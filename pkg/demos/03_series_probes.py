"""
Dyadic probes of hypothesis series
==================================

Partial sums at N = 2**k and the growth model the probe settles on.
"""

from genvar import make_catalog, make_lambda
from genvar import variation as va
from genvar.harness import power_log_terms
from genvar.lambda_seq import series_condition_probe, young_pair

for p, q in [(2.0, 0.0), (1.0, 0.0), (1.0, 2.0), (0.5, 0.0)]:
    v = series_condition_probe("TERMS", terms=power_log_terms(p, q))
    print("1/(n^%g log^%g):" % (p, q), v.classification.value, v.evidence.model, "%.8f" % v.partial_sums[-1])

# conditions driven by a weight sequence
for cond, spec in [("T1_1", "power:p=0.5"), ("T1_1", "n_over_log_pow:q=2"), ("TT", "n_over_log_pow:q=1")]:
    seq = make_lambda(spec.split(":")[0], **{k: float(v) for k, v in (s.split("=") for s in spec.split(":")[1:])})
    v = series_condition_probe(cond, seq)
    print(cond, seq.label, v.classification.value)

print("PHI", series_condition_probe("PHI", make_lambda("harmonic"), pair=young_pair("power:p=2")).classification.value)

# a modulus-driven condition, fed by the sawtooth cascade
f = make_catalog("modulus_family", gamma=0.5, grid=(512,))
table = va.modulus_of_variation(f, 0, 256, method="DYNAMIC")
v = series_condition_probe("T2", modulus=table)
print("T2 sawtooth:", v.classification.value, "last partial sum %.5f" % v.partial_sums[-1])
