"""One test per acceptance criterion; a pass/fail line per criterion is
printed in the terminal summary."""

import math
import time

import numpy as np
import pytest

from genvar import harness
from genvar import summability as sm
from genvar import variation as va
from genvar.cli import main
from genvar.gridfn import make_catalog
from genvar.lambda_seq import Classification, make_lambda

import oracles

LAMBDAS = [make_lambda("harmonic"), make_lambda("power", p=0.5), make_lambda("n_over_log_pow", q=1)]


@pytest.mark.criterion(1, "pairing value equals permutation brute force (500 multisets)")
def test_c01_pairing_oracle():
    rng = np.random.default_rng(42)
    cases = []
    for i in range(500):
        size = int(rng.integers(0, 8))
        # draw from a small pool so repeated magnitudes occur
        pool = rng.uniform(0, 10, size=4)
        mags = rng.choice(pool, size=size) if i % 2 else rng.uniform(0, 10, size=size)
        cases.append((mags, LAMBDAS[i % 3]))
    t0 = time.perf_counter()
    got = [va.optimal_pairing_value(m, s) for m, s in cases]
    elapsed = time.perf_counter() - t0
    for (m, s), v in zip(cases, got):
        assert v == oracles.pairing_brute(list(m), list(s.weights(7)))
    assert elapsed < 5.0


@pytest.fixture(scope="module")
def oracle_report():
    cfg = harness.ExperimentConfig.preset("ORACLE_EQUIVALENCE", seed=42, cases=200)
    t0 = time.perf_counter()
    rep = harness.run_experiment(cfg)
    return rep, time.perf_counter() - t0


@pytest.mark.criterion(2, "GREEDY <= EXHAUSTIVE and certificates on 200 random 5x5 grids")
def test_c02_oracle_equivalence(oracle_report):
    rep, elapsed = oracle_report
    assert len(rep.rows) == 200
    assert all(r.values["greedy_le_exhaustive"] == r.values["checks"] == 6 for r in rep.rows)
    assert max(r.values["max_certificate_error"] for r in rep.rows) <= 1e-12
    assert rep.summary == "PASS"
    assert elapsed < 60.0


@pytest.mark.criterion(3, "FIXED <= SHARP, lambda-monotonicity and homogeneity on the same cases")
def test_c03_inclusion_shadow():
    cfg = harness.ExperimentConfig.preset("INCLUSION_SUITE", seed=42, cases=200)
    rep = harness.run_experiment(cfg)
    assert len(rep.rows) == 200
    for r in rep.rows:
        for key in ("fixed_le_sharp", "monotone", "homogeneous", "translation"):
            assert r.values[f"{key}_ok"] == r.values[f"{key}_total"] > 0, (r.case_id, key)
    assert rep.summary == "PASS"
    # same random functions as the oracle suite
    assert harness._random_case(cfg, 7).samples.tobytes() == harness._random_case(
        harness.ExperimentConfig.preset("ORACLE_EQUIVALENCE", seed=42), 7
    ).samples.tobytes()


@pytest.mark.criterion(4, "catalog values for sign_diag")
def test_c04_catalog_values():
    h = make_lambda("harmonic")
    f8 = make_catalog("sign_diag", grid=(8, 8))
    f4 = make_catalog("sign_diag", grid=(4, 4))
    assert va.axis_lambda_variation(f8, 0, h, "FIXED", "EXHAUSTIVE").value == 2.0
    assert va.axis_lambda_variation(f8, 1, h, "FIXED", "EXHAUSTIVE").value == 2.0
    assert va.axis_lambda_variation(f4, 0, h, "SHARP", "EXHAUSTIVE").value == 3.0


@pytest.mark.criterion(5, "degree-(1,1) trig polynomials reproduced on a 64x64 lattice")
def test_c05_trig_reproduction():
    polys = [
        {(1, 1): 0.5, (-1, -1): 0.5},
        {(1, -1): 0.25j, (-1, 1): -0.25j, (0, 0): 1.0},
        {(1, 0): 0.3 + 0.1j, (-1, 0): 0.3 - 0.1j, (0, 1): -0.7, (0, -1): -0.7, (1, 1): 0.2j, (-1, -1): -0.2j},
    ]
    t = 2 * np.pi * np.arange(64) / 64
    X, Y = np.meshgrid(t, t, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    for coeffs in polys:
        f = make_catalog("trig_poly", coefficients=coeffs)
        table = sm.fourier_coefficients(f, 8)
        exact = f(pts[:, 0], pts[:, 1])
        for M in (1, 2, 3, 8):
            for N in (1, 2, 5, 8):
                got = sm.rectangular_partial_sum(table, (M, N), pts)
                assert np.max(np.abs(got - exact)) <= 1e-10


@pytest.mark.criterion(6, "Cesaro identities: order zero, kernel mass, A_2^-0.5")
def test_c06_cesaro_identities():
    table = sm.fourier_coefficients(make_catalog("step_product"), 64)
    rng = np.random.default_rng(6)
    pts = rng.uniform(0, 2 * np.pi, (25, 2))
    for n, m in [(0, 0), (1, 5), (17, 64), (64, 64), (33, 2)]:
        sig = sm.cesaro_mean(table, sm.CesaroParams((0.0, 0.0), (n, m)), pts)
        S = sm.rectangular_partial_sum(table, (n, m), pts)
        assert np.max(np.abs(sig - S)) <= 1e-12
    for alpha in (-0.9, -0.5, 0.5, 1.0):
        for m in range(0, 1025):
            mass, A = sm.kernel_mass(alpha, m)
            assert abs(mass - A) <= 1e-12 * max(1.0, abs(A))
    assert sm.cesaro_coefficients(-0.5, 2)[2] == 0.375


@pytest.mark.criterion(7, "Gibbs maximum at M = 2048 equals 2 Si(pi) / pi")
def test_c07_gibbs():
    table = sm.fourier_coefficients(make_catalog("square_wave_1d"), 2048)
    where, peak = sm.partial_sum_maximum(table, 2048, 0.0, 0.05)
    want = 2.0 * oracles.si_simpson(math.pi) / math.pi
    assert abs(peak - want) <= 1e-3
    assert 0 < where < 0.01


@pytest.mark.criterion(8, "partial sums of step_product at (pi, pi): trend and final error < 0.02")
def test_c08_theorem_s_desk():
    rep = harness.run_experiment(harness.ExperimentConfig.preset("THEOREM_S_DESK"))
    row = rep.rows[0]
    assert row.inputs["point"] == "pi,pi"
    assert row.verdict == "CONVERGING"
    assert row.values["final_error"] < 0.02
    errs = [e for _, e in row.trace]
    assert [n for n, _ in row.trace] == [16, 32, 64, 128, 256, 512]
    # at (pi, pi) the sums hit f* up to roundoff; the floor counts those as zero
    z = [0.0 if e <= sm.ERROR_FLOOR else e for e in errs]
    assert all(b == 0.0 or b < a for a, b in zip(z[-4:], z[-3:]))
    # the companion point off the symmetry axis shows a genuine strict decrease
    comp = rep.rows[1]
    e2 = [e for _, e in comp.trace]
    assert all(b < a for a, b in zip(e2[-4:], e2[-3:])) and e2[-1] < 0.02


@pytest.mark.criterion(9, "Cesaro (-0.3, -0.3) CONVERGING; 1-d W2 mirror converges to 0")
def test_c09_zhizhiashvili_and_w2():
    rep = harness.run_experiment(harness.ExperimentConfig.preset("ZHIZHIASHVILI_DESK"))
    row = rep.rows[0]
    assert (row.inputs["point"], row.inputs["orders"]) == ("pi,pi", "-0.3,-0.3")
    assert row.verdict == "CONVERGING"
    w2 = harness.run_experiment(harness.ExperimentConfig.preset("WATERMAN_W2_1D"))
    first = w2.rows[0]
    assert first.inputs["point"] == "pi" and first.inputs["lambda"] == "power:p=0.7"
    assert first.values["target"] == 0.0
    assert first.verdict == "CONVERGING"
    assert first.values["bound_kind"] == "EXACT"


@pytest.mark.criterion(10, "series probes: sum 1/n^2 converges to pi^2/6, sum 1/n diverges")
def test_c10_series():
    rep = harness.run_experiment(
        harness.ExperimentConfig.preset(
            "SERIES_PROBE_SUITE",
            series=[{"condition": "TERMS", "p": 2.0}, {"condition": "TERMS", "p": 1.0}],
        )
    )
    conv, div = rep.rows
    assert conv.verdict == Classification.CONVERGENT.value
    assert conv.values["cutoff"] == 2**24
    assert abs(conv.values["final_partial_sum"] - math.pi**2 / 6) <= 1e-4
    assert div.verdict == Classification.DIVERGENT.value
    assert div.values["fit_model"] == "log" and div.values["fit_residual"] < 0.05


@pytest.mark.criterion(11, "reports byte-identical across --threads")
@pytest.mark.parametrize(
    "argv",
    [
        ["--name", "ORACLE_EQUIVALENCE", "--cases", "12"],
        ["--name", "INCLUSION_SUITE", "--cases", "8"],
        ["--name", "THEOREM_S_DESK"],
        ["--name", "GOGINAVA_PBV_REGIME"],
        ["--name", "SERIES_PROBE_SUITE"],
    ],
)
def test_c11_reproducibility(tmp_path, argv):
    outs = []
    for threads in ("1", "4"):
        d = tmp_path / f"t{threads}"
        assert main(["experiment", *argv, "--seed", "42", "--threads", threads, "--out-dir", str(d)]) == 0
        outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    assert len(outs[0]) == 3
    assert outs[0] == outs[1]
