import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from genvar import _selection as sel
from genvar import variation as va
from genvar.gridfn import from_samples, make_catalog
from genvar.lambda_seq import make_lambda

import oracles

H = make_lambda("harmonic")
SQRT = make_lambda("power", p=0.5)
NLOG = make_lambda("n_over_log_pow", q=1)
SEQS = [H, SQRT, NLOG]

values = st.floats(-1, 1, allow_nan=False, width=32)


def grid_fn(shape):
    return arrays(np.float64, shape, elements=values).map(from_samples)


def lam_list(seq, k=40):
    return list(seq.weights(k))


# ------------------------------------------------------------- spec examples


def test_pairing_examples():
    assert va.optimal_pairing_value([3, 1, 2], H) == pytest.approx(3 + 1 + 1 / 3)
    assert va.optimal_pairing_value([5], make_lambda("power", p=1.0).tail(2)) == 2.5
    assert va.optimal_pairing_value([0, 0, 0], SQRT) == 0.0
    assert va.optimal_pairing_value([], H) == 0.0


def test_pairing_rejects_negative():
    with pytest.raises(ValueError):
        va.optimal_pairing_value([1, -1], H)


def test_invalid_lambda_refused():
    f = make_catalog("sign_diag")
    with pytest.raises(ValueError, match="bounded"):
        va.axis_lambda_variation(f, 0, make_lambda("constant", c=2.0))


def test_sign_diag_axis_values():
    f = make_catalog("sign_diag", grid=(8, 8))
    assert va.axis_lambda_variation(f, 0, H).value == 2.0
    assert va.axis_lambda_variation(f, 1, H).value == 2.0
    f4 = make_catalog("sign_diag", grid=(4, 4))
    res = va.axis_lambda_variation(f4, 0, H, "SHARP")
    assert res.value == 3.0
    assert res.bound_kind is va.BoundKind.EXACT
    # two intervals, each with its own off-axis point
    assert len(res.certificate) == 2
    assert len({p for p in res.certificate.points}) == 2


def test_constant_zero_everywhere():
    c = make_catalog("constant", value=1.7, grid=(5, 5))
    assert va.axis_lambda_variation(c, 0, H, "SHARP").value == 0.0
    assert va.mixed_lambda_variation(c, H).value == 0.0
    assert va.composite_variation(c, H, "TOTAL").value == 0.0
    assert va.star_variation(c, H).value == 0.0
    assert va.phi_variation(c, "power:p=2", 0).value == 0.0
    assert list(va.modulus_of_variation(c, 0, 2).values) == [0.0, 0.0]
    assert va.tail_continuity_probe(c, H, 0, [1, 2]).values == (0.0, 0.0)


def test_separable_step_mixed_and_star():
    f = make_catalog("separable", grid=(6, 6), factors=["step_1d", "step_1d"])
    assert va.mixed_lambda_variation(f, H).value == 4.0
    assert va.star_variation(f, H).value == 4.0


def test_additive_function_has_no_mixed_variation():
    g = np.sin(np.arange(5))[:, None] + np.cos(np.arange(4))[None, :]
    f = from_samples(g)
    assert va.mixed_lambda_variation(f, H).value == pytest.approx(0.0, abs=1e-12)


def test_partial_and_index_set():
    f = make_catalog("sign_diag", grid=(8, 8))
    res = va.composite_variation(f, H, "PARTIAL")
    assert res.value == 4.0 and len(res.constituents) == 2
    s3 = make_catalog("separable", grid=(4, 4, 4), factors=["step_1d"] * 3)
    r = va.composite_variation(s3, H, "INDEX_SET", alpha=[0, 1])
    assert r.value == 4.0
    assert r.constituents[0].certificate.fixed[0][0] == 2


def test_total_is_sum_over_index_sets():
    f = make_catalog("sign_diag", grid=(4, 4))
    tot = va.composite_variation(f, H, "TOTAL")
    parts = [va.axis_lambda_variation(f, 0, H).value, va.axis_lambda_variation(f, 1, H).value, va.mixed_lambda_variation(f, H).value]
    assert tot.value == pytest.approx(sum(parts))


def test_star_explicit_two_by_two():
    f = make_catalog("sign_diag").with_grid([0.5, 1.5], [1.0, 2.0])
    assert va.star_variation(f, H).value == 2.0


def test_phi_examples():
    step = make_catalog("step_1d")
    ramp = make_catalog("ramp_1d")
    assert va.phi_variation(step, "power:p=2").value == 4.0
    assert va.phi_variation(ramp, "power:p=2").value == pytest.approx(1.0)
    assert va.phi_variation(ramp, "power:p=2", method="DYNAMIC").value == pytest.approx(1.0)
    assert va.phi_variation(ramp, "power:p=1", method="GREEDY").value == pytest.approx(1.0)


def test_modulus_examples():
    f = make_catalog("sign_diag", grid=(8, 8))
    assert list(va.modulus_of_variation(f, 0, 4).values) == [2.0] * 4
    assert list(va.modulus_of_variation(f, 0, 4, sharp=True).values) == [2.0, 4.0, 6.0, 8.0]
    for method in ("DYNAMIC", "GREEDY"):
        assert list(va.modulus_of_variation(f, 0, 4, True, method).values) == [2.0, 4.0, 6.0, 8.0]


def test_modulus_cap_on_n():
    f = make_catalog("sign_diag", grid=(8, 8))
    with pytest.raises(ValueError):
        va.modulus_of_variation(f, 0, 5)


def test_modulus_family_square_root_growth():
    f = make_catalog("modulus_family", gamma=0.5, grid=(256,))
    v = va.modulus_of_variation(f, 0, 64, method="DYNAMIC").values
    ratio = v / np.sqrt(np.arange(1, 65))
    # c1 = 1, c2 = 2*sqrt(2): each tooth gives a rise and a fall of height k**-0.5
    assert ratio.min() >= 1.0 - 1e-12
    assert ratio.max() <= 2 * math.sqrt(2)


def test_tail_probe_values():
    f = make_catalog("sign_diag", grid=(8, 8))
    probe = va.tail_continuity_probe(f, H, 0, [1, 2, 4, 8])
    assert probe.values[0] == pytest.approx(2 * (1 + 1 / 2 + 1 / 3 + 1 / 4))
    assert probe.values[1] == pytest.approx(2 * (1 / 2 + 1 / 3 + 1 / 4 + 1 / 5))
    assert all(b < a for a, b in zip(probe.values, probe.values[1:]))
    assert probe.q_hat == 2.0


def test_tail_probe_needs_increasing_list():
    f = make_catalog("sign_diag", grid=(4, 4))
    with pytest.raises(ValueError):
        va.tail_continuity_probe(f, H, 0, [2, 1])


def test_caps():
    big = make_catalog("sign_diag", grid=(16, 16))
    with pytest.raises(va.CapExceeded):
        va.axis_lambda_variation(big, 0, H)
    assert va.axis_lambda_variation(big, 0, H, method="GREEDY").bound_kind is va.BoundKind.LOWER_BOUND
    seven = make_catalog("sign_diag", grid=(7, 7))
    with pytest.raises(va.CapExceeded):
        va.mixed_lambda_variation(seven, H)
    with pytest.raises(va.CapExceeded):
        va.star_variation(seven, H)


def test_star_needs_two_variables():
    with pytest.raises(ValueError):
        va.star_variation(make_catalog("step_1d"), H)


def test_result_json_shape():
    f = make_catalog("sign_diag", grid=(4, 4))
    d = va.axis_lambda_variation(f, 0, H, "SHARP").to_dict()
    assert {"value", "method", "bound_kind", "certificate", "functional_id"} <= set(d)
    assert d["functional_id"] == "L#V1"


# ------------------------------------------------------ exhaustive vs naive


def test_partitions_count_and_shape():
    for P in range(2, 8):
        left, right, valid = sel.partitions(P)
        assert left.shape == (2 ** (P - 2), P - 1)
        assert np.all(valid.sum(axis=1) >= 1)
    # collections of nonoverlapping intervals on P nodes: F(2P - 1)
    fib = [0, 1]
    while len(fib) < 20:
        fib.append(fib[-1] + fib[-2])
    for P in range(2, 8):
        assert sum(1 for _ in sel.all_collections(P)) == fib[2 * P - 1]
        assert len(oracles.collections(P)) == fib[2 * P - 1]


@settings(max_examples=40, deadline=None)
@given(grid_fn((3, 3)), st.sampled_from(SEQS), st.booleans())
def test_axis_matches_brute_force(f, seq, sharp):
    got = va.axis_lambda_variation(f, 0, seq, "SHARP" if sharp else "FIXED").value
    assert got == pytest.approx(oracles.axis_variation_brute(f, 0, lam_list(seq), sharp), rel=1e-12, abs=1e-15)


@settings(max_examples=25, deadline=None)
@given(grid_fn((6, 2)), st.sampled_from(SEQS))
def test_axis_matches_brute_force_long_axis(f, seq):
    got = va.axis_lambda_variation(f, 0, seq).value
    assert got == pytest.approx(oracles.axis_variation_brute(f, 0, lam_list(seq)), rel=1e-12, abs=1e-15)


@settings(max_examples=25, deadline=None)
@given(grid_fn((3, 3)), st.sampled_from(SEQS), st.sampled_from(SEQS))
def test_mixed_matches_double_permutation_brute_force(f, s1, s2):
    got = va.mixed_lambda_variation(f, [s1, s2]).value
    want = oracles.mixed_variation_brute(f, lam_list(s1), lam_list(s2))
    assert got == pytest.approx(want, rel=1e-12, abs=1e-15)


@settings(max_examples=5, deadline=None)
@given(grid_fn((4, 3)))
def test_mixed_matches_brute_force_rectangular(f):
    got = va.mixed_lambda_variation(f, H).value
    assert got == pytest.approx(oracles.mixed_variation_brute(f, lam_list(H), lam_list(H)), rel=1e-12)


@settings(max_examples=10, deadline=None)
@given(grid_fn((2, 3)), st.sampled_from(SEQS))
def test_star_matches_brute_force(f, seq):
    got = va.star_variation(f, seq).value
    assert got == pytest.approx(oracles.star_variation_brute(f, lam_list(seq)), rel=1e-12, abs=1e-15)


def test_star_matches_brute_force_3x3():
    rng = np.random.default_rng(3)
    for _ in range(2):
        f = from_samples(rng.uniform(-1, 1, (3, 3)))
        assert va.star_variation(f, H).value == pytest.approx(oracles.star_variation_brute(f, lam_list(H)), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(grid_fn((5, 2)), st.sampled_from(["power:p=1", "power:p=2", "xlogx"]), st.sampled_from(["EXHAUSTIVE", "DYNAMIC"]))
def test_phi_matches_brute_force(f, phi, method):
    got = va.phi_variation(f, phi, 0, method=method).value
    assert got == pytest.approx(oracles.phi_variation_brute(f, 0, va.make_phi(phi)), rel=1e-12, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(grid_fn((6, 3)), st.booleans(), st.sampled_from(["EXHAUSTIVE", "DYNAMIC"]))
def test_modulus_matches_brute_force(f, sharp, method):
    got = va.modulus_of_variation(f, 0, 3, sharp, method).values
    want = oracles.modulus_brute(f, 0, 3, sharp)
    np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-15)


# ---------------------------------------------------------------- invariants


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 10, allow_nan=False), max_size=7), st.sampled_from(SEQS))
def test_pairing_is_best_ordering(mags, seq):
    assert va.optimal_pairing_value(mags, seq) == oracles.pairing_brute(mags, lam_list(seq, 7))


@settings(max_examples=40, deadline=None)
@given(grid_fn((5, 5)), st.sampled_from(SEQS))
def test_certificates_reproduce_values(f, seq):
    results = [
        va.axis_lambda_variation(f, 0, seq, "FIXED"),
        va.axis_lambda_variation(f, 1, seq, "SHARP"),
        va.axis_lambda_variation(f, 0, seq, "SHARP", "GREEDY"),
        va.mixed_lambda_variation(f, seq),
        va.mixed_lambda_variation(f, seq, "GREEDY"),
        va.phi_variation(f, "power:p=2", 1, "SHARP"),
        va.composite_variation(f, seq, "TOTAL"),
    ]
    for r in results:
        assert r.recompute(f) == pytest.approx(r.value, rel=1e-12, abs=1e-300)


@settings(max_examples=40, deadline=None)
@given(grid_fn((5, 4)), st.sampled_from(SEQS))
def test_greedy_is_lower_bound(f, seq):
    for mode in ("FIXED", "SHARP"):
        ex = va.axis_lambda_variation(f, 0, seq, mode).value
        gr = va.axis_lambda_variation(f, 0, seq, mode, "GREEDY").value
        assert gr <= ex * (1 + 1e-12)
    assert va.mixed_lambda_variation(f, seq, "GREEDY").value <= va.mixed_lambda_variation(f, seq).value * (1 + 1e-12)


@settings(max_examples=15, deadline=None)
@given(grid_fn((3, 4)), st.sampled_from(SEQS))
def test_star_greedy_is_lower_bound(f, seq):
    assert va.star_variation(f, seq, "GREEDY").value <= va.star_variation(f, seq).value * (1 + 1e-12)


@settings(max_examples=40, deadline=None)
@given(grid_fn((4, 5)), st.sampled_from(SEQS), st.integers(0, 1))
def test_fixed_at_most_sharp(f, seq, axis):
    assert va.axis_lambda_variation(f, axis, seq, "FIXED").value <= va.axis_lambda_variation(f, axis, seq, "SHARP").value


@settings(max_examples=30, deadline=None)
@given(grid_fn((4, 4)))
def test_lambda_monotonicity(f):
    # n**0.5 <= n pointwise, so weights 1/sqrt(n) dominate 1/n
    for mode in ("FIXED", "SHARP"):
        assert va.axis_lambda_variation(f, 0, SQRT, mode).value >= va.axis_lambda_variation(f, 0, H, mode).value
    assert va.mixed_lambda_variation(f, SQRT).value >= va.mixed_lambda_variation(f, H).value
    assert va.star_variation(f, SQRT).value >= va.star_variation(f, H).value


@settings(max_examples=30, deadline=None)
@given(grid_fn((4, 4)), st.floats(-5, 5, allow_nan=False), st.floats(-5, 5, allow_nan=False))
def test_homogeneity_and_translation(f, c, shift):
    for fn in (
        lambda g: va.axis_lambda_variation(g, 0, H, "SHARP").value,
        lambda g: va.mixed_lambda_variation(g, H).value,
        lambda g: va.star_variation(g, H).value,
    ):
        base = fn(f)
        assert fn(f.scaled(c)) == pytest.approx(abs(c) * base, rel=1e-9, abs=1e-12)
        assert fn(f.scaled(1.0, shift)) == pytest.approx(base, rel=1e-9, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(grid_fn((6, 6)))
def test_coarser_grid_never_increases(f):
    coarse = from_samples(np.asarray(f.samples)[::2, ::2])
    # the coarse node set (including 2*pi) is a subset of the fine one
    for axis in (0, 1):
        for mode in ("FIXED", "SHARP"):
            assert va.axis_lambda_variation(coarse, axis, H, mode).value <= va.axis_lambda_variation(f, axis, H, mode).value + 1e-12


@settings(max_examples=30, deadline=None)
@given(grid_fn((8, 3)))
def test_modulus_table_invariants(f):
    plain = va.modulus_of_variation(f, 0, 4).values
    sharp = va.modulus_of_variation(f, 0, 4, sharp=True).values
    rows = oracles.node_values(f, 0)
    biggest = max(abs(v[b] - v[a]) for _, v in rows for a, b in itertools.combinations(range(len(v)), 2))
    assert np.all(np.diff(plain) >= 0)
    assert np.all(np.diff(plain) <= biggest + 1e-12)
    assert np.all(sharp >= plain - 1e-12)


@settings(max_examples=20, deadline=None)
@given(
    arrays(np.float64, 5, elements=values),
    arrays(np.float64, 5, elements=values),
    st.sampled_from(SEQS),
)
def test_separable_factorization(g, h, seq):
    f = from_samples(np.outer(g, h))
    gx = va.axis_lambda_variation(from_samples(g), 0, seq).value
    hy = va.axis_lambda_variation(from_samples(h), 0, seq).value
    assert va.mixed_lambda_variation(f, seq).value == pytest.approx(gx * hy, rel=1e-12, abs=1e-15)


def test_interval_collection_rejects_overlap():
    with pytest.raises(ValueError):
        va.IntervalCollection(0, ((0, 2), (1, 3)), ((0.0, 1.0), (0.5, 1.5)))
