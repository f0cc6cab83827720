import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from genvar.gridfn import (
    TWO_PI,
    Box,
    from_samples,
    load_samples_csv,
    make_catalog,
    mixed_difference,
    parse_function,
    parse_real,
    quadrant_limits,
    save_samples_csv,
)


def test_parse_real():
    assert parse_real("pi/2") == math.pi / 2
    assert parse_real("-0.3") == -0.3
    assert parse_real("2*pi - 1") == 2 * math.pi - 1
    with pytest.raises(ValueError):
        parse_real("__import__('os')")


def test_nodes_include_closing_point():
    f = make_catalog("sign_diag", grid=(4, 4))
    assert f.shape == (4, 4)
    np.testing.assert_allclose(f.nodes(0), [0, math.pi / 2, math.pi, 3 * math.pi / 2, TWO_PI])
    g = f.with_grid([0.5, 1.5], [1.0, 2.0])
    assert list(g.nodes(0)) == [0.5, 1.5]


def test_grid_validation():
    f = make_catalog("sign_diag")
    with pytest.raises(ValueError):
        f.with_grid([1.0, 0.5], [1.0, 2.0])
    with pytest.raises(ValueError):
        make_catalog("sign_diag", grid=(4,))


def test_catalog_values():
    s = make_catalog("step_1d")
    assert s(0.5) == 1.0 and s(4.0) == -1.0
    p = make_catalog("step_product", scale=2.0)
    assert p(1.0, 1.0) == 2.0 and p(1.0, 4.0) == 0.0
    r = make_catalog("ramp_1d")
    assert r.cell_value(TWO_PI) == pytest.approx(1.0)
    assert r(TWO_PI + 1.0) == pytest.approx(1.0 / TWO_PI)  # periodic reduction


def test_trig_poly_coefficients():
    t = make_catalog("trig_poly", coefficients={(1, 0): 0.5, (-1, 0): 0.5})
    assert t(0.0, 1.0) == pytest.approx(1.0)
    assert t(math.pi, 0.0) == pytest.approx(-1.0)
    assert t.coeff(np.array(1), np.array(0)) == 0.5
    assert t.continuous


def test_parse_function_separable():
    f = parse_function("separable:factors=step_1d|step_1d", (6, 6))
    assert f.dim == 2 and f.shape == (6, 6)
    assert f(1.0, 4.0) == -1.0
    with pytest.raises(ValueError):
        parse_function("nope")


def test_mixed_difference_of_product():
    f = make_catalog("separable", factors=["ramp_1d", "ramp_1d"])
    box = Box.from_pairs((0.0, math.pi), (math.pi, TWO_PI))
    assert mixed_difference(f, box) == pytest.approx(0.25)
    g = make_catalog("separable", factors=["ramp_1d", "ramp_1d", "ramp_1d"])
    assert mixed_difference(g, Box.from_pairs((0.0, math.pi), (0.0, math.pi)), {2: math.pi}) == pytest.approx(0.125)


def test_box_validation():
    with pytest.raises(ValueError):
        Box.from_pairs((1.0, 1.0))
    with pytest.raises(ValueError):
        Box.from_pairs((0.0, 7.0))


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, (3, 4), elements=st.floats(-1, 1, width=32)))
def test_additive_functions_have_zero_mixed_difference(a):
    g = from_samples(a[:, :1] + a[:1, :])
    x, y = g.nodes(0), g.nodes(1)
    for i in range(len(x) - 1):
        for j in range(len(y) - 1):
            box = Box.from_pairs((x[i], x[-1]), (y[j], y[j + 1]))
            assert mixed_difference(g, box) == pytest.approx(0.0, abs=1e-12)


def test_samples_closing_node_wraps_and_csv(tmp_path):
    a = np.arange(6.0).reshape(2, 3)
    f = from_samples(a)
    assert f.cell_value(TWO_PI, 0.0) == 0.0
    assert f.cell_value(math.pi, 2 * TWO_PI / 3) == 5.0
    path = tmp_path / "f.csv"
    save_samples_csv(f, path)
    np.testing.assert_array_equal(load_samples_csv(path).samples, a)


def test_quadrant_limits_catalog_and_numeric():
    f = make_catalog("step_product")
    rep = quadrant_limits(f, (math.pi, math.pi))
    assert rep.regular and rep.f_star == pytest.approx(0.25)
    assert rep.limit((-1, -1)).value == 1.0
    num = quadrant_limits(f, (math.pi, math.pi), exact=False)
    assert num.regular and num.f_star == pytest.approx(0.25, abs=1e-6)
    s = make_catalog("sign_diag")
    d = quadrant_limits(s, (1.0, 1.0))
    # the diagonal splits the (+,+) and (-,-) quadrants
    assert not d.regular and d.f_star is None
    assert d.limit((1, -1)).value == 1.0


def test_quadrant_limits_rejects_bad_ladder():
    with pytest.raises(ValueError):
        quadrant_limits(make_catalog("step_1d"), (1.0,), eps_ladder=[0.1, 0.2, 0.01, 0.001])
