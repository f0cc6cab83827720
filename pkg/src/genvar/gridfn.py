"""Periodic functions of 1-3 variables restricted to grids.

A :class:`GridFunction` couples an exact point evaluator with per-axis sample
nodes.  Catalog formulas are written on the closed cell ``[0, 2*pi]**d``;
``f(x)`` reduces arguments modulo ``2*pi`` first, while boxes and node tables
(which live in the closed cell) use the cell formula directly.  Uniform grids
``x_j = 2*pi*j/m`` therefore carry the closing node ``2*pi`` as an interval
endpoint, matching intervals taken in ``T = [0, 2*pi]``.
"""

from __future__ import annotations

import ast
import csv
import itertools
import math
import operator
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

__all__ = [
    "TWO_PI",
    "GridFunction",
    "Box",
    "QuadrantLimit",
    "QuadrantReport",
    "make_catalog",
    "parse_function",
    "from_samples",
    "random_grid_function",
    "load_samples_csv",
    "save_samples_csv",
    "mixed_difference",
    "quadrant_limits",
    "sign_vectors",
    "parse_real",
    "DEFAULT_LADDER",
    "CATALOG_TOLERANCE",
    "SAMPLE_TOLERANCE",
]

TWO_PI = 2.0 * math.pi
DEFAULT_LADDER = tuple(2.0 ** -k for k in range(3, 11))
CATALOG_TOLERANCE = 1e-6
SAMPLE_TOLERANCE = 1e-3

# one-sided limit of a 1-d factor at u in [0, 2*pi): side is +1 or -1
OneSided = Callable[[float, int], float]


@dataclass(frozen=True)
class _Factor:
    """A 1-d catalog function on the closed cell [0, 2*pi]."""

    name: str
    cell: Callable[[np.ndarray], np.ndarray]
    one_sided: OneSided
    coeff: Callable[[np.ndarray], np.ndarray] | None
    continuous: bool


def _left_arg(u: float) -> float:
    # approaching 0 from the left means approaching 2*pi inside the cell
    return TWO_PI if u == 0.0 else u


def _step_factor(name: str, hi: float, lo: float, at_jump: float | None) -> _Factor:
    """``hi`` on [0, pi), ``lo`` on [pi, 2*pi]; ``at_jump`` overrides 0, pi, 2*pi."""

    def cell(x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < math.pi, hi, lo)
        if at_jump is not None:
            out = np.where((x == 0.0) | (x == math.pi) | (x == TWO_PI), at_jump, out)
        return out

    def one_sided(u, side):
        if side > 0:
            return hi if u < math.pi else lo
        return hi if _left_arg(u) <= math.pi else lo

    amp = hi - lo

    def coeff(n):
        n = np.asarray(n)
        out = np.zeros(n.shape, dtype=complex)
        odd = (n % 2) != 0
        out[odd] = amp / (1j * math.pi * n[odd])
        out[n == 0] = (hi + lo) / 2.0
        return out

    return _Factor(name, cell, one_sided, coeff, continuous=False)


def _ramp_factor() -> _Factor:
    def cell(x):
        return np.asarray(x, dtype=float) / TWO_PI

    def one_sided(u, side):
        return (u if side > 0 else _left_arg(u)) / TWO_PI

    def coeff(n):
        n = np.asarray(n)
        out = np.zeros(n.shape, dtype=complex)
        nz = n != 0
        out[nz] = 1j / (TWO_PI * n[nz])
        out[~nz] = 0.5
        return out

    return _Factor("ramp_1d", cell, one_sided, coeff, continuous=False)


def _trig_factor(table: Mapping[int, complex]) -> _Factor:
    freqs = np.array(sorted(table), dtype=float)
    amps = np.array([table[k] for k in sorted(table)], dtype=complex)

    def cell(x):
        x = np.asarray(x, dtype=float)
        return np.real(np.exp(1j * np.multiply.outer(x, freqs)) @ amps)

    def coeff(n):
        n = np.asarray(n)
        out = np.zeros(n.shape, dtype=complex)
        for k, a in table.items():
            out[n == k] = a
        return out

    return _Factor("trig_1d", cell, lambda u, side: float(cell(u)), coeff, continuous=True)


def _sawtooth_cascade(gamma: float, teeth: int) -> _Factor:
    """``teeth`` triangular teeth of height ``k**(gamma-1)`` on equal cells.

    The best ``n``-interval oscillation sum takes the ``n`` largest
    half-teeth, so ``v(n) = sum of the n largest of {a_1, a_1, a_2, a_2, ...}``,
    which is of order ``n**gamma``.
    """
    heights = np.arange(1, teeth + 1, dtype=float) ** (gamma - 1.0)
    width = TWO_PI / teeth

    def cell(x):
        x = np.asarray(x, dtype=float)
        k = np.clip(np.floor(x / width).astype(int), 0, teeth - 1)
        t = x / width - k
        return heights[k] * (1.0 - np.abs(2.0 * t - 1.0))

    return _Factor("modulus_family", cell, lambda u, side: float(cell(u)), None, continuous=True)


@dataclass(frozen=True)
class GridFunction:
    """A d-variate 2*pi-periodic function with per-axis grid nodes.

    Attributes
    ----------
    dim : int
        Number of variables, 1 to 3.
    cell : callable
        Vectorized formula on the closed cell, called as ``cell(x1, ..., xd)``.
    axes : tuple of ndarray
        Strictly increasing sample points in ``[0, 2*pi)`` per axis.
    closing : bool
        Whether ``2*pi`` is appended to each axis as an interval endpoint
        (true for uniform grids).
    """

    dim: int
    cell: Callable[..., np.ndarray] = field(repr=False, compare=False)
    axes: tuple[np.ndarray, ...] = field(repr=False, compare=False)
    name: str = "custom"
    params: tuple[tuple[str, object], ...] = ()
    closing: bool = True
    coeff: Callable[..., np.ndarray] | None = field(default=None, repr=False, compare=False)
    limit: Callable[[tuple[float, ...], tuple[int, ...]], float | None] | None = field(
        default=None, repr=False, compare=False
    )
    samples: np.ndarray | None = field(default=None, repr=False, compare=False)
    continuous: bool = False

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError("only 1 to 3 variables are supported")
        if len(self.axes) != self.dim:
            raise ValueError("one axis of grid points per variable is required")
        for ax in self.axes:
            if ax.ndim != 1 or ax.size == 0:
                raise ValueError("grid axes must be non-empty 1-d arrays")
            if np.any(np.diff(ax) <= 0) or ax[0] < 0 or ax[-1] >= TWO_PI:
                raise ValueError("grid points must be strictly increasing in [0, 2*pi)")

    def __call__(self, *x) -> np.ndarray | float:
        if len(x) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates")
        red = [np.mod(np.asarray(xi, dtype=float), TWO_PI) for xi in x]
        out = self.cell(*red)
        return float(out) if np.ndim(out) == 0 else out

    def cell_value(self, *x) -> np.ndarray | float:
        """Formula on the closed cell; coordinates must lie in ``[0, 2*pi]``."""
        out = self.cell(*[np.asarray(xi, dtype=float) for xi in x])
        return float(out) if np.ndim(out) == 0 else out

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax.size for ax in self.axes)

    def nodes(self, axis: int) -> np.ndarray:
        """Interval endpoints on ``axis``: the grid points and, if enabled, ``2*pi``."""
        ax = self.axes[axis]
        return np.append(ax, TWO_PI) if self.closing else ax.copy()

    def node_table(self) -> np.ndarray:
        """Cell-formula values at every node combination (``ij`` indexing)."""
        mesh = np.meshgrid(*[self.nodes(k) for k in range(self.dim)], indexing="ij")
        return np.asarray(self.cell(*mesh), dtype=float) * np.ones(mesh[0].shape)

    def with_grid(self, *spec) -> "GridFunction":
        """Uniform grid from sizes (``with_grid(8, 8)``) or explicit point arrays.

        Explicit points switch off the closing node: the given points are the
        complete endpoint set.
        """
        if len(spec) == 1 and self.dim > 1 and isinstance(spec[0], (tuple, list)):
            spec = tuple(spec[0])
        if len(spec) != self.dim:
            raise ValueError(f"need {self.dim} axis specifications")
        if all(isinstance(s, (int, np.integer)) for s in spec):
            if self.samples is not None and tuple(spec) != self.shape:
                raise ValueError("sample-only functions keep their own grid")
            axes = tuple(TWO_PI * np.arange(m) / m for m in spec)
            return replace(self, axes=axes, closing=True)
        if self.samples is not None:
            raise ValueError("sample-only functions keep their own grid")
        axes = tuple(np.asarray(s, dtype=float) for s in spec)
        return replace(self, axes=axes, closing=False)

    def scaled(self, c: float, shift: float = 0.0) -> "GridFunction":
        """``c * f + shift`` with the same grid."""
        base = self

        def cell(*x):
            return c * np.asarray(base.cell(*x), dtype=float) + shift

        coeff = None
        if base.coeff is not None:

            def coeff(*n):
                out = c * base.coeff(*n)
                zero = np.all([np.asarray(k) == 0 for k in n], axis=0)
                return out + shift * zero

        limit = None
        if base.limit is not None:

            def limit(x, delta):
                v = base.limit(x, delta)
                return None if v is None else c * v + shift

        samples = None if base.samples is None else c * base.samples + shift
        return replace(
            self,
            cell=cell,
            coeff=coeff,
            limit=limit,
            samples=samples,
            name=f"{c:g}*{base.name}+{shift:g}",
        )


def _separable(factors: Sequence[_Factor], scale: float = 1.0) -> tuple:
    def cell(*x):
        out = scale
        for fac, xi in zip(factors, x):
            out = out * fac.cell(xi)
        return np.asarray(out, dtype=float)

    coeff = None
    if all(fac.coeff is not None for fac in factors):

        def coeff(*n):
            out = scale + 0j
            for fac, nk in zip(factors, n):
                out = out * fac.coeff(nk)
            return out

    def limit(x, delta):
        out = scale
        for fac, xi, s in zip(factors, x, delta):
            out *= fac.one_sided(float(np.mod(xi, TWO_PI)), s)
        return out

    return cell, coeff, limit


def _sign_diag_limit(x, delta):
    u = [float(np.mod(xi, TWO_PI)) for xi in x]
    # reduced coordinate approached from the requested side
    r = [ui if s > 0 else _left_arg(ui) for ui, s in zip(u, delta)]
    if r[0] != r[1]:
        return float(np.sign(r[0] - r[1]))
    if delta[0] != delta[1]:
        return 1.0 if delta[0] > 0 else -1.0
    return None


def _factor_by_name(name: str, params: Mapping[str, object]) -> _Factor:
    if name in ("square_wave_1d", "square_wave"):
        return _step_factor("square_wave_1d", 1.0, -1.0, 0.0)
    if name in ("step_1d", "step"):
        return _step_factor("step_1d", 1.0, -1.0, None)
    if name in ("indicator_1d", "indicator"):
        return _step_factor("indicator_1d", 1.0, 0.0, None)
    if name in ("ramp_1d", "ramp"):
        return _ramp_factor()
    if name == "modulus_family":
        gamma = float(params.get("gamma", 0.5))
        if not 0.0 < gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
        return _sawtooth_cascade(gamma, int(params.get("teeth", 64)))
    if name in ("trig_1d", "trig_poly"):
        table = params.get("coefficients")
        if table is None:
            raise ValueError("trig_poly needs a coefficient table")
        return _trig_factor({int(k if np.ndim(k) == 0 else k[0]): complex(v) for k, v in table.items()})
    raise ValueError(f"unknown 1-d catalog function {name!r}")


_ONE_D = ("square_wave_1d", "step_1d", "indicator_1d", "ramp_1d", "modulus_family")


def make_catalog(name: str, grid: Sequence[int] | None = None, **params) -> GridFunction:
    """Build a catalog function with an exact evaluator.

    Parameters
    ----------
    name : str
        ``sign_diag`` (``sign(x - y)``), ``step_product`` (``scale`` times
        the indicator of ``[0, pi)**dim``), ``trig_poly`` (``coefficients``
        mapping frequency tuples to complex amplitudes), ``square_wave_1d``,
        ``step_1d`` (``+1`` on ``[0, pi)``, ``-1`` on ``[pi, 2*pi]``),
        ``indicator_1d``, ``ramp_1d`` (``x / (2*pi)``), ``separable``
        (``factors`` = list of 1-d names or ``(name, params)`` pairs),
        ``modulus_family`` (``gamma`` in (0, 1), ``teeth``), ``constant``
        (``value``, ``dim``).
    grid : sequence of int, optional
        Uniform grid sizes; defaults to 8 points per axis.
    """
    dim: int
    coeff = limit = None
    continuous = False
    key: dict[str, object] = dict(params)
    if name == "sign_diag":
        dim = 2

        def cell(x, y):
            return np.sign(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))

        limit = _sign_diag_limit
    elif name == "step_product":
        dim = int(params.get("dim", 2))
        scale = float(params.get("scale", 1.0))
        fac = _factor_by_name("indicator_1d", {})
        cell, coeff, limit = _separable([fac] * dim, scale)
    elif name == "separable":
        specs = params.get("factors")
        if not specs:
            raise ValueError("separable needs a list of 1-d factors")
        facs = []
        for spec in specs:
            fname, fparams = (spec, {}) if isinstance(spec, str) else spec
            facs.append(_factor_by_name(fname, fparams))
        dim = len(facs)
        cell, coeff, limit = _separable(facs, float(params.get("scale", 1.0)))
        continuous = all(f.continuous for f in facs)
        key["factors"] = tuple(f.name for f in facs)
    elif name == "trig_poly":
        table = {tuple(int(v) for v in np.atleast_1d(k)): complex(a) for k, a in params["coefficients"].items()}
        dims = {len(k) for k in table}
        if len(dims) != 1:
            raise ValueError("trig_poly frequencies must share one dimension")
        dim = dims.pop()
        freqs = np.array(list(table), dtype=float)
        amps = np.array(list(table.values()), dtype=complex)

        def cell(*x):
            phase = sum(np.multiply.outer(np.asarray(xi, dtype=float), freqs[:, k]) for k, xi in enumerate(x))
            return np.real(np.exp(1j * phase) @ amps)

        def coeff(*n):
            out = np.zeros(np.broadcast(*n).shape, dtype=complex)
            for k, a in table.items():
                out[np.all([np.asarray(nj) == kj for nj, kj in zip(n, k)], axis=0)] = a
            return out

        def limit(x, delta):
            return float(cell(*[np.float64(xi) for xi in x]))

        continuous = True
        key["coefficients"] = tuple(sorted((k, (a.real, a.imag)) for k, a in table.items()))
    elif name == "constant":
        dim = int(params.get("dim", 2))
        value = float(params.get("value", 1.0))

        def cell(*x):
            return np.full(np.broadcast(*[np.asarray(xi) for xi in x]).shape, value)

        def coeff(*n):
            return np.where(np.all([np.asarray(k) == 0 for k in n], axis=0), value + 0j, 0j)

        def limit(x, delta):
            return value

        continuous = True
    elif name in _ONE_D or name in ("square_wave", "step", "indicator", "ramp"):
        fac = _factor_by_name(name, params)
        dim = 1
        cell, coeff, limit = _separable([fac])
        continuous = fac.continuous
    else:
        raise ValueError(f"unknown catalog function {name!r}")

    sizes = tuple(grid) if grid is not None else (8,) * dim
    if len(sizes) != dim:
        raise ValueError(f"{name} has {dim} variables, grid has {len(sizes)} axes")
    axes = tuple(TWO_PI * np.arange(m) / m for m in sizes)
    return GridFunction(
        dim=dim,
        cell=cell,
        axes=axes,
        name=name,
        params=tuple(sorted((k, v if not isinstance(v, list) else tuple(v)) for k, v in key.items())),
        coeff=coeff,
        limit=limit,
        continuous=continuous,
    )


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_real(text: str) -> float:
    """Evaluate a small arithmetic expression such as ``"pi/2"`` or ``"-0.3"``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"unsupported expression {text!r}")

    return ev(ast.parse(text.strip(), mode="eval"))


def parse_function(text: str, grid: Sequence[int] | None = None) -> GridFunction:
    """Catalog function from a CLI string, e.g. ``"modulus_family:gamma=0.5"``.

    ``separable:factors=step_1d|step_1d`` lists 1-d factors with ``|``.  A
    path to an existing CSV file loads a sample table.
    """
    if Path(text).is_file():
        return load_samples_csv(text)
    name, _, rest = text.partition(":")
    params: dict[str, object] = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        k, eq, v = item.partition("=")
        if not eq:
            raise ValueError(f"malformed parameter {item!r}")
        k = k.strip()
        if k == "factors":
            params[k] = [s.strip() for s in v.split("|")]
        elif k in ("dim", "teeth"):
            params[k] = int(v)
        else:
            params[k] = parse_real(v)
    if name == "trig_poly" and "coefficients" not in params:
        raise ValueError("trig_poly needs a coefficient table; build it from Python")
    return make_catalog(name.strip(), grid=grid, **params)


def from_samples(values: np.ndarray, name: str = "samples") -> GridFunction:
    """Sample-only function on the uniform grid implied by ``values.shape``.

    Off-grid evaluation holds the value of the nearest node to the left
    (periodically); the closing node ``2*pi`` takes the value at ``0``.
    """
    values = np.array(values, dtype=float)
    if values.ndim not in (1, 2, 3):
        raise ValueError("sample tables must have 1 to 3 axes")
    values.setflags(write=False)
    sizes = values.shape

    def cell(*x):
        idx = []
        for xi, m in zip(x, sizes):
            xi = np.asarray(xi, dtype=float)
            j = np.floor(xi * m / TWO_PI + 1e-9).astype(np.int64) % m
            idx.append(j)
        return values[tuple(idx)]

    return GridFunction(
        dim=values.ndim,
        cell=cell,
        axes=tuple(TWO_PI * np.arange(m) / m for m in sizes),
        name=name,
        closing=True,
        samples=values,
    )


def random_grid_function(rng: np.random.Generator, shape: Sequence[int]) -> GridFunction:
    """Uniform ``[-1, 1]`` samples on a grid of the given shape."""
    return from_samples(rng.uniform(-1.0, 1.0, size=tuple(shape)), name="random")


def save_samples_csv(f: GridFunction, path: str | Path) -> None:
    """Write the grid samples: header row of axis sizes, then row-major values."""
    if f.samples is not None:
        table = np.asarray(f.samples)
    else:
        mesh = np.meshgrid(*f.axes, indexing="ij")
        table = np.asarray(f.cell(*mesh), dtype=float) * np.ones(mesh[0].shape)
    rows = table.reshape(-1, table.shape[-1])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(table.shape)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])


def load_samples_csv(path: str | Path) -> GridFunction:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    sizes = tuple(int(s) for s in rows[0])
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
    if data.size != math.prod(sizes):
        raise ValueError(f"{path}: expected {math.prod(sizes)} values, found {data.size}")
    return from_samples(data.reshape(sizes), name=Path(path).stem)


@dataclass(frozen=True)
class Box:
    """Product of open intervals ``(a^k, b^k)`` inside ``[0, 2*pi]``."""

    lows: tuple[float, ...]
    highs: tuple[float, ...]

    def __post_init__(self):
        if len(self.lows) != len(self.highs) or not self.lows:
            raise ValueError("box needs matching, non-empty endpoint tuples")
        for a, b in zip(self.lows, self.highs):
            if not a < b:
                raise ValueError(f"degenerate box side ({a}, {b})")
            if a < 0.0 or b > TWO_PI:
                raise ValueError("box endpoints must lie in [0, 2*pi]")

    @property
    def dim(self) -> int:
        return len(self.lows)

    @classmethod
    def from_pairs(cls, *pairs: tuple[float, float]) -> "Box":
        return cls(tuple(float(p[0]) for p in pairs), tuple(float(p[1]) for p in pairs))


def mixed_difference(
    f: GridFunction, box: Box, fixed: Mapping[int, float] | None = None
) -> float:
    """Mixed difference of ``f`` over ``box``, by recursion on the last axis.

    ``fixed`` maps axes outside the box to their (closed-cell) coordinates;
    the box then spans the remaining axes in increasing order.
    """
    fixed = dict(fixed or {})
    free = [k for k in range(f.dim) if k not in fixed]
    if len(free) != box.dim:
        raise ValueError(f"box has {box.dim} axes, {len(free)} free variables")

    def at(point: tuple[float, ...]) -> float:
        full = [0.0] * f.dim
        for k, v in fixed.items():
            full[k] = v
        for k, v in zip(free, point):
            full[k] = v
        return float(f.cell_value(*full))

    def rec(g: Callable[[tuple[float, ...]], float], lows, highs) -> float:
        if not lows:
            return g(())
        a, b = lows[-1], highs[-1]
        upper = rec(lambda p: g(p + (b,)), lows[:-1], highs[:-1])
        lower = rec(lambda p: g(p + (a,)), lows[:-1], highs[:-1])
        return upper - lower

    return rec(at, box.lows, box.highs)


def sign_vectors(dim: int) -> list[tuple[int, ...]]:
    return list(itertools.product((1, -1), repeat=dim))


@dataclass(frozen=True)
class QuadrantLimit:
    delta: tuple[int, ...]
    exists: bool
    value: float | None
    exact: bool
    means: tuple[float, ...] = ()
    oscillations: tuple[float, ...] = ()


@dataclass(frozen=True)
class QuadrantReport:
    point: tuple[float, ...]
    limits: tuple[QuadrantLimit, ...]
    f_star: float | None
    regular: bool
    method: str  # "catalog" | "numeric"
    tolerance: float
    ladder: tuple[float, ...]

    def limit(self, delta: Sequence[int]) -> QuadrantLimit:
        for q in self.limits:
            if q.delta == tuple(delta):
                return q
        raise KeyError(delta)


def _numeric_limit(f: GridFunction, x, delta, ladder, tol, per_axis: int = 5) -> QuadrantLimit:
    t = (np.arange(per_axis) + 0.5) / per_axis
    means, oscs = [], []
    for eps in ladder:
        pts = [xi + eps * s * t for xi, s in zip(x, delta)]
        mesh = np.meshgrid(*pts, indexing="ij")
        vals = np.asarray(f(*mesh), dtype=float)
        means.append(float(vals.mean()))
        oscs.append(float(vals.max() - vals.min()))
    steps = [abs(means[i] - means[i - 1]) for i in range(len(means) - 3, len(means))]
    geometric = all(b <= 0.75 * a for a, b in zip(steps, steps[1:]) if a > 0) and steps[-1] < 1e3 * tol
    steady = all(d < tol for d in steps) or geometric
    shrinks = oscs[-1] <= tol or oscs[-1] <= 0.25 * oscs[0]
    exists = steady and shrinks
    return QuadrantLimit(
        tuple(delta), exists, means[-1] if exists else None, False, tuple(means), tuple(oscs)
    )


def quadrant_limits(
    f: GridFunction,
    x: Sequence[float],
    eps_ladder: Sequence[float] | None = None,
    exact: bool = True,
) -> QuadrantReport:
    """Open-quadrant limits ``f_delta(x)`` for every sign vector ``delta``.

    Catalog functions answer exactly when ``exact`` is set.  Otherwise each
    quadrant box of side ``eps`` is sampled for every ``eps`` in the ladder;
    a limit is declared when the box means agree within the tolerance over the
    last three steps (or their differences shrink geometrically) and the
    in-box oscillation is within tolerance or has shrunk at least fourfold
    across the ladder.
    """
    x = tuple(float(v) for v in x)
    if len(x) != f.dim:
        raise ValueError(f"point needs {f.dim} coordinates")
    ladder = tuple(DEFAULT_LADDER if eps_ladder is None else eps_ladder)
    if len(ladder) < 4 or any(b >= a for a, b in zip(ladder, ladder[1:])) or ladder[0] >= math.pi / 2:
        raise ValueError("ladder needs >= 4 strictly decreasing entries below pi/2")
    use_catalog = exact and f.limit is not None
    tol = CATALOG_TOLERANCE if f.samples is None else SAMPLE_TOLERANCE
    limits = []
    for delta in sign_vectors(f.dim):
        if use_catalog:
            v = f.limit(x, delta)
            limits.append(QuadrantLimit(delta, v is not None, v, True))
        else:
            limits.append(_numeric_limit(f, x, delta, ladder, tol))
    regular = all(q.exists for q in limits)
    f_star = math.fsum(q.value for q in limits) / len(limits) if regular else None
    return QuadrantReport(
        x, tuple(limits), f_star, regular, "catalog" if use_catalog else "numeric", tol, ladder
    )
