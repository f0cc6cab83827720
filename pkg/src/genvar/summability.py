"""Fourier coefficients, rectangular partial sums and (C; alpha) means.

A Cesaro mean of order ``alpha`` and degree ``m`` on one axis is the partial
sum with frequency ``j`` damped by ``A_{m-|j|}^alpha / A_m^alpha``; this
follows from ``sum_{q<=r} A_q^{alpha-1} = A_r^alpha`` after exchanging the
order of summation, so means cost no more than partial sums.  In ``d``
variables the multipliers multiply across axes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .gridfn import TWO_PI, GridFunction, quadrant_limits

IMAG_TOLERANCE = 1e-10
# errors at or below this are treated as zero by the trend rule
ERROR_FLOOR = 1e-12
TREND_STEPS = 3
GROWTH_FACTOR = 2.0


class Source(str, Enum):
    ANALYTIC = "ANALYTIC"
    QUADRATURE = "QUADRATURE"


class Verdict(str, Enum):
    CONVERGING = "CONVERGING"
    STALLING = "STALLING"
    GROWING = "GROWING"


@dataclass(frozen=True)
class CoefficientTable:
    """Coefficients ``f^(n)`` for ``|n_k| <= N_k``; axis ``k`` index is ``n_k + N_k``."""

    dim: int
    degrees: tuple[int, ...]
    values: np.ndarray = field(repr=False, compare=False)
    source: Source
    grid: tuple[int, ...] | None = None
    warn: str | None = None

    def __post_init__(self):
        want = tuple(2 * n + 1 for n in self.degrees)
        if self.values.shape != want:
            raise ValueError(f"coefficient array has shape {self.values.shape}, expected {want}")

    def __getitem__(self, n) -> complex:
        n = (n,) if np.isscalar(n) else tuple(n)
        if any(abs(k) > N for k, N in zip(n, self.degrees)):
            raise IndexError(f"frequency {n} outside the table")
        return complex(self.values[tuple(k + N for k, N in zip(n, self.degrees))])

    def truncated(self, degrees: Sequence[int]) -> "CoefficientTable":
        degrees = _check_degrees(self, degrees)
        sl = tuple(slice(N - M, N + M + 1) for N, M in zip(self.degrees, degrees))
        return CoefficientTable(self.dim, degrees, self.values[sl], self.source, self.grid, self.warn)

    def hermitian_defect(self) -> float:
        """``max |f^(-n) - conj f^(n)|``; zero for real functions."""
        flipped = self.values[(slice(None, None, -1),) * self.dim]
        return float(np.max(np.abs(flipped - np.conj(self.values))))


def _check_degrees(table: CoefficientTable, degrees) -> tuple[int, ...]:
    degrees = tuple(int(d) for d in np.broadcast_to(degrees, (table.dim,)))
    if any(d < 0 for d in degrees):
        raise ValueError("degrees must be nonnegative")
    if any(d > N for d, N in zip(degrees, table.degrees)):
        raise ValueError(f"degrees {degrees} exceed table truncation {table.degrees}")
    return degrees


def fourier_coefficients(
    f: GridFunction,
    degrees: int | Sequence[int],
    source: Source | str | None = None,
) -> CoefficientTable:
    """Coefficient table up to ``degrees`` on every axis.

    Parameters
    ----------
    source : {"ANALYTIC", "QUADRATURE"}, optional
        Default: closed forms when the catalog has them, else quadrature.
        Quadrature is the periodic rectangle rule on the uniform grid of
        ``f`` and needs ``m_k >= 2 N_k + 2`` points per axis.
    """
    degrees = tuple(int(d) for d in np.broadcast_to(degrees, (f.dim,)))
    if source is None:
        source = Source.ANALYTIC if f.coeff is not None else Source.QUADRATURE
    source = Source(source)
    if source is Source.ANALYTIC:
        if f.coeff is None:
            raise ValueError(f"{f.name} has no closed-form coefficients; use QUADRATURE")
        freq = np.meshgrid(*[np.arange(-N, N + 1) for N in degrees], indexing="ij")
        vals = np.asarray(f.coeff(*freq), dtype=complex) * np.ones(freq[0].shape)
        return CoefficientTable(f.dim, degrees, vals, source)

    need = tuple(2 * N + 2 for N in degrees)
    if any(m < r for m, r in zip(f.shape, need)):
        raise ValueError(f"quadrature at degrees {degrees} needs a grid of at least {need}, have {f.shape}")
    for ax, m in zip(f.axes, f.shape):
        if not np.allclose(ax, TWO_PI * np.arange(m) / m, rtol=0, atol=1e-12):
            raise ValueError("quadrature needs a uniform grid")
    if f.samples is not None:
        samples = np.asarray(f.samples, dtype=float)
    else:
        mesh = np.meshgrid(*f.axes, indexing="ij")
        samples = np.asarray(f(*mesh), dtype=float) * np.ones(mesh[0].shape)
    spectrum = np.fft.fftn(samples) / samples.size
    idx = np.ix_(*[np.arange(-N, N + 1) % m for N, m in zip(degrees, f.shape)])
    warn = None if f.continuous else "discontinuous input: quadrature coefficients alias at jumps"
    return CoefficientTable(f.dim, degrees, spectrum[idx], source, grid=f.shape, warn=warn)


@lru_cache(maxsize=64)
def _cesaro_cached(alpha: float, n_max: int) -> np.ndarray:
    k = np.arange(1, n_max + 1, dtype=float)
    out = np.empty(n_max + 1)
    out[0] = 1.0
    out[1:] = np.cumprod((alpha + k) / k)
    out.setflags(write=False)
    return out


def cesaro_coefficients(alpha: float, n_max: int) -> np.ndarray:
    """``A_0^alpha .. A_{n_max}^alpha`` by ``A_k = A_{k-1} (alpha + k) / k``.

    Examples
    --------
    >>> float(cesaro_coefficients(-0.5, 2)[2])
    0.375
    """
    if not alpha > -1:
        raise ValueError("Cesaro order must exceed -1")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    return _cesaro_cached(float(alpha), int(n_max))


def kernel_mass(alpha: float, m: int) -> tuple[float, float]:
    """``(sum_p A_{m-p}^{alpha-1}, A_m^alpha)``, the first compensated.

    ``alpha - 1`` may be ``<= -1``; the recurrence is still valid there.
    """
    a = float(alpha) - 1.0
    k = np.arange(1, m + 1, dtype=float)
    prev = np.concatenate([[1.0], np.cumprod((a + k) / k)])
    return math.fsum(prev), float(cesaro_coefficients(alpha, m)[m])


def cesaro_multipliers(alpha: float, m: int) -> np.ndarray:
    """Weights on frequencies ``-m..m``: ``A_{m-|j|}^alpha / A_m^alpha``."""
    A = cesaro_coefficients(alpha, m)
    j = np.abs(np.arange(-m, m + 1))
    return A[m - j] / A[m]


@dataclass(frozen=True)
class CesaroParams:
    orders: tuple[float, ...]
    degrees: tuple[int, ...]

    def __post_init__(self):
        if len(self.orders) != len(self.degrees):
            raise ValueError("one order per degree is required")
        if any(not a > -1 for a in self.orders):
            raise ValueError("Cesaro orders must exceed -1")
        if any(int(m) != m or m < 0 for m in self.degrees):
            raise ValueError("degrees must be nonnegative integers")


def _points(x, dim: int) -> tuple[np.ndarray, bool]:
    # a single point is a scalar or a flat array of length dim; anything else
    # is a stack of points
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 0 or (pts.ndim == 1 and pts.size == dim)
    pts = pts.reshape(-1, dim)
    return pts, single


def _evaluate(table: CoefficientTable, degrees, x, weights=None):
    """``sum_n w(n) f^(n) e^{i n.x}`` with per-axis weights, at one or many points."""
    degrees = _check_degrees(table, degrees)
    pts, single = _points(x, table.dim)
    V = table.truncated(degrees).values
    if weights is not None:
        for k, w in enumerate(weights):
            shape = [1] * table.dim
            shape[k] = -1
            V = V * w.reshape(shape)
    # contract the last axis first; the leading point axis is shared
    out = np.broadcast_to(V, (pts.shape[0],) + V.shape)
    for k in reversed(range(table.dim)):
        n = np.arange(-degrees[k], degrees[k] + 1)
        E = np.exp(1j * np.multiply.outer(pts[:, k], n))
        out = np.einsum("p...j,pj->p...", out, E)
    if table.source is Source.ANALYTIC or table.warn is None:
        if np.max(np.abs(out.imag), initial=0.0) > IMAG_TOLERANCE * max(1.0, float(np.max(np.abs(out.real), initial=0.0))):
            raise ArithmeticError("imaginary residue above tolerance: table is not Hermitian")
    vals = out.real
    return float(vals[0]) if single else vals


def rectangular_partial_sum(table: CoefficientTable, degrees, x):
    """``S_{M_1..M_d}(x)``: the rectangular partial sum, real part.

    ``x`` is a point (length ``d``) or an array of points ``(n, d)``.
    """
    return _evaluate(table, degrees, x)


def cesaro_mean(table: CoefficientTable, params: CesaroParams, x):
    """Cesaro mean ``sigma^{alpha_1..alpha_d}_{m_1..m_d}(x)``."""
    if len(params.orders) != table.dim:
        raise ValueError(f"need {table.dim} orders")
    weights = [cesaro_multipliers(a, m) for a, m in zip(params.orders, params.degrees)]
    return _evaluate(table, params.degrees, x, weights)


def partial_sum_maximum(table: CoefficientTable, M: int, lo: float, hi: float, samples: int = 4001):
    """Maximum of a 1-d partial sum on ``[lo, hi]``: dense scan, then bounded refinement."""
    if table.dim != 1:
        raise ValueError("one variable only")
    xs = np.linspace(lo, hi, samples)
    vals = rectangular_partial_sum(table, M, xs[:, None])
    i = int(np.argmax(vals))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, samples - 1)]
    res = minimize_scalar(
        lambda t: -rectangular_partial_sum(table, M, [t]),
        bounds=(a, b),
        method="bounded",
        options={"xatol": 1e-14 * max(1.0, abs(b))},
    )
    best = max(float(vals[i]), -float(res.fun))
    where = float(res.x) if -float(res.fun) >= vals[i] else float(xs[i])
    return where, best


@dataclass(frozen=True)
class ConvergenceTrace:
    point: tuple[float, ...]
    target: float
    method: str  # "PARTIAL_SUM" or "CESARO(a1,...)"
    orders: tuple[float, ...] | None
    degrees: tuple[int, ...]
    values: tuple[float, ...]
    errors: tuple[float, ...]
    verdict: Verdict
    lattice: bool = False
    error_floor: float = ERROR_FLOOR
    trend_steps: int = TREND_STEPS
    growth_factor: float = GROWTH_FACTOR
    source: str = "ANALYTIC"

    def rows(self) -> list[tuple[int, float, float, str]]:
        return [(n, v, e, self.verdict.value) for n, v, e in zip(self.degrees, self.values, self.errors)]


def trend_verdict(errors: Sequence[float], steps: int = TREND_STEPS, factor: float = GROWTH_FACTOR, floor: float = ERROR_FLOOR) -> Verdict:
    """CONVERGING if each of the last ``steps`` steps strictly lowers the error
    (errors at or below ``floor`` count as zero and as already converged);
    GROWING if the last error is at least ``factor`` times the first;
    otherwise STALLING.
    """
    e = np.asarray(errors, dtype=float)
    if e.size < steps + 1:
        raise ValueError(f"need at least {steps + 1} degrees for a verdict")
    z = np.where(e <= floor, 0.0, e)
    tail = z[-(steps + 1):]
    if all(b == 0.0 or b < a for a, b in zip(tail, tail[1:])):
        return Verdict.CONVERGING
    if z[-1] > 0 and z[-1] >= factor * z[0]:
        return Verdict.GROWING
    return Verdict.STALLING


def dyadic_degrees(spec: str | Sequence[int]) -> tuple[int, ...]:
    """``"16:512:dyadic"`` -> ``(16, 32, ..., 512)``; sequences pass through."""
    if not isinstance(spec, str):
        return tuple(int(n) for n in spec)
    lo, hi, *kind = spec.split(":")
    lo, hi = int(lo), int(hi)
    if kind and kind[0] not in ("dyadic", ""):
        raise ValueError(f"unknown degree schedule {kind[0]!r}")
    if lo < 1 or hi < lo:
        raise ValueError("need 1 <= lo <= hi")
    out = [lo]
    while out[-1] * 2 <= hi:
        out.append(out[-1] * 2)
    return tuple(out)


def pringsheim_diagnostic(
    f: GridFunction,
    x: Sequence[float],
    method: str = "PARTIAL_SUM",
    orders: Sequence[float] | None = None,
    dyadic: str | Sequence[int] = "16:512:dyadic",
    lattice: bool = False,
    source: Source | str | None = None,
) -> ConvergenceTrace:
    """Errors ``|S_N(x) - f*(x)|`` (or of Cesaro means) along cubes ``N = (n, .., n)``.

    With ``lattice`` the error at ``n`` is the sup over all degree tuples of
    the schedule with every entry ``>= n``, a finite proxy for Pringsheim
    (unrestricted rectangular) convergence.
    """
    method = method.upper()
    if method not in ("PARTIAL_SUM", "CESARO"):
        raise ValueError("method is PARTIAL_SUM or CESARO")
    degrees = dyadic_degrees(dyadic)
    if any(b <= a for a, b in zip(degrees, degrees[1:])):
        raise ValueError("degrees must increase")
    report = quadrant_limits(f, x)
    if not report.regular:
        raise ValueError(f"{tuple(x)} is not a regular point of {f.name}; f* is undefined")
    target = float(report.f_star)
    if method == "CESARO":
        if orders is None:
            raise ValueError("CESARO needs orders")
        orders = tuple(float(a) for a in np.broadcast_to(orders, (f.dim,)))
    table = fourier_coefficients(f, degrees[-1], source)
    pt = np.asarray(x, dtype=float)

    def value_at(degs):
        if method == "CESARO":
            return cesaro_mean(table, CesaroParams(orders, tuple(degs)), pt)
        return rectangular_partial_sum(table, degs, pt)

    if lattice:
        cache = {degs: value_at(degs) for degs in itertools.product(degrees, repeat=f.dim)}
        values, errors = [], []
        for n in degrees:
            sub = {k: v for k, v in cache.items() if min(k) >= n}
            worst = max(sub, key=lambda k: abs(sub[k] - target))
            values.append(float(sub[worst]))
            errors.append(abs(float(sub[worst]) - target))
    else:
        values = [float(value_at((n,) * f.dim)) for n in degrees]
        errors = [abs(v - target) for v in values]
    label = "PARTIAL_SUM" if method == "PARTIAL_SUM" else "CESARO(" + ",".join(f"{a:g}" for a in orders) + ")"
    return ConvergenceTrace(
        point=tuple(float(v) for v in x),
        target=target,
        method=label,
        orders=orders if method == "CESARO" else None,
        degrees=degrees,
        values=tuple(values),
        errors=tuple(errors),
        verdict=trend_verdict(errors),
        lattice=lattice,
        source=table.source.value,
    )
