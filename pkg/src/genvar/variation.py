"""Generalized variation functionals on grid restrictions.

Interval endpoints are the grid nodes of the variation axis (grid points plus
the closing node ``2*pi`` on uniform grids); coordinates that are held fixed
(off-axis points) range over the grid points.  Every functional is a
maximization of a sorted pairing over nonoverlapping selections, solved by the
kernels in :mod:`genvar._selection`.

Axis numbers are 0-based in the API; functional ids are 1-based
(``LV1`` is the Lambda-variation along the first axis).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np

from . import _selection as sel
from .gridfn import Box, GridFunction, mixed_difference
from .lambda_seq import LambdaSeq, validate_lambda, young_pair

AXIS_CAP = 14
MIXED_CAP = 6
MIXED_CAP_3D = 4
STAR_CAP = 6


class Method(str, Enum):
    EXHAUSTIVE = "EXHAUSTIVE"
    GREEDY = "GREEDY"
    DYNAMIC = "DYNAMIC"


class Mode(str, Enum):
    FIXED = "FIXED"
    SHARP = "SHARP"


class BoundKind(str, Enum):
    EXACT = "EXACT"
    LOWER_BOUND = "LOWER_BOUND"


class Which(str, Enum):
    TOTAL = "TOTAL"
    PARTIAL = "PARTIAL"
    INDEX_SET = "INDEX_SET"


class CapExceeded(ValueError):
    """Exhaustive search refused because the grid is above the cap."""


# ---------------------------------------------------------------- certificates


@dataclass(frozen=True)
class IntervalCollection:
    """Intervals on one axis, in rank order.

    ``points[i]`` holds the ``(axis, coordinate)`` pairs of the off-axis
    point used with interval ``i``.
    """

    axis: int
    indices: tuple[tuple[int, int], ...]
    intervals: tuple[tuple[float, float], ...]
    points: tuple[tuple[tuple[int, float], ...], ...] = ()

    def __post_init__(self):
        spans = sorted(self.indices)
        for (a, b), (c, _) in zip(spans, spans[1:]):
            if c < b:
                raise ValueError("intervals overlap")
        if any(a >= b for a, b in self.indices):
            raise ValueError("interval endpoints out of order")

    def __len__(self) -> int:
        return len(self.indices)

    def to_dict(self) -> dict:
        return {
            "axis": self.axis,
            "indices": [list(p) for p in self.indices],
            "intervals": [list(p) for p in self.intervals],
            "points": [[list(q) for q in pt] for pt in self.points],
        }


@dataclass(frozen=True)
class MixedCertificate:
    """Per-axis collections (rank order) and the fixed off-set coordinates."""

    axes: tuple[int, ...]
    collections: tuple[IntervalCollection, ...]
    fixed: tuple[tuple[int, float], ...] = ()

    def to_dict(self) -> dict:
        return {
            "axes": list(self.axes),
            "collections": [c.to_dict() for c in self.collections],
            "fixed": [list(p) for p in self.fixed],
        }


@dataclass(frozen=True)
class BoxCollection:
    """Nonoverlapping grid rectangles in rank order."""

    indices: tuple[tuple[int, int, int, int], ...]
    boxes: tuple[Box, ...]

    def __post_init__(self):
        for (a, b, c, d), (e, g, h, k) in itertools.combinations(self.indices, 2):
            if a < g and e < b and c < k and h < d:
                raise ValueError("rectangles overlap")

    def to_dict(self) -> dict:
        return {
            "indices": [list(p) for p in self.indices],
            "boxes": [[list(b.lows), list(b.highs)] for b in self.boxes],
        }


@dataclass(frozen=True)
class VariationResult:
    value: float
    functional_id: str
    method: Method
    bound_kind: BoundKind
    certificate: IntervalCollection | MixedCertificate | BoxCollection | None
    lambdas: tuple[LambdaSeq, ...] = field(default=(), compare=False)
    phi: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False, repr=False)
    constituents: tuple["VariationResult", ...] = ()

    def recompute(self, f: GridFunction) -> float:
        """Re-sum the certificate by direct evaluation of ``f``."""
        return certificate_value(f, self)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "functional_id": self.functional_id,
            "method": self.method.value,
            "bound_kind": self.bound_kind.value,
            "lambda": [s.label for s in self.lambdas],
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
            "constituents": [c.to_dict() for c in self.constituents],
        }


@dataclass(frozen=True)
class ModulusTable:
    axis: int
    values: np.ndarray = field(compare=False)
    sharp: bool = False
    method: Method = Method.EXHAUSTIVE
    bound_kind: BoundKind = BoundKind.EXACT

    @property
    def n_max(self) -> int:
        return int(self.values.size)

    def __getitem__(self, n: int) -> float:
        """``v(n)`` for ``n >= 1``."""
        if n < 1:
            raise IndexError("moduli are indexed from 1")
        return float(self.values[n - 1])


@dataclass(frozen=True)
class TailProbe:
    n: tuple[int, ...]
    values: tuple[float, ...]
    q_hat: float
    results: tuple[VariationResult, ...] = field(default=(), compare=False, repr=False)


# ------------------------------------------------------------------- helpers


@lru_cache(maxsize=256)
def _checked(seq: LambdaSeq) -> LambdaSeq:
    report = validate_lambda(seq)
    if not report.valid:
        raise ValueError(f"invalid lambda sequence {seq.label}: {'; '.join(report.problems)}")
    return seq


def _rank_weights(seq: LambdaSeq, k: int) -> np.ndarray:
    return 1.0 / _checked(seq).weights(max(k, 1))


def optimal_pairing_value(magnitudes: Sequence[float], seq: LambdaSeq) -> float:
    """Sup over orderings of ``sum m_i / lambda_i``: sort magnitudes decreasingly.

    Examples
    --------
    >>> from genvar.lambda_seq import make_lambda
    >>> round(optimal_pairing_value([3, 1, 2], make_lambda("harmonic")), 4)
    4.3333
    """
    m = np.asarray(magnitudes, dtype=float)
    if m.size == 0:
        return 0.0
    if np.any(m < 0) or not np.all(np.isfinite(m)):
        raise ValueError("magnitudes must be finite and nonnegative")
    lam = _checked(seq).weights(m.size)
    # correctly rounded, so the result equals the best ordering's sum exactly
    return math.fsum(np.sort(m)[::-1] / lam)


def _seq_for(seqs, axis: int) -> LambdaSeq:
    if isinstance(seqs, LambdaSeq):
        return seqs
    if isinstance(seqs, Mapping):
        return seqs[axis]
    return list(seqs)[axis]


def _coords(f: GridFunction, var_axes: Sequence[int]) -> list[np.ndarray]:
    return [f.nodes(k) if k in var_axes else f.axes[k] for k in range(f.dim)]


def _table(f: GridFunction, var_axes: Sequence[int]) -> np.ndarray:
    """Values on nodes along ``var_axes`` and grid points elsewhere."""
    coords = _coords(f, var_axes)
    mesh = np.meshgrid(*coords, indexing="ij")
    return np.asarray(f.cell(*mesh), dtype=float) * np.ones(mesh[0].shape)


def _axis_slices(f: GridFunction, axis: int) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
    """Node values along ``axis`` for every off-axis grid point: shape (R, P)."""
    if not 0 <= axis < f.dim:
        raise ValueError(f"axis {axis} out of range for a {f.dim}-variable function")
    T = np.moveaxis(_table(f, [axis]), axis, -1)
    others = [f.axes[k] for k in range(f.dim) if k != axis]
    return T.reshape(-1, T.shape[-1]), f.nodes(axis), others


def _off_axis_point(f: GridFunction, axis: int, row: int, others: list[np.ndarray]) -> tuple[tuple[int, float], ...]:
    if not others:
        return ()
    idx = np.unravel_index(row, tuple(o.size for o in others))
    off = [k for k in range(f.dim) if k != axis]
    return tuple((k, float(o[i])) for k, o, i in zip(off, others, idx))


def _abs_diffs(rows: np.ndarray) -> np.ndarray:
    """``D[r, a, b] = |rows[r, b] - rows[r, a]|``."""
    return np.abs(rows[:, None, :] - rows[:, :, None])


def _check_cap(size: int, cap: int, what: str) -> None:
    if size > cap:
        raise CapExceeded(f"{what}: grid size {size} exceeds the exhaustive cap {cap}; use GREEDY")


def _axis_id(prefix: str, axis: int, mode: Mode) -> str:
    return f"{prefix}{'#' if mode is Mode.SHARP else ''}V{axis + 1}"


def _select_rows(D: np.ndarray, c: np.ndarray, method: Method, mode: Mode):
    """Best collection over a stack of weight tables ``D`` (R, P, P).

    Returns ``(value, row_per_interval, intervals)``; in SHARP mode the row
    is chosen per interval, otherwise one row serves all intervals.
    """
    R, P, _ = D.shape
    if mode is Mode.SHARP:
        arg = np.argmax(D, axis=0)
        W = np.take_along_axis(D, arg[None], axis=0)
        stack = W
    else:
        stack = D
    if method is Method.EXHAUSTIVE:
        value, r, chosen = sel.best_partition(stack, c)
    elif method is Method.GREEDY:
        a, b, occ = sel.interval_items(P)
        best = (-1.0, 0, ())
        for r in range(stack.shape[0]):
            w = stack[r, a, b]
            if not np.any(w > 0):
                continue
            picks = sel.greedy_select(w, occ, c)
            v = sel.sorted_pairing(w[picks], c) if picks else 0.0
            if v > best[0]:
                best = (v, r, tuple((int(a[i]), int(b[i])) for i in picks))
        value, r, chosen = best if best[0] >= 0 else (0.0, 0, ())
    elif method is Method.DYNAMIC:
        if not np.all(c == c[0]):
            raise ValueError("DYNAMIC applies to unweighted (Phi and modulus) sums only")
        best = (-1.0, 0, ())
        for r in range(stack.shape[0]):
            v, chosen = sel.dp_additive(stack[r] * c[0])
            if v > best[0]:
                best = (v, r, chosen)
        value, r, chosen = best
        w = np.array([stack[r, i, j] for i, j in chosen])
        chosen = tuple(chosen[i] for i in sel.pairing_order(w) if w[i] > 0)
    else:
        raise ValueError(f"unknown method {method}")
    if mode is Mode.SHARP:
        rows = tuple(int(arg[i, j]) for i, j in chosen)
    else:
        rows = tuple(r for _ in chosen)
    return float(value), rows, chosen


def _bound(method: Method) -> BoundKind:
    return BoundKind.LOWER_BOUND if method is Method.GREEDY else BoundKind.EXACT


def _collection(f, axis, nodes, others, chosen, rows) -> IntervalCollection:
    return IntervalCollection(
        axis=axis,
        indices=tuple(chosen),
        intervals=tuple((float(nodes[i]), float(nodes[j])) for i, j in chosen),
        points=tuple(_off_axis_point(f, axis, r, others) for r in rows),
    )


# ---------------------------------------------------------- axis functionals


def axis_lambda_variation(
    f: GridFunction,
    axis: int,
    seq: LambdaSeq,
    mode: Mode | str = Mode.FIXED,
    method: Method | str = Method.EXHAUSTIVE,
    cap: int = AXIS_CAP,
) -> VariationResult:
    """Lambda-variation along ``axis`` (``LVs``) or its sharp form (``L#Vs``).

    FIXED takes the sup over a shared off-axis grid point; SHARP lets every
    interval use its own off-axis point, i.e. interval weights are maxima over
    the off-axis grid.

    Examples
    --------
    >>> from genvar.gridfn import make_catalog
    >>> from genvar.lambda_seq import make_lambda
    >>> f = make_catalog("sign_diag", grid=(4, 4))
    >>> axis_lambda_variation(f, 0, make_lambda("harmonic"), "SHARP").value
    3.0
    """
    mode, method = Mode(mode), Method(method)
    if method is Method.DYNAMIC:
        raise ValueError("Lambda-weighted sums support EXHAUSTIVE or GREEDY")
    rows, nodes, others = _axis_slices(f, axis)
    if method is Method.EXHAUSTIVE:
        _check_cap(f.shape[axis], cap, _axis_id("L", axis, mode))
    c = _rank_weights(seq, nodes.size - 1)
    value, rs, chosen = _select_rows(_abs_diffs(rows), c, method, mode)
    return VariationResult(
        value=value,
        functional_id=_axis_id("L", axis, mode),
        method=method,
        bound_kind=_bound(method),
        certificate=_collection(f, axis, nodes, others, chosen, rs),
        lambdas=(seq,),
    )


def make_phi(spec: str | Callable) -> Callable[[np.ndarray], np.ndarray]:
    """``"power:p=2"`` -> ``u**2``; ``"xlogx"`` -> ``(1+u)log(1+u) - u``."""
    if callable(spec):
        return spec
    name, _, rest = spec.partition(":")
    if name == "power":
        p = float(rest.partition("=")[2]) if rest else 2.0
        if p < 1.0:
            raise ValueError("Phi power exponent must be >= 1")
        return lambda u: np.asarray(u, dtype=float) ** p
    return young_pair(spec).phi


def phi_variation(
    f: GridFunction,
    phi: str | Callable[[np.ndarray], np.ndarray],
    axis: int = 0,
    mode: Mode | str = Mode.FIXED,
    method: Method | str = Method.EXHAUSTIVE,
    cap: int = AXIS_CAP,
) -> VariationResult:
    """Phi-variation ``sum Phi(|f(I_i, y)|)`` along ``axis``.

    The sum is order-free, so DYNAMIC (an O(P^2) recursion over the node
    range) is exact as well.
    """
    mode, method = Mode(mode), Method(method)
    fn = make_phi(phi)
    rows, nodes, others = _axis_slices(f, axis)
    if method is Method.EXHAUSTIVE:
        _check_cap(f.shape[axis], cap, "Phi-variation")
    D = _abs_diffs(rows)
    if mode is Mode.SHARP:
        arg = np.argmax(D, axis=0)
        W = np.asarray(fn(np.max(D, axis=0)), dtype=float)[None]
    else:
        W = np.asarray(fn(D), dtype=float)
    if np.any(W < 0):
        raise ValueError("Phi must be nonnegative")
    c = np.ones(nodes.size - 1)
    value, rs, chosen = _select_rows(W, c, method, Mode.FIXED)
    if mode is Mode.SHARP:
        rs = tuple(int(arg[i, j]) for i, j in chosen)
    fid = f"VPhi{'#' if mode is Mode.SHARP else ''}{axis + 1}"
    return VariationResult(
        value=value,
        functional_id=fid,
        method=method,
        bound_kind=_bound(method),
        certificate=_collection(f, axis, nodes, others, chosen, rs),
        phi=fn,
    )


def modulus_of_variation(
    f: GridFunction,
    axis: int,
    n_max: int,
    sharp: bool = False,
    method: Method | str = Method.EXHAUSTIVE,
    cap: int = AXIS_CAP,
) -> ModulusTable:
    """``v(n)``: best sum of at most ``n`` interval oscillations, ``n = 1..n_max``.

    At most ``n`` intervals is the sorted pairing with rank weights
    ``(1, ..., 1, 0, ...)``, so the interval kernels apply unchanged.
    """
    method = Method(method)
    rows, nodes, _ = _axis_slices(f, axis)
    P = nodes.size
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if method is Method.EXHAUSTIVE:
        _check_cap(f.shape[axis], cap, "modulus of variation")
        if n_max > f.shape[axis] // 2:
            raise ValueError(f"exhaustive moduli need n_max <= {f.shape[axis] // 2}")
    D = _abs_diffs(rows)
    if sharp:
        D = np.max(D, axis=0)[None]
    out = np.zeros(n_max)
    if method is Method.DYNAMIC:
        for r in range(D.shape[0]):
            out = np.maximum(out, sel.dp_top_n(D[r], n_max))
    else:
        for n in range(1, n_max + 1):
            c = np.zeros(max(P - 1, n))
            c[:n] = 1.0
            if method is Method.EXHAUSTIVE:
                out[n - 1] = sel.best_partition(D, c)[0]
            else:
                out[n - 1] = _select_rows(D, c, Method.GREEDY, Mode.FIXED)[0]
        if method is Method.GREEDY:
            # a selection for n intervals is admissible for n + 1
            out = np.maximum.accumulate(out)
    return ModulusTable(axis=axis, values=out, sharp=sharp, method=method, bound_kind=_bound(method))


def tail_continuity_probe(
    f: GridFunction,
    seq: LambdaSeq,
    axis: int,
    n_list: Sequence[int],
    mode: Mode | str = Mode.SHARP,
    method: Method | str = Method.EXHAUSTIVE,
) -> TailProbe:
    """Variations with the tail weights ``lambda_n, lambda_{n+1}, ...``.

    ``q_hat`` is the smallest probed ratio ``lambda_{2n} / lambda_n``.
    """
    ns = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(ns, ns[1:])) or not ns or ns[0] < 1:
        raise ValueError("n_list must be increasing positive integers")
    results = tuple(axis_lambda_variation(f, axis, seq.tail(n), mode, method) for n in ns)
    base = seq.first - 1
    q_hat = min(seq[base + 2 * n] / seq[base + n] for n in ns)
    return TailProbe(tuple(ns), tuple(r.value for r in results), float(q_hat), results)


# --------------------------------------------------------- mixed functionals


def _difference_along(T: np.ndarray, axis: int, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    return np.take(T, right, axis=axis) - np.take(T, left, axis=axis)


def _mixed_tensor(S: np.ndarray, collections: Sequence[Sequence[tuple[int, int]]]) -> np.ndarray:
    """``|mixed difference|`` for every combination of intervals (one per axis)."""
    M = S
    for ax, coll in enumerate(collections):
        idx = np.asarray(coll, dtype=np.int64).reshape(-1, 2)
        M = _difference_along(M, ax, idx[:, 0], idx[:, 1])
    return np.abs(M)


def _weighted(M: np.ndarray, cs: Sequence[np.ndarray]) -> float:
    out = M
    for c in cs:
        out = np.tensordot(out, c[: out.shape[0]], axes=([0], [0]))
    return float(out)


def _perm_weights(c: np.ndarray, k: int) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    perms = list(itertools.permutations(range(k)))
    # row p gives the weight assigned to slot i under ordering p
    return np.array([[c[p[i]] for i in range(k)] for p in perms]), perms


def _mixed_exhaustive(S: np.ndarray, cs: Sequence[np.ndarray]):
    """Exact mixed variation of one slice ``S`` (nodes on every axis).

    Orderings on all but the last axis are enumerated; for each, the last
    axis receives aggregate weights and its best ordering is the sorted one.
    Partitions dominate collections on every axis, as in the 1-d case.
    Returns per-axis interval lists in rank order.
    """
    q = S.ndim
    parts = [sel.partitions(n) for n in S.shape]
    K = [n - 1 for n in S.shape]
    perm_w = [_perm_weights(cs[k], K[k]) for k in range(q - 1)]
    clast = cs[-1][: K[-1]]
    L0, R0, V0 = parts[0]
    D0 = np.take(S, R0, axis=0) - np.take(S, L0, axis=0)
    D0 = D0 * V0.reshape(V0.shape + (1,) * (q - 1))
    best = (-1.0, None, None, None)
    for combo in itertools.product(*[range(parts[k][0].shape[0]) for k in range(1, q)]):
        M = D0
        for k, m in enumerate(combo, start=1):
            L, R, V = parts[k]
            M = _difference_along(M, k + 1, L[m], R[m])
            shape = [1] * M.ndim
            shape[k + 1] = -1
            M = M * V[m].reshape(shape)
        agg = np.abs(M)  # (n0, K0, ..., K_last)
        for k in range(q - 1):
            agg = np.tensordot(agg, perm_w[k][0], axes=([1], [1]))
        agg = np.moveaxis(agg, 1, -1)  # (n0, perms0, ..., K_last)
        vals = -np.sort(-agg, axis=-1) @ clast
        flat = int(np.argmax(vals))
        if vals.flat[flat] > best[0]:
            pos = np.unravel_index(flat, vals.shape)
            best = (float(vals.flat[flat]), combo, pos, agg[pos])
    _, combo, pos, last_agg = best
    out = []
    for k in range(q):
        m = int(pos[0]) if k == 0 else combo[k - 1]
        L, R, V = parts[k]
        cnt = int(V[m].sum())
        pieces = list(zip(L[m, :cnt].tolist(), R[m, :cnt].tolist()))
        if k < q - 1:
            perm = perm_w[k][1][int(pos[k + 1])]
            # gaps left by empty slots close up without lowering the value
            out.append([pieces[i] for i in sorted(range(cnt), key=lambda i: perm[i])])
        else:
            out.append([pieces[i] for i in sel.pairing_order(last_agg[:cnt])])
    return out


def _mixed_greedy(S: np.ndarray, cs: Sequence[np.ndarray], rounds: int = 50):
    """Alternating per-axis greedy; each axis sees aggregate interval weights."""
    q = S.ndim
    P = S.shape
    # start: unit intervals, ranked by their largest single difference
    colls = []
    for k in range(q):
        units = [(i, i + 1) for i in range(P[k] - 1)]
        D = np.abs(_difference_along(S, k, np.arange(P[k] - 1), np.arange(1, P[k])))
        mags = np.max(np.moveaxis(D, k, 0).reshape(P[k] - 1, -1), axis=1)
        colls.append([units[i] for i in sel.pairing_order(mags)])

    def objective(cl):
        return _weighted(_mixed_tensor(S, cl), cs)

    best_val, best = objective(colls), [list(c) for c in colls]
    for _ in range(rounds):
        improved = False
        for t in range(q):
            M = S
            for k in range(q):
                if k == t:
                    continue
                idx = np.asarray(colls[k], dtype=np.int64).reshape(-1, 2)
                M = _difference_along(M, k, idx[:, 0], idx[:, 1])
            M = np.moveaxis(M, t, 0).reshape(P[t], -1)
            wvec = np.ones(1)
            for k in range(q):
                if k != t:
                    wvec = np.multiply.outer(wvec, cs[k][: len(colls[k])]).ravel()
            a, b, occ = sel.interval_items(P[t])
            agg = np.abs(M[b] - M[a]) @ wvec
            picks = sel.greedy_select(agg, occ, cs[t])
            trial = [list(c) for c in colls]
            trial[t] = [(int(a[i]), int(b[i])) for i in picks]
            val = objective(trial) if trial[t] else 0.0
            if val > best_val * (1 + 1e-14) + 1e-300:
                best_val, best, colls, improved = val, trial, trial, True
        if not improved:
            break
    return best


def _plain_collection(axis, nodes, chosen) -> IntervalCollection:
    chosen = tuple(chosen)
    return IntervalCollection(axis, chosen, tuple((float(nodes[i]), float(nodes[j])) for i, j in chosen))


def mixed_lambda_variation(
    f: GridFunction,
    seqs,
    method: Method | str = Method.EXHAUSTIVE,
    axes: Sequence[int] | None = None,
) -> VariationResult:
    """Index-set variation ``V^alpha`` with ``alpha = axes`` (default: all).

    Off-``alpha`` coordinates range over grid points (sup).  For ``d = 2`` and
    ``alpha = {1, 2}`` this is ``LV12``.

    Notes
    -----
    EXHAUSTIVE enumerates partitions of every axis in ``alpha`` and the
    orderings of all axes but the last; the last axis then takes the sorted
    pairing of its aggregate weights, which is optimal for every fixed
    ordering of the others.
    """
    method = Method(method)
    alpha = tuple(sorted(range(f.dim) if axes is None else set(axes)))
    if len(alpha) < 2 or any(not 0 <= k < f.dim for k in alpha):
        raise ValueError("mixed variation needs at least two valid axes")
    if method is Method.DYNAMIC:
        raise ValueError("mixed variation supports EXHAUSTIVE or GREEDY")
    if method is Method.EXHAUSTIVE:
        limit = MIXED_CAP if len(alpha) == 2 else MIXED_CAP_3D
        for k in alpha:
            _check_cap(f.shape[k], limit, "mixed variation")
    seq_list = [_seq_for(seqs, k) for k in alpha]
    T = _table(f, alpha)
    off = [k for k in range(f.dim) if k not in alpha]
    T = np.moveaxis(T, alpha, range(len(alpha)))
    cs = [_rank_weights(s, T.shape[i] - 1) for i, s in enumerate(seq_list)]
    slices = T.reshape(T.shape[: len(alpha)] + (-1,))
    best = None
    for r in range(slices.shape[-1]):
        S = slices[..., r]
        colls = _mixed_exhaustive(S, cs) if method is Method.EXHAUSTIVE else _mixed_greedy(S, cs)
        val = _weighted(_mixed_tensor(S, colls), cs) if all(colls) else 0.0
        if best is None or val > best[0]:
            best = (val, r, colls)
    value, r, colls = best
    fixed = ()
    if off:
        idx = np.unravel_index(r, tuple(f.shape[k] for k in off))
        fixed = tuple((k, float(f.axes[k][i])) for k, i in zip(off, idx))
    cert = MixedCertificate(
        axes=alpha,
        collections=tuple(
            _plain_collection(k, f.nodes(k), coll) for k, coll in zip(alpha, colls)
        ),
        fixed=fixed,
    )
    if f.dim == 2:
        fid = "LV12"
    else:
        fid = "V^{" + ",".join(str(k + 1) for k in alpha) + "}"
    return VariationResult(
        value=float(value),
        functional_id=fid,
        method=method,
        bound_kind=_bound(method),
        certificate=cert,
        lambdas=tuple(seq_list),
    )


def composite_variation(
    f: GridFunction,
    seqs,
    which: Which | str = Which.TOTAL,
    method: Method | str = Method.EXHAUSTIVE,
    alpha: Sequence[int] | None = None,
) -> VariationResult:
    """Sums of index-set variations.

    PARTIAL sums the single-axis variations, TOTAL sums ``V^alpha`` over all
    nonempty ``alpha``, INDEX_SET returns ``V^alpha`` for the given set.
    """
    which, method = Which(which), Method(method)
    if which is Which.INDEX_SET:
        if not alpha:
            raise ValueError("INDEX_SET needs a nonempty axis set")
        alpha = sorted(set(alpha))
        if len(alpha) == 1:
            part = axis_lambda_variation(f, alpha[0], _seq_for(seqs, alpha[0]), Mode.FIXED, method)
        else:
            part = mixed_lambda_variation(f, seqs, method, axes=alpha)
        parts = (part,)
        fid = "V^{" + ",".join(str(k + 1) for k in alpha) + "}"
    else:
        sets = [(k,) for k in range(f.dim)]
        if which is Which.TOTAL:
            sets = [s for n in range(1, f.dim + 1) for s in itertools.combinations(range(f.dim), n)]
        parts = tuple(
            axis_lambda_variation(f, s[0], _seq_for(seqs, s[0]), Mode.FIXED, method)
            if len(s) == 1
            else mixed_lambda_variation(f, seqs, method, axes=s)
            for s in sets
        )
        fid = "PLV" if which is Which.PARTIAL else "LV"
    exact = all(p.bound_kind is BoundKind.EXACT for p in parts)
    return VariationResult(
        value=math.fsum(p.value for p in parts),
        functional_id=fid,
        method=method,
        bound_kind=BoundKind.EXACT if exact else BoundKind.LOWER_BOUND,
        certificate=None,
        lambdas=tuple(_seq_for(seqs, k) for k in range(f.dim)),
        constituents=parts,
    )


def _rectangles(P1: int, P2: int):
    a, b = np.triu_indices(P1, k=1)
    c, d = np.triu_indices(P2, k=1)
    A = np.repeat(a, c.size)
    B = np.repeat(b, c.size)
    C = np.tile(c, a.size)
    Dd = np.tile(d, a.size)
    cx = np.arange(P1 - 1)
    cy = np.arange(P2 - 1)
    in_x = (cx[None, :] >= A[:, None]) & (cx[None, :] < B[:, None])
    in_y = (cy[None, :] >= C[:, None]) & (cy[None, :] < Dd[:, None])
    occ = (in_x[:, :, None] & in_y[:, None, :]).reshape(A.size, -1)
    return A, B, C, Dd, occ


def star_variation(
    f: GridFunction,
    seq: LambdaSeq,
    method: Method | str = Method.EXHAUSTIVE,
    cap: int = STAR_CAP,
) -> VariationResult:
    """``L*V``: sorted pairing of ``|f(A_k)|`` over nonoverlapping grid rectangles."""
    method = Method(method)
    if f.dim != 2:
        raise ValueError("star variation is defined for two variables")
    if method is Method.DYNAMIC:
        raise ValueError("star variation supports EXHAUSTIVE or GREEDY")
    if method is Method.EXHAUSTIVE:
        for k in range(2):
            _check_cap(f.shape[k], cap, "L*V")
    S = _table(f, (0, 1))
    P1, P2 = S.shape
    A, B, C, D, occ = _rectangles(P1, P2)
    w = np.abs(S[B, D] - S[A, D] - S[B, C] + S[A, C])
    n_cells = (P1 - 1) * (P2 - 1)
    c = _rank_weights(seq, n_cells)
    picks = sel.greedy_select(w, occ, c)
    value = sel.sorted_pairing(w[picks], c) if picks else 0.0
    if method is Method.EXHAUSTIVE:
        masks = [int(sum(1 << int(j) for j in np.nonzero(row)[0])) for row in occ]
        value, picks = sel.branch_and_bound(w, masks, c, n_cells, incumbent=(value, picks))
        picks = [picks[i] for i in sel.pairing_order(w[picks])]
    x, y = f.nodes(0), f.nodes(1)
    idx = tuple((int(A[i]), int(B[i]), int(C[i]), int(D[i])) for i in picks)
    boxes = tuple(Box((float(x[a]), float(y[cc])), (float(x[b]), float(y[d]))) for a, b, cc, d in idx)
    return VariationResult(
        value=float(value),
        functional_id="L*V",
        method=method,
        bound_kind=_bound(method),
        certificate=BoxCollection(idx, boxes),
        lambdas=(seq,),
    )


# ------------------------------------------------------------ re-evaluation


def certificate_value(f: GridFunction, result: VariationResult) -> float:
    """Recompute a result from its certificate with direct point evaluations.

    Uses :func:`genvar.gridfn.mixed_difference` and the stored sequences,
    independently of the search tables.
    """
    if result.constituents:
        return math.fsum(certificate_value(f, p) for p in result.constituents)
    cert = result.certificate
    if isinstance(cert, IntervalCollection):
        mags = [
            abs(mixed_difference(f, Box((lo,), (hi,)), dict(pt)))
            for (lo, hi), pt in zip(cert.intervals, cert.points or [()] * len(cert))
        ]
        if result.phi is not None:
            return math.fsum(float(result.phi(m)) for m in mags)
        lam = result.lambdas[0]
        return math.fsum(m / lam[lam.first + i] for i, m in enumerate(mags))
    if isinstance(cert, BoxCollection):
        lam = result.lambdas[0]
        return math.fsum(abs(mixed_difference(f, bx)) / lam[lam.first + i] for i, bx in enumerate(cert.boxes))
    if isinstance(cert, MixedCertificate):
        terms = []
        spans = [c.intervals for c in cert.collections]
        for combo in itertools.product(*[range(len(s)) for s in spans]):
            box = Box(tuple(spans[k][i][0] for k, i in enumerate(combo)), tuple(spans[k][i][1] for k, i in enumerate(combo)))
            weight = 1.0
            for lam, i in zip(result.lambdas, combo):
                weight *= lam[lam.first + i]
            terms.append(abs(mixed_difference(f, box, dict(cert.fixed))) / weight)
        return math.fsum(terms)
    return 0.0
