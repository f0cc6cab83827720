"""Weight sequences for Waterman-type variations and the scalar series tests.

A :class:`LambdaSeq` is an immutable, lazily evaluated positive sequence
``lambda_1, lambda_2, ...``.  Catalog kinds have closed forms; explicit lists
and user formulas are also accepted.  Sequences whose head is not monotone
(``n / log n`` dips at ``n = 3``) are normalized by shifting the first used
index to :attr:`LambdaSeq.monotone_from`; every variation functional reads its
weights through :meth:`LambdaSeq.weights`, which applies that shift.

:func:`series_condition_probe` sums the series that appear as sufficient
conditions for convergence, at dyadic cut-offs, and classifies the evidence as
CONVERGENT, DIVERGENT or INCONCLUSIVE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "LambdaSeq",
    "LambdaValidity",
    "make_lambda",
    "parse_lambda",
    "load_lambda_list",
    "validate_lambda",
    "YoungPair",
    "young_pair",
    "Condition",
    "Classification",
    "GrowthFit",
    "SeriesVerdict",
    "series_condition_probe",
    "series_terms",
    "CONVERGENCE_RATIO",
    "FIT_RESIDUAL",
]

# probe window used by the validator for generated kinds
_PROBE_EXPONENT = 24
# custom formulas are scanned for a monotone head this far
_CUSTOM_SCAN = 1 << 16

CONVERGENCE_RATIO = 0.75
FIT_RESIDUAL = 0.05
# increments shrinking at least this fast rule out a divergence verdict
DECAY_GUARD = 0.9


def _power_log(p: float, q: float) -> Callable[[np.ndarray], np.ndarray]:
    def gen(n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        if q == 0.0:
            return n**p
        # log(1) = 0: the first term is defined as the second one
        m = np.where(n < 2, 2.0, n)
        return m**p / np.log(m) ** q

    return gen


@dataclass(frozen=True)
class LambdaSeq:
    """Positive weight sequence indexed from 1.

    Attributes
    ----------
    kind : str
        ``harmonic``, ``power``, ``n_over_log_pow``, ``power_log``,
        ``constant``, ``explicit`` or ``custom``.
    params : tuple of (str, float)
        Parameters of the closed form, sorted by name.
    monotone_from : int
        Smallest index ``m`` with ``lambda_{n-1} <= lambda_n`` for all
        ``n >= max(m, 2)``.
    start_index : int
        First index the caller wants to use (``> 1`` for tail sequences).
    """

    kind: str
    params: tuple[tuple[str, float], ...]
    generator: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    monotone_from: int = 1
    start_index: int = 1
    length: int | None = None

    def values(self, n_max: int) -> np.ndarray:
        """Raw values ``lambda_1 .. lambda_{n_max}``."""
        return self.values_range(1, n_max)

    def values_range(self, lo: int, hi: int) -> np.ndarray:
        if lo < 1:
            raise IndexError("sequences are indexed from 1")
        if self.length is not None and hi > self.length:
            raise IndexError(
                f"explicit sequence has {self.length} entries, index {hi} requested"
            )
        if hi < lo:
            return np.empty(0)
        return np.asarray(self.generator(np.arange(lo, hi + 1)), dtype=float)

    def __getitem__(self, n: int) -> float:
        return float(self.values_range(n, n)[0])

    @property
    def first(self) -> int:
        """Index of the weight paired with the largest term."""
        return max(self.start_index, self.monotone_from)

    def weights(self, k: int) -> np.ndarray:
        """The ``k`` weights used by variation sums, after normalization."""
        return self.values_range(self.first, self.first + k - 1)

    def tail(self, n: int) -> "LambdaSeq":
        """Tail sequence ``{lambda_k}_{k >= n}`` in normalized indexing."""
        if n < 1:
            raise ValueError("tail index must be >= 1")
        return replace(self, start_index=self.first + n - 1)

    @property
    def label(self) -> str:
        if not self.params:
            return self.kind
        body = ",".join(f"{k}={v:g}" for k, v in self.params)
        return f"{self.kind}:{body}"


def _first_monotone_index(values: np.ndarray, offset: int = 1) -> int:
    # values[0] is lambda_offset; returns 1 + last index with a strict decrease
    drops = np.nonzero(np.diff(values) < 0)[0]
    if drops.size == 0:
        return offset
    return offset + int(drops[-1]) + 2


def make_lambda(kind: str, **params) -> LambdaSeq:
    """Build a catalog weight sequence.

    Parameters
    ----------
    kind : str
        ``harmonic`` (``n``), ``power`` (``n**p``, ``0 < p <= 1``),
        ``n_over_log_pow`` (``n / log(n)**q``), ``power_log``
        (``n**p / log(n)**q``), ``constant`` (``c``), ``explicit``
        (``values=[...]``) or ``custom`` (``formula=callable``).
    **params
        Kind-specific parameters.

    Returns
    -------
    LambdaSeq
    """
    if kind == "harmonic":
        return LambdaSeq("harmonic", (), lambda n: np.asarray(n, dtype=float))
    if kind == "power":
        p = float(params.get("p", 1.0))
        if not 0.0 < p <= 1.0:
            raise ValueError(f"power exponent must lie in (0, 1], got {p}")
        return LambdaSeq("power", (("p", p),), _power_log(p, 0.0))
    if kind in ("n_over_log_pow", "power_log"):
        p = float(params.get("p", 1.0)) if kind == "power_log" else 1.0
        q = float(params.get("q", 1.0))
        if not 0.0 < p <= 1.0:
            raise ValueError(f"power exponent must lie in (0, 1], got {p}")
        if q <= 0.0:
            raise ValueError(f"log exponent must be positive, got {q}")
        gen = _power_log(p, q)
        # x**p / log(x)**q increases for x > exp(q / p); scan the head exactly
        head = int(math.ceil(math.exp(q / p))) + 2
        mono = _first_monotone_index(gen(np.arange(1, head + 1)))
        key = (("q", q),) if kind == "n_over_log_pow" else (("p", p), ("q", q))
        return LambdaSeq(kind, key, gen, monotone_from=mono)
    if kind == "constant":
        c = float(params.get("c", 1.0))
        if c <= 0.0:
            raise ValueError("constant sequence must be positive")
        return LambdaSeq("constant", (("c", c),), lambda n: np.full(np.shape(n), c))
    if kind == "explicit":
        vals = np.asarray(params["values"], dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("explicit sequence needs a non-empty list")
        if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
            raise ValueError("explicit sequence entries must be positive and finite")
        frozen = vals.copy()
        frozen.setflags(write=False)
        return LambdaSeq(
            "explicit",
            (),
            lambda n: frozen[np.asarray(n) - 1],
            monotone_from=_first_monotone_index(frozen),
            length=int(frozen.size),
        )
    if kind == "custom":
        formula = params["formula"]

        def gen(n: np.ndarray) -> np.ndarray:
            return np.asarray(formula(np.asarray(n, dtype=float)), dtype=float)

        head = gen(np.arange(1, _CUSTOM_SCAN + 1))
        if np.any(head <= 0) or not np.all(np.isfinite(head)):
            raise ValueError("custom formula must produce positive finite values")
        return LambdaSeq("custom", (), gen, monotone_from=_first_monotone_index(head))
    raise ValueError(f"unknown sequence kind {kind!r}")


def parse_lambda(text: str) -> LambdaSeq:
    """Parse a CLI sequence string such as ``"power:p=0.5"``.

    A string naming an existing file is read as an explicit list.
    """
    if Path(text).is_file():
        return load_lambda_list(text)
    name, _, rest = text.partition(":")
    params: dict[str, float] = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"malformed parameter {item!r} in {text!r}")
        params[key.strip()] = float(val)
    return make_lambda(name.strip(), **params)


def load_lambda_list(path: str | Path) -> LambdaSeq:
    """Explicit sequence from a one-value-per-line text file."""
    lines = Path(path).read_text().split()
    return make_lambda("explicit", values=[float(s) for s in lines])


@dataclass(frozen=True)
class LambdaValidity:
    valid: bool
    start_index: int
    offset: int
    bounded: bool
    problems: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()


def validate_lambda(seq: LambdaSeq) -> LambdaValidity:
    """Check positivity, monotonicity from the normalized start, and growth.

    Growth is accepted when some probed ``lambda_N`` exceeds ten times the
    first used weight; generated kinds are probed at ``N = 2**k`` up to
    ``2**24``, explicit lists over their own length.
    """
    first = seq.first
    problems: list[str] = []
    warnings: list[str] = []
    if seq.length is not None:
        window = seq.values_range(first, seq.length)
        probes = window
    else:
        window = seq.values_range(first, first + 4096)
        idx = first + (1 << np.arange(_PROBE_EXPONENT + 1)) - 1
        probes = np.asarray(seq.generator(idx), dtype=float)
    if np.any(window <= 0):
        problems.append("nonpositive value")
    if np.any(np.diff(window) < 0):
        problems.append(f"not nondecreasing from index {first}")
    lead = float(window[0])
    bounded = not bool(np.any(probes > 10.0 * lead))
    if bounded:
        problems.append("bounded: no growth detected across probe window")
    if lead <= 1.0:
        warnings.append(
            f"lambda_{first} = {lead:g} <= 1; finite functionals remain defined"
        )
    return LambdaValidity(
        valid=not problems,
        start_index=first,
        offset=first - seq.start_index,
        bounded=bounded,
        problems=tuple(problems),
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class YoungPair:
    """Functions with ``a * b <= phi(a) + psi(b)`` for ``a, b >= 0``."""

    name: str
    phi: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    psi: Callable[[np.ndarray], np.ndarray] = field(compare=False)


def young_pair(spec: str) -> YoungPair:
    """``"power:p=2"`` gives ``(u**p, u**q)`` with ``1/p + 1/q = 1``;
    ``"xlogx"`` gives ``((1+u)log(1+u) - u, exp(u) - u - 1)``."""
    name, _, rest = spec.partition(":")
    if name == "power":
        p = float(rest.partition("=")[2]) if rest else 2.0
        if p <= 1.0:
            raise ValueError("Young pair power exponent must exceed 1")
        q = p / (p - 1.0)
        return YoungPair(
            f"power:p={p:g}",
            lambda u: np.asarray(u, dtype=float) ** p,
            lambda u: np.asarray(u, dtype=float) ** q,
        )
    if name == "xlogx":
        return YoungPair(
            "xlogx",
            lambda u: (1.0 + np.asarray(u, dtype=float)) * np.log1p(u) - u,
            lambda u: np.expm1(u) - np.asarray(u, dtype=float),
        )
    raise ValueError(f"unknown Young pair {spec!r}")


class Condition(str, Enum):
    """Sufficient-condition series, plus sup-type sequence conditions."""

    T1_1 = "T1_1"  # sum gamma_n / n, lambda_n = n gamma_n
    PHI = "PHI"  # sum Psi(1 / lambda_n)
    T2 = "T2"  # sum sqrt(v(n)) / n^{3/2}
    TT = "TT"  # limsup lambda_n log n / n  (sup-type)
    PHI_LOG = "PHI_LOG"  # sum Psi(log n / n)
    V_LOG = "V_LOG"  # sum v#(n) log^{d-1} n / n^2
    MV = "MV"  # sum_j v#(2^j) / 2^{j(1 - s)}
    T41 = "T41"  # sum lambda_n log^{d-2} n / n^2
    T3 = "T3"  # sum lambda_n / n^{2 - s}
    DYADIC_MODULUS = "DYADIC_MODULUS"  # sum_j v_i(2^j)^{a_i/s} / 2^{j(a_i/s - a_i)}
    TERMS = "TERMS"  # caller-supplied terms


_SUP_CONDITIONS = {Condition.TT}
_DYADIC_CONDITIONS = {Condition.MV, Condition.DYADIC_MODULUS}
_MODULUS_CONDITIONS = {Condition.T2, Condition.V_LOG, Condition.MV, Condition.DYADIC_MODULUS}


class Classification(str, Enum):
    CONVERGENT = "CONVERGENT"
    DIVERGENT = "DIVERGENT"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class GrowthFit:
    model: str  # "bounded" | "log" | "power" | "none"
    params: tuple[tuple[str, float], ...] = ()
    residual: float = math.nan


@dataclass(frozen=True)
class SeriesVerdict:
    condition_id: Condition
    cutoffs: tuple[int, ...]
    partial_sums: tuple[float, ...]
    classification: Classification
    evidence: GrowthFit
    sup_type: bool = False


def _modulus_callable(data) -> tuple[Callable[[np.ndarray], np.ndarray], int | None]:
    if callable(data):
        return (lambda n: np.asarray(data(np.asarray(n, dtype=float)), dtype=float)), None
    table = np.asarray(getattr(data, "values", data), dtype=float)
    return (lambda n: table[np.asarray(n, dtype=np.int64) - 1]), int(table.size)


def series_terms(
    condition: Condition | str,
    seq: LambdaSeq | None = None,
    *,
    modulus=None,
    pair: YoungPair | None = None,
    orders: Sequence[float] = (),
    dim: int = 2,
    axis_order: float | None = None,
    terms: Callable[[np.ndarray], np.ndarray] | None = None,
) -> tuple[Callable[[np.ndarray], np.ndarray], int | None]:
    """Return ``(term(n), max_index)`` for a condition.

    ``max_index`` is ``None`` when terms can be generated to any index.
    For dyadic conditions the index is the exponent ``j``.
    """
    cond = Condition(condition)
    s = float(sum(orders))
    limit: int | None = None
    if cond in (Condition.T1_1, Condition.PHI, Condition.TT, Condition.T41, Condition.T3):
        if seq is None:
            raise ValueError(f"{cond.value} needs a weight sequence")
        lam = seq.generator
        limit = seq.length
    if cond in _MODULUS_CONDITIONS:
        if modulus is None:
            raise ValueError(f"{cond.value} needs modulus of variation data")
        v, limit = _modulus_callable(modulus)

    if cond is Condition.T1_1:
        return (lambda n: lam(n) / np.asarray(n, float) ** 2), limit
    if cond is Condition.PHI:
        if pair is None:
            raise ValueError("PHI needs a Young pair")
        return (lambda n: pair.psi(1.0 / lam(n))), limit
    if cond is Condition.T2:
        return (lambda n: np.sqrt(v(n)) / np.asarray(n, float) ** 1.5), limit
    if cond is Condition.TT:
        return (lambda n: lam(n) * np.log(n) / np.asarray(n, float)), limit
    if cond is Condition.PHI_LOG:
        if pair is None:
            raise ValueError("PHI_LOG needs a Young pair")
        return (lambda n: pair.psi(np.log(n) / np.asarray(n, float))), None
    if cond is Condition.V_LOG:
        return (lambda n: v(n) * np.log(n) ** (dim - 1) / np.asarray(n, float) ** 2), limit
    if cond is Condition.T41:
        return (lambda n: lam(n) * np.log(n) ** (dim - 2) / np.asarray(n, float) ** 2), limit
    if cond is Condition.T3:
        if not orders:
            raise ValueError("T3 needs the Cesaro orders")
        return (lambda n: lam(n) / np.asarray(n, float) ** (2.0 - s)), limit
    if cond is Condition.MV:
        if not orders:
            raise ValueError("MV needs the Cesaro orders")
        vmax = None if limit is None else int(math.floor(math.log2(limit)))
        return (lambda j: v(2.0 ** j) / 2.0 ** (j * (1.0 - s))), vmax
    if cond is Condition.DYADIC_MODULUS:
        if not orders or axis_order is None:
            raise ValueError("DYADIC_MODULUS needs the orders and the axis order")
        r = axis_order / s
        vmax = None if limit is None else int(math.floor(math.log2(limit)))
        return (lambda j: v(2.0 ** j) ** r / 2.0 ** (j * (r - axis_order))), vmax
    if cond is Condition.TERMS:
        if terms is None:
            raise ValueError("TERMS needs a term function")
        return (lambda n: np.asarray(terms(np.asarray(n, float)), dtype=float)), None
    raise ValueError(f"unhandled condition {cond}")  # pragma: no cover


def _fit_growth(k: np.ndarray, sums: np.ndarray) -> GrowthFit:
    """Fit ``a + c log N``, falling back to ``a + c N**eps`` when that fails.

    Residuals are the max deviation divided by the growth over the window.
    """
    growth = float(sums[-1] - sums[0])
    if not growth > 1e-12 * max(1.0, abs(float(sums[-1]))):
        return GrowthFit("none")
    logn = k * math.log(2.0)
    design = np.column_stack([np.ones_like(logn), logn])
    coef, *_ = np.linalg.lstsq(design, sums, rcond=None)
    res_log = float(np.max(np.abs(design @ coef - sums))) / growth
    best = GrowthFit("log", (("a", float(coef[0])), ("c", float(coef[1]))), res_log)
    if coef[1] <= 0:
        best = GrowthFit("none")
    elif res_log < FIT_RESIDUAL:
        return best

    def power_residual(eps: float) -> tuple[float, np.ndarray]:
        basis = np.column_stack([np.ones_like(logn), np.exp(eps * logn)])
        c, *_ = np.linalg.lstsq(basis, sums, rcond=None)
        return float(np.max(np.abs(basis @ c - sums))) / growth, c

    opt = minimize_scalar(
        lambda e: power_residual(e)[0], bounds=(1e-3, 2.0), method="bounded"
    )
    res_pow, c = power_residual(float(opt.x))
    if c[1] > 0 and res_pow < (best.residual if best.model != "none" else math.inf):
        best = GrowthFit(
            "power",
            (("a", float(c[0])), ("c", float(c[1])), ("eps", float(opt.x))),
            res_pow,
        )
    return best


def _classify(ks: np.ndarray, sums: np.ndarray) -> tuple[Classification, GrowthFit]:
    if sums.size < 5:
        # four increments are the least the decay test can judge
        return Classification.INCONCLUSIVE, GrowthFit("none")
    inc = np.diff(sums)[-4:]
    if inc.size == 4:
        if np.all(inc == 0):
            return Classification.CONVERGENT, GrowthFit("bounded", (("limit", float(sums[-1])),), 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(inc[:-1] > 0, inc[1:] / inc[:-1], np.where(inc[1:] > 0, np.inf, 0.0))
        if np.all(ratios < CONVERGENCE_RATIO):
            worst = float(np.max(ratios))
            return Classification.CONVERGENT, GrowthFit(
                "bounded", (("limit", float(sums[-1])), ("ratio", worst)), worst
            )
    fit = _fit_growth(ks.astype(float), sums)
    inc = np.diff(sums)[-4:]
    shrinking = bool(np.all(inc[1:] < DECAY_GUARD * inc[:-1]))
    if fit.model in ("log", "power") and fit.residual < FIT_RESIDUAL and not shrinking:
        return Classification.DIVERGENT, fit
    return Classification.INCONCLUSIVE, fit


def series_condition_probe(
    condition: Condition | str,
    seq: LambdaSeq | None = None,
    *,
    K: int | None = None,
    k_min: int = 4,
    **kwargs,
) -> SeriesVerdict:
    """Partial sums at ``N = 2**k``, ``k = k_min..K``, and a growth verdict.

    Keyword arguments are forwarded to :func:`series_terms`.  ``K`` defaults to
    24 for sequence-driven series and 14 for modulus-driven ones, and is
    clipped to the available data.  Sup-type conditions (``TT``) record the
    running maximum instead of the partial sum; CONVERGENT then means bounded.

    CONVERGENT: the last four dyadic increments decay with ratio < 0.75.
    DIVERGENT: ``a + c log N`` or ``a + c N**eps`` fits the sums with max
    residual below 5% of the growth over the window, and the last increments
    do not all shrink by a factor below 0.9.  Otherwise INCONCLUSIVE.
    """
    cond = Condition(condition)
    term, limit = series_terms(cond, seq, **kwargs)
    if K is None:
        K = 14 if cond in _MODULUS_CONDITIONS else 24
    dyadic = cond in _DYADIC_CONDITIONS
    if limit is not None:
        K = min(K, limit if dyadic else int(math.floor(math.log2(limit))))
    sup_type = cond in _SUP_CONDITIONS

    ks = np.arange(k_min, K + 1)
    if dyadic:
        # the series index is already the exponent j = 0, 1, ..., K
        vals = np.asarray(term(np.arange(0, K + 1, dtype=float)), dtype=float)
        sums = np.cumsum(vals)[k_min:] if not sup_type else np.maximum.accumulate(vals)[k_min:]
        cutoffs = tuple(int(k) for k in ks)
    else:
        blocks: list[float] = []
        out = []
        for k in range(0, K + 1):
            lo = 1 if k == 0 else (1 << (k - 1)) + 1
            hi = 1 << k
            block = np.asarray(term(np.arange(lo, hi + 1)), dtype=float)
            blocks.append(float(np.max(block)) if sup_type else float(np.sum(block)))
            if k >= k_min:
                # fsum is correctly rounded, so nonnegative blocks give monotone sums
                out.append(max(blocks) if sup_type else math.fsum(blocks))
        sums = np.asarray(out)
        cutoffs = tuple(1 << int(k) for k in ks)
    if sums.size == 0:
        return SeriesVerdict(cond, (), (), Classification.INCONCLUSIVE, GrowthFit("none"), sup_type)
    cls, fit = _classify(ks, sums)
    return SeriesVerdict(cond, cutoffs, tuple(float(s) for s in sums), cls, fit, sup_type)
