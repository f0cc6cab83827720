"""Experiment presets, reports and deterministic rendering.

Each preset expands an :class:`ExperimentConfig` into cases.  Cases are pure
functions of ``(config, seed, case index)``, so they may run on any number of
threads; rows are sorted by case id before a report is assembled.  Rendered
reports omit wall-clock runtimes, which keeps them byte-identical across runs.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from . import summability as sm
from . import variation as va
from .gridfn import GridFunction, parse_function, parse_real, random_grid_function
from .lambda_seq import Condition, make_lambda, parse_lambda, series_condition_probe, young_pair

EXPERIMENTS = (
    "THEOREM_S_DESK",
    "ZHIZHIASHVILI_DESK",
    "WATERMAN_W2_1D",
    "GOGINAVA_PBV_REGIME",
    "INCLUSION_SUITE",
    "ORACLE_EQUIVALENCE",
    "SERIES_PROBE_SUITE",
)
EXPLORATORY = {"GOGINAVA_PBV_REGIME"}
CERT_TOLERANCE = 1e-12
SIG_DIGITS = 12

_DEFAULTS: dict[str, dict[str, Any]] = {
    "THEOREM_S_DESK": {
        "function": "step_product",
        "points": [["pi", "pi"], ["pi/2", "pi"]],
        "degrees": "16:512:dyadic",
    },
    "ZHIZHIASHVILI_DESK": {
        "function": "step_product",
        "points": [["pi", "pi"], ["pi/2", "pi"]],
        "orders": [[-0.3, -0.3]],
        "degrees": "16:512:dyadic",
    },
    "WATERMAN_W2_1D": {
        "function": "square_wave_1d",
        "points": [["pi"], ["pi/2"]],
        "alphas": [0.3],
        "grid": [14],
        "degrees": "16:512:dyadic",
    },
    "GOGINAVA_PBV_REGIME": {
        "function": "step_product",
        "points": [["pi", "pi"], ["pi/2", "pi/2"]],
        "orders": [[-0.2, -0.3], [-0.4, -0.4], [-0.5, -0.6], [-0.7, -0.7]],
        "degrees": "16:512:dyadic",
    },
    "INCLUSION_SUITE": {
        "grid": [5, 5],
        "cases": 50,
        "lambdas": ["harmonic", "power:p=0.5", "n_over_log_pow:q=1"],
        "scales": [-2.5, 0.5],
        "shift": 3.0,
    },
    "ORACLE_EQUIVALENCE": {
        "grid": [5, 5],
        "cases": 200,
        "lambdas": ["harmonic", "power:p=0.5", "n_over_log_pow:q=1"],
    },
    "SERIES_PROBE_SUITE": {
        "series": [
            {"condition": "TERMS", "p": 2.0, "q": 0.0},
            {"condition": "TERMS", "p": 1.0, "q": 0.0},
            {"condition": "TERMS", "p": 0.5, "q": 0.0},
            {"condition": "TT", "lambda": "n_over_log_pow:q=1"},
            {"condition": "T1_1", "lambda": "n_over_log_pow:q=2"},
            {"condition": "PHI", "lambda": "harmonic", "pair": "power:p=2"},
        ],
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved experiment settings; unset fields take the preset defaults."""

    experiment: str
    function: str | None = None
    lambdas: tuple[str, ...] = ()
    orders: tuple[tuple[float, ...], ...] = ()
    alphas: tuple[float, ...] = ()
    grid: tuple[int, ...] = ()
    degrees: str = "16:512:dyadic"
    points: tuple[tuple[str, ...], ...] = ()
    cases: int = 0
    scales: tuple[float, ...] = ()
    shift: float = 0.0
    series: tuple[dict, ...] = ()
    seed: int = 0
    outputs: tuple[str, ...] = ("csv", "json", "plot")

    @classmethod
    def preset(cls, experiment: str, **overrides) -> "ExperimentConfig":
        """Preset defaults with ``overrides`` (``None`` values are ignored)."""
        return cls.from_dict({"experiment": experiment, **{k: v for k, v in overrides.items() if v is not None}})

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config fields: {sorted(extra)}")
        exp = data.get("experiment")
        if exp not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {exp!r}; choose from {', '.join(EXPERIMENTS)}")
        base = dict(_DEFAULTS[exp])
        base.update(data)
        conv = {
            "lambdas": lambda v: tuple(str(s) for s in v),
            "orders": lambda v: tuple(tuple(float(a) for a in o) for o in v),
            "alphas": lambda v: tuple(float(a) for a in v),
            "grid": lambda v: tuple(int(m) for m in v),
            "points": lambda v: tuple(tuple(str(c) for c in p) for p in v),
            "scales": lambda v: tuple(float(s) for s in v),
            "series": lambda v: tuple(dict(s) for s in v),
            "outputs": lambda v: tuple(str(s) for s in v),
            "cases": int,
            "seed": int,
            "shift": float,
        }
        return cls(**{k: conv[k](v) if k in conv else v for k, v in base.items()})

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        out = asdict(self)
        for k, v in out.items():
            if isinstance(v, tuple):
                out[k] = [list(x) if isinstance(x, tuple) else x for x in v]
        return out

    def digest(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class CaseRow:
    case_id: str
    inputs: dict
    values: dict
    verdict: str
    status: str = "OK"
    error: str | None = None
    trace: tuple[tuple[float, float], ...] = ()
    trace_label: str = ""
    runtime: float = field(default=0.0, compare=False)

    def flat(self) -> dict:
        out = {"case_id": self.case_id, "status": self.status, "verdict": self.verdict}
        out.update({f"in.{k}": v for k, v in self.inputs.items()})
        out.update({f"out.{k}": v for k, v in self.values.items()})
        if self.error:
            out["error"] = self.error
        return out


@dataclass
class Report:
    experiment: str
    config: ExperimentConfig
    rows: list[CaseRow]
    summary: str
    exploratory: bool = False
    counts: dict = field(default_factory=dict)

    @property
    def provenance(self) -> dict:
        return {"tool_version": __version__, "config_hash": self.config.digest()}

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "exploratory": self.exploratory,
            "summary": self.summary,
            "counts": self.counts,
            "provenance": self.provenance,
            "config": self.config.to_dict(),
            "rows": [r.flat() for r in self.rows],
        }


# ------------------------------------------------------------------- helpers


def _point(spec: Sequence[str]) -> tuple[float, ...]:
    return tuple(parse_real(str(c)) for c in spec)


def _verified(f: GridFunction, res: va.VariationResult) -> tuple[str, float]:
    """Bound kind after re-summing the certificate; EXACT only if it matches."""
    again = va.certificate_value(f, res)
    err = abs(again - res.value) / abs(res.value) if res.value else abs(again)
    if res.bound_kind is va.BoundKind.EXACT and err > CERT_TOLERANCE:
        return "UNVERIFIED", err
    return res.bound_kind.value, err


def _trace_row(case_id: str, inputs: dict, trace: sm.ConvergenceTrace) -> CaseRow:
    return CaseRow(
        case_id,
        inputs,
        {
            "target": trace.target,
            "final_error": trace.errors[-1],
            "max_error": max(trace.errors),
            "first_error": trace.errors[0],
            "degrees": f"{trace.degrees[0]}..{trace.degrees[-1]}",
        },
        trace.verdict.value,
        trace=tuple(zip((float(n) for n in trace.degrees), trace.errors)),
        trace_label=f"{inputs.get('function', '')} {trace.method} at {inputs.get('point', '')}",
    )


def _case_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index)])


# ------------------------------------------------------------ case builders


def _cases_trace(cfg: ExperimentConfig, cesaro: bool) -> list[tuple[str, Callable[[], CaseRow]]]:
    out = []
    order_list = cfg.orders if cesaro else ((),)
    for i, pt in enumerate(cfg.points):
        for j, orders in enumerate(order_list):
            cid = f"p{i:02d}-o{j:02d}"

            def run(pt=pt, orders=orders, cid=cid):
                f = parse_function(cfg.function)
                inputs = {"function": cfg.function, "point": ",".join(pt)}
                if cesaro:
                    inputs["orders"] = ",".join(f"{a:g}" for a in orders)
                    tr = sm.pringsheim_diagnostic(f, _point(pt), "CESARO", orders, cfg.degrees)
                else:
                    tr = sm.pringsheim_diagnostic(f, _point(pt), "PARTIAL_SUM", None, cfg.degrees)
                row = _trace_row(cid, inputs, tr)
                if cfg.experiment == "GOGINAVA_PBV_REGIME":
                    row.values["regime"] = "sum<1" if -sum(orders) < 1 else "sum>=1"
                return row

            out.append((cid, run))
    return out


def _cases_w2(cfg: ExperimentConfig):
    out = []
    for i, pt in enumerate(cfg.points):
        for j, a in enumerate(cfg.alphas):
            cid = f"p{i:02d}-a{j:02d}"

            def run(pt=pt, a=a, cid=cid):
                f = parse_function(cfg.function)
                lam = make_lambda("power", p=1.0 - a)
                tr = sm.pringsheim_diagnostic(f, _point(pt), "CESARO", (-a,), cfg.degrees)
                g = f.with_grid(*cfg.grid)
                var = va.axis_lambda_variation(g, 0, lam, va.Mode.FIXED, va.Method.EXHAUSTIVE)
                kind, err = _verified(g, var)
                row = _trace_row(
                    cid,
                    {"function": cfg.function, "point": ",".join(pt), "alpha": a, "lambda": lam.label},
                    tr,
                )
                row.values.update({"lambda_variation": var.value, "bound_kind": kind, "grid": "x".join(map(str, cfg.grid))})
                return row

            out.append((cid, run))
    return out


def _random_case(cfg: ExperimentConfig, i: int) -> GridFunction:
    return random_grid_function(_case_rng(cfg.seed, i), cfg.grid)


def _cases_oracle(cfg: ExperimentConfig):
    seqs = [parse_lambda(s) for s in cfg.lambdas]

    def run(i):
        f = _random_case(cfg, i)
        checks = le = eq = 0
        worst = 0.0
        for seq in seqs:
            for mode in (va.Mode.FIXED, va.Mode.SHARP):
                ex = va.axis_lambda_variation(f, 0, seq, mode, va.Method.EXHAUSTIVE)
                gr = va.axis_lambda_variation(f, 0, seq, mode, va.Method.GREEDY)
                checks += 1
                le += gr.value <= ex.value * (1 + 1e-12)
                eq += math.isclose(gr.value, ex.value, rel_tol=1e-12)
                for res in (ex, gr):
                    worst = max(worst, _verified(f, res)[1])
        ok = le == checks and worst <= CERT_TOLERANCE
        return CaseRow(
            f"case{i:04d}",
            {"grid": "x".join(map(str, cfg.grid)), "seed": cfg.seed, "index": i},
            {"checks": checks, "greedy_le_exhaustive": le, "equal": eq, "max_certificate_error": worst},
            "PASS" if ok else "FAIL",
        )

    return [(f"case{i:04d}", (lambda i=i: run(i))) for i in range(cfg.cases)]


def _cases_inclusion(cfg: ExperimentConfig):
    seqs = [parse_lambda(s) for s in cfg.lambdas]
    # pointwise-ordered pair: n**0.5 <= n
    weak, strong = make_lambda("power", p=0.5), make_lambda("harmonic")

    def functionals(g, seq):
        yield "LV1", va.axis_lambda_variation(g, 0, seq, "FIXED").value
        yield "L#V1", va.axis_lambda_variation(g, 0, seq, "SHARP").value
        yield "LV2", va.axis_lambda_variation(g, 1, seq, "FIXED").value
        yield "L#V2", va.axis_lambda_variation(g, 1, seq, "SHARP").value
        if g.dim == 2:
            yield "LV12", va.mixed_lambda_variation(g, seq).value

    def run(i):
        f = _random_case(cfg, i)
        counts = {"fixed_le_sharp": [0, 0], "monotone": [0, 0], "homogeneous": [0, 0], "translation": [0, 0]}

        def tally(key, ok):
            counts[key][0] += bool(ok)
            counts[key][1] += 1

        for seq in seqs:
            base = dict(functionals(f, seq))
            for s in ("1", "2"):
                tally("fixed_le_sharp", base[f"LV{s}"] <= base[f"L#V{s}"] * (1 + 1e-12))
            for c in cfg.scales:
                scaled = dict(functionals(f.scaled(c), seq))
                for k, v in base.items():
                    tally("homogeneous", math.isclose(scaled[k], abs(c) * v, rel_tol=1e-9, abs_tol=1e-12))
            shifted = dict(functionals(f.scaled(1.0, cfg.shift), seq))
            for k, v in base.items():
                tally("translation", math.isclose(shifted[k], v, rel_tol=1e-9, abs_tol=1e-12))
        a, b = dict(functionals(f, weak)), dict(functionals(f, strong))
        for k in a:
            tally("monotone", a[k] >= b[k] * (1 - 1e-12))
        values = {f"{k}_ok": v[0] for k, v in counts.items()}
        values.update({f"{k}_total": v[1] for k, v in counts.items()})
        ok = all(v[0] == v[1] for v in counts.values())
        return CaseRow(f"case{i:04d}", {"grid": "x".join(map(str, cfg.grid)), "seed": cfg.seed, "index": i}, values, "PASS" if ok else "FAIL")

    return [(f"case{i:04d}", (lambda i=i: run(i))) for i in range(cfg.cases)]


def power_log_terms(p: float, q: float = 0.0) -> Callable[[np.ndarray], np.ndarray]:
    """Terms ``1 / (n**p log(n + 1)**q)``."""
    return lambda n: 1.0 / (np.asarray(n, float) ** p * np.log1p(np.asarray(n, float)) ** q)


def probe_from_spec(spec: dict):
    """Run one series probe described by a config entry."""
    cond = Condition(spec["condition"])
    kwargs: dict[str, Any] = {}
    seq = parse_lambda(spec["lambda"]) if "lambda" in spec else None
    if cond is Condition.TERMS:
        kwargs["terms"] = power_log_terms(float(spec.get("p", 1.0)), float(spec.get("q", 0.0)))
    if "pair" in spec:
        kwargs["pair"] = young_pair(spec["pair"])
    if "orders" in spec:
        kwargs["orders"] = tuple(float(a) for a in spec["orders"])
    if "axis_order" in spec:
        kwargs["axis_order"] = float(spec["axis_order"])
    if "dim" in spec:
        kwargs["dim"] = int(spec["dim"])
    if "function" in spec:
        f = parse_function(spec["function"], spec.get("grid"))
        kwargs["modulus"] = va.modulus_of_variation(
            f, int(spec.get("axis", 0)), int(spec.get("n_max", f.shape[0] // 2)), bool(spec.get("sharp", False)), va.Method.DYNAMIC
        )
    K = spec.get("K")
    return series_condition_probe(cond, seq, K=None if K is None else int(K), **kwargs)


def _cases_series(cfg: ExperimentConfig):
    out = []
    for i, spec in enumerate(cfg.series):
        cid = f"s{i:02d}"

        def run(spec=spec, cid=cid):
            v = probe_from_spec(spec)
            label = ";".join(f"{k}={spec[k]}" for k in sorted(spec))
            values = {
                "final_partial_sum": v.partial_sums[-1] if v.partial_sums else math.nan,
                "cutoff": v.cutoffs[-1] if v.cutoffs else 0,
                "fit_model": v.evidence.model,
                "fit_residual": v.evidence.residual,
                "sup_type": v.sup_type,
            }
            values.update({f"fit_{k}": x for k, x in v.evidence.params})
            return CaseRow(
                cid,
                {"series": label},
                values,
                v.classification.value,
                trace=tuple(zip((float(n) for n in v.cutoffs), v.partial_sums)),
                trace_label=label,
            )

        out.append((cid, run))
    return out


def build_cases(cfg: ExperimentConfig) -> list[tuple[str, Callable[[], CaseRow]]]:
    exp = cfg.experiment
    if exp == "THEOREM_S_DESK":
        return _cases_trace(cfg, cesaro=False)
    if exp in ("ZHIZHIASHVILI_DESK", "GOGINAVA_PBV_REGIME"):
        return _cases_trace(cfg, cesaro=True)
    if exp == "WATERMAN_W2_1D":
        return _cases_w2(cfg)
    if exp == "ORACLE_EQUIVALENCE":
        return _cases_oracle(cfg)
    if exp == "INCLUSION_SUITE":
        return _cases_inclusion(cfg)
    if exp == "SERIES_PROBE_SUITE":
        return _cases_series(cfg)
    raise ValueError(f"unknown experiment {exp!r}")  # pragma: no cover


def _guarded(cid: str, fn: Callable[[], CaseRow]) -> CaseRow:
    t0 = time.perf_counter()
    try:
        row = fn()
    except (ValueError, ArithmeticError, IndexError) as exc:
        row = CaseRow(cid, {}, {}, "ABORTED", status="ABORTED", error=f"{type(exc).__name__}: {exc}")
    row.runtime = time.perf_counter() - t0
    return row


def _summary(exp: str, rows: list[CaseRow]) -> tuple[str, dict]:
    counts: dict[str, int] = {}
    for r in rows:
        counts[r.verdict] = counts.get(r.verdict, 0) + 1
    if not rows:
        return "SKIPPED", counts
    if len(counts) == 1:
        (verdict,) = counts
        return verdict, counts
    if exp in ("ORACLE_EQUIVALENCE", "INCLUSION_SUITE"):
        return "FAIL", counts
    return "MIXED", counts


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> Report:
    """Run every case of the preset; a refused case becomes an ABORTED row."""
    cases = build_cases(cfg)
    if threads > 1 and len(cases) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda c: _guarded(*c), cases))
    else:
        rows = [_guarded(cid, fn) for cid, fn in cases]
    rows.sort(key=lambda r: r.case_id)
    summary, counts = _summary(cfg.experiment, rows)
    return Report(cfg.experiment, cfg, rows, summary, cfg.experiment in EXPLORATORY, counts)


# ------------------------------------------------------------------ rendering


def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), f".{SIG_DIGITS}g")
    return str(v)


def _rounded(obj):
    if isinstance(obj, dict):
        return {str(k): _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(format(x, f".{SIG_DIGITS}g")) if math.isfinite(x) else str(x)
    return str(obj)


def render_csv(report: Report) -> str:
    flat = [r.flat() for r in report.rows]
    keys = sorted({k for row in flat for k in row} - {"case_id"})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["case_id", *keys])
    for row in flat:
        w.writerow([row["case_id"], *(_fmt(row[k]) if k in row else "" for k in keys)])
    return buf.getvalue()


def render_json(report: Report) -> str:
    return json.dumps(_rounded(report.to_dict()), sort_keys=True, indent=2) + "\n"


def render_plot_data(report: Report) -> str:
    """Header line, then two-column blocks, one per traced case, separated by
    blank lines."""
    tag = " EXPLORATORY" if report.exploratory else ""
    blocks = [f"# {report.experiment}{tag} summary={report.summary}"]
    for r in report.rows:
        if not r.trace:
            continue
        lines = [f"# {r.case_id} {r.trace_label}".rstrip()]
        lines += [f"{_fmt(x)} {_fmt(y)}" for x, y in r.trace]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


RENDERERS = {"csv": render_csv, "json": render_json, "plot": render_plot_data}
SUFFIX = {"csv": ".csv", "json": ".json", "plot": ".dat"}


def render_report(report: Report, out_dir: str | Path, formats: Sequence[str] = ("csv", "json", "plot")) -> list[Path]:
    """Write the report in each format; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for fmt in formats:
        if fmt not in RENDERERS:
            raise ValueError(f"unknown format {fmt!r}")
        path = out / f"{report.experiment.lower()}{SUFFIX[fmt]}"
        path.write_text(RENDERERS[fmt](report))
        paths.append(path)
    return paths
