"""Command line entry point: ``genvar <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import harness
from . import summability as sm
from . import variation as va
from .gridfn import parse_function, parse_real
from .lambda_seq import parse_lambda

_FUNCTIONALS = (
    "fixed1", "fixed2", "fixed3", "sharp1", "sharp2", "sharp3",
    "mixed", "partial", "total", "star",
    "phi1", "phi2", "phi3", "phisharp1", "phisharp2", "phisharp3",
    "modulus1", "modulus2", "modulus3", "modsharp1", "modsharp2", "modsharp3",
)  # fmt: skip


def _grid(text: str | None):
    if text is None:
        return None
    return tuple(int(s) for s in text.lower().split("x"))


def _floats(text: str) -> tuple[float, ...]:
    return tuple(parse_real(s) for s in text.split(",") if s.strip())


def _out_path(args, name: str | None, default: str) -> Path:
    path = Path(name or default)
    if not path.is_absolute():
        path = Path(args.out_dir) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(harness._rounded(payload), sort_keys=True, indent=2) + "\n")


def cmd_variation(args) -> int:
    f = parse_function(args.fn, _grid(args.grid))
    name = args.functional
    method = va.Method(args.method.upper())
    seqs = [parse_lambda(s) for s in args.lambda_.split(";")]
    seq = seqs[0] if len(seqs) == 1 else seqs
    axis = int(name[-1]) - 1 if name[-1].isdigit() else 0
    if name.startswith(("fixed", "sharp")):
        mode = va.Mode.FIXED if name.startswith("fixed") else va.Mode.SHARP
        res = va.axis_lambda_variation(f, axis, seqs[0], mode, method)
    elif name == "mixed":
        res = va.mixed_lambda_variation(f, seq, method, axes=args.axes and [int(a) - 1 for a in args.axes.split(",")])
    elif name in ("partial", "total"):
        res = va.composite_variation(f, seq, name.upper(), method)
    elif name == "star":
        res = va.star_variation(f, seqs[0], method)
    elif name.startswith("phi"):
        mode = va.Mode.SHARP if name.startswith("phisharp") else va.Mode.FIXED
        res = va.phi_variation(f, args.phi, axis, mode, method)
    else:
        table = va.modulus_of_variation(f, axis, args.n_max, name.startswith("modsharp"), method)
        payload = {
            "function": args.fn,
            "grid": list(f.shape),
            "functional": name,
            "method": table.method.value,
            "bound_kind": table.bound_kind.value,
            "sharp": table.sharp,
            "values": [float(v) for v in table.values],
        }
        _write_json(_out_path(args, args.out, "modulus.json"), payload)
        print(" ".join(f"{v:.12g}" for v in table.values))
        return 0
    kind, err = harness._verified(f, res)
    payload = res.to_dict()
    payload.update({"function": args.fn, "grid": list(f.shape), "bound_kind": kind, "certificate_error": err})
    _write_json(_out_path(args, args.out, "result.json"), payload)
    print(f"{res.functional_id} = {res.value:.12g} ({res.method.value}, {kind})")
    return 0


def cmd_fourier(args) -> int:
    f = parse_function(args.fn, _grid(args.grid))
    table = sm.fourier_coefficients(f, int(args.degree), args.source and args.source.upper())
    path = _out_path(args, args.out, "coefficients.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*(f"n{k + 1}" for k in range(f.dim)), "re", "im"])
        for idx in np.ndindex(*table.values.shape):
            c = table.values[idx]
            freq = [i - N for i, N in zip(idx, table.degrees)]
            w.writerow([*freq, harness._fmt(c.real), harness._fmt(c.imag)])
    if table.warn:
        print(f"WARN: {table.warn}", file=sys.stderr)
    print(f"{table.values.size} coefficients ({table.source.value}) -> {path}")
    return 0


def cmd_cesaro(args) -> int:
    f = parse_function(args.fn, _grid(args.grid))
    point = _floats(args.point)
    if args.orders is None:
        trace = sm.pringsheim_diagnostic(f, point, "PARTIAL_SUM", None, args.degrees, args.lattice)
    else:
        trace = sm.pringsheim_diagnostic(f, point, "CESARO", _floats(args.orders), args.degrees, args.lattice)
    path = _out_path(args, args.out, "trace.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N", "value", "abs_error", "verdict"])
        for n, v, e, verdict in trace.rows():
            w.writerow([n, harness._fmt(v), harness._fmt(e), verdict])
    print(f"{trace.method} at {args.point}: target {trace.target:.12g}, {trace.verdict.value}")
    return 0


def cmd_probe(args) -> int:
    spec: dict = {"condition": args.condition.upper()}
    for key in ("lambda_", "pair", "fn"):
        val = getattr(args, key)
        if val is not None:
            spec[{"lambda_": "lambda", "fn": "function"}.get(key, key)] = val
    if args.p is not None:
        spec["p"] = args.p
    if args.q is not None:
        spec["q"] = args.q
    if args.orders:
        spec["orders"] = list(_floats(args.orders))
    if args.axis_order is not None:
        spec["axis_order"] = args.axis_order
    if args.grid:
        spec["grid"] = list(_grid(args.grid))
    if args.n_max:
        spec["n_max"] = args.n_max
    if args.sharp:
        spec["sharp"] = True
    if args.K is not None:
        spec["K"] = args.K
    v = harness.probe_from_spec(spec)
    payload = {
        "spec": spec,
        "classification": v.classification.value,
        "cutoffs": list(v.cutoffs),
        "partial_sums": list(v.partial_sums),
        "fit": {"model": v.evidence.model, "residual": v.evidence.residual, **dict(v.evidence.params)},
        "sup_type": v.sup_type,
    }
    _write_json(_out_path(args, args.out, "probe.json"), payload)
    last = f"{v.partial_sums[-1]:.12g}" if v.partial_sums else "n/a"
    print(f"{v.condition_id.value}: {v.classification.value} (last partial sum {last}, fit {v.evidence.model})")
    return 0


def cmd_experiment(args) -> int:
    if args.config:
        cfg = harness.ExperimentConfig.from_json(args.config)
        if args.seed is not None:
            cfg = harness.ExperimentConfig.from_dict({**cfg.to_dict(), "seed": args.seed})
    elif args.name:
        cfg = harness.ExperimentConfig.preset(args.name.upper(), seed=args.seed, cases=args.cases)
    else:
        raise SystemExit("experiment needs --config or --name")
    report = harness.run_experiment(cfg, threads=args.threads)
    formats = args.format.split(",") if args.format else list(cfg.outputs)
    paths = harness.render_report(report, args.out_dir, formats)
    tag = " [EXPLORATORY]" if report.exploratory else ""
    print(f"{report.experiment}{tag}: {report.summary} ({len(report.rows)} cases) -> {', '.join(map(str, paths))}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads")
    common.add_argument("--out-dir", default=argparse.SUPPRESS, help="directory for outputs")

    p = argparse.ArgumentParser(prog="genvar", description=__doc__, parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("variation", parents=[common], help="evaluate a variation functional")
    v.add_argument("--fn", required=True, help="catalog spec, e.g. sign_diag or a samples CSV")
    v.add_argument("--grid", help="grid sizes, e.g. 8x8")
    v.add_argument("--lambda", dest="lambda_", default="harmonic", help="sequence spec; ';' separates per-axis specs")
    v.add_argument("--functional", choices=_FUNCTIONALS, default="fixed1")
    v.add_argument("--method", choices=["exhaustive", "greedy", "dynamic"], default="exhaustive")
    v.add_argument("--phi", default="power:p=2", help="Phi for phi functionals")
    v.add_argument("--n-max", type=int, default=4, help="largest n for moduli")
    v.add_argument("--axes", help="index set for mixed, e.g. 1,2")
    v.add_argument("--out")
    v.set_defaults(func=cmd_variation)

    f = sub.add_parser("fourier", parents=[common], help="coefficient table")
    f.add_argument("--fn", required=True)
    f.add_argument("--grid")
    f.add_argument("--degree", type=int, default=4)
    f.add_argument("--source", choices=["analytic", "quadrature"])
    f.add_argument("--out")
    f.set_defaults(func=cmd_fourier)

    c = sub.add_parser("cesaro", parents=[common], help="convergence trace of partial sums or Cesaro means")
    c.add_argument("--fn", required=True)
    c.add_argument("--grid")
    c.add_argument("--orders", help="comma-separated orders; omit for partial sums")
    c.add_argument("--point", required=True, help="e.g. pi,pi")
    c.add_argument("--degrees", default="16:512:dyadic")
    c.add_argument("--lattice", action="store_true", help="sup over the degree lattice")
    c.add_argument("--out")
    c.set_defaults(func=cmd_cesaro)

    s = sub.add_parser("probe-series", parents=[common], help="dyadic probe of a hypothesis series")
    s.add_argument("--condition", required=True)
    s.add_argument("--lambda", dest="lambda_")
    s.add_argument("--pair", help="Young pair, e.g. power:p=2 or xlogx")
    s.add_argument("--p", type=float, help="TERMS: 1 / (n**p log(n+1)**q)")
    s.add_argument("--q", type=float)
    s.add_argument("--orders")
    s.add_argument("--axis-order", type=float)
    s.add_argument("--fn", help="function whose modulus of variation feeds the series")
    s.add_argument("--grid")
    s.add_argument("--n-max", type=int)
    s.add_argument("--sharp", action="store_true")
    s.add_argument("--K", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_probe)

    e = sub.add_parser("experiment", parents=[common], help="run a preset or a JSON config")
    e.add_argument("--config", help="JSON file with ExperimentConfig fields")
    e.add_argument("--name", help=f"preset: {', '.join(harness.EXPERIMENTS)}")
    e.add_argument("--cases", type=int)
    e.add_argument("--format", help="comma-separated subset of csv,json,plot")
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for key, default in (("seed", None), ("threads", 1), ("out_dir", ".")):
        if not hasattr(args, key):
            setattr(args, key, default)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError) as exc:
        print(f"genvar: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
