"""Command-line surface: verification suites, reports, parameter scans.

Subcommands:
  verify  run the identity and reconstruction suites on a chart; exit 0
          iff every residual is below tolerance, 1 on residual failure,
          2 on bad parameters.
  report  topological and decomposition report for a chart (JSON).
  scan    sweep the S^4 family parameter k and emit one row per value.
  probe   gauge-equivalence probe of the +-H pair (JSON).

Floats are emitted with 17 significant digits and reductions use a fixed
summation order, so identical configurations produce identical bytes.
The environment variable SKEW_THREADS caps scan parallelism.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import charts
from .charts import ChartError, InvariantForm
from .connections import identity_suite
from .decomposition import decompose
from .instanton import gauge_equivalence_probe, killing_residual, yang_mills_density_check
from .moduli import acs_radial, nijenhuis_norm
from .topology import hitchin_thorpe_report
from .weyl import torsion_weyl_roundtrip

SCHEMA = 1


def _fmt(x) -> str:
    x = float(x)
    if not np.isfinite(x):
        return '"' + repr(x) + '"'
    return format(x, ".17g")


def _to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_to_jsonable(v) for v in obj.tolist()]
    return obj


def _dump_json(obj, indent: int = 0) -> str:
    """Deterministic JSON with fixed float formatting."""
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f'{pad}  "{k}": {_dump_json(v, indent + 2)}' for k, v in obj.items())
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, list):
        return "[" + ", ".join(_dump_json(v, indent) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, float):
        return _fmt(obj)
    if isinstance(obj, int):
        return str(obj)
    return '"' + str(obj).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _build_chart(args):
    """(chart, torsion 3-form) for the named chart type."""
    t = args.chart
    if t == "bonneau":
        return charts.bonneau_chart(args.k)
    if t == "round":
        return charts.round_s4_chart(), InvariantForm.zero(3)
    if t == "product":
        ch = charts.product_chart(args.b0, args.L)
        return ch, charts.flat_torsion(ch)
    if t == "flat":
        return charts.flat_torus_chart(args.L), InvariantForm.zero(3)
    if t == "random":
        return charts.random_chart(args.seed), charts.random_torsion(args.seed)
    raise ChartError(f"unknown chart {t!r}")


def cmd_verify(args) -> int:
    chart, H = _build_chart(args)
    res = identity_suite(chart, H, nodes=args.grid)
    rep = decompose(chart, H, nodes=args.grid)
    res["reconstruction"] = rep.reconstruction_residual
    res["block_isometry"] = rep.block_residual
    failing = [k for k, v in res.items()
               if not k.endswith("_sign") and isinstance(v, float) and v > args.tol]
    payload = {
        "schema": SCHEMA,
        "command": "verify",
        "chart": chart.to_dict(),
        "tolerance": args.tol,
        "residuals": _to_jsonable(res),
        "failing": failing,
        "ok": not failing,
    }
    _emit(_dump_json(payload) + "\n", args.out)
    return 0 if not failing else 1


def cmd_report(args) -> int:
    chart, H = _build_chart(args)
    n = min(args.grid, 128)
    top = hitchin_thorpe_report(chart, H, nodes=args.grid)
    rep = decompose(chart, H, nodes=n)
    ym = yang_mills_density_check(chart, H, nodes=n)
    kil = killing_residual(chart, H, nodes=n)
    rt = torsion_weyl_roundtrip(chart, H, nodes=n)

    from .connections import levi_civita, with_skew_torsion
    from .instanton import induced_lambda_plus, self_duality_residual
    pt = chart.at(chart.sample_grid(n))
    lc = levi_civita(pt)
    sd = {tag: self_duality_residual(
        induced_lambda_plus(with_skew_torsion(lc, sign * H.at(pt))))
        for sign, tag in ((+1.0, "plus"), (-1.0, "minus"))}
    payload = {
        "schema": SCHEMA,
        "command": "report",
        "chart": chart.to_dict(),
        "topology": _to_jsonable(top.to_dict()),
        "decomposition": _to_jsonable(rep.summary()),
        "yang_mills": _to_jsonable({k: v for k, v in ym.items() if k != "density"}),
        "self_duality": _to_jsonable(sd),
        "killing": _to_jsonable(kil),
        "weyl_roundtrip": _to_jsonable(rt),
        "nijenhuis_radial": nijenhuis_norm(chart, acs_radial(), nodes=64),
    }
    _emit(_dump_json(payload) + "\n", args.out)
    return 0


def _scan_row(k: float, grid: int):
    try:
        chart, H = charts.bonneau_chart(k)
    except ChartError as exc:
        return {"k": k, "admissible": False, "reason": str(exc)}
    rep = decompose(chart, H, nodes=64)
    top = hitchin_thorpe_report(chart, H, nodes=grid)
    probe = gauge_equivalence_probe(chart, H, nodes=64)
    return {
        "k": k,
        "admissible": True,
        "einstein_residual": rep.einstein_residual,
        "reconstruction_residual": rep.reconstruction_residual,
        "chi": top.chi,
        "tau": top.tau,
        "margin": top.inequality_margin,
        "p1_lambda_plus": top.p1_lambda_plus,
        "probe_verdict": probe.verdict,
    }


def cmd_scan(args) -> int:
    ks = [args.k_min + i * args.k_step for i in
          range(int(round((args.k_max - args.k_min) / args.k_step)) + 1)]
    workers = os.environ.get("SKEW_THREADS")
    workers = max(1, int(workers)) if workers else min(8, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as ex:
        rows = list(ex.map(lambda k: _scan_row(k, args.grid), ks))
    rows.sort(key=lambda r: r["k"])

    if args.format == "json":
        payload = {"schema": SCHEMA, "command": "scan", "rows": _to_jsonable(rows)}
        _emit(_dump_json(payload) + "\n", args.out)
    else:
        fields = ["k", "admissible", "einstein_residual", "reconstruction_residual",
                  "chi", "tau", "margin", "p1_lambda_plus", "probe_verdict", "reason"]
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({f: (_fmt(v) if isinstance(v, float) else v)
                        for f, v in r.items()})
        _emit(buf.getvalue(), args.out)
    if not any(r["admissible"] for r in rows):
        sys.stderr.write("warning: no admissible k in the scanned range\n")
    return 0


def cmd_probe(args) -> int:
    chart, H = _build_chart(args)
    rep = gauge_equivalence_probe(chart, H, nodes=args.grid)
    payload = {
        "schema": SCHEMA,
        "command": "probe",
        "chart": chart.to_dict(),
        "result": _to_jsonable(rep.summary()),
        "singular_values": _to_jsonable(rep.singular_values),
    }
    _emit(_dump_json(payload) + "\n", args.out)
    return 0


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="skewtorsion",
        description="verification and reports for skew-torsion geometry on "
                    "cohomogeneity-one 4-manifolds")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, chart=True):
        if chart:
            sp.add_argument("--chart", required=True,
                            choices=["bonneau", "round", "product", "flat", "random"])
            sp.add_argument("--k", type=float, default=0.0)
            sp.add_argument("--b0", type=float, default=1.0)
            sp.add_argument("--L", type=float, default=1.0)
            sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--grid", type=int, default=256)
        sp.add_argument("--tol", type=float, default=1e-9)
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=["json", "csv"], default="json")

    common(sub.add_parser("verify", help="run the identity suites"))
    common(sub.add_parser("report", help="topology and decomposition report"))
    sp = sub.add_parser("scan", help="sweep the S^4 family parameter")
    sp.add_argument("--k-min", type=float, default=-1.0)
    sp.add_argument("--k-max", type=float, default=1.0)
    sp.add_argument("--k-step", type=float, default=0.25)
    common(sp, chart=False)
    common(sub.add_parser("probe", help="gauge-equivalence probe for +-H"))
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.grid < 16:
        sys.stderr.write("error: --grid must be at least 16\n")
        return 2
    if args.tol <= 0:
        sys.stderr.write("error: --tol must be positive\n")
        return 2
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "report":
            return cmd_report(args)
        if args.command == "scan":
            return cmd_scan(args)
        if args.command == "probe":
            return cmd_probe(args)
    except ChartError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
