"""Command-line surface: stats, corr, frontier, gpd, check-exchangeability, synth.

Exit codes: 0 on success (including partial success with per-row warnings),
1 on usage or input errors, 2 when every requested computation failed. All
per-asset and per-target errors are carried in-band in the output so one
bad series never aborts a multi-asset report. Every output starts with a
metadata record stating the conventions (percent units, ceil(np) quantile,
max-rank ties, strict-below tails).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import synth
from .dependence import check_exchangeability, dependence_matrices
from .errors import PanelError, TailGiniError
from .estimators import gmd as gmd_estimator
from .estimators import tail_stats
from .frontier import analytic_frontier, build_risk_model
from .gpd import fit_left_tail
from .localsearch import SearchOptions, distortion_rate, numeric_frontier
from .panel import ReturnPanel, load_returns, save_returns

CONVENTIONS = "units=percent quantile=ceil(np) ties=max-rank tail=strict-below"


class _Parser(argparse.ArgumentParser):
    # usage problems must exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="tailgini", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="panel CSV (date,asset,... header)")
            p.add_argument("--mode", choices=("returns", "simple", "log"), default="returns",
                           help="treat the input as returns, or as prices to convert")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", default=None, help="output path (stdout when omitted)")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("stats", help="per-asset tail risk statistics")
    common(p)
    p.add_argument("--prudence", type=float, action="append", default=None)

    p = sub.add_parser("corr", help="Pearson / Gini / tail-Gini correlation matrices")
    common(p)
    p.add_argument("--prudence", type=float, action="append", default=None)

    p = sub.add_parser("check-exchangeability", help="tail symmetry gaps per asset pair")
    common(p)
    p.add_argument("--prudence", type=float, action="append", default=None)
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("frontier", help="efficient frontier at given mean targets")
    common(p)
    p.add_argument("--prudence", type=float, action="append", default=None)
    p.add_argument("--objective", action="append", choices=("variance", "gmd", "tail-gini", "tail-sd"),
                   default=None, help="repeatable; two objectives add distortion columns")
    p.add_argument("--targets", required=True,
                   help="comma list '0.1,0.2' or range 'start:stop:step' (inclusive)")
    p.add_argument("--method", choices=("numeric", "analytic", "both"), default="numeric")
    p.add_argument("--long-only", action="store_true")
    p.add_argument("--fixed-step", action="store_true",
                   help="keep the step size fixed and stop on the objective-change threshold")
    p.add_argument("--ridge", action="store_true",
                   help="repair a non-positive-definite risk matrix by a small diagonal ridge")

    p = sub.add_parser("gpd", help="generalized Pareto left-tail fit per asset")
    common(p)
    p.add_argument("--prudence", type=float, action="append", default=None)

    p = sub.add_parser("synth", help="write a synthetic panel to CSV")
    common(p, needs_input=False)
    p.add_argument("--kind", choices=("gaussian", "comonotone", "antimonotone",
                                      "five-point", "market"), default="gaussian")
    p.add_argument("-n", "--rows", type=int, default=1000)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--rho", type=float, default=0.3)
    return parser


def _levels(args) -> list[float]:
    levels = args.prudence if args.prudence else [0.10]
    for p in levels:
        if not 0.0 < p < 1.0:
            raise PanelError(f"prudence level must be in (0,1), got {p}")
    return levels


def _parse_targets(spec: str) -> list[float]:
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise PanelError(f"range spec must be start:stop:step, got {spec!r}")
        start, stop, step = (float(s) for s in parts)
        if step <= 0:
            raise PanelError("range step must resolve to an increasing grid")
        return [float(t) for t in np.arange(start, stop + 0.5 * step, step)]
    try:
        targets = [float(s) for s in spec.split(",") if s.strip()]
    except ValueError:
        raise PanelError(f"cannot parse targets {spec!r}") from None
    if not targets:
        raise PanelError("empty target list")
    return sorted(targets)


def _emit(text: str, output) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return "" if np.isnan(v) else repr(v)
    return str(v)


def _csv_table(rows: list[dict], columns: list[str], meta: dict) -> str:
    buf = io.StringIO()
    buf.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
    writer = csv.writer(buf)
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def _json_doc(payload: dict, meta: dict) -> str:
    return json.dumps({"meta": meta, **payload}, indent=2, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not serializable: {type(obj)!r}")


def _meta(**extra) -> dict:
    meta = {"conventions": CONVENTIONS}
    meta.update(extra)
    return meta


def _cmd_stats(args) -> int:
    panel = load_returns(args.input, args.mode)
    rows, failures = [], 0
    for level in _levels(args):
        for asset in panel.assets:
            col = panel.column(asset)
            row = {"asset": asset, "prudence": level,
                   "mean": float(col.mean()), "std": float(col.std(ddof=1)),
                   "gmd": gmd_estimator(col)}
            try:
                st = tail_stats(col, level, asset)
                row.update(var=st.var, tce=st.tce, tv=st.tv, sd=st.sd,
                           tail_gini=st.tail_gini, tail_count=st.tail_count)
            except TailGiniError as exc:
                row["error"] = str(exc)
                failures += 1
                print(f"warning: {asset} at p={level:g}: {exc}", file=sys.stderr)
            rows.append(row)
    columns = ["asset", "prudence", "mean", "std", "var", "tce", "tv", "sd",
               "gmd", "tail_gini", "tail_count", "error"]
    meta = _meta(command="stats")
    if args.format == "json":
        _emit(_json_doc({"stats": rows}, meta), args.output)
    else:
        _emit(_csv_table(rows, columns, meta), args.output)
    return 2 if rows and failures == len(rows) else 0


def _matrix_rows(name: str, level, assets, matrix) -> list[dict]:
    rows = []
    for i, a in enumerate(assets):
        row = {"matrix": name, "prudence": level, "asset": a}
        row.update({b: float(matrix[i, j]) for j, b in enumerate(assets)})
        rows.append(row)
    return rows


def _cmd_corr(args) -> int:
    panel = load_returns(args.input, args.mode)
    blocks, rows, failures = {}, [], 0
    levels = _levels(args)
    for level in levels:
        try:
            dm = dependence_matrices(panel, level)
        except TailGiniError as exc:
            failures += 1
            print(f"warning: p={level:g}: {exc}", file=sys.stderr)
            rows.append({"matrix": "error", "prudence": level, "asset": str(exc)})
            continue
        blocks[str(level)] = {
            "assets": dm.assets,
            "pearson": dm.pearson,
            "gini": dm.gini,
            "tail_gini": dm.tail_gini,
            "asymmetry": dm.asymmetry,
        }
        rows += _matrix_rows("pearson", level, dm.assets, dm.pearson)
        rows += _matrix_rows("gini", level, dm.assets, dm.gini)
        rows += _matrix_rows("tail_gini", level, dm.assets, dm.tail_gini)
        rows.append({"matrix": "asymmetry", "prudence": level, "asset": "",
                     dm.assets[0]: dm.asymmetry})
    meta = _meta(command="corr", orientation="row=first-index")
    if args.format == "json":
        _emit(_json_doc({"levels": blocks}, meta), args.output)
    else:
        columns = ["matrix", "prudence", "asset", *panel.assets]
        _emit(_csv_table(rows, columns, meta), args.output)
    return 2 if failures == len(levels) else 0


def _cmd_exch(args) -> int:
    panel = load_returns(args.input, args.mode)
    levels = _levels(args)
    reports = check_exchangeability(panel, levels, args.tol)
    rows = []
    for rep in reports:
        for level, gap, ok in zip(rep.levels, rep.gaps, rep.exchangeable):
            rows.append({"asset_i": rep.assets[0], "asset_j": rep.assets[1],
                         "prudence": level, "gap": gap, "exchangeable": ok,
                         "exchangeable_up_to": rep.exchangeable_up_to})
    meta = _meta(command="check-exchangeability", tol=args.tol)
    if args.format == "json":
        payload = [
            {"pair": rep.assets, "levels": rep.levels, "gaps": rep.gaps,
             "exchangeable": rep.exchangeable, "exchangeable_up_to": rep.exchangeable_up_to}
            for rep in reports
        ]
        _emit(_json_doc({"pairs": payload}, meta), args.output)
    else:
        columns = ["asset_i", "asset_j", "prudence", "gap", "exchangeable",
                   "exchangeable_up_to"]
        _emit(_csv_table(rows, columns, meta), args.output)
    return 0


def _frontier_rows(panel, objective, level, targets, args) -> list[dict]:
    rows = []
    if args.method in ("analytic", "both"):
        kind = {"variance": "variance", "tail-gini": "tail-gini", "tail-sd": "tail-variance"}.get(objective)
        if kind is None:
            raise PanelError(f"objective {objective!r} has no analytic risk model")
        model = build_risk_model(panel, level, kind, ridge=args.ridge)
        points, _ = analytic_frontier(model, targets)
        for pt in points:
            row = {"objective": objective, "method": "analytic", "target": pt.target,
                   "risk": pt.risk, "lambda": pt.lam, "gamma": pt.gam}
            row.update({f"w_{a}": float(v) for a, v in zip(panel.assets, pt.weights)})
            rows.append(row)
    if args.method in ("numeric", "both"):
        options = SearchOptions(objective=objective, prudence=level,
                                long_only=args.long_only, fixed_step=args.fixed_step)
        for pt in numeric_frontier(panel, targets, options):
            row = {"objective": objective, "method": "numeric", "target": pt.target,
                   "risk": pt.risk, "iterations": pt.iterations,
                   "converged": pt.converged, "error": pt.error}
            row.update({f"w_{a}": float(v) for a, v in zip(panel.assets, pt.weights)})
            rows.append(row)
    return rows


def _cmd_frontier(args) -> int:
    panel = load_returns(args.input, args.mode)
    objectives = args.objective if args.objective else ["tail-gini"]
    if len(objectives) > 2:
        raise PanelError("at most two objectives are supported")
    if args.long_only and args.method != "numeric":
        raise PanelError("long-only constraints are handled by the numeric method only")
    level = _levels(args)[0]
    targets = _parse_targets(args.targets)

    rows = []
    for objective in objectives:
        rows += _frontier_rows(panel, objective, level, targets, args)

    if len(objectives) == 2:
        ref = {(r["method"], r["target"]): r for r in rows if r["objective"] == objectives[0]}
        for row in rows:
            if row["objective"] != objectives[1]:
                continue
            mate = ref.get((row["method"], row["target"]))
            if mate is None or row.get("error") or mate.get("error"):
                continue
            ref_w = np.array([mate[f"w_{a}"] for a in panel.assets])
            alt_w = np.array([row[f"w_{a}"] for a in panel.assets])
            rates = distortion_rate(ref_w, alt_w)
            row.update({f"dist_{a}": float(r) for a, r in zip(panel.assets, rates)})

    failures = sum(1 for r in rows if r.get("error"))
    columns = (["objective", "method", "target", "risk"]
               + [f"w_{a}" for a in panel.assets]
               + ["lambda", "gamma", "iterations", "converged", "error"])
    if len(objectives) == 2:
        columns += [f"dist_{a}" for a in panel.assets]
    meta = _meta(command="frontier", prudence=level, long_only=str(args.long_only).lower())
    for row in rows:
        if row.get("error"):
            print(f"warning: target {row['target']:g} ({row['objective']}): {row['error']}",
                  file=sys.stderr)
    if args.format == "json":
        _emit(_json_doc({"frontier": rows}, meta), args.output)
    else:
        _emit(_csv_table(rows, columns, meta), args.output)
    return 2 if rows and failures == len(rows) else 0


def _cmd_gpd(args) -> int:
    panel = load_returns(args.input, args.mode)
    levels = _levels(args)
    report, failures, total = {}, 0, 0
    for level in levels:
        block = {}
        for asset in panel.assets:
            total += 1
            try:
                block[asset] = fit_left_tail(panel.column(asset), level).to_dict()
            except TailGiniError as exc:
                block[asset] = {"error": str(exc)}
                failures += 1
                print(f"warning: {asset} at p={level:g}: {exc}", file=sys.stderr)
        report[str(level)] = block
    _emit(_json_doc({"gpd": report}, _meta(command="gpd")), args.output)
    return 2 if total and failures == total else 0


def _cmd_synth(args) -> int:
    n, seed = args.rows, args.seed
    if args.kind == "gaussian":
        d = args.dim
        mu = np.linspace(0.01, 0.2, d)
        cov = np.full((d, d), args.rho) + (1.0 - args.rho) * np.eye(d)
        panel = synth.mvnormal_panel(mu, cov, n, seed)
    elif args.kind == "comonotone":
        panel = synth.monotone_pair(lambda u: u**2, lambda u: np.log(u / (1 - u)), n, seed)
    elif args.kind == "antimonotone":
        panel = synth.monotone_pair(lambda u: -1 + 2 * u, lambda u: 5 + 3 * u, n, seed, anti=True)
    elif args.kind == "five-point":
        panel = synth.five_point_panel()
    else:
        panel = synth.mixed_tail_market(n, seed)
    if args.output:
        save_returns(panel, args.output)
    else:
        buf = io.StringIO()
        buf.write(f"# {CONVENTIONS}\n")
        writer = csv.writer(buf)
        writer.writerow(["date", *panel.assets])
        for token, row in zip(panel.dates, panel.values):
            writer.writerow([token, *(repr(float(v)) for v in row)])
        sys.stdout.write(buf.getvalue())
    return 0


_HANDLERS = {
    "stats": _cmd_stats,
    "corr": _cmd_corr,
    "check-exchangeability": _cmd_exch,
    "frontier": _cmd_frontier,
    "gpd": _cmd_gpd,
    "synth": _cmd_synth,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except PanelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except TailGiniError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
