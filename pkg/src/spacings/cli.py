"""Command-line calculator for ordered-spacing probabilities.

Examples::

    spacings sf --n 2 --k 3 --x 1/2
    spacings pvalue --n 2 --ell 1 --x 0.9 --format json
    spacings quantile --n 10 --k 11 --p 0.05
    spacings sf --n 5 --k 6 --grid 0:1/2:1/10 --format csv
    spacings simulate --n 4 --samples 100000 --seed 7 --rep expratio
    spacings verify --nmax 6 --samples 200000 --seed 1

Exit status: 0 success, 1 verification failure or non-convergence, 2 usage
error, 3 when ``--float --strict`` was requested and the cancellation guard
forced the exact fallback.  Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from . import exact, geometry, moments, simulate
from .moments import ConvergenceError
from .scalar import Scalar, SpacingsError, format_decimal, format_rational, to_fraction

CSV_COLUMNS = ["command", "n", "k", "m", "ell", "x", "p", "result", "decimal", "mode", "error_bound", "condition"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_FALLBACK = 0, 1, 2, 3


class UsageError(SpacingsError):
    pass


@dataclass
class OutputRecord:
    query: dict
    exact: Fraction | None
    decimal: str
    mode: str
    diagnostics: dict = field(default_factory=dict)

    @classmethod
    def from_scalar(cls, query: dict, s: Scalar, digits: int) -> "OutputRecord":
        diag = {}
        if not s.is_exact:
            diag["error_bound"] = s.error
            if s.condition is not None:
                diag["condition"] = s.condition
        # A fallback still carries the exact value; report it losslessly.
        ex = s.exact if s.fallback or s.is_exact else None
        return cls(query, ex, format_decimal(s.exact if ex is not None else s.value, digits), s.mode, diag)

    def to_dict(self) -> dict:
        result: dict[str, Any] = {"decimal": self.decimal}
        if self.exact is not None:
            result["exact"] = format_rational(self.exact)
        d = {"query": self.query, "result": result, "mode": self.mode}
        if self.diagnostics:
            d["diagnostics"] = self.diagnostics
        return d

    def csv_row(self) -> list:
        q = self.query
        return [
            q.get("command", ""),
            q.get("n", ""),
            q.get("k", ""),
            q.get("m", ""),
            q.get("ell", ""),
            q.get("x", ""),
            q.get("p", ""),
            "" if self.exact is None else format_rational(self.exact),
            self.decimal,
            self.mode,
            self.diagnostics.get("error_bound", ""),
            self.diagnostics.get("condition", ""),
        ]


def parse_grid(text: str) -> list[Fraction]:
    """``"a:b:step"`` -> [a, a+step, ...] up to and including b, as rationals."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must look like a:b:step, got {text!r}")
    a, b, step = (to_fraction(p) for p in parts)
    if step <= 0 or b < a:
        raise UsageError("grid needs a <= b and a positive step")
    count = int((b - a) / step)
    if count > 100_000:
        raise UsageError("grid has more than 100000 points")
    return [a + i * step for i in range(count + 1)]


def _thresholds(args) -> list:
    if args.grid is not None:
        values = parse_grid(args.grid)
        return [float(v) for v in values] if args.float else values
    if args.x is None:
        raise UsageError("one of --x or --grid is required")
    if args.float:
        return [float(to_fraction(args.x))]
    return [to_fraction(args.x)]


def _x_text(x) -> str:
    return format_rational(x) if isinstance(x, Fraction) else repr(x)


def _eval_kwargs(args) -> dict:
    return {"cond_threshold": args.cond_threshold}


def _point_records(args) -> list[OutputRecord]:
    n = args.n
    records = []
    for x in _thresholds(args):
        kw = _eval_kwargs(args)
        if args.command in ("sf", "cdf"):
            q = {"command": args.command, "n": n, "k": args.k, "ell": n + 2 - args.k, "x": _x_text(x)}
            fn = exact.survival if args.command == "sf" else exact.cdf
            s = fn(n, args.k, x, **kw)
        elif args.command == "band":
            q = {"command": "band", "n": n, "m": args.m, "k": n + 1 - args.m, "x": _x_text(x)}
            s = exact.band_probability(n, args.m, x, **kw)
        elif args.command == "maxsf":
            q = {"command": "maxsf", "n": n, "k": n + 1, "ell": 1, "x": _x_text(x)}
            s = exact.max_gap_survival(n, x, **kw)
        else:
            q = {"command": "pvalue", "n": n, "ell": args.ell, "k": n + 2 - args.ell, "x": _x_text(x)}
            s = exact.tail_pvalue(n, args.ell, x, **kw)
        records.append(OutputRecord.from_scalar(q, s, args.digits))
    return records


def _mean_records(args) -> list[OutputRecord]:
    s = moments.expected_gap(args.n, args.k)
    q = {"command": "mean", "n": args.n, "k": args.k}
    return [OutputRecord.from_scalar(q, s, args.digits)]


def _quantile_records(args) -> list[OutputRecord]:
    s = moments.quantile(args.n, args.k, args.p, args.tol)
    q = {"command": "quantile", "n": args.n, "k": args.k, "ell": args.n + 2 - args.k, "p": args.p}
    diag = {
        "survival": format_decimal(s.info["survival"], args.digits),
        "residual": s.info["residual"],
        "bracket": list(s.info["bracket"]),
        "iterations": s.info["iterations"],
    }
    return [OutputRecord(q, None, format_decimal(s.value, args.digits), "float", diag)]


def _render_records(records: list[OutputRecord], args, grid: bool) -> str:
    if args.format == "json":
        payload = [r.to_dict() for r in records] if grid else records[0].to_dict()
        return json.dumps(payload, indent=2)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow(r.csv_row())
        return buf.getvalue().rstrip("\n")
    lines = []
    for r in records:
        if grid:
            lines.append("\t".join([r.query.get("x", ""), format_rational(r.exact) if r.exact is not None else "", r.decimal]))
        else:
            if r.exact is not None:
                lines.append(format_rational(r.exact))
            lines.append(r.decimal)
    return "\n".join(lines)


def _sim_queries(args) -> list[simulate.Query] | None:
    if args.grid is None and args.x is None:
        xs = [Fraction(i, 20) for i in range(1, 20)]
    elif args.grid is not None:
        xs = parse_grid(args.grid)
    else:
        xs = [to_fraction(args.x)]
    n = args.n
    ks = [args.k] if args.k is not None else range(1, n + 2)
    ms = [args.m] if args.m is not None else range(n + 2)
    out = [simulate.Query("survival", k, x) for x in xs for k in ks]
    out += [simulate.Query("band", m, x) for x in xs for m in ms]
    out += [simulate.Query("mean", k) for k in ks]
    return out


def _render_report(report: simulate.SimReport, fmt: str) -> str:
    if fmt == "json":
        return report.to_json(indent=2)
    rows = []
    for e in report.entries:
        q = e.query
        idx = f"m={q['m']}" if "m" in q else f"k={q['k']}"
        ex = "" if e.exact is None else format_decimal(e.exact, 10)
        z = "" if e.z is None else f"{e.z:.3f}"
        rows.append([q["kind"], str(q["n"]), idx, q.get("x", ""), f"{e.estimate:.6g}", f"{e.se:.3g}", ex, z])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "n", "index", "x", "estimate", "se", "exact", "z"])
        w.writerows(rows)
        return buf.getvalue().rstrip("\n")
    return "\n".join("\t".join(r) for r in rows)


def run_verify(nmax: int, samples: int, seed: int, streams: int = 1, alarm: float = 4.0) -> dict:
    """Oracle equivalence plus Monte Carlo concordance for n = 1..nmax."""
    xs = [Fraction(i, 20) for i in range(1, 20)]
    checked, mismatches = 0, []
    for n in range(1, nmax + 1):
        for x in xs:
            for j in range(n + 1):
                for y in (1 - x, Fraction(1)):
                    checked += 1
                    if exact.joint_exceedance(n, j, x, y).value != geometry.oracle_joint_exceedance(n, j, x, y):
                        mismatches.append({"op": "joint", "n": n, "j": j, "x": format_rational(x), "y": format_rational(y)})
            for m in range(n + 2):
                checked += 1
                if exact.band_probability(n, m, x).value != geometry.oracle_band_probability(n, m, x):
                    mismatches.append({"op": "band", "n": n, "m": m, "x": format_rational(x)})
    mc: dict[str, Any] = {}
    reports = {}
    for rep in simulate.REPRESENTATIONS:
        combined = simulate.SimReport({"representation": rep, "samples": samples, "seed": seed})
        for n in range(1, nmax + 1):
            cfg = simulate.SimConfig(n, samples, seed, rep, streams)
            combined.extend(simulate.verify(cfg, alarm=alarm))
        zs = [abs(z) for z in combined.z_scores]
        reports[rep] = combined
        mc[rep] = {
            "queries": len(zs),
            "alarms": len(combined.alarms(alarm)),
            "alarm_fraction": len(combined.alarms(alarm)) / max(len(zs), 1),
            "max_abs_z": max(zs, default=0.0),
            "errors": sum(e.error is not None for e in combined.entries),
        }
    sign_p = simulate.sign_test(*reports.values())
    passed = (
        not mismatches
        and all(v["alarm_fraction"] <= 0.005 and v["max_abs_z"] <= 6 and not v["errors"] for v in mc.values())
        and sign_p > 1e-3
    )
    return {
        "meta": {"nmax": nmax, "samples": samples, "seed": seed, "alarm": alarm},
        "oracle": {"checked": checked, "mismatches": mismatches},
        "monte_carlo": mc,
        "sign_test_p": sign_p,
        "passed": passed,
    }


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "plain"], default="plain")
    common.add_argument("--digits", type=int, default=15, help="significant digits for decimals")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="rational arithmetic (default)")
    mode.add_argument("--float", action="store_true", help="floating path with cancellation guard")
    common.add_argument("--strict", action="store_true", help="with --float, exit 3 on exact fallback")
    common.add_argument("--cond-threshold", type=float, default=exact.COND_THRESHOLD)
    common.add_argument("--out", metavar="FILE", help="write data here instead of stdout")

    parser = argparse.ArgumentParser(prog="spacings", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def point(name, help_, **idx):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--n", type=int, required=True)
        for flag in idx:
            p.add_argument(f"--{flag}", type=int, required=True)
        g = p.add_mutually_exclusive_group()
        g.add_argument("--x", help="threshold, e.g. 1/4 or 0.05")
        g.add_argument("--grid", help="threshold sweep a:b:step")
        return p

    point("sf", "P(k-th smallest spacing > x)", k=True)
    point("cdf", "P(k-th smallest spacing <= x)", k=True)
    point("band", "P(exactly m spacings > x)", m=True)
    point("maxsf", "P(largest spacing > x)")
    point("pvalue", "P(at least ell spacings > x)", ell=True)

    p = sub.add_parser("mean", parents=[common], help="E of the k-th smallest spacing")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("quantile", parents=[common], help="critical value x with survival = p")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--tol", type=float, default=1e-12)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo estimates")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--rep", choices=["uniform", "expratio"], default="uniform")
    p.add_argument("--streams", type=int, default=1)
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--no-exact", action="store_true", help="skip exact values and z-scores")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--x")
    g.add_argument("--grid")

    p = sub.add_parser("verify", parents=[common], help="oracle and Monte Carlo cross-checks")
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--streams", type=int, default=1)
    p.add_argument("--alarm", type=float, default=4.0)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    status = EXIT_OK
    try:
        if args.command in ("sf", "cdf", "band", "maxsf", "pvalue"):
            records = _point_records(args)
            _emit(_render_records(records, args, grid=args.grid is not None), args.out)
            if args.float and args.strict and any(r.mode == "float-fallback-exact" for r in records):
                print("cancellation guard forced exact evaluation", file=sys.stderr)
                status = EXIT_FALLBACK
        elif args.command == "mean":
            _emit(_render_records(_mean_records(args), args, grid=False), args.out)
        elif args.command == "quantile":
            _emit(_render_records(_quantile_records(args), args, grid=False), args.out)
        elif args.command == "simulate":
            cfg = simulate.SimConfig(args.n, args.samples, args.seed, args.rep, args.streams)
            report = simulate.estimate(cfg, _sim_queries(args), with_exact=not args.no_exact)
            _emit(_render_report(report, args.format), args.out)
        else:
            summary = run_verify(args.nmax, args.samples, args.seed, args.streams, args.alarm)
            _emit(json.dumps(summary, indent=2), args.out)
            if not summary["passed"]:
                print("verification failed", file=sys.stderr)
                status = EXIT_FAIL
    except ConvergenceError as exc:
        print(f"error: {exc}; bracket {exc.bracket}", file=sys.stderr)
        return EXIT_FAIL
    except SpacingsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
