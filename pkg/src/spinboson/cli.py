"""Command-line front end for batch computations.

Exit codes: 0 success, 1 domain error, 2 resource-budget error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import bridge, moments, spin_core, xy
from .parsing import ParseError, parse_polynomial, render_polynomial
from .spin_core import ResourceLimitError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinboson",
        description="Exact collective-spin traces and their bosonic limits.",
    )
    parser.add_argument("--config", help="key=value file; flags take precedence")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, expr=True, n=True):
        if expr:
            p.add_argument("--expr", help="polynomial over S+, S-, Sz")
        if n:
            p.add_argument("--n", type=int, help="number of spin-1/2 sites")
            p.add_argument("--n-list", help="comma-separated site counts")
        p.add_argument("--digits", type=int, default=12,
                       help="rendered decimal precision (default 12)")
        p.add_argument("--format", choices=("text", "json", "csv"),
                       default="text")
        p.add_argument("--out", help="output path (default stdout)")

    p = sub.add_parser("trace", help="normalized trace of a polynomial")
    common(p)
    p.add_argument("--float", action="store_true", dest="float_path",
                   help="use the binary64 fast path (labeled in output)")
    p = sub.add_parser("moments", help="table of limit moments")
    common(p, expr=False, n=False)
    p.add_argument("--max-l", type=int, default=5, dest="max_l")
    p = sub.add_parser("verify", help="theorem convergence report")
    common(p)
    p = sub.add_parser("xy", help="Heisenberg XY application")
    common(p)
    p.add_argument("--gamma", required=True, help="coupling (units of hbar)")
    p.add_argument("--kt", required=True, help="temperature (k_B absorbed)")
    p = sub.add_parser("normal-order", help="bosonic image of a polynomial")
    common(p, n=False)
    p = sub.add_parser("oracle", help="irrep engine against the dense oracle")
    common(p)
    p.add_argument("--oracle-cap", type=int, default=14, dest="oracle_cap")
    return parser


def _apply_config(args: argparse.Namespace) -> None:
    if not args.config:
        return
    with open(args.config) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"malformed config line: {line!r}")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if not hasattr(args, key) or getattr(args, key) in (None, False):
                if key in ("n", "digits", "max_l", "oracle_cap"):
                    value = int(value)
                elif key in ("float_path",):
                    value = value.lower() in ("1", "true", "yes")
                setattr(args, key, value)


def _n_values(args) -> list:
    if getattr(args, "n_list", None):
        return [int(v) for v in args.n_list.split(",")]
    if getattr(args, "n", None):
        return [args.n]
    raise ValueError("provide --n or --n-list")


def _emit(args, payload: dict, text: str, csv_rows=None) -> None:
    if args.format == "json":
        out = json.dumps(payload, indent=2)
    elif args.format == "csv":
        buf = io.StringIO()
        rows = csv_rows or []
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        out = buf.getvalue()
    else:
        out = text
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out if out.endswith("\n") else out + "\n")
    else:
        print(out)


def _cmd_trace(args) -> None:
    poly = parse_polynomial(_require(args, "expr"))
    rows = []
    lines = []
    for n in _n_values(args):
        res = spin_core.normalized_trace(
            n, poly, digits=args.digits, use_float=args.float_path
        )
        tag = " [float path]" if res.float_path else ""
        lines.append(f"N={n}: {res.decimal}{tag}")
        rows.append({"N": n, "value": res.decimal,
                     "float_path": res.float_path})
    _emit(
        args,
        {"command": "trace",
         "inputs": {"expr": args.expr, "N": _n_values(args),
                    "digits": args.digits, "float": args.float_path},
         "results": rows},
        "\n".join(lines),
        rows,
    )


def _cmd_moments(args) -> None:
    if args.max_l < 0:
        raise ValueError("--max-l must be >= 0")
    rows = []
    lines = ["l  moment (2l)!/(2^{3l} l!)"]
    for ell in range(args.max_l + 1):
        m = moments.limit_moment(ell)
        rows.append({"l": ell, "moment": str(m), "decimal": float(m)})
        lines.append(f"{ell}  {m} = {float(m):.10g}")
    _emit(
        args,
        {"command": "moments", "inputs": {"max_l": args.max_l},
         "results": rows},
        "\n".join(lines),
        rows,
    )


def _cmd_verify(args) -> None:
    poly = parse_polynomial(_require(args, "expr"))
    report = bridge.verify_theorem(poly, _n_values(args), digits=args.digits)
    lines = []
    for n, dec, err in zip(report.n_values, report.spin_decimals,
                           report.abs_errors):
        lines.append(f"N={n}: spin {dec}  |error| {err:.6g}")
    lines.append(f"boson value: {report.boson_value:.10g}")
    if report.fitted_rate is not None:
        lines.append(f"fitted decay rate: {report.fitted_rate:.3f}")
    rows = [
        {"N": n, "spin_value": v, "boson_value": report.boson_value,
         "abs_error": e}
        for n, v, e in zip(report.n_values, report.spin_values,
                           report.abs_errors)
    ]
    _emit(
        args,
        {"command": "verify",
         "inputs": {"expr": args.expr, "N": report.n_values},
         "results": json.loads(report.to_json())},
        "\n".join(lines),
        rows,
    )


def _cmd_xy(args) -> None:
    params = xy.XYParams(Fraction(args.gamma), Fraction(args.kt))
    report = xy.validity_check(params)
    lines = [f"gamma={args.gamma} kT={args.kt} g={params.g}"]
    for name, ok in report.bounds:
        lines.append(f"bound {name}: {'pass' if ok else 'FAIL'}")
    if report.temperature_bound:
        lines.append(f"ferromagnetic bound: {report.temperature_bound}")
    row = {
        "gamma": float(params.gamma), "kT": float(params.kT),
        "g": float(params.g), "valid": report.passed,
        "Z": None, "T_eff": None,
        "expectation_spin": None, "expectation_boson": None,
    }
    if report.passed:
        row["Z"] = xy.partition_function(params)
        lines.append(f"Z = {row['Z']:.10g}")
        if params.gamma != 0:
            row["T_eff"] = xy.effective_temperature(params)
            lines.append(f"T_eff = {row['T_eff']:.6g}")
    if args.expr and (args.n or args.n_list):
        poly = parse_polynomial(args.expr)
        n = _n_values(args)[-1]
        row["expectation_spin"] = xy.spin_thermal_expectation(
            params, n, poly, digits=min(args.digits + 10, 50)
        )
        lines.append(f"<f>_spin(N={n}) = {row['expectation_spin']:.10g}")
        if report.passed:
            row["expectation_boson"] = float(
                xy.boson_thermal_expectation(params, bridge.boson_image(poly))
            )
            lines.append(f"<f>_boson = {row['expectation_boson']:.10g}")
    _emit(
        args,
        {"command": "xy",
         "inputs": {"gamma": args.gamma, "kt": args.kt, "expr": args.expr},
         "results": [row]},
        "\n".join(lines),
        [row],
    )


def _cmd_normal_order(args) -> None:
    poly = parse_polynomial(_require(args, "expr"))
    form = bridge.boson_image(poly)
    text = form.render()
    _emit(
        args,
        {"command": "normal-order", "inputs": {"expr": args.expr},
         "results": [{"normal_form": json.loads(form.to_json()),
                      "rendered": text}]},
        f"{render_polynomial(poly)}  ->  {text}",
        [{"expr": args.expr, "normal_form": text}],
    )


def _cmd_oracle(args) -> None:
    poly = parse_polynomial(_require(args, "expr"))
    rows = []
    lines = []
    for n in _n_values(args):
        engine = spin_core.normalized_trace(n, poly, digits=args.digits)
        dense = spin_core.dense_oracle_trace(
            n, poly, digits=args.digits, cap=args.oracle_cap
        )
        match = engine.exact == dense.exact and engine.sqrt_n == dense.sqrt_n
        lines.append(
            f"N={n}: engine {engine.decimal}  dense {dense.decimal}  "
            f"{'MATCH' if match else 'MISMATCH'}"
        )
        rows.append({"N": n, "engine": engine.decimal,
                     "dense": dense.decimal, "match": match})
        if not match:
            raise ValueError(f"oracle mismatch at N={n}")
    _emit(
        args,
        {"command": "oracle",
         "inputs": {"expr": args.expr, "N": _n_values(args),
                    "oracle_cap": args.oracle_cap},
         "results": rows},
        "\n".join(lines),
        rows,
    )


def _require(args, name):
    value = getattr(args, name, None)
    if value is None:
        raise ValueError(f"--{name.replace('_', '-')} is required")
    return value


_COMMANDS = {
    "trace": _cmd_trace,
    "moments": _cmd_moments,
    "verify": _cmd_verify,
    "xy": _cmd_xy,
    "normal-order": _cmd_normal_order,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        _COMMANDS[args.command](args)
    except ResourceLimitError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ParseError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
