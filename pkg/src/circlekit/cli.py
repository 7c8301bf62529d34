"""Command-line front end: every computation as a reproducible, scriptable run.

Data goes to CSV (comma separated, LF line endings, mandatory header,
UTF-8); each written file is accompanied by ``<out>.manifest.json``
holding the flat run manifest.  Reals print with a configurable number of
significant digits (default 17, which round-trips doubles exactly);
integers print exactly; exact rationals print as ``p/q`` and are never
converted to floats.  Identical parameters (including the seed) produce
byte-identical CSV in a fixed build.

Exit codes: 0 success, 2 usage error, 3 capacity error (the message names
the sieve limit that would have sufficed), 1 internal failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from math import gcd
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__, arith, correlate, laplace, lattice, special
from .errors import CapacityError


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: int
    sieve_limit: int
    tool_version: str = __version__
    wall_time: float = 0.0


def _write_manifest(out_path: str, manifest: RunManifest) -> None:
    path = Path(str(out_path) + ".manifest.json")
    payload = asdict(manifest)
    payload["parameters"] = {k: payload["parameters"][k] for k in sorted(payload["parameters"])}
    path.write_text(json.dumps(payload, sort_keys=True) + "\n", encoding="utf-8")


def format_value(v, precision: int) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.{precision}g}"
    return str(v)


def write_csv(path: str, header: list[str], rows, precision: int) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v, precision) for v in row) + "\n")


def _parse_cell(cell: str):
    try:
        return int(cell)
    except ValueError:
        pass
    if "/" in cell:
        try:
            return Fraction(cell)
        except ValueError:
            pass
    try:
        return float(cell)
    except ValueError:
        return cell


def read_csv(path: str):
    """Parse a CSV written by this tool back into typed cells."""
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ValueError(f"{path}: empty CSV")
    header = lines[0].split(",")
    rows = [[_parse_cell(c) for c in line.split(",")] for line in lines[1:]]
    return header, rows


def _parse_t_list(text: str) -> list[float]:
    """'64..8192' doubles geometrically; '64,96,128' is taken literally."""
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        lo, hi = float(lo_s), float(hi_s)
        if lo <= 0 or hi < lo:
            raise UsageError(f"bad T range {text!r}")
        out = []
        t = lo
        while t <= hi * (1 + 1e-12):
            out.append(t)
            t *= 2
        return out
    try:
        return [float(part) for part in text.split(",") if part]
    except ValueError as exc:
        raise UsageError(f"bad T list {text!r}") from exc


def _build_tables(limit: int) -> arith.ArithTables:
    if limit < 1:
        raise UsageError(f"sieve limit must be >= 1, got {limit}")
    return arith.build_tables(limit)


def _require_limit(requested: int | None, needed: int, what: str) -> int:
    if requested is None:
        return needed
    if requested < needed:
        raise CapacityError(
            f"{what} needs sieve limit >= {needed}, but --limit {requested} was given",
            required_limit=needed,
        )
    return requested


# ----------------------------------------------------------------- commands


def cmd_sieve(args) -> int:
    args.limit = args.limit if args.limit is not None else 10**6
    tables = _build_tables(args.limit)
    r_sum = int(tables.r.sum(dtype="int64"))
    d_sum = int(tables.d.sum(dtype="int64"))
    s_sum = int(tables.sigma.sum(dtype="int64"))
    print(f"sieve limit      {tables.limit}")
    print(f"sum r(n)         {r_sum}")
    print(f"sum d(n)         {d_sum}")
    print(f"sum sigma(n)     {s_sum}")
    print(f"max r(n)         {int(tables.r.max())}")
    print(f"bytes per entry  16")
    return 0


def cmd_error_term(args) -> int:
    if args.samples < 1:
        raise UsageError(f"--samples must be >= 1, got {args.samples}")
    if args.x_max < 1:
        raise UsageError(f"--x-max must be >= 1, got {args.x_max}")
    args.limit = _require_limit(args.limit, int(args.x_max), "error-term scan")
    tables = _build_tables(args.limit)
    kind = lattice.CIRCLE if args.kind == "circle" else lattice.DIVISOR
    profile = lattice.step_profile(tables, kind)
    report = lattice.pointwise_report(profile, args.x_max, args.samples)
    rows = [
        (r.x, r.value, r.ratio_quarter, r.ratio_huxley)
        for r in report.rows
    ]
    write_csv(args.out, ["x", "value", "ratio_quarter", "ratio_huxley"], rows, args.precision)
    print(f"max |error| {report.max_abs:.6f} at x={report.argmax:.0f}")
    print(f"max ratio_quarter {report.max_ratio_quarter:.6f}")
    print(f"max ratio_huxley  {report.max_ratio_huxley:.6f}")
    return 0


def cmd_correlate(args) -> int:
    if args.n < 1:
        raise UsageError(f"--n must be >= 1, got {args.n}")
    if args.h_max < 1:
        raise UsageError(f"--h-max must be >= 1, got {args.h_max}")
    args.limit = _require_limit(args.limit, args.n + args.h_max, "correlation grid")
    tables = _build_tables(args.limit)
    records = correlate.corr_grid(tables, [args.n], args.h_max)
    rows = [(rec.N, rec.h, rec.raw, rec.main, rec.e_value) for rec in records]
    write_csv(args.out, ["N", "h", "raw", "main", "e_value"], rows, args.precision)
    report = correlate.pointwise_bound_report(records)
    print(f"max |E|/(N^(2/3) h^(5/42)) = {report.max_ratio:.6f} at (N,h)={report.argmax}")
    return 0


def cmd_laplace(args) -> int:
    t_list = _parse_t_list(args.t_list)
    if not t_list:
        raise UsageError("empty T list")
    t_max = max(t_list)
    # Crude sizing: the tail bound needs x_max ~ T log(1/(rel_tol)) + margin.
    needed = int(40 * t_max)
    args.limit = args.limit if args.limit is not None else needed
    tables = _build_tables(args.limit)
    if args.kind == "circle":
        profile = lattice.step_profile(tables, lattice.CIRCLE)
        c = laplace.series_limit(laplace.R_SQUARED)
        scan = laplace.residual_scan_p(profile, c, t_list, args.rel_tol)
        rows = [
            (r.T, r.integral, r.truncation_bound, r.main_term, r.residual, r.ratio_t23)
            for r in scan.rows
        ]
        write_csv(
            args.out,
            ["T", "integral", "truncation_bound", "main_term", "residual", "ratio_t23"],
            rows,
            args.precision,
        )
        print(f"series constant (closed form) {c:.12f}")
        print(f"slope log|residual| vs log T: {scan.slope:.4f}")
    else:
        profile = lattice.step_profile(tables, lattice.DIVISOR)
        c = laplace.series_limit(laplace.D_SQUARED)
        rows = []
        for T in t_list:
            integral, trunc = laplace.laplace_d2(profile, T, args.rel_tol)
            main = laplace.laplace_main_d(c, T)
            rows.append((float(T), integral, trunc, main, integral - main))
        write_csv(
            args.out,
            ["T", "integral", "truncation_bound", "main_term", "residual"],
            rows,
            args.precision,
        )
        print(f"series constant (closed form) {c:.12f}")
        if len(t_list) >= 3:
            fit = laplace.fit_a1(profile, c, t_list, args.rel_tol)
            print(
                f"fitted A1 {fit.a1:.7f} (expected {laplace.A1_EXPECTED:.7f}), "
                f"A2 {fit.a2:.4f}, A3 {fit.a3:.4f}"
            )
    return 0


def cmd_constants(args) -> int:
    if args.terms < 1:
        raise UsageError(f"--terms must be >= 1, got {args.terms}")
    args.limit = _require_limit(args.limit, args.terms, "series constant")
    tables = _build_tables(args.limit)
    kind = laplace.R_SQUARED if args.kind == "r_squared" else laplace.D_SQUARED
    sc = laplace.series_constant(tables, kind, args.terms)
    closed = laplace.series_limit(kind)
    print(f"kind              {sc.kind}")
    print(f"terms             {sc.terms_used}")
    print(f"partial sum       {sc.value:.12f}")
    print(f"tail bound        {sc.tail_bound:.6e}")
    print(f"closed form       {closed:.12f}")
    bracketed = sc.value <= closed <= sc.value + sc.tail_bound
    print(f"closed form in [partial, partial+tail]: {'yes' if bracketed else 'NO'}")
    return 0 if bracketed else 1


def cmd_gauss(args) -> int:
    if args.k_max < 1:
        raise UsageError(f"--k-max must be >= 1, got {args.k_max}")
    tol_passes = {1: 0, 2: 0}
    tol_fails = {1: 0, 2: 0}
    for k in range(1, args.k_max + 1):
        cls = k % 4
        if cls not in (1, 2):
            continue
        target = arith.chi(k) * k if cls == 1 else 0.0
        for h in range(1, k + 1):
            if gcd(h, k) != 1:
                continue
            g = special.gauss_sum_sq(k, h)
            if abs(g - target) <= 1e-6 * k:
                tol_passes[cls] += 1
            else:
                tol_fails[cls] += 1
    print(f"k=4m+2: {tol_passes[2]} within 1e-6*k of 0, {tol_fails[2]} outside")
    print(f"k=4m+1: {tol_passes[1]} within 1e-6*k of chi(k)*k, {tol_fails[1]} outside")
    return 0 if tol_fails[1] == tol_fails[2] == 0 else 1


def cmd_voronoi(args) -> int:
    if args.x < 2:
        raise UsageError(f"--x must be >= 2, got {args.x}")
    if args.n_terms < 2:
        raise UsageError(f"--n-terms must be >= 2, got {args.n_terms}")
    needed = max(int(args.x) + 1, args.n_terms)
    args.limit = _require_limit(args.limit, needed, "series evaluation")
    tables = _build_tables(args.limit)
    profile = lattice.step_profile(tables, lattice.CIRCLE)
    exact = lattice.p_of_x(profile, args.x)
    trunc = special.truncated_p(tables, args.x, args.n_terms)
    hardy = special.hardy_partial(tables, args.x, args.n_terms)
    print(f"P(x) exact            {exact:.12f}")
    print(f"cosine sum (N terms)  {trunc:.12f}   residual {exact - trunc:.6e}")
    print(f"Bessel sum (N terms)  {hardy:.12f}   residual {exact - hardy:.6e}")
    return 0


# ------------------------------------------------------------------- driver


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="circlekit",
        description="Exact circle-problem error terms, correlation sums and "
        "Laplace-transform asymptotics.",
    )
    p.add_argument("--precision", type=int, default=17,
                   help="significant digits for reals in CSV output (default 17)")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, out_required: bool):
        sp.add_argument("--limit", type=int, default=None, help="sieve limit")
        sp.add_argument("--seed", type=int, default=0, help="RNG seed for randomized reports")
        sp.add_argument("--rel-tol", dest="rel_tol", type=float,
                        default=laplace.DEFAULT_REL_TOL,
                        help="relative truncation tolerance for transforms")
        if out_required:
            sp.add_argument("--out", required=True, help="output CSV path")

    sp = sub.add_parser("sieve", help="build tables and print checksums")
    add_common(sp, out_required=False)
    sp.set_defaults(func=cmd_sieve)

    sp = sub.add_parser("error-term", help="scan P(x) or Delta(x) and bound ratios")
    sp.add_argument("kind", choices=["circle", "divisor"])
    sp.add_argument("--x-max", dest="x_max", type=float, required=True)
    sp.add_argument("--samples", type=int, default=64)
    add_common(sp, out_required=True)
    sp.set_defaults(func=cmd_error_term)

    sp = sub.add_parser("correlate", help="correlation sums and E(N, h) records")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--h-max", dest="h_max", type=int, required=True)
    add_common(sp, out_required=True)
    sp.set_defaults(func=cmd_correlate)

    sp = sub.add_parser("laplace", help="Laplace transform scan of P^2 or Delta^2")
    sp.add_argument("kind", choices=["circle", "divisor"])
    sp.add_argument("--t-list", dest="t_list", required=True,
                    help="'64..8192' (doubling) or comma-separated values")
    add_common(sp, out_required=True)
    sp.set_defaults(func=cmd_laplace)

    sp = sub.add_parser("constants", help="series constant sum f^2(n) n^(-3/2)")
    sp.add_argument("kind", choices=["r_squared", "d_squared"])
    sp.add_argument("--terms", type=int, required=True)
    add_common(sp, out_required=False)
    sp.set_defaults(func=cmd_constants)

    sp = sub.add_parser("gauss", help="quadratic Gauss sum congruence classes")
    sp.add_argument("--k-max", dest="k_max", type=int, required=True)
    add_common(sp, out_required=False)
    sp.set_defaults(func=cmd_gauss)

    sp = sub.add_parser("voronoi", help="compare P(x) against its series approximations")
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--n-terms", dest="n_terms", type=int, required=True)
    add_common(sp, out_required=False)
    sp.set_defaults(func=cmd_voronoi)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else (0 if exc.code is None else 2)
    started = time.perf_counter()
    try:
        rc = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if getattr(args, "out", None):
        params = {
            k: v for k, v in vars(args).items()
            if k not in {"func", "command", "out", "seed", "limit"} and v is not None
        }
        manifest = RunManifest(
            command=args.command,
            parameters=params,
            seed=getattr(args, "seed", 0),
            sieve_limit=args.limit if args.limit is not None else 0,
            wall_time=time.perf_counter() - started,
        )
        _write_manifest(args.out, manifest)
    return rc


if __name__ == "__main__":
    sys.exit(main())
