"""Command-line interface: ``twosquares <command> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .arithmetic import factorize
from .asymptotics import density_point
from .oracle import ORACLE_CEILING, enumerate_s
from .residues import count, member, s_table
from .search import (
    CandidateModulus,
    Mode,
    certify_lift,
    condition_set,
    load_checkpoint,
    search,
)

log = logging.getLogger("twosquares")

EXIT_USAGE = 2
EXIT_IO = 1


class UsageError(Exception):
    pass


@dataclass
class OutputRecord:
    command: str
    inputs: dict[str, object]
    rows: list[dict[str, object]] = field(default_factory=list)

    def render(self, fmt: str) -> str:
        rows = [_expand(r) for r in self.rows]
        if fmt == "csv":
            buf = io.StringIO()
            header = list(rows[0]) if rows else []
            writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
            return buf.getvalue()
        if fmt == "kv":
            lines = [f"command={self.command}"]
            lines += [f"{k}={v}" for k, v in self.inputs.items()]
            for r in rows:
                lines.append(" ".join(f"{k}={v}" for k, v in r.items()))
            return "\n".join(lines) + "\n"
        if len(rows) == 1:
            width = max(map(len, rows[0]))
            return "".join(f"{k:<{width}}  {v}\n" for k, v in rows[0].items())
        if not rows:
            return ""
        header = list(rows[0])
        cells = [header] + [[str(r[h]) for h in header] for r in rows]
        widths = [max(len(c[i]) for c in cells) for i in range(len(header))]
        return "".join(
            "  ".join(c.rjust(w) for c, w in zip(line, widths)).rstrip() + "\n" for line in cells
        )


def _expand(row: dict[str, object]) -> dict[str, object]:
    """Emit every density as an exact fraction plus a 6-place decimal."""
    out: dict[str, object] = {}
    for k, v in row.items():
        if isinstance(v, Fraction):
            out[k] = f"{v.numerator}/{v.denominator}"
            out[f"{k}_decimal"] = f"{float(v):.6f}"
        else:
            out[k] = v
    return out


def _counts_row(n: int) -> dict[str, object]:
    c = count(n)
    return {
        "n": n,
        "S": c.count_S,
        "N": c.count_N,
        "r_S": c.density_S,
        "r_N": c.density_N,
    }


def cmd_classify(args: argparse.Namespace) -> OutputRecord:
    n, x = args.n, args.x
    if n < 1 or not 0 <= x < n:
        raise UsageError(f"need n >= 1 and 0 <= x < n, got n={n} x={x}")
    verdict = member(n, x)
    row = {"n": n, "x": x, "verdict": str(verdict)}
    return OutputRecord("classify", {"n": n, "x": x}, [row])


def cmd_count(args: argparse.Namespace) -> OutputRecord:
    if args.n < 1:
        raise UsageError(f"need n >= 1, got {args.n}")
    return OutputRecord("count", {"n": args.n}, [_counts_row(args.n)])


def cmd_table(args: argparse.Namespace) -> OutputRecord:
    if args.max_n < 1:
        raise UsageError(f"need max_n >= 1, got {args.max_n}")
    rows = [_counts_row(n) for n in range(1, args.max_n + 1)]
    return OutputRecord("table", {"max_n": args.max_n}, rows)


def oracle_disagreement(max_n: int) -> str | None:
    """First mismatch between enumeration and the closed forms, if any."""
    for n in range(1, max_n + 1):
        f = factorize(n)
        truth = enumerate_s(n).members
        if not np.array_equal(truth, s_table(f)):
            return f"n={n}: membership table differs"
        if int(truth.sum()) != count(n, f).count_S:
            return f"n={n}: |S_n| differs"
        for x in range(n):
            if member(n, x, f).in_S != truth[x]:
                return f"n={n} x={x}: member disagrees"
    return None


def cmd_oracle_check(args: argparse.Namespace) -> OutputRecord:
    if not 1 <= args.max_n <= ORACLE_CEILING:
        raise UsageError(f"max_n must be in [1, {ORACLE_CEILING}]")
    problem = oracle_disagreement(args.max_n)
    row = {"max_n": args.max_n, "result": problem or "all agree"}
    return OutputRecord("oracle-check", {"max_n": args.max_n}, [row])


def cmd_search(args: argparse.Namespace) -> OutputRecord:
    if args.limit < 4:
        raise UsageError(f"limit must be >= 4, got {args.limit}")
    mode = Mode(args.mode)
    resume = None
    if args.resume is not None and args.resume.exists():
        resume = load_checkpoint(args.resume)
        log.info("resuming from cursor %d", resume.cursor)

    csv_out = open(args.csv_out, "w", newline="") if args.csv_out else None
    writer = csv.writer(csv_out) if csv_out else None
    if writer:
        writer.writerow(["n", "k", "m", "count", "density", "density_decimal"])
    seen = 0

    def on_result(c: CandidateModulus, total: int) -> None:
        nonlocal seen
        seen += 1
        if writer:
            d = Fraction(total, c.n)
            writer.writerow([c.n, c.k, c.m, total, f"{d.numerator}/{d.denominator}", f"{float(d):.6f}"])
        if seen % 100 == 0:
            log.info("scanned %d candidates, at n=%d", seen, c.n)

    try:
        report = search(
            args.limit,
            mode,
            workers=args.threads,
            resume=resume,
            checkpoint=args.resume,
            on_result=on_result,
        )
    finally:
        if csv_out:
            csv_out.close()

    if args.members_out and report.best is not None:
        members = condition_set(report.best.candidate, mode).elements()
        np.savetxt(args.members_out, members, fmt="%d")

    row = dict(report.rows())
    inputs = {"limit": args.limit, "mode": mode.value, "threads": args.threads}
    return OutputRecord("search", inputs, [row])


def cmd_asymptotics(args: argparse.Namespace) -> OutputRecord:
    if args.i_max < 1 or args.s_max < 1:
        raise UsageError("i_max and s_max must be >= 1")
    rows = []
    for i in range(1, args.i_max + 1):
        for s in range(1, args.s_max + 1):
            pt = density_point(i, s)
            rows.append(
                {
                    "i": i,
                    "s": s,
                    "modulus": pt.modulus if pt.modulus is not None else "overflow",
                    "density_N": pt.density_N,
                    "limit": pt.limit_value,
                }
            )
    return OutputRecord("asymptotics", {"i_max": args.i_max, "s_max": args.s_max}, rows)


def cmd_certify_lift(args: argparse.Namespace) -> OutputRecord:
    mode = Mode(args.mode)
    try:
        c = CandidateModulus.of(args.k, args.m)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rep = certify_lift(args.x, c, mode, args.samples)
    row = {
        "x": rep.x,
        "n": c.n,
        "mode": mode.value,
        "samples": rep.samples,
        "counterexamples": len(rep.counterexamples),
        "result": "all non-representable" if rep.ok else f"representable lifts: {list(rep.counterexamples)[:10]}",
    }
    return OutputRecord("certify-lift", {"x": args.x, "k": args.k, "m": args.m}, [row])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twosquares",
        description="Sums of two squares mod n and two-squares-plus-powers-of-2 density bounds.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["table", "csv", "kv"], default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="is x a sum of two squares mod n?")
    p.add_argument("n", type=int)
    p.add_argument("x", type=int)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("count", parents=[common], help="|S_n|, |N_n| and densities")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("table", parents=[common], help="counts for n = 1..max_n")
    p.add_argument("max_n", type=int)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("oracle-check", parents=[common], help="compare closed forms with brute force")
    p.add_argument("max_n", type=int)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("search", parents=[common], help="find the densest obstruction modulus")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.ONE_POWER.value)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--resume", type=Path, help="checkpoint file, read if present and rewritten")
    p.add_argument("--csv-out", type=Path, help="write one CSV row per scanned candidate")
    p.add_argument("--members-out", type=Path, help="write the best candidate's residues")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("asymptotics", parents=[common], help="CSV of r(N_n) along n = (p_1...p_i)^s")
    p.add_argument("i_max", type=int)
    p.add_argument("s_max", type=int)
    p.set_defaults(func=cmd_asymptotics, format_default="csv")

    p = sub.add_parser("certify-lift", parents=[common], help="check x + t*n against the natural-number oracle")
    p.add_argument("x", type=int)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.ONE_POWER.value)
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_certify_lift)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        record = args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"twosquares {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"twosquares {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    fmt = args.format or getattr(args, "format_default", "table")
    sys.stdout.write(record.render(fmt))
    return 0


if __name__ == "__main__":
    sys.exit(main())
