"""cs3 command line: run registered examples and property suites.

Exit codes: 0 pass, 2 unknown / out-of-scope example, 3 failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from cs3.errors import CS3Error, UnknownExample
from cs3.quadrature import DEFAULT_NODES

log = logging.getLogger("cs3")

EXIT_OK, EXIT_UNKNOWN, EXIT_FAIL = 0, 2, 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    target: str
    nodes: int = DEFAULT_NODES
    levels: int = 3
    fmt: str = "table"
    out: Path | None = None
    seed: int = 0
    trials: int = 100
    lam: Fraction | float = Fraction(1)
    dump_forms: Path | None = None

    def __post_init__(self):
        if self.nodes < 4:
            raise ValueError("--nodes must be at least 4")
        if self.levels < 2:
            raise ValueError("--levels must be at least 2")
        if self.fmt not in ("json", "table"):
            raise ValueError("--format must be json or table")


def parse_lambda(text: str):
    """Rational string ('3/2', '2') exactly; decimals are accepted as floats with a warning."""
    try:
        return Fraction(text) if "." not in text and "e" not in text.lower() else _float_lambda(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"invalid lambda {text!r}: {exc}") from exc


def _float_lambda(text):
    log.warning("lambda %s given as a decimal; the algebraic route loses exactness", text)
    return float(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--nodes", type=int, default=DEFAULT_NODES, help="quadrature nodes per axis (>= 4)")
    common.add_argument("--levels", type=int, default=3, help="grid refinement levels (>= 2)")
    common.add_argument("--format", dest="fmt", choices=("json", "table"), default="table")
    common.add_argument("--seed", type=int, default=0, help="seed for property suites")
    common.add_argument("--out", type=Path, default=None, help="write the report to this file")
    common.add_argument("--dump-forms", type=Path, default=None,
                        help="write the Chern-Simons form of the example in canonical text format")

    parser = argparse.ArgumentParser(prog="cs3", description="Chern-Simons invariants of Lie-algebra-valued connections")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="run a registered example")
    run.add_argument("example")
    run.add_argument("--lambda", dest="lam", type=parse_lambda, default=Fraction(1),
                     help="Berger-Lorentz parameter as a rational string, e.g. 3/2")
    suite = sub.add_parser("suite", parents=[common], help="run a property suite")
    suite.add_argument("suite", choices=("identities", "normalization", "examples", "all"))
    suite.add_argument("--trials", type=int, default=100)
    sub.add_parser("list", help="list registered examples")
    return parser


def _fmt_value(v):
    if v is None:
        return "-"
    if isinstance(v, Fraction):
        return str(v)
    return f"{v:.12g}"


def _table(rows, columns):
    widths = [max(len(c), *(len(str(r[i])) for r in rows)) if rows else len(c) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(str(x).ljust(w) for x, w in zip(r, widths)))
    return "\n".join(lines)


def render_reports(reports, fmt):
    if fmt == "json":
        payload = [r.to_json() for r in reports]
        return json.dumps(payload[0] if len(payload) == 1 else payload, indent=2)
    rows = [(r.name, r.route, _fmt_value(r.value), f"{r.error_estimate:.2e}", _fmt_value(r.mod_one),
             _fmt_value(r.paper_expected), "PASS" if r.passed else "FAIL") for r in reports]
    text = _table(rows, ("example", "route", "value", "error", "mod 1", "expected", "result"))
    verdicts = sorted({v for r in reports for v in r.verdicts})
    if verdicts:
        text += "\n" + "\n".join(f"  {v}" for v in verdicts)
    return text


def render_checks(results, fmt):
    passed = sum(r.passed for r in results)
    if fmt == "json":
        return json.dumps({"checks": [r.to_json() for r in results], "passed": passed,
                           "failed": len(results) - passed}, indent=2)
    rows = [(r.name, "PASS" if r.passed else "FAIL", f"{r.residual:.3e}", r.trials) for r in results]
    return _table(rows, ("check", "result", "residual", "trials")) + f"\n{passed} passed, {len(results) - passed} failed"


def _emit(text, cfg: RunConfig):
    if cfg.out is not None:
        cfg.out.write_text(text + "\n", encoding="utf-8")
    print(text)


def dump_example_forms(name, lam, path: Path):
    from cs3.coframe import chern_simons, dump_form
    from cs3.invariants import berger_lorentz_example, rp3_example, s3_round_example

    builders = {"rp3-equiaffine": rp3_example, "s3-round": s3_round_example}
    if name.startswith("berger-lorentz"):
        lam = Fraction(name.split(":", 1)[1]) if ":" in name else lam
        spec = berger_lorentz_example(lam)
    elif name in builders:
        spec = builders[name]()
    else:
        log.warning("example %s has no coframe connection to dump", name)
        return
    theta = spec.valued_form()
    text = "# connection\n" + dump_form(theta) + "# chern-simons\n" + dump_form(
        chern_simons(theta, spec.form, spec.complex))
    path.write_text(text, encoding="utf-8")


def run_example(cfg: RunConfig) -> int:
    from cs3.invariants import run_example as run

    try:
        reports = run(cfg.target, lam=cfg.lam, nodes=cfg.nodes, levels=cfg.levels)
    except UnknownExample as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except CS3Error as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(render_reports(reports, cfg.fmt), cfg)
    if cfg.dump_forms is not None:
        dump_example_forms(cfg.target, cfg.lam, cfg.dump_forms)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def run_suite(cfg: RunConfig) -> int:
    from cs3.suites import run_suite as run

    try:
        results = run(cfg.target, trials=cfg.trials, seed=cfg.seed, nodes=cfg.nodes, levels=cfg.levels)
    except CS3Error as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(render_checks(results, cfg.fmt), cfg)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "list":
        from cs3.invariants import EXAMPLES, OUT_OF_SCOPE

        print("\n".join(EXAMPLES))
        print("\n".join(f"{k} (out of scope)" for k in OUT_OF_SCOPE))
        return EXIT_OK
    target = args.example if args.command == "run" else args.suite
    try:
        cfg = RunConfig(args.command, target, args.nodes, args.levels, args.fmt, args.out, args.seed,
                        getattr(args, "trials", 100), getattr(args, "lam", Fraction(1)), args.dump_forms)
    except ValueError as exc:
        build_parser().error(str(exc))
    return run_example(cfg) if cfg.command == "run" else run_suite(cfg)


if __name__ == "__main__":
    sys.exit(main())
