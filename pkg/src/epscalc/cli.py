"""Command-line interface.

Exit status: 0 on success, 1 when the input is rejected on its merits
(syntax error, failed check, exhausted budget, failing corpus entry),
2 on usage or I/O errors.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, esubst, ordinals, proofs, transform
from .evaluate import NotRealError, evaluate
from .parsing import ParseError, format_derivation, format_node, parse_derivation, parse_expr, parse_term
from .proofs import CheckError, Regime
from .syntax import is_real
from .translate import eps_translate

log = logging.getLogger("epscalc")

OK, FAILURE, USAGE = 0, 1, 2

BUDGET_ENV = "ESUBST_BUDGET"
MANIFEST = "manifest.tsv"
REPORT_COLUMNS = ("name", "outcome", "steps", "max-ordinal-tag", "wall-time")


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


# -- configuration -----------------------------------------------------------

def read_config(path: Optional[str]) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment, quotes are stripped."""
    if path is None:
        return {}
    out = {}
    for n, raw in enumerate(_read(path).splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value.strip("'\"")
    return out


def resolve_budget(flag: Optional[int], config: dict[str, str]) -> int:
    """Flag, then environment, then config file, then the default."""
    if flag is not None:
        return flag
    for source, raw in ((BUDGET_ENV, os.environ.get(BUDGET_ENV)), ("config", config.get("budget"))):
        if raw is not None:
            try:
                value = int(raw)
            except ValueError:
                raise UsageError(f"{source}: budget must be an integer, got {raw!r}") from None
            if value < 0:
                raise UsageError(f"{source}: budget must be non-negative")
            return value
    return esubst.DEFAULT_BUDGET


# -- helpers -----------------------------------------------------------------

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror or err}") from None


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as err:
        raise UsageError(f"cannot write {path}: {err.strerror or err}") from None


def _expr_lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        if raw.strip() and not raw.lstrip().startswith("#"):
            try:
                yield n, parse_expr(raw)
            except ParseError as err:
                raise DomainError(f"line {n}: {err}") from None


def _derivation(path: str):
    try:
        return parse_derivation(_read(path))
    except ParseError as err:
        raise DomainError(str(err)) from None


def _natural(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}")
    return value


# -- subcommands -------------------------------------------------------------

def cmd_parse(args) -> int:
    for _, node in _expr_lines(_read(args.file)):
        print(format_node(node))
    return OK


def cmd_translate(args) -> int:
    for _, node in _expr_lines(_read(args.file)):
        print(format_node(eps_translate(node)))
    return OK


def cmd_eval(args) -> int:
    for n, node in _expr_lines(_read(args.file)):
        try:
            value = evaluate(node)
        except NotRealError as err:
            raise DomainError(f"line {n}: {err}") from None
        print(str(value).lower() if isinstance(value, bool) else value)
    return OK


def cmd_check(args) -> int:
    d = _derivation(args.file)
    try:
        proofs.check(d, Regime(args.regime))
    except CheckError as err:
        print(f"line {err.line}: {err.reason}")
        return FAILURE
    print(f"ok: {len(d)} lines")
    return OK


def cmd_solve(args) -> int:
    d = _derivation(args.file)
    budget = resolve_budget(args.budget, read_config(args.config))
    try:
        S, trace = esubst.solve(d, budget)
    except CheckError as err:
        print(f"line {err.line}: {err.reason}")
        return FAILURE
    except esubst.BudgetExhausted as err:
        if args.trace:
            _write(args.trace, err.trace.to_tsv())
        print(f"budget-exhausted after {err.budget} updates")
        return FAILURE
    except ValueError as err:
        raise DomainError(str(err)) from None
    if args.trace:
        _write(args.trace, trace.to_tsv())
    print(f"solved in {len(trace)} steps")
    for T, a, v in S.entries():
        print(f"{T}\t{','.join(map(str, a))}\t{v}")
    if args.emit_real:
        real = esubst.extract_real(d, S)
        _write(args.emit_real, format_derivation(real))
    return OK


def cmd_transform(args) -> int:
    try:
        if args.kind == "neq":
            d, weights = transform.derive_neq(args.n, args.m)
        else:
            d, weights = transform.derive_term_value(parse_term(args.term))
    except (ParseError, ValueError) as err:
        raise DomainError(str(err)) from None
    if args.weights:
        print(" ".join(str(w) for w in weights))
    if args.emit:
        _write(args.emit, format_derivation(d))
    elif not args.weights:
        sys.stdout.write(format_derivation(d))
    return OK


def cmd_ord(args) -> int:
    try:
        a, b = ordinals.parse_ordinal(args.a), ordinals.parse_ordinal(args.b)
    except ordinals.OrdinalSyntaxError as err:
        raise DomainError(str(err)) from None
    print("<=>"[ordinals.cmp_cnf(a, b) + 1])
    return OK


# -- corpus ------------------------------------------------------------------

@dataclass(frozen=True)
class ManifestEntry:
    name: str
    file: str
    regime: str
    expected: str


@dataclass(frozen=True)
class EntryResult:
    name: str
    outcome: str
    steps: Optional[int]
    max_ordinal: Optional[str]
    wall_time: float

    @property
    def passed(self) -> bool:
        return self.outcome == "pass"

    def tsv(self) -> str:
        return "\t".join([
            self.name, self.outcome,
            "-" if self.steps is None else str(self.steps),
            self.max_ordinal or "-", f"{self.wall_time:.4f}",
        ])


def read_manifest(directory: Path) -> list[ManifestEntry]:
    path = directory / MANIFEST
    if not path.exists():
        return []
    out = []
    for n, raw in enumerate(_read(str(path)).splitlines(), 1):
        if not raw.strip() or raw.startswith("#"):
            continue
        cols = raw.split("\t")
        if cols[0] == "name":
            continue
        if len(cols) != 4:
            raise UsageError(f"{path}:{n}: expected 4 tab-separated columns")
        out.append(ManifestEntry(*cols))
    return out


def _expected_steps(expected: str) -> Optional[int]:
    if expected.startswith("solves-in-") and expected.endswith("-steps"):
        return int(expected[len("solves-in-"):-len("-steps")])
    return None


def run_entry(directory: str, entry: ManifestEntry, budget: int) -> EntryResult:
    start = time.perf_counter()
    steps = max_ord = None

    def done(outcome: str) -> EntryResult:
        return EntryResult(entry.name, outcome, steps, max_ord, time.perf_counter() - start)

    try:
        regime = Regime(entry.regime)
        d = parse_derivation(Path(directory, entry.file).read_text(encoding="utf-8"))
        proofs.check(d, regime)
        if entry.expected == "checks":
            return done("pass")
        want = _expected_steps(entry.expected)
        if want is None and entry.expected != "extracts-real":
            return done(f"error: unknown expectation {entry.expected!r}")
        S, trace = esubst.solve(d, budget)
        steps = len(trace)
        top = trace.max_ordinal()
        max_ord = None if top is None else str(top)
        if not esubst.descent_ok(trace):
            return done("fail: ordinal trace does not descend")
        real = esubst.extract_real(d, S)
        proofs.check(real, Regime.EXTENDED)
        if real.end_formula != d.end_formula or not is_real(real.end_formula):
            return done("fail: end formula changed")
        if want is not None and steps != want:
            return done(f"fail: {steps} steps, expected {want}")
        return done("pass")
    except CheckError as err:
        return done(f"fail: line {err.line}: {err.reason}")
    except esubst.BudgetExhausted as err:
        steps = len(err.trace)
        return done("fail: budget-exhausted")
    except (OSError, ValueError, esubst.SolverError) as err:
        return done(f"error: {err}")


def corpus_run(directory: str, budget: int = esubst.DEFAULT_BUDGET, jobs: int = 1) -> list[EntryResult]:
    """Run every manifest entry; results come back in manifest order."""
    entries = read_manifest(Path(directory))
    if jobs > 1 and len(entries) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_entry, directory, e, budget) for e in entries]
            return [f.result() for f in futures]
    return [run_entry(directory, e, budget) for e in entries]


def format_report(results: Sequence[EntryResult]) -> str:
    return "".join(line + "\n" for line in ["\t".join(REPORT_COLUMNS)] + [r.tsv() for r in results])


def cmd_corpus(args) -> int:
    if not Path(args.dir).is_dir():
        raise UsageError(f"not a directory: {args.dir}")
    config = read_config(args.config)
    budget = resolve_budget(args.budget, config)
    jobs = args.jobs if args.jobs is not None else int(config.get("jobs", 1))
    results = corpus_run(args.dir, budget, jobs)
    report = format_report(results)
    if args.report:
        _write(args.report, report)
    else:
        sys.stdout.write(report)
    return OK if all(r.passed for r in results) else FAILURE


# -- argument parsing --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="epscalc", description="Epsilon calculus toolkit for arithmetic.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log solver steps to stderr")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("parse", help="parse terms/formulas and print them in normal form")
    s.add_argument("file", help="one expression per line ('-' for stdin)")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("translate", help="replace quantifiers by epsilon terms")
    s.add_argument("file")
    s.set_defaults(func=cmd_translate)

    s = sub.add_parser("eval", help="evaluate closed real terms and formulas")
    s.add_argument("file")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("check", help="check a derivation file")
    s.add_argument("--regime", choices=[r.value for r in Regime], default="strict")
    s.add_argument("file")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("solve", help="run the epsilon substitution method")
    s.add_argument("file")
    s.add_argument("--budget", type=_natural, help=f"maximum number of updates (env {BUDGET_ENV})")
    s.add_argument("--trace", metavar="OUT.tsv", help="write the solver trace")
    s.add_argument("--emit-real", metavar="OUT.drv", help="write the extracted real derivation")
    s.add_argument("--config", help="key = value configuration file")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("transform", help="build real derivations with weight traces")
    kinds = s.add_subparsers(dest="kind", required=True, metavar="KIND")
    for name, helptext in (("neq", "derivation of ~ n = m"), ("value", "derivation of t = value")):
        k = kinds.add_parser(name, help=helptext)
        if name == "neq":
            k.add_argument("n", type=_natural)
            k.add_argument("m", type=_natural)
        else:
            k.add_argument("term")
        k.add_argument("--weights", action="store_true", help="print the weight trace")
        k.add_argument("--emit", metavar="FILE", help="write the derivation to FILE")
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("ord", help="ordinal notations below epsilon_0")
    ops = s.add_subparsers(dest="op", required=True, metavar="OP")
    k = ops.add_parser("cmp", help="compare two ordinal expressions, printing <, = or >")
    k.add_argument("a")
    k.add_argument("b")
    s.set_defaults(func=cmd_ord)

    s = sub.add_parser("corpus", help="run a corpus directory with manifest.tsv")
    s.add_argument("dir")
    s.add_argument("--report", metavar="OUT.tsv", help="write the report here instead of stdout")
    s.add_argument("--budget", type=_natural)
    s.add_argument("--jobs", type=_natural, help="worker processes")
    s.add_argument("--config")
    s.set_defaults(func=cmd_corpus)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE
    except DomainError as err:
        print(f"error: {err}", file=sys.stderr)
        return FAILURE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
