"""Regenerate corpus/ : ideal derivations of real formulas plus manifest.tsv.

Every derivation is built with the library, checked in its regime, and
(for ideal entries) solved once to freeze the expected number of steps.
Hand-computed step counts are asserted where they are known.

    python tools/make_corpus.py [outdir]
"""
from __future__ import annotations

import sys
from pathlib import Path

from epscalc import esubst, proofs, transform
from epscalc.parsing import format_derivation, parse_formula as F, parse_term as T
from epscalc.proofs import Regime
from epscalc.syntax import (
    Axiom, AxiomTag, Derivation, Eps, Imp, Line, Lt, ModusPonens, Succ, numeral, substitute,
)
from epscalc.translate import eps_translate

AX = Axiom
MP = ModusPonens


def crit1(body: str, var: str, t) -> Line:
    A = F(body)
    e = Eps(var, A)
    t = T(t) if isinstance(t, str) else t
    return Line(Imp(substitute(A, var, t), substitute(A, var, e)), AX(AxiomTag.CRIT1))


def crit2(body: str, var: str, t) -> Line:
    A = F(body)
    e = Eps(var, A)
    t = T(t) if isinstance(t, str) else t
    return Line(Imp(substitute(A, var, t), Lt(e, Succ(t))), AX(AxiomTag.CRIT2))


def with_conclusion(ideal: list[Line], real: Derivation) -> Derivation:
    """Ideal lines first, then a real derivation of R, then R again via the ideal detour."""
    lines = list(ideal)
    x = lines[0].formula
    base = len(lines)
    lines += proofs.shift_lines(real.lines, base)
    r_at = len(lines)
    r = real.end_formula
    lines.append(Line(Imp(x, Imp(r, r)), AX(AxiomTag.TAUT)))
    lines.append(Line(Imp(r, r), MP(1, len(lines))))
    lines.append(Line(r, MP(r_at, len(lines))))
    return Derivation(tuple(lines))


def neq(n, m):
    return transform.derive_neq(n, m)[0]


def value(t):
    return transform.derive_term_value(T(t))[0]


def refl(n):
    return Derivation((Line(F(f"{n} = {n}"), AX(AxiomTag.ID_REFL)),))


def entries():
    # (name, derivation, regime, expected steps or None)
    single = [
        ("0'' < x", "x", "5", 1),
        ("0'' < x", "x", "3", 1),
        ("x < 3", "x", "2", 0),
        ("(x * x) = 9", "x", "3", 1),
        ("3 < (x + x)", "x", "4", 1),
        ("(~x = 0 & x < 4)", "x", "2", 1),
        ("(x * 2) = (x + 5)", "x", "5", 1),
        ("~(x + 1) < 4", "x", "7", 1),
    ]
    reals = [neq(2, 4), value("(3 + (10 + 1))"), refl(0), neq(3, 1), value("(2 * 2)"),
             neq(0, 1), value("((1 + 1) * 3)"), refl(7)]
    for i, ((body, v, t, steps), real) in enumerate(zip(single, reals), 1):
        yield f"single_eps_{i}", with_conclusion([crit1(body, v, t)], real), "ideal", steps

    # two critical formulas: B's instance is A's epsilon term
    ea = "eps x (0'' < x)"
    two = [
        crit1("0'' < x", "x", "5"),
        crit1("0' < y", "y", ea),
    ]
    yield "two_critical", with_conclusion(two, neq(1, 2)), "ideal", 2
    yield "two_critical_swapped", with_conclusion(two[::-1], refl(3)), "ideal", 2

    # independent epsilon terms
    yield "two_independent", with_conclusion(
        [crit1("0'' < x", "x", "5"), crit1("(y * y) = 16", "y", "4")], neq(0, 2)), "ideal", 2
    yield "three_independent", with_conclusion(
        [crit1("x = 7", "x", "7"), crit1("1 < y", "y", "9"), crit1("(z + z) = 6", "z", "3")],
        value("(1 + 1)")), "ideal", 3

    # identity axiom with nested epsilon terms
    eb = f"eps y ({ea} < (y * y))"
    hazard = [
        crit1("0'' < x", "x", "5"),
        Line(F(f"3 = {ea} -> eps y (3 < (y * y)) = {eb}"), AX(AxiomTag.ID_SUBST_TERM)),
        crit1(f"{ea} < (y * y)", "y", "4"),
        crit1("3 < (y * y)", "y", "4"),
    ]
    yield "identity_hazard", with_conclusion(hazard, neq(2, 3)), "ideal", 2
    yield "identity_hazard_reordered", with_conclusion(
        [hazard[2], hazard[0], hazard[3], hazard[1]], refl(1)), "ideal", 3
    yield "identity_formula", with_conclusion([
        crit1("0'' < x", "x", "5"),
        Line(F(f"3 = {ea} -> (0 < 3 -> 0 < {ea})"), AX(AxiomTag.ID_SUBST_FORMULA)),
    ], neq(1, 0)), "ideal", 1

    # critical formulas of the second kind
    yield "crit2_single", with_conclusion(
        [crit2("0'' < x", "x", "5"), crit1("0'' < x", "x", "5")], refl(2)), "ideal", 1
    yield "crit2_least", with_conclusion(
        [crit1("(x * x) = 4", "x", "2"), crit2("(x * x) = 4", "x", "2")], neq(0, 4)), "ideal", 1
    yield "crit2_only", with_conclusion(
        [crit2("x < 3", "x", "1")], value("(2 + 2)")), "ideal", 0
    yield "crit2_nested", with_conclusion([
        crit1("0 < x", "x", "1"),
        crit2("eps x (0 < x) < y", "y", "2"),
        crit1("eps x (0 < x) < y", "y", "2"),
    ], refl(4)), "ideal", 2

    # types of rank 2 from translating nested quantifiers
    ex = eps_translate(F("Ex x Ex y x < y"))  # eps x (x < eps z (x < z)) < eps y (...)
    exx = ex.left
    A = exx.body
    rank2 = [
        Line(Imp(substitute(A, exx.var, numeral(0)), substitute(A, exx.var, exx)), AX(AxiomTag.CRIT1)),
        crit1("0 < z", "z", "1"),
    ]
    yield "rank2_translation", with_conclusion(rank2, neq(1, 3)), "ideal", None
    yield "rank2_translation_reordered", with_conclusion(rank2[::-1], refl(5)), "ideal", None
    yield "rank2_with_crit2", with_conclusion([
        crit1("1 < z", "z", "2"),
        Line(Imp(substitute(A, exx.var, numeral(1)), substitute(A, exx.var, exx)), AX(AxiomTag.CRIT1)),
        crit2("1 < z", "z", "2"),
    ], neq(0, 5)), "ideal", None

    # a rank-1 update after a rank-2 entry was stored clears that entry
    yield "rank2_reset", with_conclusion([
        crit1("1 < z", "z", "2"),
        Line(Imp(substitute(A, exx.var, numeral(1)), substitute(A, exx.var, exx)), AX(AxiomTag.CRIT1)),
        crit1("0 < z", "z", "1"),
    ], neq(2, 0)), "ideal", 3
    yield "eps_in_instance", with_conclusion([
        crit1("0'' < x", "x", "5"),
        crit1("3 < y", "y", f"({ea} + 1)"),
    ], value("(1 * 1)")), "ideal", 2

    # epsilon terms flowing through modus ponens
    yield "mp_through_eps", Derivation((
        Line(F("~0 = 3"), AX(AxiomTag.ARITH1)),
        crit1("~0 = x", "x", "3"),
        Line(F("~0 = eps x (~0 = x)"), MP(1, 2)),
        Line(F("(~0 = eps x (~0 = x) -> (0 = 0 | ~0 = 0))"), AX(AxiomTag.TAUT)),
        Line(F("(0 = 0 | ~0 = 0)"), MP(3, 4)),
    )), "ideal", 1
    yield "ideal_only_real", neq(4, 9), "ideal", 0

    # real derivations, checked only
    yield "strict_neq_2_4", neq(2, 4), "strict", None
    yield "strict_sum", value("(3 + (10 + 1))"), "strict", None
    yield "strict_product", value("((2 * 3) + 1)"), "strict", None


def main(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    rows = ["name\tfile\tregime\texpected"]
    for name, d, regime, steps in entries():
        proofs.check(d, Regime(regime))
        fname = f"{name}.drv"
        (out / fname).write_text(format_derivation(d), encoding="utf-8")
        if regime != "ideal":
            rows.append(f"{name}\t{fname}\t{regime}\tchecks")
            continue
        _, trace = esubst.solve(d)
        if steps is not None and len(trace) != steps:
            raise AssertionError(f"{name}: {len(trace)} steps, expected {steps}")
        expected = f"solves-in-{len(trace)}-steps" if steps is not None else "extracts-real"
        rows.append(f"{name}\t{fname}\t{regime}\t{expected}")
    (out / "manifest.tsv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    print(f"wrote {len(rows) - 1} entries to {out}")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "corpus")
