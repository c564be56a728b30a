"""Acceptance criteria 1-9, each with its time limit.

Every test carries a ``criterion`` marker; conftest.py prints one
PASS/FAIL line per criterion at the end of the run.
"""
import random
import time
from pathlib import Path

import pytest

from epscalc import ordinals
from epscalc.cli import corpus_run, read_manifest
from epscalc.esubst import BudgetExhausted, eval_under, extract_real, solve
from epscalc.evaluate import term_value, truth
from epscalc.ordinals import (
    PairWeight, check_descent, cmp_cnf, cmp_pair, cmp_seq, cmp_triple, embed, parse_ordinal,
)
from epscalc.parsing import format_node, parse_derivation, parse_formula, parse_term
from epscalc.proofs import Regime, check, soundness_audit
from epscalc.syntax import And, Imp, Not, Or, numeral
from epscalc.transform import derive_neq, derive_sum_value, derive_term_value
from epscalc.translate import DEMO_INPUT, eps_translate
import gen

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

DISPLAYED = "eps x (x < eps z (x < z)) < eps y (eps x (x < eps z (x < z)) < y)"


class Clock:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.2f}s, limit {self.limit}s"


def _report(n, text):
    print(f"\ncriterion {n}: {text}")


# 1 -------------------------------------------------------------------------

@pytest.mark.criterion(1, "translation golden, < 1 s")
def test_translation_golden():
    with Clock(1.0) as c:
        out = eps_translate(parse_formula(DEMO_INPUT))
    assert out == parse_formula(DISPLAYED)
    assert format_node(out) == DISPLAYED
    _report(1, f"{format_node(out)} in {c.elapsed:.4f}s")


# 2 -------------------------------------------------------------------------

@pytest.mark.criterion(2, "evaluator oracle equivalence, < 10 s")
def test_evaluator_oracle():
    rng = random.Random(2002)
    with Clock(10.0) as c:
        for _ in range(10_000):
            t = gen.real_term(rng, 8)
            assert term_value(t) == gen.oracle(t)
        for _ in range(10_000):
            a = gen.real_formula(rng, 3)
            b = gen.real_formula(rng, 3)
            ta, tb = truth(a), truth(b)
            assert ta == gen.oracle(a)
            assert truth(Not(a)) == (not ta)
            assert truth(And(a, b)) == (ta and tb)
            assert truth(Or(a, b)) == (ta or tb)
            assert truth(Imp(a, b)) == ((not ta) or tb)
    _report(2, f"2 x 10^4 samples in {c.elapsed:.2f}s")


# 3 -------------------------------------------------------------------------

@pytest.mark.criterion(3, "real-subsystem soundness on 10^4 fuzzed derivations, < 60 s")
def test_strict_soundness():
    rng = random.Random(3003)
    lines = 0
    with Clock(60.0) as c:
        for _ in range(10_000):
            d = gen.strict_derivation(rng, rng.randint(1, 12))
            check(d, Regime.STRICT)
            assert soundness_audit(d) is None
            lines += len(d)
    _report(3, f"10^4 derivations, {lines} lines, in {c.elapsed:.2f}s")


# 4 -------------------------------------------------------------------------

@pytest.mark.criterion(4, "conservativity end-to-end on the corpus, < 60 s")
def test_corpus_conservativity():
    entries = read_manifest(CORPUS)
    ideal = [e for e in entries if e.regime == "ideal"]
    assert len(ideal) >= 25
    with Clock(60.0) as c:
        results = corpus_run(str(CORPUS))
        failed = [(r.name, r.outcome) for r in results if not r.passed]
        assert not failed
        # and independently of the corpus runner
        for e in ideal:
            d = parse_derivation((CORPUS / e.file).read_text())
            S, _ = solve(d)
            real = extract_real(d, S)
            check(real, Regime.EXTENDED)
            assert real.end_formula == d.end_formula
    _report(4, f"{len(ideal)} ideal derivations in {c.elapsed:.2f}s")


# 5 -------------------------------------------------------------------------

def _least(pred, bound):
    return next(k for k in range(bound + 1) if pred(k))


@pytest.mark.criterion(5, "two critical formulas solve in exactly 2 updates")
def test_two_critical_steps():
    d = parse_derivation((CORPUS / "two_critical.drv").read_text())
    S, trace = solve(d)
    assert len(trace) == 2
    e_a = parse_term("eps x (0'' < x)")
    e_b = parse_term("eps y (0' < y)")
    # A(x) is 2 < x with instance 5; B(y) is 1 < y with instance eps_x A(x)
    n = _least(lambda k: truth(parse_formula(f"2 < {k}")), 5)
    m = _least(lambda k: truth(parse_formula(f"1 < {k}")), n)
    assert (eval_under(S, e_a), eval_under(S, e_b)) == (n, m) == (3, 2)
    _report(5, f"2 updates, values {n} and {m}")


# 6 -------------------------------------------------------------------------

@pytest.mark.criterion(6, "weight descent goldens")
def test_weight_goldens():
    d, w = derive_sum_value(parse_term("(3 + (10 + 1))"))
    assert w[:3] == [PairWeight(2, 1), PairWeight(2, 0), PairWeight(1, 11)]
    assert check_descent([embed(x) for x in w]) is None
    check(d, Regime.STRICT)
    for n in range(0, 25):
        for m in range(0, 25):
            if n == m:
                continue
            d, w = derive_neq(n, m)
            check(d, Regime.STRICT)
            assert all(a > b for a, b in zip(w, w[1:]))
            if n < m:
                assert len(d) == 4 * n + 1
    _report(6, "<2,1> <2,0> <1,11> ...; neq line counts 4n+1")


# 7 -------------------------------------------------------------------------

SAMPLES = 100_000


def _laws(cmp, draw, rng):
    for _ in range(SAMPLES):
        a, b, c = draw(rng), draw(rng), draw(rng)
        assert cmp(a, a) == 0
        ab, ba = cmp(a, b), cmp(b, a)
        assert ab in (-1, 0, 1) and ab == -ba
        assert (ab == 0) == (a == b)
        bc = cmp(b, c)
        if ab <= 0 and bc <= 0:
            # a <= b <= c, strict as soon as one step is strict
            assert cmp(a, c) == min(ab, bc)


@pytest.mark.criterion(7, "ordinal order laws on 10^5 samples, < 30 s")
def test_order_laws():
    rng = random.Random(7007)
    with Clock(30.0) as c:
        _laws(cmp_pair, lambda r: gen.pair(r, 3), rng)
        _laws(cmp_triple, lambda r: gen.triple(r, 2), rng)
        _laws(cmp_seq, lambda r: gen.seq(r, 3, 2), rng)
        _laws(cmp_cnf, lambda r: gen.cnf(r, 2, 2), rng)
        for _ in range(SAMPLES):
            p, q = gen.pair(rng), gen.pair(rng)
            assert cmp_pair(p, q) == cmp_cnf(embed(p), embed(q))
            x, y = gen.triple(rng), gen.triple(rng)
            assert cmp_triple(x, y) == cmp_cnf(embed(x), embed(y))
            s, t = gen.seq(rng), gen.seq(rng)
            assert cmp_seq(s, t) == cmp_cnf(embed(s), embed(t))
        assert ordinals.add(ordinals.OMEGA, ordinals.OMEGA) == parse_ordinal("w*2")
        assert parse_ordinal("w^3") < parse_ordinal("w^w")
    _report(7, f"4 x 10^5 law samples plus 3 x 10^5 embeddings in {c.elapsed:.2f}s")


# 8 -------------------------------------------------------------------------

def _transform_traces():
    rng = random.Random(8008)
    for n, m in [(2, 4), (7, 3), (0, 9), (12, 30)]:
        yield [embed(w) for w in derive_neq(n, m)[1]]
    for _ in range(30):
        yield [embed(w) for w in derive_sum_value(gen.sum_term(rng, 4, 9))[1]]
    for _ in range(30):
        yield [embed(w) for w in derive_term_value(gen.bounded_real_term(rng, 3, 5))[1]]


def _corpus_traces():
    for e in read_manifest(CORPUS):
        if e.regime != "ideal":
            continue
        _, trace = solve(parse_derivation((CORPUS / e.file).read_text()))
        ords = trace.ordinals()
        if ords is not None:
            yield e.name, ords


@pytest.mark.criterion(8, "descent monitoring on solver and transform traces")
def test_descent_monitoring():
    rng = random.Random(8009)
    corpus = list(_corpus_traces())
    transform = list(_transform_traces())
    assert len(corpus) >= 15
    traces = [o for _, o in corpus] + transform
    injected = 0
    for ords in traces:
        assert check_descent(ords) is None
        if len(ords) < 2:
            continue
        # repeat an element: the copy is the first offender
        i = rng.randrange(len(ords))
        bad = ords[:i + 1] + [ords[i]] + ords[i + 1:]
        assert check_descent(bad) == i + 1
        # swap two neighbours: the later one now climbs
        j = rng.randrange(len(ords) - 1)
        bad = ords[:j] + [ords[j + 1], ords[j]] + ords[j + 2:]
        assert check_descent(bad) == j + 1
        injected += 2
    _report(8, f"{len(corpus)} solver traces, {len(transform)} transform traces, "
               f"{injected} injected violations caught")


# 9 -------------------------------------------------------------------------

@pytest.mark.criterion(9, "budget 0 reports budget-exhausted instead of crashing")
def test_budget_zero_is_reported():
    hits = 0
    for e in read_manifest(CORPUS):
        if e.regime != "ideal":
            continue
        d = parse_derivation((CORPUS / e.file).read_text())
        try:
            S, trace = solve(d, budget=0)
        except BudgetExhausted as err:
            assert err.budget == 0 and len(err.trace) == 0
            hits += 1
        else:
            # already solved by the all-zero substitution
            assert len(trace) == 0
    assert hits >= 20
    _report(9, f"{hits} corpus derivations stop with budget-exhausted at budget 0")
