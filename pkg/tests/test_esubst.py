from pathlib import Path

import pytest

from epscalc.esubst import (
    EMPTY, BudgetExhausted, DescentMonitor, EpsilonType, NotSolving, SolverError,
    Substitution, descent_ok, eval_least_witness, eval_under, extract_real,
    find_false_critical, realize, solve, type_of, update,
)
from epscalc.evaluate import truth
from epscalc.parsing import parse_derivation, parse_formula as F, parse_term as T
from epscalc.proofs import Regime, check
from epscalc.syntax import Eps, numeral

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def corpus(name):
    return parse_derivation((CORPUS / f"{name}.drv").read_text())


# -- types -------------------------------------------------------------------

def test_type_of_closed_argument():
    t, args = type_of(T("eps x (0'' < x)"))
    assert t.arity == 1 and args == (numeral(2),)
    assert t.rank == 1
    assert t.skeleton == T("eps v0 (p1 < v0)")


def test_type_shared_between_instances():
    a, _ = type_of(T("eps x (0'' < x)"))
    b, _ = type_of(T("eps y (0' < y)"))
    assert a == b


def test_type_abstracts_nested_closed_eps():
    t, args = type_of(T("eps y (eps x (x = 1) < y)"))
    assert args == (T("eps x (x = 1)"),)
    assert t.rank == 1


def test_type_rank_two():
    # the inner epsilon mentions the outer bound variable, so it stays
    t, args = type_of(T("eps x (x < eps z (x < z))"))
    assert args == ()
    assert t.rank == 2


def test_type_instantiate_roundtrip():
    e = T("eps x ((x + 0') = (0''' * eps y (y = 0)))")
    t, args = type_of(e)
    again = t.instantiate(args)
    assert type_of(again) == (t, args)
    with pytest.raises(ValueError):
        t.instantiate(())


def test_type_of_rejects_open():
    with pytest.raises(ValueError):
        type_of(Eps("x", F("x < y")))
    with pytest.raises(TypeError):
        type_of(numeral(2))


def test_placeholders():
    t = EpsilonType(T("eps v0 ((p1 + v0) < p2)"), 2)
    assert t.placeholders == ("p1", "p2")


# -- substitutions ------------------------------------------------------------

def _ty():
    return type_of(T("eps x (0'' < x)"))[0]


def test_substitution_defaults_to_zero():
    assert EMPTY.lookup(_ty(), (2,)) == 0
    assert len(EMPTY) == 0


def test_substitution_immutable_assign():
    s = EMPTY.assign(_ty(), (2,), 3)
    assert s.lookup(_ty(), (2,)) == 3
    assert EMPTY.lookup(_ty(), (2,)) == 0
    assert s.assign(_ty(), (2,), 0) == EMPTY


def test_substitution_reset():
    t = _ty()
    u = type_of(T("eps x (x < eps z (x < z))"))[0]
    s = EMPTY.assign(t, (2,), 3).assign(u, (), 7)
    assert s.reset([u]) == EMPTY.assign(t, (2,), 3)
    assert set(s.types()) == {t, u}
    assert sorted(v for _, _, v in s.entries()) == [3, 7]


def test_eval_under():
    s = EMPTY.assign(_ty(), (2,), 3)
    assert eval_under(s, T("eps y (0'' < y)")) == 3
    assert eval_under(s, T("eps x (0' < x)")) == 0
    assert eval_under(s, F("0'' < eps x (0'' < x)")) is True
    assert eval_under(EMPTY, F("(1 + 1) = 2")) is True


def test_eval_under_arguments_are_evaluated():
    # the argument (1 + 1) has value 2, so it reads the same table entry
    s = EMPTY.assign(_ty(), (2,), 5)
    assert eval_under(s, T("eps x ((1 + 1) < x)")) == 5


def test_least_witness():
    assert eval_least_witness(T("eps x (0'' < x)"), 10) == 3
    assert eval_least_witness(T("eps x (x = 0''''')"), 3) == 0
    assert eval_least_witness(F("eps x (x = 0'') = 2"), 5) is True


def test_realize():
    s = EMPTY.assign(_ty(), (2,), 3)
    assert realize(F("0'' < eps x (0'' < x)"), s) == F("2 < 3")


# -- update and solve ----------------------------------------------------------

TWO = """
ax:crit1 (0'' < 0''''' -> 0'' < eps x (0'' < x))
ax:crit1 (0' < eps x (0'' < x) -> 0' < eps y (0' < y))
"""


def test_find_false_critical():
    d = parse_derivation(TWO)
    assert find_false_critical(EMPTY, d) == 1
    s = update(EMPTY, d, 1)
    assert s.lookup(_ty(), (2,)) == 3
    assert find_false_critical(s, d) == 2
    s = update(s, d, 2)
    assert find_false_critical(s, d) is None


def test_update_rejects_true_line():
    d = parse_derivation(TWO)
    with pytest.raises(ValueError):
        update(EMPTY, d, 2)


def test_update_rejects_non_critical():
    d = parse_derivation("ax:id-refl 0 = 0\n")
    with pytest.raises(ValueError):
        update(EMPTY, d, 1)


def test_update_picks_least_witness():
    d = parse_derivation("ax:crit1 (0 < 0''''' -> 0 < eps x (0 < x))\n")
    s = update(EMPTY, d, 1)
    assert eval_under(s, T("eps x (0 < x)")) == 1


def test_solve_two_critical():
    d = corpus("two_critical")
    s, trace = solve(d)
    assert len(trace) == 2
    assert eval_under(s, T("eps x (0'' < x)")) == 3
    assert eval_under(s, T("eps y (0' < y)")) == 2
    assert [st.line for st in trace.steps] == [1, 2]
    assert descent_ok(trace)


def test_solve_zero_steps():
    s, trace = solve(corpus("single_eps_3"))
    assert len(trace) == 0 and s == EMPTY


def test_solve_one_step():
    s, trace = solve(corpus("single_eps_1"))
    assert len(trace) == 1
    assert trace.steps[0].old == 0 and trace.steps[0].new == 3


def test_solution_makes_every_critical_line_true():
    d = corpus("identity_hazard_reordered")
    s, _ = solve(d)
    assert find_false_critical(s, d) is None
    for line in d.lines:
        assert eval_under(s, line.formula) is True


def test_higher_rank_reset():
    d = corpus("rank2_reset")
    s, trace = solve(d)
    assert len(trace) == 3
    assert any(st.resets for st in trace.steps)
    for st in trace.steps:
        for u in st.resets:
            assert u.rank > st.type.rank
    assert find_false_critical(s, d) is None


def test_solve_rejects_non_real_end():
    d = parse_derivation("ax:crit1 (0 < 0' -> 0 < eps x (0 < x))\n")
    with pytest.raises(ValueError):
        solve(d)


def test_budget_zero():
    with pytest.raises(BudgetExhausted) as err:
        solve(corpus("two_critical"), budget=0)
    assert err.value.budget == 0
    assert len(err.value.trace) == 0


def test_budget_one_partial_state():
    with pytest.raises(BudgetExhausted) as err:
        solve(corpus("two_critical"), budget=1)
    assert len(err.value.trace) == 1
    assert find_false_critical(err.value.substitution, corpus("two_critical")) == 2


def test_trace_tsv():
    _, trace = solve(corpus("two_critical"))
    rows = trace.to_tsv().splitlines()
    assert rows[0].split("\t")[:3] == ["step", "line", "type"]
    assert len(rows) == 3


# -- extraction ----------------------------------------------------------------

@pytest.mark.parametrize("name", [
    "two_critical", "identity_hazard", "identity_formula", "crit2_nested",
    "rank2_translation", "rank2_reset", "mp_through_eps",
])
def test_extract_real(name):
    d = corpus(name)
    s, _ = solve(d)
    r = extract_real(d, s)
    check(r, Regime.EXTENDED)
    assert r.end_formula == d.end_formula
    assert all(truth(line.formula) for line in r.lines)


def test_extract_real_not_solving():
    d = corpus("two_critical")
    with pytest.raises(NotSolving) as err:
        extract_real(d, EMPTY)
    assert err.value.line == 1


# -- descent monitor -----------------------------------------------------------

def test_monitor_counts_unset_terms():
    d = corpus("two_critical")
    m = DescentMonitor(d)
    assert m.applicable
    w0 = m.weight(EMPTY)
    s, trace = solve(d)
    assert m.weight(s) < w0
    assert trace.ordinals()[0] == m.ordinal(EMPTY)


def test_monitor_not_applicable_to_rank_two():
    d = corpus("rank2_translation")
    m = DescentMonitor(d)
    assert not m.applicable
    assert m.weight(EMPTY) is None
    _, trace = solve(d)
    assert trace.ordinals() is None
    assert descent_ok(trace)


def test_solver_error_is_runtime_error():
    assert issubclass(SolverError, RuntimeError)


def test_substitution_hash_and_eq():
    a = Substitution({_ty(): {(2,): 3, (4,): 0}})
    b = EMPTY.assign(_ty(), (2,), 3)
    assert a == b and hash(a) == hash(b)
