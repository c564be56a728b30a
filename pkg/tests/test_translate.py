import random

from hypothesis import given, settings

from epscalc.esubst import eval_least_witness
from epscalc.parsing import format_node, parse_formula as F, parse_term as T
from epscalc.syntax import (
    And, Eps, Eq, Exists, Forall, Lt, Not, Or, Var, numeral, substitute, subterms,
)
from epscalc.translate import DEMO_INPUT, demo_translation, eps_translate, eps_translate_term_demo
from strategies import formulas

DISPLAY = "eps x (x < eps z (x < z)) < eps y (eps x (x < eps z (x < z)) < y)"


def test_demo_matches_display():
    assert demo_translation() == F(DISPLAY)
    assert format_node(demo_translation()) == DISPLAY
    assert eps_translate(F(DEMO_INPUT)) == demo_translation()
    assert eps_translate_term_demo() == demo_translation()
    assert eps_translate_term_demo(F("Ex x x = 0")) == F("eps x (x = 0) = 0")


def test_exists_single():
    assert eps_translate(F("Ex x x = 0")) == Eq(Eps("x", Eq(Var("x"), numeral(0))), numeral(0))


def test_forall_single():
    out = eps_translate(F("All x x = x"))
    e = T("eps x (~x = x)")
    assert out == Eq(e, e)


def test_exists_generic_matrix():
    a = F("(x + y) = 3")
    inner = Eps("z", substitute(a, "y", Var("z")))
    ex = Eps("x", substitute(a, "y", inner))
    ey = Eps("y", substitute(a, "x", ex))
    expected = substitute(substitute(a, "x", ex), "y", ey)
    assert eps_translate(Exists("x", Exists("y", a))) == expected


def test_forall_exists_mixture():
    out = eps_translate(F("All x Ex y x < y"))
    assert not out.has_quantifier
    assert out.is_closed


def test_quantifier_inside_epsilon_body():
    out = eps_translate(F("0 = eps x (Ex y x < y)"))
    assert not out.has_quantifier


def test_vacuous_quantifier_dropped():
    assert eps_translate(F("Ex x 0 = 0")) == F("0 = 0")


def test_quantifier_free_unchanged():
    f = F("(0 = 0 -> eps x (x < 2) < 3)")
    assert eps_translate(f) is f


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_output_has_no_quantifiers(f):
    out = eps_translate(f)
    assert not any(isinstance(n, (Exists, Forall)) for n in subterms(out))
    assert out.free_vars <= f.free_vars


# bounded quantifiers: brute force over 0..N against least-witness epsilons

N = 4


def _qeval(f):
    if isinstance(f, Exists):
        return any(_qeval(substitute(f.body, f.var, numeral(k))) for k in range(N + 1))
    if isinstance(f, Forall):
        return all(_qeval(substitute(f.body, f.var, numeral(k))) for k in range(N + 1))
    if isinstance(f, Not):
        return not _qeval(f.arg)
    if isinstance(f, And):
        return _qeval(f.left) and _qeval(f.right)
    if isinstance(f, Or):
        return _qeval(f.left) or _qeval(f.right)
    return eval_least_witness(f, 0)


def _matrix(rng, names):
    def term():
        if names and rng.random() < 0.6:
            return Var(rng.choice(names))
        return numeral(rng.randint(0, N))

    def atom():
        return (Eq if rng.random() < 0.5 else Lt)(term(), term())

    f = atom()
    for _ in range(rng.randint(0, 2)):
        f = (And if rng.random() < 0.5 else Or)(f, atom() if rng.random() < 0.7 else Not(atom()))
    return f


def _bounded(rng, names, depth):
    if depth == 0:
        return _matrix(rng, names)
    v = "xyzw"[len(names)]
    body = _bounded(rng, names + [v], depth - 1)
    guard = Lt(Var(v), numeral(rng.randint(1, N)))
    if rng.random() < 0.5:
        return Exists(v, And(guard, body))
    return Forall(v, Or(Not(guard), body))


def test_equisatisfiable_bounded():
    rng = random.Random(7)
    for _ in range(300):
        f = _bounded(rng, [], rng.randint(1, 3))
        assert _qeval(f) == eval_least_witness(eps_translate(f), N), format_node(f)
