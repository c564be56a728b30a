"""Quantifier elimination by epsilon terms.

``Ex x B`` becomes ``B[x := eps x B]`` and ``All x B`` becomes
``B[x := eps x ~B]``, applied innermost first.  Binders inside the new
epsilon term that share a name with a binder of the host formula are
renamed to the first unused name of ``z, w, u, v, z1, ...`` so the output
reads unambiguously.
"""
from __future__ import annotations

import itertools
from typing import Optional

from .parsing import parse_formula
from .syntax import (
    BINDERS, Eps, Exists, Forall, Formula, Node, Not, Term, Var, all_names,
    map_terms, substitute, subterms,
)

_POOL = ("z", "w", "u", "v")


def _names_pool():
    yield from _POOL
    for i in itertools.count(1):
        for base in _POOL:
            yield f"{base}{i}"


def _rename_apart(e: Eps, host: Node) -> Eps:
    clash = {n.var for n in subterms(host) if isinstance(n, BINDERS)}
    if not clash:
        return e
    used = all_names(host) | all_names(e)
    pool = (n for n in _names_pool() if n not in used)
    chosen: dict[str, str] = {}

    def go(n: Node, top: bool) -> Node:
        if isinstance(n, BINDERS):
            var, body = n.var, n.body
            if not top and var in clash:
                if var not in chosen:
                    chosen[var] = next(pool)
                body = substitute(body, var, Var(chosen[var]))
                var = chosen[var]
            return type(n)(var, go(body, False))
        kids = n.children()
        if not kids:
            return n
        return n.rebuild(tuple(go(c, False) for c in kids))

    return go(e, True)


def eps_translate(formula: Formula) -> Formula:
    """Replace every quantifier by the corresponding epsilon term."""
    if not formula.has_quantifier:
        return formula
    return _tr(formula)


def _tr_term(t: Term):
    if isinstance(t, Eps) and t.has_quantifier:
        return Eps(t.var, _tr(t.body))
    return None


def _tr(f: Node) -> Node:
    if not f.has_quantifier:
        return f
    if isinstance(f, (Exists, Forall)):
        body = _tr(f.body)
        if f.var not in body.free_vars:
            # vacuous quantifier
            return body
        matrix = body if isinstance(f, Exists) else Not(body)
        witness = _rename_apart(Eps(f.var, matrix), body)
        return substitute(body, f.var, witness)
    if isinstance(f, Term):
        return map_terms(f, _tr_term)
    if f.children() and all(isinstance(c, Term) for c in f.children()):
        return f.rebuild(tuple(map_terms(c, _tr_term) for c in f.children()))
    return f.rebuild(tuple(_tr(c) for c in f.children()))


DEMO_INPUT = "Ex x Ex y x < y"


def eps_translate_term_demo(formula: Optional[Formula] = None) -> Formula:
    """Translate ``formula``, by default ``Ex x Ex y x < y``.

    The default yields the nested-epsilon inequality
    ``eps x (x < eps z (x < z)) < eps y (eps x (x < eps z (x < z)) < y)``.
    """
    return eps_translate(parse_formula(DEMO_INPUT) if formula is None else formula)


def demo_translation() -> Formula:
    return eps_translate_term_demo()
