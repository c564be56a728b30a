"""Values of closed epsilon-free terms and truth of real formulas."""
from __future__ import annotations

from .syntax import (
    Add, And, Eps, Eq, Exists, Forall, Formula, Imp, Lt, Mul, Node, Not, Or,
    Succ, Term, Var, Zero,
)


class NotRealError(ValueError):
    """The input contains a variable, an epsilon term or a quantifier."""


class IdealTermError(NotRealError):
    pass


def term_value(t: Term) -> int:
    """Natural number denoted by a closed, epsilon-free term."""
    return _Evaluator().value(t)


def truth(formula: Formula) -> bool:
    """Truth value of a real (closed, epsilon-free, quantifier-free) formula."""
    return _Evaluator().truth(formula)


def evaluate(node: Node) -> int | bool:
    if isinstance(node, Term):
        return term_value(node)
    return truth(node)


class _Evaluator:
    def __init__(self):
        self.memo: dict[int, tuple[Term, int]] = {}

    def value(self, t: Term) -> int:
        key = id(t)
        hit = self.memo.get(key)
        if hit is not None and hit[0] is t:
            return hit[1]
        if isinstance(t, Zero):
            v = 0
        elif isinstance(t, Succ):
            v = self.value(t.arg) + t.count
        elif isinstance(t, Add):
            v = self.value(t.left) + self.value(t.right)
        elif isinstance(t, Mul):
            v = self.value(t.left) * self.value(t.right)
        elif isinstance(t, Eps):
            raise IdealTermError(f"epsilon term has no finitary value: {t}")
        elif isinstance(t, Var):
            raise IdealTermError(f"free variable {t.name!r} has no value")
        else:
            raise TypeError(f"not a term: {t!r}")
        self.memo[key] = (t, v)
        return v

    def truth(self, f: Formula) -> bool:
        if isinstance(f, Eq):
            return self.value(f.left) == self.value(f.right)
        if isinstance(f, Lt):
            return self.value(f.left) < self.value(f.right)
        if isinstance(f, Not):
            return not self.truth(f.arg)
        if isinstance(f, Or):
            return self.truth(f.left) or self.truth(f.right)
        if isinstance(f, And):
            return self.truth(f.left) and self.truth(f.right)
        if isinstance(f, Imp):
            return (not self.truth(f.left)) or self.truth(f.right)
        if isinstance(f, (Exists, Forall)):
            raise NotRealError("quantified formulas are not real")
        raise TypeError(f"not a formula: {f!r}")
