"""Constructive real derivations driven by weights that strictly decrease.

Each builder starts from its target formula as the single unjustified
line of a :class:`PartialDerivation` and repeatedly prepends a small block
of lines that justifies it from a simpler unjustified formula.  The
weight of that formula drops with every block, and the construction
stops when the unjustified formula is itself an axiom.

* :func:`derive_neq` proves ``~ n = m`` from Arith1 by peeling successors
  with Arith2 and contraposition.  Weight: the smaller argument.
* :func:`derive_sum_value` proves ``t = l`` for sums of numerals using
  Arith3 and Arith4.  Weight: ``<number of +, sum of numerals standing
  right of a +>``.
* :func:`derive_term_value` adds products via Arith5 and Arith6.
  Weight: ``<number of *, number of +, right-numeral sum>``; a product of
  numerals is unfolded completely in one macro step.

Rewriting a subterm ``u`` to ``v`` inside ``C[u] = l`` uses the glue::

    C[v] = l                                  (new unjustified line)
    u = v                                     arith axiom
    u = v -> (~C[u] = l -> ~C[v] = l)         identity
    (E -> (~X -> ~Y)) -> (E -> (Y -> X))      tautology
    E -> (Y -> X)                             mp
    Y -> X                                    mp
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .evaluate import term_value
from .ordinals import PairWeight, TripleWeight
from .syntax import (
    Add, Axiom, AxiomTag, Derivation, Eq, Imp, Line, ModusPonens, Mul, Node,
    Not, Succ, Term, Zero, is_numeral, numeral, numeral_value, pred, subterms,
)


class EqualArgumentsError(ValueError):
    pass


class UnsupportedTerm(ValueError):
    pass


# -- partial derivations -----------------------------------------------------

@dataclass
class PartialDerivation:
    """Lines of a derivation under construction, at most one unjustified.

    Lines are kept bottom-up: ``_rev[0]`` is the target, and modus ponens
    references count from the bottom, so prepending never renumbers.
    """

    _rev: list[tuple] = field(default_factory=list)
    _open: Optional[int] = None

    @classmethod
    def of_target(cls, target) -> PartialDerivation:
        return cls([(target, None)], 0)

    @property
    def unjustified(self) -> set[int]:
        """1-based line numbers (top-down) that still lack a justification."""
        return set() if self._open is None else {len(self._rev) - self._open}

    @property
    def open_formula(self):
        if self._open is None:
            raise ValueError("derivation is complete")
        return self._rev[self._open][0]

    @property
    def lines(self) -> list[tuple]:
        """``(formula, justification)`` pairs top-down; ``None`` marks the open line."""
        n = len(self._rev)
        out = []
        for formula, j in reversed(self._rev):
            if isinstance(j, tuple):
                j = ModusPonens(n - j[0], n - j[1])
            out.append((formula, j))
        return out

    def justify_axiom(self, tag: AxiomTag) -> None:
        f, _ = self._rev[self._open]
        self._rev[self._open] = (f, Axiom(tag))
        self._open = None

    def prepend(self, block: list[tuple], link: tuple[int, int]) -> None:
        """Put ``block`` on top; its first line becomes the open one.

        ``block`` holds ``(formula, justification)`` with modus ponens
        references relative to the block, and the first entry's
        justification ``None``.  ``link`` = (minor, major) inside the block
        now justifies the formerly open line.
        """
        base = len(self._rev)
        k = len(block)
        pos = lambda j: base + k - j  # noqa: E731  block line j -> bottom index
        f, _ = self._rev[self._open]
        self._rev[self._open] = (f, (pos(link[0]), pos(link[1])))
        for j in range(k, 0, -1):
            formula, just = block[j - 1]
            if isinstance(just, ModusPonens):
                just = (pos(just.minor), pos(just.major))
            self._rev.append((formula, just))
        self._open = pos(1)

    def derivation(self) -> Derivation:
        if self._open is not None:
            raise ValueError("derivation still has an unjustified line")
        return Derivation(tuple(Line(f, j) for f, j in self.lines))


# -- inequality of numerals --------------------------------------------------

def _neq_block(k: Term, j: Term) -> list[tuple]:
    # justifies ~ k' = j' from ~ k = j
    step = Imp(Eq(Succ(k), Succ(j)), Eq(k, j))
    goal = Not(Eq(Succ(k), Succ(j)))
    weaker = Not(Eq(k, j))
    return [
        (weaker, None),
        (step, Axiom(AxiomTag.ARITH2)),
        (Imp(step, Imp(weaker, goal)), Axiom(AxiomTag.TAUT)),
        (Imp(weaker, goal), ModusPonens(2, 3)),
    ]


def _neq_increasing(n: int, m: int) -> tuple[Derivation, list[int]]:
    pd = PartialDerivation.of_target(Not(Eq(numeral(n), numeral(m))))
    weights = [n]
    for k in range(n - 1, -1, -1):
        pd.prepend(_neq_block(numeral(k), numeral(k + m - n)), (1, 4))
        weights.append(k)
    pd.justify_axiom(AxiomTag.ARITH1)
    return pd.derivation(), weights


def derive_neq(n: int, m: int) -> tuple[Derivation, list[int]]:
    """Derivation of ``~ n = m`` with its weight trace.

    For ``n < m`` the result has ``4n + 1`` lines.  For ``n > m`` the
    derivation of ``~ m = n`` is followed by six lines of symmetry.
    """
    if n < 0 or m < 0:
        raise ValueError("arguments must be natural numbers")
    if n == m:
        raise EqualArgumentsError(f"{n} = {m}: the negation is false")
    if n < m:
        return _neq_increasing(n, m)
    d, weights = _neq_increasing(m, n)
    N, M = numeral(n), numeral(m)
    x, r, y = Eq(N, M), Eq(N, N), Eq(M, N)
    L = len(d)
    tail = [
        Line(Imp(x, Imp(r, y)), Axiom(AxiomTag.ID_SUBST_FORMULA)),
        Line(r, Axiom(AxiomTag.ID_REFL)),
        Line(Imp(Imp(x, Imp(r, y)), Imp(r, Imp(Not(y), Not(x)))), Axiom(AxiomTag.TAUT)),
        Line(Imp(r, Imp(Not(y), Not(x))), ModusPonens(L + 1, L + 3)),
        Line(Imp(Not(y), Not(x)), ModusPonens(L + 2, L + 4)),
        Line(Not(x), ModusPonens(L, L + 5)),
    ]
    return Derivation(d.lines + tuple(tail)), weights


# -- values of closed terms --------------------------------------------------

def _rewrite_block(ctx_new: Term, ctx_old: Term, value: Term, u: Term, v: Term,
                   tag: AxiomTag) -> list[tuple]:
    # justifies ctx_old = value from ctx_new = value, given the axiom u = v
    e = Eq(u, v)
    x, y = Eq(ctx_old, value), Eq(ctx_new, value)
    ident = Imp(e, Imp(Not(x), Not(y)))
    taut = Imp(ident, Imp(e, Imp(y, x)))
    return [
        (y, None),
        (e, Axiom(tag)),
        (ident, Axiom(AxiomTag.ID_SUBST_FORMULA)),
        (taut, Axiom(AxiomTag.TAUT)),
        (Imp(e, Imp(y, x)), ModusPonens(3, 4)),
        (Imp(y, x), ModusPonens(2, 5)),
    ]


def _contract(t: Term) -> Optional[tuple[Term, AxiomTag]]:
    # one schema step at this node, if it is a redex
    if isinstance(t, Add) and is_numeral(t.right):
        if isinstance(t.right, Zero):
            return t.left, AxiomTag.ARITH3
        return Succ(Add(t.left, pred(t.right))), AxiomTag.ARITH4
    if isinstance(t, Mul) and is_numeral(t.right):
        if isinstance(t.right, Zero):
            return Zero(), AxiomTag.ARITH5
        return Add(t.left, Mul(t.left, pred(t.right))), AxiomTag.ARITH6
    return None


def _first_redex(t: Term) -> Optional[tuple[Term, Term, Term, AxiomTag]]:
    """Rewrite the leftmost-innermost redex: ``(new whole, u, v, tag)``."""
    if isinstance(t, (Add, Mul)):
        for i, child in enumerate(t.children()):
            hit = _first_redex(child)
            if hit is not None:
                kids = list(t.children())
                kids[i] = hit[0]
                return (t.rebuild(tuple(kids)),) + hit[1:]
        step = _contract(t)
        if step is not None:
            return step[0], t, step[0], step[1]
        return None
    if isinstance(t, Succ):
        hit = _first_redex(t.arg)
        if hit is not None:
            return (Succ(hit[0], t.count),) + hit[1:]
    return None


def _count(t: Term, kind) -> int:
    return sum(1 for n in subterms(t) if isinstance(n, kind))


def _right_numeral_sum(t: Term) -> int:
    return sum(numeral_value(n.right) for n in subterms(t)
               if isinstance(n, Add) and is_numeral(n.right))


def sum_weight(t: Term) -> PairWeight:
    return PairWeight(_count(t, Add), _right_numeral_sum(t))


def term_weight(t: Term) -> TripleWeight:
    return TripleWeight(_count(t, Mul), _count(t, Add), _right_numeral_sum(t))


def _check_closed_real(t: Term, allow_mul: bool) -> None:
    for n in subterms(t):
        if not allow_mul and isinstance(n, Mul):
            raise UnsupportedTerm(f"products are not supported here: {t}")
        if not isinstance(n, (Zero, Succ, Add, Mul)):
            raise UnsupportedTerm(f"only closed epsilon-free terms are supported: {t}")


def _value_derivation(t: Term, weight: Callable[[Term], object],
                      record: Callable[[AxiomTag], bool]):
    value = numeral(term_value(t))
    pd = PartialDerivation.of_target(Eq(t, value))
    current = t
    weights = [weight(current)]
    while not is_numeral(current):
        new, u, v, tag = _first_redex(current)
        pd.prepend(_rewrite_block(new, current, value, u, v, tag), (1, 6))
        current = new
        if record(tag):
            weights.append(weight(current))
    pd.justify_axiom(AxiomTag.ID_REFL)
    return pd.derivation(), weights


def derive_sum_value(t: Term) -> tuple[Derivation, list[PairWeight]]:
    """Derivation of ``t = l`` for a closed sum of numerals, with weights."""
    _check_closed_real(t, allow_mul=False)
    return _value_derivation(t, sum_weight, lambda tag: True)


def derive_term_value(t: Term) -> tuple[Derivation, list[TripleWeight]]:
    """Derivation of ``t = l`` for any closed epsilon-free term.

    Weights are taken after every sum step and after each complete
    unfolding of a product; the intermediate Arith6 states are skipped.
    """
    _check_closed_real(t, allow_mul=True)
    return _value_derivation(t, term_weight, lambda tag: tag is not AxiomTag.ARITH6)
