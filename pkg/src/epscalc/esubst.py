"""The epsilon substitution method.

An ideal derivation of a real formula is turned into a real one by
finding numerical values for its epsilon terms under which every critical
formula comes out true.  Values are not guessed for whole epsilon terms
but for epsilon *types*: the term with each maximal proper closed subterm
abstracted to a placeholder.  A :class:`Substitution` maps each type to a
finite table from argument tuples to values, defaulting to 0, so two terms
that differ only in closed subterms of equal value always receive the
same value.

The solver starts from the all-zero substitution and repeatedly repairs
the first false critical formula: the entry for its epsilon term is set
to the least witness not exceeding the value of the instance term, and
every stored type of strictly higher rank is reset to zero.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Optional

from . import proofs
from .evaluate import truth
from .ordinals import CNF, SeqWeight, check_descent, embed_seq
from .proofs import CriticalInstance, Regime
from .syntax import (
    Add, And, Axiom, Derivation, Eps, Eq, Exists, Forall, Formula, Imp, Line,
    Lt, ModusPonens, Mul, Node, Not, Or, Succ, Term, Var, Zero,
    canonicalize, closed_eps_subterms, is_real, map_terms, numeral, substitute,
)

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**6


class SolverError(RuntimeError):
    """Internal contract violation of the substitution method."""


class BudgetExhausted(Exception):
    """The solver used up its update budget without finding a solution."""

    def __init__(self, budget: int, substitution: Substitution, trace: SolverTrace):
        self.budget = budget
        self.substitution = substitution
        self.trace = trace
        super().__init__(f"budget of {budget} updates exhausted")


class NotSolving(ValueError):
    def __init__(self, line: int, formula: Formula):
        self.line = line
        self.formula = formula
        super().__init__(f"line {line} is false under the substitution: {formula}")


# -- epsilon types -----------------------------------------------------------

@dataclass(frozen=True)
class EpsilonType:
    skeleton: Eps
    arity: int

    @property
    def placeholders(self) -> tuple[str, ...]:
        return tuple(f"p{i}" for i in range(1, self.arity + 1))

    @property
    def rank(self) -> int:
        return _nesting_depth(self.skeleton)

    def instantiate(self, args: Iterable[Term]) -> Eps:
        out: Node = self.skeleton
        args = tuple(args)
        if len(args) != self.arity:
            raise ValueError(f"type of arity {self.arity} applied to {len(args)} arguments")
        for p, a in zip(self.placeholders, args):
            out = substitute(out, p, a)
        return out

    def __str__(self):
        return str(self.skeleton)


def _nesting_depth(node: Node) -> int:
    inner = max((_nesting_depth(c) for c in node.children()), default=0)
    return inner + 1 if isinstance(node, Eps) else inner


@lru_cache(maxsize=65536)
def type_of(e: Eps) -> tuple[EpsilonType, tuple[Term, ...]]:
    """Split a closed epsilon term into its type and argument terms."""
    if not isinstance(e, Eps):
        raise TypeError(f"not an epsilon term: {e}")
    if not e.is_closed:
        raise ValueError(f"epsilon term is not closed: {e}")
    c = canonicalize(e)
    args: list[Term] = []

    def abstract(n: Node) -> Node:
        if isinstance(n, Term) and n.is_closed:
            args.append(n)
            return Var(f"p{len(args)}")
        kids = n.children()
        if not kids:
            return n
        return n.rebuild(tuple(abstract(k) for k in kids))

    skeleton = Eps(c.var, abstract(c.body))
    return EpsilonType(skeleton, len(args)), tuple(args)


# -- substitutions -----------------------------------------------------------

class Substitution:
    """Finite assignment of argument tables to epsilon types.

    Only non-zero values are stored; everything else reads as 0.  Instances
    are immutable: :meth:`assign` and :meth:`reset` return new objects.
    """

    __slots__ = ("_table",)

    def __init__(self, table: Optional[Mapping[EpsilonType, Mapping[tuple, int]]] = None):
        clean: dict[EpsilonType, dict[tuple[int, ...], int]] = {}
        for T, fn in (table or {}).items():
            row = {tuple(k): int(v) for k, v in fn.items() if v}
            for k in row:
                if len(k) != T.arity:
                    raise ValueError(f"argument tuple {k} does not fit arity {T.arity}")
            if row:
                clean[T] = row
        self._table = clean

    def lookup(self, T: EpsilonType, args: tuple[int, ...]) -> int:
        return self._table.get(T, {}).get(tuple(args), 0)

    def assign(self, T: EpsilonType, args: tuple[int, ...], value: int) -> Substitution:
        table = {U: dict(fn) for U, fn in self._table.items()}
        table.setdefault(T, {})[tuple(args)] = value
        return Substitution(table)

    def reset(self, types: Iterable[EpsilonType]) -> Substitution:
        drop = set(types)
        return Substitution({U: fn for U, fn in self._table.items() if U not in drop})

    def types(self) -> list[EpsilonType]:
        return sorted(self._table, key=str)

    def entries(self) -> Iterator[tuple[EpsilonType, tuple[int, ...], int]]:
        for T in self.types():
            for args in sorted(self._table[T]):
                yield T, args, self._table[T][args]

    def __len__(self):
        return sum(len(fn) for fn in self._table.values())

    def __eq__(self, other):
        if not isinstance(other, Substitution):
            return NotImplemented
        return self._table == other._table

    def __hash__(self):
        return hash(frozenset((T, frozenset(fn.items())) for T, fn in self._table.items()))

    def __repr__(self):
        items = ", ".join(f"{T}{list(a)} -> {v}" for T, a, v in self.entries())
        return f"Substitution({{{items}}})"


EMPTY = Substitution()


class _Interpretation:
    """Values of closed terms, epsilon terms read off a substitution."""

    def __init__(self, S: Substitution):
        self.S = S
        # keyed by id(); the node is kept alongside so the id cannot be recycled
        self.memo: dict[int, tuple[Term, int]] = {}

    def eps_value(self, e: Eps) -> int:
        T, arg_terms = type_of(e)
        return self.S.lookup(T, tuple(self.value(a) for a in arg_terms))

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
            v = self.eps_value(t)
        elif isinstance(t, Var):
            raise ValueError(f"free variable {t.name!r} has no value")
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
            raise ValueError("quantified formulas must be translated first")
        raise TypeError(f"not a formula: {f!r}")

    def eval(self, node: Node):
        return self.value(node) if isinstance(node, Term) else self.truth(node)


def eval_under(S: Substitution, node: Node) -> int | bool:
    """Value of a closed term, or truth of a closed formula, under ``S``."""
    return _Interpretation(S).eval(node)


class _LeastWitness(_Interpretation):
    def __init__(self, bound: int):
        super().__init__(EMPTY)
        self.bound = bound

    def eps_value(self, e: Eps) -> int:
        for m in range(self.bound + 1):
            if self.truth(substitute(e.body, e.var, numeral(m))):
                return m
        return 0


def eval_least_witness(node: Node, bound: int) -> int | bool:
    """Read every epsilon term as its least witness up to ``bound`` (else 0)."""
    return _LeastWitness(bound).eval(node)


# -- the solver --------------------------------------------------------------

@dataclass(frozen=True)
class TraceStep:
    step: int
    line: int
    type: EpsilonType
    args: tuple[int, ...]
    old: int
    new: int
    resets: tuple[EpsilonType, ...]
    ordinal: Optional[CNF] = None

    def tsv(self) -> str:
        return "\t".join([
            str(self.step), str(self.line), str(self.type),
            ",".join(map(str, self.args)), str(self.old), str(self.new),
            ";".join(map(str, self.resets)),
            "" if self.ordinal is None else str(self.ordinal),
        ])


TRACE_COLUMNS = ("step", "line", "type", "args", "old", "new", "resets", "ordinal")


@dataclass
class SolverTrace:
    steps: list[TraceStep] = field(default_factory=list)
    initial_ordinal: Optional[CNF] = None

    def __len__(self):
        return len(self.steps)

    def ordinals(self) -> Optional[list[CNF]]:
        """Weights of every visited state, or ``None`` when not monitored."""
        if self.initial_ordinal is None:
            return None
        return [self.initial_ordinal] + [s.ordinal for s in self.steps]

    def max_ordinal(self) -> Optional[CNF]:
        ords = self.ordinals()
        return max(ords) if ords else None

    def to_tsv(self) -> str:
        rows = ["\t".join(TRACE_COLUMNS)] + [s.tsv() for s in self.steps]
        return "\n".join(rows) + "\n"


class DescentMonitor:
    """Sequence weights for derivations whose epsilon types all have rank 1.

    Each closed epsilon term gets a degree (1 + the largest degree of the
    epsilon terms nested in its arguments).  The weight of a substitution
    lists, from degree 1 upwards, how many terms of each degree still read
    an unset entry.  With rank-1 types every update sets a fresh entry to a
    permanent witness, so the count at the least affected degree drops
    while only less significant counts can grow.
    """

    def __init__(self, d: Derivation):
        terms: dict[Eps, None] = {}
        for line in d.lines:
            for e in closed_eps_subterms(line.formula):
                terms.setdefault(e, None)
        self.terms = list(terms)
        self.applicable = all(type_of(e)[0].rank == 1 for e in self.terms)
        self.degree: dict[Eps, int] = {}
        for e in self.terms:
            self._degree(e)
        self.max_degree = max(self.degree.values(), default=0)

    def _degree(self, e: Eps) -> int:
        if e not in self.degree:
            self.degree[e] = 1 + max(
                (self._degree(f) for f in closed_eps_subterms(e) if f != e), default=0)
        return self.degree[e]

    def weight(self, S: Substitution) -> Optional[SeqWeight]:
        if not self.applicable:
            return None
        interp = _Interpretation(S)
        counts = [0] * self.max_degree
        for e in self.terms:
            T, arg_terms = type_of(e)
            args = tuple(interp.value(a) for a in arg_terms)
            if S.lookup(T, args) == 0:
                counts[self.degree[e] - 1] += 1
        return SeqWeight.from_list(counts)

    def ordinal(self, S: Substitution) -> Optional[CNF]:
        w = self.weight(S)
        return None if w is None else embed_seq(w)


def _critical(d: Derivation, crits=None) -> list[tuple[int, CriticalInstance]]:
    return proofs.critical_lines(d) if crits is None else crits


def find_false_critical(S: Substitution, d: Derivation, crits=None) -> Optional[int]:
    """Number of the first critical line that is false under ``S``."""
    interp = _Interpretation(S)
    for n, _ in _critical(d, crits):
        if not interp.truth(d[n].formula):
            return n
    return None


def _repair(S: Substitution, d: Derivation, n: int, crits=None):
    ci = dict(_critical(d, crits)).get(n)
    if ci is None:
        raise ValueError(f"line {n} is not a critical formula")
    interp = _Interpretation(S)
    if interp.truth(d[n].formula):
        raise ValueError(f"line {n} is already true under the substitution")
    T, arg_terms = type_of(ci.eps)
    args = tuple(interp.value(a) for a in arg_terms)
    old = S.lookup(T, args)
    bound = interp.value(ci.instance)
    for m in range(bound + 1):
        if interp.truth(ci.matrix_at(numeral(m))):
            break
    else:
        raise SolverError(f"line {n}: no witness up to {bound} for {ci.eps}")
    resets = tuple(U for U in S.types() if U.rank > T.rank)
    new_S = S.reset(resets).assign(T, args, m)
    return new_S, (T, args, old, m, resets)


def update(S: Substitution, d: Derivation, n: int, crits=None) -> Substitution:
    """Repair the false critical formula on line ``n``."""
    return _repair(S, d, n, crits)[0]


def solve(d: Derivation, budget: int = DEFAULT_BUDGET,
          start: Substitution = EMPTY) -> tuple[Substitution, SolverTrace]:
    """Find a substitution making every critical formula of ``d`` true.

    ``d`` must check in the ideal regime and end in a real formula.
    Raises :class:`BudgetExhausted` after ``budget`` updates.
    """
    proofs.check(d, Regime.IDEAL)
    if not is_real(d.end_formula):
        raise ValueError(f"end formula is not real: {d.end_formula}")
    crits = proofs.critical_lines(d)
    monitor = DescentMonitor(d)
    S = start
    trace = SolverTrace(initial_ordinal=monitor.ordinal(S))
    while True:
        n = find_false_critical(S, d, crits)
        if n is None:
            return S, trace
        if len(trace) >= budget:
            raise BudgetExhausted(budget, S, trace)
        S, (T, args, old, new, resets) = _repair(S, d, n, crits)
        step = TraceStep(len(trace) + 1, n, T, args, old, new, resets, monitor.ordinal(S))
        log.debug("step %d line %d: %s%s %d -> %d", step.step, n, T, list(args), old, new)
        trace.steps.append(step)


def realize(node: Node, S: Substitution) -> Node:
    """Replace every epsilon term by the numeral of its value under ``S``."""
    interp = _Interpretation(S)
    return map_terms(node, lambda t: numeral(interp.value(t)) if isinstance(t, Eps) else None)


def extract_real(d: Derivation, S: Substitution) -> Derivation:
    """Real derivation of the end formula of ``d``, given a solving ``S``.

    Every line is realized under ``S``.  Lines that are still axioms keep
    their justification, modus ponens steps are renumbered, and true lines
    that no longer fit a schema (realized critical formulas, identity
    axioms with epsilon contexts) get a short derivation from true
    literals spliced in.  The result checks in the extended regime.
    """
    crit_lines = {n for n, _ in proofs.critical_lines(d)}
    out: list[Line] = []
    where: dict[int, int] = {}
    for n, line in enumerate(d.lines, 1):
        f = realize(line.formula, S)
        j = line.justification
        if isinstance(j, ModusPonens):
            out.append(Line(f, ModusPonens(where[j.minor], where[j.major])))
        else:
            tag = j.tag if j.tag and proofs.is_instance(f, j.tag, Regime.EXTENDED) else None
            tag = tag or proofs.classify_axiom(f, Regime.EXTENDED)
            if tag is not None:
                out.append(Line(f, Axiom(tag)))
            else:
                if not truth(f):
                    if n in crit_lines:
                        raise NotSolving(n, f)
                    raise SolverError(f"line {n} realizes to a false formula: {f}")
                sub = proofs.derive_true_real(f)
                out.extend(proofs.shift_lines(sub.lines, len(out)))
        where[n] = len(out)
    return Derivation(tuple(out))


def descent_ok(trace: SolverTrace) -> bool:
    ords = trace.ordinals()
    return ords is None or check_descent(ords) is None
