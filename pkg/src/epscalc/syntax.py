"""Terms, formulas and derivations of arithmetic with epsilon terms.

All nodes are immutable.  Equality and hashing are structural modulo the
names of bound variables (``eps x (x < 0')`` equals ``eps y (y < 0')``),
which is what schema matching and the substitution tables key on.

Successor chains are stored compactly: ``Succ(arg, count)`` stands for
``arg`` followed by ``count`` primes, and nested ``Succ`` nodes are merged
on construction, so numerals in the thousands do not produce deep trees.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, Optional, Union


class EpsilonBindingError(ValueError):
    """An epsilon term whose bound variable does not occur free in its body."""


class NotANumeral(ValueError):
    pass


class cached_property:
    """Per-instance cache without the lock taken by :func:`functools.cached_property`.

    Nodes are immutable, so a racing recomputation is harmless.
    """

    def __init__(self, fn):
        self.fn = fn
        self.name = fn.__name__
        self.__doc__ = fn.__doc__

    def __set_name__(self, owner, name):
        self.name = name

    def __get__(self, obj, owner=None):
        if obj is None:
            return self
        value = obj.__dict__[self.name] = self.fn(obj)
        return value


class Node:
    """Common base of terms and formulas."""

    def _make_key(self, env: tuple[str, ...]) -> tuple:
        raise NotImplementedError

    def children(self) -> tuple[Node, ...]:
        raise NotImplementedError

    def rebuild(self, children: tuple[Node, ...]) -> Node:
        raise NotImplementedError

    @cached_property
    def key(self) -> tuple:
        return self._make_key(())

    @cached_property
    def _hash(self) -> int:
        return hash(self.key)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Node):
            return NotImplemented
        return self._hash == other._hash and self.key == other.key

    def __ne__(self, other: object) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self) -> int:
        return self._hash

    @cached_property
    def free_vars(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for c in self.children():
            out |= c.free_vars
        return out

    @cached_property
    def has_eps(self) -> bool:
        return any(c.has_eps for c in self.children())

    @cached_property
    def has_quantifier(self) -> bool:
        return any(c.has_quantifier for c in self.children())

    @property
    def is_closed(self) -> bool:
        return not self.free_vars

    def __str__(self) -> str:
        from .parsing import format_node

        return format_node(self)


def _sub_key(child: Node, env: tuple[str, ...]) -> tuple:
    if not env or child.free_vars.isdisjoint(env):
        return child.key
    return child._make_key(env)


class Term(Node):
    pass


class Formula(Node):
    pass


# -- terms -------------------------------------------------------------------

@dataclass(frozen=True, eq=False, repr=False)
class Zero(Term):
    def _make_key(self, env):
        return ("0",)

    def children(self):
        return ()

    def rebuild(self, children):
        return self

    def __repr__(self):
        return "Zero()"


@dataclass(frozen=True, eq=False, repr=False)
class Succ(Term):
    arg: Term
    count: int = 1

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("Succ count must be positive")
        if isinstance(self.arg, Succ):
            object.__setattr__(self, "count", self.count + self.arg.count)
            object.__setattr__(self, "arg", self.arg.arg)

    def _make_key(self, env):
        return ("S", _sub_key(self.arg, env), self.count)

    def children(self):
        return (self.arg,)

    def rebuild(self, children):
        return Succ(children[0], self.count)

    def __repr__(self):
        return f"Succ({self.arg!r}, {self.count})"


@dataclass(frozen=True, eq=False, repr=False)
class _BinaryTerm(Term):
    left: Term
    right: Term
    _tag = "?"

    def _make_key(self, env):
        return (self._tag, _sub_key(self.left, env), _sub_key(self.right, env))

    def children(self):
        return (self.left, self.right)

    def rebuild(self, children):
        return type(self)(*children)

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class Add(_BinaryTerm):
    _tag = "+"


class Mul(_BinaryTerm):
    _tag = "*"


@dataclass(frozen=True, eq=False, repr=False)
class Var(Term):
    name: str

    def _make_key(self, env):
        # de Bruijn index for bound occurrences, name for free ones
        for i in range(len(env) - 1, -1, -1):
            if env[i] == self.name:
                return ("b", len(env) - 1 - i)
        return ("v", self.name)

    def children(self):
        return ()

    def rebuild(self, children):
        return self

    @cached_property
    def free_vars(self):
        return frozenset((self.name,))

    def __repr__(self):
        return f"Var({self.name!r})"


class _Binder:
    var: str
    body: Formula

    def _make_key(self, env):
        return (self._tag, self.body._make_key(env + (self.var,)))

    def children(self):
        return (self.body,)

    def rebuild(self, children):
        return type(self)(self.var, children[0])

    @cached_property
    def free_vars(self):
        return self.body.free_vars - {self.var}

    def __repr__(self):
        return f"{type(self).__name__}({self.var!r}, {self.body!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Eps(_Binder, Term):
    var: str
    body: Formula
    _tag = "eps"

    def __post_init__(self):
        if not isinstance(self.body, Formula):
            raise TypeError("epsilon body must be a formula")
        if self.var not in self.body.free_vars:
            raise EpsilonBindingError(
                f"bound variable {self.var!r} does not occur free in the epsilon body")

    @cached_property
    def has_eps(self):
        return True


# -- formulas ----------------------------------------------------------------

@dataclass(frozen=True, eq=False, repr=False)
class _Atom(Formula):
    left: Term
    right: Term
    _tag = "?"

    def _make_key(self, env):
        return (self._tag, _sub_key(self.left, env), _sub_key(self.right, env))

    def children(self):
        return (self.left, self.right)

    def rebuild(self, children):
        return type(self)(*children)

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class Eq(_Atom):
    _tag = "="


class Lt(_Atom):
    _tag = "<"


@dataclass(frozen=True, eq=False, repr=False)
class Not(Formula):
    arg: Formula

    def _make_key(self, env):
        return ("~", _sub_key(self.arg, env))

    def children(self):
        return (self.arg,)

    def rebuild(self, children):
        return Not(children[0])

    def __repr__(self):
        return f"Not({self.arg!r})"


@dataclass(frozen=True, eq=False, repr=False)
class _Connective(Formula):
    left: Formula
    right: Formula
    _tag = "?"

    def _make_key(self, env):
        return (self._tag, _sub_key(self.left, env), _sub_key(self.right, env))

    def children(self):
        return (self.left, self.right)

    def rebuild(self, children):
        return type(self)(*children)

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class Or(_Connective):
    _tag = "|"


class And(_Connective):
    _tag = "&"


class Imp(_Connective):
    _tag = "->"


@dataclass(frozen=True, eq=False, repr=False)
class Exists(_Binder, Formula):
    var: str
    body: Formula
    _tag = "Ex"

    @cached_property
    def has_quantifier(self):
        return True


@dataclass(frozen=True, eq=False, repr=False)
class Forall(_Binder, Formula):
    var: str
    body: Formula
    _tag = "All"

    @cached_property
    def has_quantifier(self):
        return True


BINDERS = (Eps, Exists, Forall)
ATOMS = (Eq, Lt)
CONNECTIVES = (Or, And, Imp)


# -- numerals ----------------------------------------------------------------

ZERO = Zero()


def numeral(n: int) -> Term:
    """The standard numeral for ``n``: zero followed by ``n`` primes."""
    if n < 0:
        raise ValueError("numerals denote natural numbers")
    return ZERO if n == 0 else Succ(ZERO, n)


def numeral_value(t: Term) -> int:
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Succ) and isinstance(t.arg, Zero):
        return t.count
    raise NotANumeral(f"not a numeral: {t}")


def is_numeral(t: Node) -> bool:
    return isinstance(t, Zero) or (isinstance(t, Succ) and isinstance(t.arg, Zero))


def pred(t: Succ) -> Term:
    """Strip one prime from a successor term."""
    return t.arg if t.count == 1 else Succ(t.arg, t.count - 1)


# -- traversal and substitution ----------------------------------------------

def is_real(node: Node) -> bool:
    return node.is_closed and not node.has_eps and not node.has_quantifier


def subterms(node: Node) -> Iterator[Node]:
    """Pre-order walk over every node, binder bodies included."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(n.children()))


def eps_subterms(node: Node) -> list[Eps]:
    """Distinct epsilon subterms in pre-order."""
    seen: dict[Eps, None] = {}
    for n in subterms(node):
        if isinstance(n, Eps) and n not in seen:
            seen[n] = None
    return list(seen)


def closed_eps_subterms(node: Node) -> list[Eps]:
    return [e for e in eps_subterms(node) if e.is_closed]


def fresh_name(base: str, avoid: set[str] | frozenset[str]) -> str:
    if base not in avoid:
        return base
    for i in itertools.count(1):
        cand = f"{base}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


def all_names(node: Node) -> set[str]:
    """Every variable name occurring in ``node``, free or bound."""
    out: set[str] = set()
    for n in subterms(node):
        if isinstance(n, Var):
            out.add(n.name)
        elif isinstance(n, BINDERS):
            out.add(n.var)
    return out


def substitute(host: Node, var: str, replacement: Term) -> Node:
    """Capture-avoiding replacement of the free occurrences of ``var``."""
    if var not in host.free_vars:
        return host
    if isinstance(host, Var):
        return replacement
    if isinstance(host, BINDERS):
        v, body = host.var, host.body
        if v in replacement.free_vars:
            new = fresh_name(v, replacement.free_vars | body.free_vars | {var})
            body = substitute(body, v, Var(new))
            v = new
        return type(host)(v, substitute(body, var, replacement))
    return host.rebuild(tuple(substitute(c, var, replacement) for c in host.children()))


def map_terms(node: Node, fn: Callable[[Term], Optional[Term]]) -> Node:
    """Rebuild ``node`` top-down; where ``fn`` returns a term, it replaces the subtree."""
    if isinstance(node, Term):
        out = fn(node)
        if out is not None:
            return out
    kids = node.children()
    if not kids:
        return node
    new = tuple(map_terms(c, fn) for c in kids)
    if all(a is b for a, b in zip(kids, new)):
        return node
    return node.rebuild(new)


def replace_term(host: Node, old: Term, new: Term) -> Node:
    """Replace every occurrence of the closed term ``old`` by ``new``."""
    return map_terms(host, lambda t: new if t == old else None)


def canonicalize(node: Node) -> Node:
    """Rename bound variables to ``v<depth>``, avoiding the free names of ``node``."""
    avoid = set(node.free_vars)

    def name_for(depth: int) -> str:
        n = f"v{depth}"
        while n in avoid:
            n = "_" + n
        return n

    def go(n: Node, depth: int) -> Node:
        if isinstance(n, BINDERS):
            new = name_for(depth)
            body = n.body
            if new != n.var:
                body = substitute(body, n.var, Var(new))
            return type(n)(new, go(body, depth + 1))
        kids = n.children()
        if not kids:
            return n
        return n.rebuild(tuple(go(c, depth) for c in kids))

    return go(node, 0)


# -- derivations -------------------------------------------------------------

class AxiomTag(Enum):
    TAUT = "taut"
    ID_REFL = "id-refl"
    ID_SUBST_TERM = "id-subst-term"
    ID_SUBST_FORMULA = "id-subst-formula"
    ARITH1 = "arith1"
    ARITH2 = "arith2"
    ARITH3 = "arith3"
    ARITH4 = "arith4"
    ARITH5 = "arith5"
    ARITH6 = "arith6"
    CRIT1 = "crit1"
    CRIT2 = "crit2"
    TRUE_LITERAL = "true-literal"


@dataclass(frozen=True)
class Axiom:
    """Axiom justification.  ``tag`` is advisory; ``None`` means unspecified."""
    tag: Optional[AxiomTag] = None


@dataclass(frozen=True)
class ModusPonens:
    """From line ``minor`` (A) and line ``major`` (A -> B) infer B.  1-based."""
    minor: int
    major: int


Justification = Union[Axiom, ModusPonens]


@dataclass(frozen=True)
class Line:
    formula: Formula
    justification: Justification


@dataclass(frozen=True)
class Derivation:
    lines: tuple[Line, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))

    def __len__(self):
        return len(self.lines)

    def __iter__(self):
        return iter(self.lines)

    def __getitem__(self, lineno: int) -> Line:
        """Lines are addressed by their 1-based number."""
        if not 1 <= lineno <= len(self.lines):
            raise IndexError(lineno)
        return self.lines[lineno - 1]

    @property
    def end_formula(self) -> Formula:
        if not self.lines:
            raise ValueError("empty derivation")
        return self.lines[-1].formula

    @property
    def formulas(self) -> list[Formula]:
        return [ln.formula for ln in self.lines]

    def __str__(self) -> str:
        from .parsing import format_derivation

        return format_derivation(self)
