"""Ordinal notations with decidable strict orders.

Pairs and triples of naturals are ordered lexicographically (the orders
of type omega^2 and omega^3), finite coefficient sequences by length and
then lexicographically (omega^omega), and Cantor normal forms below
epsilon_0 by recursive comparison of their exponents.

Comparisons return -1, 0 or 1.  Every class also supports ``<`` etc.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Optional, Sequence


class NotCanonical(ValueError):
    pass


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def _nat(x) -> int:
    if not isinstance(x, int) or isinstance(x, bool) or x < 0:
        raise ValueError(f"expected a natural number, got {x!r}")
    return x


class _Ordered:
    def _cmp(self, other) -> int:
        raise NotImplementedError

    def __lt__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._cmp(other) < 0

    def __le__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._cmp(other) <= 0

    def __gt__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._cmp(other) > 0

    def __ge__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._cmp(other) >= 0


@dataclass(frozen=True, order=False)
class PairWeight(_Ordered):
    n1: int
    n2: int

    def __post_init__(self):
        _nat(self.n1), _nat(self.n2)

    def _cmp(self, other):
        return cmp_pair(self, other)

    def __str__(self):
        return f"<{self.n1},{self.n2}>"


@dataclass(frozen=True, order=False)
class TripleWeight(_Ordered):
    n1: int
    n2: int
    n3: int

    def __post_init__(self):
        _nat(self.n1), _nat(self.n2), _nat(self.n3)

    def _cmp(self, other):
        return cmp_triple(self, other)

    def __str__(self):
        return f"<{self.n1},{self.n2},{self.n3}>"


@dataclass(frozen=True, order=False)
class SeqWeight(_Ordered):
    """Coefficients of descending powers of omega, leading one non-zero."""
    coefficients: tuple[int, ...] = ()

    def __post_init__(self):
        coeffs = tuple(_nat(c) for c in self.coefficients)
        if coeffs and coeffs[0] == 0:
            raise NotCanonical(f"leading zero in {list(coeffs)}")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_list(cls, coeffs: Iterable[int]) -> SeqWeight:
        """Build from a possibly zero-padded list by stripping leading zeros."""
        coeffs = list(coeffs)
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
        return cls(tuple(coeffs))

    def _cmp(self, other):
        return cmp_seq(self, other)

    def __str__(self):
        return "[" + ",".join(map(str, self.coefficients)) + "]"


def cmp_pair(a: PairWeight, b: PairWeight) -> int:
    # a < b iff a.n1 < b.n1, or a.n1 == b.n1 and a.n2 < b.n2
    if a.n1 != b.n1:
        return -1 if a.n1 < b.n1 else 1
    return _sign(a.n2 - b.n2)


def cmp_triple(a: TripleWeight, b: TripleWeight) -> int:
    if a.n1 != b.n1:
        return -1 if a.n1 < b.n1 else 1
    return cmp_pair(PairWeight(a.n2, a.n3), PairWeight(b.n2, b.n3))


def cmp_seq(a: SeqWeight, b: SeqWeight) -> int:
    for s in (a, b):
        if s.coefficients and s.coefficients[0] == 0:
            raise NotCanonical(str(s))
    if len(a.coefficients) != len(b.coefficients):
        return -1 if len(a.coefficients) < len(b.coefficients) else 1
    for x, y in zip(a.coefficients, b.coefficients):
        if x != y:
            return -1 if x < y else 1
    return 0


# -- Cantor normal form ------------------------------------------------------

@total_ordering
class CNF:
    """omega^e1*c1 + ... + omega^ek*ck with e1 > ... > ek and every ci >= 1.

    Built from ``(exponent, coefficient)`` pairs; the constructor rejects
    anything not already in normal form, :func:`normalize` produces one.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Sequence[tuple[CNF, int]] = ()):
        terms = tuple((e, c) for e, c in terms)
        for e, c in terms:
            if not isinstance(e, CNF):
                raise TypeError(f"exponent must be a CNF, got {e!r}")
            if not isinstance(c, int) or isinstance(c, bool) or c < 1:
                raise NotCanonical(f"coefficient must be a positive integer, got {c!r}")
        for (e1, _), (e2, _) in zip(terms, terms[1:]):
            if cmp_cnf(e1, e2) <= 0:
                raise NotCanonical("exponents must be strictly decreasing")
        self.terms = terms
        self._hash = None

    @classmethod
    def of_int(cls, n: int) -> CNF:
        _nat(n)
        return cls(((ZERO, n),)) if n else ZERO

    @classmethod
    def omega_power(cls, exponent: CNF | int, coefficient: int = 1) -> CNF:
        if isinstance(exponent, int):
            exponent = cls.of_int(exponent)
        return cls(((exponent, coefficient),)) if coefficient else ZERO

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_finite(self) -> bool:
        return all(e.is_zero for e, _ in self.terms)

    def __eq__(self, other):
        if not isinstance(other, CNF):
            return NotImplemented
        return self.terms == other.terms

    def __lt__(self, other):
        if not isinstance(other, CNF):
            return NotImplemented
        return cmp_cnf(self, other) < 0

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    def __repr__(self):
        return f"CNF({format_ordinal(self)!r})"

    def __str__(self):
        return format_ordinal(self)


ZERO = CNF()
ONE = CNF(((ZERO, 1),))
OMEGA = CNF(((ONE, 1),))


def cmp_cnf(a: CNF, b: CNF) -> int:
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = cmp_cnf(ea, eb)
        if c:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    return _sign(len(a.terms) - len(b.terms))


def normalize(terms: Iterable[tuple[CNF, int]]) -> CNF:
    """Ordinal sum of ``omega^e * c`` terms taken left to right.

    A term followed by one with a larger exponent is absorbed
    (``1 + omega = omega``); adjacent equal exponents merge
    (``omega + omega = omega*2``).
    """
    out: list[tuple[CNF, int]] = []
    for e, c in terms:
        _nat(c)
        if c == 0:
            continue
        while out and cmp_cnf(out[-1][0], e) < 0:
            out.pop()
        if out and cmp_cnf(out[-1][0], e) == 0:
            out[-1] = (e, out[-1][1] + c)
        else:
            out.append((e, c))
    return CNF(out)


def add(a: CNF, b: CNF) -> CNF:
    return normalize(a.terms + b.terms)


def embed_pair(w: PairWeight) -> CNF:
    """omega*n1 + n2."""
    return normalize([(ONE, w.n1), (ZERO, w.n2)])


def embed_triple(w: TripleWeight) -> CNF:
    """omega^2*n1 + omega*n2 + n3."""
    return normalize([(CNF.of_int(2), w.n1), (ONE, w.n2), (ZERO, w.n3)])


def embed_seq(w: SeqWeight) -> CNF:
    """Coefficient list read as descending powers of omega."""
    k = len(w.coefficients)
    return normalize([(CNF.of_int(k - 1 - i), c) for i, c in enumerate(w.coefficients)])


def embed(w) -> CNF:
    if isinstance(w, CNF):
        return w
    if isinstance(w, int):
        return CNF.of_int(w)
    if isinstance(w, PairWeight):
        return embed_pair(w)
    if isinstance(w, TripleWeight):
        return embed_triple(w)
    if isinstance(w, SeqWeight):
        return embed_seq(w)
    raise TypeError(f"no ordinal embedding for {w!r}")


def check_descent(trace: Sequence[CNF]) -> Optional[int]:
    """Index of the first element not strictly below its predecessor.

    ``None`` means the trace descends strictly throughout.  Index 0 is never
    reported, so the result can be tested with ``is None``.
    """
    for i in range(1, len(trace)):
        if cmp_cnf(trace[i], trace[i - 1]) >= 0:
            return i
    return None


# -- ordinal expressions -----------------------------------------------------

def format_ordinal(a: CNF) -> str:
    if a.is_zero:
        return "0"
    parts = []
    for e, c in a.terms:
        if e.is_zero:
            parts.append(str(c))
            continue
        if e == ONE:
            base = "w"
        else:
            exp = format_ordinal(e)
            base = f"w^({exp})" if " " in exp or "*" in exp else f"w^{exp}"
        parts.append(base if c == 1 else f"{base}*{c}")
    return " + ".join(parts)


_ORD_TOKEN = re.compile(r"\s*(?:(\d+)|(w|ω)|([()+*^]))")


class OrdinalSyntaxError(ValueError):
    pass


def parse_ordinal(text: str) -> CNF:
    """Parse expressions such as ``w^w*2 + w*3 + 5`` into normal form.

    ``+`` is ordinal addition; ``*`` takes a natural number multiplier on
    the right; ``^`` is right-associative and binds tightest.
    """
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _ORD_TOKEN.match(text, pos)
        if m is None:
            raise OrdinalSyntaxError(f"unexpected character at position {pos}: {text[pos]!r}")
        toks.append(m.group(1) or m.group(2) and "w" or m.group(3))
        pos = m.end()
    toks.append(None)
    i = 0

    def peek():
        return toks[i]

    def take(expected=None):
        nonlocal i
        tok = toks[i]
        if expected is not None and tok != expected:
            raise OrdinalSyntaxError(f"expected {expected!r}, found {tok!r}")
        i += 1
        return tok

    def sum_():
        out = product()
        while peek() == "+":
            take()
            out = add(out, product())
        return out

    def product():
        base = power()
        while peek() == "*":
            take()
            tok = take()
            if tok is None or not tok.isdigit():
                raise OrdinalSyntaxError("right factor of '*' must be a natural number")
            base = _times(base, int(tok))
        return base

    def power():
        tok = peek()
        if tok == "w":
            take()
            if peek() == "^":
                take()
                return CNF.omega_power(power())
            return OMEGA
        if tok is not None and tok.isdigit():
            take()
            return CNF.of_int(int(tok))
        if tok == "(":
            take()
            inner = sum_()
            take(")")
            return inner
        raise OrdinalSyntaxError(f"unexpected token {tok!r}")

    result = sum_()
    if peek() is not None:
        raise OrdinalSyntaxError(f"trailing input at {peek()!r}")
    return result


def _times(a: CNF, n: int) -> CNF:
    # a * n for natural n: leading coefficient scales, the tail is kept once
    if n == 0 or a.is_zero:
        return ZERO
    (e, c), rest = a.terms[0], a.terms[1:]
    return CNF(((e, c * n),) + rest)
