"""Axiom recognition and derivation checking.

Three regimes are supported:

``STRICT``
    the real subsystem: tautologies, identity axioms and the six arithmetic
    schemas, epsilon-free instances only;
``IDEAL``
    the full system: adds critical formulas of both kinds and allows
    epsilon terms in every schema;
``EXTENDED``
    ``STRICT`` plus true literals (a true closed atomic sentence, or the
    negation of a false one).

Propositional axioms are all quantifier-free tautologies, with atomic
formulas treated as opaque propositional letters.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .evaluate import truth
from .syntax import (
    ATOMS, BINDERS, Add, And, Axiom, AxiomTag, Derivation, Eps, Eq, Formula, Line,
    Imp, Lt, ModusPonens, Mul, Node, Not, Or, Succ, Term, Var, Zero,
    all_names, fresh_name, is_real, pred, substitute, subterms,
)

MAX_ATOMS = 24


class Regime(Enum):
    STRICT = "strict"
    IDEAL = "ideal"
    EXTENDED = "extended"


class TooManyAtoms(ValueError):
    pass


class CheckError(Exception):
    """A derivation failed to check at ``line`` (1-based)."""

    BAD_AXIOM = "bad-axiom"
    BAD_MP_SHAPE = "bad-mp-shape"
    BAD_MP_INDEX = "bad-mp-index"

    def __init__(self, line: int, reason: str, detail: str = ""):
        self.line = line
        self.reason = reason
        self.detail = detail
        msg = f"line {line}: {reason}"
        super().__init__(msg + (f" ({detail})" if detail else ""))


# -- tautologies -------------------------------------------------------------

def atoms(formula: Formula) -> list[Formula]:
    """Distinct atomic subformulas in order of first occurrence."""
    seen: dict[Formula, None] = {}

    def go(f):
        if isinstance(f, ATOMS):
            seen.setdefault(f, None)
        elif isinstance(f, Not):
            go(f.arg)
        elif isinstance(f, (Or, And, Imp)):
            go(f.left)
            go(f.right)
        else:
            raise ValueError(f"not a quantifier-free formula: {f}")

    go(formula)
    return list(seen)


def is_tautology(formula: Formula, max_atoms: int = MAX_ATOMS) -> bool:
    """Truth-table check, atoms opaque.

    Each atom is encoded as a bitmask over all ``2**k`` rows so the whole
    table is evaluated with a handful of big-integer operations.
    """
    letters = atoms(formula)
    k = len(letters)
    if k > max_atoms:
        raise TooManyAtoms(f"{k} distinct atoms exceeds the limit of {max_atoms}")
    rows = 1 << k
    full = (1 << rows) - 1
    masks = {}
    for i, a in enumerate(letters):
        # row r assigns true to atom i iff bit i of r is set
        half = 1 << i
        pattern = ((1 << half) - 1) << half
        width = half << 1
        while width < rows:
            pattern |= pattern << width
            width <<= 1
        masks[a] = pattern

    def ev(f) -> int:
        if isinstance(f, ATOMS):
            return masks[f]
        if isinstance(f, Not):
            return full & ~ev(f.arg)
        if isinstance(f, Or):
            return ev(f.left) | ev(f.right)
        if isinstance(f, And):
            return ev(f.left) & ev(f.right)
        return (full & ~ev(f.left)) | ev(f.right)

    return ev(formula) == full


# -- schema matching ---------------------------------------------------------

def _rename_pair(a, b):
    """Give the bodies of two binders a shared fresh bound name."""
    z = fresh_name("_m", all_names(a) | all_names(b))
    return substitute(a.body, a.var, Var(z)), substitute(b.body, b.var, Var(z))


def _strip(t: Succ, k: int) -> Term:
    return t.arg if k == t.count else Succ(t.arg, t.count - k)


def _same_context(c: Node, d: Node, a: Term, b: Term) -> bool:
    """Is there a context s with c = s(a) and d = s(b)?"""
    if c == d:
        return True
    if isinstance(c, Term) and c == a and d == b:
        return True
    if type(c) is not type(d):
        return False
    if isinstance(c, Succ):
        # either the hole sits inside the prime chain (one candidate depth k)
        # or the context keeps every prime and continues below
        k = c.count - (a.count if isinstance(a, Succ) else 0)
        if 0 < k <= c.count and k <= d.count:
            if _strip(c, k) == a and _strip(d, k) == b:
                return True
        return c.count == d.count and _same_context(c.arg, d.arg, a, b)
    if isinstance(c, BINDERS):
        cb, db = _rename_pair(c, d)
        return _same_context(cb, db, a, b)
    kids_c, kids_d = c.children(), d.children()
    if not kids_c:
        return False
    return all(_same_context(x, y, a, b) for x, y in zip(kids_c, kids_d))


class _NoMatch(Exception):
    pass


def match_instance(pattern: Node, var: str, target: Node) -> Optional[Term]:
    """Find the closed term t with ``pattern[var := t] == target``.

    Returns ``None`` when no such term exists.  If ``var`` does not occur in
    ``pattern`` the match succeeds with ``Zero`` as a dummy witness.
    """
    binding: list[Term] = []

    def go(p: Node, q: Node):
        if var not in p.free_vars:
            if p != q:
                raise _NoMatch
            return
        if isinstance(p, Var):
            if q.free_vars or not isinstance(q, Term):
                raise _NoMatch
            if binding:
                if binding[0] != q:
                    raise _NoMatch
            else:
                binding.append(q)
            return
        if isinstance(p, Succ):
            if not isinstance(q, Succ) or q.count < p.count:
                raise _NoMatch
            rest = q.arg if q.count == p.count else Succ(q.arg, q.count - p.count)
            go(p.arg, rest)
            return
        if type(p) is not type(q):
            raise _NoMatch
        if isinstance(p, BINDERS):
            pb, qb = _rename_pair(p, q)
            go(pb, qb)
            return
        for x, y in zip(p.children(), q.children()):
            go(x, y)

    try:
        go(pattern, target)
    except _NoMatch:
        return None
    return binding[0] if binding else Zero()


@dataclass(frozen=True)
class CriticalInstance:
    """A critical formula split into its epsilon term and instance term.

    For the first kind the line reads ``A(t) -> A(eps)``, for the second
    ``A(t) -> eps < t'``, where ``A(x)`` is the body of ``eps``.
    """
    tag: AxiomTag
    eps: Eps
    instance: Term

    def matrix_at(self, t: Term) -> Formula:
        return substitute(self.eps.body, self.eps.var, t)


def match_crit2(f: Formula) -> Optional[CriticalInstance]:
    if not (isinstance(f, Imp) and isinstance(f.right, Lt)):
        return None
    e, r = f.right.left, f.right.right
    if not (isinstance(e, Eps) and isinstance(r, Succ) and e.is_closed):
        return None
    t = pred(r)
    if substitute(e.body, e.var, t) == f.left:
        return CriticalInstance(AxiomTag.CRIT2, e, t)
    return None


def match_crit1(f: Formula) -> Optional[CriticalInstance]:
    if not isinstance(f, Imp):
        return None
    consequent = f.right
    seen = set()
    for e in subterms(consequent):
        if not isinstance(e, Eps) or not e.is_closed or e in seen:
            continue
        seen.add(e)
        if substitute(e.body, e.var, e) != consequent:
            continue
        t = match_instance(e.body, e.var, f.left)
        if t is not None:
            return CriticalInstance(AxiomTag.CRIT1, e, t)
    return None


def match_critical(f: Formula) -> Optional[CriticalInstance]:
    return match_crit2(f) or match_crit1(f)


def _is_arith1(f):
    # ~ 0 = t'
    return (isinstance(f, Not) and isinstance(f.arg, Eq)
            and isinstance(f.arg.left, Zero) and isinstance(f.arg.right, Succ))


def _is_arith2(f):
    # t1' = t2' -> t1 = t2
    if not (isinstance(f, Imp) and isinstance(f.left, Eq) and isinstance(f.right, Eq)):
        return False
    a, b = f.left.left, f.left.right
    return (isinstance(a, Succ) and isinstance(b, Succ)
            and pred(a) == f.right.left and pred(b) == f.right.right)


def _is_arith3(f):
    # (t + 0) = t
    return (isinstance(f, Eq) and isinstance(f.left, Add)
            and isinstance(f.left.right, Zero) and f.left.left == f.right)


def _is_arith4(f):
    # (t1 + t2') = (t1 + t2)'
    if not (isinstance(f, Eq) and isinstance(f.left, Add) and isinstance(f.right, Succ)):
        return False
    t1, r = f.left.left, f.left.right
    return isinstance(r, Succ) and pred(f.right) == Add(t1, pred(r))


def _is_arith5(f):
    # (t * 0) = 0
    return (isinstance(f, Eq) and isinstance(f.left, Mul)
            and isinstance(f.left.right, Zero) and isinstance(f.right, Zero))


def _is_arith6(f):
    # (t1 * t2') = (t1 + (t1 * t2))
    if not (isinstance(f, Eq) and isinstance(f.left, Mul) and isinstance(f.right, Add)):
        return False
    t1, r = f.left.left, f.left.right
    rhs = f.right
    return (isinstance(r, Succ) and isinstance(rhs.right, Mul)
            and rhs.left == t1 and rhs.right.left == t1 and rhs.right.right == pred(r))


def _is_id_refl(f):
    return isinstance(f, Eq) and f.left == f.right


def _is_id_subst_term(f):
    # t1 = t2 -> s(t1) = s(t2)
    if not (isinstance(f, Imp) and isinstance(f.left, Eq) and isinstance(f.right, Eq)):
        return False
    a, b = f.left.left, f.left.right
    return _same_context(f.right.left, f.right.right, a, b)


def _is_id_subst_formula(f):
    # t1 = t2 -> (A(t1) -> A(t2))
    if not (isinstance(f, Imp) and isinstance(f.left, Eq) and isinstance(f.right, Imp)):
        return False
    a, b = f.left.left, f.left.right
    return _same_context(f.right.left, f.right.right, a, b)


def _is_taut(f):
    try:
        return is_tautology(f)
    except TooManyAtoms:
        return False


def _is_true_literal(f):
    lit = f.arg if isinstance(f, Not) else f
    if not isinstance(lit, ATOMS) or not is_real(lit):
        return False
    return truth(lit) != isinstance(f, Not)


_RECOGNIZERS = (
    (AxiomTag.CRIT2, lambda f: match_crit2(f) is not None),
    (AxiomTag.CRIT1, lambda f: match_crit1(f) is not None),
    (AxiomTag.ARITH1, _is_arith1),
    (AxiomTag.ARITH2, _is_arith2),
    (AxiomTag.ARITH3, _is_arith3),
    (AxiomTag.ARITH4, _is_arith4),
    (AxiomTag.ARITH5, _is_arith5),
    (AxiomTag.ARITH6, _is_arith6),
    (AxiomTag.ID_SUBST_TERM, _is_id_subst_term),
    (AxiomTag.ID_SUBST_FORMULA, _is_id_subst_formula),
    (AxiomTag.ID_REFL, _is_id_refl),
    (AxiomTag.TAUT, _is_taut),
    (AxiomTag.TRUE_LITERAL, _is_true_literal),
)

_RECOGNIZER = dict(_RECOGNIZERS)

_CRITICAL = {AxiomTag.CRIT1, AxiomTag.CRIT2}


def _tags_of(regime: Regime) -> frozenset[AxiomTag]:
    tags = set(AxiomTag) - _CRITICAL - {AxiomTag.TRUE_LITERAL}
    if regime is Regime.IDEAL:
        tags |= _CRITICAL
    elif regime is Regime.EXTENDED:
        tags.add(AxiomTag.TRUE_LITERAL)
    return frozenset(tags)


_ALLOWED = {r: _tags_of(r) for r in Regime}


def allowed_tags(regime: Regime) -> frozenset[AxiomTag]:
    return _ALLOWED[regime]


def _admissible(f: Formula, regime: Regime) -> bool:
    if not f.is_closed or f.has_quantifier:
        return False
    return regime is Regime.IDEAL or not f.has_eps


def is_instance(f: Formula, tag: AxiomTag, regime: Regime) -> bool:
    """Does ``f`` instantiate the schema ``tag`` within ``regime``?"""
    if tag not in allowed_tags(regime) or not _admissible(f, regime):
        return False
    return _RECOGNIZER[tag](f)


def classify_axiom(f: Formula, regime: Regime) -> Optional[AxiomTag]:
    """First matching schema in precedence order, or ``None``."""
    if not _admissible(f, regime):
        return None
    allowed = allowed_tags(regime)
    for tag, rec in _RECOGNIZERS:
        if tag in allowed and rec(f):
            return tag
    return None


def check(d: Derivation, regime: Regime) -> list[Optional[AxiomTag]]:
    """Verify every line; return the schema found for each axiom line.

    Raises :class:`CheckError` at the first failing line.  A declared tag
    that fits is preferred; otherwise any schema of the regime is accepted.
    """
    tags: list[Optional[AxiomTag]] = []
    for n, line in enumerate(d.lines, 1):
        f, j = line.formula, line.justification
        if isinstance(j, ModusPonens):
            if not (1 <= j.minor < n and 1 <= j.major < n):
                raise CheckError(n, CheckError.BAD_MP_INDEX, f"mp:{j.minor},{j.major}")
            major = d.lines[j.major - 1].formula
            minor = d.lines[j.minor - 1].formula
            if not (isinstance(major, Imp) and major.left == minor and major.right == f):
                raise CheckError(n, CheckError.BAD_MP_SHAPE,
                                 f"line {j.major} is not line {j.minor} -> line {n}")
            tags.append(None)
            continue
        if j.tag is not None and is_instance(f, j.tag, regime):
            tags.append(j.tag)
            continue
        tag = classify_axiom(f, regime)
        if tag is None:
            raise CheckError(n, CheckError.BAD_AXIOM, f"not an axiom of the {regime.value} regime")
        tags.append(tag)
    return tags


def is_valid(d: Derivation, regime: Regime) -> bool:
    try:
        check(d, regime)
    except CheckError:
        return False
    return True


def soundness_audit(d: Derivation) -> Optional[int]:
    """Evaluate every line; return the first false line number, or ``None``."""
    for n, line in enumerate(d.lines, 1):
        if not truth(line.formula):
            return n
    return None


def critical_lines(d: Derivation) -> list[tuple[int, CriticalInstance]]:
    """Axiom lines of ``d`` that are critical formulas, with their split."""
    out = []
    for n, line in enumerate(d.lines, 1):
        if isinstance(line.justification, Axiom):
            ci = match_critical(line.formula)
            if ci is not None and line.formula.is_closed:
                out.append((n, ci))
    return out



def shift_lines(lines, offset: int) -> list[Line]:
    """Renumber modus ponens references after moving lines down by ``offset``."""
    out = []
    for ln in lines:
        j = ln.justification
        if isinstance(j, ModusPonens):
            j = ModusPonens(j.minor + offset, j.major + offset)
        out.append(Line(ln.formula, j))
    return out


def derive_true_real(f: Formula) -> Derivation:
    """Derivation of a true real formula in the extended regime.

    With literals L1..Lk fixing the actual truth value of each atom, the
    formula ``L1 -> (L2 -> ... -> (Lk -> f))`` is a tautology, and k modus
    ponens steps discharge it.
    """
    if not is_real(f):
        raise ValueError(f"not a real formula: {f}")
    if not truth(f):
        raise ValueError(f"false formula has no derivation: {f}")
    tag = classify_axiom(f, Regime.EXTENDED)
    if tag is not None:
        return Derivation((Line(f, Axiom(tag)),))
    lits = [a if truth(a) else Not(a) for a in atoms(f)]
    lines = [Line(lit, Axiom(AxiomTag.TRUE_LITERAL)) for lit in lits]
    chain = f
    for lit in reversed(lits):
        chain = Imp(lit, chain)
    lines.append(Line(chain, Axiom(AxiomTag.TAUT)))
    current = len(lines)
    for i, lit in enumerate(lits, 1):
        chain = chain.right
        lines.append(Line(chain, ModusPonens(i, current)))
        current = len(lines)
    return Derivation(tuple(lines))
