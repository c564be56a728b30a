"""ASCII surface syntax: parser, printer, and the derivation file format.

Grammar (``'`` is postfix successor; ``+`` and ``*`` need parentheses)::

    formula := disj ['->' formula]
    disj    := conj {'|' conj}
    conj    := unary {'&' unary}
    unary   := '~' unary | ('Ex' | 'All') IDENT unary | atom
    atom    := term ('=' | '<') term | '(' formula ')'
    term    := primary {"'"}
    primary := '0' | DIGITS | IDENT | 'eps' IDENT '(' formula ')'
             | '(' term ('+' | '*') term ')' | '(' term ')'

Decimal literals are shorthand for standard numerals.  The Unicode forms
``¬ ∨ ∧ → ∃ ∀ ε × ′`` are accepted as well.  The printer emits fully
parenthesized ASCII, and ``parse(format(x)) == x`` for every tree.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    Add, And, Axiom, AxiomTag, Derivation, Eps, Eq, Exists, Forall, Formula,
    Imp, Line, Lt, ModusPonens, Mul, Node, Not, Or, Succ, Term, Var, Zero,
    numeral,
)


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.message = message
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


class UnboundEpsilonError(ParseError):
    """``eps x (A)`` where ``x`` does not occur free in ``A``."""


KEYWORDS = {"Ex", "All", "eps"}

_UNICODE = {
    "¬": "~", "∨": "|", "∧": "&", "→": "->", "∃": "Ex ", "∀": "All ",
    "ε": "eps ", "×": "*", "′": "'",
}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>['()+*=<~|&])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def _normalize(text: str) -> str:
    for u, a in _UNICODE.items():
        text = text.replace(u, a)
    return text


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            tok = m.group()
            if kind == "ident" and tok in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, tok, pos))
        pos = m.end()
    out.append(Token("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.furthest: ParseError | None = None

    def peek(self) -> Token:
        return self.toks[self.i]

    def fail(self, msg: str) -> ParseError:
        tok = self.peek()
        err = ParseError(f"{msg}, found {tok.text or 'end of input'!r}", tok.pos, self.text)
        if self.furthest is None or err.pos >= self.furthest.pos:
            self.furthest = err
        return err

    def accept(self, text: str) -> bool:
        if self.peek().text == text and self.peek().kind != "eof":
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text or tok.kind == "eof":
            raise self.fail(f"expected {text!r}")
        self.i += 1
        return tok

    def ident(self) -> str:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.fail("expected a variable name")
        self.i += 1
        return tok.text

    def attempt(self, fn):
        save = self.i
        try:
            return fn()
        except UnboundEpsilonError:
            raise
        except ParseError:
            self.i = save
            return None

    # formulas

    def formula(self) -> Formula:
        left = self.disj()
        if self.accept("->"):
            return Imp(left, self.formula())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.accept("|"):
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.accept("&"):
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if self.accept("~"):
            return Not(self.unary())
        if tok.kind == "kw" and tok.text in ("Ex", "All"):
            self.i += 1
            v = self.ident()
            body = self.unary()
            return (Exists if tok.text == "Ex" else Forall)(v, body)
        return self.atom()

    def atom(self) -> Formula:
        res = self.attempt(self._comparison)
        if res is not None:
            return res
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        raise self.fail("expected a formula")

    def _comparison(self) -> Formula:
        left = self.term()
        if self.accept("="):
            return Eq(left, self.term())
        if self.accept("<"):
            return Lt(left, self.term())
        raise self.fail("expected '=' or '<'")

    # terms

    def term(self) -> Term:
        t = self.primary()
        n = 0
        while self.accept("'"):
            n += 1
        return Succ(t, n) if n else t

    def primary(self) -> Term:
        tok = self.peek()
        if tok.kind == "num":
            self.i += 1
            return numeral(int(tok.text))
        if tok.kind == "ident":
            self.i += 1
            return Var(tok.text)
        if tok.kind == "kw" and tok.text == "eps":
            self.i += 1
            v = self.ident()
            self.expect("(")
            body = self.formula()
            self.expect(")")
            if v not in body.free_vars:
                raise UnboundEpsilonError(
                    f"epsilon variable {v!r} does not occur free in its body", tok.pos, self.text)
            return Eps(v, body)
        if self.accept("("):
            left = self.term()
            if self.accept("+"):
                right = self.term()
                self.expect(")")
                return Add(left, right)
            if self.accept("*"):
                right = self.term()
                self.expect(")")
                return Mul(left, right)
            self.expect(")")
            return left
        raise self.fail("expected a term")

    def finish(self, node):
        if self.peek().kind != "eof":
            raise self.fail("unexpected trailing input")
        return node


def _run(text: str, rule: str):
    p = _Parser(_normalize(text))
    try:
        node = getattr(p, rule)()
        return p.finish(node)
    except UnboundEpsilonError as err:
        raise UnboundEpsilonError(err.message, err.pos, text) from None
    except ParseError as err:
        best = p.furthest if p.furthest is not None and p.furthest.pos > err.pos else err
        raise ParseError(best.message, best.pos, text) from None


def parse_term(text: str) -> Term:
    return _run(text, "term")


def parse_formula(text: str) -> Formula:
    return _run(text, "formula")


def parse_expr(text: str) -> Node:
    """A formula if the text reads as one, otherwise a term."""
    try:
        return parse_formula(text)
    except ParseError:
        return parse_term(text)


# -- printing ----------------------------------------------------------------

def format_node(node: Node) -> str:
    if isinstance(node, Zero):
        return "0"
    if isinstance(node, Succ):
        return format_node(node.arg) + "'" * node.count
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Add):
        return f"({format_node(node.left)} + {format_node(node.right)})"
    if isinstance(node, Mul):
        return f"({format_node(node.left)} * {format_node(node.right)})"
    if isinstance(node, Eps):
        body = format_node(node.body)
        if not isinstance(node.body, (Or, And, Imp)):
            body = f"({body})"
        return f"eps {node.var} {body}"
    if isinstance(node, Eq):
        return f"{format_node(node.left)} = {format_node(node.right)}"
    if isinstance(node, Lt):
        return f"{format_node(node.left)} < {format_node(node.right)}"
    if isinstance(node, Not):
        return "~" + format_node(node.arg)
    if isinstance(node, Or):
        return f"({format_node(node.left)} | {format_node(node.right)})"
    if isinstance(node, And):
        return f"({format_node(node.left)} & {format_node(node.right)})"
    if isinstance(node, Imp):
        return f"({format_node(node.left)} -> {format_node(node.right)})"
    if isinstance(node, Exists):
        return f"Ex {node.var} {format_node(node.body)}"
    if isinstance(node, Forall):
        return f"All {node.var} {format_node(node.body)}"
    raise TypeError(f"not a syntax node: {node!r}")


# -- derivation files --------------------------------------------------------

_TAGS = {t.value: t for t in AxiomTag}
_LINE = re.compile(r"^\s*(ax|mp):(\S+)\s+(.*?)\s*$")


def format_line(line: Line) -> str:
    j = line.justification
    if isinstance(j, ModusPonens):
        head = f"mp:{j.minor},{j.major}"
    else:
        head = f"ax:{j.tag.value if j.tag else 'any'}"
    return f"{head} {format_node(line.formula)}"


def format_derivation(d: Derivation) -> str:
    return "".join(format_line(ln) + "\n" for ln in d.lines)


def parse_derivation(text: str) -> Derivation:
    """Parse the line-oriented derivation format.

    Each line is ``ax:<tag> <formula>`` or ``mp:<i>,<j> <formula>`` with
    1-based line numbers.  Blank lines and lines starting with ``#`` are
    skipped and do not count towards numbering.
    """
    lines = []
    for raw_no, raw in enumerate(text.splitlines(), 1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        m = _LINE.match(raw)
        if m is None:
            raise ParseError(f"line {raw_no}: expected 'ax:<tag>' or 'mp:<i>,<j>'", 0, raw)
        kind, arg, body = m.groups()
        if kind == "ax":
            if arg == "any":
                just = Axiom()
            elif arg in _TAGS:
                just = Axiom(_TAGS[arg])
            else:
                raise ParseError(f"line {raw_no}: unknown axiom tag {arg!r}", 0, raw)
        else:
            try:
                i, j = (int(x) for x in arg.split(","))
            except ValueError:
                raise ParseError(f"line {raw_no}: bad modus ponens reference {arg!r}", 0, raw) from None
            just = ModusPonens(i, j)
        try:
            formula = parse_formula(body)
        except ParseError as err:
            raise ParseError(f"line {raw_no}: {err.message}", err.pos, raw) from None
        lines.append(Line(formula, just))
    return Derivation(tuple(lines))
