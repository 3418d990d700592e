"""ASCII surface syntax: parsing and rendering.

Formulas::

    formula := level1 ;  level1 := level2 (("|" | "+") level2)* ;
    level2  := atom (("*" | "&") atom)* ;
    atom    := ident | "~" ident | "1" | "bot" | "top" | "0" | "(" formula ")"
    sequent := [formula ("," formula)*]

``*`` is tensor, ``|`` par, ``+`` plus, ``&`` with, ``~x`` the dual atom.

Kleene terms: ``+`` (lowest), ``.``, postfix ``*``; constants ``0`` and ``1``.

Residuated terms: ``\\`` and ``/`` (lowest, non-associative), ``\\/`` join,
``/\\`` meet, ``.`` product; constants ``1`` and ``top``.

Environments: one ``x : n -> m`` binding per line, ``#`` starts a comment.

All binaries are left-associative.  Rendering inserts exactly the
parentheses the grammar needs, so ``parse(render(t)) == t``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from untyping.terms import (
    BOT,
    KONE,
    KZERO,
    ONE,
    RTOP,
    RUNIT,
    TOP,
    ZERO,
    Atom,
    Bot,
    Dual,
    Formula,
    Join,
    KaTerm,
    KDot,
    KOne,
    KStar,
    KSum,
    KVar,
    KZero,
    LDiv,
    Meet,
    One,
    Par,
    Plus,
    RDiv,
    RDot,
    RmTerm,
    RTop,
    RUnit,
    RVar,
    Tensor,
    Top,
    With,
    Zero,
)
from untyping.typecheck import Constant, TypeEnv


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1


class ParseError(ValueError):
    def __init__(self, span: SourceSpan, expected: str, found: str):
        self.span = span
        self.expected = expected
        self.found = found
        super().__init__(
            f"line {span.line}, column {span.column}: expected {expected}, found {found}"
        )


class DuplicateBinding(ParseError):
    def __init__(self, span: SourceSpan, name: str):
        self.name = name
        ValueError.__init__(
            self, f"line {span.line}, column {span.column}: duplicate binding for {name!r}"
        )
        self.span = span
        self.expected = "a fresh variable"
        self.found = repr(name)


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<num>[0-9]+)
  | (?P<op>\|-|->|<=|\\/|/\\|[~*|+&().,\\/:])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"bot", "top"}


@dataclass(frozen=True)
class _Tok:
    kind: str  # "ident", "num", "op", "eof"
    text: str
    span: SourceSpan

    def describe(self) -> str:
        if self.kind == "eof":
            return "end of input"
        return repr(self.text)


def _tokenize(text: str, line_offset: int = 0) -> list[_Tok]:
    toks = []
    pos, line, col = 0, 1 + line_offset, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(SourceSpan(line, col), "a token", repr(text[pos]))
        kind, lexeme = m.lastgroup, m.group()
        if kind != "ws":
            toks.append(_Tok(kind, lexeme, SourceSpan(line, col, len(lexeme))))
        for ch in lexeme:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    toks.append(_Tok("eof", "", SourceSpan(line, col)))
    return toks


class _Parser:
    def __init__(self, text: str, line_offset: int = 0):
        self.toks = _tokenize(text, line_offset)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("op", "num") and t.text in texts

    def take(self) -> _Tok:
        t = self.tok
        self.i += 1
        return t

    def fail(self, expected: str):
        raise ParseError(self.tok.span, expected, self.tok.describe())

    def expect(self, text: str) -> _Tok:
        if not (self.tok.text == text and self.tok.kind != "eof"):
            self.fail(repr(text))
        return self.take()

    def ident(self, what: str = "an identifier") -> str:
        if self.tok.kind != "ident" or self.tok.text in _KEYWORDS:
            self.fail(what)
        return self.take().text

    def end(self):
        if self.tok.kind != "eof":
            self.fail("end of input")

    # formulas

    def formula(self) -> Formula:
        f = self.level2()
        while self.at("|", "+"):
            op = self.take().text
            g = self.level2()
            f = Par(f, g) if op == "|" else Plus(f, g)
        return f

    def level2(self) -> Formula:
        f = self.fatom()
        while self.at("*", "&"):
            op = self.take().text
            g = self.fatom()
            f = Tensor(f, g) if op == "*" else With(f, g)
        return f

    def fatom(self) -> Formula:
        t = self.tok
        if t.kind == "ident":
            self.take()
            if t.text == "bot":
                return BOT
            if t.text == "top":
                return TOP
            return Atom(t.text)
        if self.at("~"):
            self.take()
            return Dual(self.ident("a variable after '~'"))
        if self.at("1", "0"):
            return ONE if self.take().text == "1" else ZERO
        if self.at("("):
            self.take()
            f = self.formula()
            self.expect(")")
            return f
        self.fail("a formula")

    def sequent(self) -> tuple:
        if self.tok.kind == "eof":
            return ()
        items = [self.formula()]
        while self.at(","):
            self.take()
            items.append(self.formula())
        return tuple(items)

    # Kleene terms

    def ksum(self) -> KaTerm:
        t = self.kdot()
        while self.at("+"):
            self.take()
            t = KSum(t, self.kdot())
        return t

    def kdot(self) -> KaTerm:
        t = self.kstar()
        while self.at("."):
            self.take()
            t = KDot(t, self.kstar())
        return t

    def kstar(self) -> KaTerm:
        t = self.katom()
        while self.at("*"):
            self.take()
            t = KStar(t)
        return t

    def katom(self) -> KaTerm:
        if self.tok.kind == "ident" and self.tok.text not in _KEYWORDS:
            return KVar(self.take().text)
        if self.at("1", "0"):
            return KONE if self.take().text == "1" else KZERO
        if self.at("("):
            self.take()
            t = self.ksum()
            self.expect(")")
            return t
        self.fail("a Kleene term")

    # residuated terms

    def rterm(self) -> RmTerm:
        t = self.rjoin()
        if self.at("\\", "/"):
            op = self.take().text
            u = self.rjoin()
            t = LDiv(t, u) if op == "\\" else RDiv(t, u)
            if self.at("\\", "/"):
                self.fail("parentheses (divisions do not associate)")
        return t

    def rjoin(self) -> RmTerm:
        t = self.rmeet()
        while self.at("\\/"):
            self.take()
            t = Join(t, self.rmeet())
        return t

    def rmeet(self) -> RmTerm:
        t = self.rdot()
        while self.at("/\\"):
            self.take()
            t = Meet(t, self.rdot())
        return t

    def rdot(self) -> RmTerm:
        t = self.ratom()
        while self.at("."):
            self.take()
            t = RDot(t, self.ratom())
        return t

    def ratom(self) -> RmTerm:
        t = self.tok
        if t.kind == "ident" and t.text != "bot":
            self.take()
            return RTOP if t.text == "top" else RVar(t.text)
        if self.at("1"):
            self.take()
            return RUNIT
        if self.at("("):
            self.take()
            u = self.rterm()
            self.expect(")")
            return u
        self.fail("a residuated term")


def _run(text: str, rule, line_offset: int = 0):
    if not isinstance(text, str):
        raise TypeError("expected text")
    p = _Parser(text, line_offset)
    try:
        value = rule(p)
    except RecursionError:
        raise ParseError(p.tok.span, "shallower nesting", p.tok.describe()) from None
    p.end()
    return value


def parse_formula(text: str) -> Formula:
    return _run(text, _Parser.formula)


def parse_sequent(text: str) -> tuple:
    return _run(text, _Parser.sequent)


def parse_ka_term(text: str) -> KaTerm:
    return _run(text, _Parser.ksum)


def parse_rm_term(text: str) -> RmTerm:
    return _run(text, _Parser.rterm)


def _judgement(p: _Parser):
    hyps = []
    if not p.at("|-"):
        hyps.append(p.rterm())
        while p.at(","):
            p.take()
            hyps.append(p.rterm())
    p.expect("|-")
    return hyps, p.rterm()


def parse_rm_judgement(text: str) -> tuple[list, RmTerm]:
    """``"t1, ..., tk |- t"`` -> ``([t1, ..., tk], t)``; the list may be empty."""
    return _run(text, _judgement)


def _inequation(term):
    def rule(p: _Parser):
        lhs = term(p)
        p.expect("<=")
        return lhs, term(p)

    return rule


def parse_rm_inequation(text: str) -> tuple[RmTerm, RmTerm]:
    """``"a <= b"`` over residuated terms."""
    return _run(text, _inequation(_Parser.rterm))


def parse_ka_inequation(text: str) -> tuple[KaTerm, KaTerm]:
    return _run(text, _inequation(_Parser.ksum))


def _object_name(p: _Parser) -> str:
    if p.tok.kind in ("ident", "num"):
        return p.take().text
    p.fail("an object name")


def parse_env(text: str) -> TypeEnv:
    """Parse ``x : n -> m`` lines into an environment of constant objects."""
    bindings = {}
    for lineno, raw in enumerate(text.splitlines()):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        p = _Parser(line, lineno)
        start = p.tok.span
        name = p.ident("a variable")
        p.expect(":")
        src = _object_name(p)
        p.expect("->")
        dst = _object_name(p)
        p.end()
        if name in bindings:
            raise DuplicateBinding(start, name)
        bindings[name] = (Constant(src), Constant(dst))
    return TypeEnv(bindings)


# ---------------------------------------------------------------- rendering

_F_LEVEL = {Par: 1, Plus: 1, Tensor: 2, With: 2}
_F_OP = {Par: "|", Plus: "+", Tensor: "*", With: "&"}


def _render_formula(f) -> tuple[str, int]:
    cls = type(f)
    if cls is Atom:
        return f.name, 3
    if cls is Dual:
        return "~" + f.name, 3
    if cls is One:
        return "1", 3
    if cls is Bot:
        return "bot", 3
    if cls is Zero:
        return "0", 3
    if cls is Top:
        return "top", 3
    level = _F_LEVEL[cls]
    a, la = _render_formula(f.left)
    b, lb = _render_formula(f.right)
    if la < level:
        a = f"({a})"
    if lb <= level:
        b = f"({b})"
    return f"{a} {_F_OP[cls]} {b}", level


_K_LEVEL = {KSum: 1, KDot: 2}


def _render_ka(t) -> tuple[str, int]:
    cls = type(t)
    if cls is KVar:
        return t.name, 4
    if cls is KOne:
        return "1", 4
    if cls is KZero:
        return "0", 4
    if cls is KStar:
        a, la = _render_ka(t.arg)
        return (a if la >= 3 else f"({a})") + "*", 3
    level = _K_LEVEL[cls]
    a, la = _render_ka(t.left)
    b, lb = _render_ka(t.right)
    if la < level:
        a = f"({a})"
    if lb <= level:
        b = f"({b})"
    return (f"{a} + {b}" if cls is KSum else f"{a}.{b}"), level


_R_LEVEL = {LDiv: 0, RDiv: 0, Join: 1, Meet: 2, RDot: 3}
_R_OP = {LDiv: " \\ ", RDiv: " / ", Join: " \\/ ", Meet: " /\\ ", RDot: "."}


def _render_rm(t) -> tuple[str, int]:
    cls = type(t)
    if cls is RVar:
        return t.name, 4
    if cls is RUnit:
        return "1", 4
    if cls is RTop:
        return "top", 4
    level = _R_LEVEL[cls]
    a, la = _render_rm(t.left)
    b, lb = _render_rm(t.right)
    if la < level or (level == 0 and la == 0):
        a = f"({a})"
    if lb <= level:
        b = f"({b})"
    return a + _R_OP[cls] + b, level


def render(t) -> str:
    """Render a formula, term, or sequent (tuple of formulas) as parseable text."""
    if isinstance(t, tuple):
        return ", ".join(render(f) for f in t)
    if isinstance(t, Formula):
        return _render_formula(t)[0]
    if isinstance(t, KaTerm):
        return _render_ka(t)[0]
    if isinstance(t, RmTerm):
        return _render_rm(t)[0]
    raise TypeError(f"cannot render {t!r}")


def render_judgement(hyps, goal) -> str:
    return ", ".join(render(h) for h in hyps) + (" |- " if hyps else "|- ") + render(goal)


def render_env(env: TypeEnv) -> str:
    return "".join(f"{x} : {a} -> {b}\n" for x, (a, b) in sorted(env.bindings.items()))
