"""Kleene-algebra terms: zero elimination and equality.

Untyped equality is language equality.  It is decided on the subset
automata of Antimirov partial derivatives, comparing the two automata with
a union-find bisimulation that never builds a full DFA.  Typed equality
reduces to the untyped question once both sides check at the requested type.
"""

from __future__ import annotations

import enum
from typing import Iterable, Optional

from untyping.terms import KONE, KZERO, KaTerm, KDot, KOne, KStar, KSum, KVar, KZero, variables
from untyping.typecheck import TypeEnv, check


def clean(t: KaTerm) -> KaTerm:
    """Normal form for a+0 -> a, 0+a -> a, 0.a -> 0, a.0 -> 0, 0* -> 1."""
    cls = type(t)
    if cls is KSum:
        a, b = clean(t.left), clean(t.right)
        if type(a) is KZero:
            return b
        if type(b) is KZero:
            return a
        return t if (a is t.left and b is t.right) else KSum(a, b)
    if cls is KDot:
        a, b = clean(t.left), clean(t.right)
        if type(a) is KZero or type(b) is KZero:
            return KZERO
        return t if (a is t.left and b is t.right) else KDot(a, b)
    if cls is KStar:
        a = clean(t.arg)
        if type(a) is KZero:
            return KONE
        return t if a is t.arg else KStar(a)
    return t


def is_strict(t: KaTerm) -> bool:
    return type(clean(t)) is not KZero


# ---------------------------------------------------------------- automata


def nullable(t: KaTerm) -> bool:
    cls = type(t)
    if cls is KOne or cls is KStar:
        return True
    if cls is KSum:
        return nullable(t.left) or nullable(t.right)
    if cls is KDot:
        return nullable(t.left) and nullable(t.right)
    return False


def _cat(a: KaTerm, b: KaTerm) -> KaTerm:
    return b if type(a) is KOne else KDot(a, b)


def partial_derivatives(t: KaTerm, x: str) -> frozenset:
    cls = type(t)
    if cls is KVar:
        return frozenset((KONE,)) if t.name == x else frozenset()
    if cls is KSum:
        return partial_derivatives(t.left, x) | partial_derivatives(t.right, x)
    if cls is KDot:
        out = {_cat(d, t.right) for d in partial_derivatives(t.left, x)}
        if nullable(t.left):
            out |= partial_derivatives(t.right, x)
        return frozenset(out)
    if cls is KStar:
        return frozenset(_cat(d, t) for d in partial_derivatives(t.arg, x))
    return frozenset()


class TermNfa:
    """Subset automaton over partial-derivative states, explored lazily.

    A state is a frozenset of terms; it accepts when one of them is nullable.
    """

    def __init__(self, term: KaTerm, alphabet: Iterable[str]):
        self.term = term
        self.alphabet = tuple(sorted(alphabet))
        self.start = frozenset((term,))
        self._delta: dict = {}

    def step(self, state: frozenset, x: str) -> frozenset:
        key = (state, x)
        nxt = self._delta.get(key)
        if nxt is None:
            acc: set = set()
            for t in state:
                acc |= partial_derivatives(t, x)
            nxt = self._delta[key] = frozenset(acc)
        return nxt

    @staticmethod
    def accepting(state: frozenset) -> bool:
        return any(nullable(t) for t in state)

    def accepts(self, word: Iterable[str]) -> bool:
        s = self.start
        for x in word:
            s = self.step(s, x)
        return self.accepting(s)

    def states(self) -> set:
        seen = {self.start}
        todo = [self.start]
        while todo:
            s = todo.pop()
            for x in self.alphabet:
                n = self.step(s, x)
                if n not in seen:
                    seen.add(n)
                    todo.append(n)
        return seen


def decide_untyped(a: KaTerm, b: KaTerm) -> bool:
    """Do ``a`` and ``b`` denote the same regular language?"""
    alphabet = variables(a) | variables(b)
    na, nb = TermNfa(clean(a), alphabet), TermNfa(clean(b), alphabet)
    parent: dict = {}

    def find(u):
        while True:
            p = parent.get(u, u)
            if p == u:
                return u
            g = parent.get(p, p)
            parent[u] = g
            u = g

    # tag the sides so equal state sets of different automata stay distinct
    todo = [(na.start, nb.start)]
    parent[(0, na.start)] = (1, nb.start)
    while todo:
        s, t = todo.pop()
        if na.accepting(s) != nb.accepting(t):
            return False
        for x in na.alphabet:
            s2, t2 = na.step(s, x), nb.step(t, x)
            r1, r2 = find((0, s2)), find((1, t2))
            if r1 != r2:
                parent[r1] = r2
                todo.append((s2, t2))
    return True


class Verdict(enum.Enum):
    EQUAL = "Equal"
    NOT_EQUAL = "NotEqual"
    ILL_TYPED_LEFT = "IllTyped(left)"
    ILL_TYPED_RIGHT = "IllTyped(right)"

    @property
    def side(self) -> Optional[str]:
        if self is Verdict.ILL_TYPED_LEFT:
            return "left"
        if self is Verdict.ILL_TYPED_RIGHT:
            return "right"
        return None

    def __str__(self):
        return self.value


def decide_typed(a: KaTerm, b: KaTerm, env: TypeEnv, n, m) -> Verdict:
    """Typed equality at ``n -> m``: both sides must check, then untyped
    equality is enough."""
    if not check(a, env, n, m):
        return Verdict.ILL_TYPED_LEFT
    if not check(b, env, n, m):
        return Verdict.ILL_TYPED_RIGHT
    return Verdict.EQUAL if decide_untyped(a, b) else Verdict.NOT_EQUAL
