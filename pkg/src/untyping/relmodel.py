"""Finite heterogeneous relations as a model of residuated and Kleene terms.

Every object gets a finite carrier (possibly empty) and every variable
``x : n -> m`` a boolean matrix of shape ``(|n|, |m|)``.  Terms are typed
by the same unification as in :mod:`untyping.typecheck`, and each subterm
is evaluated at the carriers of its endpoint classes.

Counterexample search enumerates, in this order:

* carrier sizes, as tuples in lexicographic order over the objects sorted
  by name (constants first, then unconstrained classes by number);
* for each size tuple, one binary counter per variable (variables in name
  order, the first one outermost); bit ``i*|m| + j`` of the counter is the
  pair ``(i, j)``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional

import numpy as np

from untyping.syntax import render
from untyping.terms import (
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
    RDiv,
    RDot,
    RTop,
    RUnit,
    RVar,
    variables,
)
from untyping.typecheck import Constant, MetaVar, TypeEnv, _obj, _Session


class TypeMismatch(ValueError):
    def __init__(self, subterm, reason: str):
        super().__init__(f"{render(subterm)}: {reason}")
        self.subterm = subterm


@dataclass(frozen=True)
class Carrier:
    name: str
    size: int

    def __post_init__(self):
        if self.size < 0:
            raise ValueError("carrier size must be non-negative")


@dataclass(frozen=True, eq=False)
class Rel:
    dom: Carrier
    cod: Carrier
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=bool)
        if m.shape != (self.dom.size, self.cod.size):
            raise ValueError(f"matrix shape {m.shape} does not fit {self.dom.size}x{self.cod.size}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_pairs(cls, dom: Carrier, cod: Carrier, pairs) -> "Rel":
        m = np.zeros((dom.size, cod.size), dtype=bool)
        for i, j in pairs:
            if not (0 <= i < dom.size and 0 <= j < cod.size):
                raise ValueError(f"pair ({i},{j}) outside {dom.name} x {cod.name}")
            m[i, j] = True
        return cls(dom, cod, m)

    @property
    def pairs(self) -> frozenset:
        return frozenset((int(i), int(j)) for i, j in zip(*np.nonzero(self.matrix)))

    def __le__(self, other: "Rel") -> bool:
        return self.matrix.shape == other.matrix.shape and not np.any(self.matrix & ~other.matrix)

    def __eq__(self, other):
        return (
            isinstance(other, Rel)
            and self.matrix.shape == other.matrix.shape
            and bool(np.array_equal(self.matrix, other.matrix))
        )

    __hash__ = None

    def __str__(self):
        return "{" + ", ".join(f"({i},{j})" for i, j in sorted(self.pairs)) + "}"


def _key(o):
    return (isinstance(o, MetaVar), o.id if isinstance(o, MetaVar) else o.name)


@dataclass(frozen=True)
class Valuation:
    """Carrier sizes per object and a relation per variable, typed by ``env``."""

    env: TypeEnv
    sizes: Mapping
    rels: Mapping[str, np.ndarray]

    def __post_init__(self):
        for x, (n, m) in self.env.bindings.items():
            if x not in self.rels:
                raise ValueError(f"no relation for {x}")
            shape = np.shape(self.rels[x])
            if n not in self.sizes or m not in self.sizes:
                raise ValueError(f"no carrier for the type of {x}")
            if shape != (self.sizes[n], self.sizes[m]):
                raise ValueError(f"relation for {x} has shape {shape}, expected {(self.sizes[n], self.sizes[m])}")

    def carrier(self, o) -> Carrier:
        return Carrier(str(o), self.sizes[o])

    def rel(self, x: str) -> Rel:
        n, m = self.env[x]
        return Rel(self.carrier(n), self.carrier(m), self.rels[x])


# ------------------------------------------------------------ evaluation


def _mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


def _star(a: np.ndarray) -> np.ndarray:
    r = a | np.eye(a.shape[0], dtype=bool)
    while True:
        nxt = _mul(r, r)
        if np.array_equal(nxt, r):
            return r
        r = nxt


class _Typed:
    """Joint typing of terms that share their two endpoints."""

    def __init__(self, terms, env: TypeEnv, n=None, m=None):
        s = self.session = _Session(env)
        self.a = s.node(_obj(n)) if n is not None else s.fresh()
        self.b = s.node(_obj(m)) if m is not None else s.fresh()
        self.records = []
        for t in terms:
            rec: list = []
            s.walk(t, self.a, self.b, rec)
            if not s.consistent:
                raise TypeMismatch(t, "no typing is compatible with the environment and endpoints")
            self.records.append(rec)

    def objects(self) -> list:
        s = self.session
        return sorted({s.obj(i) for i in range(len(s.parent))}, key=_key)

    def naming(self) -> dict:
        """Unconstrained classes become constants ``?0``, ``?1``, ... which
        no parsed name can clash with."""
        free = [o for o in self.objects() if isinstance(o, MetaVar)]
        return {o: Constant(f"?{k}") for k, o in enumerate(free)}

    def eval(self, k: int, v: Valuation, alias: Optional[dict] = None) -> Rel:
        s = self.session
        alias = alias or {}
        it = iter(self.records[k])
        kleene = isinstance(self.records[k][0][0], KaTerm)

        def size(i, u):
            o = s.obj(i)
            o = alias.get(o, o)
            if o in v.sizes:
                return v.sizes[o]
            if kleene and isinstance(o, MetaVar):
                # only zero can sit on a class no variable fixes
                return 0
            raise TypeMismatch(u, f"no carrier for object {o}")

        def go() -> np.ndarray:
            u, i, j = next(it)
            cls = type(u)
            if cls is KVar or cls is RVar:
                return np.asarray(v.rels[u.name], dtype=bool)
            if cls is KOne or cls is RUnit:
                return np.eye(size(i, u), dtype=bool)
            if cls is KZero:
                return np.zeros((size(i, u), size(j, u)), dtype=bool)
            if cls is RTop:
                return np.ones((size(i, u), size(j, u)), dtype=bool)
            if cls is KStar:
                return _star(go())
            left = go()
            right = go()
            if cls is KDot or cls is RDot:
                return _mul(left, right)
            if cls is KSum or cls is Join:
                return left | right
            if cls is Meet:
                return left & right
            if cls is LDiv:  # (i,j) iff every k with (k,i) in T has (k,j) in R
                return ~_mul(left.T, ~right)
            if cls is RDiv:  # (i,j) iff every k with (j,k) in b has (i,k) in c
                return ~_mul(~left, right.T)
            raise TypeMismatch(u, "not a relational term")

        mat = go()
        ends = [alias.get(s.obj(x), s.obj(x)) for x in (self.a, self.b)]
        return Rel(Carrier(str(ends[0]), mat.shape[0]), Carrier(str(ends[1]), mat.shape[1]), mat)


def _check_vars(terms, v: Valuation):
    for t in terms:
        for x in sorted(variables(t)):
            if x not in v.env:
                raise TypeMismatch(t, f"variable {x} has no relation")


def eval_term(t, v: Valuation, n=None, m=None) -> Rel:
    """Denotation of a residuated or Kleene term, optionally at ``(n, m)``."""
    _check_vars([t], v)
    return _Typed([t], v.env, n, m).eval(0, v)


def eval_sides(lhs, rhs, v: Valuation, n=None, m=None) -> tuple[Rel, Rel]:
    """Both denotations under one typing, so a side such as ``1`` or ``top``
    takes its carriers from the other."""
    _check_vars([lhs, rhs], v)
    typed = _Typed([lhs, rhs], v.env, n, m)
    return typed.eval(0, v), typed.eval(1, v)


def check_le(lhs, rhs, v: Valuation, n=None, m=None) -> bool:
    """Is the denotation of ``lhs`` contained in that of ``rhs``?"""
    left, right = eval_sides(lhs, rhs, v, n, m)
    return left <= right


# ------------------------------------------------------------ search


@dataclass
class SearchResult:
    witness: Optional[Valuation]
    visited: int


def iter_valuations(lhs, rhs, shape: TypeEnv, max_size: int, allow_empty: bool) -> Iterator[Valuation]:
    """All valuations of the objects and variables that ``lhs <= rhs``
    mentions, in the documented order."""
    return _valuations(_Typed([lhs, rhs], shape), sorted(variables(lhs) | variables(rhs)), max_size, allow_empty)


def _valuations(typed: _Typed, used: list, max_size: int, allow_empty: bool) -> Iterator[Valuation]:
    if max_size < 0:
        raise ValueError("max_size must be non-negative")
    s = typed.session
    alias = typed.naming()
    types = {x: tuple(alias.get(s.obj(i), s.obj(i)) for i in s.var(x)) for x in used}
    env = TypeEnv(types)
    objs = [alias.get(o, o) for o in typed.objects()]
    lo = 0 if allow_empty else 1
    for sizes in itertools.product(range(lo, max_size + 1), repeat=len(objs)):
        size_of = dict(zip(objs, sizes))
        shapes = [(size_of[n], size_of[m]) for n, m in (types[x] for x in used)]
        counters = [range(1 << (r * c)) for r, c in shapes]
        for bits in itertools.product(*counters):
            rels = {x: _unpack(b, r, c) for x, b, (r, c) in zip(used, bits, shapes)}
            yield Valuation(env, size_of, rels)


def _unpack(bits: int, rows: int, cols: int) -> np.ndarray:
    flat = [(bits >> k) & 1 for k in range(rows * cols)]
    return np.array(flat, dtype=bool).reshape(rows, cols)


def search_counterexample(lhs, rhs, shape: TypeEnv, max_size: int, allow_empty: bool) -> SearchResult:
    """First valuation (in enumeration order) where ``lhs <= rhs`` fails."""
    typed = _Typed([lhs, rhs], shape)
    alias = typed.naming()
    visited = 0
    for v in _valuations(typed, sorted(variables(lhs) | variables(rhs)), max_size, allow_empty):
        visited += 1
        if not typed.eval(0, v, alias) <= typed.eval(1, v, alias):
            return SearchResult(v, visited)
    return SearchResult(None, visited)


# ------------------------------------------------------------ text format

_CARRIER = re.compile(r"^\s*(\??[A-Za-z0-9_']+)\s*=\s*(\d+)\s*$")
_RELATION = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_']*)\s*:\s*(\??[A-Za-z0-9_']+)\s*->\s*(\??[A-Za-z0-9_']+)\s*=(.*)$")
_PAIR = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")


def _parse_object(name: str):
    return Constant(name)


def parse_valuation(text: str) -> Valuation:
    """Lines ``A = 2`` (carrier sizes) and ``R : A -> B = (0,1) (1,0)``;
    ``#`` starts a comment, ``{}`` may wrap the pairs."""
    sizes: dict = {}
    types: dict = {}
    pairs: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if m := _CARRIER.match(line):
            sizes[_parse_object(m[1])] = int(m[2])
        elif m := _RELATION.match(line):
            if m[1] in types:
                raise ValueError(f"line {lineno}: {m[1]} bound twice")
            types[m[1]] = (_parse_object(m[2]), _parse_object(m[3]))
            body = m[4].strip().strip("{}")
            pairs[m[1]] = [(int(i), int(j)) for i, j in _PAIR.findall(body)]
            if _PAIR.sub("", body).replace(",", "").strip():
                raise ValueError(f"line {lineno}: malformed pair list")
        else:
            raise ValueError(f"line {lineno}: expected 'A = size' or 'R : A -> B = pairs'")
    rels = {}
    for x, (n, m) in types.items():
        for o in (n, m):
            if o not in sizes:
                raise ValueError(f"no size given for object {o}")
        rels[x] = Rel.from_pairs(Carrier(str(n), sizes[n]), Carrier(str(m), sizes[m]), pairs[x]).matrix
    return Valuation(TypeEnv(types), sizes, rels)


def format_valuation(v: Valuation) -> str:
    lines = [f"{o} = {v.sizes[o]}" for o in sorted(v.sizes, key=_key)]
    for x in sorted(v.env.bindings):
        n, m = v.env[x]
        pairs = " ".join(f"({i},{j})" for i, j in sorted(v.rel(x).pairs))
        lines.append(f"{x} : {n} -> {m} = {{{pairs}}}")
    return "\n".join(lines)


eval = eval_term  # noqa: A001  (module-level name used by callers as relmodel.eval)
