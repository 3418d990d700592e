"""Typing judgements ``a : n -> m`` over abstract objects.

Two independent engines live here:

* ``infer_*`` build the most general type of a term or sequent by
  unifying equality constraints between objects (union-find);
* ``check*`` decide a concrete judgement by computing, bottom-up, the
  relation of all object pairs a term can be typed at.

They are cross-checked in the test-suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Optional, Union

from untyping.terms import (
    Atom,
    Bot,
    Dual,
    Join,
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
    RTop,
    RUnit,
    RVar,
    Tensor,
    Top,
    With,
    Zero,
)


@dataclass(frozen=True, order=True)
class Constant:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class MetaVar:
    id: int

    def __str__(self):
        return f"?{self.id}"


ObjectTerm = Union[Constant, MetaVar]


class UnboundVariable(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"unbound variable {self.name!r}"


class PreconditionViolated(ValueError):
    pass


def _obj(o) -> ObjectTerm:
    return o if isinstance(o, (Constant, MetaVar)) else Constant(str(o))


@dataclass(frozen=True)
class TypeEnv:
    """Variable -> (source object, target object).  Each variable bound once."""

    bindings: Mapping[str, tuple] = field(default_factory=dict)

    @classmethod
    def of(cls, **types) -> "TypeEnv":
        """``TypeEnv.of(x=("n", "m"))``: plain strings become constants."""
        return cls({x: (_obj(a), _obj(b)) for x, (a, b) in types.items()})

    def __contains__(self, name):
        return name in self.bindings

    def __getitem__(self, name):
        try:
            return self.bindings[name]
        except KeyError:
            raise UnboundVariable(name) from None

    def __len__(self):
        return len(self.bindings)

    def objects(self) -> set:
        return {o for pair in self.bindings.values() for o in pair}


EMPTY_ENV = TypeEnv()

# ------------------------------------------------------------ unification


class _Session:
    """One inference run: union-find over integer nodes.

    Metavariable ``?i`` is node ``i``; constants get their own nodes and
    are kept as class roots, so a root tells whether its class is fixed.
    """

    def __init__(self, env: Optional[TypeEnv]):
        self.parent: list[int] = []
        self.rank: list[int] = []
        self.label: list[Optional[Constant]] = []
        self.consistent = True
        self.env = env if env is not None else EMPTY_ENV
        self.var_nodes: dict[str, tuple[int, int]] = {}
        self._cnodes: dict[Constant, int] = {}
        self._mnodes: dict[MetaVar, int] = {}

    def fresh(self) -> int:
        i = len(self.parent)
        self.parent.append(i)
        self.rank.append(0)
        self.label.append(None)
        return i

    def node(self, o: ObjectTerm) -> int:
        if isinstance(o, Constant):
            i = self._cnodes.get(o)
            if i is None:
                i = self._cnodes[o] = self.fresh()
                self.label[i] = o
            return i
        i = self._mnodes.get(o)
        if i is None:
            i = self._mnodes[o] = self.fresh()
        return i

    def find(self, i: int) -> int:
        parent = self.parent
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        la, lb = self.label[ra], self.label[rb]
        if la is not None and lb is not None:
            self.consistent = False
        if lb is not None and la is None:
            ra, rb = rb, ra
        elif (la is None) == (lb is None) and self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1

    def var(self, name: str) -> tuple[int, int]:
        pair = self.var_nodes.get(name)
        if pair is None:
            if name in self.env.bindings:
                a, b = self.env.bindings[name]
                pair = (self.node(a), self.node(b))
            else:
                pair = (self.fresh(), self.fresh())
            self.var_nodes[name] = pair
        return pair

    def walk(self, t, s: int, e: int, record: Optional[list] = None) -> None:
        """Add the constraints of ``t : s -> e``."""
        if record is not None:
            record.append((t, s, e))
        cls = type(t)
        if cls is Atom or cls is KVar or cls is RVar:
            n, m = self.var(t.name)
            self.union(s, n)
            self.union(e, m)
        elif cls is Dual:
            n, m = self.var(t.name)
            self.union(s, m)
            self.union(e, n)
        elif cls is Tensor or cls is Par or cls is KDot or cls is RDot:
            mid = self.fresh()
            self.walk(t.left, s, mid, record)
            self.walk(t.right, mid, e, record)
        elif cls is One or cls is Bot or cls is KOne or cls is RUnit:
            self.union(s, e)
        elif cls is Plus or cls is With or cls is KSum or cls is Join or cls is Meet:
            self.walk(t.left, s, e, record)
            self.walk(t.right, s, e, record)
        elif cls is KStar:
            self.union(s, e)
            self.walk(t.arg, s, s, record)
        elif cls is LDiv:
            # c : n -> m and a : n -> p give a\c : p -> m
            n = self.fresh()
            self.walk(t.left, n, s, record)
            self.walk(t.right, n, e, record)
        elif cls is RDiv:
            # c : n -> m and b : p -> m give c/b : n -> p
            m = self.fresh()
            self.walk(t.left, s, m, record)
            self.walk(t.right, e, m, record)
        elif cls is Top or cls is Zero or cls is KZero or cls is RTop:
            pass
        else:
            raise TypeError(f"not a term: {t!r}")

    def obj(self, i: int) -> ObjectTerm:
        """Representative of node ``i``'s class: its constant, else ``?root``."""
        r = self.find(i)
        return self.label[r] or MetaVar(r)


@dataclass
class Mgu:
    """Most general type: a partition of objects plus the two endpoints."""

    session: _Session = field(repr=False)
    start: MetaVar
    end: MetaVar

    @property
    def consistent(self) -> bool:
        return self.session.consistent

    @property
    def var_types(self) -> dict:
        """Variable -> (source, target) class representatives."""
        s = self.session
        return {x: (s.obj(a), s.obj(b)) for x, (a, b) in s.var_nodes.items()}

    def _node(self, o: ObjectTerm) -> int:
        s = self.session
        if isinstance(o, MetaVar) and o.id < len(s.parent) and o not in s._mnodes:
            return o.id
        return s.node(o)

    def find(self, o: ObjectTerm) -> ObjectTerm:
        return self.session.obj(self._node(o))

    def same(self, a: ObjectTerm, b: ObjectTerm) -> bool:
        return self.session.find(self._node(a)) == self.session.find(self._node(b))

    def unify(self, a: ObjectTerm, b: ObjectTerm) -> "Mgu":
        self.session.union(self._node(a), self._node(b))
        return self

    def classes(self) -> list:
        """Partition of all nodes, as lists of object terms (deterministic order)."""
        s = self.session
        groups: dict[int, list] = {}
        for i in range(len(s.parent)):
            groups.setdefault(s.find(i), []).append(s.label[i] or MetaVar(i))
        return [groups[r] for r in sorted(groups)]

    def endpoints(self) -> tuple:
        return self.find(self.start), self.find(self.end)


def _mgu(session: _Session, start: int, end: int) -> Mgu:
    return Mgu(session, MetaVar(start), MetaVar(end))


def infer_sequent(seq, partial: Optional[TypeEnv] = None) -> Mgu:
    """Most general type of a list of formulas, boundaries ``?0 .. ?k``."""
    s = _Session(partial)
    bounds = [s.fresh() for _ in range(len(seq) + 1)]
    for j, f in enumerate(seq):
        s.walk(f, bounds[j], bounds[j + 1])
    return _mgu(s, bounds[0], bounds[-1])


def sequent_boundaries(seq, partial: Optional[TypeEnv] = None) -> tuple[Mgu, list]:
    """Like :func:`infer_sequent`, also returning the boundary metavariables."""
    m = infer_sequent(seq, partial)
    return m, [MetaVar(i) for i in range(len(seq) + 1)]


def infer_term(t, partial: Optional[TypeEnv] = None, record: Optional[list] = None) -> Mgu:
    """Most general type of a single Kleene, residuated or MALL term."""
    s = _Session(partial)
    a, b = s.fresh(), s.fresh()
    s.walk(t, a, b, record)
    return _mgu(s, a, b)


def infer_ka(t, partial: Optional[TypeEnv] = None) -> Mgu:
    return infer_term(t, partial)


def infer_rm(t, partial: Optional[TypeEnv] = None) -> Mgu:
    return infer_term(t, partial)


def is_square(m: Mgu) -> bool:
    return m.consistent and m.same(m.start, m.end)


def passes_square_check(seq, partial: Optional[TypeEnv] = None) -> bool:
    """Pruning test: a consistent most general type whose endpoints differ
    rules the sequent out.  Inconsistent typings carry no information."""
    if partial is None or not partial.bindings:
        return _endpoints_meet(seq)
    s = _Session(partial)
    first = s.fresh()
    b = first
    for f in seq:
        nxt = s.fresh()
        s.walk(f, b, nxt)
        b = nxt
    return (not s.consistent) or s.find(first) == s.find(b)


_SYMBOLS: dict = {}


def _symbol(x: str, k: int) -> int:
    return _SYMBOLS.setdefault((x, k), -1 - len(_SYMBOLS))


_MID = 2


def _span(pairs) -> tuple:
    """Spanning pairs of the partition ``pairs`` generate, without ``_MID``."""
    group: dict = {}
    for u, v in pairs:
        gu, gv = group.get(u), group.get(v)
        if gu is None and gv is None:
            group[u] = group[v] = [u, v]
        elif gu is None:
            gv.append(u)
            group[u] = gv
        elif gv is None:
            gu.append(v)
            group[v] = gu
        elif gu is not gv:
            if len(gu) < len(gv):
                gu, gv = gv, gu
            gu.extend(gv)
            for w in gv:
                group[w] = gu
    out = []
    done = set()
    for g in group.values():
        if id(g) in done:
            continue
        done.add(id(g))
        kept = [w for w in g if w != _MID]
        out.extend((kept[0], w) for w in kept[1:])
    return tuple(out)


@lru_cache(maxsize=1 << 18)
def _links(f) -> tuple:
    """Equalities a formula forces between its endpoints and those of its
    variables, as a spanning list of pairs.  Endpoints are 0 (start) and 1
    (end); variable endpoints are negative integers interned per name.
    Built from the children's links, so shared subformulas cost nothing."""
    cls = type(f)
    if cls is Atom:
        return ((_symbol(f.name, 0), 0), (_symbol(f.name, 1), 1))
    if cls is Dual:
        return ((_symbol(f.name, 1), 0), (_symbol(f.name, 0), 1))
    if cls is One or cls is Bot:
        return ((0, 1),)
    if cls is Tensor or cls is Par:
        left = [(_MID if u == 1 else u, _MID if v == 1 else v) for u, v in _links(f.left)]
        right = [(_MID if u == 0 else u, _MID if v == 0 else v) for u, v in _links(f.right)]
        return _span(left + right)
    if cls is Plus or cls is With:
        return _span(_links(f.left) + _links(f.right))
    if cls is Top or cls is Zero:
        return ()
    raise TypeError(f"not a formula: {f!r}")


def _endpoints_meet(seq) -> bool:
    # without constants every typing is consistent; only the ends matter
    parent: dict = {}
    get = parent.get
    for j, f in enumerate(seq):
        for u, v in _links(f):
            if u >= 0:
                u += j
            if v >= 0:
                v += j
            while True:
                p = get(u, u)
                if p == u:
                    break
                g = get(p, p)
                parent[u] = g
                u = g
            while True:
                p = get(v, v)
                if p == v:
                    break
                g = get(p, p)
                parent[v] = g
                v = g
            if u != v:
                parent[u] = v
    a, b = 0, len(seq)
    while get(a, a) != a:
        a = parent[a]
    while get(b, b) != b:
        b = parent[b]
    return a == b


def annotate(t, env: TypeEnv, n, m) -> tuple[Mgu, list]:
    """Type ``t`` at ``(n, m)``; return the mgu and the preorder list of
    ``(subterm, src, dst)`` with endpoints resolved to representatives."""
    s = _Session(env)
    record: list = []
    a, b = s.node(_obj(n)), s.node(_obj(m))
    s.walk(t, a, b, record)
    mgu = _mgu(s, a, b)
    return mgu, [(u, s.obj(x), s.obj(y)) for u, x, y in record]


# ------------------------------------------------------------ checking


def _pairs(t, env: TypeEnv, universe: frozenset) -> frozenset:
    cls = type(t)
    if cls is Atom or cls is KVar or cls is RVar:
        n, m = env[t.name]
        return frozenset({(n, m)})
    if cls is Dual:
        n, m = env[t.name]
        return frozenset({(m, n)})
    if cls is One or cls is Bot or cls is KOne or cls is RUnit:
        return frozenset((u, u) for u in universe)
    if cls is Top or cls is Zero or cls is KZero or cls is RTop:
        return frozenset((u, v) for u in universe for v in universe)
    if cls is KStar:
        return frozenset((u, v) for u, v in _pairs(t.arg, env, universe) if u == v)
    a = _pairs(t.left, env, universe)
    b = _pairs(t.right, env, universe)
    if cls is Tensor or cls is Par or cls is KDot or cls is RDot:
        return frozenset((u, w) for u, v in a for v2, w in b if v == v2)
    if cls is Plus or cls is With or cls is KSum or cls is Join or cls is Meet:
        return a & b
    if cls is LDiv:  # a\c with a : n->p, c : n->m
        return frozenset((p, m) for n, p in a for n2, m in b if n == n2)
    if cls is RDiv:  # c/b with c : n->m, b : p->m
        return frozenset((n, p) for n, m in a for p, m2 in b if m == m2)
    raise TypeError(f"not a term: {t!r}")


def _universe(env: TypeEnv, n, m) -> frozenset:
    return frozenset(env.objects() | {n, m})


def check(t, env: TypeEnv, n, m) -> bool:
    """Is ``t : n -> m`` derivable?  Every variable of ``t`` must be bound."""
    n, m = _obj(n), _obj(m)
    return (n, m) in _pairs(t, env, _universe(env, n, m))


def check_formula(f, env: TypeEnv, n, m) -> bool:
    return check(f, env, n, m)


def check_list(seq, env: TypeEnv, n, m) -> bool:
    """List typing: the empty list has every square type, ``a;l`` composes."""
    n, m = _obj(n), _obj(m)
    universe = _universe(env, n, m)
    reach = {n}
    for f in seq:
        rel = _pairs(f, env, universe)
        reach = {v for u, v in rel if u in reach}
    return m in reach


def type_of_strict(t, env: TypeEnv) -> Optional[tuple]:
    """Endpoints of a strict Kleene term, or ``None`` if it is untypeable.

    Strict terms have injective types, so a class without a constant is
    returned as the shared metavariable of both endpoints.
    """
    from untyping.kleene import is_strict

    if not is_strict(t):
        raise PreconditionViolated(f"term is not strict: {t}")
    m = infer_ka(t, env)
    if not m.consistent:
        return None
    return m.endpoints()
