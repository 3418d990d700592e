"""Proof search for one-sided cyclic MLL/MALL and for residuated monoids.

Sequents are tuples of formulas read as rings.  Rules act in place at a
principal position; the tensor rule splits ``l;a*b;k`` into ``l;a`` and
``b;k`` and cyclic exchange appears as an explicit ``EXCHANGE`` node
whose premise is the conclusion rotated by ``principal``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Optional

from untyping.logic import canonical_key, encode_rm, least_rotation, negate_list, rotate
from untyping.syntax import render
from untyping.terms import (
    ONE,
    Atom,
    Bot,
    Dual,
    Join,
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
    has_additive_constants,
    variables,
)
from untyping.typecheck import (
    Constant,
    ObjectTerm,
    TypeEnv,
    UnboundVariable,
    _Session,
    _obj,
    check,
    passes_square_check,
)


class Rule(enum.Enum):
    ONE = "One"
    BOT = "Bot"
    TENSOR = "Tensor"
    PAR = "Par"
    AXIOM = "Axiom"
    EXCHANGE = "Exchange"
    PLUS_L = "PlusL"
    PLUS_R = "PlusR"
    WITH = "With"
    TOP = "Top"


ARITY = {
    Rule.ONE: 0,
    Rule.AXIOM: 0,
    Rule.TOP: 0,
    Rule.BOT: 1,
    Rule.PAR: 1,
    Rule.EXCHANGE: 1,
    Rule.PLUS_L: 1,
    Rule.PLUS_R: 1,
    Rule.TENSOR: 2,
    Rule.WITH: 2,
}


@dataclass(frozen=True)
class ProofNode:
    rule: Rule
    principal: int
    conclusion: tuple
    premises: tuple = ()

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)


@dataclass(frozen=True)
class SearchConfig:
    prune: bool = True
    memo: bool = True
    env: Optional[TypeEnv] = None
    node_budget: Optional[int] = None

    def __post_init__(self):
        if self.node_budget is not None and self.node_budget <= 0:
            raise ValueError("node_budget must be positive")


@dataclass
class SearchStats:
    nodes_expanded: int = 0
    prune_hits: int = 0
    pruned_at_root: bool = False
    memo_hits: int = 0


class PruneUnsound(ValueError):
    """Square-type pruning was requested on a sequent with top or zero."""


class BudgetExceeded(RuntimeError):
    """The node budget ran out; the verdict is unknown."""

    def __init__(self, stats: SearchStats):
        super().__init__(f"node budget exhausted after {stats.nodes_expanded} nodes")
        self.stats = stats


class DecorationFailed(RuntimeError):
    def __init__(self, node: ProofNode):
        super().__init__(f"cannot type the {node.rule.value} step concluding {render(node.conclusion)}")
        self.node = node


def _exchange(seq: tuple, k: int, proof: ProofNode) -> ProofNode:
    if k % len(seq) == 0:
        return proof
    return ProofNode(Rule.EXCHANGE, k, seq, (proof,))


def _axiom(seq: tuple) -> Optional[ProofNode]:
    a, b = seq
    if type(a) is Dual and type(b) is Atom and a.name == b.name:
        return ProofNode(Rule.AXIOM, 0, seq)
    if type(a) is Atom and type(b) is Dual and a.name == b.name:
        return _exchange(seq, 1, ProofNode(Rule.AXIOM, 0, (b, a)))
    return None


def _tensor_splits(seq: tuple, p: int):
    """Yield ``(q, l, k)``: ``rotate(seq, q) == l + (seq[p],) + k`` for every
    way of cutting the ring around the tensor at ``p``."""
    n = len(seq)
    rest = seq[p + 1 :] + seq[:p]
    for j in range(n):
        yield (p + 1 + j) % n, rest[j:], rest[:j]


class _Search:
    def __init__(self, cfg: SearchConfig):
        self.cfg = cfg
        self.stats = SearchStats()
        self.memo: dict = {}
        self.root = None  # already square-checked by the caller

    def tick(self):
        st = self.stats
        st.nodes_expanded += 1
        budget = self.cfg.node_budget
        if budget is not None and st.nodes_expanded > budget:
            raise BudgetExceeded(st)

    def tensor(self, seq: tuple, p: int) -> Optional[ProofNode]:
        f = seq[p]
        for q, l, k in _tensor_splits(seq, p):
            left = self.search(l + (f.left,))
            if left is None:
                continue
            right = self.search((f.right,) + k)
            if right is None:
                continue
            node = ProofNode(Rule.TENSOR, len(l), l + (f,) + k, (left, right))
            return _exchange(seq, q, node)
        return None

    def plus(self, seq: tuple, p: int) -> Optional[ProofNode]:
        f = seq[p]
        for rule, g in ((Rule.PLUS_L, f.left), (Rule.PLUS_R, f.right)):
            sub = self.search(seq[:p] + (g,) + seq[p + 1 :])
            if sub is not None:
                return ProofNode(rule, p, seq, (sub,))
        return None


class _Focused(_Search):
    """Asynchronous phase on the leftmost invertible formula, then a square
    check, then every synchronous choice around the ring."""

    def search(self, seq: tuple) -> Optional[ProofNode]:
        self.tick()
        if not self.cfg.memo:
            return self.expand(seq)
        keys = [f.key for f in seq]
        shift = least_rotation(keys)
        key = "".join(keys[shift:] + keys[:shift])
        hit = self.memo.get(key)
        if hit is not None:
            self.stats.memo_hits += 1
            proof, stored_shift = hit
            if proof is None:
                return None
            return _exchange(seq, (shift - stored_shift) % len(seq), proof)
        proof = self.expand(seq)
        self.memo[key] = (proof, shift)
        return proof

    def expand(self, seq: tuple) -> Optional[ProofNode]:
        for i, f in enumerate(seq):
            cls = type(f)
            if cls is Par:
                sub = self.search(seq[:i] + (f.left, f.right) + seq[i + 1 :])
                return None if sub is None else ProofNode(Rule.PAR, i, seq, (sub,))
            if cls is Bot:
                sub = self.search(seq[:i] + seq[i + 1 :])
                return None if sub is None else ProofNode(Rule.BOT, i, seq, (sub,))
            if cls is Top:
                return ProofNode(Rule.TOP, i, seq)
            if cls is With:
                left = self.search(seq[:i] + (f.left,) + seq[i + 1 :])
                if left is None:
                    return None
                right = self.search(seq[:i] + (f.right,) + seq[i + 1 :])
                if right is None:
                    return None
                return ProofNode(Rule.WITH, i, seq, (left, right))

        if self.cfg.prune and seq is not self.root and not passes_square_check(seq, self.cfg.env):
            self.stats.prune_hits += 1
            return None
        n = len(seq)
        if n == 1 and type(seq[0]) is One:
            return ProofNode(Rule.ONE, 0, seq)
        if n == 2:
            ax = _axiom(seq)
            if ax is not None:
                return ax
        for p, f in enumerate(seq):
            cls = type(f)
            if cls is Tensor:
                proof = self.tensor(seq, p)
            elif cls is Plus:
                proof = self.plus(seq, p)
            else:
                continue
            if proof is not None:
                return proof
        return None


class _Naive(_Search):
    """Every rule at every position; no invertibility, no pruning."""

    def search(self, seq: tuple) -> Optional[ProofNode]:
        self.tick()
        if not self.cfg.memo:
            return self.expand(seq)
        n = len(seq)
        keys = [f.key for f in seq]
        joined = "".join(keys)
        # keys are prefix-free, so a rotation of the joined string that starts
        # on a formula boundary determines the rotated list
        doubled, width = joined * 2, len(joined)
        starts = [0, *itertools.accumulate(len(k) for k in keys[:-1])]
        key, shift = min((doubled[o : o + width], k) for k, o in enumerate(starts)) if n else ("", 0)
        hit = self.memo.get(key)
        if hit is not None:
            self.stats.memo_hits += 1
            proof, stored = hit
            if proof is None:
                return None
            return _exchange(seq, (shift - stored) % n, proof)
        proof = self.expand(seq)
        self.memo[key] = (proof, shift)
        return proof

    def expand(self, seq: tuple) -> Optional[ProofNode]:
        n = len(seq)
        if n == 1 and type(seq[0]) is One:
            return ProofNode(Rule.ONE, 0, seq)
        if n == 2:
            ax = _axiom(seq)
            if ax is not None:
                return ax
        for i, f in enumerate(seq):
            cls = type(f)
            proof = None
            if cls is Top:
                proof = ProofNode(Rule.TOP, i, seq)
            elif cls is Bot:
                sub = self.search(seq[:i] + seq[i + 1 :])
                if sub is not None:
                    proof = ProofNode(Rule.BOT, i, seq, (sub,))
            elif cls is Par:
                sub = self.search(seq[:i] + (f.left, f.right) + seq[i + 1 :])
                if sub is not None:
                    proof = ProofNode(Rule.PAR, i, seq, (sub,))
            elif cls is With:
                left = self.search(seq[:i] + (f.left,) + seq[i + 1 :])
                if left is not None:
                    right = self.search(seq[:i] + (f.right,) + seq[i + 1 :])
                    if right is not None:
                        proof = ProofNode(Rule.WITH, i, seq, (left, right))
            elif cls is Tensor:
                proof = self.tensor(seq, i)
            elif cls is Plus:
                proof = self.plus(seq, i)
            if proof is not None:
                return proof
        return None


def prove(seq, cfg: SearchConfig = SearchConfig(), memo: Optional[dict] = None) -> tuple[Optional[ProofNode], SearchStats]:
    """Focused proof search.  Returns ``(proof or None, stats)``.

    ``memo`` lets several calls share one table of settled subsequents.  Only
    share it between calls with the same configuration, and never with
    :func:`prove_naive`.

    Raises :class:`PruneUnsound` when pruning is requested on a sequent with
    additive constants and :class:`BudgetExceeded` when ``node_budget`` runs out.
    """
    seq = tuple(seq)
    if cfg.prune and has_additive_constants(seq):
        raise PruneUnsound("square-type pruning is unsound with top/zero; disable pruning")
    s = _Focused(cfg)
    if memo is not None:
        s.memo = memo
    if cfg.prune and not passes_square_check(seq, cfg.env):
        s.stats.nodes_expanded = 1
        s.stats.prune_hits = 1
        s.stats.pruned_at_root = True
        return None, s.stats
    if cfg.prune:
        s.root = seq
    return s.search(seq), s.stats


def prove_naive(seq, cfg: SearchConfig = SearchConfig(), memo: Optional[dict] = None) -> tuple[Optional[ProofNode], SearchStats]:
    """Unfocused reference search (``cfg.prune`` is ignored).  ``memo`` as
    for :func:`prove`."""
    s = _Naive(cfg)
    if memo is not None:
        s.memo = memo
    return s.search(tuple(seq)), s.stats


# ------------------------------------------------------------ proof checking


class InvalidProof(ValueError):
    pass


def check_proof(node: ProofNode) -> None:
    """Raise :class:`InvalidProof` unless every step has a legal rule shape."""
    stack = [node]
    while stack:
        nd = stack.pop()
        c, p, prem = nd.conclusion, nd.principal, nd.premises
        if len(prem) != ARITY[nd.rule]:
            raise InvalidProof(f"{nd.rule.value}: wrong number of premises")
        pc = [q.conclusion for q in prem]
        if nd.rule is not Rule.ONE and not (0 <= p < len(c)):
            raise InvalidProof(f"{nd.rule.value}: principal {p} out of range")
        f = c[p] if 0 <= p < len(c) else None
        ctx = c[:p], c[p + 1 :]
        r = nd.rule
        ok = False
        if r is Rule.ONE:
            ok = c == (ONE,)
        elif r is Rule.AXIOM:
            ok = len(c) == 2 and type(c[0]) is Dual and type(c[1]) is Atom and c[0].name == c[1].name
        elif r is Rule.TOP:
            ok = type(f) is Top
        elif r is Rule.BOT:
            ok = type(f) is Bot and pc[0] == ctx[0] + ctx[1]
        elif r is Rule.PAR:
            ok = type(f) is Par and pc[0] == ctx[0] + (f.left, f.right) + ctx[1]
        elif r is Rule.WITH:
            ok = type(f) is With and pc == [ctx[0] + (f.left,) + ctx[1], ctx[0] + (f.right,) + ctx[1]]
        elif r is Rule.PLUS_L:
            ok = type(f) is Plus and pc[0] == ctx[0] + (f.left,) + ctx[1]
        elif r is Rule.PLUS_R:
            ok = type(f) is Plus and pc[0] == ctx[0] + (f.right,) + ctx[1]
        elif r is Rule.TENSOR:
            ok = type(f) is Tensor and pc == [ctx[0] + (f.left,), (f.right,) + ctx[1]]
        elif r is Rule.EXCHANGE:
            ok = pc[0] == rotate(c, p)
        if not ok:
            raise InvalidProof(f"ill-formed {r.value} step concluding {render(c)}")
        stack.extend(prem)


def format_proof(node: ProofNode, indent: int = 0) -> str:
    lines: list[str] = []

    def go(nd: ProofNode, depth: int):
        lines.append(f"{'  ' * depth}{nd.rule.value}[{nd.principal}] |- {render(nd.conclusion)}")
        for q in nd.premises:
            go(q, depth + 1)

    go(node, indent)
    return "\n".join(lines)


# ------------------------------------------------------------ decoration


@dataclass(frozen=True)
class TypedProof:
    """A proof node with its object ``n`` (judgement ``|-_n l``) and the
    objects between consecutive items of its conclusion."""

    node: ProofNode
    obj: ObjectTerm
    boundaries: tuple
    premises: tuple = ()


def decorate(proof: ProofNode, env: TypeEnv, n) -> TypedProof:
    """Rebuild a typed derivation of ``|-_n l`` from an untyped proof of ``l``.

    The typed rules only add equality constraints between objects, so the
    whole derivation is typed by one unification problem; the first step
    whose constraints clash is reported.
    """
    for x in variables(proof.conclusion):
        if x not in env:
            raise UnboundVariable(x)
    s = _Session(env)
    root = s.node(_obj(n))
    plan: list = []

    def gen(nd: ProofNode, obj: int) -> int:
        k = len(nd.conclusion)
        bounds = [obj] + [s.fresh() for _ in range(k - 1)] + [obj] if k else [obj]
        for j, f in enumerate(nd.conclusion):
            s.walk(f, bounds[j], bounds[j + 1])
        if nd.rule is Rule.AXIOM:
            s.union(obj, s.var(nd.conclusion[1].name)[1])
        if not s.consistent:
            raise DecorationFailed(nd)
        at = len(plan)
        plan.append(None)
        sub = bounds[nd.principal] if nd.rule is Rule.EXCHANGE else obj
        plan[at] = (nd, obj, bounds, [gen(q, sub) for q in nd.premises])
        return at

    gen(proof, root)
    # subproofs may be shared between branches, so build by plan position
    built: list = [None] * len(plan)
    for i in range(len(plan) - 1, -1, -1):
        nd, obj, bounds, kids = plan[i]
        prem = tuple(built[j] for j in kids)
        built[i] = TypedProof(nd, s.obj(obj), tuple(s.obj(b) for b in bounds), prem)
    return built[0]


def check_typed_proof(tp: TypedProof, env: TypeEnv) -> None:
    """Independent check of the typed side conditions at every node."""
    stack = [tp]
    while stack:
        t = stack.pop()
        nd, b = t.node, t.boundaries
        if b[0] != t.obj or b[-1] != t.obj:
            raise InvalidProof("boundary objects do not close on the judgement object")
        for j, f in enumerate(nd.conclusion):
            if not check(f, env, b[j], b[j + 1]):
                raise InvalidProof(f"{render(f)} is not typed {b[j]} -> {b[j + 1]}")
        if nd.rule is Rule.AXIOM and env[nd.conclusion[1].name][1] != t.obj:
            raise InvalidProof("axiom annotated with the wrong object")
        want = b[nd.principal] if nd.rule is Rule.EXCHANGE else t.obj
        for q in t.premises:
            if q.obj != want:
                raise InvalidProof(f"{nd.rule.value} premise annotated {q.obj}, expected {want}")
        stack.extend(t.premises)


def format_typed_proof(tp: TypedProof) -> str:
    lines: list[str] = []

    def go(t: TypedProof, depth: int):
        nd = t.node
        lines.append(f"{'  ' * depth}{nd.rule.value}[{nd.principal}] |-_{t.obj} {render(nd.conclusion)}")
        for q in t.premises:
            go(q, depth + 1)

    go(tp, 0)
    return "\n".join(lines)


# ------------------------------------------------------------ residuated monoids


def prove_rm(hyps, goal) -> bool:
    """Cut-free backward search in the Gentzen system for residuated monoids."""
    for t in list(hyps) + [goal]:
        if _has_lattice(t):
            raise ValueError("prove_rm handles the monoid fragment only; use prove_rm_via_mll")
    memo: dict = {}

    def derive(l: tuple, a) -> bool:
        key = (l, a)
        if key in memo:
            return memo[key]
        memo[key] = False  # every premise is strictly smaller; never read back
        res = _step(l, a)
        memo[key] = res
        return res

    def _step(l: tuple, a) -> bool:
        cls = type(a)
        if cls is RVar and len(l) == 1 and l[0] == a:
            return True
        if cls is RUnit and not l:
            return True
        if cls is RDot:
            if any(derive(l[:i], a.left) and derive(l[i:], a.right) for i in range(len(l) + 1)):
                return True
        elif cls is RDiv:
            if derive(l + (a.right,), a.left):
                return True
        elif cls is LDiv:
            if derive((a.left,) + l, a.right):
                return True
        for i, c in enumerate(l):
            before, after = l[:i], l[i + 1 :]
            ccls = type(c)
            if ccls is RUnit:
                if derive(before + after, a):
                    return True
            elif ccls is RDot:
                if derive(before + (c.left, c.right) + after, a):
                    return True
            elif ccls is RDiv:  # l; c/b; k; l'
                for j in range(len(after) + 1):
                    if derive(after[:j], c.right) and derive(before + (c.left,) + after[j:], a):
                        return True
            elif ccls is LDiv:  # l; k; b\c; l'
                for j in range(len(before) + 1):
                    if derive(before[j:], c.left) and derive(before[:j] + (c.right,) + after, a):
                        return True
        return False

    return derive(tuple(hyps), goal)


def _has_lattice(t) -> bool:
    cls = type(t)
    if cls in (Join, Meet, RTop):
        return True
    if cls in (RDot, LDiv, RDiv):
        return _has_lattice(t.left) or _has_lattice(t.right)
    return False


def rm_sequent(hyps, goal) -> tuple:
    """One-sided encoding ``<l>^perp ; <a>`` of a judgement ``l |- a``."""
    return negate_list([encode_rm(h) for h in hyps]) + (encode_rm(goal),)


def prove_rm_via_mll(hyps, goal, cfg: SearchConfig = SearchConfig()) -> bool:
    proof, _ = prove(rm_sequent(hyps, goal), cfg)
    return proof is not None
