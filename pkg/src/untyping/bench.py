"""Random sequents and the pruning benchmark.

Generation, for a leaf budget ``L`` and variables ``x1 .. xv``.  All draws
come from one :class:`SplitMix64` stream, in this order:

1. the list length ``k``, uniform in ``[1, L]``;
2. ``k - 1`` distinct cut points in ``[1, L)`` (partial Fisher-Yates), which
   split ``L`` into ``k`` positive parts, uniformly over compositions;
3. for each part, in order, a tree built top down: the left leaf count is
   drawn with probability proportional to the number of binary trees on
   each side (so shapes are uniform), then the connective, then the left
   subtree, then the right one.  Connectives are tensor/par (MLL) or
   tensor/par/plus/with (MALL);
4. each leaf uniform over ``x1..xv``, their duals, 1 and bot, redrawn while
   it is 1 under a tensor or bot under a par.

The benchmark splits a master stream seeded with ``seed`` once per index,
so record ``i`` does not depend on how many draws record ``i - 1`` used.
"""

from __future__ import annotations

import csv
import enum
import math
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, TextIO

from untyping.prover import BudgetExceeded, SearchConfig, prove
from untyping.rng import SplitMix64
from untyping.syntax import render
from untyping.terms import BOT, ONE, Atom, Dual, Par, Plus, Tensor, With


class Fragment(enum.Enum):
    MLL = "mll"
    MALL = "mall"


@dataclass(frozen=True)
class GenParams:
    leaves: int
    var_pool: int
    fragment: Fragment = Fragment.MLL
    seed: int = 0

    def __post_init__(self):
        if self.leaves < 1:
            raise ValueError("leaves must be at least 1")
        if self.var_pool < 1:
            raise ValueError("var_pool must be at least 1")


@lru_cache(maxsize=None)
def _trees(leaves: int) -> int:
    """Binary trees with this many leaves (a Catalan number)."""
    n = leaves - 1
    return math.comb(2 * n, n) // (n + 1)


_CONNECTIVES = {Fragment.MLL: (Tensor, Par), Fragment.MALL: (Tensor, Par, Plus, With)}


def _leaf(p: GenParams, rng: SplitMix64, parent):
    v = p.var_pool
    while True:
        r = rng.below(2 * v + 2)
        if r < v:
            return Atom(f"x{r + 1}")
        if r < 2 * v:
            return Dual(f"x{r - v + 1}")
        leaf = ONE if r == 2 * v else BOT
        if (leaf is ONE and parent is Tensor) or (leaf is BOT and parent is Par):
            continue
        return leaf


def _tree(p: GenParams, rng: SplitMix64, leaves: int, parent=None):
    if leaves == 1:
        return _leaf(p, rng, parent)
    r = rng.below(_trees(leaves))
    left = 1
    while True:
        w = _trees(left) * _trees(leaves - left)
        if r < w:
            break
        r -= w
        left += 1
    conns = _CONNECTIVES[p.fragment]
    conn = conns[rng.below(len(conns))]
    a = _tree(p, rng, left, conn)
    b = _tree(p, rng, leaves - left, conn)
    return conn(a, b)


def _composition(rng: SplitMix64, total: int, parts: int) -> list[int]:
    slots = list(range(1, total))
    for i in range(parts - 1):
        j = i + rng.below(len(slots) - i)
        slots[i], slots[j] = slots[j], slots[i]
    cuts = sorted(slots[: parts - 1])
    bounds = [0] + cuts + [total]
    return [b - a for a, b in zip(bounds, bounds[1:])]


def gen_sequent(p: GenParams, rng: Optional[SplitMix64] = None) -> tuple:
    """Random unit-normal sequent with exactly ``p.leaves`` leaves.

    Without an explicit stream this is the benchmark's sequent number 0.
    """
    if rng is None:
        rng = SplitMix64(p.seed).split()
    k = 1 + rng.below(p.leaves)
    return tuple(_tree(p, rng, size) for size in _composition(rng, p.leaves, k))


# ------------------------------------------------------------ benchmark

CSV_HEADER = (
    "seed",
    "index",
    "sequent",
    "pruned_at_root",
    "provable",
    "time_unpruned_ns",
    "time_pruned_ns",
    "nodes_unpruned",
    "nodes_pruned",
    "budget_exceeded",
)


@dataclass(frozen=True)
class BenchRecord:
    seed: int
    index: int
    sequent: str
    pruned_at_root: bool
    provable: Optional[bool]
    time_unpruned_ns: int
    time_pruned_ns: int
    nodes_unpruned: int
    nodes_pruned: int
    budget_exceeded: bool
    verdict_mismatch: bool = False


def _timed(seq, cfg: SearchConfig, repeat: int):
    best = None
    for _ in range(repeat):
        t0 = time.perf_counter_ns()
        try:
            proof, stats = prove(seq, cfg)
            out = (proof is not None, stats.nodes_expanded, stats.pruned_at_root, False)
        except BudgetExceeded as e:
            out = (None, e.stats.nodes_expanded, False, True)
        dt = time.perf_counter_ns() - t0
        best = dt if best is None else min(best, dt)
    return out, best


def bench_one(p: GenParams, index: int, seq: tuple, budget: Optional[int] = None, repeat: int = 1) -> BenchRecord:
    (v_off, n_off, _, over_off), t_off = _timed(seq, SearchConfig(prune=False, node_budget=budget), repeat)
    (v_on, n_on, root, over_on), t_on = _timed(seq, SearchConfig(prune=True, node_budget=budget), repeat)
    exceeded = over_off or over_on
    return BenchRecord(
        seed=p.seed,
        index=index,
        sequent=render(seq),
        pruned_at_root=root,
        provable=None if exceeded else v_off,
        time_unpruned_ns=t_off,
        time_pruned_ns=t_on,
        nodes_unpruned=n_off,
        nodes_pruned=n_on,
        budget_exceeded=exceeded,
        verdict_mismatch=not exceeded and v_off != v_on,
    )


def run_bench(p: GenParams, count: int, budget: Optional[int] = None, repeat: int = 1, progress=None) -> list[BenchRecord]:
    """Prove each generated sequent without then with pruning (fresh memo each)."""
    if count < 1:
        raise ValueError("count must be at least 1")
    master = SplitMix64(p.seed)
    out = []
    for i in range(count):
        seq = gen_sequent(p, master.split())
        out.append(bench_one(p, i, seq, budget, repeat))
        if progress is not None:
            progress(i + 1, count)
    return out


def write_csv(records: Iterable[BenchRecord], fh: TextIO) -> None:
    # numbers stay bare, so the sequent (and the empty unknown verdict) is quoted
    w = csv.writer(fh, lineterminator="\n", quoting=csv.QUOTE_NONNUMERIC)
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(
            [
                r.seed,
                r.index,
                r.sequent,
                int(r.pruned_at_root),
                "" if r.provable is None else int(r.provable),
                r.time_unpruned_ns,
                r.time_pruned_ns,
                r.nodes_unpruned,
                r.nodes_pruned,
                int(r.budget_exceeded),
            ]
        )


def read_csv(fh: TextIO) -> list[BenchRecord]:
    rows = csv.DictReader(fh)  # values come back as text either way
    out = []
    for row in rows:
        out.append(
            BenchRecord(
                seed=int(row["seed"]),
                index=int(row["index"]),
                sequent=row["sequent"],
                pruned_at_root=row["pruned_at_root"] == "1",
                provable=None if row["provable"] == "" else row["provable"] == "1",
                time_unpruned_ns=int(row["time_unpruned_ns"]),
                time_pruned_ns=int(row["time_pruned_ns"]),
                nodes_unpruned=int(row["nodes_unpruned"]),
                nodes_pruned=int(row["nodes_pruned"]),
                budget_exceeded=row["budget_exceeded"] == "1",
            )
        )
    return out


# ------------------------------------------------------------ summaries


class EmptyInput(ValueError):
    pass


BUCKETS_S = tuple(10 ** (-6 + k / 4) for k in range(33))  # 1e-6 .. 1e2


@dataclass(frozen=True)
class Summary:
    total: int
    budget_exceeded: int
    rejection_rate: float
    mismatches: int
    time_unpruned_ns: int
    time_pruned_ns: int
    nodes_unpruned: int
    nodes_pruned: int
    distribution: tuple  # (bucket upper bound in s, fraction unpruned, fraction pruned)


def summarize(records: list[BenchRecord]) -> Summary:
    """Totals plus the cumulative fraction of sequents solved within each
    time bucket.  The root check never searches, so the rejection rate
    counts every record; times, nodes and the distribution leave out
    records where a search ran out of budget."""
    if not records:
        raise EmptyInput("no records to summarize")
    done = [r for r in records if not r.budget_exceeded]
    n = len(done)
    off = sorted(r.time_unpruned_ns for r in done)
    on = sorted(r.time_pruned_ns for r in done)
    dist = []
    i = j = 0
    for b in BUCKETS_S:
        limit = b * 1e9
        while i < n and off[i] <= limit:
            i += 1
        while j < n and on[j] <= limit:
            j += 1
        dist.append((b, i / n if n else 0.0, j / n if n else 0.0))
    return Summary(
        total=len(records),
        budget_exceeded=len(records) - n,
        rejection_rate=sum(r.pruned_at_root for r in records) / len(records),
        mismatches=sum(r.verdict_mismatch for r in records),
        time_unpruned_ns=sum(off),
        time_pruned_ns=sum(on),
        nodes_unpruned=sum(r.nodes_unpruned for r in done),
        nodes_pruned=sum(r.nodes_pruned for r in done),
        distribution=tuple(dist),
    )


def write_distribution_csv(s: Summary, fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(("bucket_s", "solved_unpruned", "solved_pruned"))
    for b, a, c in s.distribution:
        w.writerow((f"{b:.3e}", f"{a:.6f}", f"{c:.6f}"))
