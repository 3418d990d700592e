"""Term trees shared by every module: MALL formulas, residuated-lattice
terms and Kleene-algebra terms.

All nodes are immutable. Each node carries a ``key``: a prefix
serialisation used for equality, hashing and the total order on terms.
The serialisation is fixed (memo keys and golden files depend on it):

    Atom x   -> "a" x "."        Dual x  -> "d" x "."
    One      -> "I"              Bot     -> "B"
    Zero     -> "Z"              Top     -> "T"
    a * b    -> "*" a b          a | b   -> "|" a b
    a + b    -> "+" a b          a & b   -> "&" a b

Names end with "." (0x2E), which sorts below every identifier character,
so atoms compare by name bytes.  Residuated and Kleene terms use the same
scheme with their own tag characters; equality also compares node classes,
so a Kleene variable never equals a residuated one.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class Term:
    """Base class: equality, hashing and ordering go through ``key``."""

    __slots__ = ()
    key: str

    def __eq__(self, other):
        return type(self) is type(other) and self.key == other.key

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return self.key < other.key

    def __str__(self):
        from untyping.syntax import render

        return render(self)


def _leaf(tag):
    def post_init(self):
        object.__setattr__(self, "key", tag)

    return post_init


def _named(tag):
    def post_init(self):
        object.__setattr__(self, "key", tag + self.name + ".")

    return post_init


def _unary(tag):
    def post_init(self):
        object.__setattr__(self, "key", tag + self.arg.key)

    return post_init


def _binary(tag):
    def post_init(self):
        object.__setattr__(self, "key", tag + self.left.key + self.right.key)

    return post_init


_K = dict(init=False, repr=False, compare=False)

# ---------------------------------------------------------------- formulas


class Formula(Term):
    __slots__ = ()


@dataclass(frozen=True, eq=False)
class Atom(Formula):
    name: str
    key: str = field(**_K)
    __post_init__ = _named("a")


@dataclass(frozen=True, eq=False)
class Dual(Formula):
    """The dual atom x^perp.  Only atoms are ever stored dualised."""

    name: str
    key: str = field(**_K)
    __post_init__ = _named("d")


@dataclass(frozen=True, eq=False)
class One(Formula):
    key: str = field(**_K)
    __post_init__ = _leaf("I")


@dataclass(frozen=True, eq=False)
class Bot(Formula):
    key: str = field(**_K)
    __post_init__ = _leaf("B")


@dataclass(frozen=True, eq=False)
class Zero(Formula):
    key: str = field(**_K)
    __post_init__ = _leaf("Z")


@dataclass(frozen=True, eq=False)
class Top(Formula):
    key: str = field(**_K)
    __post_init__ = _leaf("T")


@dataclass(frozen=True, eq=False)
class Tensor(Formula):
    left: Formula
    right: Formula
    key: str = field(**_K)
    __post_init__ = _binary("*")


@dataclass(frozen=True, eq=False)
class Par(Formula):
    left: Formula
    right: Formula
    key: str = field(**_K)
    __post_init__ = _binary("|")


@dataclass(frozen=True, eq=False)
class Plus(Formula):
    left: Formula
    right: Formula
    key: str = field(**_K)
    __post_init__ = _binary("+")


@dataclass(frozen=True, eq=False)
class With(Formula):
    left: Formula
    right: Formula
    key: str = field(**_K)
    __post_init__ = _binary("&")


ONE, BOT, ZERO, TOP = One(), Bot(), Zero(), Top()

Sequent = tuple  # tuple[Formula, ...]; cyclic semantics live in the prover

# ------------------------------------------------------ residuated terms


class RmTerm(Term):
    __slots__ = ()


@dataclass(frozen=True, eq=False)
class RVar(RmTerm):
    name: str
    key: str = field(**_K)
    __post_init__ = _named("v")


@dataclass(frozen=True, eq=False)
class RUnit(RmTerm):
    key: str = field(**_K)
    __post_init__ = _leaf("1")


@dataclass(frozen=True, eq=False)
class RTop(RmTerm):
    """Top element of a bounded lattice; encoded as the MALL constant top."""

    key: str = field(**_K)
    __post_init__ = _leaf("T")


@dataclass(frozen=True, eq=False)
class RDot(RmTerm):
    left: RmTerm
    right: RmTerm
    key: str = field(**_K)
    __post_init__ = _binary(".")


@dataclass(frozen=True, eq=False)
class LDiv(RmTerm):
    """left \\ right"""

    left: RmTerm
    right: RmTerm
    key: str = field(**_K)
    __post_init__ = _binary("\\")


@dataclass(frozen=True, eq=False)
class RDiv(RmTerm):
    """left / right"""

    left: RmTerm
    right: RmTerm
    key: str = field(**_K)
    __post_init__ = _binary("/")


@dataclass(frozen=True, eq=False)
class Join(RmTerm):
    left: RmTerm
    right: RmTerm
    key: str = field(**_K)
    __post_init__ = _binary("v")


@dataclass(frozen=True, eq=False)
class Meet(RmTerm):
    left: RmTerm
    right: RmTerm
    key: str = field(**_K)
    __post_init__ = _binary("^")


RUNIT, RTOP = RUnit(), RTop()

# --------------------------------------------------------- Kleene terms


class KaTerm(Term):
    __slots__ = ()


@dataclass(frozen=True, eq=False)
class KVar(KaTerm):
    name: str
    key: str = field(**_K)
    __post_init__ = _named("v")


@dataclass(frozen=True, eq=False)
class KZero(KaTerm):
    key: str = field(**_K)
    __post_init__ = _leaf("0")


@dataclass(frozen=True, eq=False)
class KOne(KaTerm):
    key: str = field(**_K)
    __post_init__ = _leaf("1")


@dataclass(frozen=True, eq=False)
class KDot(KaTerm):
    left: KaTerm
    right: KaTerm
    key: str = field(**_K)
    __post_init__ = _binary(".")


@dataclass(frozen=True, eq=False)
class KSum(KaTerm):
    left: KaTerm
    right: KaTerm
    key: str = field(**_K)
    __post_init__ = _binary("+")


@dataclass(frozen=True, eq=False)
class KStar(KaTerm):
    arg: KaTerm
    key: str = field(**_K)
    __post_init__ = _unary("*")


KZERO, KONE = KZero(), KOne()

_NAMED = (Atom, Dual, RVar, KVar)
_BINARY = (Tensor, Par, Plus, With, RDot, LDiv, RDiv, Join, Meet, KDot, KSum)


def variables(t) -> set[str]:
    """Names of the variables occurring in a term or in a sequent."""
    out: set[str] = set()
    stack = list(t) if isinstance(t, tuple) else [t]
    while stack:
        u = stack.pop()
        if isinstance(u, _NAMED):
            out.add(u.name)
        elif isinstance(u, _BINARY):
            stack.append(u.left)
            stack.append(u.right)
        elif isinstance(u, KStar):
            stack.append(u.arg)
    return out


def leaves(t) -> int:
    """Number of leaves (variables, dual variables, constants)."""
    if isinstance(t, tuple):
        return sum(leaves(u) for u in t)
    if isinstance(t, _BINARY):
        return leaves(t.left) + leaves(t.right)
    if isinstance(t, KStar):
        return leaves(t.arg)
    return 1


def has_additive_constants(seq) -> bool:
    """True if a sequent mentions top or zero anywhere."""
    # "T" and "Z" only occur in keys as those constants or inside names
    if not any("T" in f.key or "Z" in f.key for f in seq):
        return False
    stack = list(seq)
    while stack:
        f = stack.pop()
        if isinstance(f, (Top, Zero)):
            return True
        if isinstance(f, _BINARY):
            stack.append(f.left)
            stack.append(f.right)
    return False


def has_additives(seq) -> bool:
    """True if a sequent uses plus, with, top or zero."""
    stack = list(seq)
    while stack:
        f = stack.pop()
        if isinstance(f, (Plus, With, Top, Zero)):
            return True
        if isinstance(f, _BINARY):
            stack.append(f.left)
            stack.append(f.right)
    return False
