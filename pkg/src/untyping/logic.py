"""Formula and sequent algebra: linear negation, cyclic rotations,
input/output polarities and the encoding of residuated terms."""

from __future__ import annotations

import enum

from untyping.terms import (
    BOT,
    ONE,
    RTOP,
    RUNIT,
    TOP,
    ZERO,
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
    Zero,
)


def negate(f):
    """Linear negation; binary connectives swap their arguments."""
    cls = type(f)
    if cls is Atom:
        return Dual(f.name)
    if cls is Dual:
        return Atom(f.name)
    if cls is One:
        return BOT
    if cls is Bot:
        return ONE
    if cls is Zero:
        return TOP
    if cls is Top:
        return ZERO
    a, b = negate(f.right), negate(f.left)
    if cls is Tensor:
        return Par(a, b)
    if cls is Par:
        return Tensor(a, b)
    if cls is Plus:
        return With(a, b)
    if cls is With:
        return Plus(a, b)
    raise TypeError(f"not a formula: {f!r}")


def negate_list(seq) -> tuple:
    return tuple(negate(f) for f in reversed(seq))


def rotate(seq, k: int) -> tuple:
    """``[l_k .. l_end; l_0 .. l_{k-1}]``."""
    if not 0 <= k <= len(seq):
        raise IndexError(f"rotation {k} out of range for a sequent of length {len(seq)}")
    return tuple(seq[k:]) + tuple(seq[:k])


def least_rotation(keys) -> int:
    """Booth's algorithm: start index of the lexicographically least rotation."""
    n = len(keys)
    if n == 0:
        return 0
    s = list(keys) * 2
    fail = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        sj = s[j]
        i = fail[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = fail[i]
        if sj != s[k + i + 1]:  # i == -1
            if sj < s[k]:
                k = j
            fail[j - k] = -1
        else:
            fail[j - k] = i + 1
    return k % n


def canonical_rotation(seq) -> tuple[tuple, int]:
    """Least rotation of the sequent under the serialisation order."""
    shift = least_rotation([f.key for f in seq])
    return rotate(seq, shift), shift


def canonical_key(seq) -> tuple:
    """Rotation-invariant memo key: the keys of the least rotation."""
    keys = [f.key for f in seq]
    k = least_rotation(keys)
    return tuple(keys[k:] + keys[:k])


class Polarity(enum.Enum):
    INPUT = "input"
    OUTPUT = "output"
    NEITHER = "neither"


_I, _O, _N = Polarity.INPUT, Polarity.OUTPUT, Polarity.NEITHER


def polarity(f) -> Polarity:
    """Input/output classification.

    i ::= x^ | bot | i|i | i*o | o*i | i+i | i&i | 0
    o ::= x  | 1   | o*o | i|o | o|i | o+o | o&o | top
    """
    cls = type(f)
    if cls is Atom or cls is One or cls is Top:
        return _O
    if cls is Dual or cls is Bot or cls is Zero:
        return _I
    a, b = polarity(f.left), polarity(f.right)
    if a is _N or b is _N:
        return _N
    if cls is Tensor:
        if a is _O and b is _O:
            return _O
        return _I if a is not b else _N
    if cls is Par:
        if a is _I and b is _I:
            return _I
        return _O if a is not b else _N
    # additives: componentwise
    return a if a is b else _N


def encode_rm(t):
    """Residuated term -> output formula."""
    cls = type(t)
    if cls is RVar:
        return Atom(t.name)
    if cls is RUnit:
        return ONE
    if cls is RTop:
        return TOP
    a, b = encode_rm(t.left), encode_rm(t.right)
    if cls is RDot:
        return Tensor(a, b)
    if cls is RDiv:
        return Par(a, negate(b))
    if cls is LDiv:
        return Par(negate(a), b)
    if cls is Join:
        return Plus(a, b)
    if cls is Meet:
        return With(a, b)
    raise TypeError(f"not a residuated term: {t!r}")


class NotOutput(ValueError):
    pass


def decode_output(f):
    """Inverse of :func:`encode_rm` on output formulas."""
    if polarity(f) is not _O:
        raise NotOutput(f"not an output formula: {f}")
    return _decode(f)


def _decode(f):
    cls = type(f)
    if cls is Atom:
        return RVar(f.name)
    if cls is One:
        return RUNIT
    if cls is Top:
        return RTOP
    if cls is Tensor:
        return RDot(_decode(f.left), _decode(f.right))
    if cls is Plus:
        return Join(_decode(f.left), _decode(f.right))
    if cls is With:
        return Meet(_decode(f.left), _decode(f.right))
    if cls is Par:
        if polarity(f.left) is _I:
            return LDiv(_decode(negate(f.left)), _decode(f.right))
        return RDiv(_decode(f.left), _decode(negate(f.right)))
    raise NotOutput(f"not an output formula: {f}")
