"""Sequence constructions: doubling, 8-Williamson extraction, Hadamard assembly.

The doubling construction interleaves each of two member pairs with a rotated
partner: given Williamson sequences A, B, C, D of odd order n,

    A x B*, (-A) x B*, C x D*, (-C) x D*

are Williamson sequences of order 2n, where x is the perfect shuffle and B*
is B rotated so that the shuffle stays symmetric (entry i of X* is
x[(i + (n+1)/2) mod n], i.e. a cyclic shift by half the order).  Extraction
inverts the construction: any Williamson sequence of order 2n (n odd)
de-interleaves into eight symmetric sequences whose PAF values sum to zero.
"""
from __future__ import annotations

import numpy as np

from .equivalence import canonical_member_codes
from .seqcore import Quadruple, SymmetricSequence, _entries_of, paf, verify_williamson


class CirculantMatrix:
    """n x n matrix with entry(i, j) = firstRow[(j - i) mod n]."""

    __slots__ = ("first_row", "dimension")

    def __init__(self, first_row):
        self.first_row = tuple(_entries_of(first_row))
        self.dimension = len(self.first_row)

    def entry(self, i: int, j: int) -> int:
        return self.first_row[(j - i) % self.dimension]

    def to_array(self) -> np.ndarray:
        n = self.dimension
        row = np.asarray(self.first_row, dtype=np.int64)
        idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
        return row[idx]


class HadamardMatrix:
    """±1 matrix with pairwise orthogonal rows; H Ht = order * I exactly."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        h = np.asarray(entries, dtype=np.int64)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError("Hadamard matrix must be square")
        if not np.all(np.abs(h) == 1):
            raise ValueError("entries must be ±1")
        n = h.shape[0]
        if not np.array_equal(h @ h.T, n * np.eye(n, dtype=np.int64)):
            raise ValueError("rows are not pairwise orthogonal")
        self.entries = h

    @property
    def order(self) -> int:
        return self.entries.shape[0]


class OctupleSequence:
    """Eight symmetric ±1 sequences of equal odd order."""

    __slots__ = ("members",)

    def __init__(self, members):
        members = tuple(
            x if isinstance(x, SymmetricSequence) else SymmetricSequence(x) for x in members
        )
        if len(members) != 8:
            raise ValueError("an octuple has 8 members")
        n = members[0].order
        if any(x.order != n for x in members):
            raise ValueError("members must have equal order")
        if n % 2 == 0:
            raise ValueError("octuple order must be odd")
        self.members = members

    @property
    def order(self) -> int:
        return self.members[0].order

    def __iter__(self):
        return iter(self.members)

    def __eq__(self, other):
        if not isinstance(other, OctupleSequence):
            return NotImplemented
        return self.members == other.members

    def __hash__(self):
        return hash(self.members)


def verify_octuple(octuple) -> bool:
    """Exact check that the eight PAF values sum to zero at shifts 1..n-1."""
    members = octuple.members if isinstance(octuple, OctupleSequence) else tuple(octuple)
    pafs = [paf(x) for x in members]
    n = len(pafs[0])
    return all(sum(p[s] for p in pafs) == 0 for s in range(1, n))


def interleave(a, b) -> tuple:
    """Perfect shuffle: [a0, b0, a1, b1, ...]."""
    ea, eb = _entries_of(a), _entries_of(b)
    if len(ea) != len(eb):
        raise ValueError("interleave requires equal orders")
    out = []
    for x, y in zip(ea, eb):
        out.append(x)
        out.append(y)
    return tuple(out)


def deinterleave(x) -> tuple:
    """Inverse of interleave: (even-index entries, odd-index entries)."""
    e = _entries_of(x)
    if len(e) % 2 != 0:
        raise ValueError("deinterleave requires even length")
    return e[0::2], e[1::2]


def shift_half(a) -> tuple:
    """Cyclic shift of an odd-order sequence by half the order.

    Entry i of the result is a[(i + (n+1)/2) mod n]; this is the orientation
    under which the shuffle of two symmetric sequences is again symmetric.
    """
    e = _entries_of(a)
    n = len(e)
    if n % 2 == 0:
        raise ValueError("shift_half requires odd order")
    h = (n + 1) // 2
    return tuple(e[(i + h) % n] for i in range(n))


def unshift_half(a) -> tuple:
    """Inverse of shift_half."""
    e = _entries_of(a)
    n = len(e)
    if n % 2 == 0:
        raise ValueError("unshift_half requires odd order")
    h = (n - 1) // 2
    return tuple(e[(i + h) % n] for i in range(n))


def double(q: Quadruple) -> Quadruple:
    """Williamson sequences of order 2n from Williamson sequences of odd order n."""
    n = q.order
    if n % 2 == 0:
        raise ValueError("doubling requires odd order")
    if not verify_williamson(q):
        raise ValueError("input quadruple is not Williamson")
    a, b, c, d = (x.entries for x in q.members)
    bs, ds = shift_half(b), shift_half(d)
    neg = lambda e: tuple(-v for v in e)
    return Quadruple(
        SymmetricSequence(interleave(a, bs)),
        SymmetricSequence(interleave(neg(a), bs)),
        SymmetricSequence(interleave(c, ds)),
        SymmetricSequence(interleave(neg(c), ds)),
    )


def extract_eight_williamson(q: Quadruple) -> OctupleSequence:
    """Split a Williamson sequence of order 2n (n odd) into an 8-Williamson
    sequence of order n by de-interleaving each member and un-rotating the
    odd-position part."""
    order = q.order
    if order % 2 != 0 or (order // 2) % 2 == 0:
        raise ValueError("extraction requires order 2n with n odd")
    if not verify_williamson(q):
        raise ValueError("input quadruple is not Williamson")
    members = []
    for x in q.members:
        evens, odds = deinterleave(x.entries)
        members.append(SymmetricSequence(evens))
        members.append(SymmetricSequence(unshift_half(odds)))
    octuple = OctupleSequence(members)
    if not verify_octuple(octuple):
        raise AssertionError("extracted octuple fails the PAF identity")
    return octuple


def canonical_octuple(octuple) -> OctupleSequence:
    """Canonical representative of an octuple under reorder, negation and
    automorphisms (the shift and alternating-negation operations do not apply
    since the order is odd)."""
    members = octuple.members if isinstance(octuple, OctupleSequence) else tuple(octuple)
    entries = [_entries_of(x) for x in members]
    n = len(entries[0])
    codes = canonical_member_codes(entries, n)
    return OctupleSequence(
        [tuple(-1 if (c >> (n - 1 - i)) & 1 else 1 for i in range(n)) for c in codes]
    )


def dedupe_octuples(octuples) -> list:
    seen = {}
    for o in octuples:
        canon = canonical_octuple(o)
        if canon.members not in seen:
            seen[canon.members] = canon
    return list(seen.values())


def assemble_hadamard(q: Quadruple) -> HadamardMatrix:
    """The 4n x 4n Hadamard matrix built from circulant blocks:

        [  A  B  C  D ]
        [ -B  A -D  C ]
        [ -C  D  A -B ]
        [ -D -C  B  A ]
    """
    if not verify_williamson(q):
        raise ValueError("input quadruple is not Williamson")
    a, b, c, d = (CirculantMatrix(x).to_array() for x in q.members)
    h = np.block(
        [
            [a, b, c, d],
            [-b, a, -d, c],
            [-c, d, a, -b],
            [-d, -c, b, a],
        ]
    )
    return HadamardMatrix(h)
