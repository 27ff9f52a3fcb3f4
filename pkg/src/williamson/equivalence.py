"""Equivalence operations on Williamson sequences and canonical representatives.

Five invertible operations generate the equivalence classes:

  E1  reorder the four members
  E2  negate all entries of one member
  E3  cyclically shift one member by n/2          (even n only)
  E4  apply an automorphism i -> k*i of Z_n to all members at once
  E5  negate every second entry of all members    (even n only)

The canonical representative of a class is its lexicographic minimum, where
+1 sorts before -1 and members are compared in order.  E4 and E5 commute with
E1-E3, so the minimum is found by trying every (automorphism, E5) choice and
then minimizing each member over {id, E2, E3, E2*E3} and sorting (E1).
The same machinery generalizes to 8-member tuples for octuple counting.
"""
from __future__ import annotations

import math
from functools import lru_cache

from .seqcore import Quadruple, SymmetricSequence


def units(n: int) -> list:
    """Multipliers of the phi(n) automorphisms of the cyclic group Z_n."""
    return [k for k in range(1, n + 1) if math.gcd(k, n) == 1]


class Automorphism:
    """Index map i -> k*i mod n with gcd(k, n) = 1; fixes index 0."""

    __slots__ = ("k", "n", "_perm")

    def __init__(self, k: int, n: int):
        if math.gcd(k, n) != 1:
            raise ValueError(f"k={k} is not coprime to n={n}")
        self.k = k % n if n > 1 else 1
        self.n = n
        self._perm = tuple((k * i) % n for i in range(n))

    @property
    def index_map(self) -> tuple:
        return self._perm

    def apply(self, entries) -> tuple:
        p = self._perm
        e = tuple(entries)
        return tuple(e[p[i]] for i in range(self.n))


@lru_cache(maxsize=None)
def _unit_perms(n: int) -> tuple:
    return tuple(tuple((k * i) % n for i in range(n)) for k in units(n))


def _negate(e: tuple) -> tuple:
    return tuple(-v for v in e)


def _half_shift(e: tuple) -> tuple:
    n = len(e)
    h = n // 2
    return tuple(e[(i + h) % n] for i in range(n))


def _alternate(e: tuple) -> tuple:
    return tuple(v if i % 2 == 0 else -v for i, v in enumerate(e))


def _code(e: tuple) -> int:
    # +1 -> bit 0, -1 -> bit 1, index 0 most significant: integer order
    # equals lexicographic order with +1 < -1.
    c = 0
    for v in e:
        c = (c << 1) | (v < 0)
    return c


def _decode(code: int, n: int) -> tuple:
    return tuple(-1 if (code >> (n - 1 - i)) & 1 else 1 for i in range(n))


def apply_equivalence(q: Quadruple, op: str, *, perm=None, member=None, k=None) -> Quadruple:
    """Apply one equivalence operation; every operation is invertible."""
    n = q.order
    members = [x.entries for x in q.members]
    if op == "E1":
        if perm is None or sorted(perm) != [0, 1, 2, 3]:
            raise ValueError("E1 requires perm, a permutation of (0,1,2,3)")
        members = [members[i] for i in perm]
    elif op == "E2":
        if member is None:
            raise ValueError("E2 requires member index")
        members[member] = _negate(members[member])
    elif op == "E3":
        if n % 2 != 0:
            raise ValueError("E3 requires even order")
        if member is None:
            raise ValueError("E3 requires member index")
        members[member] = _half_shift(members[member])
    elif op == "E4":
        if k is None:
            raise ValueError("E4 requires multiplier k")
        sigma = Automorphism(k, n)
        members = [sigma.apply(x) for x in members]
    elif op == "E5":
        if n % 2 != 0:
            raise ValueError("E5 requires even order")
        members = [_alternate(x) for x in members]
    else:
        raise ValueError(f"unknown operation {op!r}")
    return Quadruple(*(SymmetricSequence(x) for x in members))


def _member_min_code(e: tuple, even: bool) -> int:
    best = _code(e)
    c = _code(_negate(e))
    if c < best:
        best = c
    if even:
        s = _half_shift(e)
        c = _code(s)
        if c < best:
            best = c
        c = _code(_negate(s))
        if c < best:
            best = c
    return best


def canonical_member_codes(member_entries, n: int) -> tuple:
    """Lexicographically minimal code tuple over the full equivalence group.

    Works for any member count (4 for Williamson, 8 for octuples); E3 and E5
    participate only when n is even.
    """
    even = n % 2 == 0
    e5_choices = (False, True) if even else (False,)
    best = None
    for p in _unit_perms(n):
        permuted = [tuple(e[p[i]] for i in range(n)) for e in member_entries]
        for use_e5 in e5_choices:
            ms = [_alternate(e) for e in permuted] if use_e5 else permuted
            codes = sorted(_member_min_code(e, even) for e in ms)
            codes = tuple(codes)
            if best is None or codes < best:
                best = codes
    return best


def canonical_form(q: Quadruple) -> Quadruple:
    """The lexicographically minimal quadruple equivalent to q."""
    n = q.order
    codes = canonical_member_codes([x.entries for x in q.members], n)
    return Quadruple(*(SymmetricSequence(_decode(c, n)) for c in codes))


def canonical_key(q: Quadruple) -> tuple:
    n = q.order
    return (n,) + canonical_member_codes([x.entries for x in q.members], n)


def dedupe(qs) -> list:
    """Distinct canonical forms in first-seen order."""
    seen = {}
    for q in qs:
        key = canonical_key(q)
        if key not in seen:
            n = key[0]
            seen[key] = Quadruple(*(SymmetricSequence(_decode(c, n)) for c in key[1:]))
    return list(seen.values())


def expand_class(q: Quadruple) -> list:
    """Every quadruple equivalent to q (closure under E1-E5)."""
    n = q.order
    even = n % 2 == 0
    perms = _unit_perms(n)

    def neighbors(state):
        out = []
        for i in range(3):  # adjacent swaps generate all reorderings
            s = list(state)
            s[i], s[i + 1] = s[i + 1], s[i]
            out.append(tuple(s))
        for i in range(4):
            s = list(state)
            s[i] = _negate(s[i])
            out.append(tuple(s))
            if even:
                s = list(state)
                s[i] = _half_shift(s[i])
                out.append(tuple(s))
        for p in perms:
            out.append(tuple(tuple(e[p[i]] for i in range(n)) for e in state))
        if even:
            out.append(tuple(_alternate(e) for e in state))
        return out

    start = tuple(x.entries for x in q.members)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for state in frontier:
            for nb in neighbors(state):
                if nb not in seen:
                    seen.add(nb)
                    nxt.append(nb)
        frontier = nxt
    return [Quadruple(*(SymmetricSequence(e) for e in state)) for state in seen]
