"""Brute-force ground truth for small orders.

Enumerates every symmetric ±1 quadruple and keeps the ones whose PAF values
sum to zero, with no equivalence reduction, no spectral filtering and no
compression.  Deliberately kept free of any machinery shared with the real
pipeline so it can serve as an independent oracle.  The quadruple test is a
plain "try all combinations" scan, vectorized in chunks for speed.
"""
from __future__ import annotations

import numpy as np

from .seqcore import CompressedSequence, Quadruple, SymmetricSequence, verify_williamson

MAX_ORDER = 12
_PRODUCT_BUDGET = 1 << 24


def _check_budget(n: int) -> None:
    if n < 1 or n > MAX_ORDER:
        raise ValueError(f"order {n} beyond the brute-force budget (1..{MAX_ORDER})")


def all_symmetric_sequences(n: int) -> np.ndarray:
    """All 2^(n//2+1) symmetric ±1 sequences of order n, as full-entry rows."""
    f = n // 2 + 1
    count = 1 << f
    bits = (np.arange(count, dtype=np.uint32)[:, None] >> np.arange(f - 1, -1, -1, dtype=np.uint32)) & 1
    free = 1 - 2 * bits.astype(np.int8)  # bit 0 -> +1, bit 1 -> -1
    fold = np.array([i if i <= n // 2 else n - i for i in range(n)])
    return free[:, fold]


def _paf_matrix(rows: np.ndarray) -> np.ndarray:
    n = rows.shape[1]
    shifts = n // 2
    out = np.empty((rows.shape[0], shifts), dtype=np.int32)
    for s in range(1, shifts + 1):
        out[:, s - 1] = (rows.astype(np.int32) * np.roll(rows, -s, axis=1)).sum(axis=1)
    return out


def brute_force_enumerate(n: int) -> list:
    """Every Williamson quadruple of order n, as ordered quadruples."""
    qs = []
    for ia, ib, ic, idd, rows in _enumerate_index_tuples(n):
        qs.append(
            Quadruple(
                SymmetricSequence(rows[ia]),
                SymmetricSequence(rows[ib]),
                SymmetricSequence(rows[ic]),
                SymmetricSequence(rows[idd]),
            )
        )
    return qs


def brute_force_codes(n: int):
    """The same enumeration, but yielding (rows, index-quadruple array).

    Cheaper than building objects when the caller only needs set comparisons.
    """
    idx = list(_enumerate_index_tuples(n))
    if not idx:
        return all_symmetric_sequences(n), np.empty((0, 4), dtype=np.int64)
    rows = idx[0][4]
    arr = np.array([(a, b, c, d) for a, b, c, d, _ in idx], dtype=np.int64)
    return rows, arr


def _enumerate_index_tuples(n: int):
    _check_budget(n)
    rows = all_symmetric_sequences(n)
    count = rows.shape[0]
    paf = _paf_matrix(rows)
    # all pair sums of PAF vectors, indexed by ia*count+ib
    pair = (paf[:, None, :] + paf[None, :, :]).reshape(count * count, -1)
    for ab in range(count * count):
        target = -pair[ab]
        hits = np.nonzero(np.all(pair == target, axis=1))[0]
        ia, ib = divmod(ab, count)
        for cd in hits:
            ic, idd = divmod(int(cd), count)
            yield ia, ib, ic, idd, rows


def brute_force_uncompress(mc, n: int) -> list:
    """All symmetric quadruples whose m-compression equals mc and which are
    Williamson.  mc is four compressed sequences (illegal entries give [])."""
    _check_budget(n)
    targets = []
    for comp in mc:
        entries = tuple(comp.entries if isinstance(comp, CompressedSequence) else comp)
        targets.append(entries)
    d = len(targets[0])
    if n % d != 0:
        raise ValueError(f"compressed length {d} does not divide order {n}")
    m = n // d
    legal = set(range(-m, m + 1, 2))
    if any(len(t) != d or any(v not in legal for v in t) for t in targets):
        return []

    rows = all_symmetric_sequences(n)
    per_member = []
    for t in targets:
        matches = []
        for r in rows:
            if all(int(sum(r[j + k * d] for k in range(m))) == t[j] for j in range(d)):
                matches.append(tuple(int(v) for v in r))
        per_member.append(matches)

    total = 1
    for matches in per_member:
        total *= max(len(matches), 1)
    if total > _PRODUCT_BUDGET:
        raise ValueError("uncompression product beyond the brute-force budget")

    out = []
    for a in per_member[0]:
        for b in per_member[1]:
            for c in per_member[2]:
                for dd in per_member[3]:
                    q = Quadruple(a, b, c, dd)
                    if verify_williamson(q):
                        out.append(q)
    return out
