"""Shared test helpers."""
import numpy as np

from williamson.equivalence import apply_equivalence, units
from williamson.seqcore import Quadruple, SymmetricSequence


def random_pm1(rng, n):
    return [int(v) for v in rng.choice([-1, 1], size=n)]


def random_symmetric(rng, n):
    free = [int(v) for v in rng.choice([-1, 1], size=n // 2 + 1)]
    return SymmetricSequence.from_free(n, free)


def random_quadruple(rng, n):
    return Quadruple(*(random_symmetric(rng, n) for _ in range(4)))


def random_op(rng, q):
    n = q.order
    ops = ["E1", "E2", "E4"]
    if n % 2 == 0:
        ops += ["E3", "E5"]
    op = ops[rng.integers(len(ops))]
    if op == "E1":
        return apply_equivalence(q, "E1", perm=tuple(rng.permutation(4).tolist()))
    if op == "E2":
        return apply_equivalence(q, "E2", member=int(rng.integers(4)))
    if op == "E3":
        return apply_equivalence(q, "E3", member=int(rng.integers(4)))
    if op == "E4":
        ks = units(n)
        return apply_equivalence(q, "E4", k=ks[rng.integers(len(ks))])
    return apply_equivalence(q, "E5")
