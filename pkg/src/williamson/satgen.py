"""CNF encoding of the uncompression problem.

Boolean variables stand for the free entries of the four sequences (true is
+1, false is -1), numbered role-major: A's entries, then B, C, D.  Symmetry
keeps only the entries x[0..n//2]; any index beyond n/2 folds to n-i.  Each
compressed entry constrains its two (m=2) or three (m=3) source entries with
one of seven clause patterns covering the values -m..m.

Instances whose compressed quadruples are related by an equivalence
transformation have equivalent solution sets; they are deduplicated before
solving by a canonical key over the compressed quadruple (reorder, member
negation, index automorphisms lifted from Z_n, and alternating negation when
it descends to the compressed sequences, i.e. when 4 | n).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .seqcore import Quadruple, SymmetricSequence


class VariableMap:
    """Bijection between 1-based variable indices and (role, free index)."""

    def __init__(self, n: int):
        self.n = n
        self.free_count = n // 2 + 1
        self.num_vars = 4 * self.free_count

    def var(self, role: int, index: int) -> int:
        n = self.n
        index %= n
        if index > n // 2:
            index = n - index
        return role * self.free_count + index + 1

    def role_index(self, var: int) -> tuple:
        if not 1 <= var <= self.num_vars:
            raise ValueError(f"variable {var} out of range")
        return divmod(var - 1, self.free_count)

    def blocks(self) -> list:
        f = self.free_count
        return [[role * f + i + 1 for i in range(f)] for role in range(4)]

    def decode(self, values) -> Quadruple:
        members = []
        for role in range(4):
            free = [1 if values[self.var(role, i)] > 0 else -1 for i in range(self.free_count)]
            members.append(SymmetricSequence.from_free(self.n, free))
        return Quadruple(*members)


@dataclass
class SatInstance:
    num_vars: int
    clauses: list
    var_map: VariableMap = field(default=None, compare=False)

    def __eq__(self, other):
        if not isinstance(other, SatInstance):
            return NotImplemented
        return self.num_vars == other.num_vars and list(self.clauses) == list(other.clauses)


def _normalize_clause(lits):
    """Merge repeated literals; None for tautologies."""
    seen = []
    for lit in lits:
        if -lit in seen:
            return None
        if lit not in seen:
            seen.append(lit)
    return tuple(seen)


def _entry_clauses(value: int, variables: tuple, m: int) -> list:
    if m == 2:
        x, y = variables
        if value == 2:
            return [(x,), (y,)]
        if value == 0:
            return [(x, y), (-x, -y)]
        if value == -2:
            return [(-x,), (-y,)]
    else:
        x, y, z = variables
        if value == 3:
            return [(x,), (y,), (z,)]
        if value == 1:
            return [(-x, -y, -z), (x, y), (x, z), (y, z)]
        if value == -1:
            return [(x, y, z), (-x, -y), (-x, -z), (-y, -z)]
        if value == -3:
            return [(-x,), (-y,), (-z,)]
    raise ValueError(f"compressed entry {value} illegal for factor {m}")


def encode_uncompression(mc, n: int) -> SatInstance:
    """CNF whose models are exactly the symmetric ±1 quadruples whose
    m-compression equals mc."""
    rows = mc.rows if hasattr(mc, "rows") else tuple(tuple(r) for r in mc)
    d = len(rows[0])
    if n % d != 0:
        raise ValueError(f"compressed length {d} does not divide n={n}")
    m = n // d
    if m not in (2, 3) or (n % 2 == 0) != (m == 2):
        raise ValueError(f"factor {m} inconsistent with order {n}")
    vm = VariableMap(n)
    clauses = {}
    for role, row in enumerate(rows):
        for j, value in enumerate(row):
            variables = tuple(vm.var(role, j + t * d) for t in range(m))
            for lits in _entry_clauses(int(value), variables, m):
                norm = _normalize_clause(lits)
                if norm is not None:
                    clauses.setdefault(tuple(sorted(norm, key=abs)), None)
    return SatInstance(vm.num_vars, [list(c) for c in clauses], vm)


def encode_product_theorem(n: int, var_map: VariableMap = None) -> list:
    """Clauses forcing a_k b_k c_k d_k = -1 for k = 1..(n-1)/2 (odd n, first
    entries fixed to +1 by the rowsum sign convention): the 8 width-4 clauses
    per k that each forbid one even-negation sign pattern."""
    if n % 2 == 0:
        raise ValueError("the product constraint applies to odd orders")
    vm = var_map or VariableMap(n)
    clauses = []
    for k in range(1, (n - 1) // 2 + 1):
        vs = [vm.var(role, k) for role in range(4)]
        for bits in range(16):
            signs = [1 if (bits >> i) & 1 == 0 else -1 for i in range(4)]
            if signs[0] * signs[1] * signs[2] * signs[3] == 1:
                # forbid this assignment: literal false exactly under it
                clauses.append(tuple(-v if s == 1 else v for v, s in zip(vs, signs)))
    return clauses


def export_dimacs(inst: SatInstance) -> str:
    lines = [f"p cnf {inst.num_vars} {len(inst.clauses)}"]
    for clause in inst.clauses:
        lines.append(" ".join(str(l) for l in clause) + " 0")
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> SatInstance:
    num_vars = None
    declared = None
    clauses = []
    pending = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"line {lineno}: malformed header")
            num_vars, declared = int(parts[2]), int(parts[3])
            continue
        if num_vars is None:
            raise ValueError(f"line {lineno}: clause before header")
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(list(pending))
                pending = []
            else:
                if abs(lit) > num_vars:
                    raise ValueError(f"line {lineno}: literal {lit} out of range")
                pending.append(lit)
    if pending:
        raise ValueError("unterminated clause at end of input")
    if num_vars is None:
        raise ValueError("missing header")
    if declared != len(clauses):
        raise ValueError(f"header declares {declared} clauses, found {len(clauses)}")
    return SatInstance(num_vars, clauses)


# -- instance-level deduplication --------------------------------------------


def _compressed_maps(n: int, d: int) -> list:
    maps = {tuple((k * j) % d for j in range(d)) for k in range(1, n + 1) if math.gcd(k, n) == 1}
    return sorted(maps)


def instance_key(rows, n: int) -> tuple:
    """Canonical form of a compressed quadruple under the equivalence
    operations that act on compressed space."""
    rows = tuple(tuple(int(v) for v in r) for r in rows)
    d = len(rows[0])
    alt_applies = n % 2 == 0 and d % 2 == 0
    best = None
    for p in _compressed_maps(n, d):
        permuted = [tuple(r[p[j]] for j in range(d)) for r in rows]
        for alt in ((False, True) if alt_applies else (False,)):
            ms = (
                [tuple(v if j % 2 == 0 else -v for j, v in enumerate(r)) for r in permuted]
                if alt
                else permuted
            )
            cand = tuple(sorted(min(r, tuple(-v for v in r)) for r in ms))
            if best is None or cand < best:
                best = cand
    return best


def dedupe_instances(mcs, n: int) -> tuple:
    """Keep one matched compression per equivalence key, in first-seen order.

    Returns (kept, discarded) where discarded pairs each dropped compression
    with the index of its kept representative."""
    kept = []
    discarded = []
    by_key = {}
    for mc in mcs:
        key = instance_key(mc.rows, n)
        if key in by_key:
            discarded.append((mc, by_key[key]))
        else:
            by_key[key] = len(kept)
            kept.append(mc)
    return kept, discarded
