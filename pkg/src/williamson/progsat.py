"""Conflict-driven clause-learning SAT solver with a programmatic callback.

The solver enumerates every satisfying total assignment: each model found is
blocked by a clause negating it and the search continues until the instance
is exhausted.  A callback, invoked at every unit-propagation fixpoint where a
sequence block has newly become fully assigned, may inject a conflict clause
that is falsified by the current partial assignment; such clauses are handled
exactly like ordinary conflicts.  The Williamson callback rejects any subset
of fully assigned members whose PSD values sum beyond 4n + epsilon and
reports a solution when all four members survive.

Literals are nonzero ints (DIMACS convention); variables are 1-based.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .seqcore import EPSILON_DEFAULT

NO_ACTION = None


@dataclass(frozen=True)
class LearnedClause:
    clause: tuple


@dataclass(frozen=True)
class SolutionFound:
    quadruple: object


@dataclass
class SolverStats:
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0
    callback_clauses: int = 0
    restarts: int = 0
    solutions: int = 0


def _luby(i: int) -> int:
    # Luby restart sequence: 1 1 2 1 1 2 4 1 1 2 ... (i is 0-based)
    j = i + 1
    while True:
        k = j.bit_length()
        if j == (1 << k) - 1:
            return 1 << (k - 1)
        j -= (1 << (k - 1)) - 1


class CdclSolver:
    """CDCL with watched literals, VSIDS-style activities, phase saving,
    Luby restarts, all-solutions enumeration and a programmatic callback."""

    RESTART_BASE = 128

    def __init__(self, num_vars: int, clauses, callback=None):
        self.num_vars = num_vars
        self.values = [0] * (num_vars + 1)   # 0 unassigned, 1 true, -1 false
        self.level = [0] * (num_vars + 1)
        self.reason = [None] * (num_vars + 1)
        self.saved = [False] * (num_vars + 1)
        self.activity = [0.0] * (num_vars + 1)
        self.var_inc = 1.0
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.watches = [[] for _ in range(2 * num_vars + 2)]
        self.clause_keys = {}
        self.stats = SolverStats()
        self.ok = True

        self.callback = callback
        blocks = getattr(callback, "blocks", None) if callback is not None else None
        self.block_of = [-1] * (num_vars + 1)
        self.block_remaining = []
        if blocks:
            for bi, vs in enumerate(blocks):
                self.block_remaining.append(len(vs))
                for v in vs:
                    self.block_of[v] = bi
        self.checked_mask = 0

        for clause in clauses:
            if not self._add_input_clause(clause):
                self.ok = False
                return

    # -- clause plumbing ---------------------------------------------------

    def _widx(self, lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    def _lit_value(self, lit: int) -> int:
        v = self.values[lit if lit > 0 else -lit]
        return v if lit > 0 else -v

    def _add_input_clause(self, lits) -> bool:
        seen = set()
        clause = []
        for lit in lits:
            if lit == 0 or abs(lit) > self.num_vars:
                raise ValueError(f"literal {lit} out of range")
            if -lit in seen:
                return True  # tautology
            if lit not in seen:
                seen.add(lit)
                clause.append(lit)
        if not clause:
            return False
        key = frozenset(clause)
        if key in self.clause_keys:
            return True
        if len(clause) == 1:
            lit = clause[0]
            val = self._lit_value(lit)
            if val == -1:
                return False
            if val == 0:
                self._enqueue(lit, None)
            return True
        self.clause_keys[key] = clause
        self.watches[self._widx(clause[0])].append(clause)
        self.watches[self._widx(clause[1])].append(clause)
        return True

    def _attach_learned(self, clause: list) -> None:
        # positions 0 and 1 must hold the two highest-level literals
        key = frozenset(clause)
        if key not in self.clause_keys:
            self.clause_keys[key] = clause
        self.watches[self._widx(clause[0])].append(clause)
        self.watches[self._widx(clause[1])].append(clause)

    # -- assignment --------------------------------------------------------

    @property
    def decision_level(self) -> int:
        return len(self.trail_lim)

    def _enqueue(self, lit: int, reason) -> None:
        v = lit if lit > 0 else -lit
        self.values[v] = 1 if lit > 0 else -1
        self.level[v] = self.decision_level
        self.reason[v] = reason
        self.trail.append(lit)
        bi = self.block_of[v]
        if bi >= 0:
            self.block_remaining[bi] -= 1

    def _backjump(self, target_level: int) -> None:
        if self.decision_level <= target_level:
            return
        bound = self.trail_lim[target_level]
        for i in range(len(self.trail) - 1, bound - 1, -1):
            lit = self.trail[i]
            v = lit if lit > 0 else -lit
            self.saved[v] = lit > 0
            self.values[v] = 0
            self.reason[v] = None
            bi = self.block_of[v]
            if bi >= 0:
                self.block_remaining[bi] += 1
                self.checked_mask &= ~(1 << bi)
        del self.trail[bound:]
        del self.trail_lim[target_level:]
        self.qhead = len(self.trail)

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for i in range(1, self.num_vars + 1):
                self.activity[i] *= 1e-100
            self.var_inc *= 1e-100

    # -- search ------------------------------------------------------------

    def _propagate(self):
        values = self.values
        watches = self.watches
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            self.stats.propagations += 1
            neg = -lit
            wl = watches[self._widx(neg)]
            i = 0
            end = len(wl)
            while i < end:
                clause = wl[i]
                if clause[0] == neg:
                    clause[0], clause[1] = clause[1], clause[0]
                first = clause[0]
                fv = values[first] if first > 0 else -values[-first]
                if fv == 1:
                    i += 1
                    continue
                moved = False
                for k in range(2, len(clause)):
                    other = clause[k]
                    ov = values[other] if other > 0 else -values[-other]
                    if ov != -1:
                        clause[1], clause[k] = clause[k], clause[1]
                        watches[self._widx(other)].append(clause)
                        wl[i] = wl[-1]
                        wl.pop()
                        end -= 1
                        moved = True
                        break
                if moved:
                    continue
                if fv == -1:
                    return clause
                self._enqueue(first, clause)
                i += 1
        return None

    def _analyze(self, conflict) -> tuple:
        seen = [False] * (self.num_vars + 1)
        learned = []
        counter = 0
        p = None
        index = len(self.trail) - 1
        clause = conflict
        current = self.decision_level
        while True:
            for q in clause:
                if q == p:
                    continue
                v = q if q > 0 else -q
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if self.level[v] >= current:
                        counter += 1
                    else:
                        learned.append(q)
            while not seen[abs(self.trail[index])]:
                index -= 1
            lit = self.trail[index]
            v = lit if lit > 0 else -lit
            p = lit
            clause = self.reason[v]
            seen[v] = False
            counter -= 1
            index -= 1
            if counter == 0:
                break
        asserting = -p
        if learned:
            bj = max(self.level[q if q > 0 else -q] for q in learned)
            # watch the asserting literal and one literal from the backjump level
            wi = max(range(len(learned)), key=lambda i: self.level[abs(learned[i])])
            learned[0], learned[wi] = learned[wi], learned[0]
        else:
            bj = 0
        return [asserting] + learned, bj

    def _decide(self) -> None:
        best_v = 0
        best_a = -1.0
        values = self.values
        activity = self.activity
        for v in range(1, self.num_vars + 1):
            if values[v] == 0 and activity[v] > best_a:
                best_a = activity[v]
                best_v = v
        self.stats.decisions += 1
        self.trail_lim.append(len(self.trail))
        lit = best_v if self.saved[best_v] else -best_v
        self._enqueue(lit, None)

    def _record_learned(self, learned: list, bj_level: int) -> None:
        self._backjump(bj_level)
        if len(learned) == 1:
            self._enqueue(learned[0], None)
            return
        key = frozenset(learned)
        existing = self.clause_keys.get(key)
        if existing is not None:
            self._enqueue(learned[0], existing)
            return
        self._attach_learned(learned)
        self._enqueue(learned[0], learned)

    def _integrate_external(self, lits) -> bool:
        """Add a clause that is falsified by the current assignment, backtrack
        so the search can continue, and return False when the instance is
        exhausted (the clause is falsified at level 0)."""
        clause = list(dict.fromkeys(lits))
        key = frozenset(clause)
        if key in self.clause_keys:
            raise RuntimeError("external clause duplicates an existing clause")
        levels = [self.level[abs(l)] for l in clause]
        max_level = max(levels)
        if max_level == 0:
            return False
        deepest = [i for i, lv in enumerate(levels) if lv == max_level]
        if len(clause) == 1:
            self._backjump(0)
            self._enqueue(clause[0], None)
            return True
        if len(deepest) == 1:
            wi = deepest[0]
            clause[0], clause[wi] = clause[wi], clause[0]
            rest_level = max(self.level[abs(l)] for l in clause[1:])
            si = max(range(1, len(clause)), key=lambda i: self.level[abs(clause[i])])
            clause[1], clause[si] = clause[si], clause[1]
            self._backjump(rest_level)
            self._attach_learned(clause)
            self._enqueue(clause[0], clause)
        else:
            i0, i1 = deepest[0], deepest[1]
            clause[0], clause[i0] = clause[i0], clause[0]
            if i1 == 0:
                i1 = i0
            clause[1], clause[i1] = clause[i1], clause[1]
            self._backjump(max_level - 1)
            self._attach_learned(clause)
        return True

    def _current_model(self) -> tuple:
        values = self.values
        return tuple(v if values[v] == 1 else -v for v in range(1, self.num_vars + 1))

    def _blocking_clause(self) -> list:
        values = self.values
        return [-v if values[v] == 1 else v for v in range(1, self.num_vars + 1)]

    def solve_all(self, max_solutions=None) -> list:
        """Every satisfying total assignment, as tuples of literals."""
        models = []
        if not self.ok:
            return models
        callback = self.callback
        n_blocks = len(self.block_remaining)
        restarts_enabled = True
        conflict_budget = self.RESTART_BASE * _luby(0)
        conflicts_here = 0

        while True:
            conflict = self._propagate()
            if conflict is not None:
                self.stats.conflicts += 1
                conflicts_here += 1
                if self.decision_level == 0:
                    return models
                learned, bj = self._analyze(conflict)
                self._record_learned(learned, bj)
                self.var_inc *= 1.052
                continue

            if callback is not None and n_blocks:
                full_bits = 0
                for bi in range(n_blocks):
                    if self.block_remaining[bi] == 0:
                        full_bits |= 1 << bi
                if full_bits & ~self.checked_mask:
                    self.checked_mask = full_bits
                    outcome = callback(self.values, full_bits)
                    if isinstance(outcome, LearnedClause):
                        self.stats.callback_clauses += 1
                        if not self._integrate_external(outcome.clause):
                            return models
                        continue
                    if isinstance(outcome, SolutionFound):
                        self.stats.solutions += 1
                        models.append(self._current_model())
                        if max_solutions is not None and len(models) >= max_solutions:
                            return models
                        restarts_enabled = False
                        if not self._integrate_external(self._blocking_clause()):
                            return models
                        continue

            if len(self.trail) == self.num_vars:
                # total model with no callback objection
                self.stats.solutions += 1
                models.append(self._current_model())
                if max_solutions is not None and len(models) >= max_solutions:
                    return models
                restarts_enabled = False
                if not self._integrate_external(self._blocking_clause()):
                    return models
                continue

            if restarts_enabled and conflicts_here >= conflict_budget:
                self.stats.restarts += 1
                conflicts_here = 0
                conflict_budget = self.RESTART_BASE * _luby(self.stats.restarts)
                self._backjump(0)
                continue

            self._decide()


def solve_all(inst, callback=None, max_solutions=None) -> list:
    """Enumerate all models of a SatInstance (empty list when unsatisfiable)."""
    solver = CdclSolver(inst.num_vars, inst.clauses, callback)
    return solver.solve_all(max_solutions=max_solutions)


# -- programmatic Williamson callback ---------------------------------------


def learn_minimal_psd_clause(block_literals, block_psds, s: int, n: int,
                             epsilon: float = EPSILON_DEFAULT) -> list:
    """Conflict clause from a minimal-cardinality subset of blocks whose PSD
    values at shift s sum beyond 4n + epsilon, trying the largest values
    first.  block_literals[i] holds the current literals of block i."""
    bound = 4 * n + epsilon
    vals = [float(p[s]) for p in block_psds]
    order = sorted(range(len(vals)), key=lambda i: -vals[i])
    total = 0.0
    chosen = []
    for i in order:
        chosen.append(i)
        total += vals[i]
        if total > bound:
            return [-lit for i in chosen for lit in block_literals[i]]
    raise ValueError(f"no subset exceeds the PSD bound at shift {s}")


class WilliamsonCallback:
    """Checks fully assigned members against the PSD bound; returns a conflict
    clause over a minimal violating subset, or the decoded quadruple when all
    four members pass.  PSD vectors are memoized by member bit pattern."""

    def __init__(self, var_map, n: int, epsilon: float = EPSILON_DEFAULT):
        self.var_map = var_map
        self.n = n
        self.epsilon = epsilon
        self.bound = 4 * n + epsilon
        self.blocks = var_map.blocks()
        self._fold = [i if i <= n // 2 else n - i for i in range(n)]
        self._memo = {}

    def _block_psd(self, values, block):
        pattern = 0
        for v in block:
            pattern = (pattern << 1) | (values[v] > 0)
        cached = self._memo.get(pattern)
        if cached is None:
            free = [1.0 if values[v] > 0 else -1.0 for v in block]
            full = np.array([free[i] for i in self._fold])
            spec = np.fft.rfft(full)
            cached = spec.real * spec.real + spec.imag * spec.imag
            self._memo[pattern] = cached
        return cached

    def __call__(self, values, full_bits: int):
        full_blocks = [r for r in range(4) if (full_bits >> r) & 1]
        if not full_blocks:
            return NO_ACTION
        psds = [self._block_psd(values, self.blocks[r]) for r in full_blocks]
        arr = np.stack(psds)
        desc = -np.sort(-arr, axis=0)
        prefix = np.cumsum(desc, axis=0)
        exceeds = prefix > self.bound
        if exceeds.any():
            sizes = np.where(exceeds.any(axis=0), exceeds.argmax(axis=0) + 1, arr.shape[0] + 1)
            s = int(sizes.argmin())
            lits = []
            for r in full_blocks:
                block = self.blocks[r]
                lits.append([v if values[v] > 0 else -v for v in block])
            clause = learn_minimal_psd_clause(lits, psds, s, self.n, self.epsilon)
            return LearnedClause(tuple(clause))
        if len(full_blocks) == 4:
            return SolutionFound(self.var_map.decode(values))
        return NO_ACTION


def williamson_callback(values, var_map, n: int, epsilon: float = EPSILON_DEFAULT,
                        full_bits: int = 0b1111):
    """Functional form of the Williamson PSD check over a partial assignment."""
    cb = WilliamsonCallback(var_map, n, epsilon)
    mask = 0
    for bi, block in enumerate(cb.blocks):
        if all(values[v] != 0 for v in block):
            mask |= 1 << bi
    return cb(values, mask & full_bits)
