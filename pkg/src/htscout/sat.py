"""Conflict-driven SAT solver for circuit CNF queries.

Literals follow the DIMACS convention: nonzero ints, negative for
negated variables.  The solver implements two-literal watching, first-UIP
clause learning with backjumping, activity-based branching with phase
saving, and Luby restarts; that is enough to dispatch the sensitization
and equivalence queries produced by bench-scale circuits in milliseconds.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from heapq import heappop, heappush

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


@dataclass
class SatResult:
    status: str
    model: dict[int, bool] | None = None

    def __bool__(self) -> bool:
        return self.status == SAT


def _luby(i: int) -> int:
    k = 1
    while (1 << (k + 1)) - 1 <= i:
        k += 1
    while (1 << k) - 1 != i + 1:
        i -= (1 << (k - 1)) - 1
        k -= 1
    return 1 << (k - 1)


class Solver:
    def __init__(self, num_vars: int):
        n = num_vars + 1
        self.num_vars = num_vars
        self.assign = [0] * n  # 0 free, +1 true, -1 false
        self.level = [0] * n
        self.reason: list[list[int] | None] = [None] * n
        self.activity = [0.0] * n
        self.phase = [False] * n
        self.watches: dict[int, list[list[int]]] = {}
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.var_inc = 1.0
        self.order: list[tuple[float, int]] = []
        self.ok = True
        for v in range(1, n):
            heappush(self.order, (0.0, v))

    # -- assignment primitives ------------------------------------------

    def _value(self, lit: int) -> int:
        v = self.assign[abs(lit)]
        return v if lit > 0 else -v

    def _enqueue(self, lit: int, reason: list[int] | None) -> None:
        v = abs(lit)
        self.assign[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.phase[v] = lit > 0
        self.trail.append(lit)

    def _watch(self, lit: int, clause: list[int]) -> None:
        self.watches.setdefault(lit, []).append(clause)

    def add_clause(self, lits: list[int]) -> None:
        if not self.ok:
            return
        seen: dict[int, int] = {}
        clause: list[int] = []
        for lit in lits:
            if seen.get(-lit):
                return  # tautology
            if not seen.get(lit):
                seen[lit] = 1
                clause.append(lit)
        if not clause:
            self.ok = False
            return
        if len(clause) == 1:
            lit = clause[0]
            val = self._value(lit)
            if val == -1:
                self.ok = False
            elif val == 0:
                self._enqueue(lit, None)
            return
        self._watch(clause[0], clause)
        self._watch(clause[1], clause)

    # -- search ----------------------------------------------------------

    def _propagate(self) -> list[int] | None:
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            falsified = -p
            watchers = self.watches.get(falsified, [])
            self.watches[falsified] = []
            for i, clause in enumerate(watchers):
                if clause[0] == falsified:
                    clause[0], clause[1] = clause[1], clause[0]
                first = clause[0]
                if self._value(first) == 1:
                    self._watch(falsified, clause)
                    continue
                for k in range(2, len(clause)):
                    if self._value(clause[k]) != -1:
                        clause[1], clause[k] = clause[k], clause[1]
                        self._watch(clause[1], clause)
                        break
                else:
                    self._watch(falsified, clause)
                    if self._value(first) == -1:
                        self.watches[falsified].extend(watchers[i + 1 :])
                        return clause
                    self._enqueue(first, clause)
        return None

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.num_vars + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
        heappush(self.order, (-self.activity[v], v))

    def _analyze(self, conflict: list[int]) -> tuple[list[int], int]:
        learnt = [0]
        seen = [False] * (self.num_vars + 1)
        counter = 0
        p = 0
        reason = conflict
        idx = len(self.trail) - 1
        cur_level = len(self.trail_lim)
        while True:
            for q in reason:
                if q == p:
                    continue
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if self.level[v] >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            lit = self.trail[idx]
            v = abs(lit)
            idx -= 1
            counter -= 1
            if counter == 0:
                learnt[0] = -lit
                break
            reason = self.reason[v] or []
            p = lit
        if len(learnt) == 1:
            return learnt, 0
        # Move the highest-level remaining literal into the watch slot.
        best = max(range(1, len(learnt)), key=lambda i: self.level[abs(learnt[i])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    def _backtrack(self, target_level: int) -> None:
        while len(self.trail_lim) > target_level:
            mark = self.trail_lim.pop()
            for lit in self.trail[mark:]:
                v = abs(lit)
                self.assign[v] = 0
                self.reason[v] = None
                heappush(self.order, (-self.activity[v], v))
            del self.trail[mark:]
        self.qhead = min(self.qhead, len(self.trail))

    def _decide(self) -> int | None:
        while self.order:
            _, v = heappop(self.order)
            if self.assign[v] == 0:
                return v if self.phase[v] else -v
        return None

    def solve(self, timeout_s: float | None = None) -> SatResult:
        if not self.ok:
            return SatResult(UNSAT)
        deadline = None if timeout_s is None else time.monotonic() + timeout_s
        restart = 0
        conflicts_left = 64 * _luby(restart)
        while True:
            conflict = self._propagate()
            if conflict is not None:
                if not self.trail_lim:
                    return SatResult(UNSAT)
                learnt, back_level = self._analyze(conflict)
                self._backtrack(back_level)
                if len(learnt) > 1:
                    self._watch(learnt[0], learnt)
                    self._watch(learnt[1], learnt)
                self._enqueue(learnt[0], learnt if len(learnt) > 1 else None)
                self.var_inc /= 0.95
                conflicts_left -= 1
                if conflicts_left <= 0:
                    restart += 1
                    conflicts_left = 64 * _luby(restart)
                    self._backtrack(0)
                continue
            if deadline is not None and time.monotonic() > deadline:
                return SatResult(UNKNOWN)
            lit = self._decide()
            if lit is None:
                model = {
                    v: self.assign[v] > 0 for v in range(1, self.num_vars + 1)
                }
                return SatResult(SAT, model)
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, None)


def solve(num_vars: int, clauses: list[list[int]], timeout_s: float | None = None) -> SatResult:
    solver = Solver(num_vars)
    for clause in clauses:
        solver.add_clause(clause)
    return solver.solve(timeout_s=timeout_s)
