"""Conflict-driven clause learning solver with incremental use and assumptions.

Literals are nonzero ints (DIMACS convention).  The solver supports adding
clauses between solve calls (never removing them), solving under assumption
literals, wall-clock budgets, and an optional log of learned clauses suitable
for emission as a DRAT proof trace.

Implementation notes: two watched literals per clause, first-UIP learning with
non-chronological backjumping, exponential VSIDS decay, phase saving, Luby
restarts, and periodic deletion of low-activity learned clauses.  Decision
ties break on the smallest variable index, so runs are deterministic.
"""

from __future__ import annotations

import time
from heapq import heappop, heappush

SAT = "sat"
UNSAT = "unsat"
TIMEOUT = "timeout"

_LUBY_UNIT = 128
_VAR_DECAY = 1.0 / 0.95
_RESCALE = 1e100


def _luby(i: int) -> int:
    # i-th term (1-based) of the Luby restart sequence 1,1,2,1,1,2,4,...
    k = 1
    while (1 << (k + 1)) - 1 <= i:
        k += 1
    while (1 << k) - 1 != i:
        i -= (1 << (k - 1))
        k -= 1
        while (1 << (k + 1)) - 1 <= i:
            k += 1
    return 1 << (k - 1)


class CdclSolver:
    def __init__(self, proof_log: list | None = None):
        self.nvars = 0
        self.clauses = []          # problem clauses (post level-0 simplification)
        self.learnts = []
        self.watches = {}          # lit -> list of clauses watching it
        self.assigns = [0]         # var -> 1 / -1 / 0, index 0 unused
        self.level = [0]
        self.reason = [None]
        self.phase = [False]
        self.activity = [0.0]
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.var_inc = 1.0
        self.conflicts = 0
        self.unsat = False         # latched once a level-0 conflict is derived
        self.proof_log = proof_log
        self._learnt_limit = 2000
        self._order = []           # lazy max-heap of (-activity, var)

    # -- variables -------------------------------------------------------

    def ensure_var(self, v: int) -> None:
        while self.nvars < v:
            self.nvars += 1
            self.assigns.append(0)
            self.level.append(0)
            self.reason.append(None)
            self.phase.append(False)
            self.activity.append(0.0)
            self.watches[self.nvars] = []
            self.watches[-self.nvars] = []
            heappush(self._order, (0.0, self.nvars))

    def new_var(self) -> int:
        self.ensure_var(self.nvars + 1)
        return self.nvars

    def _value(self, lit: int) -> int:
        v = self.assigns[lit] if lit > 0 else -self.assigns[-lit]
        return v

    # -- clause management -------------------------------------------------

    def add_clause(self, lits) -> None:
        assert not self.trail_lim, "clauses may only be added between solves"
        if self.unsat:
            return
        seen = set()
        clause = []
        for lit in lits:
            if lit == 0 or not isinstance(lit, int):
                raise ValueError(f"invalid literal {lit!r}")
            if -lit in seen:
                return  # tautology
            if lit in seen:
                continue
            seen.add(lit)
            self.ensure_var(abs(lit))
            val = self._value(lit)
            if val == 1:
                return  # already satisfied at level 0
            if val == 0:
                clause.append(lit)
        if not clause:
            self.unsat = True
            if self.proof_log is not None:
                self.proof_log.append(())
            return
        if len(clause) == 1:
            self._enqueue(clause[0], None)
            if self._propagate() is not None:
                self.unsat = True
                if self.proof_log is not None:
                    self.proof_log.append(())
            return
        self.clauses.append(clause)
        self._watch(clause)

    def _watch(self, clause) -> None:
        self.watches[clause[0]].append(clause)
        self.watches[clause[1]].append(clause)

    def _attach_learnt(self, clause) -> None:
        self.learnts.append(clause)
        self._watch(clause)
        if self.proof_log is not None:
            self.proof_log.append(tuple(clause))

    def _reduce_learnts(self) -> None:
        # Called at decision level 0: no learnt clause is a reason there
        # unless it became a level-0 unit's reason, which we keep.
        keep_n = len(self.learnts) // 2
        locked = {id(c) for c in self.reason if c is not None}
        kept, dropped = [], []
        for c in sorted(self.learnts, key=len):
            if id(c) in locked or len(c) <= 2 or len(kept) < keep_n:
                kept.append(c)
            else:
                dropped.append(c)
        if not dropped:
            return
        drop_ids = {id(c) for c in dropped}
        self.learnts = [c for c in self.learnts if id(c) not in drop_ids]
        for lit, wl in self.watches.items():
            self.watches[lit] = [c for c in wl if id(c) not in drop_ids]
        if self.proof_log is not None:
            for c in dropped:
                self.proof_log.append(("d",) + tuple(c))

    # -- trail -------------------------------------------------------------

    def _enqueue(self, lit: int, reason) -> None:
        v = abs(lit)
        self.assigns[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _backtrack(self, target_level: int) -> None:
        if len(self.trail_lim) <= target_level:
            return
        bound = self.trail_lim[target_level]
        order, activity = self._order, self.activity
        for i in range(len(self.trail) - 1, bound - 1, -1):
            lit = self.trail[i]
            v = abs(lit)
            self.phase[v] = lit > 0
            self.assigns[v] = 0
            self.reason[v] = None
            heappush(order, (-activity[v], v))
        del self.trail[bound:]
        del self.trail_lim[target_level:]
        self.qhead = len(self.trail)

    # -- propagation ---------------------------------------------------------

    def _propagate(self):
        trail = self.trail
        assigns = self.assigns
        watches = self.watches
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            false_lit = -p
            wl = watches[false_lit]
            i = j = 0
            n = len(wl)
            conflict = None
            while i < n:
                clause = wl[i]
                i += 1
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], false_lit
                first = clause[0]
                v0 = assigns[first] if first > 0 else -assigns[-first]
                if v0 == 1:
                    wl[j] = clause
                    j += 1
                    continue
                moved = False
                for k in range(2, len(clause)):
                    lit = clause[k]
                    vk = assigns[lit] if lit > 0 else -assigns[-lit]
                    if vk != -1:
                        clause[1], clause[k] = lit, clause[1]
                        watches[lit].append(clause)
                        moved = True
                        break
                if moved:
                    continue
                wl[j] = clause
                j += 1
                if v0 == -1:
                    conflict = clause
                    # keep the remaining watchers in place
                    while i < n:
                        wl[j] = wl[i]
                        j += 1
                        i += 1
                    break
                self._enqueue(first, clause)
            del wl[j:]
            if conflict is not None:
                return conflict
        return None

    # -- conflict analysis -----------------------------------------------------

    def _bump(self, v: int) -> None:
        act = self.activity[v] + self.var_inc
        self.activity[v] = act
        if act > _RESCALE:
            inv = 1.0 / _RESCALE
            for i in range(1, self.nvars + 1):
                self.activity[i] *= inv
            self.var_inc *= inv
            self._order = [(-self.activity[v2], v2)
                           for v2 in range(1, self.nvars + 1)
                           if self.assigns[v2] == 0]
            self._order.sort()
        elif self.assigns[v] == 0:
            heappush(self._order, (-act, v))

    def _analyze(self, conflict):
        learnt = [None]
        seen = bytearray(self.nvars + 1)
        cur_level = len(self.trail_lim)
        counter = 0
        p = None
        index = len(self.trail) - 1
        reason_clause = conflict
        while True:
            start = 0 if p is None else 1
            for k in range(start, len(reason_clause)):
                q = reason_clause[k]
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = 1
                    self._bump(v)
                    if self.level[v] >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self.trail[index])]:
                index -= 1
            p = self.trail[index]
            v = abs(p)
            seen[v] = 0
            index -= 1
            counter -= 1
            if counter == 0:
                break
            reason_clause = self.reason[v]
        learnt[0] = -p
        if len(learnt) == 1:
            return learnt, 0
        # move the literal of the second-highest level to the watch slot
        max_i = max(range(1, len(learnt)), key=lambda i: self.level[abs(learnt[i])])
        learnt[1], learnt[max_i] = learnt[max_i], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    # -- decisions ----------------------------------------------------------

    def _decide(self) -> int:
        order = self._order
        assigns = self.assigns
        activity = self.activity
        while order:
            neg_act, v = order[0]
            if assigns[v] != 0 or -neg_act != activity[v]:
                heappop(order)  # assigned or stale
                continue
            return v
        return 0

    # -- main loop ------------------------------------------------------------

    def solve(self, assumptions=(), deadline: float | None = None) -> tuple:
        """Return (status, model); model is a var-indexed list of +1/-1 on SAT."""
        if self.unsat:
            return UNSAT, None
        assumptions = list(assumptions)
        for lit in assumptions:
            self.ensure_var(abs(lit))
        if self._propagate() is not None:
            self.unsat = True
            if self.proof_log is not None:
                self.proof_log.append(())
            return UNSAT, None

        restart_count = 0
        conflicts_until_restart = _luby(1) * _LUBY_UNIT
        conflict_countdown = conflicts_until_restart
        time_check = 0

        while True:
            conflict = self._propagate()
            if conflict is not None:
                self.conflicts += 1
                conflict_countdown -= 1
                if not self.trail_lim:
                    self.unsat = True
                    if self.proof_log is not None:
                        self.proof_log.append(())
                    return UNSAT, None
                learnt, back_level = self._analyze(conflict)
                # conflicts inside the assumption prefix refute the assumptions
                self._backtrack(back_level)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                    if self.proof_log is not None:
                        self.proof_log.append(tuple(learnt))
                else:
                    self._attach_learnt(learnt)
                    self._enqueue(learnt[0], learnt)
                self.var_inc *= _VAR_DECAY
                time_check += 1
                if time_check >= 128:
                    time_check = 0
                    if deadline is not None and time.monotonic() > deadline:
                        self._backtrack(0)
                        return TIMEOUT, None
                continue

            if conflict_countdown <= 0:
                restart_count += 1
                conflicts_until_restart = _luby(restart_count + 1) * _LUBY_UNIT
                conflict_countdown = conflicts_until_restart
                self._backtrack(0)
                if len(self.learnts) > self._learnt_limit:
                    self._reduce_learnts()
                    self._learnt_limit += self._learnt_limit // 10
                if deadline is not None and time.monotonic() > deadline:
                    return TIMEOUT, None
                continue

            # extend the trail: due assumptions first, then a free decision
            lvl = len(self.trail_lim)
            if lvl < len(assumptions):
                lit = assumptions[lvl]
                val = self._value(lit)
                if val == -1:
                    self._backtrack(0)
                    return UNSAT, None
                self.trail_lim.append(len(self.trail))
                if val == 0:
                    self._enqueue(lit, None)
                continue

            v = self._decide()
            if v == 0:
                model = list(self.assigns)
                self._backtrack(0)
                return SAT, model
            self.trail_lim.append(len(self.trail))
            self._enqueue(v if self.phase[v] else -v, None)
