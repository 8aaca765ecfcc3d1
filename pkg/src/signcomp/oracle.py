"""SAT-independent ground truth: backtracking completion and gadget checking.

Everything here decides completability by explicit search over sign
assignments, sharing nothing with the CNF layers.  It is the second route of
every dual-route check in the package: search results, gadget constructions,
and the greedy classifier are all validated against these functions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

from .core import MINUS, PLUS, UNSET, PartialSignMapping, subset_tables
from .patterns import Family
from .problems import GadgetProblem, assignments

# Deterministic branch order: '+' first, positions in lex-rank order.
_BRANCH = (PLUS, MINUS)


def _conflicts(states, tables, patterns, position) -> bool:
    for w in tables.windows_of_pos[position]:
        word = tuple(states[p] for p in tables.windows[w])
        if UNSET not in word and word in patterns:
            return True
    return False


def brute_complete(sigma: PartialSignMapping,
                   family: Family) -> PartialSignMapping | None:
    """A family-avoiding full extension of sigma, or None.

    Backtracking over unset positions with incremental window checks;
    intended for small domains (roughly n <= 9 at rank 3).
    """
    if family.r != sigma.r:
        raise ValueError("family rank mismatch")
    tables = subset_tables(sigma.n, sigma.r)
    patterns = family.patterns
    states = list(sigma.states)
    if patterns:
        for d, s in enumerate(states):
            if s != UNSET and _conflicts(states, tables, patterns, d):
                return None
    free = [d for d, s in enumerate(states) if s == UNSET]
    if not patterns:
        for d in free:
            states[d] = PLUS
        return PartialSignMapping(sigma.n, sigma.r, states)

    idx = 0
    choice = [0] * len(free)
    while 0 <= idx < len(free):
        d = free[idx]
        advanced = False
        while choice[idx] < len(_BRANCH):
            states[d] = _BRANCH[choice[idx]]
            choice[idx] += 1
            if not _conflicts(states, tables, patterns, d):
                advanced = True
                break
        if advanced:
            idx += 1
        else:
            states[d] = UNSET
            choice[idx] = 0
            idx -= 1
    if idx < 0:
        return None
    return PartialSignMapping(sigma.n, sigma.r, states)


@dataclass
class AssignmentReport:
    assignment: tuple
    expected: bool           # psi(f)
    completable: bool

    @property
    def ok(self) -> bool:
        return self.expected == self.completable


@dataclass
class GadgetReport:
    problem: GadgetProblem
    rows: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(row.ok for row in self.rows)

    def failures(self):
        return [row for row in self.rows if not row.ok]


def verify_gadget(gadget: PartialSignMapping,
                  problem: GadgetProblem) -> GadgetReport:
    """Check the gadget property on every assignment via brute_complete."""
    for pos in problem.variable_positions():
        if gadget.states[pos] != UNSET:
            raise ValueError("variable tuples must be unset in the gadget")
    report = GadgetReport(problem)
    for f in assignments(problem.var_count):
        sigma_f = problem.apply_assignment(gadget, f)
        completable = brute_complete(sigma_f, problem.family) is not None
        report.rows.append(
            AssignmentReport(f, problem.psi_of(f), completable))
    return report


COMPLETABLE = "completable"
INCOMPLETABLE = "incompletable"


def greedy_classify(sigma: PartialSignMapping, family: Family) -> str:
    """Forced-sign propagation to fixpoint, then fill '+' and check avoidance.

    A position is forced when some window has all other positions set
    matching a pattern, so the one remaining sign would realize it.  Opposite
    forcings (or an already realized pattern) end the run as incompletable.
    """
    tables = subset_tables(sigma.n, sigma.r)
    patterns = family.patterns
    states = list(sigma.states)
    if patterns:
        queue = [d for d, s in enumerate(states) if s != UNSET]
        while queue:
            touched = queue
            queue = []
            seen_windows = set()
            for d in touched:
                seen_windows.update(tables.windows_of_pos[d])
            for w in seen_windows:
                positions = tables.windows[w]
                word = [states[p] for p in positions]
                unset = [i for i, s in enumerate(word) if s == UNSET]
                if not unset:
                    if tuple(word) in patterns:
                        return INCOMPLETABLE
                    continue
                if len(unset) != 1:
                    continue
                hole = unset[0]
                for pattern in patterns:
                    if all(word[i] == pattern[i] for i in range(len(word))
                           if i != hole):
                        forced = -pattern[hole]
                        pos = positions[hole]
                        if states[pos] == -forced:
                            return INCOMPLETABLE
                        if states[pos] == UNSET:
                            states[pos] = forced
                            queue.append(pos)
    for d, s in enumerate(states):
        if s == UNSET:
            states[d] = PLUS
    full = PartialSignMapping(sigma.n, sigma.r, states)
    return COMPLETABLE if full.avoids(family) else INCOMPLETABLE


def enumerate_gadgets_exhaustive(problem: GadgetProblem,
                                 budget: int = 3 ** 12):
    """Every candidate mapping passing verify_gadget, by brute iteration.

    Only feasible for tiny domains; the candidate space is 3^(free positions).
    """
    free = [d for d in range(comb(problem.n, problem.r))
            if d not in set(problem.variable_positions())]
    total = 3 ** len(free)
    if total > budget:
        raise ValueError(f"candidate space 3^{len(free)} exceeds budget")
    has_true_row = any(problem.psi)
    out = []
    for combo in itertools.product((UNSET, PLUS, MINUS), repeat=len(free)):
        sigma = PartialSignMapping(problem.n, problem.r)
        for d, s in zip(free, combo):
            sigma.states[d] = s
        if has_true_row and not sigma.avoids(problem.family):
            continue  # cannot be completable on any psi-true row
        if verify_gadget(sigma, problem).ok:
            out.append(sigma)
    return out


class CompletionTable:
    """Exhaustively tabulated completability for one (n, r, family).

    States are encoded base-3 over lex positions (0 unset, 1 '+', 2 '-').
    Feasible up to 3^C(n,r) memo entries, i.e. n = 5 at rank 3.
    """

    _DIGIT = {UNSET: 0, PLUS: 1, MINUS: 2}
    _STATE = (UNSET, PLUS, MINUS)

    def __init__(self, n: int, r: int, family: Family):
        self.n = n
        self.r = r
        self.family = family
        self.size = comb(n, r)
        self.tables = subset_tables(n, r)
        self._powers = [3 ** i for i in range(self.size)]
        self._memo = {}

    def encode(self, sigma: PartialSignMapping) -> int:
        return sum(self._DIGIT[s] * p
                   for s, p in zip(sigma.states, self._powers))

    def decode(self, code: int) -> PartialSignMapping:
        states = []
        for _ in range(self.size):
            code, digit = divmod(code, 3)
            states.append(self._STATE[digit])
        return PartialSignMapping(self.n, self.r, states)

    def completable(self, sigma: PartialSignMapping) -> bool:
        return self._completable_code(self.encode(sigma))

    def _completable_code(self, code: int) -> bool:
        memo = self._memo
        hit = memo.get(code)
        if hit is not None:
            return hit
        states = self.decode(code).states
        first_unset = next((d for d, s in enumerate(states) if s == UNSET), None)
        if first_unset is None:
            result = PartialSignMapping(self.n, self.r, states).avoids(self.family)
        else:
            step = self._powers[first_unset]
            result = (self._completable_code(code + step)
                      or self._completable_code(code + 2 * step))
        memo[code] = result
        return result

    def all_codes(self):
        return range(3 ** self.size)
