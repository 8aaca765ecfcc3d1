"""The gadget-finding loop: enumerate candidates, test, prune, certify.

A SAT session enumerates candidate partial mappings (variable subsets pinned
unset).  For each candidate and each assignment f to the variables, a second
SAT layer decides whether the candidate extended by f is completable.  A
candidate that is not completable on a psi-true branch is "too strict": its
whole up-set can never recover, so it is excluded.  A candidate completable
on a psi-false branch is "too loose": everything below it stays completable,
so its down-set is excluded.  The advanced variant first minimizes the
too-strict witness (and maximizes the too-loose one to a full completion),
pruning far larger portions of the lattice per conflict; the basic variant
excludes the candidate's own up-/down-set.

Every reported gadget is re-verified by the brute-force oracle first.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from .core import MINUS, PLUS, UNSET, PartialSignMapping, subset_tables
from .encode import (CandidateEncoding, build_candidate_cnf,
                     build_completion_base, decode_candidate,
                     downset_exclusion_clause, upset_exclusion_clause)
from .gadgets import Gadget
from .problems import GadgetProblem, assignments
from .sat import new_session
from . import oracle

BASIC = "basic"
ADVANCED = "advanced"

FOUND = "found"
NO_GADGET = "no-gadget"
TIMEOUT = "timeout"

COMPLETABLE = "completable"
NOT_COMPLETABLE = "not-completable"


class SearchTimeout(Exception):
    pass


class InconsistentSearch(RuntimeError):
    """A found candidate failed independent oracle verification."""


@dataclass
class SearchStats:
    up_prunings: int = 0
    down_prunings: int = 0
    solver_calls: int = 0
    candidates: int = 0
    elapsed: float = 0.0

    def as_dict(self) -> dict:
        return {"up": self.up_prunings, "down": self.down_prunings,
                "calls": self.solver_calls, "candidates": self.candidates,
                "elapsed": round(self.elapsed, 4)}


@dataclass
class SearchOutcome:
    status: str                  # found | no-gadget | timeout
    gadget: Gadget | None
    stats: SearchStats
    problem: GadgetProblem

    @property
    def found(self) -> bool:
        return self.status == FOUND


class GadgetSearch:
    """One run of the gadget-finding loop over a fixed problem and size."""

    def __init__(self, problem: GadgetProblem, variant: str = ADVANCED,
                 timeout: float | None = None, shrink_mode: str = "greedy",
                 subset_probe_cap: int = 256):
        if variant not in (BASIC, ADVANCED):
            raise ValueError(f"unknown variant {variant!r}")
        if shrink_mode not in ("greedy", "cardinality"):
            raise ValueError(f"unknown shrink mode {shrink_mode!r}")
        self.problem = problem
        self.variant = variant
        self.shrink_mode = shrink_mode
        self.subset_probe_cap = subset_probe_cap
        self.stats = SearchStats()
        self.deadline = time.monotonic() + timeout if timeout else None
        self.cand_session, self.cand_enc = build_candidate_cnf(problem)
        self.comp_session, self.comp_enc = build_completion_base(
            problem.n, problem.r, problem.family)
        self.var_positions = problem.variable_positions()
        self._var_set = set(self.var_positions)
        self._assignment_list = list(assignments(problem.var_count))
        self._last_model = None

    # -- plumbing ------------------------------------------------------------

    def _budget(self) -> float | None:
        if self.deadline is None:
            return None
        remaining = self.deadline - time.monotonic()
        if remaining <= 0:
            raise SearchTimeout
        return remaining

    def _f_literals(self, f):
        enc = self.comp_enc
        return [enc.lit(pos, s) for pos, s in zip(self.var_positions, f)]

    def _completable(self, entry_list, f) -> bool:
        """SAT-test whether the mapping given by entries plus f completes."""
        enc = self.comp_enc
        assumptions = [enc.lit(d, s) for d, s in entry_list]
        assumptions += self._f_literals(f)
        res = self.comp_session.solve(assumptions=assumptions,
                                      timeout=self._budget())
        self.stats.solver_calls += 1
        if res.timed_out:
            raise SearchTimeout
        self._last_model = res.model
        return res.is_sat

    # -- spec operations ------------------------------------------------------

    def check_assignment(self, sigma: PartialSignMapping, f) -> str:
        """Completability verdict for sigma_f (variable tuples unset in sigma)."""
        entry_list = [(d, s) for d, s in enumerate(sigma.states) if s != UNSET]
        ok = self._completable(entry_list, f)
        return COMPLETABLE if ok else NOT_COMPLETABLE

    def shrink_too_strict(self, sigma: PartialSignMapping, f) -> PartialSignMapping:
        entry_list = [(d, s) for d, s in enumerate(sigma.states) if s != UNSET]
        kept = self._shrink(entry_list, f)
        out = PartialSignMapping(self.problem.n, self.problem.r)
        for d, s in kept:
            out.states[d] = s
        return out

    def grow_too_loose(self, sigma: PartialSignMapping, f) -> PartialSignMapping:
        entry_list = [(d, s) for d, s in enumerate(sigma.states) if s != UNSET]
        if not self._completable(entry_list, f):
            raise ValueError("sigma_f is not completable")
        return self._grown_from_model()

    # -- internals --------------------------------------------------------------

    def _shrink(self, entry_list, f):
        if self.shrink_mode == "cardinality":
            return self._shrink_cardinality(entry_list, f)
        kept = list(entry_list)
        i = 0
        while i < len(kept):
            trial = kept[:i] + kept[i + 1:]
            if not self._completable(trial, f):
                kept = trial
            else:
                i += 1
        return kept

    def _shrink_cardinality(self, entry_list, f):
        """Search for ever-smaller too-strict subsets with an exactly-k counter."""
        current = list(entry_list)
        while len(current) > 1:
            smaller = self._probe_subsets(current, f, len(current) - 1)
            if smaller is None:
                break
            current = smaller
        return current

    def _probe_subsets(self, entry_list, f, k):
        selector = new_session()
        y = [selector.new_var() for _ in entry_list]
        selector.encode_exactly_k(y, k)
        probes = 0
        while probes < self.subset_probe_cap:
            res = selector.solve(timeout=self._budget())
            self.stats.solver_calls += 1
            if res.timed_out:
                raise SearchTimeout
            if not res.is_sat:
                return None
            chosen = [entry_list[i] for i, v in enumerate(y) if res.model[v]]
            probes += 1
            if not self._completable(chosen, f):
                return chosen
            selector.add_clause(
                [-v if res.model[v] else v for v in y])
        return None

    def _grown_from_model(self) -> PartialSignMapping:
        model = self._last_model
        out = PartialSignMapping(self.problem.n, self.problem.r)
        enc = self.comp_enc
        for d in range(enc.var_total):
            if d not in self._var_set:
                out.states[d] = PLUS if model[enc.var(d)] else MINUS
        return out

    # -- main loop ---------------------------------------------------------------

    def run(self) -> SearchOutcome:
        start = time.monotonic()
        try:
            outcome = self._run_loop()
        except SearchTimeout:
            outcome = SearchOutcome(TIMEOUT, None, self.stats, self.problem)
        self.stats.elapsed = time.monotonic() - start
        return outcome

    def _run_loop(self) -> SearchOutcome:
        problem = self.problem
        enc = self.cand_enc
        while True:
            res = self.cand_session.solve(timeout=self._budget())
            self.stats.solver_calls += 1
            if res.timed_out:
                raise SearchTimeout
            if res.is_unsat:
                return SearchOutcome(NO_GADGET, None, self.stats, problem)
            sigma = decode_candidate(res.model, enc)
            self.stats.candidates += 1
            entry_list = [(d, s) for d, s in enumerate(sigma.states)
                          if s != UNSET]
            valid = True
            for f in self._assignment_list:
                completable = self._completable(entry_list, f)
                if problem.psi_of(f) and not completable:
                    valid = False
                    self.stats.up_prunings += 1
                    if self.variant == ADVANCED:
                        witness_entries = self._shrink(entry_list, f)
                        witness = PartialSignMapping(problem.n, problem.r)
                        for d, s in witness_entries:
                            witness.states[d] = s
                    else:
                        witness = sigma
                    self.cand_session.add_clause(
                        upset_exclusion_clause(witness, enc))
                elif not problem.psi_of(f) and completable:
                    valid = False
                    self.stats.down_prunings += 1
                    if self.variant == ADVANCED:
                        witness = self._grown_from_model()
                    else:
                        witness = sigma
                    self.cand_session.add_clause(
                        downset_exclusion_clause(witness, enc,
                                                 problem.variable_tuples))
            if valid:
                report = oracle.verify_gadget(sigma, problem)
                if not report.ok:
                    raise InconsistentSearch(
                        f"candidate {sigma.word()} passed the SAT layer but "
                        f"failed oracle verification")
                kind = "propagator" if problem.var_count == 2 else "clause"
                gadget = Gadget(problem, sigma, kind)
                return SearchOutcome(FOUND, gadget, self.stats, problem)


def find_gadget(problem: GadgetProblem, variant: str = ADVANCED,
                timeout: float | None = None,
                shrink_mode: str = "greedy") -> SearchOutcome:
    return GadgetSearch(problem, variant=variant, timeout=timeout,
                        shrink_mode=shrink_mode).run()


@dataclass
class LadderRecord:
    n: int
    outcome: SearchOutcome


@dataclass
class LadderResult:
    records: list = field(default_factory=list)

    @property
    def best(self) -> SearchOutcome | None:
        for rec in self.records:
            if rec.outcome.found:
                return rec.outcome
        return None

    @property
    def timed_out(self) -> bool:
        return any(rec.outcome.status == TIMEOUT for rec in self.records)

    def total_elapsed(self) -> float:
        return sum(rec.outcome.stats.elapsed for rec in self.records)


def search_size_ladder(problem_builder, n_min: int, n_max: int,
                       variant: str = ADVANCED,
                       per_size_timeout: float | None = None,
                       shrink_mode: str = "greedy",
                       observer=None) -> LadderResult:
    """Try sizes n_min..n_max in order, stopping at the first Found.

    `problem_builder(n)` returns the GadgetProblem for size n, or None to
    skip that size.  Timeouts are recorded per size and do not stop the
    ladder.
    """
    result = LadderResult()
    for n in range(n_min, n_max + 1):
        problem = problem_builder(n)
        if problem is None:
            continue
        outcome = find_gadget(problem, variant=variant,
                              timeout=per_size_timeout,
                              shrink_mode=shrink_mode)
        result.records.append(LadderRecord(n, outcome))
        if observer is not None:
            observer(n, outcome)
        if outcome.found:
            break
    return result
