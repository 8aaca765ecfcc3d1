"""CNF layers for the gadget search: candidate enumeration and completability.

The candidate layer has three indicator variables per r-subset (one per sign
state) under an exactly-one constraint; variable subsets are pinned to '?'
and every fully realized forbidden pattern is excluded, since such a
candidate could not be completable for any assignment.  The completability
layer has one Boolean sign variable per r-subset (true = '+') and one clause
per (window, pattern) pair ruling the pattern out.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .core import MINUS, PLUS, UNSET, PartialSignMapping, subset_tables
from .patterns import Family
from .problems import GadgetProblem
from .sat import BackendError, SolverSession, new_session

_STATE_SLOT = {PLUS: 0, MINUS: 1, UNSET: 2}


@dataclass(frozen=True)
class CandidateEncoding:
    """Indicator layout: position d, state s -> variable 3*d + slot(s) + 1."""

    n: int
    r: int

    def var(self, position: int, state: int) -> int:
        return 3 * position + _STATE_SLOT[state] + 1

    @property
    def var_total(self) -> int:
        return 3 * comb(self.n, self.r)


@dataclass(frozen=True)
class CompletionEncoding:
    """Sign layout: position d -> variable d + 1, true meaning '+'."""

    n: int
    r: int

    def var(self, position: int) -> int:
        return position + 1

    def lit(self, position: int, sign: int) -> int:
        return position + 1 if sign == PLUS else -(position + 1)

    @property
    def var_total(self) -> int:
        return comb(self.n, self.r)


def build_candidate_cnf(problem: GadgetProblem,
                        proof_path: str | None = None):
    """Session enumerating candidate partial mappings for the problem."""
    enc = CandidateEncoding(problem.n, problem.r)
    session = new_session(proof_path=proof_path)
    tables = subset_tables(problem.n, problem.r)
    for d in range(tables.size):
        xp, xm, xq = (enc.var(d, s) for s in (PLUS, MINUS, UNSET))
        session.add_clause([xp, xm, xq])
        session.add_clause([-xp, -xm])
        session.add_clause([-xp, -xq])
        session.add_clause([-xm, -xq])
    for pos in problem.variable_positions():
        session.add_clause([enc.var(pos, UNSET)])
    for positions in tables.windows:
        for pattern in problem.family.sorted_patterns():
            session.add_clause(
                [-enc.var(d, w) for d, w in zip(positions, pattern)])
    return session, enc


def decode_candidate(model, enc: CandidateEncoding) -> PartialSignMapping:
    sigma = PartialSignMapping(enc.n, enc.r)
    for d in range(comb(enc.n, enc.r)):
        states = [s for s in (PLUS, MINUS, UNSET) if model[enc.var(d, s)]]
        if len(states) != 1:
            raise BackendError(f"indicator triple for position {d} is not "
                               f"exactly-one in the model")
        sigma.states[d] = states[0]
    return sigma


def avoidance_clauses(n: int, r: int, family: Family, enc: CompletionEncoding):
    """One clause per (window, pattern): some position differs from the pattern."""
    for positions in subset_tables(n, r).windows:
        for pattern in family.sorted_patterns():
            yield [enc.lit(d, -w) for d, w in zip(positions, pattern)]


def build_completion_base(n: int, r: int, family: Family):
    """Completability CNF without presets; pin entries via unit assumptions."""
    enc = CompletionEncoding(n, r)
    session = new_session()
    session.ensure_vars(enc.var_total)
    for clause in avoidance_clauses(n, r, family, enc):
        session.add_clause(clause)
    return session, enc


def completion_assumptions(sigma: PartialSignMapping, enc: CompletionEncoding):
    return [enc.lit(d, s) for d, s in enumerate(sigma.states) if s != UNSET]


def build_completion_cnf(sigma: PartialSignMapping, family: Family,
                         proof_path: str | None = None):
    """Sat iff sigma has a family-avoiding completion; model decodes to one."""
    enc = CompletionEncoding(sigma.n, sigma.r)
    session = new_session(proof_path=proof_path)
    session.ensure_vars(enc.var_total)
    for clause in avoidance_clauses(sigma.n, sigma.r, family, enc):
        session.add_clause(clause)
    for d, s in enumerate(sigma.states):
        if s != UNSET:
            session.add_clause([enc.lit(d, s)])
    return session, enc


def decode_completion(model, enc: CompletionEncoding) -> PartialSignMapping:
    sigma = PartialSignMapping(enc.n, enc.r)
    for d in range(enc.var_total):
        sigma.states[d] = PLUS if model[enc.var(d)] else MINUS
    return sigma


def verify_gadget_sat(gadget: PartialSignMapping, problem: GadgetProblem):
    """Gadget check through the completability CNF instead of the oracle.

    Used where brute-force completion is too slow; reports the same
    per-assignment structure as the oracle verifier.
    """
    from .oracle import AssignmentReport, GadgetReport
    from .problems import assignments

    for pos in problem.variable_positions():
        if gadget.states[pos] != UNSET:
            raise ValueError("variable tuples must be unset in the gadget")
    session, enc = build_completion_base(problem.n, problem.r, problem.family)
    report = GadgetReport(problem)
    for f in assignments(problem.var_count):
        sigma_f = problem.apply_assignment(gadget, f)
        res = session.solve(assumptions=completion_assumptions(sigma_f, enc))
        report.rows.append(
            AssignmentReport(f, problem.psi_of(f), res.is_sat))
    return report


def upset_exclusion_clause(sigma_prime: PartialSignMapping,
                           enc: CandidateEncoding):
    """Clause violated exactly by the candidates extending sigma_prime.

    An empty result (no set entries) empties the candidate space, signalling
    that no gadget exists on this branch at this size.
    """
    return [-enc.var(d, s) for d, s in enumerate(sigma_prime.states)
            if s != UNSET]


def downset_exclusion_clause(sigma_prime: PartialSignMapping,
                             enc: CandidateEncoding, variable_tuples):
    """Clause violated exactly by the candidates that sigma_prime extends."""
    tables = subset_tables(sigma_prime.n, sigma_prime.r)
    var_positions = {tables.rank[tuple(t)] for t in variable_tuples}
    clause = []
    for d, s in enumerate(sigma_prime.states):
        if s != UNSET:
            clause.append(enc.var(d, -s))
        elif d not in var_positions:
            clause.append(-enc.var(d, UNSET))
    return clause
