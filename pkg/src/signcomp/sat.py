"""CNF model and solver session: incremental solving, assumptions, cardinality.

The session owns a monotone clause store (clauses are added, never removed)
and a pluggable backend.  Every satisfiable answer is re-checked against the
stored clauses and the given assumptions before it is returned, so a buggy
backend can never hand a bad model to the layers above.  Unsatisfiable
answers can be accompanied by a DRAT trace written to a caller-supplied path
for checking with an external tool.
"""

from __future__ import annotations

import io
import time
from dataclasses import dataclass, field

from .cdcl import SAT, TIMEOUT, UNSAT, CdclSolver


class BackendError(RuntimeError):
    """A backend returned a model violating the clause store."""


@dataclass
class SolveResult:
    status: str                 # "sat" | "unsat" | "timeout"
    model: list | None = None   # var-indexed truth values (index 0 unused)

    @property
    def is_sat(self) -> bool:
        return self.status == SAT

    @property
    def is_unsat(self) -> bool:
        return self.status == UNSAT

    @property
    def timed_out(self) -> bool:
        return self.status == TIMEOUT

    def lit_true(self, lit: int) -> bool:
        return self.model[lit] if lit > 0 else not self.model[-lit]


@dataclass
class Cnf:
    var_count: int = 0
    clauses: list = field(default_factory=list)

    def add(self, clause) -> None:
        clause = list(clause)
        for lit in clause:
            if lit == 0:
                raise ValueError("0 is not a literal")
            self.var_count = max(self.var_count, abs(lit))
        self.clauses.append(clause)


class SolverSession:
    """Incremental CNF with add-clause / solve-under-assumptions.

    Owned by one worker at a time; independent sessions may run concurrently.
    """

    def __init__(self, proof_path: str | None = None):
        self._proof_path = proof_path
        self._proof_log = [] if proof_path else None
        self._backend = CdclSolver(proof_log=self._proof_log)
        self.cnf = Cnf()
        self.solve_calls = 0

    @property
    def var_count(self) -> int:
        return max(self.cnf.var_count, self._backend.nvars)

    def new_var(self) -> int:
        v = self._backend.new_var()
        self.cnf.var_count = max(self.cnf.var_count, v)
        return v

    def ensure_vars(self, count: int) -> None:
        self._backend.ensure_var(count)
        self.cnf.var_count = max(self.cnf.var_count, count)

    def add_clause(self, clause) -> None:
        clause = list(clause)
        self.cnf.add(clause)
        self._backend.add_clause(clause)

    def add_clauses(self, clauses) -> None:
        for c in clauses:
            self.add_clause(c)

    def solve(self, assumptions=(), timeout: float | None = None) -> SolveResult:
        self.solve_calls += 1
        deadline = time.monotonic() + timeout if timeout is not None else None
        status, raw = self._backend.solve(assumptions, deadline)
        if status == SAT:
            model = [False] * (self.var_count + 1)
            for v in range(1, len(raw)):
                model[v] = raw[v] == 1
            self._check_model(model, assumptions)
            return SolveResult(SAT, model)
        if status == UNSAT and self._proof_path and self._backend.unsat:
            self._write_proof()
        return SolveResult(status)

    def _check_model(self, model, assumptions) -> None:
        for lit in assumptions:
            if not (model[lit] if lit > 0 else not model[-lit]):
                raise BackendError(f"model violates assumption {lit}")
        for clause in self.cnf.clauses:
            if not any(model[l] if l > 0 else not model[-l] for l in clause):
                raise BackendError(f"model violates clause {clause}")

    def _write_proof(self) -> None:
        with open(self._proof_path, "w") as fh:
            for step in self._proof_log:
                if step and step[0] == "d":
                    fh.write("d " + " ".join(map(str, step[1:])) + " 0\n")
                else:
                    fh.write(" ".join(map(str, step)) + " 0\n")

    def encode_exactly_k(self, variables, k: int) -> None:
        encode_exactly_k(self, variables, k)


def new_session(proof_path: str | None = None) -> SolverSession:
    return SolverSession(proof_path=proof_path)


def encode_exactly_k(session: SolverSession, variables, k: int) -> None:
    """Constrain exactly k of `variables` to be true via a sequential counter.

    Adds O(k * len(variables)) auxiliary variables and clauses.  The i-th
    counter layer tracks "at least j+1 of the first i+1 inputs are true".
    """
    variables = list(variables)
    n = len(variables)
    if not 0 <= k <= n:
        raise ValueError(f"k={k} out of range for {n} variables")
    if k == 0:
        for x in variables:
            session.add_clause([-x])
        return
    count = [[0] * k for _ in range(n)]
    count[0][0] = variables[0]
    for j in range(1, k):
        count[0][j] = session.new_var()
        session.add_clause([-count[0][j]])
    for i in range(n - 1):
        x = variables[i + 1]
        for j in range(k):
            count[i + 1][j] = session.new_var()
        session.add_clause([-x, count[i + 1][0]])
        for j in range(k):
            session.add_clause([-count[i][j], count[i + 1][j]])
            session.add_clause([count[i][j], x, -count[i + 1][j]])
            if j + 1 < k:
                session.add_clause([-count[i][j], -x, count[i + 1][j + 1]])
                session.add_clause([count[i][j], -count[i + 1][j + 1]])
        # cap: once k inputs are true, no further input may be true
        session.add_clause([-count[i][k - 1], -x])
    session.add_clause([count[n - 1][k - 1]])


def export_dimacs(cnf: Cnf) -> str:
    out = io.StringIO()
    out.write(f"p cnf {cnf.var_count} {len(cnf.clauses)}\n")
    for clause in cnf.clauses:
        out.write(" ".join(map(str, clause)) + " 0\n")
    return out.getvalue()


def parse_dimacs(text: str) -> Cnf:
    cnf = Cnf()
    declared_vars = None
    pending = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line: {line!r}")
            declared_vars = int(parts[2])
            continue
        pending.extend(int(tok) for tok in line.split())
    clause = []
    for lit in pending:
        if lit == 0:
            cnf.add(clause)
            clause = []
        else:
            clause.append(lit)
    if clause:
        raise ValueError("trailing clause without 0 terminator")
    if declared_vars is not None:
        cnf.var_count = max(cnf.var_count, declared_vars)
    return cnf


def enumerate_models(session: SolverSession, projection, limit: int | None = None,
                     timeout: float | None = None):
    """Yield models projected onto `projection`, blocking each before the next.

    Blocking clauses mention only the projection variables, so auxiliary
    variables never multiply the count.  The session is permanently narrowed.
    """
    seen = 0
    while limit is None or seen < limit:
        res = session.solve(timeout=timeout)
        if not res.is_sat:
            return
        values = {v: res.model[v] for v in projection}
        yield values
        seen += 1
        session.add_clause([-v if values[v] else v for v in projection])
