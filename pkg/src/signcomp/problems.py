"""Gadget search problems: variable windows, truth tables, assignments.

A gadget problem fixes a domain size n, a rank r, a forbidden family, an
ordered list of pairwise distinct "variable" r-subsets, and a truth table
psi over sign assignments to those variables.  A partial mapping with the
variable subsets unset is a gadget for the problem when, for every
assignment f, setting the variable subsets to f yields a completable mapping
exactly when psi(f) holds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

from .core import MINUS, PLUS, PartialSignMapping, lex_rank, sign_char
from .patterns import Family


def assignments(k: int):
    """All sign assignments to k variables, lexicographic with '+' first."""
    return itertools.product((PLUS, MINUS), repeat=k)


def assignment_index(f) -> int:
    idx = 0
    for s in f:
        idx = (idx << 1) | (s == MINUS)
    return idx


def assignment_text(f) -> str:
    return "".join(sign_char(s) for s in f)


@dataclass(frozen=True)
class GadgetProblem:
    n: int
    r: int
    family: Family
    variable_tuples: tuple       # ordered, pairwise distinct r-subsets
    psi: tuple                   # truth table indexed by assignment_index
    name: str = ""

    def __post_init__(self):
        if len(set(self.variable_tuples)) != len(self.variable_tuples):
            raise ValueError("variable tuples must be pairwise distinct")
        for t in self.variable_tuples:
            lex_rank(t, self.n, self.r)
        if len(self.psi) != 1 << len(self.variable_tuples):
            raise ValueError("psi must cover all assignments")
        if self.family.r != self.r:
            raise ValueError("family rank mismatch")

    @property
    def var_count(self) -> int:
        return len(self.variable_tuples)

    def psi_of(self, f) -> bool:
        return self.psi[assignment_index(f)]

    def variable_positions(self):
        return tuple(lex_rank(t, self.n, self.r) for t in self.variable_tuples)

    def free_position_count(self) -> int:
        return comb(self.n, self.r) - self.var_count

    def apply_assignment(self, sigma: PartialSignMapping, f) -> PartialSignMapping:
        """The mapping sigma_f: sigma with the variable subsets set to f."""
        out = sigma.copy()
        for t, s in zip(self.variable_tuples, f):
            i = lex_rank(t, self.n, self.r)
            if out.states[i] != 0:
                raise ValueError(f"variable tuple {t} already set in sigma")
            out.states[i] = s
        return out


def window(start: int, r: int):
    return tuple(range(start, start + r))


def propagator_problem(n: int, r: int, family: Family, s1: int, s2: int,
                       starts=None, name: str = "") -> GadgetProblem:
    """Two-variable disjunction gadget: completable iff X1 = s1 or X2 = s2.

    X1 and X2 are consecutive r-windows at the given start positions
    (defaulting to the two extremes of [1, n]).  Read as a propagator both
    ways: X2 = -s2 forces X1 = s1, and X1 = -s1 forces X2 = s2 in every
    completion.
    """
    if n < r + 1:
        raise ValueError("windows must be distinct")
    if starts is None:
        starts = (1, n - r + 1)
    p, q = starts
    if not (1 <= p < q and q + r - 1 <= n):
        raise ValueError(f"bad window starts {starts} for n={n}")
    psi = tuple(f[0] == s1 or f[1] == s2 for f in assignments(2))
    return GadgetProblem(
        n, r, family, (window(p, r), window(q, r)), psi,
        name or f"PG[{sign_char(s1)}{sign_char(s2)}]@{n}:{p},{q}")


def clause_problem(n: int, r: int, family: Family, signs,
                   starts=None, name: str = "") -> GadgetProblem:
    """Three-literal clause gadget: completable iff some X_j carries signs[j].

    By default the windows are the three consecutive r-windows of [1, r+2];
    other window start positions may be supplied for larger domains.
    """
    signs = tuple(signs)
    if len(signs) != 3:
        raise ValueError("need exactly three literal signs")
    if starts is None:
        if n != r + 2:
            raise ValueError(f"default windows need n = r+2, got n={n}")
        starts = (1, 2, 3)
    starts = tuple(starts)
    if not (len(starts) == 3 and starts[0] < starts[1] < starts[2]
            and starts[2] + r - 1 <= n):
        raise ValueError(f"bad window starts {starts} for n={n}")
    windows = tuple(window(p, r) for p in starts)
    psi = tuple(any(fj == sj for fj, sj in zip(f, signs))
                for f in assignments(3))
    sig = "".join(sign_char(s) for s in signs)
    return GadgetProblem(n, r, family, windows, psi,
                         name or f"CG[{sig}]@{n}:{','.join(map(str, starts))}")
