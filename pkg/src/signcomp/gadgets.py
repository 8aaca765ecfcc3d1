"""Closed-form gadget constructions, gadget composition, and gadget files.

The generalized-signotope constructions (rank 3, family {+-+-, -+-+}) are the
worked set: a five-element clause gadget, the four-element same-sign
propagators, the five-element negating propagators, and six-element
propagators composed from them by chaining over sliding windows.  The even
ranks get an alternating-pattern family with propagators on r+1 elements and
a clause gadget on r+2 elements.

Every constructor verifies its output against the completability oracle (or
the SAT layer when the domain is too large for brute force) before returning
it, and loading a gadget file re-verifies, so gadget correctness never rests
on file trust.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from .core import MINUS, PLUS, UNSET, PartialSignMapping, sign_char, sign_of_char
from .patterns import Family
from .problems import GadgetProblem, clause_problem, propagator_problem, window
from . import oracle

FILE_MAGIC = "signcomp gadget"
FILE_VERSION = 1

# Above this many free positions, verification switches to the SAT layer.
ORACLE_FREE_LIMIT = 14


class GadgetError(ValueError):
    """Malformed, inconsistent, or failed-verification gadget."""


@dataclass(frozen=True)
class Placement:
    """A component gadget at a 1-based element offset inside a larger domain."""

    gadget: "Gadget"
    offset: int

    @property
    def span(self):
        return range(self.offset, self.offset + self.gadget.n)


@dataclass
class Gadget:
    problem: GadgetProblem
    entries: PartialSignMapping
    kind: str                     # "propagator" | "clause" | "composed"
    components: tuple = field(default_factory=tuple)   # Placements, for composed

    @property
    def n(self) -> int:
        return self.problem.n

    @property
    def r(self) -> int:
        return self.problem.r

    @property
    def family(self) -> Family:
        return self.problem.family

    @property
    def variable_tuples(self):
        return self.problem.variable_tuples

    def entry_count(self) -> int:
        return self.entries.set_count()

    def verify(self) -> None:
        """Re-check the gadget property; raises GadgetError on failure."""
        if not self.entries.avoids(self.family):
            raise GadgetError("gadget entries realize a forbidden pattern")
        free = (self.entries.states.count(UNSET)
                - self.problem.var_count)
        if free <= ORACLE_FREE_LIMIT:
            report = oracle.verify_gadget(self.entries, self.problem)
        else:
            from .encode import verify_gadget_sat
            report = verify_gadget_sat(self.entries, self.problem)
        if not report.ok:
            rows = ", ".join(
                f"{''.join(sign_char(s) for s in row.assignment)}"
                for row in report.failures())
            raise GadgetError(f"gadget property fails on assignments: {rows}")


def _checked(gadget: Gadget) -> Gadget:
    gadget.verify()
    return gadget


# -- generalized signotopes (rank 3) ------------------------------------------

def gs_family() -> Family:
    return Family.from_text("+-+-,-+-+")


def gs_clause() -> Gadget:
    """Five-element clause gadget, completable iff X1=+ or X2=- or X3=+."""
    entries = PartialSignMapping.from_entries(5, 3, [
        ((1, 2, 4), PLUS), ((1, 2, 5), MINUS), ((1, 3, 5), MINUS),
        ((1, 4, 5), PLUS), ((2, 3, 5), PLUS), ((2, 4, 5), PLUS),
    ])
    problem = clause_problem(5, 3, gs_family(), (PLUS, MINUS, PLUS))
    return _checked(Gadget(problem, entries, "clause"))


def gs_propagator(sign: int) -> Gadget:
    """Four-element propagator: (2,3,4)=sign forces (1,2,3)=sign."""
    entries = PartialSignMapping.from_entries(4, 3, [
        ((1, 2, 4), sign), ((1, 3, 4), -sign),
    ])
    problem = propagator_problem(4, 3, gs_family(), sign, -sign)
    return _checked(Gadget(problem, entries, "propagator"))


def gs_negator(trigger: int) -> Gadget:
    """Five-element negating propagator: (3,4,5)=trigger forces (1,2,3)=-trigger."""
    base = [
        ((1, 2, 4), PLUS), ((1, 2, 5), MINUS), ((1, 3, 5), MINUS),
        ((1, 4, 5), PLUS), ((2, 3, 4), PLUS), ((2, 3, 5), PLUS),
        ((2, 4, 5), PLUS),
    ]
    if trigger == MINUS:
        entries = PartialSignMapping.from_entries(5, 3, base)
    else:
        entries = PartialSignMapping.from_entries(
            5, 3, [(t, -s) for t, s in base])
    problem = propagator_problem(5, 3, gs_family(), -trigger, -trigger)
    return _checked(Gadget(problem, entries, "propagator"))


def compose_chain(components, n: int, problem: GadgetProblem) -> Gadget:
    """Union the entries of offset components into one verified gadget.

    Component windows must agree on shared tuples; the union must leave the
    problem's variable tuples unset.
    """
    placements = tuple(Placement(g, off) for g, off in components)
    entries = PartialSignMapping(n, problem.r)
    for placement in placements:
        g, off = placement.gadget, placement.offset
        if off < 1 or off + g.n - 1 > n:
            raise GadgetError(f"component at offset {off} exceeds [1, {n}]")
        for subset, sign in g.entries.entries():
            shifted = tuple(x + off - 1 for x in subset)
            try:
                entries.set(shifted, sign)
            except ValueError:
                raise GadgetError(
                    f"components disagree on tuple {shifted}") from None
    for t in problem.variable_tuples:
        if entries.get(t) != UNSET:
            raise GadgetError(f"variable tuple {t} is set by a component")
    return _checked(Gadget(problem, entries, "composed", placements))


def gs_composed(trigger: int, forced: int) -> Gadget:
    """Six-element propagator: (4,5,6)=trigger forces (1,2,3)=forced.

    Same-sign propagation chains three of the small propagators over the
    sliding windows; sign-flipping propagation chains a negator with one
    small propagator.
    """
    if trigger == forced:
        parts = [(gs_propagator(trigger), off) for off in (1, 2, 3)]
    else:
        parts = [(gs_propagator(forced), 1), (gs_negator(trigger), 2)]
    problem = propagator_problem(6, 3, gs_family(), forced, -trigger)
    return compose_chain(parts, 6, problem)


# -- even ranks ---------------------------------------------------------------

def alternating_family(r: int) -> Family:
    """The two alternating sign patterns of length r+1."""
    a = tuple(PLUS if i % 2 == 0 else MINUS for i in range(r + 1))
    return Family(r, [a, tuple(-s for s in a)])


def _check_even_rank(r: int) -> None:
    if r < 4 or r % 2:
        raise ValueError(f"rank must be even and >= 4, got {r}")


def even_rank_propagator(r: int, trigger: int) -> Gadget:
    """(r+1)-element propagator for the alternating family.

    trigger=-: the last r-window being '-' forces the first to '+';
    trigger=+: forces '-'.  The r-tuple omitting the i-th element gets
    (-1)^i (resp. its negation) for i = 2..r.
    """
    _check_even_rank(r)
    n = r + 1
    flip = 1 if trigger == MINUS else -1
    entries = PartialSignMapping.from_entries(n, r, [
        (tuple(e for e in range(1, n + 1) if e != i),
         flip * (PLUS if i % 2 == 0 else MINUS))
        for i in range(2, r + 1)
    ])
    problem = propagator_problem(n, r, alternating_family(r),
                                 -trigger, -trigger)
    return _checked(Gadget(problem, entries, "propagator"))


def even_rank_clause(r: int) -> Gadget:
    """(r+2)-element clause gadget, completable iff some r-window is '+'.

    Four sign rules, each on a disjoint set of r-tuples (asserted):
      1. omit c_i from {c_1..c_r, c_{r+2}}:        (-1)^i,     i = 2..r
      2. omit c_i from {c_2..c_{r+2}}:             (-1)^(i-1), i = 3..r
      3. omit c_i from {c_1..c_{r+1}}:             (-1)^i,     i = 2..r-1
      4. {c_1..c_{r-1}, c_{r+1}}:                  '-'
    """
    _check_even_rank(r)
    n = r + 2
    sign = lambda k: PLUS if k % 2 == 0 else MINUS
    rules = []
    for i in range(2, r + 1):
        base = [e for e in range(1, r + 1) if e != i] + [r + 2]
        rules.append((tuple(base), sign(i)))
    for i in range(3, r + 1):
        base = [e for e in range(2, r + 3) if e != i]
        rules.append((tuple(base), sign(i - 1)))
    for i in range(2, r):
        base = [e for e in range(1, r + 2) if e != i]
        rules.append((tuple(base), sign(i)))
    rules.append((tuple(list(range(1, r)) + [r + 1]), MINUS))
    if len({t for t, _ in rules}) != len(rules):
        raise GadgetError("sign rules overlap")
    assert len(rules) == 3 * r - 4
    entries = PartialSignMapping.from_entries(n, r, rules)
    problem = clause_problem(n, r, alternating_family(r), (PLUS, PLUS, PLUS))
    return _checked(Gadget(problem, entries, "clause"))


# -- serialization ------------------------------------------------------------

def _kind_header(gadget: Gadget) -> list:
    prob = gadget.problem
    lines = [f"kind: {gadget.kind}"]
    if len(prob.variable_tuples) == 2:
        # recover the disjunction signs from the truth table
        signs = [(a, b) for a in (PLUS, MINUS) for b in (PLUS, MINUS)
                 if tuple(f[0] == a or f[1] == b
                          for f in _all_assignments(2)) == prob.psi]
        if not signs:
            raise GadgetError("two-variable gadget is not a disjunction")
        a, b = signs[0]
        lines.append(f"signs: {sign_char(a)},{sign_char(b)}")
    else:
        signs = [(a, b, c) for a in (PLUS, MINUS) for b in (PLUS, MINUS)
                 for c in (PLUS, MINUS)
                 if tuple(any(x == y for x, y in zip(f, (a, b, c)))
                          for f in _all_assignments(3)) == prob.psi]
        if not signs:
            raise GadgetError("three-variable gadget is not a clause")
        lines.append(f"signs: {','.join(sign_char(s) for s in signs[0])}")
    return lines


def _all_assignments(k: int):
    from .problems import assignments
    return list(assignments(k))


def render_gadget(gadget: Gadget) -> str:
    prob = gadget.problem
    lines = [f"{FILE_MAGIC} format {FILE_VERSION}"]
    lines += _kind_header(gadget)
    lines.append(f"rank: {prob.r}")
    lines.append(f"elements: {prob.n}")
    lines.append(f"family: {prob.family.text()}")
    for i, t in enumerate(prob.variable_tuples, start=1):
        lines.append(f"window: x{i} {','.join(map(str, t))}")
    for placement in gadget.components:
        lines.append(f"component: offset={placement.offset} "
                     f"elements={placement.gadget.n}")
    for subset, sign in gadget.entries.entries():
        lines.append(f"entry: {','.join(map(str, subset))} {sign_char(sign)}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def save_gadget(gadget: Gadget, path) -> None:
    with open(path, "w") as fh:
        fh.write(render_gadget(gadget))


def parse_gadget(text: str) -> Gadget:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith(FILE_MAGIC):
        raise GadgetError("not a gadget file")
    version = lines[0].rsplit(" ", 1)[-1]
    if version != str(FILE_VERSION):
        raise GadgetError(f"unsupported gadget format version {version!r}")
    fields = {}
    windows = []
    entry_lines = []
    for ln in lines[1:]:
        if ln == "end":
            break
        key, _, value = ln.partition(":")
        key, value = key.strip(), value.strip()
        if key == "window":
            windows.append(value.split()[-1])
        elif key == "entry":
            entry_lines.append(value)
        elif key != "component":
            fields[key] = value
    try:
        r = int(fields["rank"])
        n = int(fields["elements"])
        kind = fields["kind"]
        signs = tuple(sign_of_char(c) for c in fields["signs"].split(","))
        family = Family.from_text(fields.get("family", ""), r)
    except (KeyError, ValueError) as exc:
        raise GadgetError(f"malformed gadget file: {exc}") from None
    if kind in ("propagator", "composed"):
        if len(signs) != 2:
            raise GadgetError("propagator needs two signs")
        problem = propagator_problem(n, r, family, *signs)
    elif kind == "clause":
        if len(signs) != 3:
            raise GadgetError("clause needs three signs")
        starts = [int(w.split(",")[0]) for w in windows]
        problem = clause_problem(n, r, family, signs, starts=starts)
    else:
        raise GadgetError(f"unknown gadget kind {kind!r}")
    declared = tuple(tuple(int(x) for x in w.split(",")) for w in windows)
    if declared and declared != problem.variable_tuples:
        raise GadgetError(f"windows {declared} do not match the expected "
                          f"{problem.variable_tuples}")
    entries = []
    for ln in entry_lines:
        subset_text, sign_text = ln.rsplit(" ", 1)
        entries.append((tuple(int(x) for x in subset_text.split(",")),
                        sign_of_char(sign_text)))
    mapping = PartialSignMapping.from_entries(n, r, entries)
    return _checked(Gadget(problem, mapping, kind))


def load_gadget(path) -> Gadget:
    with open(path) as fh:
        return parse_gadget(fh.read())
