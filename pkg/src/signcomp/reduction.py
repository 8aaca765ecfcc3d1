"""3SAT-to-completion reduction: scenario selection, layout, and deciding.

A formula on n variables with m clauses becomes a partial sign mapping: each
variable gets a block of r consecutive elements, each clause a block hosting
a clause gadget whose three r-windows carry the literals, and each literal
occurrence gets a propagator bridge forcing the variable block's sign
whenever the literal window carries its trigger sign.  Bridges are chained
from the library's propagator gadgets over sliding windows, with dedicated
padding elements between the variable and clause regions when the chain
needs more room.  The assembled instance is completable exactly when the
formula is satisfiable.

Five scenarios pair the available propagator types with a clause-gadget
polarity and a placement side for the variable blocks; they are tried in
order and the first that closes is used.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .core import (MINUS, PLUS, UNSET, PartialSignMapping, sign_char,
                   sign_of_char, subset_tables)
from .encode import build_completion_cnf, decode_completion
from .gadgets import (Gadget, GadgetError, compose_chain, load_gadget,
                      render_gadget)
from .patterns import Family, combination_lemma_applies
from .problems import GadgetProblem, propagator_problem

INSTANCE_MAGIC = "signcomp instance"
INSTANCE_VERSION = 1

LEFT = "left"    # variable blocks to the left of the clause blocks
RIGHT = "right"

_SIGN_PAIRS = tuple(itertools.product((PLUS, MINUS), repeat=2))
_SIGN_TRIPLES = tuple(itertools.product((PLUS, MINUS), repeat=3))


class NoReductionError(ValueError):
    """No scenario closes for this family with the given gadget library."""


class CombinationError(ValueError):
    """A layout violates the combination-lemma hypotheses."""


# -- 3SAT formulas -------------------------------------------------------------

@dataclass
class ThreeSatFormula:
    n_vars: int
    clauses: list                 # tuples of 3 nonzero ints

    @classmethod
    def from_dimacs(cls, text: str) -> "ThreeSatFormula":
        n_vars = 0
        clauses = []
        pending = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line[0] in "c%":
                continue
            if line.startswith("p"):
                n_vars = int(line.split()[2])
                continue
            pending.extend(int(t) for t in line.split())
        clause = []
        for lit in pending:
            if lit == 0:
                clauses.append(tuple(clause))
                clause = []
            else:
                n_vars = max(n_vars, abs(lit))
                clause.append(lit)
        if clause:
            raise ValueError("unterminated clause")
        return cls(n_vars, clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n_vars} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def preprocess_3sat(formula: ThreeSatFormula) -> ThreeSatFormula:
    """Equisatisfiable 3-CNF where no clause mentions a variable twice.

    Tautological clauses are dropped; clauses short of three distinct
    variables (originally short, or shortened by deduplication) are padded
    with fresh variables, one clause per assignment of the padding.
    """
    next_var = formula.n_vars + 1
    out = []
    for clause in formula.clauses:
        if not 1 <= len(clause) <= 3:
            raise ValueError(f"clause {clause} has arity {len(clause)}")
        lits = []
        for lit in clause:
            if -lit in lits:
                lits = None  # tautology
                break
            if lit not in lits:
                lits.append(lit)
        if lits is None:
            continue
        pad = 3 - len(lits)
        if pad == 0:
            out.append(tuple(lits))
            continue
        fresh = list(range(next_var, next_var + pad))
        next_var += pad
        for polarity in itertools.product((1, -1), repeat=pad):
            out.append(tuple(lits + [v * p for v, p in zip(fresh, polarity)]))
    return ThreeSatFormula(next_var - 1, out)


# -- gadget library -------------------------------------------------------------

from functools import lru_cache


@lru_cache(maxsize=None)
def disjunction_signs(problem: GadgetProblem):
    """The literal signs of a disjunction truth table, or None."""
    from .problems import assignments
    k = problem.var_count
    rows = list(assignments(k))
    for signs in itertools.product((PLUS, MINUS), repeat=k):
        if all(problem.psi_of(f) == any(a == b for a, b in zip(f, signs))
               for f in rows):
            return signs
    return None


@dataclass
class GadgetLibrary:
    family: Family
    propagators: dict = field(default_factory=dict)  # (s1, s2) -> [Gadget]
    clauses: dict = field(default_factory=dict)      # (s1, s2, s3) -> Gadget

    def add(self, gadget: Gadget) -> None:
        if gadget.family != self.family:
            raise ValueError("gadget family does not match the library")
        signs = disjunction_signs(gadget.problem)
        if signs is None:
            raise ValueError("gadget is not a disjunction/clause gadget")
        if len(signs) == 2:
            self.propagators.setdefault(signs, []).append(gadget)
            self.propagators[signs].sort(key=lambda g: g.n)
        else:
            if signs not in self.clauses or gadget.n < self.clauses[signs].n:
                self.clauses[signs] = gadget

    def has_propagator(self, s1: int, s2: int) -> bool:
        return (s1, s2) in self.propagators

    def atoms(self):
        """All propagator gadgets, smallest first, deterministic order."""
        out = []
        for signs in _SIGN_PAIRS:
            out.extend(self.propagators.get(signs, []))
        return sorted(out, key=lambda g: (g.n, g.problem.variable_tuples,
                                          g.entries.word()))

    @classmethod
    def load_dir(cls, path, family: Family | None = None) -> "GadgetLibrary":
        import os
        gadget_files = sorted(
            f for f in os.listdir(path) if f.endswith(".gadget"))
        gadgets = [load_gadget(os.path.join(path, f)) for f in gadget_files]
        if family is None:
            if not gadgets:
                raise ValueError(f"no gadget files under {path}")
            family = gadgets[0].family
        lib = cls(family)
        for g in gadgets:
            if g.family == family:
                lib.add(g)
        return lib


# -- scenarios ------------------------------------------------------------------

@dataclass
class ScenarioPlan:
    scenario: int                     # 1..5
    side: str                         # LEFT | RIGHT
    clause_signs: tuple
    clause_gadget: Gadget
    bridges: dict                     # (trigger, target) -> Gadget


_ALL_POS = (PLUS, PLUS, PLUS)
_ALL_NEG = (MINUS, MINUS, MINUS)

# scenario id -> (required (trigger, target) bridges, clause polarity or None, side)
# Required propagators count as existing when they chain from library atoms.
_SCENARIOS = (
    (1, tuple(itertools.product((PLUS, MINUS), repeat=2)), None, LEFT),
    (2, ((PLUS, PLUS), (PLUS, MINUS)), _ALL_POS, LEFT),
    (3, ((PLUS, PLUS), (PLUS, MINUS)), _ALL_POS, RIGHT),
    (4, ((MINUS, PLUS), (MINUS, MINUS)), _ALL_NEG, LEFT),
    (5, ((MINUS, PLUS), (MINUS, MINUS)), _ALL_NEG, RIGHT),
)


def _atom_geometry(atom: Gadget, r: int):
    """(size, front window start, back window start) within the atom's domain."""
    x1, x2 = atom.problem.variable_tuples
    return atom.n, x1[0], x2[0]


def plan_chains(atoms, r: int, span: int, trigger: int, target: int,
                side: str, limit: int = 50):
    """Chains of propagator atoms across the bridge, shortest first.

    A state is (window start, propagated sign).  An atom placed inside
    [1, span] whose far window lands on the current state's window and whose
    trigger sign matches forces its near window; the chain is complete when
    the near window reaches the boundary window with the target sign.
    Yields lists of (gadget, placement offset).
    """
    last = span - r + 1
    if side == LEFT:
        start, goal = (last, trigger), (1, target)
    else:
        start, goal = (1, trigger), (last, target)
    yielded = 0
    # iterative deepening keeps the enumeration ordered by chain length
    for depth in range(1, 10):
        stack = [(start, [], {start})]
        while stack:
            state, chain, seen = stack.pop()
            if len(chain) == depth:
                continue
            offset, sign = state
            for atom in reversed(atoms):
                signs = disjunction_signs(atom.problem)
                k, wf, wb = _atom_geometry(atom, r)
                if side == LEFT:
                    if signs[1] != -sign:
                        continue
                    o = offset - wb + 1
                    new = (o + wf - 1, signs[0])
                else:
                    if signs[0] != -sign:
                        continue
                    o = offset - wf + 1
                    new = (o + wb - 1, signs[1])
                if o < 1 or o + k - 1 > span or new in seen:
                    continue
                step = chain + [(atom, o)]
                if new == goal:
                    yield step
                    yielded += 1
                    if yielded >= limit:
                        return
                elif len(step) < depth:
                    stack.append((new, step, seen | {new}))


def build_bridge(library: GadgetLibrary, r: int, trigger: int, target: int,
                 side: str, max_pad: int = 6) -> Gadget | None:
    """A verified propagator gadget between two disjoint r-windows.

    On the LEFT side the trigger window is the last one and the forced
    window the first; RIGHT is the mirror.  Pads widen the span until some
    chain of library atoms composes and passes verification.
    """
    atoms = library.atoms()
    if not atoms:
        return None
    for span in range(2 * r, 2 * r + max_pad + 1):
        if side == LEFT:
            problem = propagator_problem(span, r, library.family,
                                         target, -trigger)
        else:
            problem = propagator_problem(span, r, library.family,
                                         -trigger, target)
        for plan in plan_chains(atoms, r, span, trigger, target, side):
            try:
                return compose_chain(plan, span, problem)
            except GadgetError:
                continue
    return None


def select_scenario(family: Family, library: GadgetLibrary,
                    max_pad: int = 6) -> ScenarioPlan | None:
    """First scenario (in order 1..5) whose gadgets exist and bridges compose.

    Scenario 1 needs every (trigger, target) bridge and then accepts any
    clause polarity; scenarios 2-5 pair one clause polarity with the two
    bridges for its trigger sign and a placement side for the variables.
    """
    if not combination_lemma_applies(family, PLUS):
        return None
    bridge_cache = {}

    def bridge(trigger, target, side):
        key = (trigger, target, side)
        if key not in bridge_cache:
            bridge_cache[key] = build_bridge(library, family.r, trigger,
                                             target, side, max_pad=max_pad)
        return bridge_cache[key]

    for scenario, needed, clause_polarity, side in _SCENARIOS:
        if clause_polarity is None:
            candidates = [s for s in _SIGN_TRIPLES if s in library.clauses]
        else:
            candidates = ([clause_polarity]
                          if clause_polarity in library.clauses else [])
        if not candidates:
            continue
        bridges = {}
        for trigger, target in needed:
            built = bridge(trigger, target, side)
            if built is None:
                bridges = None
                break
            bridges[(trigger, target)] = built
        if bridges is None:
            continue
        clause_signs = candidates[0]
        return ScenarioPlan(scenario, side, clause_signs,
                            library.clauses[clause_signs], bridges)
    return None


# -- layout and combination ------------------------------------------------------

@dataclass
class LayoutPlacement:
    gadget: Gadget
    embedding: tuple              # global element per gadget element, increasing
    label: str = ""

    def global_entries(self):
        emb = self.embedding
        for subset, sign in self.gadget.entries.entries():
            yield tuple(emb[x - 1] for x in subset), sign


@dataclass
class ReductionLayout:
    r: int
    n_elements: int
    family: Family
    variable_blocks: list
    clause_blocks: list
    placements: list


def _consecutive_within(inter, union) -> bool:
    if len(inter) < 2:
        return True
    lo, hi = min(inter), max(inter)
    return not any(lo < u < hi and u not in inter for u in union)


@dataclass
class CombinationViolation:
    kind: str
    detail: str


def check_combination(layout: ReductionLayout) -> list:
    """Violations of the combination-lemma hypotheses; empty means ok."""
    violations = []
    if not combination_lemma_applies(layout.family, PLUS):
        violations.append(CombinationViolation(
            "family", "a pattern contains r-1 consecutive '+' signs"))
    entry_maps = []
    for placement in layout.placements:
        emb = placement.embedding
        if list(emb) != sorted(set(emb)):
            violations.append(CombinationViolation(
                "embedding", f"{placement.label}: not strictly increasing"))
        entry_maps.append(dict(placement.global_entries()))
    for (i, p1), (j, p2) in itertools.combinations(
            enumerate(layout.placements), 2):
        set1, set2 = set(p1.embedding), set(p2.embedding)
        inter = set1 & set2
        if not _consecutive_within(inter, set1 | set2):
            violations.append(CombinationViolation(
                "consecutivity",
                f"{p1.label} and {p2.label} intersect non-consecutively"))
        for subset in entry_maps[i].keys() & entry_maps[j].keys():
            if entry_maps[i][subset] != entry_maps[j][subset]:
                violations.append(CombinationViolation(
                    "conflict",
                    f"{p1.label} and {p2.label} disagree on {subset}"))
    return violations


# -- compiled instances -----------------------------------------------------------

@dataclass
class CompInstance:
    n: int
    r: int
    family: Family
    presets: list                  # (subset, sign), lex order

    def to_mapping(self) -> PartialSignMapping:
        return PartialSignMapping.from_entries(self.n, self.r, self.presets)

    def render(self) -> str:
        lines = [f"{INSTANCE_MAGIC} format {INSTANCE_VERSION}",
                 f"rank: {self.r}",
                 f"elements: {self.n}",
                 f"family: {self.family.text()}"]
        lines += [f"preset: {','.join(map(str, t))} {sign_char(s)}"
                  for t, s in self.presets]
        lines.append("end")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "CompInstance":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith(INSTANCE_MAGIC):
            raise ValueError("not an instance file")
        if lines[0].rsplit(" ", 1)[-1] != str(INSTANCE_VERSION):
            raise ValueError("unsupported instance format version")
        fields = {}
        presets = []
        for ln in lines[1:]:
            if ln == "end":
                break
            key, _, value = ln.partition(":")
            key, value = key.strip(), value.strip()
            if key == "preset":
                subset_text, sign_text = value.rsplit(" ", 1)
                presets.append(
                    (tuple(int(x) for x in subset_text.split(",")),
                     sign_of_char(sign_text)))
            else:
                fields[key] = value
        r = int(fields["rank"])
        instance = cls(int(fields["elements"]), r,
                       Family.from_text(fields.get("family", ""), r), presets)
        if not instance.to_mapping().avoids(instance.family):
            raise ValueError("instance presets realize a forbidden pattern")
        return instance

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.render())

    @classmethod
    def load(cls, path) -> "CompInstance":
        with open(path) as fh:
            return cls.parse(fh.read())


def combine(layout: ReductionLayout) -> CompInstance:
    """Union of all placement entries as instance presets.

    The lemma's fill of the remaining tuples belongs to the completability
    argument, not to the instance.
    """
    violations = check_combination(layout)
    if violations:
        raise CombinationError("; ".join(v.detail for v in violations))
    merged = {}
    for placement in layout.placements:
        for subset, sign in placement.global_entries():
            assert merged.get(subset, sign) == sign
            merged[subset] = sign
    presets = sorted(merged.items())
    instance = CompInstance(layout.n_elements, layout.r, layout.family, presets)
    if not instance.to_mapping().avoids(layout.family):
        raise CombinationError("combined presets realize a forbidden pattern")
    return instance


def compile_formula(formula: ThreeSatFormula, family: Family,
                    library: GadgetLibrary,
                    plan: ScenarioPlan | None = None) -> CompInstance:
    """Assemble the completion instance for a 3-CNF under a scenario plan."""
    if plan is None:
        plan = select_scenario(family, library)
    if plan is None:
        raise NoReductionError(f"no scenario closes for {family.text()}")
    formula = preprocess_3sat(formula)
    r = family.r
    n, m = formula.n_vars, len(formula.clauses)
    block = plan.clause_gadget.n

    # bridge spans decide how much padding sits between the regions
    occurrences = []          # (clause index, slot, trigger, target, bridge)
    pad_total = 0
    for ci, clause in enumerate(formula.clauses):
        for slot, lit in enumerate(clause):
            trigger = plan.clause_signs[slot]
            target = PLUS if lit > 0 else MINUS
            bridge = plan.bridges[(trigger, target)]
            occurrences.append((ci, slot, lit, bridge))
            pad_total += bridge.n - 2 * r

    if plan.side == LEFT:
        var_base, pad_base, clause_base = 0, r * n, r * n + pad_total
    else:
        clause_base, pad_base, var_base = 0, block * m, block * m + pad_total
    n_elements = r * n + pad_total + block * m

    def variable_block(k: int):  # k is 1-based
        return tuple(var_base + (k - 1) * r + i for i in range(1, r + 1))

    def clause_block(ci: int):
        return tuple(clause_base + ci * block + i for i in range(1, block + 1))

    variable_blocks = [variable_block(k) for k in range(1, n + 1)]
    clause_blocks = [clause_block(ci) for ci in range(m)]
    placements = [
        LayoutPlacement(plan.clause_gadget, clause_blocks[ci], f"clause{ci}")
        for ci in range(m)
    ]

    next_pad = pad_base
    for ci, slot, lit, bridge in occurrences:
        v_elems = variable_block(abs(lit))
        window = plan.clause_gadget.problem.variable_tuples[slot]
        l_elems = tuple(clause_blocks[ci][x - 1] for x in window)
        pads = tuple(range(next_pad + 1, next_pad + 1 + bridge.n - 2 * r))
        next_pad += len(pads)
        if plan.side == LEFT:
            embedding = v_elems + pads + l_elems
        else:
            embedding = l_elems + pads + v_elems
        placements.append(
            LayoutPlacement(bridge, embedding, f"lit{ci}.{slot}"))

    layout = ReductionLayout(r, n_elements, family,
                             variable_blocks, clause_blocks, placements)
    return combine(layout)


# -- deciding -----------------------------------------------------------------

@dataclass
class DecideResult:
    completable: bool
    witness: PartialSignMapping | None = None
    timed_out: bool = False


def decide_instance(instance: CompInstance, timeout: float | None = None,
                    drat_path: str | None = None) -> DecideResult:
    """Completability of the instance via the CNF layer, witness re-verified."""
    sigma = instance.to_mapping()
    session, enc = build_completion_cnf(sigma, instance.family,
                                        proof_path=drat_path)
    res = session.solve(timeout=timeout)
    if res.timed_out:
        return DecideResult(False, timed_out=True)
    if not res.is_sat:
        return DecideResult(False)
    witness = decode_completion(res.model, enc)
    if not witness.avoids(instance.family) or not witness.extends(sigma):
        raise RuntimeError("witness failed re-verification")
    return DecideResult(True, witness=witness)
