"""Sweep pipeline: classify settings as hard, gadget-free, or timed out.

For each canonical family the pipeline searches propagator and clause
gadgets over a size ladder (all consecutive variable-window placements per
size), checks after each size tier whether some reduction scenario closes,
and records a verdict:

  hard       a scenario closes; gadgets and composed bridges are verified
             and a one-clause dry-run passes the combination checks
  no-gadget  every search avenue up to n_max was exhausted without closure
  timeout    a search hit its budget before the question was settled

Verdicts, per-search statistics, and gadget files are persisted one
directory per setting, written atomically so interrupted sweeps resume.
"""

from __future__ import annotations

import itertools
import json
import os
import random
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .core import MINUS, PLUS, UNSET, PartialSignMapping
from .gadgets import save_gadget
from .oracle import (COMPLETABLE, CompletionTable, brute_complete,
                     greedy_classify)
from .patterns import Family, enumerate_settings
from .problems import clause_problem, propagator_problem
from .reduction import (GadgetLibrary, ThreeSatFormula, compile_formula,
                        decide_instance, select_scenario)
from .search import ADVANCED, FOUND, TIMEOUT, find_gadget
from . import catalog

HARD = "hard"
NO_GADGET = "no-gadget"
TIMED_OUT = "timeout"

_SIGN_PAIRS = tuple(itertools.product((PLUS, MINUS), repeat=2))
_SIGN_TRIPLES = tuple(itertools.product((PLUS, MINUS), repeat=3))


def sign_text(signs) -> str:
    return "".join("+" if s > 0 else "-" for s in signs)


def window_starts(n: int, r: int, count: int):
    """Ordered placements of `count` consecutive r-windows, widest span first."""
    positions = range(1, n - r + 2)
    combos = list(itertools.combinations(positions, count))
    combos.sort(key=lambda c: (-(c[-1] - c[0]), c))
    return combos


def propagator_sizes(r: int, n_max: int):
    return [(n, window_starts(n, r, 2)) for n in range(r + 1, n_max + 1)]


def clause_sizes(r: int, n_max: int):
    return [(n, window_starts(n, r, 3)) for n in range(r + 2, n_max + 1)]


def _reachable(edges, start):
    seen = set()
    frontier = [start]
    for _ in range(9):
        nxt = []
        for a in frontier:
            for (x, y) in edges:
                if x == a and y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def closure_possible(prop_types, clause_kinds) -> bool:
    """Whether some scenario could close from these gadget types alone.

    Mirrors scenario selection: bridges chain propagators right-to-left for
    left-side layouts and left-to-right for right-side ones; every clause
    trigger must reach both target signs on one side.
    """
    rl = {(-s2, s1) for (s1, s2) in prop_types}
    lr = {(-s1, s2) for (s1, s2) in prop_types}
    for signs in clause_kinds:
        for edges in (rl, lr):
            if all({PLUS, MINUS} <= _reachable(edges, t) for t in set(signs)):
                return True
    return False


@dataclass
class SettingRun:
    family: Family
    variant: str = ADVANCED
    timeout_per_search: float | None = 300.0
    n_max: int = 6
    shrink_mode: str = "greedy"
    log: list = field(default_factory=list)        # per-search stat records
    library: GadgetLibrary = None
    prop_types: set = field(default_factory=set)
    clause_kinds: set = field(default_factory=set)
    timed_out_searches: int = 0

    def __post_init__(self):
        self.library = GadgetLibrary(self.family)

    def _record(self, kind, signs, n, starts, outcome):
        self.log.append({
            "family": self.family.text(), "spec": kind,
            "signs": sign_text(signs), "n": n,
            "starts": ",".join(map(str, starts)),
            "variant": self.variant, "status": outcome.status,
            **outcome.stats.as_dict()})
        if outcome.status == TIMEOUT:
            self.timed_out_searches += 1

    def search_propagator(self, signs, n, placements) -> bool:
        r = self.family.r
        for starts in placements:
            out = find_gadget(
                propagator_problem(n, r, self.family, *signs, starts=starts),
                variant=self.variant, timeout=self.timeout_per_search,
                shrink_mode=self.shrink_mode)
            self._record("propagator", signs, n, starts, out)
            if out.found:
                self.library.add(out.gadget)
                self.prop_types.add(signs)
                return True
        return False

    def search_clause(self, signs, n, placements) -> bool:
        r = self.family.r
        for starts in placements:
            out = find_gadget(
                clause_problem(n, r, self.family, signs, starts=starts),
                variant=self.variant, timeout=self.timeout_per_search,
                shrink_mode=self.shrink_mode)
            self._record("clause", signs, n, starts, out)
            if out.found:
                self.library.add(out.gadget)
                self.clause_kinds.add(signs)
                return True
        return False

    def run(self, sizes=None) -> dict:
        """Search tiers of increasing size, stopping once a scenario closes."""
        r = self.family.r
        prop_tiers = dict(propagator_sizes(r, self.n_max))
        clause_tiers = dict(clause_sizes(r, self.n_max))
        if sizes is None:
            sizes = sorted(set(prop_tiers) | set(clause_tiers))
        for n in sizes:
            exhaustive_tier = n <= r + 2
            if exhaustive_tier:
                for signs in _SIGN_PAIRS:
                    if signs not in self.prop_types and n in prop_tiers:
                        self.search_propagator(signs, n, prop_tiers[n])
                for signs in _SIGN_TRIPLES:
                    if signs not in self.clause_kinds and n in clause_tiers:
                        self.search_clause(signs, n, clause_tiers[n])
            else:
                self._run_guided_tier(n, prop_tiers, clause_tiers)
            if closure_possible(self.prop_types, self.clause_kinds):
                break
        return self.finish()

    def _run_guided_tier(self, n, prop_tiers, clause_tiers) -> None:
        """Large tiers search only gadgets that could still unlock closure."""
        for kind in _SIGN_TRIPLES:
            if kind in self.clause_kinds or n not in clause_tiers:
                continue
            if closure_possible(self.prop_types, self.clause_kinds | {kind}):
                if (self.search_clause(kind, n, clause_tiers[n])
                        and closure_possible(self.prop_types, self.clause_kinds)):
                    return
        for ptype in _SIGN_PAIRS:
            if ptype in self.prop_types or n not in prop_tiers:
                continue
            if closure_possible(self.prop_types | {ptype}, self.clause_kinds):
                if (self.search_propagator(ptype, n, prop_tiers[n])
                        and closure_possible(self.prop_types, self.clause_kinds)):
                    return
        for kind in _SIGN_TRIPLES:
            for ptype in _SIGN_PAIRS:
                if kind in self.clause_kinds and ptype in self.prop_types:
                    continue
                if not closure_possible(self.prop_types | {ptype},
                                        self.clause_kinds | {kind}):
                    continue
                ok_c = (kind in self.clause_kinds
                        or (n in clause_tiers
                            and self.search_clause(kind, n, clause_tiers[n])))
                ok_p = (ptype in self.prop_types
                        or (n in prop_tiers
                            and self.search_propagator(ptype, n, prop_tiers[n])))
                if ok_c and ok_p and closure_possible(self.prop_types,
                                                      self.clause_kinds):
                    return

    def finish(self) -> dict:
        verdict = {
            "family": self.family.text(),
            "rank": self.family.r,
            "n_max": self.n_max,
            "variant": self.variant,
            "prop_types": sorted(sign_text(s) for s in self.prop_types),
            "clause_kinds": sorted(sign_text(s) for s in self.clause_kinds),
            "searches": len(self.log),
            "timeouts": self.timed_out_searches,
            "up_prunings": sum(rec["up"] for rec in self.log),
            "down_prunings": sum(rec["down"] for rec in self.log),
            "elapsed": round(sum(rec["elapsed"] for rec in self.log), 3),
        }
        plan = select_scenario(self.family, self.library)
        if plan is not None:
            dry = compile_formula(ThreeSatFormula(3, [(1, 2, 3)]),
                                  self.family, self.library, plan)
            verdict.update({
                "verdict": HARD,
                "scenario": plan.scenario,
                "side": plan.side,
                "clause_kind": sign_text(plan.clause_signs),
                "dry_run_elements": dry.n,
            })
        elif self.timed_out_searches:
            verdict["verdict"] = TIMED_OUT
        else:
            verdict["verdict"] = NO_GADGET
        return verdict


def _setting_dir(out_dir: str, family: Family) -> str:
    return os.path.join(out_dir, family.text().replace(",", "_"))


def _write_setting(out_dir: str, family: Family, verdict: dict, log: list,
                   library: GadgetLibrary | None) -> None:
    final = _setting_dir(out_dir, family)
    tmp = tempfile.mkdtemp(dir=out_dir, prefix=".tmp-")
    with open(os.path.join(tmp, "verdict.json"), "w") as fh:
        json.dump(verdict, fh, indent=1, sort_keys=True)
    with open(os.path.join(tmp, "stats.jsonl"), "w") as fh:
        for rec in log:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    if library is not None:
        i = 0
        for signs in sorted(library.propagators):
            for gadget in library.propagators[signs]:
                save_gadget(gadget, os.path.join(
                    tmp, f"prop-{sign_text(signs)}-{i}.gadget"))
                i += 1
        for signs in sorted(library.clauses):
            save_gadget(library.clauses[signs], os.path.join(
                tmp, f"clause-{sign_text(signs)}.gadget"))
    if os.path.isdir(final):
        import shutil
        shutil.rmtree(final)
    os.replace(tmp, final)


def _classify_one(args) -> dict:
    family_text, rank, n_max, variant, timeout, out_dir, shrink_mode = args
    family = Family.from_text(family_text, rank)
    if out_dir:
        verdict_path = os.path.join(_setting_dir(out_dir, family),
                                    "verdict.json")
        if os.path.exists(verdict_path):
            with open(verdict_path) as fh:
                stored = json.load(fh)
            if (stored.get("n_max") == n_max
                    and stored.get("variant") == variant):
                return stored
    run = SettingRun(family, variant=variant, timeout_per_search=timeout,
                     n_max=n_max, shrink_mode=shrink_mode)
    if rank == 4:
        verdict = run.run(sizes=[6])
    else:
        verdict = run.run()
    if out_dir:
        _write_setting(out_dir, family, verdict, run.log, run.library)
    return verdict


def _run_pool(tasks, jobs: int):
    if jobs <= 1:
        return [_classify_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_classify_one, tasks))


def classify_rank3(n_max: int = 6, variant: str = ADVANCED,
                   timeout_per_search: float | None = 300.0,
                   out_dir: str | None = None, jobs: int = 1,
                   families=None, shrink_mode: str = "greedy") -> list:
    """Classify the 144 canonical rank-3 settings (or a given subset)."""
    if families is None:
        families = [c.canonical for c in enumerate_settings(3, 1)]
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    tasks = [(f.text(), 3, n_max, variant, timeout_per_search, out_dir,
              shrink_mode) for f in families]
    return _run_pool(tasks, jobs)


def classify_rank4_benchmark(sample_size: int = 20, seed: int = 1,
                             timeout_per_search: float | None = 100.0,
                             variant: str = ADVANCED,
                             out_dir: str | None = None,
                             jobs: int = 1) -> list:
    """Classify a seeded sample of the rank-4 benchmark settings at n = 6."""
    settings = [c.canonical for c in enumerate_settings(4, 1)]
    rng = random.Random(seed)
    sample = (settings if sample_size >= len(settings)
              else rng.sample(settings, sample_size))
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    tasks = [(f.text(), 4, 6, variant, timeout_per_search, out_dir, "greedy")
             for f in sample]
    return _run_pool(tasks, jobs)


def summarize(verdicts) -> dict:
    counts = {}
    for v in verdicts:
        counts[v["verdict"]] = counts.get(v["verdict"], 0) + 1
    return counts


# -- greedy study ---------------------------------------------------------------

def greedy_family_study(n6_samples: int = 100_000, seed: int = 1,
                        families=None, observer=None) -> list:
    """Exhaustive n=5 and sampled n=6 comparison of the greedy classifier.

    For each family the greedy verdict is compared against ground truth on
    every partial mapping at n=5 (3^10 states) and on seeded random partial
    mappings at n=6.
    """
    if families is None:
        families = catalog.greedy_families()
    reports = []
    for index, family in enumerate(families):
        t0 = time.time()
        table = CompletionTable(5, 3, family)
        mismatches = 0
        states = (UNSET, PLUS, MINUS)
        for combo in itertools.product(states, repeat=table.size):
            sigma = PartialSignMapping(5, 3, list(combo))
            truth = table.completable(sigma)
            verdict = greedy_classify(sigma, family) == COMPLETABLE
            if truth != verdict:
                mismatches += 1
        rng = random.Random((seed, index))
        n6_mismatches = 0
        for _ in range(n6_samples):
            sigma = PartialSignMapping(
                6, 3, [rng.choice(states) for _ in range(20)])
            truth = brute_complete(sigma, family) is not None
            verdict = greedy_classify(sigma, family) == COMPLETABLE
            if truth != verdict:
                n6_mismatches += 1
        report = {"family": family.text(),
                  "n5_total": 3 ** table.size, "n5_mismatches": mismatches,
                  "n6_samples": n6_samples, "n6_mismatches": n6_mismatches,
                  "elapsed": round(time.time() - t0, 2)}
        reports.append(report)
        if observer is not None:
            observer(report)
    return reports


def greedy_counterexample(family: Family, n: int = 5,
                          budget: int = 200_000) -> PartialSignMapping | None:
    """A partial mapping where the greedy verdict disagrees with the oracle."""
    table = CompletionTable(n, 3, family) if n == 5 else None
    states = (UNSET, PLUS, MINUS)
    count = 0
    for combo in itertools.product(states, repeat=len(
            PartialSignMapping(n, 3).states)):
        count += 1
        if count > budget:
            return None
        sigma = PartialSignMapping(n, 3, list(combo))
        if table is not None:
            truth = table.completable(sigma)
        else:
            truth = brute_complete(sigma, family) is not None
        if truth != (greedy_classify(sigma, family) == COMPLETABLE):
            return sigma
    return None
