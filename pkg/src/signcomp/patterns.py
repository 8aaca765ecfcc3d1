"""Pattern and family algebra: symmetry canonicalization and setting enumeration.

A pattern is a fully set sign word of length r+1; a family is a set of
patterns of equal length.  Families are considered up to symmetry: reversing
the element order of [n] reverses every induced word, so a family and its
pattern-wise reversal describe isomorphic completion problems.  Sign negation
is available as an optional second generator.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import MINUS, PLUS, sign_char, sign_of_char

REVERSAL = "reversal"
REVERSAL_NEGATION = "reversal-negation"

# Lexicographic comparisons of patterns order '+' before '-'.
_SORT_KEY = {PLUS: 0, MINUS: 1}


def pattern_from_text(text: str):
    p = tuple(sign_of_char(c) for c in text)
    if any(s not in (PLUS, MINUS) for s in p):
        raise ValueError(f"pattern {text!r} must be fully set")
    return p


def pattern_text(p) -> str:
    return "".join(sign_char(s) for s in p)


def pattern_key(p):
    return tuple(_SORT_KEY[s] for s in p)


def reverse_pattern(p):
    return tuple(reversed(p))


def negate_pattern(p):
    return tuple(-s for s in p)


class Family:
    """An immutable set of forbidden patterns of length r+1."""

    __slots__ = ("r", "patterns")

    def __init__(self, r: int, patterns):
        patterns = frozenset(tuple(p) for p in patterns)
        for p in patterns:
            if len(p) != r + 1:
                raise ValueError(
                    f"pattern {pattern_text(p)} has length {len(p)}, expected {r + 1}")
            if any(s not in (PLUS, MINUS) for s in p):
                raise ValueError(f"pattern {pattern_text(p)} must be fully set")
        self.r = r
        self.patterns = patterns

    @classmethod
    def from_text(cls, text: str, r: int | None = None) -> "Family":
        """Parse a comma-separated list of pattern words, e.g. "+-+-,-+-+"."""
        words = [w.strip() for w in text.split(",") if w.strip()]
        if not words:
            if r is None:
                raise ValueError("empty family needs an explicit rank")
            return cls(r, [])
        patterns = [pattern_from_text(w) for w in words]
        if r is None:
            r = len(patterns[0]) - 1
        return cls(r, patterns)

    def text(self) -> str:
        return ",".join(pattern_text(p) for p in self.sorted_patterns())

    def sorted_patterns(self):
        return sorted(self.patterns, key=pattern_key)

    def __len__(self):
        return len(self.patterns)

    def __iter__(self):
        return iter(self.sorted_patterns())

    def __contains__(self, p):
        return tuple(p) in self.patterns

    def __eq__(self, other):
        return (isinstance(other, Family)
                and self.r == other.r and self.patterns == other.patterns)

    def __hash__(self):
        return hash((self.r, self.patterns))

    def __repr__(self):
        return f"Family({self.r}, {self.text()!r})"


def _family_key(f: Family):
    return tuple(pattern_key(p) for p in f.sorted_patterns())


def _group_elements(group: str):
    if group == REVERSAL:
        return (lambda p: p, reverse_pattern)
    if group == REVERSAL_NEGATION:
        return (lambda p: p, reverse_pattern, negate_pattern,
                lambda p: negate_pattern(reverse_pattern(p)))
    raise ValueError(f"unknown symmetry group {group!r}")


@dataclass(frozen=True)
class SettingClass:
    """A family together with its symmetry orbit; `canonical` is the orbit minimum."""

    canonical: Family
    orbit: frozenset


def canonicalize_family(f: Family, group: str = REVERSAL) -> SettingClass:
    orbit = frozenset(
        Family(f.r, [g(p) for p in f.patterns]) for g in _group_elements(group)
    )
    canonical = min(orbit, key=_family_key)
    return SettingClass(canonical, orbit)


def canonical_form(f: Family, group: str = REVERSAL) -> Family:
    return canonicalize_family(f, group).canonical


def pattern_universe(r: int, plus_run_bound: int):
    """All length-(r+1) patterns with no run of more than `plus_run_bound` '+'."""
    if plus_run_bound < 0:
        raise ValueError("plus_run_bound must be >= 0")
    universe = []
    for signs in itertools.product((PLUS, MINUS), repeat=r + 1):
        run = best = 0
        for s in signs:
            run = run + 1 if s == PLUS else 0
            best = max(best, run)
        if best <= plus_run_bound:
            universe.append(signs)
    return sorted(universe, key=pattern_key)


def enumerate_settings(r: int, plus_run_bound: int,
                       group: str = REVERSAL) -> list[SettingClass]:
    """All families over the bounded-plus-run universe, one per symmetry class.

    Returned in lexicographic order of the canonical family, so sweep output
    directories are stable across runs.
    """
    universe = pattern_universe(r, plus_run_bound)
    if len(universe) > 20:
        raise ValueError(f"universe of {len(universe)} patterns is too large "
                         "to enumerate all subsets")
    seen = {}
    for k in range(len(universe) + 1):
        for combo in itertools.combinations(universe, k):
            cls = canonicalize_family(Family(r, combo), group)
            seen.setdefault(cls.canonical, cls)
    return [seen[f] for f in sorted(seen, key=_family_key)]


def combination_lemma_applies(f: Family, sign: int = PLUS) -> bool:
    """True iff no pattern contains r-1 consecutive copies of `sign`.

    This is the hypothesis under which gadgets with pairwise consecutive,
    consistent intersections combine into one avoiding mapping by filling all
    remaining tuples with `sign`.
    """
    run_len = f.r - 1
    for p in f.patterns:
        run = 0
        for s in p:
            run = run + 1 if s == sign else 0
            if run >= run_len:
                return False
    return True
