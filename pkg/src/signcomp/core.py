"""Sign-mapping algebra: subset ranking, word encoding, avoidance, completion order.

A rank-r sign mapping on [n] assigns '+' or '-' to every r-element subset of
{1, ..., n}.  Partial mappings leave some subsets unset ('?').  Mappings are
read as words over {+, -, ?} in lexicographic order of the r-subsets, and a
mapping avoids a family of forbidden length-(r+1) patterns when no
(r+1)-subset induces a fully set word equal to one of the patterns.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb

PLUS = 1
MINUS = -1
UNSET = 0

_CHAR_OF = {PLUS: "+", MINUS: "-", UNSET: "?"}
_SIGN_OF = {"+": PLUS, "-": MINUS, "?": UNSET, "−": MINUS}

RSubset = tuple  # strictly increasing tuple of ints in [1, n]


class InvalidSubsetError(ValueError):
    """Raised for subsets that are not strictly increasing r-tuples in [1, n]."""


def sign_char(s: int) -> str:
    return _CHAR_OF[s]


def sign_of_char(c: str) -> int:
    try:
        return _SIGN_OF[c]
    except KeyError:
        raise ValueError(f"invalid sign character {c!r}") from None


def check_subset(subset, n: int, r: int) -> None:
    if len(subset) != r:
        raise InvalidSubsetError(f"expected {r} elements, got {subset}")
    prev = 0
    for x in subset:
        if not prev < x <= n:
            raise InvalidSubsetError(f"{subset} is not increasing within [1, {n}]")
        prev = x


def lex_rank(subset, n: int, r: int) -> int:
    """0-based position of an increasing r-tuple among all r-subsets of [1, n]."""
    check_subset(subset, n, r)
    rank = 0
    prev = 0
    for i, x in enumerate(subset):
        for j in range(prev + 1, x):
            rank += comb(n - j, r - i - 1)
        prev = x
    return rank


def lex_unrank(index: int, n: int, r: int) -> RSubset:
    """Inverse of lex_rank."""
    if not 0 <= index < comb(n, r):
        raise InvalidSubsetError(f"index {index} out of range for C({n},{r})")
    out = []
    x = 1
    for i in range(r):
        while True:
            block = comb(n - x, r - i - 1)
            if index < block:
                break
            index -= block
            x += 1
        out.append(x)
        x += 1
    return tuple(out)


class SubsetTables:
    """Precomputed lookup tables for the r-subsets and (r+1)-subsets of [1, n].

    windows[w] is the tuple of r-subset indices induced by the w-th
    (r+1)-subset, ordered so that windows[w][j] omits the (r+1-j)-th element;
    this matches the lexicographic word order used throughout.
    """

    __slots__ = ("n", "r", "size", "subsets", "rank", "window_sets",
                 "windows", "windows_of_pos")

    def __init__(self, n: int, r: int):
        self.n = n
        self.r = r
        self.subsets = list(itertools.combinations(range(1, n + 1), r))
        self.size = len(self.subsets)
        self.rank = {s: i for i, s in enumerate(self.subsets)}
        self.window_sets = list(itertools.combinations(range(1, n + 1), r + 1))
        self.windows = []
        self.windows_of_pos = [[] for _ in range(self.size)]
        for w, ws in enumerate(self.window_sets):
            positions = tuple(
                self.rank[ws[:i] + ws[i + 1:]] for i in range(r, -1, -1)
            )
            self.windows.append(positions)
            for p in positions:
                self.windows_of_pos[p].append(w)


@lru_cache(maxsize=None)
def subset_tables(n: int, r: int) -> SubsetTables:
    return SubsetTables(n, r)


class PartialSignMapping:
    """A partial rank-r sign mapping on [1, n], stored by lex rank of r-subsets."""

    __slots__ = ("n", "r", "states")

    def __init__(self, n: int, r: int, states=None):
        if not 2 <= r <= n:
            raise ValueError(f"need n >= r >= 2, got n={n}, r={r}")
        size = comb(n, r)
        if states is None:
            states = [UNSET] * size
        elif len(states) != size:
            raise ValueError(f"expected {size} states, got {len(states)}")
        self.n = n
        self.r = r
        self.states = list(states)

    @classmethod
    def parse(cls, text: str, n: int, r: int) -> "PartialSignMapping":
        if len(text) != comb(n, r):
            raise ValueError(
                f"word length {len(text)} != C({n},{r}) = {comb(n, r)}")
        return cls(n, r, [sign_of_char(c) for c in text])

    @classmethod
    def from_entries(cls, n: int, r: int, entries) -> "PartialSignMapping":
        """Build from (subset, sign) pairs; duplicate subsets must agree."""
        m = cls(n, r)
        for subset, sign in entries:
            m.set(tuple(subset), sign)
        return m

    def word(self) -> str:
        return "".join(_CHAR_OF[s] for s in self.states)

    def get(self, subset) -> int:
        return self.states[lex_rank(subset, self.n, self.r)]

    def set(self, subset, sign: int) -> None:
        if sign not in (PLUS, MINUS, UNSET):
            raise ValueError(f"invalid sign {sign!r}")
        i = lex_rank(subset, self.n, self.r)
        if self.states[i] != UNSET and sign != UNSET and self.states[i] != sign:
            raise ValueError(f"conflicting sign for {tuple(subset)}")
        self.states[i] = sign

    def copy(self) -> "PartialSignMapping":
        return PartialSignMapping(self.n, self.r, self.states)

    def entries(self):
        """Yield (subset, sign) for every set position, in lex order."""
        tables = subset_tables(self.n, self.r)
        for i, s in enumerate(self.states):
            if s != UNSET:
                yield tables.subsets[i], s

    def set_count(self) -> int:
        return sum(1 for s in self.states if s != UNSET)

    def is_full(self) -> bool:
        return UNSET not in self.states

    def induced_word(self, elements) -> str:
        """Word of the restriction to a subset of [1, n] with >= r elements."""
        elems = tuple(sorted(elements))
        if len(elems) < self.r:
            raise ValueError(f"need at least {self.r} elements, got {elems}")
        n, r = self.n, self.r
        if any(not 1 <= e <= n for e in elems):
            raise ValueError(f"elements {elems} out of range [1, {n}]")
        return "".join(
            _CHAR_OF[self.states[lex_rank(sub, n, r)]]
            for sub in itertools.combinations(elems, r)
        )

    def avoids(self, family) -> bool:
        """True iff no (r+1)-subset realizes a forbidden pattern.

        Windows containing an unset position never match: a partial mapping
        only becomes invalid once a pattern is fully realized.
        """
        if family.r != self.r:
            raise ValueError("family rank mismatch")
        patterns = family.patterns
        if not patterns:
            return True
        states = self.states
        for positions in subset_tables(self.n, self.r).windows:
            word = tuple(states[p] for p in positions)
            if UNSET not in word and word in patterns:
                return False
        return True

    def extends(self, other: "PartialSignMapping") -> bool:
        """True iff every set entry of `other` is set identically here (other <= self)."""
        if (self.n, self.r) != (other.n, other.r):
            raise ValueError("dimension mismatch")
        return all(o == UNSET or o == s
                   for o, s in zip(other.states, self.states))

    def __eq__(self, other) -> bool:
        return (isinstance(other, PartialSignMapping)
                and self.n == other.n and self.r == other.r
                and self.states == other.states)

    def __hash__(self):
        return hash((self.n, self.r, tuple(self.states)))

    def __repr__(self):
        return f"PartialSignMapping({self.n}, {self.r}, {self.word()!r})"


def parse_word(text: str, n: int, r: int) -> PartialSignMapping:
    return PartialSignMapping.parse(text, n, r)


def render_word(sigma: PartialSignMapping) -> str:
    return sigma.word()


def is_leq(s1: PartialSignMapping, s2: PartialSignMapping) -> bool:
    """The completion partial order: s1 <= s2 iff s2 extends s1 entry-wise."""
    return s2.extends(s1)
