"""Reference classification catalogs for rank-3 no-adjacent-plus settings.

Bundled verification targets: the 41 families with a certified hardness
reduction, and the 20 families solvable by the greedy '+'-filling rule.
Family texts are canonical under element-order reversal with '+' ordered
before '-'.
"""

from .patterns import Family, canonical_form

HARD_FAMILY_TEXTS = (
    "+-+-,+--+",
    "+-+-,-+-+",
    "+-+-,-+--",
    "+-+-,---+",
    "+-+-,----",
    "+--+,-+--",
    "+--+,----",
    "+-+-,+--+,-+-+",
    "+-+-,+--+,-+--",
    "+-+-,+--+,--+-",
    "+-+-,+--+,---+",
    "+-+-,+--+,----",
    "+-+-,+---,-+-+",
    "+-+-,-+-+,-+--",
    "+-+-,-+-+,----",
    "+-+-,-+--,---+",
    "+-+-,-+--,----",
    "+-+-,---+,----",
    "+--+,-+--,--+-",
    "+--+,-+--,----",
    "+-+-,+--+,+---,-+-+",
    "+-+-,+--+,-+-+,-+--",
    "+-+-,+--+,-+-+,----",
    "+-+-,+--+,-+--,--+-",
    "+-+-,+--+,-+--,---+",
    "+-+-,+--+,-+--,----",
    "+-+-,+--+,--+-,----",
    "+-+-,+--+,---+,----",
    "+-+-,+---,-+-+,--+-",
    "+-+-,+---,-+-+,----",
    "+-+-,-+-+,-+--,----",
    "+-+-,-+--,---+,----",
    "+--+,-+--,--+-,----",
    "+-+-,+--+,+---,-+-+,--+-",
    "+-+-,+--+,+---,-+-+,----",
    "+-+-,+--+,-+-+,-+--,--+-",
    "+-+-,+--+,-+-+,-+--,----",
    "+-+-,+--+,-+--,--+-,----",
    "+-+-,+--+,-+--,---+,----",
    "+-+-,+--+,+---,-+-+,--+-,----",
    "+-+-,+--+,-+-+,-+--,--+-,----",
)

GREEDY_FAMILY_TEXTS = (
    "",
    "----",
    "+---",
    "-+--",
    "+---,-+--",
    "+---,--+-",
    "+---,---+",
    "+---,----",
    "-+--,--+-",
    "-+--,----",
    "+---,-+--,--+-",
    "+---,-+--,---+",
    "+---,-+--,----",
    "+---,--+-,----",
    "+---,---+,----",
    "-+--,--+-,----",
    "+---,-+--,--+-,---+",
    "+---,-+--,--+-,----",
    "+---,-+--,---+,----",
    "+---,-+--,--+-,---+,----",
)


def hard_families() -> list:
    return [canonical_form(Family.from_text(t, 3)) for t in HARD_FAMILY_TEXTS]


def greedy_families() -> list:
    return [canonical_form(Family.from_text(t, 3)) for t in GREEDY_FAMILY_TEXTS]
