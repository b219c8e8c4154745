"""The catalog of named maps used throughout the characterization suites.

Each entry is written in the ASCII notation and revalidated when the module
loads, so a broken entry fails fast.  The ``source`` string records what the
map is the minimal counterexample or model for, not where it came from.
"""

from __future__ import annotations

from dataclasses import dataclass

from .maps import SpaceMap
from .notation import parse_value
from .spaces import FinSpace, make_space

POINT = make_space(1, (), labels=("x",))


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    map: SpaceMap
    source: str


_RAW = [
    ("empty_to_point", "{}-->{x}", "initial object into the point; lifting against it is surjectivity"),
    ("two_discrete_to_point", "{a,b}-->{a=b}", "simplest non-connected space collapsed; defines connectedness on the left"),
    ("point_to_indiscrete", "{a}-->{a<->b}", "point into the antidiscrete pair; left-lifting against it is surjectivity"),
    ("indiscrete_to_point", "{a<->b}-->{a=b}", "simplest non-injective map of the antidiscrete pair"),
    ("sierp_to_point", "{o->c}-->{o=c}", "Sierpinski collapsed; left-lifting against it is the induced-topology condition"),
    ("closed_point_to_sierp", "{c}-->{o->c}", "closed point into Sierpinski; the simplest map without dense image"),
    ("open_point_to_sierp", "{o}-->{o->c}", "open point into Sierpinski; the simplest non-closed (non-proper) map"),
    ("sierp_to_indiscrete", "{o->c}-->{o<->c}", "Sierpinski onto the antidiscrete pair; left-lifting against it is the final-topology condition"),
    ("V_to_sierp", "{a<-u->b}-->{u->a=b}", "glues the two closed points of the V; the simplest map without connected fibres"),
    ("V_to_point", "{a<-u->b}-->{a=u=b}", "the V collapsed; its left class is the disjoint-closures condition"),
    ("P2_map", "{a<-u->b}-->{u<->a=b<->x}", "single map whose left class matches the four quotient-style generators"),
    ("M_to_L", "{a<-u->x<-v->b}-->{a<-u=x=v->b}", "finite model of the barycentric subdivision of the interval"),
    ("L_to_point", "{a<-x->b}-->{a=x=b}", "the three-point interval model collapsed"),
    ("K_to_sierp", "{a<-u->b<->x}-->{o->a=u=b=x}", "non-surjective closed four-point map; complicated enough to define compactness"),
]


def catalog() -> tuple[CatalogEntry, ...]:
    entries = []
    for name, text, source in _RAW:
        value = parse_value(text)
        assert isinstance(value, SpaceMap), name
        entries.append(CatalogEntry(name=name, map=value, source=source))
    assert len({e.name for e in entries}) == len(entries)
    return tuple(entries)


_BY_NAME = {e.name: e for e in catalog()}


def catalog_map(name: str) -> SpaceMap:
    return _BY_NAME[name].map


def catalog_names() -> tuple[str, ...]:
    return tuple(e.name for e in catalog())


# Named spaces that tests and suites keep reaching for.
EMPTY = make_space(0)
SIERPINSKI: FinSpace = catalog_map("sierp_to_point").dom
TWO_DISCRETE: FinSpace = catalog_map("two_discrete_to_point").dom
TWO_INDISCRETE: FinSpace = catalog_map("indiscrete_to_point").dom
V_SPACE: FinSpace = catalog_map("V_to_point").dom
M_SPACE: FinSpace = catalog_map("M_to_L").dom
L_SPACE: FinSpace = catalog_map("M_to_L").cod
K_SPACE: FinSpace = catalog_map("K_to_sierp").dom

# The quotient-style generator families; the three-map form is what the
# factorisation displays, the four-map form adds the discrete collapse.
P1_THREE = (
    catalog_map("point_to_indiscrete"),
    catalog_map("sierp_to_indiscrete"),
    catalog_map("V_to_sierp"),
)
P1_FOUR = (catalog_map("two_discrete_to_point"),) + P1_THREE
P2 = (catalog_map("P2_map"),)

# The four compactness generators and the single map they retract from.
KTO_GENERATORS = (
    catalog_map("indiscrete_to_point"),
    catalog_map("sierp_to_point"),
    catalog_map("closed_point_to_sierp"),
    catalog_map("V_to_point"),
)
