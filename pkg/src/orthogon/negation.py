"""Bounded class expressions P^w: evaluation, membership, comparison, orbits.

Everything here is truncated at a size bound: a class is represented by its
member maps between spaces of at most ``bound`` points, and every verdict or
equality is an "at bound k" statement.  One l/r step over a truncated class
can only over-approximate the true orthogonal restricted to the bound, so the
code never claims unbounded identities.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .errors import BoundMismatchError, BoundTooSmallError
from .lifting import (
    LiftingSquare,
    left_orthogonal_bounded,
    lifts,
    lifts_cached,
    right_orthogonal_bounded,
)
from .maps import SpaceMap, map_canonical_key

DEFAULT_BOUND = 5
DEFAULT_MAX_WORD_LEN = 7


@dataclass(frozen=True)
class ClassExpr:
    """Generators, a word over {l, r}, and the size bound of the truncation."""

    generators: tuple[SpaceMap, ...]
    word: str = ""
    bound: int = DEFAULT_BOUND

    def __post_init__(self):
        if any(c not in "lr" for c in self.word):
            raise ValueError("word must use letters l and r only")
        worst = max(
            (max(g.dom.n, g.cod.n) for g in self.generators), default=0
        )
        if self.bound < worst:
            raise BoundTooSmallError(
                f"bound {self.bound} is below the largest generator size {worst}"
            )


@dataclass(frozen=True)
class ClassVerdict:
    status: str  # "NotMember" | "MemberAtBound"
    witness_map: Optional[SpaceMap] = None
    witness_square: Optional[LiftingSquare] = None

    @property
    def is_member(self) -> bool:
        return self.status == "MemberAtBound"


def _dedupe(maps: Iterable[SpaceMap]) -> tuple[SpaceMap, ...]:
    seen = {}
    for m in maps:
        seen.setdefault(map_canonical_key(m), m)
    return tuple(seen[k] for k in sorted(seen.keys()))


_eval_cache: dict[tuple, tuple[SpaceMap, ...]] = {}


def eval_class(expr: ClassExpr) -> tuple[SpaceMap, ...]:
    """Fold the word left to right from the generator set, each step one
    bounded orthogonal.  The empty word returns the generators themselves."""
    members = _dedupe(expr.generators)
    prefix = ()
    for letter in expr.word:
        prefix += (letter,)
        key = (tuple(map_canonical_key(g) for g in expr.generators), prefix, expr.bound)
        if key in _eval_cache:
            members = _eval_cache[key]
            continue
        if letter == "l":
            members = left_orthogonal_bounded(members, expr.bound)
        else:
            members = right_orthogonal_bounded(members, expr.bound)
        _eval_cache[key] = members
    return members


def fingerprint(members: Sequence[SpaceMap]) -> str:
    digest = hashlib.sha256()
    for m in sorted(map_canonical_key(m) for m in members):
        digest.update(repr(m).encode())
    return digest.hexdigest()[:16]


def member(expr: ClassExpr, candidate: SpaceMap) -> ClassVerdict:
    """Membership of ``candidate`` in the bounded class.

    A NotMember verdict carries the class member it fails against together
    with an unfillable square; membership is always "at bound".
    """
    if max(candidate.dom.n, candidate.cod.n) > expr.bound:
        raise BoundTooSmallError(
            "candidate map exceeds the class bound "
            f"({max(candidate.dom.n, candidate.cod.n)} > {expr.bound})"
        )
    if not expr.word:
        key = map_canonical_key(candidate)
        if any(map_canonical_key(g) == key for g in expr.generators):
            return ClassVerdict(status="MemberAtBound")
        return ClassVerdict(status="NotMember")
    last = expr.word[-1]
    prev = eval_class(
        ClassExpr(expr.generators, expr.word[:-1], expr.bound)
    )
    for other in prev:
        f, g = (candidate, other) if last == "l" else (other, candidate)
        if not lifts_cached(f, g):
            verdict = lifts(f, g)
            return ClassVerdict(
                status="NotMember",
                witness_map=other,
                witness_square=verdict.counterexample,
            )
    return ClassVerdict(status="MemberAtBound")


ClassComparison = Union["Equal", "Distinguished"]


@dataclass(frozen=True)
class Equal:
    pass


@dataclass(frozen=True)
class Distinguished:
    map: SpaceMap
    in_first: bool


def class_equal_at_bound(e1: ClassExpr, e2: ClassExpr) -> ClassComparison:
    if e1.bound != e2.bound:
        raise BoundMismatchError("class expressions must share a bound")
    m1 = {map_canonical_key(m): m for m in eval_class(e1)}
    m2 = {map_canonical_key(m): m for m in eval_class(e2)}
    if set(m1) == set(m2):
        return Equal()
    diff = sorted(set(m1) ^ set(m2))
    key = diff[0]
    in_first = key in m1
    return Distinguished(map=(m1 if in_first else m2)[key], in_first=in_first)


# -- orbit exploration -----------------------------------------------------------


@dataclass
class OrbitNode:
    node_id: str
    fingerprint: str
    member_count: int
    words: list[str] = field(default_factory=list)
    members: tuple[SpaceMap, ...] = ()


@dataclass
class OrbitWitness:
    node_a: str
    node_b: str
    map: SpaceMap
    in_a: bool
    verified: bool


@dataclass
class OrbitGraph:
    bound: int
    max_word_len: int
    nodes: list[OrbitNode]
    edges: list[tuple[str, str, str]]  # (from, letter, to)
    witnesses: list[OrbitWitness]


def orbit(
    generators: Sequence[SpaceMap],
    bound: int = DEFAULT_BOUND,
    max_word_len: int = DEFAULT_MAX_WORD_LEN,
) -> OrbitGraph:
    """BFS over words in {l, r}* up to the length cap, merging nodes with
    equal bounded fingerprints.  Every inequality between examined nodes is
    witnessed by a distinguishing map, rechecked against the parent class."""
    if max_word_len < 1:
        raise ValueError("max_word_len must be at least 1")
    gens = _dedupe(generators)
    nodes: list[OrbitNode] = []
    by_fp: dict[str, OrbitNode] = {}
    edges: list[tuple[str, str, str]] = []
    parents: dict[str, tuple[Optional[str], str]] = {}

    def intern(members: tuple[SpaceMap, ...], word: str) -> tuple[OrbitNode, bool]:
        fp = fingerprint(members)
        node = by_fp.get(fp)
        if node is None:
            node = OrbitNode(
                node_id=f"N{len(nodes)}",
                fingerprint=fp,
                member_count=len(members),
                words=[word],
                members=members,
            )
            nodes.append(node)
            by_fp[fp] = node
            return node, True
        node.words.append(word)
        return node, False

    root, _ = intern(gens, "")
    parents[root.node_id] = (None, "")
    frontier = [(root, "", gens)]
    for _ in range(max_word_len):
        nxt = []
        for node, word, members in frontier:
            for letter in "lr":
                stepped = (
                    left_orthogonal_bounded(members, bound)
                    if letter == "l"
                    else right_orthogonal_bounded(members, bound)
                )
                child, fresh = intern(stepped, word + letter)
                edges.append((node.node_id, letter, child.node_id))
                if fresh:
                    parents[child.node_id] = (node.node_id, letter)
                    nxt.append((child, word + letter, stepped))
        frontier = nxt

    # Distinguishing witnesses for every unequal node pair, verified by
    # re-deriving the witness's membership from the parent class.
    witnesses: list[OrbitWitness] = []
    node_members = {n.node_id: {map_canonical_key(m): m for m in n.members} for n in nodes}
    for i, na in enumerate(nodes):
        for nb in nodes[i + 1 :]:
            diff = sorted(set(node_members[na.node_id]) ^ set(node_members[nb.node_id]))
            if not diff:
                continue
            key = diff[0]
            in_a = key in node_members[na.node_id]
            holder = na if in_a else nb
            wmap = node_members[holder.node_id][key]
            witnesses.append(
                OrbitWitness(
                    node_a=na.node_id,
                    node_b=nb.node_id,
                    map=wmap,
                    in_a=in_a,
                    verified=_verify_membership(
                        holder, wmap, parents, by_node={n.node_id: n for n in nodes}
                    ),
                )
            )
    return OrbitGraph(
        bound=bound, max_word_len=max_word_len, nodes=nodes, edges=edges, witnesses=witnesses
    )


def _verify_membership(node, wmap, parents, by_node) -> bool:
    parent_id, letter = parents[node.node_id]
    if parent_id is None:
        return any(map_canonical_key(g) == map_canonical_key(wmap) for g in node.members)
    parent = by_node[parent_id]
    if letter == "l":
        return all(lifts_cached(wmap, g) for g in parent.members)
    return all(lifts_cached(f, wmap) for f in parent.members)
