"""The lifting relation f ⧄ g, decided by exhaustive square enumeration.

``lifts(f, g)`` holds when every commutative square with f on the left and g
on the right admits a diagonal filler.  Squares are streamed tops-outer /
bottoms-inner in lexicographic assignment order, so the first counterexample
is a deterministic regression artifact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .errors import NotCommutingError
from .maps import SpaceMap, compose, enumerate_maps, map_canonical_key

# Above this many candidate fillers we switch from materialising every map
# B -> X to a per-square backtracking search.
_FILLER_TABLE_LIMIT = 50000


@dataclass(frozen=True)
class LiftingSquare:
    f: SpaceMap
    g: SpaceMap
    top: SpaceMap
    bottom: SpaceMap

    def __post_init__(self):
        if compose(self.g, self.top) != compose(self.bottom, self.f):
            raise NotCommutingError("g.top must equal bottom.f")


@dataclass(frozen=True)
class LiftVerdict:
    holds: bool
    counterexample: Optional[LiftingSquare] = None
    filler_counts: Optional[tuple[int, ...]] = None


def commutative_squares(f: SpaceMap, g: SpaceMap) -> Iterator[LiftingSquare]:
    for top in enumerate_maps(f.dom, g.dom):
        gt = compose(g, top)
        for bottom in enumerate_maps(f.cod, g.cod):
            if gt == compose(bottom, f):
                yield LiftingSquare(f=f, g=g, top=top, bottom=bottom)


def fillers(square: LiftingSquare) -> Iterator[SpaceMap]:
    """All h: B -> X with h.f = top and g.h = bottom, lexicographically.

    h is forced on the image of f by the top map; the remaining points are
    extended by backtracking against monotonicity and the bottom constraint.
    """
    f, g, top, bottom = square.f, square.g, square.top, square.bottom
    b, x = f.cod, g.dom
    forced: dict[int, int] = {}
    for a in range(f.dom.n):
        want = top.assign[a]
        prev = forced.get(f.assign[a])
        if prev is not None and prev != want:
            return
        forced[f.assign[a]] = want

    assign = [0] * b.n

    def candidates(i: int) -> Iterator[int]:
        if i in forced:
            yield forced[i]
            return
        for v in range(x.n):
            if g.assign[v] == bottom.assign[i]:
                yield v

    def consistent(i: int, v: int) -> bool:
        for j in range(i):
            if b.rel[i] >> j & 1 and not x.rel[v] >> assign[j] & 1:
                return False
            if b.rel[j] >> i & 1 and not x.rel[assign[j]] >> v & 1:
                return False
        return True

    def extend(i: int) -> Iterator[SpaceMap]:
        if i == b.n:
            yield SpaceMap(b, x, tuple(assign), _checked=True)
            return
        for v in candidates(i):
            if consistent(i, v):
                assign[i] = v
                yield from extend(i + 1)

    # Forced points must themselves satisfy the bottom constraint.
    for i, v in forced.items():
        if g.assign[v] != bottom.assign[i]:
            return
    yield from extend(0)


def _has_filler(square: LiftingSquare) -> bool:
    for _ in fillers(square):
        return True
    return False


def lifts(f: SpaceMap, g: SpaceMap, want_counts: bool = False) -> LiftVerdict:
    """Decide f ⧄ g.  A failed verdict carries the first unfillable square."""
    b, x = f.cod, g.dom
    table_size = x.n ** b.n if b.n else 1
    counts: Optional[list[int]] = [] if want_counts else None

    if not want_counts and 0 < table_size <= _FILLER_TABLE_LIMIT:
        # Forward pass: every candidate diagonal h marks the unique square
        # (h.f, g.h) it fills; a commuting square outside the marked set is a
        # counterexample.
        fillable = set()
        for h in enumerate_maps(b, x):
            fillable.add((compose(h, f).assign, compose(g, h).assign))
        for square in commutative_squares(f, g):
            if (square.top.assign, square.bottom.assign) not in fillable:
                assert not _has_filler(square)
                return LiftVerdict(holds=False, counterexample=square)
        return LiftVerdict(holds=True)

    for square in commutative_squares(f, g):
        n = 0
        if want_counts:
            for _ in fillers(square):
                n += 1
            counts.append(n)
            if n == 0:
                return LiftVerdict(
                    holds=False, counterexample=square, filler_counts=tuple(counts)
                )
        elif not _has_filler(square):
            return LiftVerdict(holds=False, counterexample=square)
    return LiftVerdict(
        holds=True, filler_counts=tuple(counts) if want_counts else None
    )


class LiftOracle:
    """Memoised lifting checks keyed by iso classes of both maps."""

    def __init__(self):
        self._memo: dict[tuple, bool] = {}

    def holds(self, f: SpaceMap, g: SpaceMap) -> bool:
        key = (map_canonical_key(f), map_canonical_key(g))
        hit = self._memo.get(key)
        if hit is None:
            hit = lifts(f, g).holds
            self._memo[key] = hit
        return hit


_oracle = LiftOracle()


def lifts_cached(f: SpaceMap, g: SpaceMap) -> bool:
    return _oracle.holds(f, g)


# -- bounded orthogonal complements ---------------------------------------------


_map_class_cache: dict[int, tuple[SpaceMap, ...]] = {}


def all_map_classes(bound: int) -> tuple[SpaceMap, ...]:
    """One representative per iso class of maps between spaces of at most
    ``bound`` points, in a fixed deterministic order."""
    if bound not in _map_class_cache:
        from .spaces import enumerate_spaces_upto

        reps = enumerate_spaces_upto(bound)
        seen: dict[tuple, SpaceMap] = {}
        for dom in reps:
            for cod in reps:
                for m in enumerate_maps(dom, cod):
                    key = map_canonical_key(m)
                    if key not in seen:
                        seen[key] = m
        _map_class_cache[bound] = tuple(
            seen[k] for k in sorted(seen.keys())
        )
    return _map_class_cache[bound]


def left_orthogonal_bounded(
    generators: Sequence[SpaceMap], bound: int
) -> tuple[SpaceMap, ...]:
    """Maps f (dom and cod <= bound points, up to iso) with f ⧄ g for all
    generators g.  One left/right step over a truncated class can only
    over-approximate the true orthogonal restricted to the bound."""
    if bound < 0:
        raise ValueError("bound must be non-negative")
    return tuple(
        f
        for f in all_map_classes(bound)
        if all(lifts_cached(f, g) for g in generators)
    )


def right_orthogonal_bounded(
    generators: Sequence[SpaceMap], bound: int
) -> tuple[SpaceMap, ...]:
    if bound < 0:
        raise ValueError("bound must be non-negative")
    return tuple(
        g
        for g in all_map_classes(bound)
        if all(lifts_cached(f, g) for f in generators)
    )
