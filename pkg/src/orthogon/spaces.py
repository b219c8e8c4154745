"""Finite topological spaces as preorders.

A finite space is stored as its specialisation preorder: ``rel[i]`` is the
bitmask of points ``j`` lying in the closure of ``i`` (the arrow ``i -> j``).
Rows always contain the diagonal bit and are transitively closed, so a subset
is closed exactly when it is closed under following arrows out of its members.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence

from .errors import DuplicateLabelError, ForeignPointError, UnknownLabelInArrowError

_DEFAULT_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _transitive_closure(rows: list[int], n: int) -> tuple[int, ...]:
    # Warshall on bitmask rows; n <= ~8 in practice so this is effectively free.
    for k in range(n):
        kbit = 1 << k
        row_k = rows[k]
        for i in range(n):
            if rows[i] & kbit:
                rows[i] |= row_k
    # One extra sweep in case the previous pass grew row_k after its use.
    changed = True
    while changed:
        changed = False
        for i in range(n):
            acc = rows[i]
            for j in _bits(rows[i]):
                acc |= rows[j]
            if acc != rows[i]:
                rows[i] = acc
                changed = True
    return tuple(rows)


class FinSpace:
    """An immutable finite space; points are the indices ``0..n-1``.

    Labels are presentation metadata only: they never influence canonical
    forms, isomorphism or any predicate.
    """

    __slots__ = ("n", "rel", "labels", "_canon")

    def __init__(self, n: int, rel: Sequence[int], labels: Optional[Sequence[str]] = None):
        self.n = n
        self.rel = tuple(rel)
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != n:
                raise DuplicateLabelError("label count does not match point count")
            if len(set(labels)) != n:
                raise DuplicateLabelError("labels must be pairwise distinct")
        self.labels = labels
        self._canon = None
        if len(self.rel) != n:
            raise ValueError("relation row count does not match point count")
        for i, row in enumerate(self.rel):
            if not row & (1 << i):
                raise ValueError("relation must be reflexive")
            if row >> n:
                raise ValueError("relation row addresses points outside the space")

    # -- identity ---------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, FinSpace)
            and self.n == other.n
            and self.rel == other.rel
            and self.labels == other.labels
        )

    def __hash__(self):
        return hash((self.n, self.rel, self.labels))

    def __repr__(self):
        return f"FinSpace(n={self.n}, rel={self.rel}, labels={self.labels})"

    def structure_key(self) -> tuple:
        """Label-free content key, used by memo tables."""
        return (self.n, self.rel)

    # -- labels ------------------------------------------------------------

    def label_of(self, i: int) -> str:
        if self.labels is not None:
            return self.labels[i]
        if i < len(_DEFAULT_ALPHABET):
            return _DEFAULT_ALPHABET[i]
        return f"p{i}"

    def all_labels(self) -> tuple[str, ...]:
        return tuple(self.label_of(i) for i in range(self.n))

    def index_of_label(self, label: str) -> int:
        for i in range(self.n):
            if self.label_of(i) == label:
                return i
        raise ForeignPointError(f"no point labelled {label!r}")

    def relabel(self, labels: Sequence[str]) -> "FinSpace":
        return FinSpace(self.n, self.rel, labels)

    # -- topology ----------------------------------------------------------

    def points(self) -> range:
        return range(self.n)

    def has_arrow(self, i: int, j: int) -> bool:
        """True when ``j`` lies in the closure of ``i``."""
        self._check_point(i)
        self._check_point(j)
        return bool(self.rel[i] >> j & 1)

    def point_closure(self, i: int) -> int:
        self._check_point(i)
        return self.rel[i]

    def closure(self, subset: int) -> int:
        """Smallest closed superset of ``subset`` (given as a bitmask)."""
        self._check_subset(subset)
        out = 0
        for i in _bits(subset):
            out |= self.rel[i]
        return out

    def is_closed_set(self, subset: int) -> bool:
        self._check_subset(subset)
        return self.closure(subset) == subset

    def is_open_set(self, subset: int) -> bool:
        self._check_subset(subset)
        full = (1 << self.n) - 1
        return self.is_closed_set(full & ~subset)

    def min_open_neighbourhood(self, i: int) -> int:
        """Smallest open set containing ``i``: all points whose closure meets it."""
        self._check_point(i)
        return sum(1 << j for j in range(self.n) if self.rel[j] >> i & 1)

    def closed_subsets(self) -> Iterator[int]:
        for subset in range(1 << self.n):
            if self.is_closed_set(subset):
                yield subset

    def subset_from_labels(self, labels: Iterable[str]) -> int:
        mask = 0
        for lab in labels:
            mask |= 1 << self.index_of_label(lab)
        return mask

    def _check_point(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise ForeignPointError(f"point {i} is not a point of this space")

    def _check_subset(self, subset: int) -> None:
        if subset < 0 or subset >> self.n:
            raise ForeignPointError("subset contains points outside the space")

    # -- predicates ---------------------------------------------------------

    def indistinguishable(self, i: int, j: int) -> bool:
        return self.has_arrow(i, j) and self.has_arrow(j, i)

    def indistinguishability_classes(self) -> list[int]:
        seen = 0
        classes = []
        for i in range(self.n):
            if seen >> i & 1:
                continue
            cls = sum(
                1 << j
                for j in range(self.n)
                if self.rel[i] >> j & 1 and self.rel[j] >> i & 1
            )
            classes.append(cls)
            seen |= cls
        return classes

    def is_t0(self) -> bool:
        return all(
            not (self.rel[i] >> j & 1 and self.rel[j] >> i & 1)
            for i in range(self.n)
            for j in range(i + 1, self.n)
        )

    def is_t1(self) -> bool:
        return all(self.rel[i] == 1 << i for i in range(self.n))

    def is_discrete(self) -> bool:
        return self.is_t1()

    def is_indiscrete(self) -> bool:
        full = (1 << self.n) - 1
        return all(row == full for row in self.rel)

    def is_connected(self) -> bool:
        # Connectivity of the symmetrised arrow graph.  The empty space is
        # pinned as not connected (it is the union of zero open sets).
        if self.n == 0:
            return False
        reach = 1
        frontier = [0]
        while frontier:
            i = frontier.pop()
            nbrs = self.rel[i] | sum(
                1 << j for j in range(self.n) if self.rel[j] >> i & 1
            )
            new = nbrs & ~reach
            reach |= new
            frontier.extend(_bits(new))
        return reach == (1 << self.n) - 1

    def connected_components(self) -> list[int]:
        """Bitmask per component of the symmetrised arrow graph."""
        components = []
        seen = 0
        for start in range(self.n):
            if seen >> start & 1:
                continue
            reach = 1 << start
            frontier = [start]
            while frontier:
                i = frontier.pop()
                nbrs = self.rel[i] | sum(
                    1 << j for j in range(self.n) if self.rel[j] >> i & 1
                )
                new = nbrs & ~reach
                reach |= new
                frontier.extend(_bits(new))
            components.append(reach)
            seen |= reach
        return components

    def subspace(self, subset: int) -> "FinSpace":
        """Induced subspace on the points of ``subset``, in index order."""
        self._check_subset(subset)
        pts = list(_bits(subset))
        pos = {p: k for k, p in enumerate(pts)}
        rel = [
            sum(1 << pos[q] for q in _bits(self.rel[p] & subset)) for p in pts
        ]
        labels = tuple(self.label_of(p) for p in pts) if self.labels else None
        return FinSpace(len(pts), rel, labels)

    # -- canonical form -----------------------------------------------------

    def canonical(self) -> "_CanonicalData":
        if self._canon is None:
            self._canon = _canonicalize(self.n, self.rel)
        return self._canon


def space_predicates(space: FinSpace) -> dict:
    return {
        "is_T0": space.is_t0(),
        "is_T1": space.is_t1(),
        "is_connected": space.is_connected(),
        "is_discrete": space.is_discrete(),
        "is_indiscrete": space.is_indiscrete(),
    }


# -- construction ------------------------------------------------------------


def make_space(
    n: int,
    arrows: Iterable[tuple[str, str]] = (),
    labels: Optional[Sequence[str]] = None,
) -> FinSpace:
    """Build a space from arrow pairs; the relation is closed on construction.

    Arrow endpoints refer to ``labels`` when given and to the default labels
    (``a``, ``b``, ... by index) otherwise.
    """
    if n < 0:
        raise ValueError("point count must be non-negative")
    if labels is not None and len(set(labels)) != len(tuple(labels)):
        raise DuplicateLabelError("labels must be pairwise distinct")
    probe = FinSpace(n, [1 << i for i in range(n)], labels)
    index = {probe.label_of(i): i for i in range(n)}
    rows = [1 << i for i in range(n)]
    for src, dst in arrows:
        if src not in index or dst not in index:
            raise UnknownLabelInArrowError(f"arrow ({src!r}, {dst!r}) names an unknown point")
        rows[index[src]] |= 1 << index[dst]
    return FinSpace(n, _transitive_closure(rows, n), labels)


def space_from_masks(n: int, rel: Sequence[int], labels=None) -> FinSpace:
    """Wrap an already reflexive-transitive mask table (used by enumerators)."""
    return FinSpace(n, rel, labels)


def product(x: FinSpace, y: FinSpace) -> FinSpace:
    """Carrier = point pairs in x-major order, relation componentwise."""
    n = x.n * y.n
    rel = []
    for i in range(x.n):
        for j in range(y.n):
            row = 0
            for i2 in _bits(x.rel[i]):
                for j2 in _bits(y.rel[j]):
                    row |= 1 << (i2 * y.n + j2)
            rel.append(row)
    labels = None
    if x.n and y.n:
        labels = tuple(
            f"{x.label_of(i)}.{y.label_of(j)}" for i in range(x.n) for j in range(y.n)
        )
    return FinSpace(n, rel, labels)


def coproduct(x: FinSpace, y: FinSpace) -> FinSpace:
    """Disjoint union; x points first, then y points."""
    rel = list(x.rel) + [row << x.n for row in y.rel]
    labels = None
    if x.n + y.n:
        labels = tuple(
            [f"l.{x.label_of(i)}" for i in range(x.n)]
            + [f"r.{y.label_of(j)}" for j in range(y.n)]
        )
    return FinSpace(x.n + y.n, rel, labels)


# -- canonical labelling ------------------------------------------------------


@dataclass(frozen=True)
class _CanonicalData:
    code: tuple
    perm: tuple[int, ...]  # old index -> canonical index
    automorphisms: tuple[tuple[int, ...], ...]  # of the *canonical* relabelling


@dataclass(frozen=True)
class CanonicalForm:
    """Total-order-comparable code; equal codes mean isomorphic spaces."""

    code: tuple

    def __lt__(self, other):
        return self.code < other.code


def _refine_colours(n: int, rel: Sequence[int]) -> list[int]:
    cols = [(bin(rel[i]).count("1"),) for i in range(n)]
    indeg = [sum(1 for j in range(n) if rel[j] >> i & 1) for i in range(n)]
    cols = [cols[i] + (indeg[i],) for i in range(n)]
    while True:
        ranks = {c: r for r, c in enumerate(sorted(set(cols)))}
        base = [ranks[c] for c in cols]
        nxt = []
        for i in range(n):
            out = tuple(sorted(base[j] for j in _bits(rel[i])))
            inn = tuple(sorted(base[j] for j in range(n) if rel[j] >> i & 1))
            nxt.append((base[i], out, inn))
        if len(set(nxt)) == len(set(cols)) and all(
            (nxt[i] == nxt[j]) == (cols[i] == cols[j])
            for i in range(n)
            for j in range(i + 1, n)
        ):
            return base
        cols = nxt


def _relation_under(perm: Sequence[int], n: int, rel: Sequence[int]) -> tuple[int, ...]:
    # perm maps old -> new; rows of the relabelled space in new order.
    inv = [0] * n
    for old, new in enumerate(perm):
        inv[new] = old
    rows = []
    for new in range(n):
        old = inv[new]
        rows.append(sum(1 << perm[j] for j in _bits(rel[old])))
    return tuple(rows)


def _canonicalize(n: int, rel: Sequence[int]) -> _CanonicalData:
    if n == 0:
        return _CanonicalData(code=(0, ()), perm=(), automorphisms=((),))
    colours = _refine_colours(n, rel)

    # The code is built one point at a time as (row-bits among placed+self,
    # column-bits from placed), which makes lexicographic prefix pruning sound:
    # extending a placement only appends chunks, never rewrites earlier ones.
    best: dict = {"code": None, "perms": []}

    def backtrack(placed: list[int], chunks: list[tuple[int, int]], remaining: list[int]):
        if best["code"] is not None and chunks:
            prefix = best["code"][: len(chunks)]
            if tuple(chunks) > prefix:
                return
        if not remaining:
            code = tuple(chunks)
            perm = [0] * n
            for new, old in enumerate(placed):
                perm[old] = new
            if best["code"] is None or code < best["code"]:
                best["code"] = code
                best["perms"] = [tuple(perm)]
            elif code == best["code"]:
                best["perms"].append(tuple(perm))
            return
        min_colour = min(colours[i] for i in remaining)
        for old in remaining:
            if colours[old] != min_colour:
                continue
            t = len(placed)
            row = sum(1 << k for k, o in enumerate(placed) if rel[old] >> o & 1) | (1 << t)
            col = sum(1 << k for k, o in enumerate(placed) if rel[o] >> old & 1)
            chunks.append((row, col))
            placed.append(old)
            backtrack(placed, chunks, [i for i in remaining if i != old])
            placed.pop()
            chunks.pop()

    backtrack([], [], list(range(n)))
    perm = best["perms"][0]
    # Automorphisms of the canonical relabelling: compositions q . p^-1 for
    # every optimal permutation q.
    inv = [0] * n
    for old, new in enumerate(perm):
        inv[new] = old
    autos = sorted({tuple(q[inv[v]] for v in range(n)) for q in best["perms"]})
    return _CanonicalData(code=(n, best["code"]), perm=perm, automorphisms=tuple(autos))


def canonical_form(space: FinSpace) -> CanonicalForm:
    return CanonicalForm(space.canonical().code)


def canonical_representative(space: FinSpace) -> FinSpace:
    """The same space relabelled into canonical point order, labels dropped."""
    data = space.canonical()
    return FinSpace(space.n, _relation_under(data.perm, space.n, space.rel), None)


def iso(x: FinSpace, y: FinSpace) -> Optional[tuple[int, ...]]:
    """A relation-preserving bijection x -> y (as an index tuple), if any."""
    if x.n != y.n:
        return None
    cx, cy = x.canonical(), y.canonical()
    if cx.code != cy.code:
        return None
    inv_y = [0] * y.n
    for old, new in enumerate(cy.perm):
        inv_y[new] = old
    witness = tuple(inv_y[cx.perm[i]] for i in range(x.n))
    return witness


def automorphisms(space: FinSpace) -> list[tuple[int, ...]]:
    """All relation-preserving permutations of the space's own points."""
    data = space.canonical()
    perm = data.perm
    n = space.n
    inv = [0] * n
    for old, new in enumerate(perm):
        inv[new] = old
    out = set()
    for a in data.automorphisms:
        out.add(tuple(inv[a[perm[i]]] for i in range(n)))
    return sorted(out)


# -- enumeration --------------------------------------------------------------


@lru_cache(maxsize=None)
def _labelled_posets(k: int) -> tuple[tuple[int, ...], ...]:
    """All posets on k labelled points as closed reflexive mask tables.

    Extends each poset on k-1 points by the new greatest label with a
    (below-set, above-set) pair: the below-set must be a down-set, the
    above-set an up-set, and everything below must already sit under
    everything above.
    """
    if k == 0:
        return ((),)
    out = []
    new_bit = 1 << (k - 1)
    for rows in _labelled_posets(k - 1):
        n = k - 1
        down_sets = []
        for mask in range(1 << n):
            if all(rows[i] & mask == rows[i] for i in _bits(mask)):
                down_sets.append(mask)
        up_sets = []
        ups = [sum(1 << j for j in range(n) if rows[j] >> i & 1) for i in range(n)]
        for mask in range(1 << n):
            if all(ups[i] & mask == ups[i] for i in _bits(mask)):
                up_sets.append(mask)
        for below in down_sets:
            for above in up_sets:
                if below & above:
                    continue
                # i < new < j forces i < j already.
                if any(rows[j] & below != below for j in _bits(above)):
                    continue
                ext = [
                    rows[i] | (new_bit if above >> i & 1 else 0) for i in range(n)
                ]
                ext.append(below | new_bit)
                out.append(tuple(ext))
    return tuple(out)


def _set_partitions(items: list[int]) -> Iterator[list[list[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def enumerate_spaces(n: int, mode: str = "labelled") -> Iterator[FinSpace]:
    """Stream the finite spaces on ``n`` points.

    ``labelled`` yields every reflexive-transitive relation exactly once, as a
    block-lifted poset over each set partition.  ``upto_iso`` keeps one
    representative per canonical form.
    """
    if n < 0:
        raise ValueError("point count must be non-negative")
    if mode not in ("labelled", "upto_iso"):
        raise ValueError(f"unknown mode {mode!r}")
    seen = set()
    for partition in _set_partitions(list(range(n))):
        partition = [sorted(block) for block in partition]
        partition.sort()
        k = len(partition)
        block_mask = [sum(1 << p for p in block) for block in partition]
        block_of = {}
        for b, block in enumerate(partition):
            for p in block:
                block_of[p] = b
        for poset in _labelled_posets(k):
            rows = [0] * n
            for p in range(n):
                row = 0
                for b2 in _bits(poset[block_of[p]]):
                    row |= block_mask[b2]
                rows[p] = row
            space = FinSpace(n, rows, None)
            if mode == "labelled":
                yield space
            else:
                code = space.canonical().code
                if code not in seen:
                    seen.add(code)
                    yield canonical_representative(space)


_upto_cache: dict[int, tuple[FinSpace, ...]] = {}


def enumerate_spaces_upto(k: int, include_empty: bool = True) -> list[FinSpace]:
    """Representatives of all iso classes with at most ``k`` points."""
    if k not in _upto_cache:
        out: list[FinSpace] = []
        for n in range(k + 1):
            out.extend(enumerate_spaces(n, "upto_iso"))
        _upto_cache[k] = tuple(out)
    reps = _upto_cache[k]
    return [s for s in reps if s.n or include_empty]


# -- JSON encoding ------------------------------------------------------------


def space_to_json(space: FinSpace) -> dict:
    """``{"points": [...], "arrows": [...]}`` with arrows the strict part."""
    labels = space.all_labels()
    arrows = sorted(
        [labels[i], labels[j]]
        for i in range(space.n)
        for j in _bits(space.rel[i])
        if i != j
    )
    return {"points": list(labels), "arrows": arrows}


def space_from_json(payload: dict) -> FinSpace:
    points = payload.get("points", [])
    arrows = [tuple(a) for a in payload.get("arrows", [])]
    return make_space(len(points), arrows, labels=points)
