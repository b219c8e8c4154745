"""Monotone maps between finite spaces and their combinatorics."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from .errors import (
    CodomainMismatchError,
    DomainMismatchError,
    ForeignPointError,
    NonMonotoneError,
    NotCommutingError,
)
from .spaces import FinSpace, _bits, _transitive_closure, coproduct


class SpaceMap:
    """A monotone total point assignment ``dom -> cod``."""

    __slots__ = ("dom", "cod", "assign")

    def __init__(self, dom: FinSpace, cod: FinSpace, assign: Sequence[int], _checked=False):
        self.dom = dom
        self.cod = cod
        self.assign = tuple(assign)
        if not _checked:
            if len(self.assign) != dom.n:
                raise ForeignPointError("assignment must cover every domain point")
            for v in self.assign:
                if not 0 <= v < cod.n:
                    raise ForeignPointError(f"assignment target {v} outside codomain")
            for i in range(dom.n):
                for j in _bits(dom.rel[i]):
                    if not cod.rel[self.assign[i]] >> self.assign[j] & 1:
                        raise NonMonotoneError(
                            f"arrow {i}->{j} has no image arrow "
                            f"{self.assign[i]}->{self.assign[j]}",
                            pair=(i, j),
                        )

    def __call__(self, i: int) -> int:
        return self.assign[i]

    def __eq__(self, other):
        return (
            isinstance(other, SpaceMap)
            and self.dom == other.dom
            and self.cod == other.cod
            and self.assign == other.assign
        )

    def __hash__(self):
        return hash((self.dom, self.cod, self.assign))

    def __repr__(self):
        return f"SpaceMap({self.assign}, dom={self.dom.rel}, cod={self.cod.rel})"

    def image_mask(self) -> int:
        out = 0
        for v in self.assign:
            out |= 1 << v
        return out

    def fibre(self, y: int) -> int:
        self.cod._check_point(y)
        return sum(1 << i for i, v in enumerate(self.assign) if v == y)

    def is_identity(self) -> bool:
        return self.dom == self.cod and self.assign == tuple(range(self.dom.n))

    def is_iso(self) -> bool:
        if self.dom.n != self.cod.n or len(set(self.assign)) != self.dom.n:
            return False
        return all(
            self.dom.has_arrow(i, j)
            == self.cod.has_arrow(self.assign[i], self.assign[j])
            for i in range(self.dom.n)
            for j in range(self.dom.n)
        )


def make_map(dom: FinSpace, cod: FinSpace, assign) -> SpaceMap:
    """Validated construction; ``assign`` maps labels or indices."""
    if assign and isinstance(assign, dict):
        idx = [None] * dom.n
        for k, v in assign.items():
            idx[dom.index_of_label(k)] = cod.index_of_label(v)
        if any(v is None for v in idx):
            raise ForeignPointError("assignment must cover every domain point")
        assign = idx
    return SpaceMap(dom, cod, assign)


def identity(space: FinSpace) -> SpaceMap:
    return SpaceMap(space, space, tuple(range(space.n)), _checked=True)


def compose(g: SpaceMap, f: SpaceMap) -> SpaceMap:
    """g after f; requires exact space equality at the interface."""
    if f.cod != g.dom:
        raise CodomainMismatchError("codomain of f must equal domain of g")
    return SpaceMap(f.dom, g.cod, tuple(g.assign[v] for v in f.assign), _checked=True)


def point_space(label: str = "x") -> FinSpace:
    from .spaces import make_space

    return make_space(1, (), labels=(label,))


def terminal_map(space: FinSpace, point: Optional[FinSpace] = None) -> SpaceMap:
    target = point if point is not None else point_space()
    if target.n != 1:
        raise CodomainMismatchError("terminal target must be a single point")
    return SpaceMap(space, target, (0,) * space.n, _checked=True)


# -- enumeration ---------------------------------------------------------------


@lru_cache(maxsize=65536)
def _monotone_assignments(dom_key, cod_key) -> tuple[tuple[int, ...], ...]:
    dom_n, dom_rel = dom_key
    cod_n, cod_rel = cod_key
    if dom_n == 0:
        return ((),)
    if cod_n == 0:
        return ()
    out = []
    assign = [0] * dom_n

    def extend(i):
        if i == dom_n:
            out.append(tuple(assign))
            return
        for v in range(cod_n):
            ok = True
            for j in range(i):
                fwd = dom_rel[i] >> j & 1
                if fwd and not cod_rel[v] >> assign[j] & 1:
                    ok = False
                    break
                back = dom_rel[j] >> i & 1
                if back and not cod_rel[assign[j]] >> v & 1:
                    ok = False
                    break
            if ok:
                assign[i] = v
                extend(i + 1)

    extend(0)
    return tuple(out)


def enumerate_maps(dom: FinSpace, cod: FinSpace) -> list[SpaceMap]:
    """Every monotone map exactly once, in lexicographic assignment order."""
    return [
        SpaceMap(dom, cod, a, _checked=True)
        for a in _monotone_assignments(dom.structure_key(), cod.structure_key())
    ]


# -- predicates ----------------------------------------------------------------


@dataclass(frozen=True)
class MapPredicates:
    surjective: bool
    injective: bool
    closed: bool
    open: bool
    dense_image: bool
    induced_topology: bool
    final_topology: bool
    quotient: bool

    @property
    def proper(self) -> bool:
        # For maps of finite spaces proper and closed agree.
        return self.closed

    def as_dict(self) -> dict:
        return {
            "surjective": self.surjective,
            "injective": self.injective,
            "closed": self.closed,
            "open": self.open,
            "dense_image": self.dense_image,
            "induced_topology": self.induced_topology,
            "final_topology": self.final_topology,
            "quotient": self.quotient,
            "proper": self.proper,
        }


def is_closed_map(f: SpaceMap) -> bool:
    # Enough to check point closures: every closed set is a finite union of
    # them and images distribute over unions.
    for i in range(f.dom.n):
        img = 0
        for j in _bits(f.dom.rel[i]):
            img |= 1 << f.assign[j]
        if not f.cod.is_closed_set(img):
            return False
    return True


def is_open_map(f: SpaceMap) -> bool:
    for i in range(f.dom.n):
        img = 0
        for j in _bits(f.dom.min_open_neighbourhood(i)):
            img |= 1 << f.assign[j]
        if not f.cod.is_open_set(img):
            return False
    return True


def has_dense_image(f: SpaceMap) -> bool:
    return f.cod.closure(f.image_mask()) == (1 << f.cod.n) - 1


def has_induced_topology(f: SpaceMap) -> bool:
    # Pointwise: the domain preorder must be pulled back from the codomain.
    for i in range(f.dom.n):
        for j in range(f.dom.n):
            if f.cod.rel[f.assign[i]] >> f.assign[j] & 1 and not f.dom.rel[i] >> j & 1:
                return False
    return True


def has_final_topology(f: SpaceMap) -> bool:
    for subset in range(1 << f.cod.n):
        pre = sum(1 << i for i, v in enumerate(f.assign) if subset >> v & 1)
        if f.cod.is_closed_set(subset) != f.dom.is_closed_set(pre):
            return False
    return True


def map_predicates(f: SpaceMap) -> MapPredicates:
    surjective = f.image_mask() == (1 << f.cod.n) - 1
    injective = len(set(f.assign)) == f.dom.n
    final = has_final_topology(f)
    return MapPredicates(
        surjective=surjective,
        injective=injective,
        closed=is_closed_map(f),
        open=is_open_map(f),
        dense_image=has_dense_image(f),
        induced_topology=has_induced_topology(f),
        final_topology=final,
        quotient=surjective and final,
    )


def has_connected_fibres(f: SpaceMap) -> bool:
    for y in range(f.cod.n):
        fibre = f.fibre(y)
        if fibre and not f.dom.subspace(fibre).is_connected():
            return False
    return True


def preserves_disjoint_closures(f: SpaceMap) -> bool:
    """Disjoint closed subsets of the domain keep disjoint closures downstairs.

    This is the subspace reading of the separation condition; it matches the
    lifting form only for maps that are injective with induced topology.
    """
    closed_sets = [s for s in f.dom.closed_subsets() if s]
    for a in closed_sets:
        for b in closed_sets:
            if a & b:
                continue
            img_a = img_b = 0
            for i in _bits(a):
                img_a |= 1 << f.assign[i]
            for i in _bits(b):
                img_b |= 1 << f.assign[i]
            if f.cod.closure(img_a) & f.cod.closure(img_b):
                return False
    return True


def separates_closed_preimages(f: SpaceMap) -> bool:
    """Every disjoint closed pair upstairs is exactly the preimage of a
    disjoint closed pair downstairs.

    Direct subset combinatorics for what a diagonal against the collapsed V
    provides: the top map carries two disjoint closed subsets of the domain,
    the filler must produce codomain subsets pulling back to them on the nose.
    """
    dom_closed = list(f.dom.closed_subsets())
    cod_closed = list(f.cod.closed_subsets())
    preimage = {}
    for c in cod_closed:
        pre = 0
        for i, v in enumerate(f.assign):
            if c >> v & 1:
                pre |= 1 << i
        preimage[c] = pre
    for b1 in dom_closed:
        for b2 in dom_closed:
            if b1 & b2:
                continue
            if not any(
                preimage[c1] == b1 and preimage[c2] == b2
                for c1 in cod_closed
                for c2 in cod_closed
                if not c1 & c2
            ):
                return False
    return True


@dataclass(frozen=True)
class FibreConditions:
    two_bounded_above_not_below: bool
    indistinguishable_pair: bool
    image_not_clopen: bool

    def as_dict(self) -> dict:
        return {
            "cond_two_bounded_above_not_below": self.two_bounded_above_not_below,
            "cond_indistinguishable_pair": self.indistinguishable_pair,
            "cond_image_not_clopen": self.image_not_clopen,
        }


def fibre_conditions(g: SpaceMap) -> FibreConditions:
    """The fibre-shape tests behind the non-surjective-closed-map criteria.

    "Above" reads within the fibre: p sits below w when p is in cl(w).
    """
    bounded = False
    indist = False
    for y in range(g.cod.n):
        fibre = g.fibre(y)
        pts = list(_bits(fibre))
        for pi, p in enumerate(pts):
            for q in pts[pi + 1 :]:
                if g.dom.indistinguishable(p, q):
                    indist = True
                if bounded:
                    continue
                above = any(
                    g.dom.rel[w] >> p & 1 and g.dom.rel[w] >> q & 1 for w in pts
                )
                below = g.dom.rel[p] & g.dom.rel[q] & fibre
                if above and not below:
                    bounded = True
    image = g.image_mask()
    clopen = g.cod.is_closed_set(image) and g.cod.is_open_set(image)
    return FibreConditions(
        two_bounded_above_not_below=bounded,
        indistinguishable_pair=indist,
        image_not_clopen=not clopen,
    )


# -- limits and colimits --------------------------------------------------------


def pullback(f: SpaceMap, g: SpaceMap) -> tuple[FinSpace, SpaceMap, SpaceMap]:
    """Canonical pullback of ``f: X->Z`` and ``g: Y->Z``.

    Carrier = pairs (x, y) with f(x) = g(y) in x-major order, relation
    componentwise; returns (P, p1: P->X, p2: P->Y).
    """
    if f.cod != g.cod:
        raise CodomainMismatchError("pullback needs a shared codomain")
    x, y = f.dom, g.dom
    pairs = [(i, j) for i in range(x.n) for j in range(y.n) if f.assign[i] == g.assign[j]]
    pos = {p: k for k, p in enumerate(pairs)}
    rel = []
    for (i, j) in pairs:
        row = 0
        for i2 in _bits(x.rel[i]):
            for j2 in _bits(y.rel[j]):
                if (i2, j2) in pos:
                    row |= 1 << pos[(i2, j2)]
        rel.append(row)
    labels = None
    if pairs:
        labels = tuple(f"{x.label_of(i)}.{y.label_of(j)}" for (i, j) in pairs)
    p = FinSpace(len(pairs), rel, labels)
    p1 = SpaceMap(p, x, tuple(i for (i, _) in pairs), _checked=True)
    p2 = SpaceMap(p, y, tuple(j for (_, j) in pairs), _checked=True)
    return p, p1, p2


def is_pullback_square(p1: SpaceMap, p2: SpaceMap, f: SpaceMap, g: SpaceMap) -> bool:
    """True when the commuting square (p1, p2 over f, g) is a pullback."""
    if p1.dom != p2.dom or p1.cod != f.dom or p2.cod != g.dom or f.cod != g.cod:
        raise CodomainMismatchError("square shapes do not match")
    if compose(f, p1) != compose(g, p2):
        raise NotCommutingError("the square does not commute")
    canon, q1, q2 = pullback(f, g)
    apex = p1.dom
    if apex.n != canon.n:
        return False
    pos = {(q1.assign[k], q2.assign[k]): k for k in range(canon.n)}
    try:
        comparison = tuple(pos[(p1.assign[w], p2.assign[w])] for w in range(apex.n))
    except KeyError:
        return False
    if len(set(comparison)) != apex.n:
        return False
    return all(
        apex.has_arrow(w, w2) == canon.has_arrow(comparison[w], comparison[w2])
        for w in range(apex.n)
        for w2 in range(apex.n)
    )


def pushout(f: SpaceMap, g: SpaceMap) -> tuple[FinSpace, SpaceMap, SpaceMap]:
    """Pushout of ``f: Z->X``, ``g: Z->Y``: coproduct glued along f(z) ~ g(z)."""
    if f.dom != g.dom:
        raise DomainMismatchError("pushout needs a shared domain")
    x, y = f.cod, g.cod
    total = x.n + y.n
    parent = list(range(total))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for z in range(f.dom.n):
        union(f.assign[z], x.n + g.assign[z])
    reps = sorted({find(i) for i in range(total)})
    cls = {r: k for k, r in enumerate(reps)}
    n = len(reps)
    co = coproduct(x, y)
    rows = [1 << k for k in range(n)]
    for i in range(total):
        for j in _bits(co.rel[i]):
            rows[cls[find(i)]] |= 1 << cls[find(j)]
    space = FinSpace(n, _transitive_closure(rows, n), None)
    ix = SpaceMap(x, space, tuple(cls[find(i)] for i in range(x.n)), _checked=True)
    iy = SpaceMap(y, space, tuple(cls[find(x.n + j)] for j in range(y.n)), _checked=True)
    return space, ix, iy


# -- retracts -------------------------------------------------------------------


@dataclass(frozen=True)
class RetractWitness:
    """Maps exhibiting f: A->B as a retract of g: X->Y.

    i: A->X, r: X->A with r.i = id_A; j: B->Y, s: Y->B with s.j = id_B;
    the squares g.i = j.f and f.r = s.g commute.
    """

    i: SpaceMap
    r: SpaceMap
    j: SpaceMap
    s: SpaceMap


def is_retract_of(f: SpaceMap, g: SpaceMap) -> Optional[RetractWitness]:
    """Exhaustive witness search; None when f is not a retract of g."""
    a, b = f.dom, f.cod
    x, y = g.dom, g.cod
    id_a, id_b = identity(a), identity(b)
    sections_a = [
        (i, r)
        for i in enumerate_maps(a, x)
        for r in enumerate_maps(x, a)
        if compose(r, i) == id_a
    ]
    if not sections_a:
        return None
    sections_b = [
        (j, s)
        for j in enumerate_maps(b, y)
        for s in enumerate_maps(y, b)
        if compose(s, j) == id_b
    ]
    for i, r in sections_a:
        gi = compose(g, i)
        fr = compose(f, r)
        for j, s in sections_b:
            if gi == compose(j, f) and fr == compose(s, g):
                return RetractWitness(i=i, r=r, j=j, s=s)
    return None


# -- pullback recognition and factorization --------------------------------------


def is_pullback_of(f: SpaceMap, g: SpaceMap) -> Optional[tuple[SpaceMap, SpaceMap]]:
    """Witness (b, t) exhibiting f as the base change of g along b, if any.

    b: cod(f) -> cod(g) and t: dom(f) -> dom(g) with g.t = b.f and the
    comparison into the canonical pullback an isomorphism.
    """
    for b in enumerate_maps(f.cod, g.cod):
        canon, q1, q2 = pullback(b, g)
        if canon.n != f.dom.n:
            continue
        for t in enumerate_maps(f.dom, g.dom):
            if compose(g, t) != compose(b, f):
                continue
            pos = {(q1.assign[k], q2.assign[k]): k for k in range(canon.n)}
            try:
                comparison = tuple(
                    pos[(f.assign[w], t.assign[w])] for w in range(f.dom.n)
                )
            except KeyError:
                continue
            if len(set(comparison)) != f.dom.n:
                continue
            if all(
                f.dom.has_arrow(w, w2)
                == canon.has_arrow(comparison[w], comparison[w2])
                for w in range(f.dom.n)
                for w2 in range(f.dom.n)
            ):
                return b, t
    return None


def map_canonical_key(f: SpaceMap) -> tuple:
    """Iso-class key of a map: canonical spaces plus orbit-minimal assignment."""
    cd, cc = f.dom.canonical(), f.cod.canonical()
    base = tuple(cc.perm[f.assign[i]] for i in _inverse(cd.perm))
    best = None
    for ad in cd.automorphisms:
        for ac in cc.automorphisms:
            cand = tuple(ac[base[ad[k]]] for k in range(f.dom.n))
            if best is None or cand < best:
                best = cand
    return (cd.code, cc.code, best)


def _inverse(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for old, new in enumerate(perm):
        inv[new] = old
    return inv


def map_iso(f: SpaceMap, g: SpaceMap) -> bool:
    """Maps equal up to isomorphisms of both endpoints."""
    return map_canonical_key(f) == map_canonical_key(g)


def _pullback_size_feasible(n_dom: int, n_cod: int, g: SpaceMap) -> bool:
    # The canonical pullback along b: B -> cod(g) has sum_w |g^-1(b(w))|
    # points; over a final codomain this is exactly |B| * |dom(g)|.
    if g.cod.n == 1:
        return n_dom == n_cod * g.dom.n
    return n_dom <= n_cod * g.dom.n


def _factor_arms(n_dom: int, n_cod: int, generators: Sequence[SpaceMap]) -> tuple[bool, bool, bool]:
    """(allow_surjective, allow_injective, allow_any) candidate arms for a
    factor of the given sizes.  Base changes over a point are product
    projections, hence surjective; base changes of a mono are mono."""
    surj_arm = inj_arm = any_arm = False
    for g in generators:
        if not _pullback_size_feasible(n_dom, n_cod, g):
            continue
        if g.cod.n == 1:
            surj_arm = True
        elif len(set(g.assign)) == g.dom.n:
            inj_arm = True
        else:
            any_arm = True
    return surj_arm, inj_arm, any_arm


def composition_of_pullbacks(
    target: SpaceMap,
    generators: Sequence[SpaceMap],
    max_len: int = 4,
    max_points: int = 6,
    merge_injective: bool = False,
) -> Optional[list[SpaceMap]]:
    """Search for target = p_n . ... . p_1 with each factor a pullback of a
    generator, intermediate spaces at most ``max_points`` points.

    Returns the factor list (first applied first) or None when the bounded
    search space is exhausted.  ``merge_injective`` skips chains with two
    injective factors in a row; only sound when the injective base changes of
    the generators form a composition-closed class (closed embeddings do).
    """
    from .spaces import enumerate_spaces_upto

    stages = enumerate_spaces_upto(max_points)
    if not any(s.structure_key() == target.cod.structure_key() for s in stages):
        stages = stages + [target.cod]
    pb_cache: dict = {}

    def factor_witness(p: SpaceMap) -> bool:
        k = map_canonical_key(p)
        if k not in pb_cache:
            pb_cache[k] = any(is_pullback_of(p, g) is not None for g in generators)
        return pb_cache[k]

    seen: dict = {}
    frontier: list[tuple[SpaceMap, list[SpaceMap], bool]] = [
        (identity(target.dom), [], False)
    ]
    for _ in range(max_len):
        nxt = []
        for h, chain, last_injective in frontier:
            w = h.cod
            for w2 in stages:
                surj_arm, inj_arm, any_arm = _factor_arms(w.n, w2.n, generators)
                if merge_injective and last_injective:
                    inj_arm = False
                if not (surj_arm or inj_arm or any_arm):
                    continue
                full = (1 << w2.n) - 1
                for p in enumerate_maps(w, w2):
                    injective = len(set(p.assign)) == w.n
                    if merge_injective and injective and last_injective:
                        continue
                    if not any_arm:
                        if not (
                            (surj_arm and p.image_mask() == full)
                            or (inj_arm and injective)
                        ):
                            continue
                    if not factor_witness(p):
                        continue
                    h2 = compose(p, h)
                    if h2.cod.structure_key() == target.cod.structure_key():
                        for phi in enumerate_maps(h2.cod, target.cod):
                            if phi.is_iso() and compose(phi, h2) == target:
                                return chain + [compose(phi, p)]
                    key = map_canonical_key(h2)
                    if key in seen and seen[key] <= injective:
                        continue
                    seen[key] = injective
                    nxt.append((h2, chain + [p], injective))
        frontier = nxt
        if not frontier:
            break
    return None
