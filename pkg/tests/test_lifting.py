"""Lifting engine: squares, fillers, verdicts, bounded orthogonals, and the
closure laws of orthogonal classes."""

import itertools
import random

from orthogon.catalog import KTO_GENERATORS, SIERPINSKI, TWO_DISCRETE, catalog, catalog_map
from orthogon.lifting import (
    LiftingSquare,
    all_map_classes,
    commutative_squares,
    fillers,
    left_orthogonal_bounded,
    lifts,
    lifts_cached,
    right_orthogonal_bounded,
)
from orthogon.maps import (
    SpaceMap,
    compose,
    enumerate_maps,
    identity,
    is_retract_of,
    make_map,
    map_canonical_key,
    map_predicates,
    terminal_map,
)
from orthogon.spaces import enumerate_spaces_upto, make_space, product

POINT = make_space(1, (), labels=("x",))
EMPTY = make_space(0)


def all_rep_maps(bound):
    reps = enumerate_spaces_upto(bound)
    for dom in reps:
        for cod in reps:
            yield from enumerate_maps(dom, cod)


# -- squares ---------------------------------------------------------------------


def test_squares_from_initial_object():
    f = SpaceMap(EMPTY, POINT, ())
    g = catalog_map("V_to_sierp")
    squares = list(commutative_squares(f, g))
    # the top map is unique, squares correspond to the bottoms pt -> cod(g)
    assert len(squares) == len(enumerate_maps(POINT, g.cod))


def test_single_square_for_identity_of_point():
    f = identity(POINT)
    assert len(list(commutative_squares(f, f))) == 1


def test_square_count_by_oracle():
    # brute-force oracle: all (top, bottom) pairs filtered by commutation
    f = terminal_map(TWO_DISCRETE)
    g = terminal_map(SIERPINSKI)
    squares = list(commutative_squares(f, g))
    oracle = [
        (t, b)
        for t in enumerate_maps(f.dom, g.dom)
        for b in enumerate_maps(f.cod, g.cod)
        if compose(g, t) == compose(b, f)
    ]
    assert len(squares) == len(oracle) == 4
    assert [(s.top, s.bottom) for s in squares] == oracle


def test_square_enumeration_order_tops_outer():
    f = terminal_map(TWO_DISCRETE)
    g = terminal_map(SIERPINSKI)
    tops = [s.top.assign for s in commutative_squares(f, g)]
    assert tops == sorted(tops)


# -- fillers ----------------------------------------------------------------------


def test_iso_square_has_forced_filler():
    f = make_map(SIERPINSKI, make_space(2, {("p", "q")}, labels=("p", "q")), {"o": "p", "c": "q"})
    g = catalog_map("V_to_sierp")
    for square in commutative_squares(f, g):
        found = list(fillers(square))
        assert len(found) >= 1
        forced = tuple(square.top.assign[{0: 0, 1: 1}[i]] for i in range(2))
        assert any(h.assign == forced for h in found)


def test_unfillable_square_from_t1_failure():
    # Sierpinski is not T1: the witnessing square has no filler.
    f = catalog_map("sierp_to_point")
    g = terminal_map(SIERPINSKI, point=f.cod)
    square = LiftingSquare(f=f, g=g, top=identity(SIERPINSKI), bottom=identity(f.cod))
    assert list(fillers(square)) == []


def test_identity_square_has_one_filler():
    f = identity(POINT)
    square = LiftingSquare(f=f, g=f, top=f, bottom=f)
    assert len(list(fillers(square))) == 1


def test_filler_stream_matches_brute_force():
    rng = random.Random(5)
    reps = enumerate_spaces_upto(3)
    for _ in range(120):
        f_maps = enumerate_maps(rng.choice(reps), rng.choice(reps))
        g_maps = enumerate_maps(rng.choice(reps), rng.choice(reps))
        if not f_maps or not g_maps:
            continue
        f, g = rng.choice(f_maps), rng.choice(g_maps)
        for square in itertools.islice(commutative_squares(f, g), 4):
            got = {h.assign for h in fillers(square)}
            want = {
                h.assign
                for h in enumerate_maps(f.cod, g.dom)
                if compose(h, f) == square.top and compose(g, h) == square.bottom
            }
            assert got == want


# -- verdicts ----------------------------------------------------------------------


def test_surjectivity_characterization():
    e2p = catalog_map("empty_to_point")
    for g in all_rep_maps(3):
        assert lifts(e2p, g).holds == map_predicates(g).surjective


def test_injectivity_characterization():
    d2p = catalog_map("two_discrete_to_point")
    for g in all_rep_maps(3):
        assert lifts(d2p, g).holds == map_predicates(g).injective


def test_connectedness_characterization_up_to_five_points():
    d2p = catalog_map("two_discrete_to_point")
    for x in enumerate_spaces_upto(5, include_empty=False):
        assert lifts(terminal_map(x), d2p).holds == x.is_connected()


def test_empty_space_lifting_divergence_pinned():
    # The lifting form holds vacuously for the empty space even though the
    # predicate pins the empty space as not connected.
    d2p = catalog_map("two_discrete_to_point")
    assert lifts(terminal_map(EMPTY), d2p).holds
    assert not EMPTY.is_connected()


def test_lifts_self_iff_iso():
    for f in all_rep_maps(3):
        assert lifts(f, f).holds == f.is_iso()


def test_failed_verdict_carries_verified_counterexample():
    verdict = lifts(catalog_map("two_discrete_to_point"), catalog_map("V_to_point"))
    assert not verdict.holds
    square = verdict.counterexample
    assert square is not None
    assert list(fillers(square)) == []
    assert compose(square.g, square.top) == compose(square.bottom, square.f)


def test_first_counterexample_is_deterministic():
    a = lifts(catalog_map("two_discrete_to_point"), catalog_map("V_to_point"))
    b = lifts(catalog_map("two_discrete_to_point"), catalog_map("V_to_point"))
    assert a.counterexample.top.assign == b.counterexample.top.assign
    assert a.counterexample.bottom.assign == b.counterexample.bottom.assign


def test_filler_counts_reported():
    verdict = lifts(identity(POINT), identity(POINT), want_counts=True)
    assert verdict.holds and verdict.filler_counts == (1,)


def test_verdict_stable_under_iso_replacement():
    rng = random.Random(9)
    classes = all_map_classes(2)
    for _ in range(150):
        f = rng.choice(classes)
        g = rng.choice(classes)
        base = lifts(f, g).holds
        # relabel both sides arbitrarily
        f2 = SpaceMap(f.dom.relabel(tuple(f"u{i}" for i in range(f.dom.n))),
                      f.cod.relabel(tuple(f"v{i}" for i in range(f.cod.n))), f.assign)
        g2 = SpaceMap(g.dom.relabel(tuple(f"w{i}" for i in range(g.dom.n))),
                      g.cod.relabel(tuple(f"z{i}" for i in range(g.cod.n))), g.assign)
        assert lifts(f2, g2).holds == base


def test_big_codomain_path_agrees_with_table_path():
    # push the per-square search branch and compare against the default
    import orthogon.lifting as lifting

    f = catalog_map("two_discrete_to_point")
    g = catalog_map("V_to_sierp")
    normal = lifts(f, g).holds
    old = lifting._FILLER_TABLE_LIMIT
    lifting._FILLER_TABLE_LIMIT = 0
    try:
        assert lifts(f, g).holds == normal
        for h in itertools.islice(all_rep_maps(2), 0, 200):
            assert lifts(h, g).holds == lifts_cached(h, g)
    finally:
        lifting._FILLER_TABLE_LIMIT = old


# -- bounded orthogonals ---------------------------------------------------------------


def test_left_orthogonal_of_vacuous_class_is_everything():
    assert len(left_orthogonal_bounded((), 2)) == len(all_map_classes(2))


def test_left_orthogonal_of_identity_is_everything():
    got = left_orthogonal_bounded((identity(POINT),), 2)
    assert len(got) == len(all_map_classes(2))


def test_left_orthogonal_of_gluing_contains_connected_collapses():
    gluing = catalog_map("two_discrete_to_point")
    members = {map_canonical_key(m) for m in left_orthogonal_bounded((gluing,), 2)}
    for x in enumerate_spaces_upto(2, include_empty=False):
        f = terminal_map(x)
        if x.is_connected():
            assert map_canonical_key(f) in members
    assert map_canonical_key(gluing) not in members


def test_right_orthogonal_of_empty_to_point_is_surjections():
    got = {map_canonical_key(m) for m in right_orthogonal_bounded((catalog_map("empty_to_point"),), 2)}
    want = {
        map_canonical_key(m)
        for m in all_map_classes(2)
        if map_predicates(m).surjective
    }
    assert got == want


def test_right_orthogonal_of_open_point_is_closed_maps():
    got = {map_canonical_key(m) for m in right_orthogonal_bounded((catalog_map("open_point_to_sierp"),), 3)}
    want = {
        map_canonical_key(m)
        for m in all_map_classes(3)
        if map_predicates(m).closed
    }
    assert got == want


def test_class_members_meet_class_only_in_isos():
    # P cap P^l and P cap P^r consist of isomorphisms only
    for entry in catalog():
        g = entry.map
        if max(g.dom.n, g.cod.n) > 3:
            continue
        if lifts(g, g).holds:
            assert g.is_iso()


def test_p_subset_p_lr_at_bound():
    for entry in catalog():
        g = entry.map
        if max(g.dom.n, g.cod.n) > 3:
            continue
        left = left_orthogonal_bounded((g,), 3)
        assert all(lifts_cached(f, g) for f in left)


def test_right_class_closed_under_composition_and_products():
    for name in ("open_point_to_sierp", "two_discrete_to_point"):
        g = catalog_map(name)
        members = right_orthogonal_bounded((g,), 2)
        rng = random.Random(1)
        pairs = 0
        for a in members:
            for b in members:
                if a.cod != b.dom or pairs > 60:
                    continue
                pairs += 1
                assert lifts_cached(g, compose(b, a))
        for _ in range(20):
            a, b = rng.choice(members), rng.choice(members)
            prod_map = _product_map(a, b)
            assert lifts(g, prod_map).holds


def test_left_class_closed_under_coproducts():
    from orthogon.spaces import coproduct

    g = catalog_map("two_discrete_to_point")
    members = left_orthogonal_bounded((g,), 2)
    rng = random.Random(2)
    for _ in range(20):
        a, b = rng.choice(members), rng.choice(members)
        co = _coproduct_map(a, b)
        assert lifts(co, g).holds


def test_right_class_closed_under_retracts():
    g = catalog_map("open_point_to_sierp")
    k_map = catalog_map("K_to_sierp")
    assert lifts(g, k_map).holds
    for r in KTO_GENERATORS:
        assert is_retract_of(r, k_map) is not None
        assert lifts(g, r).holds


def _product_map(a: SpaceMap, b: SpaceMap) -> SpaceMap:
    dom = product(a.dom, b.dom)
    cod = product(a.cod, b.cod)
    assign = tuple(
        a.assign[i] * b.cod.n + b.assign[j]
        for i in range(a.dom.n)
        for j in range(b.dom.n)
    )
    return SpaceMap(dom, cod, assign)


def _coproduct_map(a: SpaceMap, b: SpaceMap) -> SpaceMap:
    from orthogon.spaces import coproduct

    dom = coproduct(a.dom, b.dom)
    cod = coproduct(a.cod, b.cod)
    assign = tuple(a.assign) + tuple(v + a.cod.n for v in b.assign)
    return SpaceMap(dom, cod, assign)
