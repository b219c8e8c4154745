"""Class expressions at a bound: evaluation, membership, comparison, orbits."""

import pytest

from orthogon.catalog import P1_FOUR, P1_THREE, P2, catalog, catalog_map
from orthogon.errors import BoundMismatchError, BoundTooSmallError
from orthogon.lifting import all_map_classes, lifts, lifts_cached
from orthogon.maps import identity, map_canonical_key, map_predicates
from orthogon.negation import (
    ClassExpr,
    Distinguished,
    Equal,
    class_equal_at_bound,
    eval_class,
    fingerprint,
    member,
    orbit,
)
from orthogon.spaces import make_space

POINT = make_space(1, (), labels=("x",))


def keys(maps):
    return {map_canonical_key(m) for m in maps}


# -- eval_class ------------------------------------------------------------------


def test_empty_word_returns_generators():
    expr = ClassExpr((catalog_map("V_to_point"),), "", 3)
    got = eval_class(expr)
    assert keys(got) == keys([catalog_map("V_to_point")])


def test_right_step_of_empty_to_point_is_surjections():
    got = eval_class(ClassExpr((catalog_map("empty_to_point"),), "r", 2))
    want = [m for m in all_map_classes(2) if map_predicates(m).surjective]
    assert keys(got) == keys(want)


def test_left_step_of_gluing_contains_sierpinski_collapse():
    got = keys(eval_class(ClassExpr((catalog_map("two_discrete_to_point"),), "l", 3)))
    assert map_canonical_key(catalog_map("sierp_to_point")) in got
    assert map_canonical_key(catalog_map("two_discrete_to_point")) not in got


def test_bound_too_small_rejected():
    with pytest.raises(BoundTooSmallError):
        ClassExpr((catalog_map("M_to_L"),), "l", 3)


# -- member -----------------------------------------------------------------------


def test_member_not_member_with_witness():
    expr = ClassExpr((catalog_map("V_to_point"),), "lr", 4)
    verdict = member(expr, catalog_map("open_point_to_sierp"))
    assert verdict.status == "NotMember"
    assert verdict.witness_map is not None and verdict.witness_square is not None
    # the witness is a member of the left class that fails to lift
    assert lifts_cached(verdict.witness_map, catalog_map("V_to_point"))
    assert not lifts(verdict.witness_map, catalog_map("open_point_to_sierp")).holds


def test_member_p_subset_p_lr():
    for name in ("V_to_point", "sierp_to_point", "two_discrete_to_point"):
        g = catalog_map(name)
        expr = ClassExpr((g,), "lr", 3)
        assert member(expr, g).status == "MemberAtBound"


def test_member_connected_collapse_in_left_class():
    expr = ClassExpr((catalog_map("two_discrete_to_point"),), "l", 3)
    assert member(expr, catalog_map("sierp_to_point")).status == "MemberAtBound"


def test_member_rejects_oversized_candidate():
    expr = ClassExpr((catalog_map("two_discrete_to_point"),), "l", 3)
    with pytest.raises(BoundTooSmallError):
        member(expr, catalog_map("M_to_L"))


def test_membership_is_iso_invariant():
    expr = ClassExpr((catalog_map("two_discrete_to_point"),), "l", 3)
    f = catalog_map("sierp_to_point")
    from orthogon.maps import SpaceMap

    relabelled = SpaceMap(
        f.dom.relabel(("p", "q")), f.cod.relabel(("r",)), f.assign
    )
    assert member(expr, relabelled).status == member(expr, f).status


def test_not_member_is_stable_under_bound_growth():
    candidate = catalog_map("open_point_to_sierp")
    for bound in (3, 4):
        expr = ClassExpr((catalog_map("V_to_point"),), "lr", bound)
        assert member(expr, candidate).status == "NotMember"


# -- class comparison ------------------------------------------------------------------


def test_quotient_generators_left_classes_agree_at_three():
    for gens in (P1_THREE, P1_FOUR):
        got = class_equal_at_bound(ClassExpr(gens, "l", 3), ClassExpr(P2, "l", 3))
        assert isinstance(got, Equal)


def test_distinguished_classes_return_witness():
    e1 = ClassExpr((catalog_map("empty_to_point"),), "l", 2)
    e2 = ClassExpr((catalog_map("two_discrete_to_point"),), "l", 2)
    got = class_equal_at_bound(e1, e2)
    assert isinstance(got, Distinguished)
    w = got.map
    in_first = lifts(w, catalog_map("empty_to_point")).holds
    in_second = lifts(w, catalog_map("two_discrete_to_point")).holds
    assert in_first != in_second


def test_comparison_requires_matching_bounds():
    with pytest.raises(BoundMismatchError):
        class_equal_at_bound(
            ClassExpr(P2, "l", 3), ClassExpr(P2, "l", 4)
        )


def test_trivially_equal():
    e = ClassExpr(P2, "l", 3)
    assert isinstance(class_equal_at_bound(e, e), Equal)


# -- algebraic laws ----------------------------------------------------------------------


def test_idempotence_at_bound_for_small_catalog_singletons():
    for entry in catalog():
        g = (entry.map,)
        if max(entry.map.dom.n, entry.map.cod.n) > 3:
            continue
        for short, long in (("l", "lrl"), ("r", "rlr")):
            a = keys(eval_class(ClassExpr(g, short, 3)))
            b = keys(eval_class(ClassExpr(g, long, 3)))
            assert a == b, (entry.name, short)


def test_antitone_steps_on_catalog_subsets():
    nested = [
        ((catalog_map("point_to_indiscrete"),), P1_THREE),
        (P1_THREE, P1_FOUR),
        ((catalog_map("sierp_to_point"),), (catalog_map("sierp_to_point"), catalog_map("V_to_point"))),
    ]
    for small, big in nested:
        for letter in "lr":
            a = keys(eval_class(ClassExpr(tuple(small), letter, 3)))
            b = keys(eval_class(ClassExpr(tuple(big), letter, 3)))
            assert b <= a


def test_eval_superset_of_true_orthogonal_at_bound():
    # one l step over a truncated class over-approximates: growing the bound
    # can only shrink the set of maps below the old bound
    small = eval_class(ClassExpr((catalog_map("two_discrete_to_point"),), "lr", 2))
    big = eval_class(ClassExpr((catalog_map("two_discrete_to_point"),), "lr", 3))
    big_restricted = {
        map_canonical_key(m) for m in big if max(m.dom.n, m.cod.n) <= 2
    }
    assert big_restricted <= keys(small)


# -- orbit ---------------------------------------------------------------------------------


def test_orbit_idempotence_merges_nodes():
    g = orbit((catalog_map("empty_to_point"),), bound=2, max_word_len=4)
    by_word = {}
    for n in g.nodes:
        for w in n.words:
            by_word[w] = n.node_id
    assert by_word["l"] == by_word["lrl"]
    assert by_word["r"] == by_word["rlr"]


def test_orbit_identity_generator_single_non_root_node():
    g = orbit((identity(POINT),), bound=2, max_word_len=1)
    non_root = [n for n in g.nodes if "" not in n.words]
    assert len(non_root) == 1
    assert non_root[0].member_count == len(all_map_classes(2))


def test_orbit_deterministic():
    a = orbit((catalog_map("empty_to_point"),), bound=2, max_word_len=3)
    b = orbit((catalog_map("empty_to_point"),), bound=2, max_word_len=3)
    assert [n.fingerprint for n in a.nodes] == [n.fingerprint for n in b.nodes]
    assert a.edges == b.edges


def test_orbit_witnesses_verified():
    g = orbit((catalog_map("empty_to_point"),), bound=2, max_word_len=3)
    assert g.witnesses
    assert all(w.verified for w in g.witnesses)
    ids = {n.node_id: n for n in g.nodes}
    for w in g.witnesses:
        key = map_canonical_key(w.map)
        in_a = key in {map_canonical_key(m) for m in ids[w.node_a].members}
        in_b = key in {map_canonical_key(m) for m in ids[w.node_b].members}
        assert in_a != in_b and in_a == w.in_a


def test_fingerprint_depends_only_on_member_set():
    a = fingerprint([catalog_map("V_to_point"), catalog_map("sierp_to_point")])
    b = fingerprint([catalog_map("sierp_to_point"), catalog_map("V_to_point")])
    assert a == b
