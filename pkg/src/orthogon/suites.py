"""Verification suites reproducing the finite-space claims, as machine
-readable reports.

Each suite returns a SuiteReport whose failures carry replayable
counterexamples (notation text plus JSON).  Reports are deterministic given
(suite, bound, seed); the worker count never changes the outcome, only the
schedule.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

from .catalog import KTO_GENERATORS, P1_FOUR, P1_THREE, P2, catalog_map
from .errors import BoundTooSmallError
from .lifting import left_orthogonal_bounded, lifts, lifts_cached
from .maps import (
    SpaceMap,
    compose,
    composition_of_pullbacks,
    enumerate_maps,
    fibre_conditions,
    has_connected_fibres,
    is_pullback_of,
    is_pullback_square,
    is_retract_of,
    make_map,
    map_iso,
    map_predicates,
    preserves_disjoint_closures,
    separates_closed_preimages,
    terminal_map,
)
from .negation import ClassExpr, Distinguished, Equal, class_equal_at_bound
from .notation import print_map, print_space
from .spaces import FinSpace, enumerate_spaces, enumerate_spaces_upto, make_space

LABELLED_COUNTS = (1, 1, 4, 29, 355, 6942)
UNLABELLED_COUNTS = (1, 1, 3, 9, 33, 139)

SUITE_IDS = ("S1", "S2", "S3", "S4", "S5", "S6")


@dataclass(frozen=True)
class SuiteFailure:
    case: str
    detail: str
    counterexample_notation: Optional[str] = None
    counterexample_json: Optional[dict] = None

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "detail": self.detail,
            "counterexample": {
                "notation": self.counterexample_notation,
                "json": self.counterexample_json,
            },
        }


@dataclass
class SuiteReport:
    suite: str
    bound: int
    cases_run: int
    failures: list[SuiteFailure]
    wall_time_s: float
    seed: Optional[int] = None
    notes: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "schema": "orthogon/1",
            "suite": self.suite,
            "bound": self.bound,
            "cases_run": self.cases_run,
            "failures": [f.to_json() for f in self.failures],
            "wall_time_s": round(self.wall_time_s, 3),
            "seed": self.seed,
            "notes": self.notes,
            "data": self.data,
            "passed": self.passed,
        }


def _map_failure(case: str, detail: str, m: SpaceMap) -> SuiteFailure:
    from .service.models import map_to_payload

    return SuiteFailure(
        case=case,
        detail=detail,
        counterexample_notation=print_map(m),
        counterexample_json=map_to_payload(m).model_dump(),
    )


def _all_rep_maps(bound: int) -> list[SpaceMap]:
    reps = enumerate_spaces_upto(bound)
    out = []
    for dom in reps:
        for cod in reps:
            out.extend(enumerate_maps(dom, cod))
    return out


Case = tuple[str, Callable[[], tuple[int, list[SuiteFailure]]]]


def _run_cases(
    suite: str, bound: int, cases: list[Case], seed: Optional[int], threads: int,
    notes: Optional[list[str]] = None,
) -> SuiteReport:
    start = time.perf_counter()
    results = {}
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {case_id: pool.submit(fn) for case_id, fn in cases}
        for case_id, fut in futures.items():
            results[case_id] = fut.result()
    else:
        for case_id, fn in cases:
            results[case_id] = fn()
    cases_run = sum(results[c][0] for c, _ in cases)
    failures = [f for c, _ in cases for f in results[c][1]]
    return SuiteReport(
        suite=suite,
        bound=bound,
        cases_run=cases_run,
        failures=failures,
        wall_time_s=time.perf_counter() - start,
        seed=seed,
        notes=notes or [],
    )


# -- S1: the eight characterizations ------------------------------------------


def _s1_cases(bound: int) -> list[Case]:
    empty_to_point = catalog_map("empty_to_point")
    two_disc = catalog_map("two_discrete_to_point")
    pt_to_ind = catalog_map("point_to_indiscrete")
    sierp_ind = catalog_map("sierp_to_indiscrete")
    dense_gen = catalog_map("closed_point_to_sierp")
    induced_gen = catalog_map("sierp_to_point")
    closures_gen = catalog_map("V_to_point")
    closed_gen = catalog_map("open_point_to_sierp")

    checks = [
        ("surjective_right", lambda f: (map_predicates(f).surjective, lifts_cached(empty_to_point, f))),
        ("injective_right", lambda f: (map_predicates(f).injective, lifts_cached(two_disc, f))),
        ("surjective_left", lambda f: (map_predicates(f).surjective, lifts_cached(f, pt_to_ind))),
        ("final_topology_left", lambda f: (map_predicates(f).final_topology, lifts_cached(f, sierp_ind))),
        ("dense_image_left", lambda f: (map_predicates(f).dense_image, lifts_cached(f, dense_gen))),
        ("induced_topology_left", lambda f: (map_predicates(f).induced_topology, lifts_cached(f, induced_gen))),
        ("disjoint_closures_left", lambda f: (separates_closed_preimages(f), lifts_cached(f, closures_gen))),
        ("closed_left", lambda f: (map_predicates(f).closed, lifts_cached(closed_gen, f))),
    ]

    def map_case(name, check):
        def run():
            count, fails = 0, []
            for f in _all_rep_maps(bound):
                count += 1
                want, got = check(f)
                if want != got:
                    fails.append(
                        _map_failure(f"S1.{name}", f"predicate={want} lifting={got}", f)
                    )
            return count, fails

        return (f"S1.{name}", run)

    cases = [map_case(name, check) for name, check in checks]

    def subspace_closures_case():
        # On subspace inclusions the separation condition simplifies to
        # "disjoint closed subsets keep disjoint closures"; check that reading
        # on exactly those maps.
        count, fails = 0, []
        for f in _all_rep_maps(bound):
            preds = map_predicates(f)
            if not (preds.injective and preds.induced_topology):
                continue
            count += 1
            want = preserves_disjoint_closures(f)
            got = lifts_cached(f, closures_gen)
            if want != got:
                fails.append(
                    _map_failure(
                        "S1.disjoint_closures_subspace",
                        f"predicate={want} lifting={got}",
                        f,
                    )
                )
        return count, fails

    cases.append(("S1.disjoint_closures_subspace", subspace_closures_case))

    def t1_case():
        count, fails = 0, []
        sierp_pt = catalog_map("sierp_to_point")
        for x in enumerate_spaces_upto(bound):
            count += 1
            want = x.is_t1()
            got = lifts_cached(sierp_pt, terminal_map(x))
            if want != got:
                fails.append(
                    SuiteFailure(
                        case="S1.t1",
                        detail=f"is_T1={want} lifting={got}",
                        counterexample_notation=print_space(x),
                    )
                )
        return count, fails

    def connected_case():
        # The empty space is pinned not-connected while the lifting form holds
        # vacuously there; the equivalence is checked on nonempty spaces.
        count, fails = 0, []
        for x in enumerate_spaces_upto(bound):
            if x.n == 0:
                continue
            count += 1
            want = x.is_connected()
            got = lifts_cached(terminal_map(x), catalog_map("two_discrete_to_point"))
            if want != got:
                fails.append(
                    SuiteFailure(
                        case="S1.connected",
                        detail=f"is_connected={want} lifting={got}",
                        counterexample_notation=print_space(x),
                    )
                )
        return count, fails

    cases.append(("S1.t1", t1_case))
    cases.append(("S1.connected", connected_case))
    return cases


# -- S2: the quotient-style generator combinatorics ----------------------------


def _prop9_composition_chain() -> tuple[list[SpaceMap], SpaceMap]:
    v = catalog_map("V_to_point").dom
    s2 = make_space(2, {("u", "m")}, labels=("u", "m"))
    i2 = make_space(2, {("u", "m"), ("m", "u")}, labels=("u", "m"))
    i3 = make_space(
        3, {("u", "m"), ("m", "u"), ("m", "x"), ("x", "m")}, labels=("u", "m", "x")
    )
    m1 = make_map(v, s2, {"a": "m", "u": "u", "b": "m"})
    m2 = make_map(s2, i2, {"u": "u", "m": "m"})
    m3 = make_map(i2, i3, {"u": "u", "m": "m"})
    return [m1, m2, m3], compose(m3, compose(m2, m1))


def _s2_cases(bound: int) -> list[Case]:
    def class_case():
        count, fails = 0, []
        for label, gens in (("P1_three", P1_THREE), ("P1_four", P1_FOUR)):
            count += 1
            got = class_equal_at_bound(
                ClassExpr(gens, "l", bound), ClassExpr(P2, "l", bound)
            )
            if not isinstance(got, Equal):
                assert isinstance(got, Distinguished)
                fails.append(
                    _map_failure(
                        "S2.class_equal",
                        f"{label}^l differs from P2^l at bound {bound}",
                        got.map,
                    )
                )
        return count, fails

    def composition_case():
        count, fails = 0, []
        chain, composed = _prop9_composition_chain()
        count += 1
        if not map_iso(composed, catalog_map("P2_map")):
            fails.append(
                _map_failure(
                    "S2.composition",
                    "chain composite is not the single-generator map",
                    composed,
                )
            )
        # First factor is a generator, second is the final-topology generator.
        count += 2
        if not map_iso(chain[0], catalog_map("V_to_sierp")):
            fails.append(_map_failure("S2.composition", "first factor mismatch", chain[0]))
        if not map_iso(chain[1], catalog_map("sierp_to_indiscrete")):
            fails.append(_map_failure("S2.composition", "second factor mismatch", chain[1]))
        # Third factor is a base change of the point inclusion: check both the
        # direct recognition and the explicit square.
        count += 2
        if is_pullback_of(chain[2], catalog_map("point_to_indiscrete")) is None:
            fails.append(
                _map_failure("S2.pullback", "third factor is not a base change", chain[2])
            )
        i2, i3 = chain[2].dom, chain[2].cod
        two_ind = make_space(2, {("m", "x"), ("x", "m")}, labels=("m", "x"))
        f = make_map(i3, two_ind, {"u": "m", "m": "m", "x": "x"})
        g = make_map(make_space(1, (), labels=("p",)), two_ind, {"p": "m"})
        top = make_map(i2, g.dom, {"u": "p", "m": "p"})
        if not is_pullback_square(chain[2], top, f, g):
            fails.append(
                _map_failure("S2.pullback", "displayed square is not a pullback", chain[2])
            )
        return count, fails

    def retract_case():
        count, fails = 0, []
        p2 = catalog_map("P2_map")
        for name in ("point_to_indiscrete", "sierp_to_indiscrete"):
            count += 1
            if is_retract_of(catalog_map(name), p2) is None:
                fails.append(
                    _map_failure("S2.retract", f"{name} is not a retract of the single generator", p2)
                )
        return count, fails

    def fibres_case():
        count, fails = 0, []
        v_to_sierp = catalog_map("V_to_sierp")
        for f in _all_rep_maps(bound):
            preds = map_predicates(f)
            if not (preds.quotient and f.cod.is_t1()):
                continue
            count += 1
            want = has_connected_fibres(f)
            got = lifts_cached(f, v_to_sierp)
            if want != got:
                fails.append(
                    _map_failure(
                        "S2.connected_fibres", f"fibres={want} lifting={got}", f
                    )
                )
        return count, fails

    return [
        ("S2.class_equal", class_case),
        ("S2.composition", composition_case),
        ("S2.retract", retract_case),
        ("S2.connected_fibres", fibres_case),
    ]


# -- S3: the compactness generators --------------------------------------------


def retract_of_pullback_composition_witness() -> tuple[list[SpaceMap], SpaceMap]:
    """The four-point generator as a retract of a pullback composition.

    Chain: project the doubled V onto V, collapse V, include the closed point
    into Sierpinski.  Each factor is a base change of one of the four
    generators; the target map retracts off the composite.
    """
    from .spaces import product

    v = catalog_map("V_to_point").dom
    two_ind = catalog_map("indiscrete_to_point").dom
    dv = product(v, two_ind)
    proj = SpaceMap(dv, v, tuple(i // two_ind.n for i in range(dv.n)), _checked=True)
    collapse = terminal_map(v, catalog_map("closed_point_to_sierp").dom)
    include = catalog_map("closed_point_to_sierp")
    chain = [proj, collapse, include]
    return chain, compose(include, compose(collapse, proj))


def _s3_cases(bound: int) -> list[Case]:
    k_map = catalog_map("K_to_sierp")
    open_gen = catalog_map("open_point_to_sierp")

    def closed_case():
        count, fails = 0, []
        for g in KTO_GENERATORS:
            count += 2
            if not map_predicates(g).closed:
                fails.append(_map_failure("S3.closed", "generator is not closed", g))
            if not lifts_cached(open_gen, g):
                fails.append(
                    _map_failure("S3.closed", "generator fails the closed-map lifting", g)
                )
        return count, fails

    def retract_case():
        count, fails = 0, []
        for g in KTO_GENERATORS:
            count += 1
            if is_retract_of(g, k_map) is None:
                fails.append(
                    _map_failure(
                        "S3.retract", "generator is not a retract of the four-point map", g
                    )
                )
        return count, fails

    def factorization_case():
        # The literal claim: the four-point map is a composition of base
        # changes of the four generators.  The bounded search is exhaustive
        # for chains of length <= 4 through spaces of <= 6 points;
        # merge_injective is sound here because the only injective base
        # changes of these generators are closed embeddings.
        count, fails = 1, []
        chain = composition_of_pullbacks(
            k_map, KTO_GENERATORS, max_len=4, max_points=6, merge_injective=True
        )
        if chain is None:
            fails.append(
                _map_failure(
                    "S3.pullback_composition",
                    "no factorization as a composition of base changes of the "
                    "generators exists with intermediates of <= 6 points and "
                    "<= 4 factors",
                    k_map,
                )
            )
        else:
            composed = chain[0]
            for part in chain[1:]:
                composed = compose(part, composed)
            if composed != k_map:
                fails.append(
                    _map_failure("S3.pullback_composition", "found chain does not compose", k_map)
                )
        return count, fails

    def retract_of_composition_case():
        count, fails = 1, []
        chain, composite = retract_of_pullback_composition_witness()
        ok = all(
            any(is_pullback_of(p, g) is not None for g in KTO_GENERATORS)
            for p in chain
        )
        ok = ok and is_retract_of(k_map, composite) is not None
        if not ok:
            fails.append(
                _map_failure(
                    "S3.retract_of_composition",
                    "four-point map is not a retract of the pullback composition",
                    k_map,
                )
            )
        return count, fails

    def membership_case():
        # What the factorization claim is for: the four-point map must sit in
        # the left-then-right orthogonal of the generators (checked at bound).
        count, fails = 0, []
        for f in left_orthogonal_bounded(KTO_GENERATORS, bound):
            count += 1
            if not lifts_cached(f, k_map):
                fails.append(
                    _map_failure(
                        "S3.k_in_double_orthogonal",
                        "left-class member fails against the four-point map",
                        f,
                    )
                )
        return count, fails

    def condition_case():
        count, fails = 0, []
        v_to_point = catalog_map("V_to_point")
        for g in _all_rep_maps(bound):
            if not map_predicates(g).closed:
                continue
            count += 1
            want = fibre_conditions(g).two_bounded_above_not_below
            got = is_retract_of(v_to_point, g) is not None
            if want != got:
                fails.append(
                    _map_failure(
                        "S3.v_retract_iff_fibre",
                        f"condition(i)={want} retract={got}",
                        g,
                    )
                )
        return count, fails

    return [
        ("S3.closed", closed_case),
        ("S3.retract", retract_case),
        ("S3.pullback_composition", factorization_case),
        ("S3.retract_of_composition", retract_of_composition_case),
        ("S3.k_in_double_orthogonal", membership_case),
        ("S3.v_retract_iff_fibre", condition_case),
    ]


# -- S4: quotient implications ---------------------------------------------------


def _s4_cases(bound: int) -> list[Case]:
    gluing = catalog_map("two_discrete_to_point")

    def right_class(maps):
        return [f for f in maps if lifts_cached(gluing, f)]

    def quo_case():
        count, fails = 0, []
        all_maps = _all_rep_maps(bound)
        rights = right_class(all_maps)
        for q in all_maps:
            if not map_predicates(q).quotient:
                continue
            for f in rights:
                count += 1
                if not lifts_cached(q, f):
                    fails.append(
                        _map_failure(
                            "S4.quotient_implication",
                            f"quotient map fails against {print_map(f)}",
                            q,
                        )
                    )
        return count, fails

    def coquo_case():
        count, fails = 0, []
        all_maps = _all_rep_maps(bound)
        rights = right_class(all_maps)
        for q in all_maps:
            preds = map_predicates(q)
            if not (preds.surjective and preds.induced_topology):
                continue
            for f in rights:
                count += 1
                if not lifts_cached(f, q):
                    fails.append(
                        _map_failure(
                            "S4.coquotient_implication",
                            f"surjective induced map fails under {print_map(f)}",
                            q,
                        )
                    )
        return count, fails

    return [
        ("S4.quotient_implication", quo_case),
        ("S4.coquotient_implication", coquo_case),
    ]


def s4_reverse_report(bound: int) -> dict:
    """Reverse directions, reported and never asserted: bounded lifting data
    cannot certify them."""
    gluing = catalog_map("two_discrete_to_point")
    all_maps = _all_rep_maps(bound)
    rights = [f for f in all_maps if lifts_cached(gluing, f)]
    non_quotient_passing = 0
    non_coquotient_passing = 0
    for q in all_maps:
        preds = map_predicates(q)
        if not preds.quotient and all(lifts_cached(q, f) for f in rights):
            non_quotient_passing += 1
        if not (preds.surjective and preds.induced_topology) and all(
            lifts_cached(f, q) for f in rights
        ):
            non_coquotient_passing += 1
    return {
        "bound": bound,
        "non_quotient_maps_passing_bounded_implication": non_quotient_passing,
        "non_coquotient_maps_passing_bounded_implication": non_coquotient_passing,
    }


# -- S5: enumeration counts -------------------------------------------------------


def _brute_labelled_count(n: int) -> int:
    # Independent oracle: filter every strict relation for transitivity after
    # adding reflexivity.
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    count = 0
    for subset in range(1 << len(pairs)):
        rows = [1 << i for i in range(n)]
        for k, (i, j) in enumerate(pairs):
            if subset >> k & 1:
                rows[i] |= 1 << j
        ok = True
        for i in range(n):
            acc = rows[i]
            m = acc
            while m:
                low = m & -m
                acc |= rows[low.bit_length() - 1]
                m ^= low
            if acc != rows[i]:
                ok = False
                break
        if ok:
            count += 1
    return count


def _s5_cases(bound: int) -> list[Case]:
    del bound  # the counts are fixed targets

    def labelled_case():
        count, fails = 0, []
        for n, expect in enumerate(LABELLED_COUNTS):
            count += 1
            got = sum(1 for _ in enumerate_spaces(n, "labelled"))
            if got != expect:
                fails.append(
                    SuiteFailure(
                        case="S5.labelled",
                        detail=f"n={n}: counted {got}, expected {expect}",
                    )
                )
        return count, fails

    def unlabelled_case():
        count, fails = 0, []
        for n, expect in enumerate(UNLABELLED_COUNTS):
            count += 1
            got = sum(1 for _ in enumerate_spaces(n, "upto_iso"))
            if got != expect:
                fails.append(
                    SuiteFailure(
                        case="S5.unlabelled",
                        detail=f"n={n}: counted {got}, expected {expect}",
                    )
                )
        return count, fails

    def oracle_case():
        count, fails = 0, []
        for n in range(4):
            count += 1
            got = sum(1 for _ in enumerate_spaces(n, "labelled"))
            brute = _brute_labelled_count(n)
            if got != brute:
                fails.append(
                    SuiteFailure(
                        case="S5.oracle",
                        detail=f"n={n}: enumerator {got} vs brute filter {brute}",
                    )
                )
        return count, fails

    return [
        ("S5.labelled", labelled_case),
        ("S5.unlabelled", unlabelled_case),
        ("S5.oracle", oracle_case),
    ]


# -- S6: factorization sample ------------------------------------------------------


def quasi_component_factorization(x: FinSpace) -> tuple[SpaceMap, SpaceMap]:
    """X -> Q -> pt with Q the product of a two-point discrete space over
    every map X -> {a,b}; the first factor identifies quasi-components."""
    two_disc = catalog_map("two_discrete_to_point").dom
    chis = enumerate_maps(x, two_disc)
    k = len(chis)
    q = make_space(1 << k)  # discrete on 2^k points
    assign = tuple(
        sum(chi.assign[i] << c for c, chi in enumerate(chis)) for i in range(x.n)
    )
    f_l = SpaceMap(x, q, assign, _checked=True)
    return f_l, terminal_map(q)


def _s6_cases(bound: int) -> list[Case]:
    gluing = catalog_map("two_discrete_to_point")
    check_bound = min(bound - 1, 2)

    def factor_case():
        count, fails = 0, []
        left_small = left_orthogonal_bounded((gluing,), check_bound)
        for x in enumerate_spaces_upto(bound):
            f_l, f_lr = quasi_component_factorization(x)
            count += 1
            if not compose(f_lr, f_l) == terminal_map(x, f_lr.cod):
                fails.append(
                    SuiteFailure(case="S6.compose", detail="factors do not compose",
                                 counterexample_notation=print_space(x))
                )
            count += 1
            if not lifts(f_l, gluing).holds:
                fails.append(
                    SuiteFailure(
                        case="S6.left_factor",
                        detail="coordinate map is not left orthogonal to the gluing map",
                        counterexample_notation=print_space(x),
                    )
                )
            for h in left_small:
                count += 1
                if not lifts(h, f_lr).holds:
                    fails.append(
                        _map_failure(
                            "S6.right_factor",
                            f"member at bound {check_bound} fails against the product collapse",
                            h,
                        )
                    )
        return count, fails

    return [("S6.factorization", factor_case)]


# -- entry points -------------------------------------------------------------------


def run_suite(
    suite: str, bound: int = 3, seed: Optional[int] = None, threads: int = 1
) -> SuiteReport:
    suite = suite.upper()
    if suite not in SUITE_IDS:
        raise ValueError(f"unknown suite {suite!r}; expected one of {SUITE_IDS}")
    if suite != "S5" and bound < 3:
        raise BoundTooSmallError("suites need bound >= 3")
    notes: list[str] = []
    if suite == "S1":
        cases = _s1_cases(bound)
        notes.append(
            "connected check runs on nonempty spaces: the empty space is pinned "
            "not-connected while the lifting form holds vacuously"
        )
    elif suite == "S2":
        cases = _s2_cases(bound)
    elif suite == "S3":
        cases = _s3_cases(bound)
    elif suite == "S4":
        cases = _s4_cases(bound)
        notes.append(
            "reverse directions are report-only; see s4_reverse_report"
        )
    elif suite == "S5":
        cases = _s5_cases(bound)
    else:
        cases = _s6_cases(bound)
    report = _run_cases(suite, bound, cases, seed, threads, notes)
    if suite == "S5":
        report.data["labelled_counts"] = list(LABELLED_COUNTS)
        report.data["unlabelled_counts"] = list(UNLABELLED_COUNTS)
    return report


def closed_lifting_randomized(
    samples: int = 10000, points: int = 4, seed: int = 20240 , threads: int = 1
) -> tuple[int, list[SuiteFailure]]:
    """Randomized closed<=>lifting check on maps between ``points``-point
    spaces: uniform over labelled space pairs, then over the monotone
    assignments of the sampled pair."""
    del threads  # sampling is cheap enough single-threaded
    rng = random.Random(seed)
    spaces = list(enumerate_spaces(points, "labelled"))
    open_gen = catalog_map("open_point_to_sierp")
    fails: list[SuiteFailure] = []
    for _ in range(samples):
        dom = spaces[rng.randrange(len(spaces))]
        cod = spaces[rng.randrange(len(spaces))]
        maps = enumerate_maps(dom, cod)
        g = maps[rng.randrange(len(maps))]
        want = map_predicates(g).closed
        got = lifts(open_gen, g).holds
        if want != got:
            fails.append(
                _map_failure(
                    "closed_randomized", f"predicate={want} lifting={got}", g
                )
            )
    return samples, fails
