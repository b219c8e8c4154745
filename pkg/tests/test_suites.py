"""Suite reports: structure, determinism, replayability of counterexamples."""

import pytest

from orthogon.catalog import KTO_GENERATORS, catalog_map
from orthogon.errors import BoundTooSmallError
from orthogon.lifting import lifts
from orthogon.maps import compose, is_pullback_of, is_retract_of
from orthogon.service.models import MapPayload, payload_to_map
from orthogon.suites import (
    closed_lifting_randomized,
    quasi_component_factorization,
    retract_of_pullback_composition_witness,
    run_suite,
    s4_reverse_report,
)


def strip_time(report_json):
    data = dict(report_json)
    data.pop("wall_time_s")
    return data


def test_unknown_suite_rejected():
    with pytest.raises(ValueError):
        run_suite("S9")


def test_bound_too_small_rejected():
    with pytest.raises(BoundTooSmallError):
        run_suite("S1", bound=2)


def test_s5_counts_pass_and_deterministic():
    a = run_suite("S5")
    b = run_suite("S5")
    assert a.passed and a.cases_run == 16
    assert strip_time(a.to_json()) == strip_time(b.to_json())
    assert a.to_json()["schema"] == "orthogon/1"


def test_s1_passes_at_bound_three():
    report = run_suite("S1", bound=3)
    assert report.passed, [f.detail for f in report.failures[:3]]
    assert report.cases_run > 10000


def test_s2_passes_at_bound_three():
    report = run_suite("S2", bound=3)
    assert report.passed, [f.detail for f in report.failures[:3]]


def test_s4_passes_and_reverse_is_report_only():
    report = run_suite("S4", bound=3)
    assert report.passed
    reverse = s4_reverse_report(3)
    assert set(reverse) == {
        "bound",
        "non_quotient_maps_passing_bounded_implication",
        "non_coquotient_maps_passing_bounded_implication",
    }


def test_s6_passes_at_bound_three():
    report = run_suite("S6", bound=3)
    assert report.passed, [f.detail for f in report.failures[:3]]


def test_thread_count_does_not_change_outcome():
    a = run_suite("S5", threads=1)
    b = run_suite("S5", threads=4)
    assert strip_time(a.to_json()) == strip_time(b.to_json())


def test_s6_factorization_pieces():
    gluing = catalog_map("two_discrete_to_point")
    for name in ("sierp_to_point", "two_discrete_to_point"):
        x = catalog_map(name).dom
        f_l, f_lr = quasi_component_factorization(x)
        assert compose(f_lr, f_l).assign == (0,) * x.n
        assert lifts(f_l, gluing).holds


def test_retract_of_pullback_composition_witness():
    chain, composite = retract_of_pullback_composition_witness()
    for part in chain:
        assert any(is_pullback_of(part, g) is not None for g in KTO_GENERATORS)
    k_map = catalog_map("K_to_sierp")
    assert is_retract_of(k_map, composite) is not None


def test_randomized_closed_lifting_deterministic():
    n1, f1 = closed_lifting_randomized(samples=300, seed=77)
    n2, f2 = closed_lifting_randomized(samples=300, seed=77)
    assert n1 == n2 == 300
    assert [f.to_json() for f in f1] == [f.to_json() for f in f2]
    assert not f1


def test_failure_records_replay():
    # The S3 factorization failure carries the literal map; rebuilding it from
    # the JSON payload reproduces the failing search at the same bounds.
    from orthogon.maps import composition_of_pullbacks

    report = run_suite("S3", bound=3)
    fails = [f for f in report.failures if f.case == "S3.pullback_composition"]
    assert len(fails) == 1 and len(report.failures) == 1
    payload = MapPayload(**fails[0].counterexample_json)
    rebuilt = payload_to_map(payload)
    assert rebuilt.assign == catalog_map("K_to_sierp").assign
    assert (
        composition_of_pullbacks(
            rebuilt, KTO_GENERATORS, max_len=2, max_points=4, merge_injective=True
        )
        is None
    )
