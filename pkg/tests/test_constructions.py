import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_product_triples, exhaustive_product_schur
from schurlab.arith import enumerate_product_triples
from schurlab.constructions import (
    WINDOW_TABLE,
    PatternCollision,
    PatternParams,
    PlanError,
    build_interval_colouring,
    build_pattern,
    build_power_pattern,
    colour_set_by_intervals,
    find_pattern,
    greedy_disjoint_power_family,
    make_interval_plan,
    plan_thresholds,
    power_family_bound,
    verify_pattern_product_schur,
)
from schurlab.sets import IntegerSet
from schurlab.solve import is_product_schur, monochromatic_triples, verify_sum_colouring


def test_build_pattern_values():
    pat = build_pattern(PatternParams(2, 3, 5, 7))
    assert set(pat.elements()) == {2, 3, 6, 5, 10, 30, 60, 180, 7, 14, 21, 42, 28, 84}
    assert len(pat.elements()) == 14


def test_build_pattern_collision():
    with pytest.raises(PatternCollision) as exc:
        build_pattern(PatternParams(2, 2, 2, 2))
    assert exc.value.pair == ("a", "b")


def test_pattern_params_validation():
    with pytest.raises(ValueError):
        PatternParams(1, 3, 5, 7)


@pytest.mark.parametrize("params", [(2, 3, 5, 7), (2, 3, 5, 11), (3, 4, 7, 13)])
def test_patterns_are_product_schur(params):
    p = PatternParams(*params)
    assert verify_pattern_product_schur(p)
    assert exhaustive_product_schur(build_pattern(p).elements(), 2)


def test_plan_thresholds_exact():
    disjoint, wide = plan_thresholds(Fraction(1, 1000))
    assert (disjoint, wide) == (179108, 10**33)
    # the disjointness threshold is tight: one below it some pair of real windows meets
    with pytest.raises(PlanError) as exc:
        make_interval_plan(disjoint - 1)
    assert exc.value.pair is not None


def test_plan_error_names_overlapping_pair():
    # at n = 2^11 window a is [0.999 * 2, 2] and window b is [0.999 * 2, 2]
    with pytest.raises(PlanError) as exc:
        make_interval_plan(2048, Fraction(1, 1000))
    assert exc.value.pair == ("a", "b")
    assert exc.value.minimum_n == 179108
    assert "a and b overlap" in str(exc.value)


def test_plan_error_names_empty_window():
    with pytest.raises(PlanError) as exc:
        make_interval_plan(10**6, "1e-3")
    assert exc.value.empty == "a" and exc.value.minimum_n == 10**33


def _check_plan_exact(plan):
    n, dl = plan.n, plan.delta
    for label, (lo, hi) in plan.windows.items():
        e, k, j = WINDOW_TABLE[label]
        # hi = floor(n^{e/11} / k): hi^11 k^11 <= n^e < (hi + 1)^11 k^11
        assert (hi * k) ** 11 <= n**e < ((hi + 1) * k) ** 11
        # lo = ceil((1 - j dl) n^{e/11} / k)
        c = (1 - j * dl) ** 11 * Fraction(n**e, k**11)
        assert (lo - 1) ** 11 < c <= lo**11
    spans = sorted(plan.windows.values())
    for (_, hi), (lo, _) in zip(spans, spans[1:]):
        assert hi < lo


@pytest.mark.parametrize("n", [10**11, 10**33, 10**40 + 7])
def test_plan_windows_exact_and_disjoint(n):
    plan = make_interval_plan(n)
    assert len(plan.windows) == 14
    _check_plan_exact(plan)
    assert plan.window("a2b2c")[1] == n // 4
    assert plan.window("a2bd")[1] == n // 6


def test_find_pattern_planted():
    n = 10**11
    plan = make_interval_plan(n)
    rng = random.Random(3)
    for _ in range(5):
        a, b, c, d = (rng.randint(*plan.window(w)) for w in "abcd")
        pat = build_pattern(PatternParams(a, b, c, d))
        noise = {rng.randint(2, n) for _ in range(200)}
        S = IntegerSet(n, set(pat.elements()) | noise)
        found = find_pattern(S, plan)
        assert found is not None
        assert all(x in S for x in build_pattern(found).elements())
        for w, g in zip("abcd", found.as_tuple()):
            assert plan.contains(w, g)


def test_find_pattern_empty_and_incomplete():
    n = 10**11
    plan = make_interval_plan(n)
    assert find_pattern(IntegerSet(n), plan) is None
    a, b, c, d = (plan.window(w)[0] for w in "abcd")
    els = build_pattern(PatternParams(a, b, c, d)).elements()
    assert find_pattern(IntegerSet(n, els[:-1]), plan) is None


def test_power_patterns():
    u = build_power_pattern(2, 2, 5)
    assert u.values == [2, 4, 8, 16, 32]
    assert is_product_schur(u.values, 2).is_schur
    assert build_power_pattern(3, 1, 2).values == [3, 9]
    assert is_product_schur([3, 9], 1).is_schur
    assert not is_product_schur(build_power_pattern(2, 2, 4).values, 2).is_schur
    with pytest.raises(OverflowError):
        build_power_pattern(2, 2, 5, n=31)
    with pytest.raises(OverflowError):
        build_power_pattern(2, 4, 64)


def test_power_family_small():
    fam = greedy_disjoint_power_family(32, 2, 5)
    assert [p.x for p in fam] == [2]


def test_power_family_disjoint_and_bounded():
    n = 10**6
    fam = greedy_disjoint_power_family(n, 2, 5)
    seen: set[int] = set()
    for p in fam:
        assert max(p.values) <= n
        assert seen.isdisjoint(p.values)
        seen.update(p.values)
    assert len(fam) >= power_family_bound(n, 5)
    # the greedy is maximal: every skipped base collides with a kept pattern
    kept = {p.x for p in fam}
    for x in range(2, 16):
        if x not in kept:
            assert not seen.isdisjoint(build_power_pattern(x, 2, 5).values)


def test_interval_colouring_psi():
    plan = build_interval_colouring(10**4, 2)
    assert plan.sprime == 5 and len(plan.psi) == 4
    assert verify_sum_colouring(plan.psi, "shifted")[0]
    trivial = build_interval_colouring(10**4, 1)
    assert trivial.sprime == 2 and trivial.psi.to_string() == "A"


def test_interval_thresholds_exact():
    n = 10**4
    plan = build_interval_colouring(n, 2)
    for i, t in enumerate(plan.thresholds):
        assert t**5 <= n**i < (t + 1) ** 5


def test_interval_colouring_edges():
    plan = build_interval_colouring(10**4, 2)
    col, bad = colour_set_by_intervals(IntegerSet(10**4, [2, 100]), plan)
    assert bad == [2] and set(col.assignment) == {100}
    col, bad = colour_set_by_intervals(IntegerSet(10**4), plan)
    assert len(col) == 0 and bad == []


@settings(max_examples=60, deadline=None)
@given(st.sets(st.integers(7, 10**4), max_size=400))
def test_interval_colouring_is_product_free(S):
    plan = build_interval_colouring(10**4, 2)
    col, bad = colour_set_by_intervals(S, plan)
    assert bad == []
    assert not monochromatic_triples(col, enumerate_product_triples(S))


def test_interval_colouring_three_colours():
    n = 10**6
    plan = build_interval_colouring(n, 3)
    assert plan.sprime == 14
    rng = random.Random(11)
    S = {x for x in range(plan.floor_bound + 1, 5000) if rng.random() < 0.5}
    col, bad = colour_set_by_intervals(S, plan)
    assert bad == []
    assert not [t for t in brute_product_triples(S) if col[t[0]] == col[t[1]] == col[t[2]]]
