import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (
    brute_product_triples,
    exhaustive_product_schur,
    naive_max_colourable,
    naive_valid,
)
from schurlab.arith import ProductTriple, enumerate_product_triples
from schurlab.solve import (
    RColouring,
    SumConstraintMode,
    Verdict,
    double_sum_schur_number,
    first_valid_colouring,
    is_product_schur,
    monochromatic_triples,
    schur_number,
    verify_sum_colouring,
    weak_double_sum_max,
)

STRING_18 = "AABBBACCCACCCABBBA"
STRING_54 = "AABBBACCCACCCABBBADDDADDDABBBADDDADDDABBBACCCACCCABBBA"
SMOOTH = sorted(2**i * 3**j for i in range(11) for j in range(7) if 1 < 2**i * 3**j <= 2000)
PLANTED = [
    [2, 4, 8, 16, 32],
    [3, 9, 27, 81, 243],
    [2, 3, 5, 6, 7, 10, 14, 21, 28, 30, 42, 60, 84, 180],
]


def _perturb(base):
    # known product-Schur sets with a few elements added and removed
    return st.tuples(st.sets(st.integers(2, 200), max_size=3), st.sets(st.sampled_from(base), max_size=2)).map(
        lambda t: (set(base) | t[0]) - t[1]
    )


small_sets = st.one_of(
    st.sets(st.integers(2, 200), max_size=13),
    st.sets(st.sampled_from(SMOOTH), max_size=13),
    st.sampled_from(PLANTED).flatmap(_perturb),
)


def test_colouring_string_roundtrip():
    c = RColouring.from_string("ABBA")
    assert c.r == 2 and c.to_string() == "ABBA"
    assert c.classes() == [[1, 4], [2, 3]]
    with pytest.raises(ValueError):
        RColouring.from_string("AB1")
    with pytest.raises(ValueError):
        RColouring(2, {1: 3})


def test_decide_small_examples():
    d = is_product_schur([2, 3, 6], 2)
    assert d.verdict is Verdict.NOT_SCHUR and d.is_schur is False
    assert not monochromatic_triples(d.witness, enumerate_product_triples([2, 3, 6]))
    assert is_product_schur([2, 4, 8, 16, 32], 2).is_schur
    assert not is_product_schur([2, 4, 8, 16], 2).is_schur


def test_empty_set_is_not_schur():
    d = is_product_schur([], 2)
    assert d.verdict is Verdict.NOT_SCHUR and len(d.witness) == 0


def test_degenerate_flag_matters():
    # {2, 4} is product-Schur for one colour only through 2 * 2 = 4
    assert is_product_schur([2, 4], 1, allow_degenerate=True).is_schur
    assert not is_product_schur([2, 4], 1, allow_degenerate=False).is_schur


def test_budget_gives_unknown():
    S = [2, 3, 5, 6, 7, 10, 14, 21, 28, 30, 42, 60, 84, 180]
    d = is_product_schur(S, 2, budget=1)
    assert d.verdict is Verdict.UNKNOWN and d.is_schur is None and d.witness is None


@settings(max_examples=300, deadline=None)
@given(small_sets, st.booleans())
def test_decision_matches_exhaustive_two_colours(S, degenerate):
    d = is_product_schur(S, 2, degenerate)
    assert d.is_schur == exhaustive_product_schur(S, 2, degenerate)
    if d.witness is not None:
        triples = enumerate_product_triples(S, degenerate)
        assert not monochromatic_triples(d.witness, triples)
        assert set(d.witness.assignment) == set(S)


@settings(max_examples=60, deadline=None)
@given(st.one_of(st.sets(st.integers(2, 80), max_size=9), st.sets(st.sampled_from(SMOOTH[:30]), max_size=9)))
def test_decision_matches_exhaustive_three_colours(S):
    assert is_product_schur(S, 3).is_schur == exhaustive_product_schur(S, 3)


@settings(max_examples=60, deadline=None)
@given(st.sets(st.integers(2, 300), max_size=40), st.integers(2, 300))
def test_product_schur_is_monotone(S, extra):
    # adding an element can only keep or create the property
    if is_product_schur(S, 2).is_schur:
        assert is_product_schur(S | {extra}, 2).is_schur


def test_power_sets_mirror_sum_colourings():
    # {x, ..., x^m} is r-product-Schur exactly when [m] cannot be sum-coloured
    for x in (2, 3, 5):
        for r, s in ((1, 2), (2, 5)):
            assert not is_product_schur([x**i for i in range(1, s)], r).is_schur
            assert is_product_schur([x**i for i in range(1, s + 1)], r).is_schur


def test_sum_verifier_examples():
    assert verify_sum_colouring(RColouring.from_string(STRING_18), "weak") == (True, None)
    assert verify_sum_colouring(RColouring.from_string(STRING_54), "weak") == (True, None)
    ok, v = verify_sum_colouring(RColouring.from_string("AAAAA"), "sums")
    assert not ok and (v.a, v.b, v.c, v.kind) == (1, 1, 2, "sum")
    ok, v = verify_sum_colouring(RColouring.from_string(STRING_18), "shifted")
    assert not ok and (v.a, v.b, v.c) == (1, 1, 2)


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="ABC", max_size=16), st.sampled_from(["sums", "shifted", "weak"]))
def test_sum_verifier_matches_naive(s, mode):
    c = RColouring.from_string(s, 3)
    assert verify_sum_colouring(c, mode)[0] == naive_valid([ord(ch) for ch in s], mode)


def test_small_schur_numbers():
    t0 = time.perf_counter()
    assert schur_number(1).value == 2
    assert schur_number(2).value == 5
    assert double_sum_schur_number(2).value == 5
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.parametrize("r", [1, 2, 3])
@pytest.mark.parametrize("mode", ["sums", "shifted", "weak"])
def test_schur_numbers_against_naive_search(r, mode):
    res = schur_number(r, mode)
    assert res.complete
    assert res.max_colourable == naive_max_colourable(r, mode)
    assert verify_sum_colouring(res.witness, mode)[0]
    assert len(res.witness) == res.max_colourable


def test_schur_three_values():
    assert schur_number(3).value == 14
    assert double_sum_schur_number(3).value == 14
    assert weak_double_sum_max(3).max_colourable == 18
    assert weak_double_sum_max(1).max_colourable == 2


def test_sandwich_inequality():
    # 3 S(r-1) - 1 <= S'(r) <= S(r)
    for r in (2, 3):
        s_prev = schur_number(r - 1).value
        assert 3 * s_prev - 1 <= double_sum_schur_number(r).value <= schur_number(r).value


def test_weak_lex_first_is_the_known_18_string():
    assert first_valid_colouring(18, 3, "weak").to_string() == STRING_18
    assert first_valid_colouring(19, 3, "weak") is None


def test_first_valid_colouring_shifted():
    assert first_valid_colouring(4, 2, "shifted").to_string() == "ABBA"
    assert first_valid_colouring(5, 2, "shifted") is None
    assert first_valid_colouring(0, 2, "sums").to_string() == ""


def test_schur_budget_reports_lower_bound():
    res = schur_number(3, "sums", budget=5)
    assert not res.complete and res.value is None
    assert res.max_colourable <= 13


def test_mode_parse():
    assert SumConstraintMode.parse("weak") is SumConstraintMode.WEAK_SHIFTED
    with pytest.raises(ValueError):
        SumConstraintMode.parse("nonsense")


def test_monochromatic_triples_ignores_uncoloured():
    triples = brute_product_triples([2, 3, 6])
    assert monochromatic_triples({2: 1, 3: 1}, [ProductTriple(*t) for t in triples]) == []
    assert monochromatic_triples({2: 1, 3: 1, 6: 1}, [ProductTriple(*t) for t in triples]) == [(2, 3, 6)]
