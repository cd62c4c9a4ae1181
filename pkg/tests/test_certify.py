import pytest

from hitprob.certify import (DEFAULT_MAPS, P4_WIDTH_LIMIT, SandwichReport, format_map,
                             lower_bound_pmaps, mothebe_lift, parse_map, sandwich_certify,
                             upper_bound_candidates, zero_part_dim)
from hitprob.config import MemoryGuardError
from hitprob.core_algebra import weight_degree, weight_vector
from hitprob.corpus import instantiate, load_datasets
from hitprob.hit_core import admissible_basis, split_zero_plus


def test_parse_and_format_maps():
    assert parse_map("(1;2)") == (1, (2,))
    assert parse_map("(1;(2,3))") == (1, (2, 3))
    assert parse_map(" 4 ; 5 ") == (4, (5,))
    for mp in DEFAULT_MAPS + ((1, (2, 3)),):
        assert parse_map(format_map(mp)) == mp
    with pytest.raises(ValueError):
        parse_map("(1,2)")


def test_mothebe_lift_examples():
    assert mothebe_lift([(1,)], d=2) == [(3, 1), (1, 3)]
    assert mothebe_lift([], d=3) == []
    assert mothebe_lift([(3,)], d=2) == [(3, 3)]
    assert mothebe_lift([(1, 2)], exponent=7) == [(7, 1, 2), (1, 7, 2), (1, 2, 7)]
    with pytest.raises(ValueError):
        mothebe_lift([(1,)])


@pytest.mark.parametrize("k,n,d", [(2, 3, 2), (3, 4, 3), (3, 8, 3), (4, 8, 3)])
def test_lifts_of_admissibles_are_admissible(k, n, d):
    lifted = set(mothebe_lift(admissible_basis(k, n), d=d))
    target = set(admissible_basis(k + 1, n + (1 << d) - 1))
    assert lifted <= target


def test_upper_bound_small():
    assert len(upper_bound_candidates((2,))) == 10
    with pytest.raises(ValueError):
        upper_bound_candidates((6,))


def test_lower_bound_examples():
    x = [(1, 1, 0, 0, 0)]
    assert lower_bound_pmaps(x, (2,), [(1, (2,))]) == 0
    assert lower_bound_pmaps(x, (2,), [(1, (3,))]) == 1
    assert lower_bound_pmaps([], (2,)) == 0
    with pytest.raises(ValueError):
        lower_bound_pmaps([(3, 0, 0, 0, 0)], (2,))


def test_lower_bound_ignores_duplicates():
    cands = upper_bound_candidates((2,))
    assert lower_bound_pmaps(cands + cands[:4], (2,)) == lower_bound_pmaps(cands, (2,))


def test_lower_bound_never_exceeds_exact_layer():
    omega = (2, 2)
    plus = [x for x in admissible_basis(5, 6) if all(x) and weight_vector(x) == omega]
    cands = [x for x in upper_bound_candidates(omega) if all(x)]
    assert lower_bound_pmaps(cands, omega) <= len(plus) <= len(cands)


@pytest.fixture(scope="module")
def sandwich4():
    return sandwich_certify((2, 2, 2, 2), d=4)


def test_sandwich_two_to_the_fourth(sandwich4):
    r = sandwich4
    assert (r.upper, r.lower, r.zero_dim, r.total) == (39, 39, 115, 154)
    assert r.certified and r.degree == 30
    assert r.verdict() == "certified dim QP_5^+(2,2,2,2) = 39"
    assert set(r.survivors) == set(instantiate(load_datasets()["B5plus_2powd"], 4))


def test_sandwich_agrees_with_exact_block(sandwich4):
    _, plus = split_zero_plus(admissible_basis(5, 30))
    assert set(sandwich4.survivors) == {x for x in plus if weight_vector(x) == (2, 2, 2, 2)}


def test_zero_part_matches_exact_basis():
    zero, _ = split_zero_plus(admissible_basis(5, 30))
    assert zero_part_dim((2, 2, 2, 2)) == sum(1 for x in zero if weight_vector(x) == (2, 2, 2, 2))


def test_report_json_is_stable(sandwich4):
    j = sandwich4.to_json()
    assert "seconds" not in j and j["total"] == 154 and j["certified"]


def test_report_verdicts():
    r = SandwichReport((2, 2), None, 6, 5, 4, [])
    assert r.verdict() == "gap: 4 <= dim <= 5" and r.total is None
    r = SandwichReport((2, 2), None, 6, 5, None, [], note="skipped")
    assert r.verdict() == "upper bound 5 only (skipped)"


def test_lower_bound_refused_above_width_limit(monkeypatch):
    with pytest.raises(MemoryGuardError):
        lower_bound_pmaps([(1, 1, 1, 1, 90)], weight_vector((1, 1, 1, 1, 90)))
    monkeypatch.setattr("hitprob.certify.P4_WIDTH_LIMIT", 3)
    r = sandwich_certify((3, 2))
    assert r.lower is None and r.total is None and "width" in r.note
    assert r.verdict().startswith("upper bound 5 only")


def test_skipped_lower_bound():
    r = sandwich_certify((2, 2), lower=False)
    assert r.lower is None and r.note == "lower bound skipped"
    assert P4_WIDTH_LIMIT == 60000


@pytest.mark.parametrize("omega,exact", [((3, 2), 5), ((3, 3), 15), ((3, 1, 1), 6),
                                         ((5,), 1), ((3, 2, 1), 40)])
def test_bounds_bracket_exact_dimension(omega, exact):
    r = sandwich_certify(omega)
    _, plus = split_zero_plus(admissible_basis(5, weight_degree(omega)))
    assert exact == sum(1 for x in plus if weight_vector(x) == omega)
    assert r.lower <= exact <= r.upper
