import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hitprob.core_algebra import (cmp_weight, degree, enumerate_degree, enumerate_weight_layer,
                                  monomial_key, weight_vector)
from hitprob.filters import (CatalogEntry, CatalogIndex, Certificate, bundled_certificates,
                             catalog_filter, catalog_instances, certificate_problems,
                             load_catalog, load_certificate, parse_pattern, save_catalog,
                             save_certificate, silverman_hit, silverman_hit_any, singer_hit,
                             strictly_inadmissible, verify_certificate, walker_wood_hit)
from hitprob.hit_core import HitSpace, admissible_basis, is_hit
from hitprob.steenrod import sq


@pytest.fixture(scope="module")
def catalog():
    return load_catalog()


@pytest.fixture(scope="module")
def instances(catalog):
    return catalog_instances(catalog)


# -- hit criteria --------------------------------------------------------------------

def test_hit_criteria_examples():
    assert walker_wood_hit((6, 8))
    assert silverman_hit((5, 6), 2)
    assert silverman_hit((2,), 1)
    assert not singer_hit((7, 7))
    assert not walker_wood_hit((1, 1, 1))
    with pytest.raises(ValueError):
        silverman_hit((3, 4), 0)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_hit_criteria_are_sound(k):
    for n in range(1, 13):
        for x in enumerate_degree(k, n):
            if singer_hit(x) or walker_wood_hit(x) or silverman_hit_any(x):
                assert is_hit([x]), x


def test_no_spike_means_hit():
    assert singer_hit((2, 3)) and walker_wood_hit((2, 3))


def test_singer_implies_walker_wood():
    for n in range(1, 16):
        for x in enumerate_degree(3, n):
            if singer_hit(x):
                assert walker_wood_hit(x)


# -- strict inadmissibility ------------------------------------------------------------

def _strict_by_full_span(x):
    """Echelon form of every Sq^u(m), 1 <= u < 2^s, over all of P_k in degree n."""
    n, k, s = degree(x), len(x), len(weight_vector(x))
    mons = sorted(enumerate_degree(k, n), key=monomial_key)
    pos = {m: i for i, m in enumerate(mons)}
    pivots = {}
    for u in range(1, 1 << s):
        if u > n:
            break
        for m in enumerate_degree(k, n - u):
            v = 0
            for t in sq(u, [m]):
                v ^= 1 << pos[t]
            while v:
                top = v.bit_length() - 1
                if top not in pivots:
                    pivots[top] = v
                    break
                v ^= pivots[top]
    return pos[tuple(x)] in pivots


def test_strictly_inadmissible_examples():
    assert strictly_inadmissible((2, 1, 3, 0, 0))
    assert strictly_inadmissible((1, 2, 2, 1, 1))
    assert not strictly_inadmissible((7, 7, 0, 0, 0))
    assert not strictly_inadmissible((0, 0, 0))


@pytest.mark.parametrize("k,n", [(2, 6), (3, 5), (3, 6), (3, 9), (4, 6), (4, 7), (3, 13)])
def test_strictly_inadmissible_matches_full_span(k, n):
    for x in enumerate_degree(k, n):
        assert strictly_inadmissible(x) == _strict_by_full_span(x), x


def test_strict_implies_inadmissible():
    for n in range(2, 12):
        H = HitSpace(4, n)
        for x in enumerate_degree(4, n):
            if strictly_inadmissible(x):
                assert H.is_leading(x)


# -- catalog ---------------------------------------------------------------------------

def test_parse_pattern():
    assert parse_pattern("xi^2 xj xt^3") == [("i", 2), ("j", 1), ("t", 3)]
    assert parse_pattern("x1^3 x2^{5}") == [(1, 3), (2, 5)]
    with pytest.raises(ValueError):
        parse_pattern("y1^2")


def test_entry_instances():
    e = CatalogEntry("xi^2 xj xt^3", "perm5(i<j)")
    xs = e.instances()
    assert len(xs) == 30
    assert (2, 1, 3, 0, 0) in xs and (1, 2, 3, 0, 0) not in xs
    assert CatalogEntry("x1^3 x2^5 x3^6", "fixed", lift=7).instances() == {
        (7, 3, 5, 6, 0), (3, 7, 5, 6, 0), (3, 5, 7, 6, 0), (3, 5, 6, 7, 0), (3, 5, 6, 0, 7)}
    with pytest.raises(ValueError):
        CatalogEntry("xi^2", "swap").instances()


def test_catalog_round_trip(tmp_path, catalog):
    save_catalog(catalog, tmp_path / "c.json")
    assert load_catalog(tmp_path / "c.json") == catalog


def test_low_degree_instances_are_strictly_inadmissible(instances):
    small = [x for x in instances if degree(x) <= 20]
    assert len(small) == 321
    assert all(strictly_inadmissible(x) for x in small)


def test_catalog_filter_weight_22(catalog):
    layer = [x for x in enumerate_weight_layer(5, (2, 2)) if not walker_wood_hit(x)]
    kept = catalog_filter(layer, catalog)
    adm = [x for x in admissible_basis(5, 6) if weight_vector(x) == (2, 2)]
    assert len(layer) == 100 and len(kept) == 50
    assert set(adm) <= set(kept)
    assert catalog_filter(layer, []) == layer


def test_window_witness():
    idx = CatalogIndex(instances=[(2, 1, 3, 0, 0)])
    x = (1 + 8, 0 + 4, 1 + 12, 0, 0)
    assert idx.witness(x) == (2, (2, 1, 3, 0, 0))
    assert idx.witness((7, 7, 0, 0, 0)) is None


@given(st.lists(st.integers(0, 3), min_size=4, max_size=4), st.integers(1, 2))
def test_windowed_strict_monomials_are_inadmissible(z, r):
    # z * w^(2^r) with z below 2^r and w strictly inadmissible
    w = (2, 1, 3, 0)
    z = tuple(a & ((1 << r) - 1) for a in z)
    x = tuple(a + (b << r) for a, b in zip(z, w))
    assert HitSpace(4, degree(x)).is_leading(x)


@given(st.lists(st.integers(0, 2), min_size=4, max_size=4))
def test_strict_times_high_square_stays_strict(y):
    w = (2, 1, 3, 0)
    s = len(weight_vector(w))
    x = tuple(a + (b << s) for a, b in zip(w, y))
    if degree(x) <= 20:
        assert strictly_inadmissible(x)


# -- certificates -------------------------------------------------------------------------

@pytest.fixture(scope="module")
def certs():
    return bundled_certificates()


def test_bundled_certificates_verify(certs):
    assert len(certs) == 16
    for name, c in certs.items():
        assert verify_certificate(c), (name, certificate_problems(c))


def test_certificate_targets_are_catalog_instances(certs, instances):
    inst = set(instances)
    for c in certs.values():
        assert c.target in inst


def test_certificate_names_match_targets(certs):
    for name, c in certs.items():
        assert name == "strict_" + "_".join(map(str, c.target))


def _above(poly, omega):
    return any(cmp_weight(weight_vector(t), omega) >= 0 for t in poly)


def test_dropping_a_square_term(certs):
    rng = random.Random(7)
    for c in certs.values():
        j = rng.randrange(len(c.squares))
        u, poly = c.squares[j]
        h = poly[rng.randrange(len(poly))]
        rest = [h2 for h2 in poly if h2 != h]
        cut = Certificate(c.k, c.target, c.omega, c.smaller,
                          c.squares[:j] + [(u, rest)] + c.squares[j + 1:])
        assert verify_certificate(cut) == (not _above(sq(u, [h]), c.omega))


def test_dropping_a_smaller_term(certs):
    for c in certs.values():
        for j, y in enumerate(c.smaller[:3]):
            cut = Certificate(c.k, c.target, c.omega, c.smaller[:j] + c.smaller[j + 1:], c.squares)
            assert verify_certificate(cut) == (cmp_weight(weight_vector(y), c.omega) < 0)


def test_dropping_the_target_fails(certs):
    c = certs["strict_3_5_10_14_14"]
    other = Certificate(c.k, (3, 5, 10, 15, 13), None, c.smaller, c.squares)
    assert not verify_certificate(other)


def _printed_form(c):
    rep = c.meta["repairs"]
    smaller = set(c.smaller)
    squares = {u: set(poly) for u, poly in c.squares}
    for part in ("added", "removed"):
        smaller ^= {tuple(y) for y in rep[part]["smaller"]}
        for t in rep[part]["squares"]:
            squares.setdefault(t["u"], set()).symmetric_difference_update({tuple(t["term"])})
    return Certificate(c.k, c.target, c.omega, sorted(smaller),
                       [(u, sorted(p)) for u, p in sorted(squares.items()) if p])


def test_printed_forms_fail_where_repaired(certs):
    repaired = {n: c for n, c in certs.items() if "repairs" in c.meta}
    assert len(repaired) == 9
    for name, c in repaired.items():
        assert c.meta["printed_verifies"] is False
        try:
            ok = verify_certificate(_printed_form(c))
        except ValueError:
            ok = False
        assert not ok, name


def test_certificate_json_round_trip(tmp_path, certs):
    c = certs["strict_7_9_6_11_13"]
    save_certificate(c, tmp_path / "c.json")
    back = load_certificate(tmp_path / "c.json")
    assert back == c and verify_certificate(back)


@pytest.mark.parametrize("bad", [
    {"k": 5, "target": [1, 2, 3]},
    {"k": 2, "target": [1, 2], "omega": [3]},
    {"k": 2, "target": [1, 2], "smaller": [[1, 1]]},
    {"k": 2, "target": [1, 2], "squares": [{"u": 0, "poly": [[1, 2]]}]},
    {"k": 2, "target": [1, 2], "squares": [{"u": 1, "poly": [[1, 2]]}]},
])
def test_malformed_certificates(bad):
    with pytest.raises(ValueError):
        Certificate.from_json(json.loads(json.dumps(bad)))


def test_small_certificate_agrees_with_exact_decision():
    # x1^2 x2 x3^3 = Sq^1(x1 x2 x3^3) + smaller terms
    c = Certificate(3, (2, 1, 3), squares=[(1, [(1, 1, 3)])], smaller=[(1, 2, 3)])
    assert verify_certificate(c)
    assert strictly_inadmissible((2, 1, 3))
