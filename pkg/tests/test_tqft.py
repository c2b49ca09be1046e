import cmath
import itertools
import json
import math

import mpmath
import networkx as nx
import pytest
from hypothesis import given, strategies as st

from wrtrand.errors import (
    GenusUnsupported,
    InvalidGenus,
    InvalidLevel,
    LabelOutOfRange,
    NonIntegerVerlinde,
)
from wrtrand.tqft import (
    FREE_LOOP,
    Level,
    TrivalentSpine,
    admissible_triples_containing,
    canonical_spine,
    caterpillar_spine,
    count_admissible,
    det_exponent,
    det_exponent_brute_force,
    det_exponent_closed_form,
    dim_mu_ratio,
    enumerate_admissible,
    iter_admissible,
    tetrahedral_spine,
    theta_spine,
    twist_eigenvalue_exponent,
    twist_spectrum,
    verlinde_dimension,
    verlinde_value,
)

odd_levels = st.integers(2, 60).map(lambda k: 2 * k + 1)


def brute_force_labelings(r, spine):
    """Every labeling in product order, filtered by the four inequalities."""
    labels = range(0, r - 2, 2)
    out = []
    for lab in itertools.product(labels, repeat=spine.num_edges):
        ok = True
        for v in range(spine.num_vertices):
            a, b, c = (lab[k] for k in spine.incident(v))
            if not (a + b + c <= 2 * (r - 2) and b + c >= a and a + c >= b and a + b >= c):
                ok = False
        if ok:
            out.append(lab)
    return out


# --- Level ---------------------------------------------------------------

@pytest.mark.parametrize("bad", [3, 4, 6, 1, -5, 0, 5.0, True])
def test_level_rejects(bad):
    with pytest.raises(InvalidLevel):
        Level(bad)


@given(odd_levels)
def test_mu_between_zero_and_one(r):
    assert 0 < Level(r).mu < 1


@given(odd_levels)
def test_a_is_a_4r_th_root(r):
    lv = Level(r)
    assert lv.a_power(4 * r) == 0
    assert lv.a_power(1) == (r + 1) % (4 * r)


@pytest.mark.parametrize("r", [5, 7, 9, 11, 13])
def test_a_exponent_matches_complex_value(r):
    lv = Level(r)
    a = 1j * cmath.exp(2j * math.pi / (4 * r))
    z = cmath.exp(2j * math.pi * lv.a_exponent / (4 * r))
    assert abs(a - z) < 1e-12


def test_mu_value():
    assert Level(5).mu == pytest.approx(2 / math.sqrt(5) * math.sin(math.pi / 5), rel=1e-15)


@given(odd_levels)
def test_label_set(r):
    labels = Level(r).labels
    assert len(labels) == (r - 1) // 2
    assert all(a % 2 == 0 for a in labels)
    assert max(labels.labels) == r - 3


# --- spines --------------------------------------------------------------

def test_genus_one_spine():
    s = canonical_spine(1)
    assert s.num_vertices == 0 and s.edges == (FREE_LOOP,)
    assert s.betti_number == 1


def test_genus_two_is_theta():
    s = canonical_spine(2)
    assert s.num_vertices == 2 and s.num_edges == 3
    assert all(x != y for x, y in s.edges)


def test_genus_three_counts():
    s = canonical_spine(3)
    assert (s.num_vertices, s.num_edges, s.betti_number) == (4, 6, 3)


@given(st.integers(2, 12))
def test_caterpillar_invariants(g):
    s = caterpillar_spine(g)
    assert s.num_edges == 3 * g - 3
    assert s.num_vertices == 2 * g - 2
    assert s.betti_number == g
    assert all(len(s.incident(v)) == 3 for v in range(s.num_vertices))


def test_invalid_genus():
    with pytest.raises(InvalidGenus):
        canonical_spine(0)


def test_non_trivalent_spine_rejected():
    with pytest.raises(ValueError):
        TrivalentSpine(2, 2, ((0, 0), (0, 1), (0, 1)))


def test_disconnected_spine_rejected():
    # two theta graphs would have Betti 4 with 4 vertices, 6 edges, but split
    with pytest.raises(ValueError):
        TrivalentSpine(3, 4, ((0, 1), (0, 1), (0, 1), (2, 3), (2, 3), (2, 3)))


# --- enumeration ---------------------------------------------------------

def test_theta_r5_labelings():
    got = [l.labels for l in enumerate_admissible(Level(5), theta_spine())]
    assert got == [(0, 0, 0), (0, 2, 2), (2, 0, 2), (2, 2, 0), (2, 2, 2)]


def test_theta_r7_count():
    assert len(enumerate_admissible(Level(7), theta_spine())) == 14


def test_genus_one_labelings():
    got = [l.labels for l in enumerate_admissible(Level(5), canonical_spine(1))]
    assert got == [(0,), (2,)]


def test_labeling_json():
    lab = enumerate_admissible(Level(5), theta_spine())[1]
    assert json.loads(lab.to_json()) == [0, 2, 2]


@pytest.mark.parametrize(
    "r,spine",
    [(5, theta_spine()), (7, theta_spine()), (9, theta_spine()),
     (5, caterpillar_spine(3)), (7, caterpillar_spine(3)), (5, caterpillar_spine(4)),
     (7, tetrahedral_spine()), (5, caterpillar_spine(2))],
)
def test_enumeration_matches_product_brute_force(r, spine):
    assert [l.labels for l in enumerate_admissible(Level(r), spine)] == brute_force_labelings(r, spine)


@given(st.sampled_from([5, 7, 9, 11]), st.integers(1, 4))
def test_count_matches_enumeration(r, g):
    lv, sp = Level(r), canonical_spine(g)
    assert count_admissible(lv, sp) == sum(1 for _ in iter_admissible(lv, sp))


@pytest.mark.parametrize("r", [11, 13])
def test_full_enumeration_genus4(r):
    lv = Level(r)
    assert sum(1 for _ in iter_admissible(lv, canonical_spine(4))) == verlinde_dimension(lv, 4)


def test_enumeration_is_lexicographic():
    labs = [l.labels for l in enumerate_admissible(Level(9), caterpillar_spine(3))]
    assert labs == sorted(labs)


@pytest.mark.parametrize("r", [5, 7])
def test_spine_independence_genus_three(r):
    cat, tet = caterpillar_spine(3), tetrahedral_spine()
    assert not nx.is_isomorphic(cat.to_networkx(), tet.to_networkx())
    assert count_admissible(Level(r), cat) == count_admissible(Level(r), tet)
    assert count_admissible(Level(r), cat) == verlinde_dimension(Level(r), 3)


@pytest.mark.parametrize("r", [5, 7, 9, 11, 13])
@pytest.mark.parametrize("g", [1, 2, 3, 4, 5])
def test_labeling_count_equals_verlinde(r, g):
    assert count_admissible(Level(r), canonical_spine(g)) == verlinde_dimension(Level(r), g)


# --- Verlinde ------------------------------------------------------------

@pytest.mark.parametrize("r,g,d", [(5, 1, 2), (5, 2, 5), (7, 2, 14)])
def test_verlinde_examples(r, g, d):
    assert verlinde_dimension(Level(r), g) == d


@given(odd_levels)
def test_verlinde_genus_one(r):
    assert verlinde_dimension(Level(r), 1) == (r - 1) // 2


def test_verlinde_rejects_genus_zero():
    with pytest.raises(InvalidGenus):
        verlinde_dimension(Level(5), 0)


def test_verlinde_precision_guard():
    # 5 digits leave the (7, 3) sum about 1e-3 away from 98
    with pytest.raises(NonIntegerVerlinde):
        verlinde_dimension(Level(7), 3, dps=5)


def test_verlinde_value_close_to_integer():
    v = verlinde_value(Level(13), 5)
    assert abs(v - 10424765) < mpmath.mpf("1e-30")


# --- triples, twists, determinants ---------------------------------------

@pytest.mark.parametrize("r,a,n", [(5, 0, 2), (5, 2, 3), (7, 4, 5)])
def test_triples_containing_examples(r, a, n):
    assert admissible_triples_containing(Level(r), a) == n


@pytest.mark.parametrize("r", range(5, 32, 2))
def test_triples_containing_vs_enumeration(r):
    lv = Level(r)
    trip = list(iter_admissible(lv, theta_spine()))
    for a in lv.labels:
        assert admissible_triples_containing(lv, a) == sum(1 for t in trip if t[0] == a)
    assert sum(admissible_triples_containing(lv, a) for a in lv.labels) == verlinde_dimension(lv, 2)


@pytest.mark.parametrize("a", [1, 3, 6, -2])
def test_triples_label_out_of_range(a):
    with pytest.raises(LabelOutOfRange):
        admissible_triples_containing(Level(5), a)


@pytest.mark.parametrize("a,e", [(0, 0), (2, 8), (4, 24)])
def test_twist_exponent(a, e):
    assert twist_eigenvalue_exponent(a) == e


@given(st.integers(0, 500).map(lambda k: 2 * k))
def test_twist_exponent_divisible_by_four(a):
    assert twist_eigenvalue_exponent(a) % 4 == 0


def test_twist_exponent_rejects_odd():
    with pytest.raises(LabelOutOfRange):
        twist_eigenvalue_exponent(3)
    with pytest.raises(LabelOutOfRange):
        twist_eigenvalue_exponent(4, Level(5))


def test_twist_spectrum_multiplicities_sum_to_dimension():
    lv = Level(7)
    assert sum(x["multiplicity"] for x in twist_spectrum(lv, 2)) == 14
    assert sum(x["multiplicity"] for x in twist_spectrum(lv, 1)) == 3


@pytest.mark.parametrize(
    "r,g,e,one", [(5, 1, 8, False), (5, 2, 24, False), (7, 2, 168, True)]
)
def test_det_exponent_examples(r, g, e, one):
    rep = det_exponent(Level(r), g)
    assert rep.e == e
    assert rep.det_is_one is one


@pytest.mark.parametrize("r", range(5, 32, 2))
@pytest.mark.parametrize("g", [1, 2])
def test_det_exponent_two_ways(r, g):
    lv = Level(r)
    e = det_exponent_brute_force(lv, g)
    assert e == det_exponent_closed_form(lv, g)
    rep = det_exponent(lv, g)
    assert rep.det_is_one == (e % (4 * r) == 0)
    assert rep.divisible_by_4r == (e % (4 * r) == 0)
    assert e % 4 == 0 and rep.in_a4_subgroup
    if g == 2 and r % 5:
        assert rep.det_is_one


def test_det_exponent_high_genus():
    rep = det_exponent(Level(7), 3)
    assert rep.det_is_one and rep.e is None


def test_det_exponent_unsupported_directly():
    with pytest.raises(GenusUnsupported):
        det_exponent_closed_form(Level(7), 3)


# --- d_g / mu^(2-2g) -----------------------------------------------------

def test_ratio_genus_one():
    assert dim_mu_ratio(Level(5), 1) == pytest.approx(2.0, abs=1e-15)


@pytest.mark.parametrize("r", [5, 7, 11, 13])
@pytest.mark.parametrize("g", range(1, 9))
def test_ratio_two_routes(r, g):
    lv = Level(r)
    direct = verlinde_dimension(lv, g) * lv.mu ** (2 * g - 2)
    assert dim_mu_ratio(lv, g) == pytest.approx(direct, rel=1e-9)


def test_ratio_r7_g2():
    lv = Level(7)
    mu = 2 / math.sqrt(7) * math.sin(math.pi / 7)
    assert dim_mu_ratio(lv, 2) == pytest.approx(14 * mu**2, rel=1e-9)


@pytest.mark.parametrize("r", [5, 7, 9, 11, 13])
def test_ratio_converges_from_above(r):
    lv = Level(r)
    a2sq = (math.sin(math.pi / r) / math.sin(2 * math.pi / r)) ** 2
    vals = [dim_mu_ratio(lv, g) for g in range(2, 14)]
    assert all(v > 1 for v in vals)
    assert all(b < a for a, b in zip(vals, vals[1:]))
    for a, b in zip(vals, vals[1:]):
        assert b - 1 <= a2sq * (a - 1) * (1 + 1e-9)


@pytest.mark.parametrize("r", [5, 7, 9, 11, 13])
@pytest.mark.parametrize("g", range(1, 7))
def test_dimension_versus_mu_powers(r, g):
    # the exact ratio exceeds 1, so d_g > mu^(2-2g) always; the weaker
    # bound d_g < mu^(1-2g) is what the bundle argument needs (g >= 2)
    lv = Level(r)
    d = verlinde_dimension(lv, g)
    assert d > lv.mu ** (2 - 2 * g)
    if g >= 2:
        assert d < lv.mu ** (1 - 2 * g)
