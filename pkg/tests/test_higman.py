import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from squarecx.complex import is_nonpositively_curved
from squarecx.errors import BadLocalData, BadPolygon, BadSymbol
from squarecx.higman import (
    IDENTITY,
    BS12Element,
    Dyadic,
    EdgePath,
    LocalEdge,
    PolygonOfGroups,
    ball,
    bs12_compose,
    bs12_invert,
    coset_key,
    edge_intersection_trivial,
    edge_path_stabiliser_check,
    link_graph,
    normal_form,
    normal_form_element,
    polygonal_euler_characteristic,
    relation_holds,
    same_coset,
    scan_star_paths,
    star_patch,
    subdivide_to_squares,
    subgroup_membership,
    word_to_element,
)

a, b = word_to_element("a"), word_to_element("b")


def test_relation():
    assert relation_holds()
    assert word_to_element("abA") == BS12Element(0, 2) == bs12_compose(b, b)


def test_inverse_and_evaluation():
    g = word_to_element("abbA")
    assert bs12_compose(g, bs12_invert(g)).is_identity()
    h = word_to_element("Ba")
    assert h == BS12Element(1, -1) and h(1) == Dyadic(1)
    assert word_to_element("") == IDENTITY


def test_bad_symbol():
    with pytest.raises(BadSymbol):
        word_to_element("abc")


def test_dyadic_normalises():
    assert Dyadic(4, 2) == Dyadic(1) and Dyadic.of(Fraction(3, 8)) == Dyadic(3, 3)
    assert Dyadic(1, 1).fraction() == Fraction(1, 2)


def test_membership_examples():
    assert subgroup_membership(BS12Element(3), "A")
    assert not subgroup_membership(BS12Element(0, Dyadic(1, 1)), "B")
    assert not subgroup_membership(b, "B", c=a)
    assert subgroup_membership(BS12Element(0, 2), "B", c=a)


def test_intersections():
    assert edge_intersection_trivial(b, "A").trivial
    assert edge_intersection_trivial(IDENTITY, "B").trivial
    assert not edge_intersection_trivial(a, "A").trivial


def test_aba_inverse_is_not_trivial_word():
    g = word_to_element("aBAb")
    assert g == normal_form_element(normal_form("aBAb"))


def test_cosets():
    assert same_coset(IDENTITY, a, "A") and not same_coset(IDENTITY, b, "A")
    assert same_coset(a, word_to_element("ab"), "B")
    assert coset_key(word_to_element("ab"), "B") == coset_key(a, "B")


def test_link_graph_caps():
    P = PolygonOfGroups(5)
    g1, g4, g8 = (link_graph(P, 0, c) for c in (1, 4, 8))
    assert g1.shortest_cycle is None
    assert g4.certifies(4)
    assert len(g8.nodes) > len(g4.nodes) > len(g1.nodes)
    cycles = [g.shortest_cycle for g in (g4, g8) if g.shortest_cycle is not None]
    assert cycles == sorted(cycles, reverse=True)
    assert all(c % 2 == 0 and c >= 4 for c in cycles)


def test_path_check():
    P = PolygonOfGroups(5)
    mid_w, mid_w2 = LocalEdge("A", IDENTITY), LocalEdge("B", IDENTITY)
    v = edge_path_stabiliser_check(P, EdgePath(LocalEdge("B", IDENTITY), mid_w, mid_w2, LocalEdge("A", IDENTITY)))
    assert v.ok and v.note == "Trivial"
    with pytest.raises(BadLocalData):
        edge_path_stabiliser_check(P, EdgePath(LocalEdge("A", a), mid_w, mid_w2, LocalEdge("A", IDENTITY)))
    with pytest.raises(BadLocalData):
        edge_path_stabiliser_check(P, EdgePath(LocalEdge("B", IDENTITY), mid_w, mid_w, LocalEdge("A", IDENTITY)))


def test_star_scan_small_cap():
    r = scan_star_paths(PolygonOfGroups(5), 2)
    assert r["paths"] > 0 and r["nontrivial"] == 0


def test_subdivide_examples():
    X = subdivide_to_squares({"f": (0, 1, 2, 3, 4)})
    assert len(X.squares) == 5 and X.euler_characteristic == 1
    Y = subdivide_to_squares({"f": (0, 1, 2, 3)})
    assert len(Y.squares) == 4 and len(Y.vertices) == 9 and is_nonpositively_curved(Y)
    with pytest.raises(BadPolygon):
        subdivide_to_squares({"f": (0, 1, 2)})
    with pytest.raises(BadPolygon):
        subdivide_to_squares({"f": (0, 1, 0, 2)})


def test_star_patch():
    faces = star_patch(PolygonOfGroups(5), 1)
    X = subdivide_to_squares(faces)
    assert len(X.squares) == 5 * len(faces)
    assert X.euler_characteristic == polygonal_euler_characteristic(faces) == 1
    assert is_nonpositively_curved(X)


@given(st.text(alphabet="aAbB", max_size=12))
def test_normal_form_oracle(word):
    assert word_to_element(word) == normal_form_element(normal_form(word))


@given(st.text(alphabet="aAbB", max_size=8), st.text(alphabet="aAbB", max_size=8))
def test_homomorphism(u, v):
    assert word_to_element(u + v) == bs12_compose(word_to_element(u), word_to_element(v))


def test_free_reduction_is_identity():
    for n in range(1, 4):
        for w in itertools.product("ab", repeat=n):
            word = "".join(w)
            inv = "".join({"a": "A", "b": "B"}[c] for c in reversed(word))
            assert word_to_element(word + inv).is_identity()


def test_conjugates_of_a_meet_trivially():
    for w, g in ball(8):
        if not subgroup_membership(g, "A"):
            assert edge_intersection_trivial(g, "A").trivial, w
