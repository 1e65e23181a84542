import pytest
from hypothesis import given, strategies as st

from squarecx.action import (
    Automorphism,
    FiniteAction,
    book_rotation,
    format_permutations,
    grid_reflection,
    parse_permutations,
    parse_word,
    square_rotation,
    stabiliser,
    strip_translation,
    strip_with_rotation,
    translate_hausdorff,
    trivial_action,
    weak_acylindricity_probe,
    weak_wpd_probe,
)
from squarecx.complex import format_complex, parse_complex
from squarecx.errors import AxisTooShort, BadSymbol, InputError, NotAutomorphism, OutOfTruncation
from squarecx.generators import grid_complex


def test_trivial_stabiliser():
    A = trivial_action(grid_complex(2, 2))
    assert stabiliser(A, [(0, 0), (1, 1)]).elements == ((),)


def test_reflection_fixes_axis():
    A = grid_reflection(2, 2)
    S = stabiliser(A, [(1, 0), (1, 1), (1, 2)])
    assert len(S) == 2 and set(S.elements) == {(), ("r",)}
    assert len(stabiliser(A, [(0, 0)])) == 1


def test_rotation_about_centre():
    A = square_rotation()
    assert len(stabiliser(A, [(1, 1)])) == 4
    assert A.closed


def test_element_rejects_unknown_letter():
    with pytest.raises(BadSymbol):
        grid_reflection(2, 1).element("r.s")


def test_automorphism_rejects_non_bijection():
    X = grid_complex(1, 1)
    with pytest.raises(NotAutomorphism):
        Automorphism.from_vertex_map(X, {v: (0, 0) for v in X.vertices})


def test_acylindricity_free():
    A = trivial_action(grid_complex(3, 3))
    for L in range(1, 4):
        assert weak_acylindricity_probe(A, L, 1).ok


def test_acylindricity_book():
    A = book_rotation(4, 2)
    bad = weak_acylindricity_probe(A, 1, 3)
    assert not bad.ok and bad.witness["count"] == 4
    u, v = bad.witness["pair"]
    assert bad.witness["distance"] >= 1 and u in range(3) and v in range(3)
    assert weak_acylindricity_probe(A, 1, 4).ok


def test_acylindricity_reflection():
    A = grid_reflection(2, 2)
    assert not weak_acylindricity_probe(A, 2, 1).ok
    assert weak_acylindricity_probe(A, 3, 1).ok


def test_wpd_translation():
    A = strip_translation(6)
    axis = tuple((i, 0) for i in range(7))
    for m in (1, 2, 3):
        assert weak_wpd_probe(A, "t", axis, m, 1).ok


def test_wpd_rotation_factor():
    A = strip_with_rotation(6)
    axis = tuple((i, "c") for i in range(5))
    v = weak_wpd_probe(A, "t", axis, 1, 1)
    assert not v.ok and "r" in v.witness["elements"]


def test_wpd_axis_too_short():
    A = strip_translation(4)
    with pytest.raises(AxisTooShort):
        weak_wpd_probe(A, "t", tuple((i, 0) for i in range(5)), 5, 1)


def test_wpd_needs_translation():
    A = grid_reflection(2, 1)
    with pytest.raises(InputError):
        weak_wpd_probe(A, "r", ((0, 0), (1, 0), (2, 0)), 1, 1)


def test_hausdorff_examples():
    A = strip_translation(6)
    gamma = tuple((i, 0) for i in range(7))
    B = FiniteAction(A.complex, {"t": A.generators["t"], "id": Automorphism.identity(A.complex, "id")})
    assert translate_hausdorff(B, gamma[:6], "id", gamma[1:4]) == 0
    assert translate_hausdorff(A, gamma[:6], "t", gamma[1:4]) == 1
    with pytest.raises(OutOfTruncation):
        translate_hausdorff(A, gamma, "t", gamma[1:4])
    R = grid_reflection(2, 2)
    axis = ((1, 0), (1, 1), (1, 2))
    assert translate_hausdorff(R, axis, "r", axis) == 0


def test_word_parsing():
    assert parse_word("a.b^-1") == ("a", "b^-1")
    assert parse_word("1") == ()


def test_permutation_file_round_trip():
    A = book_rotation(3, 2)
    Y = parse_complex(format_complex(A.complex))
    text = format_permutations(A.generators)
    gens = parse_permutations(text, Y)
    assert format_permutations(gens) == text
    assert len(stabiliser(FiniteAction(Y, gens), [0, 1, 2])) == 3


@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 3), st.integers(0, 2))
def test_acylindricity_monotone(L, N, dL, dN):
    for A in (book_rotation(3, 3), grid_reflection(3, 2)):
        if weak_acylindricity_probe(A, L, N).ok:
            assert weak_acylindricity_probe(A, L + dL, N + dN).ok


@given(st.sampled_from(["q", "q.q", "q^-1", "q.q.q", "q^-1.q^-1"]))
def test_stabiliser_closed_under_inverse(word):
    A = square_rotation()
    words = stabiliser(A, [(1, 1)]).elements
    keys = {A.element(w).key() for w in words}
    assert A.element(word).inverse().key() in keys
