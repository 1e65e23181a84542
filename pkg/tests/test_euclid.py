import itertools
import random

import pytest
from hypothesis import given, strategies as st

from squarecx.complex import CombinatorialMap, build_complex
from squarecx.diagram import DiscDiagram, Quadrangle, grid_quadrangle, is_euclidean, quadrangle_cut, singularities, width
from squarecx.errors import EmbedFail, NotFound, NotReduced
from squarecx.euclid import (
    complete_diagram,
    embed_euclidean,
    euclidean_subquadrangle,
    is_isometric_embedding,
    osculation_check,
)
from squarecx.generators import (
    grid_complex,
    random_disc,
    random_monotone_region,
    region_complex,
    staircase_cells,
)
from squarecx.hyperplane import hyperplanes, rails
from squarecx.metric import bfs, interval

from conftest import five_around_vertex


def all_pairs_exact(X, coords):
    for a, b in itertools.combinations(X.vertices, 2):
        (xa, ya), (xb, yb) = coords[a], coords[b]
        if bfs(X, a)[b] != abs(xa - xb) + abs(ya - yb):
            return False
    return True


def horizontal(X, y):
    """The hyperplane dual to the vertical edges of row ``y`` (grid ids)."""
    return next(H for H in hyperplanes(X) if ("y", 0, y) in H.dual_edges)


def test_osculation_grid_middle():
    X = grid_complex(3, 3)
    H = horizontal(X, 1)
    upper = next(r for r in rails(X, H) if (0, 2) in r.vertices)
    K = osculation_check(X, H, upper)
    assert K is not None and ("y", 0, 2) in K.dual_edges


def test_osculation_grid_top():
    X = grid_complex(3, 3)
    H = horizontal(X, 2)
    outer = next(r for r in rails(X, H) if (0, 3) in r.vertices)
    assert osculation_check(X, H, outer) is None


def test_osculation_staircase():
    X = region_complex([(0, 0), (1, 0), (2, 0), (1, 1), (2, 1), (3, 1)])
    H = next(H for H in hyperplanes(X) if ("y", 0, 0) in H.dual_edges)
    shared = next(r for r in rails(X, H) if (1, 1) in r.vertices)
    K = osculation_check(X, H, shared)
    assert K is not None and ("y", 3, 1) in K.dual_edges


def test_embed_grid():
    X = grid_complex(3, 4)
    coords = embed_euclidean(X)
    assert len(coords) == 20
    assert len(list(itertools.combinations(coords, 2))) == 190
    assert all_pairs_exact(X, coords)
    xs = sorted({c for c, _ in coords.values()})
    ys = sorted({c for _, c in coords.values()})
    assert (len(xs), len(ys)) in ((4, 5), (5, 4))


def test_embed_edge():
    X = build_complex([0, 1], {"e": (0, 1)})
    coords = embed_euclidean(X)
    assert sorted(coords.values()) in ([(0, 0), (1, 0)], [(0, 0), (0, 1)])


def test_embed_staircase():
    X = region_complex(staircase_cells(3))
    coords = embed_euclidean(X)
    assert all_pairs_exact(X, coords)


def test_embed_rejects_negative_vertex():
    with pytest.raises(EmbedFail):
        embed_euclidean(five_around_vertex(5))


def test_complete_rectangle_unchanged():
    D = DiscDiagram(grid_complex(2, 3))
    out = complete_diagram(D)
    assert out.changelog == [] and out.diagram is D


def test_complete_l_shape():
    T = grid_complex(2, 2)
    L = region_complex([(0, 0), (1, 0), (0, 1)])
    D = DiscDiagram(L, CombinatorialMap.from_vertex_map(L, T, {v: v for v in L.vertices}))
    out = complete_diagram(D)
    assert len(out.changelog) == 1 and out.diagram.area == 4
    assert set(out.diagram.map.square_map.values()) == set(T.squares)
    assert is_isometric_embedding(out.diagram.map).ok


def test_complete_staircase_in_grid():
    T = grid_complex(5, 5)
    S = region_complex(staircase_cells(4))
    D = DiscDiagram(S, CombinatorialMap.from_vertex_map(S, T, {v: v for v in S.vertices}))
    out = complete_diagram(D)
    assert out.diagram.area > D.area
    assert is_isometric_embedding(out.diagram.map).ok
    assert complete_diagram(out.diagram).changelog == []


def test_complete_needs_reduced():
    S, T = grid_complex(2, 1), grid_complex(1, 1)
    D = DiscDiagram(S, CombinatorialMap.from_vertex_map(S, T, {(i, j): (0 if i == 2 else i, j) for i, j in S.vertices}))
    with pytest.raises(NotReduced):
        complete_diagram(D)


def test_isometric_examples():
    X = grid_complex(4, 4)
    I = interval(X, (1, 0), (3, 2))
    sub = I.subcomplex
    assert is_isometric_embedding(CombinatorialMap.from_vertex_map(sub, X, {v: v for v in sub.vertices})).ok
    P = build_complex([0, 1, 2], {0: (0, 1), 1: (1, 2)})
    E = build_complex(["a", "b"], {"e": ("a", "b")})
    v = is_isometric_embedding(CombinatorialMap.from_vertex_map(P, E, {0: "a", 1: "b", 2: "a"}))
    assert not v.ok
    assert set(v.witness["pair"]) == {0, 2} and v.witness["source"] == 2 and v.witness["target"] == 0
    G = grid_complex(2, 1)
    assert is_isometric_embedding(CombinatorialMap.from_vertex_map(G, X, {(i, j): (i + 1, j + 2) for i, j in G.vertices})).ok


def test_subquadrangle_of_grid():
    Q = grid_quadrangle(10, 2)
    sub = euclidean_subquadrangle(Q, ((4, 0), (5, 0), (6, 0)))
    assert is_euclidean(sub).ok and not singularities(sub)
    assert {(4, 0), (5, 0), (6, 0)} <= set(sub.P_minus)
    assert width(sub) <= width(Q)


def notched_strip(length=16):
    cells = [(x, y) for x in range(length) for y in range(3) if (x, y) != (0, 1)]
    return Quadrangle.from_corners(DiscDiagram(region_complex(cells)), (0, 0), (length, 0), (length, 3), (0, 3))


def test_subquadrangle_extracts_core():
    Q = notched_strip()
    assert not singularities(Q) and not is_euclidean(Q).ok
    sub = euclidean_subquadrangle(Q, ((7, 0), (8, 0), (9, 0)))
    assert is_euclidean(sub).ok and width(sub) <= width(Q)
    assert set(sub.P_minus) >= {(7, 0), (8, 0), (9, 0)}


def test_subquadrangle_margin_report():
    with pytest.raises(NotFound) as err:
        euclidean_subquadrangle(notched_strip(), ((0, 0), (1, 0)))
    assert err.value.margin is not None and err.value.margin > 0


@st.composite
def euclidean_regions(draw):
    r = random.Random(draw(st.integers(0, 10**6)))
    return region_complex(random_monotone_region(draw(st.integers(1, 7)), r))


@given(euclidean_regions())
def test_embedding_property(X):
    assert all_pairs_exact(X, embed_euclidean(X))


@given(euclidean_regions())
def test_osculation_at_most_one(X):
    for H in hyperplanes(X):
        for rail in rails(X, H):
            osculation_check(X, H, rail)


@given(euclidean_regions(), st.integers(0, 10**6))
def test_subquadrangle_property(X, seed):
    r = random.Random(seed)
    Q = quadrangle_cut(DiscDiagram(X), r)
    if Q is None or len(Q.P_minus) < 3:
        return
    i = r.randrange(1, len(Q.P_minus) - 1)
    try:
        sub = euclidean_subquadrangle(Q, Q.P_minus[i : i + 1])
    except NotFound:
        return
    assert not singularities(sub) and width(sub) <= width(Q)
