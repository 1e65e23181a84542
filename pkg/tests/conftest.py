import random

import pytest
from hypothesis import settings

from squarecx.complex import build_complex

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return random.Random(20240611)


def two_squares_on_two_edges():
    """Two squares sharing the adjacent edges a, b (link of vertex 1 is a 2-cycle)."""
    return build_complex(
        range(5),
        {"a": (0, 1), "b": (1, 2), "c": (2, 3), "d": (3, 0), "f": (2, 4), "g": (4, 0)},
        {"s": ["a", "b", "c", "d"], "t": ["a", "b", "f", "g"]},
    )


def three_squares_around_vertex():
    """Three squares around vertex 0, glued cyclically: link of 0 is a 3-cycle."""
    verts = [0, 1, 2, 3, 12, 23, 31]
    edges = {"e1": (0, 1), "e2": (0, 2), "e3": (0, 3)}
    squares = {}
    for i, j in ((1, 2), (2, 3), (3, 1)):
        m = int(f"{i}{j}")
        edges[f"f{i}{j}"] = (i, m)
        edges[f"g{i}{j}"] = (m, j)
        squares[f"s{i}{j}"] = [f"e{i}", f"f{i}{j}", f"g{i}{j}", f"e{j}"]
    return build_complex(verts, edges, squares)


def five_around_vertex(k: int = 5):
    """``k`` squares around an internal vertex 0 (a disc, curvature 4 - k there)."""
    verts = [0] + [("r", i) for i in range(k)] + [("o", i) for i in range(k)]
    edges, squares = {}, {}
    for i in range(k):
        edges[("sp", i)] = (0, ("r", i))
        edges[("a", i)] = (("r", i), ("o", i))
        edges[("b", i)] = (("o", i), ("r", (i + 1) % k))
    for i in range(k):
        squares[i] = [("sp", i), ("a", i), ("b", i), ("sp", (i + 1) % k)]
    return build_complex(verts, edges, squares)


def branching_staircase(steps: int):
    """A thickness-1 staircase quadrangle and two maps into a target with a branching strip.

    The target is the band plus a second copy of its top cell row, glued along
    the bottom line of that row.  The first map is the inclusion; the second
    sends the top row to the copy.  The maps agree everywhere except on the
    top row, which lies outside the propagation box.
    """
    from squarecx.complex import CombinatorialMap
    from squarecx.generators import complex_from_vertex_squares, staircase_cells
    from squarecx.gridlab import staircase_quadrangle

    Q = staircase_quadrangle(steps, 1)
    S = Q.diagram.surface
    top = steps - 1
    squares = []
    for x, y in staircase_cells(steps, 1):
        squares.append(((x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)))
        if y == top:
            squares.append(((x, y), (x + 1, y), ("c", x + 1, y + 1), ("c", x, y + 1)))
    T = complex_from_vertex_squares(squares)
    ident = {v: v for v in S.vertices}
    moved = {v: (("c", *v) if v[1] == top + 1 else v) for v in S.vertices}
    return Q, CombinatorialMap.from_vertex_map(S, T, ident), CombinatorialMap.from_vertex_map(S, T, moved)
