"""Constructors for standard test complexes: grids, products, regions of Z², random discs."""
from __future__ import annotations

import random
from typing import Iterable

from .complex import SquareComplex, build_complex, sorted_ids


def path_graph(n: int):
    """Vertices ``0..n``, edge ``i`` joins ``i`` and ``i+1``."""
    return list(range(n + 1)), {i: (i, i + 1) for i in range(n)}


def random_tree(n_vertices: int, rng: random.Random):
    verts = list(range(n_vertices))
    edges = {i - 1: (rng.randrange(i), i) for i in range(1, n_vertices)}
    return verts, edges


def graph_complex(graph) -> SquareComplex:
    verts, edges = graph
    return build_complex(verts, edges)


def product_complex(g1, g2) -> SquareComplex:
    """Square complex of the product of two graphs (CAT(0) when both are trees)."""
    v1, e1 = g1
    v2, e2 = g2
    vertices = [(a, b) for a in v1 for b in v2]
    edges = {}
    for e, (a1, a2) in e1.items():
        for b in v2:
            edges[("x", e, b)] = ((a1, b), (a2, b))
    for e, (b1, b2) in e2.items():
        for a in v1:
            edges[("y", a, e)] = ((a, b1), (a, b2))
    squares = {}
    for ea, (a1, a2) in e1.items():
        for eb, (b1, b2) in e2.items():
            squares[(ea, eb)] = [(("x", ea, b1), 1), (("y", a2, eb), 1), (("x", ea, b2), -1), (("y", a1, eb), -1)]
    return build_complex(vertices, edges, squares)


def grid_complex(length: int, width: int) -> SquareComplex:
    """``I_length x I_width``: vertex ``(i, j)``, square ``(i, j)`` is the cell ``[i,i+1]x[j,j+1]``."""
    return product_complex(path_graph(length), path_graph(width))


def single_square() -> SquareComplex:
    return build_complex([0, 1, 2, 3], {"a": (0, 1), "b": (1, 2), "c": (2, 3), "d": (3, 0)}, {"s": ["a", "b", "c", "d"]})


def region_complex(cells: Iterable[tuple]) -> SquareComplex:
    """Union of unit cells of the Z² tiling; ids follow :func:`grid_complex`."""
    cells = set(cells)
    vertices, edges, squares = set(), {}, {}
    for x, y in cells:
        vertices.update({(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)})
        edges[("x", x, y)] = ((x, y), (x + 1, y))
        edges[("x", x, y + 1)] = ((x, y + 1), (x + 1, y + 1))
        edges[("y", x, y)] = ((x, y), (x, y + 1))
        edges[("y", x + 1, y)] = ((x + 1, y), (x + 1, y + 1))
        squares[(x, y)] = [(("x", x, y), 1), (("y", x + 1, y), 1), (("x", x, y + 1), -1), (("y", x, y), -1)]
    return build_complex(sorted_ids(vertices), edges, squares)


def staircase_cells(steps: int, thickness: int = 1) -> list:
    """Diagonal band of cells ``(y + d, y)`` for ``0 <= d <= thickness``."""
    return [(y + d, y) for y in range(steps) for d in range(thickness + 1)]


def random_polyomino(n_cells: int, rng: random.Random) -> set:
    cells = {(0, 0)}
    while len(cells) < n_cells:
        x, y = rng.choice(sorted(cells))
        dx, dy = rng.choice([(1, 0), (-1, 0), (0, 1), (0, -1)])
        cells.add((x + dx, y + dy))
    return cells


def random_monotone_region(columns: int, rng: random.Random, max_step: int = 2) -> set:
    """Cells between two random monotone staircases; always a disc.

    Column ``x`` holds the cells ``lo[x] <= y < hi[x]``; both bounds are
    non-decreasing and consecutive columns overlap in at least one cell.
    """
    lo, hi = [0], [1 + rng.randrange(max_step + 1)]
    for x in range(1, columns):
        lo.append(lo[-1] + rng.randrange(hi[-1] - lo[-1]))
        hi.append(max(hi[-1], lo[-1] + 1) + rng.randrange(max_step + 1))
    return {(x, y) for x in range(columns) for y in range(lo[x], hi[x])}


def random_disc(n_squares: int, rng: random.Random, flat_bias: float = 0.5, bump_rate: float = 0.2) -> SquareComplex:
    """Random planar CAT(0) disc grown by closing boundary vertices.

    Each closed vertex receives 4 squares with probability ``flat_bias`` and 5
    otherwise, so interior curvature is zero or negative.
    """
    squares = [(0, 1, 2, 3)]
    count = {0: 1, 1: 1, 2: 1, 3: 1}
    boundary = [0, 1, 2, 3]
    nxt = 4

    def new_vertex():
        nonlocal nxt
        nxt += 1
        count[nxt - 1] = 0
        return nxt - 1

    while len(squares) < n_squares:
        L = len(boundary)
        if rng.random() < bump_rate:
            i = rng.randrange(L)
            p, q = boundary[i], boundary[(i + 1) % L]
            y, z = new_vertex(), new_vertex()
            squares.append((p, z, y, q))
            for w in (p, q, y, z):
                count[w] += 1
            boundary[i + 1 : i + 1] = [z, y]
            continue
        i = rng.randrange(L)
        v = boundary[i]
        target = 4 if rng.random() < flat_bias else 5
        k = target - count[v]
        if k < 1 or L < 4 or len(squares) + k > n_squares:
            continue
        a, b = boundary[i - 1], boundary[(i + 1) % L]
        spokes = [a] + [new_vertex() for _ in range(k - 1)] + [b]
        outer = []
        for j in range(k):
            x = new_vertex()
            squares.append((spokes[j], v, spokes[j + 1], x))
            for w in (spokes[j], v, spokes[j + 1], x):
                count[w] += 1
            outer.append(x)
            if j < k - 1:
                outer.append(spokes[j + 1])
        # replace v by the new outer arc
        if i == 0:
            boundary = outer + boundary[1:]
        else:
            boundary = boundary[:i] + outer + boundary[i + 1 :]
    return _complex_from_vertex_squares(squares)


def _complex_from_vertex_squares(squares) -> SquareComplex:
    edge_id, edges = {}, {}
    walks = {}
    for sid, cyc in enumerate(squares):
        walk = []
        for j in range(4):
            u, w = cyc[j], cyc[(j + 1) % 4]
            key = frozenset((u, w))
            if key not in edge_id:
                edge_id[key] = len(edge_id)
                edges[edge_id[key]] = (u, w)
            e = edge_id[key]
            walk.append((e, 1 if edges[e] == (u, w) else -1))
        walks[sid] = walk
    vertices = sorted_ids({v for cyc in squares for v in cyc})
    return build_complex(vertices, edges, walks)


def complex_from_vertex_squares(squares) -> SquareComplex:
    """Build a complex from squares given as 4-cycles of vertex ids."""
    return _complex_from_vertex_squares(list(squares))


def shuffle_ids(X: SquareComplex, rng: random.Random):
    """Replace every id by a random integer; returns the new complex and the vertex renaming."""
    def perm(ids):
        ids = list(ids)
        labels = list(range(len(ids)))
        rng.shuffle(labels)
        return dict(zip(ids, labels))

    vmap, emap, smap = perm(X.vertices), perm(X.edge_ids), perm(X.square_ids)
    return X.relabel(vmap, emap, smap), vmap


def book_complex(pages: int, spine: int) -> SquareComplex:
    """``pages`` squares hinged on the first edge of a path of length ``spine``."""
    verts = list(range(spine + 1))
    edges = {("sp", i): (i, i + 1) for i in range(spine)}
    squares = {}
    for p in range(pages):
        a, b = ("p", p, 0), ("p", p, 1)
        verts += [a, b]
        edges[("pe", p, 0)] = (0, a)
        edges[("pe", p, 1)] = (a, b)
        edges[("pe", p, 2)] = (b, 1)
        squares[("pg", p)] = [("sp", 0), ("pe", p, 2), ("pe", p, 1), ("pe", p, 0)]
    return build_complex(verts, edges, squares)
