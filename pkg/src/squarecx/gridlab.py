"""Grids in square complexes: factorization of grid maps, concatenation and piling up
of diagrams, corridors and staircases."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .complex import CombinatorialMap, SquareComplex, build_complex, id_key, sorted_ids
from .diagram import DiscDiagram, Quadrangle, curvature, gauss_bonnet_total, width
from .errors import (
    CapExceeded,
    EmptyOverlap,
    InconsistentFold,
    InputError,
    MapsDisagreeOnBase,
    MismatchBug,
    NotGeodesicBottom,
    OutOfTruncation,
    TooFewCorners,
    TopologyBug,
)
from .euclid import embed_euclidean, is_isometric_embedding
from .generators import grid_complex
from .metric import bfs, distance_l1


@dataclass(frozen=True)
class Grid:
    length: int
    width: int

    def __post_init__(self):
        if self.length < 1 or self.width < 0:
            raise InputError("grids need length >= 1 and width >= 0")

    @cached_property
    def complex(self) -> SquareComplex:
        return grid_complex(self.length, self.width)


def grid_shape(X: SquareComplex) -> tuple:
    """``(m, n)`` when ``X`` carries the vertex ids of :func:`grid_complex`."""
    try:
        m = max(i for i, _ in X.vertices)
        n = max(j for _, j in X.vertices)
    except (TypeError, ValueError):
        raise InputError("source is not a grid complex") from None
    if set(X.vertices) != {(i, j) for i in range(m + 1) for j in range(n + 1)} or m < 1:
        raise InputError("source is not a grid complex")
    return m, n


# -- factorization -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GridFactorization:
    tree: tuple  # (vertices, {edge: (a, b)})
    vertical_map: dict  # row j -> tree vertex
    embedding: CombinatorialMap  # I_m x T -> X
    source: CombinatorialMap

    @property
    def tree_edges(self) -> list:
        _, edges = self.tree
        return [(e, *edges[e]) for e in sorted_ids(edges)]

    def composite(self) -> CombinatorialMap:
        """``(id x vertical_map)`` followed by the embedding."""
        G = self.source.source
        P = self.embedding.source
        vmap = {(i, j): (i, self.vertical_map[j]) for i, j in G.vertices}
        return CombinatorialMap.from_vertex_map(G, P, vmap).compose(self.embedding)

    def round_trip(self) -> bool:
        c, phi = self.composite(), self.source
        return (
            dict(c.vertex_map) == dict(phi.vertex_map)
            and dict(c.edge_map) == dict(phi.edge_map)
            and dict(c.square_map) == dict(phi.square_map)
        )


def factorize_grid(phi: CombinatorialMap, certify: bool = True) -> GridFactorization:
    """Factor a map ``I_m x I_n -> X`` with geodesic bottom row through ``I_m x T``.

    Rows are added one at a time.  The new cell row either repeats, cell for
    cell, the cell row of a tree edge at the current tree vertex (fold) or
    shares no cell with it (new tree edge).
    """
    G, X = phi.source, phi.target
    m, n = grid_shape(G)
    vm, em, sm = phi.vertex_map, phi.edge_map, phi.square_map
    bottom = [vm[(i, 0)] for i in range(m + 1)]
    if len(set(bottom)) != len(bottom) or distance_l1(X, bottom[0], bottom[-1]) != m:
        raise NotGeodesicBottom("bottom row is not sent to a geodesic")

    tverts, tedges = ["t0"], {}
    cells_of = {}  # tree edge -> (lower tree vertex, cell images by column)
    vertical = {0: "t0"}
    for j in range(n):
        t = vertical[j]
        cells = tuple(sm[(i, j)] for i in range(m))
        nxt = None
        for te in sorted_ids(cells_of):
            low, row = cells_of[te]
            hits = [i for i in range(m) if row[i] == cells[i]]
            if not hits:
                continue
            a, b = tedges[te]
            if len(hits) < m or t not in (a, b):
                raise InconsistentFold(
                    f"cell row {j} meets the cells of tree edge {te} in columns {hits} only"
                )
            nxt = b if t == a else a
            break
        if nxt is None:
            nxt = f"t{len(tverts)}"
            te = f"e{len(tedges)}"
            tverts.append(nxt)
            tedges[te] = (t, nxt)
            cells_of[te] = (t, cells)
        vertical[j + 1] = nxt

    P = _tree_product(m, tverts, tedges)
    hv, he, hs = {}, {}, {}

    def put(table, key, value, what):
        if table.setdefault(key, value) != value:
            raise InconsistentFold(f"{what} {key!r} receives two images")

    for j in range(n + 1):
        t = vertical[j]
        for i in range(m + 1):
            put(hv, (i, t), vm[(i, j)], "vertex")
        for i in range(m):
            put(he, ("x", i, t), em[("x", i, j)], "edge")
    for j in range(n):
        a, b = vertical[j], vertical[j + 1]
        te = next(k for k, ends in tedges.items() if set(ends) == {a, b})
        for i in range(m + 1):
            put(he, ("y", i, te), em[("y", i, j)], "edge")
        for i in range(m):
            put(hs, (i, te), sm[(i, j)], "square")
    try:
        h = CombinatorialMap(P, X, hv, he, hs)
    except InputError as exc:
        raise InconsistentFold(str(exc)) from exc
    out = GridFactorization((tuple(tverts), dict(tedges)), vertical, h, phi)
    if certify:
        verdict = is_isometric_embedding(h)
        if not verdict.ok:
            raise InconsistentFold(f"tree product does not embed isometrically: {verdict.witness['pair']}")
    return out


def _tree_product(m: int, tverts: list, tedges: dict) -> SquareComplex:
    """``I_m x T`` with vertex ``(i, t)``, edges ``("x", i, t)`` / ``("y", i, e)``, square ``(i, e)``."""
    verts = [(i, t) for t in tverts for i in range(m + 1)]
    edges = {}
    for t in tverts:
        for i in range(m):
            edges[("x", i, t)] = ((i, t), (i + 1, t))
    for e, (a, b) in tedges.items():
        for i in range(m + 1):
            edges[("y", i, e)] = ((i, a), (i, b))
    squares = {}
    for e, (a, b) in tedges.items():
        for i in range(m):
            squares[(i, e)] = [(("x", i, a), 1), (("y", i + 1, e), 1), (("x", i, b), -1), (("y", i, e), -1)]
    return build_complex(verts, edges, squares)


# -- concatenation and piling up ----------------------------------------------------


def _glue(A: DiscDiagram, upper: tuple, B: DiscDiagram, lower: tuple):
    """Identify points of ``upper`` (in A) and ``lower`` (in B) with equal images.

    Returns the glued diagram with integer ids and the vertex renamings of A and B.
    """
    if A.target is not B.target:
        raise InputError("diagrams map into different targets")
    X = A.target
    img_a = {A.map.vertex_map[x]: x for x in upper}
    pos_b = [i for i, y in enumerate(lower) if B.map.vertex_map[y] in img_a]
    if not pos_b:
        raise EmptyOverlap("upper and lower sides have no common image point")
    if pos_b != list(range(pos_b[0], pos_b[-1] + 1)):
        raise InputError("the sides do not overlap along a single sub-segment")
    pos_a = sorted(upper.index(img_a[B.map.vertex_map[lower[i]]]) for i in pos_b)
    if pos_a != list(range(pos_a[0], pos_a[-1] + 1)):
        raise InputError("the sides do not overlap along a single sub-segment")

    SA, SB = A.surface, B.surface
    ren_a = {v: k for k, v in enumerate(sorted_ids(SA.vertices))}
    ren_b = {}
    for y in lower:
        x = img_a.get(B.map.vertex_map[y])
        if x is not None:
            ren_b[y] = ren_a[x]
    k = len(ren_a)
    for v in sorted_ids(SB.vertices):
        if v not in ren_b:
            ren_b[v] = k
            k += 1

    edges, emap, eren_a, eren_b = {}, {}, {}, {}
    for n, e in enumerate(SA.edge_ids):
        a, b = SA.edges[e]
        eren_a[e] = n
        edges[n] = (ren_a[a], ren_a[b])
        emap[n] = A.map.edge_map[e]
    by_ends = {frozenset(ends): n for n, ends in edges.items()}
    glued_ids = {ren_a[x] for x in upper}
    n = len(edges)
    for e in SB.edge_ids:
        a, b = SB.edges[e]
        ends = frozenset((ren_b[a], ren_b[b]))
        shared = by_ends.get(ends)
        if shared is not None and ends <= glued_ids:
            if emap[shared] != B.map.edge_map[e]:
                raise InputError(f"glued edge {e!r} has two images")
            eren_b[e] = shared
            continue
        eren_b[e] = n
        edges[n] = (ren_b[a], ren_b[b])
        emap[n] = B.map.edge_map[e]
        n += 1

    squares, smap = {}, {}
    for tag, S, eren, D in (("a", SA, eren_a, A), ("b", SB, eren_b, B)):
        for s in S.square_ids:
            sid = len(squares)
            squares[sid] = [eren[e] for e in S.square_edges(s)]
            smap[sid] = D.map.square_map[s]
    vmap = {ren_a[v]: A.map.vertex_map[v] for v in SA.vertices}
    vmap.update({ren_b[v]: B.map.vertex_map[v] for v in SB.vertices})
    surface = build_complex(range(k), edges, squares)
    glued = DiscDiagram(surface, CombinatorialMap(surface, X, vmap, emap, smap))
    if not glued.is_degenerate and gauss_bonnet_total(glued) != 4:
        raise TopologyBug("concatenation breaks the Gauss-Bonnet total")
    if surface.euler_characteristic != 1:
        raise TopologyBug("concatenation is not contractible")
    return glued, ren_a, ren_b


def concatenate(Q1: Quadrangle, Q2: Quadrangle) -> DiscDiagram:
    """Glue ``Q2`` on top of ``Q1`` along the common part of ``gamma_plus`` and ``gamma_minus'``."""
    return _glue(Q1.diagram, Q1.P_plus, Q2.diagram, Q2.P_minus)[0]


def path_diagram(X: SquareComplex, gamma: tuple) -> DiscDiagram:
    """The degenerate diagram given by a vertex path of ``X``."""
    verts = list(range(len(gamma)))
    edges = {i: (i, i + 1) for i in range(len(gamma) - 1)}
    S = build_complex(verts, edges)
    return DiscDiagram(S, CombinatorialMap.from_vertex_map(S, X, dict(enumerate(gamma))))


def translate_diagram(D: DiscDiagram, g) -> DiscDiagram:
    """Post-compose the map of ``D`` with an automorphism of its target."""
    phi = D.map
    try:
        vm = {v: g.vertex_map[w] for v, w in phi.vertex_map.items()}
        em = {e: g.edge_map[f] for e, f in phi.edge_map.items()}
        sm = {s: g.square_map[t] for s, t in phi.square_map.items()}
    except KeyError as exc:
        raise OutOfTruncation(f"automorphism is undefined at {exc.args[0]!r}") from None
    return DiscDiagram(D.surface, CombinatorialMap(D.surface, phi.target, vm, em, sm))


def pile_up(gamma: tuple, elements: list, diagrams: list, target: SquareComplex | None = None) -> DiscDiagram:
    """Stack ``h_1...h_{i-1} . D_i`` for ``i = 1..n``; ``D_i`` joins ``gamma`` to ``h_i gamma``.

    With no elements the result is the path diagram of ``gamma`` in ``target``.
    """
    if len(elements) != len(diagrams):
        raise InputError("need one quadrangle per element")
    gamma = tuple(gamma)
    if not diagrams:
        if target is None:
            raise InputError("an empty pile-up needs the target complex")
        return path_diagram(target, gamma)
    current = upper = g = None
    for h, Q in zip(elements, diagrams):
        if Q.gamma_minus != gamma or Q.gamma_plus != tuple(h.vertex_map.get(x) for x in gamma):
            raise InputError("quadrangle does not join gamma to its translate")
        if current is None:
            current, upper, g = Q.diagram, Q.P_plus, h
            continue
        moved = translate_diagram(Q.diagram, g)
        current, _, ren = _glue(current, upper, moved, Q.P_minus)
        upper = tuple(ren[v] for v in Q.P_plus)
        g = h.then(g)
    return current



# -- corridors and staircases ---------------------------------------------------------


def _interior_corners(D, side: tuple) -> list:
    return [v for v in side[1:-1] if curvature(D, v) != 0]


def is_corridor(Q: Quadrangle) -> bool:
    D = Q.diagram
    return not _interior_corners(D, Q.P_minus) and not _interior_corners(D, Q.P_plus)


def is_staircase(Q: Quadrangle) -> bool:
    return bool(_interior_corners(Q.diagram, Q.P_minus))


_DIHEDRAL = [
    lambda x, y: (x, y),
    lambda x, y: (-y, x),
    lambda x, y: (-x, -y),
    lambda x, y: (y, -x),
    lambda x, y: (-x, y),
    lambda x, y: (y, x),
    lambda x, y: (x, -y),
    lambda x, y: (-y, -x),
]


def _normalise(Q: Quadrangle, coords: dict) -> dict:
    """Plane coordinates in which every square on ``P_minus`` lies above or to the left."""
    S = Q.diagram.surface
    path = Q.P_minus
    for f in _DIHEDRAL:
        c = {v: f(*p) for v, p in coords.items()}
        cells = set()
        for s in S.squares:
            xs, ys = zip(*(c[v] for v in S.square_vertices(s)))
            cells.add((min(xs), min(ys)))
        ok = True
        for a, b in zip(path, path[1:]):
            (xa, ya), (xb, yb) = c[a], c[b]
            if ya == yb:
                want = (min(xa, xb), ya)
            else:
                want = (xa - 1, min(ya, yb))
            if want not in cells:
                ok = False
                break
        if ok:
            return c
    raise InputError("P_minus is not a monotone lower boundary of the staircase")


def staircase_quadrangle(steps: int, thickness: int = 1) -> Quadrangle:
    """The band :func:`staircase_cells` with its lower-right zigzag as ``P_minus``."""
    from .generators import region_complex, staircase_cells

    D = DiscDiagram(region_complex(staircase_cells(steps, thickness)))
    top = steps - 1
    return Quadrangle.from_corners(D, (0, 0), (top + thickness + 1, top), (top + thickness + 1, top + 1), (0, 1))


@dataclass(frozen=True)
class Propagation:
    segment: tuple  # sub-path of P_plus on which all maps agree
    order: tuple  # squares of K in propagation order
    box: tuple  # (v, v') spanning K

    @property
    def length(self) -> int:
        return len(self.segment) - 1


def _agree(maps: list, kind: str, cell) -> bool:
    table = {"v": "vertex_map", "e": "edge_map", "s": "square_map"}[kind]
    first = getattr(maps[0], table)[cell]
    return all(getattr(phi, table)[cell] == first for phi in maps[1:])


def staircase_propagate(Q: Quadrangle, maps: list, k: int, r: int | None = None) -> Propagation:
    """Certify that maps agreeing on ``P_minus`` agree on a length-``k`` piece of ``P_plus``.

    Squares of ``K = D ∩ Int(v, v')`` are visited bottom row first, right to
    left; each has its right and bottom edges already determined.
    """
    D = Q.diagram
    S = D.surface
    w = width(Q)
    if r is None:
        r = w
    if w > r:
        raise InputError(f"staircase has width {w} > r = {r}")
    if k < 1:
        raise InputError("k must be at least 1")
    corners = _interior_corners(D, Q.P_minus)
    if len(corners) < 2 * r + 2 * k:
        raise TooFewCorners(f"P_minus has {len(corners)} corners, need {2 * r + 2 * k}")
    maps = list(maps)
    if not maps:
        raise InputError("need at least one map")
    for phi in maps:
        if phi.source is not S:
            raise InputError("maps must be defined on the staircase surface")
    base_edges = {S.edge_between(a, b) for a, b in zip(Q.P_minus, Q.P_minus[1:])}
    for v in Q.P_minus:
        if not _agree(maps, "v", v):
            raise MapsDisagreeOnBase(f"maps differ at vertex {v!r} of P_minus")
    for e in base_edges:
        if not _agree(maps, "e", e):
            raise MapsDisagreeOnBase(f"maps differ at edge {e!r} of P_minus")

    c = _normalise(Q, embed_euclidean(D))
    reflex = [v for v in Q.P_minus[1:-1] if curvature(D, v) < 0]
    if len(reflex) < 2:
        raise TooFewCorners("P_minus needs two corners of negative curvature")
    v0, v1 = reflex[0], reflex[-1]
    (x0, y0), (x1, y1) = c[v0], c[v1]
    xlo, xhi, ylo, yhi = min(x0, x1), max(x0, x1), min(y0, y1), max(y0, y1)
    inside = lambda p: xlo <= p[0] <= xhi and ylo <= p[1] <= yhi
    K = [s for s in S.square_ids if all(inside(c[v]) for v in S.square_vertices(s))]

    def cell(s):
        xs, ys = zip(*(c[v] for v in S.square_vertices(s)))
        return min(xs), min(ys)

    order = sorted(K, key=lambda s: (cell(s)[1], -cell(s)[0]))
    known = set(base_edges)
    for s in order:
        x, y = cell(s)
        by_pos = {}
        for e in S.square_edges(s):
            (ax, ay), (bx, by) = c[S.edges[e][0]], c[S.edges[e][1]]
            if ay == by:
                by_pos["bottom" if ay == y else "top"] = e
            else:
                by_pos["left" if ax == x else "right"] = e
        if by_pos["bottom"] not in known or by_pos["right"] not in known:
            raise MismatchBug(f"square {s!r} is reached before its right and bottom edges")
        if not _agree(maps, "s", s) or not all(_agree(maps, "e", e) for e in S.square_edges(s)):
            raise MismatchBug(f"maps differ on square {s!r} although two adjacent edges agree")
        known.update(S.square_edges(s))

    best, run = (), [Q.P_plus[0]]
    for a, b in zip(Q.P_plus, Q.P_plus[1:]):
        if S.edge_between(a, b) in known:
            run.append(b)
        else:
            run = [b]
        if len(run) > len(best):
            best = tuple(run)
    if len(best) == 1 and len(Q.P_plus) == 1:
        best = tuple(Q.P_plus)
    for v in best:
        if not _agree(maps, "v", v):
            raise MismatchBug(f"maps differ at vertex {v!r} of the certified segment")
    return Propagation(best, tuple(order), (v0, v1))


# -- largest embedded grid ------------------------------------------------------------


@dataclass(frozen=True)
class GridBound:
    length: int
    width: int
    square_side: int
    states: int

    @property
    def c_box(self) -> int:
        return self.square_side + 1

    def __iter__(self):
        return iter((self.length, self.width))


def _extend(X: SquareComplex, grid: tuple, up: bool):
    """Grids one row (``up``) or one column larger than ``grid`` (rows of vertex ids)."""
    rows = grid
    if not up:
        # a new column is a new row of the transposed grid
        cols = tuple(zip(*rows))
        return [tuple(zip(*g)) for g in _extend(X, cols, True)]
    top = rows[-1]
    out = []
    if len(top) == 1:
        for w, _ in X.neighbours(top[0]):
            out.append(rows + ((w,),))
        return out
    e0 = X.edge_between(top[0], top[1])
    below = X.edge_between(rows[-2][0], rows[-2][1]) if len(rows) > 1 else None
    for s in X.edge_squares[e0]:
        if below is not None and below in X.square_edges(s):
            continue
        side = next(f for f in X.corner_edges(s, top[0]) if f != e0)
        new = [X.other_end(side, top[0])]
        ok = True
        for i in range(1, len(top)):
            up_prev = X.edge_between(top[i - 1], new[-1])
            across = X.edge_between(top[i - 1], top[i])
            sq = None if up_prev is None else X.square_with_corner(up_prev, across)
            if sq is None:
                ok = False
                break
            far = [v for v in X.square_vertices(sq) if v not in (top[i - 1], top[i], new[-1])]
            new.append(far[0])
        if ok:
            out.append(rows + (tuple(new),))
    return out


def _is_isometric_grid(X: SquareComplex, rows: tuple) -> bool:
    pts = {}
    for j, row in enumerate(rows):
        for i, v in enumerate(row):
            if v in pts:
                return False
            pts[v] = (i, j)
    for v, (i, j) in pts.items():
        d = bfs(X, v)
        for w, (a, b) in pts.items():
            if d.get(w) != abs(i - a) + abs(j - b):
                return False
    return True


def largest_embedded_grid(X: SquareComplex, cap: int = 10**5) -> GridBound:
    """Largest isometrically embedded grid, by anchored growth from every oriented edge.

    Grids are compared by area, then by the shorter side, then by length.
    ``square_side`` is the side of the largest embedded square grid.
    """
    seen = set()
    stack = []
    for e in X.edge_ids:
        a, b = X.edges[e]
        stack += [((a, b),), ((b, a),)]
    best = (0, 0, 0)
    side = 0
    states = 0
    while stack:
        rows = stack.pop()
        if rows in seen:
            continue
        seen.add(rows)
        states += 1
        if states > cap:
            raise CapExceeded(f"grid search exceeded {cap} states", partial_count=states)
        l, h = len(rows[0]) - 1, len(rows) - 1
        lo, hi = min(l, h), max(l, h)
        best = max(best, (l * h, lo, hi))
        side = max(side, lo)
        for up in (True, False):
            for g in _extend(X, rows, up):
                if g not in seen and _is_isometric_grid(X, g):
                    stack.append(g)
    _, lo, hi = best
    return GridBound(hi, lo, side, states)
