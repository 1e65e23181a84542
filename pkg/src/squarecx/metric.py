"""Combinatorial distance, geodesic enumeration and intervals."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .complex import SquareComplex, id_key, memo, sorted_ids
from .errors import CapExceeded, Disconnected, EmbedFail, MismatchBug, UnknownVertex
from .hyperplane import halfspace_intersection, hyperplanes


def bfs(X: SquareComplex, u) -> dict:
    """Distances from ``u`` to every vertex of its component (cached on ``X``)."""
    if u not in X.vertex_set:
        raise UnknownVertex(u)

    adj = memo(X, "adjacency", lambda: {v: [w for w, _ in X.neighbours(v)] for v in X.vertices})

    def build():
        dist = {u: 0}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist

    return memo(X, ("bfs", u), build)


def distance_l1(X: SquareComplex, u, v) -> int:
    if v not in X.vertex_set:
        raise UnknownVertex(v)
    d = bfs(X, u).get(v)
    if d is None:
        raise Disconnected(f"{u!r} and {v!r} lie in different components")
    return d


@dataclass(frozen=True)
class Geodesic:
    vertices: tuple
    edges: tuple

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def path(self) -> tuple:
        """Alternating vertex/edge sequence."""
        out = [self.vertices[0]]
        for e, v in zip(self.edges, self.vertices[1:]):
            out += [e, v]
        return tuple(out)


def iter_geodesics(X: SquareComplex, u, v):
    """Yield every geodesic from ``u`` to ``v`` in lexicographic order of edge ids."""
    d = distance_l1(X, u, v)
    du, dv = bfs(X, u), bfs(X, v)
    verts, edges = [u], []

    def steps(x):
        i = du[x]
        out = [(e, y) for y, e in X.neighbours(x) if du.get(y) == i + 1 and dv.get(y) == d - i - 1]
        out.sort(key=lambda t: id_key(t[0]))
        return out

    if d == 0:
        yield Geodesic((u,), ())
        return
    stack = [iter(steps(u))]
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            if edges:
                edges.pop()
                verts.pop()
            continue
        e, y = nxt
        edges.append(e)
        verts.append(y)
        if y == v:
            yield Geodesic(tuple(verts), tuple(edges))
            edges.pop()
            verts.pop()
        else:
            stack.append(iter(steps(y)))


def geodesics(X: SquareComplex, u, v, cap: int = 10**6) -> list:
    out = []
    for g in iter_geodesics(X, u, v):
        if len(out) >= cap:
            raise CapExceeded(f"more than {cap} geodesics from {u!r} to {v!r}", partial_count=len(out))
        out.append(g)
    return out


def count_geodesics(X: SquareComplex, u, v) -> int:
    """Number of geodesics, by dynamic programming over the distance layers."""
    d = distance_l1(X, u, v)
    du, dv = bfs(X, u), bfs(X, v)
    layer = {u: 1}
    for i in range(d):
        nxt = {}
        for x, n in layer.items():
            for y, _ in X.neighbours(x):
                if du.get(y) == i + 1 and dv.get(y) == d - i - 1:
                    nxt[y] = nxt.get(y, 0) + n
        layer = nxt
    return layer[v]


@dataclass(frozen=True, eq=False)
class Interval:
    complex: SquareComplex
    endpoints: tuple
    vertices: frozenset

    @cached_property
    def subcomplex(self) -> SquareComplex:
        return self.complex.full_subcomplex(self.vertices)

    def __len__(self):
        return len(self.vertices)


def geodesic_union(X: SquareComplex, u, v) -> frozenset:
    d = distance_l1(X, u, v)
    du, dv = bfs(X, u), bfs(X, v)
    return frozenset(w for w, a in du.items() if a + dv.get(w, d + 1) == d)


def interval(X: SquareComplex, u, v) -> Interval:
    """The interval between ``u`` and ``v``, cross-checked against the half-space intersection."""
    union = geodesic_union(X, u, v)
    cut = halfspace_intersection(X, u, v)
    if union != cut:
        extra = sorted_ids(union ^ cut)[:5]
        raise MismatchBug(f"geodesic union and half-space intersection differ at {extra}")
    return Interval(X, (u, v), union)


def all_pairs_distances(X: SquareComplex) -> dict:
    return {u: bfs(X, u) for u in X.vertices}


def verify_lattice_embedding(X: SquareComplex, coords: dict) -> tuple | None:
    """Return a pair whose distance is not preserved by ``coords``, or None."""
    verts = sorted_ids(coords)
    for i, a in enumerate(verts):
        da = bfs(X, a)
        xa, ya = coords[a]
        for b in verts[i + 1 :]:
            xb, yb = coords[b]
            if da.get(b) != abs(xa - xb) + abs(ya - yb):
                return a, b
    return None


def interval_embed_Z2(I: Interval) -> dict:
    """Coordinates in ℤ² for the vertices of ``I``, with ``endpoints[0]`` at the origin.

    Hyperplanes separating the endpoints cross iff both mixed quadrants occur in
    the interval; a proper 2-colouring of that crossing graph gives the axes.
    Distances are always re-verified inside the interval subcomplex.
    """
    X = I.complex
    u, v = I.endpoints
    seps = [H for H in hyperplanes(X) if H.separating and H.separates(u, v)]
    verts = sorted_ids(I.vertices)
    beyond = {H.index: frozenset(w for w in verts if H.side(w) != H.side(u)) for H in seps}
    idx = [H.index for H in seps]
    cross = {h: [] for h in idx}
    for i, h in enumerate(idx):
        for k in idx[i + 1 :]:
            a, b = beyond[h], beyond[k]
            if not (a <= b or b <= a):
                cross[h].append(k)
                cross[k].append(h)
    colour = {}
    for h in idx:
        if h in colour:
            continue
        colour[h] = 0
        queue = deque([h])
        while queue:
            x = queue.popleft()
            for y in cross[x]:
                if y not in colour:
                    colour[y] = 1 - colour[x]
                    queue.append(y)
                elif colour[y] == colour[x]:
                    raise EmbedFail(f"crossing graph of the interval is not bipartite (H{x}, H{y})")
    coords = {}
    for w in verts:
        xy = [0, 0]
        for h in idx:
            if w in beyond[h]:
                xy[colour[h]] += 1
        coords[w] = tuple(xy)
    if len(set(coords.values())) != len(coords):
        raise EmbedFail("interval coordinates are not injective")
    bad = verify_lattice_embedding(I.subcomplex, coords)
    if bad is not None:
        raise EmbedFail(f"distance between {bad[0]!r} and {bad[1]!r} is not preserved")
    return coords
