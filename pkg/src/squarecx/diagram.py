"""Disc diagrams: curvature, Gauss-Bonnet audit, quadrangles, singularities, reduction and filling.

Curvature is an integer in units of pi/2.  For a vertex ``v`` with link
``L``, ``kappa(v) = 4 - 2*chi(L) - n_v``; over any disc diagram the total is 4.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

from .complex import (
    CombinatorialMap,
    SquareComplex,
    Verdict,
    build_complex,
    id_key,
    is_reduced,
    sorted_ids,
    vertex_link,
)
from .errors import (
    CapExceeded,
    DegenerateDiagram,
    InputError,
    TopologyBug,
    UnknownVertex,
)
from .hyperplane import _UnionFind

GAUSS_BONNET_TOTAL = 4


class NotQuadrangle(InputError):
    """Chosen corners do not cut the boundary into four geodesic sides."""


def _dart_tail(X: SquareComplex, dart):
    e, sign = dart
    a, b = X.edges[e]
    return a if sign > 0 else b


def _dart_head(X: SquareComplex, dart):
    e, sign = dart
    a, b = X.edges[e]
    return b if sign > 0 else a


@dataclass(frozen=True)
class _Topology:
    orientation: dict  # square -> +1 / -1 relative to its stored walk
    boundary_walk: tuple  # darts (edge, sign) of the outer face
    boundary_start: object
    pinches: frozenset  # vertices whose link has several components


def _link(X: SquareComplex, v):
    """Adjacency and components of the link of ``v``; nodes are edges, arcs are corners."""
    adj = {e: [] for e in X.incident_edges[v]}
    for s in X.vertex_squares[v]:
        a, b = X.corner_edges(s, v)
        adj[a].append(b)
        adj[b].append(a)
    comps, seen = [], set()
    for e in adj:
        if e in seen:
            continue
        comp = [e]
        seen.add(e)
        for f in comp:
            for g in adj[f]:
                if g not in seen:
                    seen.add(g)
                    comp.append(g)
        comps.append(comp)
    return adj, comps


def _analyse(X: SquareComplex) -> _Topology:
    if not X.vertices:
        raise TopologyBug("empty complex")
    if not X.is_connected():
        raise TopologyBug("surface is disconnected")
    if X.euler_characteristic != 1:
        raise TopologyBug(f"surface has Euler characteristic {X.euler_characteristic}, expected 1")
    for e in X.edge_ids:
        if len(X.edge_squares[e]) > 2:
            raise TopologyBug(f"edge {e!r} lies in {len(X.edge_squares[e])} squares")
    links = {}  # boundary vertex -> (link adjacency, link components)
    for v in X.vertices:
        adj, comps = _link(X, v)
        if any(len(nb) > 2 for nb in adj.values()):
            raise TopologyBug(f"link of vertex {v!r} is neither a cycle nor a union of paths")
        n_corners = len(X.vertex_squares[v])
        if n_corners == len(adj) and adj:
            if len(comps) != 1:
                raise TopologyBug(f"link of vertex {v!r} is neither a cycle nor a union of paths")
        elif n_corners == len(adj) - len(comps):
            links[v] = (adj, comps)
        else:
            raise TopologyBug(f"link of vertex {v!r} is neither a cycle nor a union of paths")

    signs = {s: dict(walk) for s, walk in X.squares.items()}
    orient = {}
    for s0 in X.square_ids:
        if s0 in orient:
            continue
        orient[s0] = 1
        queue = deque([s0])
        while queue:
            s = queue.popleft()
            for e, sign in X.squares[s]:
                d = sign * orient[s]
                for t in X.edge_squares[e]:
                    if t == s:
                        continue
                    want = -d * signs[t][e]
                    if t not in orient:
                        orient[t] = want
                        queue.append(t)
                    elif orient[t] != want:
                        raise TopologyBug(f"squares {s!r} and {t!r} cannot be oriented coherently")

    # boundary darts carry the orientation of their unique square; bare edges give both darts
    square_dart = {}
    for s in X.square_ids:
        for e, sign in X.squares[s]:
            if len(X.edge_squares[e]) == 1:
                square_dart[e] = sign * orient[s]
    n_darts = len(square_dart) + 2 * sum(1 for e in X.edges if not X.edge_squares[e])

    nxt = {}  # incoming dart at v -> outgoing dart
    pinches = set()
    first_out = {}
    for v, (adj, link_comps) in links.items():
        if not adj:
            continue
        comps = []
        for comp in link_comps:
            ins, outs = [], []
            for e in comp:
                if len(adj[e]) == 2:
                    continue
                if not X.edge_squares[e]:
                    ins.append((e, 1 if X.edges[e][1] == v else -1))
                    outs.append((e, 1 if X.edges[e][0] == v else -1))
                    continue
                dart = (e, square_dart[e])
                (ins if _dart_head(X, dart) == v else outs).append(dart)
            if len(ins) != 1 or len(outs) != 1:
                raise TopologyBug(f"boundary at vertex {v!r} is not locally an arc")
            comps.append((min(id_key(e) for e in comp), ins[0], outs[0]))
        comps.sort(key=lambda c: c[0])
        if len(comps) > 1:
            pinches.add(v)
        for i, (_, d_in, _) in enumerate(comps):
            nxt[d_in] = comps[(i + 1) % len(comps)][2]
        first_out[v] = comps[0][2]

    walk = []
    start = None
    if first_out:
        start = min(first_out, key=id_key)
        d0 = first_out[start]
        d = d0
        while True:
            walk.append(d)
            d = nxt[d]
            if d == d0:
                break
            if len(walk) > n_darts:
                raise TopologyBug("boundary walk does not close")
    if len(walk) != n_darts:
        raise TopologyBug(f"boundary has {n_darts} darts but the outer walk covers {len(walk)}")
    return _Topology(orient, tuple(walk), start, frozenset(pinches))


@dataclass(frozen=True, eq=False)
class DiscDiagram:
    """A planar contractible square complex with a combinatorial map to a target.

    ``map`` defaults to the identity of the surface.  Construction validates
    the topology and raises :class:`TopologyBug` on anything that is not a
    (possibly degenerate) disc.
    """

    surface: SquareComplex
    map: CombinatorialMap | None = None
    _topology: _Topology = field(init=False, repr=False)

    def __post_init__(self):
        if self.map is None:
            object.__setattr__(self, "map", CombinatorialMap.identity(self.surface))
        elif self.map.source is not self.surface:
            raise InputError("map source is not the diagram surface")
        object.__setattr__(self, "_topology", _analyse(self.surface))

    @property
    def target(self) -> SquareComplex:
        return self.map.target

    @property
    def orientation(self) -> dict:
        return self._topology.orientation

    @property
    def boundary_walk(self) -> tuple:
        """Closed walk of darts ``(edge, sign)`` around the outer face."""
        return self._topology.boundary_walk

    @cached_property
    def boundary_cycle(self) -> tuple:
        """Vertices met by the boundary walk, one per dart (the tail of each)."""
        if not self.boundary_walk:
            return (self.surface.vertices[0],)
        return tuple(_dart_tail(self.surface, d) for d in self.boundary_walk)

    @property
    def pinch_vertices(self) -> frozenset:
        return self._topology.pinches

    @cached_property
    def bare_edges(self) -> list:
        return [e for e in self.surface.edge_ids if not self.surface.edge_squares[e]]

    @property
    def area(self) -> int:
        return len(self.surface.squares)

    @cached_property
    def is_degenerate(self) -> bool:
        """A disc diagram is non-degenerate when its boundary is an embedded circle."""
        return bool(self.pinch_vertices or self.bare_edges or not self.surface.squares)

    def is_internal(self, v) -> bool:
        return vertex_link(self.surface, v).is_cycle()

    @cached_property
    def boundary_vertices(self) -> list:
        return [v for v in self.surface.vertices if not self.is_internal(v)]

    def image_walk(self) -> tuple:
        """Boundary walk pushed into the target, as target darts."""
        out = []
        for e, sign in self.boundary_walk:
            a, _ = self.surface.edges[e]
            f = self.map.edge_map[e]
            fa, _ = self.target.edges[f]
            same = self.map.vertex_map[a] == fa
            out.append((f, sign if same else -sign))
        return tuple(out)

    def __repr__(self):
        return f"DiscDiagram({self.surface!r}, boundary={len(self.boundary_walk)})"


def as_diagram(D) -> DiscDiagram:
    return D if isinstance(D, DiscDiagram) else DiscDiagram(D)


def curvature(D, v) -> int:
    """Curvature of ``v`` in units of pi/2."""
    X = D.surface if isinstance(D, DiscDiagram) else D
    if v not in X.vertex_set:
        raise UnknownVertex(f"unknown vertex {v!r}")
    # the link has one node per edge and one arc per corner at v
    corners_at_v = len(X.vertex_squares[v])
    return 4 - 2 * (len(X.incident_edges[v]) - corners_at_v) - corners_at_v


def curvature_table(D) -> dict:
    X = D.surface if isinstance(D, DiscDiagram) else D
    return {v: curvature(X, v) for v in X.vertices}


def gauss_bonnet_total(D) -> int:
    """Total curvature; anything other than 4 means the input is not a disc."""
    total = sum(curvature_table(D).values())
    if total != GAUSS_BONNET_TOTAL:
        raise TopologyBug(f"total curvature is {total} units, expected {GAUSS_BONNET_TOTAL}")
    return total


def corners(D: DiscDiagram) -> list:
    """Boundary vertices of nonzero curvature."""
    D = as_diagram(D)
    return [v for v in D.boundary_vertices if curvature(D, v) != 0]


# -- quadrangles -------------------------------------------------------------


def _is_surface_geodesic(X: SquareComplex, path: tuple) -> bool:
    from .metric import distance_l1

    if len(set(path)) != len(path):
        return False
    return distance_l1(X, path[0], path[-1]) == len(path) - 1


@dataclass(frozen=True, eq=False)
class Quadrangle:
    """A non-degenerate disc diagram with its boundary cut into four geodesics.

    Sides are vertex paths: ``P_minus`` runs ``u_minus -> v_minus``, ``P_plus``
    runs ``u_plus -> v_plus`` and the gates ``P_u``, ``P_v`` run from the lower
    side to the upper one.  The boundary circle reads ``P_minus``, ``P_v``,
    ``P_plus`` reversed, ``P_u`` reversed.
    """

    diagram: DiscDiagram
    P_minus: tuple
    P_v: tuple
    P_plus: tuple
    P_u: tuple

    def __post_init__(self):
        D = self.diagram
        if D.is_degenerate:
            raise DegenerateDiagram("quadrangles need a non-degenerate diagram")
        if (self.P_minus[-1], self.P_v[-1], self.P_u[-1]) != (self.P_v[0], self.P_plus[-1], self.P_plus[0]):
            raise NotQuadrangle("sides do not meet at the corners")
        if self.P_minus[0] != self.P_u[0]:
            raise NotQuadrangle("sides do not meet at the corners")
        cyc = self.P_minus[:-1] + self.P_v[:-1] + tuple(reversed(self.P_plus))[:-1] + tuple(reversed(self.P_u))[:-1]
        if not _same_cycle(cyc, D.boundary_cycle):
            raise NotQuadrangle("sides do not trace the boundary circle")
        T = D.target
        for name in ("P_minus", "P_v", "P_plus", "P_u"):
            side = getattr(self, name)
            if not _is_surface_geodesic(D.surface, side):
                raise NotQuadrangle(f"{name} is not a geodesic of the surface")
            img = tuple(D.map.vertex_map[v] for v in side)
            if not _is_surface_geodesic(T, img):
                raise NotQuadrangle(f"image of {name} is not a geodesic of the target")

    @classmethod
    def from_corners(cls, D, u_minus, v_minus, v_plus, u_plus) -> "Quadrangle":
        """Cut the boundary of ``D`` at four corners (either cyclic direction)."""
        D = as_diagram(D)
        if D.is_degenerate:
            raise DegenerateDiagram("quadrangles need a non-degenerate diagram")
        cyc = list(D.boundary_cycle)
        for order in (cyc, cyc[::-1]):
            try:
                return cls(D, *_cut(order, (u_minus, v_minus, v_plus, u_plus)))
            except NotQuadrangle:
                continue
        raise NotQuadrangle("corners do not cut the boundary into four geodesic sides")

    @property
    def u_minus(self):
        return self.P_minus[0]

    @property
    def v_minus(self):
        return self.P_minus[-1]

    @property
    def u_plus(self):
        return self.P_plus[0]

    @property
    def v_plus(self):
        return self.P_plus[-1]

    def image(self, side: str) -> tuple:
        return tuple(self.diagram.map.vertex_map[v] for v in getattr(self, side))

    @property
    def gamma_minus(self) -> tuple:
        return self.image("P_minus")

    @property
    def gamma_plus(self) -> tuple:
        return self.image("P_plus")


def _same_cycle(a: tuple, b: tuple) -> bool:
    if len(a) != len(b):
        return False
    n = len(a)
    for seq in (list(b), list(b)[::-1]):
        for r in range(n):
            if tuple(seq[r:] + seq[:r]) == tuple(a):
                return True
    return False


def _cut(cyc: list, corners4: tuple):
    """Split the cyclic vertex list at the four corners, in order."""
    um, vm, vp, up = corners4
    if cyc.count(um) != 1:
        raise NotQuadrangle(f"corner {um!r} is not on the boundary circle")
    i = cyc.index(um)
    seq = cyc[i:] + cyc[:i] + [um]
    n = len(seq) - 1

    def find(x, lo):
        for j in range(lo, n + 1):
            if seq[j] == x:
                return j
        raise NotQuadrangle(f"corner {x!r} is out of order")

    a = find(vm, 0)
    b = find(vp, a)
    c = find(up, b) if up != um else n
    P_minus = tuple(seq[: a + 1])
    P_v = tuple(seq[a : b + 1])
    P_plus = tuple(reversed(seq[b : c + 1]))
    P_u = tuple(reversed(seq[c:]))
    return P_minus, P_v, P_plus, P_u


def grid_quadrangle(length: int, height: int) -> Quadrangle:
    """The grid ``I_length x I_height`` with its four natural sides."""
    from .generators import grid_complex

    D = DiscDiagram(grid_complex(length, height))
    return Quadrangle.from_corners(D, (0, 0), (length, 0), (length, height), (0, height))


def quadrangle_cut(D, rng=None) -> Quadrangle | None:
    """Cut the boundary of a non-degenerate diagram into four geodesic sides, if possible.

    ``reach[i]`` is the longest boundary run from position ``i`` whose surface
    path and image path are both geodesic.  From a start, maximal jumps give the
    fewest sides; long sides are then split until there are four.
    """
    from .metric import bfs

    D = as_diagram(D)
    if D.is_degenerate:
        return None
    cyc = list(D.boundary_cycle)
    n = len(cyc)
    if n < 4:
        return None
    vm = D.map.vertex_map
    reach = []
    for i in range(n):
        ds, dt = bfs(D.surface, cyc[i]), bfs(D.target, vm[cyc[i]])
        k = 1
        while k < n - 1:
            w = cyc[(i + k + 1) % n]
            if ds[w] != k + 1 or dt.get(vm[w]) != k + 1:
                break
            k += 1
        reach.append(k)
    starts = list(range(n))
    if rng is not None:
        rng.shuffle(starts)
    for s in starts:
        cuts = [s]
        while cuts[-1] + reach[cuts[-1] % n] < s + n and len(cuts) <= 4:
            cuts.append(cuts[-1] + reach[cuts[-1] % n])
        if len(cuts) > 4:
            continue
        while len(cuts) < 4:
            ends = cuts + [s + n]
            j = max(range(len(cuts)), key=lambda t: ends[t + 1] - ends[t])
            cuts.insert(j + 1, (ends[j] + ends[j + 1]) // 2)
        corners = [cyc[c % n] for c in cuts]
        try:
            return Quadrangle.from_corners(D, *corners)
        except InputError:
            continue
    return None


# -- singularities -------------------------------------------------------------


@dataclass(frozen=True)
class Singularity:
    kind: str  # "InternalNegative" | "DeepCorner" | "ConsecutivePair"
    location: tuple
    note: str = ""


def _corner_runs(values: list, cyclic: bool) -> list:
    """Pairs of consecutive -1 entries among the nonzero entries of ``values``.

    ``values`` is a list of ``(vertex, curvature)``; runs of k such corners
    give k - 1 pairs.
    """
    nz = [(v, k) for v, k in values if k != 0]
    pairs = []
    m = len(nz)
    limit = m if cyclic and m > 1 else m - 1
    for i in range(max(limit, 0)):
        (a, ka), (b, kb) = nz[i], nz[(i + 1) % m]
        if ka == -1 and kb == -1:
            pairs.append((a, b))
    return pairs


def singularities(Q: Quadrangle) -> list:
    D = Q.diagram
    kappa = curvature_table(D)
    out = []
    for v in D.surface.vertices:
        if D.is_internal(v):
            if kappa[v] < 0:
                out.append(Singularity("InternalNegative", (v,)))
        elif kappa[v] <= -2:
            out.append(Singularity("DeepCorner", (v,)))
    for side in (Q.P_minus, Q.P_plus):
        interior = [(v, kappa[v]) for v in side[1:-1]]
        pairs = _corner_runs(interior, cyclic=False)
        note = "run of three or more -1 corners" if _has_long_run(pairs) else ""
        out.extend(Singularity("ConsecutivePair", p, note) for p in pairs)
    return out


def _has_long_run(pairs: list) -> bool:
    return any(pairs[i][1] == pairs[i + 1][0] for i in range(len(pairs) - 1))


def is_almost_euclidean(Q: Quadrangle) -> bool:
    return not singularities(Q)


def is_euclidean(D) -> Verdict:
    """Euclidean discs: no negative internal vertex, no corner of curvature <= -2,
    and no two cyclically consecutive corners of curvature -1 on the boundary.

    Accepts a :class:`Quadrangle`, a :class:`DiscDiagram` or a bare surface.
    """
    if isinstance(D, Quadrangle):
        if singularities(D):
            return Verdict(False, singularities(D)[0], "not almost Euclidean")
        D = D.diagram
    D = as_diagram(D)
    if D.is_degenerate:
        return Verdict(False, None, "degenerate diagram")
    kappa = curvature_table(D)
    for v in D.surface.vertices:
        if D.is_internal(v) and kappa[v] < 0:
            return Verdict(False, Singularity("InternalNegative", (v,)))
        if not D.is_internal(v) and kappa[v] <= -2:
            return Verdict(False, Singularity("DeepCorner", (v,)))
    pairs = _corner_runs([(v, kappa[v]) for v in D.boundary_cycle], cyclic=True)
    if pairs:
        return Verdict(False, Singularity("ConsecutivePair", pairs[0]))
    return Verdict(True)


def singularity_bound_check(Q: Quadrangle) -> Verdict:
    found = singularities(Q)
    if len(found) > 4:
        return Verdict(False, found, f"{len(found)} singularities")
    return Verdict(True, None, f"{len(found)} singularities")


def width(Q: Quadrangle) -> int:
    """Hausdorff distance between the vertex sets of the two long sides, inside the surface."""
    X = Q.diagram.surface

    def reach(sources):
        dist = {v: 0 for v in sources}
        queue = deque(sources)
        while queue:
            x = queue.popleft()
            for y, _ in X.neighbours(x):
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist

    from_minus, from_plus = reach(Q.P_minus), reach(Q.P_plus)
    return max(max(from_minus[v] for v in Q.P_plus), max(from_plus[v] for v in Q.P_minus))


# -- reduction -------------------------------------------------------------------


def _path_from(X: SquareComplex, s, q, p) -> tuple:
    """Vertices of square ``s`` from ``q`` round to ``p``, avoiding the edge ``qp``."""
    cyc = X.square_vertices(s)
    j = cyc.index(q)
    step = 1 if cyc[(j - 1) % 4] == p else -1
    return tuple(cyc[(j + k * step) % 4] for k in range(4))


def _square_edge(X: SquareComplex, s, a, b):
    for e in X.square_edges(s):
        if set(X.edges[e]) == {a, b}:
            return e
    raise TopologyBug(f"square {s!r} has no edge {a!r}-{b!r}")


def _classes(uf: _UnionFind, items) -> dict:
    groups = {}
    for x in items:
        groups.setdefault(uf.find(x), []).append(x)
    rep = {}
    for members in groups.values():
        r = min(members, key=id_key)
        for x in members:
            rep[x] = r
    return rep


def _rebuild(S: SquareComplex, phi: CombinatorialMap, drop_edges, drop_squares, vrep, erep) -> DiscDiagram:
    """Quotient of ``S`` by the identifications, minus the dropped cells."""
    edges, emap = {}, {}
    for e in S.edge_ids:
        if e in drop_edges:
            continue
        r = erep[e]
        a, b = (vrep[x] for x in S.edges[e])
        if a == b:
            raise TopologyBug(f"identification collapses edge {e!r}")
        if r in edges and set(edges[r]) != {a, b}:
            raise TopologyBug(f"identified edges {r!r} and {e!r} have different ends")
        edges.setdefault(r, (a, b))
        emap[r] = phi.edge_map[e]
    squares, smap, by_edges = {}, {}, {}
    for s in S.square_ids:
        if s in drop_squares:
            continue
        walk = [erep[e] for e in S.square_edges(s)]
        key = frozenset(walk)
        by_edges.setdefault(key, []).append(s)
        squares[s] = walk
        smap[s] = phi.square_map[s]
    for key, group in by_edges.items():
        if len(group) > 1:
            # two squares with one boundary close up a sphere; it carries no area of the disc
            for s in group:
                del squares[s]
                del smap[s]
    used = {v for uv in edges.values() for v in uv}
    verts = sorted_ids({vrep[v] for v in S.vertices} if not edges else used)
    vmap = {v: phi.vertex_map[v] for v in verts}
    try:
        surface = build_complex(verts, edges, squares)
    except InputError as exc:
        raise TopologyBug(f"identification produced an invalid complex: {exc}") from exc
    return DiscDiagram(surface, CombinatorialMap(surface, phi.target, vmap, emap, smap))


def cancel_pair(D: DiscDiagram, e, s1, s2) -> DiscDiagram:
    """Remove two squares folded across ``e`` and zip their remaining boundaries."""
    S, phi = D.surface, D.map
    p, q = S.edges[e]
    path1, path2 = _path_from(S, s1, q, p), _path_from(S, s2, q, p)
    if [phi.vertex_map[v] for v in path1] != [phi.vertex_map[v] for v in path2]:
        raise TopologyBug(f"squares {s1!r} and {s2!r} are not folded across {e!r}")
    vuf, euf = _UnionFind(S.vertices), _UnionFind(S.edges)
    for k in range(3):
        a1, b1 = path1[k], path1[k + 1]
        a2, b2 = path2[k], path2[k + 1]
        vuf.union(a1, a2)
        vuf.union(b1, b2)
        euf.union(_square_edge(S, s1, a1, b1), _square_edge(S, s2, a2, b2))
    return _rebuild(S, phi, {e}, {s1, s2}, _classes(vuf, S.vertices), _classes(euf, S.edges))


def reduce_diagram(D, audit: bool = True) -> DiscDiagram:
    """Cancel folded square pairs until the map is reduced.

    The image of the boundary walk is unchanged; Gauss-Bonnet is re-audited
    after every cancellation when ``audit`` is set.
    """
    D = as_diagram(D)
    while True:
        verdict = is_reduced(D.map)
        if verdict.ok:
            return D
        s1, s2 = verdict.witness["squares"]
        D = cancel_pair(D, verdict.witness["edge"], s1, s2)
        if audit:
            gauss_bonnet_total(D)


# -- filling -------------------------------------------------------------------


def _inverse(a, b) -> bool:
    return a[0] == b[0] and a[1] == -b[1]


def _fold(frontier: list):
    """Freely and cyclically reduce a frontier; returns (reduced, cancelled pairs)."""
    out, pairs = [], []
    for x in frontier:
        if out and _inverse(out[-1], x):
            pairs.append((out.pop(), x))
        else:
            out.append(x)
    while len(out) >= 2 and _inverse(out[-1], out[0]):
        last = out.pop()
        pairs.append((last, out.pop(0)))
    return out, pairs


def _canonical(frontier: tuple) -> tuple:
    keyed = [(id_key(e), s) for e, s, *_ in frontier]
    n = len(keyed)
    return min(tuple(keyed[i:] + keyed[:i]) for i in range(n)) if n else ()


def _corner(X: SquareComplex, a, b):
    """Square of ``X`` at the corner of darts ``a`` then ``b``, with the two replacement darts."""
    if a[0] == b[0]:
        return None
    S = X.square_with_corner(a[0], b[0])
    if S is None:
        return None
    x, z = _dart_tail(X, a[:2]), _dart_head(X, b[:2])
    f1, f2 = X.opposite_edge(S, b[0]), X.opposite_edge(S, a[0])
    w = X.other_end(f1, x)
    d1 = (f1, 1 if X.edges[f1][0] == x else -1)
    d2 = (f2, 1 if X.edges[f2][0] == w else -1)
    return S, w, d1, d2


@dataclass
class FillStats:
    area: int = 0
    nodes: int = 0


def _loop_darts(X: SquareComplex, loop) -> list:
    verts = list(loop)
    if len(verts) > 1 and verts[0] == verts[-1]:
        verts = verts[:-1]
    for v in verts:
        if v not in X.vertex_set:
            raise UnknownVertex(f"unknown vertex {v!r}")
    darts = []
    for i, v in enumerate(verts):
        w = verts[(i + 1) % len(verts)]
        if len(verts) == 1:
            break
        e = X.edge_between(v, w)
        if e is None:
            raise InputError(f"loop steps from {v!r} to {w!r} along no edge")
        darts.append((e, 1 if X.edges[e][0] == v else -1))
    return verts, darts


def fill_disc(X: SquareComplex, loop, cap: int = 10**4, node_cap: int = 10**6, stats: FillStats | None = None) -> DiscDiagram:
    """A minimal-area disc diagram whose boundary maps onto the closed vertex walk ``loop``.

    The diagram is built from the outside in.  The frontier (inner boundary of
    the part built so far) is kept freely reduced, which glues backtracking
    edges at no cost; a corner move adds the square of ``X`` spanned by two
    consecutive frontier edges.  Iterative deepening on the number of corner
    moves makes the first diagram found one of minimal area.
    """
    verts, darts = _loop_darts(X, loop)
    failed = {}
    nodes = 0

    def search(frontier: tuple, budget: int):
        nonlocal nodes
        if not frontier:
            return []
        if budget == 0:
            return None
        key = _canonical(frontier)
        if failed.get(key, -1) >= budget:
            return None
        nodes += 1
        if nodes > node_cap:
            raise CapExceeded(f"fill search visited more than {node_cap} frontiers", partial_count=nodes)
        n = len(frontier)
        for i in range(n):
            found = _corner(X, frontier[i], frontier[(i + 1) % n])
            if found is None:
                continue
            _, _, d1, d2 = found
            nxt = list(frontier)
            if i == n - 1:
                nxt[n - 1], nxt[0] = d1, d2
            else:
                nxt[i : i + 2] = [d1, d2]
            reduced, _ = _fold(nxt)
            rest = search(tuple(reduced), budget - 1)
            if rest is not None:
                return [i] + rest
        failed[key] = budget
        return None

    start, _ = _fold(list(darts))
    moves = None
    for area in range(cap + 1):
        moves = search(tuple(start), area)
        if moves is not None:
            break
    if moves is None:
        raise CapExceeded(f"no filling of area <= {cap}", partial_count=cap)
    if stats is not None:
        stats.area, stats.nodes = len(moves), nodes
    D = _replay(X, verts, darts, moves)
    if not is_reduced(D.map).ok:
        raise TopologyBug("minimal filling is not reduced")
    if not _same_cycle(D.image_walk(), tuple(darts)) and not _same_cycle(
        D.image_walk(), tuple((e, -s) for e, s in reversed(darts))
    ):
        raise TopologyBug("filling boundary does not read the loop")
    return D


def _replay(X: SquareComplex, verts: list, darts: list, moves: list) -> DiscDiagram:
    n = len(verts)
    vimg = dict(enumerate(verts))
    edges = {i: (i, (i + 1) % n) for i in range(len(darts))}
    eimg = {i: darts[i][0] for i in range(len(darts))}
    squares, simg = {}, {}
    # frontier entries: (x_edge, x_sign, diagram_edge, diagram_tail, diagram_head)
    frontier = [(e, s, i, i, (i + 1) % n) for i, (e, s) in enumerate(darts)]
    vpairs, epairs = [], []

    def fold():
        nonlocal frontier
        frontier, pairs = _fold(frontier)
        for a, b in pairs:
            epairs.append((a[2], b[2]))
            vpairs.append((a[3], b[4]))

    fold()
    for i in moves:
        m = len(frontier)
        a, b = frontier[i], frontier[(i + 1) % m]
        S, w, d1, d2 = _corner(X, a, b)
        wid = len(vimg)
        vimg[wid] = w
        e1, e2 = len(edges), len(edges) + 1
        edges[e1] = (a[3], wid)
        edges[e2] = (wid, b[4])
        eimg[e1], eimg[e2] = d1[0], d2[0]
        sid = len(squares)
        squares[sid] = (a[2], b[2], e2, e1)
        simg[sid] = S
        n1 = (d1[0], d1[1], e1, a[3], wid)
        n2 = (d2[0], d2[1], e2, wid, b[4])
        if i == m - 1:
            frontier[m - 1], frontier[0] = n1, n2
        else:
            frontier[i : i + 2] = [n1, n2]
        fold()
    vuf, euf = _UnionFind(vimg), _UnionFind(edges)
    for a, b in vpairs:
        vuf.union(a, b)
    for a, b in epairs:
        euf.union(a, b)
    raw = SquareComplex(tuple(vimg), edges, {s: _walk_of(edges, es) for s, es in squares.items()})
    phi = _RawMap(raw, X, vimg, eimg, simg)
    return _rebuild(raw, phi, set(), set(), _classes(vuf, vimg), _classes(euf, edges))


@dataclass(frozen=True)
class _RawMap:
    """Cell assignments of an intermediate complex (not validated as a map)."""

    source: SquareComplex
    target: SquareComplex
    vertex_map: dict
    edge_map: dict
    square_map: dict


def _walk_of(edges: dict, es: tuple) -> tuple:
    """Orient a cyclic list of four edge ids into a closed walk (no validation)."""
    a, b = edges[es[0]]
    first = 1 if b in edges[es[1]] else -1
    walk = [(es[0], first)]
    cur = b if first > 0 else a
    for e in es[1:]:
        u, w = edges[e]
        if u == cur:
            walk.append((e, 1))
            cur = w
        else:
            walk.append((e, -1))
            cur = u
    return tuple(walk)
