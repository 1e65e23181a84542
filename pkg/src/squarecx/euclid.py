"""Euclidean disc diagrams: embedding in the square tiling, completion and sub-quadrangles."""
from __future__ import annotations

from dataclasses import dataclass, field

from .complex import CombinatorialMap, SquareComplex, Verdict, build_complex, id_key, is_reduced, sorted_ids, vertex_link
from .diagram import DiscDiagram, Quadrangle, as_diagram, is_euclidean, singularities, width
from .errors import EmbedFail, NotEuclideanBug, NotFound, NotReduced, SquareComplexError, TargetInconsistent, TopologyBug
from .hyperplane import Hyperplane, hyperplane_of_edge, hyperplanes, rails
from .metric import bfs, verify_lattice_embedding


def _surface(D) -> SquareComplex:
    return D.surface if isinstance(D, DiscDiagram) else D


def osculation_check(D, H: Hyperplane, rail) -> Hyperplane | None:
    """The hyperplane osculating ``H`` along ``rail``, if any.

    ``H'`` osculates ``H`` along the rail when their carriers share an edge of
    the rail but no square.  Two or more candidates mean ``D`` is not Euclidean.
    """
    X = _surface(D)
    hyps = hyperplanes(X)
    of_edge = hyperplane_of_edge(X)
    found = set()
    for f in rail.edges:
        for s in X.edge_squares[f]:
            if s in H.carrier_squares:
                continue
            # the hyperplane of s that runs parallel to f
            e = next(g for g in X.square_edges(s) if g != f and g != X.opposite_edge(s, f))
            K = hyps[of_edge[e]]
            if not (K.carrier_squares & H.carrier_squares):
                found.add(K.index)
    if len(found) > 1:
        raise NotEuclideanBug(f"hyperplanes {sorted(found)} all osculate H{H.index} along one rail")
    return hyps[found.pop()] if found else None


@dataclass
class HorizontalDecomposition:
    layers: list  # hyperplane indices from bottom to top
    rails: list = field(default_factory=list)  # (lower rail, upper rail) per layer


def _strip_order(X: SquareComplex, H: Hyperplane) -> list:
    """Dual edges of ``H`` in order along its carrier (which must be a 1 x k strip)."""
    dual = H.dual_edges
    adj = {e: [] for e in dual}
    for s in H.carrier_squares:
        a, b = [e for e in X.square_edges(s) if e in dual]
        adj[a].append(b)
        adj[b].append(a)
    ends = [e for e in dual if len(adj[e]) <= 1]
    if len(ends) != 2 and len(dual) > 1:
        raise NotEuclideanBug(f"carrier of H{H.index} is not a strip")
    if any(len(v) > 2 for v in adj.values()):
        raise NotEuclideanBug(f"carrier of H{H.index} branches")
    cur = min(ends, key=id_key) if ends else next(iter(dual))
    order, prev = [cur], None
    while len(order) < len(dual):
        nxt = [e for e in adj[cur] if e != prev]
        prev, cur = cur, nxt[0]
        order.append(cur)
    return order


def _line_layout(X: SquareComplex) -> dict:
    if len(X.vertices) == 1:
        return {X.vertices[0]: (0, 0)}
    deg = {v: len(X.incident_edges[v]) for v in X.vertices}
    ends = [v for v in X.vertices if deg[v] == 1]
    if not X.is_connected() or len(X.edges) != len(X.vertices) - 1 or max(deg.values()) > 2 or len(ends) != 2:
        raise EmbedFail("a complex without squares embeds only when it is a path")
    cur, prev = min(ends, key=id_key), None
    coords = {}
    for i in range(len(X.vertices)):
        coords[cur] = (i, 0)
        nxt = [w for w, _ in X.neighbours(cur) if w != prev]
        if nxt:
            prev, cur = cur, nxt[0]
    return coords


def horizontal_decomposition(D) -> HorizontalDecomposition:
    """Chain of horizontal hyperplanes starting from the hyperplane of the least edge."""
    X = _surface(D)
    hyps = hyperplanes(X)
    of_edge = hyperplane_of_edge(X)
    start = hyps[of_edge[X.edge_ids[0]]]
    if not start.carrier_squares:
        return HorizontalDecomposition([start.index], [rails(X, start)])
    low, high = rails(X, start)
    layers, rail_pairs = [start.index], [(low, high)]
    for direction in ("up", "down"):
        H, rail = start, (high if direction == "up" else low)
        seen = {start.index}
        while True:
            K = osculation_check(X, H, rail)
            if K is None:
                break
            if K.index in seen or K.index in layers:
                raise NotEuclideanBug(f"horizontal chain revisits H{K.index}")
            seen.add(K.index)
            a, b = rails(X, K)
            shared, other = (a, b) if a.edges & rail.edges else (b, a)
            if direction == "up":
                layers.append(K.index)
                rail_pairs.append((shared, other))
            else:
                layers.insert(0, K.index)
                rail_pairs.insert(0, (other, shared))
            H, rail = K, other
    return HorizontalDecomposition(layers, rail_pairs)


def embed_euclidean(D) -> dict:
    """Isometric embedding of a Euclidean complex into the square tiling of the plane.

    Returns vertex -> (x, y) with minimum coordinates 0.  Every horizontal
    layer lands on one lattice row, and all-pairs distances are verified.
    """
    X = _surface(D)
    if not X.squares:
        coords = _line_layout(X)
    else:
        try:
            coords = _layer_coords(X)
        except NotEuclideanBug as exc:
            raise EmbedFail(str(exc)) from exc
    if len(coords) != len(X.vertices):
        raise EmbedFail(f"horizontal layers reach {len(coords)} of {len(X.vertices)} vertices")
    mx = min(x for x, _ in coords.values())
    my = min(y for _, y in coords.values())
    coords = {v: (x - mx, y - my) for v, (x, y) in coords.items()}
    if len(set(coords.values())) != len(coords):
        raise EmbedFail("two vertices land on the same lattice point")
    bad = verify_lattice_embedding(X, coords)
    if bad is not None:
        raise EmbedFail(f"distance between {bad[0]!r} and {bad[1]!r} is not preserved")
    return coords


def _layer_coords(X: SquareComplex) -> dict:
    dec = horizontal_decomposition(X)
    hyps = hyperplanes(X)
    start = dec.layers.index(hyps[hyperplane_of_edge(X)[X.edge_ids[0]]].index)
    coords = {}
    order = [start] + list(range(start + 1, len(dec.layers))) + list(range(start - 1, -1, -1))
    covered = set()
    for pos in order:
        H = hyps[dec.layers[pos]]
        lower, upper = dec.rails[pos]
        y = pos - start
        duals = _strip_order(X, H)
        lo_v, hi_v = set(lower.vertices), set(upper.vertices)

        def ends(e):
            a, b = X.edges[e]
            if a in lo_v and b in hi_v:
                return a, b
            if b in lo_v and a in hi_v:
                return b, a
            raise NotEuclideanBug(f"dual edge {e!r} of H{H.index} does not join its rails")

        placed = None
        for sign in (1, -1):
            offset = None
            ok = True
            for i, e in enumerate(duals):
                for v, dy in zip(ends(e), (0, 1)):
                    if v in coords:
                        want = coords[v][0] - sign * i
                        if coords[v][1] != y + dy or (offset is not None and offset != want):
                            ok = False
                        offset = want if offset is None else offset
            if ok:
                placed = (sign, offset or 0)
                break
        if placed is None:
            raise NotEuclideanBug(f"layer H{H.index} does not fit against its neighbour")
        sign, offset = placed
        for i, e in enumerate(duals):
            for v, dy in zip(ends(e), (0, 1)):
                coords[v] = (offset + sign * i, y + dy)
        covered |= H.carrier_squares
    if covered != set(X.squares):
        raise NotEuclideanBug(f"horizontal layers cover {len(covered)} of {len(X.squares)} squares")
    return coords


# -- isometric embeddings ------------------------------------------------------


def _link_report(phi: CombinatorialMap) -> list:
    """Vertices where the link is not sent injectively onto a full subgraph."""
    S, T = phi.source, phi.target
    bad = []
    for v in S.vertices:
        L = vertex_link(S, v)
        nodes = [phi.edge_map[e] for e in L.nodes]
        arcs = {frozenset((phi.edge_map[a], phi.edge_map[b])) for _, a, b in L.arcs}
        if len(set(nodes)) != len(nodes) or len(arcs) != len(L.arcs):
            bad.append(v)
            continue
        img = set(nodes)
        TL = vertex_link(T, phi.vertex_map[v])
        if any(a in img and b in img and frozenset((a, b)) not in arcs for _, a, b in TL.arcs):
            bad.append(v)
    return bad


def is_isometric_embedding(phi: CombinatorialMap) -> Verdict:
    """All-pairs check of source against target distances.

    The note also says whether the full-link criterion holds at every vertex.
    """
    S, T = phi.source, phi.target
    bad_links = _link_report(phi)
    note = "full-link criterion holds" if not bad_links else f"full-link criterion fails at {len(bad_links)} vertices"
    verts = list(S.vertices)
    for i, a in enumerate(verts):
        da, ta = bfs(S, a), bfs(T, phi.vertex_map[a])
        for b in verts[i + 1 :]:
            ds, dt = da.get(b), ta.get(phi.vertex_map[b])
            if ds != dt:
                return Verdict(False, {"pair": (a, b), "source": ds, "target": dt, "links": bad_links}, note)
    return Verdict(True, {"links": bad_links}, note)


# -- completion ------------------------------------------------------------------


@dataclass
class Completion:
    diagram: DiscDiagram
    changelog: list  # one dict per added square
    coords: dict


def complete_diagram(D: DiscDiagram) -> Completion:
    """Fill missing quadrants at -1 corners until every vertex link maps onto a full subgraph."""
    D = as_diagram(D)
    if not is_reduced(D.map).ok:
        raise NotReduced("completion needs a reduced diagram")
    S, T, phi = D.surface, D.target, D.map
    coords = embed_euclidean(S)
    at = {xy: v for v, xy in coords.items()}
    vmap = dict(phi.vertex_map)
    edges = {e: S.edges[e] for e in S.edges}
    emap = dict(phi.edge_map)
    squares = {s: S.square_edges(s) for s in S.squares}
    smap = dict(phi.square_map)
    cells = {}
    for s in S.squares:
        xs = [coords[v] for v in S.square_vertices(s)]
        cells[min(xs)] = s
    edge_at = {frozenset((coords[a], coords[b])): e for e, (a, b) in edges.items()}
    changelog = []
    counter = 0

    def fresh(kind):
        nonlocal counter
        counter += 1
        return ("cmp", kind, counter)

    changed = True
    while changed:
        changed = False
        for v in sorted_ids(at.values()):
            x, y = coords[v]
            present = [(dx, dy) for dx in (-1, 0) for dy in (-1, 0) if (x + dx, y + dy) in cells]
            if len(present) != 3:
                continue
            (cx, cy), = [(x + dx, y + dy) for dx in (-1, 0) for dy in (-1, 0) if (x + dx, y + dy) not in cells]
            ox, oy = (cx if cx != x else cx + 1), (cy if cy != y else cy + 1)
            a_xy, b_xy, c_xy = (ox, y), (x, oy), (ox, oy)
            e1 = edge_at.get(frozenset(((x, y), a_xy)))
            e2 = edge_at.get(frozenset(((x, y), b_xy)))
            if e1 is None or e2 is None:
                raise TopologyBug(f"corner {v!r} lacks an edge of its missing quadrant")
            t = T.square_with_corner(emap[e1], emap[e2])
            if t is None:
                continue
            tv = T.square_vertices(t)
            img = {T.other_end(emap[e1], vmap[v]): a_xy, T.other_end(emap[e2], vmap[v]): b_xy}
            far = next(w for w in tv if w != vmap[v] and w not in img)
            if c_xy in at:
                c = at[c_xy]
                if vmap[c] != far:
                    raise TargetInconsistent(f"lattice point {c_xy} already maps to {vmap[c]!r}, square needs {far!r}")
            else:
                c = fresh("v")
                at[c_xy], coords[c], vmap[c] = c, c_xy, far
            new_edges = []
            for end_xy in (a_xy, b_xy):
                key = frozenset((end_xy, c_xy))
                end = at[end_xy]
                timg = T.edge_between(vmap[end], far)
                if timg is None or timg not in T.square_edges(t):
                    raise TargetInconsistent(f"target square {t!r} has no edge over {key}")
                if key in edge_at:
                    if emap[edge_at[key]] != timg:
                        raise TargetInconsistent(f"edge at {sorted(key)} maps inconsistently")
                else:
                    f = fresh("e")
                    edges[f], emap[f], edge_at[key] = (end, c), timg, f
                    new_edges.append(f)
            s = fresh("s")
            squares[s] = (e1, edge_at[frozenset((a_xy, c_xy))], edge_at[frozenset((c_xy, b_xy))], e2)
            smap[s] = t
            cells[(cx, cy)] = s
            changelog.append({"square": s, "cell": (cx, cy), "corner": v, "image": t, "new_edges": new_edges})
            changed = True
            break
    if not changelog:
        return Completion(D, [], coords)
    surface = build_complex(sorted_ids(at.values()), edges, squares)
    out = DiscDiagram(surface, CombinatorialMap(surface, T, vmap, emap, smap))
    if not is_reduced(out.map).ok:
        raise TargetInconsistent("completed diagram is not reduced")
    for a in S.vertices:
        da, db = bfs(S, a), bfs(surface, a)
        if any(da[b] != db[b] for b in S.vertices):
            raise TargetInconsistent("original diagram does not sit isometrically in its completion")
    check = is_isometric_embedding(out.map)
    if not check.ok:
        raise TargetInconsistent(f"completed diagram is not an isometric embedding: {check.witness['pair']}")
    return Completion(out, changelog, {v: coords[v] for v in surface.vertices})


# -- Euclidean sub-quadrangles -------------------------------------------------


def _segment_range(P: tuple, segment) -> tuple:
    seg = tuple(segment)
    n = len(seg)
    for i in range(len(P) - n + 1):
        if tuple(P[i : i + n]) == seg:
            return i, i + n - 1
    raise NotFound("sub-segment does not lie on the lower side")


def euclidean_subquadrangle(Q: Quadrangle, segment, r: int | None = None) -> Quadrangle:
    """A Euclidean sub-quadrangle of ``Q`` whose lower side contains ``segment``.

    Two non-crossing hyperplanes dual to edges of the lower side, on either
    side of ``segment``, both reaching the upper side and missing the
    ``r``-balls around the ends of the lower side, cut out the candidate.  On
    failure the error carries the smallest margin from the ends of the lower
    side that would make every sub-segment succeed (None if none does).
    """
    r = width(Q) if r is None else r
    i, j = _segment_range(Q.P_minus, segment)
    good = _good_pairs(Q, r)
    for t1, t2, sub in good:
        if t1 < i and t2 >= j:
            return sub
    m = len(Q.P_minus) - 1
    margin = None
    for L in range(0, m // 2 + 1):
        segs = [(a, b) for a in range(L, m - L + 1) for b in range(a, m - L + 1)]
        if segs and all(any(t1 < a and t2 >= b for t1, t2, _ in good) for a, b in segs):
            margin = L
            break
    raise NotFound(f"no pair of hyperplanes encloses the sub-segment (measured margin {margin})", margin=margin)


def _good_pairs(Q: Quadrangle, r: int) -> list:
    D = Q.diagram
    X = D.surface
    hyps = hyperplanes(X)
    of_edge = hyperplane_of_edge(X)
    P = Q.P_minus
    m = len(P) - 1
    ball = set()
    for c in (Q.u_minus, Q.v_minus):
        ball |= {v for v, d in bfs(X, c).items() if d <= r}
    plus_edges = {X.edge_between(a, b) for a, b in zip(Q.P_plus, Q.P_plus[1:])}
    usable = {}
    for t in range(m):
        H = hyps[of_edge[X.edge_between(P[t], P[t + 1])]]
        carrier = {v for s in H.carrier_squares for v in X.square_vertices(s)} | {
            v for e in H.dual_edges for v in X.edges[e]
        }
        if carrier & ball or not (H.dual_edges & plus_edges):
            continue
        usable[t] = H
    width_q = width(Q)
    out = []
    for t1 in sorted(usable, reverse=True):
        for t2 in sorted(usable):
            if t2 <= t1:
                continue
            H1, H2 = usable[t1], usable[t2]
            if H1.index == H2.index or H1.carrier_squares & H2.carrier_squares:
                continue
            sub = _between(Q, H1, H2, t1, t2)
            if sub is not None and not singularities(sub) and is_euclidean(sub).ok and width(sub) <= width_q:
                out.append((t1, t2, sub))
    out.sort(key=lambda p: (p[1] - p[0], -p[0]))
    return out


def _between(Q: Quadrangle, H1, H2, t1: int, t2: int):
    D = Q.diagram
    X = D.surface
    P = Q.P_minus
    side1 = H1.halfspace_pos if P[t1 + 1] in H1.halfspace_pos else H1.halfspace_neg
    side2 = H2.halfspace_pos if P[t2] in H2.halfspace_pos else H2.halfspace_neg
    region = side1 & side2
    sub = X.full_subcomplex(region)
    try:
        phi = D.map.restrict(sub)
        sd = DiscDiagram(sub, phi)
        top1 = next(v for v in Q.P_plus if v in region and any(v in X.edges[e] for e in H1.dual_edges))
        top2 = next(v for v in reversed(Q.P_plus) if v in region and any(v in X.edges[e] for e in H2.dual_edges))
        return Quadrangle.from_corners(sd, P[t1 + 1], P[t2], top2, top1)
    except SquareComplexError:
        return None
