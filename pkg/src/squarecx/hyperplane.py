"""Hyperplanes of square complexes: dual-edge classes, carriers, half-spaces and rails."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable

from .complex import SquareComplex, Verdict, format_id, id_key, memo, sorted_ids
from .errors import InputError, NotSeparatingWarning, TooLarge


@dataclass(frozen=True, eq=False)
class Hyperplane:
    index: int
    dual_edges: frozenset
    carrier_squares: frozenset
    halfspace_pos: frozenset | None  # vertex sets; None when the class does not separate
    halfspace_neg: frozenset | None
    complex: SquareComplex

    @property
    def separating(self) -> bool:
        return self.halfspace_pos is not None

    @property
    def carrier(self) -> SquareComplex:
        return self.complex.subcomplex((), self.dual_edges, self.carrier_squares)

    def side(self, v) -> int:
        """+1 or -1 according to the half-space holding ``v``; 0 if ``v`` lies in neither."""
        if self.halfspace_pos is None:
            raise InputError(f"hyperplane H{self.index} does not separate")
        if v in self.halfspace_pos:
            return 1
        if v in self.halfspace_neg:
            return -1
        return 0

    def separates(self, u, v) -> bool:
        return self.side(u) * self.side(v) == -1

    def __repr__(self):
        return f"Hyperplane(H{self.index}, edges={len(self.dual_edges)}, squares={len(self.carrier_squares)})"


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def dual_classes(X: SquareComplex) -> list:
    """Partition of the edges into classes generated by 'opposite in a square'."""
    uf = _UnionFind(X.edges)
    for s in X.square_ids:
        a, b, c, d = X.square_edges(s)
        uf.union(a, c)
        uf.union(b, d)
    groups = {}
    for e in X.edge_ids:
        groups.setdefault(uf.find(e), []).append(e)
    return sorted((frozenset(g) for g in groups.values()), key=lambda g: id_key(min(g, key=id_key)))


def _split(X: SquareComplex, dual: frozenset):
    """Components of the vertex set of ``dual``'s component once the dual edges are cut."""
    start = X.edges[next(iter(dual))][0]
    comp = next(c for c in X.components if start in c)
    seen, parts = set(), []
    for v in sorted_ids(comp):
        if v in seen:
            continue
        part, stack = {v}, [v]
        seen.add(v)
        while stack:
            x = stack.pop()
            for y, e in X.neighbours(x):
                if e not in dual and y not in seen:
                    seen.add(y)
                    part.add(y)
                    stack.append(y)
        parts.append(frozenset(part))
    return parts


def hyperplanes(X: SquareComplex) -> list:
    """All hyperplanes of ``X`` ordered by their least dual edge.

    A class that does not split its component into exactly two pieces is kept
    with empty half-spaces and reported through :class:`NotSeparatingWarning`.
    """
    def build():
        out = []
        for k, dual in enumerate(dual_classes(X)):
            carrier = frozenset(s for e in dual for s in X.edge_squares[e])
            parts = _split(X, dual)
            pos = neg = None
            if len(parts) == 2:
                # parts are found in id order, so the first holds the smallest vertex
                pos, neg = parts
            else:
                warnings.warn(
                    f"hyperplane H{k} (edge {format_id(min(dual, key=id_key))}) leaves {len(parts)} pieces",
                    NotSeparatingWarning,
                    stacklevel=3,
                )
            out.append(Hyperplane(k, dual, carrier, pos, neg, X))
        return out

    return memo(X, "hyperplanes", build)


def hyperplane_of_edge(X: SquareComplex) -> dict:
    """Map every edge id to the index of its hyperplane."""
    return memo(X, "edge_hyperplane", lambda: {e: H.index for H in hyperplanes(X) for e in H.dual_edges})


def format_hyperplanes(X: SquareComplex) -> str:
    lines = []
    for H in hyperplanes(X):
        edges = ",".join(format_id(e) for e in sorted_ids(H.dual_edges))
        squares = ",".join(format_id(s) for s in sorted_ids(H.carrier_squares))
        if H.separating:
            halves = f"({len(H.halfspace_pos)},{len(H.halfspace_neg)})"
        else:
            halves = "(none)"
        lines.append(f"H{H.index}: edges=[{edges}] carrier_squares=[{squares}] halfspaces={halves}")
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class Rail:
    hyperplane: int
    vertices: tuple  # in path order when the rail is a path
    edges: frozenset

    @property
    def length(self) -> int:
        return len(self.edges)


def _order_path(X: SquareComplex, verts: set, edges: set) -> tuple:
    deg = {v: 0 for v in verts}
    for e in edges:
        for v in X.edges[e]:
            deg[v] += 1
    ends = [v for v in verts if deg[v] <= 1]
    if len(verts) == 1 or len(ends) != 2 or len(edges) != len(verts) - 1:
        return tuple(sorted_ids(verts))
    cur = min(ends, key=id_key)
    order, used = [cur], set()
    while len(order) < len(verts):
        for y, e in X.neighbours(cur):
            if e in edges and e not in used:
                used.add(e)
                cur = y
                order.append(y)
                break
    return tuple(order)


def rails(D: SquareComplex, H: Hyperplane) -> tuple:
    """The two sides of the carrier of ``H`` that contain no dual edge.

    A carrier without squares is a single edge; its rails are the two endpoints.
    The rail lying in the positive half-space comes first.
    """
    if not H.carrier_squares:
        e = min(H.dual_edges, key=id_key)
        a, b = D.edges[e]
        if H.separating and a in H.halfspace_neg:
            a, b = b, a
        return Rail(H.index, (a,), frozenset()), Rail(H.index, (b,), frozenset())
    verts, edges = set(), set()
    for s in H.carrier_squares:
        verts.update(D.square_vertices(s))
        edges.update(e for e in D.square_edges(s) if e not in H.dual_edges)
    for e in H.dual_edges:
        verts.update(D.edges[e])
    parts = []
    seen = set()
    for v in sorted_ids(verts):
        if v in seen:
            continue
        comp, stack = {v}, [v]
        seen.add(v)
        while stack:
            x = stack.pop()
            for y, e in D.neighbours(x):
                if e in edges and y not in seen:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        parts.append(comp)
    if len(parts) != 2:
        raise InputError(f"carrier of H{H.index} has {len(parts)} sides, expected 2")
    if H.separating and next(iter(parts[0])) in H.halfspace_neg:
        parts.reverse()
    out = []
    for comp in parts:
        es = {e for e in edges if D.edges[e][0] in comp}
        out.append(Rail(H.index, _order_path(D, comp, es), frozenset(es)))
    return tuple(out)


def is_combinatorially_convex(X: SquareComplex, S, cap: int = 10**6) -> Verdict:
    """Check by exhaustive geodesic enumeration that geodesics between points of ``S`` stay in ``S``.

    ``S`` is a vertex collection or a subcomplex (its full span is used).
    """
    from .metric import iter_geodesics

    verts = subset_vertices(S)
    ordered = sorted_ids(verts)
    budget = cap
    for i, u in enumerate(ordered):
        for v in ordered[i + 1 :]:
            for g in iter_geodesics(X, u, v):
                budget -= 1
                if budget < 0:
                    raise TooLarge(f"more than {cap} geodesics enumerated", partial_count=cap)
                if any(w not in verts for w in g.vertices):
                    return Verdict(False, g)
    return Verdict(True)


def halfspace_intersection(X: SquareComplex, u, v) -> frozenset:
    """Vertices lying in every half-space that contains both ``u`` and ``v``."""
    comp = next(c for c in X.components if u in c)
    out = set(comp)
    for H in hyperplanes(X):
        if not H.separating or u not in H.halfspace_pos | H.halfspace_neg:
            continue
        su, sv = H.side(u), H.side(v)
        if su == sv:
            out &= H.halfspace_pos if su > 0 else H.halfspace_neg
    return frozenset(out)


def subset_vertices(S: Iterable) -> set:
    return set(S.vertices) if isinstance(S, SquareComplex) else set(S)
