"""Finite combinatorial square complexes, vertex links and combinatorial maps.

Cells are identified by hashable ids (ints, strings or tuples of those).  A
square is stored as a closed walk of four oriented edges; ``+1`` traverses an
edge from its first to its second endpoint.
"""
from __future__ import annotations

import itertools
import re
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Any, Hashable, Iterable, Mapping

from .errors import BadWalk, DanglingReference, DuplicateSquare, InputError, ParseError, UnknownVertex

CellId = Hashable


@lru_cache(maxsize=1 << 16)
def id_key(x):
    """Total order on mixed cell ids: ints, then strings, then tuples."""
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, int):
        return (0, x)
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, tuple):
        return (2, tuple(id_key(y) for y in x))
    return (3, repr(x))


def sorted_ids(ids: Iterable) -> list:
    return sorted(ids, key=id_key)


def format_id(x) -> str:
    if isinstance(x, tuple):
        return "_".join(format_id(y) for y in x)
    return str(x)


@dataclass(frozen=True)
class Verdict:
    """Boolean outcome of a check, with an optional witness when it fails."""

    ok: bool
    witness: Any = None
    note: str = ""

    def __bool__(self):
        return self.ok


@dataclass(frozen=True, eq=False)
class SquareComplex:
    vertices: tuple
    edges: Mapping[CellId, tuple]
    squares: Mapping[CellId, tuple]

    # -- basic incidence -------------------------------------------------
    @cached_property
    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    @cached_property
    def edge_ids(self) -> list:
        return sorted_ids(self.edges)

    @cached_property
    def square_ids(self) -> list:
        return sorted_ids(self.squares)

    @cached_property
    def incident_edges(self) -> dict:
        inc = {v: [] for v in self.vertices}
        for e in self.edge_ids:
            u, w = self.edges[e]
            inc[u].append(e)
            inc[w].append(e)
        return inc

    @cached_property
    def edge_squares(self) -> dict:
        out = {e: [] for e in self.edges}
        for s in self.square_ids:
            for e, _ in self.squares[s]:
                out[e].append(s)
        return out

    @cached_property
    def vertex_squares(self) -> dict:
        out = {v: [] for v in self.vertices}
        for s in self.square_ids:
            for v in self.square_vertices(s):
                out[v].append(s)
        return out

    @cached_property
    def _square_cycles(self) -> dict:
        cycles = {}
        for s, walk in self.squares.items():
            cycles[s] = tuple(_tail(self.edges[e], sign) for e, sign in walk)
        return cycles

    def square_vertices(self, s) -> tuple:
        """Vertex cycle of ``s``; the i-th vertex is where the i-th edge starts."""
        return self._square_cycles[s]

    def square_edges(self, s) -> tuple:
        return tuple(e for e, _ in self.squares[s])

    def other_end(self, e, v):
        a, b = self.edges[e]
        if v == a:
            return b
        if v == b:
            return a
        raise InputError(f"vertex {v!r} is not an endpoint of edge {e!r}")

    def neighbours(self, v):
        """Yield ``(w, e)`` for every edge ``e`` joining ``v`` to ``w``."""
        for e in self.incident_edges[v]:
            yield self.other_end(e, v), e

    def corner_edges(self, s, v) -> tuple:
        """The two edges of square ``s`` that meet at its corner ``v``."""
        verts = self.square_vertices(s)
        i = verts.index(v)
        edges = self.square_edges(s)
        return edges[i - 1], edges[i]

    def opposite_edge(self, s, e):
        edges = self.square_edges(s)
        return edges[(edges.index(e) + 2) % 4]

    def square_with_corner(self, e1, e2):
        """The square containing both edges ``e1`` and ``e2``, or None."""
        common = set(self.edge_squares[e1]) & set(self.edge_squares[e2])
        if not common:
            return None
        return sorted_ids(common)[0]

    def edge_between(self, u, w):
        for x, e in self.neighbours(u):
            if x == w:
                return e
        return None

    @cached_property
    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.squares)

    @cached_property
    def components(self) -> list:
        seen = set()
        comps = []
        for v in self.vertices:
            if v in seen:
                continue
            comp = [v]
            seen.add(v)
            stack = [v]
            while stack:
                x = stack.pop()
                for y, _ in self.neighbours(x):
                    if y not in seen:
                        seen.add(y)
                        comp.append(y)
                        stack.append(y)
            comps.append(frozenset(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components) <= 1

    def __repr__(self):
        return f"SquareComplex(V={len(self.vertices)}, E={len(self.edges)}, S={len(self.squares)})"

    # -- derived complexes --------------------------------------------------
    def full_subcomplex(self, vertices: Iterable) -> "SquareComplex":
        vs = set(vertices)
        edges = {e: uv for e, uv in self.edges.items() if uv[0] in vs and uv[1] in vs}
        squares = {s: w for s, w in self.squares.items() if all(v in vs for v in self.square_vertices(s))}
        return SquareComplex(tuple(sorted_ids(vs)), edges, squares)

    def subcomplex(self, vertices: Iterable, edges: Iterable, squares: Iterable) -> "SquareComplex":
        vs = set(vertices)
        es = set(edges)
        ss = set(squares)
        for s in ss:
            es.update(self.square_edges(s))
        for e in es:
            vs.update(self.edges[e])
        return SquareComplex(
            tuple(sorted_ids(vs)),
            {e: self.edges[e] for e in es},
            {s: self.squares[s] for s in ss},
        )

    def relabel(self, vmap=None, emap=None, smap=None) -> "SquareComplex":
        """Rename cells through the given dicts (missing keys keep their id)."""
        vm = (lambda v: vmap.get(v, v)) if vmap else (lambda v: v)
        em = (lambda e: emap.get(e, e)) if emap else (lambda e: e)
        sm = (lambda s: smap.get(s, s)) if smap else (lambda s: s)
        return SquareComplex(
            tuple(sorted_ids(vm(v) for v in self.vertices)),
            {em(e): (vm(a), vm(b)) for e, (a, b) in self.edges.items()},
            {sm(s): tuple((em(e), sg) for e, sg in w) for s, w in self.squares.items()},
        )


def _tail(uv, sign):
    return uv[0] if sign > 0 else uv[1]


def _head(uv, sign):
    return uv[1] if sign > 0 else uv[0]


_SIGNED = re.compile(r"^(.*?)([+-])$")


def _split_sign(token):
    if isinstance(token, tuple):
        return token[0], token[1]
    if isinstance(token, str):
        m = _SIGNED.match(token)
        if m and m.group(1):
            return m.group(1), 1 if m.group(2) == "+" else -1
    return token, None


def _is_edge(token, edges):
    try:
        return token in edges
    except TypeError:
        return False


def _orient_walk(sid, tokens, edges):
    if len(tokens) != 4:
        raise BadWalk(f"square {sid!r}: boundary walk has {len(tokens)} edges, expected 4")
    parsed = [(t, None) if _is_edge(t, edges) else _split_sign(t) for t in tokens]
    for e, _ in parsed:
        if e not in edges:
            raise DanglingReference(f"square {sid!r} cites unknown edge {e!r}")
    signs = [s for _, s in parsed]
    if any(s is None for s in signs):
        # infer orientation so consecutive edges share their common vertex
        e0, e1 = parsed[0][0], parsed[1][0]
        a, b = edges[e0]
        if b in edges[e1]:
            first = 1
        elif a in edges[e1]:
            first = -1
        else:
            raise BadWalk(f"square {sid!r}: edges {e0!r} and {e1!r} do not meet")
        signs = [first]
        cur = _head(edges[e0], first)
        for e, _ in parsed[1:]:
            u, w = edges[e]
            if u == cur:
                signs.append(1)
                cur = w
            elif w == cur:
                signs.append(-1)
                cur = u
            else:
                raise BadWalk(f"square {sid!r}: walk breaks at edge {e!r}")
    walk = tuple((e, s) for (e, _), s in zip(parsed, signs))
    _check_walk(sid, walk, edges)
    return walk


def _check_walk(sid, walk, edges):
    verts = []
    for i, (e, s) in enumerate(walk):
        nxt_e, nxt_s = walk[(i + 1) % 4]
        if _head(edges[e], s) != _tail(edges[nxt_e], nxt_s):
            raise BadWalk(f"square {sid!r}: walk does not close up at edge {e!r}")
        verts.append(_tail(edges[e], s))
    if len(set(e for e, _ in walk)) != 4:
        raise BadWalk(f"square {sid!r}: boundary walk repeats an edge")
    if len(set(verts)) != 4:
        raise BadWalk(f"square {sid!r}: boundary walk repeats a vertex")


def build_complex(vertices: Iterable, edges: Mapping, squares: Mapping | None = None) -> SquareComplex:
    """Validate raw cell lists and return a :class:`SquareComplex`.

    ``squares`` maps square ids to four edge tokens: bare ids (orientation is
    inferred), ``(edge, sign)`` pairs, or strings such as ``"a+"``.
    """
    squares = squares or {}
    vset = list(dict.fromkeys(vertices))
    vs = set(vset)
    clean_edges = {}
    for e, uv in edges.items():
        u, w = uv
        for x in (u, w):
            if x not in vs:
                raise DanglingReference(f"edge {e!r} cites unknown vertex {x!r}")
        if u == w:
            raise BadWalk(f"edge {e!r} is a loop")
        clean_edges[e] = (u, w)
    clean_squares = {}
    seen_sets = {}
    for s, tokens in squares.items():
        walk = _orient_walk(s, list(tokens), clean_edges)
        key = frozenset(e for e, _ in walk)
        if key in seen_sets:
            raise DuplicateSquare(f"squares {seen_sets[key]!r} and {s!r} have the same boundary")
        seen_sets[key] = s
        clean_squares[s] = walk
    return SquareComplex(tuple(sorted_ids(vset)), clean_edges, clean_squares)


# -- text format ---------------------------------------------------------

def _parse_token(tok: str):
    return int(tok) if re.fullmatch(r"-?\d+", tok) else tok


def parse_complex(text: str) -> SquareComplex:
    """Parse the line format ``v <id>`` / ``e <id> <v1> <v2>`` / ``s <id> <e1±> ...``."""
    vertices, edges, squares = [], {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "v" and len(parts) == 2:
            vertices.append(_parse_token(parts[1]))
        elif kind == "e" and len(parts) == 4:
            edges[_parse_token(parts[1])] = (_parse_token(parts[2]), _parse_token(parts[3]))
        elif kind == "s" and len(parts) >= 2:
            toks = []
            for t in parts[2:]:
                name, sign = _split_sign(t)
                toks.append((_parse_token(name), sign) if sign is not None else _parse_token(name))
            squares[_parse_token(parts[1])] = toks
        elif kind in ("c", "w", "p"):
            continue
        else:
            raise ParseError(f"line {lineno}: cannot parse {raw!r}")
    return build_complex(vertices, edges, squares)


def format_complex(X: SquareComplex) -> str:
    lines = [f"v {format_id(v)}" for v in X.vertices]
    for e in X.edge_ids:
        a, b = X.edges[e]
        lines.append(f"e {format_id(e)} {format_id(a)} {format_id(b)}")
    for s in X.square_ids:
        walk = " ".join(f"{format_id(e)}{'+' if sg > 0 else '-'}" for e, sg in X.squares[s])
        lines.append(f"s {format_id(s)} {walk}")
    return "\n".join(lines) + "\n"


# -- links -------------------------------------------------------------------

@dataclass(frozen=True)
class VertexLink:
    """Link of a vertex: one node per incident edge, one arc per square corner."""

    vertex: Any
    nodes: tuple
    arcs: tuple  # (square, edge, edge)

    @property
    def n_v(self) -> int:
        return len(self.arcs)

    @cached_property
    def adjacency(self) -> dict:
        adj = {x: [] for x in self.nodes}
        for s, x, y in self.arcs:
            adj[x].append((y, s))
            adj[y].append((x, s))
        return adj

    @property
    def euler_characteristic(self) -> int:
        return len(self.nodes) - len(self.arcs)

    @cached_property
    def components(self) -> list:
        seen, comps = set(), []
        for x in self.nodes:
            if x in seen:
                continue
            comp, stack = [x], [x]
            seen.add(x)
            while stack:
                y = stack.pop()
                for z, _ in self.adjacency[y]:
                    if z not in seen:
                        seen.add(z)
                        comp.append(z)
                        stack.append(z)
            comps.append(comp)
        return comps

    def is_cycle(self) -> bool:
        if not self.nodes or len(self.arcs) != len(self.nodes):
            return False
        return all(len(self.adjacency[x]) == 2 for x in self.nodes) and len(self.components) == 1

    def is_union_of_paths(self) -> bool:
        return all(len(self.adjacency[x]) <= 2 for x in self.nodes) and len(self.arcs) == len(self.nodes) - len(
            self.components
        )


def vertex_link(X: SquareComplex, v) -> VertexLink:
    links = memo(X, "links", dict)
    if v in links:
        return links[v]
    if v not in X.vertex_set:
        raise UnknownVertex(f"unknown vertex {v!r}")
    nodes = tuple(X.incident_edges[v])
    arcs = []
    for s in X.vertex_squares[v]:
        e1, e2 = X.corner_edges(s, v)
        arcs.append((s, e1, e2))
    links[v] = VertexLink(v, nodes, tuple(arcs))
    return links[v]


def _short_link_cycle(link: VertexLink):
    pairs = defaultdict(list)
    for s, x, y in link.arcs:
        pairs[frozenset((x, y))].append(s)
    for key in sorted(pairs, key=lambda k: sorted(id_key(z) for z in k)):
        if len(pairs[key]) > 1:
            x, y = sorted_ids(key)
            return (x, y), tuple(pairs[key][:2])
    adj = {x: {} for x in link.nodes}
    for s, x, y in link.arcs:
        adj[x][y] = s
        adj[y][x] = s
    for s, x, y in link.arcs:
        for z in sorted_ids(set(adj[x]) & set(adj[y])):
            return (x, y, z), (s, adj[y][z], adj[z][x])
    return None


def is_nonpositively_curved(X: SquareComplex) -> Verdict:
    """Link condition: every vertex link is simple with no cycle shorter than 4."""
    for v in X.vertices:
        found = _short_link_cycle(vertex_link(X, v))
        if found is not None:
            nodes, squares = found
            return Verdict(False, {"vertex": v, "cycle": nodes, "squares": squares})
    return Verdict(True)


# -- combinatorial maps ------------------------------------------------------

def _dihedral_equal(a: tuple, b: tuple) -> bool:
    n = len(a)
    for r in range(n):
        rot = b[r:] + b[:r]
        if rot == a or tuple(reversed(rot)) == a:
            return True
    return False


@dataclass(frozen=True, eq=False)
class CombinatorialMap:
    source: SquareComplex
    target: SquareComplex
    vertex_map: Mapping
    edge_map: Mapping
    square_map: Mapping = field(default_factory=dict)

    def __post_init__(self):
        S, T = self.source, self.target
        for v in S.vertices:
            if self.vertex_map.get(v) not in T.vertex_set:
                raise InputError(f"vertex {v!r} has no image in the target")
        for e, (a, b) in S.edges.items():
            f = self.edge_map.get(e)
            if f not in T.edges:
                raise InputError(f"edge {e!r} has no image edge")
            if {self.vertex_map[a], self.vertex_map[b]} != set(T.edges[f]):
                raise InputError(f"edge {e!r} does not commute with its endpoints")
        for s in S.squares:
            t = self.square_map.get(s)
            if t not in T.squares:
                raise InputError(f"square {s!r} has no image square")
            img_v = tuple(self.vertex_map[v] for v in S.square_vertices(s))
            img_e = tuple(self.edge_map[e] for e in S.square_edges(s))
            if not (_dihedral_equal(img_v, T.square_vertices(t)) and _dihedral_equal(img_e, T.square_edges(t))):
                raise InputError(f"square {s!r} does not commute with its boundary")

    @classmethod
    def from_vertex_map(cls, source: SquareComplex, target: SquareComplex, vmap: Mapping) -> "CombinatorialMap":
        """Extend a vertex assignment to edges and squares (target must be simple)."""
        emap, smap = {}, {}
        for e, (a, b) in source.edges.items():
            f = target.edge_between(vmap[a], vmap[b])
            if f is None:
                raise InputError(f"no target edge for source edge {e!r}")
            emap[e] = f
        for s in source.squares:
            es = [emap[e] for e in source.square_edges(s)]
            t = target.square_with_corner(es[0], es[1])
            if t is None or set(target.square_edges(t)) != set(es):
                raise InputError(f"no target square for source square {s!r}")
            smap[s] = t
        return cls(source, target, dict(vmap), emap, smap)

    @classmethod
    def identity(cls, X: SquareComplex) -> "CombinatorialMap":
        # valid by construction, so the checks in __post_init__ are skipped
        phi = object.__new__(cls)
        tables = ({v: v for v in X.vertices}, {e: e for e in X.edges}, {s: s for s in X.squares})
        for name, value in zip(("source", "target", "vertex_map", "edge_map", "square_map"), (X, X, *tables)):
            object.__setattr__(phi, name, value)
        return phi

    def compose(self, other: "CombinatorialMap") -> "CombinatorialMap":
        """``other`` after ``self``."""
        return CombinatorialMap(
            self.source,
            other.target,
            {v: other.vertex_map[w] for v, w in self.vertex_map.items()},
            {e: other.edge_map[f] for e, f in self.edge_map.items()},
            {s: other.square_map[t] for s, t in self.square_map.items()},
        )

    def restrict(self, sub: SquareComplex) -> "CombinatorialMap":
        return CombinatorialMap(
            sub,
            self.target,
            {v: self.vertex_map[v] for v in sub.vertices},
            {e: self.edge_map[e] for e in sub.edges},
            {s: self.square_map[s] for s in sub.squares},
        )


def is_reduced(phi: CombinatorialMap) -> Verdict:
    """No two squares sharing an edge have the same image square."""
    S = phi.source
    for e in S.edge_ids:
        for s1, s2 in itertools.combinations(S.edge_squares[e], 2):
            if phi.square_map[s1] == phi.square_map[s2]:
                return Verdict(False, {"edge": e, "squares": (s1, s2)})
    return Verdict(True)


def memo(X: SquareComplex, key, build):
    """Cache a derived value on an (immutable) complex."""
    store = X.__dict__.setdefault("_memo", {})
    if key not in store:
        store[key] = build()
    return store[key]
