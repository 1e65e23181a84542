"""Finite group actions given by cell permutations, stabilisers and fixed-point probes."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .complex import SquareComplex, Verdict, build_complex, id_key, sorted_ids
from .errors import AxisTooShort, BadSymbol, InputError, NotAutomorphism, OutOfTruncation
from .generators import book_complex, grid_complex, product_complex
from .metric import bfs, distance_l1


@dataclass(frozen=True, eq=False)
class Automorphism:
    """A (possibly partial) cell map of a complex onto itself.

    Partial maps model truncations of an infinite action: cells whose image
    leaves the finite complex are simply absent from the tables.
    """

    complex: SquareComplex
    vertex_map: Mapping
    edge_map: Mapping
    square_map: Mapping
    name: str = ""

    def __post_init__(self):
        X = self.complex
        for kind, table, cells in (
            ("vertex", self.vertex_map, X.vertex_set),
            ("edge", self.edge_map, X.edges),
            ("square", self.square_map, X.squares),
        ):
            if any(c not in cells or d not in cells for c, d in table.items()):
                raise NotAutomorphism(f"{self.name or 'map'}: {kind} table mentions unknown cells")
            if len(set(table.values())) != len(table):
                raise NotAutomorphism(f"{self.name or 'map'}: {kind} table is not injective")
        vm = self.vertex_map
        for e, f in self.edge_map.items():
            a, b = X.edges[e]
            if a not in vm or b not in vm or {vm[a], vm[b]} != set(X.edges[f]):
                raise NotAutomorphism(f"{self.name or 'map'}: edge {e!r} does not follow its endpoints")
        for s, t in self.square_map.items():
            es = X.square_edges(s)
            if any(e not in self.edge_map for e in es) or {self.edge_map[e] for e in es} != set(X.square_edges(t)):
                raise NotAutomorphism(f"{self.name or 'map'}: square {s!r} does not follow its edges")
        for e, (u, w) in X.edges.items():
            if u in vm and w in vm and e not in self.edge_map and X.edge_between(vm[u], vm[w]) is None:
                raise NotAutomorphism(f"{self.name or 'map'}: edge {e!r} has no image")

    @classmethod
    def identity(cls, X: SquareComplex, name: str = "id") -> "Automorphism":
        return cls(X, {v: v for v in X.vertices}, {e: e for e in X.edges}, {s: s for s in X.squares}, name)

    @classmethod
    def from_vertex_map(cls, X: SquareComplex, vmap: Mapping, name: str = "") -> "Automorphism":
        """Extend a vertex permutation to every edge and square whose corners are all mapped."""
        vmap = {v: w for v, w in vmap.items() if w is not None}
        emap, smap = {}, {}
        for e, (a, b) in X.edges.items():
            if a in vmap and b in vmap:
                f = X.edge_between(vmap[a], vmap[b])
                if f is None:
                    raise NotAutomorphism(f"{name or 'map'}: edge {e!r} has no image")
                emap[e] = f
        for s in X.squares:
            es = X.square_edges(s)
            if all(e in emap for e in es):
                t = X.square_with_corner(emap[es[0]], emap[es[1]])
                if t is None or set(X.square_edges(t)) != {emap[e] for e in es}:
                    raise NotAutomorphism(f"{name or 'map'}: square {s!r} has no image")
                smap[s] = t
        return cls(X, vmap, emap, smap, name)

    @property
    def is_total(self) -> bool:
        X = self.complex
        return len(self.vertex_map) == len(X.vertices) and len(self.edge_map) == len(X.edges) and len(
            self.square_map
        ) == len(X.squares)

    def then(self, other: "Automorphism") -> "Automorphism":
        """``other`` after ``self``, defined where both steps are."""
        def chain(f, g):
            return {c: g[d] for c, d in f.items() if d in g}

        return Automorphism(
            self.complex,
            chain(self.vertex_map, other.vertex_map),
            chain(self.edge_map, other.edge_map),
            chain(self.square_map, other.square_map),
            f"{self.name}.{other.name}",
        )

    def inverse(self) -> "Automorphism":
        inv = lambda t: {d: c for c, d in t.items()}
        return Automorphism(self.complex, inv(self.vertex_map), inv(self.edge_map), inv(self.square_map), _inverse_letter(self.name))

    def restricts(self, other: "Automorphism") -> bool:
        """True when ``other`` extends this partial map."""
        return all(
            other_table.get(c) == d
            for table, other_table in (
                (self.vertex_map, other.vertex_map),
                (self.edge_map, other.edge_map),
                (self.square_map, other.square_map),
            )
            for c, d in table.items()
        )

    def key(self) -> tuple:
        """The action on the whole complex; two elements are equal iff their keys are."""
        X = self.complex
        return (
            tuple(self.vertex_map.get(v) for v in X.vertices),
            tuple(self.edge_map.get(e) for e in X.edge_ids),
            tuple(self.square_map.get(s) for s in X.square_ids),
        )

    def fixes(self, vertices: Iterable = (), edges: Iterable = (), squares: Iterable = ()) -> bool:
        return (
            all(self.vertex_map.get(v) == v for v in vertices)
            and all(self.edge_map.get(e) == e for e in edges)
            and all(self.square_map.get(s) == s for s in squares)
        )


def _inverse_letter(name: str) -> str:
    return name[:-3] if name.endswith("^-1") else name + "^-1"


def parse_word(text) -> tuple:
    """Words are sequences of generator names, optionally suffixed ``^-1``; ``.`` or spaces separate."""
    if isinstance(text, (tuple, list)):
        return tuple(text)
    text = text.strip()
    if text in ("", "1", "e"):
        return ()
    return tuple(t for t in text.replace(".", " ").split() if t)


def format_word(word: tuple) -> str:
    return ".".join(word) if word else "1"


@dataclass(frozen=True, eq=False)
class FiniteAction:
    complex: SquareComplex
    generators: Mapping  # name -> Automorphism
    word_cap: int = 6
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        for name, g in self.generators.items():
            if g.complex is not self.complex:
                raise NotAutomorphism(f"generator {name} acts on another complex")
            if name.endswith("^-1"):
                raise InputError(f"generator name {name!r} is reserved for inverses")

    @property
    def letters(self) -> dict:
        out = {}
        for name in sorted(self.generators):
            g = self.generators[name]
            out[name] = g
            out[name + "^-1"] = g.inverse()
        return out

    def element(self, word) -> Automorphism:
        g = Automorphism.identity(self.complex, "1")
        letters = self.letters
        for a in parse_word(word):
            if a not in letters:
                raise BadSymbol(f"unknown generator {a!r}")
            g = letters[a].then(g)
        return Automorphism(self.complex, g.vertex_map, g.edge_map, g.square_map, format_word(parse_word(word)))

    def elements(self) -> list:
        """Distinct elements of word length at most ``word_cap`` as ``(word, Automorphism)``.

        The shortest word (then lexicographically least) names each element.  A
        partial map extended by an element already found is a truncated copy
        of it and is not counted again.
        """
        if "elements" in self._cache:
            return self._cache["elements"]
        letters = self.letters
        names = sorted(letters)
        ident = Automorphism.identity(self.complex, "1")
        found = {ident.key(): ((), ident)}
        layer = [((), ident)]
        complete = False
        for _ in range(self.word_cap):
            nxt = []
            for word, g in layer:
                for a in names:
                    h = letters[a].then(g)
                    k = h.key()
                    if k not in found and not h.is_total and any(h.restricts(f) for _, f in found.values()):
                        continue
                    if k not in found:
                        w = word + (a,)
                        found[k] = (w, h)
                        nxt.append((w, h))
            if not nxt:
                complete = True
                break
            layer = nxt
        out = sorted(found.values(), key=lambda t: (len(t[0]), t[0]))
        self._cache["elements"] = out
        self._cache["complete"] = complete
        return out

    @property
    def closed(self) -> bool:
        """True when the enumeration stopped because no new element appeared."""
        self.elements()
        return self._cache["complete"]

    def scope(self) -> str:
        if self.closed:
            return f"whole group ({len(self.elements())} elements)"
        return f"up to word length {self.word_cap}"


@dataclass(frozen=True)
class Stabiliser:
    fixed_set: tuple
    elements: tuple  # words

    def __len__(self):
        return len(self.elements)


def _cell_sets(A: FiniteAction, cells):
    if isinstance(cells, SquareComplex):
        return list(cells.vertices), list(cells.edges), list(cells.squares)
    X = A.complex
    verts, edges, squares = [], [], []
    for c in cells:
        if c in X.vertex_set:
            verts.append(c)
        elif c in X.edges:
            edges.append(c)
        elif c in X.squares:
            squares.append(c)
        else:
            raise InputError(f"{c!r} is not a cell of the complex")
    return verts, edges, squares


def stabiliser(A: FiniteAction, cells) -> Stabiliser:
    """Elements (within the word cap) fixing every given cell.

    ``cells`` is a subcomplex or a collection of ids; an id naming a vertex is
    read as that vertex.
    """
    verts, edges, squares = _cell_sets(A, cells)
    hits = tuple(w for w, g in A.elements() if g.fixes(verts, edges, squares))
    return Stabiliser(tuple(sorted_ids(verts)) + tuple(sorted_ids(edges)) + tuple(sorted_ids(squares)), hits)


def _fixed_vertices(A: FiniteAction) -> list:
    return [(w, frozenset(v for v, x in g.vertex_map.items() if v == x)) for w, g in A.elements()]


def weak_acylindricity_probe(A: FiniteAction, L: int, N: int) -> Verdict:
    """Look for two vertices at distance >= L fixed by more than N elements.

    A failure is absolute; a pass only covers the enumerated elements.
    """
    X = A.complex
    fixed = _fixed_vertices(A)
    worst = None
    verts = sorted_ids(X.vertices)
    for i, u in enumerate(verts):
        du = bfs(X, u)
        for v in verts[i + 1 :]:
            d = du.get(v)
            if d is None or d < L:
                continue
            words = [w for w, F in fixed if u in F and v in F]
            if len(words) > N and (worst is None or len(words) > worst["count"]):
                worst = {"pair": (u, v), "distance": d, "count": len(words), "elements": [format_word(w) for w in words]}
    scope = A.scope()
    if worst is not None:
        return Verdict(False, worst, f"fail: {worst['count']} elements fix the pair ({scope})")
    return Verdict(True, None, f"pass {scope}")


def _shift(g: Automorphism, path: tuple) -> int:
    """The s > 0 with ``g(path[i]) = path[i+s]`` wherever both sides exist."""
    pos = {v: i for i, v in enumerate(path)}
    shifts = {pos[g.vertex_map[v]] - i for i, v in enumerate(path) if g.vertex_map.get(v) in pos}
    if len(shifts) != 1 or next(iter(shifts)) <= 0:
        raise InputError("the element does not translate the axis segment")
    s = next(iter(shifts))
    for i in range(len(path) - s):
        if g.vertex_map.get(path[i]) != path[i + s]:
            raise InputError("the element does not translate the axis segment")
    return s


def weak_wpd_probe(A: FiniteAction, g, axis_segment: tuple, m: int, N: int) -> Verdict:
    """For every x on the segment with ``g^m x`` on it, count elements fixing both."""
    path = tuple(axis_segment)
    elt = A.element(g)
    s = _shift(elt, path)
    power = Automorphism.identity(A.complex)
    for _ in range(m):
        power = elt.then(power)
    pairs = []
    for i, x in enumerate(path):
        j = i + m * s
        if j < len(path) and power.vertex_map.get(x) == path[j]:
            pairs.append((x, path[j]))
    if not pairs:
        raise AxisTooShort(f"g^{m} moves every point of the segment off it")
    fixed = _fixed_vertices(A)
    worst = None
    for x, y in pairs:
        words = [w for w, F in fixed if x in F and y in F]
        if len(words) > N and (worst is None or len(words) > worst["count"]):
            worst = {"x": x, "gm_x": y, "count": len(words), "elements": [format_word(w) for w in words]}
    scope = A.scope()
    if worst is not None:
        return Verdict(False, worst, f"fail: {worst['count']} elements fix x and g^{m}x ({scope})")
    return Verdict(True, None, f"pass {scope}")


def translate_hausdorff(A: FiniteAction, gamma: tuple, h, sub: tuple) -> int:
    """Hausdorff distance between ``sub`` and its image under ``h`` (combinatorial metric)."""
    X = A.complex
    g = A.element(h)
    for v in (gamma[0], gamma[-1], *sub):
        if v not in g.vertex_map:
            raise OutOfTruncation(f"{format_word(parse_word(h))} is undefined at {v!r}")
    if not set(sub) <= set(gamma):
        raise InputError("the sub-segment is not contained in the geodesic")
    moved = [g.vertex_map[v] for v in sub]

    def one_way(P, Q):
        return max(min(distance_l1(X, p, q) for q in Q) for p in P)

    return max(one_way(sub, moved), one_way(moved, sub))


# -- example actions --------------------------------------------------------------------


def trivial_action(X: SquareComplex, word_cap: int = 6) -> FiniteAction:
    return FiniteAction(X, {"id": Automorphism.identity(X, "id")}, word_cap)


def grid_reflection(length: int, height: int, word_cap: int = 6) -> FiniteAction:
    """Reflection ``(i, j) -> (length - i, j)`` of a grid."""
    X = grid_complex(length, height)
    r = Automorphism.from_vertex_map(X, {(i, j): (length - i, j) for i, j in X.vertices}, "r")
    return FiniteAction(X, {"r": r}, word_cap)


def square_rotation(word_cap: int = 6) -> FiniteAction:
    """Quarter turn of the 2x2 grid about its centre ``(1, 1)``."""
    X = grid_complex(2, 2)
    rho = Automorphism.from_vertex_map(X, {(i, j): (2 - j, i) for i, j in X.vertices}, "q")
    return FiniteAction(X, {"q": rho}, word_cap)


def book_rotation(pages: int = 4, spine: int = 2, word_cap: int = 6) -> FiniteAction:
    """Cyclic permutation of the pages of a book; the spine is fixed pointwise."""
    X = book_complex(pages, spine)
    vmap = {v: v for v in range(spine + 1)}
    for p in range(pages):
        for k in (0, 1):
            vmap[("p", p, k)] = ("p", (p + 1) % pages, k)
    return FiniteAction(X, {"c": Automorphism.from_vertex_map(X, vmap, "c")}, word_cap)


def _cycle(n: int):
    return list(range(n)), {i: (i, (i + 1) % n) for i in range(n)}


def cyclic_strip(n: int, word_cap: int = 6) -> FiniteAction:
    """``C_n x I_1`` with the unit rotation ``t`` along the cycle."""
    X = product_complex(_cycle(n), ([0, 1], {0: (0, 1)}))
    t = Automorphism.from_vertex_map(X, {(i, j): ((i + 1) % n, j) for i, j in X.vertices}, "t")
    return FiniteAction(X, {"t": t}, word_cap)


def strip_with_rotation(n: int, word_cap: int = 6) -> FiniteAction:
    """``C_n x tripod``: ``t`` runs along the cycle, ``r`` permutes the three legs."""
    tripod = (["c", 0, 1, 2], {k: ("c", k) for k in range(3)})
    X = product_complex(_cycle(n), tripod)
    t = Automorphism.from_vertex_map(X, {(i, a): ((i + 1) % n, a) for i, a in X.vertices}, "t")
    r = Automorphism.from_vertex_map(X, {(i, a): (i, a if a == "c" else (a + 1) % 3) for i, a in X.vertices}, "r")
    return FiniteAction(X, {"r": r, "t": t}, word_cap)


def strip_translation(length: int, word_cap: int = 6) -> FiniteAction:
    """Partial unit translation of the finite strip ``I_length x I_1`` (a truncation)."""
    X = grid_complex(length, 1)
    vmap = {(i, j): (i + 1, j) for i, j in X.vertices if i < length}
    return FiniteAction(X, {"t": Automorphism.from_vertex_map(X, vmap, "t")}, word_cap)


# -- permutation files -------------------------------------------------------------------


def parse_permutations(text: str, X: SquareComplex) -> dict:
    """``gen <name>`` blocks of ``v a -> b`` / ``e a -> b`` / ``s a -> b`` lines.

    Edge and square lines may be omitted; they are then derived from the vertices.
    """
    from .complex import _parse_token
    from .errors import ParseError

    blocks, current = {}, None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "gen":
            if len(parts) != 2:
                raise ParseError(f"line {n}: expected 'gen <name>'")
            current = blocks.setdefault(parts[1], ({}, {}, {}))
            continue
        if current is None or parts[0] not in ("v", "e", "s") or len(parts) != 4 or parts[2] != "->":
            raise ParseError(f"line {n}: expected '<v|e|s> <id> -> <id>' inside a gen block")
        table = current["ves".index(parts[0])]
        table[_parse_token(parts[1])] = _parse_token(parts[3])
    gens = {}
    for name, (vm, em, sm) in blocks.items():
        if em or sm:
            gens[name] = Automorphism(X, vm, em, sm, name)
        else:
            gens[name] = Automorphism.from_vertex_map(X, vm, name)
    return gens


def format_permutations(gens: Mapping) -> str:
    from .complex import format_id

    lines = []
    for name in sorted(gens):
        g = gens[name]
        lines.append(f"gen {name}")
        for kind, table in (("v", g.vertex_map), ("e", g.edge_map), ("s", g.square_map)):
            for c in sorted_ids(table):
                lines.append(f"{kind} {format_id(c)} -> {format_id(table[c])}")
    return "\n".join(lines) + "\n"
