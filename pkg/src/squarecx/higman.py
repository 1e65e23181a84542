"""BS(1,2) arithmetic, vertex links of the generalised Higman polygon of groups,
the edge-path stabiliser check and square subdivision of polygonal complexes."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .complex import SquareComplex, Verdict, build_complex, id_key, sorted_ids
from .errors import BadLocalData, BadPolygon, BadSymbol, InputError


# -- dyadic rationals ----------------------------------------------------------------


@dataclass(frozen=True, order=False)
class Dyadic:
    """``numerator / 2**exponent`` with an odd numerator (or zero, exponent 0)."""

    numerator: int
    exponent: int = 0

    def __post_init__(self):
        n, k = self.numerator, self.exponent
        if k < 0:
            n, k = n << -k, 0
        if n == 0:
            k = 0
        else:
            while k > 0 and n % 2 == 0:
                n //= 2
                k -= 1
        object.__setattr__(self, "numerator", n)
        object.__setattr__(self, "exponent", k)

    @classmethod
    def of(cls, x) -> "Dyadic":
        if isinstance(x, Dyadic):
            return x
        f = Fraction(x)
        d = f.denominator
        if d & (d - 1):
            raise InputError(f"{x} is not a dyadic rational")
        return cls(f.numerator, d.bit_length() - 1)

    def fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def __add__(self, other):
        other = Dyadic.of(other)
        k = max(self.exponent, other.exponent)
        return Dyadic((self.numerator << (k - self.exponent)) + (other.numerator << (k - other.exponent)), k)

    def __neg__(self):
        return Dyadic(-self.numerator, self.exponent)

    def __sub__(self, other):
        return self + (-Dyadic.of(other))

    def scale(self, k: int) -> "Dyadic":
        """Multiply by ``2**k``."""
        return Dyadic(self.numerator, self.exponent - k)

    def is_integer(self) -> bool:
        return self.exponent == 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Dyadic.of(other)
        return isinstance(other, Dyadic) and (self.numerator, self.exponent) == (other.numerator, other.exponent)

    def __hash__(self):
        return hash((self.numerator, self.exponent))

    def __repr__(self):
        return str(self.numerator) if self.exponent == 0 else f"{self.numerator}/2^{self.exponent}"


ZERO = Dyadic(0)


# -- BS(1,2) -----------------------------------------------------------------------------


@dataclass(frozen=True)
class BS12Element:
    """The affine map ``x -> 2**k * x + t``."""

    k: int
    t: Dyadic = ZERO

    def __post_init__(self):
        object.__setattr__(self, "t", Dyadic.of(self.t))

    def __call__(self, x):
        return Dyadic.of(x).scale(self.k) + self.t

    def __mul__(self, other: "BS12Element") -> "BS12Element":
        return bs12_compose(self, other)

    def inverse(self) -> "BS12Element":
        return bs12_invert(self)

    def is_identity(self) -> bool:
        return self.k == 0 and self.t == ZERO

    def __repr__(self):
        return f"({self.k}, {self.t!r})"


def bs12_compose(g: BS12Element, h: BS12Element) -> BS12Element:
    """``g`` after ``h``: ``(k1, t1)(k2, t2) = (k1 + k2, 2**k1 t2 + t1)``."""
    return BS12Element(g.k + h.k, h.t.scale(g.k) + g.t)


def bs12_invert(g: BS12Element) -> BS12Element:
    return BS12Element(-g.k, (-g.t).scale(-g.k))


IDENTITY = BS12Element(0)
A = BS12Element(1)
B = BS12Element(0, Dyadic(1))
LETTERS = {"a": A, "A": bs12_invert(A), "b": B, "B": bs12_invert(B)}


def word_to_element(word: str) -> BS12Element:
    """Evaluate a word over ``a, A = a^-1, b, B = b^-1`` as a product (leftmost letter outermost)."""
    g = IDENTITY
    for ch in word:
        if ch not in LETTERS:
            raise BadSymbol(f"{ch!r} is not one of a, A, b, B")
        g = bs12_compose(g, LETTERS[ch])
    return g


def relation_holds() -> bool:
    """``a b a^-1 b^-2`` evaluates to the identity."""
    return word_to_element("abABB").is_identity()


if not relation_holds():  # pragma: no cover - the representation itself would be wrong
    raise RuntimeError("BS(1,2) relation fails in the affine representation")


# -- rewriting oracle --------------------------------------------------------------------


def normal_form_step(state: tuple, letter: str) -> tuple:
    """Right-multiply the normal form ``a^-p b^m a^q`` by one letter.

    Rules used: ``a b^m = b^(2m) a``, ``b^m a^-1 = a^-1 b^(2m)``,
    ``a^-1 b^(2m) a = b^m`` and free cancellation.  In the result ``m`` is odd
    whenever ``p`` and ``q`` are both positive, which makes the form unique.
    """
    p, m, q = state
    if letter == "b":
        m += 1 << q
    elif letter == "B":
        m -= 1 << q
    elif letter == "a":
        q += 1
    elif letter == "A":
        if q > 0:
            q -= 1
        else:
            p += 1
            m *= 2
    else:
        raise BadSymbol(f"{letter!r} is not one of a, A, b, B")
    while p > 0 and q > 0 and m % 2 == 0:
        p, m, q = p - 1, m // 2, q - 1
    return p, m, q


def normal_form(word: str) -> tuple:
    """``(p, m, q)`` with ``word = a^-p b^m a^q`` in BS(1,2)."""
    state = (0, 0, 0)
    for ch in word:
        state = normal_form_step(state, ch)
    return state


def normal_form_element(state: tuple) -> BS12Element:
    p, m, q = state
    return BS12Element(q - p, Dyadic(m, p))


# -- subgroups and cosets ------------------------------------------------------------------


def subgroup_membership(g: BS12Element, kind: str, c: BS12Element | None = None) -> bool:
    """Membership in ``<a>`` (``kind="A"``), ``<b>`` (``"B"``) or their conjugates ``c<x>c^-1``."""
    if c is not None:
        g = bs12_compose(bs12_compose(bs12_invert(c), g), c)
    if kind == "A":
        return g.t == ZERO
    if kind == "B":
        return g.k == 0 and g.t.is_integer()
    raise InputError(f"unknown subgroup {kind!r}")


def coset_key(g: BS12Element, kind: str) -> tuple:
    """A canonical label of the left coset ``g<a>`` or ``g<b>``.

    ``g a^j = (k + j, t)`` so ``g<a>`` is labelled by ``t``; ``g b^m = (k, t + 2^k m)``
    so ``g<b>`` is labelled by ``k`` and ``t`` reduced modulo ``2^k``.
    """
    if kind == "A":
        return ("A", g.t)
    period = Fraction(2) ** g.k
    t = g.t.fraction()
    r = t - period * (t // period)
    return ("B", g.k, Dyadic.of(r))


def same_coset(g1: BS12Element, g2: BS12Element, kind: str) -> bool:
    return subgroup_membership(bs12_compose(bs12_invert(g1), g2), kind)


@dataclass(frozen=True)
class IntersectionCertificate:
    trivial: bool
    reason: str


def edge_intersection_trivial(c: BS12Element, kind: str) -> IntersectionCertificate:
    """Decide ``<a> ∩ c<x>c^-1 = {1}`` for ``x = a`` or ``b``.

    ``c a^j c^-1 = (j, t_c (1 - 2^j))`` lies in ``<a>`` iff ``j = 0`` or ``t_c = 0``;
    ``c b^m c^-1 = (0, 2^(k_c) m)`` is never in ``<a>`` unless ``m = 0``.
    """
    if kind == "B":
        return IntersectionCertificate(True, "conjugates of b-powers are translations, a-powers are pure scalings")
    if kind != "A":
        raise InputError(f"unknown subgroup {kind!r}")
    if c.t == ZERO:
        return IntersectionCertificate(False, "c lies in <a>, so the conjugate subgroup is <a> itself")
    return IntersectionCertificate(True, f"c a^j c^-1 has translation {c.t!r}(1 - 2^j), nonzero for j != 0")


# -- enumeration ---------------------------------------------------------------------------------


def ball(cap: int) -> list:
    """Distinct elements of word length at most ``cap`` as ``(shortest word, element)``."""
    found = {IDENTITY: ""}
    layer = [("", IDENTITY)]
    for _ in range(cap):
        nxt = []
        for w, g in layer:
            for ch in "AaBb":
                h = bs12_compose(g, LETTERS[ch])
                if h not in found:
                    found[h] = w + ch
                    nxt.append((w + ch, h))
        layer = nxt
    return sorted(((w, g) for g, w in found.items()), key=lambda t: (len(t[0]), t[0]))


# -- polygon of groups ------------------------------------------------------------------------------


@dataclass(frozen=True)
class PolygonOfGroups:
    """The Higman n-gon: edge ``e_i`` joins ``v_(i-1)`` and ``v_i``.

    At ``v_i`` the generator of ``e_i`` goes to ``a`` and that of ``e_(i+1)`` to ``b``,
    matching ``a_i a_(i+1) a_i^-1 = a_(i+1)^2``.
    """

    n: int

    def __post_init__(self):
        if self.n < 4:
            raise InputError("polygons of groups need at least 4 sides")

    @property
    def hyperbolic(self) -> bool:
        return self.n >= 5

    def edge_type(self, edge: int, vertex: int) -> str:
        """``"A"`` or ``"B"``: the local inclusion of ``e_edge`` at ``v_vertex``."""
        i, j = edge % self.n, vertex % self.n
        if i == j:
            return "A"
        if i == (j + 1) % self.n:
            return "B"
        raise InputError(f"e_{i} does not contain v_{j}")

    def edge_vertices(self, edge: int) -> tuple:
        return ((edge - 1) % self.n, edge % self.n)


@dataclass(frozen=True)
class LinkGraph:
    nodes: tuple  # coset keys
    arcs: tuple  # (word, a-coset key, b-coset key)
    shortest_cycle: int | None
    cap: int

    def certifies(self, length: int) -> bool:
        """No cycle shorter than ``length`` among the enumerated cosets."""
        return self.shortest_cycle is None or self.shortest_cycle >= length

    def report(self) -> str:
        found = "no cycle found" if self.shortest_cycle is None else f"shortest cycle {self.shortest_cycle}"
        return f"link at word length <= {self.cap}: {len(self.nodes)} cosets, {len(self.arcs)} polygons, {found}"


def _shortest_cycle(adj: dict):
    best = None
    for s in sorted(adj, key=id_key):
        dist, parent = {s: 0}, {s: None}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            if best is not None and 2 * dist[x] + 1 >= best:
                break
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    queue.append(y)
                elif parent[x] != y:
                    length = dist[x] + dist[y] + 1
                    if best is None or length < best:
                        best = length
    return best


def link_graph(P: PolygonOfGroups, v: int, word_cap: int) -> LinkGraph:
    """Coset graph of ``<a>``, ``<b>`` in the vertex group of ``v``, truncated at ``word_cap``.

    Nodes are the edges at ``v`` (cosets), arcs the polygons at ``v`` (elements).
    """
    if word_cap < 1:
        raise InputError("word_cap must be at least 1")
    P.edge_type(v, v)
    arcs, adj = [], {}
    for w, g in ball(word_cap):
        ka, kb = coset_key(g, "A"), coset_key(g, "B")
        arcs.append((w, ka, kb))
        adj.setdefault(ka, set()).add(kb)
        adj.setdefault(kb, set()).add(ka)
    return LinkGraph(tuple(sorted_ids(adj)), tuple(arcs), _shortest_cycle(adj), word_cap)


# -- edge-path stabilisers ----------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalEdge:
    """An edge at a vertex of the star: the coset ``rep<kind>`` of that vertex group."""

    kind: str
    rep: BS12Element

    def same(self, other: "LocalEdge") -> bool:
        return self.kind == other.kind and same_coset(self.rep, other.rep, self.kind)


@dataclass(frozen=True)
class EdgePath:
    """Edges ``e1 e2 e3`` with ``e2 = [w, w']``; ``e1`` is seen at ``w`` and ``e3`` at ``w'``."""

    e1: LocalEdge
    e2_at_w: LocalEdge
    e2_at_w2: LocalEdge
    e3: LocalEdge


def edge_path_stabiliser_check(P: PolygonOfGroups, path: EdgePath) -> Verdict:
    """Certify ``G_e1 ∩ G_e2 ∩ G_e3 = {1}`` through the end of ``e2`` where it is a-type."""
    if {path.e2_at_w.kind, path.e2_at_w2.kind} != {"A", "B"}:
        raise BadLocalData("the middle edge must be a-type at one end and b-type at the other")
    if path.e1.same(path.e2_at_w) or path.e3.same(path.e2_at_w2):
        raise BadLocalData("the path folds back along its middle edge")
    if path.e2_at_w.kind == "A":
        end, mid, other = "w", path.e2_at_w, path.e1
    else:
        end, mid, other = "w'", path.e2_at_w2, path.e3
    # conjugate so that the middle edge becomes <a>
    c = bs12_compose(bs12_invert(mid.rep), other.rep)
    cert = edge_intersection_trivial(c, other.kind)
    chain = [{"vertex": end, "conjugator": repr(c), "type": other.kind, "reason": cert.reason}]
    if not cert.trivial:
        return Verdict(False, chain, "edge groups meet non-trivially")
    return Verdict(True, chain, "Trivial")


def scan_star_paths(P: PolygonOfGroups, word_cap: int) -> dict:
    """Check every 3-edge path whose middle edge is a side of the base polygon.

    Every edge of the complex is a translate of a side, so this covers all
    paths up to the group action, relative to ``word_cap``.
    """
    cosets = {}
    for _, g in ball(word_cap):
        for kind in "AB":
            cosets.setdefault((kind, coset_key(g, kind)), LocalEdge(kind, g))
    edges = [cosets[k] for k in sorted(cosets, key=id_key)]
    total, failures = 0, []
    for i in range(P.n):
        w, w2 = P.edge_vertices(i)
        mid_w = LocalEdge(P.edge_type(i, w), IDENTITY)
        mid_w2 = LocalEdge(P.edge_type(i, w2), IDENTITY)
        firsts = [e for e in edges if not e.same(mid_w)]
        thirds = [e for e in edges if not e.same(mid_w2)]
        for e1 in firsts:
            for e3 in thirds:
                total += 1
                if not edge_path_stabiliser_check(P, EdgePath(e1, mid_w, mid_w2, e3)).ok:
                    failures.append((i, e1, e3))
    return {"paths": total, "nontrivial": len(failures), "failures": failures[:10], "cosets_per_vertex": len(edges)}


# -- square subdivision --------------------------------------------------------------------------------


def polygonal_euler_characteristic(faces: Mapping) -> int:
    verts, edges = set(), set()
    for cyc in faces.values():
        verts.update(cyc)
        edges.update(frozenset((cyc[j], cyc[(j + 1) % len(cyc)])) for j in range(len(cyc)))
    return len(verts) - len(edges) + len(faces)


def subdivide_to_squares(faces: Mapping) -> SquareComplex:
    """Cut every n-gon (``n >= 4``) into n squares around its barycentre.

    ``faces`` maps a face id to its boundary cycle of vertex ids.  The square
    at corner ``v`` has vertices: barycentre, the midpoints of the two sides at
    ``v``, and ``v``.
    """
    mids, verts, edges, squares = {}, set(), {}, {}

    def mid(u, w):
        key = frozenset((u, w))
        if key not in mids:
            lo, hi = sorted_ids(key)
            mids[key] = ("m", lo, hi)
            verts.add(mids[key])
            edges[("h", lo, hi, 0)] = (lo, mids[key])
            edges[("h", lo, hi, 1)] = (mids[key], hi)
        return mids[key]

    def half(u, m):
        _, lo, hi = m
        return ("h", lo, hi, 0) if u == lo else ("h", lo, hi, 1)

    for f in sorted_ids(faces):
        cyc = tuple(faces[f])
        n = len(cyc)
        if n < 4:
            raise BadPolygon(f"face {f!r} has {n} sides; need at least 4")
        if len(set(cyc)) != n:
            raise BadPolygon(f"face {f!r} repeats a vertex")
        c = ("c", f)
        verts.add(c)
        verts.update(cyc)
        ms = [mid(cyc[j], cyc[(j + 1) % n]) for j in range(n)]
        for j in range(n):
            edges[("r", f, j)] = (c, ms[j])
        for j in range(n):
            v, before, after = cyc[j], ms[j - 1], ms[j]
            squares[("q", f, j)] = [("r", f, (j - 1) % n), half(v, before), half(v, after), ("r", f, j)]
    return build_complex(sorted_ids(verts), edges, squares)


def star_patch(P: PolygonOfGroups, word_cap: int = 1) -> dict:
    """Faces of the star of the base polygon, built from the vertex links.

    Around ``v_i`` the polygon ``g F`` (``g`` in the vertex group, word length at
    most ``word_cap``) has sides ``g e_i`` (coset ``g<a>``) and ``g e_(i+1)``
    (coset ``g<b>``).  Polygons ``b^m F`` at ``v_i`` and ``a^m F`` at ``v_(i+1)``
    are the same polygon ``a_(i+1)^m F`` and are merged.
    """
    n = P.n
    elements = [g for _, g in ball(word_cap)]
    faces = {"F": tuple(("v", i) for i in range(n))}

    def far(i, kind, g):
        if coset_key(g, kind) == coset_key(IDENTITY, kind):
            return ("v", (i - 1) % n) if kind == "A" else ("v", (i + 1) % n)
        return ("far", i, kind, coset_key(g, kind))

    for i in range(n):
        for g in elements:
            if g.is_identity():
                continue
            if subgroup_membership(g, "A"):
                # a_i^m F contains e_i; it is built from v_i's side only
                pid = ("E", i, g.k)
            elif subgroup_membership(g, "B"):
                pid = ("E", (i + 1) % n, int(g.t.numerator))
            else:
                pid = ("P", i, g.k, g.t)
            cyc = faces.get(pid)
            cyc = list(cyc) if cyc is not None else [(pid, j) for j in range(n)]
            cyc[i] = ("v", i)
            cyc[(i - 1) % n] = far(i, "A", g)
            cyc[(i + 1) % n] = far(i, "B", g)
            faces[pid] = tuple(cyc)
    return faces

