"""Flat-file formats beyond the complex format: diagrams, loops, grid maps, pile-up manifests.

A diagram file is split into ``[section]`` blocks::

    [surface]       complex lines for the disc
    [target]        complex lines for the target (optional; default: the surface)
    [map]           ``v a -> b`` / ``e a -> b`` / ``s a -> b`` (vertex lines suffice
                    when the target has no multiple edges)
    [boundary]      ``w e1+ e2- ...`` the outer boundary walk (checked on read)
    [corners]       ``p u_minus v_minus v_plus u_plus`` (optional quadrangle cut)
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .complex import (
    CombinatorialMap,
    SquareComplex,
    _parse_token,
    _split_sign,
    format_complex,
    format_id,
    parse_complex,
    sorted_ids,
)
from .diagram import DiscDiagram, Quadrangle
from .errors import InputError, ParseError

SECTIONS = ("surface", "target", "map", "boundary", "corners")


def split_sections(text: str, allowed=SECTIONS, default: str | None = None) -> dict:
    out, current = {}, default
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current not in allowed:
                raise ParseError(f"line {n}: unknown section [{current}]")
            if current in out:
                raise ParseError(f"line {n}: section [{current}] appears twice")
            out[current] = []
            continue
        if current is None:
            raise ParseError(f"line {n}: text before the first section")
        out.setdefault(current, []).append((n, line))
    return out


def _text(lines) -> str:
    return "\n".join(line for _, line in lines)


def _parse_arrows(lines) -> tuple:
    tables = ({}, {}, {})
    for n, line in lines:
        parts = line.split()
        if len(parts) != 4 or parts[0] not in ("v", "e", "s") or parts[2] != "->":
            raise ParseError(f"line {n}: expected '<v|e|s> <id> -> <id>'")
        tables["ves".index(parts[0])][_parse_token(parts[1])] = _parse_token(parts[3])
    return tables


def _cyclic_equal(a: tuple, b: tuple) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    flipped = tuple((e, -s) for e, s in reversed(b))
    for cand in (b, flipped):
        doubled = cand + cand
        if any(doubled[i : i + len(a)] == a for i in range(len(a))):
            return True
    return False


@dataclass(frozen=True, eq=False)
class DiagramFile:
    diagram: DiscDiagram
    corners: tuple | None = None

    def quadrangle(self) -> Quadrangle:
        if self.corners is None:
            raise InputError("diagram file has no [corners] section")
        return Quadrangle.from_corners(self.diagram, *self.corners)


def parse_diagram(text: str, target: SquareComplex | None = None) -> DiagramFile:
    """Read a diagram file.  ``target`` is used when the file has no ``[target]`` section."""
    sec = split_sections(text)
    if "surface" not in sec:
        raise ParseError("diagram file needs a [surface] section")
    S = parse_complex(_text(sec["surface"]))
    if "target" in sec:
        T = parse_complex(_text(sec["target"]))
    else:
        T = target if target is not None else S
    if "map" in sec:
        vm, em, sm = _parse_arrows(sec["map"])
        if em or sm or not S.edges:
            phi = CombinatorialMap(S, T, vm, em, sm)
        else:
            phi = CombinatorialMap.from_vertex_map(S, T, vm)
    elif T is S:
        phi = None
    else:
        raise ParseError("diagram file needs a [map] section for an external target")
    D = DiscDiagram(S, phi)
    if "boundary" in sec:
        darts = []
        for n, line in sec["boundary"]:
            parts = line.split()
            if parts[0] != "w":
                raise ParseError(f"line {n}: expected 'w <dart> ...'")
            for tok in parts[1:]:
                name, sign = _split_sign(tok)
                if sign is None:
                    raise ParseError(f"line {n}: boundary dart {tok!r} lacks an orientation")
                darts.append((_parse_token(name), sign))
        if not _cyclic_equal(tuple(darts), tuple(D.boundary_walk)):
            raise ParseError("[boundary] does not match the boundary walk of the surface")
    corners = None
    if "corners" in sec:
        (n, line), *rest = sec["corners"]
        parts = line.split()
        if rest or parts[0] != "p" or len(parts) != 5:
            raise ParseError(f"line {n}: expected one 'p <u-> <v-> <v+> <u+>' line")
        corners = tuple(_parse_token(p) for p in parts[1:])
    return DiagramFile(D, corners)


def format_diagram(D, corners: tuple | None = None, with_target: bool = True) -> str:
    if isinstance(D, Quadrangle):
        corners = corners or (D.u_minus, D.v_minus, D.v_plus, D.u_plus)
        D = D.diagram
    out = ["[surface]", format_complex(D.surface).rstrip("\n")]
    if D.target is not D.surface:
        if with_target:
            out += ["[target]", format_complex(D.target).rstrip("\n")]
        out.append("[map]")
        phi = D.map
        for kind, table in (("v", phi.vertex_map), ("e", phi.edge_map), ("s", phi.square_map)):
            for c in sorted_ids(table):
                out.append(f"{kind} {format_id(c)} -> {format_id(table[c])}")
    walk = " ".join(f"{format_id(e)}{'+' if s > 0 else '-'}" for e, s in D.boundary_walk)
    out += ["[boundary]", f"w {walk}".rstrip()]
    if corners is not None:
        out += ["[corners]", "p " + " ".join(format_id(c) for c in corners)]
    return "\n".join(out) + "\n"


# -- loops -----------------------------------------------------------------------------


def parse_loop(text: str) -> list:
    """Whitespace-separated vertex ids of a closed walk (a leading ``w`` per line is allowed)."""
    verts = []
    for raw in text.splitlines():
        parts = raw.split("#", 1)[0].split()
        if parts and parts[0] == "w":
            parts = parts[1:]
        verts.extend(_parse_token(p) for p in parts)
    if not verts:
        raise ParseError("loop file lists no vertices")
    return verts


# -- grid maps -------------------------------------------------------------------------


def parse_gridmap(text: str) -> CombinatorialMap:
    """``[grid]`` with ``g <m> <n>``, ``[target]`` complex lines, ``[map]`` with ``v <i> <j> -> <id>``."""
    from .gridlab import Grid

    sec = split_sections(text, allowed=("grid", "target", "map"))
    for name in ("grid", "target", "map"):
        if name not in sec:
            raise ParseError(f"grid map file needs a [{name}] section")
    (n, line), *rest = sec["grid"]
    parts = line.split()
    if rest or len(parts) != 3 or parts[0] != "g":
        raise ParseError(f"line {n}: expected one 'g <m> <n>' line")
    try:
        G = Grid(int(parts[1]), int(parts[2])).complex
    except ValueError:
        raise ParseError(f"line {n}: grid sizes must be integers") from None
    X = parse_complex(_text(sec["target"]))
    vmap = {}
    for n, line in sec["map"]:
        parts = line.split()
        if len(parts) != 5 or parts[0] != "v" or parts[3] != "->":
            raise ParseError(f"line {n}: expected 'v <i> <j> -> <id>'")
        try:
            key = (int(parts[1]), int(parts[2]))
        except ValueError:
            raise ParseError(f"line {n}: grid coordinates must be integers") from None
        vmap[key] = _parse_token(parts[4])
    missing = [v for v in G.vertices if v not in vmap]
    if missing:
        raise ParseError(f"grid vertex {missing[0]} has no image")
    return CombinatorialMap.from_vertex_map(G, X, vmap)


def format_gridmap(phi: CombinatorialMap) -> str:
    from .gridlab import grid_shape

    m, n = grid_shape(phi.source)
    out = ["[grid]", f"g {m} {n}", "[target]", format_complex(phi.target).rstrip("\n"), "[map]"]
    for i, j in sorted(phi.source.vertices):
        out.append(f"v {i} {j} -> {format_id(phi.vertex_map[(i, j)])}")
    return "\n".join(out) + "\n"


# -- pile-up manifests -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PileupJob:
    target: SquareComplex
    gamma: tuple
    words: list
    elements: list
    quadrangles: list
    files: list  # every file read, for digests


def load_manifest(path) -> PileupJob:
    """JSON manifest::

        {"target": "X.sqc", "generators": "g.prm", "gamma": [ids...],
         "steps": [{"element": "t", "diagram": "q1.dgm"}, ...]}

    Paths are relative to the manifest.  Diagrams without ``[target]`` use the manifest target.
    """
    from .action import FiniteAction, parse_permutations, parse_word

    path = Path(path)
    try:
        spec = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"manifest is not valid JSON: {exc}") from None
    for key in ("target", "gamma", "steps"):
        if key not in spec:
            raise ParseError(f"manifest lacks {key!r}")
    base = path.parent
    files = [path]

    def read(rel):
        p = base / rel
        files.append(p)
        return p.read_text(encoding="utf-8")

    X = parse_complex(read(spec["target"]))
    gens = parse_permutations(read(spec["generators"]), X) if spec.get("generators") else {}
    A = FiniteAction(X, gens)
    gamma = tuple(_parse_token(str(v)) for v in spec["gamma"])
    words, elements, quads = [], [], []
    for k, step in enumerate(spec["steps"]):
        if "element" not in step or "diagram" not in step:
            raise ParseError(f"step {k} needs 'element' and 'diagram'")
        word = parse_word(step["element"])
        words.append(word)
        elements.append(A.element(word))
        quads.append(parse_diagram(read(step["diagram"]), target=X).quadrangle())
    return PileupJob(X, gamma, words, elements, quads, files)
