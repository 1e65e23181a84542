"""Deterministic SVG drawings of planar square complexes."""
from __future__ import annotations

from html import escape

from .complex import SquareComplex, format_id
from .diagram import DiscDiagram
from .errors import EmbedFail, NoLayout, TopologyBug
from .euclid import embed_euclidean

UNIT = 40
MARGIN = 20


def layout(X) -> dict:
    """Lattice coordinates of every vertex, or :class:`NoLayout`."""
    S = X.surface if isinstance(X, DiscDiagram) else X
    try:
        return embed_euclidean(S)
    except (EmbedFail, TopologyBug) as exc:
        raise NoLayout(f"no lattice layout: {exc}") from exc


def _header(w: int, h: int) -> list:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
    ]


def _lattice_svg(S: SquareComplex, coords: dict) -> str:
    top = max(y for _, y in coords.values())
    right = max(x for x, _ in coords.values())

    def px(x, y):
        return MARGIN + UNIT * x, MARGIN + UNIT * (top - y)

    out = _header(2 * MARGIN + UNIT * right, 2 * MARGIN + UNIT * top)
    out.append('<g class="squares" fill="#dde6f0" stroke="none">')
    for s in S.square_ids:
        pts = [coords[v] for v in S.square_vertices(s)]
        x0, y0 = min(pts)
        X0, Y0 = px(x0, y0 + 1)
        out.append(
            f'<rect class="square" data-id="{escape(format_id(s))}" data-x="{x0}" data-y="{y0}" '
            f'x="{X0}" y="{Y0}" width="{UNIT}" height="{UNIT}"/>'
        )
    out.append("</g>")
    out.append('<g class="edges" stroke="#223" stroke-width="2">')
    for e in S.edge_ids:
        a, b = S.edges[e]
        (x1, y1), (x2, y2) = px(*coords[a]), px(*coords[b])
        out.append(f'<line data-id="{escape(format_id(e))}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>')
    out.append("</g>")
    out.append('<g class="vertices" fill="#223">')
    for v in S.vertices:
        x, y = coords[v]
        cx, cy = px(x, y)
        out.append(
            f'<circle data-id="{escape(format_id(v))}" data-x="{x}" data-y="{y}" cx="{cx}" cy="{cy}" r="3">'
            f"<title>{escape(format_id(v))}</title></circle>"
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _listing_svg(S: SquareComplex, reason: str) -> str:
    rows = [f"no lattice layout: {reason}"]
    for s in S.square_ids:
        rows.append(f"square {format_id(s)}: " + " ".join(format_id(v) for v in S.square_vertices(s)))
    for e in S.edge_ids:
        if not S.edge_squares[e]:
            a, b = S.edges[e]
            rows.append(f"edge {format_id(e)}: {format_id(a)} {format_id(b)}")
    w = 2 * MARGIN + 8 * max(len(r) for r in rows)
    h = 2 * MARGIN + 18 * len(rows)
    out = _header(w, h)
    out.append('<g class="listing" font-family="monospace" font-size="13">')
    for i, r in enumerate(rows):
        out.append(f'<text x="{MARGIN}" y="{MARGIN + 18 * (i + 1)}">{escape(r)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(X, coords: dict | None = None, fallback: bool = True) -> str:
    """SVG 1.1 drawing with unit cells at lattice coordinates.

    Without a layout, either a labelled listing of the cells is returned
    (``fallback``) or :class:`NoLayout` propagates.
    """
    S = X.surface if isinstance(X, DiscDiagram) else X
    if coords is None:
        try:
            coords = layout(S)
        except NoLayout as exc:
            if not fallback:
                raise
            return _listing_svg(S, str(exc.__cause__ or exc))
    return _lattice_svg(S, coords)


def is_listing(svg: str) -> bool:
    return 'class="listing"' in svg
