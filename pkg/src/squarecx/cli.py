"""Command-line front end.

Every run prints one JSON line (sorted keys) on stdout: the command, sha256
digests of the inputs, the caps in force, a verdict, a witness when a property
fails, and command-specific results.  Text artifacts go to ``--out`` when given
and into the ``artifact`` field otherwise.

Exit codes: 0 pass, 2 property refuted (with witness), 1 input error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import action, diagram, euclid, formats, gridlab, higman, hyperplane, metric, svg
from .complex import (
    SquareComplex,
    Verdict,
    _parse_token,
    format_complex,
    format_id,
    id_key,
    is_nonpositively_curved,
    parse_complex,
)
from .errors import (
    EmbedFail,
    InconsistentFold,
    InputError,
    MismatchBug,
    NotEuclideanBug,
    SquareComplexError,
    TargetInconsistent,
)

EXIT_OK, EXIT_INPUT, EXIT_REFUTED = 0, 1, 2

# exceptions that refute the property a command checks, rather than reject its input
REFUTATIONS = (EmbedFail, InconsistentFold, TargetInconsistent, NotEuclideanBug, MismatchBug)


class UsageError(InputError):
    pass


def plain(x):
    """JSON-ready copy with stable ordering; cell ids keep ints, tuples become lists."""
    if isinstance(x, dict):
        return {format_id(k): plain(x[k]) for k in sorted(x, key=id_key)}
    if isinstance(x, (set, frozenset)):
        return [plain(y) for y in sorted(x, key=id_key)]
    if isinstance(x, (list, tuple)):
        return [plain(y) for y in x]
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if hasattr(x, "__dataclass_fields__"):
        return {k: plain(getattr(x, k)) for k in x.__dataclass_fields__}
    return str(x)


@dataclass
class Run:
    command: str
    args: argparse.Namespace
    inputs: dict = field(default_factory=dict)
    caps: dict = field(default_factory=dict)
    result: dict = field(default_factory=dict)
    verdict: Verdict = field(default_factory=lambda: Verdict(True))
    artifact: str | None = None

    def read(self, path) -> str:
        data = Path(path).read_bytes()
        self.inputs[str(path)] = hashlib.sha256(data).hexdigest()
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError:
            raise InputError(f"{path}: not UTF-8") from None

    def complex(self, path) -> SquareComplex:
        return parse_complex(self.read(path))


def _is_diagram_text(text: str) -> bool:
    return any(line.strip().startswith("[") for line in text.splitlines())


def _load_surface_or_diagram(run: Run, path) -> formats.DiagramFile:
    text = run.read(path)
    if _is_diagram_text(text):
        return formats.parse_diagram(text)
    return formats.DiagramFile(diagram.DiscDiagram(parse_complex(text)))


def _vertex(X: SquareComplex, token: str):
    v = _parse_token(token)
    if v not in X.vertex_set:
        raise InputError(f"unknown vertex {token!r}")
    return v


# -- subcommands -----------------------------------------------------------------------


def cmd_validate(run: Run):
    X = run.complex(run.args.file)
    run.result = {
        "vertices": len(X.vertices),
        "edges": len(X.edges),
        "squares": len(X.squares),
        "euler_characteristic": X.euler_characteristic,
        "connected": X.is_connected(),
    }
    run.verdict = is_nonpositively_curved(X)


def cmd_audit(run: Run):
    df = _load_surface_or_diagram(run, run.args.file)
    D = df.diagram
    table = diagram.curvature_table(D)
    run.result = {
        "curvature": table,
        "gauss_bonnet_total": sum(table.values()),
        "area": D.area,
        "degenerate": D.is_degenerate,
        "pinch_vertices": D.pinch_vertices,
    }
    diagram.gauss_bonnet_total(D)
    if df.corners is not None:
        Q = df.quadrangle()
        sing = diagram.singularities(Q)
        run.result.update(
            singularities=[{"kind": s.kind, "location": s.location, "note": s.note} for s in sing],
            width=diagram.width(Q),
            euclidean=diagram.is_euclidean(Q).ok,
        )
        run.verdict = diagram.singularity_bound_check(Q)


def cmd_hyperplanes(run: Run):
    X = run.complex(run.args.file)
    hs = hyperplane.hyperplanes(X)
    run.result = {"hyperplanes": len(hs), "separating": sum(H.separating for H in hs)}
    run.artifact = hyperplane.format_hyperplanes(X)


def cmd_interval(run: Run):
    X = run.complex(run.args.file)
    u, v = _vertex(X, run.args.u), _vertex(X, run.args.v)
    I = metric.interval(X, u, v)
    coords = metric.interval_embed_Z2(I)
    lines = [f"c {format_id(w)} {x} {y}" for w, (x, y) in sorted(coords.items(), key=lambda kv: id_key(kv[0]))]
    run.result = {"vertices": len(I), "distance": metric.distance_l1(X, u, v)}
    run.artifact = format_complex(I.subcomplex) + "\n".join(lines) + "\n"


def cmd_embed(run: Run):
    df = _load_surface_or_diagram(run, run.args.file)
    coords = euclid.embed_euclidean(df.diagram)
    S = df.diagram.surface
    run.result = {"vertices": len(coords)}
    run.artifact = "".join(f"c {format_id(v)} {coords[v][0]} {coords[v][1]}\n" for v in S.vertices)


def cmd_fill(run: Run):
    X = run.complex(run.args.complex)
    loop = formats.parse_loop(run.read(run.args.loop))
    run.caps = {"cap": run.args.cap, "node_cap": run.args.node_cap}
    stats = diagram.FillStats()
    D = diagram.fill_disc(X, loop, cap=run.args.cap, node_cap=run.args.node_cap, stats=stats)
    run.result = {"area": D.area, "degenerate": D.is_degenerate, "nodes": stats.nodes}
    run.artifact = formats.format_diagram(D, with_target=False)


def cmd_complete(run: Run):
    T = run.complex(run.args.target)
    D = formats.parse_diagram(run.read(run.args.diagram), target=T).diagram
    out = euclid.complete_diagram(D)
    run.result = {"added": len(out.changelog), "changelog": out.changelog, "area": out.diagram.area}
    run.artifact = formats.format_diagram(out.diagram, with_target=False)


def cmd_factorize(run: Run):
    phi = formats.parse_gridmap(run.read(run.args.file))
    f = gridlab.factorize_grid(phi, certify=not run.args.no_certify)
    run.result = {
        "tree_vertices": f.tree[0],
        "tree_edges": f.tree_edges,
        "vertical_map": f.vertical_map,
        "round_trip": f.round_trip(),
        "certified": not run.args.no_certify,
    }
    if not run.result["round_trip"]:
        run.verdict = Verdict(False, {"round_trip": False})


def cmd_pileup(run: Run):
    job = formats.load_manifest(run.args.manifest)
    for p in job.files:
        run.inputs[str(p)] = hashlib.sha256(Path(p).read_bytes()).hexdigest()
    D = gridlab.pile_up(job.gamma, job.elements, job.quadrangles, target=job.target)
    run.result = {
        "steps": len(job.elements),
        "elements": [action.format_word(w) for w in job.words],
        "area": D.area,
        "degenerate": D.is_degenerate,
        "gauss_bonnet_total": diagram.gauss_bonnet_total(D),
    }
    run.artifact = formats.format_diagram(D, with_target=False)


def _action(run: Run) -> action.FiniteAction:
    X = run.complex(run.args.complex)
    gens = action.parse_permutations(run.read(run.args.gens), X)
    return action.FiniteAction(X, gens, word_cap=run.args.cap)


def cmd_probe_acyl(run: Run):
    A = _action(run)
    run.caps = {"L": run.args.L, "N": run.args.N, "word_cap": run.args.cap}
    run.verdict = action.weak_acylindricity_probe(A, run.args.L, run.args.N)
    run.result = {"scope": A.scope(), "elements": len(A.elements()), "note": run.verdict.note}


def cmd_probe_wpd(run: Run):
    A = _action(run)
    axis = tuple(_vertex(A.complex, t) for t in run.args.axis.replace(",", " ").split())
    run.caps = {"m": run.args.m, "N": run.args.N, "word_cap": run.args.cap}
    run.verdict = action.weak_wpd_probe(A, action.parse_word(run.args.g), axis, run.args.m, run.args.N)
    run.result = {"scope": A.scope(), "elements": len(A.elements()), "note": run.verdict.note}


def cmd_higman_check(run: Run):
    P = higman.PolygonOfGroups(run.args.n)
    run.caps = {"word_cap": run.args.cap, "n": run.args.n}
    relation = higman.relation_holds()
    link = higman.link_graph(P, 0, run.args.cap)
    scan = higman.scan_star_paths(P, run.args.cap)
    run.result = {
        "relation": relation,
        "link": link.report(),
        "link_shortest_cycle": link.shortest_cycle,
        "paths": scan["paths"],
        "nontrivial": scan["nontrivial"],
        "cosets_per_vertex": scan["cosets_per_vertex"],
    }
    ok = relation and link.certifies(4) and scan["nontrivial"] == 0
    witness = None
    if not ok:
        witness = {"relation": relation, "shortest_cycle": link.shortest_cycle, "failures": scan["failures"]}
    run.verdict = Verdict(ok, witness)


def cmd_higman_subdivide(run: Run):
    P = higman.PolygonOfGroups(run.args.n)
    run.caps = {"word_cap": run.args.cap, "n": run.args.n}
    faces = higman.star_patch(P, run.args.cap)
    X = higman.subdivide_to_squares(faces)
    run.result = {
        "faces": len(faces),
        "squares": len(X.squares),
        "euler_characteristic": X.euler_characteristic,
    }
    run.verdict = is_nonpositively_curved(X)
    run.artifact = format_complex(X)


def cmd_render(run: Run):
    text = run.read(run.args.file)
    X = formats.parse_diagram(text).diagram if _is_diagram_text(text) else parse_complex(text)
    doc = svg.render_svg(X)
    run.result = {"layout": "listing" if svg.is_listing(doc) else "lattice"}
    run.artifact = doc


# -- parser ----------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--timing", action="store_true", default=argparse.SUPPRESS, help="add wall time to the report")
    common.add_argument("--out", default=argparse.SUPPRESS, help="write the artifact here instead of into the report")
    p = _Parser(prog="squarecx", description="Finite CAT(0) square complexes: audits, embeddings, probes.", parents=[common])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def cmd(name, func, help_):
        s = sub.add_parser(name, help=help_, parents=[common] if func else [])
        s.set_defaults(func=func)
        return s

    cmd("validate", cmd_validate, "parse a complex and check the link condition").add_argument("file")
    cmd("audit", cmd_audit, "curvature table and Gauss-Bonnet total of a disc").add_argument("file")
    cmd("hyperplanes", cmd_hyperplanes, "list hyperplanes").add_argument("file")
    s = cmd("interval", cmd_interval, "interval between two vertices, with lattice coordinates")
    s.add_argument("file")
    s.add_argument("u")
    s.add_argument("v")
    cmd("embed", cmd_embed, "lattice coordinates of a Euclidean disc").add_argument("file")
    s = cmd("fill", cmd_fill, "minimal-area disc diagram for a loop")
    s.add_argument("complex")
    s.add_argument("loop")
    s.add_argument("--cap", type=int, default=10**4, help="maximum area (default 10000)")
    s.add_argument("--node-cap", type=int, default=10**6, help="maximum search nodes (default 10^6)")
    s = cmd("complete", cmd_complete, "complete a Euclidean diagram")
    s.add_argument("diagram")
    s.add_argument("target")
    s = cmd("factorize", cmd_factorize, "factor a grid map through a tree product")
    s.add_argument("file")
    s.add_argument("--no-certify", action="store_true", help="skip the isometric-embedding check")
    cmd("pileup", cmd_pileup, "pile up translated quadrangles from a JSON manifest").add_argument("manifest")
    probes = (
        ("probe-acyl", cmd_probe_acyl, "elements fixing two far-apart vertices"),
        ("probe-wpd", cmd_probe_wpd, "elements fixing x and g^m x along an axis"),
    )
    for name, func, help_ in probes:
        s = cmd(name, func, help_)
        s.add_argument("complex")
        s.add_argument("gens")
        s.add_argument("--N", type=int, required=True)
        s.add_argument("--cap", type=int, default=6, help="word length cap (default 6)")
        if name == "probe-acyl":
            s.add_argument("--L", type=int, required=True)
        else:
            s.add_argument("--g", required=True, help="word of the loxodromic element")
            s.add_argument("--axis", required=True, help="comma-separated vertices of an axis segment")
            s.add_argument("--m", type=int, required=True)
    h = cmd("higman", None, "Higman polygon of groups")
    hsub = h.add_subparsers(dest="action", parser_class=_Parser)
    for name, func in (("check", cmd_higman_check), ("subdivide", cmd_higman_subdivide)):
        s = hsub.add_parser(name, parents=[common])
        s.set_defaults(func=func)
        s.add_argument("--n", type=int, default=5, help="number of sides (default 5)")
        s.add_argument("--cap", type=int, default=6 if name == "check" else 1, help="word length cap")
    cmd("render", cmd_render, "SVG drawing of a planar complex or diagram").add_argument("file")
    return p


def dispatch(argv=None) -> tuple:
    """Run one command; return ``(exit_code, report_dict)``."""
    start = time.perf_counter()
    parser = build_parser()
    run = None
    try:
        args = parser.parse_args(argv)
        args.timing = getattr(args, "timing", False)
        args.out = getattr(args, "out", None)
        if getattr(args, "func", None) is None:
            raise UsageError("missing subcommand")
        name = args.command + (f" {args.action}" if args.command == "higman" else "")
        run = Run(name, args)
        args.func(run)
        code = EXIT_OK if run.verdict.ok else EXIT_REFUTED
        report = {"verdict": "pass" if run.verdict.ok else "fail"}
        if not run.verdict.ok:
            report["witness"] = run.verdict.witness
    except REFUTATIONS as exc:
        code = EXIT_REFUTED
        report = {"verdict": "fail", "witness": {"error": type(exc).__name__, "message": str(exc)}}
    except (SquareComplexError, OSError) as exc:
        code = EXIT_INPUT
        report = {"verdict": "error", "error": {"type": type(exc).__name__, "message": str(exc)}}
    report["command"] = run.command if run else None
    if run is not None:
        report.update(inputs=run.inputs, caps=run.caps, result=run.result)
        if run.artifact is not None and code != EXIT_INPUT:
            if run.args.out:
                Path(run.args.out).write_text(run.artifact, encoding="utf-8")
                report["artifact_file"] = run.args.out
            else:
                report["artifact"] = run.artifact
        if run.args.timing:
            report["wall_time"] = round(time.perf_counter() - start, 6)
    return code, plain(report)


def main(argv=None) -> int:
    code, report = dispatch(argv)
    sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
