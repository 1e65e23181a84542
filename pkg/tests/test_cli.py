import json
import re

import pytest

from squarecx.action import cyclic_strip, format_permutations, grid_reflection
from squarecx.cli import dispatch, main
from squarecx.complex import format_complex, parse_complex
from squarecx.euclid import embed_euclidean
from squarecx.formats import format_diagram, format_gridmap, parse_diagram, parse_gridmap, parse_loop
from squarecx.generators import grid_complex, single_square
from squarecx.gridlab import Grid, staircase_quadrangle
from squarecx.svg import is_listing, render_svg
from squarecx.complex import CombinatorialMap

from conftest import five_around_vertex


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return write


def test_validate_single_square(files):
    code, report = dispatch(["validate", files("sq.sqc", format_complex(single_square()))])
    assert code == 0 and report["verdict"] == "pass"
    assert report["command"] == "validate" and len(report["inputs"]) == 1


def test_audit_rejects_annulus(files):
    code, report = dispatch(["audit", files("ann.sqc", format_complex(cyclic_strip(4).complex))])
    assert code == 1 and report["error"]["type"] == "TopologyBug"


def test_probe_acyl_reflection(files):
    A = grid_reflection(2, 2)
    X = files("grid.sqc", format_complex(A.complex))
    G = files("gens.prm", format_permutations(A.generators))
    code, report = dispatch(["probe-acyl", X, G, "--L", "2", "--N", "1", "--cap", "6"])
    assert code == 2 and report["verdict"] == "fail" and report["witness"]["count"] == 2
    assert report["caps"] == {"L": 2, "N": 1, "word_cap": 6}
    code, _ = dispatch(["probe-acyl", X, G, "--L", "3", "--N", "1"])
    assert code == 0


def test_usage_errors(files):
    assert dispatch([])[0] == 1
    assert dispatch(["nonsense"])[0] == 1
    code, report = dispatch(["probe-acyl", "x", "y"])
    assert code == 1 and report["error"]["type"] == "UsageError"
    assert dispatch(["validate", "/nonexistent/file.sqc"])[0] == 1


def test_main_prints_one_sorted_line(files, capsys):
    path = files("g.sqc", format_complex(grid_complex(2, 1)))
    assert main(["hyperplanes", path]) == 0
    out = capsys.readouterr().out
    assert out.count("\n") == 1
    data = json.loads(out)
    assert list(data) == sorted(data)


def test_repeat_runs_identical(files, capsys):
    path = files("st.sqc", format_complex(staircase_quadrangle(4).diagram.surface))
    outputs = []
    for _ in range(2):
        main(["render", path])
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1]


def test_timing_and_out(files, tmp_path):
    path = files("g.sqc", format_complex(grid_complex(2, 2)))
    out = tmp_path / "g.svg"
    code, report = dispatch(["--timing", "render", path, "--out", str(out)])
    assert code == 0 and "wall_time" in report and report["artifact_file"] == str(out)
    assert out.read_text().count('class="square"') == 4


def test_svg_grid():
    doc = render_svg(grid_complex(2, 2))
    assert doc.count('class="square"') == 4 and not is_listing(doc)
    assert doc == render_svg(grid_complex(2, 2))


def test_svg_staircase_matches_embedding():
    S = staircase_quadrangle(5, 2).diagram.surface
    coords = embed_euclidean(S)
    doc = render_svg(S)
    cells = {(int(x), int(y)) for x, y in re.findall(r'class="square" data-id="[^"]*" data-x="(-?\d+)" data-y="(-?\d+)"', doc)}
    expect = {min(coords[v] for v in S.square_vertices(s)) for s in S.square_ids}
    assert cells == expect and len(cells) == len(S.squares)


def test_svg_listing_fallback():
    doc = render_svg(five_around_vertex())
    assert is_listing(doc) and "no lattice layout" in doc


def test_diagram_format_round_trip():
    Q = staircase_quadrangle(4)
    F = parse_diagram(format_diagram(Q))
    Q2 = F.quadrangle()
    assert len(Q2.P_minus) == len(Q.P_minus) and Q2.diagram.area == Q.diagram.area
    assert format_diagram(Q2) == format_diagram(F.diagram, F.corners)


def test_gridmap_round_trip():
    X = grid_complex(3, 3)
    G = Grid(2, 1).complex
    phi = CombinatorialMap.from_vertex_map(G, X, {(i, j): (i, j + 1) for i, j in G.vertices})
    text = format_gridmap(phi)
    assert format_gridmap(parse_gridmap(text)) == text


def test_loop_format():
    assert parse_loop("w 0 1\n2 3 # comment\n") == [0, 1, 2, 3]


def test_factorize_command(files):
    X = grid_complex(4, 4)
    G = Grid(3, 2).complex
    phi = CombinatorialMap.from_vertex_map(G, X, {(i, j): (i, j) for i, j in G.vertices})
    code, report = dispatch(["factorize", files("m.grid", format_gridmap(phi))])
    assert code == 0 and report["result"]["round_trip"] is True


def test_higman_check_small_cap():
    code, report = dispatch(["higman", "check", "--cap", "2"])
    assert code == 0 and report["command"] == "higman check"
