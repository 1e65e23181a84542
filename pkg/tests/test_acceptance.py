"""The eleven acceptance criteria, each at its stated tolerance and time budget.

Every test prints one ``criterion N: PASS|FAIL`` line (visible with or without ``-s``).
"""
import random
import time

import pytest

from squarecx.action import (
    book_rotation,
    grid_reflection,
    square_rotation,
    stabiliser,
    strip_translation,
    strip_with_rotation,
    trivial_action,
    weak_acylindricity_probe,
    weak_wpd_probe,
)
from squarecx.complex import CombinatorialMap, is_nonpositively_curved, is_reduced
from squarecx.diagram import (
    DiscDiagram,
    Quadrangle,
    fill_disc,
    gauss_bonnet_total,
    is_euclidean,
    quadrangle_cut,
    singularities,
    width,
)
from squarecx.errors import InputError, TopologyBug
from squarecx.euclid import complete_diagram, embed_euclidean, is_isometric_embedding
from squarecx.generators import (
    grid_complex,
    product_complex,
    path_graph,
    random_disc,
    random_monotone_region,
    random_polyomino,
    random_tree,
    region_complex,
    shuffle_ids,
    staircase_cells,
)
from squarecx.gridlab import Grid, _interior_corners, factorize_grid, staircase_propagate, staircase_quadrangle
from squarecx.higman import (
    PolygonOfGroups,
    link_graph,
    normal_form_element,
    normal_form_step,
    relation_holds,
    scan_star_paths,
    word_to_element,
    LETTERS,
    IDENTITY,
    bs12_compose,
)
from squarecx.hyperplane import halfspace_intersection, hyperplane_of_edge
from squarecx.metric import all_pairs_distances, bfs, geodesic_union, iter_geodesics

from conftest import branching_staircase


@pytest.fixture
def verdict(capsys):
    """Record one criterion: print its line, then assert correctness and runtime."""

    def emit(n, ok, elapsed, budget, detail):
        passed = ok and elapsed < budget
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if passed else 'FAIL'} ({elapsed:.2f}s / {budget}s) {detail}")
        assert ok, detail
        assert elapsed < budget, f"{elapsed:.2f}s exceeds {budget}s"

    return emit


def simply_connected(cells) -> bool:
    try:
        DiscDiagram(region_complex(cells))
    except (TopologyBug, InputError):
        return False
    return True


def euclidean_region(cells) -> bool:
    return simply_connected(cells) and is_euclidean(DiscDiagram(region_complex(cells))).ok


def tree_product(rng, a, b):
    return product_complex(random_tree(a, rng), random_tree(b, rng))


# -- 1 ------------------------------------------------------------------------------


def test_gauss_bonnet(verdict):
    rng = random.Random(1)
    t0 = time.perf_counter()
    discs = []
    for m in range(1, 16):
        for n in range(1, 21):
            if m * n <= 300 and (m + n) % 2 == 0:
                discs.append(grid_complex(m, n))
    for steps in range(1, 30):
        for thick in (1, 2, 3):
            if steps * (thick + 1) <= 300:
                discs.append(region_complex(staircase_cells(steps, thick)))
    while len(discs) < 560:
        n = rng.randrange(1, 301)
        discs.append(random_disc(n, rng, flat_bias=rng.random()))
    while len(discs) < 620:
        cells = random_polyomino(rng.randrange(1, 120), rng)
        if simply_connected(cells):
            discs.append(region_complex(cells))
    totals = {gauss_bonnet_total(DiscDiagram(X)) for X in discs}
    elapsed = time.perf_counter() - t0
    verdict(1, totals == {4}, elapsed, 10, f"{len(discs)} discs, totals {sorted(totals)}")


# -- 2 ------------------------------------------------------------------------------


def cat0_family(rng, count):
    """Grids, tree products, monotone regions, polyominoes and discs, at most 200 squares."""
    out = []
    while len(out) < count:
        kind = len(out) % 5
        if kind == 0:
            X = grid_complex(rng.randrange(1, 10), rng.randrange(1, 10))
        elif kind == 1:
            X = tree_product(rng, rng.randrange(2, 10), rng.randrange(2, 10))
        elif kind == 2:
            X = region_complex(random_monotone_region(rng.randrange(2, 12), rng))
        elif kind == 3:
            cells = random_polyomino(rng.randrange(2, 60), rng)
            if not simply_connected(cells):
                continue
            X = region_complex(cells)
        else:
            X = random_disc(rng.randrange(4, 120), rng, flat_bias=0.4)
        if len(X.squares) <= 200:
            out.append(X)
    return out


def test_hyperplane_geodesic_law(verdict):
    rng = random.Random(2)
    t0 = time.perf_counter()
    complexes = cat0_family(rng, 50)
    geos = bad = 0
    for X in complexes:
        assert is_nonpositively_curved(X).ok
        hyp = hyperplane_of_edge(X)
        verts = sorted(X.vertices, key=repr)
        for _ in range(8):
            u, v = rng.choice(verts), rng.choice(verts)
            for g in iter_geodesics(X, u, v):
                geos += 1
                crossed = [hyp[e] for e in g.edges]
                bad += len(crossed) != len(set(crossed))
    elapsed = time.perf_counter() - t0
    verdict(2, bad == 0 and geos > 0, elapsed, 30, f"{geos} geodesics on {len(complexes)} complexes, {bad} repeat crossings")


# -- 3 ------------------------------------------------------------------------------


def test_interval_duality(verdict):
    rng = random.Random(3)
    t0 = time.perf_counter()
    complexes = cat0_family(rng, 20)
    mismatches = 0
    for X in complexes:
        verts = sorted(X.vertices, key=repr)
        for _ in range(5):
            u, v = rng.choice(verts), rng.choice(verts)
            if geodesic_union(X, u, v) != halfspace_intersection(X, u, v):
                mismatches += 1
    elapsed = time.perf_counter() - t0
    verdict(3, mismatches == 0, elapsed, 30, f"100 pairs on 20 complexes, {mismatches} mismatches")


# -- 4 ------------------------------------------------------------------------------


def euclidean_family(rng):
    out = []
    for m in range(1, 20):
        for n in range(1, 20):
            if (m + 1) * (n + 1) <= 400 and (m * n) % 3 == 0:
                out.append(grid_complex(m, n))
    for steps in range(2, 40, 3):
        for thick in (1, 2, 4):
            X = region_complex(staircase_cells(steps, thick))
            if len(X.vertices) <= 400:
                out.append(X)
    while len(out) < 160:
        X = region_complex(random_monotone_region(rng.randrange(2, 30), rng, max_step=rng.randrange(1, 4)))
        if len(X.vertices) <= 400:
            out.append(X)
    out += [shuffle_ids(X, rng)[0] for X in out[::4]]
    return out


def test_euclidean_embedding(verdict):
    rng = random.Random(4)
    t0 = time.perf_counter()
    family = euclidean_family(rng)
    bad = []
    for X in family:
        coords = embed_euclidean(X)
        dist = all_pairs_distances(X)
        for u, du in dist.items():
            (xu, yu) = coords[u]
            if any(abs(xu - coords[v][0]) + abs(yu - coords[v][1]) != d for v, d in du.items()):
                bad.append(X)
                break
    elapsed = time.perf_counter() - t0
    verdict(4, not bad, elapsed, 60, f"{len(family)} Euclidean complexes, {len(bad)} distorted")


# -- 5 ------------------------------------------------------------------------------


def test_singularity_bound(verdict):
    rng = random.Random(5)
    t0 = time.perf_counter()
    count, worst, attempts = 0, 0, 0
    while count < 1000:
        attempts += 1
        if attempts % 4 == 0:
            X = region_complex(random_monotone_region(rng.randrange(2, 12), rng))
        else:
            X = random_disc(rng.randrange(4, 80), rng, flat_bias=rng.choice([0.2, 0.5, 0.8]), bump_rate=0.3)
        Q = quadrangle_cut(DiscDiagram(X), rng)
        if Q is None:
            continue
        count += 1
        worst = max(worst, len(singularities(Q)))
    # reduced fillings of geodesic quadrilaterals in products of trees
    filled, rng = 0, random.Random(55)
    while filled < 150:
        X = tree_product(rng, rng.randrange(3, 7), rng.randrange(3, 7))
        verts = sorted(X.vertices, key=repr)
        ends = [rng.choice(verts) for _ in range(4)]
        loop = []
        for p, q in zip(ends, ends[1:] + ends[:1]):
            loop += list(next(iter_geodesics(X, p, q)).vertices[:-1])
        if not 4 <= len(loop) <= 12:
            continue
        D = fill_disc(X, loop)
        assert is_reduced(D.map).ok
        Q = quadrangle_cut(D, rng)
        if Q is None:
            continue
        filled += 1
        worst = max(worst, len(singularities(Q)))
    elapsed = time.perf_counter() - t0
    detail = f"{count} quadrangles from discs and {filled} filled in tree products, at most {worst} singularities"
    verdict(5, worst <= 4, elapsed, 60, detail)


# -- 6 ------------------------------------------------------------------------------


def _corner_cells(cells):
    """Cells whose removal leaves a vertex with three of its four cells present."""
    out = []
    for x, y in sorted(cells):
        for dx, dy in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            if {(x + dx, y), (x, y + dy), (x + dx, y + dy)} <= cells:
                out.append((x, y))
                break
    return out


def test_completion(verdict):
    rng = random.Random(6)
    t0 = time.perf_counter()
    done = bad = 0
    while done < 100:
        cells = set(random_monotone_region(rng.randrange(3, 12), rng))
        T = region_complex(cells)
        kept = set(cells)
        for _ in range(rng.randrange(1, 4)):
            options = [c for c in _corner_cells(kept) if euclidean_region(kept - {c})]
            if not options:
                break
            kept.discard(rng.choice(options))
        if kept == cells:
            continue
        S = region_complex(kept)
        D = DiscDiagram(S, CombinatorialMap.from_vertex_map(S, T, {v: v for v in S.vertices}))
        out = complete_diagram(D)
        again = complete_diagram(out.diagram)
        ok = bool(out.changelog) and is_isometric_embedding(out.diagram.map).ok and not again.changelog
        bad += not ok
        done += 1
    elapsed = time.perf_counter() - t0
    verdict(6, bad == 0, elapsed, 30, f"{done} completions, {bad} failures")


# -- 7 ------------------------------------------------------------------------------


def random_grid_map(rng):
    """A grid map into ``I_m x T`` (or ``S x T`` for a second tree ``S``) with folds and branches."""
    m, n = rng.randrange(1, 5), rng.randrange(1, 8)
    tv, te = random_tree(rng.randrange(2, 9), rng)
    adj = {v: [] for v in tv}
    for a, b in te.values():
        adj[a].append(b)
        adj[b].append(a)
    walk = [rng.choice(tv)]
    for _ in range(n):
        nxt = adj[walk[-1]]
        if len(walk) > 1 and rng.random() < 0.3:
            walk.append(walk[-2])  # forced fold
        else:
            walk.append(rng.choice(nxt))
    if rng.random() < 0.5:
        X = product_complex(path_graph(m), (tv, te))
        bottom = list(range(m + 1))
    else:
        sv, se = random_tree(m + 3, rng)
        X = product_complex((sv, se), (tv, te))
        far = max(bfs(X, (sv[0], tv[0])).items(), key=lambda t: t[1])[0][0]
        path = _tree_path(sv, se, sv[0], far)
        if len(path) < m + 1:
            X = product_complex(path_graph(m), (tv, te))
            bottom = list(range(m + 1))
        else:
            bottom = path[: m + 1]
    G = Grid(m, n).complex
    return CombinatorialMap.from_vertex_map(G, X, {(i, j): (bottom[i], walk[j]) for i, j in G.vertices})


def _tree_path(verts, edges, a, b):
    adj = {v: [] for v in verts}
    for x, y in edges.values():
        adj[x].append(y)
        adj[y].append(x)
    prev, stack = {a: None}, [a]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in prev:
                prev[y] = x
                stack.append(y)
    out = [b]
    while out[-1] != a:
        out.append(prev[out[-1]])
    return out[::-1]


def test_grid_factorization(verdict):
    rng = random.Random(7)
    t0 = time.perf_counter()
    bad = folds = branches = 0
    for _ in range(200):
        phi = random_grid_map(rng)
        f = factorize_grid(phi)
        ok = f.round_trip() and is_isometric_embedding(f.embedding).ok
        bad += not ok
        rows = [f.vertical_map[j] for j in sorted(f.vertical_map)]
        folds += any(rows[j] == rows[j + 2] for j in range(len(rows) - 2))
        deg = {}
        for _, a, b in f.tree_edges:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        branches += any(d >= 3 for d in deg.values())
    elapsed = time.perf_counter() - t0
    verdict(7, bad == 0 and folds > 0 and branches > 0, elapsed, 30, f"200 grid maps ({folds} with folds, {branches} branching), {bad} failures")


# -- 8 ------------------------------------------------------------------------------


def polyominoes(max_cells):
    """Every fixed polyomino with at most ``max_cells`` cells, normalised to the origin."""
    def norm(cells):
        x0 = min(x for x, _ in cells)
        y0 = min(y for _, y in cells)
        return frozenset((x - x0, y - y0) for x, y in cells)

    layer = {frozenset({(0, 0)})}
    out = set(layer)
    for _ in range(max_cells - 1):
        nxt = set()
        for P in layer:
            for x, y in P:
                for c in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                    if c not in P:
                        nxt.add(norm(P | {c}))
        out |= nxt
        layer = nxt
    return out


def thin_staircases(max_cells, r, min_corners):
    """Euclidean quadrangles from small discs with width at most ``r`` and enough corners on P_minus."""
    found = []
    for cells in sorted(polyominoes(max_cells), key=sorted):
        if not simply_connected(cells):
            continue
        D = DiscDiagram(region_complex(cells))
        cyc = list(D.boundary_cycle)
        n = len(cyc)
        S = D.surface
        dist = {v: bfs(S, v) for v in cyc}

        def geodesic(i, j):
            return dist[cyc[i % n]][cyc[j % n]] == j - i

        for i in range(n):
            for j in range(i + 2, i + n - 1):
                if not geodesic(i, j):
                    break
                side = tuple(cyc[t % n] for t in range(i, j + 1))
                if len(_interior_corners(D, side)) < min_corners:
                    continue
                for a in range(j + 1, i + n - 1):
                    if not geodesic(j, a):
                        break
                    for b in range(a + 1, i + n):
                        if not geodesic(b, i + n):
                            continue
                        if not geodesic(a, b):
                            break
                        try:
                            Q = Quadrangle.from_corners(D, cyc[i % n], cyc[j % n], cyc[a % n], cyc[b % n])
                        except InputError:
                            continue
                        if width(Q) <= r:
                            found.append(Q)
    return found


def test_staircase_determination(verdict):
    t0 = time.perf_counter()
    rows = []
    # r = 1: thin candidates are searched for exhaustively among small discs
    candidates = thin_staircases(7, 1, 4)
    for k in (1, 2, 3):
        thin = [Q for Q in candidates if len(_interior_corners(Q.diagram, Q.P_minus)) >= 2 + 2 * k]
        for Q in thin:
            ident = CombinatorialMap.identity(Q.diagram.surface)
            rows.append(("r=1", k, staircase_propagate(Q, [ident, ident], k, r=1).length >= k))
        rows.append(("r=1 instances", k, len(thin)))
        # r = 2: branching target, two maps that differ off the propagation box
        Q, inc, moved = branching_staircase(k + 5)
        assert width(Q) <= 2
        p = staircase_propagate(Q, [inc, moved], k, r=2)
        rows.append(("r=2", k, p.length >= k))
        Q = staircase_quadrangle(k + 5, 1)
        ident = CombinatorialMap.identity(Q.diagram.surface)
        rows.append(("r=2 identical", k, staircase_propagate(Q, [ident] * 3, k, r=2).length >= k))
    elapsed = time.perf_counter() - t0
    checks = [ok for name, _, ok in rows if "instances" not in name]
    counts = {k: c for name, k, c in rows if "instances" in name}
    verdict(8, all(checks), elapsed, 10, f"{len(checks)} certified instances; r=1 candidates found per k: {counts}")


# -- 9 ------------------------------------------------------------------------------


def test_bs12(verdict):
    t0 = time.perf_counter()
    inverse = {"a": "A", "A": "a", "b": "B", "B": "b"}
    letters = "aAbB"
    words = mismatches = 0
    # depth-first over all words, carrying the element and the normal form
    stack = [("", IDENTITY, (0, 0, 0))]
    while stack:
        w, g, nf = stack.pop()
        words += 1
        if g != normal_form_element(nf):
            mismatches += 1
        if len(w) < 10:
            for ch in letters:
                stack.append((w + ch, bs12_compose(g, LETTERS[ch]), normal_form_step(nf, ch)))
    spot = all(word_to_element(w) == normal_form_element(_nf(w)) for w in ("abA", "aBAb", "BBaabAb", ""))
    elapsed = time.perf_counter() - t0
    ok = relation_holds() and mismatches == 0 and spot and words == sum(4**i for i in range(11))
    verdict(9, ok, elapsed, 120, f"{words} words, {mismatches} disagreements")


def _nf(word):
    state = (0, 0, 0)
    for ch in word:
        state = normal_form_step(state, ch)
    return state


# -- 10 -----------------------------------------------------------------------------


def test_higman_lemma(verdict):
    t0 = time.perf_counter()
    P = PolygonOfGroups(5)
    scan = scan_star_paths(P, 6)
    links = [link_graph(P, v, 6) for v in range(P.n)]
    elapsed = time.perf_counter() - t0
    ok = scan["nontrivial"] == 0 and scan["paths"] > 0 and all(L.certifies(4) for L in links)
    verdict(10, ok, elapsed, 120, f"{scan['paths']} paths, {scan['nontrivial']} nontrivial; {links[0].report()}")


# -- 11 -----------------------------------------------------------------------------


def test_probes(verdict):
    t0 = time.perf_counter()
    checks = {}
    free = trivial_action(grid_complex(3, 2))
    checks["free"] = all(weak_acylindricity_probe(free, L, N).ok for L in range(1, 4) for N in (1, 2, 3))
    refl = grid_reflection(2, 2)
    checks["reflection stabiliser"] = len(stabiliser(refl, [(1, 0), (1, 1), (1, 2)])) == 2
    checks["rotation stabiliser"] = len(stabiliser(square_rotation(), [(1, 1)])) == 4
    book = book_rotation(4, 2)
    fail = weak_acylindricity_probe(book, 1, 3)
    checks["book N=3 fails"] = not fail.ok and fail.witness["count"] == 4
    checks["book N=4 passes"] = weak_acylindricity_probe(book, 1, 4).ok
    checks["reflection L=2 fails"] = not weak_acylindricity_probe(refl, 2, 1).ok
    checks["reflection L=3 passes"] = weak_acylindricity_probe(refl, 3, 1).ok
    strip = strip_translation(6)
    axis = tuple((i, 0) for i in range(7))
    checks["strip wpd"] = all(weak_wpd_probe(strip, "t", axis, m, 1).ok for m in (1, 2, 3))
    rot = weak_wpd_probe(strip_with_rotation(6), "t", tuple((i, "c") for i in range(5)), 1, 1)
    checks["rotation factor wpd fails"] = not rot.ok and "r" in rot.witness["elements"]
    mono = True
    for A in (book, refl, book_rotation(3, 3), grid_reflection(3, 2)):
        table = {(L, N): weak_acylindricity_probe(A, L, N).ok for L in range(1, 5) for N in range(1, 6)}
        for (L, N), ok in table.items():
            if ok:
                mono &= all(table[(L2, N2)] for L2 in range(L, 5) for N2 in range(N, 6))
    checks["monotone in (L, N)"] = mono
    elapsed = time.perf_counter() - t0
    failed = [k for k, v in checks.items() if not v]
    verdict(11, not failed, elapsed, 10, f"{len(checks)} checks, failed: {failed or 'none'}")
