"""Finite CAT(0) square complexes: disc diagrams, hyperplanes, lattice embeddings,
grid factorizations, fixed-point probes and exact arithmetic in BS(1,2)."""
from .complex import (
    CombinatorialMap,
    SquareComplex,
    Verdict,
    build_complex,
    format_complex,
    is_nonpositively_curved,
    is_reduced,
    parse_complex,
    vertex_link,
)
from .diagram import (
    DiscDiagram,
    Quadrangle,
    curvature,
    curvature_table,
    fill_disc,
    gauss_bonnet_total,
    grid_quadrangle,
    is_euclidean,
    reduce_diagram,
    singularities,
    width,
)
from .errors import *  # noqa: F401,F403
from .euclid import complete_diagram, embed_euclidean, euclidean_subquadrangle, is_isometric_embedding
from .hyperplane import Hyperplane, hyperplanes, is_combinatorially_convex, rails
from .metric import distance_l1, geodesics, interval

__version__ = "0.1.0"
