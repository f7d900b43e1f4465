"""Exact Stokes data of pure Gaussian type and its topological Laplace transform."""

from .scalars import GaussRational, QuadReal, gauss, quad_compare, parse_gauss
from .circle import CirclePoint, Order, DegeneratePair, leq_at, stokes_directions, is_generic, sign_on_cell_after
from .linalg import Matrix, Subspace, kernel, intersect, subspace_sum, rank, solve

__all__ = [
    "GaussRational", "QuadReal", "gauss", "quad_compare", "parse_gauss",
    "CirclePoint", "Order", "DegeneratePair", "leq_at", "stokes_directions",
    "is_generic", "sign_on_cell_after",
    "Matrix", "Subspace", "kernel", "intersect", "subspace_sum", "rank", "solve",
]
