"""Hilbert and R-transforms and the limit function f^(β)."""

from app.transforms.beta import BetaClass
from app.transforms.hilbert import HilbertEdges, hilbert_edges, hilbert_transform
from app.transforms.limit import TransformPoint, f_beta, f_beta_integral_form, transform_table
from app.transforms.rtransform import Branch, classify_branch, r_transform, v_branch

__all__ = [
    "BetaClass",
    "Branch",
    "HilbertEdges",
    "TransformPoint",
    "hilbert_transform",
    "hilbert_edges",
    "r_transform",
    "classify_branch",
    "v_branch",
    "f_beta",
    "f_beta_integral_form",
    "transform_table",
]
