"""Exact and numeric tools for removable singularities of presymplectic forms via Dirac structures."""

from .scalar import Chart, Point, Scalar, smooth_at, Smoothness
from .exterior import ExteriorElement, FORM, MULTIVECTOR, wedge, ext_d, contract, clifford_act, schouten_self
from .dirac import (
    DiracFrame,
    GeneralizedSection,
    algebroid_data,
    frames_span_equal,
    graph_of_bivector,
    graph_of_form,
    verify_dirac,
)
from .removability import ProbeConfig, Tag, Verdict, extend_graph_frame, removability
from .splitting import SplitBlocks, DWBlocks, partial_inverse, standard_frame, verify_splitting

__all__ = [
    "Chart", "Point", "Scalar", "smooth_at", "Smoothness",
    "ExteriorElement", "FORM", "MULTIVECTOR", "wedge", "ext_d", "contract", "clifford_act", "schouten_self",
    "DiracFrame", "GeneralizedSection", "algebroid_data", "frames_span_equal", "graph_of_bivector",
    "graph_of_form", "verify_dirac",
    "ProbeConfig", "Tag", "Verdict", "extend_graph_frame", "removability",
    "SplitBlocks", "DWBlocks", "partial_inverse", "standard_frame", "verify_splitting",
]
