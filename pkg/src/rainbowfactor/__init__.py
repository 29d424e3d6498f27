"""Rainbow F-factors in coloured graph and hypergraph systems."""

from .core import (DegreeRule, DirectedKGraph, GraphSystem, PatternF, PatternKind,
                   RainbowCopy, RuleKind, build_hf, enumerate_rainbow_copies, min_star_degree)
from .fb import FbGraph, RainbowPacking, build_fb_graph, matching_to_packing, packing_to_matching
from .lp import (Complex, FarkasCertificate, FractionalSolution, Hypergraph,
                 has_perfect_fractional_matching, max_fractional_matching, min_fractional_cover)

__version__ = "0.1.0"

__all__ = [
    "Complex", "DegreeRule", "DirectedKGraph", "FarkasCertificate", "FbGraph",
    "FractionalSolution", "GraphSystem", "Hypergraph", "PatternF", "PatternKind",
    "RainbowCopy", "RainbowPacking", "RuleKind", "build_fb_graph", "build_hf",
    "enumerate_rainbow_copies", "has_perfect_fractional_matching", "matching_to_packing",
    "max_fractional_matching", "min_fractional_cover", "min_star_degree", "packing_to_matching",
]
