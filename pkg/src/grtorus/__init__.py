"""Integral homology of the torus quotient Gr(2, C^5) / T.

Exact rational polytopes and directed chamber decompositions, the Picard
lattice of the quintic del Pezzo surface, Smith-normal-form homology, and
a floating-point model of the moment map.
"""
from .homology import FGAbelianGroup, HomologyTable, IntegerMatrix, snf
from .pipeline import compute_orbit_homology, run_pipeline

__all__ = ["FGAbelianGroup", "HomologyTable", "IntegerMatrix", "snf",
           "compute_orbit_homology", "run_pipeline"]
__version__ = "0.1.0"
