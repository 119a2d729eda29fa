"""Desk-scale toolkit for metrics on critical percolation gaskets.

Samples site percolation on a triangular-lattice disk, extracts cluster
gaskets with their interface loops, builds internal metrics (chemical
distance, effective resistance, geodesic approximation functionals),
verifies the metric axiom system on them, estimates normalization medians
and scaling exponents, and compares sampled metric spaces in the
Gromov-Hausdorff-function topology.
"""

__version__ = "0.1.0"

from .exponents import SleParameters, make_parameters

__all__ = ["SleParameters", "make_parameters", "__version__"]
