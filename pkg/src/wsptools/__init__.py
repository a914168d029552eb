"""Toolkit for the graph-based wildfire suppression problem.

Provides instance representation and evaluation, a physics-grounded
instance generator, heuristic and exact solvers, MIP model export,
hardness-reduction verifiers, and benchmarking statistics.
"""

__version__ = "0.1.0"

INSTANCE_FORMAT_VERSION = 1
