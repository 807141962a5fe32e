"""Vector-coloring bounds from non-backtracking spectra.

Lower bounds on the vector chromatic number come from PSD-ness of the
deformed Laplacian L(r); upper bounds come from explicit vector colorings
built out of a Perron-weighted non-backtracking random walk.
"""

__version__ = "0.1.0"

from .graph import Graph, classify, parse_edge_list, sample_er, two_core  # noqa: E402
