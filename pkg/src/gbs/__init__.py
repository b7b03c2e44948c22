"""Generalized Baumslag-Solitar graphs: moves, reduction and controlled isomorphism.

Modules:

* ``core``: graphs, labels as affine points, the ``gbs 1`` text format
* ``moves``: the move calculus, script replay and derived-move expansion
* ``lattice``: subgroups of Z/2 + Z^I in Hermite normal form
* ``reduction``: redundant vertices, projection, total reduction, conjugacy
* ``controlled``: isomorphism of controlled one-vertex graphs
* ``encode``: one-vertex and positive encodings with script translation
* ``cli``: the ``gbs`` command
"""

from .core import (
    AffinePoint,
    AffineVector,
    Edge,
    GbsGraph,
    GraphError,
    HalfEdge,
    parse,
    serialize,
)
from .moves import apply, format_script, parse_script, replay

__version__ = "0.1.0"

__all__ = [
    "AffinePoint",
    "AffineVector",
    "Edge",
    "GbsGraph",
    "GraphError",
    "HalfEdge",
    "apply",
    "format_script",
    "parse",
    "parse_script",
    "replay",
    "serialize",
]
