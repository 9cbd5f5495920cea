"""Operator growth in brickwork random circuits with symmetric gates.

Exact transition kernels for five gate ensembles, a Monte Carlo simulator of
Pauli-string evolution, closed-form endpoint random walks, a Haar sampling
check of the kernels, and GUE operator-growth curves.
"""
__version__ = "0.1.0"

from .kernels import SymmetryClass, TransitionKernel, kernel, rates  # noqa: E402
from .pauli import PauliString, SiteOp, edges, front_links  # noqa: E402

__all__ = [
    "__version__",
    "SymmetryClass",
    "TransitionKernel",
    "kernel",
    "rates",
    "PauliString",
    "SiteOp",
    "edges",
    "front_links",
]
