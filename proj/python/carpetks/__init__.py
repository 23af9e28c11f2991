"""Generalized Sierpinski carpet energies and Korevaar-Schoen functionals."""

from ._core import (
    CarpetSpec,
    __version__,
    estimate_rho_beta,
    functional_A,
    graph_info,
    min_k,
    p_capacity,
    validate,
)

__all__ = [
    "CarpetSpec",
    "__version__",
    "estimate_rho_beta",
    "functional_A",
    "graph_info",
    "min_k",
    "p_capacity",
    "validate",
]
