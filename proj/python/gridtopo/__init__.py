"""Topology design for power networks under the swing equations.

Costs are Tr(L_w L_b^+) for a selected set of candidate lines; the squared
H2 norm adds the frequency term Tr(S M^-1) and divides by twice the damping.

    >>> import gridtopo
    >>> f = gridtopo.load("data/case8_18.json")
    >>> tree = gridtopo.design_tree(f.network)
    >>> mesh = gridtopo.design_mesh(f.network, k=10)
"""

from ._core import (
    CostSpec,
    Edge,
    GridTopoError,
    Network,
    NetworkFile,
    brute_mesh,
    brute_tree,
    design_mesh,
    design_tree,
    evaluate,
    gap_bound,
    gap_table,
    generate_case,
    load,
    loads,
    simulate,
    verify,
)

__all__ = [
    "CostSpec",
    "Edge",
    "GridTopoError",
    "Network",
    "NetworkFile",
    "brute_mesh",
    "brute_tree",
    "design_mesh",
    "design_tree",
    "evaluate",
    "gap_bound",
    "gap_table",
    "generate_case",
    "load",
    "loads",
    "simulate",
    "verify",
]

__version__ = "0.1.0"
