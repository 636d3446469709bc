"""One aggregation tree that simultaneously approximates the optimum for
every concave, nondecreasing edge-cost function.

The pipeline: solve a rent-or-buy instance per cost threshold, monotonize
and geometrically prune the results into nested layers, then stitch the
layer cores together with light approximate shortest-path trees. An exact
enumeration oracle verifies desk-scale approximation ratios.
"""

from .builder import SimultaneousTree, build_tree, check_layer_bounds
from .errors import (
    ConfigError,
    DisconnectedError,
    InstanceError,
    InvalidTreeError,
    InvariantError,
    OneTreeError,
    OracleLimitError,
    ParseError,
)
from .evaluate import (
    ConcaveFunction,
    Parameters,
    RatioReport,
    best_tree_for_function,
    decompose_function,
    eval_cost,
    optimal_parameters,
    refine_parameters,
    search_parameters,
    simultaneous_ratio,
)
from .graph import (
    SUPERNODE,
    ContractedGraph,
    Edge,
    Instance,
    contract,
    load_instance,
    make_instance,
    minimum_spanning_tree,
    shortest_path_tree,
)
from .last import LastTree, build_last, verify_last
from .layers import LayerSet, compute_K, compute_layers, monotonize, prune, verify_layerset
from .routing import (
    RentBuyDecomposition,
    RoutedTree,
    basis_cost,
    basis_threshold,
    decompose,
    route,
)
from .ssrob import (
    ExactSolver,
    SampleAugmentSolver,
    count_spanning_trees,
    exact_ssrob,
    get_solver,
    sample_and_augment,
)

__version__ = "0.1.0"

__all__ = [
    "SUPERNODE",
    "ConcaveFunction",
    "ConfigError",
    "ContractedGraph",
    "DisconnectedError",
    "Edge",
    "ExactSolver",
    "Instance",
    "InstanceError",
    "InvalidTreeError",
    "InvariantError",
    "LastTree",
    "LayerSet",
    "OneTreeError",
    "OracleLimitError",
    "Parameters",
    "ParseError",
    "RatioReport",
    "RentBuyDecomposition",
    "RoutedTree",
    "SampleAugmentSolver",
    "SimultaneousTree",
    "basis_cost",
    "basis_threshold",
    "best_tree_for_function",
    "build_last",
    "build_tree",
    "check_layer_bounds",
    "compute_K",
    "compute_layers",
    "contract",
    "count_spanning_trees",
    "decompose",
    "decompose_function",
    "eval_cost",
    "exact_ssrob",
    "get_solver",
    "load_instance",
    "make_instance",
    "minimum_spanning_tree",
    "monotonize",
    "optimal_parameters",
    "prune",
    "refine_parameters",
    "route",
    "sample_and_augment",
    "search_parameters",
    "shortest_path_tree",
    "simultaneous_ratio",
    "verify_last",
    "verify_layerset",
]
