"""Online multi-level aggregation with deadlines: memory-based policies,
heavy path decompositions, an exact offline oracle and a verification harness."""

from .model import (
    Instance,
    InstanceFormatError,
    Request,
    RootedTree,
    Solution,
    parse_instance,
    reduce_edge_weighted,
    serialize_instance,
    validate_solution,
)
from .hpd import heavy_path_tree, min_caterpillar_decomposition, prefix_cost, size_heavy_decomposition
from .engine import simulate
from .depth import DepthPolicy
from .caterpillar import CaterpillarPolicy

__version__ = "0.1.0"
