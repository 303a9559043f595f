"""Exact piecewise-affine decomposition of fully connected ReLU networks.

The decomposition is exact: on every polyhedral region the returned affine
map reproduces the network output to floating-point accuracy, and the
regions partition the requested box domain.

Typical use::

    from relu_dissect import HPolyhedron, convert, eval_pwa, load_network

    net = load_network("net.json")
    pwa = convert(net, HPolyhedron.box(net.input_dim, 10.0))
    y = eval_pwa(pwa, x)
"""

from .arrangement import zaslavsky_bound
from .errors import (
    DimensionMismatch,
    DomainMismatch,
    EmptyDomain,
    EmptyRegion,
    OutsideDomain,
    ReluDissectError,
    SchemaError,
    UnboundedDomain,
    UnboundedRegion,
)
from .estimator import PwaDecomposer
from .geometry import (
    GEO_TOL,
    Halfspace,
    HPolyhedron,
    bounding_box,
    chebyshev_center,
    contains,
    is_empty,
    remove_redundant,
)
from .network import (
    DenseLayer,
    Network,
    ReLULayer,
    load_network,
    network_from_dict,
    network_to_dict,
    random_network,
    save_network,
)
from .pwa import (
    LinearRegion,
    PwaFunction,
    convert,
    eval_many,
    eval_pwa,
    load_pwa,
    pwa_from_dict,
    pwa_to_dict,
    region_of,
    save_pwa,
)
from .verify import (
    check_continuity,
    check_equivalence,
    check_partition,
    count_report,
)

__version__ = "0.1.0"

__all__ = [
    "DenseLayer",
    "DimensionMismatch",
    "DomainMismatch",
    "EmptyDomain",
    "EmptyRegion",
    "GEO_TOL",
    "Halfspace",
    "HPolyhedron",
    "LinearRegion",
    "Network",
    "OutsideDomain",
    "PwaDecomposer",
    "PwaFunction",
    "ReLULayer",
    "ReluDissectError",
    "SchemaError",
    "UnboundedDomain",
    "UnboundedRegion",
    "bounding_box",
    "chebyshev_center",
    "check_continuity",
    "check_equivalence",
    "check_partition",
    "contains",
    "convert",
    "count_report",
    "eval_many",
    "eval_pwa",
    "is_empty",
    "load_network",
    "load_pwa",
    "network_from_dict",
    "network_to_dict",
    "pwa_from_dict",
    "pwa_to_dict",
    "random_network",
    "region_of",
    "remove_redundant",
    "save_network",
    "save_pwa",
    "zaslavsky_bound",
]
