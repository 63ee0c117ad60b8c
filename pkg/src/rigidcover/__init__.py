"""Convex rigid covers for pure states of continuous variables on quadrature grids."""

from .cover import (
    ConvexRigidCover,
    CrcPair,
    Side,
    build_crc_pair,
    conditional_state,
    cover_centroid,
    distance_matrix,
    hs_distance,
    marginal_weight,
)
from .grid import ModeGrid, make_uniform_grid, weighted_inner_product_1d
from .invariants import AreaPair, area_pair, cover_area
from .motion import (
    LocalUnitary,
    apply_lu,
    crc_identical,
    make_phase_unitary,
    make_random_unitary,
    motion_equivalent,
)
from .partition import Bipartition, enumerate_bipartitions, matricize, parse_bipartition
from .separability import (
    SeparabilityVerdict,
    factor_state,
    is_fully_separable,
    is_partially_separable,
    schmidt_oracle,
    shrink_to_point,
)
from .state import GaussianSpec, PureState, build_from_tensor, build_gaussian, overlap

__version__ = "0.1.0"
