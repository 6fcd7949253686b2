"""Exact wall-and-chamber computations for Bridgeland stability on K3 and abelian surfaces."""

from .central_charge import StabilityPoint, central_charge, phase_cmp, sigma_bracket
from .fm_action import MukaiIsometry, fm_build, param_transform
from .mukai_core import (
    BetaFrame,
    LatticeError,
    MukaiVector,
    NSClass,
    SignatureError,
    SurfaceData,
    beta_decompose,
    frame_constants,
    mukai_pairing,
)
from .star_conditions import check_star1, check_star2, check_star3, gieseker_report
from .wall_engine import (
    FixedBetaInterval,
    category_walls_in_box,
    enumerate_R_beta,
    locate_chamber,
    make_box,
    stability_wall_candidates,
)
from .wallcross import LaurentPolyQ, SymbolicOracle, TableOracle, crossing_solve, decompositions_on_wall, wall_value

__all__ = [
    "BetaFrame", "FixedBetaInterval", "LaurentPolyQ", "LatticeError", "MukaiIsometry", "MukaiVector", "NSClass",
    "SignatureError", "StabilityPoint", "SurfaceData", "SymbolicOracle", "TableOracle", "beta_decompose",
    "category_walls_in_box", "central_charge", "check_star1", "check_star2", "check_star3", "crossing_solve",
    "decompositions_on_wall", "enumerate_R_beta", "fm_build", "frame_constants", "gieseker_report",
    "locate_chamber", "make_box", "mukai_pairing", "param_transform", "phase_cmp", "sigma_bracket",
    "stability_wall_candidates", "wall_value",
]
