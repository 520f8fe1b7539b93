"""Lattice convex chains: exact counts, the Boltzmann model and zeta-zero asymptotics."""
from .asympt import estimate_p, estimate_polyomino, i_crit_two_term, i_crit_zero_sum, rh_gap
from .enumeration import (
    CountTable,
    PolyominoCounts,
    ResourceBudgetError,
    brute_force_count,
    brute_force_polyomino,
    chain_count,
    count_table,
    polyomino_counts,
)
from .lattice import (
    ChainConfiguration,
    ConvexChain,
    InvalidChainError,
    PrimitiveVector,
    chain_to_config,
    config_to_chain,
    line_weights,
    primitive_vectors_in_box,
)
from .partition import I_err, calibrate, cumulant, dirichlet_check, log_Z, mean_total
from .sampler import endpoint_stats, limit_shape_deviation, sample_conditioned, sample_config
from .zetalib import constants, find_zeta_zeros, gamma_complex, zeta_complex, zeta_derivative

__version__ = "0.1.0"
