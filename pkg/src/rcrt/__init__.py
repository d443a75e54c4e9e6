"""Moduli design and verification for robust Chinese remainder reconstruction."""

from .codec import AUTO, DecodeResult, ResidueVector, add_noise, decode_full, decode_layered, fold, is_robust
from .designio import dumps as dump_design
from .designio import loads as load_design
from .estimator import FlatRCRT, LayeredRCRT
from .exceptions import (
    ConfigurationError,
    ConsistencyError,
    DomainError,
    InfeasibleDesignError,
    NotCoprimeError,
    RCRTError,
)
from .flat import DesignRequest, ModuliSet, brute_force_flat, compare_baselines, design_flat, design_flat_heuristic
from .layered import LayeredDesign, design_layered, kstar, layered_from_pair
from .numtheory import fib_like, remainder_chain
from .stats import NoiseModel, SignalPrior, interval_mass, monte_carlo, noise_pass_prob, rrse, success_lower_bound

__version__ = "0.1.0"
