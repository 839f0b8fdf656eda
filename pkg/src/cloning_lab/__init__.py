"""Optimal cloning of coherent states on a truncated Fock space."""

from .cloner_models import (
    ClonerAncilla,
    TradeoffPoint,
    classical_fidelity,
    endpoint_slope_probe,
    fidelity_pair,
    gaussian_tradeoff,
    optimal_ancilla,
    tradeoff_sweep,
    vacuum_ancilla,
)
from .estimators import DominantEigensolver, GaussianClonerTradeoff, OptimalClonerTradeoff
from .fock_core import FockOperator, FockSpace, FockVector
from .gauss_ops import WeightPair, bmode_observables, joint_fidelity_operator, weighted_single_clone_operator
from .optical_sim import CircuitSpec, run_cloner
from .spectral import EigenResult, dense_spectrum, power_iteration, restricted_dominant

__version__ = "0.1.0"
