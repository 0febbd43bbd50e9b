"""Central spin-1/2 coupled to a layered spin bath (Heisenberg XX).

Closed-form layer-factorized dynamics, an exact sector solver, a
full-Hilbert-space oracle, bath correlation functions, infinite-bath limits
and second-order NZ/TCL master equations.
"""

from .bath import (BathSpec, JointDistribution, JointWeight, LayerSpec, SectorEntry,
                   degeneracy, enumerate_layer, h_value, joint_distribution, rescaled,
                   zeta_marginal)
from .dynamics import (BlochVector, DecoherenceCurve, bloch_of_state, entropy, evolve,
                       exact_curve, f_perp, f_z, reduced_state)
from .errors import AccuracyError, DomainError, ResourceError, SpinStarError, UnsupportedError

__all__ = [
    "AccuracyError", "BathSpec", "BlochVector", "DecoherenceCurve", "DomainError",
    "JointDistribution", "JointWeight", "LayerSpec", "ResourceError", "SectorEntry",
    "SpinStarError", "UnsupportedError", "bloch_of_state", "degeneracy", "entropy",
    "enumerate_layer", "evolve", "exact_curve", "f_perp", "f_z", "h_value",
    "joint_distribution", "reduced_state", "rescaled", "zeta_marginal",
]
