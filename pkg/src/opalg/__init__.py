"""Finite-dimensional operator-algebra numerics: states, GNS, Weyl operators, cloners, Dixmier means."""

from .algebra import (
    Functional,
    StarAlgebra,
    State,
    World,
    born_matrix,
    four_state_decomposition,
    full_matrix_algebra,
    is_pure,
    is_state,
    vector_state,
)
from .cloner import Channel, decomposed_fidelity_scan, fidelity
from .dixmier import EigenSequence, generalized_limit, log_mean_series, singularity_witness
from .errors import OpalgError, ToleranceError
from .fock import FockMode, weyl
from .gns import gns_construct, intertwiner, kernel_central_projection, lambda_E

__all__ = [
    "Channel", "EigenSequence", "FockMode", "Functional", "OpalgError", "StarAlgebra", "State",
    "ToleranceError", "World", "born_matrix", "decomposed_fidelity_scan", "fidelity",
    "four_state_decomposition", "full_matrix_algebra", "generalized_limit", "gns_construct",
    "intertwiner", "is_pure", "is_state", "kernel_central_projection", "lambda_E",
    "log_mean_series", "singularity_witness", "vector_state", "weyl",
]
