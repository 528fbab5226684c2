"""Stability analysis of discrete-time multilinear dynamical systems ``x_{t+1} = A x_t^(k-1)``."""

from .dynamics import (
    Status,
    Trajectory,
    explicit_solution,
    modal_coordinates,
    simulate,
    solution_exponents,
)
from .errors import *  # noqa: F401,F403
from .reachability import ControlledSystem, grow_subspace, reachability_test
from .spectral import (
    BoundReport,
    OdecoDecomposition,
    ZEigenpair,
    bound_report,
    certify_zeigenpair,
    odeco_decompose,
    positive_tensor_bound,
    unfolding_bound,
    zscan_2d,
    zspectral_radius_estimate,
)
from .stability import (
    AnalysisConfig,
    Label,
    Method,
    analyze,
    classify,
    contains,
    exact_region,
)
from .tensor import (
    SymTensor,
    apply_system,
    certify_symmetric,
    frobenius_norm,
    inner_product,
    matricize,
    mode_product,
    mode_singular_values,
    odeco_tensor,
    unfold_even,
)

__version__ = "0.1.0"
