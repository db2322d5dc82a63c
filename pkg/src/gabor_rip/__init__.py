"""Gabor synthesis matrices for compressive sensing.

Fast forward/adjoint application of the full Gabor system of a window,
coherence and restricted isometry estimates, the chaos matrices B(x),
sparse recovery solvers, and a channel-identification harness.
"""
from .analysis import (
    ChaosMatrix,
    RipEstimate,
    chaos_matrix,
    chaos_rip_link,
    coherence_rip_bound,
    exact_rip_constant,
    metric_d1_d2,
    monte_carlo_rip,
    star_norm,
    submatrix_extremal_eigs,
    verify_identities,
    welch_bound,
)
from .channel import ChannelExperiment, apply_channel, run_experiment
from .errors import (
    DimensionError,
    DivergenceError,
    GaborError,
    IllConditionedSupportError,
    InvalidParameterError,
    InvalidSupportError,
    ResourceError,
)
from .kernels import BACKEND
from .operator import GaborOperator, SparseVector, a_q_apply
from .recovery import (
    THRESHOLDS,
    AlgorithmThresholds,
    RecoveryResult,
    basis_pursuit,
    best_s_term_error,
    cosamp,
    htp,
    iht,
    least_squares_on_support,
    omp,
)
from .tf_core import TFIndex, Window, WindowKind, make_window, modulate, tf_shift, translate

__version__ = "0.1.0"
