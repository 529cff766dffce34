"""Desk-scale search for interesting Floquet circuits.

A dense statevector simulator drives two parametrized circuit families; an
unsupervised classifiability score (shadow kernel PCA + Ward clustering) and
potential-based spectral statistics act as interest functions; a Nelder-Mead
loop with restarts climbs them.  Campaign runners reproduce the optimization
runs, phase-diagram scans, form-factor landscapes, and subsystem form-factor
demonstrations end to end from a single seed.
"""
from .statevector import State, Gate1Q, Gate2Q, basis_state, overlap, apply_1q, apply_2q
from .circuits import (
    BrickworkParams,
    Circuit,
    DtcParams,
    apply_circuit,
    brickwork_unitary,
    brickwork_unitary_fused,
    circuit_matrix,
    dtc_unitary,
    haar_1q,
    haar_unitary,
)
from .shadows import (
    MeasurementFrame,
    ShadowSet,
    bloch_estimates,
    default_frame,
    frame_from_rotation,
    lab_frame,
    sample_snapshot,
    shadow_set,
)
from .kernel_pca import (
    GramMatrix,
    KernelHyper,
    PcCoordinates,
    center_gram,
    gram_matrix,
    kernel_entry,
    leading_components,
    site_kernel,
)
from .clustering import MergeTree, classifiability, hac_ward
from .nelder_mead import NmConfig, OptTrajectory, maximize
from .spectral import (
    DwFit,
    EnsembleSeries,
    Subsystem,
    TraceSeries,
    cue_reference,
    eigenphases,
    ensemble_sff,
    fit_dw_tension,
    hadamard_test_sampled,
    noninteracting_reference,
    psff_exact,
    psff_sampled,
    trace_series,
)
from .interest import (
    DtcInterestConfig,
    InterestEstimate,
    PotentialSpec,
    dtc_interest,
    mexican_hat_target,
    spectral_interest,
)
from .config import parse_config, resolve_config
from .campaigns import run_campaign

__version__ = "0.1.0"
