"""Single-photon-induced entanglement of two mechanical mirrors in coupled optomechanical cavities."""

from .analytic import (
    AnalyticState,
    MechPairState,
    Outcome,
    PostSelection,
    average_concurrence,
    beta_of,
    concurrence_closed,
    evolve_analytic,
    postselect_analytic,
    prob_closed,
    theta_of,
    to_full_ket,
)
from .entanglement import (
    DensityMatrix,
    concurrence_mixed,
    concurrence_pure,
    fidelity_pure,
    log_negativity,
    partial_trace,
    qubit_project,
)
from .fockcore import HilbertSpec, StateVector
from .model import ModelParams, RegimeReport, check_regime
from .oracle import ComparisonReport, Oracle, compare, rwa_scan

__version__ = "0.1.0"
