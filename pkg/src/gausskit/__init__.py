"""Gaussian quantum state preparation: circuit synthesis, simulation, and
Clifford+T resource estimation for exponential-window block-encodings."""

from .circuit import Circuit, Layer, LayeredCircuit, MeasureBarrier, validate
from .builders import (
    build_exponential,
    build_full_gaussian,
    build_gaussian_2d,
    build_half_gaussian,
    build_layered_gaussian,
    build_linear_phase,
    build_poly_phase,
    layered_full_gaussian,
)
from .expansion import MonomialExpansion, monomial_coefficients
from .gates import (
    Control,
    Gate,
    GateKind,
    GaussianSpec,
    ParameterError,
    beta_for_stddevs,
    stddevs_for_beta,
)
from .optimizer import (
    ErrorBudget,
    OrderingPlan,
    alpha_matching_gate_error,
    expected_t_depth,
    order_layers,
    pack_layers,
    prunable_control_depth,
    prune_circuit,
    prune_layered,
    qubit_threshold,
)
from .resources import (
    CostModel,
    EstimateReport,
    estimate,
    gate_t_cost,
    layered_t_depth,
    spec_from_threshold,
)
from .simulator import (
    CapacityError,
    RusStats,
    SimReport,
    StateVector,
    apply_noisy_rotation,
    ideal_exponential,
    ideal_gaussian,
    ideal_gaussian_2d,
    ideal_half_gaussian,
    ideal_phase_state,
    ideal_state,
    l2_error,
    monte_carlo_rus,
    run_noisy,
    simulate_exact,
    simulate_postselected,
)
from . import textio

__version__ = "0.1.0"
