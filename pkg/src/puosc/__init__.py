"""puosc: classical structure of the fourth-order two-frequency oscillator.

The library covers the model's phase-space charts and Hamiltonians (core),
its linear Lie symmetries and bi-Hamiltonian structure (symmetry), the
complete classification of two-dimensional first-order representations
(embedding), and trajectory integration with ghost-runaway detection
(dynamics).  A CLI (puosc) exposes reproducible experiments.
"""

from .config import EPS_ALGEBRA, EPS_SINGULAR
from .core import (
    JET,
    OSTRO,
    JetState,
    OstroState,
    PoissonTensor,
    PUParams,
    QuadraticObservable,
    VectorField,
    blend_h,
    blend_j,
    blend_j_closed_form,
    blend_j_tabulated,
    blend_report,
    flow_matrix,
    free_vector_field,
    h1,
    h2,
    interacting_vector_field,
    j1,
    j2,
    jet_to_ostro,
    make_params,
    ostro_to_jet,
    poisson_bracket,
    transport_observable,
    transport_tensor,
)
from .dynamics import (
    ModeAmplitudes,
    Potential,
    RunawayVerdict,
    ThresholdReport,
    Trajectory,
    closed_form_states,
    integrate,
    mode_decompose,
    mode_energy,
    mode_reconstruct,
    quartic,
    runaway_scan,
    threshold_search,
)
from .embedding import (
    BlendCoefficients,
    DerivedConstants,
    TransformMap,
    TwoDimModel,
    definiteness_inequality,
    derived_constants,
    positivity,
    pullback_hamiltonian,
    pushforward_poisson,
    reconciliation_report,
    solve_family,
    sum_of_squares,
    tabulated_family,
    verify_map,
)
from .symmetry import (
    LinearSymmetry,
    SymmetryBasis,
    apply_symmetry,
    commutant_basis,
    invariant_tensor_space,
    known_generators,
    lie_derivative_residual,
    resolve_structure_signs,
    solve_bihamiltonian,
    symmetry_charges,
)

__version__ = "0.1.0"
