"""Numerical toolkit for self-testing prepare-and-measure quantum scenarios.

Analytic compatibility bounds, exact classical bounds, seesaw optimization,
robust fidelity lower bounds, and swap-operator SDP bounds for
dimension-bounded prepare-and-measure witnesses such as random access codes.
"""

__version__ = "0.1.0"

from .errors import BudgetError, DimensionError, InfeasibleError, NonConvergenceError
from .quantum import (
    Channel,
    Observable,
    Povm,
    State,
    bloch_to_state,
    dephasing_channel,
    fidelity_to_pure,
    observable_from_povm,
    povm_from_observable,
    pure_state,
    state_to_bloch,
)
from .scenario import (
    Strategy,
    Witness,
    classical_bound,
    ideal_example2_strategy,
    ideal_rac2_strategy,
    make_biased_rac_witness,
    make_example2_witness,
    make_rac_witness,
    witness_value,
)
from .bounds import (
    biased_bound,
    biased_max,
    biased_optimal_overlap,
    jordan_parameters,
    meas_compat_bound_2,
    meas_compat_bound_N,
    prep_compat_bound_2,
    prep_compat_bound_N,
    qutrit_bound,
    qutrit_max,
)
from .fidelity import (
    FidelityReport,
    OperatorIneqCoeffs,
    Q2,
    S_STAR,
    avg_fidelity_measurements,
    avg_fidelity_states,
    conjectured_curve_meas,
    conjectured_curve_states,
    linear_lower_bound,
    meas_ineq_coeffs,
    prep_ineq_coeffs,
    sweep_operator_inequalities,
    verify_operator_inequality,
)
from .seesaw import (
    SeesawResult,
    optimal_measurements_for_states,
    optimal_states_for_measurements,
    region_sweep,
    seesaw,
)
from .sdp import (
    MomentMatrix,
    SwapSdp,
    affine_span,
    lambda_max_sdp,
    sample_moment_matrix,
    sdp_solve,
    swap_T_operators,
    swap_fidelity_bound,
    swap_operator,
)
