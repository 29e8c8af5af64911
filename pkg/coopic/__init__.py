from .gauss_achieve import gauss_achievable_sum_rate, gauss_rate_choice_regime1
from .gauss_capacity import GapReport, GaussBounds, gap_report, gauss_u_terms, gauss_upper_bound
from .gauss_model import GaussParams, LinearGaussianModel, NLevels, gaussian_cmi, n_levels, normalize_channel
from .ld_achieve import instantiate_ld_constraints, ld_achievable_sum_rate, ld_rate_choice_regime1, verify_grid
from .ld_capacity import (
    LdBounds,
    Regime,
    classify_regime,
    ld_sum_capacity,
    ld_u_terms,
    ld_upperbound_appendix_forms,
    select_n_prime_C,
)
from .ld_model import DEFAULT_PRIME, FieldElement, LdParams, LdVector, ld_channel_step, shift_apply
from .ld_schemes import SimTrace, run_example, run_example1, run_example2, run_example3
from .rate_region import (
    ConstraintSystem,
    fourier_motzkin_eliminate,
    max_sum_rate,
    max_sum_rate_bruteforce,
    symmetric_closure,
)
from .special_cases import (
    DestCoopBounds,
    SymmetricParams,
    dest_coop_bounds,
    feedback_bound,
    feedback_gap,
    feedback_to_coop,
    fig2_curve,
    fig2_limit,
    ld_feedback_capacity,
    reversibility_check,
    symmetric_achievable,
    symmetric_C,
    symmetric_upper_bounds,
)
