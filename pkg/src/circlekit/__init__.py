"""circlekit: a workbench for the Gauss circle problem.

Exact error terms P(x) (lattice points in a disk) and Delta(x) (divisor
summatory function), correlation sums sum r(n) r(n+h) with their exact
rational main terms, quadratic Gauss sums, Bessel/cosine series
representations of P, and Laplace transforms of P^2 and Delta^2 with
main-term constants and remainder-order scans.
"""

__version__ = "0.1.0"

from .arith import (
    ArithTables,
    build_tables,
    chi,
    g_closed,
    g_direct,
    g_identity_first_failure,
    r_single,
    v2,
)
from .correlate import (
    CorrelationRecord,
    corr_grid,
    corr_sum,
    e_term,
    pointwise_bound_report,
    weighted_bound_report,
)
from .errors import CapacityError, CircleKitError
from .laplace import (
    A1_EXPECTED,
    D_SQUARED,
    R_SQUARED,
    LaplaceEstimate,
    SeriesConstant,
    fit_a1,
    fit_log_quadratic,
    laplace_d2,
    laplace_main_d,
    laplace_main_p,
    laplace_p2,
    residual_scan_p,
    series_constant,
    series_limit,
    weight_f,
    weight_u,
    weight_u_bound_check,
)
from .lattice import (
    CIRCLE,
    DIVISOR,
    EULER_GAMMA,
    StepProfile,
    delta_of_x,
    mean_square_p,
    p_gauss_oracle,
    p_of_x,
    pointwise_report,
    q_of_x,
    step_profile,
)
from .special import (
    BESSEL_SWITCH,
    bessel_j,
    bessel_oracle,
    gauss_sum_sq,
    hardy_partial,
    truncated_p,
)

__all__ = [name for name in dir() if not name.startswith("_")]
