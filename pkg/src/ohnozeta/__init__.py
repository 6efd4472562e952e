"""Multiple zeta values, Ohno sums and the complex interpolation I_k(s)."""

__version__ = "0.1.0"

from .errors import (
    CapabilityError,
    ConfigError,
    ConvergenceError,
    DomainError,
    InvalidInputError,
    OhnoZetaError,
    OutsideDomainError,
)
from .index import (
    admissible_indices,
    compositions,
    depth,
    dual,
    format_index,
    from_runs,
    is_admissible,
    parse_index,
    to_runs,
    weight,
)
from .interp import (
    interp_eval,
    interp_mform,
    interp_truncated,
    lemma21_lhs,
    lemma21_rhs,
    pf_weight,
    pivot_partials,
)
from .precision import Evaluation, PrecisionContext
from .series import harmonic_residual, mzf, mzf_complex, zeta, zeta_truncated
from .verify import (
    RelationReport,
    check_harmonic,
    check_lemma21,
    check_lemma22_exact,
    check_mform,
    check_ohno_integer,
    check_ohno_interp,
    ohno_sum,
    run_suite,
)
