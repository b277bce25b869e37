"""Pressure functions of products of non-negative matrices over subshifts of finite type."""

from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateSystemError,
    InputError,
    PreconditionError,
    PressureLabError,
    SizeGuardError,
    UnsupportedModeError,
)
from .gibbs import (
    GibbsTable,
    empirical_lyapunov,
    gibbs_ratio_diagnostics,
    level_weights,
    marginal_weights,
    quasi_bernoulli_diagnostics,
    sample_words,
    shift_invariance_defect,
)
from .matrices import (
    H2Witness,
    MatrixFamily,
    check_H2,
    distortion,
    gluing_constant,
    norm,
    word_product,
)
from .multifractal import (
    dimension_spectrum,
    legendre_upper_bound,
    pressure_derivative,
    tau_empirical,
    tau_formula,
)
from .pressure import (
    PartitionSum,
    PressureResult,
    detect_kink,
    partition_sum,
    pressure_curve,
    pressure_estimate,
    pressure_exact_integer,
    pressure_lower,
    pressure_upper,
)
from .sft import SubshiftSpec, bridges, enumerate_words, is_admissible, is_primitive

__version__ = "0.1.0"
