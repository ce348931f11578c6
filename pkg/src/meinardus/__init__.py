"""Exact enumeration and saddle-point asymptotics for multiplicative
combinatorial models f(z) = prod_k (S(a_k z^k))^{b_k}."""

from .asymptotics import (
    ENUMERATION_CAP,
    EnumerationReport,
    GenFnEvaluation,
    estimate_cn,
    evaluate_gen_fn,
    hardy_error_bound,
    hardy_expansion,
    log_gen_fn_direct,
    log_gen_fn_factors,
    log_gen_fn_residue,
)
from .dirichlet import (
    AsymptoticProfile,
    DirichletValue,
    bernoulli,
    delta_remainder,
    eval_D_direct,
    euler_maclaurin_Db,
    profile_distinct,
    profile_partitions,
    profile_prime_powers,
    profile_q4_indicator,
    zeta_euler_maclaurin,
    zeta_functional_equation,
    zeta_prime_zero,
    zeta_real,
)
from .errors import (
    DomainError,
    InputError,
    MeinardusError,
    MissingDeltaCoeffs,
    MissingProfile,
    NoPositiveMass,
    NonUnitConstantTerm,
    NotConvergent,
    NumericError,
    OutOfRange,
    ParseError,
    PoleAtOne,
    PrecisionExhausted,
    QuadratureNotConverged,
    SeriesDivergence,
    TruncationTooShallow,
    UnknownModel,
    Unstabilized,
    UnsupportedForm,
    ValidationError,
)
from .models import (
    BUILTIN_NAMES,
    InnerSeriesSpec,
    SequenceSpec,
    SingularityDescriptor,
    WeightedModel,
    builtin,
    load_model,
    model_from_dict,
    model_to_dict,
    save_model,
    von_mangoldt,
)
from .nllt import (
    CharFnSample,
    NlltReport,
    QMassFit,
    QuadratureReport,
    char_fn,
    check_nllt,
    classify_case,
    gcd_support,
    integral_check,
    nllt_ratio,
    prob_exact,
    u_term,
    weight_mass,
)
from .precision import DEFAULT_CONTEXT, PrecisionContext, working_precision
from .saddle import (
    SaddleSolution,
    TiltedMoments,
    asymptotic_delta,
    khintchine_lhs,
    moments_by_factors,
    solve_khintchine,
    tilted_moments,
)
from .series import (
    LambdaSequence,
    LogCoefficients,
    PowerSeriesReal,
    direct_factor_oracle,
    enumerate_exact,
    exp_series,
    lambda_from_model,
    log_series,
)

__version__ = "0.1.0"
