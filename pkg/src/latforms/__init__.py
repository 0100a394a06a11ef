"""Exact-arithmetic toolkit for sequences of integer linear forms.

Sequences of forms L_n with diagonal divisor lattices are modelled exactly;
their decay/growth exponents are estimated as certified enclosures; the
hypotheses and finite-scale conclusions of Nesterenko-style and Siegel-style
linear-independence criteria are checked; and the existence statements behind
the optimality direction are realized constructively by directed lattice-point
searches with exact certificates.
"""

from .numerics import (
    BallReal,
    RealConstant,
    TriBool,
    UncertifiedComparison,
    parse_real,
    tri_compare,
)
from .model import (
    Basis,
    Bound,
    ConvexBody,
    DiagonalLattice,
    DualPoint,
    FormRecord,
    FormSequence,
    MissingRecord,
    ValidationError,
    divisor_chain_check,
    dual_membership,
    eval_at_basis,
    lattice_membership,
)
from .exponents import (
    ExponentProfile,
    estimate_gamma_growth,
    estimate_tau,
    fit_alpha_beta,
    dimension_bound,
    irrationality_bound,
    profile,
)
from .criteria import (
    BudgetExceeded,
    NesterenkoReport,
    RecordsExhausted,
    SiegelReport,
    Verdict,
    check_nesterenko,
    check_siegel,
    fit_recurrence,
    verify_conclusion,
)
from .minkowski import (
    ConditionReport,
    Refusal,
    SearchFailed,
    SearchOutcome,
    check_condition,
    construct_dual_witness,
    construct_primal_form,
    enumerate_lattice_points,
    reciprocal_construct,
    surrogate_gamma,
)
from .corpus import (
    GeneratorSpec,
    InfeasibleSpec,
    default_basis,
    export_jsonl,
    gen_apery_zeta2,
    gen_apery_zeta3,
    gen_fibonacci,
    gen_synthetic,
    generate,
    import_jsonl,
)

__version__ = "0.1.0"
