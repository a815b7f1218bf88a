"""Planar-function constructions and cross-validated planarity testing on
finite field extension towers."""

from .config import Config, load_config
from .field import (
    AdditiveChar,
    FieldCtx,
    MultiplicativeChar,
    additive_chars,
    ctx_from_json,
    multiplicative_chars,
    new_ctx,
)
from .linpoly import (
    LinearizedPoly,
    Subspace,
    all_subspaces,
    annihilator_coeffs,
    annihilator_poly,
    image_poly_for_subspace,
)
from .planarity import (
    PlanarCandidate,
    VerificationReport,
    criterion_quadratic,
    eval_general,
    is_planar_bruteforce,
    is_planar_bruteforce_general,
    is_planar_rank,
    is_planar_reduction,
)
from .families import (
    CubicCoeffs,
    MonomialFamilyParams,
    NbcFamilyParams,
    cubic_lemma_bruteforce,
    cubic_lemma_predicate,
    cubic_theorem_predicate,
    example1_construct,
    nonexistence_witness,
    theorem_monomial_predicate,
    theorem_nbc_predicate,
)
from .charsum import (
    CountRecord,
    MonicPoly,
    a_sum,
    a_sum_by_minimal_polys,
    count_solutions,
    phi,
    weil_bound_check,
    weil_eta_sum,
)
from .search import SearchJob, dedup_by_scaling, run
from .selftest import run_selftest

__version__ = "0.1.0"

__all__ = [
    "AdditiveChar", "Config", "CountRecord", "CubicCoeffs", "FieldCtx",
    "LinearizedPoly", "MonicPoly", "MonomialFamilyParams",
    "MultiplicativeChar", "NbcFamilyParams", "PlanarCandidate", "SearchJob",
    "Subspace", "VerificationReport", "a_sum", "a_sum_by_minimal_polys",
    "additive_chars", "all_subspaces", "annihilator_coeffs",
    "annihilator_poly", "count_solutions", "criterion_quadratic",
    "ctx_from_json", "cubic_lemma_bruteforce", "cubic_lemma_predicate",
    "cubic_theorem_predicate", "dedup_by_scaling", "eval_general",
    "example1_construct", "image_poly_for_subspace", "is_planar_bruteforce",
    "is_planar_bruteforce_general", "is_planar_rank", "is_planar_reduction",
    "load_config", "multiplicative_chars", "new_ctx", "nonexistence_witness",
    "phi", "run", "run_selftest", "theorem_monomial_predicate",
    "theorem_nbc_predicate", "weil_bound_check", "weil_eta_sum",
]
