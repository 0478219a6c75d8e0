"""Global solver for semi-infinite polynomial programs.

Moment/sum-of-squares relaxations, Jacobian-augmented inner solves, an
exchange discretization loop, homogenization for noncompact index sets,
and a polynomial-matrix-inequality front end.
"""

from .poly import (Polynomial, PolynomialError, SemialgebraicSet,
                   VariableSpace, basis_size, monomial_exponents,
                   parse_polynomial, poly_to_string)
from .conic import (ClarabelBackend, ConicError, ConicProgram, ConicSolution,
                    PsdBlock, SolveOptions, default_backend, smat, svec)
from .moment import (OrderError, RelaxationProblem, RelaxationResult,
                     TruncatedMomentSequence, build_moment_sdp,
                     lasserre_minimize, localizing_matrix, moment_matrix,
                     riesz_apply, solve_relaxation)
from .extract import (AtomSet, RankProfile, check_flat_truncation,
                      extract_minimizers, numerical_rank, rank_profile)
from .jacobian import (AugmentationError, JacobianAugmentation, augment,
                       jacobian_matrix, jacobian_minimize, minor_equations)
from .homogenize import (homogenize_index_set, homogenize_poly,
                         homogenize_problem, lift_point,
                         positivity_transfer_check, sphere_equality)
from .exchange import (ExchangeOptions, ExchangeReport, IterationRecord,
                       SippProblem, exchange_loop)
from .pmi import PolynomialMatrix, char_poly, feasibility_grid, pmi_to_sipp
from .sdpa import export_sdpa, import_sdpa
from .probio import (ProblemFileError, RandomInstanceSpec,
                     generate_random_instance, parse_pmi, parse_problem,
                     render_problem, report_to_dict, run_pipeline)
from . import corpus

__version__ = "0.1.0"

__all__ = [
    "Polynomial", "PolynomialError", "SemialgebraicSet", "VariableSpace",
    "basis_size", "monomial_exponents", "parse_polynomial", "poly_to_string",
    "ClarabelBackend", "ConicError", "ConicProgram", "ConicSolution",
    "PsdBlock", "SolveOptions", "default_backend", "smat", "svec",
    "OrderError", "RelaxationProblem", "RelaxationResult",
    "TruncatedMomentSequence", "build_moment_sdp", "lasserre_minimize",
    "localizing_matrix", "moment_matrix", "riesz_apply", "solve_relaxation",
    "AtomSet", "RankProfile", "check_flat_truncation", "extract_minimizers",
    "numerical_rank", "rank_profile",
    "AugmentationError", "JacobianAugmentation", "augment",
    "jacobian_matrix", "jacobian_minimize", "minor_equations",
    "homogenize_index_set", "homogenize_poly", "homogenize_problem",
    "lift_point", "positivity_transfer_check", "sphere_equality",
    "ExchangeOptions", "ExchangeReport", "IterationRecord", "SippProblem",
    "exchange_loop",
    "PolynomialMatrix", "char_poly", "feasibility_grid", "pmi_to_sipp",
    "export_sdpa", "import_sdpa",
    "ProblemFileError", "RandomInstanceSpec", "generate_random_instance",
    "parse_pmi", "parse_problem", "render_problem", "report_to_dict",
    "run_pipeline", "corpus",
]
