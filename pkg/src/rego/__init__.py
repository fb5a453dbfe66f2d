"""Random embeddings for global optimization of functions with low effective dimension."""

from .embedding import (EmbeddingSpec, ReducedObjective, geometric_success, is_successful,
                        make_reduced, reduced_min_two_norm)
from .errors import (DimensionMismatch, DomainError, NumericalFailure, RankDeficient, RegoError,
                     UndefinedExpectation, UnknownProblem)
from .feasibility import LpResult, box_feasible, min_inf_norm_solution
from .harness import (Pair, SuccessCurve, TrialRecord, compare, emit_results, estimate_L_star,
                      parse_pair, run_no_embedding, run_rego, run_success_table,
                      verify_distribution)
from .problems import CATALOGUE, GeneratedProblem, generate, get_problem, problem_names
from .rand_linalg import (RngStream, min_two_norm_solution, null_space_basis, sample_gaussian,
                          sample_orthogonal)
from .solvers import Budget, SolverResult, direct_minimize, multistart_local, random_search
from .theory import (TheoryParams, chi2_cdf, chi2_sf, exact_success_tail, expected_sq_norm_y2,
                     pdf_y2, radial_pdf, success_lower_bound_Rstar)

__version__ = "0.1.0"
