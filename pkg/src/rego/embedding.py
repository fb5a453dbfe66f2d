"""The reduced problem ``min f(Ay + p)`` over ``y in [-delta, delta]^d``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch
from .feasibility import box_feasible
from .problems import GeneratedProblem
from .rand_linalg import min_two_norm_solution, sample_gaussian

EPSILON = 1e-3
BOX_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class EmbeddingSpec:
    A: np.ndarray
    delta: float
    p: Optional[np.ndarray] = None

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        object.__setattr__(self, "A", A)
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.p is not None:
            p = np.asarray(self.p, dtype=float).reshape(-1)
            if p.shape[0] != A.shape[0]:
                raise DimensionMismatch("affine point must have length D")
            object.__setattr__(self, "p", p)

    @property
    def d(self) -> int:
        return self.A.shape[1]

    @property
    def D(self) -> int:
        return self.A.shape[0]

    @property
    def lower(self) -> np.ndarray:
        return -self.delta * np.ones(self.d)

    @property
    def upper(self) -> np.ndarray:
        return self.delta * np.ones(self.d)

    @classmethod
    def gaussian(cls, D: int, d: int, delta: float, rng, p=None) -> "EmbeddingSpec":
        return cls(A=sample_gaussian(D, d, rng), delta=delta, p=p)

    def to_full(self, y) -> np.ndarray:
        x = self.A @ np.asarray(y, dtype=float)
        return x if self.p is None else x + self.p


class ReducedObjective:
    """Callable ``y -> f(Ay + p)`` that counts its evaluations."""

    def __init__(self, problem: GeneratedProblem, spec: EmbeddingSpec):
        self.problem = problem
        self.spec = spec
        self.eval_count = 0

    @property
    def dim(self) -> int:
        return self.spec.d

    def __call__(self, y) -> float:
        self.eval_count += 1
        return self.problem(self.spec.to_full(y))


def make_reduced(problem: GeneratedProblem, spec: EmbeddingSpec) -> ReducedObjective:
    if spec.D != problem.D:
        raise DimensionMismatch(f"embedding has {spec.D} rows but the problem lives in R^{problem.D}")
    return ReducedObjective(problem, spec)


def is_successful(problem: GeneratedProblem, spec: EmbeddingSpec, y_found, value_found: float,
                  epsilon: float = EPSILON) -> bool:
    """Reduced solve recovered the global minimum: within ``epsilon`` of ``f*`` and inside the box."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    y = np.asarray(y_found, dtype=float)
    inside = bool(np.max(np.abs(y), initial=0.0) <= spec.delta + BOX_TOL)
    return inside and value_found <= problem.f_star + epsilon


def effective_matrix(problem: GeneratedProblem, spec: EmbeddingSpec) -> np.ndarray:
    """``B = U^T A``, the embedding seen from the effective subspace (``de x d``)."""
    return problem.Q[: problem.de] @ spec.A


def _target_coordinates(problem, spec, z):
    # affine embeddings aim at x_top* - p_top, i.e. z* - U^T p in effective coordinates
    if spec.p is None:
        return np.asarray(z, dtype=float)
    return np.asarray(z, dtype=float) - problem.Q[: problem.de] @ spec.p


def reduced_min_two_norm(problem: GeneratedProblem, spec: EmbeddingSpec) -> np.ndarray:
    """Least Euclidean norm ``y`` with ``A y + p`` on the chosen minimizer component."""
    if spec.D != problem.D:
        raise DimensionMismatch("embedding and problem dimensions differ")
    if problem.z_star is None:
        raise ValueError(f"{problem.name}: no known minimizer")
    target = _target_coordinates(problem, spec, problem.z_star)
    if not np.any(target):
        return np.zeros(spec.d)
    return min_two_norm_solution(effective_matrix(problem, spec), target)


def geometric_success(problem: GeneratedProblem, spec: EmbeddingSpec) -> bool:
    """Solver-independent verdict: some known minimizer component meets ``A Y + p``."""
    B = effective_matrix(problem, spec)
    for z in problem.minimizers_effective:
        if box_feasible(B, _target_coordinates(problem, spec, z), spec.delta):
            return True
    return False
