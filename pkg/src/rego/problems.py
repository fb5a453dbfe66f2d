"""Test problems with low effective dimensionality.

The 19 base functions below are the standard definitions (dimensions 2 to 6).
Each is lifted to ``R^D`` by padding with ``D - de`` dummy coordinates and
applying a random rotation ``Q``, giving ``f(x) = g(Qx)``; only the first
``de`` rows of ``Q`` matter for evaluation and they span the effective
subspace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Callable, Optional

import numpy as np

from .errors import DimensionMismatch, UnknownProblem
from .rand_linalg import as_stream, sample_orthogonal

# --------------------------------------------------------------------------
# base functions


def beale(x):
    x1, x2 = x
    return ((1.5 - x1 + x1 * x2) ** 2 + (2.25 - x1 + x1 * x2**2) ** 2
            + (2.625 - x1 + x1 * x2**3) ** 2)


def branin(x):
    x1, x2 = x
    b = 5.1 / (4 * math.pi**2)
    c = 5 / math.pi
    t = 1 / (8 * math.pi)
    return (x2 - b * x1**2 + c * x1 - 6) ** 2 + 10 * (1 - t) * math.cos(x1) + 10


def brent(x):
    x1, x2 = x
    return (x1 + 10) ** 2 + (x2 + 10) ** 2 + math.exp(-x1**2 - x2**2)


def bukin6(x):
    x1, x2 = x
    return 100 * math.sqrt(abs(x2 - 0.01 * x1**2)) + 0.01 * abs(x1 + 10)


def easom(x):
    x1, x2 = x
    return -math.cos(x1) * math.cos(x2) * math.exp(-((x1 - math.pi) ** 2 + (x2 - math.pi) ** 2))


def goldstein_price(x):
    x1, x2 = x
    a = 1 + (x1 + x2 + 1) ** 2 * (19 - 14 * x1 + 3 * x1**2 - 14 * x2 + 6 * x1 * x2 + 3 * x2**2)
    b = 30 + (2 * x1 - 3 * x2) ** 2 * (18 - 32 * x1 + 12 * x1**2 + 48 * x2 - 36 * x1 * x2 + 27 * x2**2)
    return a * b


_HART_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_HART3_A = np.array([[3.0, 10, 30], [0.1, 10, 35], [3.0, 10, 30], [0.1, 10, 35]])
_HART3_P = 1e-4 * np.array([[3689, 1170, 2673], [4699, 4387, 7470],
                            [1091, 8732, 5547], [381, 5743, 8828]])
_HART6_A = np.array([[10, 3, 17, 3.5, 1.7, 8], [0.05, 10, 17, 0.1, 8, 14],
                     [3, 3.5, 1.7, 10, 17, 8], [17, 8, 0.05, 10, 0.1, 14]])
_HART6_P = 1e-4 * np.array([[1312, 1696, 5569, 124, 8283, 5886],
                            [2329, 4135, 8307, 3736, 1004, 9991],
                            [2348, 1451, 3522, 2883, 3047, 6650],
                            [4047, 8828, 8732, 5743, 1091, 381]])


def hartmann3(x):
    x = np.asarray(x)
    return -float(_HART_ALPHA @ np.exp(-np.sum(_HART3_A * (x - _HART3_P) ** 2, axis=1)))


def hartmann6(x):
    x = np.asarray(x)
    return -float(_HART_ALPHA @ np.exp(-np.sum(_HART6_A * (x - _HART6_P) ** 2, axis=1)))


def levy(x):
    w = 1 + (np.asarray(x) - 1) / 4
    head = math.sin(math.pi * w[0]) ** 2
    mid = np.sum((w[:-1] - 1) ** 2 * (1 + 10 * np.sin(math.pi * w[:-1] + 1) ** 2))
    tail = (w[-1] - 1) ** 2 * (1 + math.sin(2 * math.pi * w[-1]) ** 2)
    return float(head + mid + tail)


_PERM_J = np.arange(1, 5, dtype=float)


def perm_4_05(x):
    x = np.asarray(x)
    total = 0.0
    for i in range(1, 5):
        inner = np.sum((_PERM_J**i + 0.5) * ((x / _PERM_J) ** i - 1))
        total += inner**2
    return float(total)


def rosenbrock(x):
    x = np.asarray(x)
    return float(np.sum(100 * (x[1:] - x[:-1] ** 2) ** 2 + (1 - x[:-1]) ** 2))


_SHEKEL_BETA = 0.1 * np.array([1, 2, 2, 4, 4, 6, 3, 7, 5, 5], dtype=float)
_SHEKEL_C = np.array([[4, 1, 8, 6, 3, 2, 5, 8, 6, 7],
                      [4, 1, 8, 6, 7, 9, 3, 1, 2, 3.6],
                      [4, 1, 8, 6, 3, 2, 5, 8, 6, 7],
                      [4, 1, 8, 6, 7, 9, 3, 1, 2, 3.6]])


def _shekel(x, m):
    x = np.asarray(x)
    sq = np.sum((x[:, None] - _SHEKEL_C[:, :m]) ** 2, axis=0)
    return -float(np.sum(1.0 / (sq + _SHEKEL_BETA[:m])))


def shekel5(x):
    return _shekel(x, 5)


def shekel7(x):
    return _shekel(x, 7)


def shekel10(x):
    return _shekel(x, 10)


def _shubert_1d(t):
    return sum(i * math.cos((i + 1) * t + i) for i in range(1, 6))


def shubert(x):
    return _shubert_1d(x[0]) * _shubert_1d(x[1])


def six_hump_camel(x):
    x1, x2 = x
    return (4 - 2.1 * x1**2 + x1**4 / 3) * x1**2 + x1 * x2 + (-4 + 4 * x2**2) * x2**2


def styblinski_tang(x):
    x = np.asarray(x)
    return float(0.5 * np.sum(x**4 - 16 * x**2 + 5 * x))


def trid(x):
    x = np.asarray(x)
    return float(np.sum((x - 1) ** 2) - np.sum(x[1:] * x[:-1]))


def zettl(x):
    x1, x2 = x
    return (x1**2 + x2**2 - 2 * x1) ** 2 + 0.25 * x1


# --------------------------------------------------------------------------
# data model


@dataclass(frozen=True, eq=False)
class BaseProblem:
    """A low-dimensional test function with its domain and global minimizers.

    ``f_star`` is the value at the stored minimizers to full precision;
    ``f_star_reported`` keeps the rounded tabulated value.
    """

    name: str
    de: int
    lower: np.ndarray
    upper: np.ndarray
    f_star: float
    known_minimizers: tuple = ()
    func: Callable = field(default=None, repr=False)
    f_star_reported: Optional[float] = None
    baron_excluded: bool = False
    knitro_excluded: bool = False
    minimizers_complete: bool = True

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float).reshape(-1)
        hi = np.asarray(self.upper, dtype=float).reshape(-1)
        if lo.shape[0] != self.de or hi.shape[0] != self.de:
            raise DimensionMismatch(f"{self.name}: bounds do not match de={self.de}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        mins = tuple(np.asarray(m, dtype=float).reshape(-1) for m in self.known_minimizers)
        object.__setattr__(self, "known_minimizers", mins)

    def __call__(self, x) -> float:
        return float(self.func(np.asarray(x, dtype=float)))

    @property
    def is_unit_box(self) -> bool:
        return bool(np.all(self.lower == -1.0) and np.all(self.upper == 1.0))


@dataclass(frozen=True)
class _AffineWrapped:
    # picklable replacement for a closure; maps [-1, 1]^de onto the original box
    func: Callable
    center: np.ndarray
    half: np.ndarray

    def __call__(self, u):
        return self.func(self.center + self.half * np.asarray(u))


def evaluate_base(problem, x) -> float:
    """Value of a base problem (or catalogue name) at ``x``; ``x`` may leave the domain."""
    if isinstance(problem, str):
        problem = get_problem(problem)
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != problem.de:
        raise DimensionMismatch(f"{problem.name} expects {problem.de} coordinates")
    return problem(x)


def scale_to_unit_box(problem: BaseProblem) -> BaseProblem:
    if problem.is_unit_box:
        return problem
    if not (np.all(np.isfinite(problem.lower)) and np.all(np.isfinite(problem.upper))):
        raise ValueError(f"{problem.name}: domain must be finite to rescale")
    center = (problem.lower + problem.upper) / 2
    half = (problem.upper - problem.lower) / 2
    mins = tuple((m - center) / half for m in problem.known_minimizers)
    return replace(
        problem,
        lower=-np.ones(problem.de),
        upper=np.ones(problem.de),
        known_minimizers=mins,
        func=_AffineWrapped(problem.func, center, half),
    )


# --------------------------------------------------------------------------
# catalogue


def _shubert_minimizers():
    lows = (-7.7083137380987505, -1.4251284295994675, 4.8580568770827615)
    highs = (-7.083506407294424, -0.8003210997378483, 5.4828642075421055)
    pts = [(a, b) for a, b in product(lows, highs)]
    pts += [(b, a) for a, b in product(lows, highs)]
    return tuple(pts)


def _styblinski_root():
    # stationary point of t^4 - 16 t^2 + 5 t in (-3, -2)
    roots = np.roots([4.0, 0.0, -32.0, 5.0])
    return float(min(r.real for r in roots))


def _build_catalogue():
    pi = math.pi
    st = _styblinski_root()
    entries = [
        ("beale", beale, [-4.5] * 2, [4.5] * 2, 0.0, [(3.0, 0.5)], {}),
        ("branin", branin, [-5, 0], [10, 15], 0.397887,
         [(-pi, 12.275), (pi, 2.275), (3 * pi, 2.475)], {"baron_excluded": True}),
        ("brent", brent, [-10] * 2, [10] * 2, 0.0, [(-10.0, -10.0)], {}),
        ("bukin6", bukin6, [-15, -3], [-5, 3], 0.0, [(-10.0, 1.0)],
         {"knitro_excluded": True}),
        ("easom", easom, [-100] * 2, [100] * 2, -1.0, [(pi, pi)], {"baron_excluded": True}),
        ("goldstein_price", goldstein_price, [-2] * 2, [2] * 2, 3.0, [(0.0, -1.0)], {}),
        ("hartmann3", hartmann3, [0] * 3, [1] * 3, -3.86278,
         [(0.11458888122541287, 0.5556488954739371, 0.8525469842172746)], {}),
        ("hartmann6", hartmann6, [0] * 6, [1] * 6, -3.32237,
         [(0.20168950909365746, 0.15001069354111374, 0.4768739729250998,
           0.2753324275220782, 0.3116516172395686, 0.6573005345536702)], {}),
        ("levy", levy, [-10] * 4, [10] * 4, 0.0, [(1.0,) * 4], {"baron_excluded": True}),
        ("perm_4_0.5", perm_4_05, [-4] * 4, [4] * 4, 0.0, [(1.0, 2.0, 3.0, 4.0)], {}),
        ("rosenbrock", rosenbrock, [-5] * 3, [10] * 3, 0.0, [(1.0,) * 3], {}),
        ("shekel5", shekel5, [0] * 4, [10] * 4, -10.1532,
         [(4.000037152376549, 4.000133278657566, 4.000037151057555, 4.000133277090425)], {}),
        ("shekel7", shekel7, [0] * 4, [10] * 4, -10.4029,
         [(4.000572818167059, 3.9996062070672305, 4.000572821117356, 3.999606210400273)], {}),
        ("shekel10", shekel10, [0] * 4, [10] * 4, -10.5364,
         [(4.000746866658956, 3.9995094808675886, 4.000746866997999, 3.9995094822423836)], {}),
        ("shubert", shubert, [-10] * 2, [10] * 2, -186.7309, _shubert_minimizers(),
         {"baron_excluded": True}),
        ("six_hump_camel", six_hump_camel, [-3, -2], [3, 2], -1.0316,
         [(0.08984200893527233, -0.712656403019058), (-0.08984200893527233, 0.712656403019058)],
         {}),
        ("styblinski_tang", styblinski_tang, [-5] * 4, [5] * 4, -156.664, [(st,) * 4], {}),
        ("trid", trid, [-25] * 5, [25] * 5, -30.0, [(5.0, 8.0, 9.0, 8.0, 5.0)], {}),
        ("zettl", zettl, [-5] * 2, [5] * 2, -0.00379,
         [(-0.02989598504844889, 0.0)], {}),
    ]
    cat = {}
    for name, fn, lo, hi, reported, mins, flags in entries:
        de = len(lo)
        f_star = min(float(fn(np.asarray(m, dtype=float))) for m in mins)
        cat[name] = BaseProblem(name=name, de=de, lower=lo, upper=hi, f_star=f_star,
                                known_minimizers=tuple(mins), func=fn,
                                f_star_reported=reported, **flags)
    return cat


CATALOGUE: dict = _build_catalogue()


def problem_names() -> list:
    return list(CATALOGUE)


def get_problem(name: str, scaled: bool = False) -> BaseProblem:
    try:
        p = CATALOGUE[name]
    except KeyError:
        raise UnknownProblem(f"unknown problem {name!r}; known: {', '.join(CATALOGUE)}") from None
    return scale_to_unit_box(p) if scaled else p


# --------------------------------------------------------------------------
# lifting to D dimensions


@dataclass(frozen=True, eq=False)
class GeneratedProblem:
    """``f(x) = g((Qx)[:de])`` for a base problem ``g`` on the unit box.

    ``z_star`` are coordinates in the effective basis ``U = Q[:de].T`` of the
    minimizer component closest to the origin, and ``x_top_star = U z_star``.
    ``mu`` is that component's distance from the origin; when the stored
    minimizers are not exhaustive ``mu_is_bound`` is set and ``mu`` holds the
    upper bound ``sqrt(de)``.
    """

    base: BaseProblem
    D: int
    Q: np.ndarray = field(repr=False)
    mu: float
    mu_is_bound: bool
    z_star: Optional[np.ndarray]

    @property
    def de(self) -> int:
        return self.base.de

    @property
    def name(self) -> str:
        return self.base.name

    @property
    def f_star(self) -> float:
        return self.base.f_star

    @property
    def U(self) -> np.ndarray:
        """Orthonormal basis of the effective subspace, ``D x de``."""
        return self.Q[: self.de].T

    @property
    def x_top_star(self) -> Optional[np.ndarray]:
        if self.z_star is None:
            return None
        return self.U @ self.z_star

    @property
    def minimizers_effective(self) -> tuple:
        """Effective-basis coordinates of every known minimizer component."""
        return self.base.known_minimizers

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.D,):
            raise DimensionMismatch(f"expected a vector of length {self.D}")
        return self.base(self.Q[: self.de] @ x)

    def lift(self, xbar) -> np.ndarray:
        """Point of ``R^D`` whose effective coordinates are ``xbar`` (zero elsewhere)."""
        return self.U @ np.asarray(xbar, dtype=float)

    def distance_to_minimizers(self, p=None) -> float:
        """``min ||x* - p||`` over the known minimizer set (``p = 0`` by default)."""
        if not self.minimizers_effective:
            return math.sqrt(self.de)
        p_eff = np.zeros(self.de) if p is None else self.Q[: self.de] @ np.asarray(p, dtype=float)
        return min(float(np.linalg.norm(z - p_eff)) for z in self.minimizers_effective)


def generate(problem: BaseProblem, D: int, rng) -> GeneratedProblem:
    if not problem.is_unit_box:
        raise ValueError(f"{problem.name}: scale the problem to the unit box first")
    if D < problem.de:
        raise DimensionMismatch(f"D={D} is smaller than de={problem.de}")
    Q = sample_orthogonal(D, as_stream(rng))
    mins = problem.known_minimizers
    if mins and problem.minimizers_complete:
        norms = [float(np.linalg.norm(m)) for m in mins]
        k = int(np.argmin(norms))
        mu, bound, z = norms[k], False, mins[k].copy()
    elif mins:
        norms = [float(np.linalg.norm(m)) for m in mins]
        z = mins[int(np.argmin(norms))].copy()
        mu, bound = math.sqrt(problem.de), True
    else:
        mu, bound, z = math.sqrt(problem.de), True, None
    return GeneratedProblem(base=problem, D=D, Q=Q, mu=mu, mu_is_bound=bound, z_star=z)


def constant_basis(problem: GeneratedProblem) -> np.ndarray:
    """Orthonormal columns spanning the constant subspace, ``D x (D - de)``."""
    return problem.Q[problem.de:].T.copy()
