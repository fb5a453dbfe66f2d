"""Experiment drivers: REGO and no-embedding runs, Monte Carlo success curves,
success tables, distribution checks, and flat-file output.

Every random draw goes through :class:`RngStream` keyed by the experiment
seed plus a path describing the trial, so results do not depend on the
number of workers or the order in which trials finish.
"""

from __future__ import annotations

import csv
import json
import math
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .embedding import (EPSILON, EmbeddingSpec, geometric_success, is_successful,
                        make_reduced)
from .feasibility import FEAS_TOL, min_inf_norm_solution
from .problems import GeneratedProblem, generate, get_problem, problem_names
from .rand_linalg import RngStream, min_two_norm_solutions, sample_gaussian
from .solvers import Budget, SolverResult, solve
from .theory import (TheoryParams, chi2_cdf, expected_sq_norm_y2, radial_pdf,
                     success_lower_bound_Rstar)

NO_EMBEDDING_SCALE = 1.5

TRIAL_FIELDS = ["problem", "D", "de", "d", "delta", "solver", "seed", "best_value", "f_star",
                "evals", "elapsed_s", "converged", "geometric_success"]
CURVE_FIELDS = ["de", "d", "delta_bar", "L_hat", "R_star", "trials"]
TABLE_FIELDS = ["D", "pair", "d_offset", "coef", "scale", "rate", "successes", "trials"]


# ----------------------------------------------------------------- data types


@dataclass
class TrialRecord:
    problem: str
    D: int
    de: int
    d: int
    delta: float
    solver: str
    seed: int
    result: SolverResult
    f_star: float
    success: bool
    geometric_success: bool
    p_offset: str = "zero"
    mode: str = "rego"

    def row(self) -> dict:
        # full-space runs are tagged in the solver column to keep the schema fixed
        solver = self.solver if self.mode == "rego" else f"{self.mode}:{self.solver}"
        return {
            "problem": self.problem, "D": self.D, "de": self.de, "d": self.d,
            "delta": self.delta, "solver": solver, "seed": self.seed,
            "best_value": self.result.best_value, "f_star": self.f_star,
            "evals": self.result.evals, "elapsed_s": self.result.elapsed,
            "converged": self.success, "geometric_success": self.geometric_success,
        }


@dataclass
class SuccessCurve:
    de: int
    d: int
    delta_bar_grid: np.ndarray
    L_hat: np.ndarray
    R_star: np.ndarray
    trials_per_point: int

    def rows(self) -> List[dict]:
        return [{"de": self.de, "d": self.d, "delta_bar": float(db), "L_hat": float(l),
                 "R_star": float(r), "trials": self.trials_per_point}
                for db, l, r in zip(self.delta_bar_grid, self.L_hat, self.R_star)]


@dataclass(frozen=True)
class Pair:
    """``(d, delta) = (de + d_offset, coef * sqrt(de or D))``."""

    d_offset: int
    coef: float
    scale: str = "de"

    def __post_init__(self):
        if self.d_offset < 0:
            raise ValueError("d offset must be non-negative")
        if not self.coef > 0:
            raise ValueError("delta coefficient must be positive")
        if self.scale not in ("de", "D"):
            raise ValueError("delta scale must be 'de' or 'D'")

    def resolve(self, de: int, D: int):
        base = de if self.scale == "de" else D
        return de + self.d_offset, self.coef * math.sqrt(base)

    @property
    def label(self) -> str:
        return f"{self.d_offset}:{self.coef:g}*sqrt({self.scale})"


_PAIR_RE = re.compile(r"^\s*(\d+)\s*:\s*([0-9.eE+-]+)\s*\*\s*sqrt\(\s*(de|D)\s*\)\s*$")


def parse_pair(text: str) -> Pair:
    """Parse ``"OFFSET:COEF*sqrt(de)"`` or ``"OFFSET:COEF*sqrt(D)"``."""
    m = _PAIR_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse pair {text!r}; expected e.g. '1:2.2*sqrt(de)'")
    return Pair(int(m.group(1)), float(m.group(2)), m.group(3))


def parse_pairs(text: str) -> List[Pair]:
    if text in PAIR_PRESETS:
        return list(PAIR_PRESETS[text])
    return [parse_pair(t) for t in text.split(",") if t.strip()]


MAIN_PAIRS = (Pair(0, 8.0), Pair(1, 2.2), Pair(2, 1.3), Pair(3, 1.0))
PAIR_PRESETS = {
    "main": MAIN_PAIRS,
    "A": tuple(Pair(p.d_offset, p.coef, "D") for p in MAIN_PAIRS),
    "B": tuple(Pair(k, 7.5) for k in range(4)),
    "C": (Pair(1, 5.0), Pair(1, 7.5), Pair(1, 10.0), Pair(1, 2.2)),
}


@dataclass
class TableCell:
    D: int
    pair: Pair
    successes: int
    trials: int
    per_problem: dict = field(default_factory=dict)

    @property
    def rate(self) -> float:
        return self.successes / self.trials if self.trials else math.nan

    def row(self) -> dict:
        return {"D": self.D, "pair": self.pair.label, "d_offset": self.pair.d_offset,
                "coef": self.pair.coef, "scale": self.pair.scale, "rate": self.rate,
                "successes": self.successes, "trials": self.trials}


@dataclass
class DistributionReport:
    de: int
    d: int
    samples: int
    ks: float
    mean_sq_norm: float
    expected_sq_norm: float
    mean_rel_error: float
    radial_tv: float
    sphere_mean_max: float
    mean_defined: bool

    def as_dict(self) -> dict:
        return asdict(self)


# ------------------------------------------------------------------ workers


def worker_count(requested: Optional[int] = None) -> int:
    """Requested worker count, capped by ``REGO_THREADS`` and the CPU count."""
    n = requested if requested is not None else 1
    cap = os.environ.get("REGO_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, min(n, os.cpu_count() or 1))


def _map(fn, tasks: Sequence, workers: Optional[int] = None) -> list:
    n = worker_count(workers)
    if n == 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * n))))


# ------------------------------------------------------------------ REGO runs


def _budget(problem: GeneratedProblem, epsilon: float, budget: Optional[Budget]) -> Budget:
    if budget is None:
        return Budget.standard(problem.de, target=problem.f_star, epsilon=epsilon)
    return Budget(budget.max_evals, budget.max_starts, problem.f_star, epsilon, budget.max_time)


def run_rego(problem: GeneratedProblem, solver: str, d: int, delta: float, seed: int,
             p=None, epsilon: float = EPSILON, budget: Optional[Budget] = None,
             stream=()) -> TrialRecord:
    """One pass of the REGO loop: sample ``A``, solve the reduced problem, reconstruct.

    ``stream`` is an extra key path so many trials can share one seed.
    """
    if d < 1 or not delta > 0:
        raise ValueError("need d >= 1 and delta > 0")
    root = RngStream(seed, tuple(stream))
    spec = EmbeddingSpec(sample_gaussian(problem.D, d, root.substream(0)), delta, p)
    objective = make_reduced(problem, spec)
    result = solve(solver, objective, (spec.lower, spec.upper), _budget(problem, epsilon, budget),
                   rng=root.substream(1))
    result.info["x_min"] = spec.to_full(result.best_point)
    return TrialRecord(
        problem=problem.name, D=problem.D, de=problem.de, d=d, delta=delta, solver=solver,
        seed=seed, result=result, f_star=problem.f_star,
        success=is_successful(problem, spec, result.best_point, result.best_value, epsilon),
        geometric_success=geometric_success(problem, spec),
        p_offset="zero" if p is None else "given",
    )


def run_no_embedding(problem: GeneratedProblem, solver: str, seed: int = 0,
                     epsilon: float = EPSILON, budget: Optional[Budget] = None,
                     scale: float = NO_EMBEDDING_SCALE, stream=()) -> TrialRecord:
    """Solve directly in ``R^D`` on ``[-scale sqrt(de), scale sqrt(de)]^D``.

    Known minimizers have norm at most ``sqrt(de)`` so they lie strictly inside.
    """
    half = scale * math.sqrt(problem.de)
    box = (-half * np.ones(problem.D), half * np.ones(problem.D))
    root = RngStream(seed, tuple(stream))
    result = solve(solver, problem, box, _budget(problem, epsilon, budget), rng=root.substream(1))
    result.info["box_half_width"] = half
    inside = bool(np.max(np.abs(result.best_point)) <= half + 1e-12)
    return TrialRecord(
        problem=problem.name, D=problem.D, de=problem.de, d=problem.D, delta=half, solver=solver,
        seed=seed, result=result, f_star=problem.f_star,
        success=inside and result.best_value <= problem.f_star + epsilon,
        geometric_success=True, mode="no-embedding",
    )


# ------------------------------------------------------------ success curves


def estimate_L_star(de: int, d: int, delta_bar_grid, trials: int, rng,
                    z_bar=None) -> SuccessCurve:
    """Monte Carlo estimate of ``P[exists y in [-db, db]^d : B y = z_bar]``.

    The same ``trials`` Gaussian matrices serve every grid point: the smallest
    feasible half-width ``t`` is computed once per matrix and compared with
    each ``db``. ``z_bar`` is a fixed unit vector drawn once when not given.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if d < de:
        raise ValueError("need d >= de")
    stream = rng if isinstance(rng, RngStream) else RngStream(int(rng))
    grid = np.asarray(delta_bar_grid, dtype=float)
    if z_bar is None:
        z_bar = stream.substream(0).normal(de)
    z_bar = np.asarray(z_bar, dtype=float)
    z_bar = z_bar / np.linalg.norm(z_bar)
    gen = stream.substream(1)
    t = np.array([min_inf_norm_solution(gen.normal((de, d)), z_bar).t for _ in range(trials)])
    L_hat = np.array([np.mean(t <= db + FEAS_TOL) for db in grid])
    R = np.array([success_lower_bound_Rstar(TheoryParams.normalized(d, de, db)) for db in grid])
    return SuccessCurve(de=de, d=d, delta_bar_grid=grid, L_hat=L_hat, R_star=R,
                        trials_per_point=trials)


# ------------------------------------------------------------- success table


def _table_task(args):
    name, pi, D, pairs, embeddings, seed = args
    problem = generate(get_problem(name, scaled=True), D, RngStream(seed, (pi, D)))
    out = []
    for k, pair in enumerate(pairs):
        d, delta = pair.resolve(problem.de, D)
        hits = 0
        for e in range(embeddings):
            A = sample_gaussian(D, d, RngStream(seed, (pi, D, k, e)))
            hits += geometric_success(problem, EmbeddingSpec(A, delta))
        out.append(hits)
    return name, D, out


def run_success_table(problem_set: Optional[Iterable[str]] = None, D_list=(10, 100, 1000),
                      pairs: Sequence[Pair] = MAIN_PAIRS, embeddings_per_problem: int = 100,
                      seed: int = 0, workers: Optional[int] = None) -> List[TableCell]:
    """Percentage of embeddings for which the reduced problem is successful.

    Success is the solver-independent LP verdict. Each problem index owns the
    rotation stream ``(i, D)`` and each embedding the stream ``(i, D, pair, e)``.
    """
    names = list(problem_set) if problem_set is not None else problem_names()
    index = {n: i for i, n in enumerate(problem_names())}
    if not names or not list(D_list) or not list(pairs):
        raise ValueError("problem set, D list and pairs must be nonempty")
    tasks = [(n, index[n], int(D), tuple(pairs), embeddings_per_problem, seed)
             for D in D_list for n in names]
    results = _map(_table_task, tasks, workers)
    cells = []
    for D in D_list:
        for k, pair in enumerate(pairs):
            per = {name: hits[k] for name, DD, hits in results if DD == D}
            cells.append(TableCell(D=int(D), pair=pair, successes=sum(per.values()),
                                   trials=len(per) * embeddings_per_problem, per_problem=per))
    return cells


# ------------------------------------------------------ distribution checks


def _ks_statistic(samples: np.ndarray, cdf_values: np.ndarray) -> float:
    """Two-sided KS distance given sorted samples and the model CDF at them."""
    m = samples.size
    upper = np.arange(1, m + 1) / m - cdf_values
    lower = cdf_values - np.arange(0, m) / m
    return float(max(upper.max(), lower.max()))


def _interval_mass(a: float, b: float, d: int, de: int, nodes: int = 64) -> float:
    x, w = np.polynomial.legendre.leggauss(nodes)
    r = 0.5 * (b - a) * x + 0.5 * (b + a)
    return float(0.5 * (b - a) * np.sum(w * radial_pdf(r, d, de, 1.0)))


def verify_distribution(de: int, d: int, samples: int, rng, norm: float = 1.0,
                        bins: int = 40, batch: int = 20000) -> DistributionReport:
    """Sample ``y2`` for Gaussian ``B`` and fixed ``z`` and compare with the analytic law.

    Reports the KS distance of ``||z||^2 / ||y2||^2`` against chi-squared with
    ``d - de + 1`` degrees of freedom, the relative error of the mean of
    ``||y2||^2``, the total-variation distance between the empirical and
    analytic radial laws over ``bins`` quantile bins, and the largest
    coordinate mean of ``y2 / ||y2||``.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    stream = rng if isinstance(rng, RngStream) else RngStream(int(rng))
    z = stream.substream(0).normal(de)
    z = norm * z / np.linalg.norm(z)
    gen = stream.substream(1)
    ys = []
    left = samples
    while left:
        k = min(batch, left)
        ys.append(min_two_norm_solutions(gen.normal((k, de, d)), z))
        left -= k
    y = np.concatenate(ys)
    sq = np.einsum("ij,ij->i", y, y)
    n = d - de + 1

    ratio = np.sort(norm**2 / sq)
    cdf = np.array([chi2_cdf(n, v) for v in ratio])
    ks = _ks_statistic(ratio, cdf)

    mean_sq = float(sq.mean())
    try:
        expected = expected_sq_norm_y2(d, de, norm)
        rel = abs(mean_sq - expected) / expected
        defined = True
    except ArithmeticError:
        expected, rel, defined = math.inf, math.nan, False

    r = np.sqrt(sq) / norm
    edges = np.quantile(r, np.linspace(0, 1, bins + 1)[1:-1])
    emp = np.histogram(r, bins=np.concatenate(([0.0], edges, [np.inf])))[0] / samples
    theo = np.empty(bins)
    lo = 0.0
    for i, hi in enumerate(edges):
        theo[i] = _interval_mass(lo, hi, d, de)
        lo = hi
    theo[-1] = max(0.0, 1.0 - theo[:-1].sum())
    tv = 0.5 * float(np.abs(emp - theo).sum())

    sphere = y / np.sqrt(sq)[:, None]
    return DistributionReport(
        de=de, d=d, samples=samples, ks=ks, mean_sq_norm=mean_sq, expected_sq_norm=expected,
        mean_rel_error=rel, radial_tv=tv, sphere_mean_max=float(np.abs(sphere.mean(axis=0)).max()),
        mean_defined=defined,
    )


# ----------------------------------------------------------- REGO vs direct


@dataclass
class Comparison:
    problem: str
    D: int
    solver: str
    pair: Pair
    rego: List[TrialRecord]
    direct: List[TrialRecord]

    @staticmethod
    def _freq(records):
        return sum(r.success for r in records) / len(records) if records else math.nan

    @property
    def rego_frequency(self) -> float:
        return self._freq(self.rego)

    @property
    def direct_frequency(self) -> float:
        return self._freq(self.direct)

    def direct_budget_hits(self, max_evals: int) -> int:
        return sum(r.result.evals >= max_evals for r in self.direct)

    def summary(self) -> dict:
        return {
            "problem": self.problem, "D": self.D, "solver": self.solver, "pair": self.pair.label,
            "trials": len(self.rego), "rego_frequency": self.rego_frequency,
            "no_embedding_frequency": self.direct_frequency,
            "rego_mean_evals": float(np.mean([r.result.evals for r in self.rego])),
            "no_embedding_mean_evals": float(np.mean([r.result.evals for r in self.direct])),
            "rego_mean_time": float(np.mean([r.result.elapsed for r in self.rego])),
            "no_embedding_mean_time": float(np.mean([r.result.elapsed for r in self.direct])),
        }


def _compare_task(args):
    name, D, solver, pair, t, seed, epsilon, with_direct, budget = args
    problem = generate(get_problem(name, scaled=True), D, RngStream(seed, (t, 0)))
    d, delta = pair.resolve(problem.de, D)
    rego = run_rego(problem, solver, d, delta, seed, epsilon=epsilon, budget=budget, stream=(t, 1))
    direct = None
    if with_direct:
        direct = run_no_embedding(problem, solver, seed, epsilon=epsilon, budget=budget,
                                  stream=(t, 2))
    return rego, direct


def compare(problem: str, D: int, solver: str = "direct", pair: Pair = Pair(1, 2.2),
            trials: int = 30, seed: int = 0, epsilon: float = EPSILON,
            workers: Optional[int] = None, no_embedding: bool = True,
            budget: Optional[Budget] = None) -> Comparison:
    """REGO against solving in the full space, on ``trials`` rotated copies of ``problem``.

    Trial ``t`` draws its rotation from stream ``(t, 0)``; the REGO run and
    the full-space run see the same rotated problem.
    """
    tasks = [(problem, int(D), solver, pair, t, seed, epsilon, no_embedding, budget)
             for t in range(trials)]
    out = _map(_compare_task, tasks, workers)
    return Comparison(problem=problem, D=D, solver=solver, pair=pair,
                      rego=[r for r, _ in out], direct=[x for _, x in out if x is not None])


# ------------------------------------------------------------------ output


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v


def _rows_of(obj):
    if isinstance(obj, SuccessCurve):
        return CURVE_FIELDS, obj.rows()
    if isinstance(obj, DistributionReport):
        d = obj.as_dict()
        return list(d), [d]
    items = list(obj)
    if not items or isinstance(items[0], TrialRecord):
        return TRIAL_FIELDS, [r.row() for r in items]
    if isinstance(items[0], SuccessCurve):
        return CURVE_FIELDS, [row for c in items for row in c.rows()]
    if isinstance(items[0], TableCell):
        return TABLE_FIELDS, [c.row() for c in items]
    if isinstance(items[0], dict):
        return list(items[0]), items
    raise TypeError(f"cannot emit objects of type {type(items[0]).__name__}")


def _fmt(v):
    v = _jsonable(v)
    return repr(v) if isinstance(v, float) else v


def emit_results(obj, fmt: str, path) -> None:
    """Write records, curves, a success table or a report as CSV or JSON.

    Floats are written with ``repr`` so they parse back exactly. An empty
    record list yields a header-only trial CSV.
    """
    fields, rows = _rows_of(obj)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=fields)
            w.writeheader()
            for row in rows:
                w.writerow({k: _fmt(row[k]) for k in fields})
    elif fmt == "json":
        with open(path, "w") as fh:
            json.dump([{k: _jsonable(row[k]) for k in fields} for row in rows], fh, indent=1)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def read_csv(path) -> List[dict]:
    """Parse a CSV written by :func:`emit_results`, converting numbers and booleans."""
    def conv(s):
        if s in ("True", "False"):
            return s == "True"
        for cast in (int, float):
            try:
                return cast(s)
            except ValueError:
                pass
        return s

    with open(path, newline="") as fh:
        return [{k: conv(v) for k, v in row.items()} for row in csv.DictReader(fh)]
