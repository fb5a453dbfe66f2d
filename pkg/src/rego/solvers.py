"""Box-constrained global solvers: DIRECT, multi-start Nelder-Mead, random search.

Every solver takes an objective ``f(y) -> float``, a box ``(lower, upper)``
and a :class:`Budget`, and returns a :class:`SolverResult`. Objectives are
only ever evaluated inside the box.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .rand_linalg import as_stream

EPSILON = 1e-3
DIRECT_BALANCE = 1e-4
NM_DIAMETER_TOL = 1e-8

Box = Tuple[Sequence[float], Sequence[float]]


@dataclass(frozen=True)
class Budget:
    max_evals: Optional[int] = None
    max_starts: Optional[int] = None
    target: Optional[float] = None
    epsilon: float = EPSILON
    max_time: Optional[float] = None

    def __post_init__(self):
        for name in ("max_evals", "max_starts", "max_time"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be positive, got {v}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")

    @classmethod
    def standard(cls, de: int, target: Optional[float] = None, epsilon: float = EPSILON,
                 max_time: Optional[float] = None) -> "Budget":
        """Default experiment budget: ``10000 de`` evaluations and ``20 de`` starts."""
        return cls(max_evals=10000 * de, max_starts=20 * de, target=target,
                   epsilon=epsilon, max_time=max_time)

    @property
    def threshold(self) -> Optional[float]:
        return None if self.target is None else self.target + self.epsilon


@dataclass
class SolverResult:
    best_value: float
    best_point: np.ndarray
    evals: int
    elapsed: float
    converged: bool
    info: dict = field(default_factory=dict)


def _as_box(box):
    lower = np.asarray(box[0], dtype=float).reshape(-1)
    upper = np.asarray(box[1], dtype=float).reshape(-1)
    if lower.shape != upper.shape:
        raise ValueError("box bounds differ in length")
    if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
        raise ValueError("box must be finite")
    if np.any(upper < lower):
        raise ValueError("box has upper < lower")
    return lower, upper


class _Tracker:
    """Counts evaluations, tracks the incumbent and decides when to stop."""

    def __init__(self, objective, budget: Budget):
        self.objective = objective
        self.budget = budget
        self.evals = 0
        self.best_value = math.inf
        self.best_point = None
        self.start = time.perf_counter()
        self.hit_target = False

    def exhausted(self) -> bool:
        b = self.budget
        if self.hit_target:
            return True
        if b.max_evals is not None and self.evals >= b.max_evals:
            return True
        if b.max_time is not None and time.perf_counter() - self.start >= b.max_time:
            return True
        return False

    def __call__(self, y) -> float:
        value = float(self.objective(y))
        self.evals += 1
        if value < self.best_value or self.best_point is None:
            self.best_value = value
            self.best_point = np.array(y, dtype=float)
        thr = self.budget.threshold
        if thr is not None and self.best_value <= thr:
            self.hit_target = True
        return value

    def result(self, **info) -> SolverResult:
        thr = self.budget.threshold
        return SolverResult(
            best_value=self.best_value,
            best_point=self.best_point,
            evals=self.evals,
            elapsed=time.perf_counter() - self.start,
            converged=bool(thr is not None and self.best_value <= thr),
            info=info,
        )


# --------------------------------------------------------------------------- DIRECT


def direct_minimize(objective: Callable, box: Box, budget: Budget,
                    balance: float = DIRECT_BALANCE, stop_on_target: bool = True) -> SolverResult:
    """DIRECT (DIviding RECTangles) on a box, normalized to the unit cube.

    A rectangle is stored as its center and an integer vector of trisection
    levels (side ``i`` has length ``3**-level[i]``). Because only the
    longest sides are ever split, all levels of one rectangle differ by at
    most one, so ``sum(level)`` fixes its diameter; rectangles are grouped by
    that sum, each group a heap ordered by center value then insertion order.
    """
    lower, upper = _as_box(box)
    width = upper - lower
    n = lower.size
    if budget.max_evals is None and budget.max_time is None and budget.target is None:
        raise ValueError("DIRECT needs an evaluation, time or target limit")
    if not stop_on_target:
        budget = Budget(budget.max_evals, budget.max_starts, None, budget.epsilon, budget.max_time)
    track = _Tracker(objective, budget)

    def f(c):
        return track(lower + c * width)

    centers = []
    levels = []
    values = []
    groups = {}
    counter = 0

    def add(c, lev, value):
        nonlocal counter
        centers.append(c)
        levels.append(lev)
        values.append(value)
        heapq.heappush(groups.setdefault(int(lev.sum()), []), (value, counter, len(centers) - 1))
        counter += 1

    c0 = np.full(n, 0.5)
    add(c0, np.zeros(n, dtype=int), f(c0))
    iterations = 0
    min_side_level = 0

    def diameter(total):
        # all levels are k or k+1 with sum == total
        k, r = divmod(total, n)
        return 0.5 * math.sqrt((n - r) * 9.0 ** (-k) + r * 9.0 ** (-(k + 1)))

    while not track.exhausted():
        iterations += 1
        sizes = sorted(s for s in groups if groups[s])  # smaller level sum = larger diameter
        diam = np.array([diameter(s) for s in sizes])
        fval = np.array([groups[s][0][0] for s in sizes])
        fmin = track.best_value
        chosen = []
        for j in range(len(sizes)):
            larger = slice(0, j)
            smaller = slice(j + 1, None)
            k_low = -math.inf
            if j + 1 < len(sizes):
                k_low = float(np.max((fval[j] - fval[smaller]) / (diam[j] - diam[smaller])))
            k_high = math.inf
            if j > 0:
                k_high = float(np.min((fval[larger] - fval[j]) / (diam[larger] - diam[j])))
            if k_low > k_high or k_high <= 0:
                continue
            if math.isfinite(k_high) and fval[j] - k_high * diam[j] > fmin - balance * abs(fmin):
                continue
            chosen.append(sizes[j])
        if not chosen:
            chosen = [sizes[int(np.argmin(fval))]]

        for s in chosen:
            if track.exhausted():
                break
            _, _, idx = heapq.heappop(groups[s])
            c = centers[idx]
            lev = levels[idx].copy()
            lo = lev.min()
            dims = np.flatnonzero(lev == lo)
            step = 3.0 ** (-(lo + 1))
            samples = {}
            stopped = False
            for i in dims:
                pair = []
                for sign in (1.0, -1.0):
                    if track.exhausted():
                        stopped = True
                        break
                    cc = c.copy()
                    cc[i] += sign * step
                    pair.append((cc, f(cc)))
                if stopped:
                    break
                samples[int(i)] = pair
            if stopped:
                # keep the parent so the partition stays consistent
                heapq.heappush(groups[s], (values[idx], counter, idx))
                counter += 1
                break
            order = sorted(samples, key=lambda i: (min(samples[i][0][1], samples[i][1][1]), i))
            for i in order:
                lev[i] += 1
                for cc, v in samples[i]:
                    add(cc, lev.copy(), v)
            levels[idx] = lev
            heapq.heappush(groups.setdefault(int(lev.sum()), []), (values[idx], counter, idx))
            counter += 1
            min_side_level = max(min_side_level, int(lev.max()))

    return track.result(
        iterations=iterations,
        rectangles=len(centers),
        min_side=3.0 ** (-min_side_level),
    )


# ------------------------------------------------------------------ Nelder-Mead


def _nelder_mead(f, x0, lower, upper, max_evals, exhausted, diameter_tol=NM_DIAMETER_TOL):
    """Bounded Nelder-Mead; every trial point is clipped into the box.

    Returns ``(best_point, best_value, evals, converged)``; ``converged`` means
    the simplex diameter fell below ``diameter_tol``.
    """
    n = x0.size
    width = upper - lower
    simplex = np.empty((n + 1, n))
    simplex[0] = x0
    for i in range(n):
        v = x0.copy()
        step = 0.1 * width[i] if width[i] > 0 else 0.0
        # step inward if the vertex would leave the box
        v[i] = v[i] + step if v[i] + step <= upper[i] else v[i] - step
        simplex[i + 1] = v
    evals = 0

    def g(x):
        nonlocal evals
        evals += 1
        return f(x)

    fs = np.empty(n + 1)
    for i in range(n + 1):
        if evals >= max_evals or exhausted():
            k = int(np.argmin(fs[:i])) if i else 0
            return simplex[k], (fs[k] if i else math.inf), evals, False
        fs[i] = g(simplex[i])

    converged = False
    while evals < max_evals and not exhausted():
        order = np.argsort(fs, kind="stable")
        simplex, fs = simplex[order], fs[order]
        if np.max(np.abs(simplex[1:] - simplex[0])) < diameter_tol:
            converged = True
            break
        centroid = simplex[:-1].mean(axis=0)
        xr = np.clip(centroid + (centroid - simplex[-1]), lower, upper)
        fr = g(xr)
        if fr < fs[0]:
            if evals >= max_evals or exhausted():
                simplex[-1], fs[-1] = xr, fr
                break
            xe = np.clip(centroid + 2.0 * (centroid - simplex[-1]), lower, upper)
            fe = g(xe)
            if fe < fr:
                simplex[-1], fs[-1] = xe, fe
            else:
                simplex[-1], fs[-1] = xr, fr
        elif fr < fs[-2]:
            simplex[-1], fs[-1] = xr, fr
        else:
            if evals >= max_evals or exhausted():
                break
            if fr < fs[-1]:
                xc = np.clip(centroid + 0.5 * (xr - centroid), lower, upper)
            else:
                xc = np.clip(centroid + 0.5 * (simplex[-1] - centroid), lower, upper)
            fc = g(xc)
            if fc < min(fr, fs[-1]):
                simplex[-1], fs[-1] = xc, fc
            else:
                # shrink toward the best vertex
                for i in range(1, n + 1):
                    if evals >= max_evals or exhausted():
                        break
                    simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0])
                    fs[i] = g(simplex[i])
    k = int(np.argmin(fs))
    return simplex[k], fs[k], evals, converged


def multistart_local(objective: Callable, box: Box, budget: Budget, rng,
                     stop_on_target: bool = False) -> SolverResult:
    """Nelder-Mead from ``max_starts`` uniform random points; returns the best.

    Each start may use at most ``max_evals / max_starts`` evaluations. By
    default all starts run even once the target is reached, matching a
    fixed-budget multi-start; ``converged`` still reports the target test.
    """
    lower, upper = _as_box(box)
    stream = as_stream(rng)
    starts = budget.max_starts if budget.max_starts is not None else 20 * lower.size
    if budget.max_evals is not None:
        per_start = max(1, budget.max_evals // starts)
    else:
        per_start = 200 * (lower.size + 1)
    run_budget = budget if stop_on_target else Budget(
        budget.max_evals, budget.max_starts, None, budget.epsilon, budget.max_time)
    track = _Tracker(objective, run_budget)
    launched = 0
    local_converged = 0
    for _ in range(starts):
        if track.exhausted():
            break
        x0 = stream.uniform(lower, upper)
        cap = per_start
        if budget.max_evals is not None:
            cap = min(cap, budget.max_evals - track.evals)
        launched += 1
        _, _, _, ok = _nelder_mead(track, x0, lower, upper, cap, track.exhausted)
        local_converged += int(ok)
    out = track.result(starts=launched, local_converged=local_converged, per_start_cap=per_start)
    thr = budget.threshold
    out.converged = bool(thr is not None and out.best_value <= thr)
    return out


# ---------------------------------------------------------------- random search


def random_search(objective: Callable, box: Box, budget: Budget, rng,
                  stop_on_target: bool = False) -> SolverResult:
    """Best of ``max_evals`` uniform draws from the box."""
    lower, upper = _as_box(box)
    if budget.max_evals is None:
        raise ValueError("random search needs max_evals")
    stream = as_stream(rng)
    run_budget = budget if stop_on_target else Budget(
        budget.max_evals, budget.max_starts, None, budget.epsilon, budget.max_time)
    track = _Tracker(objective, run_budget)
    while not track.exhausted():
        track(stream.uniform(lower, upper))
    out = track.result()
    thr = budget.threshold
    out.converged = bool(thr is not None and out.best_value <= thr)
    return out


SOLVERS = {
    "direct": "direct_minimize",
    "multistart": "multistart_local",
    "random": "random_search",
}


def solve(name: str, objective: Callable, box: Box, budget: Budget, rng=None) -> SolverResult:
    """Dispatch by solver name; ``rng`` is ignored by the deterministic DIRECT."""
    if name == "direct":
        return direct_minimize(objective, box, budget)
    if name == "multistart":
        return multistart_local(objective, box, budget, rng if rng is not None else 0)
    if name == "random":
        return random_search(objective, box, budget, rng if rng is not None else 0)
    raise ValueError(f"unknown solver {name!r}; choose from {sorted(SOLVERS)}")
