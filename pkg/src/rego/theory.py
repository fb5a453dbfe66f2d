"""Closed-form probabilistic quantities for Gaussian random embeddings.

For a ``de x d`` Gaussian ``B`` and fixed ``z``, the least-norm solution
``y2`` of ``By = z`` satisfies ``||z||^2 / ||y2||^2 ~ chi^2_n`` with
``n = d - de + 1``. Everything here follows from that law: the chi-squared
CDF, a lower bound on its upper tail, the resulting success probability
bounds, the second moment of ``y2`` and its density.

Affine embeddings ``x = Ay + p`` use the same formulas with ``mu`` replaced by
``min ||x* - p||`` and ``||x_top*||`` by ``||x_top* - p_top||``; callers pass
the adjusted values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UndefinedExpectation

_EPS = 1e-16
_MAX_ITER = 10000
_TINY = 1e-300


def log_gamma_half(n: int) -> float:
    """``log Gamma(n/2)`` for a positive integer ``n`` by exact recursion."""
    if n < 1 or int(n) != n:
        raise DomainError(f"n must be a positive integer, got {n}")
    n = int(n)
    if n % 2 == 0:
        # Gamma(k) = (k-1)!
        return sum(math.log(j) for j in range(1, n // 2))
    # Gamma(k + 1/2) = sqrt(pi) * prod_{j<k} (j + 1/2)
    return 0.5 * math.log(math.pi) + sum(math.log(j + 0.5) for j in range(n // 2))


def gamma_half(n: int) -> float:
    """``Gamma(n/2)``; exact products from ``Gamma(1) = 1`` and ``Gamma(1/2) = sqrt(pi)``."""
    if n < 1 or int(n) != n:
        raise DomainError(f"n must be a positive integer, got {n}")
    n = int(n)
    if n > 340:
        return math.exp(log_gamma_half(n))
    if n % 2 == 0:
        return float(math.factorial(n // 2 - 1))
    g = math.sqrt(math.pi)
    for j in range(n // 2):
        g *= j + 0.5
    return g


def _gamma_series(a: float, x: float, lg: float) -> float:
    # P(a, x) = e^{-x} x^a / Gamma(a) * sum_k x^k / (a (a+1) ... (a+k))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - lg)


def _gamma_cfrac(a: float, x: float, lg: float) -> float:
    # Q(a, x) by the modified Lentz continued fraction
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - lg) * h


def _check(n, x):
    if n < 1 or int(n) != n:
        raise DomainError(f"degrees of freedom must be a positive integer, got {n}")
    if not x >= 0:
        raise DomainError(f"x must be non-negative, got {x}")


def chi2_cdf(n: int, x: float) -> float:
    """``P[chi^2_n <= x]`` as the regularized lower incomplete gamma ``P(n/2, x/2)``."""
    _check(n, x)
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    a, h = n / 2.0, x / 2.0
    lg = log_gamma_half(n)
    if h < a + 1.0:
        return min(1.0, _gamma_series(a, h, lg))
    return max(0.0, 1.0 - _gamma_cfrac(a, h, lg))


def chi2_sf(n: int, x: float) -> float:
    """``P[chi^2_n > x]``, evaluated directly in the tail to avoid cancellation."""
    _check(n, x)
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    a, h = n / 2.0, x / 2.0
    lg = log_gamma_half(n)
    if h < a + 1.0:
        return max(0.0, 1.0 - _gamma_series(a, h, lg))
    return min(1.0, _gamma_cfrac(a, h, lg))


def bound_constant(n: int) -> float:
    """``C(n) = 4 / (n (n+2) Gamma(n/2))``."""
    return 4.0 / (n * (n + 2) * gamma_half(n))


def chi2_tail_lower_bound(n: int, x: float) -> float:
    """Lower bound on ``P[chi^2_n >= x]``; may be negative, in which case it is vacuous."""
    _check(n, x)
    if x == 0:
        return 1.0
    return 1.0 - bound_constant(n) * (1.0 + 0.5 * n * math.exp(-x / 2)) * (x / 2) ** (n / 2)


@dataclass(frozen=True)
class TheoryParams:
    """Parameters of a reduced problem as seen by the success bounds.

    ``mu`` is the distance from the origin (or the affine point) to the
    minimizer set, ``delta`` the half-width of the reduced box.
    """

    d: int
    de: int
    mu: float
    delta: float

    def __post_init__(self):
        if self.d < self.de or self.de < 1:
            raise DomainError(f"need d >= de >= 1, got d={self.d}, de={self.de}")
        if self.mu < 0:
            raise DomainError("mu must be non-negative")
        if not self.delta > 0:
            raise DomainError("delta must be positive")

    @property
    def n(self) -> int:
        return self.d - self.de + 1

    @property
    def delta_bar(self) -> float:
        return self.delta / self.mu if self.mu > 0 else math.inf

    @classmethod
    def normalized(cls, d: int, de: int, delta_bar: float) -> "TheoryParams":
        return cls(d=d, de=de, mu=1.0, delta=delta_bar)


def success_lower_bound_Rstar(params: TheoryParams) -> float:
    """``R* = 1 - C(n) (1 + n/2 e^{-mu^2/(2 delta^2)}) (mu / (sqrt(2) delta))^n``.

    Depends on ``mu`` and ``delta`` only through their ratio.
    """
    n = params.n
    r = params.mu / params.delta
    if r == 0:
        return 1.0
    return 1.0 - bound_constant(n) * (1.0 + 0.5 * n * math.exp(-0.5 * r * r)) * (r / math.sqrt(2.0)) ** n


def exact_success_tail(params: TheoryParams) -> float:
    """``P[chi^2_n >= mu^2 / delta^2]``: the probability that ``||y2|| <= delta``."""
    r = params.mu / params.delta
    return chi2_sf(params.n, r * r)


def expected_sq_norm_y2(d: int, de: int, norm_x_top: float) -> float:
    """``E ||y2||^2 = ||x_top*||^2 / (d - de - 1)``, defined only when ``d - de > 1``."""
    if d - de <= 1:
        raise UndefinedExpectation(f"E||y2||^2 is infinite for d - de = {d - de} <= 1")
    return norm_x_top**2 / (d - de - 1)


def pdf_y2(y, d: int, de: int, norm_x_top: float) -> float:
    """Density of the least-norm reduced minimizer ``y2`` at ``y`` in ``R^d``."""
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != d:
        raise DomainError(f"y must have length d={d}")
    if not norm_x_top > 0:
        raise DomainError("norm_x_top must be positive")
    s = float(y @ y)
    if s == 0:
        raise DomainError("density is not defined at y = 0")
    n = d - de + 1
    logc = (-0.5 * d * math.log(math.pi) + log_gamma_half(d) - log_gamma_half(n)
            + n * math.log(norm_x_top / math.sqrt(2.0)))
    return math.exp(logc - 0.5 * (n + d) * math.log(s) - norm_x_top**2 / (2.0 * s))


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere in ``R^d``."""
    return 2.0 * math.pi ** (d / 2) / gamma_half(d)


def radial_pdf(r, d: int, de: int, norm_x_top: float):
    """Density of ``||y2||``: ``g*(r e) * area(S^{d-1}) * r^{d-1}``. Vectorized over ``r``."""
    r = np.asarray(r, dtype=float)
    n = d - de + 1
    s = norm_x_top
    t = r / s
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        logg = ((1 - n / 2) * math.log(2.0) - log_gamma_half(n)
                - (n + 1) * np.log(t) - 1.0 / (2 * t * t))
        out = np.exp(logg) / s
    return np.where(r > 0, out, 0.0)


def wang_bound(mu: float, delta: float, de: int) -> float:
    """Earlier bound ``1 - mu sqrt(de) / delta`` (derived for ``d = de``)."""
    return 1.0 - mu * math.sqrt(de) / delta


def sanyang_kaban_bound(mu: float, delta: float, d: int, de: int) -> float:
    """Earlier bound ``1 - exp(-(sqrt(d) - sqrt(de) - mu/delta)^2 / 2)``.

    Only valid for ``delta > mu / (sqrt(d) - sqrt(de))``; NaN otherwise.
    """
    gap = math.sqrt(d) - math.sqrt(de)
    if gap <= 0 or not delta > mu / gap:
        return math.nan
    return 1.0 - math.exp(-0.5 * (gap - mu / delta) ** 2)
