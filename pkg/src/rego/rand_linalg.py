"""Seeded random matrices and the small dense kernels built on them.

Matrices are plain ``numpy`` arrays. Randomness flows through
:class:`RngStream`, a thin wrapper around PCG64 keyed by ``(seed, stream_id)``
so that every trial of an experiment can own an independent, reproducible
sub-stream.
"""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

from .errors import DimensionMismatch, RankDeficient

RANK_TOL = 1e-12


class RngStream:
    """Deterministic random stream identified by a seed and a stream path.

    ``stream_id`` may be a single integer or a tuple of integers; the tuple
    form is what :meth:`substream` produces. Identical ``(seed, stream_id)``
    always yields identical draws since PCG64 and numpy's normal sampler are
    platform independent.
    """

    def __init__(self, seed: int, stream_id: Union[int, Sequence[int]] = 0):
        if isinstance(stream_id, (int, np.integer)):
            key = (int(stream_id),)
        else:
            key = tuple(int(k) for k in stream_id)
        self.seed = int(seed)
        self.key = key
        ss = np.random.SeedSequence(self.seed, spawn_key=key)
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def substream(self, *ids: int) -> "RngStream":
        return RngStream(self.seed, self.key + tuple(int(i) for i in ids))

    def normal(self, size=None) -> np.ndarray:
        return self.generator.standard_normal(size)

    def uniform(self, low=0.0, high=1.0, size=None) -> np.ndarray:
        return self.generator.uniform(low, high, size)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.key})"


def as_stream(rng) -> RngStream:
    """Accept an ``RngStream`` or a bare integer seed."""
    if isinstance(rng, RngStream):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng))
    raise TypeError(f"expected RngStream or int seed, got {type(rng).__name__}")


def sample_gaussian(rows: int, cols: int, rng) -> np.ndarray:
    """Matrix of i.i.d. standard normal entries."""
    if rows < 1 or cols < 1:
        raise DimensionMismatch(f"invalid shape ({rows}, {cols})")
    return as_stream(rng).normal((rows, cols))


def sample_orthogonal(D: int, rng) -> np.ndarray:
    """Haar-distributed ``D x D`` orthogonal matrix.

    QR of a Gaussian matrix with the signs of ``R``'s diagonal moved into
    ``Q``; the sign fix makes the factorization unique, which is what makes
    the result rotation invariant.
    """
    if D < 1:
        raise DimensionMismatch(f"invalid dimension {D}")
    G = sample_gaussian(D, D, rng)
    Q, R = np.linalg.qr(G)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


def min_two_norm_solution(B: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Least Euclidean norm solution of the underdetermined system ``B y = z``.

    Uses the thin QR factorization ``B^T = Q R``: the minimal-norm solution
    is ``y = Q w`` with ``R^T w = z``. ``BB^T`` is never formed.
    """
    B = np.atleast_2d(np.asarray(B, dtype=float))
    z = np.asarray(z, dtype=float).reshape(-1)
    de, d = B.shape
    if z.shape[0] != de:
        raise DimensionMismatch(f"B is {de}x{d} but z has length {z.shape[0]}")
    if de > d:
        raise DimensionMismatch(f"system is overdetermined ({de} > {d})")
    Q, R = np.linalg.qr(B.T)
    pivots = np.abs(np.diag(R))
    scale = np.linalg.norm(B)
    if scale == 0.0 or pivots.min() < RANK_TOL * scale:
        raise RankDeficient(f"effective rank below {de}")
    w = np.linalg.solve(R.T, z)
    return Q @ w


def min_two_norm_solutions(Bs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Batched :func:`min_two_norm_solution` over a stack ``(k, de, d)``."""
    Bs = np.asarray(Bs, dtype=float)
    z = np.asarray(z, dtype=float).reshape(-1)
    if Bs.ndim != 3 or Bs.shape[1] != z.shape[0]:
        raise DimensionMismatch("expected a (k, de, d) stack matching z")
    Q, R = np.linalg.qr(np.swapaxes(Bs, 1, 2))
    pivots = np.abs(np.diagonal(R, axis1=1, axis2=2)).min(axis=1)
    scale = np.linalg.norm(Bs, axis=(1, 2))
    if np.any((scale == 0.0) | (pivots < RANK_TOL * scale)):
        raise RankDeficient("a matrix in the stack is rank deficient")
    rhs = np.broadcast_to(z, (Bs.shape[0], z.shape[0]))[..., None]
    w = np.linalg.solve(np.swapaxes(R, 1, 2), rhs)
    return (Q @ w)[..., 0]


def null_space_basis(B: np.ndarray) -> np.ndarray:
    """Orthonormal basis (as columns) of the null space of a full-row-rank ``B``."""
    B = np.atleast_2d(np.asarray(B, dtype=float))
    de, d = B.shape
    Q, _ = np.linalg.qr(B.T, mode="complete")
    return Q[:, de:]
