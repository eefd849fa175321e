"""Numerical rank machinery for pencils: SVD ranks, sampled normal rank.

The normal rank of a pencil (its rank for all but finitely many Z) is
approximated by the maximum rank over a handful of random sample points on
a fixed circle. Sampling can in principle under-report; the verification
harness cross-checks every value against closed-form predictions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocking import BlockedSystem, MatrixPencil
from .errors import ConvergenceFailure
from .model import TolerancePolicy, _rng

# fixed sampling radius, bounded away from 0, 1, and the eigenvalue
# magnitudes of typically scaled systems, so rank drops at sampled points
# are vanishingly unlikely
NORMAL_RANK_RADIUS = 1.372000091


def numerical_rank(M: np.ndarray, policy: TolerancePolicy | None = None) -> int:
    """Count singular values above rel_rank_tol * sigma_1 * max(rows, cols)."""
    policy = policy or TolerancePolicy()
    M = np.atleast_2d(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > policy.rel_rank_tol * s[0] * max(M.shape)))


def rank_at(pencil: MatrixPencil, Z: complex, policy: TolerancePolicy | None = None) -> int:
    """Numerical rank of the pencil evaluated at the point Z.

    Outside the unit circle the same rank is read off E - F/Z instead of
    Z*E - F. The two differ by a nonzero scalar factor, but the largest
    singular value of Z*E - F grows with |Z| and would drag the relative
    rank threshold past genuine small singular values, declaring spurious
    rank drops at distant points.
    """
    Z = complex(Z)
    if abs(Z) <= 1.0:
        M = pencil.at(Z)
    else:
        M = pencil.E - pencil.F.astype(complex) / Z
    return numerical_rank(M, policy)


def normal_rank(pencil: MatrixPencil, policy: TolerancePolicy | None = None,
                seed: int = 0) -> int:
    """Maximum rank over sampled points Z = radius * exp(i*theta).

    The angles come from a Philox stream keyed by seed, so the result is
    deterministic in (pencil, policy, seed). The rank at a random point
    equals the normal rank with probability 1; the max over several points
    guards against an unlucky draw near a zero.
    """
    policy = policy or TolerancePolicy()
    rng = _rng(seed)
    thetas = rng.uniform(0.0, 2.0 * np.pi, policy.normal_rank_samples)
    return max(rank_at(pencil, NORMAL_RANK_RADIUS * np.exp(1j * t), policy) for t in thetas)


def rank_at_infinity(blk: BlockedSystem, policy: TolerancePolicy | None = None) -> int:
    """Rank of the pencil limit at infinity, defined as n + rank(D_tau)."""
    return blk.A_tau.shape[0] + numerical_rank(blk.D_tau, policy)


def eigenvalues(M: np.ndarray) -> np.ndarray:
    """All eigenvalues of a square matrix, with algebraic multiplicity, unordered."""
    M = np.atleast_2d(M)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"eigenvalues needs a square matrix, got {M.shape}")
    try:
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"eigensolver did not converge: {exc}") from None


@dataclass(frozen=True)
class RankProfile:
    """Measured ranks of one blocked system: at a generic point, 0, infinity, and of D_tau."""

    normal_rank: int
    rank_at_zero: int
    rank_at_infinity: int
    rank_D: int
