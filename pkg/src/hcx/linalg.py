"""Dense symmetric linear-algebra services.

Everything downstream (dual evaluations, secular equations, certificates)
funnels through the eigendecomposition produced here, so determinism and the
tolerance conventions are fixed in this one place:

* eigenvector signs follow a fixed convention (first non-negligible component
  nonnegative) so repeated runs are bit-identical;
* relative tolerances scale by ``max(1, magnitude)`` because instances are
  user-supplied and unnormalized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput

# Eigenvalues within CLUSTER_TOL * scale of the smallest one are treated as
# members of the minimal eigenspace (floating-point multiplicity is fuzzy).
CLUSTER_TOL = 1e-9


def symmetrize(M) -> np.ndarray:
    """Validate a square matrix and return its symmetric part (M + M.T)/2."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInput("matrix has non-finite entries")
    return 0.5 * (M + M.T)


def as_vector(v, n: int | None = None) -> np.ndarray:
    """Validate a finite 1-D vector, optionally of prescribed length."""
    v = np.asarray(v, dtype=float).ravel()
    if not np.all(np.isfinite(v)):
        raise InvalidInput("vector has non-finite entries")
    if n is not None and v.shape[0] != n:
        raise InvalidInput(f"expected a vector of length {n}, got {v.shape[0]}")
    return v


@dataclass(frozen=True)
class SymEig:
    """Eigendecomposition of a symmetric matrix.

    ``eigenvalues`` is ascending; column i of ``eigenvectors`` pairs with
    eigenvalue i.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    def scale(self) -> float:
        return max(1.0, float(np.max(np.abs(self.eigenvalues))))

    def min_eigenspace(self) -> np.ndarray:
        """Columns spanning the numerically-minimal eigenspace."""
        cut = self.lambda_min + CLUSTER_TOL * self.scale()
        return self.eigenvectors[:, self.eigenvalues <= cut]

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T


@dataclass(frozen=True)
class PsdVerdict:
    is_psd: bool
    min_eigenvalue: float
    tolerance_used: float


def _fix_signs(Q: np.ndarray) -> np.ndarray:
    """Flip eigenvector columns so the first non-negligible component is >= 0."""
    Q = Q.copy()
    for j in range(Q.shape[1]):
        col = Q[:, j]
        nz = np.nonzero(np.abs(col) > 1e-12 * max(1.0, np.abs(col).max()))[0]
        if nz.size and col[nz[0]] < 0:
            Q[:, j] = -col
    return Q


def eigh(M) -> SymEig:
    """Eigendecomposition with the fixed sign convention.

    Input is symmetrized before factorization, so mildly asymmetric input is
    accepted; non-finite input raises InvalidInput.
    """
    S = symmetrize(M)
    w, Q = np.linalg.eigh(S)
    return SymEig(eigenvalues=w, eigenvectors=_fix_signs(Q))


def apply_shifted_pinv(E: SymEig, shift: float, v, tol: float = 1e-12) -> np.ndarray:
    """Apply the Moore-Penrose inverse of (M + shift*I) to ``v``.

    Eigencomponents with |lambda_i + shift| <= tol * scale are dropped, where
    scale = max(1, max_i |lambda_i + shift|), so a numerically singular shift
    is handled without error.
    """
    v = as_vector(v, E.n)
    d = E.eigenvalues + shift
    scale = max(1.0, float(np.max(np.abs(d))))
    keep = np.abs(d) > tol * scale
    coeff = np.zeros_like(d)
    proj = E.eigenvectors.T @ v
    coeff[keep] = proj[keep] / d[keep]
    return E.eigenvectors @ coeff


def range_membership(E: SymEig, v, tol: float = 1e-8) -> bool:
    """Is ``v`` in Range(M - lambda_min(M) I)?

    Equivalently: the projection of v onto the minimal eigenspace has norm
    at most tol * (1 + ||v||).
    """
    v = as_vector(v, E.n)
    Qmin = E.min_eigenspace()
    proj_norm = float(np.linalg.norm(Qmin.T @ v))
    return proj_norm <= tol * (1.0 + float(np.linalg.norm(v)))


def spectral_norm(M) -> float:
    """Largest singular value of a general (possibly rectangular) matrix."""
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise InvalidInput("matrix has non-finite entries")
    if M.size == 0 or not np.any(M):
        return 0.0
    return float(np.linalg.norm(M, 2))


def psd_check(M, tol: float = 1e-8) -> PsdVerdict:
    """Positive-semidefiniteness verdict based on the minimum eigenvalue.

    tolerance_used = tol * max(1, max-abs entry of M); the verdict is true iff
    min_eigenvalue >= -tolerance_used.
    """
    S = symmetrize(M)
    w = np.linalg.eigvalsh(S)
    min_eig = float(w[0])
    tolerance = tol * max(1.0, float(np.max(np.abs(S))) if S.size else 0.0)
    return PsdVerdict(is_psd=min_eig >= -tolerance, min_eigenvalue=min_eig,
                      tolerance_used=tolerance)
