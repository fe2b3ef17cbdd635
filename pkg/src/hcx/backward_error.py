"""Global solver for the normwise backward-error criterion

    minimize  ||Ax - b|| / (||A|| ||x|| + ||b||)

over x in R^n, where ||A|| is the spectral norm.  After short-circuiting
consistent systems and b = 0, the squared optimal value t* is obtained from
the univariate convex dual

    F(lam) = ||A||^2/lam + ||b||^2 / (||b||^2 - b'A (A'A - lam I)^+ A'b)

minimized over the admissible interval below lambda_min(A'A); then
t* = 1/F(lam*) and a primal point is rebuilt from two sphere-constrained
quadratic subproblems plus a one-dimensional interpolation root-find.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from . import linalg, trs
from .errors import (DegenerateInstance, DomainError, InternalInconsistency,
                     InvalidInput, NoConvergence)
from .options import SolverOptions

Path = Literal["linear_system", "zero_b", "interpolated", "endpoint_min", "endpoint_max"]

# Residual threshold (relative to 1 + ||b||) below which Ax = b counts as solvable.
CONSISTENT_TOL = 1e-10
# Endpoint tolerance for accepting x_m / x_M directly, relative to 1 + T.
ENDPOINT_TOL = 1e-8
ALPHA_TOL = 1e-9
MAX_BISECT = 200


@dataclass(frozen=True)
class BEProblem:
    A: np.ndarray
    b: np.ndarray

    def validated(self) -> "BEProblem":
        A = np.asarray(self.A, dtype=float)
        if A.ndim != 2:
            raise InvalidInput("A must be a 2-D matrix")
        if not np.all(np.isfinite(A)):
            raise InvalidInput("A has non-finite entries")
        b = linalg.as_vector(self.b, A.shape[0])
        if not np.any(A):
            raise InvalidInput("A must be nonzero (||A|| > 0 required)")
        return BEProblem(A, b)

    @property
    def m(self) -> int:
        return np.asarray(self.A).shape[0]

    @property
    def n(self) -> int:
        return np.asarray(self.A).shape[1]


@dataclass(frozen=True)
class BESolution:
    ratio: float
    t_star: float
    lambda_star: float
    z_star: float
    x: np.ndarray
    alpha: Optional[float]
    path: Path
    certificate: "object"  # CertificateReport; typed loosely to avoid an import cycle


def evaluate_ratio(prob: BEProblem, x) -> float:
    """The backward-error ratio at x; always in [0, 1]."""
    prob = prob.validated()
    x = linalg.as_vector(x, prob.n)
    a_norm = linalg.spectral_norm(prob.A)
    den = a_norm * float(np.linalg.norm(x)) + float(np.linalg.norm(prob.b))
    if den <= 0.0:
        raise InvalidInput("||A|| ||x|| + ||b|| must be positive")
    return float(np.linalg.norm(prob.A @ x - prob.b)) / den


class _Dual:
    """Dual machinery for one instance: eigen data of G = A'A and g = A'b."""

    def __init__(self, prob: BEProblem):
        self.prob = prob
        self.G = prob.A.T @ prob.A
        self.E = linalg.eigh(self.G)
        self.g_eig = self.E.eigenvectors.T @ (prob.A.T @ prob.b)
        self.a_norm_sq = self.E.lambda_max  # ||A||^2 = lambda_max(A'A)
        self.b_norm_sq = float(prob.b @ prob.b)
        self.lam_min = max(self.E.lambda_min, 0.0)  # G is a Gram matrix
        self.in_range = linalg.range_membership(self.E, self.E.eigenvectors @ self.g_eig)

    def _quad_terms(self, lam: float) -> tuple[float, float]:
        """b'A (G - lam I)^+ A'b and its lam-derivative (pseudoinverse form)."""
        d = self.E.eigenvalues - lam
        scale = max(1.0, float(np.max(np.abs(self.E.eigenvalues))), abs(lam))
        keep = np.abs(d) > 1e-12 * scale
        c = self.g_eig[keep]
        dk = d[keep]
        q = float((c * c / dk).sum())
        dq = float((c * c / dk ** 2).sum())
        return q, dq

    def lam_hi(self) -> float:
        """Right end of the lam-interval dictated by the case analysis."""
        return self.lam_min

    def check_admissible(self, lam: float):
        if not (np.isfinite(lam) and lam > 0.0):
            raise DomainError("lam must be a finite real > 0")
        hi = self.lam_hi()
        eps = 1e-12 * max(1.0, hi)
        if self.in_range:
            if lam > hi + eps:
                raise DomainError(f"lam={lam} above lambda_min(A'A)={hi}")
        else:
            if lam >= hi - eps:
                raise DomainError(f"lam={lam} not strictly below lambda_min(A'A)={hi}")

    def value_and_derivative(self, lam: float) -> tuple[float, float]:
        self.check_admissible(lam)
        q, dq = self._quad_terms(lam)
        den = self.b_norm_sq - q
        if den <= 0.0:
            raise DomainError("denominator ||b||^2 - b'A(A'A - lam I)^+A'b is nonpositive")
        value = self.a_norm_sq / lam + self.b_norm_sq / den
        deriv = -self.a_norm_sq / lam ** 2 + self.b_norm_sq * dq / den ** 2
        return value, deriv

    def admissible(self, lam: float) -> bool:
        try:
            self.value_and_derivative(lam)
            return True
        except DomainError:
            return False


def be_dual_value(lam: float, prob: BEProblem) -> float:
    """Dual objective F(lam); raises DomainError outside the admissible set."""
    return _Dual(prob.validated()).value_and_derivative(lam)[0]


def be_dual_value_and_derivative(lam: float, prob: BEProblem) -> tuple[float, float]:
    return _Dual(prob.validated()).value_and_derivative(lam)


def _admissible_right_edge(dual: _Dual) -> float:
    """Largest admissible lam (positive denominator, within the case interval)."""
    hi = dual.lam_hi()
    if hi <= 0.0:
        raise DegenerateInstance("admissible interval is empty: lambda_min(A'A) = 0")
    eps = 1e-12 * max(1.0, hi)
    right = hi - eps if not dual.in_range else hi
    if dual.admissible(right):
        return right
    # Denominator turns negative before lambda_min; bisect to find the
    # positive-denominator region's right edge.
    lo_edge, hi_edge = eps, right
    if not dual.admissible(lo_edge):
        raise DegenerateInstance("no admissible lam found near 0")
    for _ in range(200):
        mid = 0.5 * (lo_edge + hi_edge)
        if dual.admissible(mid):
            lo_edge = mid
        else:
            hi_edge = mid
    return lo_edge


def _minimize_dual(dual: _Dual, opts: SolverOptions) -> tuple[float, int]:
    """Minimize the convex F over its admissible interval.

    F' goes from -inf at lam -> 0+ to +inf where the denominator vanishes (or
    to its boundary value at lambda_min on the hard-case branch), so either an
    interior sign change exists or the right endpoint is the minimizer.
    """
    hi = dual.lam_hi()
    right = _admissible_right_edge(dual)
    eps = 1e-12 * max(1.0, hi)
    if right >= hi - 2.0 * eps or (dual.in_range and right == hi):
        _, d_right = dual.value_and_derivative(right)
        if d_right <= 0.0:
            # Boundary minimizer (hard-case branch attains the right endpoint).
            return right, 0

    lo, hi_b = eps * max(1.0, right), right
    # Guard: F' must be negative near 0 (the ||A||^2/lam term dominates).
    while dual.value_and_derivative(lo)[1] >= 0.0 and lo > 1e-300:
        lo *= 0.5

    lam = 0.5 * (lo + hi_b)
    iterations = 0
    for iterations in range(1, opts.max_iter + 1):
        try:
            _, der = dual.value_and_derivative(lam)
        except DomainError:
            hi_b = lam
            lam = 0.5 * (lo + hi_b)
            continue
        scale = abs(dual.a_norm_sq / lam ** 2) + 1.0
        if abs(der) <= opts.stationarity_tol * scale or hi_b - lo <= 1e-16 * max(1.0, hi_b):
            break
        if der < 0.0:
            lo = lam
        else:
            hi_b = lam
        lam = 0.5 * (lo + hi_b)
    else:
        raise NoConvergence("dual minimization did not converge", best=lam)
    return lam, iterations


def recover_x_be(prob: BEProblem, t_star: float, z_star: float
                 ) -> tuple[np.ndarray, Optional[float], Path]:
    """Rebuild a primal point from (t*, z*).

    Solves the min and max of ||Ax - b||^2 on the sphere ||x||^2 = z*, then
    either returns the endpoint attaining the target residual or root-finds
    the normalized interpolation x(alpha) between them.
    """
    prob = prob.validated()
    if not (0.0 < t_star < 1.0) or not z_star > 0.0:
        raise InvalidInput("need t_star in (0,1) and z_star > 0")
    G = prob.A.T @ prob.A
    c = -2.0 * (prob.A.T @ prob.b)
    a_norm = linalg.spectral_norm(prob.A)
    b_norm = float(np.linalg.norm(prob.b))
    T = t_star * (a_norm * np.sqrt(z_star) + b_norm) ** 2

    res_m = trs.solve_trs(trs.TRSRequest(G, c, z_star, "sphere", "min"))
    res_M = trs.solve_trs(trs.TRSRequest(G, c, z_star, "sphere", "max"))
    x_m, x_M = res_m.x, res_M.x

    def resid_sq(x):
        r = prob.A @ x - prob.b
        return float(r @ r)

    tol = ENDPOINT_TOL * (1.0 + T)
    if abs(resid_sq(x_m) - T) <= tol:
        return x_m, None, "endpoint_min"
    if abs(resid_sq(x_M) - T) <= tol:
        return x_M, None, "endpoint_max"

    sqrt_z = np.sqrt(z_star)

    def x_of(alpha):
        v = x_m + alpha * (x_M - x_m)
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            # Antipodal endpoints; nudge off the singular parameter.
            v = x_m + (alpha + 1e-12) * (x_M - x_m)
            nrm = np.linalg.norm(v)
        return sqrt_z * v / nrm

    def gap(alpha):
        return resid_sq(x_of(alpha)) - T

    g0, g1 = gap(0.0), gap(1.0)
    if not (g0 < 0.0 < g1):
        raise InternalInconsistency(
            "interpolation bracket missing: endpoint residuals do not straddle "
            "the target; upstream dual value is suspect")
    lo, hi = 0.0, 1.0
    alpha = 0.5
    for _ in range(MAX_BISECT):
        g = gap(alpha)
        if abs(g) <= ALPHA_TOL * (1.0 + T):
            break
        if g < 0.0:
            lo = alpha
        else:
            hi = alpha
        alpha = 0.5 * (lo + hi)
    return x_of(alpha), float(alpha), "interpolated"


def solve_be(prob: BEProblem, opts: Optional[SolverOptions] = None) -> BESolution:
    """Globally solve the backward-error criterion."""
    prob = prob.validated()
    opts = opts or SolverOptions()
    from .certificates import be_certificate  # local import avoids a cycle

    a_norm = linalg.spectral_norm(prob.A)
    b_norm = float(np.linalg.norm(prob.b))

    # b = 0 must be handled before the consistency check: x = 0 solves
    # Ax = 0 but leaves the ratio undefined, and the optimal value is
    # sqrt(lambda_min(A'A))/||A|| attained at the minimal eigenvector.
    if b_norm == 0.0:
        dual = _Dual(prob)
        E = dual.E
        lam_min = E.lambda_min if E.lambda_min > 1e-12 * max(E.lambda_max, 1.0) \
            else 0.0
        ratio = float(np.sqrt(max(lam_min, 0.0)) / a_norm)
        x = E.eigenvectors[:, 0]
        cert = be_certificate(prob, lam_min, 0.0)
        return BESolution(ratio=ratio, t_star=ratio ** 2, lambda_star=float(lam_min),
                          z_star=1.0, x=x, alpha=None, path="zero_b", certificate=cert)

    # Consistent system: any least-squares solution is optimal with ratio 0.
    x_ls, *_ = np.linalg.lstsq(prob.A, prob.b, rcond=None)
    if float(np.linalg.norm(prob.A @ x_ls - prob.b)) <= CONSISTENT_TOL * (1.0 + b_norm):
        cert = be_certificate(prob, 0.0, b_norm ** 2)
        return BESolution(ratio=0.0, t_star=0.0, lambda_star=0.0, z_star=0.0,
                          x=x_ls, alpha=None, path="linear_system", certificate=cert)

    dual = _Dual(prob)

    lam_star, _ = _minimize_dual(dual, opts)
    F_star, _ = dual.value_and_derivative(lam_star)
    t_star = 1.0 / F_star
    denom = lam_star - t_star * dual.a_norm_sq
    if denom <= 0.0:
        raise InternalInconsistency("lam* <= t*||A||^2; dual minimization is suspect")
    z_star = (t_star * a_norm * b_norm / denom) ** 2

    x, alpha, path = recover_x_be(prob, t_star, z_star)

    w_star = (dual.b_norm_sq - t_star * dual.b_norm_sq
              - t_star ** 2 * dual.a_norm_sq * dual.b_norm_sq / denom)
    cert = be_certificate(prob, lam_star, w_star)

    return BESolution(ratio=float(np.sqrt(t_star)), t_star=float(t_star),
                      lambda_star=float(lam_star), z_star=float(z_star),
                      x=x, alpha=alpha, path=path, certificate=cert)
