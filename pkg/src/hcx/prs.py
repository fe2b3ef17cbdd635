"""Global solver for the generalized p-regularized subproblem.

    minimize  h(x) = x'Ax + b'x + rho * ||x||^p,      p > 2, rho > 0.

The problem is hidden-convex: its optimal value equals the maximum of the
univariate concave dual

    d(lam) = phi(lam) - b' (A + lam I)^+ b / 4

over lam >= max(0, -lambda_min(A)), where phi(lam) is the exact minimum of
rho*z^(p/2) - lam*z over z >= 0.  We maximize d by safeguarded Newton on
d'(lam) = 0 and recover the primal point from the optimal multiplier.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from . import linalg, trs
from .errors import DomainError, InvalidInput, NoConvergence
from .options import SolverOptions

Case = Literal["easy", "hard", "convex"]


@dataclass(frozen=True)
class PRSProblem:
    A: np.ndarray
    b: np.ndarray
    p: float
    rho: float = 1.0

    def validated(self) -> "PRSProblem":
        A = linalg.symmetrize(self.A)
        b = linalg.as_vector(self.b, A.shape[0])
        if not (np.isfinite(self.p) and self.p > 2.0):
            raise InvalidInput("p must be a finite real > 2")
        if not (np.isfinite(self.rho) and self.rho > 0.0):
            raise InvalidInput("rho must be a finite real > 0")
        return PRSProblem(A, b, float(self.p), float(self.rho))

    @property
    def n(self) -> int:
        return np.asarray(self.A).shape[0]


@dataclass(frozen=True)
class PRSSolution:
    value: float
    x: np.ndarray
    lambda_star: float
    z_star: float
    case: Case
    dual_gap_bound: float
    iterations: int
    certificate: "object"  # CertificateReport; typed loosely to avoid an import cycle


def phi(lam: float, p: float, rho: float = 1.0) -> tuple[float, float]:
    """Value and derivative of min_{z>=0} rho*z^(p/2) - lam*z.

    Closed form: the minimizer is z_opt = (2*lam/(p*rho))^(2/(p-2)) and the
    derivative in lam is -z_opt.  Both value and derivative vanish at lam=0.
    """
    if not (np.isfinite(lam) and lam >= 0.0):
        raise InvalidInput("lam must be a finite real >= 0")
    if not (np.isfinite(p) and p > 2.0 and np.isfinite(rho) and rho > 0.0):
        raise InvalidInput("need p > 2 and rho > 0")
    if lam == 0.0:
        return 0.0, 0.0
    # Stationarity gives rho*z^(p/2) = (2*lam/p)*z at the minimizer, hence
    # value = -lam*z_opt*(p-2)/p.  Computed in log space: the exponent
    # 2/(p-2) blows up as p -> 2+, so overflow maps to -inf.
    with np.errstate(divide="ignore"):
        log_z = (2.0 / (p - 2.0)) * np.log(2.0 * lam / (p * rho))
    if log_z > 700.0:
        return -np.inf, -np.inf
    zo = np.exp(log_z)
    return float(-lam * zo * (p - 2.0) / p), float(-zo)


def z_opt(lam: float, p: float, rho: float = 1.0) -> float:
    """Minimizer of rho*z^(p/2) - lam*z over z >= 0."""
    if lam <= 0.0:
        return 0.0
    return (2.0 * lam / (p * rho)) ** (2.0 / (p - 2.0))


def evaluate_objective(prob: PRSProblem, x) -> float:
    prob = prob.validated()
    x = linalg.as_vector(x, prob.n)
    nrm = float(np.linalg.norm(x))
    return float(x @ prob.A @ x + prob.b @ x + prob.rho * nrm ** prob.p)


class _Dual:
    """Dual function machinery bound to one eigendecomposed instance."""

    def __init__(self, prob: PRSProblem):
        self.prob = prob
        self.E = linalg.eigh(prob.A)
        self.b_eig = self.E.eigenvectors.T @ prob.b
        self.lam_min = self.E.lambda_min
        self.lam_lo = max(0.0, -self.lam_min)
        scale = self.E.scale()
        # The shifted matrix A + lam_lo*I is singular iff lambda_min <= 0.
        self.boundary_singular = self.lam_min <= linalg.CLUSTER_TOL * scale
        self.in_range = linalg.range_membership(self.E, prob.b)

    def _pinv_coeffs(self, lam: float) -> np.ndarray:
        d = self.E.eigenvalues + lam
        scale = max(1.0, float(np.max(np.abs(d))))
        keep = np.abs(d) > 1e-12 * scale
        out = np.zeros_like(d)
        out[keep] = self.b_eig[keep] / d[keep]
        return out

    def check_admissible(self, lam: float):
        if not np.isfinite(lam):
            raise DomainError("lam must be finite")
        eps = 1e-12 * max(1.0, self.lam_lo)
        if lam < self.lam_lo - eps:
            raise DomainError(f"lam={lam} below the admissible boundary {self.lam_lo}")
        if self.boundary_singular and not self.in_range and lam <= self.lam_lo + eps:
            raise DomainError("boundary excluded: b not in Range(A - lambda_min I)")

    def value_and_derivative(self, lam: float) -> tuple[float, float]:
        self.check_admissible(lam)
        phi_v, phi_d = phi(max(lam, 0.0), self.prob.p, self.prob.rho)
        c = self._pinv_coeffs(lam)
        quad = float(self.b_eig @ c) / 4.0
        deriv = phi_d + float(c @ c) / 4.0
        return phi_v - quad, deriv

    def derivative(self, lam: float) -> float:
        return self.value_and_derivative(lam)[1]


def dual_value(lam: float, prob: PRSProblem) -> float:
    """Dual objective d(lam); raises DomainError outside the admissible set."""
    return _Dual(prob.validated()).value_and_derivative(lam)[0]


def dual_value_and_derivative(lam: float, prob: PRSProblem) -> tuple[float, float]:
    return _Dual(prob.validated()).value_and_derivative(lam)


def _maximize_dual(dual: _Dual, opts: SolverOptions) -> tuple[float, int]:
    """Find the interior root of the decreasing d'(lam) by safeguarded Newton."""
    prob = dual.prob
    scale = dual.E.scale()
    lo = dual.lam_lo + 1e-12 * max(1.0, dual.lam_lo)
    if dual.boundary_singular:
        # Keep clear of the singular shift so the exact-inverse branch is used.
        lo = dual.lam_lo + 1e-9 * scale
        while dual.derivative(lo) <= 0.0 and lo > dual.lam_lo:
            lo = dual.lam_lo + 0.5 * (lo - dual.lam_lo)
            if lo - dual.lam_lo < 1e-15 * scale:
                break
    hi = max(2.0 * lo, dual.lam_lo + 1.0)
    grow = 0
    while dual.derivative(hi) > 0.0:
        hi = 2.0 * hi + 1.0
        grow += 1
        if grow > 200:
            raise NoConvergence("no upper bracket for the dual maximizer", best=hi)

    lam = 0.5 * (lo + hi)
    iterations = 0
    for iterations in range(1, opts.max_iter + 1):
        val, der = dual.value_and_derivative(lam)
        tol = opts.stationarity_tol * (1.0 + z_opt(lam, prob.p, prob.rho))
        if abs(der) <= tol:
            break
        if der > 0.0:
            lo = lam
        else:
            hi = lam
        # Newton on d' using a finite-difference curvature safeguard-free form:
        # d'' is available analytically.
        d2 = _dual_second_derivative(dual, lam)
        lam_newton = lam - der / d2 if d2 < 0.0 else np.inf
        lam = lam_newton if lo < lam_newton < hi else 0.5 * (lo + hi)
    else:
        val, der = dual.value_and_derivative(lam)
        tol = opts.stationarity_tol * (1.0 + z_opt(lam, prob.p, prob.rho))
        if abs(der) > 1e4 * tol and hi - lo > 1e-12 * max(1.0, hi):
            raise NoConvergence("dual maximization did not converge", best=lam)
    return lam, iterations


def _dual_second_derivative(dual: _Dual, lam: float) -> float:
    p, rho = dual.prob.p, dual.prob.rho
    z = z_opt(lam, p, rho)
    curv_phi = -(2.0 / (p - 2.0)) * z / lam if lam > 0.0 else 0.0
    c = dual._pinv_coeffs(lam)
    d = dual.E.eigenvalues + lam
    nz = np.abs(d) > 0
    curv_quad = -0.5 * float((c[nz] ** 2 / d[nz]).sum())
    return curv_phi + curv_quad


def solve_prs(prob: PRSProblem, opts: Optional[SolverOptions] = None) -> PRSSolution:
    """Globally solve the p-regularized subproblem via its univariate dual."""
    prob = prob.validated()
    opts = opts or SolverOptions()
    dual = _Dual(prob)

    iterations = 0
    boundary = False
    if not (dual.boundary_singular and not dual.in_range):
        # The boundary multiplier is admissible; the maximizer sits there
        # exactly when the dual derivative is already nonpositive.
        _, dp0 = dual.value_and_derivative(dual.lam_lo)
        if dp0 <= opts.stationarity_tol * (1.0 + z_opt(dual.lam_lo, prob.p, prob.rho)):
            boundary = True
            lam_star = dual.lam_lo
    if not boundary:
        lam_star, iterations = _maximize_dual(dual, opts)

    value, _ = dual.value_and_derivative(lam_star)
    zs = z_opt(lam_star, prob.p, prob.rho)

    if dual.lam_min >= -1e-12 * dual.E.scale():
        case: Case = "convex"
    else:
        case = "hard" if boundary else "easy"

    if boundary:
        if zs <= 0.0:
            x = np.zeros(prob.n)
        else:
            # Recover the deterministic hard-case representative through the
            # sphere-constrained subproblem at radius^2 = z*.
            res = trs.solve_trs(trs.TRSRequest(prob.A, prob.b, zs,
                                               constraint="sphere", sense="min"))
            x = res.x
    else:
        x = dual._pinv_coeffs(lam_star) * -0.5
        x = dual.E.eigenvectors @ x

    primal = evaluate_objective(prob, x)
    gap = abs(primal - value)

    from .certificates import prs_certificate  # local import avoids a cycle
    cert = prs_certificate(prob, lam_star, value)

    return PRSSolution(value=float(value), x=x, lambda_star=float(lam_star),
                       z_star=float(zs), case=case, dual_gap_bound=float(gap),
                       iterations=iterations, certificate=cert)
