"""Trust-region subproblems on a ball or sphere.

Minimizes (or maximizes) x'Qx + c'x subject to ||x||^2 <= r2 (ball) or
||x||^2 = r2 (sphere).  The sphere case is solved through the secular
equation in the multiplier mu, with explicit easy/hard-case handling;
maximization is realized by negating (Q, c) so there is a single secular
solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import linalg
from .errors import InvalidInput, NoConvergence

# Projection of c onto the minimal eigenspace below this (relative) threshold
# marks a hard-case candidate.
HARD_CASE_TOL = 1e-8
# Convergence on the secular residual | ||x||^2 - r2 |.
SECULAR_TOL = 1e-10
MAX_SECULAR_ITER = 100

Constraint = Literal["ball", "sphere"]
Sense = Literal["min", "max"]
Case = Literal["interior", "easy_boundary", "hard_boundary"]


@dataclass(frozen=True)
class TRSRequest:
    Q: np.ndarray
    c: np.ndarray
    radius_sq: float
    constraint: Constraint = "sphere"
    sense: Sense = "min"

    def validated(self) -> "TRSRequest":
        Q = linalg.symmetrize(self.Q)
        c = linalg.as_vector(self.c, Q.shape[0])
        if not (np.isfinite(self.radius_sq) and self.radius_sq > 0):
            raise InvalidInput("radius_sq must be positive and finite")
        if self.constraint == "ball" and self.sense == "max":
            raise InvalidInput("ball constraint only supports sense 'min'")
        if self.constraint not in ("ball", "sphere"):
            raise InvalidInput(f"unknown constraint {self.constraint!r}")
        if self.sense not in ("min", "max"):
            raise InvalidInput(f"unknown sense {self.sense!r}")
        return TRSRequest(Q, c, float(self.radius_sq), self.constraint, self.sense)


@dataclass(frozen=True)
class TRSResult:
    x: np.ndarray
    multiplier: float
    objective: float
    case: Case
    kkt_residual: float


@dataclass(frozen=True)
class KKTReport:
    residual: float
    second_order_psd: bool
    feasibility_gap: float


def _objective(Q: np.ndarray, c: np.ndarray, x: np.ndarray) -> float:
    return float(x @ Q @ x + c @ x)


def _stationarity_residual(Q, c, x, mu_hat) -> float:
    r = 2.0 * (Q @ x + mu_hat * x) + c
    return float(np.linalg.norm(r) / (1.0 + np.linalg.norm(c)))


def _x_of_mu(E: linalg.SymEig, c_eig: np.ndarray, mu: float) -> np.ndarray:
    """Eigenbasis coordinates of -(Q + mu I)^{-1} c / 2 (exact inverse)."""
    return -c_eig / (2.0 * (E.eigenvalues + mu))


def _solve_min_sphere(Q: np.ndarray, c: np.ndarray, r2: float) -> TRSResult:
    E = linalg.eigh(Q)
    c_eig = E.eigenvectors.T @ c
    mu_bar = -E.lambda_min

    Qmin = E.min_eigenspace()
    c_norm = float(np.linalg.norm(c))
    hard_candidate = float(np.linalg.norm(Qmin.T @ c)) <= HARD_CASE_TOL * (1.0 + c_norm)

    if hard_candidate:
        x_bar = linalg.apply_shifted_pinv(E, mu_bar, -c) / 2.0
        gap = r2 - float(x_bar @ x_bar)
        if gap >= -SECULAR_TOL * (1.0 + r2):
            # Hard case: complete with a minimal-eigenvector term, tau >= 0.
            tau = np.sqrt(max(gap, 0.0))
            x = x_bar + tau * Qmin[:, 0]
            res = _stationarity_residual(Q, c, x, mu_bar)
            return TRSResult(x, mu_bar, _objective(Q, c, x), "hard_boundary", res)

    # Easy case: ||x(mu)||^2 is strictly decreasing on (mu_bar, inf) and
    # exceeds r2 at the left end, so a bracketed root exists.
    lo = mu_bar + 1e-14 * max(1.0, abs(mu_bar))
    hi = mu_bar + c_norm / (2.0 * np.sqrt(r2)) + 1.0

    def secular(mu):
        d = E.eigenvalues + mu
        xe = -c_eig / (2.0 * d)
        nrm2 = float(xe @ xe)
        return nrm2 - r2, float(-(xe * xe / d).sum() * 2.0)

    f_lo, _ = secular(lo)
    if f_lo <= 0.0:
        # Left endpoint already feasible (pathological rounding); accept it.
        mu = lo
    else:
        mu = 0.5 * (lo + hi)
        tol = SECULAR_TOL * (1.0 + r2)
        for _ in range(MAX_SECULAR_ITER):
            f, df = secular(mu)
            if abs(f) <= tol:
                break
            if f > 0.0:
                lo = mu
            else:
                hi = mu
            step_ok = df != 0.0
            if step_ok:
                mu_newton = mu - f / df
                step_ok = lo < mu_newton < hi
            mu = mu_newton if step_ok else 0.5 * (lo + hi)
        else:
            f, _ = secular(mu)
            if abs(f) > 1e3 * tol:
                raise NoConvergence("secular equation did not converge", best=mu)

    x = E.eigenvectors @ _x_of_mu(E, c_eig, mu)
    res = _stationarity_residual(Q, c, x, mu)
    return TRSResult(x, mu, _objective(Q, c, x), "easy_boundary", res)


def solve_trs(req: TRSRequest) -> TRSResult:
    """Globally solve the requested ball/sphere quadratic subproblem."""
    req = req.validated()
    Q, c, r2 = req.Q, req.c, req.radius_sq

    if req.sense == "max":
        neg = _solve_min_sphere(-Q, -c, r2)
        # Stationarity of the original data holds with mu_hat = -multiplier;
        # the residual vector is the exact negation of the negated problem's.
        return TRSResult(neg.x, neg.multiplier, -neg.objective, neg.case,
                         neg.kkt_residual)

    if req.constraint == "ball":
        E = linalg.eigh(Q)
        scale = E.scale()
        if E.lambda_min >= -1e-10 * scale:
            x0 = linalg.apply_shifted_pinv(E, 0.0, -c) / 2.0
            stationary = _stationarity_residual(Q, c, x0, 0.0) <= 1e-9
            if stationary and float(x0 @ x0) <= r2 * (1.0 + 1e-8):
                return TRSResult(x0, 0.0, _objective(Q, c, x0), "interior",
                                 _stationarity_residual(Q, c, x0, 0.0))
        return _solve_min_sphere(Q, c, r2)

    return _solve_min_sphere(Q, c, r2)


def kkt_report(req: TRSRequest, res: TRSResult) -> KKTReport:
    """Recompute the KKT residual and the second-order PSD verdict."""
    req = req.validated()
    mu_hat = res.multiplier if req.sense == "min" else -res.multiplier
    residual = _stationarity_residual(req.Q, req.c, res.x, mu_hat)
    # Second-order condition of the minimization form actually solved.
    M = req.Q if req.sense == "min" else -req.Q
    verdict = linalg.psd_check(M + res.multiplier * np.eye(M.shape[0])).is_psd
    feas = float(res.x @ res.x) - req.radius_sq
    return KKTReport(residual=residual, second_order_psd=verdict, feasibility_gap=feas)
