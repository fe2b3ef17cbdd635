"""PSD block-matrix certificates and a joint-range convexity probe.

A certificate is an (n+1)x(n+1) symmetric matrix whose positive
semidefiniteness proves a global lower bound on the corresponding nonconvex
objective.  The probe samples the planar joint range of a pair of quadratics
and reports how often midpoints of sampled range points can be realized;
for homogeneous pairs the range is provably convex, so the expected fraction
is 1, while a fraction below 1 on a general pair witnesses nonconvexity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import optimize

from . import linalg
from .backward_error import BEProblem
from .prs import PRSProblem, phi

DEFAULT_CERT_TOL = 1e-8
PROBE_TOL = 1e-6


@dataclass(frozen=True)
class CertificateReport:
    kind: Literal["prs", "be"]
    block_matrix: np.ndarray
    min_eigenvalue: float
    verdict: bool
    parameters: tuple[float, float]  # (lambda, t) for prs, (lambda, w) for be


@dataclass(frozen=True)
class QuadraticPair:
    """Two quadratics f(x) = x'Ax + a'x + p and g(x) = x'Bx + b'x + q."""

    A: np.ndarray
    B: np.ndarray
    a: np.ndarray
    b: np.ndarray
    p: float = 0.0
    q: float = 0.0

    def validated(self) -> "QuadraticPair":
        A = linalg.symmetrize(self.A)
        B = linalg.symmetrize(self.B)
        if B.shape != A.shape:
            raise linalg.InvalidInput("A and B dimensions differ")
        a = linalg.as_vector(self.a, A.shape[0])
        b = linalg.as_vector(self.b, A.shape[0])
        return QuadraticPair(A, B, a, b, float(self.p), float(self.q))

    def f(self, x) -> float:
        return float(x @ self.A @ x + self.a @ x + self.p)

    def g(self, x) -> float:
        return float(x @ self.B @ x + self.b @ x + self.q)

    @property
    def homogeneous(self) -> bool:
        return (not np.any(self.a) and not np.any(self.b)
                and self.p == 0.0 and self.q == 0.0)


@dataclass(frozen=True)
class ProbeReport:
    fraction_realized: float
    worst_residual: float
    samples: int
    trials: int
    seed: int
    homogeneous: bool


def _report(kind, M, params, tol) -> CertificateReport:
    v = linalg.psd_check(M, tol)
    return CertificateReport(kind=kind, block_matrix=M,
                             min_eigenvalue=v.min_eigenvalue,
                             verdict=v.is_psd, parameters=params)


def prs_certificate(prob: PRSProblem, lam: float, t: float,
                    tol: float = DEFAULT_CERT_TOL) -> CertificateReport:
    """Certificate that x'Ax + b'x + rho||x||^p >= t for all x.

    The block matrix [[A + lam I, b/2], [b'/2, phi(lam) - t]] is PSD exactly
    when the shifted quadratic plus the exact z-minimum dominates t globally.
    """
    prob = prob.validated()
    if not (np.isfinite(lam) and lam >= 0.0):
        raise linalg.InvalidInput("lam must be a finite real >= 0")
    n = prob.n
    phi_val, _ = phi(lam, prob.p, prob.rho)
    M = np.zeros((n + 1, n + 1))
    M[:n, :n] = prob.A + lam * np.eye(n)
    M[:n, n] = prob.b / 2.0
    M[n, :n] = prob.b / 2.0
    M[n, n] = phi_val - t
    return _report("prs", M, (float(lam), float(t)), tol)


def be_certificate(prob: BEProblem, lam: float, w: float,
                   tol: float = DEFAULT_CERT_TOL) -> CertificateReport:
    """Certificate block [[A'A - lam I, -A'b], [-b'A, w]] for the dual bound."""
    prob = prob.validated()
    n = prob.n
    G = prob.A.T @ prob.A
    g = prob.A.T @ prob.b
    M = np.zeros((n + 1, n + 1))
    M[:n, :n] = G - lam * np.eye(n)
    M[:n, n] = -g
    M[n, :n] = -g
    M[n, n] = w
    return _report("be", M, (float(lam), float(w)), tol)


def joint_range_probe(pair: QuadraticPair, samples: int = 2000, trials: int = 40,
                      seed: int = 0, restarts: int = 20) -> ProbeReport:
    """Empirical convexity probe of the joint range {(f(x), g(x))}.

    Draws a Gaussian point cloud, maps it through (f, g), and for random
    pairs of images tries to realize the midpoint by local least-squares.
    A fraction below 1 is a nonconvexity witness; a fraction of 1 is
    supporting evidence only (except for homogeneous pairs, where convexity
    is guaranteed).
    """
    pair = pair.validated()
    if samples < 1000:
        raise linalg.InvalidInput("samples must be at least 1000")
    if trials < 10:
        raise linalg.InvalidInput("trials must be at least 10")
    rng = np.random.default_rng(seed)
    n = pair.A.shape[0]
    data_scale = max(np.abs(pair.A).max(), np.abs(pair.B).max(),
                     np.abs(pair.a).max() if n else 0.0,
                     np.abs(pair.b).max() if n else 0.0, abs(pair.p), abs(pair.q))
    cloud_scale = 3.0 * (1.0 + data_scale)
    X = rng.normal(scale=cloud_scale, size=(samples, n))
    F = np.einsum("ij,jk,ik->i", X, pair.A, X) + X @ pair.a + pair.p
    G = np.einsum("ij,jk,ik->i", X, pair.B, X) + X @ pair.b + pair.q

    span = max(1.0, float(np.abs(F).max()), float(np.abs(G).max()))
    tol = PROBE_TOL * span

    def misfit(x, u, v):
        return (pair.f(x) - u) ** 2 + (pair.g(x) - v) ** 2

    def misfit_grad(x, u, v):
        df = 2.0 * pair.A @ x + pair.a
        dg = 2.0 * pair.B @ x + pair.b
        return 2.0 * (pair.f(x) - u) * df + 2.0 * (pair.g(x) - v) * dg

    realized = 0
    worst = 0.0
    for _ in range(trials):
        i, j = rng.integers(0, samples, size=2)
        u = 0.5 * (F[i] + F[j])
        v = 0.5 * (G[i] + G[j])
        best = np.inf
        for k in range(restarts):
            x0 = 0.5 * (X[i] + X[j]) if k == 0 else rng.normal(scale=cloud_scale, size=n)
            res = optimize.minimize(misfit, x0, args=(u, v), jac=misfit_grad,
                                    method="BFGS",
                                    options={"maxiter": 400, "gtol": 1e-14})
            best = min(best, float(res.fun))
            if np.sqrt(max(best, 0.0)) <= tol:
                break
        resid = float(np.sqrt(max(best, 0.0)))
        if resid <= tol:
            realized += 1
        worst = max(worst, resid / span)

    return ProbeReport(fraction_realized=realized / trials, worst_residual=worst,
                       samples=samples, trials=trials, seed=int(seed),
                       homogeneous=pair.homogeneous)
