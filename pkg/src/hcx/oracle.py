"""Brute-force reference solvers, independent of the dual-based pipeline.

Multi-start local descent plus coarse scans; statistical evidence of global
optimality at desk scale, used to cross-check the certified solvers.  Results
are deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import linalg
from .backward_error import BEProblem, evaluate_ratio
from .prs import PRSProblem, evaluate_objective


@dataclass(frozen=True)
class OracleReport:
    value: float
    x: np.ndarray
    starts: int
    best_start_index: int
    spread: float  # gap between the best and second-best basin found


def _collect(points, values):
    order = np.argsort(values, kind="stable")
    best = int(order[0])
    spread = float(values[order[1]] - values[order[0]]) if len(order) > 1 else np.inf
    return best, spread


def oracle_prs(prob: PRSProblem, starts: int = 30, seed: int = 0) -> OracleReport:
    """Multi-start descent on h(x) = x'Ax + b'x + rho||x||^p."""
    prob = prob.validated()
    rng = np.random.default_rng(seed)
    n = prob.n
    A, b, p, rho = prob.A, prob.b, prob.p, prob.rho

    # Beyond this radius the radial derivative of h is positive, so the
    # global minimizer lies inside; scans and starts stay within it.
    a_norm = linalg.spectral_norm(A)
    R = 3.0 * (2.0 * max(a_norm, 1e-12) / (rho * p)) ** (1.0 / (p - 2.0)) \
        + float(np.linalg.norm(b)) + 1.0

    def fun(x):
        nrm = np.linalg.norm(x)
        return float(x @ A @ x + b @ x + rho * nrm ** p)

    def grad(x):
        nrm = np.linalg.norm(x)
        rad = rho * p * nrm ** (p - 2.0) * x if nrm > 0 else np.zeros_like(x)
        return 2.0 * A @ x + b + rad

    x0s = [np.zeros(n)]
    for _ in range(starts - 1):
        u = rng.normal(size=n)
        u /= np.linalg.norm(u)
        x0s.append(R * rng.uniform() ** (1.0 / n) * u)
    # Radial scan along +/- b and a few random directions catches basins the
    # Gaussian starts can miss on near-degenerate instances.
    dirs = [b] if np.any(b) else []
    dirs += [rng.normal(size=n) for _ in range(3)]
    radii = np.linspace(1e-3, R, 60)
    for d in dirs:
        d = d / np.linalg.norm(d)
        for s in (1.0, -1.0):
            vals = [fun(s * r * d) for r in radii]
            x0s.append(s * radii[int(np.argmin(vals))] * d)

    xs, vals = [], []
    for x0 in x0s:
        res = optimize.minimize(fun, x0, jac=grad, method="L-BFGS-B",
                                options={"maxiter": 2000, "ftol": 1e-15,
                                         "gtol": 1e-12})
        xs.append(res.x)
        vals.append(float(res.fun))
    vals = np.asarray(vals)
    best, spread = _collect(xs, vals)
    x_best = xs[best]
    return OracleReport(value=evaluate_objective(prob, x_best), x=x_best,
                        starts=len(x0s), best_start_index=best, spread=spread)


def oracle_be(prob: BEProblem, starts: int = 30, seed: int = 0) -> OracleReport:
    """Multi-start descent on the squared backward-error ratio."""
    prob = prob.validated()
    rng = np.random.default_rng(seed)
    A, b = prob.A, prob.b
    n = prob.n
    a_norm = linalg.spectral_norm(A)
    b_norm = float(np.linalg.norm(b))

    def fun(x):
        num = A @ x - b
        den = a_norm * np.linalg.norm(x) + b_norm
        return float(num @ num) / den ** 2

    def grad(x):
        r = A @ x - b
        nrm = np.linalg.norm(x)
        den = a_norm * nrm + b_norm
        g_num = 2.0 * A.T @ r
        g_den = 2.0 * den * a_norm * x / nrm if nrm > 0 else np.zeros_like(x)
        return (g_num * den ** 2 - float(r @ r) * g_den) / den ** 4

    x_ls, *_ = np.linalg.lstsq(A, b, rcond=None)
    x0s = [x_ls] if np.linalg.norm(x_ls) > 0 else []
    base = b_norm / a_norm if b_norm > 0 else 1.0
    for radius in (0.1 * base, base, 10.0 * base):
        for _ in range(max(starts // 3, 1)):
            u = rng.normal(size=n)
            u /= np.linalg.norm(u)
            x0s.append(radius * u)

    xs, vals = [], []
    for x0 in x0s:
        res = optimize.minimize(fun, x0, jac=grad, method="L-BFGS-B",
                                options={"maxiter": 2000, "ftol": 1e-16,
                                         "gtol": 1e-13})
        xs.append(res.x)
        vals.append(float(res.fun))
    vals = np.asarray(vals)
    best, spread = _collect(xs, vals)
    x_best = xs[best]
    return OracleReport(value=evaluate_ratio(prob, x_best), x=x_best,
                        starts=len(x0s), best_start_index=best, spread=spread)
