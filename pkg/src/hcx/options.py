"""Solver options shared by the two dual-based solvers."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SolverOptions:
    max_iter: int = 200
    # Stationarity tolerance on the dual derivative, relative to 1 + z*.
    stationarity_tol: float = 1e-10
