"""Certified global solvers for two hidden-convex nonquadratic problems:

* the generalized p-regularized subproblem
  min x'Ax + b'x + rho*||x||^p  (p > 2, rho > 0), and
* the normwise backward-error criterion
  min ||Ax - b|| / (||A|| ||x|| + ||b||),

each solved through a univariate concave/convex dual with PSD block-matrix
certificates and brute-force oracles for validation.
"""

from .backward_error import (BEProblem, BESolution, be_dual_value, evaluate_ratio,
                             recover_x_be, solve_be)
from .certificates import (CertificateReport, ProbeReport, QuadraticPair,
                           be_certificate, joint_range_probe, prs_certificate)
from .errors import (DegenerateInstance, DomainError, HcxError,
                     InternalInconsistency, InvalidInput, NoConvergence)
from .linalg import (PsdVerdict, SymEig, apply_shifted_pinv, eigh, psd_check,
                     range_membership, spectral_norm, symmetrize)
from .options import SolverOptions
from .oracle import OracleReport, oracle_be, oracle_prs
from .prs import (PRSProblem, PRSSolution, dual_value, evaluate_objective, phi,
                  solve_prs)
from .trs import KKTReport, TRSRequest, TRSResult, kkt_report, solve_trs

__version__ = "0.1.0"

__all__ = [
    "BEProblem", "BESolution", "CertificateReport", "DegenerateInstance",
    "DomainError", "HcxError", "InternalInconsistency", "InvalidInput",
    "KKTReport", "NoConvergence", "OracleReport", "PRSProblem", "PRSSolution",
    "ProbeReport", "PsdVerdict", "QuadraticPair", "SolverOptions", "SymEig",
    "TRSRequest", "TRSResult", "apply_shifted_pinv", "be_certificate",
    "be_dual_value", "dual_value", "eigh", "evaluate_objective",
    "evaluate_ratio", "joint_range_probe", "kkt_report", "oracle_be",
    "oracle_prs", "phi", "prs_certificate", "psd_check", "range_membership",
    "recover_x_be", "solve_be", "solve_prs", "solve_trs", "spectral_norm",
    "symmetrize",
]
