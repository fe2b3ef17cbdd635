"""Problem/result file handling.

Problems are JSON objects:

    {"kind": "prs", "A": [[...], ...], "b": [...], "p": 4.0, "rho": 1.0}
    {"kind": "be",  "A": [[...], ...], "b": [...]}

The matrix may instead be referenced as a Matrix Market file via
``"A_mm": "path"`` (coordinate or array format, real; symmetric storage is
expanded).  Paths are resolved relative to the problem file.
"""

from __future__ import annotations

import json
import os
from typing import Union

import numpy as np
from scipy import io as scipy_io
from scipy import sparse

from .backward_error import BEProblem
from .errors import InvalidInput
from .prs import PRSProblem

Problem = Union[PRSProblem, BEProblem]


def _load_matrix(doc: dict, base_dir: str) -> np.ndarray:
    if "A_mm" in doc:
        path = doc["A_mm"]
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        M = scipy_io.mmread(path)
        if sparse.issparse(M):
            M = M.toarray()
        return np.asarray(M, dtype=float)
    if "A" in doc:
        return np.asarray(doc["A"], dtype=float)
    raise InvalidInput("problem file must contain 'A' or 'A_mm'")


def problem_from_dict(doc: dict, base_dir: str = ".") -> Problem:
    if not isinstance(doc, dict):
        raise InvalidInput("problem document must be a JSON object")
    kind = doc.get("kind")
    A = _load_matrix(doc, base_dir)
    if "b" not in doc:
        raise InvalidInput("problem file must contain 'b'")
    b = np.asarray(doc["b"], dtype=float)
    if kind == "prs":
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise InvalidInput("kind 'prs' requires a square matrix A")
        if "p" not in doc:
            raise InvalidInput("kind 'prs' requires the exponent 'p'")
        return PRSProblem(A=A, b=b, p=float(doc["p"]),
                          rho=float(doc.get("rho", 1.0))).validated()
    if kind == "be":
        if A.ndim != 2 or b.shape[0] != A.shape[0]:
            raise InvalidInput("kind 'be' requires dim(b) == rows(A)")
        return BEProblem(A=A, b=b).validated()
    raise InvalidInput(f"unknown problem kind {kind!r}; expected 'prs' or 'be'")


def load_problem(path: str) -> Problem:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read problem file {path}: {exc}") from exc
    return problem_from_dict(doc, base_dir=os.path.dirname(os.path.abspath(path)))


def problem_to_dict(prob: Problem) -> dict:
    if isinstance(prob, PRSProblem):
        return {"kind": "prs", "A": np.asarray(prob.A).tolist(),
                "b": np.asarray(prob.b).tolist(), "p": prob.p, "rho": prob.rho}
    if isinstance(prob, BEProblem):
        return {"kind": "be", "A": np.asarray(prob.A).tolist(),
                "b": np.asarray(prob.b).tolist()}
    raise InvalidInput(f"unsupported problem type {type(prob)!r}")


def dump_json(doc: dict) -> str:
    """Round-trip-faithful JSON: floats use the shortest exact representation."""
    return json.dumps(doc, indent=2, sort_keys=True)
