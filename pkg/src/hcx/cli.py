"""Command-line front end.

Subcommands: ``solve``, ``oracle``, ``verify``, ``gen``, ``dualplot``,
``probe``.  Problems and results are JSON (see problem_io); dualplot emits
CSV.  Exit codes: 0 optimal, 1 parse/validation error, 2 degenerate
instance, 3 no convergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import backward_error as be_mod
from . import certificates, oracle, prs, problem_io
from .backward_error import BEProblem, solve_be
from .errors import (DegenerateInstance, HcxError, InvalidInput, NoConvergence)
from .prs import PRSProblem, solve_prs

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DEGENERATE = 2
EXIT_NO_CONVERGENCE = 3


def default_tol() -> float:
    """Verification tolerance; HCX_DEFAULT_TOL overrides the 1e-8 default."""
    raw = os.environ.get("HCX_DEFAULT_TOL")
    if raw is None:
        return 1e-8
    try:
        tol = float(raw)
    except ValueError as exc:
        raise InvalidInput(f"HCX_DEFAULT_TOL={raw!r} is not a number") from exc
    if not (np.isfinite(tol) and tol > 0):
        raise InvalidInput("HCX_DEFAULT_TOL must be a positive finite number")
    return tol


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        print(text)


def _certificate_summary(cert: certificates.CertificateReport) -> dict:
    return {"kind": cert.kind, "verdict": bool(cert.verdict),
            "min_eigenvalue": cert.min_eigenvalue,
            "parameters": {"lambda": cert.parameters[0],
                           ("t" if cert.kind == "prs" else "w"): cert.parameters[1]}}


def _result_doc(sol, status: str, wall_time_ms: float | None) -> dict:
    if isinstance(sol, prs.PRSSolution):
        doc = {"status": status, "value": sol.value, "x": sol.x.tolist(),
               "dual": {"lambda": sol.lambda_star, "t": sol.value},
               "z_star": sol.z_star, "case": sol.case,
               "iterations": sol.iterations,
               "certificate": _certificate_summary(sol.certificate)}
    else:
        doc = {"status": status, "value": sol.ratio, "x": sol.x.tolist(),
               "dual": {"lambda": sol.lambda_star,
                        "w": sol.certificate.parameters[1]},
               "t_star": sol.t_star, "z_star": sol.z_star, "path": sol.path,
               "alpha": sol.alpha, "iterations": 0,
               "certificate": _certificate_summary(sol.certificate)}
    if wall_time_ms is not None:
        doc["wall_time_ms"] = wall_time_ms
    return doc


def cmd_solve(args) -> int:
    prob = problem_io.load_problem(args.input)
    t0 = time.perf_counter()
    try:
        sol = solve_prs(prob) if isinstance(prob, PRSProblem) else solve_be(prob)
    except DegenerateInstance as exc:
        _emit(problem_io.dump_json({"status": "degenerate", "error": str(exc)}),
              args.out)
        return EXIT_DEGENERATE
    except NoConvergence as exc:
        _emit(problem_io.dump_json({"status": "no_convergence", "error": str(exc),
                                    "best": exc.best}), args.out)
        return EXIT_NO_CONVERGENCE
    wall = (time.perf_counter() - t0) * 1000.0
    doc = _result_doc(sol, "optimal", wall if args.timing else None)
    _emit(problem_io.dump_json(doc), args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    prob = problem_io.load_problem(args.input)
    if isinstance(prob, PRSProblem):
        rep = oracle.oracle_prs(prob, starts=args.starts, seed=args.seed)
    else:
        rep = oracle.oracle_be(prob, starts=args.starts, seed=args.seed)
    doc = {"value": rep.value, "x": rep.x.tolist(), "starts": rep.starts,
           "best_start_index": rep.best_start_index, "spread": rep.spread}
    _emit(problem_io.dump_json(doc), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    prob = problem_io.load_problem(args.input)
    tol = args.tol if args.tol is not None else default_tol()
    if isinstance(prob, PRSProblem):
        if args.t is None:
            raise InvalidInput("verify on a prs problem requires --t")
        cert = certificates.prs_certificate(prob, args.lam, args.t, tol=tol)
    else:
        if args.w is None:
            raise InvalidInput("verify on a be problem requires --w")
        cert = certificates.be_certificate(prob, args.lam, args.w, tol=tol)
    _emit(problem_io.dump_json(_certificate_summary(cert)), args.out)
    return EXIT_OK


def generate_problem(kind: str, n: int, m: int | None = None, seed: int = 0,
                     hard: bool = False, p: float = 4.0, rho: float = 1.0):
    """Deterministic random instance; --hard forces the boundary-multiplier case."""
    rng = np.random.default_rng(seed)
    if kind == "prs":
        Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
        lam_min = -(1.0 + rng.uniform())
        rest = np.sort(lam_min + 0.5 + 2.0 * rng.uniform(size=n - 1))
        eigs = np.concatenate([[lam_min], rest])
        A = (Q * eigs) @ Q.T
        if hard:
            # b orthogonal to the minimal eigenspace, small enough that the
            # dual derivative at the boundary multiplier is nonpositive.
            coeffs = rng.normal(size=n - 1)
            b = Q[:, 1:] @ coeffs if n > 1 else np.zeros(n)
            lam_lo = -lam_min
            zs = prs.z_opt(lam_lo, p, rho)
            # Scale b so ||(A + lam_lo I)^+ b||^2 / 4 <= z*/4, which pins the
            # dual maximizer at the boundary (hard case).
            xb_sq = float(((coeffs / (eigs[1:] + lam_lo)) ** 2).sum()) / 4.0 \
                if n > 1 else 0.0
            if xb_sq > 0:
                b = b * np.sqrt(0.25 * zs / xb_sq)
        else:
            b = rng.normal(size=n)
        return PRSProblem(A=A, b=b, p=p, rho=rho).validated()
    if kind == "be":
        m = m or n + 1
        A = rng.normal(size=(m, n))
        if hard:
            if m <= n:
                raise InvalidInput("--hard be generation requires m > n")
            # b = A w + r with w orthogonal to the minimal eigenvector of A'A
            # and r in the null space of A', so A'b avoids the minimal
            # eigenspace while the system stays inconsistent.
            E = np.linalg.eigh(A.T @ A)
            v_min = E[1][:, 0]
            w = rng.normal(size=n)
            w -= (w @ v_min) * v_min
            r = rng.normal(size=m)
            r -= A @ np.linalg.lstsq(A, r, rcond=None)[0]
            b = A @ w + r
        else:
            b = rng.normal(size=m)
        return BEProblem(A=A, b=b).validated()
    raise InvalidInput(f"unknown kind {kind!r}")


def cmd_gen(args) -> int:
    prob = generate_problem(args.kind, args.n, args.m, args.seed, args.hard,
                            args.p, args.rho)
    _emit(problem_io.dump_json(problem_io.problem_to_dict(prob)), args.out)
    return EXIT_OK


def cmd_dualplot(args) -> int:
    prob = problem_io.load_problem(args.input)
    K = args.grid
    rows = []
    if isinstance(prob, PRSProblem):
        sol = solve_prs(prob)
        dual = prs._Dual(prob)
        lo = dual.lam_lo
        if dual.boundary_singular and not dual.in_range:
            lo += 1e-6 * dual.E.scale()
        hi = dual.lam_lo + 2.0 * max(sol.lambda_star - dual.lam_lo, 0.5)
        for lam in np.linspace(lo, hi, K):
            rows.append((float(lam), float(dual.value_and_derivative(float(lam))[0])))
    else:
        dual = be_mod._Dual(prob)
        right = be_mod._admissible_right_edge(dual)
        lo = right * 1e-6
        for lam in np.linspace(lo, right, K):
            rows.append((float(lam), float(dual.value_and_derivative(float(lam))[0])))
    lines = ["lambda,dual_value"]
    lines += [f"{lam!r},{val!r}" for lam, val in rows]
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_probe(args) -> int:
    with open(args.input) as fh:
        doc = json.load(fh)
    n = np.asarray(doc["A"]).shape[0]
    pair = certificates.QuadraticPair(
        A=np.asarray(doc["A"], dtype=float),
        B=np.asarray(doc["B"], dtype=float),
        a=np.asarray(doc.get("a", np.zeros(n)), dtype=float),
        b=np.asarray(doc.get("b", np.zeros(n)), dtype=float),
        p=float(doc.get("p", 0.0)), q=float(doc.get("q", 0.0)))
    rep = certificates.joint_range_probe(pair, samples=args.samples,
                                         trials=args.trials, seed=args.seed)
    out = {"fraction_realized": rep.fraction_realized,
           "worst_residual": rep.worst_residual, "samples": rep.samples,
           "trials": rep.trials, "seed": rep.seed, "homogeneous": rep.homogeneous}
    _emit(problem_io.dump_json(out), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hcx",
                                 description="Certified global solvers for the "
                                 "p-regularized subproblem and the backward-error "
                                 "criterion.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="write output to this file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=None,
                       help="verification tolerance (default 1e-8 or HCX_DEFAULT_TOL)")

    p = sub.add_parser("solve", help="solve a problem file")
    p.add_argument("input")
    p.add_argument("--timing", action="store_true",
                   help="include wall_time_ms in the result (non-deterministic)")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="brute-force reference solve")
    p.add_argument("input")
    p.add_argument("--starts", type=int, default=30)
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="check a PSD certificate at given parameters")
    p.add_argument("input")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--w", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate a deterministic random instance")
    p.add_argument("--kind", choices=["prs", "be"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--p", type=float, default=4.0)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--hard", action="store_true")
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("dualplot", help="emit (lambda, dual value) CSV")
    p.add_argument("input")
    p.add_argument("--grid", type=int, default=100)
    common(p)
    p.set_defaults(func=cmd_dualplot)

    p = sub.add_parser("probe", help="joint-range convexity probe of a quadratic pair")
    p.add_argument("input")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--trials", type=int, default=40)
    common(p)
    p.set_defaults(func=cmd_probe)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInput, HcxError, OSError, json.JSONDecodeError, ValueError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__,
                                     "message": str(exc)}) + "\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
