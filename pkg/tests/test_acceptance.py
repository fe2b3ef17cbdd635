"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.
"""

import time

import numpy as np
import pytest

from hcx import backward_error as be_mod
from hcx import linalg, prs as prs_mod
from hcx.backward_error import BEProblem, solve_be
from hcx.certificates import QuadraticPair, joint_range_probe, prs_certificate
from hcx.cli import generate_problem, main
from hcx.oracle import oracle_be, oracle_prs
from hcx.prs import PRSProblem, solve_prs
from hcx.trs import TRSRequest, kkt_report, solve_trs
from hcx import problem_io


_capsys = None


@pytest.fixture(autouse=True)
def _acceptance_capsys(capsys):
    global _capsys
    _capsys = capsys
    yield
    _capsys = None


def ok(num, desc):
    line = f"[ACCEPTANCE] criterion {num:2d} ({desc}): PASS"
    # Bypass pytest's output capture so each criterion's verdict is visible
    # in the plain `pytest -v` log.
    if _capsys is not None:
        with _capsys.disabled():
            print(line, flush=True)
    else:
        print(line, flush=True)


def random_prs(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    A = rng.normal(size=(n, n))
    A = 0.5 * (A + A.T)
    p = float(rng.choice([2.5, 3.0, 4.0, 6.0]))
    return PRSProblem(A, rng.normal(size=n), p, 1.0)


@pytest.fixture(scope="module")
def prs_sweep():
    """Shared 100-instance sweep used by criteria 2 and 3."""
    out = []
    t0 = time.perf_counter()
    for i in range(100):
        prob = random_prs(1000 + i)
        sol = solve_prs(prob)
        rep = oracle_prs(prob, starts=20, seed=i)
        out.append((prob, sol, rep))
    return out, time.perf_counter() - t0


def test_criterion_01_closed_form_instance():
    solve_prs(PRSProblem(-np.eye(2), np.zeros(2), 4.0, 1.0))  # warm-up
    for n in range(2, 6):
        prob = PRSProblem(-np.eye(n), np.zeros(n), 4.0, 1.0)
        t0 = time.perf_counter()
        sol = solve_prs(prob)
        elapsed = time.perf_counter() - t0
        assert abs(sol.value - (-0.25)) <= 1e-8
        assert abs(sol.lambda_star - 1.0) <= 1e-8
        assert abs(sol.z_star - 0.5) <= 1e-8
        assert sol.case == "hard"
        assert elapsed < 0.010, f"solve took {elapsed * 1e3:.2f} ms"
    ok(1, "p-RS closed-form instance, < 10 ms")


def test_criterion_02_prs_oracle_equivalence(prs_sweep):
    results, elapsed = prs_sweep
    for prob, sol, rep in results:
        assert abs(sol.value - rep.value) <= 1e-5 * (1.0 + abs(sol.value))
    assert elapsed < 30.0, f"sweep took {elapsed:.1f} s"
    ok(2, f"p-RS oracle equivalence, 100 instances in {elapsed:.1f} s")


def test_criterion_03_certificate_sandwich(prs_sweep):
    results, _ = prs_sweep
    for prob, sol, _rep in results:
        assert prs_certificate(prob, sol.lambda_star, sol.value).verdict
        eps = 1e-3 * (1.0 + abs(sol.value))
        above = prs_certificate(prob, sol.lambda_star, sol.value + eps)
        assert not above.verdict and above.min_eigenvalue < 0
    ok(3, "certificate PSD at optimum, not PSD above it")


def test_criterion_04_hard_case_coverage():
    for seed in range(50):
        n = 2 + seed % 5
        prob = generate_problem("prs", n=n, seed=seed, hard=True)
        sol = solve_prs(prob)
        assert sol.case == "hard", f"seed {seed}: case {sol.case}"
        assert abs(sol.x @ sol.x - sol.z_star) <= 1e-7 * (1.0 + sol.z_star)
        A, b = np.asarray(prob.A), np.asarray(prob.b)
        grad = 2.0 * (A + sol.lambda_star * np.eye(n)) @ sol.x + b
        assert np.linalg.norm(grad) / (1.0 + np.linalg.norm(b)) <= 1e-7
    ok(4, "50 hard-case instances all return case hard")


def test_criterion_05_be_zero_b_formula():
    for seed in range(50):
        rng = np.random.default_rng(2000 + seed)
        m, n = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        A = rng.normal(size=(m, n))
        sol = solve_be(BEProblem(A, np.zeros(m)))
        w = np.linalg.eigvalsh(A.T @ A)
        # rank-deficient A'A has exact zero eigenvalues; clamp rounding noise
        lam_min = w[0] if w[0] > 1e-12 * w[-1] else 0.0
        expected = np.sqrt(max(lam_min, 0.0)) / linalg.spectral_norm(A)
        assert abs(sol.ratio - expected) <= 1e-9 * (1.0 + expected)
    ok(5, "BE b=0 formula sqrt(lambda_min(A'A))/||A||")


def test_criterion_06_be_consistent_short_circuit():
    for seed in range(50):
        rng = np.random.default_rng(3000 + seed)
        n = int(rng.integers(1, 5))
        m = n + int(rng.integers(0, 3))
        A = rng.normal(size=(m, n))
        x_true = rng.normal(size=n)
        prob = BEProblem(A, A @ x_true)
        sol = solve_be(prob)
        assert sol.ratio == 0.0
        resid = np.linalg.norm(A @ sol.x - A @ x_true)
        assert resid <= 1e-10 * (1.0 + np.linalg.norm(A @ x_true))
    ok(6, "BE consistent systems short-circuit to ratio 0")


def test_criterion_07_be_oracle_equivalence():
    for seed in range(100):
        rng = np.random.default_rng(4000 + seed)
        n = int(rng.integers(1, 4))
        m = n + int(rng.integers(1, 4 - n + 1)) if n < 4 else 4
        m = min(max(m, n + 1), 4)
        A = rng.normal(size=(m, n))
        b = rng.normal(size=m)
        prob = BEProblem(A, b)
        sol = solve_be(prob)
        rep = oracle_be(prob, starts=24, seed=seed)
        assert abs(sol.ratio - rep.value) <= 1e-5
        a_norm = linalg.spectral_norm(A)
        lhs = np.linalg.norm(A @ sol.x - b) ** 2
        rhs = sol.t_star * (a_norm * np.linalg.norm(sol.x) + np.linalg.norm(b)) ** 2
        assert abs(lhs - rhs) <= 1e-7 * (1.0 + np.linalg.norm(b) ** 2)
    ok(7, "BE oracle equivalence, 100 instances")


def test_criterion_08_weak_duality_suite():
    rng = np.random.default_rng(5000)
    # p-RS family
    checked = 0
    while checked < 10_000:
        prob = random_prs(int(rng.integers(0, 1_000_000)))
        dual = prs_mod._Dual(prob)
        for _ in range(500):
            lam = dual.lam_lo + float(rng.exponential()) + 1e-6
            x = rng.normal(size=prob.n) * float(rng.uniform(0.1, 3.0))
            d, _ = dual.value_and_derivative(lam)
            h = prs_mod.evaluate_objective(prob, x)
            assert d <= h + 1e-9 * (1.0 + abs(d) + abs(h))
            checked += 1
    # BE family
    checked = 0
    while checked < 10_000:
        n = int(rng.integers(1, 4))
        m = n + int(rng.integers(1, 3))
        prob = BEProblem(rng.normal(size=(m, n)), rng.normal(size=m))
        dual = be_mod._Dual(prob)
        try:
            right = be_mod._admissible_right_edge(dual)
        except Exception:
            continue
        for _ in range(500):
            lam = right * float(rng.uniform(1e-3, 1.0))
            try:
                F, _ = dual.value_and_derivative(lam)
            except be_mod.DomainError:
                continue
            x = rng.normal(size=n) * float(rng.uniform(0.1, 5.0))
            r = be_mod.evaluate_ratio(prob, x)
            assert 1.0 / F <= r * r + 1e-9
            checked += 1
    ok(8, "weak duality, 10^4 (lambda, x) pairs per family, zero violations")


def test_criterion_09_midpoint_suite():
    rng = np.random.default_rng(6000)
    checked = 0
    while checked < 1000:
        prob = random_prs(int(rng.integers(0, 1_000_000)))
        dual = prs_mod._Dual(prob)
        for _ in range(100):
            l1 = dual.lam_lo + float(rng.exponential()) + 1e-6
            l3 = l1 + float(rng.exponential()) + 1e-6
            l2 = 0.5 * (l1 + l3)
            d1 = dual.value_and_derivative(l1)[0]
            d2 = dual.value_and_derivative(l2)[0]
            d3 = dual.value_and_derivative(l3)[0]
            scale = 1.0 + max(abs(d1), abs(d2), abs(d3))
            assert d2 >= 0.5 * (d1 + d3) - 1e-9 * scale
            checked += 1
    checked = 0
    while checked < 1000:
        n = int(rng.integers(1, 4))
        m = n + int(rng.integers(1, 3))
        prob = BEProblem(rng.normal(size=(m, n)), rng.normal(size=m))
        dual = be_mod._Dual(prob)
        try:
            right = be_mod._admissible_right_edge(dual)
        except Exception:
            continue
        for _ in range(100):
            u = np.sort(rng.uniform(1e-3, 1.0, size=2))
            l1, l3 = right * u[0], right * u[1]
            l2 = 0.5 * (l1 + l3)
            try:
                f1 = dual.value_and_derivative(l1)[0]
                f2 = dual.value_and_derivative(l2)[0]
                f3 = dual.value_and_derivative(l3)[0]
            except be_mod.DomainError:
                continue
            scale = 1.0 + max(abs(f1), abs(f2), abs(f3))
            assert f2 <= 0.5 * (f1 + f3) + 1e-9 * scale
            checked += 1
    ok(9, "concavity/convexity midpoint inequality, 10^3 triples per family")


def test_criterion_10_dines_probe():
    rng = np.random.default_rng(7000)
    for k in range(20):
        n = int(rng.integers(1, 5))
        A = rng.normal(size=(n, n))
        B = rng.normal(size=(n, n))
        pair = QuadraticPair(A=0.5 * (A + A.T), B=0.5 * (B + B.T),
                             a=np.zeros(n), b=np.zeros(n))
        rep = joint_range_probe(pair, samples=1000, trials=10, seed=k)
        assert rep.fraction_realized >= 0.99, f"pair {k}: {rep.fraction_realized}"
    parabola = QuadraticPair(A=np.array([[1.0]]), B=np.array([[0.0]]),
                             a=np.zeros(1), b=np.ones(1))
    rep = joint_range_probe(parabola, samples=1000, trials=20, seed=99)
    assert rep.fraction_realized < 1.0
    ok(10, "Dines probe: homogeneous pairs convex, parabola flagged")


def circle_grid_min(Q, c, r2, points=100_000):
    theta = np.linspace(0.0, 2.0 * np.pi, points, endpoint=False)
    r = np.sqrt(r2)
    X = r * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    vals = np.einsum("ij,jk,ik->i", X, Q, X) + X @ c
    k = int(np.argmin(vals))
    from scipy.optimize import minimize_scalar

    def f(t):
        x = np.array([r * np.cos(t), r * np.sin(t)])
        return float(x @ Q @ x + c @ x)

    h = 2.0 * np.pi / points
    res = minimize_scalar(f, bracket=(theta[k] - h, theta[k], theta[k] + h))
    return min(float(vals[k]), float(res.fun))


def test_criterion_11_trs_kkt_suite():
    rng = np.random.default_rng(8000)
    for i in range(200):
        n = int(rng.integers(1, 7))
        Q = rng.normal(size=(n, n))
        Q = 0.5 * (Q + Q.T)
        c = rng.normal(size=n)
        r2 = float(rng.uniform(0.1, 4.0))
        req = TRSRequest(Q, c, r2, "sphere", "min")
        res = solve_trs(req)
        assert abs(res.x @ res.x - r2) <= 1e-8 * (1.0 + r2)
        rep = kkt_report(req, res)
        assert rep.residual <= 1e-7
        assert rep.second_order_psd
    for i in range(20):
        Q = rng.normal(size=(2, 2))
        Q = 0.5 * (Q + Q.T)
        c = rng.normal(size=2)
        res = solve_trs(TRSRequest(Q, c, 1.0, "sphere", "min"))
        assert abs(res.objective - circle_grid_min(Q, c, 1.0)) <= 1e-6
    ok(11, "TRS KKT suite, 200 sphere instances + circle-grid oracle")


def test_criterion_12_determinism(tmp_path):
    import json
    for kind, kwargs in (("prs", {"n": 4}), ("be", {"n": 3, "m": 5})):
        prob = generate_problem(kind, seed=77, **kwargs)
        path = tmp_path / f"{kind}.json"
        path.write_text(json.dumps(problem_io.problem_to_dict(prob)))
        o1, o2 = tmp_path / f"{kind}1.json", tmp_path / f"{kind}2.json"
        assert main(["solve", str(path), "--out", str(o1)]) == 0
        assert main(["solve", str(path), "--out", str(o2)]) == 0
        assert o1.read_bytes() == o2.read_bytes()
    ok(12, "byte-identical ResultFile JSON for identical seeds")
