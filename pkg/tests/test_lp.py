"""The in-repo simplex against scipy.optimize.linprog as the oracle."""

import numpy as np
import pytest
from scipy.optimize import linprog

from minkbill.lp import max_margin_point, solve_lp


def random_feasible_lp(rng, n, m):
    # build around a known interior point so feasibility is guaranteed
    x0 = rng.uniform(-1.0, 1.0, size=n)
    A = rng.normal(size=(m, n))
    b = A @ x0 + rng.uniform(0.1, 2.0, size=m)
    c = rng.normal(size=n)
    return c, A, b


def test_matches_scipy_on_random_instances():
    rng = np.random.default_rng(2024)
    checked = 0
    for _ in range(300):
        n = int(rng.integers(2, 6))
        m = int(rng.integers(n + 1, 3 * n + 4))
        c, A, b = random_feasible_lp(rng, n, m)
        # bound the feasible set so both solvers agree on attainment
        A = np.vstack([A, np.eye(n), -np.eye(n)])
        b = np.concatenate([b, np.full(2 * n, 10.0)])
        res = solve_lp(c, a_ub=A, b_ub=b)
        ref = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * n,
                      method="highs")
        assert res.ok == ref.success
        if res.ok:
            assert res.fun == pytest.approx(ref.fun, abs=1e-7)
            assert (A @ res.x - b).max() <= 1e-7
            checked += 1
    assert checked > 250


def test_infeasible_detected():
    A = np.array([[1.0], [-1.0]])
    b = np.array([-1.0, -1.0])  # x <= -1 and x >= 1
    res = solve_lp(np.array([1.0]), a_ub=A, b_ub=b)
    assert not res.ok


def test_equality_constraints_respected():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = 4
        c = rng.normal(size=n)
        A_eq = rng.normal(size=(2, n))
        x0 = rng.uniform(-0.5, 0.5, size=n)
        b_eq = A_eq @ x0
        A_ub = np.vstack([np.eye(n), -np.eye(n)])
        b_ub = np.full(2 * n, 3.0)
        res = solve_lp(c, a_ub=A_ub, b_ub=b_ub, a_eq=A_eq, b_eq=b_eq)
        ref = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                      bounds=[(None, None)] * n, method="highs")
        assert res.ok == ref.success
        if res.ok:
            assert res.fun == pytest.approx(ref.fun, abs=1e-7)
            assert np.abs(A_eq @ res.x - b_eq).max() <= 1e-7


def test_nonneg_flag():
    c = np.array([-1.0, -1.0])
    A = np.array([[1.0, 1.0]])
    b = np.array([1.0])
    res = solve_lp(c, a_ub=A, b_ub=b, nonneg=True)
    assert res.ok
    assert res.fun == pytest.approx(-1.0, abs=1e-9)
    assert res.x.min() >= -1e-9


def test_max_margin_point_square():
    A = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    b = np.array([1.0, 1.0, 1.0, 1.0])
    x, margin = max_margin_point(A, b)
    assert margin == pytest.approx(1.0, abs=1e-9)
    assert np.abs(x).max() <= 1e-7


def test_max_margin_point_infeasible_region():
    A = np.array([[1.0, 0.0], [-1.0, 0.0]])
    b = np.array([-2.0, 1.0])  # x <= -2 and x >= -1
    x, margin = max_margin_point(A, b)
    assert margin < 0 or x is None
