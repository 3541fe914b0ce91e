import math

import numpy as np
import pytest

from minkbill.ballcut import (
    BallCutParams,
    admissible_family,
    cap_action,
    cap_capacity,
    orbit_action,
    principal_action,
    subadditivity_gap,
    verify_cut_additivity,
    verify_key_inequalities,
)
from minkbill.errors import InputError


def trapezoid_action(p, steps=300000):
    """Midpoint-rule loop integral of the action form along the actual orbit.

    The cut-plane coordinate runs m arc+chord loops at radius rho while the
    transverse coordinate advances only during arcs, closing after k turns.
    """
    k, m, rho, tau = p.k, p.m, p.rho, p.tau
    r2 = math.sqrt(max(0.0, 1.0 - rho * rho))
    z1s, z2s = [], []
    phase = 0.0
    per = max(steps // (2 * m), 64)
    for _ in range(m):
        th = np.linspace(-tau, tau, per)
        z1s.append(rho * np.exp(1j * th))
        z2s.append(r2 * np.exp(1j * (phase + th + tau)))
        phase += 2.0 * tau
        u = np.linspace(0.0, 1.0, per)
        a, b = rho * np.exp(1j * tau), rho * np.exp(-1j * tau)
        z1s.append(a + (b - a) * u)
        z2s.append(np.full(per, r2 * np.exp(1j * phase)))
    total = 0.0
    for z in (np.concatenate(z1s), np.concatenate(z2s)):
        x, y = z.real, z.imag
        dx, dy = np.diff(x), np.diff(y)
        xm, ym = 0.5 * (x[:-1] + x[1:]), 0.5 * (y[:-1] + y[1:])
        total += 0.5 * float(np.sum(xm * dy - ym * dx))
        total += 0.5 * (0.5 * (x[-1] + x[0]) * (y[0] - y[-1])
                        - 0.5 * (y[-1] + y[0]) * (x[0] - x[-1]))
    return total


# --- parameters -------------------------------------------------------------

def test_params_gcd_reduction():
    p = BallCutParams(k=2, m=4, rho=0.5)
    assert (p.k, p.m) == (1, 2)
    assert p.tau == pytest.approx(math.pi / 2.0)


def test_params_validation():
    with pytest.raises(InputError):
        BallCutParams(k=3, m=3, rho=0.5)
    with pytest.raises(InputError):
        BallCutParams(k=1, m=2, rho=0.0)
    with pytest.raises(InputError):
        BallCutParams(k=1, m=2, rho=1.5)
    with pytest.raises(InputError):
        BallCutParams(k=1, m=3, rho=0.9, tau0=1.0)  # binding violated


def test_params_binding_consistent():
    tau0 = 1.2
    p = BallCutParams.from_tau0(tau0, 1, 3)
    assert p.rho * math.cos(p.tau) == pytest.approx(math.cos(tau0), abs=1e-12)


def test_from_tau0_rejects_unbound_cases():
    with pytest.raises(InputError):
        BallCutParams.from_tau0(1.0, 1, 2)  # cos(tau) = 0
    with pytest.raises(InputError):
        BallCutParams.from_tau0(1.0, 2, 5)  # rho outside (0, 1]


# --- actions -----------------------------------------------------------------

def test_action_full_circle():
    assert cap_action(BallCutParams(k=1, m=2, rho=1.0)) == pytest.approx(math.pi / 2.0)


def test_action_formula_point():
    assert cap_action(BallCutParams(k=1, m=2, rho=0.5)) == pytest.approx(
        0.25 * math.pi / 2.0 + math.pi * 0.75)
    assert cap_action(BallCutParams(k=1, m=2, rho=0.5)) == pytest.approx(7.0 * math.pi / 8.0)


def test_action_double_winding():
    tau0 = 2.0 * math.pi / 3.0
    p = BallCutParams(k=2, m=3, rho=1.0, tau0=tau0)
    expected = 2.0 * (tau0 - math.sin(tau0) * math.cos(tau0))
    assert cap_action(p) == pytest.approx(expected)
    assert expected == pytest.approx(2.0 * (2.0 * math.pi / 3.0 + math.sqrt(3.0) / 4.0))


def test_principal_action_values():
    assert principal_action(math.pi / 2.0) == pytest.approx(math.pi / 2.0)
    assert principal_action(2.0 * math.pi / 3.0) == pytest.approx(
        2.0 * math.pi / 3.0 + math.sqrt(3.0) / 4.0)


def test_orbit_action_matches_trapezoid_integrator():
    for tau0 in (1.2, 2.0, 2.6):
        fam = list(admissible_family(tau0, 6, 6))
        assert fam or tau0 > 2.5  # wide cuts admit no non-principal orbits
        for p in fam[:3]:
            assert abs(orbit_action(p) - trapezoid_action(p)) <= 1e-6


def test_orbit_vs_cap_action_winding_split():
    # the two bookkeepings agree exactly when k = 1 and at rho = 1
    p = BallCutParams.from_tau0(1.2, 1, 3)
    assert orbit_action(p) != pytest.approx(cap_action(p), abs=1e-12) or p.k == 1
    q = BallCutParams(k=1, m=4, rho=0.3)
    assert orbit_action(q) == pytest.approx(
        4.0 * 0.09 * (math.pi / 4.0 - math.sin(math.pi / 4.0) * math.cos(math.pi / 4.0))
        + math.pi * (1.0 - 0.09))


# --- capacities ----------------------------------------------------------------

def grid_capacity_oracle(tau0, kmax=12, mmax=12):
    best = tau0 - math.sin(tau0) * math.cos(tau0)
    c0 = math.cos(tau0)
    for m in range(2, mmax + 1):
        for k in range(1, min(kmax, m - 1) + 1):
            if math.gcd(k, m) != 1:
                continue
            tau = math.pi * k / m
            ct = math.cos(tau)
            if abs(ct) < 1e-15:
                continue
            rho = c0 / ct
            if not 0.0 < rho < 1.0:
                continue
            seg = tau - math.sin(tau) * math.cos(tau)
            best = min(best, k * (rho * rho * seg + math.pi * (1.0 - rho * rho)))
    return best


def test_capacity_half_ball():
    assert cap_capacity(math.pi / 2.0) == pytest.approx(math.pi / 2.0)


def test_capacity_small_cap():
    tau0 = math.pi / 3.0
    expected = math.pi / 3.0 - math.sqrt(3.0) / 4.0
    assert cap_capacity(tau0) == pytest.approx(expected, abs=1e-12)
    assert grid_capacity_oracle(tau0) == pytest.approx(expected, abs=1e-12)


def test_capacity_large_cap():
    tau0 = 2.0 * math.pi / 3.0
    expected = 2.0 * math.pi / 3.0 + math.sqrt(3.0) / 4.0
    assert cap_capacity(tau0) == pytest.approx(expected, abs=1e-12)
    assert grid_capacity_oracle(tau0) == pytest.approx(expected, abs=1e-12)


def test_capacity_matches_grid_oracle():
    for i in range(1, 20):
        tau0 = math.pi * i / 20.0
        assert cap_capacity(tau0, 12, 12) == pytest.approx(grid_capacity_oracle(tau0),
                                                           abs=1e-12)


def test_capacity_monotone_and_full_ball_limit():
    taus = np.linspace(0.05, math.pi - 1e-9, 60)
    vals = [cap_capacity(t) for t in taus]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(math.pi, abs=1e-6)


def test_principal_always_minimal():
    for i in range(1, 40):
        tau0 = math.pi * i / 40.0
        base = principal_action(tau0)
        for p in admissible_family(tau0, 40, 40):
            assert cap_action(p) >= base - 1e-12


# --- additivity -------------------------------------------------------------------

def test_additivity_half():
    c1, c2, total, ok = verify_cut_additivity(math.pi / 2.0)
    assert ok
    assert c1 == pytest.approx(math.pi / 2.0)
    assert c2 == pytest.approx(math.pi / 2.0)
    assert total == pytest.approx(math.pi, abs=1e-12)


def test_additivity_third():
    c1, c2, total, ok = verify_cut_additivity(math.pi / 3.0)
    assert ok
    assert c1 == pytest.approx(math.pi / 3.0 - math.sqrt(3.0) / 4.0)
    assert c2 == pytest.approx(2.0 * math.pi / 3.0 + math.sqrt(3.0) / 4.0)
    assert total == pytest.approx(math.pi, abs=1e-12)


def test_additivity_sweep():
    for i in range(1, 98):
        _, _, total, ok = verify_cut_additivity(math.pi * i / 98.0)
        assert ok
        assert abs(total - math.pi) <= 1e-9


# --- elementary inequalities ---------------------------------------------------------

def test_key_inequalities_grid():
    assert verify_key_inequalities(100)
    assert verify_key_inequalities(2)


def test_key_inequality_endpoints():
    assert math.pi * (1.0 - math.cos(0.0)) == pytest.approx(0.0 - math.sin(0.0))
    assert math.pi * (1.0 - math.cos(math.pi)) == pytest.approx(2.0 * math.pi)
    assert 2.0 * math.pi >= math.pi - math.sin(math.pi)


def test_key_inequalities_rejects_tiny_grid():
    with pytest.raises(InputError):
        verify_key_inequalities(1)


# --- displacement bookkeeping ----------------------------------------------------------

def test_subadditivity_midpoint():
    parts, whole, gap = subadditivity_gap(0.5)
    assert parts == pytest.approx(3.0)
    assert whole == pytest.approx(4.0)
    assert gap == pytest.approx(1.0)


def test_subadditivity_quarter():
    assert subadditivity_gap(0.25)[2] == pytest.approx(1.5)


def test_subadditivity_limit():
    assert subadditivity_gap(1.0 - 1e-9)[2] == pytest.approx(0.0, abs=1e-8)


def test_subadditivity_rejects_bad_radius():
    with pytest.raises(InputError):
        subadditivity_gap(0.0)
    with pytest.raises(InputError):
        subadditivity_gap(1.0)
