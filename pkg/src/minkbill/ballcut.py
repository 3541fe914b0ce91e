"""Capacities of hyperplane caps of the round ball.

Cutting the unit ball of C^n by the hyperplane Re z1 = cos(tau0) produces two
caps whose capacities add up to the capacity pi of the whole ball. The
minimum runs over an explicit family of broken closed characteristics: the
principal one (action tau0 - sin tau0 cos tau0) and a discrete family indexed
by winding data (k, m) with arc half-angle tau = pi k/m and circle radius
rho = cos(tau0)/cos(tau). The checks here evaluate that family and the two
elementary inequalities that make the principal characteristic minimal.

cap_action evaluates the family's stated action form
k(rho^2(tau - sin tau cos tau) + pi(1 - rho^2)); orbit_action evaluates the
line integral of p dq along the actual (k, m) orbit, which differs by
carrying m (the number of arc-chord loops) on the segment-area term:
m loops in the cut coordinate sweep m circular segments while the transverse
coordinates complete k full turns. Both dominate the principal action, so
every capacity-level statement is identical under either form; tests check
the stated form against fixtures and the line-integral form against an
independent trapezoid integrator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import InputError


def _seg(x: float) -> float:
    # circular-segment area factor x - sin x cos x, increasing on [0, pi]
    return x - math.sin(x) * math.cos(x)


@dataclass
class BallCutParams:
    k: int
    m: int
    rho: float
    tau0: Optional[float] = None

    def __post_init__(self):
        self.k, self.m = int(self.k), int(self.m)
        self.rho = float(self.rho)
        if self.k < 1:
            raise InputError("k must be at least 1")
        if self.m <= self.k:
            raise InputError("m must exceed k")
        g = math.gcd(self.k, self.m)
        self.k //= g
        self.m //= g
        if not 0.0 < self.rho <= 1.0:
            raise InputError("rho must lie in (0, 1]")
        if self.tau0 is not None:
            self.tau0 = float(self.tau0)
            if not 0.0 < self.tau0 < math.pi:
                raise InputError("tau0 must lie in (0, pi)")
            if abs(self.rho * math.cos(self.tau) - math.cos(self.tau0)) > 1e-12:
                raise InputError("rho cos(tau) = cos(tau0) violated")

    @property
    def tau(self) -> float:
        return math.pi * self.k / self.m

    @classmethod
    def from_tau0(cls, tau0: float, k: int, m: int) -> "BallCutParams":
        """Bind rho through rho cos(tau) = cos(tau0); error if inadmissible."""
        tau0 = float(tau0)
        if not 0.0 < tau0 < math.pi:
            raise InputError("tau0 must lie in (0, pi)")
        tau = math.pi * int(k) / int(m)
        ct = math.cos(tau)
        if abs(ct) < 1e-15:
            raise InputError("tau = pi/2 leaves rho unbound")
        rho = math.cos(tau0) / ct
        if not 0.0 < rho <= 1.0:
            raise InputError("bound rho falls outside (0, 1]")
        return cls(k, m, rho, tau0)


def principal_action(tau0: float) -> float:
    """Action of the principal broken characteristic through the cut."""
    tau0 = float(tau0)
    if not 0.0 < tau0 < math.pi:
        raise InputError("tau0 must lie in (0, pi)")
    return _seg(tau0)


def cap_action(p: BallCutParams) -> float:
    """Stated action of the (k, m, rho) characteristic family."""
    tau = p.tau
    return p.k * (p.rho ** 2 * _seg(tau) + math.pi * (1.0 - p.rho ** 2))


def orbit_action(p: BallCutParams) -> float:
    """Line integral of p dq along the (k, m, rho) orbit.

    The cut coordinate traverses m arc-chord loops (m circular segments of
    half-angle tau and radius rho); the transverse coordinates wind k times
    around a circle of squared radius 1 - rho^2.
    """
    tau = p.tau
    return p.m * p.rho ** 2 * _seg(tau) + p.k * math.pi * (1.0 - p.rho ** 2)


def admissible_family(tau0: float, kmax: int = 40, mmax: int = 40):
    """All reduced (k, m) pairs whose bound rho lies strictly inside (0, 1).

    rho = 1 reproduces the principal characteristic and is excluded; sign
    mismatches (rho <= 0) never touch the cut circle and are excluded too.
    """
    tau0 = float(tau0)
    if not 0.0 < tau0 < math.pi:
        raise InputError("tau0 must lie in (0, pi)")
    c0 = math.cos(tau0)
    out = []
    for m in range(2, int(mmax) + 1):
        for k in range(1, min(int(kmax), m - 1) + 1):
            if math.gcd(k, m) != 1:
                continue
            ct = math.cos(math.pi * k / m)
            if abs(ct) < 1e-15:
                continue
            rho = c0 / ct
            if 0.0 < rho < 1.0 - 1e-15:
                out.append(BallCutParams(k, m, rho, tau0))
    return out


def cap_capacity(tau0: float, kmax: int = 40, mmax: int = 40) -> float:
    """Minimal action over the principal and bound (k, m) characteristics."""
    best = principal_action(tau0)
    for p in admissible_family(tau0, kmax, mmax):
        best = min(best, cap_action(p))
    return best


def verify_cut_additivity(tau0: float, kmax: int = 40, mmax: int = 40):
    """Capacities of the two caps must add up to the ball's capacity pi."""
    c1 = cap_capacity(tau0, kmax, mmax)
    c2 = cap_capacity(math.pi - tau0, kmax, mmax)
    total = c1 + c2
    return c1, c2, total, bool(abs(total - math.pi) <= 1e-9)


def verify_key_inequalities(grid: int = 100) -> bool:
    """The two elementary inequalities behind principal minimality.

    pi(1 - cos x) >= x - sin x on [0, pi], and
    rho^2(tau - sin tau cos tau) + pi(1 - rho^2) >= tau0 - sin tau0 cos tau0
    whenever rho cos tau = cos tau0 with rho in (0, 1).
    """
    grid = int(grid)
    if grid < 2:
        raise InputError("grid must be at least 2")
    for i in range(grid + 1):
        x = math.pi * i / grid
        if math.pi * (1.0 - math.cos(x)) < x - math.sin(x) - 1e-12:
            return False
    for i in range(1, grid):
        tau0 = math.pi * i / grid
        base = _seg(tau0)
        c0 = math.cos(tau0)
        for j in range(1, grid):
            tau = math.pi * j / grid
            ct = math.cos(tau)
            if abs(ct) < 1e-15:
                continue
            rho = c0 / ct
            if not 0.0 < rho < 1.0:
                continue
            val = rho ** 2 * _seg(tau) + math.pi * (1.0 - rho ** 2)
            if val < base - 1e-12:
                return False
    return True


def subadditivity_gap(r: float):
    """Displacement-energy bookkeeping for the bidisk split at radius r.

    The two parts can be displaced with energies 2 - 2r and 4r, summing to
    2 + 2r, while the whole product has capacity at least 4: the gap 2 - 2r
    shows capacity additivity fails for this decomposition.
    """
    r = float(r)
    if not 0.0 < r < 1.0:
        raise InputError("r must lie in (0, 1)")
    parts_sum = (2.0 - 2.0 * r) + 4.0 * r
    whole = 4.0
    return parts_sum, whole, whole - parts_sum
