"""Shortest closed billiard trajectories in a convex body under a gauge.

The solver minimizes the cyclic gauge length of a polygon with m bounce
points, m swept over {2, ..., dim+1}, subject to the point set not being
coverable by any smaller homothet of the table body. Noncoverability is the
scalar constraint lambda(q_1..q_m) >= 1 where lambda is the smallest covering
homothet ratio; it enters the objective as a quadratic penalty whose weight
is ramped up over outer stages, and every candidate is finally repaired by
the exact scaling that sets lambda = 1 (both the length and lambda are
positively homogeneous, so the repair is loss-free).

The length of the result equals the Hofer-Zehnder capacity of the product of
the table with the polar of the gauge ball; ``capacity_product_polar`` is
that reading of the same number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import BodyError, DimensionMismatch, GaugeError
from .geometry import (
    Ball,
    ConvexBody,
    Gauge,
    HomothetLambda,
    _as_vertex_body,
    min_homothet_cover,
    polar,
)
from .lp import solve_lp

_MU_STAGES = (1e1, 1e2, 1e3, 1e4, 1e5, 1e6)


@dataclass
class Trajectory:
    points: np.ndarray
    gauge_length: float
    gauge_id: str
    lam: float
    converged: bool = True

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, float))

    @property
    def bounces(self) -> int:
        return len(self.points)

    def to_dict(self, violation=None) -> dict:
        out = {
            "points": [[float(v) for v in p] for p in self.points],
            "length": float(self.gauge_length),
            "lambda": float(self.lam),
        }
        if violation is not None:
            out["violation"] = float(violation)
        return out


@dataclass
class ReflectionCertificate:
    momenta: np.ndarray
    multipliers: np.ndarray
    max_violation: float


def trajectory_length(traj, g: Gauge) -> float:
    """Cyclic gauge length of a closed polygon (Trajectory or point array)."""
    pts = traj.points if isinstance(traj, Trajectory) else np.atleast_2d(np.asarray(traj, float))
    if len(pts) < 2:
        raise BodyError("a trajectory needs at least 2 points")
    if pts.shape[1] != g.dim:
        raise DimensionMismatch("trajectory and gauge dimensions differ")
    edges = np.roll(pts, -1, axis=0) - pts
    return float(g.values(edges).sum())


# ---------------------------------------------------------------------------
# solver

def _boundary_sampler(K: ConvexBody):
    c = K.interior_point()
    if isinstance(K, Ball):
        r = K.radius

        def sample(rng, count):
            x = rng.normal(size=(count, K.dim))
            x /= np.linalg.norm(x, axis=1)[:, None]
            return c + r * x
    else:
        recentered = Gauge(K.translate(-c))

        def sample(rng, count):
            x = rng.normal(size=(count, K.dim))
            return c + x / recentered.values(x)[:, None]

    return sample


def _facet_seeds(K: ConvexBody, m: int):
    """Deterministic starting polygons tied to the facial structure of K."""
    d = K.dim
    seeds = []
    if isinstance(K, Ball):
        c, r = K.center, K.radius
        if m == 2:
            for i in range(d):
                e = np.zeros(d)
                e[i] = r
                seeds.append(np.stack([c + e, c - e]))
        elif m == 3:
            ang = 2.0 * np.pi * np.arange(3) / 3.0
            tri = np.stack([np.cos(ang), np.sin(ang)], axis=1)
            if d == 2:
                seeds.append(c + r * tri)
            else:
                seeds.append(c + r * np.column_stack([tri, np.zeros(3)]))
        elif m == 4 and d == 3:
            tet = np.array([[1.0, 1.0, 1.0], [1.0, -1.0, -1.0],
                            [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]) / math.sqrt(3.0)
            seeds.append(c + r * tet)
        return seeds

    U, b = K.facet_data()
    F = len(U)
    V = _as_vertex_body(K).vertices
    if m == 2:
        for j in range(F):
            q1 = K.support_point(-U[j])
            q2 = q1 + (b[j] - U[j] @ q1) * U[j]
            seeds.append(np.stack([q1, q2]))
    else:
        # cycles through facet midpoints (2d) or facet centroids (3d)
        if d == 2:
            vals = V @ U.T - b
            mids = []
            for j in range(F):
                on = V[np.abs(vals[:, j]) <= 1e-9 * (1.0 + np.abs(b[j]))]
                if len(on) >= 2:
                    mids.append(on.mean(axis=0))
            mids = np.asarray(mids)
        else:
            from scipy.spatial import ConvexHull
            hull = ConvexHull(V)
            mids = np.asarray([V[s].mean(axis=0) for s in hull.simplices])
        F2 = len(mids)
        if F2 >= m:
            for j in range(F2):
                idx = [(j + k) % F2 for k in range(m)]
                seeds.append(mids[idx])
            if F2 == m:
                seeds = seeds[:1]
    return seeds


def _canonical_cycle(pts: np.ndarray):
    """Rotation/reversal-invariant ordering of a closed polygon.

    Returns the reordered (exact) points plus the rounded comparison key;
    rounding is confined to the key so coordinates stay untouched.
    """
    rounded = np.round(pts, 9) + 0.0
    best_key = None
    best_cfg = None
    for rev in (False, True):
        seq = rounded[::-1] if rev else rounded
        for s in range(len(seq)):
            key = tuple(np.roll(seq, -s, axis=0).ravel())
            if best_key is None or key < best_key:
                best_key = key
                best_cfg = (rev, s)
    rev, s = best_cfg
    ordered = pts[::-1] if rev else pts
    return np.roll(ordered, -s, axis=0), best_key


def _edge_length_fn(g: Gauge):
    """Closure summing the gauge over edge rows, tuned for the hot loop."""
    B = g.unit_ball
    if isinstance(B, Ball):
        c, r = B.center, B.radius
        if np.linalg.norm(c) < 1e-15:
            def length_of(E):
                return float(np.sqrt((E * E).sum(axis=1)).sum() / r)
        else:
            a = r * r - c @ c

            def length_of(E):
                s = E @ c
                q = (E * E).sum(axis=1)
                return float(((np.sqrt(s * s + a * q) - s) / a).sum())
    else:
        U, b = B.facet_data()
        M = U / b[:, None]

        def length_of(E):
            return float((M @ E.T).max(axis=0).sum())

    return length_of


def shortest_trajectory(K: ConvexBody, g: Gauge, starts: int = 64, seed: int = 0,
                        tol: float = 1e-9, stall_limit: int = 24) -> Trajectory:
    """Best closed billiard polygon found by penalized multi-start search.

    Deterministic for a fixed seed. Each start owns the substream
    (seed, m, start index), so results do not depend on how many other
    starts ran before it; the sweep stops early for a given bounce count
    after ``stall_limit`` consecutive random starts without improvement.
    """
    if g.dim != K.dim:
        raise DimensionMismatch("body and gauge dimensions differ")
    d = K.dim
    lam_of = HomothetLambda(K)
    sample = _boundary_sampler(K)
    length_of = _edge_length_fn(g)

    best = None  # (sort key, length, canonical points)

    def consider(pts, length):
        nonlocal best
        canon, cycle_key = _canonical_cycle(pts)
        key = (round(length, 9), cycle_key)
        if best is None or key < best[0]:
            best = (key, length, canon)
            return True
        return False

    def run_start(x0, m):
        x = x0.ravel().copy()
        n = x.size
        nxt = np.arange(1, m + 1) % m

        def repaired(pts, lam):
            c = pts.mean(axis=0)
            fixed = c + (pts - c) / lam
            return length_of(fixed[nxt] - fixed), fixed

        incumbent = None
        lam0 = lam_of(x0)
        first = 0
        if lam0 >= 1e-6:
            incumbent = repaired(np.asarray(x0, float), lam0)
            if lam0 >= 1.0 - 1e-3:
                # already essentially feasible; the slack early stages would
                # only walk far into the interior and back
                first = 3
        for k, mu in enumerate(_MU_STAGES[first:]):
            def objective(flat):
                pts = flat.reshape(m, d)
                length = length_of(pts[nxt] - pts)
                gap = 1.0 - lam_of(pts)
                if gap > 0.0:
                    length += mu * gap * gap
                return length

            last = mu == _MU_STAGES[-1]
            res = minimize(objective, x, method="Nelder-Mead",
                           options={"maxiter": (100 if last else 50) * n,
                                    "xatol": 1e-9, "fatol": 1e-12,
                                    "adaptive": d == 3})
            x = res.x
            pts = x.reshape(m, d)
            lam = lam_of(pts)
            if lam < 1e-6:
                if k >= 2:
                    return incumbent  # start collapsed, penalty cannot recover
                continue
            val, fixed = repaired(pts, lam)
            improved = incumbent is None or val < incumbent[0] - 1e-9
            if incumbent is None or val < incumbent[0]:
                incumbent = (val, fixed)
            # stop once the iterate is essentially feasible and the repaired
            # value has stopped moving; earlier stages are too slack to trust
            if lam >= 1.0 - 1e-6 and not improved:
                break
        return incumbent

    for m in range(2, d + 2):
        for s in _facet_seeds(K, m):
            out = run_start(s, m)
            if out is not None:
                consider(out[1], out[0])
        stall = 0
        for i in range(starts):
            rng = np.random.default_rng(np.random.SeedSequence((seed, m, i)))
            x0 = sample(rng, m)
            out = run_start(x0, m)
            if out is not None and consider(out[1], out[0]):
                stall = 0
            else:
                stall += 1
                if stall >= stall_limit:
                    break

    if best is None:
        raise BodyError("no feasible billiard candidate found")

    _, length, pts = best
    # drop consecutive duplicate points, then position the polygon so the
    # covering homothet of ratio 1 is the body itself
    keep = [0]
    for i in range(1, len(pts)):
        if np.linalg.norm(pts[i] - pts[keep[-1]]) > 1e-9:
            keep.append(i)
    if len(keep) >= 2 and np.linalg.norm(pts[keep[-1]] - pts[keep[0]]) <= 1e-9:
        keep.pop()
    pts = pts[keep] if len(keep) >= 2 else pts
    # remove points that change neither the length nor feasibility (interior
    # collinear points left over from a higher bounce count)
    changed = True
    while changed and len(pts) > 2:
        changed = False
        for i in range(len(pts)):
            cand = np.delete(pts, i, axis=0)
            if (abs(trajectory_length(cand, g) - length) <= 1e-9
                    and lam_of(cand) >= 1.0 - 1e-9):
                pts = cand
                changed = True
                break
    fit = min_homothet_cover(K, pts, tol=tol)
    pts = pts - fit.translation
    length = trajectory_length(pts, g)
    lam = lam_of(pts)
    return Trajectory(points=pts, gauge_length=length, gauge_id=g.label,
                      lam=float(lam), converged=abs(lam - 1.0) <= 1e-6)


def capacity_product_polar(K: ConvexBody, g: Gauge, starts: int = 64,
                           seed: int = 0) -> float:
    """Capacity of the table times the polar gauge ball, as a billiard length."""
    return shortest_trajectory(K, g, starts=starts, seed=seed).gauge_length


# ---------------------------------------------------------------------------
# reflection-law verification

_BAND = 1e-7


def _momentum_faces(g: Gauge, edges):
    """Per edge: either a fixed momentum vector or the vertices of the
    attaining face of the polar unit ball."""
    B = g.unit_ball
    faces = []
    if isinstance(B, Ball):
        c, r = B.center, B.radius
        a = r * r - c @ c
        for e in edges:
            s = e @ c
            root = math.sqrt(s * s + a * (e @ e))
            p = ((s * c + a * e) / root - c) / a
            faces.append(("fixed", p))
        return faces
    W = _as_vertex_body(polar(B)).vertices
    for e in edges:
        vals = W @ e
        top = vals.max()
        scale = max(abs(top), 1.0)
        tied = W[vals >= top - _BAND * scale]
        if len(tied) == 1:
            faces.append(("fixed", tied[0]))
        else:
            faces.append(("face", tied))
    return faces


def _normal_cone(K: ConvexBody, q, band):
    if isinstance(K, Ball):
        r = np.linalg.norm(q - K.center)
        if abs(r - K.radius) > band * (1.0 + K.radius):
            return None
        return ((q - K.center) / r)[None, :]
    U, b = K.facet_data()
    slack = b - U @ q
    active = slack <= band * (1.0 + np.abs(b))
    if (slack < -band * (1.0 + np.abs(b))).any():
        return None
    if not active.any():
        return None
    return U[active]


def verify_reflection(traj, K: ConvexBody, g: Gauge, tol: float = 1e-6) -> ReflectionCertificate:
    """Check the gauge reflection law at every bounce of a closed polygon.

    Builds momenta on the boundary of the polar gauge ball attaining the
    length of each edge, then solves one feasibility program for the face
    coefficients and the normal multipliers: at each bounce the incoming
    minus outgoing momentum must lie in the cone of outward normals. The
    reported violation is the smallest uniform bound on the residual.
    """
    pts = traj.points if isinstance(traj, Trajectory) else np.atleast_2d(np.asarray(traj, float))
    m, d = pts.shape
    if d != K.dim or d != g.dim:
        raise DimensionMismatch("trajectory, body, and gauge dimensions differ")
    edges = np.roll(pts, -1, axis=0) - pts
    lengths = g.values(edges)
    if (lengths <= 1e-12).any():
        raise BodyError("degenerate edge in trajectory")

    faces = _momentum_faces(g, edges)
    cones = []
    band = max(_BAND, tol)
    for i in range(m):
        cone = _normal_cone(K, pts[i], band)
        if cone is None:
            raise BodyError(f"bounce point {i} is not on the body boundary")
        cones.append(cone)

    # variables: theta blocks (face coefficients), beta blocks (cone
    # multipliers), v (uniform violation bound); minimize v
    th_off, nvar = [], 0
    for kind, data in faces:
        th_off.append(nvar)
        if kind == "face":
            nvar += len(data)
    beta_off = []
    for cone in cones:
        beta_off.append(nvar)
        nvar += len(cone)
    v_idx = nvar
    nvar += 1

    a_ub, b_ub, a_eq, b_eq = [], [], [], []

    for i in range(m):
        prev = (i - 1) % m
        cone = cones[i]
        for k in range(d):
            row = np.zeros(nvar)
            const = 0.0
            # + p_prev component k
            kindp, datap = faces[prev]
            if kindp == "fixed":
                const += datap[k]
            else:
                row[th_off[prev]:th_off[prev] + len(datap)] += datap[:, k]
            # - p_i component k
            kindi, datai = faces[i]
            if kindi == "fixed":
                const -= datai[k]
            else:
                row[th_off[i]:th_off[i] + len(datai)] -= datai[:, k]
            # - sum beta_j u_j component k
            row[beta_off[i]:beta_off[i] + len(cone)] -= cone[:, k]
            # |expr| <= v  ->  expr - v <= -const and -expr - v <= const
            up = row.copy()
            up[v_idx] = -1.0
            a_ub.append(up)
            b_ub.append(-const)
            dn = -row
            dn[v_idx] = -1.0
            a_ub.append(dn)
            b_ub.append(const)

    for i, (kind, data) in enumerate(faces):
        if kind == "face":
            row = np.zeros(nvar)
            row[th_off[i]:th_off[i] + len(data)] = 1.0
            a_eq.append(row)
            b_eq.append(1.0)

    cost = np.zeros(nvar)
    cost[v_idx] = 1.0
    res = solve_lp(cost, a_ub=np.asarray(a_ub), b_ub=np.asarray(b_ub),
                   a_eq=np.asarray(a_eq) if a_eq else None,
                   b_eq=np.asarray(b_eq) if b_eq else None,
                   nonneg=np.ones(nvar, bool))
    if not res.ok:
        raise GaugeError(f"reflection feasibility program failed: {res.status}")

    momenta = np.empty((m, d))
    for i, (kind, data) in enumerate(faces):
        if kind == "fixed":
            momenta[i] = data
        else:
            theta = res.x[th_off[i]:th_off[i] + len(data)]
            momenta[i] = theta @ data
    multipliers = np.array([res.x[beta_off[i]:beta_off[i] + len(cones[i])].sum()
                            for i in range(m)])
    return ReflectionCertificate(momenta=momenta, multipliers=multipliers,
                                 max_violation=float(res.x[v_idx]))
