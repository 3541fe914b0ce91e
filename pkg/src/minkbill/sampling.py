"""Deterministic random generators shared by the test suites and the CLI.

Every generator takes an explicit numpy Generator; `rng_from` builds one from
a seed plus an arbitrary integer key so that parallel suites draw from
independent streams in a reproducible way.
"""

from __future__ import annotations

import numpy as np

from .geometry import Ball, ConvexBody, VPolytope


def rng_from(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((int(seed),) + tuple(int(k) for k in key)))


def random_polytope(rng, dim: int = 2, points: int = 8) -> VPolytope:
    """Hull of a small gaussian cloud; full-dimensional with probability 1."""
    return VPolytope(rng.normal(size=(points, dim)))


def random_symmetric_polytope(rng, dim: int = 2, points: int = 5) -> VPolytope:
    P = rng.normal(size=(points, dim))
    return VPolytope(np.vstack([P, -P]))


def random_body_origin_interior(rng, dim: int = 2, points: int = 8) -> VPolytope:
    """Random polytope translated so the origin is strictly interior."""
    K = random_polytope(rng, dim, points)
    return K.translate(-K.interior_point())


def random_plank_cover(K: ConvexBody, rng, max_planks: int = 6):
    """Planks covering K by construction: slab partitions along one random
    direction, optionally with one slab replaced by a cross-direction
    partition. Gaps never appear; overlaps may."""
    from .planks import Plank

    d1, d2 = rng.normal(size=(2, K.dim))
    n1 = d1 / np.linalg.norm(d1)
    n2 = d2 / np.linalg.norm(d2)
    lo1, hi1 = -K.support(-n1), K.support(n1)
    span1 = hi1 - lo1
    planks = []
    if rng.uniform() < 0.65 or max_planks < 3:
        k = int(rng.integers(1, max_planks + 1))
        cuts = np.sort(rng.uniform(lo1, hi1, size=k - 1))
        edges = [lo1, *cuts.tolist(), hi1]
        # a third of the draws keep the partition exact, so planks touch
        # along shared boundaries and the width sum is tight
        ov = 0.0 if rng.uniform() < 0.35 else 0.08 * span1
        for a, b in zip(edges[:-1], edges[1:]):
            planks.append(Plank(n1, a - ov * rng.uniform(), b + ov * rng.uniform()))
    else:
        k1 = int(rng.integers(1, max_planks - 1))
        k2 = int(rng.integers(1, max_planks - k1 + 1))
        cut = rng.uniform(lo1 + 0.2 * span1, hi1 - 0.1 * span1)
        cuts = np.sort(rng.uniform(lo1, cut, size=k1 - 1))
        edges = [lo1, *cuts.tolist(), cut]
        for a, b in zip(edges[:-1], edges[1:]):
            planks.append(Plank(n1, a, b))
        lo2, hi2 = -K.support(-n2), K.support(n2)
        cuts2 = np.sort(rng.uniform(lo2, hi2, size=k2 - 1))
        edges2 = [lo2, *cuts2.tolist(), hi2]
        for a, b in zip(edges2[:-1], edges2[1:]):
            planks.append(Plank(n2, a, b))
    return planks


def grid_points(K: ConvexBody, per_axis: int = 40) -> np.ndarray:
    """Deterministic lattice of points inside K (its bounding-box grid)."""
    lo, hi = K.bounding_box()
    axes = [np.linspace(lo[i], hi[i], per_axis) for i in range(K.dim)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, K.dim)
    if isinstance(K, Ball):
        inside = np.linalg.norm(mesh - K.center, axis=1) <= K.radius + 1e-12
    else:
        U, b = K.facet_data()
        inside = ((U @ mesh.T) - b[:, None] <= 1e-12).all(axis=0)
    return mesh[inside]


def random_connected_graph(rng, max_edges: int = 6, dim: int = 2):
    """Random embedded connected graph: a spanning tree plus optional cycles."""
    from .oscillation import EmbeddedGraph

    n_edges = int(rng.integers(1, max_edges + 1))
    n_nodes = int(rng.integers(2, n_edges + 2))
    n_edges = min(n_edges, n_nodes * (n_nodes - 1) // 2)
    nodes = rng.uniform(-1.0, 1.0, size=(n_nodes, dim))
    edges = [(int(rng.integers(0, k)), k) for k in range(1, n_nodes)]
    seen = set(edges)
    while len(edges) < n_edges:
        i, j = sorted(rng.choice(n_nodes, size=2, replace=False).tolist())
        if (i, j) not in seen:
            seen.add((i, j))
            edges.append((i, j))
    return EmbeddedGraph(nodes, edges)
