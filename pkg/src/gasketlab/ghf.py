"""Gromov-Hausdorff-function distances for finite marked metric spaces.

A marked metric space is a finite metric space with a bounded real-valued
function on a marked subset (the target space defaults to the real line;
separation-point tuples enter as marked subsets carrying the constant
value 1).  The matching discrepancy d_infty asks each marked point of
either side for a partner within delta in both position and value.

The computational definition of the distance minimizes, over covering
correspondences assembled from a pair of maps (one each way, i.e. the
minimal covers), the sum of half the metric distortion and the d_infty
term evaluated in the glued space; this correspondence convention is
fixed here (the infimum over ambient embeddings can differ by a bounded
factor in general) and is cross-checked against explicit ambient
embeddings on fixtures.  Exact mode enumerates every map pair and is
limited to 10 points total; beyond that the bound operation sandwiches
the value between a diameter/value-gap lower bound and a greedy-
correspondence upper bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

INF = float("inf")

_EXACT_LIMIT = 10


@dataclass
class MarkedMetricSpace:
    dist: np.ndarray
    marked: tuple = ()
    values: tuple = ()
    embedding: np.ndarray | None = None
    label: str = ""

    def __post_init__(self):
        d = np.asarray(self.dist, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("dist must be a square matrix")
        n = d.shape[0]
        if n < 1:
            raise ValueError("need at least one point")
        if not np.allclose(d, d.T, atol=1e-12):
            raise ValueError("dist must be symmetric")
        if not np.allclose(np.diag(d), 0.0, atol=1e-12):
            raise ValueError("dist must vanish on the diagonal")
        if np.any(d < -1e-12):
            raise ValueError("dist must be nonnegative")
        through = np.min(d[:, :, None] + d[None, :, :], axis=1)
        if np.any(d > through + 1e-9):
            raise ValueError("dist violates the triangle inequality")
        self.dist = d
        self.marked = tuple(int(i) for i in self.marked)
        self.values = tuple(float(v) for v in self.values)
        if len(self.marked) != len(self.values):
            raise ValueError("marked and values must have equal length")
        if any(not 0 <= i < n for i in self.marked):
            raise ValueError("marked indices out of range")

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def diameter(self) -> float:
        return float(self.dist.max())

    def as_dict(self):
        out = {
            "n": self.n,
            "dist": [float(v) for v in self.dist.ravel()],
            "marked": list(self.marked),
            "values": list(self.values),
        }
        if self.embedding is not None:
            out["embedding"] = [list(map(float, p)) for p in self.embedding]
        return out

    @classmethod
    def from_dict(cls, data) -> "MarkedMetricSpace":
        n = int(data["n"])
        d = np.asarray(data["dist"], dtype=float).reshape(n, n)
        emb = data.get("embedding")
        return cls(
            dist=d,
            marked=tuple(data.get("marked", ())),
            values=tuple(data.get("values", ())),
            embedding=None if emb is None else np.asarray(emb, dtype=float),
        )


def space_from_table(values: np.ndarray, marked=(), marks=(), embedding=None) -> MarkedMetricSpace:
    return MarkedMetricSpace(dist=np.asarray(values, float), marked=marked, values=marks, embedding=embedding)


def d_infty(cross: np.ndarray, f1, f2) -> float:
    """Matching discrepancy of two marked sets inside one ambient space.

    cross[i, j] = ambient distance between the i-th marked point of the
    first set and the j-th of the second; f1, f2 are their values.
    """
    f1 = np.asarray(f1, dtype=float)
    f2 = np.asarray(f2, dtype=float)
    if f1.size == 0 and f2.size == 0:
        return 0.0
    if f1.size == 0 or f2.size == 0:
        return INF
    cross = np.asarray(cross, dtype=float).reshape(f1.size, f2.size)
    gap = np.abs(f1[:, None] - f2[None, :])
    need = np.maximum(cross, gap)
    # minimal delta is attained at one of the finite pairwise candidates
    return float(max(need.min(axis=1).max(), need.min(axis=0).max()))


def _map_arrays(n_from: int, n_to: int) -> np.ndarray:
    """All maps {0..n_from-1} -> {0..n_to-1}, one row each."""
    grids = np.meshgrid(*([np.arange(n_to)] * n_from), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _self_distortion(d_from: np.ndarray, d_to: np.ndarray, maps: np.ndarray) -> np.ndarray:
    img = d_to[maps[:, :, None], maps[:, None, :]]
    return np.abs(d_from[None, :, :] - img).max(axis=(1, 2))


def _correspondence_value(A: MarkedMetricSpace, B: MarkedMetricSpace, phi, psi) -> float:
    """Objective of one covering correspondence graph(phi) | graph(psi)."""
    phi = np.asarray(phi, dtype=int)
    psi = np.asarray(psi, dtype=int)
    d1, d2 = A.dist, B.dist
    dis = max(
        float(np.abs(d1 - d2[phi[:, None], phi[None, :]]).max()),
        float(np.abs(d2 - d1[psi[:, None], psi[None, :]]).max()),
        float(np.abs(d1[:, psi] - d2[phi, :]).max()),
    )
    return 0.5 * dis + _dinf_glued(A, B, phi, psi, 0.5 * dis)


def _dinf_glued(A, B, phi, psi, r) -> float:
    m1, m2 = len(A.marked), len(B.marked)
    if m1 == 0 and m2 == 0:
        return 0.0
    if m1 == 0 or m2 == 0:
        return INF
    K1 = np.asarray(A.marked)
    K2 = np.asarray(B.marked)
    d1, d2 = A.dist, B.dist
    # d_R(x, y) = r + min over correspondence pairs of d1(x, a) + d2(b, y)
    a_side = (d1[K1][:, :, None] + d2[phi][:, K2][None, :, :]).min(axis=1)
    b_side = (d1[K1][:, psi][:, :, None] + d2[:, K2][None, :, :]).min(axis=1)
    glued = r + np.minimum(a_side, b_side)
    gap = np.abs(np.asarray(A.values)[:, None] - np.asarray(B.values)[None, :])
    need = np.maximum(glued, gap)
    return float(max(need.min(axis=1).max(), need.min(axis=0).max()))


def ghf_distance_exact(A: MarkedMetricSpace, B: MarkedMetricSpace) -> float:
    """Minimum of the correspondence objective over all map pairs.

    Limited to |A| + |B| <= 10 points; larger inputs are directed to
    ghf_distance_bounds.
    """
    if A.n + B.n > _EXACT_LIMIT:
        raise ValueError(
            f"exact mode is limited to {_EXACT_LIMIT} points total; use ghf_distance_bounds"
        )
    d1, d2 = A.dist, B.dist
    phis = _map_arrays(A.n, B.n)
    psis = _map_arrays(B.n, A.n)
    dis_phi = _self_distortion(d1, d2, phis)
    dis_psi = _self_distortion(d2, d1, psis)

    m1, m2 = len(A.marked), len(B.marked)
    if (m1 == 0) != (m2 == 0):
        return INF
    K1 = np.asarray(A.marked, dtype=int)
    K2 = np.asarray(B.marked, dtype=int)
    if m1:
        gap = np.abs(np.asarray(A.values)[:, None] - np.asarray(B.values)[None, :])
        # b_side[psi, x, y] = min_b d1(x, psi(b)) + d2(b, y)
        b_side = np.empty((psis.shape[0], m1, m2))
        for gi, psi in enumerate(psis):
            b_side[gi] = (d1[np.ix_(K1, psi)][:, :, None] + d2[:, K2][None, :, :]).min(axis=1)

    best = INF
    chunk = max(1, 4_000_000 // max(psis.shape[0] * A.n * B.n, 1))
    for start in range(0, phis.shape[0], chunk):
        pc = phis[start : start + chunk]
        # cross distortion: |d1(i, psi(l)) - d2(phi(i), l)|
        c1 = d1[:, psis.T]  # (n1, n2, n_psi)
        c2 = d2[pc][:, :, :]  # (chunk, n1, n2)
        cross = np.abs(c1.transpose(2, 0, 1)[None, :, :, :] - c2[:, None, :, :]).max(axis=(2, 3))
        dis = np.maximum(np.maximum(dis_phi[start : start + chunk, None], dis_psi[None, :]), cross)
        if m1:
            a_side = (d1[K1][None, :, :, None] + d2[pc][:, None, :, :][:, :, :, K2]).min(axis=2)
            glued = np.minimum(a_side[:, None, :, :], b_side[None, :, :, :]) + 0.5 * dis[:, :, None, None]
            need = np.maximum(glued, gap[None, None, :, :])
            dinf = np.maximum(need.min(axis=3).max(axis=2), need.min(axis=2).max(axis=2))
        else:
            dinf = 0.0
        total = 0.5 * dis + dinf
        best = min(best, float(total.min()))
    return best


def ghf_lower_bound(A: MarkedMetricSpace, B: MarkedMetricSpace) -> float:
    lb = 0.5 * abs(A.diameter() - B.diameter())
    m1, m2 = len(A.marked), len(B.marked)
    if (m1 == 0) != (m2 == 0):
        return INF
    if m1 and m2:
        lb = max(
            lb,
            abs(max(A.values) - max(B.values)),
            abs(min(A.values) - min(B.values)),
        )
    return float(lb)


def _greedy_maps(A: MarkedMetricSpace, B: MarkedMetricSpace):
    """Deterministic greedy map A -> B matching sorted distance profiles."""
    prof1 = np.sort(A.dist, axis=1)
    prof2 = np.sort(B.dist, axis=1)
    k = min(A.n, B.n)
    phi = np.empty(A.n, dtype=int)
    for i in range(A.n):
        costs = [np.abs(prof1[i, :k] - prof2[j, :k]).max() for j in range(B.n)]
        phi[i] = int(np.argmin(costs))
    return phi


def ghf_distance_bounds(A: MarkedMetricSpace, B: MarkedMetricSpace):
    """(lower, upper) bracket of the correspondence objective, any sizes."""
    lb = ghf_lower_bound(A, B)
    if math.isinf(lb):
        return lb, INF
    phi = _greedy_maps(A, B)
    psi = _greedy_maps(B, A)
    ub = _correspondence_value(A, B, phi, psi)
    if A.n == B.n:
        ident = np.arange(A.n)
        ub = min(ub, _correspondence_value(A, B, ident, ident))
    return lb, float(ub)


def ghf_distance(A: MarkedMetricSpace, B: MarkedMetricSpace) -> float:
    """Exact value when small enough, else the upper bound."""
    if A.n + B.n <= _EXACT_LIMIT:
        return ghf_distance_exact(A, B)
    return ghf_distance_bounds(A, B)[1]


@dataclass(frozen=True)
class HoelderClassParams:
    alpha: float
    C: float
    r: float = 0.0

    def __post_init__(self):
        if self.alpha <= 0 or self.C <= 0 or self.r < 0:
            raise ValueError("need alpha, C > 0 and r >= 0")


def hoelder_membership(A: MarkedMetricSpace, params: HoelderClassParams) -> bool:
    """Value bound and the (alpha, C)-regularity above the scale r."""
    if not A.marked:
        return True
    vals = np.asarray(A.values)
    if np.abs(vals).max() > params.C + 1e-12:
        return False
    K = np.asarray(A.marked)
    d = A.dist[np.ix_(K, K)]
    gap = np.abs(vals[:, None] - vals[None, :])
    bound = params.C * np.maximum(d, params.r) ** params.alpha
    np.fill_diagonal(bound, np.inf)
    return bool(np.all(gap <= bound + 1e-12))


@dataclass
class CauchyReport:
    pairwise: np.ndarray
    tail_sup: tuple
    cauchy: bool
    exact: bool


def sequence_convergence_probe(spaces, tol: float = 1e-9) -> CauchyReport:
    """Pairwise distances and the monotone-tail statistic sup_{i,j>=k} d_ij."""
    spaces = list(spaces)
    if len(spaces) < 3:
        raise ValueError("need at least 3 spaces")
    m = len(spaces)
    exact = all(a.n + b.n <= _EXACT_LIMIT for a in spaces for b in spaces)
    D = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            D[i, j] = D[j, i] = ghf_distance(spaces[i], spaces[j])
    tails = tuple(float(D[k:, k:].max()) for k in range(m - 1))
    cauchy = all(a >= b - tol for a, b in zip(tails, tails[1:])) and tails[-1] <= tails[0] + tol
    return CauchyReport(pairwise=D, tail_sup=tails, cauchy=bool(cauchy), exact=exact)


def separation_marked_space(g, U, max_points: int = 7) -> MarkedMetricSpace:
    """Triples (x, y, z) with z separating x from y, as a marked subset of
    the cubed region (sum metric) carrying the constant value 1."""
    from .gasket import admissible_distance_graph
    from .metrics import bfs_distances

    verts = sorted(U.vertices)[:max_points]
    adj = admissible_distance_graph(g, U)
    adj = {v: tuple(w for w in ws if w in verts) for v, ws in adj.items() if v in verts}
    base = np.full((len(verts), len(verts)), np.inf)
    for i, v in enumerate(verts):
        d = bfs_distances(adj, v)
        for j, w in enumerate(verts):
            base[i, j] = d.get(w, np.inf)
    if not np.all(np.isfinite(base)):
        raise ValueError("region sample is disconnected; shrink max_points")
    k = len(verts)
    trip = list(itertools.product(range(k), repeat=3))
    n = len(trip)
    D = np.zeros((n, n))
    for a, (x1, y1, z1) in enumerate(trip):
        for b, (x2, y2, z2) in enumerate(trip):
            D[a, b] = base[x1, x2] + base[y1, y2] + base[z1, z2]
    marked = []
    for a, (x, y, z) in enumerate(trip):
        if x == y or z in (x, y):
            continue
        seen = {z}
        stack = [verts[x]]
        found = False
        local = {v: i for i, v in enumerate(verts)}
        reach = {verts[x]}
        while stack:
            u = stack.pop()
            if u == verts[y]:
                found = True
                break
            for w in adj[u]:
                if local[w] != z and w not in reach:
                    reach.add(w)
                    stack.append(w)
        if not found:
            marked.append(a)
    return MarkedMetricSpace(
        dist=D, marked=tuple(marked), values=tuple(1.0 for _ in marked)
    )
