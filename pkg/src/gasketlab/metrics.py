"""Internal metrics on gasket regions.

Two base schemes: chemical distance (BFS hop count on admissible
adjacency) and effective resistance with unit conductance per edge,
solved through the grounded graph Laplacian.  Geodesic-functional schemes
plug in through the path-functional module.  Disconnected pairs carry an
explicit infinite sentinel, never a large float, so axiom checks can
distinguish disconnection from remoteness.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.linalg import cg as sparse_cg

from .gasket import GasketGraph, Region, admissible_distance_graph

INF = float("inf")

_DENSE_LIMIT = 500


def bfs_distances(adj: dict, src) -> dict:
    """Hop distances from src over an adjacency dict."""
    dist = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def chemical_distance(g: GasketGraph, U: Region, x, y) -> float:
    """Shortest admissible path length (hops) between x and y within U."""
    if x not in U.vertices or y not in U.vertices:
        raise ValueError("endpoints must lie in the region")
    if x == y:
        return 0.0
    adj = admissible_distance_graph(g, U)
    dist = bfs_distances(adj, x)
    return float(dist.get(y, INF))


def resistance_from_edges(n: int, edges, x: int, y: int, tol: float = 1e-12) -> float:
    """Effective resistance between nodes x, y of a multigraph.

    edges: iterable of (u, v) pairs or (u, v, multiplicity).  Unit
    conductance per parallel edge.  Grounded-Laplacian solve; dense
    Cholesky below _DENSE_LIMIT nodes, Jacobi-preconditioned conjugate
    gradients above.
    """
    if x == y:
        return 0.0
    w: dict[tuple[int, int], float] = {}
    for e in edges:
        u, v = e[0], e[1]
        m = e[2] if len(e) > 2 else 1.0
        if u == v:
            continue
        key = (u, v) if u < v else (v, u)
        w[key] = w.get(key, 0.0) + float(m)
    if not w:
        return INF
    rows, cols, vals = [], [], []
    deg = np.zeros(n)
    for (u, v), c in w.items():
        rows += [u, v]
        cols += [v, u]
        vals += [-c, -c]
        deg[u] += c
        deg[v] += c
    rows += list(range(n))
    cols += list(range(n))
    vals += deg.tolist()
    L = csr_matrix((vals, (rows, cols)), shape=(n, n))

    keep = np.array([i for i in range(n) if i != x])
    pos = -np.ones(n, dtype=int)
    pos[keep] = np.arange(keep.size)
    Lg = L[keep][:, keep]
    b = np.zeros(keep.size)
    b[pos[y]] = 1.0
    if keep.size <= _DENSE_LIMIT:
        try:
            v = np.linalg.solve(Lg.toarray(), b)
        except np.linalg.LinAlgError:
            return INF
        # a singular grounded Laplacian block means x, y are disconnected;
        # guard against solvers that do not raise
        if not np.all(np.isfinite(v)):
            return INF
    else:
        diag = Lg.diagonal()
        dinv = np.where(diag > 0, 1.0 / diag, 0.0)

        def jacobi(r):
            return dinv * r

        from scipy.sparse.linalg import LinearOperator

        M = LinearOperator(Lg.shape, matvec=jacobi)
        v, info = sparse_cg(Lg, b, rtol=tol, atol=0.0, maxiter=20 * n, M=M)
        if info != 0:
            raise RuntimeError(f"conjugate gradient failed to converge (info={info})")
    return float(v[pos[y]])


def effective_resistance(g: GasketGraph, U: Region, x, y) -> float:
    """Effective resistance between x and y in the region's unit-conductance
    admissible graph; infinite sentinel when disconnected."""
    if x not in U.vertices or y not in U.vertices:
        raise ValueError("endpoints must lie in the region")
    if x == y:
        return 0.0
    adj = admissible_distance_graph(g, U)
    if y not in bfs_distances(adj, x):
        return INF
    verts = sorted(adj)
    local = {v: i for i, v in enumerate(verts)}
    edges = [(local[u], local[v]) for u in verts for v in adj[u] if u < v]
    return resistance_from_edges(len(verts), edges, local[x], local[y])


@dataclass
class InternalMetric:
    """Symmetric distance table over marked vertices of one region."""

    region: Region
    scheme: str
    marked: tuple
    values: np.ndarray
    normalizer: float = 1.0

    def d(self, x, y) -> float:
        i = self.marked.index(x)
        j = self.marked.index(y)
        return float(self.values[i, j]) / self.normalizer


def internal_metric(g: GasketGraph, U: Region, scheme, marked) -> InternalMetric:
    """Pairwise distance table under a scheme.

    scheme: "chemical", "resistance", or a PathFunctional instance (the
    geodesic-functional scheme of the path-functional module).
    """
    marked = tuple(marked)
    if not set(marked) <= U.vertices:
        raise ValueError("marked vertices must lie in the region")
    m = len(marked)
    vals = np.zeros((m, m))
    if scheme == "chemical":
        adj = admissible_distance_graph(g, U)
        for i, x in enumerate(marked):
            dist = bfs_distances(adj, x)
            for j, y in enumerate(marked):
                vals[i, j] = dist.get(y, INF)
        vals = np.minimum(vals, vals.T)
    elif scheme == "resistance":
        for i in range(m):
            for j in range(i + 1, m):
                vals[i, j] = vals[j, i] = effective_resistance(g, U, marked[i], marked[j])
    else:
        from .pathfun import PathFunctional, approx_geodesic_metric

        if not isinstance(scheme, PathFunctional):
            raise ValueError(f"unknown scheme: {scheme!r}")
        for i in range(m):
            for j in range(i + 1, m):
                v = approx_geodesic_metric(g, U, scheme, marked[i], marked[j])
                vals[i, j] = vals[j, i] = v.value
    name = scheme if isinstance(scheme, str) else f"geodesic_functional({scheme.kind})"
    return InternalMetric(region=U, scheme=name, marked=marked, values=vals)


def restrict_and_compare(g: GasketGraph, V: Region, Vp: Region, scheme, x, y):
    """Distances of the same pair in nested regions V <= V', for the
    monotonicity and compatibility checks."""
    if not V.vertices <= Vp.vertices:
        raise ValueError("V must be contained in V'")
    if scheme == "chemical":
        return chemical_distance(g, V, x, y), chemical_distance(g, Vp, x, y)
    if scheme == "resistance":
        return effective_resistance(g, V, x, y), effective_resistance(g, Vp, x, y)
    from .pathfun import approx_geodesic_metric

    a = approx_geodesic_metric(g, V, scheme, x, y).value
    b = approx_geodesic_metric(g, Vp, scheme, x, y).value
    return a, b
