"""Discrete gasket of a single cluster: admissible-path graph, thin flags,
cut vertices, contact vertices of loop pairs, and regions between loops.

The gasket of an interior cluster is the cluster itself (hole interiors
contain no cluster sites).  Admissible paths are paths in the cluster's
6-neighbor graph: they cannot cross any interface loop.  A vertex is thin
when it is joined to the cluster's exterior boundary by two
vertex-disjoint admissible paths; pinch sites that fail this sit behind a
single separating vertex.  Prime ends are not duplicated: a pinch site is
one graph vertex even where a continuum treatment would split it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from shapely import contains_xy
from shapely.geometry import Polygon
from shapely.validation import make_valid

from .percolation import ClusterSet

__all__ = [
    "GasketGraph",
    "Region",
    "build_gasket",
    "admissible_distance_graph",
    "region_between",
    "separation_points",
    "contact_vertices",
    "biconnected_components",
]


def biconnected_components(adj, n):
    """Iterative Hopcroft-Tarjan.

    adj: sequence of neighbor sequences over vertices 0..n-1.
    Returns (components, articulation_points) where components is a list of
    vertex sets (one per biconnected component with >= 1 edge).
    """
    disc = [-1] * n
    low = [0] * n
    comps: list[set] = []
    arts: set[int] = set()
    counter = 0
    for root in range(n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = counter
        counter += 1
        estack: list[tuple[int, int]] = []
        stack = [(root, -1, iter(adj[root]))]
        root_children = 0
        while stack:
            v, parent, it = stack[-1]
            descended = False
            for w in it:
                if w == parent:
                    continue
                if disc[w] == -1:
                    estack.append((v, w))
                    disc[w] = low[w] = counter
                    counter += 1
                    stack.append((w, v, iter(adj[w])))
                    descended = True
                    break
                if disc[w] < disc[v]:
                    estack.append((v, w))
                    if disc[w] < low[v]:
                        low[v] = disc[w]
            if descended:
                continue
            stack.pop()
            if not stack:
                continue
            u = stack[-1][0]
            if low[v] < low[u]:
                low[u] = low[v]
            if low[v] >= disc[u]:
                comp = set()
                while True:
                    e = estack.pop()
                    comp.add(e[0])
                    comp.add(e[1])
                    if e == (u, v):
                        break
                comps.append(comp)
                if u == root:
                    root_children += 1
                    if root_children >= 2:
                        arts.add(u)
                else:
                    arts.add(u)
    return comps, arts


@dataclass(frozen=True)
class Region:
    """Connected vertex subset of a gasket with marked boundary vertices."""

    vertices: frozenset
    bounding_loops: tuple
    marked: tuple

    def __contains__(self, v) -> bool:
        return v in self.vertices

    def __len__(self) -> int:
        return len(self.vertices)


class GasketGraph:
    """Admissible-path graph over one cluster, with derived structure.

    Vertices are local integer ids; translate with vertex_id / vertex_qr.
    Distances in scaled units divide hop counts by the disk radius n, the
    surrogate for Euclidean path diameter used throughout the package.
    """

    def __init__(self, cluster_set: ClusterSet, cluster_id: int):
        cs = cluster_set
        if cluster_id < 1 or cluster_id > cs.n_clusters:
            raise ValueError(f"no such cluster: {cluster_id}")
        flats = cs.cluster_site_flats(cluster_id)
        if flats.size == 0:
            raise ValueError(f"cluster {cluster_id} is empty")
        self.cluster_set = cs
        self.cluster_id = int(cluster_id)
        self.lattice = cs.lattice
        self.vertices = flats
        self.n_vertices = flats.size
        self._local = {int(f): i for i, f in enumerate(flats)}
        x, y = cs.lattice.flat_xy(flats)
        self.coords = np.stack([x, y], axis=1)
        self.qr = cs.lattice.flat_to_qr(flats)

        member = np.zeros(cs.lattice.in_disk.size, dtype=bool)
        member[flats] = True
        adj: list[list[int]] = [[] for _ in range(flats.size)]
        for off in cs.lattice.dir_offsets:
            nb = flats + int(off)
            ok = member[nb]
            for a, b in zip(flats[ok], nb[ok]):
                adj[self._local[int(a)]].append(self._local[int(b)])
        self.adj = [tuple(sorted(v)) for v in adj]

        self.loop_ids = np.flatnonzero(cs.loop_cluster == cluster_id)
        ext = self.loop_ids[cs.loop_is_exterior[self.loop_ids]]
        self.exterior_loop = int(ext[0])

        lmem: list[set] = [set() for _ in range(flats.size)]
        mine = cs.cluster_grid.ravel()[cs.side_cell] == cluster_id
        for cell, lid in zip(cs.side_cell[mine], cs.side_loop[mine]):
            lmem[self._local[int(cell)]].add(int(lid))
        self.loop_membership = [frozenset(s) for s in lmem]

    # -- derived structure (lazy: harvesting loops never pays for it) -----

    @cached_property
    def _block_structure(self):
        return biconnected_components(self.adj, self.n_vertices)

    @property
    def cut_vertices(self) -> frozenset:
        return frozenset(self._block_structure[1])

    @cached_property
    def thin_flags(self) -> np.ndarray:
        return self._compute_thin_flags()

    def _compute_thin_flags(self) -> np.ndarray:
        """Two vertex-disjoint paths to the exterior boundary, via one
        Tarjan pass on the graph augmented with a virtual boundary vertex."""
        boundary = [i for i, mem in enumerate(self.loop_membership) if self.exterior_loop in mem]
        beta = self.n_vertices
        adj_aug = [list(nb) for nb in self.adj] + [list(boundary)]
        for b in boundary:
            adj_aug[b].append(beta)
        comps, _ = biconnected_components(adj_aug, self.n_vertices + 1)
        thin = np.zeros(self.n_vertices, dtype=bool)
        for comp in comps:
            if beta in comp:
                for v in comp:
                    if v != beta:
                        thin[v] = True
        return thin

    # -- vertex translation ------------------------------------------------

    def vertex_id(self, q: int, r: int) -> int:
        flat = int(self.lattice.qr_to_flat(q, r))
        try:
            return self._local[flat]
        except KeyError:
            raise KeyError(f"({q}, {r}) is not a vertex of this gasket") from None

    def vertex_qr(self, v: int) -> tuple[int, int]:
        q, r = self.qr[v]
        return int(q), int(r)

    def region_all(self) -> Region:
        return Region(
            vertices=frozenset(range(self.n_vertices)),
            bounding_loops=tuple(int(l) for l in self.loop_ids),
            marked=(),
        )

    def scaled_hops(self, hops: float) -> float:
        """Hop count -> d_path surrogate (hops divided by the disk radius)."""
        return hops / self.lattice.n


def build_gasket(clusters: ClusterSet, cluster_id: int) -> GasketGraph:
    """Gasket graph of one cluster: adjacency, thin flags, cut vertices."""
    return GasketGraph(clusters, cluster_id)


def admissible_distance_graph(g: GasketGraph, U: Region) -> dict:
    """Induced adjacency on U; its paths are the admissible paths in U."""
    verts = U.vertices
    if not verts <= set(range(g.n_vertices)):
        raise ValueError("region is not a subset of the gasket vertices")
    return {v: tuple(w for w in g.adj[v] if w in verts) for v in verts}


def contact_vertices(g: GasketGraph, loop_a: int, loop_b: int) -> list:
    """Gasket vertices bounding both loops (pinch sites of the loop pair)."""
    if loop_a == loop_b:
        raise ValueError("need two distinct loops")
    return sorted(
        v for v, mem in enumerate(g.loop_membership) if loop_a in mem and loop_b in mem
    )


def _loop_sides_in_order(cs: ClusterSet, loop_id: int):
    idx = np.flatnonzero(cs.side_loop == loop_id)
    idx = idx[np.argsort(cs.side_pos[idx])]
    bx, by, ax, ay = cs._side_corner_coords()
    return cs.side_cell[idx], np.stack([ax[idx], ay[idx]], axis=1), np.stack(
        [bx[idx], by[idx]], axis=1
    )


def _minimal_arcs(cells: np.ndarray, flat_x: int, flat_y: int):
    """Index ranges of minimal cyclic arcs from an x-visit to a y-visit."""
    m = cells.size
    marks = [(i, "x") for i in np.flatnonzero(cells == flat_x)]
    marks += [(i, "y") for i in np.flatnonzero(cells == flat_y)]
    marks.sort()
    arcs = []
    for j, (i1, t1) in enumerate(marks):
        i2, t2 = marks[(j + 1) % len(marks)]
        if t1 == "x" and t2 == "y":
            if i2 >= i1:
                arcs.append(list(range(i1, i2 + 1)))
            else:
                arcs.append(list(range(i1, m)) + list(range(0, i2 + 1)))
    return arcs


def region_between(
    g: GasketGraph, loop_a: int, loop_b: int, x: int, y: int, containing=()
) -> Region:
    """Vertex set enclosed between the boundary arcs of two loops from x to y.

    x, y must be contact vertices of both loops.  Candidate regions come
    from pairing a minimal x->y arc of loop_a with a minimal y->x arc of
    loop_b, closing the corner polylines through the pinch cells, and
    taking the cells of the two arcs together with the cluster sites
    strictly inside the resulting polygon; the smallest connected
    candidate containing every vertex of `containing` wins.
    """
    contacts = set(contact_vertices(g, loop_a, loop_b))
    if x not in contacts or y not in contacts:
        raise ValueError("x and y must be contact vertices of both loops")
    if x == y:
        return Region(frozenset([x]), (loop_a, loop_b), (x, x))
    cs = g.cluster_set
    fx = int(g.vertices[x])
    fy = int(g.vertices[y])
    cells_a, corners_a, starts_a = _loop_sides_in_order(cs, loop_a)
    cells_b, corners_b, starts_b = _loop_sides_in_order(cs, loop_b)
    cx, cy = g.coords[x], g.coords[y]
    need = frozenset(containing)

    best: frozenset | None = None
    for arc_a in _minimal_arcs(cells_a, fx, fy):
        poly_a = np.vstack([starts_a[arc_a[0]][None, :], corners_a[arc_a]])
        rim_a = {g._local[int(c)] for c in cells_a[arc_a]}
        for arc_b in _minimal_arcs(cells_b, fy, fx):
            poly_b = np.vstack([starts_b[arc_b[0]][None, :], corners_b[arc_b]])
            rim_b = {g._local[int(c)] for c in cells_b[arc_b]}
            ring = np.vstack([poly_a, cy[None, :], poly_b, cx[None, :]])
            poly = Polygon(ring)
            if not poly.is_valid:
                poly = make_valid(poly)
            if poly.is_empty or poly.area <= 0:
                continue
            inside = contains_xy(poly, g.coords[:, 0], g.coords[:, 1])
            cand = set(np.flatnonzero(inside)) | rim_a | rim_b | {x, y}
            if not need <= cand:
                continue
            if not _connected(g, cand):
                continue
            if best is None or len(cand) < len(best):
                best = frozenset(cand)
    if best is None:
        raise ValueError("the chosen arcs do not bound a closed region")
    return Region(best, (loop_a, loop_b), (x, y))


def _connected(g: GasketGraph, verts: set) -> bool:
    if not verts:
        return False
    seen = set()
    stack = [next(iter(verts))]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        stack.extend(w for w in g.adj[v] if w in verts and w not in seen)
    return seen == verts


def thin_hoelder_samples(
    n: int, p: float, seed: int, zeta: float = 0.5, configs: int = 3, sources: int = 12
) -> np.ndarray:
    """Ratios d_path(u, v) / |u - v|^zeta over thin-gasket pairs.

    Distances in scaled units (hops over n, Euclidean gaps over n); u runs
    over a deterministic sample of thin vertices of the largest cluster,
    v over all thin vertices reachable from u.  The upper tail of these
    ratios is the statistical proxy for Euclidean Hoelder control on the
    thin gasket.
    """
    from collections import deque

    from .percolation import decompose, sample, trial_seed

    out = []
    for c in range(configs):
        cs = decompose(sample(n, p, trial_seed(seed, c)))
        if cs.n_clusters == 0:
            continue
        sizes = [cs.cluster_site_flats(cid).size for cid in range(1, cs.n_clusters + 1)]
        g = build_gasket(cs, 1 + int(np.argmax(sizes)))
        thin = np.flatnonzero(g.thin_flags)
        if thin.size < 2:
            continue
        picks = thin[:: max(1, thin.size // sources)][:sources]
        adj = g.adj
        for u in picks:
            dist = {int(u): 0}
            dq = deque([int(u)])
            while dq:
                a = dq.popleft()
                for b in adj[a]:
                    if b not in dist:
                        dist[b] = dist[a] + 1
                        dq.append(b)
            cu = g.coords[u]
            for v in thin:
                v = int(v)
                if v == u or v not in dist:
                    continue
                gap = float(np.hypot(*(g.coords[v] - cu))) / n
                if gap == 0:
                    continue
                out.append((dist[v] / n) / gap**zeta)
    return np.asarray(out)


def separation_points(g: GasketGraph, U: Region, x: int, y: int):
    """One minimum vertex cut between x and y inside U, with its size N.

    Adjacent x, y cannot be separated: returns (empty set, inf).  An
    already-disconnected pair needs no cut: returns (empty set, 0).
    """
    import networkx as nx

    if x == y:
        raise ValueError("x and y must differ")
    adj = admissible_distance_graph(g, U)
    if y in adj[x]:
        return frozenset(), float("inf")
    G = nx.Graph()
    G.add_nodes_from(adj)
    for v, ws in adj.items():
        G.add_edges_from((v, w) for w in ws)
    if not nx.has_path(G, x, y):
        return frozenset(), 0
    cut = nx.minimum_node_cut(G, x, y)
    return frozenset(int(v) for v in cut), len(cut)
