"""Critical site percolation on a triangular-lattice disk.

Sites live at axial coordinates (q, r) with Euclidean embedding
x = q + r/2, y = r*sqrt(3)/2, restricted to the disk of radius n around
the origin.  Sites outside the disk are treated as closed, so every
cluster is an interior cluster.  Each site is drawn as a hexagonal cell;
interface loops between open and closed cells are traced on the hexagonal
dual with open cells kept on the left, which orients every exterior loop
counterclockwise around its cluster.

The loop tracer is fully vectorized: boundary sides form a permutation
under the left-hand successor rule, and cycles of that permutation are
labeled by pointer doubling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import ndimage, sparse
from scipy.sparse import csgraph

from .rng import hash_u64, uniform01

DQ = np.array([1, 0, -1, -1, 0, 1], dtype=np.int64)
DR = np.array([0, 1, 1, 0, -1, -1], dtype=np.int64)
SQ3 = math.sqrt(3.0)

# 6-neighbor connectivity for axial (q, r) grids, rows indexed by dq.
STRUCT6 = np.array([[0, 1, 1], [1, 1, 1], [1, 1, 0]], dtype=int)

# Embedded unit vectors of the 6 directions.
EX = DQ + DR / 2.0
EY = DR * (SQ3 / 2.0)

# Hex-cell corner offsets: corner after side k is the center of the
# triangle spanned by directions k and k+1.
_CA_X = (EX + np.roll(EX, -1)) / 3.0
_CA_Y = (EY + np.roll(EY, -1)) / 3.0
_CB_X = np.roll(_CA_X, 1)
_CB_Y = np.roll(_CA_Y, 1)


class TriDisk:
    """Triangular-lattice disk of radius n with a one-cell padding ring."""

    def __init__(self, radius_n: int):
        if radius_n < 2:
            raise ValueError("radius_n must be >= 2")
        self.n = int(radius_n)
        # axial |q|, |r| reach 2n/sqrt(3) inside the Euclidean disk
        self.pad = int(math.ceil(self.n * 2.0 / SQ3)) + 2
        self.width = 2 * self.pad + 1
        qs, rs = np.meshgrid(
            np.arange(-self.pad, self.pad + 1),
            np.arange(-self.pad, self.pad + 1),
            indexing="ij",
        )
        self.grid_q = qs
        self.grid_r = rs
        self.grid_x = qs + rs / 2.0
        self.grid_y = rs * (SQ3 / 2.0)
        r2 = self.grid_x**2 + self.grid_y**2
        self.in_disk = r2 <= self.n**2 * (1.0 + 1e-12)
        # dense site index in row-major (q, r) order; -1 off the disk
        self.site_index = np.full(self.in_disk.shape, -1, dtype=np.int64)
        flats = np.flatnonzero(self.in_disk.ravel())
        self.site_index.ravel()[flats] = np.arange(flats.size)
        self.site_flats = flats
        self.site_count = flats.size
        # flat-index offsets of the 6 neighbor directions
        self.dir_offsets = DQ * self.width + DR

    def flat_to_qr(self, flats) -> np.ndarray:
        flats = np.asarray(flats)
        return np.stack([flats // self.width - self.pad, flats % self.width - self.pad], axis=-1)

    def qr_to_flat(self, q, r):
        return (np.asarray(q) + self.pad) * self.width + (np.asarray(r) + self.pad)

    def flat_xy(self, flats):
        return self.grid_x.ravel()[flats], self.grid_y.ravel()[flats]


@dataclass(frozen=True, eq=False)
class PercolationConfig:
    """One sampled configuration; reproducible from (n, p, seed)."""

    lattice: TriDisk
    p: float
    seed: int
    open_grid: np.ndarray  # bool over padded grid, False off the disk

    @property
    def open_mask(self) -> np.ndarray:
        """Per-site bits in dense site order (the serialization order)."""
        return self.open_grid.ravel()[self.lattice.site_flats]


def sample(n: int, p: float, seed: int) -> PercolationConfig:
    """I.i.d. Bernoulli(p) site states keyed by (seed, dense site index).

    The draw for a site depends only on the seed and the site's index, so
    the configuration is identical however the sampling is chunked.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    lat = TriDisk(n)
    u = uniform01(seed, np.arange(lat.site_count, dtype=np.uint64))
    grid = np.zeros(lat.in_disk.shape, dtype=bool)
    grid.ravel()[lat.site_flats] = u < p
    return PercolationConfig(lattice=lat, p=float(p), seed=int(seed), open_grid=grid)


@dataclass
class Loop:
    """One interface loop in traced order (open cells on the left)."""

    loop_id: int
    cluster: int
    exterior: bool
    sites_qr: np.ndarray  # (m, 2) axial coordinates of the open cell per side
    dirs: np.ndarray  # (m,) side direction 0..5
    corners: np.ndarray  # (m, 2) dual corner reached after each side

    def __len__(self) -> int:
        return len(self.dirs)

    @property
    def dual_edges(self):
        """Cyclic sequence of dual edges as ((site q, r), direction) pairs."""
        return [((int(q), int(r)), int(k)) for (q, r), k in zip(self.sites_qr, self.dirs)]


class ClusterSet:
    """Union-find style cluster decomposition plus traced interface loops.

    Flat numpy views (side_cell, side_dir, side_loop, side_pos, ...) back
    the fast Monte Carlo consumers; dict/list views materialize lazily for
    inspection and tests.
    """

    def __init__(self, config: PercolationConfig):
        self.config = config
        lat = config.lattice
        self.lattice = lat
        grid = config.open_grid
        labels, n_clusters = ndimage.label(grid, structure=STRUCT6)
        self.cluster_grid = labels
        self.n_clusters = int(n_clusters)
        self._trace_loops()
        self._outermost_clusters()

    # -- loop tracing ---------------------------------------------------

    def _trace_loops(self) -> None:
        lat = self.lattice
        grid = self.config.open_grid
        flat_open = grid.ravel()
        ncell = flat_open.size
        cells = []
        dirs = []
        for k in range(6):
            off = int(lat.dir_offsets[k])
            nb = np.roll(flat_open, -off)
            side = np.flatnonzero(flat_open & ~nb)
            cells.append(side)
            dirs.append(np.full(side.size, k, dtype=np.int8))
        side_cell = np.concatenate(cells) if cells else np.empty(0, dtype=np.int64)
        side_dir = np.concatenate(dirs) if dirs else np.empty(0, dtype=np.int8)
        nside = side_cell.size
        self.side_cell = side_cell
        self.side_dir = side_dir
        if nside == 0:
            self.side_succ = np.empty(0, dtype=np.int64)
            self.side_loop = np.empty(0, dtype=np.int64)
            self.side_pos = np.empty(0, dtype=np.int64)
            self.n_loops = 0
            self.loop_cluster = np.empty(0, dtype=np.int64)
            self.loop_area = np.empty(0)
            self.loop_is_exterior = np.empty(0, dtype=bool)
            self.loop_size = np.empty(0, dtype=np.int64)
            return

        lookup = np.full(6 * ncell, -1, dtype=np.int64)
        lookup[side_dir.astype(np.int64) * ncell + side_cell] = np.arange(nside)

        kp1 = (side_dir.astype(np.int64) + 1) % 6
        u_cell = side_cell + lat.dir_offsets[kp1]
        u_open = flat_open[u_cell]
        succ_cell = np.where(u_open, u_cell, side_cell)
        succ_dir = np.where(u_open, (side_dir.astype(np.int64) - 1) % 6, kp1)
        succ = lookup[succ_dir * ncell + succ_cell]
        self.side_succ = succ

        # cycle labels: minimum side id over the orbit, by pointer doubling
        lab = np.arange(nside)
        nxt = succ.copy()
        for _ in range(int(math.ceil(math.log2(max(nside, 2)))) + 1):
            lab = np.minimum(lab, lab[nxt])
            nxt = nxt[nxt]

        # position along the loop, measured from the root (minimum) side
        root = lab == np.arange(nside)
        succ2 = succ.copy()
        succ2[root] = np.flatnonzero(root)
        ptr = succ2.copy()
        dist = np.where(root, 0, 1).astype(np.int64)
        for _ in range(int(math.ceil(math.log2(max(nside, 2)))) + 1):
            dist = dist + dist[ptr]
            ptr = ptr[ptr]
        roots, loop_of_side = np.unique(lab, return_inverse=True)
        self.n_loops = roots.size
        size = np.bincount(loop_of_side)
        cyclen = size[loop_of_side]
        self.side_loop = loop_of_side
        self.side_pos = (cyclen - dist) % cyclen
        self.loop_size = size

        bx, by, ax, ay = self._side_corner_coords()
        cross = bx * ay - ax * by
        self.loop_area = 0.5 * np.bincount(loop_of_side, weights=cross)
        self.loop_is_exterior = self.loop_area > 0

        loop_cluster = np.zeros(self.n_loops, dtype=np.int64)
        loop_cluster[loop_of_side] = self.cluster_grid.ravel()[side_cell]
        self.loop_cluster = loop_cluster

    def _side_corner_coords(self):
        """Embedded coordinates of each side's start and end dual corner."""
        lat = self.lattice
        x, y = lat.flat_xy(self.side_cell)
        k = self.side_dir.astype(np.int64)
        return x + _CB_X[k], y + _CB_Y[k], x + _CA_X[k], y + _CA_Y[k]

    def _outermost_clusters(self) -> None:
        """A cluster is outermost iff it touches the unbounded closed sea."""
        grid = self.config.open_grid
        closed = ~grid
        clabels, _ = ndimage.label(closed, structure=STRUCT6)
        outside = clabels[0, 0]
        outmask = clabels == outside
        flat_out = outmask.ravel()
        hit = np.zeros_like(flat_out)
        for off in self.lattice.dir_offsets:
            hit |= np.roll(flat_out, int(off))
        touching = np.unique(self.cluster_grid.ravel()[grid.ravel() & hit])
        flags = np.zeros(self.n_clusters + 1, dtype=bool)
        flags[touching] = True
        self.cluster_outermost = flags

    # -- views ----------------------------------------------------------

    @cached_property
    def _sorted_side_order(self) -> np.ndarray:
        return np.lexsort((self.side_pos, self.side_loop))

    @cached_property
    def labels(self) -> dict:
        lat = self.lattice
        out = {}
        flats = np.flatnonzero(self.config.open_grid.ravel())
        qr = lat.flat_to_qr(flats)
        lab = self.cluster_grid.ravel()[flats]
        for (q, r), c in zip(qr, lab):
            out[(int(q), int(r))] = int(c)
        return out

    @cached_property
    def clusters(self) -> dict:
        out: dict[int, list] = {c: [] for c in range(1, self.n_clusters + 1)}
        for site, c in self.labels.items():
            out[c].append(site)
        return out

    @cached_property
    def loops(self) -> dict:
        """Cluster id -> list of Loop objects, exterior loop first."""
        order = self._sorted_side_order
        cell = self.side_cell[order]
        kdir = self.side_dir[order]
        loop = self.side_loop[order]
        starts = np.flatnonzero(np.r_[True, loop[1:] != loop[:-1]])
        ends = np.r_[starts[1:], loop.size]
        out: dict[int, list] = {c: [] for c in range(1, self.n_clusters + 1)}
        bx, by, ax, ay = self._side_corner_coords()
        ax, ay = ax[order], ay[order]
        for s, e in zip(starts, ends):
            lid = int(loop[s])
            lp = Loop(
                loop_id=lid,
                cluster=int(self.loop_cluster[lid]),
                exterior=bool(self.loop_is_exterior[lid]),
                sites_qr=self.lattice.flat_to_qr(cell[s:e]),
                dirs=kdir[s:e].astype(int),
                corners=np.stack([ax[s:e], ay[s:e]], axis=1),
            )
            out[lp.cluster].append(lp)
        for c in out:
            out[c].sort(key=lambda lp: (not lp.exterior, lp.loop_id))
        return out

    @property
    def outermost_flags(self) -> dict:
        return {c: bool(self.cluster_outermost[c]) for c in range(1, self.n_clusters + 1)}

    def cluster_site_flats(self, cluster_id: int) -> np.ndarray:
        return np.flatnonzero(self.cluster_grid.ravel() == cluster_id)

    def site_loop_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """Unique (cell flat, loop id) incidences, for contact detection."""
        key = self.side_cell * max(self.n_loops, 1) + self.side_loop
        uniq = np.unique(key)
        return uniq // max(self.n_loops, 1), uniq % max(self.n_loops, 1)


def decompose(config: PercolationConfig) -> ClusterSet:
    """Label 6-connected open clusters and trace all interface loops."""
    return ClusterSet(config)


# -- rhombus observables ------------------------------------------------


def _rhombus_open(n: int, p: float, seed: int) -> np.ndarray:
    u = uniform01(seed, np.arange(n * n, dtype=np.uint64))
    return (u < p).reshape(n, n)


def trial_seed(seed: int, trial: int) -> int:
    """Keyed sub-seed for one Monte Carlo trial."""
    return int(hash_u64(seed, np.asarray([trial], dtype=np.uint64))[0])


def crossing_probability(n: int, p: float, trials: int, seed: int) -> float:
    """Fraction of trials with an open left-right crossing of an n x n rhombus.

    Left-right means a 6-connected open path from the q = 0 column to the
    q = n-1 column.  At p = 1/2 the color-swap/reflection symmetry of the
    rhombus makes this probability exactly one half.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    hits = 0
    for t in range(trials):
        grid = _rhombus_open(n, p, trial_seed(seed, t))
        lab, _ = ndimage.label(grid, structure=STRUCT6)
        left = lab[0][lab[0] > 0]
        right = lab[n - 1][lab[n - 1] > 0]
        if left.size and right.size and np.intersect1d(left, right).size:
            hits += 1
    return hits / trials


def crossing_lengths(n: int, p: float, trials: int, seed: int) -> np.ndarray:
    """Shortest-crossing site counts of the n x n rhombus, one per trial.

    Returns the number of sites on a shortest open left-right crossing
    (BFS hop metric), or NaN for trials without a crossing.
    """
    out = np.full(trials, np.nan)
    idx = np.arange(n * n).reshape(n, n)
    src, snk = n * n, n * n + 1
    # undirected neighbor pairs along directions (1,0), (0,1), (1,-1)
    for t in range(trials):
        grid = _rhombus_open(n, p, trial_seed(seed, t))
        rows = []
        cols = []
        both = grid[:-1, :] & grid[1:, :]
        rows.append(idx[:-1, :][both])
        cols.append(idx[1:, :][both])
        both = grid[:, :-1] & grid[:, 1:]
        rows.append(idx[:, :-1][both])
        cols.append(idx[:, 1:][both])
        both = grid[:-1, 1:] & grid[1:, :-1]
        rows.append(idx[:-1, 1:][both])
        cols.append(idx[1:, :-1][both])
        left = idx[0][grid[0]]
        right = idx[n - 1][grid[n - 1]]
        if left.size == 0 or right.size == 0:
            continue
        rows.append(np.full(left.size, src))
        cols.append(left)
        rows.append(right)
        cols.append(np.full(right.size, snk))
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        g = sparse.csr_matrix(
            (np.ones(r.size, dtype=np.int8), (r, c)), shape=(n * n + 2, n * n + 2)
        )
        d = csgraph.dijkstra(g, directed=False, unweighted=True, indices=src)[snk]
        if np.isfinite(d):
            out[t] = d - 1.0
    return out


# -- four-crossing statistics --------------------------------------------


def _loop_crossing_counts(cs: ClusterSet, inner: float, outer: float) -> np.ndarray:
    """Annulus crossing count of every exterior loop (center = origin)."""
    counts = np.zeros(cs.n_loops, dtype=np.int64)
    if cs.n_loops == 0:
        return counts
    order = cs._sorted_side_order
    loop = cs.side_loop[order]
    _, _, ax, ay = cs._side_corner_coords()
    rad = np.hypot(ax[order], ay[order])
    code = np.where(rad <= inner, 0, np.where(rad >= outer, 2, 1))
    ext = cs.loop_is_exterior[loop]
    keep = ext & (code != 1)
    loop = loop[keep]
    code = code[keep]
    if loop.size == 0:
        return counts
    same = loop[1:] == loop[:-1]
    trans = same & (code[1:] != code[:-1])
    counts += np.bincount(loop[1:][trans], minlength=cs.n_loops)
    starts = np.flatnonzero(np.r_[True, ~same])
    ends = np.r_[starts[1:] - 1, loop.size - 1]
    wrap = code[starts] != code[ends]
    counts += np.bincount(loop[starts][wrap], minlength=cs.n_loops)
    return counts


def four_crossing_rates(
    n: int, p: float, inners, outer: float, trials: int, seed: int
) -> list[float]:
    """Four-crossing event rates for several inner radii over shared trials."""
    inners = list(inners)
    hits = [0] * len(inners)
    for t in range(trials):
        cfg = sample(n, p, trial_seed(seed, t))
        cs = decompose(cfg)
        for i, inner in enumerate(inners):
            if np.any(_loop_crossing_counts(cs, inner, outer) >= 4):
                hits[i] += 1
    return [h / trials for h in hits]


def four_crossing_rate(
    n: int, p: float, inner: float, outer: float, trials: int, seed: int
) -> float:
    """Fraction of trials where some exterior loop crosses A(0, inner, outer)
    at least four times."""
    if not 0 < inner < outer <= n:
        raise ValueError("need 0 < inner < outer <= n")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    return four_crossing_rates(n, p, [inner], outer, trials, seed)[0]
