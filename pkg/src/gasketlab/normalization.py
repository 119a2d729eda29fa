"""Normalization medians and scaling exponents from loop-pair crossings.

A crossing instance is found where two interface loops of one cluster
pinch together at four contact vertices arranged in the standard template:
two deep inside the disk (within a quarter radius of the center) and two
out in the half-to-three-quarter annulus.  The region bounded between the
two boundary arcs from the outer pair is harvested, and the internal
distance between the first and last inner contact (in traced order) is
the crossing observable; compatibility across enclosing quadruples makes
that extreme pair the relevant supremum.

The continuum conditioning event (two loops with four intersection points
in specified balls) is replaced by this lattice contact-point analog;
that substitution is the module's central modeling assumption.  Contact
ordering follows the traced order of the first loop's boundary, ties
broken by lexicographic site index.

m_hat is the median of the observable over instances; quantiles use
linear interpolation of order statistics.  Scaling fits regress log
m_hat on log(1/n): at the template geometry the lattice pitch is the
approximation scale, and the acceptance window for the fitted slope is
[d_dbl - 0.3, d_sle + 0.3] evaluated at kappa' = 6.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from . import metrics as mt
from .exponents import make_parameters
from .gasket import GasketGraph, Region, admissible_distance_graph, build_gasket, region_between
from .metrics import INF, bfs_distances
from .pathfun import PathFunctional, PlanarPath, neighborhood_area, vertex_chain_count
from .percolation import decompose, sample, trial_seed
from .rng import derive_seed

SCHEMES = ("chemical", "chemical_scaled", "resistance", "count", "area")

QUANTS = tuple(round(0.1 * k, 1) for k in range(1, 10))


@dataclass
class CrossingInstance:
    """One harvested between-loops crossing with its internal region."""

    seed: int
    n: int
    trial: int
    cluster: int
    loop_pair: tuple
    quadruple_qr: tuple  # ((x', x, y, y') as (q, r) tuples)
    gasket: GasketGraph = field(repr=False)
    region: Region = field(repr=False)
    x: int
    y: int
    spacing_hops: tuple  # hop distances (x to x', y to y') inside the region


def _contact_groups(cs):
    """(loop_a, loop_b) -> list of contact cell flats (both loops touch)."""
    nl = max(cs.n_loops, 1)
    key = cs.side_cell * nl + cs.side_loop
    uniq = np.unique(key)
    cells = uniq // nl
    loops = uniq % nl
    groups: dict[tuple, list] = defaultdict(list)
    start = 0
    for i in range(1, cells.size + 1):
        if i == cells.size or cells[i] != cells[start]:
            if i - start >= 2:
                ls = loops[start:i]
                cell = int(cells[start])
                for a in range(ls.size):
                    for b in range(a + 1, ls.size):
                        groups[(int(ls[a]), int(ls[b]))].append(cell)
            start = i
    return groups


def harvest_crossings(
    n: int,
    p: float,
    trials: int,
    seed: int,
    geometry=(0.25, 0.5, 0.75),
    max_per_trial: int = 8,
):
    """Collect crossing instances over Monte Carlo trials.

    geometry = (inner ball, ring inner, ring outer) as fractions of n.
    Returns (instances, trials).
    """
    f1, f2, f3 = geometry
    if not 0 < f1 < f2 < f3 <= 1:
        raise ValueError("geometry fractions must increase within (0, 1]")
    out: list[CrossingInstance] = []
    base = derive_seed(seed, "harvest")
    for t in range(trials):
        cfg = sample(n, p, trial_seed(base, t))
        cs = decompose(cfg)
        if cs.n_loops == 0:
            continue
        groups = _contact_groups(cs)
        if not groups:
            continue
        xg, yg = cs.lattice.grid_x.ravel(), cs.lattice.grid_y.ravel()
        gaskets: dict[int, GasketGraph] = {}
        found = 0
        for (la, lb), cells in sorted(groups.items()):
            if found >= max_per_trial:
                break
            rad = np.hypot(xg[cells], yg[cells])
            zone = np.where(rad <= f1 * n, 0, np.where((rad >= f2 * n) & (rad <= f3 * n), 2, 1))
            if (zone == 0).sum() < 2 or (zone == 2).sum() < 2:
                continue
            inst = _extract_instance(
                cs, gaskets, la, lb, np.asarray(cells), zone, seed, n, t
            )
            if inst is not None:
                out.append(inst)
                found += 1
    return out, trials


def _extract_instance(cs, gaskets, la, lb, cells, zone, seed, n, t):
    # traced order along loop la; ties by lexicographic site index
    order_key = {}
    sel = np.flatnonzero(cs.side_loop == la)
    pos_of_cell: dict[int, int] = {}
    for i in sel:
        c = int(cs.side_cell[i])
        p = int(cs.side_pos[i])
        if c not in pos_of_cell or p < pos_of_cell[c]:
            pos_of_cell[c] = p
    seq = sorted(
        (pos_of_cell[int(c)], int(c), int(z)) for c, z in zip(cells, zone) if int(c) in pos_of_cell
    )
    if not seq:
        return None
    ring_idx = [i for i, (_, _, z) in enumerate(seq) if z == 2]
    if len(ring_idx) < 2:
        return None
    m = len(seq)
    quad = None
    for j, ri in enumerate(ring_idx):
        rj = ring_idx[(j + 1) % len(ring_idx)]
        between = []
        k = (ri + 1) % m
        while k != rj:
            if seq[k][2] == 0:
                between.append(seq[k][1])
            k = (k + 1) % m
        if len(between) >= 2:
            quad = (seq[ri][1], between[0], between[-1], seq[rj][1])
            break
    if quad is None:
        return None
    cid = int(cs.cluster_grid.ravel()[quad[0]])
    if cid not in gaskets:
        gaskets[cid] = build_gasket(cs, cid)
    g = gaskets[cid]
    xp, x, y, yp = (g._local[c] for c in quad)
    if x == y or xp == yp:
        return None
    try:
        reg = region_between(g, la, lb, xp, yp, containing={x, y})
    except ValueError:
        return None
    adj = admissible_distance_graph(g, reg)
    dx = bfs_distances(adj, x)
    dy = bfs_distances(adj, y)
    hx = dx.get(xp, INF)
    hy = dy.get(yp, INF)
    if not (math.isfinite(hx) and math.isfinite(hy)) or dx.get(y, INF) == INF:
        return None
    qr = tuple(tuple(map(int, cs.lattice.flat_to_qr(c))) for c in quad)
    return CrossingInstance(
        seed=seed,
        n=n,
        trial=t,
        cluster=cid,
        loop_pair=(la, lb),
        quadruple_qr=qr,
        gasket=g,
        region=reg,
        x=x,
        y=y,
        spacing_hops=(float(hx), float(hy)),
    )


def _geodesic_path(inst: CrossingInstance):
    adj = admissible_distance_graph(inst.gasket, inst.region)
    from collections import deque

    prev = {inst.x: None}
    dq = deque([inst.x])
    while dq:
        u = dq.popleft()
        if u == inst.y:
            break
        for w in adj[u]:
            if w not in prev:
                prev[w] = u
                dq.append(w)
    path = [inst.y]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return list(reversed(path))


def measure(inst: CrossingInstance, scheme: str) -> float:
    """Crossing observable of one instance under a scheme.

    chemical: hop count.  chemical_scaled: hops / n.  resistance:
    effective resistance.  count: eps-chain count of the hop geodesic at
    eps = one lattice unit.  area: eps-neighborhood area of the hop
    geodesic at eps = one lattice unit, rescaled to the unit disk
    (divided by n^2); the geodesic evaluation upper-bounds the path
    infimum and is the documented estimator.
    """
    g, reg = inst.gasket, inst.region
    if scheme == "chemical":
        return mt.chemical_distance(g, reg, inst.x, inst.y)
    if scheme == "chemical_scaled":
        return mt.chemical_distance(g, reg, inst.x, inst.y) / inst.n
    if scheme == "resistance":
        return mt.effective_resistance(g, reg, inst.x, inst.y)
    path = _geodesic_path(inst)
    pts = g.coords[path]
    if scheme == "count":
        if len(path) == 1:
            return 1.0
        return float(vertex_chain_count(pts, 1.0))
    if scheme == "area":
        if len(path) == 1:
            return math.pi / inst.n**2
        a = neighborhood_area(PlanarPath(pts, simple_flag=True), 1.0, pitch_divisor=10)
        return a / inst.n**2
    raise ValueError(f"unknown scheme: {scheme!r}")


@dataclass
class NormalizationEstimate:
    scheme: str
    n: int
    sample_count: int
    median: float
    quantiles: dict
    ci: dict  # quantile level -> (lo, hi) bootstrap 95% interval
    values: np.ndarray = field(repr=False)

    @property
    def ci_lo(self) -> float:
        return self.ci[0.5][0]

    @property
    def ci_hi(self) -> float:
        return self.ci[0.5][1]

    def as_rows(self):
        rows = []
        for q in QUANTS:
            lo, hi = self.ci[q]
            rows.append((self.n, q, self.quantiles[q], lo, hi))
        return rows


def estimate_m(
    instances, scheme: str, seed: int = 0, bootstrap: int = 1000
) -> NormalizationEstimate:
    """Conditional quantiles of the crossing observable with bootstrap CIs."""
    if not instances:
        raise ValueError("no crossing instances to estimate from")
    values = np.array([measure(inst, scheme) for inst in instances], dtype=float)
    values = values[np.isfinite(values)]
    if values.size == 0:
        raise ValueError("all crossing observables were infinite")
    qs = {q: float(np.quantile(values, q)) for q in QUANTS}
    med = float(np.quantile(values, 0.5))
    rng = np.random.default_rng(derive_seed(seed, "bootstrap"))
    boots = np.empty((bootstrap, len(QUANTS)))
    for b in range(bootstrap):
        resample = values[rng.integers(0, values.size, values.size)]
        boots[b] = np.quantile(resample, QUANTS)
    ci = {}
    for k, q in enumerate(QUANTS):
        lo, hi = np.quantile(boots[:, k], [0.025, 0.975])
        ci[q] = (float(lo), float(hi))
    n = instances[0].n
    return NormalizationEstimate(
        scheme=scheme,
        n=n,
        sample_count=int(values.size),
        median=med,
        quantiles=qs,
        ci=ci,
        values=values,
    )


@dataclass
class ScalingFit:
    scheme: str
    sizes: tuple
    medians: tuple
    slope: float
    intercept: float
    window: tuple
    verdict: bool
    estimates: tuple = ()


def fit_from_medians(sizes, medians, kappa: float = 8.0 / 3.0, scheme: str = "") -> ScalingFit:
    """Least-squares slope of log m_hat against log(1/n), with the verdict
    window [d_dbl - 0.3, d_sle + 0.3] for the chosen kappa."""
    sizes = tuple(int(s) for s in sizes)
    if len(sizes) < 3:
        raise ValueError("need at least 3 sizes")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    med = np.asarray(medians, dtype=float)
    if np.any(med <= 0):
        return ScalingFit(scheme, sizes, tuple(med), float("nan"), float("nan"), _window(kappa), False)
    x = np.log(1.0 / np.asarray(sizes, dtype=float))
    y = np.log(med)
    slope, intercept = np.polyfit(x, y, 1)
    lo, hi = _window(kappa)
    return ScalingFit(
        scheme=scheme,
        sizes=sizes,
        medians=tuple(float(v) for v in med),
        slope=float(slope),
        intercept=float(intercept),
        window=(lo, hi),
        verdict=bool(lo <= slope <= hi),
    )


def _window(kappa: float) -> tuple:
    par = make_parameters(kappa)
    return (par.d_dbl - 0.3, par.d_sle + 0.3)


def scaling_fit(
    scheme: str,
    sizes,
    trials,
    seed: int,
    p: float = 0.5,
    geometry=(0.25, 0.5, 0.75),
    kappa: float = 8.0 / 3.0,
) -> ScalingFit:
    """Full Monte Carlo pipeline: harvest per size, estimate, regress."""
    sizes = tuple(int(s) for s in sizes)
    if isinstance(trials, int):
        trials = [trials] * len(sizes)
    ests = []
    for size, tr in zip(sizes, trials):
        inst, _ = harvest_crossings(size, p, tr, derive_seed(seed, "size", size), geometry)
        ests.append(estimate_m(inst, scheme, seed=derive_seed(seed, "est", size)))
    fit = fit_from_medians(sizes, [e.median for e in ests], kappa=kappa, scheme=scheme)
    fit.estimates = tuple(ests)
    return fit


@dataclass
class ComparabilityReport:
    q: float
    qp: float
    ratios: dict  # size -> q-ratio
    sup_ratio: float
    verdict: bool


def quantile_comparability(estimates, q: float = 0.25, qp: float = 0.75) -> ComparabilityReport:
    """Ratio q-hat(q)/q-hat(qp) per size; bounded means no consecutive-size
    drift beyond a factor of 2."""
    if len(estimates) < 2:
        raise ValueError("need estimates at >= 2 sizes")
    ratios = {}
    for e in sorted(estimates, key=lambda e: e.n):
        lo_v = float(np.quantile(e.values, q))
        hi_v = float(np.quantile(e.values, qp))
        ratios[e.n] = lo_v / hi_v if hi_v > 0 else float("nan")
    vals = [ratios[k] for k in sorted(ratios)]
    ok = all(
        math.isfinite(a) and math.isfinite(b) and 0.5 < (b / a if a > 0 else INF) < 2.0
        for a, b in zip(vals, vals[1:])
    )
    sup = max(v for v in vals if math.isfinite(v))
    return ComparabilityReport(q=q, qp=qp, ratios=ratios, sup_ratio=sup, verdict=ok)
