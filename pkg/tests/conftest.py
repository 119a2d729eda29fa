"""Shared fixtures and independent oracle helpers."""

from __future__ import annotations

from collections import deque

import numpy as np
import pytest

from gasketlab import percolation as perc

DIRS = list(zip(perc.DQ.tolist(), perc.DR.tolist()))


def make_config(n: int, open_sites) -> perc.PercolationConfig:
    """Hand-built configuration from explicit (q, r) open sites."""
    lat = perc.TriDisk(n)
    grid = np.zeros(lat.in_disk.shape, dtype=bool)
    for q, r in open_sites:
        flat = int(lat.qr_to_flat(q, r))
        assert lat.in_disk.ravel()[flat], f"site {(q, r)} outside disk"
        grid.ravel()[flat] = True
    return perc.PercolationConfig(lattice=lat, p=0.0, seed=0, open_grid=grid)


def flood_fill_labels(config: perc.PercolationConfig) -> dict:
    """Independent BFS flood fill, dict (q, r) -> component id."""
    open_sites = {tuple(qr) for qr in config.lattice.flat_to_qr(
        np.flatnonzero(config.open_grid.ravel()))}
    labels: dict = {}
    next_label = 0
    for s in sorted(open_sites):
        if s in labels:
            continue
        next_label += 1
        queue = deque([s])
        labels[s] = next_label
        while queue:
            q, r = queue.popleft()
            for dq, dr in DIRS:
                t = (q + dq, r + dr)
                if t in open_sites and t not in labels:
                    labels[t] = next_label
                    queue.append(t)
    return labels


def bfs_distance(adj: dict, src, dst=None):
    """Unit-step BFS over an adjacency dict; returns dict or single value."""
    dist = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if dst is not None and u == dst:
            return dist[u]
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return float("inf") if dst is not None else dist


@pytest.fixture(scope="session")
def medium_cluster_set():
    cfg = perc.sample(24, 0.5, 20240)
    return perc.decompose(cfg)
