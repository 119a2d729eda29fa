import numpy as np
import pytest

from gasketlab import percolation as perc

from conftest import flood_fill_labels, make_config


def test_all_open_single_cluster():
    cs = perc.decompose(perc.sample(8, 1.0, 3))
    assert cs.n_clusters == 1
    assert cs.config.open_mask.all()


def test_all_closed_no_clusters():
    cs = perc.decompose(perc.sample(8, 0.0, 3))
    assert cs.n_clusters == 0
    assert cs.n_loops == 0
    assert not cs.config.open_mask.any()


def test_sampling_deterministic():
    a = perc.sample(32, 0.5, 1)
    b = perc.sample(32, 0.5, 1)
    assert np.array_equal(a.open_mask, b.open_mask)
    c = perc.sample(32, 0.5, 2)
    assert not np.array_equal(a.open_mask, c.open_mask)


def test_lattice_is_disk():
    lat = perc.TriDisk(9)
    qr = lat.flat_to_qr(lat.site_flats)
    x = qr[:, 0] + qr[:, 1] / 2.0
    y = qr[:, 1] * perc.SQ3 / 2.0
    assert np.all(x**2 + y**2 <= 9**2 * (1 + 1e-9))
    # density of the triangular lattice is 2/sqrt(3) sites per unit area
    expect = np.pi * 81 * 2 / perc.SQ3
    assert abs(lat.site_count - expect) / expect < 0.05


def test_single_site_loop_is_hexagon():
    cs = perc.decompose(make_config(4, [(0, 0)]))
    assert cs.n_clusters == 1
    loops = cs.loops[1]
    assert len(loops) == 1
    assert loops[0].exterior
    assert len(loops[0]) == 6


def test_two_site_loop_has_ten_dual_edges():
    # oracle: 2 hexagons of 6 sides minus the 2 shared interface sides
    cs = perc.decompose(make_config(4, [(0, 0), (1, 0)]))
    assert cs.n_clusters == 1
    loops = cs.loops[1]
    assert len(loops) == 1
    assert len(loops[0]) == 10


def test_ring_cluster_has_hole_loop():
    ring = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]
    cs = perc.decompose(make_config(4, ring))
    assert cs.n_clusters == 1
    loops = cs.loops[1]
    assert len(loops) == 2
    ext = [lp for lp in loops if lp.exterior]
    holes = [lp for lp in loops if not lp.exterior]
    assert len(ext) == 1 and len(holes) == 1
    assert len(holes[0]) == 6  # hexagon around the enclosed closed site


def test_labels_match_flood_fill_oracle():
    for seed in range(5):
        cfg = perc.sample(16, 0.5, 1000 + seed)
        cs = perc.decompose(cfg)
        oracle = flood_fill_labels(cfg)
        ours = cs.labels
        assert set(ours) == set(oracle)
        # same partition: label maps agree up to renaming
        pairing = {}
        for site, lab in ours.items():
            assert pairing.setdefault(lab, oracle[site]) == oracle[site]
        assert len(set(pairing.values())) == len(pairing)


def test_every_dual_edge_on_exactly_one_loop():
    cfg = perc.sample(16, 0.5, 77)
    cs = perc.decompose(cfg)
    # successor map is a permutation: every side has exactly one predecessor
    assert np.array_equal(np.sort(cs.side_succ), np.arange(cs.side_cell.size))
    # positions enumerate each cycle exactly once
    key = cs.side_loop * cs.side_cell.size + cs.side_pos
    assert np.unique(key).size == key.size


def test_exactly_one_exterior_loop_per_cluster():
    cs = perc.decompose(perc.sample(24, 0.5, 5))
    ext = np.bincount(cs.loop_cluster[cs.loop_is_exterior], minlength=cs.n_clusters + 1)
    assert np.all(ext[1:] == 1)


def test_exterior_loops_ccw_holes_cw():
    cs = perc.decompose(perc.sample(16, 0.5, 6))
    assert np.all(cs.loop_area[cs.loop_is_exterior] > 0)
    assert np.all(cs.loop_area[~cs.loop_is_exterior] < 0)


def test_crossing_probability_trivial():
    assert perc.crossing_probability(16, 1.0, 10, 1) == 1.0
    assert perc.crossing_probability(16, 0.0, 10, 1) == 0.0


@pytest.mark.parametrize("n", [16, 32, 64])
def test_crossing_probability_half_at_criticality(n):
    trials = 1500
    phat = perc.crossing_probability(n, 0.5, trials, 12345 + n)
    sigma = 0.5 / np.sqrt(trials)
    assert abs(phat - 0.5) < 4 * sigma


def test_four_crossing_trivial_and_positive():
    assert perc.four_crossing_rate(16, 0.0, 4, 8, 20, 1) == 0.0
    r = perc.four_crossing_rate(32, 0.5, 15, 16, 300, 2)
    assert r > 0.0


def test_four_crossing_monotone_in_inner_radius():
    wide, narrow = perc.four_crossing_rates(32, 0.5, [8.0, 2.0], 16.0, 600, 3)
    assert narrow < wide


def test_crossing_lengths_condition_on_crossing():
    lengths = perc.crossing_lengths(16, 0.5, 200, 4)
    have = lengths[~np.isnan(lengths)]
    assert 0.2 < have.size / 200 < 0.8
    assert np.all(have >= 16)  # a crossing visits at least one site per column


def test_crossing_length_matches_bfs_oracle():
    from conftest import bfs_distance

    n, seed = 10, 99
    lengths = perc.crossing_lengths(n, 0.5, 20, seed)
    for t in range(20):
        grid = perc._rhombus_open(n, 0.5, perc.trial_seed(seed, t))
        adj = {"src": []}
        for q in range(n):
            for r in range(n):
                if not grid[q, r]:
                    continue
                adj[(q, r)] = []
                for dq, dr in zip(perc.DQ, perc.DR):
                    t2 = (q + dq, r + dr)
                    if 0 <= t2[0] < n and 0 <= t2[1] < n and grid[t2]:
                        adj[(q, r)].append(t2)
        for r in range(n):
            if grid[0, r]:
                adj["src"].append((0, r))
        best = np.inf
        for r in range(n):
            if grid[n - 1, r]:
                d = bfs_distance(adj, "src", (n - 1, r))
                best = min(best, d)
        if np.isinf(best):
            assert np.isnan(lengths[t])
        else:
            assert lengths[t] == best  # sites on path = hops from virtual src
