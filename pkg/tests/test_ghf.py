import itertools
import math

import numpy as np
import pytest

from gasketlab import ghf


def mspace(dist, marked=(), values=()):
    return ghf.MarkedMetricSpace(dist=np.asarray(dist, float), marked=marked, values=values)


def two_point(d, marked=(), values=()):
    return mspace([[0.0, d], [d, 0.0]], marked, values)


def random_space(rng, n, with_marks=True):
    pts = rng.uniform(0, 2, size=(n, 2))
    d = np.hypot(*(pts[:, None, :] - pts[None, :, :]).transpose(2, 0, 1))
    if with_marks and n > 1:
        k = int(rng.integers(1, n + 1))
        marked = tuple(sorted(rng.choice(n, size=k, replace=False).tolist()))
        values = tuple(rng.uniform(-1, 1, size=k).tolist())
    else:
        marked, values = (), ()
    return ghf.MarkedMetricSpace(dist=d, marked=marked, values=values, embedding=pts)


def brute_force_ghf(A, B):
    """Independent enumeration over all map pairs, pure Python."""
    best = math.inf
    for phi in itertools.product(range(B.n), repeat=A.n):
        for psi in itertools.product(range(A.n), repeat=B.n):
            pairs = [(i, phi[i]) for i in range(A.n)] + [(psi[j], j) for j in range(B.n)]
            dis = 0.0
            for (i1, j1) in pairs:
                for (i2, j2) in pairs:
                    dis = max(dis, abs(A.dist[i1, i2] - B.dist[j1, j2]))
            r = dis / 2.0
            m1, m2 = len(A.marked), len(B.marked)
            if m1 == 0 and m2 == 0:
                dinf = 0.0
            elif m1 == 0 or m2 == 0:
                dinf = math.inf
            else:
                def glue(x, y):
                    return r + min(A.dist[x, i] + B.dist[j, y] for i, j in pairs)

                need = [
                    [max(glue(x, y), abs(A.values[a] - B.values[b]))
                     for b, y in enumerate(B.marked)]
                    for a, x in enumerate(A.marked)
                ]
                dinf = max(
                    max(min(row) for row in need),
                    max(min(need[a][b] for a in range(m1)) for b in range(m2)),
                )
            best = min(best, r + dinf)
    return best


def test_identical_no_marks_zero():
    A = two_point(1.0)
    assert ghf.ghf_distance_exact(A, A) == 0.0


def test_one_vs_two_points():
    one = mspace([[0.0]])
    assert ghf.ghf_distance_exact(one, two_point(2.0)) == pytest.approx(1.0)


def test_one_point_marked_spaces():
    p1 = mspace([[0.0]], (0,), (0.25,))
    p2 = mspace([[0.0]], (0,), (1.0,))
    assert ghf.ghf_distance_exact(p1, p2) == pytest.approx(0.75)


def test_d_infty_examples():
    # same set, values shifted by c -> c
    cross = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert ghf.d_infty(cross, [0.0, 0.5], [2.0, 2.5]) == pytest.approx(2.0)
    # K1 = {0}, K2 = {1} on the line, equal constants -> 1
    assert ghf.d_infty(np.array([[1.0]]), [3.0], [3.0]) == pytest.approx(1.0)
    # identical marked set -> 0
    assert ghf.d_infty(cross, [0.0, 0.5], [0.0, 0.5]) == pytest.approx(0.0)
    # empty conventions
    assert ghf.d_infty(np.zeros((0, 0)), [], []) == 0.0
    assert ghf.d_infty(np.zeros((1, 0)), [1.0], []) == math.inf


def test_exact_matches_brute_force_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(12):
        n1 = int(rng.integers(1, 4))
        n2 = int(rng.integers(1, 4))
        A = random_space(rng, n1)
        B = random_space(rng, n2)
        got = ghf.ghf_distance_exact(A, B)
        want = brute_force_ghf(A, B)
        assert got == pytest.approx(want, rel=1e-12, abs=1e-12)
    # one asymmetric five-point fixture
    A = random_space(rng, 5)
    B = random_space(rng, 3)
    assert ghf.ghf_distance_exact(A, B) == pytest.approx(brute_force_ghf(A, B), rel=1e-12)


def test_exact_mode_size_limit():
    rng = np.random.default_rng(4)
    A = random_space(rng, 6)
    B = random_space(rng, 6)
    with pytest.raises(ValueError):
        ghf.ghf_distance_exact(A, B)
    lo, up = ghf.ghf_distance_bounds(A, B)
    assert lo <= up


def test_pseudo_metric_symmetry_and_triangle():
    rng = np.random.default_rng(7)
    spaces = [random_space(rng, int(rng.integers(2, 4))) for _ in range(5)]
    d = {}
    for i, A in enumerate(spaces):
        for j, B in enumerate(spaces):
            d[(i, j)] = ghf.ghf_distance_exact(A, B)
    for i in range(5):
        assert d[(i, i)] <= 1e-12
        for j in range(5):
            assert d[(i, j)] == pytest.approx(d[(j, i)], rel=1e-9, abs=1e-12)
            for k in range(5):
                assert d[(i, j)] <= d[(i, k)] + d[(k, j)] + 1e-9


def _mark_isometric(A, B):
    if A.n != B.n:
        return False
    for perm in itertools.permutations(range(A.n)):
        p = list(perm)
        if not np.allclose(A.dist, B.dist[np.ix_(p, p)], atol=1e-12):
            continue
        m1 = {(i, v) for i, v in zip(A.marked, A.values)}
        m2 = {(p[j] if False else perm[j], v) for j, v in zip(B.marked, B.values)}
        # map marked set of A through the permutation
        m1_mapped = {(perm[i], v) for i, v in zip(A.marked, A.values)}
        if m1_mapped == {(j, v) for j, v in zip(B.marked, B.values)}:
            return True
    return False


def test_zero_iff_mark_matching_isometry():
    rng = np.random.default_rng(11)
    for _ in range(10):
        A = random_space(rng, 3)
        # isometric copy under a relabeling
        perm = rng.permutation(3)
        inv = np.argsort(perm)
        B = ghf.MarkedMetricSpace(
            dist=A.dist[np.ix_(perm, perm)],
            marked=tuple(sorted(int(inv[i]) for i in A.marked)),
            values=tuple(
                v for _, v in sorted((int(inv[i]), v) for i, v in zip(A.marked, A.values))
            ),
        )
        assert ghf.ghf_distance_exact(A, B) <= 1e-12
        assert _mark_isometric(A, B)
        # perturb one value: distance strictly positive
        if A.marked:
            vals = list(A.values)
            vals[0] += 0.5
            C = ghf.MarkedMetricSpace(dist=A.dist, marked=A.marked, values=tuple(vals))
            assert ghf.ghf_distance_exact(A, C) > 0.01
            assert not _mark_isometric(A, C)


def test_correspondence_vs_ambient_embedding():
    # two marked subsets of the real line, embedded as given: the
    # correspondence value never exceeds this particular embedding's
    # Hausdorff + matching cost
    pts1 = np.array([0.0, 1.0])
    pts2 = np.array([0.0, 1.5])
    A = mspace(np.abs(pts1[:, None] - pts1[None, :]), (0, 1), (0.0, 0.0))
    B = mspace(np.abs(pts2[:, None] - pts2[None, :]), (0, 1), (0.0, 0.0))
    corr = ghf.ghf_distance_exact(A, B)
    cross = np.abs(pts1[:, None] - pts2[None, :])
    hausdorff = max(cross.min(axis=1).max(), cross.min(axis=0).max())
    embedded = hausdorff + ghf.d_infty(cross, A.values, B.values)
    assert corr <= embedded + 1e-12
    # identical spaces realize equality at zero
    assert ghf.ghf_distance_exact(A, A) == 0.0


def test_bounds_bracket_exact():
    rng = np.random.default_rng(13)
    for _ in range(50):
        A = random_space(rng, int(rng.integers(2, 5)))
        B = random_space(rng, int(rng.integers(2, 5)))
        lo, up = ghf.ghf_distance_bounds(A, B)
        mid = ghf.ghf_distance_exact(A, B)
        assert lo - 1e-12 <= mid <= up + 1e-12


def test_bounds_identical_and_diameter_gap():
    rng = np.random.default_rng(17)
    A = random_space(rng, 4)
    assert ghf.ghf_distance_bounds(A, A) == (0.0, 0.0)
    B1, B3 = two_point(1.0), two_point(3.0)
    lo, _ = ghf.ghf_distance_bounds(B1, B3)
    assert lo >= 1.0 - 1e-12


def test_hoelder_membership():
    # constant function: member whenever C >= value bound
    A = two_point(0.1, (0, 1), (2.0, 2.0))
    assert ghf.hoelder_membership(A, ghf.HoelderClassParams(alpha=1, C=2.0))
    assert not ghf.hoelder_membership(A, ghf.HoelderClassParams(alpha=1, C=1.0))
    # identity on the line with alpha = C = 1
    pts = np.linspace(0, 1, 5)
    B = mspace(np.abs(pts[:, None] - pts[None, :]), tuple(range(5)), tuple(pts))
    assert ghf.hoelder_membership(B, ghf.HoelderClassParams(alpha=1, C=1.0))
    # jump of 10 across distance 0.1 fails at r=0, passes at r=10
    C = two_point(0.1, (0, 1), (0.0, 10.0))
    assert not ghf.hoelder_membership(C, ghf.HoelderClassParams(alpha=1, C=10.0, r=0.0))
    assert ghf.hoelder_membership(C, ghf.HoelderClassParams(alpha=1, C=10.0, r=10.0))


def test_sequence_probe_constant_and_scaled():
    A = two_point(1.0)
    rep = ghf.sequence_convergence_probe([A, A, A])
    assert rep.cauchy and np.allclose(rep.pairwise, 0.0)
    spaces = [two_point(1.0), two_point(0.5), two_point(0.25)]
    rep2 = ghf.sequence_convergence_probe(spaces)
    # pairwise GH distance of two-point spaces = half the diameter gap
    assert rep2.pairwise[0, 1] == pytest.approx(0.25)
    assert rep2.pairwise[0, 2] == pytest.approx(0.375)
    assert rep2.pairwise[1, 2] == pytest.approx(0.125)
    assert rep2.tail_sup[0] >= rep2.tail_sup[1]


def test_sequence_probe_equicontinuous_family_cauchy_tail():
    # shrinking marked spaces: upper bounds along the family form a
    # decreasing tail
    spaces = []
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    base = np.hypot(*(pts[:, None, :] - pts[None, :, :]).transpose(2, 0, 1))
    for k in range(5):
        s = 1.0 + 2.0 ** (-k)
        spaces.append(
            ghf.MarkedMetricSpace(dist=base * s, marked=(0, 1), values=(0.0, s))
        )
    rep = ghf.sequence_convergence_probe(spaces)
    assert rep.cauchy
    assert rep.tail_sup[-1] < rep.tail_sup[0]


def test_separation_marked_space():
    from gasketlab import gasket as gk
    from gasketlab import percolation as perc

    from conftest import make_config

    cs = perc.decompose(make_config(8, [(i, 0) for i in range(5)]))
    g = gk.build_gasket(cs, 1)
    U = g.region_all()
    sp = ghf.separation_marked_space(g, U, max_points=5)
    assert sp.marked  # separating triples exist on a path
    assert all(v == 1.0 for v in sp.values)
    # on a 5-path, (x, y, z) = (0, 4, 2) separates: find its index
    k = 5
    idx = (0 * k + 4) * k + 2
    assert idx in sp.marked


def test_space_validation_errors():
    with pytest.raises(ValueError):
        mspace([[0.0, 1.0], [2.0, 0.0]])  # asymmetric
    with pytest.raises(ValueError):
        mspace([[0.5]])  # nonzero diagonal
    with pytest.raises(ValueError):
        mspace([[0, 5, 1], [5, 0, 1], [1, 1, 0]])  # triangle violation
    with pytest.raises(ValueError):
        ghf.MarkedMetricSpace(dist=np.zeros((2, 2)), marked=(0,), values=())
