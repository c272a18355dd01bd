import numpy as np
import pytest

from helpers import brute_force_knn, make_dataset

from peercf.dataset import Schema, Unit
from peercf.errors import EmptyMemberList, UnknownUnit
from peercf.subgroup import (
    LshParams,
    build_index,
    lsh_candidates,
    nearest_neighbors,
    subgroup_ranges,
)


def random_dataset(rng, n=80, d=3):
    return make_dataset(rng.normal(size=(n, d + 1)), tuple(f"t{i}" for i in range(d)))


def test_singleton_index():
    ds = make_dataset(np.array([[1.0, 2.0, 3.0]]), ("t0", "t1"))
    index = build_index(ds)
    assert index.points.shape == (1, 2)
    assert lsh_candidates(index, index.vector("0000")) == {"0000"}


def test_same_seed_identical_buckets():
    rng = np.random.default_rng(0)
    ds = random_dataset(rng)
    a = build_index(ds, LshParams(seed=7))
    b = build_index(ds, LshParams(seed=7))
    assert len(a.buckets) == len(b.buckets)
    for table_a, table_b in zip(a.buckets, b.buckets):
        assert table_a.keys() == table_b.keys()
        for key in table_a:
            np.testing.assert_array_equal(table_a[key], table_b[key])


def test_different_seed_different_planes():
    rng = np.random.default_rng(1)
    ds = random_dataset(rng)
    a = build_index(ds, LshParams(seed=1))
    b = build_index(ds, LshParams(seed=2))
    assert not np.array_equal(a.planes, b.planes)


def test_n_zero_collapses_to_center():
    rng = np.random.default_rng(2)
    ds = random_dataset(rng, n=10)
    index = build_index(ds)
    sg = nearest_neighbors(index, ds, "0003", 0)
    assert sg.neighbor_ids == ()
    center = ds.unit("0003")
    for i, attr in enumerate(ds.schema.attributes):
        assert sg.ranges[attr] == (center.values[i], center.values[i])


def test_duplicate_unit_ranked_first():
    values = np.array([[1.0, 2.0, 5.0], [9.0, 9.0, 1.0], [1.0, 2.0, 7.0]])
    ds = make_dataset(values, ("t0", "t1"))
    index = build_index(ds)
    sg = nearest_neighbors(index, ds, "0000", 2)
    assert sg.neighbor_ids[0] == "0002"  # exact covariate duplicate, outcome differs
    assert sg.distances[0] == 0.0


def test_unknown_unit():
    rng = np.random.default_rng(3)
    ds = random_dataset(rng, n=5)
    index = build_index(ds)
    with pytest.raises(UnknownUnit):
        nearest_neighbors(index, ds, "nope", 2)


def test_exactness_against_brute_force_scan():
    rng = np.random.default_rng(4)
    for trial in range(25):
        n = int(rng.integers(5, 120))
        d = int(rng.integers(1, 6))
        ds = random_dataset(rng, n=n, d=d)
        index = build_index(ds)
        center = ds.units[int(rng.integers(n))].id
        k = int(rng.integers(0, n))
        sg = nearest_neighbors(index, ds, center, k)
        oracle = brute_force_knn(ds, center, k)
        assert list(sg.neighbor_ids) == [uid for _, uid in oracle]
        np.testing.assert_allclose(sg.distances, [dist for dist, _ in oracle], atol=1e-12)


def test_exactness_with_exact_distance_ties():
    # zero-mean symmetric columns keep standardization exact, so the four
    # cardinal points are tied at exactly 1/sd -> id order decides
    values = np.array(
        [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0],
         [0.0, -1.0, 0.0]]
    )
    ds = make_dataset(values, ("t0", "t1"))
    assert ds.stats.mean[0] == 0.0 and ds.stats.mean[1] == 0.0
    index = build_index(ds)
    sg = nearest_neighbors(index, ds, "0000", 4)
    assert list(sg.neighbor_ids) == ["0001", "0002", "0003", "0004"]
    assert len(set(sg.distances)) == 1
    oracle = brute_force_knn(ds, "0000", 4)
    assert list(sg.neighbor_ids) == [uid for _, uid in oracle]


def test_monotone_prefix_containment():
    rng = np.random.default_rng(5)
    ds = random_dataset(rng, n=60)
    index = build_index(ds)
    center = "0007"
    previous: tuple[str, ...] = ()
    for n in range(0, 59):
        sg = nearest_neighbors(index, ds, center, n)
        assert sg.neighbor_ids[: len(previous)] == previous
        previous = sg.neighbor_ids
    assert len(previous) == 58


def test_neighbor_count_clamped_to_population():
    rng = np.random.default_rng(6)
    ds = random_dataset(rng, n=6)
    index = build_index(ds)
    sg = nearest_neighbors(index, ds, "0000", 50)
    assert len(sg.neighbor_ids) == 5


def test_distances_non_decreasing_and_ranges_cover_members():
    rng = np.random.default_rng(7)
    ds = random_dataset(rng, n=50)
    index = build_index(ds)
    for center in ("0000", "0011", "0031"):
        sg = nearest_neighbors(index, ds, center, 12)
        assert list(sg.distances) == sorted(sg.distances)
        members = [ds.unit(center)] + [ds.unit(i) for i in sg.neighbor_ids]
        for member in members:
            for i, attr in enumerate(ds.schema.attributes):
                lo, hi = sg.ranges[attr]
                assert lo <= member.values[i] <= hi


def test_outcome_excluded_from_similarity():
    # identical treatments, wildly different outcomes: all pairwise distances 0
    values = np.array([[1.0, 2.0, 0.0], [1.0, 2.0, 100.0], [1.0, 2.0, -50.0]])
    ds = make_dataset(values, ("t0", "t1"))
    index = build_index(ds)
    sg = nearest_neighbors(index, ds, "0001", 2)
    assert sg.distances == (0.0, 0.0)
    assert list(sg.neighbor_ids) == ["0000", "0002"]  # tie -> id ascending


def test_seed_determinism_of_results():
    rng = np.random.default_rng(8)
    ds = random_dataset(rng, n=40)
    one = nearest_neighbors(build_index(ds), ds, "0004", 7)
    two = nearest_neighbors(build_index(ds), ds, "0004", 7)
    assert one == two


def test_subgroup_ranges_singleton():
    schema = Schema(id_column="id", outcome="out", treatments=("t0",))
    member = Unit("x", "x", np.array([3.0, 9.0]))
    assert subgroup_ranges([member], schema) == {"t0": (3.0, 3.0), "out": (9.0, 9.0)}


def test_subgroup_ranges_coordinate_min_max():
    schema = Schema(id_column="id", outcome="out", treatments=("t0",))
    members = [Unit("a", "a", np.array([1.0, 5.0])), Unit("b", "b", np.array([3.0, 2.0]))]
    assert subgroup_ranges(members, schema) == {"t0": (1.0, 3.0), "out": (2.0, 5.0)}


def test_subgroup_ranges_fold_oracle():
    rng = np.random.default_rng(9)
    ds = random_dataset(rng, n=11, d=4)
    members = list(ds.units)
    ranges = subgroup_ranges(members, ds.schema)
    for i, attr in enumerate(ds.schema.attributes):
        lo = min(m.values[i] for m in members)
        hi = max(m.values[i] for m in members)
        assert ranges[attr] == (lo, hi)


def test_subgroup_ranges_empty_members():
    schema = Schema(id_column="id", outcome="out", treatments=("t0",))
    with pytest.raises(EmptyMemberList):
        subgroup_ranges([], schema)


def test_candidates_contain_self_and_close_duplicates():
    values = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 9.0], [50.0, -50.0, 1.0]])
    ds = make_dataset(values, ("t0", "t1"))
    index = build_index(ds)
    cands = lsh_candidates(index, index.vector("0000"))
    assert {"0000", "0001"} <= cands  # identical points share every bucket
