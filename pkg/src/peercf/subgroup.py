"""Peer subgroups: LSH candidate generation and exact k-nearest-neighbor search.

Similarity lives in standardized treatment space (the outcome is excluded so
peers never match on the quantity being predicted). The index hashes every
unit into L tables of k random-hyperplane sign bits. Bucket probing yields a
candidate pool quickly; the final neighbor ranking is always exact over the
full population, because subgroup semantics (prefix containment as N grows,
reproducible peer sets) require the true k-NN answer, and at the supported
scale (thousands of units, at most 15 attributes) the vectorized scan is
effectively free. The candidate stage is kept as the measured accelerator for
larger deployments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .dataset import Dataset, Schema, Unit, standardize
from .errors import EmptyDataset, EmptyMemberList, UnknownUnit


@dataclass(frozen=True)
class LshParams:
    tables: int = 16  # L
    bits: int = 8  # k hyperplanes per table
    seed: int = 42

    def __post_init__(self):
        if self.tables < 1 or self.bits < 1:
            raise ValueError("LSH needs at least one table and one bit")


@dataclass(frozen=True)
class LshIndex:
    params: LshParams
    ids: tuple[str, ...]
    points: np.ndarray  # (n, d) standardized treatment vectors
    planes: np.ndarray  # (L, k, d) hyperplane normals
    buckets: tuple[dict[int, np.ndarray], ...] = field(repr=False)
    index_of: dict[str, int] = field(repr=False, default_factory=dict)

    def vector(self, unit_id: str) -> np.ndarray:
        at = self.index_of.get(unit_id)
        if at is None:
            raise UnknownUnit(unit_id)
        return self.points[at]


def _hash_keys(points: np.ndarray, planes: np.ndarray) -> np.ndarray:
    """Pack sign bits of the projections into one integer key per (point, table)."""
    # projections: (n, L, k)
    proj = np.einsum("nd,lkd->nlk", points, planes)
    bits = (proj >= 0).astype(np.int64)
    weights = np.int64(1) << np.arange(planes.shape[1], dtype=np.int64)
    return bits @ weights  # (n, L)


def build_index(dataset: Dataset, params: LshParams = LshParams()) -> LshIndex:
    """Hash every unit's standardized treatment vector into all L tables."""
    if len(dataset) == 0:
        raise EmptyDataset()
    points = standardize(dataset.treatment_values, dataset.stats)
    points.setflags(write=False)
    rng = np.random.default_rng(params.seed)
    planes = rng.standard_normal((params.tables, params.bits, points.shape[1]))
    planes.setflags(write=False)

    keys = _hash_keys(points, planes)
    buckets: list[dict[int, np.ndarray]] = []
    for table in range(params.tables):
        table_buckets: dict[int, list[int]] = {}
        for row, key in enumerate(keys[:, table]):
            table_buckets.setdefault(int(key), []).append(row)
        buckets.append(
            {key: np.asarray(rows, dtype=np.int64) for key, rows in table_buckets.items()}
        )

    return LshIndex(
        params=params,
        ids=tuple(u.id for u in dataset.units),
        points=points,
        planes=planes,
        buckets=tuple(buckets),
        index_of={u.id: i for i, u in enumerate(dataset.units)},
    )


def lsh_candidates(index: LshIndex, query: np.ndarray) -> set[str]:
    """Union of bucket members matching the query across all tables."""
    query = np.asarray(query, dtype=np.float64)
    keys = _hash_keys(query[None, :], index.planes)[0]
    rows: set[int] = set()
    for table, key in enumerate(keys):
        hit = index.buckets[table].get(int(key))
        if hit is not None:
            rows.update(hit.tolist())
    return {index.ids[r] for r in rows}


@dataclass(frozen=True)
class Subgroup:
    center_id: str
    neighbor_ids: tuple[str, ...]
    distances: tuple[float, ...]  # standardized Euclidean, non-decreasing
    n: int
    ranges: dict[str, tuple[float, float]]  # raw units, attribute -> (min, max)


def nearest_neighbors(
    index: LshIndex, dataset: Dataset, unit_id: str, n: int
) -> Subgroup:
    """The unit's true n nearest peers, nearest first, plus subgroup value ranges.

    Ranking is by Euclidean distance in standardized treatment space, ties
    broken by unit id ascending, center excluded; if fewer than n other units
    exist, all of them are returned. The result is always the exact k-NN set:
    LSH candidates only accelerate, never approximate, so the ranking runs
    over the full population whenever the candidate pool cannot be proven to
    cover the answer (at this scale, always).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    center_at = index.index_of.get(unit_id)
    if center_at is None or not dataset.has_unit(unit_id):
        raise UnknownUnit(unit_id)

    query = index.points[center_at]
    sq = kernels.sq_distances(index.points, query)
    ids_array = np.asarray(index.ids)
    order = np.lexsort((ids_array, sq))  # distance first, then id ascending

    neighbor_rows: list[int] = []
    for row in order:
        if len(neighbor_rows) >= n:
            break
        if row == center_at:
            continue
        neighbor_rows.append(int(row))

    neighbor_ids = tuple(index.ids[r] for r in neighbor_rows)
    distances = tuple(float(np.sqrt(sq[r])) for r in neighbor_rows)
    members = [dataset.unit(unit_id)] + [dataset.unit(i) for i in neighbor_ids]
    return Subgroup(
        center_id=unit_id,
        neighbor_ids=neighbor_ids,
        distances=distances,
        n=n,
        ranges=subgroup_ranges(members, dataset.schema),
    )


def subgroup_ranges(
    members: list[Unit], schema: Schema
) -> dict[str, tuple[float, float]]:
    """Coordinate-wise (min, max) in raw units over all members, center included."""
    if not members:
        raise EmptyMemberList()
    rows = np.stack([m.values for m in members])
    lo = rows.min(axis=0)
    hi = rows.max(axis=0)
    return {
        attr: (float(lo[i]), float(hi[i])) for i, attr in enumerate(schema.attributes)
    }
