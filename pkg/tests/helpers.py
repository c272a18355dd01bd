"""Independent oracles and small data builders shared across test modules.

Everything here deliberately avoids the production code paths it checks:
the Shapley oracle enumerates subsets with itertools and evaluates the model
row by row, the k-NN oracle is a plain per-unit scan, and the SCM sampler
generates data directly from its own equations.
"""

from __future__ import annotations

import csv
import io
from itertools import combinations
from math import factorial

import numpy as np

from peercf.causal import validate_graph
from peercf.dataset import Schema, Unit, load_dataset, standardize


def make_dataset(values: np.ndarray, treatments: tuple[str, ...], outcome: str = "out",
                 ids: list[str] | None = None):
    """Build a Dataset from a (n, d+1) value matrix via the CSV loader."""
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    if ids is None:
        ids = [f"{i:04d}" for i in range(n)]
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["id", *treatments, outcome])
    for i in range(n):
        writer.writerow([ids[i], *[repr(float(v)) for v in values[i]]])
    schema = Schema(id_column="id", outcome=outcome, treatments=tuple(treatments))
    return load_dataset(buf.getvalue().encode(), schema)


def brute_force_knn(dataset, unit_id: str, n: int) -> list[tuple[float, str]]:
    """Exact (distance, id) list, nearest first, same tie rule as the index."""
    d = dataset.schema.outcome_index
    center = dataset.unit(unit_id)
    q = standardize(center.values[:d], dataset.stats)
    entries = []
    for u in dataset.units:
        if u.id == unit_id:
            continue
        z = standardize(u.values[:d], dataset.stats)
        diff = z - q
        entries.append((float(np.sqrt(np.sum(diff * diff))), u.id))
    entries.sort()
    return entries[:n]


def brute_force_shap(model, x: np.ndarray, background: np.ndarray) -> np.ndarray:
    """2^d subset enumeration with per-row model evaluation and memoized values."""
    x = np.asarray(x, dtype=np.float64)
    background = np.atleast_2d(np.asarray(background, dtype=np.float64))
    d = x.shape[0]
    cache: dict[frozenset, float] = {}

    def value(subset: frozenset) -> float:
        hit = cache.get(subset)
        if hit is not None:
            return hit
        total = 0.0
        for row in background:
            composite = row.copy()
            for i in subset:
                composite[i] = x[i]
            total += float(np.asarray(model(composite[None, :]))[0])
        result = total / background.shape[0]
        cache[subset] = result
        return result

    phi = np.zeros(d)
    for i in range(d):
        others = [j for j in range(d) if j != i]
        for size in range(d):
            weight = factorial(size) * factorial(d - size - 1) / factorial(d)
            for subset in combinations(others, size):
                s = frozenset(subset)
                phi[i] += weight * (value(s | {i}) - value(s))
    return phi


def random_linear_scm(rng: np.random.Generator, n_nodes: int, n_units: int,
                      noise_sd: float = 0.1, max_parents: int = 3):
    """A random linear-Gaussian SCM plus units sampled from it.

    Nodes are generated in topological order with the outcome last (so it can
    never acquire children), each non-root drawing up to ``max_parents``
    parents from earlier nodes.
    """
    names = [f"n{i:02d}" for i in range(n_nodes)]
    outcome = names[-1]
    edges: list[tuple[str, str]] = []
    coeffs: dict[str, dict[str, float]] = {}
    intercepts: dict[str, float] = {}
    for i, child in enumerate(names):
        intercepts[child] = float(rng.uniform(-2.0, 2.0))
        coeffs[child] = {}
        if i == 0:
            continue
        k = int(rng.integers(0, min(max_parents, i) + 1))
        if child == outcome and k == 0:
            k = 1  # keep the outcome connected
        picks = rng.choice(i, size=k, replace=False)
        for p in picks:
            parent = names[int(p)]
            edges.append((parent, child))
            sign = 1.0 if rng.random() < 0.5 else -1.0
            coeffs[child][parent] = float(sign * rng.uniform(0.5, 2.0))

    columns: dict[str, np.ndarray] = {}
    for child in names:
        base = intercepts[child] + rng.normal(0.0, noise_sd, size=n_units)
        for parent, w in coeffs[child].items():
            base = base + w * columns[parent]
        columns[child] = base

    schema = Schema(id_column="id", outcome=outcome, treatments=tuple(names[:-1]))
    graph = validate_graph(names, edges, outcome)
    units = [
        Unit(
            id=f"{i:04d}",
            name=f"{i:04d}",
            values=np.array([columns[a][i] for a in schema.attributes]),
        )
        for i in range(n_units)
    ]
    return graph, schema, units, coeffs, intercepts
