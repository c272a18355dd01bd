"""Bundled synthetic fixtures: county-style datasets with known causal graphs.

Three fixtures ship with the package, all fully synthetic and reproducible
from fixed seeds:

* ``opioid``: 3,000 counties, 10 socioeconomic treatments and an opioid death
  rate outcome, generated from a linear-Gaussian model whose graph contains
  the insufficient-sleep -> mentally-unhealthy-days -> death-rate chain and a
  dispensing-rate -> death-rate edge. Counties come in regional clusters so
  peer structure is meaningful.
* ``election``: 3,000 counties, 9 demographic treatments and a signed vote
  percentage difference outcome (midpoint 0).
* ``chain``: a 3-unit a -> b -> y toy whose least-squares fit lands exactly on
  b = 2a, y = 3b, used by hand-computed oracle tests.

``python -m peercf.fixtures --out DIR`` writes all of them to disk as
CSV + schema/graph/boundary/config JSON, ready for ``peercf serve``.
"""

from __future__ import annotations

import argparse
import csv
import json
from pathlib import Path

import numpy as np

OPIOID_TREATMENTS = (
    "food_environment_index",
    "primary_care_rate",
    "violent_crime_rate",
    "hiv_prevalence_rate",
    "education_index",
    "poverty_index",
    "pct_insufficient_sleep",
    "mental_unhealthy_days",
    "pct_frequent_physical_distress",
    "opioid_dispensing_rate",
)
OPIOID_OUTCOME = "opioid_death_rate"

OPIOID_EDGES = [
    ("education_index", "poverty_index"),
    ("education_index", "primary_care_rate"),
    ("poverty_index", "food_environment_index"),
    ("poverty_index", "violent_crime_rate"),
    ("poverty_index", "pct_insufficient_sleep"),
    ("pct_insufficient_sleep", "mental_unhealthy_days"),
    ("pct_frequent_physical_distress", "mental_unhealthy_days"),
    ("mental_unhealthy_days", "opioid_death_rate"),
    ("opioid_dispensing_rate", "opioid_death_rate"),
    ("hiv_prevalence_rate", "opioid_death_rate"),
    ("violent_crime_rate", "opioid_death_rate"),
    ("food_environment_index", "opioid_death_rate"),
    ("primary_care_rate", "opioid_death_rate"),
]

ELECTION_TREATMENTS = (
    "pct_rural",
    "pct_minority",
    "pct_physically_inactive",
    "pct_own_home",
    "num_unemployed",
    "pct_age_65_plus",
    "violent_crime_per_100k",
    "education_index",
    "pct_black",
)
ELECTION_OUTCOME = "vote_pct_difference"

ELECTION_EDGES = [
    ("pct_black", "pct_minority"),
    ("pct_rural", "pct_own_home"),
    ("education_index", "num_unemployed"),
    ("pct_age_65_plus", "pct_physically_inactive"),
    ("pct_rural", "vote_pct_difference"),
    ("pct_minority", "vote_pct_difference"),
    ("pct_physically_inactive", "vote_pct_difference"),
    ("pct_own_home", "vote_pct_difference"),
    ("num_unemployed", "vote_pct_difference"),
    ("pct_age_65_plus", "vote_pct_difference"),
    ("violent_crime_per_100k", "vote_pct_difference"),
    ("education_index", "vote_pct_difference"),
    ("pct_black", "vote_pct_difference"),
]


def _clustered_roots(rng, n, n_clusters, center_mean, center_sd, within_sd):
    """Root attribute with regional structure: cluster centers plus local noise."""
    centers = rng.normal(center_mean, center_sd, size=n_clusters)
    assignment = np.repeat(np.arange(n_clusters), int(np.ceil(n / n_clusters)))[:n]
    return centers[assignment] + rng.normal(0.0, within_sd, size=n), assignment


def generate_opioid(n: int = 3000, seed: int = 7, n_clusters: int = 60):
    """Columns dict + cluster assignment for the opioid-style fixture."""
    rng = np.random.default_rng(seed)
    cols: dict[str, np.ndarray] = {}

    edu, clusters = _clustered_roots(rng, n, n_clusters, 8.5, 1.1, 0.22)
    cols["education_index"] = edu
    cols["pct_frequent_physical_distress"], _ = _clustered_roots(
        rng, n, n_clusters, 12.0, 2.0, 0.5
    )
    # reuse the same regional assignment for every root so clusters are coherent
    centers = rng.normal(150.0, 60.0, size=n_clusters)
    cols["hiv_prevalence_rate"] = centers[clusters] + rng.normal(0, 12.0, size=n)
    centers = rng.normal(55.0, 18.0, size=n_clusters)
    cols["opioid_dispensing_rate"] = centers[clusters] + rng.normal(0, 4.0, size=n)

    cols["poverty_index"] = 30.0 - 1.8 * edu + rng.normal(0, 0.8, size=n)
    cols["primary_care_rate"] = 20.0 + 5.5 * edu + rng.normal(0, 2.5, size=n)
    pov = cols["poverty_index"]
    cols["food_environment_index"] = 9.5 - 0.22 * pov + rng.normal(0, 0.35, size=n)
    cols["violent_crime_rate"] = 80.0 + 14.0 * pov + rng.normal(0, 30.0, size=n)
    cols["pct_insufficient_sleep"] = 22.0 + 0.85 * pov + rng.normal(0, 1.1, size=n)
    cols["mental_unhealthy_days"] = (
        0.4
        + 0.11 * cols["pct_insufficient_sleep"]
        + 0.06 * cols["pct_frequent_physical_distress"]
        + rng.normal(0, 0.28, size=n)
    )
    cols[OPIOID_OUTCOME] = (
        4.0
        + 5.2 * cols["mental_unhealthy_days"]
        + 0.22 * cols["opioid_dispensing_rate"]
        + 0.012 * cols["hiv_prevalence_rate"]
        + 0.010 * cols["violent_crime_rate"]
        - 0.9 * cols["food_environment_index"]
        - 0.05 * cols["primary_care_rate"]
        + rng.normal(0, 1.5, size=n)
    )
    return cols, clusters


def generate_election(n: int = 3000, seed: int = 11, n_clusters: int = 50):
    rng = np.random.default_rng(seed)
    cols: dict[str, np.ndarray] = {}

    rural, clusters = _clustered_roots(rng, n, n_clusters, 55.0, 22.0, 5.0)
    cols["pct_rural"] = np.clip(rural, 0.0, 100.0)
    centers = rng.normal(18.0, 16.0, size=n_clusters)
    cols["pct_black"] = np.clip(centers[clusters] + rng.normal(0, 2.5, size=n), 0.0, 90.0)
    cols["pct_minority"] = np.clip(
        6.0 + 0.9 * cols["pct_black"] + rng.normal(8.0, 7.0, size=n), 0.0, 100.0
    )
    centers = rng.normal(17.0, 3.0, size=n_clusters)
    cols["pct_age_65_plus"] = centers[clusters] + rng.normal(0, 1.0, size=n)
    centers = rng.normal(9.0, 1.3, size=n_clusters)
    cols["education_index"] = centers[clusters] + rng.normal(0, 0.4, size=n)
    centers = rng.normal(350.0, 150.0, size=n_clusters)
    cols["violent_crime_per_100k"] = np.clip(
        centers[clusters] + rng.normal(0, 40.0, size=n), 0.0, None
    )

    cols["pct_own_home"] = 48.0 + 0.28 * cols["pct_rural"] + rng.normal(0, 3.5, size=n)
    cols["num_unemployed"] = np.clip(
        14000.0 - 1100.0 * cols["education_index"] + rng.normal(0, 900.0, size=n),
        0.0,
        None,
    )
    cols["pct_physically_inactive"] = (
        14.0 + 0.55 * cols["pct_age_65_plus"] + rng.normal(0, 1.4, size=n)
    )
    cols[ELECTION_OUTCOME] = (
        -12.0
        + 0.38 * cols["pct_rural"]
        - 0.85 * cols["pct_minority"]
        + 0.30 * cols["pct_physically_inactive"]
        + 0.45 * cols["pct_own_home"]
        - 0.0012 * cols["num_unemployed"]
        + 0.9 * cols["pct_age_65_plus"]
        - 0.004 * cols["violent_crime_per_100k"]
        - 1.1 * cols["education_index"]
        + 0.25 * cols["pct_black"]
        + rng.normal(0, 4.0, size=n)
    )
    return cols, clusters


def _write_csv(path: Path, treatments, outcome, cols, clusters=None) -> None:
    n = len(next(iter(cols.values())))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "name", *treatments, outcome])
        for i in range(n):
            region = int(clusters[i]) if clusters is not None else 0
            writer.writerow(
                [
                    f"{i + 1:05d}",
                    f"County {i + 1:04d}, S{region:02d}",
                    *[repr(float(cols[t][i])) for t in treatments],
                    repr(float(cols[outcome][i])),
                ]
            )


def _write_geojson(path: Path, n: int, grid_cols: int = 60) -> None:
    """One small square polygon per unit on a lon/lat grid, keyed by id."""
    lon0, lat0, cell = -125.0, 24.0, 0.8
    features = []
    for i in range(n):
        col = i % grid_cols
        row = i // grid_cols
        x = lon0 + col * cell
        y = lat0 + row * cell * 0.55
        ring = [
            [x, y],
            [x + cell * 0.92, y],
            [x + cell * 0.92, y + cell * 0.5],
            [x, y + cell * 0.5],
            [x, y],
        ]
        features.append(
            {
                "type": "Feature",
                "properties": {"id": f"{i + 1:05d}"},
                "geometry": {"type": "Polygon", "coordinates": [ring]},
            }
        )
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"type": "FeatureCollection", "features": features}, fh)


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _write_bundle(out, name, treatments, outcome, edges, cols, clusters, midpoint):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    n = len(next(iter(cols.values())))
    paths = {
        "data": out / f"{name}.csv",
        "schema": out / f"{name}.schema.json",
        "graph": out / f"{name}.graph.json",
        "geo": out / f"{name}.geo.json",
        "config": out / f"{name}.config.json",
    }
    _write_csv(paths["data"], treatments, outcome, cols, clusters)
    _write_json(
        paths["schema"],
        {
            "id_column": "id",
            "name_column": "name",
            "outcome": outcome,
            "treatments": list(treatments),
        },
    )
    _write_json(
        paths["graph"],
        {
            "nodes": [*treatments, outcome],
            "edges": [list(e) for e in edges],
            "outcome": outcome,
        },
    )
    _write_geojson(paths["geo"], n)
    _write_json(
        paths["config"],
        {
            "data_path": paths["data"].name,
            "schema_path": paths["schema"].name,
            "graph_path": paths["graph"].name,
            "geo_path": paths["geo"].name,
            "port": 8000,
            "lsh": {"tables": 16, "bits": 8, "seed": 42},
            "lime": {"n_samples": 1000, "kernel_width": None, "seed": 42},
            "shap_background": "subgroup",
            "midpoint": midpoint,
            "seed": 42,
            "default_neighbors": 10,
            "default_grid_size": 20,
            "global_background": 100,
            "geo_id_property": "id",
        },
    )
    return paths


def write_opioid_fixture(out: str | Path, n: int = 3000, seed: int = 7):
    cols, clusters = generate_opioid(n=n, seed=seed)
    return _write_bundle(
        out, "opioid", OPIOID_TREATMENTS, OPIOID_OUTCOME, OPIOID_EDGES, cols, clusters,
        midpoint=None,
    )


def write_election_fixture(out: str | Path, n: int = 3000, seed: int = 11):
    cols, clusters = generate_election(n=n, seed=seed)
    return _write_bundle(
        out, "election", ELECTION_TREATMENTS, ELECTION_OUTCOME, ELECTION_EDGES,
        cols, clusters, midpoint=0.0,
    )


def write_chain_fixture(out: str | Path):
    """3-unit a -> b -> y fixture whose OLS fit is exactly b = 2a, y = 3b.

    The residuals of the center unit '00001' (a=1, b=2.5, y=8) are 0.5 for
    both b and y, so do(a=2) propagates to b=4.5, y=14 — the values the
    hand-oracle tests pin.
    """
    cols = {
        "a": np.array([1.0, 0.0, 2.0]),
        "b": np.array([2.5, -0.25, 3.75]),
        "y": np.array([8.0, -0.90625, 10.90625]),
    }
    return _write_bundle(
        out, "chain", ("a", "b"), "y", [("a", "b"), ("b", "y")], cols, None,
        midpoint=None,
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m peercf.fixtures",
        description="Write the bundled synthetic fixtures to a directory.",
    )
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument(
        "--which",
        choices=["opioid", "election", "chain", "all"],
        default="all",
    )
    parser.add_argument("--rows", type=int, default=3000)
    args = parser.parse_args(argv)

    if args.which in ("opioid", "all"):
        paths = write_opioid_fixture(args.out, n=args.rows)
        print(f"wrote opioid fixture: {paths['config']}")
    if args.which in ("election", "all"):
        paths = write_election_fixture(args.out, n=args.rows)
        print(f"wrote election fixture: {paths['config']}")
    if args.which in ("chain", "all"):
        paths = write_chain_fixture(args.out)
        print(f"wrote chain fixture: {paths['config']}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
