"""Service configuration: file paths, index parameters, explanation defaults.

A config is a JSON object mirroring :class:`ServiceConfig`; relative paths
resolve against the config file's directory, and every field can be
overridden by a CLI flag.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .explain import LimeConfig
from .subgroup import LshParams


@dataclass(frozen=True)
class ServiceConfig:
    data_path: Path
    schema_path: Path
    graph_path: Path
    geo_path: Path | None = None
    port: int = 8000
    lsh: LshParams = field(default_factory=LshParams)
    lime: LimeConfig = field(default_factory=LimeConfig)
    shap_background: str = "subgroup"  # or "global"
    midpoint: float | None = None  # None: median of observed outcomes
    seed: int = 42  # background sampling for the global explanation
    default_neighbors: int = 10
    default_grid_size: int = 20
    global_background: int = 100
    geo_id_property: str = "id"

    def __post_init__(self):
        if not 1 <= self.port <= 65535:
            raise ValueError(f"port {self.port} outside [1, 65535]")
        if self.shap_background not in ("subgroup", "global"):
            raise ValueError("shap_background must be 'subgroup' or 'global'")

    def to_json_dict(self) -> dict:
        return {
            "data_path": str(self.data_path),
            "schema_path": str(self.schema_path),
            "graph_path": str(self.graph_path),
            "geo_path": None if self.geo_path is None else str(self.geo_path),
            "port": self.port,
            "lsh": {
                "tables": self.lsh.tables,
                "bits": self.lsh.bits,
                "seed": self.lsh.seed,
            },
            "lime": {
                "n_samples": self.lime.n_samples,
                "kernel_width": self.lime.kernel_width,
                "seed": self.lime.seed,
            },
            "shap_background": self.shap_background,
            "midpoint": self.midpoint,
            "seed": self.seed,
            "default_neighbors": self.default_neighbors,
            "default_grid_size": self.default_grid_size,
            "global_background": self.global_background,
            "geo_id_property": self.geo_id_property,
        }


def config_from_dict(obj: dict, base_dir: Path | None = None) -> ServiceConfig:
    def resolve(value: str | None) -> Path | None:
        if value is None:
            return None
        path = Path(value)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return path

    lsh_obj = obj.get("lsh", {})
    lime_obj = obj.get("lime", {})
    data_path = resolve(obj["data_path"])
    schema_path = resolve(obj["schema_path"])
    graph_path = resolve(obj["graph_path"])
    assert data_path and schema_path and graph_path
    return ServiceConfig(
        data_path=data_path,
        schema_path=schema_path,
        graph_path=graph_path,
        geo_path=resolve(obj.get("geo_path")),
        port=obj.get("port", 8000),
        lsh=LshParams(
            tables=lsh_obj.get("tables", 16),
            bits=lsh_obj.get("bits", 8),
            seed=lsh_obj.get("seed", 42),
        ),
        lime=LimeConfig(
            n_samples=lime_obj.get("n_samples", 1000),
            kernel_width=lime_obj.get("kernel_width"),
            seed=lime_obj.get("seed", 42),
        ),
        shap_background=obj.get("shap_background", "subgroup"),
        midpoint=obj.get("midpoint"),
        seed=obj.get("seed", 42),
        default_neighbors=obj.get("default_neighbors", 10),
        default_grid_size=obj.get("default_grid_size", 20),
        global_background=obj.get("global_background", 100),
        geo_id_property=obj.get("geo_id_property", "id"),
    )


def load_config(path: str | Path) -> ServiceConfig:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(json.load(fh), base_dir=path.parent)


def apply_overrides(config: ServiceConfig, **overrides) -> ServiceConfig:
    """Replace any non-None keyword on the config (CLI flags win over the file)."""
    filtered = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **filtered) if filtered else config
