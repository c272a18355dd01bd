"""Request orchestration shared by the HTTP server and the CLI.

Every operation follows the same shape: resolve the unit's peer subgroup,
fit the localized SCM on it, run the requested computation, and serialize to
a plain dict with a fixed key order. The CLI and the HTTP layer both emit
these dicts through identical JSON settings, so the two surfaces produce
byte-identical output for the same logical request.

All loaded state (dataset, graph, index, boundaries) is immutable after
construction; per-request work owns its own scratch, so handlers can run
concurrently without coordination.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import kernels
from .causal import (
    CausalGraph,
    FittedSCM,
    check_graph_matches_schema,
    fit_scm,
    intervene,
    load_graph,
    outcome_model,
    recommend_interventions,
)
from .config import ServiceConfig
from .dataset import Dataset, Unit, load_dataset, load_schema, outcome_extent
from .errors import BadRequest, NoGeometry
from .explain import (
    LimeConfig,
    lime_bar_data,
    lime_explain,
    shap_exact,
    shap_global,
    waterfall_data,
)
from .subgroup import LshIndex, Subgroup, build_index, nearest_neighbors

JSON_SEPARATORS = (",", ":")


def dumps(payload: dict) -> str:
    """The one JSON serialization used by both the CLI and the HTTP layer."""
    return json.dumps(
        payload, ensure_ascii=False, allow_nan=False, separators=JSON_SEPARATORS
    )


class AnalysisService:
    """Loaded dataset + graph + index, with one method per API operation."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.schema = load_schema(config.schema_path)
        with open(config.data_path, "rb") as fh:
            self.dataset: Dataset = load_dataset(fh, self.schema)
        self.graph: CausalGraph = load_graph(config.graph_path)
        check_graph_matches_schema(self.graph, self.schema)
        self.index: LshIndex = build_index(self.dataset, config.lsh)
        self.extent = outcome_extent(self.dataset, config.midpoint)
        self.geo_warnings = self._geo_join_warnings()
        self._global_cache: dict[int, dict] = {}
        kernels.warm_up()

    # --- helpers ---------------------------------------------------------

    def _geo_join_warnings(self) -> dict:
        configured = self.config.geo_path is not None
        unmatched: list[str] = []
        missing: list[str] = []
        if configured:
            with open(self.config.geo_path, "r", encoding="utf-8") as fh:
                geo = json.load(fh)
            prop = self.config.geo_id_property
            feature_ids = set()
            for i, feature in enumerate(geo.get("features", [])):
                fid = feature.get("properties", {}).get(prop, feature.get("id"))
                if fid is None:
                    unmatched.append(f"<feature {i}>")
                    continue
                feature_ids.add(str(fid))
                if not self.dataset.has_unit(str(fid)):
                    unmatched.append(str(fid))
            missing = [u.id for u in self.dataset.units if u.id not in feature_ids]
        return {
            "configured": configured,
            "unmatched_features": unmatched,
            "units_without_geometry": missing,
        }

    def _check_n(self, n: int | None) -> int:
        if n is None:
            n = self.config.default_neighbors
        limit = len(self.dataset) - 1
        if not 1 <= n <= limit:
            raise BadRequest("bad_n", f"n must be between 1 and {limit}")
        return n

    def _subgroup(self, unit_id: str, n: int) -> tuple[Subgroup, list[Unit]]:
        subgroup = nearest_neighbors(self.index, self.dataset, unit_id, n)
        members = [self.dataset.unit(unit_id)] + [
            self.dataset.unit(i) for i in subgroup.neighbor_ids
        ]
        return subgroup, members

    def _fit(self, unit_id: str, n: int) -> tuple[FittedSCM, Subgroup, list[Unit]]:
        subgroup, members = self._subgroup(unit_id, n)
        return fit_scm(self.graph, self.schema, members), subgroup, members

    def _vector_dict(self, values: np.ndarray) -> dict[str, float]:
        return {a: float(values[i]) for i, a in enumerate(self.schema.attributes)}

    def _ranges_dict(self, ranges: dict[str, tuple[float, float]]) -> dict:
        return {
            a: {"min": ranges[a][0], "max": ranges[a][1]}
            for a in self.schema.attributes
        }

    def _extent_dict(self) -> dict:
        lo, hi, mid = self.extent
        return {"min": lo, "max": hi, "midpoint": mid}

    def _treatments_of(self, unit: Unit) -> np.ndarray:
        return unit.values[: self.schema.outcome_index]

    def _background(self, members: list[Unit]) -> np.ndarray:
        if self.config.shap_background == "global":
            return self.dataset.treatment_values
        return np.stack([self._treatments_of(m) for m in members])

    # --- payloads, one per endpoint ---------------------------------------

    def config_payload(self) -> dict:
        resolved_lime = self.config.lime.resolve_width(len(self.schema.treatments))
        return {
            "schema": self.schema.to_json_dict(),
            "attributes": list(self.schema.attributes),
            "outcome": self.schema.outcome,
            "n_units": len(self.dataset),
            "extent": self._extent_dict(),
            "defaults": {
                "n_neighbors": self.config.default_neighbors,
                "grid_size": self.config.default_grid_size,
                "lsh": {
                    "tables": self.config.lsh.tables,
                    "bits": self.config.lsh.bits,
                    "seed": self.config.lsh.seed,
                },
                "lime": {
                    "n_samples": self.config.lime.n_samples,
                    "kernel_width": resolved_lime,
                    "seed": self.config.lime.seed,
                },
                "shap_background": self.config.shap_background,
                "global_background": self.config.global_background,
                "seed": self.config.seed,
            },
            "geo": self.geo_warnings,
        }

    def units_payload(self) -> dict:
        return {
            "units": [
                {"id": u.id, "name": u.name, "outcome": u.outcome}
                for u in self.dataset.units
            ],
            "extent": self._extent_dict(),
        }

    def neighbors_payload(self, unit_id: str, n: int | None = None) -> dict:
        self.dataset.unit(unit_id)  # unknown ids outrank range errors
        n = self._check_n(n)
        subgroup, members = self._subgroup(unit_id, n)
        return {
            "center_id": subgroup.center_id,
            "n": subgroup.n,
            "neighbor_ids": list(subgroup.neighbor_ids),
            "distances": list(subgroup.distances),
            "ranges": self._ranges_dict(subgroup.ranges),
            # raw attribute vectors, center first: the profile-mode polylines
            # and sliders render from these fields, never from client math
            "values": {m.id: self._vector_dict(m.values) for m in members},
        }

    def intervene_payload(
        self, unit_id: str, attribute: str, value: float, n: int | None = None
    ) -> dict:
        self.dataset.unit(unit_id)
        n = self._check_n(n)
        scm, subgroup, _ = self._fit(unit_id, n)
        unit = self.dataset.unit(unit_id)
        result = intervene(scm, unit, attribute, value)
        changed = [a for a in self.schema.attributes if a in result.changed]
        return {
            "unit_id": result.unit_id,
            "n": n,
            "intervened_attribute": result.intervened_attribute,
            "intervention_value": result.intervention_value,
            "factual": self._vector_dict(result.factual),
            "counterfactual": self._vector_dict(result.counterfactual),
            "changed": changed,
            "ranges": self._ranges_dict(subgroup.ranges),
        }

    def lime_payload(
        self,
        unit_id: str,
        n: int | None = None,
        n_samples: int | None = None,
        kernel_width: float | None = None,
        seed: int | None = None,
    ) -> dict:
        self.dataset.unit(unit_id)
        n = self._check_n(n)
        scm, _, members = self._fit(unit_id, n)
        unit = self.dataset.unit(unit_id)
        config = LimeConfig(
            n_samples=self.config.lime.n_samples if n_samples is None else n_samples,
            kernel_width=(
                self.config.lime.kernel_width if kernel_width is None else kernel_width
            ),
            seed=self.config.lime.seed if seed is None else seed,
        )
        treatments = self.schema.treatments
        member_matrix = np.stack([self._treatments_of(m) for m in members])
        explanation = lime_explain(
            outcome_model(scm),
            self._treatments_of(unit),
            self.dataset.stats.sd[: len(treatments)],
            member_matrix.mean(axis=0),
            config,
            treatments,
        )
        bars = [
            {"feature": f, "contribution": c, "direction": s}
            for f, c, s in lime_bar_data(explanation)
        ]
        return {
            "unit_id": unit_id,
            "n": n,
            "prediction": explanation.prediction,
            "interval": {
                "low": explanation.interval[0],
                "high": explanation.interval[1],
            },
            "coefficients": {
                f: float(c)
                for f, c in zip(explanation.feature_names, explanation.coefficients)
            },
            "intercept": explanation.intercept,
            "n_samples": explanation.n_samples,
            "kernel_width": explanation.kernel_width,
            "seed": explanation.seed,
            "degenerate": explanation.degenerate,
            "r_squared": explanation.r_squared,
            "bars": bars,
        }

    def shap_payload(self, unit_id: str, n: int | None = None) -> dict:
        self.dataset.unit(unit_id)
        n = self._check_n(n)
        scm, _, members = self._fit(unit_id, n)
        unit = self.dataset.unit(unit_id)
        explanation = shap_exact(
            outcome_model(scm),
            self._treatments_of(unit),
            self._background(members),
            self.schema.treatments,
        )
        steps = [
            {"feature": f, "start": s, "end": e}
            for f, s, e in waterfall_data(explanation)
        ]
        return {
            "unit_id": unit_id,
            "n": n,
            "baseline": explanation.baseline,
            "prediction": explanation.prediction,
            "attributions": {
                f: float(a)
                for f, a in zip(explanation.feature_names, explanation.attributions)
            },
            "feature_values": {
                f: float(v)
                for f, v in zip(explanation.feature_names, explanation.feature_values)
            },
            "waterfall": steps,
        }

    def global_payload(self, n_background: int | None = None) -> dict:
        if n_background is None:
            n_background = min(self.config.global_background, len(self.dataset))
        if not 1 <= n_background <= len(self.dataset):
            raise BadRequest(
                "bad_k", f"n_background must be between 1 and {len(self.dataset)}"
            )
        cached = self._global_cache.get(n_background)
        if cached is not None:
            return cached

        scm = fit_scm(self.graph, self.schema, list(self.dataset.units))
        rng = np.random.default_rng(self.config.seed)
        rows = np.sort(
            rng.choice(len(self.dataset), size=n_background, replace=False)
        )
        background = self.dataset.treatment_values[rows]
        result = shap_global(
            outcome_model(scm),
            self.dataset.treatment_values,
            background,
            self.schema.treatments,
            tuple(u.id for u in self.dataset.units),
        )
        payload = {
            "features": list(result.feature_names),
            "feature_order": list(result.feature_order),
            "unit_ids": list(result.unit_ids),
            "matrix": [[float(v) for v in row] for row in result.matrix],
            "feature_values": [[float(v) for v in row] for row in result.feature_values],
            "n_background": n_background,
            "seed": self.config.seed,
        }
        self._global_cache[n_background] = payload
        return payload

    def recommend_payload(
        self,
        unit_id: str,
        target: float,
        grid_size: int | None = None,
        n: int | None = None,
    ) -> dict:
        self.dataset.unit(unit_id)
        n = self._check_n(n)
        if grid_size is None:
            grid_size = self.config.default_grid_size
        scm, _, _ = self._fit(unit_id, n)
        unit = self.dataset.unit(unit_id)
        ranked = recommend_interventions(scm, unit, target, grid_size)
        return {
            "unit_id": unit_id,
            "n": n,
            "target": float(target),
            "grid_size": grid_size,
            "recommendations": [
                {
                    "attribute": r.attribute,
                    "value": r.value,
                    "predicted_outcome": r.predicted_outcome,
                    "distance": r.distance,
                }
                for r in ranked
            ],
        }

    def geo_file(self) -> Path:
        if self.config.geo_path is None:
            raise NoGeometry()
        return Path(self.config.geo_path)
