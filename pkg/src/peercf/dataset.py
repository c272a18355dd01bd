"""Tabular dataset of geographic units: loading, validation, standardization.

A dataset is an immutable table of units (counties or similar), each carrying
one value per attribute. Attribute order is always treatments followed by the
outcome. Standardization statistics are computed once at load time with the
population convention and shared by the distance and hashing code.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .errors import DuplicateId, EmptyDataset, MissingColumn, ParseError

ATTRIBUTE_ENVELOPE = 15


@dataclass(frozen=True)
class Schema:
    """Column layout of a dataset file.

    ``treatments`` keeps file-independent attribute order; the outcome always
    comes last in value vectors.
    """

    id_column: str
    outcome: str
    treatments: tuple[str, ...]
    name_column: str | None = None

    def __post_init__(self):
        treatments = tuple(self.treatments)
        object.__setattr__(self, "treatments", treatments)
        if not treatments:
            raise ValueError("schema needs at least one treatment attribute")
        if self.outcome in treatments:
            raise ValueError(f"outcome {self.outcome!r} cannot also be a treatment")
        names = [self.id_column, self.outcome, *treatments]
        if self.name_column is not None:
            names.append(self.name_column)
        if len(set(names)) != len(names):
            raise ValueError("schema column names must be distinct")
        if len(self.attributes) > ATTRIBUTE_ENVELOPE:
            warnings.warn(
                f"{len(self.attributes)} attributes exceed the supported "
                f"envelope of {ATTRIBUTE_ENVELOPE}; exact explanations may be slow",
                RuntimeWarning,
                stacklevel=2,
            )

    @property
    def attributes(self) -> tuple[str, ...]:
        """All value columns in vector order: treatments then outcome."""
        return self.treatments + (self.outcome,)

    @property
    def outcome_index(self) -> int:
        return len(self.treatments)

    def attribute_index(self, name: str) -> int:
        return self.attributes.index(name)

    def to_json_dict(self) -> dict:
        return {
            "id_column": self.id_column,
            "name_column": self.name_column,
            "outcome": self.outcome,
            "treatments": list(self.treatments),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Schema":
        return cls(
            id_column=obj["id_column"],
            name_column=obj.get("name_column"),
            outcome=obj["outcome"],
            treatments=tuple(obj["treatments"]),
        )


def load_schema(path: str | Path) -> Schema:
    """Read a schema JSON file ({"id_column", "name_column", "outcome", "treatments"})."""
    with open(path, "r", encoding="utf-8") as fh:
        return Schema.from_json_dict(json.load(fh))


@dataclass(frozen=True)
class Unit:
    """One geographic unit: opaque id, display name, dense attribute vector."""

    id: str
    name: str
    values: np.ndarray  # treatments then outcome, float64

    @property
    def outcome(self) -> float:
        return float(self.values[-1])


@dataclass(frozen=True)
class Stats:
    """Per-attribute mean and population standard deviation."""

    mean: np.ndarray
    sd: np.ndarray


@dataclass(frozen=True)
class Dataset:
    schema: Schema
    units: tuple[Unit, ...]
    stats: Stats
    index_of: dict[str, int] = field(repr=False, default_factory=dict)

    def __len__(self) -> int:
        return len(self.units)

    def unit(self, unit_id: str) -> Unit:
        try:
            return self.units[self.index_of[unit_id]]
        except KeyError:
            from .errors import UnknownUnit

            raise UnknownUnit(unit_id) from None

    def has_unit(self, unit_id: str) -> bool:
        return unit_id in self.index_of

    @property
    def values(self) -> np.ndarray:
        """(n_units, n_attributes) matrix in unit order. Cached on first use."""
        cached = getattr(self, "_values", None)
        if cached is None:
            cached = np.stack([u.values for u in self.units])
            cached.setflags(write=False)
            object.__setattr__(self, "_values", cached)
        return cached

    @property
    def treatment_values(self) -> np.ndarray:
        return self.values[:, : self.schema.outcome_index]

    @property
    def outcomes(self) -> np.ndarray:
        return self.values[:, self.schema.outcome_index]


def _open_text(csv_source: bytes | BinaryIO | str | Path) -> io.TextIOBase:
    if isinstance(csv_source, bytes):
        return io.TextIOWrapper(io.BytesIO(csv_source), encoding="utf-8", newline="")
    if isinstance(csv_source, (str, Path)):
        return open(csv_source, "r", encoding="utf-8", newline="")
    return io.TextIOWrapper(csv_source, encoding="utf-8", newline="")


def load_dataset(csv_source: bytes | BinaryIO | str | Path, schema: Schema) -> Dataset:
    """Parse a CSV byte stream (or path) into an immutable :class:`Dataset`.

    Rows are kept in file order. A row with a missing or unparseable attribute
    cell is rejected by raising :class:`ParseError` naming the 1-based file
    line and the offending column; values are never imputed.

    Raises:
        MissingColumn: a schema column is absent from the header.
        ParseError: an attribute or id cell is missing or not a real number.
        DuplicateId: two rows share an id.
        EmptyDataset: the file has no data rows.
    """
    text = _open_text(csv_source)
    try:
        reader = csv.reader(text)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDataset("CSV has no header row") from None
        header = [h.strip() for h in header]
        col_index: dict[str, int] = {}
        for name in dict.fromkeys(header):
            col_index[name] = header.index(name)

        needed = [schema.id_column, *schema.attributes]
        if schema.name_column is not None:
            needed.append(schema.name_column)
        for name in needed:
            if name not in col_index:
                raise MissingColumn(name)

        id_at = col_index[schema.id_column]
        name_at = col_index[schema.name_column] if schema.name_column else None
        attr_at = [col_index[a] for a in schema.attributes]

        units: list[Unit] = []
        seen: dict[str, int] = {}
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if id_at >= len(row) or not row[id_at].strip():
                raise ParseError(line_no, schema.id_column, "missing unit id")
            unit_id = row[id_at].strip()
            if unit_id in seen:
                raise DuplicateId(unit_id)
            seen[unit_id] = line_no

            values = np.empty(len(attr_at), dtype=np.float64)
            for k, (attr, at) in enumerate(zip(schema.attributes, attr_at)):
                cell = row[at].strip() if at < len(row) else ""
                if not cell:
                    raise ParseError(line_no, attr, "missing value")
                try:
                    values[k] = float(cell)
                except ValueError:
                    raise ParseError(line_no, attr) from None
                if not np.isfinite(values[k]):
                    raise ParseError(line_no, attr, "value is not finite")
            values.setflags(write=False)

            name = row[name_at].strip() if name_at is not None else unit_id
            units.append(Unit(id=unit_id, name=name, values=values))
    finally:
        text.close()

    if not units:
        raise EmptyDataset()

    matrix = np.stack([u.values for u in units])
    stats = Stats(mean=matrix.mean(axis=0), sd=matrix.std(axis=0))
    stats.mean.setflags(write=False)
    stats.sd.setflags(write=False)
    return Dataset(
        schema=schema,
        units=tuple(units),
        stats=stats,
        index_of={u.id: i for i, u in enumerate(units)},
    )


def standardize(v: np.ndarray, stats: Stats) -> np.ndarray:
    """Map each coordinate to (x - mean) / sd; constant attributes (sd = 0) map to 0."""
    v = np.asarray(v, dtype=np.float64)
    sd = stats.sd[: v.shape[-1]] if v.shape[-1] != stats.sd.shape[0] else stats.sd
    mean = stats.mean[: v.shape[-1]] if v.shape[-1] != stats.mean.shape[0] else stats.mean
    out = np.zeros_like(v, dtype=np.float64)
    np.divide(v - mean, sd, out=out, where=sd > 0)
    return out


def destandardize(z: np.ndarray, stats: Stats) -> np.ndarray:
    """Inverse of :func:`standardize` for attributes with sd > 0."""
    z = np.asarray(z, dtype=np.float64)
    sd = stats.sd[: z.shape[-1]] if z.shape[-1] != stats.sd.shape[0] else stats.sd
    mean = stats.mean[: z.shape[-1]] if z.shape[-1] != stats.mean.shape[0] else stats.mean
    return z * sd + mean


def outcome_extent(
    dataset: Dataset, midpoint: float | None = None
) -> tuple[float, float, float]:
    """(min, max, midpoint) over observed outcomes.

    The midpoint anchors the neutral color of the diverging map scale; it
    defaults to the outcome median and can be pinned in config (0 for signed
    outcomes such as vote differences).
    """
    if len(dataset) == 0:
        raise EmptyDataset()
    outcomes = dataset.outcomes
    if midpoint is None:
        midpoint = float(np.median(outcomes))
    return float(outcomes.min()), float(outcomes.max()), float(midpoint)
