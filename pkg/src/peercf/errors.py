"""Error types shared across the engine, service, and CLI.

Every error carries a stable machine-readable ``code`` (snake_case) that the
HTTP layer serializes as ``{"code": ..., "message": ...}`` and the CLI uses
in its validation report.
"""

from __future__ import annotations


class PeercfError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


# --- dataset ---------------------------------------------------------------

class MissingColumn(PeercfError):
    code = "missing_column"

    def __init__(self, name: str):
        super().__init__(f"required column {name!r} not found in CSV header")
        self.name = name


class ParseError(PeercfError):
    code = "parse_error"

    def __init__(self, row: int, column: str, detail: str = "not a real number"):
        super().__init__(f"row {row}, column {column!r}: {detail}")
        self.row = row
        self.column = column


class DuplicateId(PeercfError):
    code = "duplicate_id"

    def __init__(self, unit_id: str):
        super().__init__(f"duplicate unit id {unit_id!r}")
        self.unit_id = unit_id


class EmptyDataset(PeercfError):
    code = "empty_dataset"

    def __init__(self, message: str = "dataset contains no rows"):
        super().__init__(message)


# --- causal graph / SCM ------------------------------------------------------

class CycleDetected(PeercfError):
    code = "cycle_detected"

    def __init__(self, cycle: list[str]):
        super().__init__("graph contains a cycle: " + " -> ".join(cycle + cycle[:1]))
        self.cycle = cycle


class UnknownNode(PeercfError):
    code = "unknown_node"

    def __init__(self, name: str):
        super().__init__(f"unknown node {name!r}")
        self.name = name


class OutcomeHasChildren(PeercfError):
    code = "outcome_has_children"

    def __init__(self, outcome: str, child: str):
        super().__init__(f"outcome node {outcome!r} has outgoing edge to {child!r}")
        self.outcome = outcome
        self.child = child


class InsufficientData(PeercfError):
    code = "insufficient_data"

    def __init__(self, node: str, needed: int, got: int):
        super().__init__(
            f"node {node!r} needs at least {needed} rows for a least-squares fit, got {got}"
        )
        self.node = node
        self.needed = needed
        self.got = got


class NotATreatment(PeercfError):
    code = "not_a_treatment"

    def __init__(self, attribute: str):
        super().__init__(f"{attribute!r} is not a treatment attribute")
        self.attribute = attribute


class UnfittedModel(PeercfError):
    code = "unfitted_model"

    def __init__(self, message: str = "model has no fitted equations"):
        super().__init__(message)


# --- subgroup index ----------------------------------------------------------

class UnknownUnit(PeercfError):
    code = "unknown_unit"

    def __init__(self, unit_id: str):
        super().__init__(f"unknown unit id {unit_id!r}")
        self.unit_id = unit_id


class EmptyMemberList(PeercfError):
    code = "empty_member_list"

    def __init__(self, message: str = "subgroup has no members"):
        super().__init__(message)


# --- explainers --------------------------------------------------------------

class TooManyFeatures(PeercfError):
    code = "too_many_features"

    def __init__(self, count: int, limit: int = 15):
        super().__init__(
            f"{count} features exceed the exact-enumeration limit of {limit}"
        )
        self.count = count
        self.limit = limit


class EmptyBackground(PeercfError):
    code = "empty_background"

    def __init__(self, message: str = "background set is empty"):
        super().__init__(message)


# --- service -----------------------------------------------------------------

class NoGeometry(PeercfError):
    code = "no_geometry"

    def __init__(self, message: str = "no boundary file configured"):
        super().__init__(message)


class BadRequest(PeercfError):
    """Parameter outside its accepted range (bad n, bad k, bad grid size)."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
