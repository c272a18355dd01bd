"""Causal DAG, localized linear SCM, and interventional counterfactuals.

The structural model is linear-Gaussian: each node is an ordinary
least-squares function of its graph parents, fitted on the current peer
subgroup in raw attribute units. Counterfactuals follow the three-step
recipe: recover each node's exogenous residual from the observed record,
pin the intervened attribute (severing its incoming edges), then re-evaluate
descendants in topological order with the recovered residuals. Attributes
that are not downstream of the intervention keep their observed values
exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import Schema, Unit
from .errors import (
    BadRequest,
    CycleDetected,
    InsufficientData,
    NotATreatment,
    OutcomeHasChildren,
    UnfittedModel,
    UnknownNode,
)


@dataclass(frozen=True)
class CausalGraph:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    outcome: str
    topo_order: tuple[str, ...]
    parents: dict[str, tuple[str, ...]] = field(repr=False)
    children: dict[str, tuple[str, ...]] = field(repr=False)


def validate_graph(
    nodes: list[str] | tuple[str, ...],
    edges: list[tuple[str, str]],
    outcome: str,
) -> CausalGraph:
    """Check acyclicity and the outcome-sink rule, and fix a topological order.

    The order is deterministic: among ready nodes, ties are broken by name.

    Raises:
        UnknownNode: an edge endpoint (or the outcome) is not in ``nodes``.
        OutcomeHasChildren: the outcome has an outgoing edge.
        CycleDetected: the graph has a directed cycle (one cycle is listed).
    """
    if not nodes:
        raise ValueError("node list is empty")
    node_set = set(nodes)
    if len(node_set) != len(nodes):
        raise ValueError("node names must be distinct")
    if outcome not in node_set:
        raise UnknownNode(outcome)

    seen_edges: set[tuple[str, str]] = set()
    clean_edges: list[tuple[str, str]] = []
    for parent, child in edges:
        if parent not in node_set:
            raise UnknownNode(parent)
        if child not in node_set:
            raise UnknownNode(child)
        if parent == outcome:
            raise OutcomeHasChildren(outcome, child)
        if (parent, child) in seen_edges:
            continue
        seen_edges.add((parent, child))
        clean_edges.append((parent, child))

    parents: dict[str, list[str]] = {n: [] for n in nodes}
    children: dict[str, list[str]] = {n: [] for n in nodes}
    for parent, child in clean_edges:
        parents[child].append(parent)
        children[parent].append(child)

    # Kahn's algorithm, pulling the lexicographically smallest ready node.
    indegree = {n: len(parents[n]) for n in nodes}
    ready = sorted(n for n in nodes if indegree[n] == 0)
    order: list[str] = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        inserted = False
        for child in sorted(children[node]):
            indegree[child] -= 1
            if indegree[child] == 0:
                ready.append(child)
                inserted = True
        if inserted:
            ready.sort()
    if len(order) != len(nodes):
        raise CycleDetected(_find_cycle(nodes, parents, set(order)))

    return CausalGraph(
        nodes=tuple(nodes),
        edges=tuple(clean_edges),
        outcome=outcome,
        topo_order=tuple(order),
        parents={n: tuple(sorted(parents[n])) for n in nodes},
        children={n: tuple(sorted(children[n])) for n in nodes},
    )


def _find_cycle(nodes, parents, acyclic: set[str]) -> list[str]:
    """Walk parent links among nodes left over by Kahn's algorithm until one repeats."""
    start = sorted(n for n in nodes if n not in acyclic)[0]
    seen: list[str] = []
    node = start
    while node not in seen:
        seen.append(node)
        node = sorted(p for p in parents[node] if p not in acyclic)[0]
    # The walk followed parent links; reverse to list the cycle edge-wise.
    return list(reversed(seen[seen.index(node):]))


def load_graph(path: str | Path, *, outcome: str | None = None) -> CausalGraph:
    """Read a graph JSON file: {"nodes": [...], "edges": [[parent, child], ...], "outcome": str}."""
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    out = obj.get("outcome") if outcome is None else outcome
    if out is None:
        raise ValueError("graph file lacks an 'outcome' field")
    return validate_graph(list(obj["nodes"]), [tuple(e) for e in obj["edges"]], out)


def check_graph_matches_schema(graph: CausalGraph, schema: Schema) -> None:
    """Graph nodes must be exactly the schema attributes, outcome included."""
    attrs = set(schema.attributes)
    for node in graph.nodes:
        if node not in attrs:
            raise UnknownNode(node)
    for attr in schema.attributes:
        if attr not in graph.nodes:
            raise UnknownNode(attr)
    if graph.outcome != schema.outcome:
        raise UnknownNode(graph.outcome)


def descendants(graph: CausalGraph, attribute: str) -> set[str]:
    """All nodes reachable from ``attribute`` via directed edges, excluding itself."""
    if attribute not in graph.parents:
        raise UnknownNode(attribute)
    reached: set[str] = set()
    frontier = [attribute]
    while frontier:
        node = frontier.pop()
        for child in graph.children[node]:
            if child not in reached:
                reached.add(child)
                frontier.append(child)
    reached.discard(attribute)
    return reached


@dataclass(frozen=True)
class Equation:
    """node = coefficients . parents + intercept + residual"""

    parents: tuple[str, ...]
    coefficients: np.ndarray
    intercept: float
    residual_sd: float


@dataclass(frozen=True)
class FittedSCM:
    graph: CausalGraph
    schema: Schema
    equations: dict[str, Equation]
    fit_population: tuple[str, ...]
    fit_min: np.ndarray  # per-attribute min over the fit population, schema order
    fit_max: np.ndarray

    def equation(self, node: str) -> Equation:
        eq = self.equations.get(node)
        if eq is None:
            raise UnfittedModel(f"no fitted equation for node {node!r}")
        return eq


def fit_scm(graph: CausalGraph, schema: Schema, units: list[Unit]) -> FittedSCM:
    """Fit one OLS equation per node over the given subgroup members.

    Root nodes get an empty coefficient list with intercept equal to the
    subgroup mean. Residual standard deviations use the population convention
    (sqrt of the mean squared residual), matching the dataset statistics.
    Rank-deficient designs resolve to the minimum-norm solution, so the fit is
    always defined and deterministic.
    """
    if not units:
        raise InsufficientData("(all)", 2, 0)
    rows = np.stack([u.values for u in units])
    n = rows.shape[0]

    largest = max(
        graph.nodes, key=lambda node: (len(graph.parents[node]), node)
    )
    needed = len(graph.parents[largest]) + 2
    if n < needed:
        raise InsufficientData(largest, needed, n)

    idx = {a: i for i, a in enumerate(schema.attributes)}
    equations: dict[str, Equation] = {}
    for node in graph.topo_order:
        y = rows[:, idx[node]]
        parents = graph.parents[node]
        if not parents:
            coefs = np.empty(0, dtype=np.float64)
            intercept = float(y.mean())
            residual_sd = float(y.std())
        else:
            design = np.column_stack(
                [rows[:, idx[p]] for p in parents] + [np.ones(n)]
            )
            beta, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
            coefs = beta[:-1].copy()
            intercept = float(beta[-1])
            residuals = y - design @ beta
            residual_sd = float(np.sqrt(np.mean(residuals**2)))
        coefs.setflags(write=False)
        equations[node] = Equation(
            parents=parents,
            coefficients=coefs,
            intercept=intercept,
            residual_sd=residual_sd,
        )

    fit_min = rows.min(axis=0)
    fit_max = rows.max(axis=0)
    fit_min.setflags(write=False)
    fit_max.setflags(write=False)
    return FittedSCM(
        graph=graph,
        schema=schema,
        equations=equations,
        fit_population=tuple(u.id for u in units),
        fit_min=fit_min,
        fit_max=fit_max,
    )


def _evaluate(eq: Equation, values: np.ndarray, idx: dict[str, int]) -> float:
    total = eq.intercept
    for parent, coef in zip(eq.parents, eq.coefficients):
        total += coef * values[idx[parent]]
    return total


def predict_outcome(scm: FittedSCM, values: np.ndarray) -> float:
    """Evaluate the outcome equation at the supplied treatment values.

    ``values`` covers every treatment in schema order; treatments that are not
    parents of the outcome are ignored by the equation.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.shape[0] < len(scm.schema.treatments):
        raise ValueError(
            f"expected {len(scm.schema.treatments)} treatment values, got {values.shape[0]}"
        )
    idx = {a: i for i, a in enumerate(scm.schema.attributes)}
    return float(_evaluate(scm.equation(scm.graph.outcome), values, idx))


@dataclass(frozen=True)
class CounterfactualResult:
    unit_id: str
    intervened_attribute: str
    intervention_value: float
    factual: np.ndarray
    counterfactual: np.ndarray
    changed: frozenset[str]


def intervene(
    scm: FittedSCM, unit: Unit, attribute: str, value: float
) -> CounterfactualResult:
    """Three-step counterfactual under do(attribute := value).

    Abduction recovers each node's residual from the unit's observed record;
    action pins the attribute; prediction re-evaluates descendants in
    topological order. Nodes whose parents are all unchanged keep their
    observed values bit-for-bit, so intervening at the observed value returns
    the factual record exactly and ``changed`` stays within the intervened
    attribute and its descendants by construction.
    """
    schema = scm.schema
    if attribute not in schema.treatments:
        raise NotATreatment(attribute)
    value = float(value)
    if not np.isfinite(value):
        raise BadRequest("bad_value", "intervention value must be finite")

    idx = {a: i for i, a in enumerate(schema.attributes)}
    observed = np.asarray(unit.values, dtype=np.float64)

    residuals: dict[str, float] = {}
    for node in scm.graph.topo_order:
        residuals[node] = observed[idx[node]] - _evaluate(
            scm.equation(node), observed, idx
        )

    affected = descendants(scm.graph, attribute)
    counterfactual = observed.copy()
    counterfactual[idx[attribute]] = value
    for node in scm.graph.topo_order:
        if node == attribute or node not in affected:
            continue
        eq = scm.equation(node)
        if all(counterfactual[idx[p]] == observed[idx[p]] for p in eq.parents):
            continue  # parents untouched: keep the observed value exactly
        counterfactual[idx[node]] = _evaluate(eq, counterfactual, idx) + residuals[node]

    changed = frozenset(
        a for a in schema.attributes if counterfactual[idx[a]] != observed[idx[a]]
    )
    factual = observed.copy()
    factual.setflags(write=False)
    counterfactual.setflags(write=False)
    return CounterfactualResult(
        unit_id=unit.id,
        intervened_attribute=attribute,
        intervention_value=value,
        factual=factual,
        counterfactual=counterfactual,
        changed=changed,
    )


@dataclass(frozen=True)
class Recommendation:
    attribute: str
    value: float
    predicted_outcome: float
    distance: float


def recommend_interventions(
    scm: FittedSCM, unit: Unit, target: float, grid_size: int
) -> list[Recommendation]:
    """Best single-attribute intervention per treatment, ranked by |outcome - target|.

    Each treatment is scanned over ``grid_size`` evenly spaced values across
    the subgroup's observed range of that attribute, plus the unit's own
    observed value (so keeping the status quo is always on the menu). Within
    an attribute, ties go to the smaller value; across attributes, ties break
    by name.
    """
    if grid_size < 2:
        raise BadRequest("bad_grid_size", "grid_size must be at least 2")
    if not np.isfinite(target):
        raise BadRequest("bad_target", "target must be finite")

    idx = {a: i for i, a in enumerate(scm.schema.attributes)}
    outcome_at = idx[scm.graph.outcome]
    results: list[Recommendation] = []
    for attribute in scm.schema.treatments:
        at = idx[attribute]
        lo, hi = scm.fit_min[at], scm.fit_max[at]
        candidates = np.append(np.linspace(lo, hi, grid_size), unit.values[at])
        candidates = np.unique(candidates)  # sorted ascending, deduplicated
        best: tuple[float, float, float] | None = None  # (distance, value, outcome)
        for value in candidates:
            cf = intervene(scm, unit, attribute, float(value))
            outcome = float(cf.counterfactual[outcome_at])
            distance = abs(outcome - target)
            if best is None or distance < best[0]:
                best = (distance, float(value), outcome)
        assert best is not None
        results.append(
            Recommendation(
                attribute=attribute,
                value=best[1],
                predicted_outcome=best[2],
                distance=best[0],
            )
        )
    results.sort(key=lambda r: (r.distance, r.attribute))
    return results


class LinearOutcomeModel:
    """Batch predictor for the fitted outcome equation over treatment vectors.

    Exposes the dense weight vector (zeros for treatments the equation does
    not read) so explanation tests can check closed forms.
    """

    def __init__(self, scm: FittedSCM):
        schema = scm.schema
        eq = scm.equation(scm.graph.outcome)
        weights = np.zeros(len(schema.treatments), dtype=np.float64)
        t_index = {t: i for i, t in enumerate(schema.treatments)}
        for parent, coef in zip(eq.parents, eq.coefficients):
            weights[t_index[parent]] = coef
        self.weights = weights
        self.intercept = eq.intercept
        self.feature_names = tuple(schema.treatments)

    def __call__(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            return np.asarray(X @ self.weights + self.intercept)
        return X @ self.weights + self.intercept


def outcome_model(scm: FittedSCM) -> LinearOutcomeModel:
    return LinearOutcomeModel(scm)
