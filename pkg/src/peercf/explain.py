"""Model explanations: exact Shapley attributions and LIME local surrogates.

Shapley values are computed exactly by enumerating all 2^d feature subsets
(the attribute envelope tops out at 15, so enumeration stays tractable) with
interventional marginalization: the value of a subset replaces the remaining
features with background rows and averages the model output. LIME fits a
weighted least-squares surrogate on Gaussian perturbations around the unit
and reports a variability interval over the perturbed predictions.

Models are batch callables: ``model(X)`` takes an (m, d) array of treatment
vectors in raw units and returns an (m,) array of outcome predictions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np

from . import kernels
from .errors import BadRequest, EmptyBackground, TooManyFeatures

MAX_EXACT_FEATURES = 15
_COMPOSITE_ROWS_PER_CHUNK = 1 << 16


@lru_cache(maxsize=8)
def _subset_tables(d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(bool masks (2^d, d), popcount (2^d,), Shapley weights (d,)) for d features."""
    mask_bits = np.arange(1 << d, dtype=np.int64)
    bool_masks = ((mask_bits[:, None] >> np.arange(d, dtype=np.int64)) & 1).astype(bool)
    popcount = bool_masks.sum(axis=1).astype(np.int64)
    weights = np.array(
        [factorial(s) * factorial(d - s - 1) / factorial(d) for s in range(d)]
    )
    for arr in (bool_masks, popcount, weights):
        arr.setflags(write=False)
    return bool_masks, popcount, weights


@dataclass(frozen=True)
class ShapExplanation:
    feature_names: tuple[str, ...]
    feature_values: np.ndarray  # the explained unit's raw values
    baseline: float  # mean model output over the background set
    attributions: np.ndarray
    prediction: float


def shap_exact(
    model,
    x: np.ndarray,
    background: np.ndarray,
    feature_names: tuple[str, ...] | None = None,
) -> ShapExplanation:
    """Exact Shapley attribution of model(x) against a background set.

    For feature i, phi_i sums w(|S|) * (v(S + i) - v(S)) over all subsets S
    not containing i, with w(s) = s!(d-s-1)!/d! and v(S) the mean model output
    over background rows with the features in S taken from ``x``.
    """
    x = np.asarray(x, dtype=np.float64)
    background = np.atleast_2d(np.asarray(background, dtype=np.float64))
    d = x.shape[0]
    if d > MAX_EXACT_FEATURES:
        raise TooManyFeatures(d, MAX_EXACT_FEATURES)
    if background.size == 0:
        raise EmptyBackground()
    if background.shape[1] != d:
        raise ValueError("background width does not match the unit vector")
    if feature_names is None:
        feature_names = tuple(f"f{i}" for i in range(d))

    bool_masks, popcount, weights = _subset_tables(d)
    n_masks = bool_masks.shape[0]
    n_bg = background.shape[0]

    v = np.empty(n_masks, dtype=np.float64)
    masks_per_chunk = max(1, _COMPOSITE_ROWS_PER_CHUNK // n_bg)
    for start in range(0, n_masks, masks_per_chunk):
        stop = min(start + masks_per_chunk, n_masks)
        composites = kernels.fill_composites(bool_masks[start:stop], x, background)
        preds = np.asarray(model(composites), dtype=np.float64)
        v[start:stop] = preds.reshape(stop - start, n_bg).mean(axis=1)

    phi = kernels.shapley_accumulate(v, weights, popcount, d)
    prediction = float(np.asarray(model(x[None, :]), dtype=np.float64)[0])
    values = x.copy()
    values.setflags(write=False)
    phi.setflags(write=False)
    return ShapExplanation(
        feature_names=tuple(feature_names),
        feature_values=values,
        baseline=float(v[0]),
        attributions=phi,
        prediction=prediction,
    )


def waterfall_data(explanation: ShapExplanation) -> list[tuple[str, float, float]]:
    """Cumulative (feature, start, end) steps from baseline to prediction.

    Features are ordered by attribution magnitude, largest first, name
    breaking ties; the last step ends at the prediction up to rounding.
    """
    order = sorted(
        range(len(explanation.feature_names)),
        key=lambda i: (-abs(explanation.attributions[i]), explanation.feature_names[i]),
    )
    steps: list[tuple[str, float, float]] = []
    level = explanation.baseline
    for i in order:
        end = level + float(explanation.attributions[i])
        steps.append((explanation.feature_names[i], level, end))
        level = end
    return steps


@dataclass(frozen=True)
class GlobalShap:
    feature_names: tuple[str, ...]
    unit_ids: tuple[str, ...]
    matrix: np.ndarray  # (units, features) attributions, schema feature order
    feature_values: np.ndarray  # raw values for low-to-high color mapping
    feature_order: tuple[str, ...]  # by mean |attribution| descending


def shap_global(
    model,
    units: np.ndarray,
    background: np.ndarray,
    feature_names: tuple[str, ...],
    unit_ids: tuple[str, ...],
) -> GlobalShap:
    """Per-unit exact Shapley attributions for every row of ``units``.

    Row order follows the input regardless of any evaluation order, and the
    feature ranking uses the mean absolute attribution, ties by name.
    """
    units = np.atleast_2d(np.asarray(units, dtype=np.float64))
    rows = [
        shap_exact(model, units[i], background, feature_names).attributions
        for i in range(units.shape[0])
    ]
    matrix = np.stack(rows) if rows else np.empty((0, len(feature_names)))
    mean_abs = np.abs(matrix).mean(axis=0) if len(rows) else np.zeros(len(feature_names))
    order = sorted(
        range(len(feature_names)), key=lambda i: (-mean_abs[i], feature_names[i])
    )
    values = units.copy()
    matrix.setflags(write=False)
    values.setflags(write=False)
    return GlobalShap(
        feature_names=tuple(feature_names),
        unit_ids=tuple(unit_ids),
        matrix=matrix,
        feature_values=values,
        feature_order=tuple(feature_names[i] for i in order),
    )


@dataclass(frozen=True)
class LimeConfig:
    n_samples: int = 1000
    kernel_width: float | None = None  # None resolves to 0.75 * sqrt(d)
    seed: int = 42

    def resolve_width(self, d: int) -> float:
        if self.kernel_width is None:
            return 0.75 * float(np.sqrt(d))
        return float(self.kernel_width)


@dataclass(frozen=True)
class LimeExplanation:
    feature_names: tuple[str, ...]
    unit_values: np.ndarray
    background_means: np.ndarray  # subgroup means used for bar contributions
    prediction: float
    interval: tuple[float, float]
    coefficients: np.ndarray
    intercept: float
    n_samples: int
    kernel_width: float
    seed: int
    degenerate: bool
    r_squared: float


def _weighted_percentiles(
    values: np.ndarray, weights: np.ndarray, qs: tuple[float, float]
) -> tuple[float, float]:
    order = np.argsort(values, kind="stable")
    v = values[order]
    w = weights[order]
    total = w.sum()
    if total <= 0:
        w = np.ones_like(w)
        total = w.sum()
    positions = (np.cumsum(w) - 0.5 * w) / total
    lo, hi = (float(np.interp(q, positions, v)) for q in qs)
    return lo, hi


def lime_explain(
    model,
    x: np.ndarray,
    sds: np.ndarray,
    background_means: np.ndarray,
    config: LimeConfig = LimeConfig(),
    feature_names: tuple[str, ...] | None = None,
) -> LimeExplanation:
    """Local linear surrogate around ``x`` with a perturbation-based interval.

    Perturbations are Gaussian around the unit with the dataset's per-attribute
    standard deviations; sample weights decay with squared standardized
    distance over the kernel width. The surrogate is a weighted least-squares
    fit in raw units; a rank-deficient design resolves to the minimum-norm
    solution and is flagged as degenerate. The interval spans the central 95%
    of the weighted perturbed predictions.
    """
    x = np.asarray(x, dtype=np.float64)
    sds = np.asarray(sds, dtype=np.float64)
    background_means = np.asarray(background_means, dtype=np.float64)
    d = x.shape[0]
    if feature_names is None:
        feature_names = tuple(f"f{i}" for i in range(d))
    if config.n_samples < d + 2:
        raise BadRequest(
            "bad_n_samples", f"n_samples must be at least {d + 2} for {d} features"
        )
    width = config.resolve_width(d)
    if width <= 0:
        raise BadRequest("bad_kernel_width", "kernel_width must be positive")

    rng = np.random.default_rng(config.seed)
    z = rng.normal(loc=x, scale=sds, size=(config.n_samples, d))
    preds = np.asarray(model(z), dtype=np.float64)

    scaled = np.zeros_like(z)
    np.divide(z - x, sds, out=scaled, where=sds > 0)
    weights = np.exp(-np.einsum("ij,ij->i", scaled, scaled) / width**2)

    sw = np.sqrt(weights)
    design = np.column_stack([z, np.ones(config.n_samples)]) * sw[:, None]
    target = preds * sw
    beta, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    degenerate = bool(rank < d + 1)
    coefficients = beta[:-1].copy()
    coefficients.setflags(write=False)

    fitted = np.column_stack([z, np.ones(config.n_samples)]) @ beta
    w_total = weights.sum()
    if w_total > 0:
        w_mean = float(np.dot(weights, preds) / w_total)
        ss_res = float(np.dot(weights, (preds - fitted) ** 2))
        ss_tot = float(np.dot(weights, (preds - w_mean) ** 2))
    else:
        ss_res, ss_tot = 0.0, 0.0
    r_squared = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot

    prediction = float(np.asarray(model(x[None, :]), dtype=np.float64)[0])
    interval = _weighted_percentiles(preds, weights, (0.025, 0.975))
    unit_values = x.copy()
    unit_values.setflags(write=False)
    return LimeExplanation(
        feature_names=tuple(feature_names),
        unit_values=unit_values,
        background_means=background_means,
        prediction=prediction,
        interval=interval,
        coefficients=coefficients,
        intercept=float(beta[-1]),
        n_samples=config.n_samples,
        kernel_width=width,
        seed=config.seed,
        degenerate=degenerate,
        r_squared=float(r_squared),
    )


def lime_bar_data(explanation: LimeExplanation) -> list[tuple[str, float, str]]:
    """Signed display contributions: coefficient times deviation from the subgroup mean.

    Entries are sorted by magnitude, largest first (ties by name); exact-zero
    contributions are dropped from the display.
    """
    deviations = explanation.unit_values - explanation.background_means
    contributions = explanation.coefficients * deviations
    entries = [
        (name, float(c), "positive" if c > 0 else "negative")
        for name, c in zip(explanation.feature_names, contributions)
        if c != 0.0
    ]
    entries.sort(key=lambda e: (-abs(e[1]), e[0]))
    return entries
