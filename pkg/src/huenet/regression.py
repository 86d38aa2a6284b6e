"""Stepwise linear regression with forward entry and backward removal.

Predictors enter one at a time by smallest t-test p-value below the
entry threshold and leave when their p-value in the current model rises
above the removal threshold.  The least-squares core uses a pivoted QR
decomposition so rank deficiency is detected and reported by predictor
name rather than silently producing unstable coefficients.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, stats

TARGET_COLUMN = "hue_rad"

# Relative diagonal-of-R cutoff below which a design column is treated
# as linearly dependent on the columns pivoted ahead of it.
_RANK_RTOL = 1e-10


class SingularFitError(ValueError):
    """Raised when the requested design matrix is rank deficient."""


@dataclass(frozen=True)
class Dataset:
    """Regression problem: an n-by-k predictor matrix and an n-target."""

    predictors: np.ndarray
    target: np.ndarray
    names: tuple[str, ...] = ()

    def __post_init__(self):
        x = np.asarray(self.predictors, dtype=float)
        y = np.asarray(self.target, dtype=float)
        if x.ndim != 2:
            raise ValueError(f"predictors must be 2-D, got shape {x.shape}")
        if y.ndim != 1 or y.shape[0] != x.shape[0]:
            raise ValueError("target must be a vector with one entry per row")
        n, k = x.shape
        if not (n > k >= 1):
            raise ValueError(f"need more rows than predictors, got {n}x{k}")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise ValueError("dataset contains non-finite values")
        names = tuple(self.names) or tuple(f"x{i}" for i in range(k))
        if len(names) != k:
            raise ValueError(f"expected {k} predictor names, got {len(names)}")
        object.__setattr__(self, "predictors", x)
        object.__setattr__(self, "target", y)
        object.__setattr__(self, "names", names)

    @property
    def n_predictors(self) -> int:
        return self.predictors.shape[1]


@dataclass(frozen=True)
class OlsFit:
    """Least-squares solution over one predictor subset."""

    subset: tuple[int, ...]
    coefficients: np.ndarray
    intercept: float
    residuals: np.ndarray
    p_values: np.ndarray
    residual_rms: float


@dataclass(frozen=True)
class StepwiseModel:
    """Result of a stepwise fit, sufficient to predict new responses."""

    selected: tuple[int, ...]
    coefficients: np.ndarray
    intercept: float
    residual_rms: float
    p_values: np.ndarray
    n_predictors: int
    names: tuple[str, ...] = ()
    trace: tuple = field(default=())

    def predict(self, responses) -> float:
        """Evaluate the fitted model on one full response vector."""
        r = np.asarray(responses, dtype=float)
        if r.shape != (self.n_predictors,):
            raise ValueError(
                f"expected {self.n_predictors} responses, got shape {r.shape}"
            )
        if not self.selected:
            return float(self.intercept)
        return float(self.intercept + self.coefficients @ r[list(self.selected)])


def _design_matrix(dataset: Dataset, subset, intercept: bool):
    cols = [dataset.predictors[:, j] for j in subset]
    if intercept:
        cols.insert(0, np.ones(dataset.predictors.shape[0]))
    return np.column_stack(cols)


def _check_rank(x: np.ndarray, dataset: Dataset, subset, intercept: bool):
    # Pivoted QR exposes dependent columns: any diagonal of R that
    # collapses relative to the largest names a redundant column.
    _, r, piv = linalg.qr(x, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0.0:
        raise SingularFitError("design matrix is entirely zero")
    bad = piv[np.nonzero(diag < _RANK_RTOL * diag[0])[0]]
    rank_short = min(x.shape) - int(np.count_nonzero(diag >= _RANK_RTOL * diag[0]))
    if rank_short > 0:
        offset = 1 if intercept else 0
        culprits = sorted(
            dataset.names[subset[c - offset]] for c in bad if c >= offset
        )
        if not culprits:
            culprits = ["intercept"]
        raise SingularFitError(
            "collinear predictors: " + ", ".join(culprits)
        )


def fit_ols(dataset: Dataset, subset, intercept: bool = True) -> OlsFit:
    """Ordinary least squares of the target on a predictor subset.

    p-values are two-sided t-tests on each coefficient.  When the fit is
    exact (zero residual) a nonzero coefficient gets p = 0 and a zero
    coefficient gets p = nan, since the test statistic is undefined.
    """
    subset = tuple(int(j) for j in subset)
    if len(subset) == 0 and not intercept:
        raise ValueError("subset may not be empty when fitting without intercept")
    if len(set(subset)) != len(subset):
        raise ValueError(f"duplicate predictor indices in {subset}")
    for j in subset:
        if not 0 <= j < dataset.n_predictors:
            raise ValueError(f"predictor index {j} out of range")

    y = dataset.target
    n = y.shape[0]
    if not subset and intercept:
        mean = float(y.mean())
        resid = y - mean
        return OlsFit((), np.zeros(0), mean, resid,
                      np.zeros(0), float(np.sqrt(resid @ resid / n)))

    x = _design_matrix(dataset, subset, intercept)
    _check_rank(x, dataset, subset, intercept)

    q, r = linalg.qr(x, mode="economic")
    beta = linalg.solve_triangular(r, q.T @ y)
    resid = y - x @ beta
    dof = n - x.shape[1]
    rss = float(resid @ resid)
    sigma2 = rss / dof if dof > 0 else np.nan

    # An (almost) exact fit leaves no residual variance to test against:
    # coefficients that genuinely carry the target get p = 0, while
    # coefficients at roundoff scale have no defined significance (nan).
    y_scale = max(1.0, float(np.max(np.abs(y))) if n else 1.0)
    if dof <= 0 or np.sqrt(rss / n) <= 1e-12 * y_scale:
        atol = 1e-8 * max(1.0, float(np.max(np.abs(beta))))
        p_all = np.where(np.abs(beta) > atol, 0.0, np.nan)
    else:
        # var(beta) = sigma^2 (X'X)^-1 = sigma^2 R^-1 R^-T
        r_inv = linalg.solve_triangular(r, np.eye(r.shape[0]))
        se = np.sqrt(np.maximum(sigma2 * np.sum(r_inv * r_inv, axis=1), 0.0))
        t_stat = beta / se
        p_all = 2.0 * stats.t.sf(np.abs(t_stat), dof)

    skip = 1 if intercept else 0
    return OlsFit(
        subset=subset,
        coefficients=beta[skip:],
        intercept=float(beta[0]) if intercept else 0.0,
        residuals=resid,
        p_values=np.asarray(p_all[skip:], dtype=float),
        residual_rms=float(np.sqrt(rss / n)),
    )


def _entry_candidate(dataset, selected, excluded, intercept):
    """Best predictor to add: smallest p-value, ties to the lower index."""
    best_j, best_p = None, None
    for j in excluded:
        try:
            fit = fit_ols(dataset, selected + (j,), intercept=intercept)
        except SingularFitError:
            continue
        p = fit.p_values[-1]
        if np.isnan(p):
            continue
        if best_p is None or p < best_p:
            best_j, best_p = j, p
    return best_j, best_p


def stepwise_fit(
    dataset: Dataset,
    p_enter: float = 0.05,
    p_remove: float = 0.10,
    intercept: bool = True,
) -> StepwiseModel:
    """Forward-entry, backward-removal predictor selection.

    Starting from the intercept-only model, the excluded predictor with
    the smallest p-value enters while that p-value is below ``p_enter``;
    after each entry any included predictor whose p-value exceeds
    ``p_remove`` is dropped, worst first.  Ties break toward the lower
    predictor index.  The loop stops when neither step changes the
    selection, when a selection state repeats, or after the hard step
    cap of 2*k*(k+1).
    """
    if not 0 < p_enter <= p_remove:
        raise ValueError("need 0 < p_enter <= p_remove")
    k = dataset.n_predictors
    selected: tuple[int, ...] = ()
    trace: list[tuple[str, int, float]] = []
    seen = {selected}
    max_steps = 2 * k * (k + 1)

    for _ in range(max_steps):
        changed = False

        excluded = [j for j in range(k) if j not in selected]
        j, p = _entry_candidate(dataset, selected, excluded, intercept)
        if j is not None and p < p_enter:
            selected = tuple(sorted(selected + (j,)))
            trace.append(("add", j, float(p)))
            changed = True

        while selected:
            fit = fit_ols(dataset, selected, intercept=intercept)
            worst = None
            for pos, jj in enumerate(selected):
                pj = fit.p_values[pos]
                if np.isnan(pj):
                    continue
                if pj > p_remove and (worst is None or pj > fit.p_values[worst]):
                    worst = pos
            if worst is None:
                break
            jj = selected[worst]
            selected = tuple(v for v in selected if v != jj)
            trace.append(("remove", jj, float(fit.p_values[worst])))
            changed = True

        if not changed:
            break
        if selected in seen:
            break
        seen.add(selected)

    if selected:
        final = fit_ols(dataset, selected, intercept=intercept)
        coef, inter = final.coefficients, final.intercept
        rms, pvals = final.residual_rms, final.p_values
    else:
        base = fit_ols(dataset, (), intercept=True) if intercept else None
        inter = base.intercept if base is not None else 0.0
        resid = dataset.target - inter
        rms = float(np.sqrt(resid @ resid / resid.shape[0]))
        coef, pvals = np.zeros(0), np.zeros(0)

    return StepwiseModel(
        selected=selected,
        coefficients=coef,
        intercept=inter,
        residual_rms=rms,
        p_values=pvals,
        n_predictors=k,
        names=dataset.names,
        trace=tuple(trace),
    )


def save_dataset(path, dataset: Dataset) -> None:
    """Write predictors and target as CSV: predictor names then hue_rad."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(dataset.names) + [TARGET_COLUMN])
        for row, y in zip(dataset.predictors, dataset.target):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(y))])


def load_dataset(path) -> Dataset:
    """Read a dataset written by :func:`save_dataset`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[-1] != TARGET_COLUMN:
            raise ValueError(f"expected final column {TARGET_COLUMN!r} in {path}")
        rows = [[float(v) for v in row] for row in reader if row]
    data = np.asarray(rows, dtype=float)
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ValueError(f"malformed dataset file {path}")
    return Dataset(data[:, :-1], data[:, -1], tuple(header[:-1]))
