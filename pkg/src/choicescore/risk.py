"""Linear risk scoring on coded profiles with aggregated labels.

Two fitting paths: ridge least squares on the continuous recovered labels,
and logistic regression on binarized labels via damped iteratively reweighted
least squares.  Evaluation sweeps thresholds over the distinct score values
(ties grouped), computes the ROC and trapezoidal AUC, and tunes a decision
threshold against a false-negative-rate target.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .design import Design
from .errors import DegenerateLabelsError, InputError, RankError

HIGH = "high"
LOW = "low"

_IRLS_MAX_ITER = 100
_IRLS_STEP_TOL = 1e-8


@dataclass
class LinearScorer:
    weights: np.ndarray  # aligned to the coded columns (intercept first)
    bias: float
    link: str  # "identity" | "logistic"

    def __post_init__(self):
        if not np.all(np.isfinite(self.weights)) or not np.isfinite(self.bias):
            raise InputError("scorer parameters must be finite")
        if self.link not in ("identity", "logistic"):
            raise InputError(f"unknown link {self.link!r}")

    def raw(self, coded: np.ndarray) -> np.ndarray:
        return np.asarray(coded) @ self.weights + self.bias

    def score(self, coded: np.ndarray) -> np.ndarray:
        z = self.raw(coded)
        if self.link == "logistic":
            return _sigmoid(z)
        return z

    def score_design(self, design: Design) -> dict[int, float]:
        vals = self.score(design.coded_matrix)
        return {p.id: float(v) for p, v in zip(design.profiles, vals)}


@dataclass
class EvalReport:
    roc: list[tuple[float, float, float]]  # (fpr, tpr, threshold), threshold desc
    auc: float
    classification_error: float  # at the accuracy-optimal threshold
    fnr: float                   # at the same threshold
    threshold: float             # accuracy-optimal threshold
    fnr_tuned_threshold: Optional[float] = None
    fnr_tuned_saturated: bool = False
    counts: dict = field(default_factory=dict)


def binarize_labels(scores: Mapping[int, float], cutoff: float) -> dict[int, str]:
    """y > cutoff -> high, else low (boundary values are low)."""
    return {pid: (HIGH if y > cutoff else LOW) for pid, y in scores.items()}


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _align(design: Design, labels: Mapping[int, float]) -> np.ndarray:
    missing = [p.id for p in design.profiles if p.id not in labels]
    if missing:
        raise InputError(f"labels missing for profile ids {missing[:5]}")
    return np.array([labels[p.id] for p in design.profiles], dtype=float)


def _ridge_lstsq(x: np.ndarray, y: np.ndarray, lam: float) -> np.ndarray:
    """min ||Xw - y||^2 + lam * ||w_noint||^2 via one orthogonal lstsq solve;
    the intercept column is left unpenalized."""
    n, m = x.shape
    if lam > 0:
        penalty = np.sqrt(lam) * np.eye(m)
        penalty[0, 0] = 0.0
        x_aug = np.vstack([x, penalty])
        y_aug = np.concatenate([y, np.zeros(m)])
    else:
        x_aug, y_aug = x, y
    w, _, rank, _ = np.linalg.lstsq(x_aug, y_aug, rcond=None)
    if rank < m:
        raise RankError(
            f"system rank {rank} < {m}; use reg_lambda > 0 or a richer design"
        )
    return w


def _logistic_irls(x: np.ndarray, t: np.ndarray, lam: float) -> np.ndarray:
    """Damped Newton/IRLS; accepted iterations never increase the penalized
    log-loss, convergence when the accepted step falls below 1e-8."""
    n, m = x.shape
    pen = lam * np.ones(m)
    pen[0] = 0.0  # unpenalized intercept

    def loss(w):
        z = x @ w
        # log(1 + e^z) - t*z, numerically stable
        return float(
            np.sum(np.logaddexp(0.0, z) - t * z) + 0.5 * np.sum(pen * w * w)
        )

    w = np.zeros(m)
    current = loss(w)
    for _ in range(_IRLS_MAX_ITER):
        z = x @ w
        mu = _sigmoid(z)
        grad = x.T @ (mu - t) + pen * w
        wt = np.clip(mu * (1.0 - mu), 1e-10, None)
        hess = (x * wt[:, None]).T @ x + np.diag(pen)
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError as exc:
            raise RankError(
                "singular IRLS system; use reg_lambda > 0"
            ) from exc
        # backtracking: halve until the loss does not increase
        scale = 1.0
        for _ in range(40):
            trial = w - scale * step
            trial_loss = loss(trial)
            if trial_loss <= current + 1e-12:
                break
            scale *= 0.5
        else:
            break
        accepted_step = scale * np.max(np.abs(step))
        w, current = trial, trial_loss
        if accepted_step < _IRLS_STEP_TOL:
            break
    return w


def fit(
    design: Design,
    labels: Mapping[int, float],
    mode: str = "logistic",
    reg_lambda: float = 1e-6,
    cutoff: float = 0.0,
) -> LinearScorer:
    """Fit a linear scorer on the design's coded matrix.

    regression: ridge least squares on continuous labels (identity link).
    classification: logistic regression on labels binarized at ``cutoff``.
    """
    if reg_lambda < 0:
        raise InputError("reg_lambda must be >= 0")
    x = design.coded_matrix
    if design.n < design.m:
        raise InputError(f"n={design.n} < m={design.m}")
    y = _align(design, labels)
    if mode == "regression":
        w = _ridge_lstsq(x, y, reg_lambda)
        return LinearScorer(weights=w, bias=0.0, link="identity")
    if mode == "classification" or mode == "logistic":
        t = (y > cutoff).astype(float)
        if t.min() == t.max():
            raise DegenerateLabelsError(
                "all labels fall in one class; cannot fit a classifier"
            )
        w = _logistic_irls(x, t, reg_lambda)
        return LinearScorer(weights=w, bias=0.0, link="logistic")
    raise InputError(f"unknown mode {mode!r}")


def roc_and_auc(
    scores: Mapping[int, float], truth: Mapping[int, str]
) -> EvalReport:
    """ROC over the distinct score thresholds (strict ``score > t`` rule),
    trapezoidal AUC, and accuracy-optimal operating point."""
    ids = sorted(scores)
    if set(ids) != set(truth):
        raise InputError("scores and truth cover different ids")
    s = np.array([scores[i] for i in ids], dtype=float)
    pos = np.array([truth[i] == HIGH for i in ids])
    n_pos = int(pos.sum())
    n_neg = len(ids) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabelsError("both classes must be present in the truth")

    thresholds = np.unique(s)[::-1]  # descending; ties grouped by uniqueness
    all_high = float(s.min()) - 1.0  # below every score: classify-all-high
    roc = []
    best_acc, best_threshold, best_fnr = -1.0, None, None
    for t in list(thresholds) + [all_high]:
        pred = s > t
        tp = int(np.sum(pred & pos))
        fp = int(np.sum(pred & ~pos))
        tpr = tp / n_pos
        fpr = fp / n_neg
        roc.append((fpr, tpr, float(t)))
        acc = (tp + (n_neg - fp)) / len(ids)
        if acc > best_acc:
            best_acc, best_threshold, best_fnr = acc, float(t), 1.0 - tpr

    fprs = np.array([r[0] for r in roc])
    tprs = np.array([r[1] for r in roc])
    auc = float(np.trapezoid(tprs, fprs))
    return EvalReport(
        roc=roc,
        auc=auc,
        classification_error=1.0 - best_acc,
        fnr=best_fnr,
        threshold=best_threshold,
        counts={"n_high": n_pos, "n_low": n_neg},
    )


def tune_threshold(report: EvalReport, fnr_target: float) -> tuple[float, bool]:
    """Largest swept threshold with empirical FNR <= target.

    The sweep always ends at the classify-all-high threshold (FNR = 0), so a
    threshold exists; the saturation flag marks that degenerate pick.
    """
    if not 0.0 < fnr_target <= 1.0:
        raise InputError("fnr_target must lie in (0, 1]")
    admissible = [(t, fpr, tpr) for fpr, tpr, t in report.roc if 1.0 - tpr <= fnr_target]
    t_best = max(t for t, _, _ in admissible)
    saturated = t_best == report.roc[-1][2] and len(admissible) == 1
    return t_best, saturated


def evaluate(
    scores: Mapping[int, float],
    truth: Mapping[int, str],
    fnr_target: Optional[float] = None,
) -> EvalReport:
    report = roc_and_auc(scores, truth)
    if fnr_target is not None:
        t, saturated = tune_threshold(report, fnr_target)
        report.fnr_tuned_threshold = t
        report.fnr_tuned_saturated = saturated
    return report


def assert_disjoint(train: Design, test: Design) -> None:
    """Split discipline: evaluation profiles must never enter fitting."""
    overlap = set(train.ids()) & set(test.ids())
    if overlap:
        raise InputError(f"train/test profile ids overlap: {sorted(overlap)[:5]}")
