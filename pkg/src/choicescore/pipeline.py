"""End-to-end synthetic benchmark: ground-truth scorer -> designs ->
questionnaires -> oracle choices -> aggregation -> fitted model -> held-out
evaluation.

True labels are standardized linear scores of the coded profiles; a sum of
many small attribute effects is close to normal, so the inversion runs under
a normal(0, 1) prior.  The held-out design uses disjoint profile ids and its
own questionnaire/oracle/aggregation pass, mirroring how a real study would
label a test batch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .catalog import AttributeCatalog, standin_catalog
from .choices import ScoreSet, scores_from_study
from .design import Design, best_design
from .errors import InputError
from .priors import LabelPrior
from .questionnaires import extended_questionnaires, plan_study
from .risk import (
    EvalReport,
    LinearScorer,
    assert_disjoint,
    binarize_labels,
    evaluate,
    fit,
)
from .simulation import OracleConfig, simulate_responses


@dataclass
class PipelineResult:
    train: Design
    test: Design
    w_star: np.ndarray
    true_train: dict[int, float]
    true_test: dict[int, float]
    train_scores: ScoreSet
    test_scores: ScoreSet
    regression: LinearScorer
    classifier: LinearScorer
    test_report: EvalReport          # truth = aggregated test labels
    test_report_vs_truth: EvalReport  # truth = synthetic ground truth
    weight_cosine: float

    def summary(self) -> dict:
        return {
            "weight_cosine": self.weight_cosine,
            "test_auc": self.test_report.auc,
            "test_error": self.test_report.classification_error,
            "test_auc_vs_truth": self.test_report_vs_truth.auc,
            "test_error_vs_truth": self.test_report_vs_truth.classification_error,
        }


def _labeled_scores(design: Design, w: np.ndarray, mu: float, sd: float) -> dict[int, float]:
    raw = (design.coded_matrix @ w - mu) / sd
    return {p.id: float(v) for p, v in zip(design.profiles, raw)}


def _aggregate(design: Design, labels, q: int, noise_sigma: float, prior, seed: int) -> ScoreSet:
    plan = plan_study(design.n)
    quests = extended_questionnaires(design.profiles, plan, q, seed)
    responses = simulate_responses(
        quests, labels, OracleConfig(noise_sigma=noise_sigma, seed=seed + 1)
    )
    return scores_from_study(responses, quests, prior, plan.set_size)


def weight_cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of the non-intercept weight blocks."""
    u, v = np.asarray(a, float)[1:], np.asarray(b, float)[1:]
    denom = np.linalg.norm(u) * np.linalg.norm(v)
    if denom == 0:
        raise InputError("zero weight vector")
    return float(u @ v / denom)


def synthetic_pipeline(
    train_n: int = 188,
    test_n: int = 52,
    q: int = 20,
    noise_sigma: float = 0.1,
    seed: int = 0,
    catalog: Optional[AttributeCatalog] = None,
    prior: Optional[LabelPrior] = None,
    restarts: int = 3,
    cutoff: float = 0.0,
) -> PipelineResult:
    catalog = catalog or standin_catalog()
    prior = prior or LabelPrior.normal(0.0, 1.0)

    train = best_design(catalog, train_n, restarts=restarts, seed=seed)
    test = best_design(
        catalog, test_n, restarts=restarts, seed=seed + 1, id_offset=train_n
    )
    assert_disjoint(train, test)

    rng = np.random.default_rng([seed, 101])
    w_star = rng.normal(size=catalog.coded_dim)
    w_star[0] = 0.0
    raw_train = train.coded_matrix @ w_star
    mu, sd = float(raw_train.mean()), float(raw_train.std())
    true_train = _labeled_scores(train, w_star, mu, sd)
    true_test = _labeled_scores(test, w_star, mu, sd)

    train_scores = _aggregate(train, true_train, q, noise_sigma, prior, seed + 10)
    test_scores = _aggregate(test, true_test, q, noise_sigma, prior, seed + 20)

    regression = fit(train, train_scores.as_dict(), mode="regression")
    classifier = fit(train, train_scores.as_dict(), mode="classification", cutoff=cutoff)

    model_test_scores = classifier.score_design(test)
    report = evaluate(model_test_scores, binarize_labels(test_scores.as_dict(), cutoff))
    report_vs_truth = evaluate(model_test_scores, binarize_labels(true_test, cutoff))

    # standardization leaves w* defined up to scale; compare directions
    cos = weight_cosine(regression.weights, w_star)

    return PipelineResult(
        train=train,
        test=test,
        w_star=w_star,
        true_train=true_train,
        true_test=true_test,
        train_scores=train_scores,
        test_scores=test_scores,
        regression=regression,
        classifier=classifier,
        test_report=report,
        test_report_vs_truth=report_vs_truth,
        weight_cosine=cos,
    )
