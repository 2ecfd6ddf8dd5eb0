import numpy as np
import pytest
from scipy.optimize import minimize

from choicescore.catalog import encode_level_matrix, full_factorial_levels, profiles_from_levels
from choicescore.design import Design, d_criterion, federov_exchange
from choicescore.errors import DegenerateLabelsError, InputError, RankError
from choicescore.risk import (
    HIGH,
    LOW,
    LinearScorer,
    assert_disjoint,
    binarize_labels,
    evaluate,
    fit,
    roc_and_auc,
    tune_threshold,
    _logistic_irls,
)


def factorial_design(catalog, id_offset=0):
    levels = full_factorial_levels(catalog)
    coded = encode_level_matrix(levels, catalog)
    return Design(
        catalog, profiles_from_levels(levels, id_offset), coded, d_criterion(coded)
    )


# ---------------------------------------------------------------------------
# binarize
# ---------------------------------------------------------------------------


def test_binarize_basic():
    out = binarize_labels({1: 0.9, 2: -0.3}, cutoff=0.0)
    assert out == {1: HIGH, 2: LOW}


def test_binarize_boundary_is_low():
    assert binarize_labels({1: 0.5}, cutoff=0.5) == {1: LOW}


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------


def test_regression_recovers_exact_linear_labels(binary3):
    d = factorial_design(binary3)
    w_true = np.array([0.3, -1.2, 0.7, 2.0])
    labels = {p.id: float(row @ w_true) for p, row in zip(d.profiles, d.coded_matrix)}
    scorer = fit(d, labels, mode="regression", reg_lambda=0.0)
    assert np.max(np.abs(scorer.weights - w_true)) < 1e-8
    assert scorer.link == "identity"


def test_fit_requires_full_label_cover(binary3):
    d = factorial_design(binary3)
    with pytest.raises(InputError):
        fit(d, {0: 1.0}, mode="regression")


def test_degenerate_labels_rejected(binary3):
    d = factorial_design(binary3)
    labels = {p.id: 1.0 for p in d.profiles}
    with pytest.raises(DegenerateLabelsError):
        fit(d, labels, mode="classification")


def test_rank_error_recommends_lambda(binary3):
    d = factorial_design(binary3)
    # duplicate a coded column -> singular at lambda = 0
    coded = np.column_stack([d.coded_matrix, d.coded_matrix[:, 1]])
    dup = Design(binary3, d.profiles, d.coded_matrix, d.log_det)
    dup.coded_matrix = coded
    labels = {p.id: float(i) for i, p in enumerate(d.profiles)}
    with pytest.raises(RankError, match="reg_lambda"):
        fit(dup, labels, mode="regression", reg_lambda=0.0)
    fit(dup, labels, mode="regression", reg_lambda=1e-6)  # guard fixes it


def test_ridge_shrinkage(binary3):
    d = factorial_design(binary3)
    rng = np.random.default_rng(0)
    labels = {p.id: float(v) for p, v in zip(d.profiles, rng.normal(size=d.n))}
    norms = []
    for lam in (0.0, 0.1, 1.0, 10.0):
        w = fit(d, labels, mode="regression", reg_lambda=lam).weights
        norms.append(float(np.linalg.norm(w[1:])))  # penalized block
    assert all(a >= b - 1e-12 for a, b in zip(norms, norms[1:]))


def test_logistic_matches_independent_optimizer(binary3):
    d = factorial_design(binary3)
    rng = np.random.default_rng(3)
    labels = {p.id: float(v) for p, v in zip(d.profiles, rng.normal(size=d.n))}
    lam = 0.05
    scorer = fit(d, labels, mode="classification", reg_lambda=lam)

    x = d.coded_matrix
    t = np.array([float(labels[p.id] > 0.0) for p in d.profiles])
    pen = lam * np.ones(x.shape[1])
    pen[0] = 0.0

    def loss(w):
        z = x @ w
        return np.sum(np.logaddexp(0.0, z) - t * z) + 0.5 * np.sum(pen * w * w)

    ref = minimize(loss, np.zeros(x.shape[1]), method="BFGS", tol=1e-12)
    assert loss(scorer.weights) <= ref.fun + 1e-8
    assert np.max(np.abs(scorer.weights - ref.x)) < 1e-4


def test_irls_loss_never_increases():
    rng = np.random.default_rng(2)
    x = np.column_stack([np.ones(40), rng.normal(size=(40, 3))])
    t = (x @ np.array([0.0, 1.0, -2.0, 0.5]) + rng.normal(size=40) > 0).astype(float)
    pen = 1e-6 * np.ones(4)
    pen[0] = 0.0

    def loss(w):
        z = x @ w
        return float(np.sum(np.logaddexp(0.0, z) - t * z) + 0.5 * np.sum(pen * w * w))

    w = _logistic_irls(x, t, 1e-6)
    assert loss(w) <= loss(np.zeros(4))


def test_scorer_validation():
    with pytest.raises(InputError):
        LinearScorer(weights=np.array([np.inf]), bias=0.0, link="identity")
    with pytest.raises(InputError):
        LinearScorer(weights=np.array([0.0]), bias=0.0, link="probit")


def test_zero_coded_profile_scores_link_of_bias():
    s = LinearScorer(weights=np.array([2.0, 3.0]), bias=0.25, link="identity")
    assert s.score(np.zeros((1, 2)))[0] == 0.25
    s2 = LinearScorer(weights=np.array([2.0, 3.0]), bias=0.0, link="logistic")
    assert s2.score(np.zeros((1, 2)))[0] == 0.5


# ---------------------------------------------------------------------------
# roc / auc
# ---------------------------------------------------------------------------


def test_perfect_separation_auc_one():
    scores = {i: float(i) for i in range(10)}
    truth = {i: HIGH if i >= 5 else LOW for i in range(10)}
    report = roc_and_auc(scores, truth)
    assert report.auc == 1.0
    assert report.classification_error == 0.0


def test_random_scores_auc_half():
    rng = np.random.default_rng(0)
    scores = {i: float(v) for i, v in enumerate(rng.normal(size=10_000))}
    truth = {i: HIGH if v > 0 else LOW for i, v in enumerate(rng.normal(size=10_000))}
    report = roc_and_auc(scores, truth)
    assert abs(report.auc - 0.5) <= 0.05


def test_auc_invariant_under_increasing_transform():
    rng = np.random.default_rng(4)
    scores = {i: float(v) for i, v in enumerate(rng.normal(size=500))}
    truth = {
        i: HIGH if v + rng.normal() > 0 else LOW
        for i, v in scores.items()
    }
    base = roc_and_auc(scores, truth).auc
    for f in (lambda v: 3 * v + 7, np.tanh, lambda v: np.exp(v / 2)):
        transformed = {i: float(f(v)) for i, v in scores.items()}
        assert roc_and_auc(transformed, truth).auc == pytest.approx(base, abs=1e-12)


def test_single_class_truth_rejected():
    with pytest.raises(DegenerateLabelsError):
        roc_and_auc({1: 0.5, 2: 0.7}, {1: HIGH, 2: HIGH})


def test_roc_spans_corners_and_sorted():
    scores = {1: 0.1, 2: 0.4, 3: 0.4, 4: 0.9}
    truth = {1: LOW, 2: HIGH, 3: LOW, 4: HIGH}
    report = roc_and_auc(scores, truth)
    fprs = [r[0] for r in report.roc]
    tprs = [r[1] for r in report.roc]
    ts = [r[2] for r in report.roc]
    assert (fprs[0], tprs[0]) == (0.0, 0.0)
    assert (fprs[-1], tprs[-1]) == (1.0, 1.0)
    assert ts == sorted(ts, reverse=True)
    # tied scores grouped: one threshold per distinct value plus the all-high point
    assert len(ts) == 4


def test_mismatched_ids_rejected():
    with pytest.raises(InputError):
        roc_and_auc({1: 0.5}, {2: HIGH})


# ---------------------------------------------------------------------------
# tune_threshold
# ---------------------------------------------------------------------------


def _report(scores, truth):
    return roc_and_auc(scores, truth)


def test_fnr_target_one_gives_max_threshold():
    scores = {1: 0.2, 2: 0.8}
    truth = {1: LOW, 2: HIGH}
    report = _report(scores, truth)
    t, saturated = tune_threshold(report, 1.0)
    assert t == 0.8
    assert not saturated


def test_small_fnr_target_requires_zero_misses():
    rng = np.random.default_rng(1)
    scores = {i: float(v) for i, v in enumerate(rng.normal(size=52))}
    truth = {i: HIGH if rng.random() < 0.5 else LOW for i in scores}
    truth[0] = HIGH  # both classes present
    truth[1] = LOW
    report = _report(scores, truth)
    t, _ = tune_threshold(report, 1e-3)
    min_high = min(v for i, v in scores.items() if truth[i] == HIGH)
    assert t < min_high
    # zero empirical false negatives at the tuned threshold
    fn = sum(1 for i, v in scores.items() if truth[i] == HIGH and v <= t)
    assert fn == 0


def test_separated_scores_pick_gap_top():
    scores = {1: 0.1, 2: 0.2, 3: 0.8, 4: 0.9}
    truth = {1: LOW, 2: LOW, 3: HIGH, 4: HIGH}
    report = _report(scores, truth)
    t, saturated = tune_threshold(report, 1e-3)
    assert t == 0.2  # largest swept threshold below every high score
    assert not saturated


def test_saturation_flag_when_only_all_high_works():
    # every in-sweep threshold misses a high example; only the classify-all-
    # high sentinel achieves FNR 0
    scores = {1: 0.5, 2: 0.5}
    truth = {1: HIGH, 2: LOW}
    report = _report(scores, truth)
    t, saturated = tune_threshold(report, 1e-3)
    assert t == pytest.approx(-0.5)
    assert saturated


def test_fnr_target_validation():
    report = _report({1: 0.1, 2: 0.9}, {1: LOW, 2: HIGH})
    with pytest.raises(InputError):
        tune_threshold(report, 0.0)


def test_evaluate_bundles_tuning():
    scores = {1: 0.1, 2: 0.9}
    truth = {1: LOW, 2: HIGH}
    report = evaluate(scores, truth, fnr_target=0.5)
    assert report.fnr_tuned_threshold is not None


# ---------------------------------------------------------------------------
# split discipline
# ---------------------------------------------------------------------------


def test_assert_disjoint(binary3):
    train = factorial_design(binary3)
    test = factorial_design(binary3, id_offset=100)
    assert_disjoint(train, test)
    with pytest.raises(InputError):
        assert_disjoint(train, factorial_design(binary3))


def test_class_balance_under_symmetric_prior():
    # uniform prior, cutoff at the median: near 50/50 classes on oracle data
    from choicescore.priors import LabelPrior
    from choicescore.simulation import run_oracle_study
    from choicescore.catalog import Profile

    prior = LabelPrior.uniform(-1, 1)
    profiles = [Profile(id=i, levels=(0,)) for i in range(188)]
    rng = np.random.default_rng(0)
    labels = {i: float(v) for i, v in enumerate(rng.permutation(prior.quantile_grid(188)))}
    result = run_oracle_study(profiles, labels, prior, 4, 20, "random", 0.0, seed=0)
    classes = binarize_labels(result.estimates, cutoff=0.0)
    high = sum(1 for v in classes.values() if v == HIGH)
    assert abs(high / 188 - 0.5) <= 0.10
