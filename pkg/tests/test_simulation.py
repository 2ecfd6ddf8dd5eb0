import numpy as np
import pytest

from choicescore.catalog import Profile
from choicescore.choices import choice_outcome_variance, expected_choice
from choicescore.errors import InputError
from choicescore.priors import LabelPrior
from choicescore.questionnaires import ChoiceSet, random_questionnaires
from choicescore.simulation import (
    Oracle,
    OracleConfig,
    oracle_respond,
    rms_study,
    run_oracle_study,
    scatter_study,
    simulate_responses,
)

UNIFORM = LabelPrior.uniform(-1, 1)


def make_profiles(n):
    return [Profile(id=i, levels=(0,)) for i in range(n)]


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------


def test_exact_oracle_orders_by_label():
    cs = ChoiceSet(0, (0, 1, 2, 3))
    labels = {0: 0.9, 1: -0.2, 2: 0.1, 3: -0.8}
    r = oracle_respond(cs, labels, OracleConfig(noise_sigma=0.0, seed=1))
    assert r.most_id == 0
    assert r.least_id == 3


def test_pair_oracle():
    cs = ChoiceSet(0, (5, 6))
    r = oracle_respond(cs, {5: 0.1, 6: 0.7}, OracleConfig(seed=0))
    assert (r.most_id, r.least_id) == (6, 5)


def test_unlabeled_member_rejected():
    cs = ChoiceSet(0, (1, 2))
    with pytest.raises(InputError):
        oracle_respond(cs, {1: 0.0}, OracleConfig(seed=0))


def test_tie_break_uniform_over_members():
    # all labels equal: most/least drawn uniformly at random, most != least
    cs = ChoiceSet(0, (0, 1, 2, 3))
    labels = {i: 0.5 for i in range(4)}
    oracle = Oracle(OracleConfig(noise_sigma=0.0, seed=42))
    counts = np.zeros(4)
    for _ in range(10_000):
        r = oracle.respond(cs, labels)
        assert r.most_id != r.least_id
        counts[r.most_id] += 1
    freq = counts / 10_000
    assert np.all(np.abs(freq - 0.25) <= 0.02)


def test_noise_stream_advances_between_calls():
    cs = ChoiceSet(0, (0, 1, 2, 3))
    labels = {0: 0.05, 1: 0.0, 2: -0.05, 3: 0.02}
    oracle = Oracle(OracleConfig(noise_sigma=1.0, seed=7))
    picks = {(oracle.respond(cs, labels).most_id) for _ in range(50)}
    assert len(picks) > 1  # fresh noise per evaluation


def test_noise_config_validation():
    with pytest.raises(InputError):
        OracleConfig(noise_sigma=-1.0)
    with pytest.raises(InputError):
        OracleConfig(noise_sigma=float("nan"))


def test_sigma_zero_deterministic_on_distinct_labels():
    quests = random_questionnaires(make_profiles(12), 4, 6, seed=3)
    labels = {i: float(i) for i in range(12)}
    a = simulate_responses(quests, labels, OracleConfig(noise_sigma=0.0, seed=1))
    b = simulate_responses(quests, labels, OracleConfig(noise_sigma=0.0, seed=2))
    assert [(r.most_id, r.least_id) for r in a] == [(r.most_id, r.least_id) for r in b]


def test_pairwise_tally_cross_check():
    # s = 2, exact oracle: c-bar must equal (wins - losses)/q from a direct
    # pairwise tally that never touches the oracle/encoding machinery
    n, q = 12, 9
    rng = np.random.default_rng(5)
    labels = {i: float(v) for i, v in enumerate(rng.normal(size=n))}
    quests = random_questionnaires(make_profiles(n), 2, q, seed=8)
    responses = simulate_responses(quests, labels, OracleConfig(0.0, seed=0))

    wins = {i: 0 for i in range(n)}
    losses = {i: 0 for i in range(n)}
    for quest in quests:
        for cs in quest.sets:
            a, b = cs.member_ids
            hi, lo = (a, b) if labels[a] > labels[b] else (b, a)
            wins[hi] += 1
            losses[lo] += 1

    from choicescore.choices import scores_from_study

    scores = scores_from_study(responses, quests, UNIFORM, 2)
    for pid, c in scores.c_bar_dict().items():
        assert c == pytest.approx((wins[pid] - losses[pid]) / q, abs=1e-12)


# ---------------------------------------------------------------------------
# scatter_study
# ---------------------------------------------------------------------------


def test_scatter_rejects_bad_q():
    with pytest.raises(InputError):
        scatter_study(20, 4, 0, UNIFORM, seed=0)


def test_scatter_handles_indivisible_n():
    # 21 profiles in sets of 4: one profile sits out each questionnaire and
    # means are taken over actual appearances
    pts = scatter_study(21, 4, 12, UNIFORM, seed=0)
    assert len(pts) == 21
    assert all(-1.0 <= c <= 1.0 for _, c in pts)
    with pytest.raises(InputError):
        scatter_study(3, 4, 1, UNIFORM, seed=0)


def test_scatter_single_set_conservation():
    # s = n: one +1 and one -1 per questionnaire across all examples
    pts = scatter_study(8, 8, 5, UNIFORM, seed=2)
    cbars = np.array([c for _, c in pts])
    assert np.sum(cbars) == pytest.approx(0.0, abs=1e-12)
    assert np.sum(np.abs(cbars) > 0) >= 2


def test_scatter_deterministic():
    assert scatter_study(40, 4, 5, UNIFORM, seed=9) == scatter_study(
        40, 4, 5, UNIFORM, seed=9
    )


def test_scatter_tracks_theory_curve():
    # desk-scale version of the envelope check
    pts = scatter_study(200, 4, 25, UNIFORM, seed=4)
    y = np.array([p[0] for p in pts])
    c = np.array([p[1] for p in pts])
    env = 4.0 * np.sqrt(choice_outcome_variance(y, UNIFORM, 4) / 25)
    dev = np.abs(c - expected_choice(y, UNIFORM, 4))
    assert np.mean(dev <= env) >= 0.97


# ---------------------------------------------------------------------------
# studies
# ---------------------------------------------------------------------------


def test_run_oracle_study_deterministic():
    profiles = make_profiles(20)
    labels = {i: float(v) for i, v in enumerate(np.linspace(-1, 1, 20))}
    a = run_oracle_study(profiles, labels, UNIFORM, 4, 5, "random", 0.1, seed=3)
    b = run_oracle_study(profiles, labels, UNIFORM, 4, 5, "random", 0.1, seed=3)
    assert a.estimates == b.estimates
    assert a.rms_error == b.rms_error


def test_run_oracle_study_group_strategy_uses_plan():
    profiles = make_profiles(20)
    labels = {i: float(v) for i, v in enumerate(np.linspace(-1, 1, 20))}
    result = run_oracle_study(profiles, labels, UNIFORM, 4, 5, "group", 0.0, seed=1)
    assert result.q == 5
    with pytest.raises(InputError):
        run_oracle_study(profiles, labels, UNIFORM, 2, 5, "group", 0.0, seed=1)


def test_rms_error_definition():
    profiles = make_profiles(20)
    labels = {i: float(v) for i, v in enumerate(np.linspace(-1, 1, 20))}
    r = run_oracle_study(profiles, labels, UNIFORM, 4, 10, "random", 0.0, seed=0)
    err = np.array([r.estimates[i] - labels[i] for i in range(20)])
    assert r.rms_error == pytest.approx(float(np.sqrt(np.mean(err**2))), abs=1e-12)


def test_rms_study_grid_and_skips():
    table = rms_study(
        20, [2, 3, 4], [2, 5], UNIFORM, strategy="random", repeats=2, seed=0
    )
    assert (2, 2) in table.cells and (4, 5) in table.cells
    assert any(s == 3 for s, _ in table.skipped)  # 20 not divisible by 3
    assert all(v >= 0 for v in table.cells.values())


def test_rms_study_group_skips_non_four():
    table = rms_study(
        20, [2, 4], [3], UNIFORM, strategy="group", repeats=1, seed=0
    )
    assert (4, 3) in table.cells
    assert any(s == 2 for s, _ in table.skipped)


def test_rms_decreases_with_more_questionnaires():
    table = rms_study(
        20, [4], [2, 40], UNIFORM, strategy="random", repeats=4, seed=1
    )
    assert table.cells[(4, 40)] < table.cells[(4, 2)]


def test_rms_replicate_means_monotone_in_q_per_size():
    # non-increasing in q up to replicate noise, checked on 10-repeat means
    table = rms_study(
        20, [2, 4], [2, 10, 40], UNIFORM, strategy="random", repeats=10, seed=6
    )
    for s in (2, 4):
        chain = [table.cells[(s, q)] for q in (2, 10, 40)]
        assert chain[0] >= chain[1] >= chain[2]
