import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from choicescore.choices import (
    C_TOLERANCE,
    ChoiceResponse,
    encode_choices,
    expected_choice,
    choice_outcome_variance,
    invert_choice,
    invert_choices,
    mean_choice,
    scores_from_study,
)
from choicescore.errors import (
    IncompleteQuestionnaireError,
    InputError,
    InvalidResponseError,
)
from choicescore.priors import LabelPrior, parse_prior
from choicescore.questionnaires import ChoiceSet, Questionnaire

UNIFORM = LabelPrior.uniform(-1, 1)
NORMAL = LabelPrior.normal(0, 1)


def quest(index, *sets):
    return Questionnaire(
        questionnaire_index=index,
        sets=tuple(ChoiceSet(set_index=k, member_ids=s) for k, s in enumerate(sets)),
    )


# ---------------------------------------------------------------------------
# priors
# ---------------------------------------------------------------------------


def test_uniform_cdf_quantile():
    assert UNIFORM.cdf(0.0) == 0.5
    assert UNIFORM.quantile(0.25) == -0.5
    assert UNIFORM.median == 0.0


def test_normal_cdf_quantile_roundtrip():
    ys = np.linspace(-3, 3, 101)
    back = NORMAL.quantile(NORMAL.cdf(ys))
    assert np.max(np.abs(back - ys)) < 1e-12


def test_uniform_quantile_cdf_roundtrip_on_support():
    ys = np.linspace(-1, 1, 101)
    assert np.max(np.abs(UNIFORM.quantile(UNIFORM.cdf(ys)) - ys)) < 1e-12


def test_cdf_monotone():
    ys = np.linspace(-5, 5, 401)
    for prior in (UNIFORM, NORMAL):
        assert np.all(np.diff(prior.cdf(ys)) >= 0)


def test_parse_prior():
    assert parse_prior("uniform:-1,1") == UNIFORM
    assert parse_prior("normal:0,1") == NORMAL
    with pytest.raises(InputError):
        parse_prior("cauchy:0,1")
    with pytest.raises(InputError):
        parse_prior("uniform:1")


def test_prior_validation():
    with pytest.raises(InputError):
        LabelPrior.uniform(1, 1)
    with pytest.raises(InputError):
        LabelPrior.normal(0, 0)


# ---------------------------------------------------------------------------
# expected_choice
# ---------------------------------------------------------------------------


def test_expected_choice_median_is_zero():
    assert expected_choice(0.0, UNIFORM, 4) == 0.0


def test_expected_choice_pairwise_is_identity_on_uniform():
    # s = 2 reduces to (y/2 + 1/2) - (-y/2 + 1/2) = y
    assert expected_choice(0.6, UNIFORM, 2) == pytest.approx(0.6, abs=1e-12)


def test_expected_choice_hand_value():
    assert expected_choice(0.5, UNIFORM, 4) == pytest.approx(
        0.75**3 - 0.25**3, abs=1e-12
    )
    assert 0.75**3 - 0.25**3 == 0.40625


def test_expected_choice_range_and_monotone():
    ys = np.linspace(-1, 1, 201)
    for s in range(2, 7):
        vals = expected_choice(ys, UNIFORM, s)
        assert np.all(np.diff(vals) > 0)
        assert vals.min() >= -1.0 and vals.max() <= 1.0


@settings(max_examples=50, deadline=None)
@given(
    st.floats(min_value=0.0, max_value=3.0, allow_nan=False),
    st.integers(min_value=2, max_value=6),
)
def test_expected_choice_antisymmetric_for_symmetric_priors(d, s):
    for prior in (UNIFORM, NORMAL):
        mu = prior.median
        left = expected_choice(mu - d, prior, s)
        right = expected_choice(mu + d, prior, s)
        assert right == pytest.approx(-left, abs=1e-12)


def test_expected_choice_rejects_small_s():
    with pytest.raises(InputError):
        expected_choice(0.0, UNIFORM, 1)


def test_outcome_variance_matches_definition():
    y, s = 0.3, 4
    f = UNIFORM.cdf(y)
    pmax, pmin = f ** (s - 1), (1 - f) ** (s - 1)
    assert choice_outcome_variance(y, UNIFORM, s) == pytest.approx(
        pmax + pmin - (pmax - pmin) ** 2
    )


# ---------------------------------------------------------------------------
# invert_choice
# ---------------------------------------------------------------------------


def test_invert_zero_is_median():
    assert invert_choice(0.0, UNIFORM, 4) == 0.0
    assert invert_choice(0.0, LabelPrior.normal(2.0, 3.0), 5) == 2.0


def test_invert_hand_value():
    assert invert_choice(0.40625, UNIFORM, 4) == pytest.approx(0.5, abs=1e-9)


def test_invert_against_independent_root_finder():
    # independent oracle: scipy brentq on u^3 - (1-u)^3 = 0.875, y = 2u - 1
    u = brentq(lambda v: v**3 - (1 - v) ** 3 - 0.875, 0.0, 1.0, xtol=1e-15)
    expected = 2 * u - 1
    assert expected == pytest.approx(0.913, abs=5e-4)
    assert invert_choice(0.875, UNIFORM, 4) == pytest.approx(expected, abs=1e-9)


def test_invert_boundaries():
    assert invert_choice(1.0, UNIFORM, 4) == 1.0
    assert invert_choice(-1.0, UNIFORM, 4) == -1.0
    # normal prior clamps to the extreme quantile instead of +-inf
    top = invert_choice(1.0, NORMAL, 4)
    assert np.isfinite(top)
    assert top == pytest.approx(NORMAL.quantile(1 - 1e-12), abs=1e-9)


def test_invert_rejects_out_of_range():
    with pytest.raises(InputError):
        invert_choice(1.5, UNIFORM, 4)
    with pytest.raises(InputError):
        invert_choices(np.array([0.0, -2.0]), UNIFORM, 4)


def test_invert_satisfies_c_space_tolerance():
    rng = np.random.default_rng(0)
    cs = rng.uniform(-1, 1, 200)
    for s in range(2, 7):
        ys = invert_choices(cs, UNIFORM, s)
        assert np.max(np.abs(expected_choice(ys, UNIFORM, s) - cs)) <= C_TOLERANCE


def test_invert_monotone_in_c():
    cs = np.linspace(-1, 1, 101)
    for prior in (UNIFORM, NORMAL):
        ys = invert_choices(cs, prior, 4)
        assert np.all(np.diff(ys) > 0)


@settings(max_examples=30, deadline=None)
@given(
    st.floats(min_value=-0.999, max_value=0.999, allow_nan=False),
    st.integers(min_value=2, max_value=6),
)
def test_roundtrip_property(y_frac, s):
    for prior in (UNIFORM, NORMAL):
        lo, hi = prior.central_interval(0.998)
        y = lo + (y_frac + 0.999) / 1.998 * (hi - lo)
        back = invert_choice(expected_choice(y, prior, s), prior, s)
        assert back == pytest.approx(y, abs=1e-6)


def test_roundtrip_grid_all_set_sizes():
    # 512-point grid over the central 99.8% mass, both priors, s in 2..6
    for prior in (UNIFORM, NORMAL):
        lo, hi = prior.central_interval(0.998)
        ys = np.linspace(lo, hi, 512)
        for s in range(2, 7):
            back = invert_choices(expected_choice(ys, prior, s), prior, s)
            assert np.max(np.abs(back - ys)) <= 1e-6


# ---------------------------------------------------------------------------
# encode_choices / mean_choice
# ---------------------------------------------------------------------------


def test_encoding_definition():
    q = quest(0, (10, 11, 12, 13))
    enc = encode_choices([ChoiceResponse(0, 0, most_id=10, least_id=13)], [q])
    assert enc == [{10: 1, 11: 0, 12: 0, 13: -1}]


def test_pair_set_has_no_zeros():
    q = quest(0, (1, 2))
    enc = encode_choices([ChoiceResponse(0, 0, most_id=1, least_id=2)], [q])
    assert enc == [{1: 1, 2: -1}]


def test_response_outside_set_rejected():
    q = quest(0, (1, 2, 3, 4))
    with pytest.raises(InvalidResponseError):
        encode_choices([ChoiceResponse(0, 0, most_id=1, least_id=9)], [q])


def test_most_equals_least_rejected():
    with pytest.raises(InvalidResponseError):
        ChoiceResponse(0, 0, most_id=1, least_id=1)


def test_missing_response_rejected():
    q = quest(0, (1, 2, 3, 4), (5, 6, 7, 8))
    with pytest.raises(IncompleteQuestionnaireError):
        encode_choices([ChoiceResponse(0, 0, most_id=1, least_id=2)], [q])


def test_duplicate_response_rejected():
    q = quest(0, (1, 2, 3, 4))
    responses = [
        ChoiceResponse(0, 0, most_id=1, least_id=2),
        ChoiceResponse(0, 0, most_id=1, least_id=3),
    ]
    with pytest.raises(IncompleteQuestionnaireError):
        encode_choices(responses, [q])


def test_unknown_questionnaire_rejected():
    q = quest(0, (1, 2, 3, 4))
    with pytest.raises(InputError):
        encode_choices([ChoiceResponse(7, 0, most_id=1, least_id=2)], [q])


def test_per_set_encoding_sums_to_zero():
    q = quest(0, (1, 2, 3, 4), (5, 6, 7, 8))
    enc, = encode_choices(
        [
            ChoiceResponse(0, 0, most_id=2, least_id=4),
            ChoiceResponse(0, 1, most_id=5, least_id=7),
        ],
        [q],
    )
    for cs in q.sets:
        assert sum(enc[pid] for pid in cs.member_ids) == 0


def test_mean_choice_all_most():
    encodings = [{1: 1, 2: 0, 3: 0, 4: -1} for _ in range(5)]
    mc = mean_choice(encodings)
    assert mc.values[1] == 1.0
    assert mc.q == 5


def test_mean_choice_cancellation():
    encodings = [{1: 1}, {1: -1}, {1: 0}, {1: 0}]
    assert mean_choice(encodings).values[1] == 0.0


def test_mean_choice_direct_arithmetic():
    encodings = [{1: 1}, {1: 1}, {1: 0}, {1: -1}, {1: 1}]
    assert mean_choice(encodings).values[1] == pytest.approx(0.4)


def test_mean_choice_lattice():
    # every mean is a multiple of 1/q
    rng = np.random.default_rng(1)
    q = 7
    encodings = [{i: int(rng.integers(-1, 2)) for i in range(10)} for _ in range(q)]
    mc = mean_choice(encodings)
    for v in mc.values.values():
        assert abs(v * q - round(v * q)) < 1e-12


def test_mean_choice_requires_common_ids():
    with pytest.raises(InputError):
        mean_choice([{1: 1}, {2: 1}])


def test_mean_choice_empty():
    with pytest.raises(InputError):
        mean_choice([])


# ---------------------------------------------------------------------------
# scores_from_study
# ---------------------------------------------------------------------------


def test_scores_boundary_single_questionnaire():
    q = quest(0, (1, 2, 3, 4))
    scores = scores_from_study(
        [ChoiceResponse(0, 0, most_id=3, least_id=2)], [q], UNIFORM, 4
    )
    top = dict(zip(scores.ids, scores.labels))
    assert top[3] == 1.0  # c = +1 inverts to the top of the range
    assert top[2] == -1.0
    assert scores.q == 1


def test_scores_empty_responses():
    q = quest(0, (1, 2, 3, 4))
    with pytest.raises(IncompleteQuestionnaireError):
        scores_from_study([], [q], UNIFORM, 4)


def test_scores_set_size_mismatch():
    q = quest(0, (1, 2))
    with pytest.raises(InputError):
        scores_from_study([ChoiceResponse(0, 0, 1, 2)], [q], UNIFORM, 4)


def test_scores_emits_both_cbar_and_labels():
    q = quest(0, (1, 2, 3, 4))
    scores = scores_from_study(
        [ChoiceResponse(0, 0, most_id=1, least_id=4)], [q], UNIFORM, 4
    )
    assert scores.c_bar_dict() == {1: 1.0, 2: 0.0, 3: 0.0, 4: -1.0}
    assert scores.as_dict()[2] == 0.0
