"""Choice encoding, aggregation, and the choice-to-score inversion.

Within a choice set the picked most/least risky profiles encode as +1/-1 and
the rest as 0.  Averaging encodings across questionnaires gives the mean
choice c in [-1, 1]; under a label prior with cdf F the theoretical expected
choice of a label y in a set of size s is

    g(y) = F(y)^(s-1) - (1 - F(y))^(s-1),

strictly increasing in y, so mean choices invert to absolute-scale labels by
bisection.  Mean choices from finitely many questionnaires are inverted
through the same map without small-q bias correction, matching the forward
model's q -> infinity limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import IncompleteQuestionnaireError, InputError, InvalidResponseError
from .priors import LabelPrior
from .questionnaires import Questionnaire

C_TOLERANCE = 1e-9
_MAX_BISECT = 100


@dataclass(frozen=True)
class ChoiceResponse:
    questionnaire_index: int
    set_index: int
    most_id: int
    least_id: int

    def __post_init__(self):
        if self.most_id == self.least_id:
            raise InvalidResponseError(
                f"questionnaire {self.questionnaire_index} set {self.set_index}: "
                "most and least must differ"
            )


@dataclass
class MeanChoice:
    values: dict[int, float]  # profile id -> mean encoding
    q: int


def encode_choices(
    responses: Iterable[ChoiceResponse], questionnaires: Sequence[Questionnaire]
) -> list[dict[int, int]]:
    """Per-questionnaire encoding map id -> {-1, 0, +1}.

    Requires exactly one response per choice set of every questionnaire given;
    responses must name members of their set.
    """
    by_quest: dict[int, dict[int, ChoiceResponse]] = {}
    index = {q.questionnaire_index: q for q in questionnaires}
    for r in responses:
        if r.questionnaire_index not in index:
            raise InputError(
                f"response references unknown questionnaire {r.questionnaire_index}"
            )
        slot = by_quest.setdefault(r.questionnaire_index, {})
        if r.set_index in slot:
            raise IncompleteQuestionnaireError(
                f"duplicate response for questionnaire {r.questionnaire_index} "
                f"set {r.set_index}"
            )
        slot[r.set_index] = r

    out = []
    for quest in questionnaires:
        got = by_quest.get(quest.questionnaire_index, {})
        if len(got) != len(quest.sets):
            raise IncompleteQuestionnaireError(
                f"questionnaire {quest.questionnaire_index}: "
                f"{len(got)}/{len(quest.sets)} sets answered"
            )
        enc: dict[int, int] = {}
        for cs in quest.sets:
            r = got[cs.set_index]
            members = set(cs.member_ids)
            if r.most_id not in members or r.least_id not in members:
                raise InvalidResponseError(
                    f"questionnaire {quest.questionnaire_index} set {cs.set_index}: "
                    "response names an id outside the set"
                )
            for pid in cs.member_ids:
                enc[pid] = 0
            enc[r.most_id] = 1
            enc[r.least_id] = -1
        out.append(enc)
    return out


def mean_choice(encodings: Sequence[Mapping[int, int]]) -> MeanChoice:
    """Arithmetic per-id mean across questionnaires (ascending input order)."""
    q = len(encodings)
    if q == 0:
        raise InputError("no questionnaires to aggregate")
    ids = set(encodings[0])
    for enc in encodings[1:]:
        if set(enc) != ids:
            raise InputError("questionnaires cover different id sets")
    values = {pid: sum(enc[pid] for enc in encodings) / q for pid in sorted(ids)}
    return MeanChoice(values=values, q=q)


def expected_choice(y, prior: LabelPrior, s: int):
    """F(y)^(s-1) - (1-F(y))^(s-1); accepts scalars or arrays."""
    if s < 2:
        raise InputError("set size must be >= 2")
    f = prior.cdf(y)
    out = np.asarray(f) ** (s - 1) - (1.0 - np.asarray(f)) ** (s - 1)
    return float(out) if np.ndim(y) == 0 else out


def choice_outcome_variance(y, prior: LabelPrior, s: int):
    """Variance of the single-questionnaire encoding for a label y:
    P(most) + P(least) - (P(most) - P(least))^2."""
    if s < 2:
        raise InputError("set size must be >= 2")
    f = np.asarray(prior.cdf(y))
    pmax = f ** (s - 1)
    pmin = (1.0 - f) ** (s - 1)
    out = pmax + pmin - (pmax - pmin) ** 2
    return float(out) if np.ndim(y) == 0 else out


def _invert_u(c: np.ndarray, s: int) -> np.ndarray:
    """Solve u^(s-1) - (1-u)^(s-1) = c on [0, 1] by bisection (the map is
    strictly increasing, so brackets are exact).  The fixed iteration count
    collapses the bracket to machine precision, far inside C_TOLERANCE."""
    lo = np.zeros_like(c)
    hi = np.ones_like(c)
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        g = mid ** (s - 1) - (1.0 - mid) ** (s - 1)
        too_low = g < c
        lo = np.where(too_low, mid, lo)
        hi = np.where(too_low, hi, mid)
    return 0.5 * (lo + hi)


def invert_choice(c_bar: float, prior: LabelPrior, s: int) -> float:
    """Label y with expected_choice(y) = c_bar, to 1e-9 in c-space.

    c_bar = +-1 maps to the support bounds for a uniform prior and to the
    clamped extreme quantiles for a normal prior.
    """
    if s < 2:
        raise InputError("set size must be >= 2")
    if not -1.0 <= c_bar <= 1.0:
        raise InputError(f"mean choice {c_bar} outside [-1, 1]")
    u = _invert_u(np.asarray([float(c_bar)]), s)[0]
    return float(prior.quantile(u))


def invert_choices(c_bar: np.ndarray, prior: LabelPrior, s: int) -> np.ndarray:
    """Vectorized ``invert_choice``."""
    c = np.asarray(c_bar, dtype=float)
    if s < 2:
        raise InputError("set size must be >= 2")
    if np.any(c < -1.0) or np.any(c > 1.0):
        raise InputError("mean choices outside [-1, 1]")
    return np.asarray(prior.quantile(_invert_u(c, s)))


@dataclass
class ScoreSet:
    """Aggregation output: per-profile mean choice and recovered label."""

    ids: list[int]
    c_bar: np.ndarray
    labels: np.ndarray
    q: int
    set_size: int
    prior_spec: str

    def as_dict(self) -> dict[int, float]:
        return {pid: float(y) for pid, y in zip(self.ids, self.labels)}

    def c_bar_dict(self) -> dict[int, float]:
        return {pid: float(c) for pid, c in zip(self.ids, self.c_bar)}


def scores_from_study(
    responses: Iterable[ChoiceResponse],
    questionnaires: Sequence[Questionnaire],
    prior: LabelPrior,
    s: int,
) -> ScoreSet:
    """encode -> mean -> invert for every profile in the study."""
    if not questionnaires:
        raise InputError("no questionnaires")
    sizes = {cs.member_ids.__len__() for q in questionnaires for cs in q.sets}
    if sizes != {s}:
        raise InputError(f"questionnaire set sizes {sizes} do not match s={s}")
    enc = encode_choices(responses, questionnaires)
    mc = mean_choice(enc)
    ids = sorted(mc.values)
    c = np.array([mc.values[pid] for pid in ids])
    labels = invert_choices(c, prior, s)
    return ScoreSet(
        ids=ids,
        c_bar=c,
        labels=labels,
        q=mc.q,
        set_size=s,
        prior_spec=prior.spec(),
    )
