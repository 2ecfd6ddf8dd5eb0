"""Choice-set construction: cyclic-shift diversifier and random baseline.

For n = 4p profiles (p prime) the diversifier shuffles ids into four lists
A, B, C, D of length p and builds questionnaire t (t = 0..p-1) from sets

    S_k(t) = < A[k], B[(k + t*p1) % p], C[(k + t*p2) % p], D[(k + t*p3) % p] >.

With the three shift primes distinct and nonzero mod p, every cross-list pair
difference is hit exactly once over the full cycle, so the p questionnaires
cover 6*p^2 distinct profile pairs with zero repeats and the cycle closes at
t = p.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .catalog import Profile
from .errors import InputError, PlanInfeasibleError

GROUP_SET_SIZE = 4


@dataclass(frozen=True)
class StudyPlan:
    n: int
    p: int
    set_size: int
    primes: tuple[int, int, int]

    def __post_init__(self):
        if self.n != self.set_size * self.p:
            raise InputError("plan requires n = set_size * p")


@dataclass(frozen=True)
class ChoiceSet:
    set_index: int
    member_ids: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.member_ids)) != len(self.member_ids):
            raise InputError(f"choice set {self.set_index} has duplicate members")


@dataclass(frozen=True)
class Questionnaire:
    questionnaire_index: int
    sets: tuple[ChoiceSet, ...]
    method: str = "group"

    def all_ids(self) -> list[int]:
        return [pid for s in self.sets for pid in s.member_ids]

    @property
    def set_size(self) -> int:
        return len(self.sets[0].member_ids)

    def set_by_index(self, set_index: int) -> ChoiceSet:
        if not 0 <= set_index < len(self.sets):
            raise InputError(f"set index {set_index} out of range")
        return self.sets[set_index]


def _is_prime(v: int) -> bool:
    if v < 2:
        return False
    if v % 2 == 0:
        return v == 2
    f = 3
    while f * f <= v:
        if v % f == 0:
            return False
        f += 2
    return True


def _primes_from(start: int):
    v = start
    while True:
        if _is_prime(v):
            yield v
        v += 1


def plan_study(n: int) -> StudyPlan:
    """Derive the size-4 plan for n profiles: p = n/4 choice sets and the
    first triple of consecutive primes whose pairwise products exceed n and
    whose residues mod p are pairwise distinct and nonzero.

    The residue condition is what actually guarantees zero repeated pairs
    across the cycle; p < 5 admits no such triple, so the smallest feasible
    study is n = 20.
    """
    if n <= 0 or n % GROUP_SET_SIZE != 0:
        raise PlanInfeasibleError(f"n={n} is not a multiple of {GROUP_SET_SIZE}")
    p = n // GROUP_SET_SIZE
    if not _is_prime(p):
        raise PlanInfeasibleError(f"n={n}: n/4={p} is not prime; adjust n")
    if p < 5:
        raise PlanInfeasibleError(
            f"n={n}: p={p} has fewer than three distinct nonzero residues"
        )
    window: list[int] = []
    for q in _primes_from(5):
        window.append(q)
        if len(window) < 3:
            continue
        window = window[-3:]
        p1, p2, p3 = window
        if p1 * p2 <= n:  # smallest pairwise product
            continue
        residues = {p1 % p, p2 % p, p3 % p}
        if 0 in residues or len(residues) != 3:
            continue
        return StudyPlan(n=n, p=p, set_size=GROUP_SET_SIZE, primes=(p1, p2, p3))
    raise PlanInfeasibleError(f"no prime triple found for n={n}")  # pragma: no cover


def generate_questionnaires(
    profiles: Sequence[Profile], plan: StudyPlan, seed: int
) -> list[Questionnaire]:
    """The full cycle of p pair-diverse questionnaires over a seeded shuffle."""
    if len(profiles) != plan.n:
        raise InputError(f"expected {plan.n} profiles, got {len(profiles)}")
    ids = np.array([pr.id for pr in profiles], dtype=np.int64)
    if len(set(ids.tolist())) != len(ids):
        raise InputError("profile ids must be unique")
    rng = np.random.default_rng(seed)
    shuffled = ids[rng.permutation(plan.n)]
    p = plan.p
    lists = [shuffled[i * p : (i + 1) * p] for i in range(GROUP_SET_SIZE)]
    a, b, c, d = lists
    p1, p2, p3 = plan.primes

    out = []
    for t in range(p):
        sets = tuple(
            ChoiceSet(
                set_index=k,
                member_ids=(
                    int(a[k]),
                    int(b[(k + t * p1) % p]),
                    int(c[(k + t * p2) % p]),
                    int(d[(k + t * p3) % p]),
                ),
            )
            for k in range(p)
        )
        out.append(Questionnaire(questionnaire_index=t, sets=sets, method="group"))
    return out


def random_questionnaires(
    profiles: Sequence[Profile], set_size: int, q: int, seed: int
) -> list[Questionnaire]:
    """q independent seeded uniform partitions into sets of ``set_size``."""
    n = len(profiles)
    if set_size < 2:
        raise InputError("set_size must be >= 2")
    if n % set_size != 0:
        raise InputError(f"n={n} not divisible by set size {set_size}")
    if q < 1:
        raise InputError("q must be >= 1")
    ids = np.array([pr.id for pr in profiles], dtype=np.int64)
    rng = np.random.default_rng(seed)
    out = []
    for t in range(q):
        perm = ids[rng.permutation(n)]
        sets = tuple(
            ChoiceSet(
                set_index=k,
                member_ids=tuple(int(v) for v in perm[k * set_size : (k + 1) * set_size]),
            )
            for k in range(n // set_size)
        )
        out.append(Questionnaire(questionnaire_index=t, sets=sets, method="random"))
    return out


def extended_questionnaires(
    profiles: Sequence[Profile], plan: StudyPlan, q: int, seed: int
) -> list[Questionnaire]:
    """Group cycle first; past the cycle, seeded random partitions flagged as
    such (the construction guarantees only p unique questionnaires)."""
    cycle = generate_questionnaires(profiles, plan, seed)
    if q <= plan.p:
        return cycle[:q]
    extra = random_questionnaires(profiles, plan.set_size, q - plan.p, seed + 1)
    out = list(cycle)
    for i, quest in enumerate(extra):
        out.append(
            Questionnaire(
                questionnaire_index=plan.p + i, sets=quest.sets, method="random"
            )
        )
    return out


def pair_coverage(
    questionnaires: Iterable[Questionnaire], n: int
) -> tuple[int, float, list[float]]:
    """Unique co-occurring pairs, their fraction of C(n,2), and the cumulative
    fraction after each questionnaire."""
    total = n * (n - 1) // 2
    seen: set[frozenset] = set()
    curve = []
    for quest in questionnaires:
        for s in quest.sets:
            for pair in itertools.combinations(s.member_ids, 2):
                seen.add(frozenset(pair))
        curve.append(len(seen) / total)
    return len(seen), len(seen) / total, curve


def validate_partition(questionnaire: Questionnaire, expected_ids: set[int]) -> None:
    """Every expected id exactly once across the questionnaire's sets."""
    ids = questionnaire.all_ids()
    if len(ids) != len(set(ids)) or set(ids) != expected_ids:
        raise InputError(
            f"questionnaire {questionnaire.questionnaire_index} is not a "
            "partition of the profile ids"
        )
