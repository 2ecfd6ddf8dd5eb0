"""Study lifecycle: create, open, assign questionnaires, collect responses,
aggregate.

Persistence is plain files under one directory per study: a JSON snapshot of
the immutable study content plus two append-only logs (assignments and
responses).  All mutable state — sessions, cursors, aggregation input — is a
pure fold over the logs, so reloading a data directory reconstructs the exact
service state (and the auditable logs are the source of truth, not a cache).

Writes to one study are serialized through a per-study lock; reads of
immutable content are lock-free.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

import numpy as np

from ..catalog import (
    AttributeCatalog,
    Profile,
    catalog_from_dict,
    catalog_to_dict,
    encode_level_matrix,
    standin_catalog,
)
from ..choices import ChoiceResponse, ScoreSet, scores_from_study
from ..design import Design, best_design, d_criterion
from ..errors import (
    CapacityError,
    ConflictError,
    InputError,
    InvalidResponseError,
    NotFoundError,
    NotReadyError,
    SchemaError,
    SequenceError,
)
from ..fileio import (
    ResponseRecord,
    append_response,
    load_responses,
    now_iso,
    questionnaires_from_dict,
    questionnaires_to_dict,
    save_scores,
)
from ..priors import LabelPrior, parse_prior
from ..questionnaires import Questionnaire, StudyPlan, generate_questionnaires, plan_study

DEFAULT_MINIMUM_QUESTIONNAIRES = 20

_LABELER_RE = re.compile(r"^[A-Za-z0-9_.-]{1,64}$")

STATUS_ORDER = ("draft", "collecting", "aggregated")


@dataclass
class LabelerSession:
    labeler_id: str
    questionnaire_index: int
    cursor: int = 0

    def completed(self, total_sets: int) -> bool:
        return self.cursor >= total_sets


@dataclass
class Study:
    id: str
    catalog: AttributeCatalog
    design: Design
    plan: StudyPlan
    questionnaires: list[Questionnaire]
    prior: LabelPrior
    seed: int
    status: str = "draft"
    sessions: dict[str, LabelerSession] = field(default_factory=dict)
    assignment_order: list[str] = field(default_factory=list)

    @property
    def p(self) -> int:
        return self.plan.p

    def assigned_indices(self) -> set[int]:
        return {s.questionnaire_index for s in self.sessions.values()}

    def completed_indices(self) -> list[int]:
        return sorted(
            s.questionnaire_index
            for s in self.sessions.values()
            if s.completed(self.p)
        )


def _session_id(study_id: str, labeler_id: str, questionnaire_index: int) -> str:
    return f"{study_id}~q{questionnaire_index}~{labeler_id}"


class StudyService:
    """File-backed study orchestration; one instance owns a data directory."""

    def __init__(self, data_dir: str | Path, allow_multiple: bool = False):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.allow_multiple = allow_multiple
        self._studies: dict[str, Study] = {}
        self._locks: dict[str, threading.RLock] = {}
        self._registry_lock = threading.RLock()
        for entry in sorted(self.data_dir.iterdir()):
            if entry.is_dir() and (entry / "study.json").exists():
                self._load_study(entry.name)

    # -- paths ------------------------------------------------------------

    def study_dir(self, study_id: str) -> Path:
        return self.data_dir / study_id

    def responses_path(self, study_id: str) -> Path:
        return self.study_dir(study_id) / "responses.log"

    def assignments_path(self, study_id: str) -> Path:
        return self.study_dir(study_id) / "assignments.log"

    def scores_path(self, study_id: str) -> Path:
        return self.study_dir(study_id) / "scores.tsv"

    def manifest_path(self, study_id: str) -> Path:
        return self.study_dir(study_id) / "manifest.json"

    def _lock(self, study_id: str) -> threading.RLock:
        with self._registry_lock:
            return self._locks.setdefault(study_id, threading.RLock())

    # -- lifecycle ----------------------------------------------------------

    def create_study(
        self,
        n: int,
        seed: int,
        prior: LabelPrior | str = "uniform:-1,1",
        catalog: Optional[AttributeCatalog] = None,
        restarts: int = 5,
        study_id: Optional[str] = None,
    ) -> Study:
        """Generate design + plan + the full questionnaire cycle and persist."""
        plan = plan_study(n)  # fail before paying for the design
        catalog = catalog or standin_catalog()
        if isinstance(prior, str):
            prior = parse_prior(prior)
        design = best_design(catalog, n, restarts=restarts, seed=seed)
        questionnaires = generate_questionnaires(design.profiles, plan, seed)

        sid = study_id or f"study-{n}-s{seed}"
        with self._registry_lock:
            base, k = sid, 2
            while self.study_dir(sid).exists():
                sid = f"{base}-{k}"
                k += 1
            study = Study(
                id=sid,
                catalog=catalog,
                design=design,
                plan=plan,
                questionnaires=questionnaires,
                prior=prior,
                seed=seed,
            )
            self._persist_snapshot(study)
            self.responses_path(sid).touch()
            self.assignments_path(sid).touch()
            self._studies[sid] = study
        return study

    def get_study(self, study_id: str) -> Study:
        try:
            return self._studies[study_id]
        except KeyError:
            raise NotFoundError(f"no study {study_id!r}") from None

    def open_study(self, study_id: str) -> Study:
        study = self.get_study(study_id)
        with self._lock(study_id):
            if study.status == "draft":
                study.status = "collecting"
                self._persist_snapshot(study)
            elif study.status != "collecting":
                raise ConflictError(f"study {study_id} is {study.status}")
        return study

    # -- sessions -----------------------------------------------------------

    def assign_questionnaire(self, study_id: str, labeler_id: str) -> tuple[str, LabelerSession]:
        if not _LABELER_RE.match(labeler_id or ""):
            raise InputError(f"invalid labeler id {labeler_id!r}")
        study = self.get_study(study_id)
        with self._lock(study_id):
            if study.status != "collecting":
                raise NotReadyError(f"study {study_id} is {study.status}, not collecting")
            active = [
                (sid, s)
                for sid, s in study.sessions.items()
                if s.labeler_id == labeler_id
            ]
            incomplete = [(sid, s) for sid, s in active if not s.completed(study.p)]
            if incomplete:
                return incomplete[0]  # idempotent re-request
            if active and not self.allow_multiple:
                raise ConflictError(
                    f"labeler {labeler_id!r} already completed a questionnaire"
                )
            taken = study.assigned_indices()
            free = [i for i in range(study.p) if i not in taken]
            if not free:
                raise CapacityError("all questionnaires are assigned")
            qi = free[0]
            session = LabelerSession(labeler_id=labeler_id, questionnaire_index=qi)
            sid = _session_id(study_id, labeler_id, qi)
            study.sessions[sid] = session
            study.assignment_order.append(sid)
            with open(self.assignments_path(study_id), "a") as fh:
                fh.write(f"{labeler_id}\t{qi}\t{now_iso()}\n")
            return sid, session

    def _find_session(self, session_id: str) -> tuple[Study, LabelerSession]:
        study_id = session_id.split("~", 1)[0]
        study = self.get_study(study_id)
        try:
            return study, study.sessions[session_id]
        except KeyError:
            raise NotFoundError(f"no session {session_id!r}") from None

    def next_choice_set(self, session_id: str) -> dict:
        """Payload for the set at the cursor; does not advance the cursor."""
        study, session = self._find_session(session_id)
        if session.completed(study.p):
            return {"done": True, "answered": session.cursor, "total": study.p}
        quest = study.questionnaires[session.questionnaire_index]
        cs = quest.sets[session.cursor]
        by_id = {p.id: p for p in study.design.profiles}
        profiles = []
        for pid in cs.member_ids:
            p = by_id[pid]
            profiles.append(
                {
                    "id": pid,
                    "levels": {
                        a.name: a.levels[lv]
                        for a, lv in zip(study.catalog.attributes, p.levels)
                    },
                }
            )
        return {
            "done": False,
            "set_index": cs.set_index,
            "answered": session.cursor,
            "total": study.p,
            "profiles": profiles,
        }

    def submit_response(
        self, session_id: str, set_index: int, most_id: int, least_id: int
    ) -> dict:
        study, session = self._find_session(session_id)
        with self._lock(study.id):
            if study.status != "collecting":
                raise ConflictError(f"study {study.id} is {study.status}")
            if session.completed(study.p) or set_index < session.cursor:
                raise ConflictError(
                    f"set {set_index} already answered; responses are immutable"
                )
            if set_index > session.cursor:
                raise SequenceError(
                    f"expected set {session.cursor}, got {set_index}: "
                    "sets must be answered in order"
                )
            quest = study.questionnaires[session.questionnaire_index]
            cs = quest.sets[set_index]
            members = set(cs.member_ids)
            if most_id == least_id:
                raise InvalidResponseError("most and least must differ")
            if most_id not in members or least_id not in members:
                raise InvalidResponseError("ids must belong to the presented set")
            record = ResponseRecord(
                labeler_id=session.labeler_id,
                response=ChoiceResponse(
                    questionnaire_index=session.questionnaire_index,
                    set_index=set_index,
                    most_id=most_id,
                    least_id=least_id,
                ),
                received_at=now_iso(),
            )
            append_response(self.responses_path(study.id), record)
            session.cursor += 1
            return {
                "accepted": True,
                "cursor": session.cursor,
                "completed": session.completed(study.p),
            }

    # -- aggregation ----------------------------------------------------------

    def aggregate_study(
        self,
        study_id: str,
        minimum_questionnaires: int = DEFAULT_MINIMUM_QUESTIONNAIRES,
    ) -> tuple[ScoreSet, dict]:
        study = self.get_study(study_id)
        with self._lock(study_id):
            if study.status == "aggregated":
                raise ConflictError(f"study {study_id} is already aggregated")
            completed = study.completed_indices()
            if len(completed) < minimum_questionnaires:
                raise NotReadyError(
                    f"{len(completed)} completed questionnaires, "
                    f"need {minimum_questionnaires}"
                )
            scores, manifest = self._compute_scores(study, completed)
            save_scores(scores, self.scores_path(study_id))
            self.manifest_path(study_id).write_text(
                json.dumps(manifest, indent=2) + "\n"
            )
            study.status = "aggregated"
            self._persist_snapshot(study)
            return scores, manifest

    def _compute_scores(
        self, study: Study, completed: list[int]
    ) -> tuple[ScoreSet, dict]:
        records = load_responses(self.responses_path(study.id))
        chosen = set(completed)
        responses = [r.response for r in records if r.response.questionnaire_index in chosen]
        quests = [study.questionnaires[i] for i in completed]
        scores = scores_from_study(responses, quests, study.prior, study.plan.set_size)
        partial = sorted(
            s.questionnaire_index
            for s in study.sessions.values()
            if 0 < s.cursor < study.p
        )
        labelers = {
            str(s.questionnaire_index): s.labeler_id
            for s in study.sessions.values()
            if s.questionnaire_index in chosen
        }
        manifest = {
            "study_id": study.id,
            "q_used": len(completed),
            "questionnaire_indices": completed,
            "labelers": labelers,
            "prior": study.prior.spec(),
            "set_size": study.plan.set_size,
            "excluded_partial": partial,
        }
        return scores, manifest

    def peek_scores(self, study_id: str) -> tuple[dict, dict]:
        study = self.get_study(study_id)
        if study.status != "aggregated":
            raise NotReadyError(f"study {study_id} is not aggregated")
        from ..fileio import load_scores

        scores = load_scores(self.scores_path(study_id))
        manifest = json.loads(self.manifest_path(study_id).read_text())
        return scores, manifest

    # -- offline ingestion -----------------------------------------------------

    def import_responses(self, study_id: str, records: list[ResponseRecord]) -> int:
        """Replay an exported response log through the normal submit path,
        creating sessions as labelers appear.  Returns accepted count."""
        study = self.get_study(study_id)
        accepted = 0
        for rec in records:
            sid = _session_id(study_id, rec.labeler_id, rec.response.questionnaire_index)
            if sid not in study.sessions:
                got_sid, _ = self.assign_questionnaire(study_id, rec.labeler_id)
                if got_sid != sid:
                    raise ConflictError(
                        f"log assigns {rec.labeler_id!r} to questionnaire "
                        f"{rec.response.questionnaire_index}, service assigned "
                        f"{got_sid!r}; import logs into a fresh study"
                    )
            self.submit_response(
                sid, rec.response.set_index, rec.response.most_id, rec.response.least_id
            )
            accepted += 1
        return accepted

    # -- persistence -----------------------------------------------------------

    def _persist_snapshot(self, study: Study) -> None:
        d = self.study_dir(study.id)
        d.mkdir(parents=True, exist_ok=True)
        doc = {
            "id": study.id,
            "seed": study.seed,
            "status": study.status,
            "prior": study.prior.spec(),
            "catalog": catalog_to_dict(study.catalog),
            "plan": {
                "n": study.plan.n,
                "p": study.plan.p,
                "set_size": study.plan.set_size,
                "primes": list(study.plan.primes),
            },
            "profiles": [
                {"id": p.id, "levels": list(p.levels)} for p in study.design.profiles
            ],
            "questionnaires": questionnaires_to_dict(study.questionnaires)[
                "questionnaires"
            ],
        }
        (d / "study.json").write_text(json.dumps(doc) + "\n")

    def _load_study(self, study_id: str) -> None:
        doc = json.loads((self.study_dir(study_id) / "study.json").read_text())
        catalog = catalog_from_dict(doc["catalog"])
        profiles = [
            Profile(id=int(it["id"]), levels=tuple(it["levels"]))
            for it in doc["profiles"]
        ]
        levels = np.array([p.levels for p in profiles], dtype=np.int64)
        coded = encode_level_matrix(levels, catalog)
        design = Design(catalog, profiles, coded, d_criterion(coded))
        plan = StudyPlan(
            n=doc["plan"]["n"],
            p=doc["plan"]["p"],
            set_size=doc["plan"]["set_size"],
            primes=tuple(doc["plan"]["primes"]),
        )
        questionnaires = questionnaires_from_dict(
            {"questionnaires": doc["questionnaires"]}
        )
        study = Study(
            id=study_id,
            catalog=catalog,
            design=design,
            plan=plan,
            questionnaires=questionnaires,
            prior=parse_prior(doc["prior"]),
            seed=int(doc["seed"]),
            status=doc["status"],
        )
        self._replay_logs(study)
        self._studies[study_id] = study

    def _replay_logs(self, study: Study) -> None:
        apath = self.assignments_path(study.id)
        if apath.exists():
            for line in apath.read_text().splitlines():
                if not line.strip():
                    continue
                labeler, qi, _ts = line.split("\t")
                sid = _session_id(study.id, labeler, int(qi))
                study.sessions[sid] = LabelerSession(
                    labeler_id=labeler, questionnaire_index=int(qi)
                )
                study.assignment_order.append(sid)
        rpath = self.responses_path(study.id)
        if rpath.exists():
            for rec in load_responses(rpath):
                sid = _session_id(
                    study.id, rec.labeler_id, rec.response.questionnaire_index
                )
                session = study.sessions.get(sid)
                if session is None or rec.response.set_index != session.cursor:
                    raise SchemaError(
                        f"corrupt response log for study {study.id}: "
                        f"unexpected record {rec.line()!r}"
                    )
                session.cursor += 1
