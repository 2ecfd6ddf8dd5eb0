"""HTTP surface over the study service (JSON bodies, 4xx with machine codes).

Auth is a pluggable bearer-token check: with a labeler roster configured,
session creation requires a rostered labeler and session calls must carry
``Authorization: Bearer <labeler_id>`` (dev mode: the token is the labeler
id).  Without a roster the service is open, which is the default for local
collection runs.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Header, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from ..catalog import catalog_from_dict
from ..errors import AuthError, ChoiceScoreError
from .core import DEFAULT_MINIMUM_QUESTIONNAIRES, StudyService


class CreateStudyBody(BaseModel):
    n: int
    seed: int = 0
    prior: str = "uniform:-1,1"
    catalog: Optional[dict] = None
    restarts: int = 5
    study_id: Optional[str] = None


class CreateSessionBody(BaseModel):
    labeler_id: str


class SubmitBody(BaseModel):
    set_index: int
    most_id: int
    least_id: int


class AggregateBody(BaseModel):
    minimum_questionnaires: int = DEFAULT_MINIMUM_QUESTIONNAIRES


def create_app(
    service: StudyService,
    roster: Optional[set[str]] = None,
    allow_origins: Optional[list[str]] = None,
) -> FastAPI:
    app = FastAPI(title="choicescore study service")
    # the labeler page is static and may be served from another origin
    app.add_middleware(
        CORSMiddleware,
        allow_origins=allow_origins if allow_origins is not None else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ChoiceScoreError)
    async def _app_error(request: Request, exc: ChoiceScoreError):
        return JSONResponse(
            status_code=exc.http_status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    def check_token(labeler_id: str, authorization: Optional[str]) -> None:
        if roster is None:
            return
        if not authorization or not authorization.startswith("Bearer "):
            raise AuthError("missing bearer token")
        if authorization.removeprefix("Bearer ") != labeler_id:
            raise AuthError("token does not match the session's labeler")

    @app.post("/studies")
    def create_study(body: CreateStudyBody):
        catalog = catalog_from_dict(body.catalog) if body.catalog else None
        study = service.create_study(
            n=body.n,
            seed=body.seed,
            prior=body.prior,
            catalog=catalog,
            restarts=body.restarts,
            study_id=body.study_id,
        )
        return {
            "study_id": study.id,
            "n": study.plan.n,
            "p": study.plan.p,
            "set_size": study.plan.set_size,
            "primes": list(study.plan.primes),
            "status": study.status,
        }

    @app.get("/studies/{study_id}")
    def get_study(study_id: str):
        study = service.get_study(study_id)
        return {
            "study_id": study.id,
            "status": study.status,
            "n": study.plan.n,
            "p": study.plan.p,
            "set_size": study.plan.set_size,
            "attributes": [a.name for a in study.catalog.attributes],
            "completed_questionnaires": len(study.completed_indices()),
        }

    @app.post("/studies/{study_id}/open")
    def open_study(study_id: str):
        study = service.open_study(study_id)
        return {"study_id": study.id, "status": study.status}

    @app.post("/studies/{study_id}/sessions")
    def create_session(study_id: str, body: CreateSessionBody,
                       authorization: Optional[str] = Header(default=None)):
        if roster is not None and body.labeler_id not in roster:
            raise AuthError(f"labeler {body.labeler_id!r} is not on the roster")
        check_token(body.labeler_id, authorization)
        session_id, session = service.assign_questionnaire(study_id, body.labeler_id)
        study = service.get_study(study_id)
        return {
            "session_id": session_id,
            "labeler_id": session.labeler_id,
            "questionnaire_index": session.questionnaire_index,
            "cursor": session.cursor,
            "total_sets": study.p,
        }

    def _session_labeler(session_id: str) -> str:
        study, session = service._find_session(session_id)
        return session.labeler_id

    @app.get("/sessions/{session_id}/next")
    def next_set(session_id: str,
                 authorization: Optional[str] = Header(default=None)):
        check_token(_session_labeler(session_id), authorization)
        return service.next_choice_set(session_id)

    @app.post("/sessions/{session_id}/responses")
    def submit(session_id: str, body: SubmitBody,
               authorization: Optional[str] = Header(default=None)):
        check_token(_session_labeler(session_id), authorization)
        return service.submit_response(
            session_id, body.set_index, body.most_id, body.least_id
        )

    @app.post("/studies/{study_id}/aggregate")
    def aggregate(study_id: str, body: AggregateBody = AggregateBody()):
        scores, manifest = service.aggregate_study(
            study_id, body.minimum_questionnaires
        )
        return {
            "manifest": manifest,
            "scores": [
                {"id": pid, "c_bar": float(c), "y": float(y)}
                for pid, c, y in zip(scores.ids, scores.c_bar, scores.labels)
            ],
        }

    @app.get("/studies/{study_id}/scores")
    def get_scores(study_id: str):
        scores, manifest = service.peek_scores(study_id)
        return {
            "manifest": manifest,
            "scores": [
                {"id": pid, "c_bar": c, "y": y}
                for pid, (c, y) in sorted(scores.items())
            ],
        }

    @app.get("/studies/{study_id}/responses.log")
    def export_responses(study_id: str):
        service.get_study(study_id)
        path = service.responses_path(study_id)
        text = path.read_text() if path.exists() else ""
        return PlainTextResponse(text)

    return app
