"""Shared error taxonomy.

Every error carries a machine-readable ``code`` so the HTTP service and the
CLI can surface failures uniformly.
"""


class ChoiceScoreError(Exception):
    """Base class; ``code`` is the wire-format error identifier."""

    code = "error"
    http_status = 400

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class SchemaError(ChoiceScoreError):
    code = "schema-error"
    http_status = 422


class InputError(ChoiceScoreError):
    code = "input-error"
    http_status = 422


class DesignInfeasibleError(ChoiceScoreError):
    code = "design-infeasible"
    http_status = 422


class PlanInfeasibleError(ChoiceScoreError):
    code = "plan-infeasible"
    http_status = 422


class IncompleteQuestionnaireError(ChoiceScoreError):
    code = "incomplete-questionnaire"
    http_status = 409


class InvalidResponseError(ChoiceScoreError):
    code = "invalid-response"
    http_status = 422


class SequenceError(ChoiceScoreError):
    code = "sequence-error"
    http_status = 409


class ConflictError(ChoiceScoreError):
    code = "conflict"
    http_status = 409


class CapacityError(ChoiceScoreError):
    code = "capacity"
    http_status = 409


class NotReadyError(ChoiceScoreError):
    code = "not-ready"
    http_status = 409


class NotFoundError(ChoiceScoreError):
    code = "not-found"
    http_status = 404


class AuthError(ChoiceScoreError):
    code = "auth"
    http_status = 401


class DegenerateLabelsError(ChoiceScoreError):
    code = "degenerate-labels"
    http_status = 422


class RankError(ChoiceScoreError):
    code = "rank-error"
    http_status = 422
