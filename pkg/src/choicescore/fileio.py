"""File formats: designs, questionnaires, response logs, scores, models.

Tab-separated text for tabular data (floats written with shortest round-trip
repr so re-imported values are bit-identical), JSON documents for structured
records.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .catalog import (
    AttributeCatalog,
    Profile,
    catalog_from_dict,
    catalog_to_dict,
    encode_level_matrix,
)
from .choices import ChoiceResponse, ScoreSet
from .design import Design, d_criterion
from .errors import InputError, SchemaError
from .questionnaires import ChoiceSet, Questionnaire, StudyPlan
from .risk import EvalReport, LinearScorer


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".profiles.json")


def save_design(design: Design, path: str | Path) -> None:
    """TSV of coded rows (header = coded column names) plus a sidecar JSON of
    catalog and per-profile level assignments."""
    path = Path(path)
    cols = design.catalog.coded_column_names()
    lines = ["\t".join(["profile_id"] + cols)]
    for p, row in zip(design.profiles, design.coded_matrix):
        lines.append("\t".join([str(p.id)] + [repr(float(v)) for v in row]))
    path.write_text("\n".join(lines) + "\n")
    sidecar = {
        "catalog": catalog_to_dict(design.catalog),
        "log_det": design.log_det,
        "profiles": [
            {
                "id": p.id,
                "levels": {
                    a.name: a.levels[lv]
                    for a, lv in zip(design.catalog.attributes, p.levels)
                },
            }
            for p in design.profiles
        ],
    }
    _sidecar(path).write_text(json.dumps(sidecar, indent=2) + "\n")


def load_design(path: str | Path) -> Design:
    path = Path(path)
    doc = json.loads(_sidecar(path).read_text())
    catalog = catalog_from_dict(doc["catalog"])
    level_index = {
        a.name: {lv: i for i, lv in enumerate(a.levels)} for a in catalog.attributes
    }
    profiles = []
    for item in doc["profiles"]:
        try:
            levels = tuple(
                level_index[a.name][item["levels"][a.name]]
                for a in catalog.attributes
            )
        except KeyError as exc:
            raise SchemaError(f"design sidecar references unknown level: {exc}") from exc
        profiles.append(Profile(id=int(item["id"]), levels=levels))
    coded = encode_level_matrix(
        np.array([p.levels for p in profiles], dtype=np.int64), catalog
    )
    return Design(catalog, profiles, coded, d_criterion(coded))


# ---------------------------------------------------------------------------
# Questionnaires
# ---------------------------------------------------------------------------


def questionnaires_to_dict(
    questionnaires: Sequence[Questionnaire],
    study_id: str = "",
    plan: Optional[StudyPlan] = None,
) -> dict:
    doc = {
        "study_id": study_id,
        "plan": None
        if plan is None
        else {
            "n": plan.n,
            "p": plan.p,
            "set_size": plan.set_size,
            "primes": list(plan.primes),
        },
        "questionnaires": [
            {
                "index": q.questionnaire_index,
                "method": q.method,
                "sets": [list(s.member_ids) for s in q.sets],
            }
            for q in questionnaires
        ],
    }
    return doc


def questionnaires_from_dict(doc: dict) -> list[Questionnaire]:
    out = []
    for item in doc["questionnaires"]:
        sets = tuple(
            ChoiceSet(set_index=k, member_ids=tuple(int(v) for v in members))
            for k, members in enumerate(item["sets"])
        )
        out.append(
            Questionnaire(
                questionnaire_index=int(item["index"]),
                sets=sets,
                method=item.get("method", "group"),
            )
        )
    return out


def save_questionnaires(
    questionnaires: Sequence[Questionnaire],
    path: str | Path,
    study_id: str = "",
    plan: Optional[StudyPlan] = None,
) -> None:
    Path(path).write_text(
        json.dumps(questionnaires_to_dict(questionnaires, study_id, plan), indent=2)
        + "\n"
    )


def load_questionnaires(path: str | Path) -> list[Questionnaire]:
    return questionnaires_from_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# Response log: tab-separated
# labeler_id, questionnaire_index, set_index, most_id, least_id, timestamp
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResponseRecord:
    labeler_id: str
    response: ChoiceResponse
    received_at: str

    def line(self) -> str:
        r = self.response
        return "\t".join(
            [
                self.labeler_id,
                str(r.questionnaire_index),
                str(r.set_index),
                str(r.most_id),
                str(r.least_id),
                self.received_at,
            ]
        )


def now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


def parse_response_line(line: str) -> ResponseRecord:
    parts = line.rstrip("\n").split("\t")
    if len(parts) != 6:
        raise SchemaError(f"malformed response line: {line!r}")
    labeler, qi, si, most, least, ts = parts
    return ResponseRecord(
        labeler_id=labeler,
        response=ChoiceResponse(
            questionnaire_index=int(qi),
            set_index=int(si),
            most_id=int(most),
            least_id=int(least),
        ),
        received_at=ts,
    )


def append_response(path: str | Path, record: ResponseRecord) -> None:
    with open(path, "a") as fh:
        fh.write(record.line() + "\n")


def load_responses(path: str | Path) -> list[ResponseRecord]:
    out = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            out.append(parse_response_line(line))
    return out


def save_responses(path: str | Path, records: Iterable[ResponseRecord]) -> None:
    Path(path).write_text("".join(r.line() + "\n" for r in records))


# ---------------------------------------------------------------------------
# Scores
# ---------------------------------------------------------------------------


def save_scores(scores: ScoreSet, path: str | Path) -> None:
    lines = ["id\tc_bar\ty"]
    for pid, c, y in zip(scores.ids, scores.c_bar, scores.labels):
        lines.append(f"{pid}\t{repr(float(c))}\t{repr(float(y))}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_scores(path: str | Path) -> dict[int, tuple[float, float]]:
    """id -> (c_bar, y)."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].split("\t") != ["id", "c_bar", "y"]:
        raise SchemaError("scores file must start with 'id\\tc_bar\\ty'")
    out = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        pid, c, y = line.split("\t")
        out[int(pid)] = (float(c), float(y))
    return out


def load_labels(path: str | Path) -> dict[int, float]:
    return {pid: y for pid, (_, y) in load_scores(path).items()}


# ---------------------------------------------------------------------------
# Model + evaluation report
# ---------------------------------------------------------------------------


def save_model(
    scorer: LinearScorer,
    path: str | Path,
    catalog: AttributeCatalog,
    threshold: Optional[float] = None,
) -> None:
    doc = {
        "weights": [float(w) for w in scorer.weights],
        "bias": scorer.bias,
        "link": scorer.link,
        "threshold": threshold,
        "catalog_fingerprint": catalog.fingerprint(),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_model(path: str | Path) -> tuple[LinearScorer, Optional[float], str]:
    doc = json.loads(Path(path).read_text())
    scorer = LinearScorer(
        weights=np.array(doc["weights"], dtype=float),
        bias=float(doc["bias"]),
        link=doc["link"],
    )
    return scorer, doc.get("threshold"), doc.get("catalog_fingerprint", "")


def save_report(report: EvalReport, path: str | Path) -> None:
    """ROC as TSV next to a JSON summary (same stem, .json suffix)."""
    path = Path(path)
    lines = ["threshold\tfpr\ttpr"]
    for fpr, tpr, t in report.roc:
        lines.append(f"{repr(t)}\t{repr(fpr)}\t{repr(tpr)}")
    path.write_text("\n".join(lines) + "\n")
    summary = {
        "auc": report.auc,
        "classification_error": report.classification_error,
        "fnr": report.fnr,
        "threshold": report.threshold,
        "fnr_tuned_threshold": report.fnr_tuned_threshold,
        "fnr_tuned_saturated": report.fnr_tuned_saturated,
        "counts": report.counts,
    }
    path.with_suffix(".json").write_text(json.dumps(summary, indent=2) + "\n")
