"""Attribute catalogs and profile coding.

A catalog is an ordered list of named attributes, each with at least two
discrete levels.  Profiles pick one level per attribute and are coded into a
model-matrix row as an intercept plus dummy columns (reference level = level 0
codes to all zeros within its attribute block), so the coded dimension is
``m = 1 + sum(level_count - 1)``.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import SchemaError


@dataclass(frozen=True)
class Attribute:
    name: str
    levels: tuple[str, ...]

    def __post_init__(self):
        if len(self.levels) < 2:
            raise SchemaError(f"attribute {self.name!r} needs >= 2 levels")
        if len(set(self.levels)) != len(self.levels):
            raise SchemaError(f"attribute {self.name!r} has duplicate levels")


@dataclass(frozen=True)
class AttributeCatalog:
    attributes: tuple[Attribute, ...]

    def __post_init__(self):
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise SchemaError("attribute names must be unique")
        if not self.attributes:
            raise SchemaError("catalog needs at least one attribute")

    @property
    def coded_dim(self) -> int:
        """Intercept plus one dummy column per non-reference level."""
        return 1 + sum(len(a.levels) - 1 for a in self.attributes)

    @property
    def level_counts(self) -> tuple[int, ...]:
        return tuple(len(a.levels) for a in self.attributes)

    def coded_column_names(self) -> list[str]:
        cols = ["intercept"]
        for a in self.attributes:
            cols.extend(f"{a.name}={lv}" for lv in a.levels[1:])
        return cols

    def n_combinations(self) -> int:
        out = 1
        for a in self.attributes:
            out *= len(a.levels)
        return out

    def fingerprint(self) -> str:
        payload = json.dumps(catalog_to_dict(self), sort_keys=True).encode()
        return "sha256:" + hashlib.sha256(payload).hexdigest()[:16]


@dataclass(frozen=True)
class Profile:
    """One synthetic example: a level index per catalog attribute."""

    id: int
    levels: tuple[int, ...]

    def __post_init__(self):
        if self.id < 0:
            raise SchemaError("profile id must be >= 0")


def encode_profile(profile: Profile, catalog: AttributeCatalog) -> np.ndarray:
    """Code a profile as [1, dummy blocks...]; reference level codes to zeros."""
    if len(profile.levels) != len(catalog.attributes):
        raise SchemaError(
            f"profile {profile.id} has {len(profile.levels)} levels, "
            f"catalog has {len(catalog.attributes)} attributes"
        )
    row = np.zeros(catalog.coded_dim)
    row[0] = 1.0
    offset = 1
    for lv, attr in zip(profile.levels, catalog.attributes):
        k = len(attr.levels)
        if not 0 <= lv < k:
            raise SchemaError(
                f"profile {profile.id}: level index {lv} out of range for "
                f"attribute {attr.name!r}"
            )
        if lv > 0:
            row[offset + lv - 1] = 1.0
        offset += k - 1
    return row


def encode_level_matrix(levels: np.ndarray, catalog: AttributeCatalog) -> np.ndarray:
    """Vectorized coding of an (n, n_attrs) integer level matrix."""
    n = levels.shape[0]
    out = np.zeros((n, catalog.coded_dim))
    out[:, 0] = 1.0
    offset = 1
    for j, attr in enumerate(catalog.attributes):
        k = len(attr.levels)
        col = levels[:, j]
        if col.min(initial=0) < 0 or col.max(initial=0) >= k:
            raise SchemaError(f"level index out of range for attribute {attr.name!r}")
        for lv in range(1, k):
            out[col == lv, offset + lv - 1] = 1.0
        offset += k - 1
    return out


def full_factorial_levels(catalog: AttributeCatalog) -> np.ndarray:
    """All level combinations, lexicographic order; rows are level indices."""
    ranges = [range(k) for k in catalog.level_counts]
    return np.array(list(itertools.product(*ranges)), dtype=np.int64)


def profiles_from_levels(levels: Iterable[Sequence[int]], id_offset: int = 0) -> list[Profile]:
    return [
        Profile(id=id_offset + i, levels=tuple(int(v) for v in row))
        for i, row in enumerate(levels)
    ]


# ---------------------------------------------------------------------------
# Stand-in catalog
# ---------------------------------------------------------------------------

_STANDIN_BINARY = [
    "politically_exposed",
    "sanctions_list_hit",
    "adverse_media",
    "offshore_entity",
    "shell_company_link",
    "high_risk_industry",
    "cash_intensive",
    "crypto_activity",
    "non_resident",
    "complex_ownership",
    "bearer_shares",
    "private_banking",
    "correspondent_exposure",
    "frequent_wires",
    "round_amount_pattern",
    "rapid_movement",
    "dormant_reactivation",
    "third_party_funding",
    "prior_alert_history",
    "watchlist_proximity",
]

_STANDIN_TERNARY = {
    "customer_tenure": ("long_term", "established", "new"),
    "expected_activity": ("low", "medium", "high"),
    "net_worth_band": ("low", "medium", "high"),
    "geographic_footprint": ("domestic", "regional", "global"),
}


def standin_catalog() -> AttributeCatalog:
    """Default 24-attribute catalog: 20 binary flags plus 4 three-level fields.

    The production variable names are confidential, so these are generic
    KYC-flavored stand-ins used by all desk-scale studies and by the CLI when
    no catalog file is given.
    """
    attrs = [Attribute(name, ("no", "yes")) for name in _STANDIN_BINARY]
    attrs += [Attribute(name, levels) for name, levels in _STANDIN_TERNARY.items()]
    return AttributeCatalog(tuple(attrs))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def catalog_to_dict(catalog: AttributeCatalog) -> dict:
    return {
        "attributes": [
            {"name": a.name, "levels": list(a.levels)} for a in catalog.attributes
        ]
    }


def catalog_from_dict(doc: dict) -> AttributeCatalog:
    try:
        attrs = tuple(
            Attribute(item["name"], tuple(item["levels"]))
            for item in doc["attributes"]
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed catalog document: {exc}") from exc
    return AttributeCatalog(attrs)


def save_catalog(catalog: AttributeCatalog, path: str | Path) -> None:
    Path(path).write_text(json.dumps(catalog_to_dict(catalog), indent=2) + "\n")


def load_catalog(path: str | Path) -> AttributeCatalog:
    return catalog_from_dict(json.loads(Path(path).read_text()))
