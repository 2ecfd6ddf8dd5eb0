"""Label priors: the assumed distribution of true labels.

Only the cdf and quantile are needed downstream — the choice-to-score map is
F(y)^(s-1) - (1-F(y))^(s-1) and its inverse goes through probability space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import InputError

# normal priors invert c = +-1 to the quantile at this clamp instead of +-inf
NORMAL_CLAMP = 1e-12


@dataclass(frozen=True)
class LabelPrior:
    kind: str  # "uniform" | "normal"
    a: float = 0.0  # uniform lower / normal mean
    b: float = 1.0  # uniform upper / normal sigma

    def __post_init__(self):
        if self.kind == "uniform":
            if not self.a < self.b:
                raise InputError("uniform prior needs a < b")
        elif self.kind == "normal":
            if not self.b > 0:
                raise InputError("normal prior needs sigma > 0")
        else:
            raise InputError(f"unknown prior kind {self.kind!r}")

    @staticmethod
    def uniform(a: float = -1.0, b: float = 1.0) -> "LabelPrior":
        return LabelPrior("uniform", float(a), float(b))

    @staticmethod
    def normal(mu: float = 0.0, sigma: float = 1.0) -> "LabelPrior":
        return LabelPrior("normal", float(mu), float(sigma))

    def cdf(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == "uniform":
            out = np.clip((y - self.a) / (self.b - self.a), 0.0, 1.0)
        else:
            out = ndtr((y - self.a) / self.b)
        return out if out.ndim else float(out)

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(u < 0) or np.any(u > 1):
            raise InputError("quantile argument must lie in [0, 1]")
        if self.kind == "uniform":
            out = self.a + u * (self.b - self.a)
        else:
            clamped = np.clip(u, NORMAL_CLAMP, 1.0 - NORMAL_CLAMP)
            out = self.a + self.b * ndtri(clamped)
        return out if out.ndim else float(out)

    @property
    def median(self) -> float:
        return (self.a + self.b) / 2 if self.kind == "uniform" else self.a

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "uniform":
            return rng.uniform(self.a, self.b, size=n)
        return rng.normal(self.a, self.b, size=n)

    def quantile_grid(self, n: int) -> np.ndarray:
        """n midpoint quantiles: Q((i + 0.5)/n) for i = 0..n-1."""
        return self.quantile((np.arange(n) + 0.5) / n)

    def central_interval(self, mass: float) -> tuple[float, float]:
        tail = (1.0 - mass) / 2.0
        return float(self.quantile(tail)), float(self.quantile(1.0 - tail))

    def spec(self) -> str:
        return f"{self.kind}:{self.a:g},{self.b:g}"


def parse_prior(text: str) -> LabelPrior:
    """Parse CLI/service prior specs like ``uniform:-1,1`` or ``normal:0,1``."""
    try:
        kind, _, params = text.partition(":")
        a, b = (float(v) for v in params.split(","))
    except ValueError as exc:
        raise InputError(f"cannot parse prior spec {text!r}") from exc
    if kind == "uniform":
        return LabelPrior.uniform(a, b)
    if kind == "normal":
        return LabelPrior.normal(a, b)
    raise InputError(f"unknown prior kind {kind!r}")
