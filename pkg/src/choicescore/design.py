"""D-optimal synthetic profile generation via Monte Carlo row exchange.

The exchange loop keeps (X'X)^-1 up to date and scores a swap of design row u
for candidate row v by the rank-two determinant identity

    det(X'X + vv' - uu') = det(X'X) * [(1 + v'Av)(1 - u'Au) + (u'Av)^2],

with A = (X'X)^-1, so each pass costs O(n * pool * m).  The criterion itself
is reported on the log scale: |X'X| overflows float64 near n = 188, m = 29.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .catalog import (
    AttributeCatalog,
    Profile,
    encode_level_matrix,
    full_factorial_levels,
    profiles_from_levels,
)
from .errors import DesignInfeasibleError, InputError

NEG_INF = float("-inf")

# relative determinant-gain slack: swaps must improve strictly beyond float noise
_GAIN_EPS = 1e-12


@dataclass
class Design:
    """An ordered profile set plus its coded model matrix and log |X'X|."""

    catalog: AttributeCatalog
    profiles: list[Profile]
    coded_matrix: np.ndarray
    log_det: float

    @property
    def n(self) -> int:
        return len(self.profiles)

    @property
    def m(self) -> int:
        return self.catalog.coded_dim

    def level_matrix(self) -> np.ndarray:
        return np.array([p.levels for p in self.profiles], dtype=np.int64)

    def ids(self) -> list[int]:
        return [p.id for p in self.profiles]


def d_criterion(matrix: np.ndarray) -> float:
    """log det(X'X) via QR; -inf for a singular cross-product."""
    x = np.asarray(matrix, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise InputError("matrix must be 2-d with n >= 1, m >= 1")
    if not np.all(np.isfinite(x)):
        raise InputError("matrix entries must be finite")
    n, m = x.shape
    if n < m:
        return NEG_INF
    r = np.linalg.qr(x, mode="r")
    diag = np.abs(np.diag(r))
    # scale-aware rank cutoff, same spirit as numpy's matrix_rank default
    tol = diag.max() * max(n, m) * np.finfo(float).eps
    if diag.min() <= tol:
        return NEG_INF
    return float(2.0 * np.log(diag).sum())


def random_level_matrix(
    catalog: AttributeCatalog, n: int, rng: np.random.Generator
) -> np.ndarray:
    counts = catalog.level_counts
    cols = [rng.integers(0, k, size=n) for k in counts]
    return np.column_stack(cols).astype(np.int64)


def random_design(catalog: AttributeCatalog, n: int, seed: int) -> Design:
    """Uniformly random feasible design; baseline for exchange comparisons."""
    rng = np.random.default_rng(seed)
    for _ in range(200):
        levels = random_level_matrix(catalog, n, rng)
        coded = encode_level_matrix(levels, catalog)
        ld = d_criterion(coded)
        if np.isfinite(ld):
            return Design(catalog, profiles_from_levels(levels), coded, ld)
    raise DesignInfeasibleError(
        f"no nonsingular random design of n={n} found for this catalog"
    )


def _candidate_pool(
    catalog: AttributeCatalog, pool_size: int, rng: np.random.Generator
) -> np.ndarray:
    total = catalog.n_combinations()
    if total <= pool_size:
        return full_factorial_levels(catalog)
    return random_level_matrix(catalog, pool_size, rng)


def federov_exchange(
    catalog: AttributeCatalog,
    n: int,
    candidate_pool_size: int,
    max_passes: int,
    seed: int,
    id_offset: int = 0,
    log_det_floor: float = -1e12,
    trace: Optional[list] = None,
) -> Design:
    """Greedy row exchange from a random start against a Monte Carlo pool.

    Each pass visits design rows in order and swaps in the pool candidate with
    the largest strict determinant gain (lowest candidate index on ties).
    Stops after a pass with no accepted swap, or after ``max_passes``.
    Deterministic given (inputs, seed).
    """
    m = catalog.coded_dim
    if n < m:
        raise DesignInfeasibleError(
            f"n={n} < coded dimension m={m}: X'X is singular for any design"
        )
    if candidate_pool_size < n:
        raise InputError("candidate_pool_size must be >= n")
    if max_passes < 1:
        raise InputError("max_passes must be >= 1")

    rng = np.random.default_rng(seed)

    pool_levels = _candidate_pool(catalog, candidate_pool_size, rng)
    pool = encode_level_matrix(pool_levels, catalog)

    # nonsingular random start, with bounded retries and pool refreshes
    rows = None
    for refresh in range(3):
        for _ in range(40):
            candidate_rows = rng.integers(0, len(pool), size=n)
            if np.isfinite(d_criterion(pool[candidate_rows])):
                rows = candidate_rows
                break
        if rows is not None:
            break
        pool_levels = _candidate_pool(catalog, candidate_pool_size, rng)
        pool = encode_level_matrix(pool_levels, catalog)
    if rows is None:
        raise DesignInfeasibleError(
            f"no nonsingular starting design found after bounded retries (n={n}, m={m})"
        )

    x = pool[rows].copy()
    log_det = d_criterion(x)
    if trace is not None:
        trace.append(log_det)

    a_inv = np.linalg.inv(x.T @ x)
    pool_a = pool @ a_inv                       # (P, m)
    d_vv = np.einsum("ij,ij->i", pool_a, pool)  # v'Av per candidate

    for _ in range(max_passes):
        improved = False
        for i in range(n):
            u = x[i]
            au = a_inv @ u
            d_uu = float(u @ au)
            d_uv = pool_a @ u
            gains = (1.0 + d_vv) * (1.0 - d_uu) + d_uv**2
            j = int(np.argmax(gains))
            gain = float(gains[j])
            if gain <= 1.0 + _GAIN_EPS:
                continue
            new_log_det = log_det + float(np.log(gain))
            if new_log_det < log_det_floor:
                continue
            rows[i] = j
            x[i] = pool[j]
            log_det = new_log_det
            a_inv = np.linalg.inv(x.T @ x)
            pool_a = pool @ a_inv
            d_vv = np.einsum("ij,ij->i", pool_a, pool)
            improved = True
            if trace is not None:
                trace.append(log_det)
        # exact recompute between passes to kill incremental drift
        log_det = d_criterion(x)
        a_inv = np.linalg.inv(x.T @ x)
        pool_a = pool @ a_inv
        d_vv = np.einsum("ij,ij->i", pool_a, pool)
        if not improved:
            break

    levels = pool_levels[rows]
    coded = encode_level_matrix(levels, catalog)
    return Design(
        catalog,
        profiles_from_levels(levels, id_offset=id_offset),
        coded,
        d_criterion(coded),
    )


def _restart_seed(seed: int, index: int) -> list:
    return [seed, 7919, index]


def best_design(
    catalog: AttributeCatalog,
    n: int,
    restarts: int,
    seed: int,
    candidate_pool_size: Optional[int] = None,
    max_passes: int = 25,
    id_offset: int = 0,
) -> Design:
    """Best of ``restarts`` independent exchange runs (derived seeds, reduced
    in seed-index order so the result is schedule-independent)."""
    if restarts < 1:
        raise InputError("restarts must be >= 1")
    pool_size = candidate_pool_size or max(2 * n, 8 * catalog.coded_dim)
    best = None
    for r in range(restarts):
        rng_seed = np.random.SeedSequence(_restart_seed(seed, r)).generate_state(1)[0]
        d = federov_exchange(
            catalog, n, pool_size, max_passes, int(rng_seed), id_offset=id_offset
        )
        if best is None or d.log_det > best.log_det:
            best = d
    return best


def normalized_efficiency(log_det: float, m: int, n: int) -> float:
    """det(X'X)^(1/m) / n; comparable across run counts."""
    if not np.isfinite(log_det):
        return 0.0
    return float(np.exp(log_det / m) / n)


def efficiency_curve(
    catalog: AttributeCatalog,
    n_values: Sequence[int],
    restarts: int,
    seed: int,
    candidate_pool_size: Optional[int] = None,
    max_passes: int = 25,
) -> list[tuple[int, float, float]]:
    """(n, best log det, normalized efficiency) for each distinct n, ascending."""
    if restarts < 1:
        raise InputError("restarts must be >= 1")
    m = catalog.coded_dim
    out = []
    for n in sorted(set(int(v) for v in n_values)):
        if n < m:
            raise DesignInfeasibleError(f"n={n} < m={m}")
        d = best_design(
            catalog,
            n,
            restarts,
            seed,
            candidate_pool_size=candidate_pool_size,
            max_passes=max_passes,
        )
        out.append((n, d.log_det, normalized_efficiency(d.log_det, m, n)))
    return out


def trial_histogram(
    catalog: AttributeCatalog,
    n_range: tuple[int, int],
    trials: int,
    samples_per_trial: int,
    seed: int,
    candidate_pool_size: Optional[int] = None,
    max_passes: int = 10,
) -> dict[int, int]:
    """Frequency table of the run count winning each trial.

    One trial draws ``samples_per_trial`` run counts uniformly from the range,
    optimizes a design at each, and records the n with the best normalized
    efficiency (raw |X'X| is monotone in n, which would degenerate the
    histogram to the top of the range).
    """
    low, high = int(n_range[0]), int(n_range[1])
    if low > high:
        raise InputError("empty n range")
    m = catalog.coded_dim
    if low < m:
        raise InputError(f"range low={low} < m={m}")
    if trials < 1 or samples_per_trial < 1:
        raise InputError("trials and samples_per_trial must be >= 1")

    rng = np.random.default_rng([seed, 104729])
    freq: dict[int, int] = {}
    for t in range(trials):
        ns = rng.integers(low, high + 1, size=samples_per_trial)
        best_n, best_eff = None, -1.0
        for k, n in enumerate(ns):
            n = int(n)
            run_seed = np.random.SeedSequence([seed, t, k]).generate_state(1)[0]
            d = federov_exchange(
                catalog,
                n,
                candidate_pool_size or max(2 * n, 8 * m),
                max_passes,
                int(run_seed),
            )
            eff = normalized_efficiency(d.log_det, m, n)
            if eff > best_eff:
                best_n, best_eff = n, eff
        freq[best_n] = freq.get(best_n, 0) + 1
    return dict(sorted(freq.items()))
