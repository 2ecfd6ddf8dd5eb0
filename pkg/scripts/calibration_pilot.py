#!/usr/bin/env python3
"""Pilot runs behind the frozen test tolerances.

Two acceptance bounds were calibrated empirically before being frozen:

* the mean absolute deviation of the q = 25 scatter around the closed-form
  expected-choice curve at s = 4 (frozen at 0.11); the per-questionnaire
  outcome variance puts its expectation near 0.08, so bounds materially
  below that are not achievable at q = 25 regardless of implementation;
* the weight-direction cosine of the end-to-end benchmark (frozen at 0.95
  for the pilot seed, with the 10-seed median around 0.97).

Re-run this script to reproduce the statistics.
"""

import statistics

import numpy as np

from choicescore.choices import expected_choice
from choicescore.pipeline import synthetic_pipeline
from choicescore.priors import LabelPrior
from choicescore.simulation import scatter_study

UNIFORM = LabelPrior.uniform(-1, 1)


def scatter_mad_pilot(seeds=10):
    mads = []
    for seed in range(seeds):
        pts = scatter_study(500, 4, 25, UNIFORM, seed=seed)
        y = np.array([p[0] for p in pts])
        c = np.array([p[1] for p in pts])
        mads.append(float(np.mean(np.abs(c - expected_choice(y, UNIFORM, 4)))))
    return mads


def pipeline_pilot(seeds=10):
    out = []
    for seed in range(seeds):
        r = synthetic_pipeline(seed=seed)
        out.append(
            (r.weight_cosine, r.test_report.auc, r.test_report.classification_error)
        )
    return out


def main():
    mads = scatter_mad_pilot()
    print("scatter MAD (s=4, q=25, n=500), 10 seeds:")
    print("  values:", " ".join(f"{v:.4f}" for v in mads))
    print(f"  mean={statistics.mean(mads):.4f} max={max(mads):.4f} frozen bound=0.11")

    rows = pipeline_pilot()
    cos = [r[0] for r in rows]
    auc = [r[1] for r in rows]
    err = [r[2] for r in rows]
    print("\nend-to-end benchmark, 10 seeds:")
    print("  cosine:", " ".join(f"{v:.3f}" for v in cos))
    print(f"  cosine median={statistics.median(cos):.4f} min={min(cos):.4f}")
    print(f"  auc median={statistics.median(auc):.4f} min={min(auc):.4f}")
    print(f"  error median={statistics.median(err):.4f} max={max(err):.4f}")


if __name__ == "__main__":
    main()
