"""Command-line umbrella: design / quest / score / sim / model / study."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import design as design_mod
from . import fileio
from .catalog import load_catalog, standin_catalog
from .choices import scores_from_study
from .errors import ChoiceScoreError
from .priors import parse_prior
from .questionnaires import (
    pair_coverage,
    plan_study,
    random_questionnaires,
    generate_questionnaires,
)
from .risk import binarize_labels, evaluate, fit
from .service.core import DEFAULT_MINIMUM_QUESTIONNAIRES, StudyService
from .simulation import rms_study, scatter_study

DATA_DIR_ENV = "CHOICESCORE_DATA_DIR"


def _load_catalog_opt(path: str | None):
    return load_catalog(path) if path else standin_catalog()


def _echo_table(rows, header=None):
    if header:
        click.echo("\t".join(header))
    for row in rows:
        click.echo("\t".join(str(v) for v in row))


@click.group()
def main():
    """Absolute-scale labels from relative expert choices."""


def _handle(fn):
    try:
        fn()
    except ChoiceScoreError as exc:
        click.echo(f"error [{exc.code}]: {exc.message}", err=True)
        sys.exit(1)


# ---------------------------------------------------------------------------
# design
# ---------------------------------------------------------------------------


@main.group()
def design():
    """D-optimal synthetic profile sets."""


@design.command("gen")
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None,
              help="catalog JSON; defaults to the stand-in 24-attribute catalog")
@click.option("--n", type=int, required=True)
@click.option("--restarts", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--pool", type=int, default=None, help="candidate pool size")
@click.option("--out", type=click.Path(), required=True)
def design_gen(catalog_path, n, restarts, seed, pool, out):
    """Generate a design and write it as TSV plus a .profiles.json sidecar."""
    def run():
        catalog = _load_catalog_opt(catalog_path)
        d = design_mod.best_design(
            catalog, n, restarts=restarts, seed=seed, candidate_pool_size=pool
        )
        fileio.save_design(d, out)
        click.echo(f"n={d.n} m={d.m} log_det={d.log_det:.6f} -> {out}")
    _handle(run)


@design.command("curve")
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None)
@click.option("--n-from", type=int, required=True)
@click.option("--n-to", type=int, required=True)
@click.option("--step", type=int, default=10, show_default=True)
@click.option("--restarts", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def design_curve(catalog_path, n_from, n_to, step, restarts, seed):
    """D-efficiency as a function of the run count (TSV to stdout)."""
    def run():
        catalog = _load_catalog_opt(catalog_path)
        curve = design_mod.efficiency_curve(
            catalog, range(n_from, n_to + 1, step), restarts, seed
        )
        _echo_table(
            [(n, f"{ld:.6f}", f"{eff:.6f}") for n, ld, eff in curve],
            header=["n", "log_det", "normalized_efficiency"],
        )
    _handle(run)


@design.command("hist")
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None)
@click.option("--n-from", type=int, required=True)
@click.option("--n-to", type=int, required=True)
@click.option("--trials", type=int, default=250, show_default=True)
@click.option("--samples", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def design_hist(catalog_path, n_from, n_to, trials, samples, seed):
    """Winning-run-count histogram over randomized trials (TSV to stdout)."""
    def run():
        catalog = _load_catalog_opt(catalog_path)
        freq = design_mod.trial_histogram(
            catalog, (n_from, n_to), trials, samples, seed
        )
        _echo_table(sorted(freq.items()), header=["n", "count"])
    _handle(run)


# ---------------------------------------------------------------------------
# quest
# ---------------------------------------------------------------------------


@main.group()
def quest():
    """Choice-set questionnaires."""


@quest.command("gen")
@click.option("--design", "design_path", type=click.Path(exists=True), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def quest_gen(design_path, seed, out):
    """Full pair-diverse cycle for a design with n = 4p, p prime."""
    def run():
        d = fileio.load_design(design_path)
        plan = plan_study(d.n)
        quests = generate_questionnaires(d.profiles, plan, seed)
        fileio.save_questionnaires(quests, out, plan=plan)
        click.echo(
            f"p={plan.p} questionnaires, primes={plan.primes} -> {out}"
        )
    _handle(run)


@quest.command("random")
@click.option("--design", "design_path", type=click.Path(exists=True), required=True)
@click.option("--sets-of", "set_size", type=int, default=4, show_default=True)
@click.option("--count", "q", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def quest_random(design_path, set_size, q, seed, out):
    """Random-partition questionnaires (baseline)."""
    def run():
        d = fileio.load_design(design_path)
        quests = random_questionnaires(d.profiles, set_size, q, seed)
        fileio.save_questionnaires(quests, out)
        click.echo(f"{q} random questionnaires -> {out}")
    _handle(run)


@quest.command("coverage")
@click.option("--questionnaires", "quest_path", type=click.Path(exists=True),
              required=True)
def quest_coverage(quest_path):
    """Unique-pair coverage and the per-questionnaire cumulative curve."""
    def run():
        quests = fileio.load_questionnaires(quest_path)
        n = len(quests[0].all_ids())
        unique, fraction, curve = pair_coverage(quests, n)
        click.echo(f"unique_pairs={unique} fraction={fraction:.6f}")
        _echo_table(
            [(i + 1, f"{v:.6f}") for i, v in enumerate(curve)],
            header=["questionnaires", "coverage"],
        )
    _handle(run)


# ---------------------------------------------------------------------------
# score
# ---------------------------------------------------------------------------


@main.group()
def score():
    """Choice aggregation and inversion."""


@score.command("aggregate")
@click.option("--responses", "responses_path", type=click.Path(exists=True),
              required=True)
@click.option("--questionnaires", "quest_path", type=click.Path(exists=True),
              required=True)
@click.option("--prior", default="uniform:-1,1", show_default=True)
@click.option("--set-size", type=int, default=4, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def score_aggregate(responses_path, quest_path, prior, set_size, out):
    """encode -> mean -> invert a response log over its questionnaires."""
    def run():
        records = fileio.load_responses(responses_path)
        quests = fileio.load_questionnaires(quest_path)
        scores = scores_from_study(
            [r.response for r in records], quests, parse_prior(prior), set_size
        )
        fileio.save_scores(scores, out)
        click.echo(f"{len(scores.ids)} profiles over q={scores.q} -> {out}")
    _handle(run)


# ---------------------------------------------------------------------------
# sim
# ---------------------------------------------------------------------------


@main.group()
def sim():
    """Synthetic-oracle studies."""


@sim.command("scatter")
@click.option("--n", type=int, default=500, show_default=True)
@click.option("--s", "set_size", type=int, default=4, show_default=True)
@click.option("--q", type=int, default=25, show_default=True)
@click.option("--prior", default="uniform:-1,1", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def sim_scatter(n, set_size, q, prior, seed):
    """(true label, mean choice) pairs for the theory-vs-simulation scatter."""
    def run():
        pts = scatter_study(n, set_size, q, parse_prior(prior), seed)
        _echo_table(
            [(repr(y), repr(c)) for y, c in pts], header=["y_true", "c_bar"]
        )
    _handle(run)


@sim.command("rms")
@click.option("--n", type=int, default=188, show_default=True)
@click.option("--sizes", default="2,3,4,5,6", show_default=True)
@click.option("--q", "q_spec", default="1..25", show_default=True,
              help="comma list and/or a..b ranges")
@click.option("--prior", default="uniform:-1,1", show_default=True)
@click.option("--strategy", type=click.Choice(["random", "group"]),
              default="random", show_default=True)
@click.option("--repeats", type=int, default=10, show_default=True)
@click.option("--noise-sigma", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def sim_rms(n, sizes, q_spec, prior, strategy, repeats, noise_sigma, seed):
    """Mean RMS label error per (set size, questionnaire count)."""
    def run():
        set_sizes = [int(v) for v in sizes.split(",")]
        q_values = []
        for part in q_spec.split(","):
            if ".." in part:
                a, b = part.split("..")
                q_values.extend(range(int(a), int(b) + 1))
            else:
                q_values.append(int(part))
        table = rms_study(
            n, set_sizes, q_values, parse_prior(prior),
            strategy=strategy, repeats=repeats, seed=seed, noise_sigma=noise_sigma,
        )
        _echo_table(
            [(s, q, f"{v:.6f}") for (s, q), v in sorted(table.cells.items())],
            header=["s", "q", "mean_rms"],
        )
        for s, reason in table.skipped:
            click.echo(f"# skipped s={s}: {reason}", err=True)
    _handle(run)


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------


@main.group()
def model():
    """Linear risk scorer."""


@model.command("fit")
@click.option("--design", "design_path", type=click.Path(exists=True), required=True)
@click.option("--scores", "scores_path", type=click.Path(exists=True), required=True)
@click.option("--mode", type=click.Choice(["logistic", "regression"]),
              default="logistic", show_default=True)
@click.option("--reg-lambda", type=float, default=1e-6, show_default=True)
@click.option("--cutoff", type=float, default=0.0, show_default=True,
              help="binarization cutoff for logistic mode")
@click.option("--out", type=click.Path(), required=True)
def model_fit(design_path, scores_path, mode, reg_lambda, cutoff, out):
    def run():
        d = fileio.load_design(design_path)
        labels = fileio.load_labels(scores_path)
        scorer = fit(d, labels, mode=mode, reg_lambda=reg_lambda, cutoff=cutoff)
        fileio.save_model(scorer, out, d.catalog)
        click.echo(f"{mode} scorer on n={d.n} profiles -> {out}")
    _handle(run)


@model.command("eval")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--design", "design_path", type=click.Path(exists=True), required=True)
@click.option("--scores", "scores_path", type=click.Path(exists=True), required=True,
              help="truth labels for the evaluation profiles")
@click.option("--cutoff", type=float, default=0.0, show_default=True)
@click.option("--fnr-target", type=float, default=1e-3, show_default=True)
@click.option("--report", "report_path", type=click.Path(), default=None)
def model_eval(model_path, design_path, scores_path, cutoff, fnr_target, report_path):
    def run():
        scorer, _, _ = fileio.load_model(model_path)
        d = fileio.load_design(design_path)
        truth = binarize_labels(fileio.load_labels(scores_path), cutoff)
        report = evaluate(scorer.score_design(d), truth, fnr_target=fnr_target)
        click.echo(
            f"auc={report.auc:.4f} error={report.classification_error:.4f} "
            f"fnr={report.fnr:.4f} threshold={report.threshold:.6f} "
            f"fnr_tuned_threshold={report.fnr_tuned_threshold:.6f}"
            + (" (saturated)" if report.fnr_tuned_saturated else "")
        )
        if report_path:
            fileio.save_report(report, report_path)
            click.echo(f"roc -> {report_path}")
    _handle(run)


# ---------------------------------------------------------------------------
# study
# ---------------------------------------------------------------------------


def _service(data_dir):
    root = data_dir or os.environ.get(DATA_DIR_ENV) or "./study-data"
    return StudyService(root)


@main.group()
def study():
    """Study lifecycle service."""


@study.command("create")
@click.option("--data-dir", type=click.Path(), default=None,
              help=f"defaults to ${DATA_DIR_ENV} or ./study-data")
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None)
@click.option("--n", type=int, default=188, show_default=True)
@click.option("--prior", default="uniform:-1,1", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--restarts", type=int, default=5, show_default=True)
@click.option("--study-id", default=None)
def study_create(data_dir, catalog_path, n, prior, seed, restarts, study_id):
    def run():
        svc = _service(data_dir)
        catalog = load_catalog(catalog_path) if catalog_path else None
        s = svc.create_study(
            n=n, seed=seed, prior=prior, catalog=catalog,
            restarts=restarts, study_id=study_id,
        )
        click.echo(f"created {s.id}: n={s.plan.n} p={s.plan.p} primes={s.plan.primes}")
    _handle(run)


@study.command("open")
@click.argument("study_id")
@click.option("--data-dir", type=click.Path(), default=None)
def study_open(study_id, data_dir):
    def run():
        s = _service(data_dir).open_study(study_id)
        click.echo(f"{s.id}: {s.status}")
    _handle(run)


@study.command("serve")
@click.option("--data-dir", type=click.Path(), default=None)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--roster", "roster_path", type=click.Path(exists=True), default=None,
              help="newline-separated labeler ids; enables bearer-token checks")
def study_serve(data_dir, port, host, roster_path):
    def run():
        import uvicorn

        from .service.api import create_app

        roster = None
        if roster_path:
            roster = {
                line.strip()
                for line in Path(roster_path).read_text().splitlines()
                if line.strip()
            }
        app = create_app(_service(data_dir), roster=roster)
        uvicorn.run(app, host=host, port=port)
    _handle(run)


@study.command("import-responses")
@click.argument("study_id")
@click.option("--data-dir", type=click.Path(), default=None)
@click.option("--responses", "responses_path", type=click.Path(exists=True),
              required=True)
def study_import(study_id, data_dir, responses_path):
    def run():
        svc = _service(data_dir)
        svc.open_study(study_id)
        count = svc.import_responses(study_id, fileio.load_responses(responses_path))
        click.echo(f"imported {count} responses into {study_id}")
    _handle(run)


@study.command("aggregate")
@click.argument("study_id")
@click.option("--data-dir", type=click.Path(), default=None)
@click.option("--minimum", type=int, default=DEFAULT_MINIMUM_QUESTIONNAIRES,
              show_default=True)
def study_aggregate(study_id, data_dir, minimum):
    def run():
        svc = _service(data_dir)
        scores, manifest = svc.aggregate_study(study_id, minimum)
        click.echo(
            f"aggregated {study_id}: q={manifest['q_used']} "
            f"profiles={len(scores.ids)} -> {svc.scores_path(study_id)}"
        )
    _handle(run)


@study.command("export")
@click.argument("study_id")
@click.option("--data-dir", type=click.Path(), default=None)
@click.option("--out-dir", type=click.Path(), required=True)
def study_export(study_id, data_dir, out_dir):
    """Copy the study's questionnaires, response log, and scores out."""
    def run():
        svc = _service(data_dir)
        s = svc.get_study(study_id)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        fileio.save_design(s.design, out / "design.tsv")
        fileio.save_questionnaires(
            s.questionnaires, out / "questionnaires.json", study_id=s.id, plan=s.plan
        )
        rlog = svc.responses_path(study_id)
        if rlog.exists():
            (out / "responses.log").write_text(rlog.read_text())
        spath = svc.scores_path(study_id)
        if spath.exists():
            (out / "scores.tsv").write_text(spath.read_text())
        click.echo(f"exported {study_id} -> {out}")
    _handle(run)


if __name__ == "__main__":
    main()
