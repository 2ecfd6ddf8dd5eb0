"""choicescore: absolute-scale labels from relative expert choices.

Pipeline: D-optimal synthetic profiles -> pair-diverse questionnaires ->
most/least choices (human or simulated oracle) -> mean-choice inversion under
a label prior -> linear risk scorer with FNR-targeted thresholding.
"""

from .catalog import (
    Attribute,
    AttributeCatalog,
    Profile,
    encode_profile,
    load_catalog,
    save_catalog,
    standin_catalog,
)
from .choices import (
    ChoiceResponse,
    MeanChoice,
    ScoreSet,
    encode_choices,
    expected_choice,
    invert_choice,
    invert_choices,
    mean_choice,
    scores_from_study,
)
from .design import (
    Design,
    best_design,
    d_criterion,
    efficiency_curve,
    federov_exchange,
    random_design,
    trial_histogram,
)
from .priors import LabelPrior, parse_prior
from .questionnaires import (
    ChoiceSet,
    Questionnaire,
    StudyPlan,
    generate_questionnaires,
    pair_coverage,
    plan_study,
    random_questionnaires,
)
from .risk import (
    EvalReport,
    LinearScorer,
    binarize_labels,
    evaluate,
    fit,
    roc_and_auc,
    tune_threshold,
)
from .simulation import (
    Oracle,
    OracleConfig,
    StudyResult,
    oracle_respond,
    rms_study,
    run_oracle_study,
    scatter_study,
)

__version__ = "0.1.0"
