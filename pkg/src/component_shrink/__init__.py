"""Component-wise empirical Bayes estimation of batting and pitching ability."""

from .betabin import (
    FitOptions,
    RandomEffectsFit,
    ShrunkenEstimate,
    fit_exchangeable,
    log_marginal,
    log_posterior,
    predictive_sd,
    shrink,
    standardized_residual,
)
from .compose import (
    BattingComponents,
    PitchingComponents,
    fip_ability,
    fip_from_counts,
    hit_probability,
    on_base_probability,
)
from .contest import ContestResult, Eligibility, history, rss_error, run_contest, trajectory
from .ingest import (
    ComponentObservation,
    PlayerSeasonBatting,
    PlayerSeasonPitching,
    aggregate_stints,
    derive_batting_components,
    derive_pitching_components,
    parse_batting_csv,
)
from .normalmodel import NormalFit, NormalObservation, fit_normal_exchangeable, shrink_normal

__version__ = "0.1.0"

__all__ = [
    "FitOptions",
    "RandomEffectsFit",
    "ShrunkenEstimate",
    "fit_exchangeable",
    "log_marginal",
    "log_posterior",
    "predictive_sd",
    "shrink",
    "standardized_residual",
    "BattingComponents",
    "PitchingComponents",
    "fip_ability",
    "fip_from_counts",
    "hit_probability",
    "on_base_probability",
    "ContestResult",
    "Eligibility",
    "history",
    "rss_error",
    "run_contest",
    "trajectory",
    "ComponentObservation",
    "PlayerSeasonBatting",
    "PlayerSeasonPitching",
    "aggregate_stints",
    "derive_batting_components",
    "derive_pitching_components",
    "parse_batting_csv",
    "NormalFit",
    "NormalObservation",
    "fit_normal_exchangeable",
    "shrink_normal",
]
