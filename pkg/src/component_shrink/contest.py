"""Season-to-season prediction contests, talent-curve history and trajectories.

A contest fits both methods on season y and scores their predictions of the
observed season y+1 values for the players eligible in both seasons:

* component method: one exchangeable beta-binomial fit per component, then
  the shrunken component probabilities are composed (hit, on-base or FIP
  ability);
* single method: one exchangeable model on the composite itself
  (beta-binomial on hits or times on base, normal model on FIP).

Error is the root sum of squared prediction errors. The improvement
I = S_I - S_C is positive when the component method predicts better.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .betabin import FitOptions, RandomEffectsFit, fit_exchangeable, shrink, standardized_residual
from .compose import PitchingComponents, fip_ability, fip_from_counts, hit_probability, on_base_probability
from .errors import ComponentShrinkError, ConfigurationError, DomainError, InsufficientDataError
from .ingest import (
    COMPONENTS,
    DEFAULT_MIN_AB,
    DEFAULT_MIN_BFP,
    ComponentObservation,
    PlayerSeasonPitching,
    derive_batting_components,
    derive_pitching_components,
    seasons_by_year,
)
from .normalmodel import NormalObservation, fit_normal_exchangeable, shrink_normal

log = logging.getLogger(__name__)

MEASURES = ("BA", "OBP", "FIP")
POPULATIONS = ("batters", "pitchers")


@dataclass(frozen=True)
class Eligibility:
    min_ab: int = DEFAULT_MIN_AB
    min_bfp: int = DEFAULT_MIN_BFP

    def __post_init__(self):
        if self.min_ab < 1 or self.min_bfp < 1:
            raise DomainError("eligibility thresholds must be >= 1")

    def admits(self, season) -> bool:
        if isinstance(season, PlayerSeasonPitching):
            return season.bfp >= self.min_bfp
        return season.ab >= self.min_ab


@dataclass(frozen=True)
class ContestResult:
    train_year: int
    test_year: int
    measure: str
    S_C: float
    S_I: float
    improvement: float
    n_players: int


@dataclass(frozen=True)
class PairPredictions:
    """Per-player detail behind one ContestResult, aligned by index."""

    player_ids: list[str]
    component: np.ndarray
    single: np.ndarray
    observed: np.ndarray


@dataclass(frozen=True)
class HistoryPoint:
    year: int
    component: str
    population: str
    eta_hat: float
    K_hat: float
    sd_hat: float
    at_K_bound: bool = False
    n_players: int = 0


@dataclass(frozen=True)
class TrajectoryPoint:
    player_id: str
    year: int
    component: str
    raw_rate: float
    z: float


def rss_error(predictions: Sequence[float], outcomes: Sequence[float]) -> float:
    """sqrt(sum((outcome - prediction)^2)) over aligned players."""
    p = np.asarray(predictions, dtype=float)
    o = np.asarray(outcomes, dtype=float)
    if p.shape != o.shape:
        raise DomainError(f"length mismatch: {p.size} predictions, {o.size} outcomes")
    if p.size == 0:
        raise DomainError("rss_error needs at least one pair")
    return float(math.sqrt(np.sum((o - p) ** 2)))


def population_of(seasons) -> str:
    first = next(iter(seasons), None)
    return "pitchers" if isinstance(first, PlayerSeasonPitching) else "batters"


def component_observations(seasons, population: str, eligibility: Eligibility):
    if population == "pitchers":
        return derive_pitching_components(seasons, eligibility.min_bfp)
    if population == "batters":
        return derive_batting_components(seasons, eligibility.min_ab)
    raise DomainError(f"unknown population {population!r}")


def _single_year(seasons, what):
    years = {s.year for s in seasons}
    if len(years) != 1:
        raise ConfigurationError(f"{what} data must hold exactly one season, got {sorted(years)}")
    return years.pop()


def _paired(train, test, keep):
    a = {s.player_id: s for s in train if keep(s)}
    b = {s.player_id: s for s in test if keep(s)}
    ids = sorted(a.keys() & b.keys())
    return ids, [a[i] for i in ids], [b[i] for i in ids]


def _shrunk(observations: list[ComponentObservation], fit: RandomEffectsFit) -> np.ndarray:
    return np.array([shrink(o.successes, o.opportunities, fit) for o in observations])


def _fit_components(comps, names, options):
    return {c: fit_exchangeable(comps[c], options) for c in names}


def predict_pair(
    measure: str,
    train_seasons,
    test_seasons,
    eligibility: Eligibility | None = None,
    options: FitOptions | None = None,
) -> PairPredictions:
    """Component and single-model predictions for the players in both seasons."""
    elig = eligibility or Eligibility()
    if measure not in MEASURES:
        raise DomainError(f"unknown measure {measure!r}")

    if measure == "FIP":
        ids, train, test = _paired(
            train_seasons, test_seasons,
            lambda s: elig.admits(s) and s.ipouts > 0,
        )
    else:
        ids, train, test = _paired(train_seasons, test_seasons, elig.admits)
    # the beta-binomial fit needs 2 players, the normal model 3
    if len(ids) < (3 if measure == "FIP" else 2):
        raise InsufficientDataError(
            f"{measure}: only {len(ids)} players eligible in both seasons"
        )

    if measure == "FIP":
        comps = derive_pitching_components(train, elig.min_bfp)
        fits = _fit_components(comps, COMPONENTS, options)
        p = {c: _shrunk(comps[c], fits[c]) for c in COMPONENTS}
        component = np.array([
            fip_ability(PitchingComponents(p["BB"][j], p["SO"][j], p["HR"][j], p["HIP"][j]))
            for j in range(len(ids))
        ])
        normal_obs = [
            NormalObservation(s.player_id, _observed_fip(s), s.innings) for s in train
        ]
        nfit = fit_normal_exchangeable(normal_obs)
        single = np.array([shrink_normal(o.value, o.weight, nfit) for o in normal_obs])
        observed = np.array([_observed_fip(s) for s in test])
        return PairPredictions(ids, component, single, observed)

    comps = derive_batting_components(train, elig.min_ab)
    names = ("SO", "HR", "HIP") if measure == "BA" else COMPONENTS
    fits = _fit_components(comps, names, options)
    p = {c: _shrunk(comps[c], fits[c]) for c in names}
    component = hit_probability(p["SO"], p["HR"], p["HIP"])

    if measure == "BA":
        single_obs = [ComponentObservation(s.player_id, s.h, s.ab) for s in train]
        observed = np.array([s.h / s.ab for s in test])
    else:
        component = on_base_probability(p["BB"], component)
        single_obs = [
            ComponentObservation(s.player_id, s.h + s.bb + s.hbp, s.ab + s.bb + s.hbp)
            for s in train
        ]
        observed = np.array([
            (s.h + s.bb + s.hbp) / (s.ab + s.bb + s.hbp) for s in test
        ])
    single = _shrunk(single_obs, fit_exchangeable(single_obs, options))
    return PairPredictions(ids, np.asarray(component), single, observed)


def _observed_fip(s: PlayerSeasonPitching) -> float:
    return float(fip_from_counts(s.hr, s.bb + s.hbp, s.so, s.innings))


def run_contest(
    measure: str,
    train_seasons,
    test_seasons,
    eligibility: Eligibility | None = None,
    options: FitOptions | None = None,
) -> ContestResult:
    """Score both methods fitted on ``train_seasons`` against ``test_seasons``."""
    train_year = _single_year(train_seasons, "train")
    test_year = _single_year(test_seasons, "test")
    pred = predict_pair(measure, train_seasons, test_seasons, eligibility, options)
    s_c = rss_error(pred.component, pred.observed)
    s_i = rss_error(pred.single, pred.observed)
    return ContestResult(train_year, test_year, measure, s_c, s_i, s_i - s_c,
                         len(pred.player_ids))


def _grouped(all_seasons) -> dict[int, list]:
    if isinstance(all_seasons, Mapping):
        return dict(all_seasons)
    return seasons_by_year(all_seasons)


def history(
    all_seasons,
    component: str,
    population: str | None = None,
    eligibility: Eligibility | None = None,
    options: FitOptions | None = None,
) -> list[HistoryPoint]:
    """One independent talent-curve fit per season, in input season order.

    ``all_seasons`` is either a flat list of player-season records or a
    ``{year: records}`` mapping. Seasons whose fit fails are logged and
    left out.
    """
    if component not in COMPONENTS:
        raise DomainError(f"unknown component {component!r}")
    elig = eligibility or Eligibility()
    points = []
    for year, seasons in _grouped(all_seasons).items():
        pop = population or population_of(seasons)
        try:
            obs = component_observations(seasons, pop, elig)[component]
            fit = fit_exchangeable(obs, options)
        except ComponentShrinkError as exc:
            log.warning("history: skipping %s %s %s: %s", year, pop, component, exc)
            continue
        points.append(HistoryPoint(year, component, pop, fit.eta, fit.K,
                                   fit.talent_sd, fit.at_K_bound, fit.n_players))
    return points


def fit_seasons(
    all_seasons,
    population: str | None = None,
    eligibility: Eligibility | None = None,
    options: FitOptions | None = None,
    years: Iterable[int] | None = None,
) -> dict[tuple[int, str], RandomEffectsFit]:
    """Fits for every (year, component); failed fits are logged and omitted."""
    elig = eligibility or Eligibility()
    wanted = set(years) if years is not None else None
    fits = {}
    for year, seasons in _grouped(all_seasons).items():
        if wanted is not None and year not in wanted:
            continue
        pop = population or population_of(seasons)
        comps = component_observations(seasons, pop, elig)
        for c in COMPONENTS:
            try:
                fits[(year, c)] = fit_exchangeable(comps[c], options)
            except ComponentShrinkError as exc:
                log.warning("fit %s %s %s failed: %s", year, pop, c, exc)
    return fits


def trajectory(
    player_id: str,
    all_seasons,
    per_season_fits: Mapping[tuple[int, str], RandomEffectsFit],
    population: str | None = None,
    eligibility: Eligibility | None = None,
) -> list[TrajectoryPoint]:
    """Raw rate and standardized residual per eligible season and component.

    Components in which the player had no opportunities that season are
    skipped. Raises ConfigurationError when a needed season fit is missing.
    """
    elig = eligibility or Eligibility()
    points = []
    for year, seasons in sorted(_grouped(all_seasons).items()):
        mine = [s for s in seasons if s.player_id == player_id]
        if not mine:
            continue
        pop = population or population_of(mine)
        comps = component_observations(mine, pop, elig)
        for c in COMPONENTS:
            for obs in comps[c]:
                if obs.opportunities == 0:
                    continue
                fit = per_season_fits.get((year, c))
                if fit is None:
                    raise ConfigurationError(f"no {c} fit for season {year}")
                z = standardized_residual(obs.successes, obs.opportunities, fit)
                points.append(TrajectoryPoint(player_id, year, c, obs.rate, z))
    return points
