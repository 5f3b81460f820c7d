"""Synthetic Lahman-style seasons drawn from the component model itself.

Each simulated player keeps one set of talents across seasons; every season
redraws the counts. Batting talents default to the 2011 batter curves for
SO, HR and HIP. The walk curve and all pitching curves are illustrative
values only.
"""

from __future__ import annotations

import csv
from typing import Iterable, Mapping, Sequence

import numpy as np

from .ingest import PlayerSeasonBatting, PlayerSeasonPitching

# (eta, K) per component
BATTER_CURVES = {
    "SO": (0.203, 40.60),
    "HR": (0.0369, 65.70),
    "HIP": (0.303, 418.10),
    "BB": (0.085, 60.0),
}
PITCHER_CURVES = {
    "BB": (0.080, 150.0),
    "SO": (0.190, 80.0),
    "HR": (0.030, 300.0),
    "HIP": (0.290, 600.0),
}
HBP_SHARE = 0.08


def draw_talents(curves: Mapping[str, tuple[float, float]], n_players: int, rng) -> dict[str, np.ndarray]:
    return {
        c: rng.beta(K * eta, K * (1.0 - eta), size=n_players)
        for c, (eta, K) in curves.items()
    }


def _sizes(size, n_players, rng):
    if isinstance(size, (tuple, list)):
        lo, hi = size
        return rng.integers(lo, hi + 1, size=n_players)
    return np.full(n_players, int(size))


def simulate_batting(
    n_players: int,
    years: Sequence[int],
    at_bats=500,
    seed: int = 0,
    curves: Mapping[str, tuple[float, float]] = BATTER_CURVES,
    prefix: str = "bat",
) -> list[PlayerSeasonBatting]:
    """Batter seasons with fixed at-bats (an int) or AB drawn from (lo, hi)."""
    rng = np.random.default_rng(seed)
    talent = draw_talents(curves, n_players, rng)
    out = []
    for year in years:
        ab = _sizes(at_bats, n_players, rng)
        so = rng.binomial(ab, talent["SO"])
        hr = rng.binomial(ab - so, talent["HR"])
        hip = rng.binomial(ab - so - hr, talent["HIP"])
        # walks before the ab-th at-bat: negative binomial in plate appearances
        walks = rng.negative_binomial(ab, 1.0 - talent["BB"])
        hbp = rng.binomial(walks, HBP_SHARE)
        for j in range(n_players):
            out.append(PlayerSeasonBatting(
                f"{prefix}{j:04d}", int(year), int(ab[j]), int(hr[j] + hip[j]),
                int(hr[j]), int(so[j]), int(walks[j] - hbp[j]), int(hbp[j]),
            ))
    return out


def simulate_pitching(
    n_players: int,
    years: Sequence[int],
    batters_faced=(300, 900),
    seed: int = 0,
    curves: Mapping[str, tuple[float, float]] = PITCHER_CURVES,
    prefix: str = "pit",
) -> list[PlayerSeasonPitching]:
    rng = np.random.default_rng(seed)
    talent = draw_talents(curves, n_players, rng)
    out = []
    for year in years:
        bfp = _sizes(batters_faced, n_players, rng)
        walks = rng.binomial(bfp, talent["BB"])
        so = rng.binomial(bfp - walks, talent["SO"])
        hr = rng.binomial(bfp - walks - so, talent["HR"])
        in_play = bfp - walks - so - hr
        hip = rng.binomial(in_play, talent["HIP"])
        hbp = rng.binomial(walks, HBP_SHARE)
        outs = so + in_play - hip
        for j in range(n_players):
            out.append(PlayerSeasonPitching(
                f"{prefix}{j:04d}", int(year), int(bfp[j]), int(outs[j]),
                int(hr[j] + hip[j]), int(hr[j]), int(so[j]),
                int(walks[j] - hbp[j]), int(hbp[j]),
            ))
    return out


def write_batting_csv(path, seasons: Iterable[PlayerSeasonBatting]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["playerID", "yearID", "stint", "AB", "H", "HR", "SO",
                         "BB", "HBP", "SF", "SH"])
        for s in seasons:
            writer.writerow([s.player_id, s.year, 1, s.ab, s.h, s.hr, s.so,
                             s.bb, s.hbp, s.sf, s.sh])


def write_pitching_csv(path, seasons: Iterable[PlayerSeasonPitching]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["playerID", "yearID", "stint", "BFP", "IPouts", "H",
                         "HR", "SO", "BB", "HBP"])
        for s in seasons:
            writer.writerow([s.player_id, s.year, 1, s.bfp, s.ipouts, s.h,
                             s.hr, s.so, s.bb, s.hbp])
