"""Composite abilities built from component probabilities.

All functions are plain arithmetic and accept numpy arrays as well as
floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegeneratePitcherError, DomainError


def _check_prob(name, value):
    v = np.asarray(value, dtype=float)
    if np.any(~((v >= 0.0) & (v <= 1.0))):
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class BattingComponents:
    p_so: float
    p_hr: float
    p_hip: float
    p_bb: Optional[float] = None

    def __post_init__(self):
        for name in ("p_so", "p_hr", "p_hip", "p_bb"):
            value = getattr(self, name)
            if value is not None:
                _check_prob(name, value)

    @property
    def p_hit(self) -> float:
        return hit_probability(self.p_so, self.p_hr, self.p_hip)

    @property
    def p_on_base(self) -> float:
        if self.p_bb is None:
            raise DomainError("on-base probability needs p_bb")
        return on_base_probability(self.p_bb, self.p_hit)


@dataclass(frozen=True)
class PitchingComponents:
    p_bb: float
    p_so: float
    p_hr: float
    p_hip: float

    def __post_init__(self):
        for name in ("p_bb", "p_so", "p_hr", "p_hip"):
            _check_prob(name, getattr(self, name))


def hit_probability(p_so, p_hr, p_hip):
    """Probability an at-bat is a hit: (1 - p_so) (p_hr + (1 - p_hr) p_hip)."""
    return (1.0 - p_so) * (p_hr + (1.0 - p_hr) * p_hip)


def on_base_probability(p_bb, p_hit):
    """Probability a plate appearance reaches base: p_bb + (1 - p_bb) p_hit.

    p_bb is the walk (BB + HBP) probability per plate appearance and p_hit
    the hit probability per at-bat. Sacrifices are ignored.
    """
    return p_bb + (1.0 - p_bb) * p_hit


def fip_ability(c: PitchingComponents, constant: float = 0.0) -> float:
    """FIP implied by component probabilities, i.e. expected FIP per inning.

    Runs the FIP weights 13 HR + 3 (BB + HBP) - 2 SO over expected counts
    per batter faced. Outs are strikeouts plus outs in play, three per
    inning. The league ``constant`` defaults to 0.
    """
    not_bb = 1.0 - c.p_bb
    outs = not_bb * (c.p_so + (1.0 - c.p_so) * (1.0 - c.p_hr) * (1.0 - c.p_hip))
    if np.any(np.asarray(outs) <= 0.0):
        raise DegeneratePitcherError(
            "pitcher records no outs (FIP denominator is zero)"
        )
    numerator = 39.0 * not_bb * (1.0 - c.p_so) * c.p_hr + 9.0 * c.p_bb - 6.0 * not_bb * c.p_so
    return numerator / outs + constant


def fip_from_counts(hr, bb_hbp, so, ip, constant: float = 0.0):
    """Observed FIP (13 HR + 3 (BB + HBP) - 2 SO) / IP + constant."""
    if np.any(np.asarray(ip) <= 0):
        raise DomainError(f"innings pitched must be positive, got {ip}")
    return (13.0 * hr + 3.0 * bb_hbp - 2.0 * so) / ip + constant


def expected_pitching_counts(c: PitchingComponents, bfp: float):
    """Expected (HR, BB + HBP, SO, IP) for ``bfp`` batters faced."""
    not_bb = 1.0 - c.p_bb
    hr = bfp * not_bb * (1.0 - c.p_so) * c.p_hr
    walks = bfp * c.p_bb
    so = bfp * not_bb * c.p_so
    ip = bfp * not_bb * (c.p_so + (1.0 - c.p_so) * (1.0 - c.p_hr) * (1.0 - c.p_hip)) / 3.0
    return hr, walks, so, ip
