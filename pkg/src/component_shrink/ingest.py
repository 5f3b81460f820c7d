"""Lahman-style CSV ingestion and component observation derivation.

Batting and pitching files carry one row per stint; rows are summed to one
record per (player, season) before any eligibility filtering. Each eligible
player-season then yields four binomial observations, one per component:

    batters   SO  (SO, AB)
              HR  (HR, AB - SO)
              HIP (H - HR, AB - SO - HR)
              BB  (BB + HBP, AB + BB + HBP)

    pitchers  BB  (BB + HBP, BFP)
              SO  (SO, BFP - BB - HBP)
              HR  (HR, BFP - BB - HBP - SO)
              HIP (H - HR, BFP - BB - HBP - SO - HR)
"""

from __future__ import annotations

import csv
import io
import os
from collections import defaultdict
from dataclasses import dataclass, fields
from typing import IO, Iterable, Union

from .errors import DataIntegrityError, DomainError, ParseError, SchemaError

COMPONENTS = ("BB", "SO", "HR", "HIP")

DEFAULT_MIN_AB = 100
DEFAULT_MIN_BFP = 300

BATTING_COUNTS = ("AB", "H", "HR", "SO", "BB", "HBP", "SF", "SH")
PITCHING_COUNTS = ("BFP", "IPouts", "H", "HR", "SO", "BB", "HBP")

# Lahman exports from R write missing values as "NA"
_MISSING = {"", "NA"}

Source = Union[str, os.PathLike, bytes, IO[bytes], IO[str]]


@dataclass(frozen=True)
class BattingRow:
    player_id: str
    year: int
    stint: int
    ab: int = 0
    h: int = 0
    hr: int = 0
    so: int = 0
    bb: int = 0
    hbp: int = 0
    sf: int = 0
    sh: int = 0


@dataclass(frozen=True)
class PitchingRow:
    player_id: str
    year: int
    stint: int
    bfp: int = 0
    ipouts: int = 0
    h: int = 0
    hr: int = 0
    so: int = 0
    bb: int = 0
    hbp: int = 0


@dataclass(frozen=True)
class PlayerSeasonBatting:
    player_id: str
    year: int
    ab: int
    h: int
    hr: int
    so: int
    bb: int = 0
    hbp: int = 0
    sf: int = 0
    sh: int = 0

    def check(self) -> None:
        where = f"{self.player_id} {self.year}"
        counts = [getattr(self, f.name) for f in fields(self)[2:]]
        if min(counts) < 0:
            raise DataIntegrityError(f"{where}: negative count")
        if self.h > self.ab:
            raise DataIntegrityError(f"{where}: H={self.h} exceeds AB={self.ab}")
        if self.hr > self.h:
            raise DataIntegrityError(f"{where}: HR={self.hr} exceeds H={self.h}")
        if self.so > self.ab - self.h:
            raise DataIntegrityError(
                f"{where}: SO={self.so} exceeds AB - H={self.ab - self.h}"
            )
        if self.so + self.hr > self.ab:
            raise DataIntegrityError(f"{where}: SO + HR exceeds AB={self.ab}")


@dataclass(frozen=True)
class PlayerSeasonPitching:
    player_id: str
    year: int
    bfp: int
    ipouts: int
    h: int
    hr: int
    so: int
    bb: int = 0
    hbp: int = 0

    @property
    def innings(self) -> float:
        return self.ipouts / 3.0

    def check(self) -> None:
        where = f"{self.player_id} {self.year}"
        counts = [getattr(self, f.name) for f in fields(self)[2:]]
        if min(counts) < 0:
            raise DataIntegrityError(f"{where}: negative count")
        if self.so > self.ipouts:
            raise DataIntegrityError(
                f"{where}: SO={self.so} exceeds IPouts={self.ipouts}"
            )
        if self.hr > self.h:
            raise DataIntegrityError(f"{where}: HR={self.hr} exceeds H={self.h}")


@dataclass(frozen=True)
class ComponentObservation:
    player_id: str
    successes: int
    opportunities: int

    def __post_init__(self):
        if not 0 <= self.successes <= self.opportunities:
            raise DataIntegrityError(
                f"{self.player_id}: need 0 <= y <= n, got "
                f"y={self.successes}, n={self.opportunities}"
            )

    @property
    def rate(self) -> float:
        return self.successes / self.opportunities


def _open_text(source: Source) -> IO[str]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, newline="", encoding="utf-8-sig")
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8-sig"), newline="")
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8-sig", newline="")


def _parse_table(source: Source, counts, row_type, what):
    stream = _open_text(source)
    try:
        reader = csv.DictReader(stream)
        header = [h.strip() for h in (reader.fieldnames or [])]
        reader.fieldnames = header
        for column in ("playerID", "yearID", "stint", *counts):
            if column not in header:
                raise SchemaError(column, what)

        rows = []
        for record in reader:
            line = reader.line_num
            player = (record["playerID"] or "").strip()
            if not player:
                raise ParseError("empty playerID", line)
            values = {}
            for column in ("yearID", "stint", *counts):
                raw = (record[column] or "").strip()
                if raw in _MISSING and column not in ("yearID", "stint"):
                    values[column] = 0
                    continue
                try:
                    values[column] = int(raw)
                except ValueError:
                    raise ParseError(
                        f"non-numeric value {raw!r} in column {column}", line
                    ) from None
            rows.append(
                row_type(
                    player,
                    values.pop("yearID"),
                    values.pop("stint"),
                    *(values[c] for c in counts),
                )
            )
        return rows
    finally:
        if stream is not source:
            stream.close()


def parse_batting_csv(source: Source) -> list[BattingRow]:
    """Read a Lahman ``Batting.csv`` table, one row object per data line.

    Columns are located by header name. Empty (or ``NA``) count fields read
    as 0; ``playerID``, ``yearID`` and ``stint`` must be present on every
    line.
    """
    return _parse_table(source, BATTING_COUNTS, BattingRow, "batting")


def parse_pitching_csv(source: Source) -> list[PitchingRow]:
    """Read a Lahman ``Pitching.csv`` table (same rules as batting)."""
    return _parse_table(source, PITCHING_COUNTS, PitchingRow, "pitching")


def _sum_stints(rows, count_names):
    totals = defaultdict(lambda: [0] * len(count_names))
    for row in rows:
        acc = totals[(row.player_id, row.year)]
        for i, name in enumerate(count_names):
            acc[i] += getattr(row, name)
    return sorted(totals.items(), key=lambda item: (item[0][1], item[0][0]))


def aggregate_stints(rows: Iterable[BattingRow]) -> list[PlayerSeasonBatting]:
    """Sum batting stints into one record per (player, season).

    Output is sorted by (year, player_id), so it does not depend on input
    order. Raises DataIntegrityError for a season total that breaks a
    counting invariant.
    """
    names = ("ab", "h", "hr", "so", "bb", "hbp", "sf", "sh")
    out = []
    for (player, year), c in _sum_stints(rows, names):
        season = PlayerSeasonBatting(player, year, *c)
        season.check()
        out.append(season)
    return out


def aggregate_pitching_stints(rows: Iterable[PitchingRow]) -> list[PlayerSeasonPitching]:
    names = ("bfp", "ipouts", "h", "hr", "so", "bb", "hbp")
    out = []
    for (player, year), c in _sum_stints(rows, names):
        season = PlayerSeasonPitching(player, year, *c)
        season.check()
        out.append(season)
    return out


def load_batting(source: Source) -> list[PlayerSeasonBatting]:
    return aggregate_stints(parse_batting_csv(source))


def load_pitching(source: Source) -> list[PlayerSeasonPitching]:
    return aggregate_pitching_stints(parse_pitching_csv(source))


def seasons_by_year(seasons):
    """Group player-season records into ``{year: [records]}``."""
    out = defaultdict(list)
    for s in seasons:
        out[s.year].append(s)
    return dict(out)


def batting_cells(s: PlayerSeasonBatting) -> tuple[int, int, int, int]:
    """Multinomial at-bat cell counts (SO, HR, HIP, OIP); they sum to AB."""
    return s.so, s.hr, s.h - s.hr, s.ab - s.so - s.h


def derive_batting_components(
    seasons: Iterable[PlayerSeasonBatting], min_ab: int = DEFAULT_MIN_AB
) -> dict[str, list[ComponentObservation]]:
    """Split each eligible batter-season into SO, HR, HIP and BB observations.

    Players below ``min_ab`` are dropped from all four lists. Observations
    with zero opportunities (e.g. a batter who struck out in every at-bat)
    are kept; the model layer ignores them when fitting.
    """
    if min_ab < 1:
        raise DomainError(f"min_ab must be >= 1, got {min_ab}")
    out = {c: [] for c in COMPONENTS}
    for s in seasons:
        if s.ab < min_ab:
            continue
        pid = s.player_id
        walks = s.bb + s.hbp
        out["SO"].append(ComponentObservation(pid, s.so, s.ab))
        out["HR"].append(ComponentObservation(pid, s.hr, s.ab - s.so))
        out["HIP"].append(ComponentObservation(pid, s.h - s.hr, s.ab - s.so - s.hr))
        out["BB"].append(ComponentObservation(pid, walks, s.ab + walks))
    return out


def derive_pitching_components(
    seasons: Iterable[PlayerSeasonPitching], min_bfp: int = DEFAULT_MIN_BFP
) -> dict[str, list[ComponentObservation]]:
    """Split each eligible pitcher-season into BB, SO, HR and HIP observations."""
    if min_bfp < 1:
        raise DomainError(f"min_bfp must be >= 1, got {min_bfp}")
    out = {c: [] for c in COMPONENTS}
    for s in seasons:
        if s.bfp < min_bfp:
            continue
        pid = s.player_id
        walks = s.bb + s.hbp
        after_bb = s.bfp - walks
        after_so = after_bb - s.so
        after_hr = after_so - s.hr
        if min(after_bb, after_so, after_hr) < 0:
            raise DataIntegrityError(
                f"{pid} {s.year}: BB+HBP+SO+HR exceeds BFP={s.bfp}"
            )
        if s.h - s.hr > after_hr:
            raise DataIntegrityError(
                f"{pid} {s.year}: hits in play exceed balls in play"
            )
        out["BB"].append(ComponentObservation(pid, walks, s.bfp))
        out["SO"].append(ComponentObservation(pid, s.so, after_bb))
        out["HR"].append(ComponentObservation(pid, s.hr, after_so))
        out["HIP"].append(ComponentObservation(pid, s.h - s.hr, after_hr))
    return out
