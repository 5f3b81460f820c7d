"""``component-shrink`` command-line entry point.

Settings are resolved as built-in defaults, then the JSON file named by
``$COMPONENT_SHRINK_CONFIG`` (keys match the long flag names with dashes
replaced by underscores), then command-line flags.

Exit status: 0 success, 1 usage/configuration, 2 data error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import charts
from .betabin import DEFAULT_LOG_K_CAP, FitOptions, fit_exchangeable, shrink
from .compose import PitchingComponents, fip_ability, fip_from_counts, hit_probability, on_base_probability
from .contest import (
    MEASURES,
    POPULATIONS,
    Eligibility,
    component_observations,
    fit_seasons,
    history,
    run_contest,
    trajectory,
)
from .errors import ComponentShrinkError, ConfigurationError, DataError, InsufficientDataError
from .ingest import COMPONENTS, DEFAULT_MIN_AB, DEFAULT_MIN_BFP, load_batting, load_pitching, seasons_by_year
from .synthetic import simulate_batting, simulate_pitching, write_batting_csv, write_pitching_csv

log = logging.getLogger("component_shrink")

CONFIG_ENV = "COMPONENT_SHRINK_CONFIG"
EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass
class RunConfig:
    batting: str | None = None
    pitching: str | None = None
    min_ab: int = DEFAULT_MIN_AB
    min_bfp: int = DEFAULT_MIN_BFP
    k_cap: float = DEFAULT_LOG_K_CAP
    ftol: float = 1e-8
    xtol: float = 1e-7
    max_evals: int = 5000
    out: str = "."
    format: str = "csv"
    seed: int = 0

    def validate(self):
        if self.min_ab < 1 or self.min_bfp < 1:
            raise ConfigurationError("--min-ab and --min-bfp must be >= 1")
        if self.ftol <= 0 or self.xtol <= 0 or self.max_evals < 1:
            raise ConfigurationError("optimizer tolerances must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigurationError(f"unknown output format {self.format!r}")

    @property
    def eligibility(self) -> Eligibility:
        return Eligibility(self.min_ab, self.min_bfp)

    @property
    def fit_options(self) -> FitOptions:
        return FitOptions(log_k_cap=self.k_cap, ftol=self.ftol, xtol=self.xtol,
                          max_evals=self.max_evals, seed=self.seed)


class UsageError(ComponentShrinkError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_config(argv_values: dict) -> RunConfig:
    values = {}
    path = os.environ.get(CONFIG_ENV)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                values = json.load(fh)
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from None
        known = {f.name for f in fields(RunConfig)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigurationError(f"unknown config keys in {path}: {', '.join(unknown)}")
    for f in fields(RunConfig):
        if argv_values.get(f.name) is not None:
            values[f.name] = argv_values[f.name]
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


# -- serialization ----------------------------------------------------------

def _cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6g}"
    return value


def _json_value(value):
    if isinstance(value, float):
        v = float(f"{value:.6g}")
        return v if math.isfinite(v) else None
    return value


def write_records(records: list[dict], path_stem: Path, fmt: str) -> Path:
    path = path_stem.with_suffix("." + fmt)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        payload = [{k: _json_value(v) for k, v in r.items()} for r in records]
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            columns = list(records[0]) if records else []
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for r in records:
                writer.writerow([_cell(r[c]) for c in columns])
    return path


def _write_svg(text: str, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


# -- data loading ------------------------------------------------------------

def _load(cfg: RunConfig, population: str):
    path = cfg.batting if population == "batters" else cfg.pitching
    flag = "--batting" if population == "batters" else "--pitching"
    if not path:
        raise UsageError(f"{population} data needed: pass {flag} PATH")
    if not os.path.isfile(path):
        raise DataError(f"data file not found: {path}")
    return load_batting(path) if population == "batters" else load_pitching(path)


def _season(data, year):
    rows = [s for s in data if s.year == year]
    if not rows:
        raise InsufficientDataError(f"no records for season {year}")
    return rows


def _year_range(data, year_from, year_to):
    years = sorted({s.year for s in data})
    lo = year_from if year_from is not None else years[0]
    hi = year_to if year_to is not None else years[-1]
    if lo > hi:
        raise UsageError(f"--year-from {lo} is after --year-to {hi}")
    return lo, hi


# -- subcommands -------------------------------------------------------------

def cmd_fit(cfg: RunConfig, args) -> list[Path]:
    data = _season(_load(cfg, args.population), args.year)
    obs = component_observations(data, args.population, cfg.eligibility)[args.component]
    fit = fit_exchangeable(obs, cfg.fit_options)
    record = {
        "year": args.year, "population": args.population, "component": args.component,
        "eta_hat": fit.eta, "K_hat": fit.K, "sd_hat": fit.talent_sd,
        "converged": fit.converged, "at_K_bound": fit.at_K_bound,
        "n_players": fit.n_players, "log_posterior": fit.log_posterior_at_mode,
    }
    stem = Path(cfg.out) / f"fit_{args.population}_{args.component}_{args.year}"
    return [write_records([record], stem, cfg.format)]


def _batter_estimates(cfg, data):
    eligible = [s for s in data if s.ab >= cfg.min_ab]
    comps = component_observations(eligible, "batters", cfg.eligibility)
    fits = {c: fit_exchangeable(comps[c], cfg.fit_options) for c in COMPONENTS}
    rows = []
    for j, s in enumerate(eligible):
        raw, est = {}, {}
        for c in COMPONENTS:
            o = comps[c][j]
            raw[c] = o.successes / o.opportunities if o.opportunities else float("nan")
            est[c] = shrink(o.successes, o.opportunities, fits[c])
        p_h = hit_probability(est["SO"], est["HR"], est["HIP"])
        pa = s.ab + s.bb + s.hbp
        rows.append({
            "player_id": s.player_id, "year": s.year, "AB": s.ab,
            "raw_SO": raw["SO"], "raw_HR": raw["HR"], "raw_HIP": raw["HIP"],
            "raw_BB": raw["BB"], "raw_BA": s.h / s.ab,
            "raw_OBP": (s.h + s.bb + s.hbp) / pa,
            "p_SO": est["SO"], "p_HR": est["HR"], "p_HIP": est["HIP"], "p_BB": est["BB"],
            "p_H": p_h, "p_OB": on_base_probability(est["BB"], p_h),
        })
    return rows


def _pitcher_estimates(cfg, data):
    eligible = [s for s in data if s.bfp >= cfg.min_bfp]
    comps = component_observations(eligible, "pitchers", cfg.eligibility)
    fits = {c: fit_exchangeable(comps[c], cfg.fit_options) for c in COMPONENTS}
    rows = []
    for j, s in enumerate(eligible):
        est = {c: shrink(comps[c][j].successes, comps[c][j].opportunities, fits[c])
               for c in COMPONENTS}
        raw_fip = (fip_from_counts(s.hr, s.bb + s.hbp, s.so, s.innings)
                   if s.ipouts > 0 else float("nan"))
        rows.append({
            "player_id": s.player_id, "year": s.year, "BFP": s.bfp,
            "raw_FIP": raw_fip,
            "p_BB": est["BB"], "p_SO": est["SO"], "p_HR": est["HR"], "p_HIP": est["HIP"],
            "FIP_ability": fip_ability(PitchingComponents(est["BB"], est["SO"], est["HR"], est["HIP"])),
        })
    return rows


def cmd_estimate(cfg: RunConfig, args) -> list[Path]:
    data = _season(_load(cfg, args.population), args.year)
    if args.population == "batters":
        rows = _batter_estimates(cfg, data)
    else:
        rows = _pitcher_estimates(cfg, data)
    stem = Path(cfg.out) / f"estimates_{args.population}_{args.year}"
    return [write_records(rows, stem, cfg.format)]


def cmd_contest(cfg: RunConfig, args) -> list[Path]:
    population = "pitchers" if args.measure == "FIP" else "batters"
    data = _load(cfg, population)
    lo, hi = _year_range(data, args.year_from, args.year_to)
    if lo == hi:
        raise UsageError("a contest needs --year-to > --year-from")
    by_year = seasons_by_year(data)
    rows = []
    for year in range(lo, hi):
        try:
            train, test = by_year.get(year), by_year.get(year + 1)
            if not train or not test:
                raise InsufficientDataError(f"season {year if not train else year + 1} missing")
            r = run_contest(args.measure, train, test, cfg.eligibility, cfg.fit_options)
        except ComponentShrinkError as exc:
            log.warning("contest %s %d->%d skipped: %s", args.measure, year, year + 1, exc)
            continue
        rows.append(asdict(r))
    if not rows:
        raise InsufficientDataError(f"no season pair in {lo}-{hi} could be scored")
    stem = Path(cfg.out) / f"contest_{args.measure}_{lo}_{hi}"
    svg = charts.scatter_chart(
        [(r["train_year"], r["improvement"]) for r in rows],
        f"Improvement of component method, {args.measure}",
        "season", "improvement I = S_I - S_C",
    )
    return [write_records(rows, stem, cfg.format), _write_svg(svg, stem.with_suffix(".svg"))]


def cmd_history(cfg: RunConfig, args) -> list[Path]:
    populations = list(POPULATIONS) if args.overlay else [args.population]
    series = {}
    rows = []
    for pop in populations:
        data = _load(cfg, pop)
        lo, hi = _year_range(data, args.year_from, args.year_to)
        by_year = {y: v for y, v in sorted(seasons_by_year(data).items()) if lo <= y <= hi}
        pts = history(by_year, args.component, pop, cfg.eligibility, cfg.fit_options)
        series[pop] = pts
        rows += [asdict(p) for p in pts]
    if not rows:
        raise InsufficientDataError("no season could be fitted")
    tag = "overlay" if args.overlay else args.population
    stem = Path(cfg.out) / f"history_{tag}_{args.component}"
    mean_svg = charts.line_chart(
        {pop: [(p.year, p.eta_hat) for p in pts] for pop, pts in series.items()},
        f"Mean {args.component} rate", "season", "eta_hat",
    )
    sd_svg = charts.line_chart(
        {pop: [(p.year, p.sd_hat) for p in pts] for pop, pts in series.items()},
        f"SD of {args.component} talent", "season", "sd_hat",
    )
    return [
        write_records(rows, stem, cfg.format),
        _write_svg(mean_svg, stem.with_name(stem.name + "_mean.svg")),
        _write_svg(sd_svg, stem.with_name(stem.name + "_sd.svg")),
    ]


def cmd_trajectory(cfg: RunConfig, args) -> list[Path]:
    data = _load(cfg, args.population)
    lo, hi = _year_range(data, args.year_from, args.year_to)
    elig = cfg.eligibility
    in_range = [s for s in data if lo <= s.year <= hi]
    mine = [s for s in in_range if s.player_id == args.player and elig.admits(s)]
    if not mine:
        raise DataError(f"unknown player {args.player!r}: no eligible season in {lo}-{hi}")
    years = sorted({s.year for s in mine})
    fits = fit_seasons(in_range, args.population, elig, cfg.fit_options, years=years)
    pts = trajectory(args.player, in_range, fits, args.population, elig)
    rows = [asdict(p) for p in pts]
    stem = Path(cfg.out) / f"trajectory_{args.population}_{args.player}"
    panels = {c: [(p.year, p.z) for p in pts if p.component == c] for c in COMPONENTS}
    svg = charts.panel_chart(panels, f"Standardized residuals: {args.player}", "season", "z")
    return [write_records(rows, stem, cfg.format), _write_svg(svg, stem.with_suffix(".svg"))]


def cmd_simulate(cfg: RunConfig, args) -> list[Path]:
    lo = args.year_from if args.year_from is not None else 2011
    hi = args.year_to if args.year_to is not None else lo + 1
    years = list(range(lo, hi + 1))
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    bat = out / "Batting.csv"
    pit = out / "Pitching.csv"
    write_batting_csv(bat, simulate_batting(args.players, years, (100, 650), seed=cfg.seed))
    write_pitching_csv(pit, simulate_pitching(args.players, years, (150, 950), seed=cfg.seed + 1))
    return [bat, pit]


COMMANDS = {
    "fit": cmd_fit, "estimate": cmd_estimate, "contest": cmd_contest,
    "history": cmd_history, "trajectory": cmd_trajectory, "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--batting", metavar="PATH")
    common.add_argument("--pitching", metavar="PATH")
    common.add_argument("--min-ab", dest="min_ab", type=int)
    common.add_argument("--min-bfp", dest="min_bfp", type=int)
    common.add_argument("--k-cap", dest="k_cap", type=float, help="cap on log K")
    common.add_argument("--ftol", type=float)
    common.add_argument("--xtol", type=float)
    common.add_argument("--max-evals", dest="max_evals", type=int)
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", metavar="DIR")
    common.add_argument("--seed", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="component-shrink",
                     description="Component-wise empirical Bayes estimates of batting and pitching ability.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", parents=[common], help="fit one talent curve")
    p.add_argument("--year", type=int, required=True)
    p.add_argument("--component", choices=COMPONENTS, required=True)
    p.add_argument("--population", choices=POPULATIONS, default="batters")

    p = sub.add_parser("estimate", parents=[common], help="per-player shrunken estimates")
    p.add_argument("--year", type=int, required=True)
    p.add_argument("--population", choices=POPULATIONS, default="batters")

    p = sub.add_parser("contest", parents=[common], help="season-pair prediction contests")
    p.add_argument("--measure", choices=MEASURES, default="BA")
    p.add_argument("--year-from", dest="year_from", type=int)
    p.add_argument("--year-to", dest="year_to", type=int)

    p = sub.add_parser("history", parents=[common], help="talent curve by season")
    p.add_argument("--component", choices=COMPONENTS, default="SO")
    p.add_argument("--population", choices=POPULATIONS, default="batters")
    p.add_argument("--overlay", action="store_true", help="fit batters and pitchers together")
    p.add_argument("--year-from", dest="year_from", type=int)
    p.add_argument("--year-to", dest="year_to", type=int)

    p = sub.add_parser("trajectory", parents=[common], help="standardized residuals for one player")
    p.add_argument("--player", required=True)
    p.add_argument("--population", choices=POPULATIONS, default="batters")
    p.add_argument("--year-from", dest="year_from", type=int)
    p.add_argument("--year-to", dest="year_to", type=int)

    p = sub.add_parser("simulate", parents=[common], help="write synthetic Batting.csv/Pitching.csv")
    p.add_argument("--players", type=int, default=400)
    p.add_argument("--year-from", dest="year_from", type=int)
    p.add_argument("--year-to", dest="year_to", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(vars(args))
        paths = COMMANDS[args.command](cfg, args)
    except (UsageError, ConfigurationError) as exc:
        print(f"component-shrink: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"component-shrink: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ComponentShrinkError as exc:
        print(f"component-shrink: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
