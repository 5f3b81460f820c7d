"""Exchangeable normal model for per-pitcher FIP values.

Each observed FIP is treated as a mean over ``weight`` innings:

    value_j | mu_j ~ Normal(mu_j, sigma2 / weight_j)
    mu_j           ~ Normal(mu, tau2)

so marginally value_j ~ Normal(mu, tau2 + sigma2 / weight_j). Season
aggregates carry no per-inning data, so sigma2 is estimated jointly with
(mu, tau2) by marginal maximum likelihood.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError, InsufficientDataError

# reported sigma2 when every value is identical (likelihood has no interior max)
SIGMA2_FLOOR = 1e-12


@dataclass(frozen=True)
class NormalObservation:
    player_id: str
    value: float
    weight: float

    def __post_init__(self):
        if not self.weight > 0:
            raise DomainError(f"{self.player_id}: weight must be positive, got {self.weight}")


@dataclass(frozen=True)
class NormalFit:
    mu: float
    tau2: float
    sigma2: float
    converged: bool = True
    log_likelihood: float = float("nan")
    n_players: int = 0


def marginal_log_likelihood(values, weights, mu, tau2, sigma2) -> float:
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    var = tau2 + sigma2 / weights
    return float(-0.5 * np.sum(np.log(2.0 * math.pi * var) + (values - mu) ** 2 / var))


def moment_start(values, weights) -> tuple[float, float, float]:
    """Rough (mu, tau2, sigma2) from regressing squared deviations on 1/weight."""
    mu0 = float(np.average(values, weights=weights))
    dev2 = (values - mu0) ** 2
    design = np.column_stack([np.ones_like(weights), 1.0 / weights])
    (tau2, sigma2), *_ = np.linalg.lstsq(design, dev2, rcond=None)
    total = float(dev2.mean())
    tau2 = max(tau2, 0.05 * total)
    sigma2 = max(sigma2, 0.05 * total * float(np.mean(weights)))
    return mu0, float(tau2), float(sigma2)


def fit_normal_exchangeable(observations: Sequence[NormalObservation]) -> NormalFit:
    """Marginal ML estimate of (mu, tau2, sigma2).

    Maximizes over (mu, log tau2, log sigma2) with Nelder-Mead, then
    compares against the tau2 = 0 boundary (closed form) and keeps the
    better of the two.
    """
    if len(observations) < 3:
        raise InsufficientDataError(
            f"normal model needs at least 3 observations, got {len(observations)}"
        )
    x = np.array([o.value for o in observations], dtype=float)
    w = np.array([o.weight for o in observations], dtype=float)
    n = len(x)

    if np.ptp(x) == 0.0:
        return NormalFit(float(x[0]), 0.0, SIGMA2_FLOOR, True,
                         marginal_log_likelihood(x, w, x[0], 0.0, SIGMA2_FLOOR), n)

    mu0, tau20, sigma20 = moment_start(x, w)

    def objective(p):
        return -marginal_log_likelihood(x, w, p[0], math.exp(p[1]), math.exp(p[2]))

    start = np.array([mu0, math.log(tau20), math.log(sigma20)])
    simplex = np.vstack([start, start + np.diag([0.1 * math.sqrt(tau20 + sigma20 / w.mean()), 0.5, 0.5])])
    res = minimize(
        objective, start, method="Nelder-Mead",
        options={"fatol": 1e-10, "xatol": 1e-8, "maxfev": 20000,
                 "initial_simplex": simplex},
    )
    mu, tau2, sigma2 = float(res.x[0]), math.exp(res.x[1]), math.exp(res.x[2])
    best = NormalFit(mu, tau2, sigma2, bool(res.success), -float(res.fun), n)

    # tau2 = 0: value_j ~ N(mu, sigma2 / w_j), a weighted-mean problem
    mu_b = float(np.average(x, weights=w))
    sigma2_b = float(np.sum(w * (x - mu_b) ** 2) / n)
    ll_b = marginal_log_likelihood(x, w, mu_b, 0.0, sigma2_b)
    if ll_b >= best.log_likelihood:
        best = NormalFit(mu_b, 0.0, sigma2_b, True, ll_b, n)
    return best


def shrink_normal(value: float, weight: float, fit: NormalFit) -> float:
    """Posterior mean of a pitcher's FIP ability given the fitted curve."""
    if not weight > 0:
        raise DomainError(f"weight must be positive, got {weight}")
    if fit.tau2 == 0.0:
        return fit.mu
    if math.isinf(fit.tau2):
        return value
    data_precision = weight / fit.sigma2
    prior_precision = 1.0 / fit.tau2
    return (value * data_precision + fit.mu * prior_precision) / (data_precision + prior_precision)
