"""Exchangeable beta-binomial random-effects model.

Player probabilities p_j are drawn from Beta(K*eta, K*(1 - eta)); player j
contributes y_j successes in n_j trials. The hyperparameters get the vague
prior g(K, eta) ∝ 1 / (eta (1 - eta) (1 + K)^2) and are estimated by their
posterior mode, searched in the unconstrained coordinates

    theta1 = logit(eta),  theta2 = log(K).

With the Jacobian of that transform included the prior contributes
log K - 2 log(1 + K) to the log posterior.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar
from scipy.special import digamma, expit, gammaln, logit

from .errors import DomainError, InsufficientDataError
from .ingest import ComponentObservation

log = logging.getLogger(__name__)

DEFAULT_LOG_K_CAP = 15.0
# logit(eta) search box; keeps eta strictly inside (0, 1) in float64
_THETA1_BOUND = 30.0
_LOG_K_FLOOR = -10.0


@dataclass(frozen=True)
class FitOptions:
    log_k_cap: float = DEFAULT_LOG_K_CAP
    ftol: float = 1e-8
    xtol: float = 1e-7
    max_evals: int = 5000
    restarts: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.ftol <= 0 or self.xtol <= 0:
            raise DomainError("optimizer tolerances must be positive")
        if self.max_evals < 1 or self.restarts < 0:
            raise DomainError("max_evals must be >= 1 and restarts >= 0")


@dataclass(frozen=True)
class RandomEffectsFit:
    """Posterior-mode talent curve for one component."""

    eta: float
    K: float
    log_posterior_at_mode: float = float("nan")
    converged: bool = True
    at_K_bound: bool = False
    n_players: int = 0
    log_k_cap: float = DEFAULT_LOG_K_CAP
    talent_sd: float = field(init=False)

    def __post_init__(self):
        if not (0.0 < self.eta < 1.0) or not self.K > 0:
            raise DomainError(f"need 0 < eta < 1 and K > 0, got ({self.eta}, {self.K})")
        object.__setattr__(self, "talent_sd", talent_sd(self.eta, self.K))

    @property
    def theta(self) -> tuple[float, float]:
        return float(logit(self.eta)), math.log(self.K)


@dataclass(frozen=True)
class ShrunkenEstimate:
    player_id: str
    y: int
    n: int
    p_hat: float


def talent_sd(eta: float, K: float) -> float:
    """Standard deviation of the Beta(K eta, K (1 - eta)) talent curve."""
    return math.sqrt(eta * (1.0 - eta) / (K + 1.0))


def _check_params(eta, K):
    if not (0.0 < eta < 1.0):
        raise DomainError(f"eta must lie in (0, 1), got {eta}")
    if not K > 0:
        raise DomainError(f"K must be positive, got {K}")


def _check_counts(y, n):
    if not (0 <= y <= n):
        raise DomainError(f"need 0 <= y <= n, got y={y}, n={n}")


def _log_marginals(y, n, a, b):
    """Vectorized log beta-binomial mass, including the binomial coefficient."""
    log_choose = gammaln(n + 1) - gammaln(y + 1) - gammaln(n - y + 1)
    return (
        log_choose
        + gammaln(y + a) + gammaln(n - y + b) - gammaln(n + a + b)
        - gammaln(a) - gammaln(b) + gammaln(a + b)
    )


def log_marginal(y: int, n: int, eta: float, K: float) -> float:
    """log P(y | n, eta, K) under the beta-binomial model.

    Evaluated through log-gamma so that n in the hundreds does not overflow
    the beta-function ratio. ``n == 0`` gives 0.
    """
    _check_counts(y, n)
    _check_params(eta, K)
    if n == 0:
        return 0.0
    return float(_log_marginals(y, n, K * eta, K * (1.0 - eta)))


def _as_arrays(observations: Sequence[ComponentObservation]):
    y = np.array([o.successes for o in observations], dtype=float)
    n = np.array([o.opportunities for o in observations], dtype=float)
    keep = n > 0
    return y[keep], n[keep]


def _prior_term(log_k):
    # log K - 2 log(1 + K), written to stay finite for large log K
    return log_k - 2.0 * np.logaddexp(0.0, log_k)


def _log_posterior_arrays(y, n, theta1, theta2):
    eta = expit(theta1)
    K = math.exp(theta2)
    a, b = K * eta, K * (1.0 - eta)
    if a <= 0 or b <= 0:
        return -math.inf
    return float(np.sum(_log_marginals(y, n, a, b)) + _prior_term(theta2))


def log_posterior(observations: Sequence[ComponentObservation], theta) -> float:
    """Log posterior of (logit eta, log K), up to an additive constant.

    Observations with zero opportunities contribute nothing.
    """
    y, n = _as_arrays(observations)
    if y.size == 0:
        raise DomainError("no observations with positive opportunities")
    theta1, theta2 = (float(t) for t in theta)
    return _log_posterior_arrays(y, n, theta1, theta2)


def log_posterior_grad(observations: Sequence[ComponentObservation], theta) -> np.ndarray:
    """Analytic gradient of :func:`log_posterior` in (logit eta, log K)."""
    y, n = _as_arrays(observations)
    if y.size == 0:
        raise DomainError("no observations with positive opportunities")
    theta1, theta2 = (float(t) for t in theta)
    eta = expit(theta1)
    K = math.exp(theta2)
    a, b = K * eta, K * (1.0 - eta)
    common = digamma(a + b) - digamma(n + a + b)
    d_a = np.sum(digamma(y + a) - digamma(a) + common)
    d_b = np.sum(digamma(n - y + b) - digamma(b) + common)
    g1 = K * eta * (1.0 - eta) * (d_a - d_b)
    g2 = a * d_a + b * d_b + 1.0 - 2.0 * K / (1.0 + K)
    return np.array([g1, g2])


def moment_start(y: np.ndarray, n: np.ndarray) -> tuple[float, float]:
    """Method-of-moments (eta, K) used to seed the optimizer.

    eta0 is the pooled rate. K0 matches the between-player variance of the
    raw rates to eta0 (1 - eta0) (1/nbar + 1/(K + 1)); when the observed
    spread is no larger than binomial noise alone K0 falls back to 100.
    """
    total = n.sum()
    eta0 = y.sum() / total
    # pooled rate of exactly 0 or 1 would put logit at infinity
    eta0 = min(max(eta0, 0.5 / total), 1.0 - 0.5 / total)
    rates = y / n
    var = rates.var(ddof=1) if rates.size > 1 else 0.0
    excess = var / (eta0 * (1.0 - eta0)) - 1.0 / n.mean()
    K0 = 100.0
    if excess > 0:
        K0 = 1.0 / excess - 1.0
        if K0 <= 0:
            K0 = 100.0
    return float(eta0), float(K0)


def _simplex(x0, steps):
    pts = [x0]
    for i, step in enumerate(steps):
        p = x0.copy()
        p[i] += step
        pts.append(p)
    return np.array(pts)


def fit_exchangeable(
    observations: Sequence[ComponentObservation], options: FitOptions | None = None
) -> RandomEffectsFit:
    """Posterior mode of (eta, K) for one collection of component observations.

    Uses Nelder-Mead from the moment estimate plus ``options.restarts``
    perturbed copies of it, keeping the best. log K is capped at
    ``options.log_k_cap``; a mode on the cap is flagged with
    ``at_K_bound`` and K is set to exactly exp(cap).
    """
    opts = options or FitOptions()
    y, n = _as_arrays(observations)
    if y.size < 2:
        raise InsufficientDataError(
            f"need at least 2 observations with n > 0, got {y.size}"
        )

    def objective(theta):
        return -_log_posterior_arrays(y, n, theta[0], theta[1])

    eta0, K0 = moment_start(y, n)
    cap = opts.log_k_cap
    x0 = np.array([logit(eta0), min(math.log(K0), cap - 0.5)])
    rng = np.random.default_rng(opts.seed)
    starts = [x0] + [
        x0 + rng.normal(0.0, [0.25, 0.75]) for _ in range(opts.restarts)
    ]
    bounds = [(-_THETA1_BOUND, _THETA1_BOUND), (_LOG_K_FLOOR, cap)]

    best = None
    for start in starts:
        start = np.clip(start, [b[0] for b in bounds], [b[1] - 0.5 for b in bounds])
        res = minimize(
            objective,
            start,
            method="Nelder-Mead",
            bounds=bounds,
            options={
                "fatol": opts.ftol,
                "xatol": opts.xtol,
                "maxfev": opts.max_evals,
                "initial_simplex": _simplex(start, [0.1, 0.5]),
            },
        )
        if best is None or res.fun < best.fun:
            best = res

    theta1, theta2 = float(best.x[0]), float(best.x[1])
    converged = bool(best.success)
    value = -float(best.fun)
    at_bound = theta2 >= cap - 1e-4
    if at_bound:
        theta2 = cap
        line = minimize_scalar(
            lambda t: -_log_posterior_arrays(y, n, t, cap),
            bounds=(theta1 - 1.0, theta1 + 1.0),
            method="bounded",
            options={"xatol": 1e-10},
        )
        theta1, value = float(line.x), -float(line.fun)
        log.info("K reached its cap exp(%g) over %d players", cap, y.size)

    return RandomEffectsFit(
        eta=float(expit(theta1)),
        K=math.exp(theta2),
        log_posterior_at_mode=value,
        converged=converged,
        at_K_bound=at_bound,
        n_players=int(y.size),
        log_k_cap=cap,
    )


def shrink(y: int, n: int, fit: RandomEffectsFit) -> float:
    """Plug-in posterior mean (y + K eta) / (n + K)."""
    _check_counts(y, n)
    return (y + fit.K * fit.eta) / (n + fit.K)


def shrink_all(
    observations: Sequence[ComponentObservation], fit: RandomEffectsFit
) -> list[ShrunkenEstimate]:
    return [
        ShrunkenEstimate(o.player_id, o.successes, o.opportunities,
                         shrink(o.successes, o.opportunities, fit))
        for o in observations
    ]


def predictive_sd(n: int, fit: RandomEffectsFit) -> float:
    """Predictive SD of an observed rate y/n: sqrt(eta(1-eta)(1/n + 1/(K+1)))."""
    if n < 1:
        raise DomainError(f"predictive_sd needs n >= 1, got {n}")
    return math.sqrt(fit.eta * (1.0 - fit.eta) * (1.0 / n + 1.0 / (fit.K + 1.0)))


def standardized_residual(y: int, n: int, fit: RandomEffectsFit) -> float:
    if n < 1:
        raise DomainError(f"standardized_residual needs n >= 1, got {n}")
    _check_counts(y, n)
    return (y / n - fit.eta) / predictive_sd(n, fit)
