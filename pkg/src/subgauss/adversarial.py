"""Executable lower-bound ingredients used as stress tests.

Three mechanisms: a two-point coupling that forces any estimator to fail on
one of two nearly indistinguishable distributions, a product-density ratio
floor for the unit-scale double-exponential family, and point-mass bounds
for the Poisson family.  The first is a randomized stress test; the latter
two are deterministic self-checks that must always hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .distributions import Sample, as_values
from .seeding import mix_seed

__all__ = [
    "CoupledSample",
    "coupled_scaled_bernoulli",
    "scaled_bernoulli_moment",
    "infvar_stress",
    "laplace_ratio_floor",
    "poisson_point_mass_check",
]


@dataclass(frozen=True)
class CoupledSample:
    """Paired samples with (x_i, y_i) in {(0, 0), (c, -c)} for some c > 0."""

    x: Sample
    y: Sample

    def __post_init__(self):
        xv = self.x.values
        yv = self.y.values
        if xv.size != yv.size:
            raise ValueError("coupled samples must have equal length")
        if not np.array_equal(yv, -xv):
            raise ValueError("coupling requires y = -x elementwise")
        nonzero = xv[xv != 0.0]
        if nonzero.size and (np.min(nonzero) <= 0.0 or np.ptp(nonzero) != 0.0):
            raise ValueError("nonzero x entries must all equal one positive c")


def coupled_scaled_bernoulli(c: float, p: float, n: int, seed: int) -> CoupledSample:
    """Draw n i.i.d. coupled pairs: (c, -c) with probability p, else (0, 0).

    The marginals are the two-point laws with means +pc and -pc; the full
    vectors coincide exactly when no pair fires, probability (1-p)^n.
    """
    if c <= 0.0:
        raise ValueError("c must be > 0")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if n < 1:
        raise ValueError("n must be >= 1")
    hits = np.random.default_rng(seed).random(n) < p
    x = np.where(hits, c, 0.0)
    y = np.where(hits, -c, 0.0)
    return CoupledSample(Sample(x), Sample(y))


def scaled_bernoulli_moment(c: float, p: float, alpha: float) -> float:
    """Central (1+alpha)-moment of the two-point law P({c}) = p, P({0}) = 1-p.

    Equals c^(1+alpha) * p * (1-p) * (p^alpha + (1-p)^alpha); the same value
    holds for the mirrored law on {-c, 0}.
    """
    if c <= 0.0:
        raise ValueError("c must be > 0")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    return c ** (1.0 + alpha) * p * (1.0 - p) * (p**alpha + (1.0 - p) ** alpha)


def infvar_stress(
    estimator: Callable[[np.ndarray], float],
    n: int,
    delta: float,
    alpha: float,
    M: float,
    trials: int,
    seed: int,
    p: float | None = None,
) -> tuple[float, float, float]:
    """Coupled two-point stress test against a mean estimator.

    Each trial draws a coupling whose marginals share the central
    (1+alpha)-moment M yet have means +pc and -pc, and coincide with
    probability (1-p)^n.  On a coinciding draw the estimator returns one
    number, so it must err beyond radius
    (M^(1/alpha) * ln(2/delta) / n)^(alpha/(1+alpha)) on at least one
    marginal; hence max(failure rates) >= match_rate / 2 up to Monte Carlo
    noise.  That inequality is the mechanism behind minimax lower bounds for
    infinite-variance classes.

    Returns (failure_rate_plus, failure_rate_minus, match_rate).  By default
    p = (2/n) ln(2/delta); pass p to explore other couplings.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    if M <= 0.0:
        raise ValueError("M must be > 0")
    log_term = math.log(2.0 / delta)
    if p is None:
        p = (2.0 / n) * log_term
    if not 0.0 < p < 1.0:
        raise ValueError(
            f"coupling probability p={p:.6g} outside (0, 1); delta too small for n"
        )
    c = (M / (p * (1.0 - p) * (p**alpha + (1.0 - p) ** alpha))) ** (1.0 / (1.0 + alpha))
    radius = (M ** (1.0 / alpha) * log_term / n) ** (alpha / (1.0 + alpha))
    mean_plus = p * c

    fail_plus = 0
    fail_minus = 0
    match = 0
    for t in range(trials):
        cs = coupled_scaled_bernoulli(c, p, n, mix_seed(seed, t))
        xv = cs.x.values
        yv = cs.y.values
        if abs(estimator(xv) - mean_plus) > radius:
            fail_plus += 1
        if abs(estimator(yv) + mean_plus) > radius:
            fail_minus += 1
        if np.array_equal(xv, yv):
            match += 1
    return fail_plus / trials, fail_minus / trials, match / trials


def laplace_ratio_floor(lam: float, n: int, points) -> bool:
    """Check the product-density ratio bound for unit-scale double
    exponentials centered at 0 versus lam.

    Evaluates both product log-densities at the given n-vector and returns
    whether log(f_0(x)/f_lam(x)) >= -lam*n.  The triangle inequality makes
    this a theorem, so False indicates a density bug; a 1e-9 relative slack
    absorbs float rounding at the tight boundary.
    """
    if lam < 0.0:
        raise ValueError("lam must be >= 0")
    values = as_values(points)
    if values.size != n:
        raise ValueError(f"points has length {values.size}, expected n={n}")
    log_ratio = float(np.sum(np.abs(values - lam)) - np.sum(np.abs(values)))
    floor = -lam * n
    return bool(log_ratio >= floor - 1e-9 * max(1.0, abs(floor)))


def poisson_point_mass_check(m: int) -> bool:
    """Check Poisson(m) puts mass at least 1/(4 sqrt(m)) on the point m.

    Uses the log-gamma form of the pmf; by Stirling the true mass is
    ~ 1/sqrt(2 pi m), comfortably above the floor for every m >= 1.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    log_pmf = -m + m * math.log(m) - float(gammaln(m + 1))
    return bool(math.exp(log_pmf) >= 0.25 / math.sqrt(m))
