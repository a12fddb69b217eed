"""Ground-truth oracles: exhaustive blocking search, stable-committee
existence search, justified-representation audit, and exact Poisson-binomial
checks of the two deviation inequalities the probabilistic argument rests on.

Every search here is exhaustive within a hard enumeration budget; a partial
search is never reported as exhaustive (BudgetExceededError instead).
Deterministic blocking uses the non-strict >= comparison as exact integer
arithmetic; lottery stability uses strict < on expectations.
"""

import itertools
import math
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .core import (
    Committee,
    Instance,
    Lottery,
    StabilityReport,
    capture_count,
    expected_capture,
    point_mass,
    violation_ratio,
)

#: hard cap on m**L for blocking enumeration
ENUM_BUDGET = 10**7
#: hard cap on the length of a Poisson-binomial probability vector
PMF_MAX_LEN = 10**3


class BudgetExceededError(Exception):
    """An exhaustive search would exceed the enumeration budget."""


def attackers(m: int, max_size: int) -> Iterator[Committee]:
    """All committees of size 1..max_size, size-major then lexicographic."""
    for size in range(1, max_size + 1):
        yield from itertools.combinations(range(m), size)


def _check_budget(instance: Instance, L: int) -> None:
    if not 1 <= L <= instance.k:
        raise ValueError(f"L={L} not in [1, k={instance.k}]")
    if instance.m**L > ENUM_BUDGET:
        raise BudgetExceededError(
            f"enumerating attackers up to size {L} over m={instance.m} "
            f"candidates exceeds the budget of {ENUM_BUDGET}"
        )


def worst_blocking(instance: Instance, lottery: Lottery, L: int) -> StabilityReport:
    """Exact maximum of the violation ratio over all attackers of size <= L.

    Ties are broken toward the lexicographically smallest attacker.
    """
    _check_budget(instance, L)
    best: Committee | None = None
    best_ratio = -1.0
    best_capture = 0.0
    for S in attackers(instance.m, L):
        ratio = violation_ratio(instance, lottery, S)
        if ratio > best_ratio or (ratio == best_ratio and best is not None and S < best):
            best = S
            best_ratio = ratio
            best_capture = expected_capture(instance, lottery, S)
    assert best is not None
    return StabilityReport(
        worst_attacker=best,
        capture=best_capture,
        budget=instance.n * len(best) / instance.k,
        ratio=best_ratio,
        l_checked=L,
    )


def is_stable_committee(instance: Instance, S: Committee, L: int) -> bool:
    """True iff no committee of size <= L blocks S.

    Blocking is V(S, S') >= n*|S'|/k, compared exactly as k*V >= n*|S'|.
    """
    if len(S) != instance.k:
        raise ValueError(f"committee size {len(S)} != k={instance.k}")
    _check_budget(instance, L)
    n, k = instance.n, instance.k
    for attacker in attackers(instance.m, L):
        if k * capture_count(instance, S, attacker) >= n * len(attacker):
            return False
    return True


def exists_stable_committee(instance: Instance) -> Committee | None:
    """Lexicographically first size-k committee with no blocking committee of
    any size <= k, or None when the instance admits no stable committee."""
    work = math.comb(instance.m, instance.k) * sum(
        math.comb(instance.m, l) for l in range(1, instance.k + 1)
    )
    if work > ENUM_BUDGET:
        raise BudgetExceededError(f"existence search needs {work} pair checks")
    for S in itertools.combinations(range(instance.m), instance.k):
        if is_stable_committee(instance, S, instance.k):
            return S
    return None


def jr_audit(instance: Instance, S: Committee) -> StabilityReport:
    """Justified-representation audit: worst singleton attacker against the
    point mass on S.  Ratio < 1 iff S satisfies JR (equivalently 1-stability)."""
    if len(S) != instance.k:
        raise ValueError(f"committee size {len(S)} != k={instance.k}")
    return worst_blocking(instance, point_mass(S), 1)


def poisson_binomial_pmf(probs: Sequence[float]) -> np.ndarray:
    """Exact-to-machine-precision pmf of a sum of independent Bernoullis."""
    if len(probs) > PMF_MAX_LEN:
        raise ValueError(f"probability vector longer than {PMF_MAX_LEN}")
    for p in probs:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"Bernoulli probability {p} outside [0, 1]")
    pmf = np.zeros(len(probs) + 1)
    pmf[0] = 1.0
    for i, p in enumerate(probs):
        head = pmf[: i + 2]
        shifted = np.concatenate(([0.0], head[:-1]))
        pmf[: i + 2] = head * (1.0 - p) + shifted * p
    return pmf


def poisson_binomial_cdf(probs: Sequence[float], eta: int) -> float:
    """Pr[X < eta] for X the sum of independent Bernoulli(probs_i)."""
    if eta < 0:
        raise ValueError(f"eta must be >= 0, got {eta}")
    if eta == 0:
        return 0.0
    if eta > len(probs):
        return 1.0
    return float(poisson_binomial_pmf(probs)[:eta].sum())


class InequalityCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def tail_bound_check(probs: Sequence[float], eta: int) -> InequalityCheck:
    """Check the lower-tail bound Pr[X < eta] < eta/E[X] for a sum of
    independent Bernoullis, computed exactly via the Poisson binomial."""
    if eta < 1:
        raise ValueError(f"eta must be >= 1, got {eta}")
    mu = math.fsum(probs)
    if mu <= 0.0:
        raise ValueError("E[X] must be positive")
    lhs = poisson_binomial_cdf(probs, eta)
    rhs = eta / mu
    return InequalityCheck(lhs, rhs, lhs < rhs)


def matching_bound_check(
    probs: Sequence[float], beta_value: float, y_dist: Sequence[float]
) -> InequalityCheck:
    """Check the probability-matching bound Pr[X < Y] < beta for X a sum of
    independent Bernoullis and Y an independent non-negative integer variable
    with E[Y] <= beta * E[X].

    ``y_dist[eta]`` is Pr[Y = eta].  Independence makes the left side exactly
    computable as sum_eta Pr[Y=eta] * Pr[X<eta].
    """
    mu = math.fsum(probs)
    y = [float(p) for p in y_dist]
    if any(p < 0.0 for p in y) or abs(math.fsum(y) - 1.0) > 1e-9:
        raise ValueError("y_dist must be a probability distribution")
    mean_y = math.fsum(eta * p for eta, p in enumerate(y))
    if mean_y > beta_value * mu + 1e-12:
        raise ValueError(f"E[Y]={mean_y} exceeds beta*E[X]={beta_value * mu}")
    pmf = poisson_binomial_pmf(probs)
    cdf = np.concatenate(([0.0], np.cumsum(pmf)))  # cdf[eta] = Pr[X < eta]
    lhs = math.fsum(
        p * float(cdf[min(eta, len(pmf))]) for eta, p in enumerate(y) if eta >= 1
    )
    return InequalityCheck(lhs, beta_value, lhs < beta_value)
