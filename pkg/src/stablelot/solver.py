"""Attacker-expert multiplicative-weights solver for approximately stable
lotteries.

Every committee of size at most L is an expert.  Each round the attacker
lottery is the normalized expert-weight vector; the defender answers with a
probability-matched, dependently-rounded committee whose expected payoff
against that lottery is negative; expert weights then rise on attackers that
would have fared well against the answer.  The uniform mixture of the
defender's answers converges to an epsilon-approximately L-stable lottery,
which is certified by exhaustive verification before being returned.
"""

import itertools
import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import rounding, verify
from .core import (
    Committee,
    Instance,
    Lottery,
    StabilityReport,
    capture_count,
    make_lottery,
    prefers,
)


class SolverError(RuntimeError):
    """The rounding oracle exhausted its trial budget; indicates a bug, since
    an acceptable committee always exists."""


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for mwu_solve.

    epsilon        target approximation, in (0, 1/5)
    L              attacker size bound, in [1, k]
    seed           PRNG seed; equal (instance, config) pairs give equal output
    max_iters      optional cap on MWU rounds (default: regret-bound estimate)
    sample_voters  estimate capture counts from this many sampled voters
                   instead of exact counting (certification stays exact)
    check_every    try an early exit every this many rounds
    """

    epsilon: float
    L: int
    seed: int = 0
    max_iters: int | None = None
    sample_voters: int | None = None
    check_every: int = 8

    def __post_init__(self):
        if not 0.0 < self.epsilon < 0.2:
            raise ValueError(f"epsilon must be in (0, 1/5), got {self.epsilon}")
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if self.check_every < 1:
            raise ValueError("check_every must be >= 1")
        if self.sample_voters is not None and self.sample_voters < 1:
            raise ValueError("sample_voters must be >= 1")


def auto_l(instance: Instance) -> int:
    """Attacker size bound that certifies full stability: singleton attackers
    suffice when every voter ranks (blocking is subadditive there); otherwise
    attackers up to the committee size are needed."""
    return 1 if instance.all_ranking() else instance.k


def enumerate_experts(m: int, L: int) -> list[Committee]:
    """All committees of size 1..L, size-major then lexicographic."""
    return [
        S for size in range(1, L + 1) for S in itertools.combinations(range(m), size)
    ]


def estimate_capture(
    instance: Instance,
    defender: Committee,
    attacker: Committee,
    sample_voters: int,
    rng: np.random.Generator,
) -> float:
    """Estimate the capture count by asking `sample_voters` voters, drawn with
    replacement proportionally to their weights, to compare the committees."""
    weights = np.array([v.weight for v in instance.voters], dtype=float)
    idx = rng.choice(len(instance.voters), size=sample_voters, p=weights / instance.n)
    hits = sum(1 for i in idx if prefers(instance.voters[i], defender, attacker))
    return instance.n * hits / sample_voters


def gain(
    instance: Instance,
    defender: Committee,
    attacker: Committee,
    epsilon: float,
    sample_voters: int | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """Expert gain V(defender, attacker) - (1+epsilon) * n * |attacker| / k,
    with V optionally replaced by a sampled estimate."""
    if sample_voters is None:
        v = capture_count(instance, defender, attacker)
    else:
        if rng is None:
            raise ValueError("sampled gains need an explicit rng")
        v = estimate_capture(instance, defender, attacker, sample_voters, rng)
    return v - (1.0 + epsilon) * instance.n * len(attacker) / instance.k


def _oracle_trials(
    alpha: list[float],
    rng: np.random.Generator,
    value_fn: Callable[[Committee], float],
    threshold: float,
    max_trials: int,
) -> Committee:
    """Re-round alpha until the defender's expected capture drops below the
    acceptance threshold."""
    best = math.inf
    for _ in range(max_trials):
        S = rounding.dependent_round(alpha, rng)
        value = value_fn(S)
        if value - threshold < 0.0:
            return S
        best = min(best, value - threshold)
    raise SolverError(
        f"no acceptable committee within {max_trials} rounding trials "
        f"(best residual {best})"
    )


def defender_oracle(
    instance: Instance,
    attack_lottery: Lottery,
    epsilon: float,
    rng: np.random.Generator,
    max_trials: int | None = None,
    sample_voters: int | None = None,
) -> Committee:
    """Find a size-k committee whose expected payoff against the attacker
    lottery is below -epsilon * n * E[|S_a|] / k.

    Pipeline: attacker marginals -> beta -> probability matching -> padding ->
    dependent rounding, re-rounded until accepted.  With exact capture counts
    acceptance tests the expected payoff directly; with sampling the threshold
    is widened to 2*epsilon to absorb estimation error.
    """
    if not 0.0 < epsilon < 0.2:
        raise ValueError(f"epsilon must be in (0, 1/5), got {epsilon}")
    k, n = instance.k, instance.n
    p = rounding.attacker_marginals(instance.m, attack_lottery)
    b = rounding.beta(attack_lottery, k)
    alpha = rounding.pad(rounding.match_probabilities(p, b, k), k)

    if sample_voters is None:
        def value_fn(S: Committee) -> float:
            return sum(
                prob * capture_count(instance, S, S_a)
                for S_a, prob in attack_lottery.entries
            )

        eps_accept = epsilon
    else:
        def value_fn(S: Committee) -> float:
            return sum(
                prob * estimate_capture(instance, S, S_a, sample_voters, rng)
                for S_a, prob in attack_lottery.entries
            )

        eps_accept = 2.0 * epsilon

    if max_trials is None:
        max_trials = math.ceil(64.0 / epsilon)
    return _oracle_trials(alpha, rng, value_fn, (1.0 + eps_accept) * n * b, max_trials)


def best_response(instance: Instance, lottery: Lottery, L: int) -> StabilityReport:
    """Exact worst attacker of size <= L against the lottery."""
    return verify.worst_blocking(instance, lottery, L)


def _uniform_lottery(k: int, counts: dict[Committee, int], total: int) -> Lottery:
    return make_lottery(k, [(S, c / total) for S, c in counts.items()])


def mwu_solve(
    instance: Instance,
    config: SolverConfig,
    attacker_log: list[Lottery] | None = None,
) -> tuple[Lottery, StabilityReport]:
    """Compute an epsilon-approximately L-stable lottery.

    The epsilon budget is split evenly: the oracle runs at epsilon/2 and the
    remaining half covers MWU regret.  Every `check_every` rounds the uniform
    mixture of the defender answers so far is verified exhaustively; the first
    mixture whose worst violation ratio is <= 1+epsilon is returned with
    ``certified=True``.  If the round budget runs out, the best mixture seen
    is returned with ``certified=False``.

    When `attacker_log` is given, the attacker lottery of every round is
    appended to it (test instrumentation).
    """
    k, n, m = instance.k, instance.n, instance.m
    if m < k:
        raise ValueError("need m >= k")
    L = config.L
    if L > k:
        raise ValueError(f"L={L} exceeds k={k}")
    if m**L > verify.ENUM_BUDGET:
        raise verify.BudgetExceededError(
            f"expert enumeration m^L = {m}**{L} exceeds {verify.ENUM_BUDGET}"
        )

    experts = enumerate_experts(m, L)
    n_experts = len(experts)
    sizes = np.array([len(S) for S in experts], dtype=float)
    incidence = np.zeros((n_experts, m))
    for i, S in enumerate(experts):
        incidence[i, list(S)] = 1.0

    eps = config.epsilon
    eps_oracle = eps / 2.0
    eps_accept = 2.0 * eps_oracle if config.sample_voters is not None else eps_oracle
    log_n = math.log(max(n_experts, 2))
    rounds = config.max_iters or math.ceil(16.0 * (k / eps) ** 2 * log_n)
    eta = min(0.5, math.sqrt(log_n / rounds))
    width = (2.0 + eps) * n
    budget_vec = (1.0 + eps_oracle) * n * sizes / k
    max_trials = math.ceil(64.0 / eps_oracle)

    rng = np.random.default_rng(config.seed)
    vcache: dict[Committee, np.ndarray] = {}

    def v_vector(S: Committee) -> np.ndarray:
        vec = vcache.get(S)
        if vec is None:
            if config.sample_voters is None:
                vec = np.array(
                    [capture_count(instance, S, S_a) for S_a in experts], dtype=float
                )
            else:
                vec = np.array(
                    [
                        estimate_capture(instance, S, S_a, config.sample_voters, rng)
                        for S_a in experts
                    ]
                )
            vcache[S] = vec
        return vec

    weights = np.ones(n_experts)
    vsum = np.zeros(n_experts)
    counts: dict[Committee, int] = {}
    best_ratio = math.inf
    best_counts: dict[Committee, int] = {}
    best_total = 0

    for t in range(1, rounds + 1):
        probs = weights / weights.sum()
        if attacker_log is not None:
            attacker_log.append(
                make_lottery(
                    k,
                    [(experts[i], float(probs[i])) for i in range(n_experts)],
                    require_exact_size=False,
                )
            )

        p = (probs @ incidence).tolist()
        b = float(probs @ sizes) / k
        alpha = rounding.pad(rounding.match_probabilities(p, b, k), k)
        S_d = _oracle_trials(
            alpha,
            rng,
            lambda S: float(probs @ v_vector(S)),
            (1.0 + eps_accept) * n * b,
            max_trials,
        )

        v_d = v_vector(S_d)
        counts[S_d] = counts.get(S_d, 0) + 1
        vsum += v_d

        gains = np.clip(v_d - budget_vec, -width, width)
        weights = weights * (1.0 + eta * gains / width)
        weights /= weights.max()

        if t % config.check_every == 0 or t == rounds:
            ratios = (vsum / t) * k / (n * sizes)
            ratio = float(ratios.max())
            if ratio < best_ratio:
                best_ratio = ratio
                best_counts = dict(counts)
                best_total = t
            if ratio <= 1.0 + eps:
                lottery = _uniform_lottery(k, counts, t)
                report = verify.worst_blocking(instance, lottery, L)
                if report.ratio <= 1.0 + eps:
                    return lottery, replace(report, certified=True)

    lottery = _uniform_lottery(k, best_counts, best_total)
    report = verify.worst_blocking(instance, lottery, L)
    return lottery, replace(report, certified=report.ratio <= 1.0 + eps)
