"""Probability matching and randomized dependent rounding.

Given a lottery of attacker committees, the defender mirrors the attacker's
per-candidate marginals: p_i is scaled by 1/beta (beta = expected attacker
size / k) and clamped at 1, the resulting vector is padded up to total mass k,
and a pipage-style dependent rounding turns the fractional vector into a
random size-k committee that preserves every marginal and makes the membership
indicators negatively correlated.
"""

import math

import numpy as np

from .core import Committee, Lottery

#: tolerance on fractional vectors summing to an integer
SUM_TOL = 1e-9
#: values this close to 0/1 are treated as already integral
FRAC_TOL = 1e-9


def attacker_marginals(m: int, attack_lottery: Lottery) -> list[float]:
    """Per-candidate inclusion probabilities p_i of the attacker lottery."""
    p = [0.0] * m
    for members, prob in attack_lottery.entries:
        for c in members:
            if c >= m:
                raise ValueError(f"candidate {c} out of range for m={m}")
            p[c] += prob
    return [min(v, 1.0) for v in p]


def beta(attack_lottery: Lottery, k: int) -> float:
    """Expected attacker committee size divided by k; always in (0, 1]."""
    b = sum(prob * len(members) for members, prob in attack_lottery.entries) / k
    if not 0.0 < b <= 1.0 + SUM_TOL:
        raise ValueError(f"beta={b} outside (0, 1]; attacker sizes must be in [1, k]")
    return min(b, 1.0)


def match_probabilities(p: list[float], beta_value: float, k: int | None = None) -> list[float]:
    """Probability matching q_i = min(1, p_i / beta).

    When the committee size `k` is supplied, the guaranteed bound
    sum(q) <= k is asserted; a violation means the inputs are corrupted
    (p and beta not coming from the same attacker lottery).
    """
    if beta_value <= 0.0:
        raise ValueError(f"beta must be positive, got {beta_value}")
    q = [min(1.0, v / beta_value) for v in p]
    if k is not None and math.fsum(q) > k + SUM_TOL:
        raise RuntimeError(
            f"internal invariant violated: sum(q)={math.fsum(q)} > k={k}"
        )
    return q


def pad(q: list[float], k: int) -> list[float]:
    """Increase q to a vector alpha with q_i <= alpha_i <= 1 and sum(alpha) = k.

    Deterministic fill: coordinates are raised to 1 in order of descending q_i
    (ties by ascending candidate id); the final raised coordinate is set by
    subtraction so the total is exact.
    """
    m = len(q)
    if m < k:
        raise ValueError(f"cannot pad {m} coordinates up to total mass k={k}")
    total = math.fsum(q)
    if total > k + SUM_TOL:
        raise ValueError(f"sum(q)={total} exceeds k={k}")
    alpha = [min(1.0, max(0.0, v)) for v in q]
    order = sorted(range(m), key=lambda i: (-alpha[i], i))
    for i in order:
        need = k - math.fsum(alpha)
        if need <= SUM_TOL:
            break
        room = 1.0 - alpha[i]
        if room <= 0.0:
            continue
        if room < need:
            alpha[i] = 1.0
        else:
            # final partial raise, fixed by subtraction for an exact total
            alpha[i] = min(1.0, alpha[i] + need)
            target = k - math.fsum(alpha[j] for j in range(m) if j != i)
            if 0.0 <= target <= 1.0:
                alpha[i] = target
            break
    if abs(math.fsum(alpha) - k) > SUM_TOL:
        raise RuntimeError(f"padding failed to reach total {k}: {math.fsum(alpha)}")
    return alpha


def _round_pair(vals: list[float], i: int, j: int, u: float) -> None:
    """One dependent-rounding step on fractional coordinates i, j.

    With probability d2/(d1+d2) shift (+d1, -d1), otherwise (-d2, +d2), where
    d1 = min(1-a_i, a_j) and d2 = min(a_i, 1-a_j).  The saturating coordinate
    is assigned its exact integral value, so at least one of the pair becomes
    integral and the pair sum is preserved to machine precision.
    """
    ai, aj = vals[i], vals[j]
    d1 = min(1.0 - ai, aj)
    d2 = min(ai, 1.0 - aj)
    if u * (d1 + d2) < d2:
        if 1.0 - ai <= aj:
            vals[i] = 1.0
            vals[j] = aj - (1.0 - ai)
        else:
            vals[j] = 0.0
            vals[i] = ai + aj
    else:
        if ai <= 1.0 - aj:
            vals[i] = 0.0
            vals[j] = aj + ai
        else:
            vals[j] = 1.0
            vals[i] = ai - (1.0 - aj)


def _is_fractional(v: float) -> bool:
    return FRAC_TOL < v < 1.0 - FRAC_TOL


def dependent_round(alpha: list[float], rng: np.random.Generator) -> Committee:
    """Round a fractional vector with integral total mass k to a random
    committee of size exactly k.

    Marginals are preserved (Pr[i in output] = alpha_i) and membership
    indicators are negatively correlated.  Identical generator states yield
    identical committees.
    """
    vals = [float(a) for a in alpha]
    for idx, v in enumerate(vals):
        if not -SUM_TOL <= v <= 1.0 + SUM_TOL:
            raise ValueError(f"alpha[{idx}]={v} outside [0, 1]")
        if v <= FRAC_TOL:
            vals[idx] = 0.0
        elif v >= 1.0 - FRAC_TOL:
            vals[idx] = 1.0
    total = math.fsum(vals)
    k = round(total)
    if abs(total - k) > SUM_TOL:
        raise ValueError(f"sum(alpha)={total} is not within {SUM_TOL} of an integer")

    frac = [i for i, v in enumerate(vals) if _is_fractional(v)]
    u = rng.random(len(frac)) if frac else np.empty(0)
    step = 0
    live = -1  # lowest-indexed still-fractional coordinate
    for i in frac:
        if not _is_fractional(vals[i]):
            continue
        if live < 0:
            live = i
            continue
        _round_pair(vals, live, i, float(u[step]))
        step += 1
        for idx in (live, i):
            if vals[idx] <= FRAC_TOL:
                vals[idx] = 0.0
            elif vals[idx] >= 1.0 - FRAC_TOL:
                vals[idx] = 1.0
        if _is_fractional(vals[live]):
            pass
        elif _is_fractional(vals[i]):
            live = i
        else:
            live = -1
    if live >= 0:
        # float drift can leave one near-integral leftover; snap it
        if min(vals[live], 1.0 - vals[live]) > 1e-6:
            raise RuntimeError(f"rounding left a fractional coordinate: {vals[live]}")
        vals[live] = round(vals[live])

    members = tuple(i for i, v in enumerate(vals) if v > 0.5)
    if len(members) != k:
        raise RuntimeError(f"rounding produced size {len(members)}, expected {k}")
    return members
