"""Deterministic voting rules for the approval model: PAV scoring (greedy and
exhaustive), the constructive k=3 stable-committee algorithm, and Pareto
improvement over an enumerated committee pool.

PAV selection and the k=3 construction compare scores and vote counts with
exact (rational / integer) arithmetic so tie-breaking is never at the mercy of
floating point.  Ties break toward the ascending candidate id / the
lexicographically smallest committee throughout.
"""

import itertools
import math
from fractions import Fraction
from typing import Iterable

from .core import Approval, Committee, Instance, capture_count, committee, prefers

#: candidate-count guard for exhaustive PAV enumeration
PAV_ENUM_MAX_M = 20
#: pair-check guard for Pareto improvement
PARETO_BUDGET = 10**7


def _require_approval(instance: Instance, what: str) -> None:
    if not instance.all_approval():
        raise ValueError(f"{what} is defined for approval preferences only")


def _harmonic(r: int) -> float:
    return math.fsum(1.0 / i for i in range(1, r + 1))


def pav_score(instance: Instance, S: Iterable[int]) -> float:
    """PAV score: sum over voters of weight * (1 + 1/2 + ... + 1/r) where r is
    the number of committee members the voter approves."""
    _require_approval(instance, "pav_score")
    members = set(S)
    return math.fsum(
        v.weight * _harmonic(len(v.pref.approves & members)) for v in instance.voters
    )


def _pav_score_exact(instance: Instance, members: set[int]) -> Fraction:
    total = Fraction(0)
    for v in instance.voters:
        r = len(v.pref.approves & members)
        for i in range(1, r + 1):
            total += Fraction(v.weight, i)
    return total


def pav_greedy(instance: Instance) -> Committee:
    """Sequential PAV: k rounds, each adding the candidate with the largest
    marginal score gain, ties broken by ascending candidate id."""
    _require_approval(instance, "pav_greedy")
    chosen: set[int] = set()
    # r_v = number of already-chosen candidates voter v approves
    r = [0] * len(instance.voters)
    for _ in range(instance.k):
        best_c = -1
        best_gain = Fraction(-1)
        for c in range(instance.m):
            if c in chosen:
                continue
            gain = Fraction(0)
            for i, v in enumerate(instance.voters):
                if c in v.pref.approves:
                    gain += Fraction(v.weight, r[i] + 1)
            if gain > best_gain:
                best_gain = gain
                best_c = c
        chosen.add(best_c)
        for i, v in enumerate(instance.voters):
            if best_c in v.pref.approves:
                r[i] += 1
    return committee(chosen)


def pav_exact(instance: Instance) -> Committee:
    """Exhaustive PAV: the size-k committee maximizing the PAV score, ties
    broken toward the lexicographically smallest committee."""
    _require_approval(instance, "pav_exact")
    if instance.m > PAV_ENUM_MAX_M:
        raise ValueError(
            f"m={instance.m} exceeds the enumeration guard {PAV_ENUM_MAX_M}; "
            "use pav_greedy instead"
        )
    best: Committee | None = None
    best_score = Fraction(-1)
    for S in itertools.combinations(range(instance.m), instance.k):
        score = _pav_score_exact(instance, set(S))
        if score > best_score:
            best_score = score
            best = S
    assert best is not None
    return best


def _dominates(instance: Instance, new: Committee, old: Committee) -> bool:
    """True iff `new` weakly improves every voter over `old` and strictly
    improves at least one."""
    strict = False
    for v in instance.voters:
        if prefers(v, new, old):  # voter strictly prefers the old committee
            return False
        if not strict and prefers(v, old, new):
            strict = True
    return strict


def pareto_improve(instance: Instance, start: Committee, size_bound: int) -> Committee:
    """Climb from `start` through dominating committees until none of the
    committees of size <= size_bound dominates the current one.

    Each step moves to the lexicographically first dominating committee of
    size exactly size_bound (any smaller dominator extends to one of that
    size), so the result is deterministic and undominated within the pool.
    """
    if not len(start) <= size_bound <= instance.m:
        raise ValueError(
            f"need |committee|={len(start)} <= size_bound={size_bound} <= m={instance.m}"
        )
    if math.comb(instance.m, size_bound) * instance.n > PARETO_BUDGET:
        raise ValueError("Pareto enumeration exceeds the budget")
    current = committee(start)
    improved = True
    while improved:
        improved = False
        for S in itertools.combinations(range(instance.m), size_bound):
            if _dominates(instance, S, current):
                current = S
                improved = True
                break
    return current


def _exactly_and_at_least(instance: Instance, S: tuple[int, ...]) -> tuple[int, int]:
    """(n_2, n_>=1) for a size-2 committee: voters approving exactly two
    members and voters approving at least one."""
    n2 = 0
    n_ge1 = 0
    for v in instance.voters:
        c = len(v.pref.approves.intersection(S))
        if c == 2:
            n2 += v.weight
        if c >= 1:
            n_ge1 += v.weight
    return n2, n_ge1


def stable_k3(instance: Instance) -> Committee:
    """Constructive stable committee for k=3 in the approval model.

    Builds a seed committee T with no blocking committee of size 1 or 2 via a
    three-case analysis over all size-2 committees, pads T to size 3, then
    Pareto-improves among all size-3 committees.  The output has no blocking
    committee of any size <= 3.
    """
    _require_approval(instance, "stable_k3")
    if instance.k != 3:
        raise ValueError(f"stable_k3 requires k=3, got k={instance.k}")
    if instance.m < 3:
        raise ValueError(f"stable_k3 requires m>=3, got m={instance.m}")
    n = instance.n

    case1: tuple[int, ...] | None = None
    case2: tuple[int, ...] | None = None
    for S in itertools.combinations(range(instance.m), 2):
        n2, n_ge1 = _exactly_and_at_least(instance, S)
        if case1 is None and 3 * n2 > n:
            case1 = S
            break  # case 1 takes precedence; lexicographically first S
        if case2 is None and 3 * n_ge1 >= 2 * n:
            case2 = S

    if case1 is not None:
        # a size-1 blocker {c} must be absorbed if it exists
        seed = list(case1)
        for c in range(instance.m):
            if c not in case1 and 3 * capture_count(instance, case1, (c,)) >= n:
                seed.append(c)
                break
    elif case2 is not None:
        seed = list(case2)
        for c in range(instance.m):
            if capture_count(instance, case2, (c,)) > 0:
                seed.append(c)
                break
    else:
        seed = []
        a = next(
            (c for c in range(instance.m) if 3 * capture_count(instance, (), (c,)) >= n),
            None,
        )
        if a is not None:
            seed = [a]
            b = next(
                (
                    c
                    for c in range(instance.m)
                    if c != a and 3 * capture_count(instance, (a,), (c,)) >= n
                ),
                None,
            )
            if b is not None:  # pragma: no cover - contradicts the case split
                raise RuntimeError(
                    "case analysis violated: a pair with n_>=1 >= 2n/3 exists"
                )

    padded = list(seed)
    for c in range(instance.m):
        if len(padded) == 3:
            break
        if c not in padded:
            padded.append(c)
    return pareto_improve(instance, committee(padded), 3)
