"""Domain model for committee elections: instances, preferences, committees,
lotteries, and the capture-count / payoff primitives everything else builds on.

Voters are ordinal.  An approval voter compares committees by the size of the
intersection with her approval set; a ranking voter compares committees by the
rank of her favorite member.  All types are immutable and all functions are
pure, so everything here is safe to share across threads.
"""

from dataclasses import dataclass, field
from typing import Iterable, Union

# A committee is a strictly increasing tuple of candidate ids.
Committee = tuple[int, ...]

#: tolerance for lottery probabilities summing to one
PROB_TOL = 1e-9


def committee(members: Iterable[int]) -> Committee:
    """Canonicalize an iterable of candidate ids into a sorted, duplicate-free
    committee tuple."""
    out = tuple(sorted(set(int(c) for c in members)))
    if any(c < 0 for c in out):
        raise ValueError(f"negative candidate id in {out}")
    return out


@dataclass(frozen=True)
class Approval:
    """Approval-set preference: committees with a larger intersection win."""

    approves: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "approves", frozenset(self.approves))


@dataclass(frozen=True)
class Ranking:
    """Total order over all candidates; ``order[0]`` is the most preferred.

    Committees are compared by the best (lowest) rank they contain.  The empty
    committee ranks worse than any candidate.
    """

    order: tuple[int, ...]
    # position of each candidate in `order`, derived for O(1) rank lookups
    ranks: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        order = tuple(int(c) for c in self.order)
        m = len(order)
        if sorted(order) != list(range(m)):
            raise ValueError(f"ranking {order} is not a permutation of 0..{m - 1}")
        ranks = [0] * m
        for pos, cand in enumerate(order):
            ranks[cand] = pos
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "ranks", tuple(ranks))

    def best_rank(self, S: Committee) -> int:
        """Rank of the favorite member of S; len(order) if S is empty."""
        return min((self.ranks[c] for c in S), default=len(self.order))


Preference = Union[Approval, Ranking]


@dataclass(frozen=True)
class Voter:
    """One ordinal voter.  ``weight`` is a multiplicity: a weight-w voter
    behaves exactly like w identical unit voters in every capture count."""

    pref: Preference
    weight: int = 1

    def __post_init__(self):
        if self.weight < 1:
            raise ValueError(f"voter weight must be >= 1, got {self.weight}")


@dataclass(frozen=True)
class Instance:
    """An election: m candidates, committee size k, weighted voters."""

    m: int
    k: int
    voters: tuple[Voter, ...]
    n: int = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "voters", tuple(self.voters))
        if self.m < 1:
            raise ValueError(f"need at least one candidate, got m={self.m}")
        if not 1 <= self.k <= self.m:
            raise ValueError(f"committee size k={self.k} not in [1, m={self.m}]")
        if not self.voters:
            raise ValueError("instance needs at least one voter")
        for v in self.voters:
            if isinstance(v.pref, Approval):
                if any(not 0 <= c < self.m for c in v.pref.approves):
                    raise ValueError("approval set mentions an out-of-range candidate")
            else:
                if len(v.pref.order) != self.m:
                    raise ValueError("ranking length differs from candidate count")
        object.__setattr__(self, "n", sum(v.weight for v in self.voters))

    def all_ranking(self) -> bool:
        return all(isinstance(v.pref, Ranking) for v in self.voters)

    def all_approval(self) -> bool:
        return all(isinstance(v.pref, Approval) for v in self.voters)


def prefers(voter: Voter, incumbent: Committee, challenger: Committee) -> bool:
    """True iff the voter strictly prefers the challenger committee."""
    pref = voter.pref
    if isinstance(pref, Approval):
        a = pref.approves
        return len(a.intersection(challenger)) > len(a.intersection(incumbent))
    return pref.best_rank(challenger) < pref.best_rank(incumbent)


def capture_count(instance: Instance, incumbent: Committee, challenger: Committee) -> int:
    """Total weight of voters strictly preferring challenger over incumbent."""
    return sum(v.weight for v in instance.voters if prefers(v, incumbent, challenger))


def payoff(instance: Instance, defender: Committee, attacker: Committee) -> float:
    """Attacker payoff: capture count minus the attacker's proportional budget
    n*|attacker|/k.  Negative payoff means the attacker cannot afford to deviate."""
    if len(defender) != instance.k:
        raise ValueError(f"defender must have size k={instance.k}, got {len(defender)}")
    if not 1 <= len(attacker) <= instance.k:
        raise ValueError(f"attacker size {len(attacker)} not in [1, k={instance.k}]")
    v = capture_count(instance, defender, attacker)
    return v - instance.n * len(attacker) / instance.k


@dataclass(frozen=True)
class Lottery:
    """Finite distribution over committees.  Committees of defender lotteries
    have size exactly k; attacker lotteries (built with
    ``require_exact_size=False``) may use any size in [1, k]."""

    k: int
    entries: tuple[tuple[Committee, float], ...]

    def support(self) -> tuple[Committee, ...]:
        return tuple(c for c, _ in self.entries)


def make_lottery(
    k: int,
    entries: Iterable[tuple[Iterable[int], float]],
    require_exact_size: bool = True,
) -> Lottery:
    """Canonicalize entries: merge duplicate committees, sort lexicographically,
    and validate sizes and that probabilities sum to one."""
    merged: dict[Committee, float] = {}
    for members, prob in entries:
        c = committee(members)
        merged[c] = merged.get(c, 0.0) + float(prob)
    if not merged:
        raise ValueError("lottery needs at least one entry")
    for c, p in merged.items():
        if require_exact_size and len(c) != k:
            raise ValueError(f"lottery committee {c} does not have size k={k}")
        if not require_exact_size and not 1 <= len(c) <= k:
            raise ValueError(f"lottery committee {c} has size outside [1, k={k}]")
        if not 0.0 < p <= 1.0 + PROB_TOL:
            raise ValueError(f"probability {p} for {c} not in (0, 1]")
    total = sum(merged.values())
    if abs(total - 1.0) > PROB_TOL:
        raise ValueError(f"lottery probabilities sum to {total}, expected 1")
    return Lottery(k=k, entries=tuple(sorted(merged.items())))


def point_mass(S: Iterable[int]) -> Lottery:
    """Degenerate lottery on a single committee."""
    c = committee(S)
    return Lottery(k=len(c), entries=((c, 1.0),))


def expected_capture(instance: Instance, lottery: Lottery, attacker: Committee) -> float:
    """E over the lottery of the capture count against `attacker`."""
    if not attacker:
        raise ValueError("attacker committee must be nonempty")
    return sum(p * capture_count(instance, S, attacker) for S, p in lottery.entries)


def violation_ratio(instance: Instance, lottery: Lottery, attacker: Committee) -> float:
    """Expected capture divided by the attacker budget n*|attacker|/k.

    A lottery is epsilon-approximately L-stable iff this ratio is <= 1+epsilon
    for every attacker of size at most L.  Computed as capture*k/(n*|attacker|)
    so that integral cases come out exact in floating point.
    """
    ev = expected_capture(instance, lottery, attacker)
    return ev * instance.k / (instance.n * len(attacker))


@dataclass(frozen=True)
class StabilityReport:
    """Worst blocking committee found for a lottery, with its capture count,
    budget n*|S'|/k and violation ratio.  ``certified`` is filled in by the
    solver (None when the report comes from a bare verification)."""

    worst_attacker: Committee
    capture: float
    budget: float
    ratio: float
    l_checked: int
    certified: bool | None = None
