"""Instance generators: the six-voter cyclic ranking instance with no stable
committee, the PAV instability family, and seeded random instances for
property tests.

Generators only ever emit instances; committee logic lives downstream.  All
randomness is driven by an explicit seed, so equal seeds give equal instances.
"""

from dataclasses import dataclass

import numpy as np

from .core import Approval, Instance, Ranking, Voter


def cyclic_instance() -> Instance:
    """Six ranking voters over six candidates (k=3) forming two preference
    cycles; no committee of size 3 is stable.  The three trailing candidates
    of each ranking are materialized in the written order."""
    orders = [
        (0, 1, 2, 3, 4, 5),
        (1, 2, 0, 3, 4, 5),
        (2, 0, 1, 3, 4, 5),
        (3, 4, 5, 0, 1, 2),
        (4, 5, 3, 0, 1, 2),
        (5, 3, 4, 0, 1, 2),
    ]
    return Instance(
        m=6, k=3, voters=tuple(Voter(Ranking(order)) for order in orders)
    )


@dataclass(frozen=True)
class PavFamilyParams:
    """Parameters of the PAV instability family.

    P scales the committee: k = P + P^2/8 over m = 3P/2 + P^2/8 candidates.
    The default population n = P^2 satisfies the divisibility constraints
    (n/2 divisible by P/2) with the smallest clean choice.
    """

    P: int
    n: int | None = None

    def __post_init__(self):
        if self.P < 8 or self.P % 8 != 0:
            raise ValueError(f"P must be a positive multiple of 8, got {self.P}")
        n = self.total_voters
        if n % 2 != 0 or (n // 2) % (self.P // 2) != 0:
            raise ValueError(f"n={n} must have n/2 divisible by P/2={self.P // 2}")

    @property
    def total_voters(self) -> int:
        return self.P * self.P if self.n is None else self.n

    @property
    def k(self) -> int:
        return self.P + self.P * self.P // 8

    @property
    def m(self) -> int:
        return 3 * self.P // 2 + self.P * self.P // 8


@dataclass(frozen=True)
class PavFamilyLabels:
    """Partition of the candidate ids into the four groups of the family."""

    a: tuple[int, ...]
    b: tuple[int, ...]
    c: tuple[int, ...]
    d: tuple[int, ...]


def pav_lower_bound(params: PavFamilyParams) -> tuple[Instance, PavFamilyLabels]:
    """Build the PAV instability instance.

    Candidates: A and B (P/2 each) approved by the entire left / right voter
    half; C (P/2 levels x P/4 per level) where each left block approves one
    candidate per level; D (P/2) where each right block approves a single
    candidate.  Identical voters are compressed into weighted blocks.
    """
    P = params.P
    n = params.total_voters
    half = P // 2
    a_ids = tuple(range(0, half))
    b_ids = tuple(range(half, P))
    c_ids = tuple(range(P, P + P * P // 8))
    d_ids = tuple(range(P + P * P // 8, params.m))

    voters = []
    left_blocks = P // 4
    left_weight = (n // 2) // left_blocks
    for block in range(left_blocks):
        approves = set(a_ids)
        approves.update(P + level * left_blocks + block for level in range(half))
        voters.append(Voter(Approval(frozenset(approves)), weight=left_weight))
    right_blocks = half
    right_weight = (n // 2) // right_blocks
    for block in range(right_blocks):
        approves = set(b_ids)
        approves.add(d_ids[block])
        voters.append(Voter(Approval(frozenset(approves)), weight=right_weight))

    instance = Instance(m=params.m, k=params.k, voters=tuple(voters))
    return instance, PavFamilyLabels(a=a_ids, b=b_ids, c=c_ids, d=d_ids)


def random_approval(m: int, n: int, k: int, density: float, seed: int) -> Instance:
    """n voters, each approving every candidate independently with the given
    probability.  Reproducible from the seed."""
    if not 0.0 < density < 1.0:
        raise ValueError(f"density must be in (0, 1), got {density}")
    rng = np.random.default_rng(seed)
    draws = rng.random((n, m)) < density
    voters = tuple(
        Voter(Approval(frozenset(np.flatnonzero(row).tolist()))) for row in draws
    )
    return Instance(m=m, k=k, voters=voters)


def random_ranking(m: int, n: int, k: int, seed: int) -> Instance:
    """n voters with independent uniformly random rankings."""
    rng = np.random.default_rng(seed)
    voters = tuple(
        Voter(Ranking(tuple(rng.permutation(m).tolist()))) for _ in range(n)
    )
    return Instance(m=m, k=k, voters=voters)
