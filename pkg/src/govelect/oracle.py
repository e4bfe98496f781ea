"""Independent verification of tally results.

Everything here is deliberately dumb: the exact optimizer enumerates every
complete committee with no pruning, the representation checker tests every
non-elected candidate's deserted group directly against the n/K quota, and
the plurality baseline counts approvals per office in isolation. These are
the yardsticks the greedy rule is measured against, so they must be
obviously correct rather than fast.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import prod
from typing import Mapping

from .model import (
    ApprovalProfile,
    Committee,
    Election,
    ElectionError,
    Score,
    check_consistent,
    validate_committee,
)
from .tally import greedy_pav

DEFAULT_SEARCH_BUDGET = 10**6


class SearchBudgetExceeded(ElectionError):
    code = "SearchBudgetExceeded"


class DegenerateInstance(ElectionError):
    code = "DegenerateInstance"


@dataclass(frozen=True)
class GjrViolation:
    """A non-elected candidate whose deserted group meets the n/K quota.

    Every voter in ``deserted_group`` approves ``candidate`` and approves
    no member of the committee under test; the violation fires when
    group_size * K >= n (exact integers, non-strict).
    """

    candidate: str
    office: str
    deserted_group: frozenset[str]
    group_size: int
    threshold: Fraction


@lru_cache(maxsize=None)
def harmonic(t: int) -> Fraction:
    """H(t) = 1 + 1/2 + ... + 1/t as an exact fraction; H(0) = 0."""
    if t <= 0:
        return Fraction(0)
    return harmonic(t - 1) + Fraction(1, t)


def pav_score(
    profile: ApprovalProfile, committee: Committee | Mapping[str, str]
) -> Score:
    """Sum over voters of H(number of committee members the voter approves).

    Accepts partial assignments as well, which is what makes round-by-round
    marginal deltas of this function usable as a cross-check on the greedy
    scorer.
    """
    if isinstance(committee, Committee):
        members = committee.members
    else:
        members = frozenset(committee.values())
    total = Fraction(0)
    for voter in profile.voters:
        approved = profile.all_approvals[voter.id]
        total += harmonic(len(approved & members))
    return total


def exact_pav(
    election: Election,
    profile: ApprovalProfile,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> tuple[Score, list[Committee]]:
    """Exhaustively maximize pav_score over all complete committees.

    Returns the optimal score and every committee attaining it, in
    enumeration order (offices in election order, candidates in office
    order). Refuses instances above ``budget`` committees.
    """
    check_consistent(election, profile)
    total = prod(len(office.candidates) for office in election.offices)
    if total > budget:
        raise SearchBudgetExceeded(
            f"instance has {total} committees, over the budget of {budget}"
        )
    office_ids = [office.id for office in election.offices]
    best: Score | None = None
    optima: list[Committee] = []
    for combo in itertools.product(
        *([c.id for c in office.candidates] for office in election.offices)
    ):
        committee = Committee(dict(zip(office_ids, combo)))
        score = pav_score(profile, committee)
        if best is None or score > best:
            best = score
            optima = [committee]
        elif score == best:
            optima.append(committee)
    assert best is not None
    return best, optima


def check_gjr(
    election: Election,
    profile: ApprovalProfile,
    committee: Committee | Mapping[str, str],
) -> list[GjrViolation]:
    """Find every quota-sized voter group deserted by the committee.

    For each candidate c outside the committee, the deserted group is the
    set of voters who approve c yet approve no committee member in any
    office. An empty list means every such group is below the n/K quota,
    i.e. the committee provides global justified representation.
    """
    check_consistent(election, profile)
    if not isinstance(committee, Committee):
        committee = validate_committee(election, committee)
    members = committee.members
    n = profile.num_voters
    k = election.num_offices
    threshold = Fraction(n, k)

    uncovered = [
        voter_id
        for voter_id in profile.voter_ids
        if not (profile.all_approvals[voter_id] & members)
    ]
    violations: list[GjrViolation] = []
    for office in election.offices:
        for candidate in office.candidates:
            if candidate.id in members:
                continue
            group = frozenset(
                voter_id
                for voter_id in uncovered
                if candidate.id in profile.all_approvals[voter_id]
            )
            if len(group) * k >= n:
                violations.append(
                    GjrViolation(
                        candidate=candidate.id,
                        office=office.id,
                        deserted_group=group,
                        group_size=len(group),
                        threshold=threshold,
                    )
                )
    return violations


def plurality_baseline(election: Election, profile: ApprovalProfile) -> Committee:
    """Most-approved candidate per office, independently; ties to list order."""
    check_consistent(election, profile)
    assignment: dict[str, str] = {}
    for office in election.offices:
        winner = None
        winner_count = -1
        for candidate in office.candidates:
            count = len(profile.approvers.get(candidate.id, ()))
            if count > winner_count:
                winner = candidate.id
                winner_count = count
        assert winner is not None
        assignment[office.id] = winner
    return Committee(assignment)


def approximation_ratio(
    election: Election,
    profile: ApprovalProfile,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> Fraction:
    """pav_score of the greedy committee over the exact optimum."""
    optimal_score, _ = exact_pav(election, profile, budget=budget)
    if optimal_score == 0:
        raise DegenerateInstance("optimal PAV score is 0; ratio undefined")
    committee, _ = greedy_pav(election, profile)
    return pav_score(profile, committee) / optimal_score
