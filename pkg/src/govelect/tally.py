"""GreedyPAV: fill K offices in K greedy rounds.

Every voter starts at weight 1. Each round scores every candidate of every
still-open office as the sum of its approvers' current weights, elects the
maximum (ties broken by office order, then candidate order), and halves,
thirds, quarters... the weight of the voters it just satisfied: a voter
approving s already-elected candidates weighs 1/(1+s). Cross-office
satisfaction is the point: a bloc that wins office 1 counts for less when
office 2 is decided, which is what lets minority blocs break through.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .model import (
    ApprovalProfile,
    Committee,
    Election,
    ElectionError,
    Score,
    UnknownCandidateId,
    UnknownOfficeId,
    check_consistent,
)

ZERO = Fraction(0)


class OfficeAlreadyFilled(ElectionError):
    code = "OfficeAlreadyFilled"


@dataclass
class TallyState:
    """Mutable bookkeeping for one greedy run.

    satisfaction[v] counts already-elected candidates voter v approves;
    the voter's weight is derived as 1/(1+satisfaction[v]), never stored.
    """

    satisfaction: dict[str, int]
    filled: set[str] = field(default_factory=set)

    @classmethod
    def fresh(cls, profile: ApprovalProfile) -> "TallyState":
        return cls({voter_id: 0 for voter_id in profile.voter_ids})

    def weight(self, voter_id: str) -> Score:
        return Fraction(1, 1 + self.satisfaction[voter_id])


@dataclass(frozen=True)
class RoundRecord:
    """One greedy round: all candidate scores plus the elected pair.

    ``scores`` covers every candidate of every office still open at the
    start of the round. ``tied_with`` lists the other (office, candidate)
    pairs that matched the winning score; ``zero_support`` marks offices
    decided purely by tie-break because nobody scored above zero.
    """

    index: int
    scores: Mapping[str, Score]
    winner_office: str
    winner_candidate: str
    tied_with: frozenset[tuple[str, str]]
    satisfied_voters: frozenset[str]
    zero_support: bool


@dataclass(frozen=True)
class AuditTrail:
    rounds: tuple[RoundRecord, ...]


def marginal_score(
    election: Election,
    profile: ApprovalProfile,
    state: TallyState,
    office_id: str,
    candidate_id: str,
) -> Score:
    """Sum of current weights 1/(1+s_v) over voters approving the candidate.

    Voters are bucketed by satisfaction count so the sum costs one exact
    fraction addition per distinct satisfaction level, not per voter.
    """
    office = election.office_index.get(office_id)
    if office is None:
        raise UnknownOfficeId(f"unknown office id {office_id!r}")
    if office_id in state.filled:
        raise OfficeAlreadyFilled(f"office {office_id!r} is already decided")
    if candidate_id not in office.candidate_ids:
        raise UnknownCandidateId(
            f"candidate {candidate_id!r} is not a candidate for office {office_id!r}"
        )
    levels = Counter(
        state.satisfaction[voter_id]
        for voter_id in profile.approvers.get(candidate_id, ())
    )
    total = ZERO
    for satisfied, count in levels.items():
        total += Fraction(count, 1 + satisfied)
    return total


def greedy_pav(
    election: Election, profile: ApprovalProfile
) -> tuple[Committee, AuditTrail]:
    """Run the greedy rule over all offices; pure and deterministic.

    Each round scans every candidate of every unfilled office and elects
    the maximal marginal score. Ties go to the office appearing earliest
    in the election, then the candidate appearing earliest in that office;
    the losing tied pairs are recorded in the round's ``tied_with``.
    """
    check_consistent(election, profile)
    state = TallyState.fresh(profile)
    assignment: dict[str, str] = {}
    rounds: list[RoundRecord] = []

    for index in range(1, election.num_offices + 1):
        scores: dict[str, Score] = {}
        best: tuple[str, str] | None = None
        best_score = ZERO
        for office in election.offices:
            if office.id in state.filled:
                continue
            for candidate in office.candidates:
                score = marginal_score(election, profile, state, office.id, candidate.id)
                scores[candidate.id] = score
                if best is None or score > best_score:
                    best = (office.id, candidate.id)
                    best_score = score
        assert best is not None
        winner_office, winner_candidate = best
        tied_with = frozenset(
            (office.id, candidate.id)
            for office in election.offices
            if office.id not in state.filled
            for candidate in office.candidates
            if scores[candidate.id] == best_score
            and (office.id, candidate.id) != best
        )
        satisfied = frozenset(profile.approvers.get(winner_candidate, ()))
        for voter_id in satisfied:
            state.satisfaction[voter_id] += 1
        state.filled.add(winner_office)
        assignment[winner_office] = winner_candidate
        rounds.append(
            RoundRecord(
                index=index,
                scores=scores,
                winner_office=winner_office,
                winner_candidate=winner_candidate,
                tied_with=tied_with,
                satisfied_voters=satisfied,
                zero_support=best_score == ZERO,
            )
        )

    committee = Committee({office.id: assignment[office.id] for office in election.offices})
    return committee, AuditTrail(tuple(rounds))
