"""Domain model for multi-office approval elections.

An election fills one seat per office; every office brings its own
candidate list and candidate identifiers are unique across the whole
election, so a candidate id alone pins down its office. Scores are exact
rationals (:class:`fractions.Fraction`), never floats, so ties are exact
and every downstream result is reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Mapping, Sequence

Score = Fraction


class ElectionError(Exception):
    """Base class for validation and consistency failures.

    ``location`` points at the offending element: a path into a JSON
    document (``offices[1].candidates[0].id``) or a CSV row (``row 7``).
    """

    code = "ElectionError"

    def __init__(self, message: str, location: str | None = None):
        super().__init__(message)
        self.message = message
        self.location = location

    def __str__(self) -> str:
        if self.location:
            return f"{self.message} (at {self.location})"
        return self.message


class MalformedDocument(ElectionError):
    code = "MalformedDocument"


class EmptyElection(ElectionError):
    code = "EmptyElection"


class EmptyOffice(ElectionError):
    code = "EmptyOffice"


class DuplicateOfficeId(ElectionError):
    code = "DuplicateOfficeId"


class DuplicateCandidateId(ElectionError):
    code = "DuplicateCandidateId"


class UnknownOfficeId(ElectionError):
    code = "UnknownOfficeId"


class UnknownCandidateId(ElectionError):
    code = "UnknownCandidateId"


class CandidateOfficeMismatch(ElectionError):
    code = "CandidateOfficeMismatch"


class DuplicateVoterId(ElectionError):
    code = "DuplicateVoterId"


class EmptyProfile(ElectionError):
    code = "EmptyProfile"


class InconsistentInput(ElectionError):
    code = "InconsistentInput"


@dataclass(frozen=True)
class Candidate:
    id: str
    display_name: str


@dataclass(frozen=True)
class Office:
    id: str
    display_name: str
    candidates: tuple[Candidate, ...]

    @cached_property
    def candidate_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.candidates)


@dataclass(frozen=True)
class Election:
    """K offices in significant order, with pairwise-disjoint candidate sets."""

    name: str
    offices: tuple[Office, ...]

    @property
    def num_offices(self) -> int:
        return len(self.offices)

    @cached_property
    def office_index(self) -> dict[str, Office]:
        return {office.id: office for office in self.offices}

    @cached_property
    def office_of_candidate(self) -> dict[str, str]:
        """Candidate id -> office id (well defined by disjointness)."""
        return {c.id: office.id for office in self.offices for c in office.candidates}


@dataclass(frozen=True)
class Voter:
    """One voter's approvals, keyed by office id; empty sets are dropped."""

    id: str
    approvals: Mapping[str, frozenset[str]]

    def approved_in(self, office_id: str) -> frozenset[str]:
        return self.approvals.get(office_id, frozenset())


@dataclass(frozen=True)
class ApprovalProfile:
    voters: tuple[Voter, ...]

    @property
    def num_voters(self) -> int:
        return len(self.voters)

    @cached_property
    def voter_ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.voters)

    @cached_property
    def approvers(self) -> dict[str, tuple[str, ...]]:
        """Candidate id -> ids of approving voters, in profile order."""
        table: dict[str, list[str]] = {}
        for voter in self.voters:
            for approved in voter.approvals.values():
                for candidate_id in approved:
                    table.setdefault(candidate_id, []).append(voter.id)
        return {cid: tuple(vs) for cid, vs in table.items()}

    @cached_property
    def all_approvals(self) -> dict[str, frozenset[str]]:
        """Voter id -> every candidate id the voter approves, any office."""
        return {
            v.id: frozenset(c for s in v.approvals.values() for c in s)
            for v in self.voters
        }


@dataclass(frozen=True)
class Committee:
    """A complete assignment of one winning candidate per office."""

    assignment: Mapping[str, str]

    @cached_property
    def members(self) -> frozenset[str]:
        return frozenset(self.assignment.values())


def _require_token(value: Any, what: str, location: str) -> str:
    if not isinstance(value, str) or not value:
        raise MalformedDocument(f"{what} must be a non-empty string", location)
    return value


def validate_election(data: Mapping[str, Any]) -> Election:
    """Validate election-shaped data (the parsed JSON document shape).

    Enforces: at least one office, at least one candidate per office,
    unique office ids, and candidate ids unique across the whole election.
    """
    if not isinstance(data, Mapping):
        raise MalformedDocument("election document must be an object")
    name = data.get("name")
    if not isinstance(name, str):
        raise MalformedDocument("election name must be a string", "name")
    offices_data = data.get("offices")
    if not isinstance(offices_data, Sequence) or isinstance(offices_data, (str, bytes)):
        raise MalformedDocument("offices must be an array", "offices")
    if not offices_data:
        raise EmptyElection("election must have at least one office", "offices")

    offices: list[Office] = []
    seen_offices: set[str] = set()
    candidate_owner: dict[str, str] = {}
    for j, office_data in enumerate(offices_data):
        loc = f"offices[{j}]"
        if not isinstance(office_data, Mapping):
            raise MalformedDocument("office must be an object", loc)
        office_id = _require_token(office_data.get("id"), "office id", f"{loc}.id")
        office_name = office_data.get("name", office_id)
        if not isinstance(office_name, str):
            raise MalformedDocument("office name must be a string", f"{loc}.name")
        if office_id in seen_offices:
            raise DuplicateOfficeId(f"office id {office_id!r} appears twice", f"{loc}.id")
        seen_offices.add(office_id)
        candidates_data = office_data.get("candidates")
        if not isinstance(candidates_data, Sequence) or isinstance(candidates_data, (str, bytes)):
            raise MalformedDocument("candidates must be an array", f"{loc}.candidates")
        if not candidates_data:
            raise EmptyOffice(f"office {office_id!r} has no candidates", f"{loc}.candidates")
        candidates: list[Candidate] = []
        for i, cand_data in enumerate(candidates_data):
            cloc = f"{loc}.candidates[{i}]"
            if not isinstance(cand_data, Mapping):
                raise MalformedDocument("candidate must be an object", cloc)
            cand_id = _require_token(cand_data.get("id"), "candidate id", f"{cloc}.id")
            cand_name = cand_data.get("name", cand_id)
            if not isinstance(cand_name, str):
                raise MalformedDocument("candidate name must be a string", f"{cloc}.name")
            if cand_id in candidate_owner:
                raise DuplicateCandidateId(
                    f"candidate id {cand_id!r} already used in office "
                    f"{candidate_owner[cand_id]!r}",
                    f"{cloc}.id",
                )
            candidate_owner[cand_id] = office_id
            candidates.append(Candidate(cand_id, cand_name))
        offices.append(Office(office_id, office_name, tuple(candidates)))
    return Election(name, tuple(offices))


def election_to_data(election: Election) -> dict[str, Any]:
    """Inverse of validate_election: the canonical document shape."""
    return {
        "name": election.name,
        "offices": [
            {
                "id": office.id,
                "name": office.display_name,
                "candidates": [
                    {"id": c.id, "name": c.display_name} for c in office.candidates
                ],
            }
            for office in election.offices
        ],
    }


def validate_voter(
    election: Election, data: Mapping[str, Any], location: str = ""
) -> Voter:
    """Validate one voter entry ({"voter_id", "approvals"}) against an election."""
    prefix = f"{location}." if location else ""
    if not isinstance(data, Mapping):
        raise MalformedDocument("voter must be an object", location or None)
    voter_id = _require_token(data.get("voter_id"), "voter id", f"{prefix}voter_id")
    approvals_data = data.get("approvals", {})
    if not isinstance(approvals_data, Mapping):
        raise MalformedDocument("approvals must be an object", f"{prefix}approvals")
    approvals: dict[str, frozenset[str]] = {}
    for office_id, approved in approvals_data.items():
        aloc = f"{prefix}approvals[{office_id!r}]"
        office = election.office_index.get(office_id)
        if office is None:
            raise UnknownOfficeId(f"unknown office id {office_id!r}", aloc)
        if isinstance(approved, (str, bytes)) or not isinstance(approved, (Sequence, set, frozenset)):
            raise MalformedDocument("approved candidates must be an array", aloc)
        chosen: set[str] = set()
        for cand_id in approved:
            owner = election.office_of_candidate.get(cand_id)
            if owner is None:
                raise UnknownCandidateId(f"unknown candidate id {cand_id!r}", aloc)
            if owner != office_id:
                raise CandidateOfficeMismatch(
                    f"candidate {cand_id!r} belongs to office {owner!r}, "
                    f"not {office_id!r}",
                    aloc,
                )
            chosen.add(cand_id)
        if chosen:
            approvals[office_id] = frozenset(chosen)
    return Voter(voter_id, approvals)


def validate_profile(
    election: Election, data: Sequence[Mapping[str, Any]]
) -> ApprovalProfile:
    """Validate profile-shaped data (a sequence of voter entries).

    Abstentions are legal: a voter may approve nothing anywhere. An empty
    voter list is not a profile (n >= 1).
    """
    if isinstance(data, (str, bytes)) or not isinstance(data, Sequence):
        raise MalformedDocument("profile must be an array of voters")
    voters: list[Voter] = []
    seen: set[str] = set()
    for i, voter_data in enumerate(data):
        voter = validate_voter(election, voter_data, f"voters[{i}]")
        if voter.id in seen:
            raise DuplicateVoterId(
                f"voter id {voter.id!r} appears twice", f"voters[{i}].voter_id"
            )
        seen.add(voter.id)
        voters.append(voter)
    if not voters:
        raise EmptyProfile("profile must contain at least one voter")
    return ApprovalProfile(tuple(voters))


def validate_committee(election: Election, data: Mapping[str, str]) -> Committee:
    """Validate a complete office -> candidate assignment."""
    if not isinstance(data, Mapping):
        raise MalformedDocument("committee must be an object")
    for office_id, cand_id in data.items():
        office = election.office_index.get(office_id)
        if office is None:
            raise InconsistentInput(f"unknown office id {office_id!r} in committee")
        if cand_id not in office.candidate_ids:
            raise InconsistentInput(
                f"candidate {cand_id!r} is not a candidate for office {office_id!r}"
            )
    missing = [o.id for o in election.offices if o.id not in data]
    if missing:
        raise InconsistentInput(f"committee is missing offices: {missing}")
    return Committee({o.id: data[o.id] for o in election.offices})


def check_consistent(election: Election, profile: ApprovalProfile) -> None:
    """Raise InconsistentInput unless every approval references the election."""
    for voter in profile.voters:
        for office_id, approved in voter.approvals.items():
            office = election.office_index.get(office_id)
            if office is None:
                raise InconsistentInput(
                    f"voter {voter.id!r} approves in unknown office {office_id!r}"
                )
            for cand_id in approved:
                if election.office_of_candidate.get(cand_id) != office_id:
                    raise InconsistentInput(
                        f"voter {voter.id!r} approval {cand_id!r} does not "
                        f"belong to office {office_id!r}"
                    )
