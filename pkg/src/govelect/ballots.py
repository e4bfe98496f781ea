"""File formats: election documents (JSON), ballot files (CSV), results (JSON).

Parsing is total: any byte string yields either a value or an
ElectionError subclass carrying a location (JSON path or CSV row), never
an unhandled crash. Serialization is canonical: object keys sorted, list
orders fixed, scores written as exact {"num", "den"} pairs, so identical
inputs always produce identical bytes.

Ballot CSV: header ``voter_id,office_id,candidate_id``, one row per
approval, duplicate rows collapse, rows of one voter need not be adjacent.
A row with an empty candidate_id registers the voter without approving
anyone (the office_id may also be empty), so files can carry voters who
abstain everywhere.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .model import (
    ApprovalProfile,
    CandidateOfficeMismatch,
    Committee,
    Election,
    ElectionError,
    EmptyProfile,
    MalformedDocument,
    UnknownCandidateId,
    UnknownOfficeId,
    Voter,
    election_to_data,
    validate_election,
)
from .oracle import GjrViolation
from .tally import AuditTrail

SCHEMA_VERSION = 1

BALLOT_HEADER = ("voter_id", "office_id", "candidate_id")


class MalformedCsv(ElectionError):
    code = "MalformedCsv"


class MissingHeader(ElectionError):
    code = "MissingHeader"


def _decode(data: bytes | str, what: str) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedDocument(f"{what} is not valid UTF-8: {exc}") from exc


def _load_json(data: bytes | str, what: str) -> Any:
    text = _decode(data, what)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(
            f"{what} is not valid JSON: {exc.msg}",
            f"line {exc.lineno} column {exc.colno}",
        ) from exc
    except (ValueError, RecursionError) as exc:
        raise MalformedDocument(f"{what} is not valid JSON: {exc}") from exc


def parse_election(data: bytes | str) -> Election:
    """Parse and validate an election document."""
    return validate_election(_ensure_object(_load_json(data, "election document")))


def _ensure_object(doc: Any) -> Any:
    if not isinstance(doc, dict):
        raise MalformedDocument("top-level value must be an object")
    return doc


def write_election(election: Election) -> bytes:
    return _canonical_json(election_to_data(election))


def parse_ballots(data: bytes | str, election: Election) -> ApprovalProfile:
    """Parse a ballot CSV against an election.

    Row numbers in errors are 1-based CSV records, counting the header as
    row 1.
    """
    text = _decode(data, "ballot file")
    reader = csv.reader(io.StringIO(text))
    try:
        rows = list(reader)
    except csv.Error as exc:
        raise MalformedCsv(f"unreadable CSV: {exc}", f"row {reader.line_num}") from exc

    if not rows:
        raise MissingHeader("ballot file is empty; expected header "
                            + ",".join(BALLOT_HEADER))
    header = [cell.lstrip("﻿") for cell in rows[0]]
    if header != list(BALLOT_HEADER):
        raise MissingHeader(
            "expected header " + ",".join(BALLOT_HEADER), "row 1"
        )

    # voter id -> office id -> approved candidate ids, in first-seen order
    voters: dict[str, dict[str, set[str]]] = {}
    for ordinal, row in enumerate(rows[1:], start=2):
        where = f"row {ordinal}"
        if not row:
            continue
        if len(row) != 3:
            raise MalformedCsv(f"expected 3 fields, got {len(row)}", where)
        voter_id, office_id, candidate_id = row
        if not voter_id:
            raise MalformedCsv("voter_id is empty", where)
        if not candidate_id:
            # registration row: the voter exists, approves nobody here
            if office_id and office_id not in election.office_index:
                raise UnknownOfficeId(f"unknown office id {office_id!r}", where)
            voters.setdefault(voter_id, {})
            continue
        if not office_id:
            raise MalformedCsv("office_id is empty", where)
        office = election.office_index.get(office_id)
        if office is None:
            raise UnknownOfficeId(f"unknown office id {office_id!r}", where)
        owner = election.office_of_candidate.get(candidate_id)
        if owner is None:
            raise UnknownCandidateId(f"unknown candidate id {candidate_id!r}", where)
        if owner != office_id:
            raise CandidateOfficeMismatch(
                f"candidate {candidate_id!r} belongs to office {owner!r}, "
                f"not {office_id!r}",
                where,
            )
        voters.setdefault(voter_id, {}).setdefault(office_id, set()).add(candidate_id)

    if not voters:
        raise EmptyProfile("ballot file contains no voters")
    return ApprovalProfile(
        tuple(
            Voter(voter_id, {o: frozenset(s) for o, s in approvals.items()})
            for voter_id, approvals in voters.items()
        )
    )


def write_ballots(election: Election, profile: ApprovalProfile) -> bytes:
    """Serialize a profile as ballot CSV, rows in canonical order.

    Voters keep profile order; within a voter, offices follow election
    order and candidates follow office order. Voters with no approvals
    get a single registration row.
    """
    out = io.StringIO()
    # default dialect: CRLF rows, which is what makes its quoting of
    # embedded \r and \n correct
    writer = csv.writer(out)
    writer.writerow(BALLOT_HEADER)
    for voter in profile.voters:
        wrote_any = False
        for office in election.offices:
            approved = voter.approved_in(office.id)
            for candidate in office.candidates:
                if candidate.id in approved:
                    writer.writerow([voter.id, office.id, candidate.id])
                    wrote_any = True
        if not wrote_any:
            writer.writerow([voter.id, "", ""])
    return out.getvalue().encode("utf-8")


def _fraction_json(value: Fraction) -> dict[str, int]:
    return {"num": value.numerator, "den": value.denominator}


def results_to_data(
    committee: Committee,
    trail: AuditTrail,
    violations: Sequence[GjrViolation],
) -> dict[str, Any]:
    """The results document shape, ready for canonical serialization."""
    return {
        "schema_version": SCHEMA_VERSION,
        "committee": dict(committee.assignment),
        "rounds": [
            {
                "round": record.index,
                "scores": {
                    cid: _fraction_json(score) for cid, score in record.scores.items()
                },
                "winner_office": record.winner_office,
                "winner_candidate": record.winner_candidate,
                "tied_with": sorted([o, c] for o, c in record.tied_with),
                "satisfied_voters": sorted(record.satisfied_voters),
                "zero_support": record.zero_support,
            }
            for record in trail.rounds
        ],
        "gjr": {
            "violations": [
                {
                    "candidate": v.candidate,
                    "office": v.office,
                    "deserted_group": sorted(v.deserted_group),
                    "group_size": v.group_size,
                    "threshold": _fraction_json(v.threshold),
                }
                for v in violations
            ]
        },
    }


def write_results(
    committee: Committee,
    trail: AuditTrail,
    violations: Sequence[GjrViolation],
) -> bytes:
    """Canonical ResultsFile bytes: same inputs, same bytes, always."""
    return _canonical_json(results_to_data(committee, trail, violations))


def _canonical_json(doc: Any) -> bytes:
    return json.dumps(
        doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")


def parse_combined(data: bytes | str) -> tuple[Election, ApprovalProfile]:
    """Parse the single-file upload document: election plus ballot CSV.

    Shape: {"election": <election document>, "ballots_csv": "<csv text>"}.
    Error locations are prefixed with the field they occurred in.
    """
    doc = _ensure_object(_load_json(data, "upload document"))
    if "election" not in doc:
        raise MalformedDocument("missing field 'election'", "election")
    if "ballots_csv" not in doc:
        raise MalformedDocument("missing field 'ballots_csv'", "ballots_csv")
    ballots_csv = doc["ballots_csv"]
    if not isinstance(ballots_csv, str):
        raise MalformedDocument("ballots_csv must be a string", "ballots_csv")
    try:
        election = validate_election(doc["election"])
    except ElectionError as exc:
        exc.location = f"election.{exc.location}" if exc.location else "election"
        raise
    try:
        profile = parse_ballots(ballots_csv, election)
    except ElectionError as exc:
        exc.location = f"ballots_csv {exc.location}" if exc.location else "ballots_csv"
        raise
    return election, profile
