import json
import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from govelect import (
    greedy_pav,
    parse_ballots,
    parse_election,
    pav_score,
    validate_election,
    validate_profile,
)

DATA = Path(__file__).parent / "data"

# ids that survive both JSON and CSV round-trips (CSV cannot carry NUL)
token_st = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\x00"),
    min_size=1,
    max_size=8,
)


@pytest.fixture(scope="session")
def pair_election():
    return parse_election((DATA / "election_pair.json").read_bytes())


@pytest.fixture(scope="session")
def four_voter_profile(pair_election):
    return parse_ballots((DATA / "ballots_four_voter.csv").read_bytes(), pair_election)


@pytest.fixture(scope="session")
def blocs4_election():
    return parse_election((DATA / "election_blocs4.json").read_bytes())


@pytest.fixture(scope="session")
def survey_election():
    return parse_election((DATA / "election_survey_shape.json").read_bytes())


def survey_ballots_csv(num_voters: int = 500, seed: int = 42) -> bytes:
    """Single-choice ballots at the survey shape: 12 offices, 4 candidates."""
    rng = random.Random(seed)
    rows = ["voter_id,office_id,candidate_id"]
    for v in range(1, num_voters + 1):
        for j in range(1, 13):
            c = rng.randint(1, 4)
            rows.append(f"v{v},m{j:02d},m{j:02d}c{c}")
    return ("\n".join(rows) + "\n").encode("utf-8")


def make_election(num_offices: int, candidates_per_office: int, name: str = "generated"):
    offices = [
        {
            "id": f"o{j}",
            "name": f"Office {j}",
            "candidates": [
                {"id": f"o{j}c{i}", "name": f"Candidate {i}"}
                for i in range(1, candidates_per_office + 1)
            ],
        }
        for j in range(1, num_offices + 1)
    ]
    return validate_election({"name": name, "offices": offices})


def random_instances(count: int, seed: int, max_offices=3, max_cands=3, max_voters=8):
    """Seeded random (election, profile) pairs, abstentions included."""
    rng = random.Random(seed)
    instances = []
    for _ in range(count):
        num_offices = rng.randint(1, max_offices)
        offices = [
            {
                "id": f"o{j}",
                "name": f"Office {j}",
                "candidates": [
                    {"id": f"o{j}c{i}", "name": f"Candidate {i}"}
                    for i in range(1, rng.randint(1, max_cands) + 1)
                ],
            }
            for j in range(1, num_offices + 1)
        ]
        election = validate_election({"name": "random", "offices": offices})
        voters = []
        for v in range(1, rng.randint(1, max_voters) + 1):
            approvals = {}
            for office in election.offices:
                chosen = [c.id for c in office.candidates if rng.random() < 0.5]
                if chosen:
                    approvals[office.id] = chosen
            voters.append({"voter_id": f"v{v}", "approvals": approvals})
        instances.append((election, validate_profile(election, voters)))
    return instances


@pytest.fixture(scope="session")
def acceptance_instances():
    return random_instances(1000, seed=20240801)


def assert_trail_matches_pav_deltas(election, profile, trail):
    """Cross-check every recorded round against pav_score differences.

    Recomputes each candidate's marginal as a difference of harmonic-sum
    scores (an independent route from the weight-sum scorer) and replays
    the argmax with the declared office-then-candidate tie-break.
    """
    partial: dict[str, str] = {}
    base = pav_score(profile, partial)
    for record in trail.rounds:
        best = None
        for office in election.offices:
            if office.id in partial:
                continue
            for candidate in office.candidates:
                delta = pav_score(profile, {**partial, office.id: candidate.id}) - base
                assert delta == record.scores[candidate.id], (
                    f"round {record.index}: {candidate.id} marginal mismatch"
                )
                if best is None or delta > best[0]:
                    best = (delta, office.id, candidate.id)
        assert best is not None
        assert (best[1], best[2]) == (record.winner_office, record.winner_candidate)
        partial[record.winner_office] = record.winner_candidate
        base = pav_score(profile, partial)


@st.composite
def elections_st(draw, max_offices=3, max_cands=3):
    num_offices = draw(st.integers(1, max_offices))
    offices = [
        {
            "id": f"o{j}",
            "name": f"Office {j}",
            "candidates": [
                {"id": f"o{j}c{i}", "name": f"Candidate {i}"}
                for i in range(1, draw(st.integers(1, max_cands)) + 1)
            ],
        }
        for j in range(1, num_offices + 1)
    ]
    return validate_election({"name": "generated", "offices": offices})


@st.composite
def instances_st(draw, max_offices=3, max_cands=3, max_voters=6):
    election = draw(elections_st(max_offices, max_cands))
    voters = []
    for v in range(1, draw(st.integers(1, max_voters)) + 1):
        approvals = {}
        for office in election.offices:
            subset = draw(st.frozensets(st.sampled_from(office.candidate_ids)))
            if subset:
                approvals[office.id] = sorted(subset)
        voters.append({"voter_id": f"v{v}", "approvals": approvals})
    return election, validate_profile(election, voters)


@st.composite
def arbitrary_elections_st(draw):
    """Elections with arbitrary unicode ids and names, for round-trip tests."""
    office_ids = draw(st.lists(token_st, min_size=1, max_size=3, unique=True))
    cand_ids = draw(
        st.lists(
            token_st,
            min_size=len(office_ids),
            max_size=len(office_ids) + 5,
            unique=True,
        )
    )
    per_office: list[list[str]] = [[] for _ in office_ids]
    for i, cand_id in enumerate(cand_ids):
        if i < len(office_ids):
            per_office[i].append(cand_id)
        else:
            per_office[draw(st.integers(0, len(office_ids) - 1))].append(cand_id)
    offices = [
        {
            "id": office_id,
            "name": draw(token_st),
            "candidates": [{"id": cid, "name": draw(token_st)} for cid in cands],
        }
        for office_id, cands in zip(office_ids, per_office)
    ]
    return validate_election({"name": draw(token_st), "offices": offices})


@st.composite
def arbitrary_instances_st(draw, max_voters=4):
    election = draw(arbitrary_elections_st())
    voter_ids = draw(st.lists(token_st, min_size=1, max_size=max_voters, unique=True))
    voters = []
    for voter_id in voter_ids:
        approvals = {}
        for office in election.offices:
            subset = draw(st.frozensets(st.sampled_from(office.candidate_ids)))
            if subset:
                approvals[office.id] = sorted(subset)
        voters.append({"voter_id": voter_id, "approvals": approvals})
    return election, validate_profile(election, voters)
