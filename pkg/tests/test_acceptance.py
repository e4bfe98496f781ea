"""Acceptance suite: one test per release criterion, one PASS line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines and
the ratio distribution.
"""

import json
import random
import subprocess
import sys
import time
from collections import Counter
from fractions import Fraction
from pathlib import Path

from fastapi.testclient import TestClient

from govelect import (
    approximation_ratio,
    check_gjr,
    generate_profile,
    greedy_pav,
    parse_ballots,
    parse_election,
    plurality_baseline,
    representation_share,
    write_results,
)
from govelect.cli import main
from govelect.model import ElectionError
from govelect.oracle import DegenerateInstance
from govelect.service import ServiceConfig, create_app
from govelect.simulate import validate_bloc_spec

from conftest import DATA, assert_trail_matches_pav_deltas


def _report(name: str) -> None:
    print(f"PASS: {name}")


def _gjr_satisfiable_by_any_committee(election, profile):
    import itertools

    office_ids = [o.id for o in election.offices]
    for combo in itertools.product(
        *([c.id for c in office.candidates] for office in election.offices)
    ):
        if not check_gjr(election, profile, dict(zip(office_ids, combo))):
            return True
    return False


def test_gjr_property_suite(acceptance_instances):
    """EXPECTED TO FAIL: quota coverage is not achievable on every electorate.

    The zero-violation requirement is provably unattainable once voters may
    abstain: a single-seat office can be claimed by two disjoint quota-sized
    groups approving nothing else, so every complete committee deserts one
    (the forensic output below exhibits such electorates, where the exact
    optimizer fails alongside the greedy rule). The assertion is kept as
    stated rather than weakened; the failure documents the boundary.
    """
    started = time.monotonic()
    assert len(acceptance_instances) >= 1000
    dirty = []
    for election, profile in acceptance_instances:
        committee, _ = greedy_pav(election, profile)
        violations = check_gjr(election, profile, committee)
        if violations:
            dirty.append((election, profile, violations))
    elapsed = time.monotonic() - started
    assert elapsed < 10.0, f"GJR suite took {elapsed:.2f}s"

    if dirty:
        forced = sum(
            1
            for election, profile, _ in dirty
            if not _gjr_satisfiable_by_any_committee(election, profile)
        )
        exact_quota = sum(
            1
            for election, profile, violations in dirty
            for v in violations
            if v.group_size * election.num_offices == profile.num_voters
        )
        total_violations = sum(len(v) for _, _, v in dirty)
        election, profile, violations = dirty[0]
        print(
            f"FAIL: GJR property suite: {len(dirty)}/{len(acceptance_instances)} "
            f"instances carry violations ({total_violations} deserted groups, "
            f"{exact_quota} at exactly the n/K quota); "
            f"{forced} of the {len(dirty)} instances admit NO committee with zero "
            f"violations, so the zero-violation criterion is unattainable for any rule. "
            f"first witness: offices="
            f"{[(o.id, list(o.candidate_ids)) for o in election.offices]}, voters="
            f"{[(v.id, {o: sorted(s) for o, s in v.approvals.items()}) for v in profile.voters]}"
        )
    assert not dirty, (
        f"{len(dirty)} of {len(acceptance_instances)} instances violate quota "
        "coverage; see forensic summary above"
    )
    _report(
        f"GJR property suite: 0 violations over {len(acceptance_instances)} "
        f"instances in {elapsed:.2f}s (< 10 s)"
    )


def test_oracle_equivalence(acceptance_instances):
    started = time.monotonic()
    ratios: list[Fraction] = []
    degenerate = 0
    for election, profile in acceptance_instances:
        _, trail = greedy_pav(election, profile)
        assert_trail_matches_pav_deltas(election, profile, trail)
        try:
            ratio = approximation_ratio(election, profile)
        except DegenerateInstance:
            degenerate += 1
            continue
        assert ratio >= Fraction(1, 2), f"ratio {ratio} below 1/2"
        assert ratio <= 1
        ratios.append(ratio)
    elapsed = time.monotonic() - started
    assert elapsed < 60.0, f"oracle equivalence took {elapsed:.2f}s"

    buckets = Counter(
        "1" if r == 1 else "[0.9,1)" if r >= Fraction(9, 10) else "[0.5,0.9)"
        for r in ratios
    )
    distribution = ", ".join(f"{k}: {buckets[k]}" for k in ("1", "[0.9,1)", "[0.5,0.9)"))
    _report(
        f"oracle equivalence: argmax agreement on all rounds; "
        f"ratio distribution over {len(ratios)} instances ({degenerate} degenerate) "
        f"min={min(ratios)} | {distribution} | in {elapsed:.2f}s (< 60 s)"
    )


def test_minority_exclusion_demonstration(blocs4_election):
    doc = json.loads((DATA / "spec_blocs_75_25.json").read_text())[0]
    spec = validate_bloc_spec(blocs4_election, doc)
    profile = generate_profile(blocs4_election, spec)

    plurality = plurality_baseline(blocs4_election, profile)
    plurality_shares = representation_share(profile, plurality, spec)
    assert plurality_shares["minority"] == Fraction(0, 4)
    plurality_violations = check_gjr(blocs4_election, profile, plurality)
    assert len(plurality_violations) >= 1

    greedy, _ = greedy_pav(blocs4_election, profile)
    greedy_shares = representation_share(profile, greedy, spec)
    assert greedy_shares["minority"] == Fraction(1, 4)
    assert check_gjr(blocs4_election, profile, greedy) == []
    _report(
        "minority exclusion: plurality minority share 0/4 with "
        f"{len(plurality_violations)} GJR violations; greedy share 1/4, 0 violations"
    )


def test_determinism(tmp_path, pair_election, four_voter_profile):
    committee, trail = greedy_pav(pair_election, four_voter_profile)
    violations = check_gjr(pair_election, four_voter_profile, committee)
    first = write_results(committee, trail, violations)
    committee2, trail2 = greedy_pav(pair_election, four_voter_profile)
    second = write_results(committee2, trail2, check_gjr(pair_election, four_voter_profile, committee2))
    assert first == second

    out = tmp_path / "results.json"
    code = main([
        "tally",
        "--election", str(DATA / "election_pair.json"),
        "--ballots", str(DATA / "ballots_four_voter.csv"),
        "--out", str(out),
    ])
    assert code == 0
    cli_bytes = out.read_bytes()

    client = TestClient(create_app(ServiceConfig()))
    response = client.post(
        "/api/tally-file",
        content=(DATA / "combined_four_voter.json").read_bytes(),
        headers={"content-type": "application/json"},
    )
    assert response.status_code == 200
    assert response.content == cli_bytes
    assert cli_bytes == first == (DATA / "results_four_voter.json").read_bytes()
    _report("determinism: repeated tallies and CLI vs service byte-identical")


PERF_DRIVER = """
import json, random, resource, sys, time
from govelect import parse_election, parse_ballots, greedy_pav, check_gjr

offices = [
    {
        "id": f"m{j:02d}",
        "name": f"Ministry {j:02d}",
        "candidates": [
            {"id": f"m{j:02d}c{i}", "name": f"Candidate {i}"} for i in range(1, 5)
        ],
    }
    for j in range(1, 13)
]
election_bytes = json.dumps({"name": "survey shape", "offices": offices}).encode()
rng = random.Random(42)
rows = ["voter_id,office_id,candidate_id"]
for v in range(1, 501):
    for j in range(1, 13):
        rows.append(f"v{v},m{j:02d},m{j:02d}c{rng.randint(1, 4)}")
ballots_bytes = ("\\n".join(rows) + "\\n").encode()

started = time.monotonic()
election = parse_election(election_bytes)
profile = parse_ballots(ballots_bytes, election)
committee, trail = greedy_pav(election, profile)
violations = check_gjr(election, profile, committee)
elapsed = time.monotonic() - started

print(json.dumps({
    "elapsed": elapsed,
    "rss_kb": resource.getrusage(resource.RUSAGE_SELF).ru_maxrss,
    "n": profile.num_voters,
    "rounds": len(trail.rounds),
    "violations": len(violations),
}))
"""


RELAY = (
    "import subprocess, sys; "
    "r = subprocess.run([sys.executable, sys.argv[1]], capture_output=True, text=True); "
    "sys.stdout.write(r.stdout); sys.stderr.write(r.stderr); sys.exit(r.returncode)"
)


def test_desk_scale_performance(tmp_path):
    # spawn through a small relay interpreter: a child forked directly off
    # the (large) pytest process would inherit its RSS high-water mark
    driver = tmp_path / "driver.py"
    driver.write_text(PERF_DRIVER)
    proc = subprocess.run(
        [sys.executable, "-c", RELAY, str(driver)],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert proc.returncode == 0, proc.stderr
    stats = json.loads(proc.stdout)
    assert stats["n"] == 500
    assert stats["rounds"] == 12
    assert stats["elapsed"] < 1.0, f"parse+tally+GJR took {stats['elapsed']:.3f}s"
    rss_mb = stats["rss_kb"] / 1024
    assert rss_mb < 100, f"peak RSS {rss_mb:.1f} MB"
    _report(
        f"desk-scale performance: 500 voters x 12 offices in "
        f"{stats['elapsed'] * 1000:.0f} ms (< 1 s), peak RSS {rss_mb:.1f} MB (< 100 MB)"
    )


def test_format_robustness(pair_election):
    rng = random.Random(1234)
    printable = (
        "abcdefghijklmnopqrstuvwxyz0123456789,\"'{}[]:\\/\n\r\t .-_o1A2v"
    )
    valid_election = (DATA / "election_pair.json").read_bytes()
    valid_ballots = (DATA / "ballots_four_voter.csv").read_bytes()
    adversarial = [
        b"[" * 50_000,
        b"{" * 50_000,
        b'{"name": "' + b"a" * 100_000 + b'"}',
        b"9" * 10_000,
        b'{"name": NaN, "offices": Infinity}',
        b"\xff\xfe\x00\x00junk",
        b"voter_id,office_id,candidate_id\n" + b"\x00" * 50,
        b'"' * 9_999,
    ]

    def random_input() -> bytes:
        kind = rng.random()
        if kind < 0.3:
            return bytes(rng.randrange(256) for _ in range(rng.randrange(0, 150)))
        if kind < 0.55:
            return "".join(
                rng.choice(printable) for _ in range(rng.randrange(0, 150))
            ).encode()
        base = bytearray(valid_election if kind < 0.8 else valid_ballots)
        for _ in range(rng.randrange(1, 10)):
            base[rng.randrange(len(base))] = rng.randrange(256)
        return bytes(base)

    total = 100_000
    inputs = adversarial + [random_input() for _ in range(total - len(adversarial))]
    parsed = 0
    for i, blob in enumerate(inputs):
        try:
            if i % 2 == 0:
                parse_election(blob)
            else:
                parse_ballots(blob, pair_election)
            parsed += 1
        except ElectionError:
            continue  # located error: exactly what totality demands
    _report(
        f"format robustness: {total} fuzz inputs, {parsed} parsed clean, "
        f"rest rejected with located errors, no crashes"
    )
