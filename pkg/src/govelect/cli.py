"""Command-line entry points for batch tallies, verification, and serving.

Exit codes: 0 success, 1 operational failure (e.g. bind error), 2 input
validation failure, 3 representation violation found by ``verify``. CI can
therefore assert the representation property across whole fixture corpora.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Sequence

from . import ballots
from .model import Committee, Election, ElectionError, validate_committee
from .oracle import (
    DegenerateInstance,
    GjrViolation,
    SearchBudgetExceeded,
    check_gjr,
    exact_pav,
    pav_score,
)
from .simulate import (
    render_report_csv,
    render_report_text,
    run_experiment,
    validate_bloc_spec,
)
from .tally import AuditTrail, greedy_pav

DEFAULT_BIND = "127.0.0.1:8000"


def render_results_text(
    election: Election,
    committee: Committee,
    trail: AuditTrail,
    violations: Sequence[GjrViolation],
) -> str:
    """Round-by-round explanation of who won, at what weight, and why."""
    lines = [f"Election: {election.name}", "", "Committee:"]
    for office in election.offices:
        winner_id = committee.assignment[office.id]
        winner = next(c for c in office.candidates if c.id == winner_id)
        lines.append(f"  {office.display_name} ({office.id}): "
                     f"{winner.display_name} ({winner.id})")
    lines.append("")
    for record in trail.rounds:
        winning = record.scores[record.winner_candidate]
        note = " by tie-break" if record.tied_with else ""
        if record.zero_support:
            note += " (no approvals)"
        lines.append(
            f"Round {record.index}: {record.winner_candidate} takes "
            f"{record.winner_office} at score {winning}{note}"
        )
        scores = "  ".join(f"{cid}={score}" for cid, score in record.scores.items())
        lines.append(f"  scores: {scores}")
        if record.tied_with:
            tied = ", ".join(f"{c}@{o}" for o, c in sorted(record.tied_with))
            lines.append(f"  tied with: {tied}")
        lines.append(f"  voters satisfied this round: {len(record.satisfied_voters)}")
    lines.append("")
    if violations:
        lines.append(f"GJR: violated ({len(violations)} deserted groups)")
        for v in violations:
            lines.append(
                f"  candidate {v.candidate} ({v.office}): {v.group_size} voters "
                f"agree on it yet got nobody they approve "
                f"(quota {v.threshold})"
            )
    else:
        lines.append("GJR: ok")
    return "\n".join(lines) + "\n"


def _load_inputs(args) -> tuple[Election, "ApprovalProfile"]:
    election = ballots.parse_election(Path(args.election).read_bytes())
    profile = ballots.parse_ballots(Path(args.ballots).read_bytes(), election)
    return election, profile


def _emit(data: bytes, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(out).write_bytes(data)


def cmd_tally(args) -> int:
    election, profile = _load_inputs(args)
    committee, trail = greedy_pav(election, profile)
    violations = check_gjr(election, profile, committee)
    if args.format == "json":
        _emit(ballots.write_results(committee, trail, violations), args.out)
    else:
        text = render_results_text(election, committee, trail, violations)
        _emit(text.encode("utf-8"), args.out)
    return 0


def cmd_verify(args) -> int:
    election, profile = _load_inputs(args)
    if args.committee:
        doc = ballots._load_json(Path(args.committee).read_bytes(), "committee document")
        doc = ballots._ensure_object(doc)
        committee = validate_committee(election, doc.get("committee", doc))
    else:
        committee, _ = greedy_pav(election, profile)
    violations = check_gjr(election, profile, committee)
    try:
        optimal, _ = exact_pav(election, profile, budget=args.budget)
        if optimal == 0:
            raise DegenerateInstance("optimal PAV score is 0")
        ratio = pav_score(profile, committee) / optimal
        print(f"ratio: {ratio}")
    except (SearchBudgetExceeded, DegenerateInstance):
        print("ratio: skipped")
    if violations:
        print(f"GJR: violated ({len(violations)} deserted groups)")
        for v in violations:
            group = ", ".join(sorted(v.deserted_group))
            print(f"  {v.candidate} ({v.office}): size {v.group_size} "
                  f">= quota {v.threshold}: {group}")
        return 3
    print("GJR: ok")
    return 0


def cmd_simulate(args) -> int:
    election = ballots.parse_election(Path(args.election).read_bytes())
    doc = ballots._load_json(Path(args.spec).read_bytes(), "spec document")
    if isinstance(doc, dict):
        doc = [doc]
    if not isinstance(doc, list):
        raise ElectionError("spec document must be an object or an array")
    specs = [validate_bloc_spec(election, entry) for entry in doc]
    rows = run_experiment(election, specs)
    if args.format == "csv":
        _emit(render_report_csv(rows).encode("utf-8"), args.out)
    else:
        _emit(render_report_text(rows).encode("utf-8"), args.out)
    return 0


def cmd_serve(args) -> int:
    host, _, port_text = args.bind.rpartition(":")
    if not host or not port_text.isdigit():
        print(f"error: invalid bind address {args.bind!r}", file=sys.stderr)
        return 1
    port = int(port_text)

    import socket

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        print(f"error: cannot bind {args.bind}: {exc}", file=sys.stderr)
        return 1
    finally:
        probe.close()

    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="govelect",
        description="Proportional multi-office approval elections",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    tally = sub.add_parser("tally", help="tally ballots and write results")
    tally.add_argument("--election", required=True, help="election JSON path")
    tally.add_argument("--ballots", required=True, help="ballot CSV path")
    tally.add_argument("--out", default=None, help="output path (default stdout)")
    tally.add_argument("--format", choices=("json", "text"), default="json")
    tally.set_defaults(func=cmd_tally)

    verify = sub.add_parser(
        "verify", help="check representation and approximation quality"
    )
    verify.add_argument("--election", required=True)
    verify.add_argument("--ballots", required=True)
    verify.add_argument("--budget", type=int, default=10**6,
                        help="max committees for the exact search")
    verify.add_argument("--committee", default=None,
                        help="verify this committee JSON instead of the greedy one")
    verify.set_defaults(func=cmd_verify)

    simulate = sub.add_parser("simulate", help="run bloc-spec experiments")
    simulate.add_argument("--election", required=True)
    simulate.add_argument("--spec", required=True, help="bloc spec JSON path")
    simulate.add_argument("--out", default=None, help="output path (default stdout)")
    simulate.add_argument("--format", choices=("csv", "text"), default="csv")
    simulate.set_defaults(func=cmd_simulate)

    serve = sub.add_parser("serve", help="run the HTTP demo service")
    serve.add_argument(
        "--bind",
        default=os.environ.get("BIND_ADDR", DEFAULT_BIND),
        help=f"host:port (default {DEFAULT_BIND}, env BIND_ADDR)",
    )
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ElectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
