"""Synthetic electorates and rule-comparison experiments.

Electorates are built from voting blocs: groups of voters sharing one
approval map. Disjoint majority/minority blocs are the canonical scenario
for showing what per-office plurality does to a minority (nothing) versus
what the greedy tally gives it (its proportional share of offices).
Generation is deterministic given the spec and its seed.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .model import (
    ApprovalProfile,
    Committee,
    Election,
    ElectionError,
    MalformedDocument,
    Voter,
    check_consistent,
    validate_voter,
)
from .oracle import (
    DegenerateInstance,
    SearchBudgetExceeded,
    approximation_ratio,
    check_gjr,
    plurality_baseline,
)
from .tally import greedy_pav

REPORT_COLUMNS = ("spec", "rule", "bloc", "share_num", "share_den", "gjr_violations")


class SpecInconsistent(ElectionError):
    code = "SpecInconsistent"


@dataclass(frozen=True)
class Bloc:
    label: str
    voter_count: int
    approved: Mapping[str, frozenset[str]]


@dataclass(frozen=True)
class BlocSpec:
    blocs: tuple[Bloc, ...]
    seed: int = 0

    @property
    def num_voters(self) -> int:
        return sum(bloc.voter_count for bloc in self.blocs)


def validate_bloc_spec(election: Election, data: Mapping[str, Any]) -> BlocSpec:
    """Validate a bloc-spec document against an election.

    Shape: {"blocs": [{"label", "voters", "approved": {office: [cands]}}],
    "seed": int}.
    """
    if not isinstance(data, Mapping):
        raise MalformedDocument("bloc spec must be an object")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise SpecInconsistent("seed must be an integer", "seed")
    blocs_data = data.get("blocs")
    if not isinstance(blocs_data, Sequence) or isinstance(blocs_data, (str, bytes)):
        raise SpecInconsistent("blocs must be an array", "blocs")
    blocs: list[Bloc] = []
    seen: set[str] = set()
    for i, bloc_data in enumerate(blocs_data):
        loc = f"blocs[{i}]"
        if not isinstance(bloc_data, Mapping):
            raise SpecInconsistent("bloc must be an object", loc)
        label = bloc_data.get("label")
        if not isinstance(label, str) or not label:
            raise SpecInconsistent("bloc label must be a non-empty string", f"{loc}.label")
        if label in seen:
            raise SpecInconsistent(f"bloc label {label!r} appears twice", f"{loc}.label")
        seen.add(label)
        count = bloc_data.get("voters")
        if not isinstance(count, int) or isinstance(count, bool) or count < 0:
            raise SpecInconsistent("voters must be a non-negative integer", f"{loc}.voters")
        # reuse the voter validator for the office -> candidates map
        probe = validate_voter(
            election,
            {"voter_id": label, "approvals": bloc_data.get("approved", {})},
            loc,
        )
        blocs.append(Bloc(label, count, probe.approvals))
    if sum(b.voter_count for b in blocs) < 1:
        raise SpecInconsistent("spec generates no voters", "blocs")
    return BlocSpec(tuple(blocs), seed)


def generate_profile(
    election: Election, spec: BlocSpec, abstain_rate: float = 0.0
) -> ApprovalProfile:
    """Materialize the electorate: bloc members get the bloc's approvals.

    With ``abstain_rate`` > 0, each voter independently drops each office's
    approvals with that probability, driven by the spec's seed; the default
    of 0 reproduces the blocs exactly. Deterministic for a given
    (spec, seed, abstain_rate).
    """
    if not 0.0 <= abstain_rate <= 1.0:
        raise SpecInconsistent("abstain_rate must be within [0, 1]")
    rng = random.Random(spec.seed)
    voters: list[Voter] = []
    for bloc in spec.blocs:
        for i in range(bloc.voter_count):
            approvals = dict(bloc.approved)
            if abstain_rate > 0.0:
                approvals = {
                    office_id: approved
                    for office_id, approved in approvals.items()
                    if rng.random() >= abstain_rate
                }
            voters.append(Voter(f"{bloc.label}-{i + 1}", approvals))
    if not voters:
        raise SpecInconsistent("spec generates no voters")
    profile = ApprovalProfile(tuple(voters))
    check_consistent(election, profile)
    return profile


def representation_share(
    profile: ApprovalProfile, committee: Committee, spec: BlocSpec
) -> dict[str, Fraction]:
    """Per bloc: the exact fraction of offices whose winner the bloc approves."""
    num_offices = len(committee.assignment)
    shares: dict[str, Fraction] = {}
    for bloc in spec.blocs:
        represented = sum(
            1
            for office_id, winner in committee.assignment.items()
            if winner in bloc.approved.get(office_id, frozenset())
        )
        shares[bloc.label] = Fraction(represented, num_offices)
    return shares


@dataclass(frozen=True)
class ExperimentRow:
    spec_index: int
    rule: str
    bloc: str
    share: Fraction
    gjr_violations: int
    ratio: Fraction | None


def run_experiment(
    election: Election,
    specs: Sequence[BlocSpec],
    budget: int | None = None,
) -> list[ExperimentRow]:
    """Compare the greedy tally and the plurality baseline over bloc specs.

    One row per (spec, rule, bloc), ordered by spec index, then rule name,
    then the spec's bloc order. The approximation ratio rides along when
    the exact search fits the budget and the instance is non-degenerate;
    otherwise it is None.
    """
    rows: list[ExperimentRow] = []
    for spec_index, spec in enumerate(specs):
        profile = generate_profile(election, spec)
        ratio: Fraction | None
        try:
            if budget is None:
                ratio = approximation_ratio(election, profile)
            else:
                ratio = approximation_ratio(election, profile, budget=budget)
        except (SearchBudgetExceeded, DegenerateInstance):
            ratio = None
        greedy_committee, _ = greedy_pav(election, profile)
        committees = {
            "greedy_pav": greedy_committee,
            "plurality": plurality_baseline(election, profile),
        }
        for rule in sorted(committees):
            committee = committees[rule]
            violations = len(check_gjr(election, profile, committee))
            shares = representation_share(profile, committee, spec)
            for bloc in spec.blocs:
                rows.append(
                    ExperimentRow(
                        spec_index=spec_index,
                        rule=rule,
                        bloc=bloc.label,
                        share=shares[bloc.label],
                        gjr_violations=violations,
                        ratio=ratio if rule == "greedy_pav" else None,
                    )
                )
    return rows


def render_report_csv(rows: Sequence[ExperimentRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row.spec_index,
                row.rule,
                row.bloc,
                row.share.numerator,
                row.share.denominator,
                row.gjr_violations,
            ]
        )
    return out.getvalue()


def render_report_text(rows: Sequence[ExperimentRow]) -> str:
    """Human-readable report, one line per row plus greedy ratios."""
    lines = []
    for row in rows:
        line = (
            f"spec {row.spec_index} {row.rule:>10}: bloc {row.bloc!r} "
            f"share {row.share} ({float(row.share):.3f}), "
            f"gjr violations {row.gjr_violations}"
        )
        if row.ratio is not None:
            line += f", approximation ratio {row.ratio}"
        lines.append(line)
    return "\n".join(lines) + ("\n" if lines else "")
