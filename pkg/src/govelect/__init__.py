"""Proportional multi-office approval elections.

The tally fills every office of an election with one winner, choosing
round by round the candidate with the highest total voter weight and
discounting voters as they accumulate winners they approve. The oracle
module provides the exact optimizer, the representation checker, and the
per-office plurality baseline used to verify tally output.
"""

from .model import (
    ApprovalProfile,
    Candidate,
    Committee,
    Election,
    ElectionError,
    Office,
    Score,
    Voter,
    validate_committee,
    validate_election,
    validate_profile,
)
from .tally import AuditTrail, RoundRecord, TallyState, greedy_pav, marginal_score
from .oracle import (
    GjrViolation,
    approximation_ratio,
    check_gjr,
    exact_pav,
    pav_score,
    plurality_baseline,
)
from .ballots import (
    parse_ballots,
    parse_combined,
    parse_election,
    write_ballots,
    write_election,
    write_results,
)
from .simulate import (
    Bloc,
    BlocSpec,
    generate_profile,
    representation_share,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "ApprovalProfile",
    "AuditTrail",
    "Bloc",
    "BlocSpec",
    "Candidate",
    "Committee",
    "Election",
    "ElectionError",
    "GjrViolation",
    "Office",
    "RoundRecord",
    "Score",
    "TallyState",
    "Voter",
    "approximation_ratio",
    "check_gjr",
    "exact_pav",
    "generate_profile",
    "greedy_pav",
    "marginal_score",
    "parse_ballots",
    "parse_combined",
    "parse_election",
    "pav_score",
    "plurality_baseline",
    "representation_share",
    "run_experiment",
    "validate_committee",
    "validate_election",
    "validate_profile",
    "write_ballots",
    "write_election",
    "write_results",
]
