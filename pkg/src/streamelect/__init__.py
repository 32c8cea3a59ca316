"""Online committee selection with cardinal ballots.

Candidates arrive one at a time in random order and must be hired or
rejected irrevocably until k seats are filled. The package provides the
offline proportional rules these online rules lean on, fairness axiom
checkers with explicit witnesses, adversarial lower-bound instances,
welfare and equity metrics, random instance cultures, file formats, and a
seeded experiment harness.
"""

from .axioms import (
    BRUTE_FORCE_VOTER_CAP,
    CONSTRUCTION_IDS,
    AxiomReport,
    BallotTypeError,
    CounterexampleSpec,
    Witness,
    check_ejr_bruteforce,
    check_ejr_plus_approval,
    check_jr,
    check_strong_jr,
    make_counterexample,
)
from .core import (
    ORDER_GENERATOR,
    ArrivalOrder,
    Committee,
    Decision,
    Election,
    InstanceTooLargeError,
    InvalidCommitteeError,
    SatisfactionVector,
    random_order,
    satisfaction,
    seeded_rng,
    stream,
)
from .harness import (
    ExperimentConfig,
    MesTheoremReport,
    NashTheoremReport,
    RunRecord,
    derive_seed,
    parse_config,
    records_to_csv,
    run_experiment,
    verify_thm_mes,
    verify_thm_nash,
)
from .io import (
    PabulibInstance,
    ParseError,
    bundled_ballot_files,
    divisor_committee_size,
    parse_pabulib,
    read_native,
    to_election,
    write_native,
)
from .metrics import MetricBundle, compute_metrics, relative_to_baseline
from .rules_offline import (
    MesRound,
    MesTrace,
    bos,
    bounded_overspending_subset,
    equal_shares_subset,
    mes,
    nash_optimum_bruteforce,
    nash_welfare,
    utilitarian_topk,
)
from .rules_online import (
    ONLINE_RULE_IDS,
    OnlineRuleConfig,
    greedy_budgeting,
    online_bos,
    online_mes,
    online_nash,
    run_rule,
)
from .samplers import (
    CULTURES,
    SampleSpec,
    dispersion_from_normalized,
    expected_swap_distance,
    proportional_quota,
    sample,
    sample_ic,
    sample_mallows,
    sample_normalized_mallows,
    sample_polarized,
)

__version__ = "0.1.0"

__all__ = [
    "ORDER_GENERATOR",
    "ArrivalOrder",
    "AxiomReport",
    "BRUTE_FORCE_VOTER_CAP",
    "BallotTypeError",
    "CONSTRUCTION_IDS",
    "CULTURES",
    "Committee",
    "CounterexampleSpec",
    "Decision",
    "Election",
    "ExperimentConfig",
    "InstanceTooLargeError",
    "InvalidCommitteeError",
    "MesRound",
    "MesTheoremReport",
    "MesTrace",
    "MetricBundle",
    "NashTheoremReport",
    "ONLINE_RULE_IDS",
    "OnlineRuleConfig",
    "PabulibInstance",
    "ParseError",
    "RunRecord",
    "SampleSpec",
    "SatisfactionVector",
    "Witness",
    "bos",
    "bounded_overspending_subset",
    "bundled_ballot_files",
    "check_ejr_bruteforce",
    "check_ejr_plus_approval",
    "check_jr",
    "check_strong_jr",
    "compute_metrics",
    "derive_seed",
    "dispersion_from_normalized",
    "divisor_committee_size",
    "equal_shares_subset",
    "expected_swap_distance",
    "greedy_budgeting",
    "make_counterexample",
    "mes",
    "nash_optimum_bruteforce",
    "nash_welfare",
    "online_bos",
    "online_mes",
    "online_nash",
    "parse_config",
    "parse_pabulib",
    "proportional_quota",
    "random_order",
    "read_native",
    "records_to_csv",
    "relative_to_baseline",
    "run_experiment",
    "run_rule",
    "sample",
    "sample_ic",
    "sample_mallows",
    "sample_normalized_mallows",
    "sample_polarized",
    "satisfaction",
    "seeded_rng",
    "stream",
    "to_election",
    "utilitarian_topk",
    "verify_thm_mes",
    "verify_thm_nash",
    "write_native",
]
