"""Experiment orchestration: seeded evaluation runs, CSV emission, aggregate
tables, and statistical checks of the probabilistic guarantees.

Every run is a pure function of the experiment config: arrival seeds are
derived by hashing (base seed, instance id, k, iteration), so reruns emit
byte-identical CSVs. Wall-clock durations are recorded on RunRecords but
kept out of the CSV for exactly that reason; aggregate timing is reported
separately.
"""

from __future__ import annotations

import hashlib
import math
import os
import time
from dataclasses import dataclass

import numpy as np

from .axioms import check_ejr_plus_approval, check_jr
from .core import Election, random_order, satisfaction
from .io import bundled_ballot_files, divisor_committee_size, parse_pabulib, read_native, to_election
from .metrics import MetricBundle, compute_metrics
from .rules_offline import mes, nash_optimum_bruteforce, nash_welfare
from .rules_online import ONLINE_RULE_IDS, OnlineRuleConfig, online_mes, run_rule
from .samplers import CULTURES, SampleSpec, proportional_quota, sample

EXPERIMENTS = ("exp1", "exp2", "exp3", "exp4", "thm-mes", "thm-nash")

ALL_RULE_IDS = ONLINE_RULE_IDS + ("offline-mes",)

CSV_FIELDS = (
    "instance",
    "rule",
    "seed",
    "k",
    "committee",
    "average_satisfaction",
    "exclusion_ratio",
    "bottom_quartile_mean",
    "gini",
    "nash_welfare",
    "jr_satisfied",
    "ejr_plus_share",
    "ejr_plus_shortfall",
    "ejr_plus_witnesses",
    "quota_deserved",
    "quota_received",
)

# Desk-scale grid for the sampled-culture experiment.
EXP3_VOTERS = (5, 10, 20, 50)
EXP3_PAIRS = ((8, 2), (10, 3), (12, 4), (14, 4), (16, 5), (20, 5), (24, 8), (30, 10))
EXP3_PARAMS = (0.2, 0.6, 1.0)

# Ranges for the polarized experiment; k stays at or below m/2 so group A's
# budget always covers its committee share (the no-underperformance guarantee
# of the greedy rule needs first-half candidates to outnumber the quota).
EXP4_VOTERS = (20, 60)
EXP4_CANDIDATES = (10, 24)
EXP4_SHARE = (0.2, 0.8)
EXP4_RATE = (0.3, 1.0)


@dataclass(frozen=True)
class RunRecord:
    """One (instance, rule, arrival seed) evaluation."""

    instance: str
    rule: str
    seed: int
    k: int
    committee: tuple
    metrics: MetricBundle
    jr_satisfied: bool
    ejr_plus_share: float | None = None
    ejr_plus_shortfall: float | None = None
    ejr_plus_witnesses: int | None = None
    quota_deserved: int | None = None
    quota_received: int | None = None
    duration: float = 0.0

    def csv_row(self):
        def fmt(value):
            if value is None:
                return ""
            if isinstance(value, bool):
                return "1" if value else "0"
            if isinstance(value, float):
                return repr(value)
            return str(value)

        committee = " ".join(str(c + 1) for c in self.committee)
        cells = (
            self.instance,
            self.rule,
            self.seed,
            self.k,
            committee,
            *self.metrics.as_row(),
            self.jr_satisfied,
            self.ejr_plus_share,
            self.ejr_plus_shortfall,
            self.ejr_plus_witnesses,
            self.quota_deserved,
            self.quota_received,
        )
        return ",".join(fmt(c) for c in cells)


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings of one experiment run.

    `sources` are instance files (ballot files for exp1, native instances
    for exp2); sampled experiments ignore them. `instances` bounds how many
    instances a sampled experiment draws, `iterations` how many arrival
    orders each (instance, k) gets, and `orders` the Monte Carlo size of the
    theorem checks. `p` is the relaxation level of the equal-shares theorem
    check.
    """

    experiment: str
    sources: tuple = ()
    divisors: tuple = (20, 4)
    iterations: int = 5
    base_seed: int = 2026
    output: str | None = None
    instances: int = 20
    orders: int = 500
    p: int = 2
    exploration: int | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment: {self.experiment!r}")
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")


def parse_config(text):
    """Parse the flat key=value config format (repeated source= lines)."""
    values = {}
    sources = []
    divisors = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "source":
            sources.append(value)
        elif key == "divisors":
            divisors = tuple(int(v) for v in value.replace(",", " ").split())
        elif key in ("iterations", "base_seed", "instances", "orders", "p", "exploration"):
            values[key] = int(value)
        elif key in ("experiment", "output"):
            values[key] = value
        else:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
    if "experiment" not in values:
        raise ValueError("config must set experiment=")
    return ExperimentConfig(sources=tuple(sources), divisors=divisors or (20, 4), **values)


def derive_seed(base_seed, instance_id, k, iteration):
    """Arrival seed for one evaluation cell, stable across platforms."""
    material = f"{base_seed}|{instance_id}|{k}|{iteration}".encode()
    return int.from_bytes(hashlib.sha256(material).digest()[:8], "big")


def evaluate_committee(election, committee, approval):
    """Metrics plus axiom summaries of one committee on one election."""
    sat = satisfaction(election, committee)
    bundle = compute_metrics(sat)
    jr_ok = check_jr(election, committee).satisfied
    share = shortfall = witnesses = None
    if approval:
        report = check_ejr_plus_approval(election, committee)
        share = report.violating_voter_share
        shortfall = report.shortfall
        witnesses = len({w.candidates[0] for w in report.witnesses})
    return bundle, jr_ok, share, shortfall, witnesses


def _is_approval(election):
    return bool(np.all((election.utilities == 0.0) | (election.utilities == 1.0)))


def run_cell(instance_id, election, seed, spec=None):
    """Evaluate all online rules plus the offline baseline on one arrival
    order; returns the records in canonical rule order."""
    order = random_order(election.num_candidates, seed)
    approval = _is_approval(election)
    records = []
    for rule_id in ALL_RULE_IDS:
        start = time.perf_counter()
        if rule_id == "offline-mes":
            committee, _ = mes(election)
        else:
            committee = run_rule(rule_id, election, order)
        duration = time.perf_counter() - start
        bundle, jr_ok, share, shortfall, witnesses = evaluate_committee(
            election, committee, approval
        )
        deserved = received = None
        if spec is not None and spec.culture == "polarized":
            deserved, received = proportional_quota(spec, committee)
        records.append(
            RunRecord(
                instance=instance_id,
                rule=rule_id,
                seed=seed,
                k=election.committee_size,
                committee=committee.sorted_members(),
                metrics=bundle,
                jr_satisfied=jr_ok,
                ejr_plus_share=share,
                ejr_plus_shortfall=shortfall,
                ejr_plus_witnesses=witnesses,
                quota_deserved=deserved,
                quota_received=received,
                duration=duration,
            )
        )
    return records


def _with_committee_size(election, k):
    return Election(
        election.num_voters, election.num_candidates, k, election.utilities, election.score_cap
    )


def _load_sources(cfg, parser):
    """Yield (name, payload) for configured sources, or the bundled ballot
    files when none are configured (exp1 only)."""
    if cfg.sources:
        for path in cfg.sources:
            with open(path, encoding="utf-8") as handle:
                yield os.path.basename(path), parser(handle.read())
    elif parser is parse_pabulib:
        for name, text in bundled_ballot_files():
            yield name, parser(text)
    else:
        raise ValueError("this experiment needs source= lines")


def _records_exp1(cfg, skipped):
    records = []
    for name, instance in _load_sources(cfg, parse_pabulib):
        m = len(instance.projects)
        for divisor in cfg.divisors:
            try:
                k = divisor_committee_size(m, divisor)
            except ValueError as exc:
                skipped.append(f"{name} divisor {divisor}: {exc}")
                continue
            election = to_election(instance, k)
            instance_id = f"{name}/m{divisor}"
            for iteration in range(1, cfg.iterations + 1):
                seed = derive_seed(cfg.base_seed, instance_id, k, iteration)
                records.extend(run_cell(instance_id, election, seed))
    return records


def _records_exp2(cfg, skipped):
    records = []
    for name, (election, _order) in _load_sources(cfg, read_native):
        for divisor in cfg.divisors:
            try:
                k = divisor_committee_size(election.num_candidates, divisor)
            except ValueError as exc:
                skipped.append(f"{name} divisor {divisor}: {exc}")
                continue
            scoped = _with_committee_size(election, k)
            instance_id = f"{name}/m{divisor}"
            for iteration in range(1, cfg.iterations + 1):
                seed = derive_seed(cfg.base_seed, instance_id, k, iteration)
                records.extend(run_cell(instance_id, scoped, seed))
    return records


def _records_exp3(cfg, skipped):
    records = []
    cells = []
    for culture in ("ic", "mallows", "normalized-mallows"):
        for value in EXP3_PARAMS:
            for n in EXP3_VOTERS:
                for m, k in EXP3_PAIRS:
                    cells.append((culture, value, n, m, k))
    for index, (culture, value, n, m, k) in enumerate(cells[: cfg.instances]):
        params = {"p": value} if culture == "ic" else {"phi": value}
        spec = SampleSpec(
            culture=culture,
            num_voters=n,
            num_candidates=m,
            committee_size=k,
            seed=derive_seed(cfg.base_seed, f"exp3-{index}", k, 0),
            **params,
        )
        election = sample(spec)
        for iteration in range(1, cfg.iterations + 1):
            seed = derive_seed(cfg.base_seed, spec.instance_id(), k, iteration)
            records.extend(run_cell(spec.instance_id(), election, seed, spec=spec))
    return records


def _records_exp4(cfg, skipped):
    records = []
    rng = np.random.Generator(np.random.Philox(key=derive_seed(cfg.base_seed, "exp4", 0, 0)))
    for index in range(cfg.instances):
        n = int(rng.integers(EXP4_VOTERS[0], EXP4_VOTERS[1] + 1))
        m = int(rng.integers(EXP4_CANDIDATES[0], EXP4_CANDIDATES[1] + 1))
        k = int(rng.integers(2, m // 2 + 1))
        x = float(rng.uniform(*EXP4_SHARE))
        q = float(rng.uniform(*EXP4_RATE))
        spec = SampleSpec(
            culture="polarized",
            num_voters=n,
            num_candidates=m,
            committee_size=k,
            seed=derive_seed(cfg.base_seed, f"exp4-{index}", k, 0),
            x=x,
            q=q,
        )
        election = sample(spec)
        for iteration in range(1, cfg.iterations + 1):
            seed = derive_seed(cfg.base_seed, spec.instance_id(), k, iteration)
            records.extend(run_cell(spec.instance_id(), election, seed, spec=spec))
    return records


def aggregate_exp1(records):
    """Mean EJR+ violation share, shortfall, and witness count per rule."""
    rows = []
    for rule in ALL_RULE_IDS:
        mine = [r for r in records if r.rule == rule and r.ejr_plus_share is not None]
        if not mine:
            continue
        rows.append(
            {
                "rule": rule,
                "mean_share": sum(r.ejr_plus_share for r in mine) / len(mine),
                "mean_shortfall": sum(r.ejr_plus_shortfall for r in mine) / len(mine),
                "mean_witnesses": sum(r.ejr_plus_witnesses for r in mine) / len(mine),
                "runs": len(mine),
            }
        )
    return rows


HIGHER_BETTER = ("average_satisfaction", "bottom_quartile_mean", "nash_welfare")
LOWER_BETTER = ("exclusion_ratio", "gini")


def aggregate_best_counts(records):
    """Share of evaluation cells where each online rule is best, among the
    two best, and worst, per metric; ties are credited to every tied rule."""
    cells = {}
    for record in records:
        if record.rule == "offline-mes":
            continue
        cells.setdefault((record.instance, record.seed), {})[record.rule] = record.metrics
    counts = {
        (metric, rule): {"best": 0, "top2": 0, "worst": 0}
        for metric in HIGHER_BETTER + LOWER_BETTER
        for rule in ONLINE_RULE_IDS
    }
    total = 0
    for bundles in cells.values():
        if len(bundles) < len(ONLINE_RULE_IDS):
            continue
        total += 1
        for metric in HIGHER_BETTER + LOWER_BETTER:
            sign = 1.0 if metric in HIGHER_BETTER else -1.0
            scored = {rule: sign * getattr(b, metric) for rule, b in bundles.items()}
            values = sorted(set(scored.values()), reverse=True)
            second = values[1] if len(values) > 1 else values[0]
            for rule, score in scored.items():
                slot = counts[(metric, rule)]
                if score == values[0]:
                    slot["best"] += 1
                if score >= second:
                    slot["top2"] += 1
                if score == values[-1]:
                    slot["worst"] += 1
    rows = []
    for (metric, rule), slot in counts.items():
        if total:
            rows.append(
                {
                    "metric": metric,
                    "rule": rule,
                    "best": slot["best"] / total,
                    "top2": slot["top2"] / total,
                    "worst": slot["worst"] / total,
                    "cells": total,
                }
            )
    return rows


def aggregate_relative(records):
    """Mean metrics of each online rule relative to the offline baseline of
    the same cell: ratios for the satisfaction metrics, differences for the
    bounded ones."""
    baselines = {
        (r.instance, r.seed): r.metrics for r in records if r.rule == "offline-mes"
    }
    sums = {}
    for record in records:
        if record.rule == "offline-mes":
            continue
        base = baselines.get((record.instance, record.seed))
        if base is None:
            continue
        culture = _culture_of(record.instance)
        key = (culture, record.rule)
        entry = sums.setdefault(key, {"n": 0, "avg": 0.0, "quart": 0.0, "gini": 0.0, "excl": 0.0})
        entry["n"] += 1
        entry["avg"] += _safe_ratio(record.metrics.average_satisfaction, base.average_satisfaction)
        entry["quart"] += _safe_ratio(
            record.metrics.bottom_quartile_mean, base.bottom_quartile_mean
        )
        entry["gini"] += record.metrics.gini - base.gini
        entry["excl"] += record.metrics.exclusion_ratio - base.exclusion_ratio
    rows = []
    for (culture, rule), entry in sorted(sums.items()):
        n = entry["n"]
        rows.append(
            {
                "culture": culture,
                "rule": rule,
                "avg_ratio": entry["avg"] / n,
                "quartile_ratio": entry["quart"] / n,
                "gini_diff": entry["gini"] / n,
                "exclusion_diff": entry["excl"] / n,
                "runs": n,
            }
        )
    return rows


def _culture_of(instance_id):
    for culture in sorted(CULTURES, key=len, reverse=True):
        if instance_id.startswith(culture + "-"):
            return culture
    return instance_id.split("-")[0]


def _safe_ratio(value, base):
    if base == 0.0:
        return 1.0 if value == 0.0 else float("inf")
    return value / base


def aggregate_exp4(records):
    """Underperformance share, conditional mean deficit, and the largest
    per-instance mean deficit, per online rule."""
    rows = []
    for rule in ONLINE_RULE_IDS:
        mine = [r for r in records if r.rule == rule and r.quota_deserved is not None]
        if not mine:
            continue
        deficits = [max(0, r.quota_deserved - r.quota_received) for r in mine]
        failing = [d for d in deficits if d > 0]
        per_instance = {}
        for record, deficit in zip(mine, deficits):
            per_instance.setdefault(record.instance, []).append(deficit)
        instance_means = [sum(ds) / len(ds) for ds in per_instance.values()]
        rows.append(
            {
                "rule": rule,
                "underperformance": len(failing) / len(deficits),
                "mean_deficit": sum(failing) / len(failing) if failing else 0.0,
                "max_deficit": max(instance_means) if instance_means else 0.0,
                "runs": len(deficits),
            }
        )
    return rows


def records_to_csv(records):
    lines = [",".join(CSV_FIELDS)]
    lines.extend(r.csv_row() for r in records)
    return "\n".join(lines) + "\n"


def run_experiment(cfg):
    """Run one experiment end to end.

    Returns
    -------
    (records, aggregates, skipped)
        records: canonical-order RunRecords; aggregates: dict of aggregate
        tables keyed by table name; skipped: human-readable skip reasons.
        The CSV is written to cfg.output when set.
    """
    skipped = []
    if cfg.experiment == "exp1":
        records = _records_exp1(cfg, skipped)
        aggregates = {"ejr_plus": aggregate_exp1(records), "best_counts": aggregate_best_counts(records)}
    elif cfg.experiment == "exp2":
        records = _records_exp2(cfg, skipped)
        aggregates = {"best_counts": aggregate_best_counts(records)}
    elif cfg.experiment == "exp3":
        records = _records_exp3(cfg, skipped)
        aggregates = {"relative": aggregate_relative(records)}
    elif cfg.experiment == "exp4":
        records = _records_exp4(cfg, skipped)
        aggregates = {"quota": aggregate_exp4(records)}
    else:
        raise ValueError(f"{cfg.experiment} is a theorem check; use its verify function")
    aggregates["timing"] = _aggregate_timing(records)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as handle:
            handle.write(records_to_csv(records))
    return records, aggregates, skipped


def _aggregate_timing(records):
    rows = []
    for rule in ALL_RULE_IDS:
        durations = [r.duration for r in records if r.rule == rule]
        if durations:
            rows.append({"rule": rule, "mean_seconds": sum(durations) / len(durations)})
    return rows


def single_approval_election(num_candidates=40, committee_size=3, supporters_per_winner=None):
    """A single-approval election whose offline equal-shares outcome is the
    first k candidates: each gets exactly n/k supporters (so each is exactly
    affordable), every other candidate gets none."""
    k = committee_size
    per = supporters_per_winner or 10
    n = per * k
    matrix = np.zeros((n, num_candidates))
    for c in range(k):
        matrix[per * c : per * (c + 1), c] = 1.0
    return Election(n, num_candidates, k, matrix)


@dataclass(frozen=True)
class MesTheoremReport:
    """Empirical hire frequencies of the reference winners under the online
    equal-shares rule, against the 1/e bound."""

    winner_frequencies: dict
    per_winner_threshold: float
    joint_frequency: float
    joint_threshold: float
    relaxation: int
    orders: int
    vacuous: bool
    passed: bool


def verify_thm_mes(cfg):
    """Monte Carlo check of the hiring guarantee of online equal shares.

    On a single-approval instance, every offline winner must be hired with
    frequency at least 1/e minus three binomial standard deviations, and at
    least k - p winners must be hired jointly with frequency at least
    (1/e)^(k-p) minus the same allowance. p = k is vacuous (trivially
    passed).
    """
    election = single_approval_election()
    k = election.committee_size
    committee, trace = mes(election)
    if trace.completion_added:
        raise ValueError("theorem check needs an instance solved without completion")
    winners = sorted(committee.members)
    if cfg.p >= k:
        return MesTheoremReport({}, 0.0, 1.0, 1.0, cfg.p, 0, vacuous=True, passed=True)
    orders = cfg.orders
    hire_counts = {c: 0 for c in winners}
    joint_count = 0
    config = OnlineRuleConfig(rule="online-mes", exploration=cfg.exploration)
    for iteration in range(1, orders + 1):
        seed = derive_seed(cfg.base_seed, "thm-mes", k, iteration)
        order = random_order(election.num_candidates, seed)
        members = online_mes(election, order, config).members
        hired = [c for c in winners if c in members]
        for c in hired:
            hire_counts[c] += 1
        if len(hired) >= k - cfg.p:
            joint_count += 1
    sigma = math.sqrt(0.368 * 0.632 / orders)
    inv_e = 1.0 / math.e
    frequencies = {c: hire_counts[c] / orders for c in winners}
    per_threshold = inv_e - 3.0 * sigma
    joint_bound = inv_e ** (k - cfg.p)
    joint_sigma = math.sqrt(joint_bound * (1.0 - joint_bound) / orders)
    joint_threshold = joint_bound - 3.0 * joint_sigma
    joint_frequency = joint_count / orders
    passed = all(f >= per_threshold for f in frequencies.values()) and (
        joint_frequency >= joint_threshold
    )
    return MesTheoremReport(
        winner_frequencies=frequencies,
        per_winner_threshold=per_threshold,
        joint_frequency=joint_frequency,
        joint_threshold=joint_threshold,
        relaxation=cfg.p,
        orders=orders,
        vacuous=False,
        passed=passed,
    )


@dataclass(frozen=True)
class NashTheoremReport:
    """Mean ratio of online to optimal Nash product (exponentiated welfare)
    against the (1 - 1/e) / 7 bound."""

    instance_means: tuple
    mean_ratio: float
    bound: float
    orders: int
    passed: bool


def verify_thm_nash(cfg):
    """Monte Carlo check of the online Nash guarantee on IC instances.

    For each sampled instance the brute-force optimum is computed once, then
    cfg.orders arrival orders are evaluated; the ratio compares exponentiated
    welfares exp(nash(online) - nash(opt)), the product-of-(1+u) form, which
    stays scale-meaningful near zero.
    """
    bound = (1.0 - 1.0 / math.e) / 7.0
    instance_means = []
    ratios_all = []
    for index in range(cfg.instances):
        spec = SampleSpec(
            culture="ic",
            num_voters=5,
            num_candidates=12,
            committee_size=3,
            p=0.5,
            seed=derive_seed(cfg.base_seed, f"thm-nash-{index}", 3, 0),
        )
        election = sample(spec)
        _, optimum = nash_optimum_bruteforce(election)
        ratios = []
        for iteration in range(1, cfg.orders + 1):
            seed = derive_seed(cfg.base_seed, spec.instance_id(), 3, iteration)
            order = random_order(election.num_candidates, seed)
            committee = run_rule("online-nash", election, order)
            ratios.append(math.exp(nash_welfare(election, committee) - optimum))
        instance_means.append(sum(ratios) / len(ratios))
        ratios_all.extend(ratios)
    mean_ratio = sum(ratios_all) / len(ratios_all)
    return NashTheoremReport(
        instance_means=tuple(instance_means),
        mean_ratio=mean_ratio,
        bound=bound,
        orders=cfg.orders,
        passed=mean_ratio >= bound,
    )
