"""The four streaming committee rules.

Each rule consumes the arrival stream of an election, decides hire or reject
irrevocably at every position, and returns a Committee whose audit holds one
Decision per arrival position. A shared safeguard guarantees exactly k
members: whenever the number of remaining arrivals equals the number of open
seats, everyone still in the stream is hired.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Committee, Decision, stream
from .rules_offline import (
    PAY_EPS,
    _exact_rho,
    bounded_overspending_subset,
    equal_shares_subset,
)


@dataclass(frozen=True)
class OnlineRuleConfig:
    """Configuration of an online rule run.

    `exploration` is the exploration-phase length t of the displacement rules
    (None means the default floor(m/e), the length that maximizes the hiring
    probability of each reference winner). It must stay below m.
    """

    rule: str = "online-mes"
    exploration: int | None = None

    def resolve_exploration(self, num_candidates):
        t = self.exploration
        if t is None:
            t = int(num_candidates / math.e)
        if not 0 <= t < num_candidates:
            raise ValueError(
                f"exploration length must lie in [0, m), got t={t} for m={num_candidates}"
            )
        return t


@dataclass
class RunningSample:
    """State of a displacement rule: trusted reference set, current sample,
    and hires so far. The sample always has exactly |reference| members and
    hired candidates never re-enter it."""

    reference: frozenset
    running: set
    hired: list

    def displace(self, incoming, outgoing):
        self.running.remove(outgoing)
        self.running.add(incoming)

    def snapshot(self):
        return tuple(sorted(self.running))


def greedy_budgeting(election, order):
    """Pay-as-you-go hiring against equal voter budgets.

    Every voter starts with k/n. An arriving candidate is hired if its
    supporters (positive utility) jointly hold at least the unit price, which
    they then pay with the equal-or-all split: each supporter pays
    min(b_i, lam) for the lam solving sum min(b_i, lam) = 1. Otherwise the
    candidate is rejected.

    Returns
    -------
    Committee with one Decision per arrival.
    """
    n = election.num_voters
    m = election.num_candidates
    k = election.committee_size
    budgets = np.full(n, k / n)
    members = []
    audit = []
    in_safeguard = False
    for position, c, column in stream(election, order):
        if len(members) == k:
            audit.append(Decision(position, c, False, "committee-full"))
            continue
        if in_safeguard or m - position + 1 == k - len(members):
            in_safeguard = True
            members.append(c)
            audit.append(Decision(position, c, True, "safeguard"))
            continue
        supporters = np.nonzero(column > 0.0)[0]
        total = float(budgets[supporters].sum()) if supporters.size else 0.0
        if total >= 1.0 - PAY_EPS:
            _, payments = _exact_rho(budgets, np.ones(n), supporters)
            budgets -= payments
            np.maximum(budgets, 0.0, out=budgets)
            members.append(c)
            audit.append(
                Decision(
                    position,
                    c,
                    True,
                    "affordable",
                    payments=tuple((int(i), float(payments[i])) for i in supporters),
                )
            )
        else:
            audit.append(Decision(position, c, False, "insufficient-budget"))
    return Committee(frozenset(members), tuple(audit))


def _displacement_rule(election, order, config, subset_rule):
    """Exploration-then-displacement scheme shared by the equal-shares and
    bounded-overspending online rules.

    The first t arrivals are observed only; the subset rule on them (padded
    with zero-utility dummies when t < k) yields the reference committee.
    Afterwards a running sample of k candidates is maintained: for each
    arrival c, the subset rule on sample + c excludes exactly one candidate.
    If c itself is excluded it is rejected and nothing changes. Otherwise c
    takes the excluded candidate's slot in the sample, and is hired exactly
    when the displaced candidate still belonged to the reference committee.
    """
    m = election.num_candidates
    k = election.committee_size
    t = config.resolve_exploration(m)
    arrivals = order.permutation
    dummies = tuple(range(m, m + max(0, k - t)))
    members = []
    audit = []
    state = None
    in_safeguard = False
    for position, c, _column in stream(election, order):
        snap = state.snapshot() if state is not None else None
        if len(members) == k:
            audit.append(Decision(position, c, False, "committee-full", sample=snap))
            continue
        if in_safeguard or m - position + 1 == k - len(members):
            in_safeguard = True
            members.append(c)
            audit.append(Decision(position, c, True, "safeguard", sample=snap))
            continue
        if position <= t:
            audit.append(Decision(position, c, False, "exploration"))
            continue
        if state is None:
            reference, _ = subset_rule(election, arrivals[:t] + dummies)
            state = RunningSample(frozenset(reference), set(reference), members)
        winners, _ = subset_rule(election, tuple(state.running) + (c,))
        (excluded,) = (state.running | {c}) - winners
        if excluded == c:
            audit.append(Decision(position, c, False, "self-excluded", sample=state.snapshot()))
            continue
        hired = excluded in state.reference
        if hired:
            members.append(c)
            reason = "displaced-reference"
        else:
            reason = "displaced-running"
        state.displace(c, excluded)
        audit.append(Decision(position, c, hired, reason, sample=state.snapshot()))
    return Committee(frozenset(members), tuple(audit))


def online_mes(election, order, config=None):
    """Online method of equal shares: displacement against an equal-shares
    reference committee built from the exploration phase."""
    config = config or OnlineRuleConfig(rule="online-mes")
    return _displacement_rule(election, order, config, equal_shares_subset)


def online_bos(election, order, config=None):
    """Online bounded overspending: the displacement scheme with the
    overspending-capable subroutine for both reference and comparisons."""
    config = config or OnlineRuleConfig(rule="online-bos")
    return _displacement_rule(election, order, config, bounded_overspending_subset)


def online_nash(election, order):
    """One hire per near-equal contiguous segment, by Nash-welfare gain.

    The stream is split into k contiguous segments with sizes as equal as
    possible (the first m mod k segments get the extra candidate). In each
    segment, the first floor(size/e) arrivals are observed to set a threshold
    of max Nash welfare of already-picked plus candidate; the first later
    candidate reaching the threshold is hired, or failing that, the last
    candidate of the segment.
    """
    n = election.num_voters
    m = election.num_candidates
    k = election.committee_size
    if m < k:
        raise ValueError(f"cannot split {m} candidates into {k} segments")
    base, extra = divmod(m, k)
    sizes = [base + 1] * extra + [base] * (k - extra)
    members = []
    audit = []
    picked_sat = np.zeros(n)
    start = 0
    for size in sizes:
        observe = int(size / math.e)
        threshold = -math.inf
        picked = None
        for j in range(size):
            position = start + j + 1
            c = order.permutation[start + j]
            gain = float(np.log1p(picked_sat + election.utilities[:, c]).sum())
            if j < observe:
                threshold = max(threshold, gain)
                audit.append(Decision(position, c, False, "observation"))
            elif picked is not None:
                audit.append(Decision(position, c, False, "segment-filled"))
            elif gain >= threshold:
                picked = c
                audit.append(Decision(position, c, True, "above-threshold"))
            elif j == size - 1:
                picked = c
                audit.append(Decision(position, c, True, "segment-fallback"))
            else:
                audit.append(Decision(position, c, False, "below-threshold"))
        members.append(picked)
        picked_sat += election.utilities[:, picked]
        start += size
    return Committee(frozenset(members), tuple(audit))


def run_rule(rule_id, election, order, config=None):
    """Dispatch an online rule by id: greedy, online-mes, online-bos, online-nash."""
    if rule_id == "greedy":
        return greedy_budgeting(election, order)
    if rule_id == "online-mes":
        return online_mes(election, order, config)
    if rule_id == "online-bos":
        return online_bos(election, order, config)
    if rule_id == "online-nash":
        return online_nash(election, order)
    raise ValueError(f"unknown online rule: {rule_id!r}")


ONLINE_RULE_IDS = ("greedy", "online-mes", "online-bos", "online-nash")
