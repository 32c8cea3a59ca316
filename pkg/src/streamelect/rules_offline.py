"""Offline committee rules: equal shares, bounded overspending, utilitarian
top-k, and the exact Nash-welfare optimum.

These serve both as baselines and as subroutines of the online rules. All
rules share the budget convention of one unit of price per candidate and an
initial budget of k/n per voter.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import Committee, Election, InstanceTooLargeError, satisfaction

# Affordability slack: budgets accumulate float dust through repeated
# charges, so a supporter pool whose exact total should be 1 may show
# marginally less.
PAY_EPS = 1e-9

ENUMERATION_CAP = 10_000_000


@dataclass(frozen=True)
class BudgetState:
    """Per-voter budgets under the shared price-1 convention."""

    budgets: tuple
    price: float = 1.0

    @classmethod
    def initial(cls, num_voters, committee_size):
        return cls((committee_size / num_voters,) * num_voters)


@dataclass(frozen=True)
class MesRound:
    """One purchase: elected candidate, its payment rate, per-voter payments."""

    candidate: int
    rho: float
    payments: tuple


@dataclass(frozen=True)
class MesTrace:
    """Audit of an equal-shares style run.

    `rounds` lists purchases in election order; `completion_added` lists the
    candidates appended afterwards by utilitarian completion. The core
    committee (the part with proportionality guarantees) is exactly the
    candidates of `rounds`.
    """

    rounds: tuple
    completion_added: tuple

    def core_members(self):
        return frozenset(r.candidate for r in self.rounds)


def _exact_rho(budgets, column, supporters):
    """Smallest rho with sum_i min(b_i, rho * u_i) = 1, solved segment-wise.

    Supporters are walked in increasing b_i/u_i order; within a segment the
    payment sum is linear in rho, so the equation is solved in closed form.
    Assumes the supporters' total budget covers the price up to PAY_EPS.
    Returns (rho, payments over all voters).
    """
    order = sorted(supporters, key=lambda i: budgets[i] / column[i])
    paid = 0.0
    util_rest = float(column[order].sum()) if len(order) else 0.0
    rho = None
    for i in order:
        candidate_rho = (1.0 - paid) / util_rest
        if candidate_rho * column[i] <= budgets[i]:
            rho = candidate_rho
            break
        paid += budgets[i]
        util_rest -= column[i]
    if rho is None:
        # Total budget is within PAY_EPS below 1: everyone pays their all.
        rho = max(budgets[i] / column[i] for i in order)
    payments = np.zeros(len(budgets))
    payments[supporters] = np.minimum(budgets[supporters], rho * column[supporters])
    return rho, payments


def _equal_shares_engine(utilities, k, overspend):
    """Round loop shared by mes and bos on an arbitrary utility matrix.

    Candidates are electable while affordable (their supporters can jointly
    cover the unit price); with `overspend`, a candidate whose supporters
    cannot cover the price may still be bought by those supporters emptying
    their budgets, ranked by scaled rate (max_i b_i/u_i) / (total budget).
    Affordable candidates always take precedence over overspending ones, and
    ties break toward the smaller column index, so the run coincides with
    plain equal shares whenever every selected candidate is affordable.

    Returns (rounds, completion) where completion fills up to k members by
    descending column sum, ties toward the smaller index.
    """
    n, m = utilities.shape
    budgets = np.full(n, k / n)
    rounds = []
    elected = set()
    while len(elected) < k:
        best = None  # (tier, rate, candidate, payments)
        for c in range(m):
            if c in elected:
                continue
            column = utilities[:, c]
            supporters = np.nonzero(column > 0.0)[0]
            if supporters.size == 0:
                continue
            total = float(budgets[supporters].sum())
            if total >= 1.0 - PAY_EPS:
                rho, payments = _exact_rho(budgets, column, supporters)
                key = (0, rho)
            elif overspend and total > 0.0:
                rho = float((budgets[supporters] / column[supporters]).max()) / total
                payments = np.zeros(n)
                payments[supporters] = budgets[supporters]
                key = (1, rho)
            else:
                continue
            if best is None or key < best[0]:
                best = (key, c, payments)
        if best is None:
            break
        (_, rate), c, payments = best
        budgets -= payments
        np.maximum(budgets, 0.0, out=budgets)
        elected.add(c)
        rounds.append(MesRound(c, rate, tuple(payments)))
    remaining = [c for c in range(m) if c not in elected]
    remaining.sort(key=lambda c: (-utilities[:, c].sum(), c))
    completion = tuple(remaining[: k - len(elected)])
    return tuple(rounds), completion


def equal_shares_subset(election, candidates):
    """Run the equal-shares engine on a candidate subset of an election.

    `candidates` are original indices plus optional dummy sentinels: any id
    at or beyond num_candidates stands for a zero-utility dummy. Columns are
    arranged in ascending id order so index tie-breaking matches the full
    election and dummies (largest ids, zero total utility) can only enter via
    completion, after every real candidate. Returns (members, trace) in the
    caller's id space.
    """
    return _subset_run(election, candidates, overspend=False)


def bounded_overspending_subset(election, candidates):
    """As equal_shares_subset, with the bounded-overspending engine."""
    return _subset_run(election, candidates, overspend=True)


def _subset_run(election, candidates, overspend):
    cols = sorted(candidates)
    m = election.num_candidates
    matrix = np.column_stack(
        [
            election.utilities[:, c] if c < m else np.zeros(election.num_voters)
            for c in cols
        ]
    )
    rounds, completion = _equal_shares_engine(matrix, election.committee_size, overspend)
    members = frozenset(cols[r.candidate] for r in rounds) | {cols[j] for j in completion}
    trace = MesTrace(
        tuple(MesRound(cols[r.candidate], r.rho, r.payments) for r in rounds),
        tuple(cols[j] for j in completion),
    )
    return members, trace


def mes(election):
    """Method of equal shares with utilitarian completion.

    Voters start with k/n budget; a candidate c is rho-affordable when
    sum_i min(b_i, rho * u_i(c)) >= 1. Each round elects the unelected
    candidate with the smallest such rho (ties toward the smaller index) and
    charges each voter min(b_i, rho * u_i(c)). When nothing is affordable,
    utilitarian completion adds candidates by descending total utility (ties
    toward the smaller index) until k members are chosen.

    Returns
    -------
    (Committee, MesTrace)
    """
    rounds, completion = _equal_shares_engine(election.utilities, election.committee_size, False)
    members = frozenset(r.candidate for r in rounds) | set(completion)
    trace = MesTrace(rounds, completion)
    return Committee(members, audit=(trace,)), trace


def bos(election):
    """Equal shares with bounded overspending, utilitarian completion.

    Rounds where some candidate is exactly affordable behave like `mes`.
    When no candidate is affordable, the supporters of the candidate with the
    best scaled rate empty their remaining budgets to buy it (overspending:
    the shortfall between their total budget and the unit price is waived).
    Coincides with `mes` on every instance where each round's selected
    candidate is exactly affordable.

    Returns
    -------
    (Committee, MesTrace)
    """
    rounds, completion = _equal_shares_engine(election.utilities, election.committee_size, True)
    members = frozenset(r.candidate for r in rounds) | set(completion)
    trace = MesTrace(rounds, completion)
    return Committee(members, audit=(trace,)), trace


def utilitarian_topk(election):
    """The k candidates with the largest total utility, ties by smaller index."""
    sums = election.utilities.sum(axis=0)
    ranked = sorted(range(election.num_candidates), key=lambda c: (-sums[c], c))
    return Committee(frozenset(ranked[: election.committee_size]))


def nash_welfare(election, committee):
    """Nash welfare of a committee: sum_i log(1 + u_i(W)), natural log."""
    sat = satisfaction(election, committee).as_array()
    return float(np.log1p(sat).sum())


def nash_optimum_bruteforce(election, cap=ENUMERATION_CAP):
    """Exhaustive Nash-welfare maximizer over all size-k committees.

    Enumeration is lexicographic over index combinations and ties keep the
    lexicographically smallest member set. Instances with more than `cap`
    combinations are rejected.

    Returns
    -------
    (Committee, float)
    """
    m, k = election.num_candidates, election.committee_size
    total = math.comb(m, k)
    if total > cap:
        raise InstanceTooLargeError(
            f"C({m},{k}) = {total} committees exceeds the enumeration cap of {cap}"
        )
    utilities = election.utilities
    best_val = -1.0
    best_combo = None
    combos = itertools.combinations(range(m), k)
    while True:
        chunk = list(itertools.islice(combos, 4096))
        if not chunk:
            break
        idx = np.asarray(chunk)
        sats = utilities[:, idx].sum(axis=2)
        vals = np.log1p(sats).sum(axis=0)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val = float(vals[j])
            best_combo = chunk[j]
    return Committee(frozenset(best_combo)), best_val
