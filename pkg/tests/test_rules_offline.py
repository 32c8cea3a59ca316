import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from streamelect import (
    Election,
    InstanceTooLargeError,
    bos,
    equal_shares_subset,
    mes,
    nash_optimum_bruteforce,
    nash_welfare,
    satisfaction,
    seeded_rng,
    utilitarian_topk,
)
from streamelect.rules_offline import PAY_EPS, _exact_rho

from conftest import random_approval_election, random_cardinal_election, showcase_election


class TestExactRho:
    def test_single_supporter(self):
        rho, payments = _exact_rho(np.array([1.5]), np.array([3.0]), np.array([0]))
        assert rho == pytest.approx(1.0 / 3.0)
        assert payments[0] == pytest.approx(1.0)

    def test_two_supporters_unsaturated(self):
        # min(1, 2 rho) + min(0.5, rho) = 1 solves at rho = 1/3.
        rho, payments = _exact_rho(
            np.array([1.0, 0.5]), np.array([2.0, 1.0]), np.array([0, 1])
        )
        assert rho == pytest.approx(1.0 / 3.0)
        assert payments[0] == pytest.approx(2.0 / 3.0)
        assert payments[1] == pytest.approx(1.0 / 3.0)

    def test_saturation_kicks_in(self):
        # Voter 1 saturates at 0.2, the rest falls on voter 0.
        rho, payments = _exact_rho(
            np.array([2.0, 0.2]), np.array([1.0, 1.0]), np.array([0, 1])
        )
        assert rho == pytest.approx(0.8)
        assert payments[0] == pytest.approx(0.8)
        assert payments[1] == pytest.approx(0.2)

    def test_exactly_affordable_at_full_budgets(self):
        rho, payments = _exact_rho(
            np.array([0.5, 0.5]), np.array([1.0, 1.0]), np.array([0, 1])
        )
        assert rho == pytest.approx(0.5)
        assert payments.sum() == pytest.approx(1.0)

    def test_full_budget_fallback_under_eps_shortfall(self):
        # Total budget 1 - 1e-10: everyone pays their whole budget.
        budgets = np.array([0.5, 0.5 - 1e-10])
        rho, payments = _exact_rho(budgets, np.array([1.0, 1.0]), np.array([0, 1]))
        assert rho == pytest.approx(0.5)
        assert payments[0] == pytest.approx(0.5)
        assert payments[1] == pytest.approx(0.5)


class TestMes:
    def test_showcase_committee(self, showcase):
        committee, trace = mes(showcase)
        assert committee.sorted_members() == (2, 3, 5)
        assert [(r.candidate, r.rho) for r in trace.rounds] == [
            (3, pytest.approx(1.0 / 3.0)),
            (2, pytest.approx(0.5)),
        ]
        assert trace.completion_added == (5,)
        assert trace.core_members() == frozenset({2, 3})

    def test_showcase_k2(self, showcase_k2):
        committee, trace = mes(showcase_k2)
        assert committee.sorted_members() == (2, 3)
        assert trace.completion_added == ()

    def test_payments_within_budgets(self):
        rng = seeded_rng(11)
        for _ in range(40):
            e = random_approval_election(rng)
            _, trace = mes(e)
            spent = np.zeros(e.num_voters)
            for rnd in trace.rounds:
                vector = np.asarray(rnd.payments)
                spent += vector
                assert vector.sum() == pytest.approx(1.0)
            assert np.all(spent <= e.committee_size / e.num_voters + PAY_EPS)

    def test_exact_committee_size(self):
        rng = seeded_rng(12)
        for _ in range(60):
            e = random_cardinal_election(rng)
            committee, _ = mes(e)
            assert len(committee.members) == e.committee_size

    def test_tie_breaks_to_smaller_index(self):
        # Two identical single-supporter candidates: same rho, pick index 0.
        e = Election.from_rows([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]], 2)
        _, trace = mes(e)
        assert trace.rounds[0].candidate == 0


class TestBos:
    def test_showcase_committee(self, showcase):
        committee, trace = bos(showcase)
        assert committee.sorted_members() == (2, 3, 5)
        # The third seat is filled in-round by overspending, not completion.
        assert [r.candidate for r in trace.rounds] == [3, 2, 5]
        assert trace.completion_added == ()

    def test_matches_mes_when_affordable(self):
        rng = seeded_rng(13)
        checked = 0
        for _ in range(1500):
            if checked >= 100:
                break
            e = random_approval_election(rng)
            m_committee, m_trace = mes(e)
            if m_trace.completion_added:
                continue
            b_committee, b_trace = bos(e)
            assert b_committee.members == m_committee.members
            assert [r.candidate for r in b_trace.rounds] == [
                r.candidate for r in m_trace.rounds
            ]
            checked += 1
        assert checked >= 100

    def test_engineered_exact_affordability(self):
        # Blocks of k/n-budget voters each exactly covering one candidate.
        for k, per in ((2, 3), (3, 4), (4, 2)):
            n = k * per
            m = k + 2
            matrix = np.zeros((n, m))
            for c in range(k):
                matrix[per * c : per * (c + 1), c] = 1.0
            e = Election(n, m, k, matrix)
            m_committee, m_trace = mes(e)
            b_committee, _ = bos(e)
            assert m_trace.completion_added == ()
            assert m_committee.members == b_committee.members == frozenset(range(k))

    def test_exact_committee_size(self):
        rng = seeded_rng(14)
        for _ in range(60):
            e = random_cardinal_election(rng)
            committee, _ = bos(e)
            assert len(committee.members) == e.committee_size


class TestUtilitarian:
    def test_showcase(self, showcase):
        assert utilitarian_topk(showcase).sorted_members() == (0, 3, 5)

    def test_showcase_k2(self, showcase_k2):
        assert utilitarian_topk(showcase_k2).sorted_members() == (3, 5)

    def test_tie_prefers_smaller_index(self):
        e = Election.from_rows([[1.0, 1.0, 1.0, 0.0]], 2)
        assert utilitarian_topk(e).sorted_members() == (0, 1)


class TestNash:
    def test_welfare_value(self, showcase):
        w = nash_welfare(showcase, frozenset({2, 3, 5}))
        assert w == pytest.approx(math.log(3.0) + math.log(7.0))

    def test_empty_committee_is_zero(self, showcase):
        assert nash_welfare(showcase, frozenset()) == 0.0

    def test_bruteforce_showcase(self, showcase):
        committee, value = nash_optimum_bruteforce(showcase)
        assert committee.sorted_members() == (2, 3, 5)
        assert value == pytest.approx(math.log(3.0) + math.log(7.0))

    def test_bruteforce_matches_enumeration(self):
        rng = seeded_rng(15)
        from itertools import combinations

        for _ in range(20):
            e = random_cardinal_election(rng, max_voters=5, max_candidates=7)
            best, value = nash_optimum_bruteforce(e)
            manual = max(
                (nash_welfare(e, frozenset(c)), tuple(c))
                for c in combinations(range(e.num_candidates), e.committee_size)
            )
            assert value == pytest.approx(manual[0])
            assert nash_welfare(e, best.members) == pytest.approx(manual[0])

    def test_tie_keeps_lexicographically_smallest(self):
        e = Election.from_rows([[1.0, 1.0, 1.0]], 2)
        committee, _ = nash_optimum_bruteforce(e)
        assert committee.sorted_members() == (0, 1)

    def test_enumeration_cap(self):
        matrix = np.ones((2, 60))
        e = Election(2, 60, 25, matrix)
        with pytest.raises(InstanceTooLargeError):
            nash_optimum_bruteforce(e)

    @given(seed=st.integers(0, 5_000))
    @settings(max_examples=40, deadline=None)
    def test_monotone_in_members(self, seed):
        rng = seeded_rng(seed)
        e = random_cardinal_election(rng)
        members = list(
            int(c)
            for c in rng.choice(e.num_candidates, size=e.committee_size, replace=False)
        )
        full = nash_welfare(e, frozenset(members))
        partial = nash_welfare(e, frozenset(members[:-1]))
        assert full >= partial - 1e-12


class TestSubsetRestriction:
    def test_dummy_ids_become_zero_columns(self, showcase):
        # Dummies (ids >= m) lose every comparison and land in completion.
        members, trace = equal_shares_subset(showcase, (3, 5, 6, 7))
        assert 3 in members
        assert len(members) == 3
        dummies = {6, 7} & members
        assert dummies == set(trace.completion_added) & {6, 7}

    def test_subset_of_winners_only(self, showcase):
        members, _ = equal_shares_subset(showcase, (0, 1, 2, 3))
        assert members <= {0, 1, 2, 3}
        assert len(members) == 3
