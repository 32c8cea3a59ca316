import math

import numpy as np
import pytest

from streamelect import (
    ArrivalOrder,
    Election,
    OnlineRuleConfig,
    greedy_budgeting,
    online_bos,
    online_mes,
    online_nash,
    random_order,
    run_rule,
    seeded_rng,
)
from streamelect.rules_online import ONLINE_RULE_IDS

from conftest import random_approval_election, random_cardinal_election, showcase_election

IDENTITY6 = ArrivalOrder.identity(6)


class TestConfig:
    def test_default_exploration_is_m_over_e(self):
        cfg = OnlineRuleConfig(rule="online-mes")
        assert cfg.resolve_exploration(6) == 2
        assert cfg.resolve_exploration(40) == int(40 / math.e)

    def test_explicit_exploration(self):
        cfg = OnlineRuleConfig(rule="online-mes", exploration=4)
        assert cfg.resolve_exploration(10) == 4

    def test_exploration_bounds(self):
        with pytest.raises(ValueError):
            OnlineRuleConfig(rule="online-mes", exploration=-1).resolve_exploration(10)
        with pytest.raises(ValueError):
            OnlineRuleConfig(rule="online-mes", exploration=10).resolve_exploration(10)

    def test_unknown_rule(self):
        with pytest.raises(ValueError):
            run_rule("offline-mes", showcase_election(), IDENTITY6)


class TestGreedy:
    def test_showcase_k2(self, showcase_k2):
        committee = greedy_budgeting(showcase_k2, IDENTITY6)
        assert committee.sorted_members() == (0, 1)

    def test_showcase_k3(self, showcase):
        committee = greedy_budgeting(showcase, IDENTITY6)
        assert committee.sorted_members() == (0, 1, 5)
        reasons = [d.reason for d in committee.audit]
        assert reasons[:2] == ["affordable", "affordable"]
        assert reasons[-1] == "safeguard"

    def test_audit_covers_every_position(self, showcase):
        committee = greedy_budgeting(showcase, IDENTITY6)
        assert [d.position for d in committee.audit] == [1, 2, 3, 4, 5, 6]

    def test_payment_totals(self, showcase):
        committee = greedy_budgeting(showcase, IDENTITY6)
        for decision in committee.audit:
            if decision.reason == "affordable":
                total = sum(amount for _, amount in decision.payments)
                assert total == pytest.approx(1.0)

    def test_total_spend_bounded_by_k(self):
        rng = seeded_rng(21)
        for _ in range(50):
            e = random_approval_election(rng)
            order = random_order(e.num_candidates, int(rng.integers(0, 10_000)))
            committee = greedy_budgeting(e, order)
            spent = sum(
                amount
                for d in committee.audit
                if d.payments
                for _, amount in d.payments
            )
            assert spent <= e.committee_size + 1e-9

    def test_zero_supporter_candidate_skipped(self):
        e = Election.from_rows([[0.0, 1.0, 1.0], [0.0, 1.0, 1.0]], 2)
        committee = greedy_budgeting(e, ArrivalOrder.identity(3))
        assert committee.audit[0].reason == "insufficient-budget"
        assert committee.sorted_members() == (1, 2)


class TestDisplacement:
    def test_online_mes_showcase_k2(self, showcase_k2):
        committee = online_mes(showcase_k2, IDENTITY6)
        assert committee.sorted_members() == (2, 3)

    def test_online_mes_showcase_k3(self, showcase):
        committee = online_mes(showcase, IDENTITY6)
        assert committee.sorted_members() == (2, 3, 5)

    def test_online_bos_showcase_k3(self, showcase):
        committee = online_bos(showcase, IDENTITY6)
        assert committee.sorted_members() == (2, 3, 5)

    def test_exploration_positions_never_hire(self, showcase):
        committee = online_mes(showcase, IDENTITY6)
        for decision in committee.audit[:2]:
            assert decision.reason == "exploration"
            assert not decision.hired

    def test_self_excluded_keeps_running_sample(self, showcase):
        committee = online_mes(showcase, IDENTITY6)
        by_position = {d.position: d for d in committee.audit}
        skip = by_position[5]
        assert skip.reason == "self-excluded"
        assert not skip.hired
        assert skip.sample == by_position[4].sample

    def test_running_sample_size_is_k(self, showcase):
        committee = online_mes(showcase, IDENTITY6)
        for decision in committee.audit:
            if decision.sample is not None:
                assert len(decision.sample) == showcase.committee_size

    def test_zero_exploration_allowed(self, showcase):
        cfg = OnlineRuleConfig(rule="online-mes", exploration=0)
        committee = online_mes(showcase, IDENTITY6, cfg)
        assert len(committee.members) == 3

    def test_max_exploration_fills_by_safeguard(self, showcase):
        cfg = OnlineRuleConfig(rule="online-mes", exploration=3)
        committee = online_mes(showcase, IDENTITY6, cfg)
        assert committee.sorted_members() == (3, 4, 5)
        assert {d.reason for d in committee.audit[3:]} == {"safeguard"}

    def test_dummy_reference_when_exploration_below_k(self):
        # m=10 gives t=3 < k=4: the reference is padded with dummy ids.
        rng = seeded_rng(22)
        matrix = (rng.random((6, 10)) < 0.5).astype(float)
        matrix[:, 0] = 1.0
        e = Election(6, 10, 4, matrix)
        committee = online_mes(e, ArrivalOrder.identity(10))
        assert len(committee.members) == 4

    def test_rejected_arrival_still_updates_sample(self, showcase):
        committee = online_mes(showcase, IDENTITY6)
        by_position = {d.position: d for d in committee.audit}
        # Position 4 hires by displacing a reference member; position 5 is
        # self-excluded. Samples reflect both outcomes.
        assert by_position[4].hired
        assert 3 in by_position[4].sample


class TestOnlineNash:
    def test_showcase_k2(self, showcase_k2):
        committee = online_nash(showcase_k2, IDENTITY6)
        assert committee.sorted_members() == (2, 5)

    def test_showcase_k3(self, showcase):
        committee = online_nash(showcase, IDENTITY6)
        assert committee.sorted_members() == (0, 2, 4)

    def test_segment_reasons(self, showcase):
        committee = online_nash(showcase, IDENTITY6)
        reasons = [d.reason for d in committee.audit]
        assert reasons == [
            "above-threshold",
            "segment-filled",
            "above-threshold",
            "segment-filled",
            "above-threshold",
            "segment-filled",
        ]

    def test_segment_sizes_cover_all_positions(self):
        # m=14, k=4: segments 4,4,3,3 (first m mod k segments one longer).
        rng = seeded_rng(23)
        matrix = np.round(rng.random((5, 14)) * 5.0, 3)
        e = Election(5, 14, 4, matrix)
        committee = online_nash(e, ArrivalOrder.identity(14))
        assert len(committee.audit) == 14
        assert len(committee.members) == 4

    def test_observation_phase_rejects(self):
        # m=9, k=2: segments of 5 and 4, observation int(5/e)=1, int(4/e)=1.
        rng = seeded_rng(24)
        matrix = np.round(rng.random((4, 9)) * 5.0, 3)
        e = Election(4, 9, 2, matrix)
        committee = online_nash(e, ArrivalOrder.identity(9))
        reasons = [d.reason for d in committee.audit]
        assert reasons[0] == "observation"
        assert len(committee.members) == 2


class TestFeasibilityEverywhere:
    @pytest.mark.parametrize("rule", ONLINE_RULE_IDS)
    def test_exactly_k_members(self, rule):
        rng = seeded_rng(25)
        for _ in range(40):
            e = random_cardinal_election(rng)
            order = random_order(e.num_candidates, int(rng.integers(0, 10_000)))
            committee = run_rule(rule, e, order)
            assert len(committee.members) == e.committee_size
            assert len(committee.audit) == e.num_candidates

    @pytest.mark.parametrize("rule", ONLINE_RULE_IDS)
    def test_members_match_hire_decisions(self, rule):
        rng = seeded_rng(26)
        for _ in range(20):
            e = random_approval_election(rng)
            order = random_order(e.num_candidates, int(rng.integers(0, 10_000)))
            committee = run_rule(rule, e, order)
            hired = {d.candidate for d in committee.audit if d.hired}
            assert hired == committee.members
