"""Ballot file parsing, the native format, and the bundled data."""

import numpy as np
import pytest

from streamelect import (
    ArrivalOrder,
    Election,
    ParseError,
    bundled_ballot_files,
    divisor_committee_size,
    parse_pabulib,
    read_native,
    to_election,
    write_native,
)

MINIMAL = """META
key;value
description;tiny
vote_type;approval
PROJECTS
project_id;cost
p1;100
p2;100
p3;100
VOTES
voter_id;vote
v1;p1,p2
v2;p3
"""


class TestParsePabulib:
    def test_minimal_file(self):
        instance = parse_pabulib(MINIMAL)
        assert instance.meta["description"] == "tiny"
        assert instance.projects == ("p1", "p2", "p3")
        assert instance.votes == {"v1": ("p1", "p2"), "v2": ("p3",)}

    def test_vote_type_defaults_to_approval(self):
        text = MINIMAL.replace("vote_type;approval\n", "")
        assert parse_pabulib(text).projects == ("p1", "p2", "p3")

    def test_content_before_section(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_pabulib("key;value\n" + MINIMAL)

    def test_duplicate_project(self):
        text = MINIMAL.replace("p2;100", "p1;100")
        with pytest.raises(ParseError, match="line 8.*duplicate project"):
            parse_pabulib(text)

    def test_duplicate_voter(self):
        text = MINIMAL.replace("v2;p3", "v1;p3")
        with pytest.raises(ParseError, match="line 13.*duplicate voter"):
            parse_pabulib(text)

    def test_unknown_project_in_vote(self):
        text = MINIMAL.replace("v2;p3", "v2;p9")
        with pytest.raises(ParseError, match="line 13.*unknown project 'p9'"):
            parse_pabulib(text)

    def test_missing_section(self):
        text = MINIMAL[: MINIMAL.index("VOTES")]
        with pytest.raises(ParseError, match="missing or empty section VOTES"):
            parse_pabulib(text)

    def test_non_approval_rejected(self):
        text = MINIMAL.replace("vote_type;approval", "vote_type;ordinal")
        with pytest.raises(ParseError, match="vote_type 'ordinal'"):
            parse_pabulib(text)

    def test_count_mismatch(self):
        text = MINIMAL.replace("description;tiny", "num_projects;7")
        with pytest.raises(ParseError, match="num_projects=7 but file has 3"):
            parse_pabulib(text)

    def test_count_not_integer(self):
        text = MINIMAL.replace("description;tiny", "num_votes;lots")
        with pytest.raises(ParseError, match="num_votes='lots' is not an integer"):
            parse_pabulib(text)

    def test_projects_header_needs_id(self):
        text = MINIMAL.replace("project_id;cost", "name;cost")
        with pytest.raises(ParseError, match="line 6.*project_id"):
            parse_pabulib(text)


class TestToElection:
    def test_matrix_layout(self):
        e = to_election(parse_pabulib(MINIMAL), 2)
        assert (e.num_voters, e.num_candidates, e.committee_size) == (2, 3, 2)
        assert np.array_equal(e.utilities, [[1, 1, 0], [0, 0, 1]])

    @pytest.mark.parametrize("k", [1, 3])
    def test_committee_bounds(self, k):
        with pytest.raises(ValueError):
            to_election(parse_pabulib(MINIMAL), k)


class TestDivisorCommitteeSize:
    def test_values(self):
        assert divisor_committee_size(24, 20) == 2
        assert divisor_committee_size(24, 4) == 6
        assert divisor_committee_size(40, 4) == 10
        assert divisor_committee_size(3, 1) == 2
        assert divisor_committee_size(100, 1) == 99

    def test_too_few_candidates(self):
        with pytest.raises(ValueError):
            divisor_committee_size(2, 4)


class TestNativeFormat:
    def test_roundtrip_with_cap_and_order(self):
        e = Election.from_rows(
            [[0.25, 1.5, 0.0], [3.125, 0.0, 2.0]], 2, score_cap=3.5
        )
        order = ArrivalOrder((2, 0, 1))
        text = write_native(e, order)
        back, back_order = read_native(text)
        assert np.array_equal(back.utilities, e.utilities)
        assert back.committee_size == 2
        assert back.score_cap == 3.5
        assert back_order == order

    def test_roundtrip_without_extras(self, showcase):
        text = write_native(showcase)
        back, order = read_native(text)
        assert np.array_equal(back.utilities, showcase.utilities)
        assert back.score_cap is None
        assert order is None

    def test_order_is_one_based_in_file(self):
        e, order = read_native("2 3 2\norder: 2 1 3\n1;0;0\n0;1;1\n")
        assert order.permutation == (1, 0, 2)
        assert "order: 3 1 2" in write_native(e, ArrivalOrder((2, 0, 1)))

    @pytest.mark.parametrize(
        "text, match",
        [
            ("", "empty instance"),
            ("1 2\n1;1\n", "header must be"),
            ("a b c\n1;1\n", "malformed header"),
            ("2 3 2\norder: 1 2\n1;0;0\n0;1;1\n", "order lists 2 of 3"),
            ("2 3 2\norder: 1 x 3\n1;0;0\n0;1;1\n", "bad order"),
            ("2 3 2\n1;0;0\n", "expected 2 utility rows, found 1"),
            ("2 3 2\n1;0\n0;1;1\n", "line 2: expected 3 values, found 2"),
            ("2 3 2\n1;0;zap\n0;1;1\n", "line 2: malformed number"),
            ("2 3 2\n1;0;0\n0;-1;1\n", "line 3: negative utility"),
            ("2 3 3\n1;0;0\n0;1;1\n", "line 1"),
        ],
    )
    def test_parse_errors(self, text, match):
        with pytest.raises(ParseError, match=match):
            read_native(text)

    def test_blank_lines_ignored(self):
        e, _ = read_native("\n2 3 2\n\n1;0;0\n\n0;1;1\n\n")
        assert e.num_voters == 2


class TestBundledBallots:
    DIMENSIONS = {
        "hillcrest-2025.pb": (90, 20),
        "lakeview-2023.pb": (150, 40),
        "midtown-2024.pb": (75, 30),
        "riverside-2024.pb": (120, 24),
    }

    def test_four_files_sorted(self):
        names = [name for name, _ in bundled_ballot_files()]
        assert names == sorted(self.DIMENSIONS)

    def test_dimensions(self):
        for name, text in bundled_ballot_files():
            instance = parse_pabulib(text)
            votes, projects = self.DIMENSIONS[name]
            assert len(instance.votes) == votes
            assert len(instance.projects) == projects
            assert instance.meta["vote_type"] == "approval"

    def test_usable_at_divisor_sizes(self):
        for name, text in bundled_ballot_files():
            instance = parse_pabulib(text)
            m = len(instance.projects)
            for divisor in (20, 4):
                e = to_election(instance, divisor_committee_size(m, divisor))
                assert 2 <= e.committee_size < m
                assert set(np.unique(e.utilities)) <= {0.0, 1.0}
