"""Parsing of participatory-budgeting ballot files and a native instance
format for cardinal elections.

The ballot files follow the established section layout: META, PROJECTS and
VOTES headers, semicolon-separated records with a column-header row per
section, and comma-separated approval lists in the `vote` column. Project
costs are parsed but ignored (the rules here have unit prices). Only
approval ballots are accepted.

The native format is line-oriented and value-exact under round-trips:

    n m k [B]
    order: i1 i2 ... im     (optional, 1-based candidate ids)
    u;u;...;u               (n rows of m utilities)
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .core import ArrivalOrder, Election


class ParseError(ValueError):
    """Malformed input file; the message names the offending line."""


@dataclass(frozen=True)
class PabulibInstance:
    """One parsed ballot file: metadata, project ids in file order, and the
    approval votes as an ordered (voter id -> approved project ids) map."""

    meta: dict
    projects: tuple
    votes: dict


SECTIONS = ("META", "PROJECTS", "VOTES")


def parse_pabulib(text):
    """Parse a ballot file into a PabulibInstance.

    Raises
    ------
    ParseError
        On a missing section, duplicate project or voter id, a vote naming
        an unknown project, a non-approval vote_type, or a count that
        contradicts the metadata. Messages carry the 1-based line number.
    """
    meta = {}
    projects = []
    project_set = set()
    votes = {}
    section = None
    header = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line in SECTIONS:
            section = line
            header = None
            continue
        if section is None:
            raise ParseError(f"line {lineno}: content before any section header")
        fields = [f.strip() for f in line.split(";")]
        if section == "META":
            if len(fields) < 2:
                raise ParseError(f"line {lineno}: META rows need key;value")
            if header is None and fields[0] == "key":
                header = fields
                continue
            meta[fields[0]] = fields[1]
        elif section == "PROJECTS":
            if header is None:
                header = fields
                if "project_id" not in header:
                    raise ParseError(f"line {lineno}: PROJECTS header lacks project_id")
                continue
            pid = fields[header.index("project_id")]
            if pid in project_set:
                raise ParseError(f"line {lineno}: duplicate project id {pid!r}")
            project_set.add(pid)
            projects.append(pid)
        else:
            if header is None:
                header = fields
                for needed in ("voter_id", "vote"):
                    if needed not in header:
                        raise ParseError(f"line {lineno}: VOTES header lacks {needed}")
                continue
            voter = fields[header.index("voter_id")]
            if voter in votes:
                raise ParseError(f"line {lineno}: duplicate voter id {voter!r}")
            raw_vote = fields[header.index("vote")]
            approved = tuple(v.strip() for v in raw_vote.split(",") if v.strip())
            for pid in approved:
                if pid not in project_set:
                    raise ParseError(f"line {lineno}: vote names unknown project {pid!r}")
            votes[voter] = approved
    for name in SECTIONS:
        if (name == "META" and not meta) or (name == "PROJECTS" and not projects) or (
            name == "VOTES" and not votes
        ):
            raise ParseError(f"missing or empty section {name}")
    vote_type = meta.get("vote_type", "approval")
    if vote_type != "approval":
        raise ParseError(f"unsupported vote_type {vote_type!r}; only approval ballots are handled")
    for key, count in (("num_projects", len(projects)), ("num_votes", len(votes))):
        if key not in meta:
            continue
        try:
            declared = int(meta[key])
        except ValueError:
            raise ParseError(f"meta {key}={meta[key]!r} is not an integer") from None
        if declared != count:
            raise ParseError(f"meta {key}={meta[key]} but file has {count}")
    return PabulibInstance(meta=meta, projects=tuple(projects), votes=votes)


def to_election(instance, k):
    """Approval election from a parsed ballot file: voters in file order,
    candidates in PROJECTS order, 0/1 utilities."""
    m = len(instance.projects)
    n = len(instance.votes)
    if not 2 <= k < m:
        raise ValueError(f"committee size must satisfy 2 <= k < m, got k={k}, m={m}")
    index = {pid: j for j, pid in enumerate(instance.projects)}
    matrix = np.zeros((n, m))
    for i, approved in enumerate(instance.votes.values()):
        for pid in approved:
            matrix[i, index[pid]] = 1.0
    return Election(n, m, k, matrix)


def divisor_committee_size(m, divisor):
    """Committee size for a divisor rule: max(2, floor(m/divisor)), clamped
    below m."""
    if m < 3:
        raise ValueError(f"need at least 3 candidates, got {m}")
    return min(max(2, m // divisor), m - 1)


def write_native(election, order=None):
    """Serialize an election (and optionally an arrival order) to the native
    text format; utilities use shortest round-trip decimal notation."""
    head = f"{election.num_voters} {election.num_candidates} {election.committee_size}"
    if election.score_cap is not None:
        head += f" {election.score_cap!r}"
    lines = [head]
    if order is not None:
        lines.append("order: " + " ".join(str(c + 1) for c in order.permutation))
    for row in election.utilities:
        lines.append(";".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def read_native(text):
    """Parse the native format.

    Returns
    -------
    (Election, ArrivalOrder or None)
    """
    lines = text.splitlines()
    entries = [(i, line.strip()) for i, line in enumerate(lines, start=1) if line.strip()]
    if not entries:
        raise ParseError("line 1: empty instance")
    lineno, head = entries[0]
    parts = head.split()
    if len(parts) not in (3, 4):
        raise ParseError(f"line {lineno}: header must be 'n m k [B]', got {head!r}")
    try:
        n, m, k = (int(p) for p in parts[:3])
        cap = float(parts[3]) if len(parts) == 4 else None
    except ValueError:
        raise ParseError(f"line {lineno}: malformed header {head!r}") from None
    body = entries[1:]
    order = None
    if body and body[0][1].startswith("order:"):
        lineno, order_line = body[0]
        try:
            perm = tuple(int(p) - 1 for p in order_line[len("order:"):].split())
            order = ArrivalOrder(perm)
        except ValueError as exc:
            raise ParseError(f"line {lineno}: bad order ({exc})") from None
        if len(order) != m:
            raise ParseError(f"line {lineno}: order lists {len(order)} of {m} candidates")
        body = body[1:]
    if len(body) != n:
        raise ParseError(f"expected {n} utility rows, found {len(body)}")
    matrix = np.zeros((n, m))
    for i, (lineno, line) in enumerate(body):
        fields = line.split(";")
        if len(fields) != m:
            raise ParseError(f"line {lineno}: expected {m} values, found {len(fields)}")
        try:
            matrix[i] = [float(f) for f in fields]
        except ValueError:
            raise ParseError(f"line {lineno}: malformed number") from None
    if np.any(matrix < 0):
        bad = int(np.nonzero((matrix < 0).any(axis=1))[0][0])
        raise ParseError(f"line {body[bad][0]}: negative utility")
    try:
        election = Election(n, m, k, matrix, score_cap=cap)
    except ValueError as exc:
        raise ParseError(f"line {entries[0][0]}: {exc}") from None
    return election, order


def bundled_ballot_files():
    """Names and texts of the ballot files shipped with the package, sorted
    by name."""
    package = resources.files(__package__) / "data"
    out = []
    for entry in sorted(package.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".pb"):
            out.append((entry.name, entry.read_text(encoding="utf-8")))
    return out
