"""Fuzzy search module for matching preset and model names."""
from dataclasses import dataclass
from typing import Optional

from rapidfuzz import fuzz


@dataclass
class SearchCandidate:
    """A single searchable name entry."""

    name: str
    target: str
    source: str  # "preset" or "model"


@dataclass
class FuzzyMatch:
    """A fuzzy search result."""

    target: str
    similarity_score: float
    matched_on: str
    source: str


def build_search_candidates(names, source, aliases=None):
    """Build a flat list of searchable name candidates.

    Args:
        names: Canonical names (preset or model identifiers)
        source: Label for where the names come from
        aliases: Optional dict of alias -> canonical name
    """
    candidates = [SearchCandidate(name=name, target=name, source=source) for name in names]

    known = set(names)
    for alias, target in (aliases or {}).items():
        # Aliases pointing at unknown names would suggest something unusable
        if target in known:
            candidates.append(SearchCandidate(name=alias, target=target, source=source))

    return candidates


def fuzzy_search(query, candidates, limit=3, threshold=60):
    """Score each candidate against query using multiple fuzzy strategies.

    Returns results deduplicated by target, sorted by score descending.

    Args:
        query: Search string
        candidates: List of SearchCandidate
        limit: Max results to return
        threshold: Minimum score to include (0-100)
    """
    query_lower = query.lower()
    best_by_target: dict[str, tuple[FuzzyMatch, float]] = {}

    for candidate in candidates:
        name_lower = candidate.name.lower()

        direct_ratio = fuzz.ratio(query_lower, name_lower)
        score = max(
            direct_ratio,
            fuzz.partial_ratio(query_lower, name_lower),
            fuzz.token_set_ratio(query_lower, name_lower),
        )
        if score < threshold:
            continue

        match = FuzzyMatch(
            target=candidate.target,
            similarity_score=round(score, 1),
            matched_on=candidate.name,
            source=candidate.source,
        )
        existing = best_by_target.get(candidate.target)
        # On tie, prefer higher direct_ratio (more specific match)
        if (
            existing is None
            or match.similarity_score > existing[0].similarity_score
            or (match.similarity_score == existing[0].similarity_score and direct_ratio > existing[1])
        ):
            best_by_target[candidate.target] = (match, direct_ratio)

    ranked = sorted(
        best_by_target.values(),
        key=lambda pair: (-pair[0].similarity_score, -pair[1], pair[0].target),
    )
    return [match for match, _ in ranked[:limit]]


def suggest_names(query, names, source="preset", aliases=None, limit=3) -> list[str]:
    """Return up to ``limit`` canonical names resembling ``query``."""
    candidates = build_search_candidates(list(names), source, aliases)
    return [match.target for match in fuzzy_search(query, candidates, limit=limit)]


def resolve_alias(query, aliases) -> Optional[str]:
    """Return the canonical name for an exact (case-insensitive) alias, if any."""
    lowered = {alias.lower(): target for alias, target in aliases.items()}
    return lowered.get(query.lower())
