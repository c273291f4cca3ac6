"""Name lookup helpers for presets and built-in models."""
from .fuzzy import (
    FuzzyMatch,
    SearchCandidate,
    build_search_candidates,
    fuzzy_search,
    resolve_alias,
    suggest_names,
)

__all__ = [
    "FuzzyMatch",
    "SearchCandidate",
    "build_search_candidates",
    "fuzzy_search",
    "resolve_alias",
    "suggest_names",
]
