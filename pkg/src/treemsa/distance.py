"""Exact string distances.

Levenshtein distance is computed by rapidfuzz (unit costs, exact); the
batch helpers return int64 numpy arrays so callers can argmax/compare
without Python loops.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from rapidfuzz import process
from rapidfuzz.distance import Levenshtein

from .seq_io import GAP


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance between two ungapped strings."""
    if len(b) < len(a):
        a, b = b, a
    return Levenshtein.distance(a, b)


def distances_from(query: str, targets: Sequence[str]) -> np.ndarray:
    """Levenshtein distance from ``query`` to every string in ``targets``."""
    if not len(targets):
        return np.zeros(0, dtype=np.int64)
    out = process.cdist([query], targets, scorer=Levenshtein.distance, dtype=np.int32)
    return out[0].astype(np.int64)


def distance_matrix(strings: Sequence[str]) -> np.ndarray:
    """Full symmetric Levenshtein matrix."""
    out = process.cdist(strings, strings, scorer=Levenshtein.distance, dtype=np.int32)
    return out.astype(np.int64)


def hamming_aligned(a: str | np.ndarray, b: str | np.ndarray) -> int:
    """Count differing columns of two aligned rows.

    Gap against gap is a match; gap against residue is a difference.
    """
    if len(a) != len(b):
        raise ValueError(f"aligned rows differ in length ({len(a)} != {len(b)})")
    if isinstance(a, str):
        return sum(x != y for x, y in zip(a, b))
    return int(np.count_nonzero(np.asarray(a) != np.asarray(b)))


def strip_gaps(row: str) -> str:
    return row.replace(GAP, "")
