"""Alignment quality metrics: gap percentage, stretch, p-scores, distortion."""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from rapidfuzz import process
from rapidfuzz.distance import Levenshtein

from .distance import hamming_aligned, levenshtein
from .msa import GAP_BYTE, Msa

DEFAULT_SAMPLE_SIZE = 10_000
DEFAULT_PAIR_BUDGET = 100_000

CSV_COLUMNS = ("time_s", "width", "stretch", "gap_percent", "distortion", "p_min", "p_avg", "p_max")


@dataclass
class MetricsReport:
    width: int
    stretch: float
    gap_percent: float
    distortion: float
    p_min: float
    p_avg: float
    p_max: float
    sample_size: int
    pair_count: int
    seed: int
    excluded_pairs: int = 0
    time_s: float | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def csv_row(self) -> list:
        return ["" if getattr(self, c) is None else getattr(self, c) for c in CSV_COLUMNS]


@dataclass
class PairDetails:
    """Per-pair values behind a report (used for figures)."""

    pairs: np.ndarray
    p_scores: np.ndarray
    distortions: np.ndarray
    row_gap_fraction: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _as_bytes(row) -> np.ndarray:
    if isinstance(row, str):
        return np.frombuffer(row.encode("ascii"), dtype=np.uint8)
    return np.asarray(row, dtype=np.uint8)


def row_gap_fractions(msa: Msa) -> np.ndarray:
    return np.count_nonzero(msa.block == GAP_BYTE, axis=1) / msa.width


def gap_percent(msa: Msa) -> float:
    """Mean over rows of the fraction of gap columns, as a percentage."""
    if len(msa) == 0 or msa.width == 0:
        raise ValueError("empty alignment")
    return float(100.0 * row_gap_fractions(msa).mean())


def stretch(width: int, max_length: int) -> float:
    """Alignment width relative to the longest unaligned sequence."""
    return width / max_length


def p_score(a, b) -> float:
    """Mismatch fraction over columns where both rows carry a residue.

    1.0 when no such column exists.
    """
    x, y = _as_bytes(a), _as_bytes(b)
    if x.shape != y.shape:
        raise ValueError(f"aligned rows differ in length ({x.size} != {y.size})")
    both = (x != GAP_BYTE) & (y != GAP_BYTE)
    n = int(np.count_nonzero(both))
    if n == 0:
        return 1.0
    return int(np.count_nonzero(x[both] != y[both])) / n


def distortion_pair(a_aligned, b_aligned, a_raw: str, b_raw: str) -> float | None:
    """Aligned Hamming over unaligned Levenshtein; None for duplicate pairs."""
    lev = levenshtein(a_raw, b_raw)
    if lev == 0:
        return None
    return hamming_aligned(_as_bytes(a_aligned), _as_bytes(b_aligned)) / lev


def sample_pairs(n: int, budget: int | None, rng: np.random.Generator) -> np.ndarray:
    """Distinct pairs ``(i, j)`` with ``i < j`` drawn uniformly from ``range(n)``.

    All pairs when ``budget`` is None/0 or at least the number of pairs,
    in lexicographic order; otherwise a sorted uniform sample.
    """
    total = n * (n - 1) // 2
    if total == 0:
        return np.zeros((0, 2), dtype=np.int64)
    if not budget or budget >= total:
        i, j = np.triu_indices(n, k=1)
        return np.stack([i, j], axis=1).astype(np.int64)
    flat = np.sort(rng.choice(total, size=budget, replace=False)).astype(np.int64)
    return np.stack(_unrank_pairs(flat, n), axis=1)


def _unrank_pairs(k: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # row i starts at offset i*n - i*(i+1)/2 in the lexicographic i<j order
    kf = k.astype(np.float64)
    i = np.floor((2 * n - 1 - np.sqrt((2 * n - 1) ** 2 - 8 * kf)) / 2).astype(np.int64)
    start = i * n - i * (i + 1) // 2
    # float rounding can be off by one near row boundaries
    over = start > k
    i[over] -= 1
    start = i * n - i * (i + 1) // 2
    under = k - start >= n - 1 - i
    i[under] += 1
    start = i * n - i * (i + 1) // 2
    j = k - start + i + 1
    return i, j


def pair_details(msa: Msa, raws: Sequence[str], pairs: np.ndarray, chunk: int = 4096) -> PairDetails:
    """p-score and distortion for every pair of row indices (NaN distortion for duplicates)."""
    p = np.empty(len(pairs))
    d = np.full(len(pairs), np.nan)
    block = msa.block
    for start in range(0, len(pairs), chunk):
        sl = slice(start, start + chunk)
        i, j = pairs[sl, 0], pairs[sl, 1]
        a, b = block[i], block[j]
        differ = a != b
        both = (a != GAP_BYTE) & (b != GAP_BYTE)
        shared = both.sum(axis=1)
        mism = (differ & both).sum(axis=1)
        p[sl] = np.where(shared > 0, mism / np.maximum(shared, 1), 1.0)
        lev = process.cpdist([raws[k] for k in i], [raws[k] for k in j],
                             scorer=Levenshtein.distance, dtype=np.int64)
        ham = differ.sum(axis=1)
        ok = lev > 0
        d[sl] = np.where(ok, ham / np.maximum(lev, 1), np.nan)
    return PairDetails(pairs, p, d, row_gap_fractions(msa))


def evaluate_detailed(
    msa: Msa,
    raws: Sequence[str],
    sample_size: int = DEFAULT_SAMPLE_SIZE,
    pair_budget: int | None = DEFAULT_PAIR_BUDGET,
    seed: int = 42,
) -> tuple[MetricsReport, PairDetails]:
    """Like :func:`evaluate` but also returns the per-pair values.

    ``raws[k]`` is the unaligned sequence of ``msa`` row ``k``.
    """
    if len(raws) != len(msa):
        raise ValueError("need one raw sequence per alignment row")
    rng = np.random.default_rng(seed)
    n = len(msa)
    if n > sample_size:
        rows = np.sort(rng.choice(n, size=sample_size, replace=False))
    else:
        rows = np.arange(n)
    local = sample_pairs(len(rows), pair_budget, rng)
    pairs = rows[local] if len(local) else local
    details = pair_details(msa, raws, pairs)

    max_len = max(len(r) for r in raws)
    valid = details.distortions[~np.isnan(details.distortions)]
    if len(details.p_scores):
        p_min, p_avg, p_max = (float(details.p_scores.min()), float(details.p_scores.mean()),
                               float(details.p_scores.max()))
    else:
        p_min = p_avg = p_max = math.nan
    report = MetricsReport(
        width=msa.width,
        stretch=stretch(msa.width, max_len),
        gap_percent=gap_percent(msa),
        distortion=float(valid.mean()) if valid.size else math.nan,
        p_min=p_min,
        p_avg=p_avg,
        p_max=p_max,
        sample_size=len(rows),
        pair_count=len(pairs),
        seed=seed,
        excluded_pairs=int(len(pairs) - valid.size),
    )
    return report, details


def evaluate(
    msa: Msa,
    raws: Sequence[str],
    sample_size: int = DEFAULT_SAMPLE_SIZE,
    pair_budget: int | None = DEFAULT_PAIR_BUDGET,
    seed: int = 42,
) -> MetricsReport:
    """Quality report for ``msa``.

    Width, stretch and gap percentage use every row. Pairwise metrics use
    pairs drawn (up to ``pair_budget``; ``None``/0 means all) from a uniform
    subsample of ``sample_size`` rows.
    """
    return evaluate_detailed(msa, raws, sample_size, pair_budget, seed)[0]


def write_report(report: MetricsReport, json_path: str | os.PathLike, csv_path: str | os.PathLike) -> None:
    with open(json_path, "w") as fh:
        fh.write(report.to_json())
        fh.write("\n")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        writer.writerow(report.csv_row())
