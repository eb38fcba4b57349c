"""Global pairwise alignment with affine gaps (three-state Gotoh recurrence).

Inputs may already contain gap symbols (centers of partial alignments). A
pre-existing gap is just another symbol of the substitution table. Only
*newly inserted* gap columns are subject to the open/extend penalties:

* a run of new gap columns costs ``gap_open`` once plus, per column,
  ``gap_extend`` (or 0 where the opposite symbol is itself a pre-existing gap);
* in flat mode ``gap_open`` is ignored.

Traceback prefers diagonal, then up (gap into ``b``), then left (gap into ``a``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .scoring import GapMode, ScoringScheme
from .seq_io import GAP

DIAG, UP, LEFT = 0, 1, 2
_NEG = -(1 << 60)


@numba.njit(nogil=True, cache=True)
def _gotoh(a, b, table, gap_idx, gap_open, gap_extend):
    n = a.shape[0]
    m = b.shape[0]
    # trace[s, i, j] = state of the predecessor cell for state s at (i, j)
    trace = np.zeros((3, n + 1, m + 1), dtype=np.uint8)

    M_prev = np.full(m + 1, _NEG, dtype=np.int64)
    X_prev = np.full(m + 1, _NEG, dtype=np.int64)
    Y_prev = np.full(m + 1, _NEG, dtype=np.int64)
    M_cur = np.full(m + 1, _NEG, dtype=np.int64)
    X_cur = np.full(m + 1, _NEG, dtype=np.int64)
    Y_cur = np.full(m + 1, _NEG, dtype=np.int64)

    M_prev[0] = 0
    for j in range(1, m + 1):
        gb = 0 if b[j - 1] == gap_idx else gap_extend
        mo = M_prev[j - 1] + gap_open
        yo = Y_prev[j - 1]
        if mo >= yo:
            Y_prev[j] = mo + gb
            trace[LEFT, 0, j] = DIAG
        else:
            Y_prev[j] = yo + gb
            trace[LEFT, 0, j] = LEFT

    for i in range(1, n + 1):
        ai = a[i - 1]
        ga = 0 if ai == gap_idx else gap_extend
        M_cur[0] = _NEG
        Y_cur[0] = _NEG
        # column 0: only vertical gaps
        mo = M_prev[0] + gap_open
        xo = X_prev[0]
        if mo >= xo:
            X_cur[0] = mo + ga
            trace[UP, i, 0] = DIAG
        else:
            X_cur[0] = xo + ga
            trace[UP, i, 0] = UP

        for j in range(1, m + 1):
            bj = b[j - 1]

            # diagonal
            best = M_prev[j - 1]
            src = DIAG
            if X_prev[j - 1] > best:
                best = X_prev[j - 1]
                src = UP
            if Y_prev[j - 1] > best:
                best = Y_prev[j - 1]
                src = LEFT
            M_cur[j] = best + table[ai, bj]
            trace[DIAG, i, j] = src

            # up: a[i-1] against a new gap in b
            best = M_prev[j] + gap_open
            src = DIAG
            if X_prev[j] > best:
                best = X_prev[j]
                src = UP
            if Y_prev[j] + gap_open > best:
                best = Y_prev[j] + gap_open
                src = LEFT
            X_cur[j] = best + ga
            trace[UP, i, j] = src

            # left: b[j-1] against a new gap in a
            gb = 0 if bj == gap_idx else gap_extend
            best = M_cur[j - 1] + gap_open
            src = DIAG
            if X_cur[j - 1] + gap_open > best:
                best = X_cur[j - 1] + gap_open
                src = UP
            if Y_cur[j - 1] > best:
                best = Y_cur[j - 1]
                src = LEFT
            Y_cur[j] = best + gb
            trace[LEFT, i, j] = src

        M_prev, M_cur = M_cur, M_prev
        X_prev, X_cur = X_cur, X_prev
        Y_prev, Y_cur = Y_cur, Y_prev

    score = M_prev[m]
    state = DIAG
    if X_prev[m] > score:
        score = X_prev[m]
        state = UP
    if Y_prev[m] > score:
        score = Y_prev[m]
        state = LEFT

    ops = np.empty(n + m, dtype=np.uint8)
    k = 0
    i = n
    j = m
    while i > 0 or j > 0:
        ops[k] = state
        k += 1
        prev = trace[state, i, j]
        if state == DIAG:
            i -= 1
            j -= 1
        elif state == UP:
            i -= 1
        else:
            j -= 1
        state = prev
    return score, ops[:k][::-1].copy()


@dataclass(frozen=True)
class PairwiseResult:
    aligned_a: str
    aligned_b: str
    score: int
    gaps_into_a: list[int]
    gaps_into_b: list[int]

    def __len__(self):
        return len(self.aligned_a)


def align_codes(a: np.ndarray, b: np.ndarray, scheme: ScoringScheme) -> tuple[int, np.ndarray]:
    """Run the DP on encoded strings; returns ``(score, ops)``.

    ``ops`` holds one of DIAG/UP/LEFT per output column.
    """
    if a.size == 0 or b.size == 0:
        raise ValueError("cannot align an empty string")
    gap_open = scheme.gap_open if scheme.mode is GapMode.AFFINE else 0
    score, ops = _gotoh(
        np.ascontiguousarray(a, dtype=np.int64),
        np.ascontiguousarray(b, dtype=np.int64),
        np.ascontiguousarray(scheme.table, dtype=np.int64),
        scheme.gap_index,
        gap_open,
        scheme.gap_extend,
    )
    return int(score), ops


def gap_positions(ops: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pre-insertion indices of new gap columns in ``a`` and in ``b``."""
    consumes_a = ops != LEFT
    consumes_b = ops != UP
    a_before = np.cumsum(consumes_a) - consumes_a
    b_before = np.cumsum(consumes_b) - consumes_b
    return a_before[ops == LEFT], b_before[ops == UP]


def _render(s: str, ops: np.ndarray, gap_op: int) -> str:
    out = []
    it = iter(s)
    for op in ops:
        out.append(GAP if op == gap_op else next(it))
    return "".join(out)


def nw_align(a: str, b: str, scheme: ScoringScheme) -> PairwiseResult:
    """Optimal global alignment of ``a`` and ``b`` under ``scheme``."""
    a = a.upper()
    b = b.upper()
    score, ops = align_codes(scheme.encode(a), scheme.encode(b), scheme)
    gaps_a, gaps_b = gap_positions(ops)
    return PairwiseResult(
        _render(a, ops, LEFT),
        _render(b, ops, UP),
        score,
        gaps_a.tolist(),
        gaps_b.tolist(),
    )


def new_gap_mask(aligned: str, gaps: list[int]) -> list[bool]:
    """Mark which columns of ``aligned`` were inserted at the given indices."""
    mask = []
    orig = 0
    pending = sorted(gaps)
    p = 0
    for _ in aligned:
        if p < len(pending) and pending[p] == orig:
            mask.append(True)
            p += 1
        else:
            mask.append(False)
            orig += 1
    return mask


def rescore(result: PairwiseResult, scheme: ScoringScheme) -> int:
    """Score an emitted alignment column by column, detecting gap runs."""
    new_a = new_gap_mask(result.aligned_a, result.gaps_into_a)
    new_b = new_gap_mask(result.aligned_b, result.gaps_into_b)
    return score_columns(result.aligned_a, result.aligned_b, new_a, new_b, scheme)


def score_columns(aligned_a, aligned_b, new_a, new_b, scheme: ScoringScheme) -> int:
    if len(aligned_a) != len(aligned_b):
        raise ValueError("aligned strings differ in length")
    opening = scheme.effective_gap_open
    total = 0
    prev = None
    for x, y, na, nb in zip(aligned_a, aligned_b, new_a, new_b):
        if na and nb:
            raise ValueError("column is a new gap in both strings")
        if nb:
            total += 0 if x == GAP else scheme.gap_extend
            if prev != "b":
                total += opening
            prev = "b"
        elif na:
            total += 0 if y == GAP else scheme.gap_extend
            if prev != "a":
                total += opening
            prev = "a"
        else:
            total += scheme.score(x, y)
            prev = None
    return total
