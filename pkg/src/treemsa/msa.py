"""Bottom-up merging of partial alignments along the guide tree."""

from __future__ import annotations

from collections import defaultdict
from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .cluster import ClusterNode
from .pairwise import align_codes, gap_positions
from .scoring import ScoringScheme
from .seq_io import GAP

GAP_BYTE = ord(GAP)


@dataclass(eq=False)
class Msa:
    """Rectangular block of aligned rows (uint8 ASCII), one per sequence.

    ``row_to_sequence[k]`` is the index of the input sequence in row ``k``.
    """

    block: np.ndarray
    row_to_sequence: np.ndarray

    def __post_init__(self):
        if self.block.ndim != 2 or self.block.dtype != np.uint8:
            raise ValueError("block must be a 2-d uint8 array")
        if self.block.shape[0] != len(self.row_to_sequence):
            raise ValueError("row_to_sequence must parallel the rows")

    @classmethod
    def from_rows(cls, rows: Sequence[str], row_to_sequence: Sequence[int] | None = None) -> "Msa":
        if not rows:
            raise ValueError("an Msa needs at least one row")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged alignment: rows differ in width")
        block = np.frombuffer("".join(rows).encode("ascii"), dtype=np.uint8).reshape(len(rows), width).copy()
        if row_to_sequence is None:
            row_to_sequence = range(len(rows))
        return cls(block, np.asarray(row_to_sequence, dtype=np.int64))

    @property
    def width(self) -> int:
        return self.block.shape[1]

    @property
    def rows(self) -> list[str]:
        return [r.tobytes().decode("ascii") for r in self.block]

    def __len__(self):
        return self.block.shape[0]

    def row_of(self, seq_index: int) -> int:
        hits = np.flatnonzero(self.row_to_sequence == seq_index)
        if hits.size == 0:
            raise LookupError(f"sequence {seq_index} has no row in this alignment")
        return int(hits[0])

    def reordered(self, order: Sequence[int]) -> "Msa":
        order = np.asarray(order, dtype=np.int64)
        return Msa(self.block[order], self.row_to_sequence[order])


def align_leaf(node: ClusterNode, seqs: Sequence[str]) -> Msa:
    if not node.is_leaf or node.cardinality != 1:
        raise ValueError("align_leaf needs a singleton leaf cluster")
    idx = int(node.members[0])
    return Msa.from_rows([seqs[idx]], [idx])


def insert_gap_columns(msa: Msa, positions: Sequence[int]) -> Msa:
    """Insert a full gap column before each (pre-insertion) column index.

    Repeated indices insert several columns at one site.
    """
    positions = np.asarray(positions, dtype=np.int64)
    if positions.size == 0:
        return msa
    if positions.min() < 0 or positions.max() > msa.width:
        raise IndexError(f"gap position out of range for width {msa.width}")
    if np.any(np.diff(positions) < 0):
        raise ValueError("gap positions must be sorted")
    block = np.insert(msa.block, positions, GAP_BYTE, axis=1)
    return Msa(block, msa.row_to_sequence)


def merge(
    node: ClusterNode,
    left_msa: Msa,
    right_msa: Msa,
    seqs: Sequence[str] | None,
    scheme: ScoringScheme,
) -> Msa:
    """Align the children's gapped centers and join the widened blocks."""
    if node.left is None or node.right is None:
        raise ValueError("merge needs an internal node")
    try:
        left_center = left_msa.block[left_msa.row_of(node.left.center)]
        right_center = right_msa.block[right_msa.row_of(node.right.center)]
    except LookupError as exc:
        raise LookupError(f"tree/alignment mismatch: {exc}") from None
    _, ops = align_codes(scheme.encode(left_center), scheme.encode(right_center), scheme)
    gaps_left, gaps_right = gap_positions(ops)
    left_msa = insert_gap_columns(left_msa, gaps_left)
    right_msa = insert_gap_columns(right_msa, gaps_right)
    return Msa(
        np.vstack([left_msa.block, right_msa.block]),
        np.concatenate([left_msa.row_to_sequence, right_msa.row_to_sequence]),
    )


def _heights(root: ClusterNode) -> dict[int, int]:
    h: dict[int, int] = {}
    for node in root.postorder():
        h[id(node)] = 0 if node.is_leaf else 1 + max(h[id(c)] for c in node.children())
    return h


def align_all(
    root: ClusterNode,
    seqs: Sequence[str],
    scheme: ScoringScheme,
    executor: Executor | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> Msa:
    """Post-order merge over the whole tree.

    Nodes of equal height are independent and are merged concurrently when
    an executor is given. Child alignments are dropped as soon as they have
    been merged into their parent.
    """
    heights = _heights(root)
    levels: dict[int, list[ClusterNode]] = defaultdict(list)
    for node in root.postorder():
        levels[heights[id(node)]].append(node)
    total = len(heights)
    done = 0
    done_msas: dict[int, Msa] = {}

    def work(node: ClusterNode) -> Msa:
        if node.is_leaf:
            return align_leaf(node, seqs)
        return merge(node, done_msas[id(node.left)], done_msas[id(node.right)], seqs, scheme)

    for h in sorted(levels):
        nodes = levels[h]
        if executor is None or len(nodes) == 1:
            results = [work(n) for n in nodes]
        else:
            results = list(executor.map(work, nodes))
        for node, result in zip(nodes, results):
            for child in node.children():
                del done_msas[id(child)]
            done_msas[id(node)] = result
        done += len(nodes)
        if progress is not None:
            progress(done, total)
    return done_msas[id(root)]
