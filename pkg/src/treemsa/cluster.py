"""Divisive guide-tree construction on Levenshtein distance.

Each cluster is split around two poles: ``l``, the member farthest from the
cluster's geometric median, and ``r``, the member farthest from ``l``. Members
at least as close to ``l`` as to ``r`` go left, the rest go right. Splitting
continues until every leaf holds a single sequence.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .distance import distance_matrix, distances_from

EXACT_CAP = 100


class DeduplicationError(ValueError):
    """Raised when two members of a cluster are at distance zero."""


@dataclass(eq=False)
class ClusterNode:
    members: np.ndarray
    center: int
    depth: int = 0
    radius: int = 0
    left: "ClusterNode | None" = None
    right: "ClusterNode | None" = None
    poles: tuple[int, int] | None = None

    @property
    def cardinality(self) -> int:
        return len(self.members)

    @property
    def is_leaf(self) -> bool:
        return self.left is None and self.right is None

    def children(self) -> tuple["ClusterNode", ...]:
        return tuple(c for c in (self.left, self.right) if c is not None)

    def preorder(self) -> Iterator["ClusterNode"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            if node.right is not None:
                stack.append(node.right)
            if node.left is not None:
                stack.append(node.left)

    def postorder(self) -> list["ClusterNode"]:
        order = list(self.preorder_rl())
        order.reverse()
        return order

    def preorder_rl(self) -> Iterator["ClusterNode"]:
        # root, right, left; reversed this is left, right, root
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            if node.left is not None:
                stack.append(node.left)
            if node.right is not None:
                stack.append(node.right)

    def leaves(self) -> list["ClusterNode"]:
        return [n for n in self.preorder() if n.is_leaf]

    def height(self) -> int:
        return max(n.depth for n in self.preorder()) - self.depth


def _node_rng(seed: int, members: np.ndarray) -> np.random.Generator:
    # (lowest member, size) identifies a node uniquely within one tree
    return np.random.default_rng([seed, int(members[0]), len(members)])


def geometric_median(
    members: Sequence[int],
    seqs: Sequence[str],
    seed: int = 0,
    exact_cap: int = EXACT_CAP,
) -> int:
    """Member minimizing the summed Levenshtein distance to the others.

    Clusters larger than ``exact_cap`` are represented by a seeded uniform
    sample of ``exact_cap`` members. Ties go to the lowest index.
    """
    members = np.sort(np.asarray(members, dtype=np.int64))
    if members.size == 0:
        raise ValueError("empty cluster has no median")
    if members.size == 1:
        return int(members[0])
    if members.size > exact_cap:
        rng = _node_rng(seed, members)
        members = np.sort(rng.choice(members, size=exact_cap, replace=False))
    dists = distance_matrix([seqs[i] for i in members])
    sums = dists.sum(axis=1)
    return int(members[np.argmin(sums)])


def split(node: ClusterNode, seqs: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
    """Pole selection and assignment for one cluster.

    Sets ``node.radius`` and ``node.poles``; returns the left and right
    member arrays (sorted).
    """
    members = node.members
    pool = [seqs[i] for i in members]
    from_center = distances_from(seqs[node.center], pool)
    node.radius = int(from_center.max())
    if len(members) == 1:
        return members, members[:0]

    # argmax picks the first maximum; members are sorted so that is the lowest index
    li = int(np.argmax(from_center))
    from_l = distances_from(pool[li], pool)
    ri = int(np.argmax(from_l))
    if li == ri or from_l[ri] == 0:
        raise DeduplicationError(
            f"cluster of {len(members)} sequences has all-identical members; de-duplicate the input"
        )
    from_r = distances_from(pool[ri], pool)
    node.poles = (int(members[li]), int(members[ri]))
    go_left = from_l <= from_r
    return members[go_left], members[~go_left]


def _split_node(node: ClusterNode, seqs, seed, exact_cap):
    left_members, right_members = split(node, seqs)
    left = ClusterNode(
        left_members,
        geometric_median(left_members, seqs, seed, exact_cap),
        node.depth + 1,
    )
    right = ClusterNode(
        right_members,
        geometric_median(right_members, seqs, seed, exact_cap),
        node.depth + 1,
    )
    return left, right


def partition(
    node: ClusterNode,
    seqs: Sequence[str],
    seed: int = 0,
    exact_cap: int = EXACT_CAP,
    executor: Executor | None = None,
) -> None:
    """Recursively split ``node`` in place until all leaves are singletons.

    Works level by level with an explicit frontier, so arbitrarily deep
    (unbalanced) trees never hit the interpreter's recursion limit. With an
    executor, all clusters of one level are split concurrently; the result
    does not depend on scheduling.
    """
    frontier = [node]
    while frontier:
        todo = [n for n in frontier if n.cardinality > 1]
        for n in frontier:
            if n.cardinality == 1:
                n.radius = 0
        if not todo:
            break
        if executor is None or len(todo) == 1:
            results = [_split_node(n, seqs, seed, exact_cap) for n in todo]
        else:
            results = list(executor.map(lambda n: _split_node(n, seqs, seed, exact_cap), todo))
        frontier = []
        for n, (left, right) in zip(todo, results):
            n.left, n.right = left, right
            frontier.extend((left, right))


def build_tree(
    seqs: Sequence[str],
    seed: int = 0,
    exact_cap: int = EXACT_CAP,
    executor: Executor | None = None,
) -> ClusterNode:
    """Guide tree over de-duplicated residue strings."""
    if len(seqs) == 0:
        raise ValueError("cannot build a tree over zero sequences")
    members = np.arange(len(seqs), dtype=np.int64)
    root = ClusterNode(members, geometric_median(members, seqs, seed, exact_cap), 0)
    partition(root, seqs, seed, exact_cap, executor)
    return root


def tree_records(root: ClusterNode, ids: Sequence[str] | None = None) -> list[dict]:
    """Flat preorder description of the tree (one dict per node)."""
    numbering: dict[int, int] = {}
    parent: dict[int, int | None] = {id(root): None}
    records = []
    for k, node in enumerate(root.preorder()):
        numbering[id(node)] = k
        for child in node.children():
            parent[id(child)] = k
        records.append(
            {
                "node_id": k,
                "parent_id": parent[id(node)],
                "center_id": ids[node.center] if ids is not None else node.center,
                "center_index": node.center,
                "radius": node.radius,
                "cardinality": node.cardinality,
                "depth": node.depth,
            }
        )
    return records


def dump_tree(root: ClusterNode, path: str | os.PathLike, ids: Sequence[str] | None = None) -> None:
    """Write the tree as newline-delimited JSON."""
    with open(path, "w") as fh:
        for rec in tree_records(root, ids):
            fh.write(json.dumps(rec))
            fh.write("\n")
