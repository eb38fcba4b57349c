import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import insert_one_at_a_time, multi_family
from treemsa.cluster import ClusterNode, build_tree
from treemsa.msa import Msa, align_all, align_leaf, insert_gap_columns, merge
from treemsa.pairwise import nw_align
from treemsa.scoring import default_nucleotide_scheme, default_protein_scheme

NT = default_nucleotide_scheme()


def leaf(i):
    return ClusterNode(np.array([i]), i)


def test_align_leaf():
    m = align_leaf(leaf(0), ["ACGT"])
    assert m.rows == ["ACGT"] and m.width == 4
    m = align_leaf(leaf(0), ["A"])
    assert m.rows == ["A"] and m.width == 1


def test_align_leaf_rejects_internal():
    root = build_tree(["AC", "AG"])
    with pytest.raises(ValueError):
        align_leaf(root, ["AC", "AG"])


def test_insert_examples():
    assert insert_gap_columns(Msa.from_rows(["AC", "GT"]), [1]).rows == ["A-C", "G-T"]
    m = Msa.from_rows(["AC", "GT"])
    assert insert_gap_columns(m, []).rows == ["AC", "GT"]
    assert insert_gap_columns(Msa.from_rows(["AB"]), [0, 0, 2]).rows == insert_one_at_a_time(["AB"], [0, 0, 2])
    assert insert_gap_columns(Msa.from_rows(["AB"]), [0, 0, 2]).rows == ["--AB-"]


def test_insert_out_of_range():
    with pytest.raises(IndexError):
        insert_gap_columns(Msa.from_rows(["AB"]), [3])


@given(
    st.lists(st.text("ACG-", min_size=6, max_size=6), min_size=1, max_size=5),
    st.lists(st.integers(0, 6), max_size=8),
)
def test_insert_matches_one_at_a_time(rows, positions):
    positions = sorted(positions)
    m = insert_gap_columns(Msa.from_rows(rows), positions)
    assert m.rows == insert_one_at_a_time(rows, positions)
    assert m.width == 6 + len(positions)
    for before, after in zip(rows, m.rows):
        assert after.replace("-", "") == before.replace("-", "")


def test_merge_single_rows():
    seqs = ["ACGT", "AGT"]
    node = ClusterNode(np.array([0, 1]), 0, left=leaf(0), right=leaf(1))
    m = merge(node, align_leaf(node.left, seqs), align_leaf(node.right, seqs), seqs, NT)
    expected = nw_align("ACGT", "AGT", NT)
    assert m.rows == [expected.aligned_a, expected.aligned_b] == ["ACGT", "A-GT"]
    assert m.width == 4


def test_merge_mismatch_no_gaps():
    seqs = ["AC", "AG"]
    node = ClusterNode(np.array([0, 1]), 0, left=leaf(0), right=leaf(1))
    m = merge(node, align_leaf(node.left, seqs), align_leaf(node.right, seqs), seqs, NT)
    assert m.rows == ["AC", "AG"] and m.width == 2


def test_merge_equal_width_no_gaps():
    left = Msa.from_rows(["AC-T", "ACGT"], [0, 1])
    right = Msa.from_rows(["ACGT"], [2])
    node = ClusterNode(np.array([0, 1, 2]), 1, left=ClusterNode(np.array([0, 1]), 1), right=leaf(2))
    m = merge(node, left, right, None, NT)
    assert m.width == 4
    assert m.rows == ["AC-T", "ACGT", "ACGT"]


def test_merge_uses_gapped_centers():
    # left center already carries a gap column from its own subtree
    left = Msa.from_rows(["AC-GT", "ACAGT"], [0, 1])
    right = Msa.from_rows(["ACGTT"], [2])
    node = ClusterNode(np.array([0, 1, 2]), 0, left=ClusterNode(np.array([0, 1]), 0), right=leaf(2))
    m = merge(node, left, right, None, NT)
    pair = nw_align("AC-GT", "ACGTT", NT)
    assert m.width == len(pair)
    assert m.rows[0] == pair.aligned_a
    assert m.rows[2] == pair.aligned_b


def test_merge_missing_center():
    left = Msa.from_rows(["AC"], [0])
    right = Msa.from_rows(["AG"], [1])
    node = ClusterNode(np.array([0, 1]), 0, left=leaf(5), right=leaf(1))
    with pytest.raises(LookupError):
        merge(node, left, right, None, NT)


def check_msa(msa, seqs):
    assert sorted(msa.row_to_sequence.tolist()) == list(range(len(seqs)))
    rows = msa.rows
    assert len({len(r) for r in rows}) == 1
    for row, k in zip(rows, msa.row_to_sequence):
        assert row.replace("-", "") == seqs[k]
    assert max(map(len, seqs)) <= msa.width <= sum(map(len, seqs))


@pytest.mark.parametrize("seed", range(6))
def test_align_all_roundtrip(seed):
    rng = random.Random(seed)
    if seed % 2:
        seqs = multi_family(rng.randint(2, 80), rng.randint(5, 60), "ACDEFGHIKLMNPQRSTVWY", rng)
        scheme = default_protein_scheme()
    else:
        seqs = multi_family(rng.randint(2, 80), rng.randint(5, 60), "ACGT", rng)
        scheme = NT
    root = build_tree(seqs, seed)
    check_msa(align_all(root, seqs, scheme), seqs)


def test_align_all_two_sequences_equals_pairwise():
    seqs = ["GATTACA", "GATCA"]
    m = align_all(build_tree(seqs), seqs, NT)
    pair = nw_align(seqs[1], seqs[0], NT)  # tree puts the non-center first
    assert sorted(m.rows) == sorted([pair.aligned_a, pair.aligned_b])


def test_align_all_progress_and_order():
    rng = random.Random(3)
    seqs = multi_family(25, 15, "ACGT", rng)
    root = build_tree(seqs)
    calls = []
    m = align_all(root, seqs, NT, progress=lambda d, t: calls.append((d, t)))
    assert calls[-1] == (2 * len(seqs) - 1, 2 * len(seqs) - 1)
    # tree order: left-to-right leaves
    assert m.row_to_sequence.tolist() == [int(n.members[0]) for n in root.leaves()]


def test_msa_from_rows_rejects_ragged():
    with pytest.raises(ValueError):
        Msa.from_rows(["AC", "A"])
