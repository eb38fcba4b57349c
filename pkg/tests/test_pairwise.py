import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_force_best
from treemsa.pairwise import gap_positions, nw_align, rescore
from treemsa.scoring import (
    IUPAC_SETS,
    GapMode,
    ScoringScheme,
    UnknownSymbolError,
    default_nucleotide_scheme,
    default_protein_scheme,
    load_matrix,
    parse_matrix,
)

NT = default_nucleotide_scheme()
NT_FLAT = default_nucleotide_scheme(mode="flat")
AA = default_protein_scheme()


def iupac_oracle(x, y):
    return 1 if set(IUPAC_SETS[x]) & set(IUPAC_SETS[y]) else -1


class TestSchemes:
    def test_nucleotide_examples(self):
        assert NT.score("A", "A") == 1
        assert NT.score("A", "R") == iupac_oracle("A", "R") == 1
        assert NT.score("A", "Y") == iupac_oracle("A", "Y") == -1

    def test_nucleotide_table_matches_iupac_sets(self):
        for x in IUPAC_SETS:
            for y in IUPAC_SETS:
                assert NT.score(x, y) == iupac_oracle(x, y)
        assert NT.score("U", "T") == 1

    def test_protein_blosum62(self):
        assert AA.score("A", "A") == 4
        assert AA.score("W", "W") == 11
        assert AA.score("W", "C") == -2
        assert AA.score("*", "*") == 1
        assert AA.score("A", "-") == AA.gap_extend == -1

    def test_gap_row(self):
        for s in (NT, AA):
            assert s.score("-", "-") == 0
            assert s.gap_open == -10 and s.gap_extend == -1
            assert abs(s.gap_open) == 10 * abs(s.gap_extend)
            assert np.array_equal(s.table, s.table.T)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            ScoringScheme("AB-", [[1, 0, -1], [2, 1, -1], [-1, -1, 0]])

    def test_matrix_file(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("# toy\n   A  B\nA  2 -1\nB -1  3\n")
        s = load_matrix(p, gap_open=-4, gap_extend=-2, mode="flat")
        assert s.symbols == "AB-"
        assert s.score("B", "B") == 3
        assert s.score("A", "-") == -2
        assert s.mode is GapMode.FLAT

    def test_matrix_parse_errors(self):
        with pytest.raises(ValueError):
            parse_matrix("A B\nA 1 0\n")
        with pytest.raises(ValueError):
            parse_matrix("")


class TestExamples:
    def test_identical(self):
        r = nw_align("ACGT", "ACGT", NT)
        assert (r.aligned_a, r.aligned_b, r.score) == ("ACGT", "ACGT", 4)
        assert r.gaps_into_a == r.gaps_into_b == []

    def test_single_deletion(self):
        r = nw_align("ACGT", "AGT", NT)
        assert r.aligned_a == "ACGT"
        assert r.aligned_b == "A-GT"
        assert r.gaps_into_b == [1]
        assert r.gaps_into_a == []
        # 3 matches + one run of length 1 (open surcharge + one extend)
        assert r.score == 3 * 1 + (-10) + (-1)
        assert r.score == brute_force_best("ACGT", "AGT", NT.score, -10, -1)

    def test_mismatch_beats_gaps(self):
        r = nw_align("A", "C", NT)
        assert (r.aligned_a, r.aligned_b, r.score) == ("A", "C", -1)
        assert r.score == brute_force_best("A", "C", NT.score, -10, -1)

    def test_unknown_symbol(self):
        with pytest.raises(UnknownSymbolError):
            nw_align("ACGJ", "ACG", NT)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            nw_align("", "A", NT)

    def test_tie_prefers_diagonal(self):
        # "AA"/"A-" and "AA"/"-A" both score 0 in flat mode; at the end cell
        # the diagonal move wins the tie, pushing the gap to the front
        r = nw_align("AA", "A", NT_FLAT)
        assert r.score == brute_force_best("AA", "A", NT_FLAT.score, 0, -1) == 0
        assert (r.aligned_a, r.aligned_b) == ("AA", "-A")
        assert r.gaps_into_b == [0]

    def test_flat_prefers_gaps_when_cheaper(self):
        r = nw_align("AC", "CA", NT_FLAT)
        assert r.score == brute_force_best("AC", "CA", NT_FLAT.score, 0, -1) == -1
        assert rescore(r, NT_FLAT) == -1

    def test_gapped_inputs(self):
        r = nw_align("AC-GT", "ACGGT", NT)
        assert r.aligned_a == "AC-GT" and r.aligned_b == "ACGGT"
        assert r.score == 4 + NT.gap_extend
        assert r.score == brute_force_best("AC-GT", "ACGGT", NT.score, -10, -1)


def random_pair(rng, symbols="ACGT", max_len=8):
    la, lb = rng.randint(1, max_len), rng.randint(1, max_len)
    return ("".join(rng.choice(symbols) for _ in range(la)), "".join(rng.choice(symbols) for _ in range(lb)))


@pytest.mark.parametrize("scheme", [NT, NT_FLAT], ids=["affine", "flat"])
def test_optimal_against_enumeration(scheme):
    rng = random.Random(7)
    for _ in range(40):
        a, b = random_pair(rng, max_len=6)
        r = nw_align(a, b, scheme)
        assert r.score == brute_force_best(a, b, scheme.score, scheme.effective_gap_open, scheme.gap_extend)
        assert rescore(r, scheme) == r.score


def test_optimal_with_pre_existing_gaps():
    rng = random.Random(11)
    for _ in range(40):
        a, b = random_pair(rng, "ACG-", max_len=6)
        if a.strip("-") == "" or b.strip("-") == "":
            continue
        for scheme in (NT, NT_FLAT):
            r = nw_align(a, b, scheme)
            assert r.score == brute_force_best(a, b, scheme.score, scheme.effective_gap_open, scheme.gap_extend)
            assert rescore(r, scheme) == r.score


seqs = st.text("ACDEFGHIKLMNPQRSTVWY", min_size=1, max_size=25)


@settings(max_examples=150)
@given(seqs, seqs)
def test_properties_protein(a, b):
    r = nw_align(a, b, AA)
    assert len(r.aligned_a) == len(r.aligned_b)
    assert r.aligned_a.replace("-", "") == a
    assert r.aligned_b.replace("-", "") == b
    assert not any(x == y == "-" for x, y in zip(r.aligned_a, r.aligned_b))
    assert rescore(r, AA) == r.score
    assert nw_align(b, a, AA).score == r.score
    assert r.gaps_into_a == sorted(r.gaps_into_a)


def test_affine_run_accounting():
    # a long deletion is one run: open once plus one extend per column
    a, b = "ACGTTTTTACGT", "ACGTACGT"
    r = nw_align(a, b, NT)
    runs = [k for k in range(len(r.aligned_b)) if r.aligned_b[k] == "-" and (k == 0 or r.aligned_b[k - 1] != "-")]
    assert len(runs) == 1
    assert r.score == 8 + NT.gap_open + 4 * NT.gap_extend


def test_gap_positions_from_ops():
    ops = np.array([0, 1, 1, 0, 2, 0], dtype=np.uint8)
    gaps_a, gaps_b = gap_positions(ops)
    # a consumes on ops 0,1 ; b consumes on ops 0,2
    assert gaps_b.tolist() == [1, 1]
    assert gaps_a.tolist() == [4]
