"""Progressive multiple sequence alignment over a divisive cluster guide tree."""

from .cluster import ClusterNode, build_tree, geometric_median, partition
from .distance import hamming_aligned, levenshtein
from .metrics import MetricsReport, evaluate, gap_percent, p_score
from .msa import Msa, align_all, align_leaf, insert_gap_columns, merge
from .pairwise import PairwiseResult, nw_align
from .scoring import ScoringScheme, default_nucleotide_scheme, default_protein_scheme, load_matrix
from .seq_io import Alphabet, Sequence, deduplicate, parse_fasta, write_fasta

__version__ = "0.1.0"
