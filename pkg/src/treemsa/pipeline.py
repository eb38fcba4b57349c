"""End-to-end runs: align a FASTA file, evaluate an alignment."""

from __future__ import annotations

import logging
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from .cluster import build_tree, dump_tree
from .metrics import DEFAULT_PAIR_BUDGET, DEFAULT_SAMPLE_SIZE, MetricsReport, evaluate_detailed, write_report
from .msa import Msa, align_all
from .scoring import (
    DEFAULT_GAP_EXTEND,
    DEFAULT_GAP_OPEN,
    GapMode,
    ScoringScheme,
    default_nucleotide_scheme,
    default_protein_scheme,
    load_matrix,
)
from .seq_io import (
    Alphabet,
    AlphabetKind,
    DedupMap,
    GAP,
    Sequence,
    alphabet_for,
    deduplicate,
    detect_alphabet,
    parse_fasta,
    write_fasta,
)

log = logging.getLogger(__name__)


class InputMismatchError(ValueError):
    pass


@dataclass
class RunConfig:
    alphabet: str = "auto"  # "nt", "aa" or "auto"
    gap_open: int = DEFAULT_GAP_OPEN
    gap_extend: int = DEFAULT_GAP_EXTEND
    gap_mode: str = "affine"
    matrix: str | None = None
    seed: int = 42
    threads: int = 0
    sample_size: int = DEFAULT_SAMPLE_SIZE
    pair_budget: int | None = DEFAULT_PAIR_BUDGET
    order: str = "tree"  # "tree" or "input"
    dump_tree: str | None = None
    dedup_map: str | None = None
    figures: bool = True
    time_s: float | None = None

    def __post_init__(self):
        if not self.gap_open <= self.gap_extend <= 0:
            raise ValueError("need gap_open <= gap_extend <= 0")
        if self.threads < 0:
            raise ValueError("threads must be >= 0")
        if self.alphabet not in ("nt", "aa", "auto"):
            raise ValueError(f"unknown alphabet {self.alphabet!r}")
        if self.order not in ("tree", "input"):
            raise ValueError(f"unknown order {self.order!r}")
        GapMode(self.gap_mode)

    def worker_count(self) -> int:
        return self.threads or os.cpu_count() or 1

    def scheme_for(self, alphabet: Alphabet) -> ScoringScheme:
        if self.matrix:
            return load_matrix(self.matrix, self.gap_open, self.gap_extend, self.gap_mode)
        make = default_nucleotide_scheme if alphabet.kind is AlphabetKind.NUCLEOTIDE else default_protein_scheme
        return make(self.gap_open, self.gap_extend, self.gap_mode)


def read_sequences(path, alphabet: str = "auto", allow_gaps: bool = False) -> tuple[list[Sequence], Alphabet]:
    if alphabet == "auto":
        seqs = parse_fasta(path, None, allow_gaps)
        alpha = detect_alphabet(seqs)
    else:
        alpha = alphabet_for(alphabet)
    # second pass validates symbols and reports the offending line
    return parse_fasta(path, alpha, allow_gaps), alpha


@contextmanager
def _executor(workers: int):
    if workers <= 1:
        yield None
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            yield pool


@contextmanager
def _atomic_path(path):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    os.close(fd)
    try:
        yield tmp
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def expand_rows(msa: Msa, reps: list[Sequence], dedup: DedupMap, all_seqs: list[Sequence], order: str):
    """Aligned rows and their records, duplicates re-inserted after their representative."""
    by_id = {s.id: s for s in all_seqs}
    rows = msa.rows
    out: list[tuple[Sequence, str]] = []
    for row, k in zip(rows, msa.row_to_sequence):
        rep = reps[int(k)]
        out.append((rep, row))
        for dup_id in dedup.get(rep.id, []):
            out.append((by_id[dup_id], row))
    if order == "input":
        out.sort(key=lambda t: t[0].original_index)
    return out


def align_sequences(reps: list[Sequence], scheme: ScoringScheme, config: RunConfig):
    """Tree + merge over de-duplicated sequences; returns ``(tree, msa)``."""
    residues = [s.residues for s in reps]
    step = max(1, (2 * len(residues) - 1) // 20)
    last = [0]

    def progress(done, total):
        if done - last[0] >= step or done == total:
            log.info("merged %d/%d nodes", done, total)
            last[0] = done

    with _executor(config.worker_count()) as pool:
        tree = build_tree(residues, config.seed, executor=pool)
        log.info("guide tree built: %d leaves, height %d", len(residues), tree.height())
        msa = align_all(tree, residues, scheme, executor=pool, progress=progress)
    return tree, msa


def run_align(config: RunConfig, input, output) -> dict:
    """Align ``input`` and write the aligned FASTA to ``output``."""
    start = time.perf_counter()
    seqs, alphabet = read_sequences(input, config.alphabet)
    scheme = config.scheme_for(alphabet)
    reps, dedup = deduplicate(seqs)
    log.info("%d sequences, %d unique (%s)", len(seqs), len(reps), alphabet.kind.value)

    tree, msa = align_sequences(reps, scheme, config)
    if config.dump_tree:
        dump_tree(tree, config.dump_tree, [s.id for s in reps])
    if config.dedup_map:
        dedup.write_tsv(config.dedup_map)

    records = expand_rows(msa, reps, dedup, seqs, config.order)
    with _atomic_path(output) as tmp:
        write_fasta(
            [row for _, row in records],
            [s.id for s, _ in records],
            tmp,
            [s.description for s, _ in records],
        )
    return {
        "input_count": len(seqs),
        "unique_count": len(reps),
        "alphabet": alphabet.kind.value,
        "tree_depth": tree.height(),
        "width": msa.width,
        "elapsed_s": round(time.perf_counter() - start, 6),
        "output": str(output),
    }


def load_alignment(aligned, raw, alphabet: str = "auto") -> tuple[Msa, list[str], list[str]]:
    """Read an aligned file and its unaligned source, matched by id.

    Returns the alignment, the raw residues per row and the row ids.
    """
    raw_seqs, alpha = read_sequences(raw, alphabet)
    rows, _ = read_sequences(aligned, alpha.kind.value, allow_gaps=True)

    raw_by_id = {}
    for s in raw_seqs:
        if s.id in raw_by_id:
            raise InputMismatchError(f"duplicate id {s.id!r} in {raw}")
        raw_by_id[s.id] = s.residues
    seen = set()
    for r in rows:
        if r.id in seen:
            raise InputMismatchError(f"duplicate id {r.id!r} in {aligned}")
        seen.add(r.id)
    if seen != set(raw_by_id):
        missing = sorted(set(raw_by_id) - seen)[:3]
        extra = sorted(seen - set(raw_by_id))[:3]
        raise InputMismatchError(f"ids differ between files (missing {missing}, unexpected {extra})")
    for r in rows:
        if r.residues.replace(GAP, "") != raw_by_id[r.id]:
            raise InputMismatchError(f"aligned row {r.id!r} does not de-gap to its raw sequence")
    widths = {len(r.residues) for r in rows}
    if len(widths) != 1:
        raise InputMismatchError(f"ragged alignment: row widths {sorted(widths)[:5]}")
    msa = Msa.from_rows([r.residues for r in rows])
    return msa, [raw_by_id[r.id] for r in rows], [r.id for r in rows]


def report_paths(report) -> tuple[Path, Path, Path]:
    """JSON, CSV and figure paths derived from the ``--report`` argument."""
    report = Path(report)
    if report.suffix.lower() == ".csv":
        return report.with_suffix(".json"), report, report.with_suffix(".png")
    return report, report.with_suffix(".csv"), report.with_suffix(".png")


def run_evaluate(config: RunConfig, aligned, raw, report) -> MetricsReport:
    msa, raws, _ = load_alignment(aligned, raw, config.alphabet)
    result, details = evaluate_detailed(msa, raws, config.sample_size, config.pair_budget, config.seed)
    result.time_s = config.time_s
    json_path, csv_path, fig_path = report_paths(report)
    write_report(result, json_path, csv_path)
    if config.figures:
        from .plotting import report_figure

        report_figure(result, details, fig_path)
    return result
