"""FASTA reading/writing, alphabets and de-duplication."""

from __future__ import annotations

import enum
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

GAP = "-"

NUCLEOTIDE_SYMBOLS = "ACGTURYSWKMBDHVN"
PROTEIN_SYMBOLS = "ACDEFGHIKLMNPQRSTVWY" + "BZX*"

FASTA_LINE_WIDTH = 80


class AlphabetKind(enum.Enum):
    NUCLEOTIDE = "nt"
    PROTEIN = "aa"


@dataclass(frozen=True)
class Alphabet:
    kind: AlphabetKind
    symbols: str
    gap_symbol: str = GAP

    def __post_init__(self):
        if self.gap_symbol in self.symbols:
            raise ValueError("gap symbol must not be a residue symbol")

    def __contains__(self, ch: str) -> bool:
        return len(ch) == 1 and ch in self.symbols


NUCLEOTIDE = Alphabet(AlphabetKind.NUCLEOTIDE, NUCLEOTIDE_SYMBOLS)
PROTEIN = Alphabet(AlphabetKind.PROTEIN, PROTEIN_SYMBOLS)


def alphabet_for(kind: AlphabetKind | str) -> Alphabet:
    kind = AlphabetKind(kind)
    return NUCLEOTIDE if kind is AlphabetKind.NUCLEOTIDE else PROTEIN


@dataclass(frozen=True)
class Sequence:
    id: str
    residues: str
    original_index: int
    description: str = ""

    def __len__(self):
        return len(self.residues)


class FastaFormatError(ValueError):
    pass


class AlphabetError(ValueError):
    def __init__(self, seq_id: str, line: int, char: str):
        super().__init__(
            f"sequence {seq_id!r}: character {char!r} on line {line} is not in the alphabet"
        )
        self.seq_id = seq_id
        self.line = line
        self.char = char


def _records(lines: Iterable[str], source: str):
    """Yield ``(header, [(lineno, chunk), ...])`` for each record."""
    header = None
    chunks: list[tuple[int, str]] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(">"):
            if header is not None:
                yield header, chunks
            header = line[1:]
            chunks = []
        elif header is None:
            raise FastaFormatError(f"{source}:{lineno}: sequence data before first header")
        else:
            chunks.append((lineno, line))
    if header is not None:
        yield header, chunks


def parse_fasta(
    path: str | os.PathLike,
    alphabet: Alphabet | None = None,
    allow_gaps: bool = False,
) -> list[Sequence]:
    """Read a (possibly multi-line) FASTA file.

    Residues are uppercased. With ``alphabet=None`` no symbol check is done.
    ``allow_gaps`` admits the gap symbol, for reading aligned files.
    """
    path = Path(path)
    with open(path) as fh:
        text = fh.read()
    if not text.strip():
        raise FastaFormatError(f"{path}: empty file")

    allowed = None
    if alphabet is not None:
        allowed = set(alphabet.symbols)
        if allow_gaps:
            allowed.add(alphabet.gap_symbol)

    seqs = []
    for header, chunks in _records(text.splitlines(), str(path)):
        parts = header.split(None, 1)
        if not parts:
            raise FastaFormatError(f"{path}: record with empty header")
        seq_id = parts[0]
        description = parts[1] if len(parts) > 1 else ""
        pieces = []
        for lineno, chunk in chunks:
            chunk = chunk.upper()
            if allowed is not None:
                for ch in chunk:
                    if ch not in allowed:
                        raise AlphabetError(seq_id, lineno, ch)
            elif not allow_gaps and GAP in chunk:
                raise AlphabetError(seq_id, lineno, GAP)
            pieces.append(chunk)
        residues = "".join(pieces)
        if not residues:
            raise FastaFormatError(f"{path}: record {seq_id!r} has no residues")
        if not allow_gaps and GAP in residues:
            raise AlphabetError(seq_id, chunks[0][0], GAP)
        seqs.append(Sequence(seq_id, residues, len(seqs), description))
    return seqs


def detect_alphabet(seqs: Iterable[Sequence | str], threshold: float = 0.9) -> Alphabet:
    """Guess the alphabet from a residue census: mostly ACGTUN means nucleotide."""
    counts: Counter = Counter()
    for s in seqs:
        counts.update(s.residues if isinstance(s, Sequence) else s)
    counts.pop(GAP, None)
    total = sum(counts.values())
    if total == 0:
        return NUCLEOTIDE
    nt = sum(counts[c] for c in "ACGTUN")
    return NUCLEOTIDE if nt / total > threshold else PROTEIN


@dataclass
class DedupMap:
    """Representative id -> ids of the exact duplicates it stands for."""

    groups: dict[str, list[str]] = field(default_factory=dict)

    def __len__(self):
        return len(self.groups)

    def __getitem__(self, rep_id):
        return self.groups[rep_id]

    def get(self, rep_id, default=None):
        return self.groups.get(rep_id, default)

    def duplicate_count(self) -> int:
        return sum(len(v) for v in self.groups.values())

    def write_tsv(self, path: str | os.PathLike) -> None:
        with open(path, "w") as fh:
            fh.write("representative_id\tduplicate_id\n")
            for rep, dups in self.groups.items():
                for dup in dups:
                    fh.write(f"{rep}\t{dup}\n")

    @classmethod
    def read_tsv(cls, path: str | os.PathLike) -> "DedupMap":
        groups: dict[str, list[str]] = {}
        with open(path) as fh:
            next(fh, None)
            for line in fh:
                line = line.rstrip("\n")
                if line:
                    rep, dup = line.split("\t")
                    groups.setdefault(rep, []).append(dup)
        return cls(groups)


def deduplicate(seqs: list[Sequence]) -> tuple[list[Sequence], DedupMap]:
    """Keep the first occurrence of every distinct residue string.

    Comparison is case-insensitive; order of the survivors is preserved.
    """
    first: dict[str, Sequence] = {}
    reps = []
    groups: dict[str, list[str]] = {}
    for s in seqs:
        key = s.residues.upper()
        rep = first.get(key)
        if rep is None:
            first[key] = s
            reps.append(s)
        else:
            groups.setdefault(rep.id, []).append(s.id)
    return reps, DedupMap(groups)


def write_fasta(
    rows,
    ids: list[str],
    path: str | os.PathLike,
    descriptions: list[str] | None = None,
    line_width: int = FASTA_LINE_WIDTH,
) -> None:
    """Write one record per row. ``rows`` is a list of strings or an ``Msa``."""
    if hasattr(rows, "rows"):
        rows = rows.rows
    rows = list(rows)
    if len(rows) != len(ids):
        raise ValueError(f"{len(rows)} rows but {len(ids)} ids")
    if descriptions is not None and len(descriptions) != len(ids):
        raise ValueError("descriptions must parallel ids")
    with open(path, "w") as fh:
        for k, (row, seq_id) in enumerate(zip(rows, ids)):
            desc = descriptions[k] if descriptions else ""
            fh.write(f">{seq_id} {desc}\n" if desc else f">{seq_id}\n")
            for start in range(0, len(row), line_width):
                fh.write(row[start:start + line_width])
                fh.write("\n")
