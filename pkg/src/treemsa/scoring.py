"""Substitution tables and gap penalties."""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .seq_io import GAP, NUCLEOTIDE_SYMBOLS

DEFAULT_GAP_OPEN = -10
DEFAULT_GAP_EXTEND = -1

IUPAC_SETS = {
    "A": "A", "C": "C", "G": "G", "T": "T", "U": "T",
    "R": "AG", "Y": "CT", "S": "CG", "W": "AT", "K": "GT", "M": "AC",
    "B": "CGT", "D": "AGT", "H": "ACT", "V": "ACG",
    "N": "ACGT",
}


class GapMode(enum.Enum):
    FLAT = "flat"
    AFFINE = "affine"


class UnknownSymbolError(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class ScoringScheme:
    """Symmetric integer substitution table plus gap penalties.

    The gap symbol is a regular row/column of the table: gap vs gap scores 0
    and gap vs residue scores ``gap_extend``. This lets partial alignments be
    aligned with their existing gaps in place.
    """

    symbols: str
    table: np.ndarray
    gap_open: int = DEFAULT_GAP_OPEN
    gap_extend: int = DEFAULT_GAP_EXTEND
    mode: GapMode = GapMode.AFFINE

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.int64)
        k = len(self.symbols)
        if table.shape != (k, k):
            raise ValueError(f"table shape {table.shape} does not match {k} symbols")
        if not np.array_equal(table, table.T):
            raise ValueError("substitution table must be symmetric")
        if self.gap_open > 0 or self.gap_extend > 0:
            raise ValueError("gap penalties must be <= 0")
        if len(set(self.symbols)) != k:
            raise ValueError("duplicate symbols in table")
        if GAP not in self.symbols:
            raise ValueError("table must contain the gap symbol")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "mode", GapMode(self.mode))
        lut = np.full(256, -1, dtype=np.int64)
        for i, ch in enumerate(self.symbols):
            lut[ord(ch)] = i
            lut[ord(ch.lower())] = i
        lut.setflags(write=False)
        object.__setattr__(self, "_lut", lut)

    @property
    def gap_index(self) -> int:
        return self.symbols.index(GAP)

    @property
    def effective_gap_open(self) -> int:
        """Open surcharge actually charged by the DP (0 in flat mode)."""
        return self.gap_open if self.mode is GapMode.AFFINE else 0

    def score(self, x: str, y: str) -> int:
        try:
            i, j = self.symbols.index(x), self.symbols.index(y)
        except ValueError:
            raise UnknownSymbolError(f"symbol pair ({x!r}, {y!r}) not in substitution table")
        return int(self.table[i, j])

    def encode(self, s: str | bytes | np.ndarray) -> np.ndarray:
        """Map characters (str, bytes or uint8 array) to table indices."""
        if isinstance(s, str):
            s = s.encode("ascii", errors="replace")
        raw = np.frombuffer(s, dtype=np.uint8) if isinstance(s, bytes) else np.asarray(s, dtype=np.uint8)
        codes = self._lut[raw]
        if codes.size and codes.min() < 0:
            bad = chr(int(raw[np.argmax(codes < 0)]))
            raise UnknownSymbolError(f"symbol {bad!r} not in substitution table")
        return codes

    def with_gaps(self, gap_open=None, gap_extend=None, mode=None) -> "ScoringScheme":
        """Copy with different gap parameters; the gap row is re-derived."""
        ge = self.gap_extend if gap_extend is None else gap_extend
        table = np.array(self.table)
        g = self.gap_index
        table[g, :] = ge
        table[:, g] = ge
        table[g, g] = 0
        return ScoringScheme(
            self.symbols,
            table,
            self.gap_open if gap_open is None else gap_open,
            ge,
            self.mode if mode is None else GapMode(mode),
        )


def _with_gap_row(symbols: str, table: np.ndarray, gap_extend: int):
    k = len(symbols)
    full = np.zeros((k + 1, k + 1), dtype=np.int64)
    full[:k, :k] = table
    full[k, :k] = gap_extend
    full[:k, k] = gap_extend
    return symbols + GAP, full


def parse_matrix(text: str) -> tuple[str, np.ndarray]:
    """Parse a whitespace-separated square matrix (header row of symbols).

    Lines starting with ``#`` are comments.
    """
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty substitution matrix")
    header = lines[0]
    if any(len(sym) != 1 for sym in header):
        raise ValueError("matrix symbols must be single characters")
    k = len(header)
    table = np.zeros((k, k), dtype=np.int64)
    seen = set()
    for row in lines[1:]:
        sym, values = row[0], row[1:]
        if sym not in header or len(values) != k:
            raise ValueError(f"malformed matrix row for {sym!r}")
        table[header.index(sym)] = [int(v) for v in values]
        seen.add(sym)
    if seen != set(header):
        raise ValueError("matrix is not square")
    return "".join(header).upper(), table


def load_matrix(
    path: str | os.PathLike,
    gap_open: int = DEFAULT_GAP_OPEN,
    gap_extend: int = DEFAULT_GAP_EXTEND,
    mode: GapMode | str = GapMode.AFFINE,
) -> ScoringScheme:
    with open(path) as fh:
        symbols, table = parse_matrix(fh.read())
    return _scheme_from(symbols, table, gap_open, gap_extend, mode)


def _scheme_from(symbols, table, gap_open, gap_extend, mode) -> ScoringScheme:
    if GAP in symbols:
        return ScoringScheme(symbols, table, gap_open, gap_extend, mode).with_gaps()
    symbols, table = _with_gap_row(symbols, table, gap_extend)
    return ScoringScheme(symbols, table, gap_open, gap_extend, mode)


def iupac_table() -> tuple[str, np.ndarray]:
    """+1 where the two codes' base sets intersect, -1 otherwise."""
    syms = NUCLEOTIDE_SYMBOLS
    sets = [set(IUPAC_SETS[c]) for c in syms]
    table = np.array([[1 if a & b else -1 for b in sets] for a in sets], dtype=np.int64)
    return syms, table


def default_nucleotide_scheme(
    gap_open: int = DEFAULT_GAP_OPEN,
    gap_extend: int = DEFAULT_GAP_EXTEND,
    mode: GapMode | str = GapMode.AFFINE,
) -> ScoringScheme:
    symbols, table = iupac_table()
    return _scheme_from(symbols, table, gap_open, gap_extend, mode)


def default_protein_scheme(
    gap_open: int = DEFAULT_GAP_OPEN,
    gap_extend: int = DEFAULT_GAP_EXTEND,
    mode: GapMode | str = GapMode.AFFINE,
) -> ScoringScheme:
    text = resources.files("treemsa").joinpath("data/BLOSUM62").read_text()
    symbols, table = parse_matrix(text)
    return _scheme_from(symbols, table, gap_open, gap_extend, mode)
