"""Associative tables and the search / recognition / decision procedures.

A table is an ordered list of associator rows, optionally labeled.
Binary tables (no ``x`` anywhere) are scored with the vector criterion,
where the winner minimizes the quality index k and the selection itself
is the nonarithmetic and/xor/or-fold of compacted quality vectors.
Ternary tables are scored with the normalized rational metric, where
the winner maximizes Q. All optimal rows are reported, in ascending row
order; row indices in results are 1-based.

Table file format (UTF-8 text):
  * ``#`` starts a comment to end of line, blank lines are ignored;
  * each remaining line is either a bare vector or ``label<TAB>vector``;
  * vector symbols are {0,1,x} and all rows must share one width;
  * labels, when present, must be unique.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

from .bitvec import BitVector
from .errors import (
    EmptyTable,
    LengthMismatch,
    ModeMismatch,
    ParseError,
    WidthMismatch,
    ZeroLength,
)
from .quality import (
    QualityIndex,
    QualityScoreNorm,
    choose_best,
    criterion_vector,
    quality_arith,
    quality_index,
)
from .ternary import TernaryVector

RowScore = Union[QualityIndex, QualityScoreNorm]


class Mode(enum.Enum):
    BINARY = "binary"
    TERNARY = "ternary"


@dataclass
class AssocTable:
    """Matrix of associators with optional per-row labels."""

    name: str
    cols: int
    rows: list[TernaryVector]
    labels: list[Optional[str]] = field(default_factory=list)

    def __post_init__(self):
        if not self.rows:
            raise EmptyTable(f"table {self.name!r} has no rows")
        if not self.labels:
            self.labels = [None] * len(self.rows)
        for row in self.rows:
            if row.n != self.cols:
                raise WidthMismatch(
                    f"row width {row.n} differs from table width {self.cols}"
                )
        seen = set()
        for label in self.labels:
            if label is None:
                continue
            if label in seen:
                raise ParseError(f"duplicate row label {label!r}")
            seen.add(label)

    @classmethod
    def from_rows(cls, rows, labels=None, name="table") -> "AssocTable":
        """Build from TernaryVector/BitVector rows or vector strings."""
        parsed = []
        for row in rows:
            if isinstance(row, TernaryVector):
                parsed.append(row)
            elif isinstance(row, BitVector):
                parsed.append(TernaryVector.from_bitvector(row))
            else:
                parsed.append(TernaryVector.parse(row))
        if not parsed:
            raise EmptyTable(f"table {name!r} has no rows")
        return cls(name, parsed[0].n, parsed, list(labels) if labels else [])

    @property
    def is_binary(self) -> bool:
        return all(row.is_binary for row in self.rows)

    def row_bits(self) -> list[BitVector]:
        return [row.to_bitvector() for row in self.rows]

    def __len__(self) -> int:
        return len(self.rows)


@dataclass
class QueryResult:
    """Outcome of a table query.

    ``per_row`` holds one score per row: a :class:`QualityIndex` in
    binary mode, a :class:`QualityScoreNorm` in ternary mode.
    ``best_index`` is the winning score in the same convention and
    ``best_rows`` lists every optimal (1-based row, label) pair.
    """

    mode: Mode
    best_rows: list[tuple[int, Optional[str]]]
    best_index: RowScore
    per_row: list[RowScore]


def load_table(source, name="table") -> AssocTable:
    """Parse a table from a file object, iterable of lines, or a string."""
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = source
    rows: list[TernaryVector] = []
    labels: list[Optional[str]] = []
    width = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "\t" in line:
            label, _, vec_text = line.partition("\t")
            label = label.strip()
            vec_text = vec_text.strip()
            if not label:
                raise ParseError("empty label before tab", line=lineno)
        else:
            label, vec_text = None, line
        try:
            row = TernaryVector.parse(vec_text)
        except (ParseError, ZeroLength) as exc:
            raise ParseError(str(exc), line=lineno) from None
        if width is None:
            width = row.n
        elif row.n != width:
            raise WidthMismatch(
                f"line {lineno}: row width {row.n} differs from {width}"
            )
        if label is not None and label in [l for l in labels if l is not None]:
            raise ParseError(f"duplicate row label {label!r}", line=lineno)
        rows.append(row)
        labels.append(label)
    if not rows:
        raise EmptyTable(f"table {name!r} has no rows")
    return AssocTable(name, width, rows, labels)


def _as_ternary(m) -> TernaryVector:
    if isinstance(m, TernaryVector):
        return m
    if isinstance(m, BitVector):
        return TernaryVector.from_bitvector(m)
    raise TypeError(f"expected a vector, got {type(m).__name__}")


def _check_query(table: AssocTable, m) -> TernaryVector:
    mt = _as_ternary(m)
    if mt.n != table.cols:
        raise LengthMismatch(
            f"query width {mt.n} differs from table width {table.cols}"
        )
    if table.is_binary and not mt.is_binary:
        raise ModeMismatch("ternary query against a binary table")
    return mt


def query(table: AssocTable, m) -> QueryResult:
    """Find the best-interacting row(s) for query vector ``m``.

    Binary mode selects by folding compacted quality vectors through
    :func:`lamp.quality.choose_best`, which keeps the earlier row on
    ties; all rows attaining the winning score are then reported.
    """
    mt = _check_query(table, m)
    if table.is_binary:
        mb = mt.to_bitvector()
        scores = [quality_index(mb, row) for row in table.row_bits()]
        best_vec = None
        for row in table.row_bits():
            cand = criterion_vector(mb, row).q_compacted
            if best_vec is None:
                best_vec = cand
            else:
                best_vec, _flag = choose_best(best_vec, cand)
        best_k = best_vec.ones_count()
        winners = [
            (i + 1, table.labels[i])
            for i, s in enumerate(scores)
            if s.k == best_k
        ]
        return QueryResult(Mode.BINARY, winners, QualityIndex(best_k, table.cols), scores)
    scores = [quality_arith(mt, row) for row in table.rows]
    best_q = max(s.value for s in scores)
    winners = [
        (i + 1, table.labels[i]) for i, s in enumerate(scores) if s.value == best_q
    ]
    best = scores[winners[0][0] - 1]
    return QueryResult(Mode.TERNARY, winners, best, scores)


def rank(table: AssocTable, m, k: int) -> list[tuple[int, RowScore]]:
    """First k rows best-first; ties broken by ascending row index."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    result = query(table, m)
    if result.mode is Mode.BINARY:
        order = sorted(
            enumerate(result.per_row, start=1), key=lambda p: (p[1].k, p[0])
        )
    else:
        order = sorted(
            enumerate(result.per_row, start=1), key=lambda p: (-p[1].value, p[0])
        )
    return order[:k]


def diagnose(dictionary: AssocTable, response: BitVector) -> QueryResult:
    """Match a circuit response against a labeled fault dictionary.

    A plain :func:`query` restricted to binary signature tables; the
    winners carry the fault labels.
    """
    if not dictionary.is_binary:
        raise ModeMismatch("fault dictionary must contain binary signatures")
    return query(dictionary, response)
