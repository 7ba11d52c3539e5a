"""Ternary vectors over {0,1,x}: cube intersection and interaction classes.

A ternary vector denotes a cube, i.e. the set of binary points obtained
by expanding every ``x`` both ways. Each symbol is encoded in two bits
(0 -> 10, 1 -> 01, x -> 11) inside a doubled-width :class:`BitVector`,
so cube intersection is a single coordinatewise AND and an empty
coordinate shows up as the pair 00.
"""

from __future__ import annotations

import enum
import itertools

from .bitvec import BitVector, vand
from .errors import LengthMismatch, ParseError, ZeroLength

_ENC = {"0": 0b10, "1": 0b01, "x": 0b11}
_DEC = {0b10: "0", 0b01: "1", 0b11: "x", 0b00: "e"}  # 'e' = empty


class TernaryVector:
    """Immutable n-symbol vector over {0,1,x}."""

    __slots__ = ("n", "enc")

    def __init__(self, enc: BitVector):
        if enc.n % 2 != 0:
            raise ValueError("encoded width must be even")
        object.__setattr__(self, "n", enc.n // 2)
        object.__setattr__(self, "enc", enc)
        for i in range(1, self.n + 1):
            if self._pair(i) == 0b00:
                raise ParseError(f"empty symbol at coordinate {i} not allowed")

    def __setattr__(self, name, _value):
        raise AttributeError(f"TernaryVector is immutable, cannot set {name!r}")

    @classmethod
    def parse(cls, text: str) -> "TernaryVector":
        """Parse a {0,1,x} string (X accepted); underscores ignored."""
        s = text.replace("_", "").lower()
        if not s:
            raise ZeroLength("empty vector literal")
        value = 0
        for c in s:
            if c not in _ENC:
                raise ParseError(f"invalid symbol {c!r} in vector literal {text!r}")
            value = (value << 2) | _ENC[c]
        return cls(BitVector(2 * len(s), value))

    @classmethod
    def from_bitvector(cls, v: BitVector) -> "TernaryVector":
        value = 0
        for b in v.bits():
            value = (value << 2) | (_ENC["1"] if b else _ENC["0"])
        return cls(BitVector(2 * v.n, value))

    def _pair(self, i: int) -> int:
        return (self.enc.value >> (2 * (self.n - i))) & 0b11

    def symbol(self, i: int) -> str:
        """Symbol at coordinate i, 1-based from the left."""
        if not 1 <= i <= self.n:
            raise IndexError(f"coordinate {i} outside 1..{self.n}")
        return _DEC[self._pair(i)]

    def symbols(self) -> str:
        return "".join(self.symbol(i) for i in range(1, self.n + 1))

    @property
    def is_binary(self) -> bool:
        return "x" not in self.symbols()

    def to_bitvector(self) -> BitVector:
        if not self.is_binary:
            raise ValueError("vector contains x, not a binary vector")
        return BitVector.from_bits(1 if s == "1" else 0 for s in self.symbols())

    def points(self):
        """Yield every binary point covered by this cube.

        Expands each ``x`` both ways: 2^card_x points, so use on small
        vectors only.
        """
        spots = [i for i, s in enumerate(self.symbols()) if s == "x"]
        base = [1 if s == "1" else 0 for s in self.symbols()]
        for combo in itertools.product((0, 1), repeat=len(spots)):
            pt = list(base)
            for pos, b in zip(spots, combo):
                pt[pos] = b
            yield BitVector.from_bits(pt)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        return isinstance(other, TernaryVector) and self.enc == other.enc

    def __hash__(self) -> int:
        return hash(("t", self.enc))

    def __repr__(self) -> str:
        return f"TernaryVector('{self.symbols()}')"


class IntersectionResult:
    """Coordinatewise meet of two cubes; may contain empty coordinates."""

    __slots__ = ("n", "enc")

    def __init__(self, enc: BitVector):
        self.n = enc.n // 2
        self.enc = enc

    def _pair(self, i: int) -> int:
        return (self.enc.value >> (2 * (self.n - i))) & 0b11

    @property
    def is_empty(self) -> bool:
        return any(self._pair(i) == 0b00 for i in range(1, self.n + 1))

    def empty_coords(self) -> list[int]:
        return [i for i in range(1, self.n + 1) if self._pair(i) == 0b00]

    def symbols(self) -> str:
        return "".join(_DEC[self._pair(i)] for i in range(1, self.n + 1))

    def to_ternary(self) -> TernaryVector:
        if self.is_empty:
            raise ValueError("empty intersection has no ternary form")
        return TernaryVector(self.enc)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntersectionResult) and self.enc == other.enc

    def __repr__(self) -> str:
        return f"IntersectionResult('{self.symbols()}')"


class InteractionClass(enum.Enum):
    """The five set-theoretic ways two cubes can interact."""

    EQUAL = "equal"
    QUERY_INSIDE_ASSOCIATOR = "query-inside-associator"  # m strictly inside a
    ASSOCIATOR_INSIDE_QUERY = "associator-inside-query"  # a strictly inside m
    OVERLAP = "overlap"  # nonempty meet, no containment
    DISJOINT = "disjoint"  # empty meet


def intersect(m: TernaryVector, a: TernaryVector) -> IntersectionResult:
    """Cube intersection: s&s=s, x&s=s, 0&1=empty, coordinatewise."""
    if m.n != a.n:
        raise LengthMismatch(f"widths differ: {m.n} vs {a.n}")
    return IntersectionResult(vand(m.enc, a.enc))


def card_x(v: TernaryVector) -> int:
    """Number of x symbols; the cube covers 2^card_x points."""
    return v.symbols().count("x")


def empty_coord_count(m: TernaryVector, a: TernaryVector) -> int:
    """Number of coordinates whose intersection is empty."""
    return len(intersect(m, a).empty_coords())


def classify_interaction(m: TernaryVector, a: TernaryVector) -> InteractionClass:
    """Classify the pair by its intersection and containment relations."""
    r = intersect(m, a)
    if r.is_empty:
        return InteractionClass.DISJOINT
    if m == a:
        return InteractionClass.EQUAL
    if r.enc == m.enc:
        return InteractionClass.QUERY_INSIDE_ASSOCIATOR
    if r.enc == a.enc:
        return InteractionClass.ASSOCIATOR_INSIDE_QUERY
    return InteractionClass.OVERLAP
