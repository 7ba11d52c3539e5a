"""Interaction-quality criteria between a query vector and an associator.

Three equivalent views of the same idea, each cheaper than the last:

* :func:`quality_arith`  -- normalized rational score in [0,1] on ternary
  vectors: mean of a coordinate-match ratio and two membership ratios
  (higher is better, 1 means equal).
* :func:`criterion_arith` -- integer sum of a Hamming term and two
  non-membership counts on binary vectors (lower is better, 0 means
  equal).
* :func:`criterion_vector` -- no numbers at all: three logic vectors
  whose OR marks every coordinate of degraded interaction; compacting
  the OR with ``sls`` turns its ones count into a comparable index.

:func:`choose_best` picks the better of two compacted quality vectors
with an and/xor/or-fold sequence only, no comparison arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bitvec import BitVector, orf, sls, vand, vnot, vor, vxor
from .errors import LengthMismatch, NotCompacted
from .ternary import TernaryVector, card_x, intersect


@dataclass(frozen=True)
class QualityScoreNorm:
    """Normalized score: value = (d + mu_m_in_a + mu_a_in_m) / 3, exact."""

    value: Fraction
    d: Fraction
    mu_m_in_a: Fraction
    mu_a_in_m: Fraction


@dataclass(frozen=True)
class QualityScoreInt:
    """Integer score: value = d_card + both non-membership counts."""

    value: int
    d_card: int
    nonmembership_m_in_a: int
    nonmembership_a_in_m: int


@dataclass(frozen=True)
class QualityVector:
    """The vector form: component vectors, their OR, and its compaction."""

    d_vec: BitVector
    mu_m_in_a_vec: BitVector
    mu_a_in_m_vec: BitVector
    q_vec: BitVector
    q_compacted: BitVector


@dataclass(frozen=True)
class QualityIndex:
    """Ones count k of the compacted quality vector over width n.

    Smaller k means better interaction; k == 0 means the vectors match.
    """

    k: int
    n: int


def quality_arith(m: TernaryVector, a: TernaryVector) -> QualityScoreNorm:
    """Normalized interaction quality of two ternary vectors.

    d is the fraction of coordinates whose meet is nonempty. Each
    membership ratio is the share of one cube's points covered by the
    intersection cube, a power of two; an empty intersection has no
    common points, so both memberships drop to 0.
    """
    if m.n != a.n:
        raise LengthMismatch(f"widths differ: {m.n} vs {a.n}")
    r = intersect(m, a)
    d = Fraction(m.n - len(r.empty_coords()), m.n)
    if r.is_empty:
        mu_m_in_a = Fraction(0)
        mu_a_in_m = Fraction(0)
    else:
        cx = card_x(r.to_ternary())
        mu_m_in_a = Fraction(1, 2 ** (card_x(a) - cx))
        mu_a_in_m = Fraction(1, 2 ** (card_x(m) - cx))
    q = (d + mu_m_in_a + mu_a_in_m) / 3
    return QualityScoreNorm(q, d, mu_m_in_a, mu_a_in_m)


def criterion_arith(m: BitVector, a: BitVector) -> QualityScoreInt:
    """Integer interaction criterion on binary vectors, 0 iff equal."""
    common = vand(m, a).ones_count()
    d_card = vxor(m, a).ones_count()
    non_m_in_a = a.ones_count() - common
    non_a_in_m = m.ones_count() - common
    return QualityScoreInt(
        d_card + non_m_in_a + non_a_in_m, d_card, non_m_in_a, non_a_in_m
    )


def criterion_vector(m: BitVector, a: BitVector) -> QualityVector:
    """Pure-logic criterion: every part is a vector, never a number.

    The membership vectors mask each input with the complement of the
    shared conjunction, so a 1 marks a coordinate where that input
    sticks out of the overlap.
    """
    shared = vand(m, a)
    d_vec = vxor(m, a)
    mu_m_in_a_vec = vand(a, vnot(shared))
    mu_a_in_m_vec = vand(m, vnot(shared))
    q_vec = vor(d_vec, vor(mu_m_in_a_vec, mu_a_in_m_vec))
    return QualityVector(d_vec, mu_m_in_a_vec, mu_a_in_m_vec, q_vec, sls(q_vec))


def quality_index(m: BitVector, a: BitVector) -> QualityIndex:
    """(ones of the quality vector, n); smaller k is better."""
    qv = criterion_vector(m, a)
    return QualityIndex(qv.q_vec.ones_count(), m.n)


def choose_best(q1: BitVector, q2: BitVector) -> tuple[BitVector, int]:
    """Pick the better of two compacted quality vectors.

    flag = orf((q1 AND q2) XOR q1): zero exactly when q1's ones are a
    subset of q2's, i.e. q1 is at least as good. Returns (winner, flag);
    equal inputs keep q1. Inputs must already be prefix vectors.
    """
    if q1.n != q2.n:
        raise LengthMismatch(f"widths differ: {q1.n} vs {q2.n}")
    for name, q in (("q1", q1), ("q2", q2)):
        if not q.is_prefix():
            raise NotCompacted(f"{name} = {q.to01()} is not a compacted vector")
    flag = orf(vxor(vand(q1, q2), q1))
    return (q1 if flag == 0 else q2), flag
