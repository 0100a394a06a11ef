"""Core objects: bases, form sequences, diagonal lattices, convex bodies.

A *form sequence* is the data the criteria consume: for each index n a
scale Q_n, integer coefficients (l_1,...,l_p) of a linear form, and a
divisor vector (d_1,...,d_p) with d_i | l_i.  The basis vectors against
which forms are evaluated are e_i = (0,...,1,...,0, -xi_i) for i < p and
e_p = (xi_1,...,xi_{p-1}, 1), so

    L_n(e_i) = l_{i,n} - l_{p,n} xi_i        (i < p)
    L_n(e_p) = sum_j l_{j,n} xi_j + l_{p,n}

All divisibility and membership checks are exact integer arithmetic; only
the evaluations against irrational xi go through ball enclosures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence, Union

from .numerics import (
    BallReal,
    RealConstant,
    TriBool,
    tri_compare,
)

__all__ = [
    "Basis",
    "FormRecord",
    "FormSequence",
    "DiagonalLattice",
    "DualPoint",
    "Bound",
    "ConvexBody",
    "ValidationError",
    "MissingRecord",
    "eval_at_basis",
    "lattice_membership",
    "dual_membership",
    "divisor_chain_check",
]


class ValidationError(ValueError):
    """A structural invariant of the model data is broken."""


class MissingRecord(KeyError):
    """No record with the requested index."""


@dataclass(frozen=True)
class Basis:
    """The p-1 real targets xi_i, held as refinable handles."""

    xi: tuple[RealConstant, ...]

    def __post_init__(self):
        if len(self.xi) < 1:
            raise ValidationError("need at least one xi (p >= 2)")

    @property
    def p(self) -> int:
        return len(self.xi) + 1

    @property
    def exact_xi(self) -> Optional[tuple[Fraction, ...]]:
        """All-rational xi as exact fractions, or None if any is irrational."""
        vals = tuple(h.exact for h in self.xi)
        return vals if all(v is not None for v in vals) else None

    def xi_balls(self, prec: int) -> tuple[BallReal, ...]:
        return tuple(h.at(prec) for h in self.xi)


@dataclass(frozen=True)
class FormRecord:
    n: int
    Q: int
    ell: tuple[int, ...]
    delta: tuple[int, ...]

    def __post_init__(self):
        if self.Q < 1:
            raise ValidationError(f"record n={self.n}: Q must be >= 1")
        if len(self.ell) != len(self.delta):
            raise ValidationError(f"record n={self.n}: ell/delta length mismatch")
        if len(self.ell) < 2:
            raise ValidationError(f"record n={self.n}: need p >= 2 coefficients")
        for i, d in enumerate(self.delta, start=1):
            if d < 1:
                raise ValidationError(f"record n={self.n}: delta_{i} = {d} < 1")
            if self.ell[i - 1] % d != 0:
                raise ValidationError(
                    f"record n={self.n}: delta_{i} = {d} does not divide ell_{i} = {self.ell[i-1]}")

    @property
    def p(self) -> int:
        return len(self.ell)

    def sup_norm(self) -> int:
        return max(abs(c) for c in self.ell)


class FormSequence:
    """Validated, index-ordered sequence of form records."""

    def __init__(self, records: Iterable[FormRecord],
                 provenance: Optional[dict] = None):
        recs = sorted(records, key=lambda r: r.n)
        if not recs:
            raise ValidationError("empty sequence")
        p = recs[0].p
        last_n = None
        last_q = 0
        for r in recs:
            if r.p != p:
                raise ValidationError(f"record n={r.n}: p={r.p} differs from {p}")
            if r.n == last_n:
                raise ValidationError(f"duplicate record index n={r.n}")
            if r.Q <= last_q:
                raise ValidationError(
                    f"record n={r.n}: Q={r.Q} not strictly greater than previous Q={last_q}")
            last_n, last_q = r.n, r.Q
        self.records: tuple[FormRecord, ...] = tuple(recs)
        self.p = p
        self.provenance = provenance
        self._by_n = {r.n: r for r in recs}

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[FormRecord]:
        return iter(self.records)

    def record(self, n: int) -> FormRecord:
        try:
            return self._by_n[n]
        except KeyError:
            raise MissingRecord(f"no record with n={n}") from None

    def has(self, n: int) -> bool:
        return n in self._by_n

    @property
    def ns(self) -> tuple[int, ...]:
        return tuple(r.n for r in self.records)

    @property
    def Qs(self) -> tuple[int, ...]:
        return tuple(r.Q for r in self.records)

    def lattice(self, n: int) -> "DiagonalLattice":
        return DiagonalLattice(self.record(n).delta)


@dataclass(frozen=True)
class DiagonalLattice:
    """The sublattice  (+) delta_i Z  of Z^p, and its dual  (+) (1/delta_i) Z."""

    delta: tuple[int, ...]

    def __post_init__(self):
        if any(d < 1 for d in self.delta):
            raise ValidationError("lattice divisors must be >= 1")

    @property
    def p(self) -> int:
        return len(self.delta)

    def det(self) -> int:
        out = 1
        for d in self.delta:
            out *= d
        return out

    def dual_det(self) -> Fraction:
        return Fraction(1, self.det())

    def contains(self, vec: Sequence[int]) -> bool:
        if len(vec) != self.p:
            raise ValidationError("dimension mismatch")
        return all(c % d == 0 for c, d in zip(vec, self.delta))

    def dual_contains(self, vec: Sequence[Union[int, Fraction]]) -> bool:
        if len(vec) != self.p:
            raise ValidationError("dimension mismatch")
        return all((Fraction(a) * d).denominator == 1 for a, d in zip(vec, self.delta))


@dataclass(frozen=True)
class DualPoint:
    """Rational vector a, intended to satisfy delta_i a_i in Z."""

    a: tuple[Fraction, ...]

    @property
    def p(self) -> int:
        return len(self.a)

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.a)

    def to_json(self) -> list[str]:
        return [f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
                for x in self.a]

    @staticmethod
    def from_json(items: Sequence[str]) -> "DualPoint":
        return DualPoint(tuple(Fraction(s) for s in items))


def lattice_membership(vec: Sequence[int], lattice: DiagonalLattice) -> bool:
    """Exact check that an integer vector lies in the diagonal sublattice."""
    return lattice.contains(vec)


def dual_membership(point: Union[DualPoint, Sequence[Fraction]],
                    lattice: DiagonalLattice) -> bool:
    """Exact check that delta_i * a_i is an integer for every coordinate."""
    vec = point.a if isinstance(point, DualPoint) else tuple(point)
    return lattice.dual_contains(vec)


def divisor_chain_check(seq: FormSequence) -> list[tuple[int, int]]:
    """Violations of the divisor chain d_{i,n} | d_{i,n+1}.

    Returns (i, n) pairs, i 1-based, n the index of the earlier record of the
    offending consecutive pair.  Empty list means the chain property holds.
    """
    out = []
    for prev, cur in zip(seq.records, seq.records[1:]):
        for i in range(seq.p):
            if cur.delta[i] % prev.delta[i] != 0:
                out.append((i + 1, prev.n))
    return out


def eval_at_basis(seq: FormSequence, basis: Basis, n: int, i: int,
                  prec: int = 64) -> BallReal:
    """Enclosure of L_n(e_i); exact (radius 0) whenever all xi are rational.

    i is 1-based: i < p gives l_i - l_p xi_i, i = p gives sum l_j xi_j + l_p.
    """
    if basis.p != seq.p:
        raise ValidationError(f"basis p={basis.p} != sequence p={seq.p}")
    if not 1 <= i <= seq.p:
        raise ValidationError(f"i={i} out of range 1..{seq.p}")
    rec = seq.record(n)
    p = seq.p
    exact = basis.exact_xi
    if exact is not None:
        if i < p:
            val = Fraction(rec.ell[i - 1]) - rec.ell[p - 1] * exact[i - 1]
        else:
            val = sum((Fraction(rec.ell[j]) * exact[j] for j in range(p - 1)),
                      Fraction(rec.ell[p - 1]))
        return BallReal.exact(val, prec)
    balls = basis.xi_balls(prec)
    if i < p:
        return BallReal.exact(rec.ell[i - 1], prec) - balls[i - 1] * rec.ell[p - 1]
    acc = BallReal.exact(rec.ell[p - 1], prec)
    for j in range(p - 1):
        acc = acc + balls[j] * rec.ell[j]
    return acc


# ---------------------------------------------------------------------------
# convex bodies
# ---------------------------------------------------------------------------

def _tri_less(val: BallReal, bound: BallReal, strict: bool) -> TriBool:
    """Certified 'val < bound' (strict) or 'val <= bound' (non-strict)."""
    if strict:
        if val.upper < bound.lower:
            return TriBool.TRUE
        if val.lower >= bound.upper:
            return TriBool.FALSE
        return TriBool.UNKNOWN
    gt = tri_compare(val, bound)  # val > bound?
    if gt is TriBool.TRUE:
        return TriBool.FALSE
    if gt is TriBool.FALSE:
        return TriBool.TRUE
    return TriBool.UNKNOWN


@dataclass(frozen=True)
class Bound:
    value: BallReal
    strict: bool  # True: |coordinate| < value; False: <=


@dataclass(frozen=True)
class ConvexBody:
    """Symmetric box in either the coordinate or the sheared frame.

    frame == "coordinate" (the K_Q / C shape): for each labelled coordinate
    j in coords[:-1] the constraint is |a_j| vs bounds[k]; the final bound
    constrains |sum_j a_j xi_j + a_p|.

    frame == "sheared" (the K_n shape): constraints |x_p xi_j - x_j| vs
    bounds[k] for j in coords[:-1], final bound constrains |x_p|.

    Both frames differ by a unimodular shear, so the volume is
    2^dim * prod(bounds) in either case.
    """

    frame: str
    coords: tuple[int, ...]  # 1-based labels; last entry must be p
    bounds: tuple[Bound, ...]

    def __post_init__(self):
        if self.frame not in ("coordinate", "sheared"):
            raise ValidationError(f"unknown frame {self.frame!r}")
        if len(self.coords) != len(self.bounds):
            raise ValidationError("coords/bounds length mismatch")
        if len(self.coords) < 1:
            raise ValidationError("empty body")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def volume(self) -> BallReal:
        out = BallReal.exact(1 << self.dim, 64)
        for b in self.bounds:
            out = out * b.value
        return out

    def constraint_value(self, k: int, point: Sequence[Fraction], basis: Basis,
                         prec: int = 64) -> BallReal:
        """Enclosure of the k-th constraint's left-hand side |...| at the point."""
        p = basis.p
        label = self.coords[k]
        point = [Fraction(x) for x in point]
        exact = basis.exact_xi
        if self.frame == "coordinate":
            if label < p:
                return BallReal.exact(abs(point[label - 1]), prec)
            if exact is not None:
                s = sum((point[j] * exact[j] for j in range(p - 1)), point[p - 1])
                return BallReal.exact(abs(s), prec)
            balls = basis.xi_balls(prec)
            acc = BallReal.exact(point[p - 1], prec)
            for j in range(p - 1):
                acc = acc + balls[j] * point[j]
            return abs(acc)
        if label < p:
            if exact is not None:
                s = point[p - 1] * exact[label - 1] - point[label - 1]
                return BallReal.exact(abs(s), prec)
            balls = basis.xi_balls(prec)
            return abs(balls[label - 1] * point[p - 1]
                       - BallReal.exact(point[label - 1], prec))
        return BallReal.exact(abs(point[p - 1]), prec)

    def contains(self, point: Sequence[Fraction], basis: Basis,
                 prec: int = 64) -> TriBool:
        """Certified membership of a rational point (full p-vector)."""
        if len(point) != basis.p:
            raise ValidationError("point dimension mismatch")
        unknown = False
        for k, bound in enumerate(self.bounds):
            val = self.constraint_value(k, point, basis, prec)
            inside = _tri_less(val, bound.value, bound.strict)
            if inside is TriBool.FALSE:
                return TriBool.FALSE
            if inside is TriBool.UNKNOWN:
                unknown = True
        return TriBool.UNKNOWN if unknown else TriBool.TRUE
