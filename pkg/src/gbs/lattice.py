"""
Subgroups of Z/2 + Z^I for a finite, ordered prime set I.

A subgroup is stored by the Hermite normal form of its preimage in
Z^(1+|I|): coordinate 0 is the sign bit and the relation row (2, 0, ..., 0)
is always adjoined, so the Z/2 factor needs no separate treatment.  Row
reduction is exact (Python integers) and keeps a transform so that
membership tests can return the combination that proves them.

    >>> from gbs.core import AffineVector
    >>> H = span([AffineVector(0, {2: 2, 3: 1}), AffineVector(0, {2: 1, 3: 1})])
    >>> member(H, AffineVector(0, {3: 1}))
    True
    >>> member(span([AffineVector(0, {2: 2})]), AffineVector(0, {2: 1}))
    False
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .core import AffineVector

__all__ = [
    "LatticeSubgroup",
    "add",
    "coset_eq",
    "coset_rep",
    "coset_translate_exists",
    "equal",
    "from_coords",
    "hnf",
    "member",
    "reindex",
    "relations",
    "solve",
    "span",
    "to_coords",
]

Row = tuple[int, ...]


def to_coords(v: AffineVector, primes: Sequence[int]) -> Row:
    exps = v.exps
    extra = set(exps) - set(primes)
    if extra:
        raise ValueError(f"support {sorted(extra)} outside the prime set {list(primes)}")
    return (v.sign,) + tuple(exps.get(p, 0) for p in primes)


def from_coords(row: Sequence[int], primes: Sequence[int]) -> AffineVector:
    return AffineVector(row[0], dict(zip(primes, row[1:])))


def _relation(width: int) -> list[int]:
    return [2] + [0] * (width - 1)


def hnf(rows: Sequence[Sequence[int]], width: int) -> tuple[list[list[int]], list[list[int]]]:
    """Row Hermite normal form with transform.

    Returns (H, T) where H holds the nonzero rows of the normal form (pivots
    positive, entries above each pivot reduced into [0, pivot)) and
    ``H[i] = sum_j T[i][j] * rows[j]``.
    """
    m, t, r = _hnf_full(rows, width)
    return m[:r], t[:r]


def _hnf_full(rows: Sequence[Sequence[int]], width: int) -> tuple[list[list[int]], list[list[int]], int]:
    m = [list(r) for r in rows]
    t = [[int(i == j) for j in range(len(rows))] for i in range(len(rows))]
    r = 0
    pivots = []
    for col in range(width):
        while True:
            nz = [i for i in range(r, len(m)) if m[i][col] != 0]
            if not nz:
                break
            best = min(nz, key=lambda i: abs(m[i][col]))
            m[r], m[best] = m[best], m[r]
            t[r], t[best] = t[best], t[r]
            done = True
            for i in range(r + 1, len(m)):
                if m[i][col]:
                    q = m[i][col] // m[r][col]
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    t[i] = [a - q * b for a, b in zip(t[i], t[r])]
                    if m[i][col]:
                        done = False
            if done:
                break
        if r < len(m) and m[r][col] != 0:
            if m[r][col] < 0:
                m[r] = [-a for a in m[r]]
                t[r] = [-a for a in t[r]]
            pivots.append((r, col))
            r += 1
    for r_i, col in pivots:
        p = m[r_i][col]
        for i in range(r_i):
            q = m[i][col] // p
            if q:
                m[i] = [a - q * b for a, b in zip(m[i], m[r_i])]
                t[i] = [a - q * b for a, b in zip(t[i], t[r_i])]
    return m, t, r


@dataclass(frozen=True)
class LatticeSubgroup:
    """A subgroup given by its canonical generator matrix.

    ``rows`` is the Hermite normal form over Z^(1+|I|) of the generators
    together with the relation row (2, 0, ..., 0).  ``gens`` keeps the
    generators the subgroup was built from, for witness extraction.
    """

    primes: tuple[int, ...]
    rows: tuple[Row, ...]
    gens: tuple[Row, ...] = ()
    transform: tuple[Row, ...] = ()

    @property
    def width(self) -> int:
        return 1 + len(self.primes)

    def pivots(self) -> list[tuple[int, int]]:
        """(row index, column) of each pivot."""
        out = []
        for i, row in enumerate(self.rows):
            for c, x in enumerate(row):
                if x:
                    out.append((i, c))
                    break
        return out

    def generators(self) -> list[AffineVector]:
        return [from_coords(r, self.primes) for r in self.rows]

    def rank(self) -> int:
        """Rank of the free part (the relation row accounts for one pivot)."""
        return sum(1 for _, c in self.pivots() if c != 0)

    def contains_sign(self) -> bool:
        return any(c == 0 and self.rows[i][0] == 1 for i, c in self.pivots())

    def to_text(self) -> str:
        head = "primes " + " ".join(str(p) for p in self.primes)
        return "\n".join([head] + [" ".join(str(x) for x in r) for r in self.rows]) + "\n"

    def __str__(self) -> str:
        zero = AffineVector()
        return "<" + ", ".join(str(g) for g in self.generators() if g != zero) + ">"


def _primes_of(vectors: Iterable[AffineVector]) -> tuple[int, ...]:
    ps: set[int] = set()
    for v in vectors:
        ps |= v.primes()
    return tuple(sorted(ps))


def span(vectors: Iterable[AffineVector], primes: Iterable[int] | None = None) -> LatticeSubgroup:
    vectors = list(vectors)
    ps = tuple(sorted(set(primes))) if primes is not None else _primes_of(vectors)
    width = 1 + len(ps)
    gens = [to_coords(v, ps) for v in vectors]
    rows, t = hnf(gens + [tuple(_relation(width))], width)
    return LatticeSubgroup(ps, tuple(tuple(r) for r in rows), tuple(gens), tuple(tuple(x) for x in t))


def reindex(h: LatticeSubgroup, primes: Iterable[int]) -> LatticeSubgroup:
    """The same subgroup viewed inside a larger prime set."""
    ps = tuple(sorted(set(primes) | set(h.primes)))
    if ps == h.primes:
        return h
    return span([from_coords(g, h.primes) for g in h.gens], ps)


def add(h1: LatticeSubgroup, h2: LatticeSubgroup) -> LatticeSubgroup:
    ps = set(h1.primes) | set(h2.primes)
    vs = [from_coords(g, h1.primes) for g in h1.gens] + [from_coords(g, h2.primes) for g in h2.gens]
    return span(vs, ps)


def _reduce(h: LatticeSubgroup, row: Row) -> tuple[list[int], list[int]]:
    """Reduce ``row`` by the normal form; return (remainder, multipliers per HNF row)."""
    v = list(row)
    qs = [0] * len(h.rows)
    for i, c in h.pivots():
        p = h.rows[i][c]
        q = v[c] // p
        if q:
            v = [a - q * b for a, b in zip(v, h.rows[i])]
            qs[i] = q
    return v, qs


def _outside(h: LatticeSubgroup, v: AffineVector) -> bool:
    return not v.primes() <= set(h.primes)


def solve(h: LatticeSubgroup, v: AffineVector) -> list[int] | None:
    """Integer coefficients c with sum c_i gens_i = v (sign mod 2), or None."""
    if _outside(h, v):
        return None
    rem, qs = _reduce(h, to_coords(v, h.primes))
    if rem[0] % 2 or any(rem[1:]):
        return None
    ngens = len(h.gens)
    coeffs = [0] * ngens
    for q, trow in zip(qs, h.transform):
        for j in range(ngens):
            coeffs[j] += q * trow[j]
    return coeffs


def relations(vectors: Sequence[AffineVector], primes: Iterable[int] | None = None) -> list[list[int]]:
    """A basis of the integer relations sum c_i v_i = 0 (the sign counted mod 2)."""
    vectors = list(vectors)
    ps = tuple(sorted(set(primes))) if primes is not None else _primes_of(vectors)
    width = 1 + len(ps)
    rows = [to_coords(v, ps) for v in vectors] + [tuple(_relation(width))]
    _, t, r = _hnf_full(rows, width)
    out = [row[: len(vectors)] for row in t[r:]]
    return [row for row in out if any(row)]


def member(h: LatticeSubgroup, v: AffineVector) -> bool:
    if _outside(h, v):
        return False
    rem, _ = _reduce(h, to_coords(v, h.primes))
    return not any(rem)


def coset_rep(h: LatticeSubgroup, v: AffineVector) -> AffineVector:
    """Canonical representative of v + H (v may use primes outside H)."""
    if _outside(h, v):
        h = reindex(h, v.primes())
    rem, _ = _reduce(h, to_coords(v, h.primes))
    return from_coords(rem, h.primes)


def equal(h1: LatticeSubgroup, h2: LatticeSubgroup) -> bool:
    ps = set(h1.primes) | set(h2.primes)
    return reindex(h1, ps).rows == reindex(h2, ps).rows


def coset_eq(h: LatticeSubgroup, v1: AffineVector, v2: AffineVector) -> bool:
    return member(h, v1 - v2)


def coset_translate_exists(
    h: LatticeSubgroup, diffs: Sequence[AffineVector], l_support: Iterable[int], include_sign: bool
) -> bool:
    """Is there u supported on ``l_support`` (plus the sign if allowed) with d_i - u in H for all i?"""
    diffs = list(diffs)
    if not diffs:
        return True
    if any(not member(h, d - diffs[0]) for d in diffs[1:]):
        return False
    units = [AffineVector(0, {p: 1}) for p in l_support]
    if include_sign:
        units.append(AffineVector(1))
    ps = set(h.primes) | diffs[0].primes() | set(l_support)
    big = add(h, span(units, ps))
    return member(big, diffs[0])
