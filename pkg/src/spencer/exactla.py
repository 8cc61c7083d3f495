"""Exact rational linear algebra over enumerated bases of graded tensor spaces.

All arithmetic is over the rationals: scalars are ``fractions.Fraction``,
elimination is fraction-free on gcd-reduced integer rows, and every subspace
is kept in canonical reduced row echelon form, so equality of subspaces is
literal equality of their basis matrices.  No floating point anywhere.

Frozen basis conventions (all stored expected values depend on these):

* ``S^d`` of an n-dimensional space: exponent multi-indices of length n and
  total degree d, listed in descending lexicographic order within the fixed
  degree.  For n=2, d=3 this is (3,0), (2,1), (1,2), (0,3).
* ``Lambda^e``: strictly increasing index tuples, ascending lexicographic.
* Value factor: plain indices 0..value_dim-1.
* A basis element of ``S^d Lambda^e (x) B`` is a triple
  (sym multi-index, wedge tuple, value index) with flat index
  ``(sym_index * wedge_count + wedge_index) * value_dim + value_index``.

The exterior factor may live on a different space than the symmetric factor
(``ext_dim``); this is what mixed complexes with forms along a distinguished
subspace need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import AmbientMismatch, DegreeUnderflow, NotASubspace, ShapeMismatch

Vec = Dict[int, Fraction]
IntVec = Dict[int, int]


@lru_cache(maxsize=None)
def sym_basis(n: int, d: int) -> Tuple[Tuple[int, ...], ...]:
    """Monomial exponent multi-indices of length n, degree d, descending lex."""
    if n < 1:
        raise ShapeMismatch("symmetric factor needs a positive base dimension")
    if d < 0:
        raise DegreeUnderflow("negative symmetric degree")
    if n == 1:
        return ((d,),)
    out: List[Tuple[int, ...]] = []
    for first in range(d, -1, -1):
        for rest in sym_basis(n - 1, d - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def wedge_basis(n: int, e: int) -> Tuple[Tuple[int, ...], ...]:
    """Strictly increasing e-tuples from range(n), ascending lex."""
    if e < 0:
        raise DegreeUnderflow("negative exterior degree")
    from itertools import combinations

    return tuple(combinations(range(n), e))


@lru_cache(maxsize=None)
def _sym_index(n: int, d: int) -> Dict[Tuple[int, ...], int]:
    return {m: i for i, m in enumerate(sym_basis(n, d))}


@lru_cache(maxsize=None)
def _wedge_index(n: int, e: int) -> Dict[Tuple[int, ...], int]:
    return {w: i for i, w in enumerate(wedge_basis(n, e))}


@dataclass(frozen=True)
class TensorShape:
    """Shape record for ``S^d (base)* (x) Lambda^e (ext)* (x) B``."""

    base_dim: int
    sym_degree: int
    ext_degree: int
    value_dim: int
    ext_dim: Optional[int] = None

    def __post_init__(self):
        if self.ext_dim is None:
            object.__setattr__(self, "ext_dim", self.base_dim)
        if self.base_dim < 1 or self.ext_dim < 0 or self.value_dim < 0:
            raise ShapeMismatch("dimensions out of range")
        if self.sym_degree < 0 or self.ext_degree < 0:
            raise DegreeUnderflow("negative degree in shape")

    @classmethod
    def vector(cls, w: int) -> "TensorShape":
        """A plain w-dimensional value space."""
        return cls(1, 0, 0, w)

    @property
    def sym_count(self) -> int:
        return math.comb(self.base_dim + self.sym_degree - 1, self.sym_degree)

    @property
    def wedge_count(self) -> int:
        return math.comb(self.ext_dim, self.ext_degree)

    @property
    def dim(self) -> int:
        return self.sym_count * self.wedge_count * self.value_dim

    def sym_list(self) -> Tuple[Tuple[int, ...], ...]:
        return sym_basis(self.base_dim, self.sym_degree)

    def wedge_list(self) -> Tuple[Tuple[int, ...], ...]:
        return wedge_basis(self.ext_dim, self.ext_degree)

    def sym_pos(self, mono: Tuple[int, ...]) -> int:
        return _sym_index(self.base_dim, self.sym_degree)[mono]

    def wedge_pos(self, wedge: Tuple[int, ...]) -> int:
        return _wedge_index(self.ext_dim, self.ext_degree)[wedge]

    def index(self, sym_i: int, wedge_i: int, value_i: int) -> int:
        return (sym_i * self.wedge_count + wedge_i) * self.value_dim + value_i

    def unpack(self, flat: int) -> Tuple[int, int, int]:
        value_i = flat % self.value_dim
        rest = flat // self.value_dim
        return rest // self.wedge_count, rest % self.wedge_count, value_i


# ---------------------------------------------------------------------------
# fraction-free elimination on sparse integer rows


def _as_int_row(vec: Mapping[int, object]) -> IntVec:
    items = [(c, Fraction(v)) for c, v in vec.items() if v]
    if not items:
        return {}
    denom_lcm = 1
    for _, v in items:
        denom_lcm = denom_lcm * v.denominator // math.gcd(denom_lcm, v.denominator)
    row = {c: int(v * denom_lcm) for c, v in items}
    return _gcd_reduce(row)


def _gcd_reduce(row: IntVec) -> IntVec:
    g = 0
    for v in row.values():
        g = math.gcd(g, v)
        if g == 1:
            break
    if g > 1:
        row = {c: v // g for c, v in row.items()}
    if row and row[min(row)] < 0:
        row = {c: -v for c, v in row.items()}
    return row

def _combine(a: int, row_a: IntVec, b: int, row_b: IntVec) -> IntVec:
    out = {c: a * v for c, v in row_a.items()}
    for c, v in row_b.items():
        w = out.get(c, 0) + b * v
        if w:
            out[c] = w
        elif c in out:
            del out[c]
    return _gcd_reduce(out)


def echelon(rows: Iterable[Mapping[int, object]],
            canonical: bool = True) -> Dict[int, IntVec]:
    """Row reduce sparse rows; returns pivot column -> gcd-reduced integer row.

    With canonical=True the result is fully back-substituted (each pivot
    column occurs in exactly one row), which pins the unique reduced echelon
    form of the row space.
    """
    piv: Dict[int, IntVec] = {}
    for raw in rows:
        r = dict(raw) if _is_int_row(raw) else _as_int_row(raw)
        while r:
            c = min(r)
            p = piv.get(c)
            if p is None:
                piv[c] = _gcd_reduce(r)
                break
            r = _combine(p[c], r, -r[c], p)
    if canonical:
        for c in sorted(piv, reverse=True):
            prow = piv[c]
            for c2 in piv:
                if c2 < c:
                    other = piv[c2]
                    if c in other:
                        piv[c2] = _combine(prow[c], other, -other[c], prow)
    return piv


def _is_int_row(row) -> bool:
    if not isinstance(row, dict):
        return False
    for v in row.values():
        return isinstance(v, int)
    return True


def rank_of_rows(rows: Iterable[Mapping[int, object]]) -> int:
    return len(echelon(rows, canonical=False))


def _canonical_fraction_rows(piv: Dict[int, IntVec]) -> Tuple[Tuple[int, ...], Tuple[Vec, ...]]:
    pivots = tuple(sorted(piv))
    rows = []
    for c in pivots:
        lead = piv[c][c]
        rows.append({col: Fraction(v, lead) for col, v in sorted(piv[c].items())})
    return pivots, tuple(rows)


# ---------------------------------------------------------------------------


class Subspace:
    """A subspace of a shaped ambient space, stored in canonical RREF.

    Rows are sparse mappings column -> Fraction with pivot entries 1 and all
    other pivot columns cleared; two subspaces are equal exactly when their
    ambients and row matrices are equal.
    """

    __slots__ = ("ambient", "rows", "pivots", "_qpos")

    def __init__(self, ambient: TensorShape, rows: Tuple[Vec, ...],
                 pivots: Tuple[int, ...]):
        self.ambient = ambient
        self.rows = rows
        self.pivots = pivots
        self._qpos = None

    @classmethod
    def from_rows(cls, ambient: TensorShape,
                  rows: Iterable[Mapping[int, object]]) -> "Subspace":
        n = ambient.dim
        piv = echelon(rows)
        if piv and max(piv) >= n:
            raise ShapeMismatch("row entries outside the ambient space")
        pivots, canon = _canonical_fraction_rows(piv)
        return cls(ambient, canon, pivots)

    @classmethod
    def from_dense(cls, ambient: TensorShape,
                   rows: Iterable[Sequence[object]]) -> "Subspace":
        sparse = []
        for r in rows:
            if len(r) != ambient.dim:
                raise ShapeMismatch(
                    "row length %d differs from ambient dimension %d"
                    % (len(r), ambient.dim))
            sparse.append({i: v for i, v in enumerate(r) if v})
        return cls.from_rows(ambient, sparse)

    @classmethod
    def full(cls, ambient: TensorShape) -> "Subspace":
        one = Fraction(1)
        rows = tuple({i: one} for i in range(ambient.dim))
        return cls(ambient, rows, tuple(range(ambient.dim)))

    @classmethod
    def zero(cls, ambient: TensorShape) -> "Subspace":
        return cls(ambient, (), ())

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def is_full(self) -> bool:
        return self.dim == self.ambient.dim

    def __eq__(self, other) -> bool:
        return (isinstance(other, Subspace) and self.ambient == other.ambient
                and self.rows == other.rows)

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __repr__(self) -> str:
        return "Subspace(dim=%d, ambient_dim=%d)" % (self.dim, self.ambient.dim)

    def reduce_vector(self, vec: Mapping[int, object]) -> Vec:
        """Residual of vec after eliminating all pivot columns."""
        out: Vec = {c: Fraction(v) for c, v in vec.items() if v}
        for c, row in zip(self.pivots, self.rows):
            coef = out.get(c)
            if not coef:
                continue
            for col, v in row.items():
                w = out.get(col, 0) - coef * v
                if w:
                    out[col] = w
                elif col in out:
                    del out[col]
        return out

    def contains_vector(self, vec: Mapping[int, object]) -> bool:
        return not self.reduce_vector(vec)

    def _quotient_positions(self) -> Dict[int, int]:
        if self._qpos is None:
            pivset = set(self.pivots)
            self._qpos = {c: i for i, c in enumerate(
                col for col in range(self.ambient.dim) if col not in pivset)}
        return self._qpos

    @property
    def codim(self) -> int:
        return self.ambient.dim - self.dim

    def quotient_coords(self, vec: Mapping[int, object]) -> Vec:
        """Coordinates of vec in ambient/self, on the non-pivot columns."""
        residual = self.reduce_vector(vec)
        pos = self._quotient_positions()
        return {pos[c]: v for c, v in residual.items()}


class LinearMap:
    """A linear map stored as one sparse image row per domain basis vector."""

    __slots__ = ("domain", "codomain", "rows")

    def __init__(self, domain: TensorShape, codomain: TensorShape,
                 rows: Sequence[Vec]):
        if len(rows) != domain.dim:
            raise ShapeMismatch("need one row per domain basis vector")
        self.domain = domain
        self.codomain = codomain
        self.rows = tuple(rows)

    def apply(self, vec: Mapping[int, object]) -> Vec:
        out: Vec = {}
        for i, coef in vec.items():
            if not coef:
                continue
            coef = Fraction(coef)
            for c, v in self.rows[i].items():
                w = out.get(c, 0) + coef * v
                if w:
                    out[c] = w
                elif c in out:
                    del out[c]
        return out

    def compose(self, after: "LinearMap") -> "LinearMap":
        """The map (after o self): first self, then after."""
        if self.codomain.dim != after.domain.dim:
            raise ShapeMismatch("composition shape mismatch")
        return LinearMap(self.domain, after.codomain,
                         [after.apply(r) for r in self.rows])


# ---------------------------------------------------------------------------
# subspace operations


def _check_same_ambient(a: Subspace, b: Subspace):
    if a.ambient != b.ambient:
        raise AmbientMismatch("subspaces live in different ambient spaces")


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_same_ambient(a, b)
    return Subspace.from_rows(a.ambient, list(a.rows) + list(b.rows))


def subspace_intersect(a: Subspace, b: Subspace) -> Subspace:
    """Zassenhaus intersection via a block echelon computation."""
    _check_same_ambient(a, b)
    n = a.ambient.dim
    stacked: List[Vec] = []
    for r in a.rows:
        row = dict(r)
        for c, v in r.items():
            row[c + n] = v
        stacked.append(row)
    stacked.extend(dict(r) for r in b.rows)
    piv = echelon(stacked, canonical=False)
    inter = [{c - n: v for c, v in row.items()} for c0, row in piv.items()
             if c0 >= n]
    return Subspace.from_rows(a.ambient, inter)


def contains(big: Subspace, small: Subspace) -> bool:
    _check_same_ambient(big, small)
    return all(big.contains_vector(r) for r in small.rows)


def quotient_dim(big: Subspace, small: Subspace) -> int:
    if not contains(big, small):
        raise NotASubspace("quotient of spaces without containment")
    return big.dim - small.dim


def image(f: LinearMap, s: Optional[Subspace] = None) -> Subspace:
    if s is None:
        rows: Iterable[Vec] = f.rows
    else:
        if s.ambient != f.domain:
            raise AmbientMismatch("subspace does not match map domain")
        rows = (f.apply(r) for r in s.rows)
    return Subspace.from_rows(f.codomain, rows)


def kernel_of_rows(rows: Sequence[Mapping[int, object]], width: int,
                   domain: TensorShape) -> Subspace:
    """Left kernel of a row family: combinations summing to zero."""
    stacked: List[Vec] = []
    for i, r in enumerate(rows):
        row = {c: Fraction(v) for c, v in r.items() if v}
        row[width + i] = Fraction(1)
        stacked.append(row)
    piv = echelon(stacked, canonical=False)
    combos = [{c - width: v for c, v in row.items()} for c0, row in piv.items()
              if c0 >= width]
    return Subspace.from_rows(domain, combos)


def kernel(f: LinearMap) -> Subspace:
    return kernel_of_rows(f.rows, f.codomain.dim, f.domain)


def preimage(f: LinearMap, s: Subspace) -> Subspace:
    """All domain vectors mapped into s."""
    if s.ambient != f.codomain:
        raise AmbientMismatch("subspace does not match map codomain")
    qrows = [s.quotient_coords(r) for r in f.rows]
    return kernel_of_rows(qrows, s.codim, f.domain)


def rank_of_image(rows: Iterable[Mapping[int, object]]) -> int:
    return rank_of_rows(rows)


def tensor_rows_with_wedge(g_rows: Iterable[Vec], g_shape: TensorShape,
                           wedge_rows: Iterable[Vec],
                           out_shape: TensorShape) -> List[Vec]:
    """Rows of (span g_rows) tensor (span wedge_rows) inside out_shape.

    g_rows live in a degree-(d,0) shape, wedge_rows in coordinates of
    Lambda^e of the exterior space of out_shape.
    """
    if (g_shape.base_dim != out_shape.base_dim
            or g_shape.sym_degree != out_shape.sym_degree
            or g_shape.value_dim != out_shape.value_dim):
        raise ShapeMismatch("tensor factors do not match the output shape")
    w = out_shape.value_dim
    wc = out_shape.wedge_count
    out = []
    for g in g_rows:
        split = [(flat // w, flat % w, v) for flat, v in g.items()]
        for wrow in wedge_rows:
            row: Vec = {}
            for sym_i, val_i, gv in split:
                for wedge_i, wv in wrow.items():
                    row[(sym_i * wc + wedge_i) * w + val_i] = gv * wv
            out.append(row)
    return out
