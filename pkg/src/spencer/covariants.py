"""Flagged restriction machinery: covariants of a pseudogroup action on jets.

Everything here is relative to a flag: an ambient tangent space V of
dimension m and a distinguished subspace tau of dimension n spanned by
given vectors (the tangent to a submanifold germ), with quotient
nu = V/tau of dimension r = m - n.

The restriction map sends a symbol element of ``S^l V* (x) V`` to
``S^l tau* (x) nu`` by restricting all symmetric arguments to tau and
projecting the value.  Its kernel has two visible pieces (annihilator
factor, value inside tau) whose sum is the whole kernel; the quotient of
the equation symbol by the image of the group symbol is the space of
covariants, and its vanishing is transversality of the action at this
flag and order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import (AmbientMismatch, DegreeUnderflow, EquationNotInvariant,
                     NotASubcomplex, ParamOutOfRange, ShapeMismatch)
from .exactla import (LinearMap, Subspace, TensorShape, Vec, contains,
                      preimage, rank_of_rows, subspace_intersect,
                      subspace_sum, sym_basis, tensor_rows_with_wedge,
                      wedge_basis)
from .symbolic import (SymbolicSystem, _lowered, _raised, _wedge_insert,
                       annihilator, delta_map, restrict_delta)

Poly = Dict[Tuple[int, ...], Fraction]


def _minor_det(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    s = len(matrix)
    if s == 0:
        return Fraction(1)
    if s == 1:
        return matrix[0][0]
    total = Fraction(0)
    for col in range(s):
        v = matrix[0][col]
        if not v:
            continue
        sub = [[row[c] for c in range(s) if c != col] for row in matrix[1:]]
        term = v * _minor_det(sub)
        total += -term if col % 2 else term
    return total


class FlagContext:
    """Ambient dimension m with a distinguished n-dim subspace tau.

    tau_basis rows are vectors in V; the quotient nu = V/tau carries the
    canonical basis of non-pivot coordinates of tau's reduced form, and
    the dual restriction rho maps a covector to its values on the given
    tau basis.
    """

    def __init__(self, m: int, tau_basis: Sequence[Sequence[object]]):
        self.m = m
        self.tau = tuple(tuple(Fraction(x) for x in row) for row in tau_basis)
        self.n = len(self.tau)
        self.r = m - self.n
        if self.n < 1 or self.r < 1:
            raise ParamOutOfRange("flag needs 1 <= dim tau < m")
        for row in self.tau:
            if len(row) != m:
                raise ShapeMismatch("tau vector length differs from m")
        self.tau_space = Subspace.from_dense(TensorShape.vector(m), self.tau)
        if self.tau_space.dim != self.n:
            raise ShapeMismatch("tau basis vectors are linearly dependent")
        self.ann = annihilator(self.tau, m)
        self._sym_cache: Dict[Tuple[int, ...], Poly] = {}
        self._wedge_cache: Dict[Tuple[int, ...], Vec] = {}

    def value_projection(self, b: int) -> Vec:
        """Coordinates of the b-th ambient basis vector in nu = V/tau."""
        return self.tau_space.quotient_coords({b: Fraction(1)})

    def restricted_covector(self, j: int) -> Poly:
        """The covector e^j restricted to tau, as a degree-1 polynomial."""
        out: Poly = {}
        for a in range(self.n):
            c = self.tau[a][j]
            if c:
                out[_raised((0,) * self.n, a)] = c
        return out

    def restricted_monomial(self, mono: Tuple[int, ...]) -> Poly:
        """Image of the V-monomial under restriction of all arguments to tau."""
        cached = self._sym_cache.get(mono)
        if cached is not None:
            return cached
        if not any(mono):
            out: Poly = {(0,) * self.n: Fraction(1)}
        else:
            j = next(i for i, e in enumerate(mono) if e)
            rest = self.restricted_monomial(_lowered(mono, j))
            lin = self.restricted_covector(j)
            out = {}
            for m1, v1 in rest.items():
                for m2, v2 in lin.items():
                    key = tuple(a + b for a, b in zip(m1, m2))
                    cur = out.get(key, 0) + v1 * v2
                    if cur:
                        out[key] = cur
                    elif key in out:
                        del out[key]
        self._sym_cache[mono] = out
        return out

    def restricted_wedge(self, J: Tuple[int, ...]) -> Vec:
        """Image of e^J under the exterior power of the restriction."""
        cached = self._wedge_cache.get(J)
        if cached is not None:
            return cached
        s = len(J)
        pos = {K: i for i, K in enumerate(wedge_basis(self.n, s))}
        out: Vec = {}
        for K in wedge_basis(self.n, s):
            det = _minor_det([[self.tau[a][j] for j in J] for a in K])
            if det:
                out[pos[K]] = det
        self._wedge_cache[J] = out
        return out


def restriction_map(ctx: FlagContext, l: int, s: int = 0) -> LinearMap:
    """S^l V* (x) Lambda^s V* (x) V  ->  S^l tau* (x) Lambda^s tau* (x) nu.

    Restricts symmetric and exterior arguments to tau and projects the
    value to the quotient.  s = 0 is the plain order-l restriction whose
    kernel is restriction_kernel.
    """
    if l < 0:
        raise DegreeUnderflow("negative order")
    m, n, r = ctx.m, ctx.n, ctx.r
    dom = TensorShape(m, l, s, m)
    cod = TensorShape(n, l, s, r)
    cod_sym = {mo: i for i, mo in enumerate(cod.sym_list())}
    proj = [ctx.value_projection(b) for b in range(m)]
    rows: List[Vec] = []
    for mono in dom.sym_list():
        sym_img = ctx.restricted_monomial(mono)
        for J in dom.wedge_list():
            wedge_img = ctx.restricted_wedge(J)
            for b in range(m):
                row: Vec = {}
                for mt, sv in sym_img.items():
                    si = cod_sym[mt]
                    for wi, wv in wedge_img.items():
                        for vi, pv in proj[b].items():
                            key = cod.index(si, wi, vi)
                            cur = row.get(key, 0) + sv * wv * pv
                            if cur:
                                row[key] = cur
                            elif key in row:
                                del row[key]
                rows.append(row)
    return LinearMap(dom, cod, rows)


def restriction_kernel(ctx: FlagContext, l: int) -> Subspace:
    """Sum of the two visible kernel pieces of the order-l restriction.

    Annihilator-headed symbols plus symbols valued inside tau; equals the
    kernel of restriction_map(ctx, l) exactly.
    """
    if l < 1:
        raise DegreeUnderflow("restriction kernel needs order >= 1")
    m = ctx.m
    shp = TensorShape(m, l, 0, m)
    sym_pos = {mo: i for i, mo in enumerate(shp.sym_list())}
    rows: List[Vec] = []
    for alpha in ctx.ann.rows:
        for mono in sym_basis(m, l - 1):
            for b in range(m):
                vec: Vec = {}
                for j, coef in alpha.items():
                    key = shp.index(sym_pos[_raised(mono, j)], 0, b)
                    vec[key] = vec.get(key, 0) + coef
                rows.append(vec)
    for mono_i in range(shp.sym_count):
        for t in ctx.tau:
            rows.append({shp.index(mono_i, 0, b): c
                         for b, c in enumerate(t) if c})
    return Subspace.from_rows(shp, rows)


def stationary_subspace(ctx: FlagContext, g_l: Subspace) -> Subspace:
    """Symbols in g_l that restrict to zero: g_l meet restriction_kernel.

    At order 0 the restriction is the quotient projection, so the
    stationary part is the tau-directions inside g_l.
    """
    shp = g_l.ambient
    if shp != TensorShape(ctx.m, shp.sym_degree, 0, ctx.m):
        raise AmbientMismatch("symbol grade does not live over the flag")
    if shp.sym_degree == 0:
        return subspace_intersect(g_l, Subspace.from_dense(shp, ctx.tau))
    return subspace_intersect(g_l, restriction_kernel(ctx, shp.sym_degree))


def dimension_necessary(g_l: Subspace, h_l: Subspace) -> bool:
    """Necessary size condition for transversality: dim g >= dim h."""
    return g_l.dim >= h_l.dim


@dataclass
class CovariantReport:
    """Dimensions of the order-l restriction data at one flag."""

    l: int
    dim_g: int
    dim_h: int
    dim_stationary: int
    dim_lambda_image: int
    dim_O: int
    transversal: bool
    dim_necessary_ok: bool
    caveat: Optional[str] = None

    def to_jsonable(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "l": self.l,
            "dim_g": self.dim_g,
            "dim_h": self.dim_h,
            "dim_stationary": self.dim_stationary,
            "dim_lambda_image": self.dim_lambda_image,
            "dim_O": self.dim_O,
            "transversal": self.transversal,
            "dim_necessary_ok": self.dim_necessary_ok,
        }
        if self.caveat is not None:
            out["caveat"] = self.caveat
        return out


ORDER_ONE_CAVEAT = ("order-1 output compares infinitesimal data only; "
                    "group-level one-jet statements need more than this "
                    "linear information")


def covariants(ctx: FlagContext, g_l: Subspace,
               h_l: Optional[Subspace] = None) -> CovariantReport:
    """Report of restriction dimensions and the transversality flag.

    The flag is computed two independent ways -- vanishing covariant count
    and the subspace identity (kernel + g equals the preimage of h) -- and
    the two must agree.
    """
    shp = g_l.ambient
    l = shp.sym_degree
    if shp != TensorShape(ctx.m, l, 0, ctx.m):
        raise AmbientMismatch("symbol grade does not live over the flag")
    h_shape = TensorShape(ctx.n, l, 0, ctx.r)
    if h_l is None:
        h_l = Subspace.full(h_shape)
    elif h_l.ambient != h_shape:
        raise AmbientMismatch("equation grade has the wrong shape")
    lam = restriction_map(ctx, l)
    image_rows = [lam.apply(r) for r in g_l.rows]
    lam_image = Subspace.from_rows(h_shape, image_rows)
    if not contains(h_l, lam_image):
        raise EquationNotInvariant(
            "restricted symbol leaves the equation at order %d" % l)
    sigma = restriction_kernel(ctx, l)
    stat = subspace_intersect(g_l, sigma)
    assert g_l.dim - stat.dim == lam_image.dim
    dim_O = h_l.dim - lam_image.dim
    by_count = dim_O == 0
    by_spaces = subspace_sum(sigma, g_l) == preimage(lam, h_l)
    assert by_count == by_spaces
    return CovariantReport(
        l=l, dim_g=g_l.dim, dim_h=h_l.dim, dim_stationary=stat.dim,
        dim_lambda_image=lam_image.dim, dim_O=dim_O, transversal=by_count,
        dim_necessary_ok=dimension_necessary(g_l, h_l),
        caveat=ORDER_ONE_CAVEAT if l == 1 else None)


# ---------------------------------------------------------------------------
# the four-row diagram: cell constructors and cohomology


def _unit_wedges(count: int) -> List[Vec]:
    return [{i: Fraction(1)} for i in range(count)]


def _tensor_cell(sub: Subspace, out_shape: TensorShape) -> Subspace:
    """sub (x) full exterior factor, inside out_shape."""
    rows = tensor_rows_with_wedge(sub.rows, sub.ambient,
                                  _unit_wedges(out_shape.wedge_count),
                                  out_shape)
    return Subspace.from_rows(out_shape, rows)


def stationary_row_space(ctx: FlagContext, gsys: SymbolicSystem,
                         l: int, s: int) -> Subspace:
    """Cell of the stationary row inside g^(l-s) (x) Lambda^s V*.

    Sum of (symbol grade) (x) (annihilator wedge lower forms) with
    (stationary subspace) (x) (all forms).
    """
    m = ctx.m
    if gsys.base_dim != m or gsys.value_dim != m:
        raise AmbientMismatch("symbol system does not live over the flag")
    d = l - s
    shape = TensorShape(m, max(d, 0), s, m)
    if d < 0 or s > m:
        return Subspace.zero(shape)
    g = gsys.grade(d)
    rows: List[Vec] = []
    if s >= 1:
        wedge_rows: List[Vec] = []
        wpos = _wedge_index_map(m, s)
        for alpha in ctx.ann.rows:
            for L in wedge_basis(m, s - 1):
                wrow: Vec = {}
                for j, coef in alpha.items():
                    ins = _wedge_insert(j, L)
                    if ins is None:
                        continue
                    sign, J2 = ins
                    key = wpos[J2]
                    cur = wrow.get(key, 0) + sign * coef
                    if cur:
                        wrow[key] = cur
                    elif key in wrow:
                        del wrow[key]
                if wrow:
                    wedge_rows.append(wrow)
        rows.extend(tensor_rows_with_wedge(g.rows, g.ambient, wedge_rows,
                                           shape))
    stat = stationary_subspace(ctx, g)
    rows.extend(tensor_rows_with_wedge(stat.rows, stat.ambient,
                                       _unit_wedges(shape.wedge_count), shape))
    return Subspace.from_rows(shape, rows)


def _wedge_index_map(n: int, e: int) -> Dict[Tuple[int, ...], int]:
    return {J: i for i, J in enumerate(wedge_basis(n, e))}


def _outgoing(cell: Subspace, dmat: Optional[LinearMap],
              next_cell: Optional[Subspace]) -> int:
    """Rank of the differential on the cell; containment in the next cell."""
    if dmat is None or cell.dim == 0:
        return 0
    images = [dmat.apply(r) for r in cell.rows]
    if next_cell is not None:
        for img in images:
            if not next_cell.contains_vector(img):
                raise NotASubcomplex("differential leaves the row complex")
    return rank_of_rows(images)


def stationary_row_cohomology(ctx: FlagContext, gsys: SymbolicSystem,
                              l: int, s: int) -> int:
    """Cohomology dimension of the stationary row at the (l-s, s) cell."""
    cell = stationary_row_space(ctx, gsys, l, s)
    nxt = stationary_row_space(ctx, gsys, l, s + 1) if s + 1 <= ctx.m else None
    d_out = (delta_map(cell.ambient)
             if l - s >= 1 and s < ctx.m else None)
    out_rank = _outgoing(cell, d_out, nxt)
    in_rank = 0
    if s >= 1:
        prev = stationary_row_space(ctx, gsys, l, s - 1)
        d_in = delta_map(prev.ambient) if l - s + 1 >= 1 else None
        in_rank = _outgoing(prev, d_in, cell)
    h = cell.dim - out_rank - in_rank
    if h < 0:
        raise NotASubcomplex("negative cohomology in the stationary row")
    return h


def restricted_spencer_H(ctx: FlagContext, gsys: SymbolicSystem,
                         l: int, s: int) -> int:
    """Cohomology of g-cells with forms restricted along tau."""
    return _tau_form_cohomology(ctx, gsys, l, s, stationary=False)


def stationary_tau_cohomology(ctx: FlagContext, gsys: SymbolicSystem,
                              l: int, s: int) -> int:
    """Cohomology of stationary-subspace cells with forms along tau."""
    return _tau_form_cohomology(ctx, gsys, l, s, stationary=True)


def _tau_cell(ctx: FlagContext, gsys: SymbolicSystem, d: int, s: int,
              stationary: bool) -> Subspace:
    shape = TensorShape(ctx.m, max(d, 0), s, ctx.m, ext_dim=ctx.n)
    if d < 0 or s > ctx.n:
        return Subspace.zero(shape)
    g = gsys.grade(d)
    if stationary:
        g = stationary_subspace(ctx, g)
    rows = tensor_rows_with_wedge(g.rows, g.ambient,
                                  _unit_wedges(shape.wedge_count), shape)
    return Subspace.from_rows(shape, rows)


def _tau_form_cohomology(ctx: FlagContext, gsys: SymbolicSystem,
                         l: int, s: int, stationary: bool) -> int:
    cell = _tau_cell(ctx, gsys, l - s, s, stationary)
    nxt = _tau_cell(ctx, gsys, l - s - 1, s + 1, stationary) \
        if s + 1 <= ctx.n else None
    d_out = (restrict_delta(ctx.tau, cell.ambient)
             if l - s >= 1 and s < ctx.n else None)
    out_rank = _outgoing(cell, d_out, nxt)
    in_rank = 0
    if s >= 1 and l - s + 1 >= 1:
        prev = _tau_cell(ctx, gsys, l - s + 1, s - 1, stationary)
        d_in = restrict_delta(ctx.tau, prev.ambient)
        in_rank = _outgoing(prev, d_in, cell)
    h = cell.dim - out_rank - in_rank
    if h < 0:
        raise NotASubcomplex("negative cohomology over the restricted forms")
    return h


def _image_cell(ctx: FlagContext, gsys: SymbolicSystem, d: int,
                s: int) -> Subspace:
    """Image of g^d (x) Lambda^s V* under the restriction of everything."""
    cod = TensorShape(ctx.n, max(d, 0), s, ctx.r)
    if d < 0 or s > ctx.n:
        return Subspace.zero(cod)
    g = gsys.grade(d)
    lam = restriction_map(ctx, d, s)
    if g.is_full:
        rows = list(lam.rows)
    else:
        dom_rows = tensor_rows_with_wedge(
            g.rows, g.ambient, _unit_wedges(lam.domain.wedge_count),
            lam.domain)
        rows = [lam.apply(r) for r in dom_rows]
    return Subspace.from_rows(cod, rows)


def _equation_cell(hsys: SymbolicSystem, d: int, s: int, n: int) -> Subspace:
    shape = TensorShape(n, max(d, 0), s, hsys.value_dim)
    if d < 0 or s > n:
        return Subspace.zero(shape)
    h = hsys.grade(d)
    return _tensor_cell(h, shape)


def covariant_cohomology(ctx: FlagContext, gsys: SymbolicSystem,
                         hsys: Optional[SymbolicSystem], l: int,
                         s: int) -> int:
    """Cohomology of the quotient row (equation cells mod restricted symbol).

    A class at (l-s, s) is an equation-cell element whose differential
    falls into the next restricted-symbol image, modulo that image and the
    differentials from the previous cell.
    """
    n, r = ctx.n, ctx.r
    if hsys is None:
        hsys = SymbolicSystem(n, r, {}, fill="full")
    if hsys.base_dim != n or hsys.value_dim != r:
        raise AmbientMismatch("equation system has the wrong shape")
    d = l - s
    C = _equation_cell(hsys, d, s, n)
    if C.dim == 0:
        return 0
    V = _image_cell(ctx, gsys, d, s)
    if not contains(C, V):
        raise EquationNotInvariant(
            "restricted symbol leaves the equation at cell (%d, %d)" % (d, s))
    V_next = _image_cell(ctx, gsys, d - 1, s + 1)
    d_out = delta_map(C.ambient) if d >= 1 and s < n else None
    if d_out is not None:
        for row in V.rows:
            img = d_out.apply(row)
            if not V_next.contains_vector(img):
                raise NotASubcomplex(
                    "restricted images are not differential-stable")
        C_next = _equation_cell(hsys, d - 1, s + 1, n)
        qrows = []
        for row in C.rows:
            img = d_out.apply(row)
            if not C_next.contains_vector(img):
                raise NotASubcomplex("equation cells are not a complex")
            qrows.append(V_next.quotient_coords(img) if V_next.rows
                         else dict(img))
        z_dim = C.dim - rank_of_rows(qrows)
    else:
        z_dim = C.dim
    boundary = V
    if s >= 1 and d + 1 >= 1:
        prev = _equation_cell(hsys, d + 1, s - 1, n)
        if prev.dim:
            d_in = delta_map(prev.ambient)
            imgs = [d_in.apply(rw) for rw in prev.rows]
            boundary = subspace_sum(
                boundary, Subspace.from_rows(C.ambient, imgs))
    h = z_dim - boundary.dim
    if h < 0:
        raise NotASubcomplex("negative cohomology in the quotient row")
    return h


# ---------------------------------------------------------------------------
# restriction isomorphism and scans


def acyclicity_window(gsys: SymbolicSystem, i_lo: int, i_hi: int,
                      j_max: int) -> int:
    """Largest q with vanishing cohomology for all form degrees 1..q.

    Measured over symbol degrees i_lo..i_hi; returns 0 when even form
    degree 1 has a nonzero cell there.
    """
    from .symbolic import spencer_H
    q = 0
    for j in range(1, j_max + 1):
        if all(spencer_H(gsys, i, j) == 0 for i in range(i_lo, i_hi + 1)):
            q = j
        else:
            break
    return q


@dataclass
class RestrictionIsomorphismResult:
    applicable: bool
    lhs: int
    rhs: int
    strongly_noncharacteristic: bool
    window: int

    def to_jsonable(self) -> Dict[str, object]:
        return {
            "applicable": self.applicable,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "strongly_noncharacteristic": self.strongly_noncharacteristic,
            "window": self.window,
        }


def restriction_isomorphism_check(ctx: FlagContext, gsys: SymbolicSystem,
                                  l: int, s: int,
                                  k: int) -> RestrictionIsomorphismResult:
    """Compare stationary-row cohomology against its tau-form counterpart.

    Applicable when tau is strongly non-characteristic for the order-k
    symbol grade and s is below min(l - k, measured acyclicity window).
    Both sides are computed unconditionally so inapplicable cases can be
    inspected.
    """
    from .symbolic import strongly_noncharacteristic
    snc = strongly_noncharacteristic(ctx.tau, gsys.grade(k))
    q = acyclicity_window(gsys, k, max(l, k), gsys.base_dim)
    applicable = snc and s < min(l - k, q)
    lhs = stationary_row_cohomology(ctx, gsys, l, s)
    rhs = stationary_tau_cohomology(ctx, gsys, l, s)
    return RestrictionIsomorphismResult(applicable, lhs, rhs, snc, q)


@dataclass
class ScanEntry:
    report: CovariantReport
    stationary_tau_H2_zero: bool
    restricted_H1_zero: bool

    def to_jsonable(self) -> Dict[str, object]:
        out = self.report.to_jsonable()
        out["stationary_tau_H2_zero"] = self.stationary_tau_H2_zero
        out["restricted_H1_zero"] = self.restricted_H1_zero
        return out


def transversality_scan(ctx: FlagContext, gsys: SymbolicSystem,
                        hsys: Optional[SymbolicSystem],
                        l_max: int) -> List[ScanEntry]:
    """Per-order covariant reports with the vanishing-hypothesis flags.

    Once both hypothesis flags hold from some order on and the covariants
    vanish there, they must keep vanishing at every later computed order;
    this consequence is asserted.
    """
    n, r = ctx.n, ctx.r
    if hsys is None:
        hsys = SymbolicSystem(n, r, {}, fill="full")
    entries: List[ScanEntry] = []
    settled = None
    for l in range(1, l_max + 1):
        rep = covariants(ctx, gsys.grade(l), hsys.grade(l))
        f2 = stationary_tau_cohomology(ctx, gsys, l, 2) == 0 if ctx.n >= 2 \
            else True
        f1 = restricted_spencer_H(ctx, gsys, l, 1) == 0
        entries.append(ScanEntry(rep, f2, f1))
        if settled is None:
            if f2 and f1 and rep.dim_O == 0:
                settled = l
        else:
            if f2 and f1:
                assert rep.dim_O == 0, (
                    "covariants reappeared after the vanishing hypotheses "
                    "held at order %d" % settled)
            else:
                settled = None
    return entries
