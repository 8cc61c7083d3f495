"""Exact polynomial calculus on jet coordinates.

Variables are tuples: ('x', i) for base coordinates, ('p', j, sigma) for
the jet coordinate of the j-th fibre component along the multi-index
sigma (length n).  ('p', j, (0,...,0)) is the fibre coordinate itself.
A JetPolynomial is a sparse map from canonical monomials (variables
sorted x-first, then by fibre index and graded-lex multi-index) to
Fraction coefficients.

The total derivative sends order-m polynomials to order m+1.  Vector
fields on the order-k jet space are assembled from generating data
exactly; the defining cancellation of order-(k+1) variables is checked,
never assumed.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import (AmbientMismatch, CancellationFailure, CapExceeded,
                     ParamOutOfRange, SingularJacobian)
from .exactla import (Subspace, TensorShape, Vec, echelon, rank_of_rows,
                      sym_basis)

Var = Tuple
Monomial = Tuple[Tuple[Var, int], ...]

ORACLE_COLUMN_CAP = 50000


def x_var(i: int) -> Var:
    return ("x", i)


def p_var(j: int, sigma: Tuple[int, ...]) -> Var:
    return ("p", j, tuple(sigma))


def u_var(j: int, n: int) -> Var:
    return ("p", j, (0,) * n)


def var_order(v: Var) -> int:
    return 0 if v[0] == "x" else sum(v[2])


def _var_key(v: Var):
    if v[0] == "x":
        return (0, v[1], 0, ())
    return (1, v[1], sum(v[2]), v[2])


def _canonical(exps: Dict[Var, int]) -> Monomial:
    return tuple(sorted(((v, e) for v, e in exps.items() if e),
                        key=lambda p: _var_key(p[0])))


class JetPolynomial:
    """Polynomial in base and jet coordinates with Fraction coefficients."""

    __slots__ = ("n", "r", "terms")

    def __init__(self, n: int, r: int,
                 terms: Optional[Dict[Monomial, Fraction]] = None):
        if n < 1 or r < 1:
            raise ParamOutOfRange("need n, r >= 1")
        self.n = n
        self.r = r
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def zero(cls, n, r):
        return cls(n, r)

    @classmethod
    def const(cls, n, r, c) -> "JetPolynomial":
        return cls(n, r, {(): Fraction(c)})

    @classmethod
    def variable(cls, n, r, v: Var) -> "JetPolynomial":
        if v[0] == "x":
            if not 0 <= v[1] < n:
                raise ParamOutOfRange("base index out of range")
        else:
            if not 0 <= v[1] < r or len(v[2]) != n:
                raise ParamOutOfRange("jet variable out of range")
        return cls(n, r, {((v, 1),): Fraction(1)})

    def _check(self, other: "JetPolynomial"):
        if self.n != other.n or self.r != other.r:
            raise AmbientMismatch("jet polynomials live on different spaces")

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, JetPolynomial):
            return NotImplemented
        return (self.n, self.r, self.terms) == (other.n, other.r, other.terms)

    def __add__(self, other: "JetPolynomial") -> "JetPolynomial":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return JetPolynomial(self.n, self.r, out)

    def __neg__(self):
        return JetPolynomial(self.n, self.r,
                             {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return JetPolynomial(self.n, self.r,
                                 {m: c * q for m, c in self.terms.items()})
        self._check(other)
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            d1 = dict(m1)
            for m2, c2 in other.terms.items():
                exps = dict(d1)
                for v, e in m2:
                    exps[v] = exps.get(v, 0) + e
                key = _canonical(exps)
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return JetPolynomial(self.n, self.r, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = JetPolynomial.const(self.n, self.r, 1)
        for _ in range(e):
            out = out * self
        return out

    def diff(self, v: Var) -> "JetPolynomial":
        out: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            exps = dict(m)
            e = exps.get(v, 0)
            if not e:
                continue
            exps[v] = e - 1
            key = _canonical(exps)
            out[key] = out.get(key, Fraction(0)) + c * e
        return JetPolynomial(self.n, self.r, out)

    def variables(self) -> List[Var]:
        seen = set()
        for m in self.terms:
            for v, _ in m:
                seen.add(v)
        return sorted(seen, key=_var_key)

    @property
    def k_max(self) -> int:
        """Highest jet order among the variables that appear."""
        return max((var_order(v) for v in self.variables()), default=0)

    def degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    def min_degree(self) -> Optional[int]:
        if not self.terms:
            return None
        return min(sum(e for _, e in m) for m in self.terms)

    def homogeneous_part(self, d: int) -> "JetPolynomial":
        return JetPolynomial(self.n, self.r,
                             {m: c for m, c in self.terms.items()
                              if sum(e for _, e in m) == d})

    def evaluate(self, point) -> Fraction:
        value = point.value if isinstance(point, JetPoint) else point.__getitem__
        total = Fraction(0)
        for m, c in self.terms.items():
            acc = c
            for v, e in m:
                acc *= value(v) ** e
            total += acc
        return total

    def __repr__(self):
        return "JetPolynomial(%d, %d, %d terms)" % (self.n, self.r,
                                                    len(self.terms))


# ---------------------------------------------------------------------------
# parsing: "3/2*x1^2*p[1,(0,1)] - u2" with 1-based surface indices


_TOKEN_RE = re.compile(r"""
    (?P<num>\d+(?:/\d+)?)
  | (?P<pvar>p\[\s*\d+\s*,\s*(?:\(\s*\d+(?:\s*,\s*\d+)*\s*,?\s*\)|\d+)\s*\])
  | (?P<xvar>x\d+)
  | (?P<uvar>u\d*)
  | (?P<op>[*^+\-])
  | (?P<junk>\S)
""", re.VERBOSE)


def parse_variable(text: str, n: int, r: int) -> Var:
    text = text.strip()
    if text.startswith("x"):
        i = int(text[1:]) - 1
        if not 0 <= i < n:
            raise ParamOutOfRange("base index out of range in %r" % text)
        return x_var(i)
    if text.startswith("u"):
        j = int(text[1:]) - 1 if len(text) > 1 else 0
        if not 0 <= j < r:
            raise ParamOutOfRange("fibre index out of range in %r" % text)
        return u_var(j, n)
    if text.startswith("p["):
        body = text[2:-1]
        jtxt, _, stxt = body.partition(",")
        j = int(jtxt) - 1
        stxt = stxt.strip()
        if stxt.startswith("("):
            sigma = tuple(int(s) for s in stxt.strip("()").split(",") if s.strip())
        else:
            sigma = (int(stxt),)
        if len(sigma) != n or not 0 <= j < r or any(s < 0 for s in sigma):
            raise ParamOutOfRange("bad jet variable %r" % text)
        return p_var(j, sigma)
    raise ParamOutOfRange("unknown variable %r" % text)


def parse_jet_polynomial(text: str, n: int, r: int) -> JetPolynomial:
    tokens: List[Tuple[str, str]] = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        if kind == "junk":
            raise ParamOutOfRange("unexpected character %r" % m.group())
        tokens.append((kind, m.group()))

    def parse_factor(pos):
        if pos >= len(tokens):
            raise ParamOutOfRange("unexpected end of polynomial")
        kind, tok = tokens[pos]
        if kind == "num":
            base = JetPolynomial.const(n, r, Fraction(tok))
        elif kind in ("xvar", "uvar", "pvar"):
            base = JetPolynomial.variable(n, r, parse_variable(tok, n, r))
        else:
            raise ParamOutOfRange("expected factor, got %r" % tok)
        pos += 1
        if pos + 1 < len(tokens) and tokens[pos] == ("op", "^"):
            ekind, etok = tokens[pos + 1]
            if ekind != "num" or "/" in etok:
                raise ParamOutOfRange("exponent must be an integer")
            base = base ** int(etok)
            pos += 2
        return base, pos

    def parse_term(pos):
        acc, pos = parse_factor(pos)
        while pos < len(tokens) and tokens[pos] == ("op", "*"):
            nxt, pos = parse_factor(pos + 1)
            acc = acc * nxt
        return acc, pos

    if not tokens:
        raise ParamOutOfRange("empty polynomial")
    total = JetPolynomial.zero(n, r)
    sign = 1
    pos = 0
    if tokens[0] in (("op", "+"), ("op", "-")):
        sign = -1 if tokens[0][1] == "-" else 1
        pos = 1
    while True:
        term, pos = parse_term(pos)
        total = total + term * sign
        if pos == len(tokens):
            return total
        if tokens[pos] == ("op", "+"):
            sign = 1
        elif tokens[pos] == ("op", "-"):
            sign = -1
        else:
            raise ParamOutOfRange("expected + or - at %r" % (tokens[pos],))
        pos += 1


# ---------------------------------------------------------------------------
# total derivatives


def total_derivative(f: JetPolynomial, i: int) -> JetPolynomial:
    """Derivative along the i-th base direction through all jet variables."""
    if not 0 <= i < f.n:
        raise ParamOutOfRange("base direction out of range")
    out = f.diff(x_var(i))
    for v in f.variables():
        if v[0] != "p":
            continue
        sigma = v[2]
        raised = sigma[:i] + (sigma[i] + 1,) + sigma[i + 1:]
        out = out + f.diff(v) * JetPolynomial.variable(f.n, f.r,
                                                       p_var(v[1], raised))
    return out


def total_derivative_multi(f: JetPolynomial,
                           sigma: Sequence[int]) -> JetPolynomial:
    out = f
    for i, e in enumerate(sigma):
        for _ in range(e):
            out = total_derivative(out, i)
    return out


def horizontal_diff(f: JetPolynomial) -> List[JetPolynomial]:
    return [total_derivative(f, i) for i in range(f.n)]


# ---------------------------------------------------------------------------
# vector fields on jet space


def jet_coords(n: int, r: int, k: int) -> List[Var]:
    coords: List[Var] = [x_var(i) for i in range(n)]
    for j in range(r):
        for d in range(k + 1):
            for sigma in sorted(sym_basis(n, d)):
                coords.append(p_var(j, sigma))
    return coords


class LieField:
    """Vector field on the order-k jet space; coefficients may only use
    variables of order <= k."""

    __slots__ = ("n", "r", "k", "coeffs")

    def __init__(self, n: int, r: int, k: int,
                 coeffs: Dict[Var, JetPolynomial]):
        self.n = n
        self.r = r
        self.k = k
        clean: Dict[Var, JetPolynomial] = {}
        for v, poly in coeffs.items():
            if var_order(v) > k:
                raise CancellationFailure(
                    "coefficient attached to an order-%d coordinate on the "
                    "order-%d jet space" % (var_order(v), k))
            if poly.k_max > k:
                raise CancellationFailure(
                    "coefficient of %r mentions variables of order %d > %d"
                    % (v, poly.k_max, k))
            if poly:
                clean[v] = poly
        self.coeffs = clean

    def coefficient(self, v: Var) -> JetPolynomial:
        return self.coeffs.get(v, JetPolynomial.zero(self.n, self.r))

    def apply_to(self, f: JetPolynomial) -> JetPolynomial:
        out = JetPolynomial.zero(self.n, self.r)
        for v, poly in self.coeffs.items():
            d = f.diff(v)
            if d:
                out = out + poly * d
        return out

    def project(self, k: int) -> "LieField":
        """Drop coefficients of coordinates above order k."""
        if k < 0 or k > self.k:
            raise ParamOutOfRange("projection order out of range")
        return LieField(self.n, self.r, k,
                        {v: p for v, p in self.coeffs.items()
                         if var_order(v) <= k})

    def bracket(self, other: "LieField") -> "LieField":
        if (self.n, self.r, self.k) != (other.n, other.r, other.k):
            raise AmbientMismatch("fields live on different jet spaces")
        out: Dict[Var, JetPolynomial] = {}
        for v in set(self.coeffs) | set(other.coeffs):
            c = self.apply_to(other.coefficient(v)) \
                - other.apply_to(self.coefficient(v))
            if c:
                out[v] = c
        return LieField(self.n, self.r, self.k, out)

    def __repr__(self):
        return "LieField(n=%d, r=%d, k=%d, %d coefficients)" % (
            self.n, self.r, self.k, len(self.coeffs))


def _raise_index(sigma: Tuple[int, ...], i: int) -> Tuple[int, ...]:
    return sigma[:i] + (sigma[i] + 1,) + sigma[i + 1:]


def prolong_point(a: Sequence[JetPolynomial], b: Sequence[JetPolynomial],
                  k: int) -> LieField:
    """Lift of the field sum a^i d/dx_i + sum b^j d/du_j to order-k jets.

    The fibre-coordinate coefficients combine the iterated total
    derivatives of the generating components with the horizontal
    correction; all order-(k+1) variables must cancel.
    """
    if not a or not b:
        raise ParamOutOfRange("need at least one component each")
    n, r = a[0].n, a[0].r
    if len(a) != n or len(b) != r:
        raise AmbientMismatch("component count does not match (n, r)")
    for f in list(a) + list(b):
        if f.n != n or f.r != r:
            raise AmbientMismatch("components on different spaces")
        if f.k_max > 0:
            raise ParamOutOfRange(
                "generating components must only use order-0 variables")
    phi = [b[j] - sum((a[i] * JetPolynomial.variable(n, r, p_var(j, _unit(n, i)))
                       for i in range(n)), JetPolynomial.zero(n, r))
           for j in range(r)]
    coeffs: Dict[Var, JetPolynomial] = {}
    for i in range(n):
        if a[i]:
            coeffs[x_var(i)] = a[i]
    for j in range(r):
        for d in range(k + 1):
            for sigma in sym_basis(n, d):
                c = total_derivative_multi(phi[j], sigma)
                for i in range(n):
                    if a[i]:
                        c = c + a[i] * JetPolynomial.variable(
                            n, r, p_var(j, _raise_index(sigma, i)))
                if c.k_max > k:
                    raise CancellationFailure(
                        "top-order variables failed to cancel at %r" % (sigma,))
                if c:
                    coeffs[p_var(j, sigma)] = c
    return LieField(n, r, k, coeffs)


def _unit(n: int, i: int) -> Tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(n))


def prolong_contact(phi: JetPolynomial, k: int) -> LieField:
    """Lift of the contact field with scalar generating function phi
    (depending on variables of order <= 1, fibre rank 1) to order-k jets."""
    n, r = phi.n, phi.r
    if r != 1:
        raise ParamOutOfRange("contact lifts need fibre rank 1")
    if k < 1:
        raise ParamOutOfRange("contact lifts start at order 1")
    if phi.k_max > 1:
        raise ParamOutOfRange(
            "generating function must only use variables of order <= 1")
    a = [-phi.diff(p_var(0, _unit(n, i))) for i in range(n)]
    coeffs: Dict[Var, JetPolynomial] = {}
    for i in range(n):
        if a[i]:
            coeffs[x_var(i)] = a[i]
    for d in range(k + 1):
        for sigma in sym_basis(n, d):
            c = total_derivative_multi(phi, sigma)
            for i in range(n):
                if a[i]:
                    c = c + a[i] * JetPolynomial.variable(
                        n, r, p_var(0, _raise_index(sigma, i)))
            if c.k_max > k:
                raise CancellationFailure(
                    "top-order variables failed to cancel at %r" % (sigma,))
            if c:
                coeffs[p_var(0, sigma)] = c
    return LieField(n, r, k, coeffs)


# ---------------------------------------------------------------------------
# seeded rational points


class RationalLCG:
    """Deterministic rational stream: glibc linear-congruential constants,
    numerators in [-9, 9], denominators in [1, 9]."""

    MULT = 1103515245
    INC = 12345
    MOD = 2 ** 31

    def __init__(self, seed: int = 0):
        self.state = seed % self.MOD

    def next_int(self) -> int:
        self.state = (self.MULT * self.state + self.INC) % self.MOD
        return self.state

    def int_range(self, lo: int, hi: int) -> int:
        return lo + self.next_int() % (hi - lo + 1)

    def fraction(self) -> Fraction:
        return Fraction(self.int_range(-9, 9), self.int_range(1, 9))


class JetPoint:
    """Total assignment of rational values to every variable up to a
    stated order."""

    __slots__ = ("n", "r", "order", "assignments")

    def __init__(self, n: int, r: int, order: int,
                 assignments: Dict[Var, Fraction]):
        self.n = n
        self.r = r
        self.order = order
        self.assignments = dict(assignments)
        for v in jet_coords(n, r, order):
            if v not in self.assignments:
                raise ParamOutOfRange("point misses a value for %r" % (v,))

    @classmethod
    def random(cls, n: int, r: int, order: int,
               rng: RationalLCG) -> "JetPoint":
        return cls(n, r, order,
                   {v: rng.fraction() for v in jet_coords(n, r, order)})

    @classmethod
    def origin(cls, n: int, r: int, order: int) -> "JetPoint":
        return cls(n, r, order,
                   {v: Fraction(0) for v in jet_coords(n, r, order)})

    def value(self, v: Var) -> Fraction:
        try:
            return self.assignments[v]
        except KeyError:
            raise ParamOutOfRange(
                "point of order %d does not cover %r" % (self.order, v))


# ---------------------------------------------------------------------------
# structure-form preservation


def _structure_forms(n: int, r: int, k: int) -> List[Dict[Var, JetPolynomial]]:
    """The contact covectors d p^j_sigma - sum_i p^j_(sigma+1_i) dx^i for
    all |sigma| < k, as sparse coefficient maps coordinate -> function."""
    forms = []
    for j in range(r):
        for d in range(k):
            for sigma in sym_basis(n, d):
                omega: Dict[Var, JetPolynomial] = {
                    p_var(j, sigma): JetPolynomial.const(n, r, 1)}
                for i in range(n):
                    omega[x_var(i)] = -JetPolynomial.variable(
                        n, r, p_var(j, _raise_index(sigma, i)))
                forms.append(omega)
    return forms


def _lie_derivative_form(X: LieField,
                         omega: Dict[Var, JetPolynomial],
                         coords: List[Var]) -> Dict[Var, JetPolynomial]:
    n, r = X.n, X.r
    out: Dict[Var, JetPolynomial] = {}
    for alpha in coords:
        acc = JetPolynomial.zero(n, r)
        w = omega.get(alpha)
        if w is not None:
            acc = acc + X.apply_to(w)
        for beta, wb in omega.items():
            d = X.coefficient(beta).diff(alpha)
            if d:
                acc = acc + wb * d
        if acc:
            out[alpha] = acc
    return out


def cartan_preservation_check(X: LieField, trials: int = 100,
                              seed: int = 0) -> bool:
    """True iff at each seeded rational point the Lie derivative of every
    structure covector along X stays inside their pointwise span."""
    if X.k == 0:
        return True
    coords = jet_coords(X.n, X.r, X.k)
    cpos = {v: i for i, v in enumerate(coords)}
    omegas = _structure_forms(X.n, X.r, X.k)
    derived = [_lie_derivative_form(X, w, coords) for w in omegas]
    rng = RationalLCG(seed)
    for _ in range(trials):
        pt = JetPoint.random(X.n, X.r, X.k, rng)
        base: List[Vec] = []
        for w in omegas:
            base.append({cpos[v]: f.evaluate(pt) for v, f in w.items()})
        base_rank = rank_of_rows(base)
        targets: List[Vec] = []
        for dw in derived:
            row = {cpos[v]: f.evaluate(pt) for v, f in dw.items()}
            row = {i: c for i, c in row.items() if c}
            if row:
                targets.append(row)
        if rank_of_rows(base + targets) != base_rank:
            return False
    return True


# ---------------------------------------------------------------------------
# invariant derivatives


class TresseFrame:
    """n candidate invariants together with an evaluation point at which
    their total-derivative Jacobian is invertible."""

    __slots__ = ("functions", "point", "jacobian")

    def __init__(self, functions: Sequence[JetPolynomial], point: JetPoint):
        if not functions:
            raise ParamOutOfRange("need at least one frame function")
        n = functions[0].n
        if len(functions) != n:
            raise ParamOutOfRange("need exactly n frame functions")
        self.functions = list(functions)
        self.point = point
        self.jacobian = [[total_derivative(fb, ia).evaluate(point)
                          for fb in functions] for ia in range(n)]
        if _det(self.jacobian) == 0:
            raise SingularJacobian(
                "total-derivative Jacobian is singular at the point")


def _det(m: List[List[Fraction]]) -> Fraction:
    size = len(m)
    if size == 1:
        return m[0][0]
    total = Fraction(0)
    for c in range(size):
        if m[0][c]:
            minor = [row[:c] + row[c + 1:] for row in m[1:]]
            total += (-1) ** c * m[0][c] * _det(minor)
    return total


def _solve(m: List[List[Fraction]], rhs: List[Fraction]) -> List[Fraction]:
    size = len(m)
    aug = [list(m[i]) + [rhs[i]] for i in range(size)]
    for col in range(size):
        piv = next((row for row in range(col, size) if aug[row][col]), None)
        if piv is None:
            raise SingularJacobian("singular system")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [inv * v for v in aug[col]]
        for row in range(size):
            if row != col and aug[row][col]:
                f = aug[row][col]
                aug[row] = [a - f * b for a, b in zip(aug[row], aug[col])]
    return [aug[i][size] for i in range(size)]


def tresse(f: JetPolynomial, frame: TresseFrame) -> List[Fraction]:
    """Components of the invariant derivative of f in the frame, evaluated
    at the frame's point: the unique solution of the horizontal chain rule."""
    rhs = [total_derivative(f, i).evaluate(frame.point)
           for i in range(f.n)]
    return _solve(frame.jacobian, rhs)


def tresse_symbolic(f: JetPolynomial,
                    frame_fn: JetPolynomial) -> Tuple[JetPolynomial,
                                                      JetPolynomial]:
    """One-base-variable symbolic mode: numerator and denominator of the
    invariant derivative as polynomials (valid where the denominator
    does not vanish)."""
    if f.n != 1:
        raise ParamOutOfRange("symbolic mode is limited to one base variable")
    return total_derivative(f, 0), total_derivative(frame_fn, 0)


# ---------------------------------------------------------------------------
# brute-force symbol dimensions for jet-lifted pseudogroups


def _weight(v: Var, r: int) -> Tuple[int, ...]:
    if v[0] == "x":
        return (1,) + (0,) * r
    w = [-sum(v[2])] + [0] * r
    w[1 + v[1]] = 1
    return tuple(w)


def _wsum(w1, w2, sign=1):
    return tuple(a + sign * b for a, b in zip(w1, w2))


def _point_generators(n: int, r: int, k: int, cutoff: int):
    zero = JetPolynomial.zero(n, r)
    gens = []
    vars0 = [x_var(i) for i in range(n)] + [u_var(j, n) for j in range(r)]
    for d in range(cutoff + 1):
        for exps in sym_basis(n + r, d):
            mono = JetPolynomial(n, r, {_canonical(
                {vars0[t]: exps[t] for t in range(n + r)}): Fraction(1)})
            w = (d - sum(exps[n:]),) + tuple(exps[n:])
            for i in range(n):
                a = [mono if t == i else zero for t in range(n)]
                field = prolong_point(a, [zero] * r, k)
                gens.append((_wsum(w, _weight(x_var(i), r), -1), field))
            for j in range(r):
                b = [mono if t == j else zero for t in range(r)]
                field = prolong_point([zero] * n, b, k)
                gens.append((_wsum(w, _weight(u_var(j, n), r), -1), field))
    return gens


def _contact_generators(n: int, k: int, cutoff: int):
    r = 1
    gens = []
    vars1 = [x_var(i) for i in range(n)] + [u_var(0, n)] \
        + [p_var(0, _unit(n, i)) for i in range(n)]
    wts = [_weight(v, r) for v in vars1]
    for d in range(cutoff + 1):
        for exps in sym_basis(2 * n + 1, d):
            phi = JetPolynomial(n, r, {_canonical(
                {vars1[t]: exps[t] for t in range(2 * n + 1)}): Fraction(1)})
            w = (0, 0)
            for t in range(2 * n + 1):
                w = _wsum(w, tuple(exps[t] * c for c in wts[t]))
            field = prolong_contact(phi, k)
            gens.append((_wsum(w, _weight(u_var(0, n), r), -1), field))
    return gens


def _taylor_groups(gens, coords, l: int):
    """Rows of degree-<=l Taylor data, grouped by the scaling weight that
    the lift construction preserves (disjoint column support per group)."""
    cpos = {v: i for i, v in enumerate(coords)}
    groups: Dict[Tuple, List[Dict]] = {}
    for key, field in gens:
        row: Dict[Tuple, Fraction] = {}
        for v, poly in field.coeffs.items():
            vp = cpos[v]
            for mono, c in poly.terms.items():
                d = sum(e for _, e in mono)
                if d > l:
                    continue
                exp = [0] * len(coords)
                for var, e in mono:
                    exp[cpos[var]] = e
                row[(d, tuple(exp), vp)] = c
        if row:
            groups.setdefault(key, []).append(row)
    return groups


def _group_split(rows, l: int):
    cols = set()
    for row in rows:
        cols.update(row)
    low = sorted(c for c in cols if c[0] < l)
    high = sorted(c for c in cols if c[0] == l)
    idx = {c: i for i, c in enumerate(low + high)}
    indexed = [{idx[c]: val for c, val in row.items()} for row in rows]
    return indexed, len(low), high


def _lie_symbol_data(kind: str, n: int, r: int, k: int, l: int, cutoff: int):
    if kind == "point":
        gens = _point_generators(n, r, k, cutoff)
    elif kind == "contact":
        if r != 1:
            raise ParamOutOfRange("contact lifts need fibre rank 1")
        gens = _contact_generators(n, k, cutoff)
    else:
        raise ParamOutOfRange("oracle kind must be point or contact")
    coords = jet_coords(n, r, k)
    return coords, _taylor_groups(gens, coords, l)


def _oracle_dim(kind, n, r, k, l, cutoff) -> int:
    _, groups = _lie_symbol_data(kind, n, r, k, l, cutoff)
    total = 0
    for rows in groups.values():
        indexed, n_low, _ = _group_split(rows, l)
        full = rank_of_rows(indexed)
        lowpart = [{i: c for i, c in row.items() if i < n_low}
                   for row in indexed]
        total += full - rank_of_rows(lowpart)
    return total


def symbol_oracle(kind: str, n: int, r: int, k: int, l: int,
                  cutoff: Optional[int] = None, saturate: bool = True,
                  cap: Optional[int] = None) -> int:
    """Dimension of the order-l symbol of jet-lifted transformations,
    computed by brute force: enumerate monomial generating data, lift each
    to the order-k jet space, and take the rank of the degree-l Taylor
    parts of lifts vanishing to order l."""
    if n < 1 or r < 1 or k < 0 or l < 1:
        raise ParamOutOfRange("need n, r, l >= 1 and k >= 0")
    coords = jet_coords(n, r, k)
    width = len(coords)
    columns = width * sum(math.comb(width + d - 1, d) for d in range(l + 1))
    if columns > (cap if cap is not None else ORACLE_COLUMN_CAP):
        raise CapExceeded("oracle matrix would have %d columns" % columns)
    c0 = cutoff if cutoff is not None else k + l + 1
    dim = _oracle_dim(kind, n, r, k, l, c0)
    if saturate:
        again = _oracle_dim(kind, n, r, k, l, c0 + 1)
        if again != dim:
            raise CancellationFailure(
                "degree cutoff %d is not saturated (%d -> %d)"
                % (c0, dim, again))
    return dim


def lie_symbol_subspace(kind: str, n: int, r: int, k: int, l: int,
                        cutoff: Optional[int] = None, saturate: bool = True,
                        cap: Optional[int] = None) -> Subspace:
    """The order-l symbol of jet-lifted transformations materialized inside
    the symmetric tensors over the full jet-space coordinates."""
    if n < 1 or r < 1 or k < 0 or l < 1:
        raise ParamOutOfRange("need n, r, l >= 1 and k >= 0")
    coords = jet_coords(n, r, k)
    width = len(coords)
    shape = TensorShape(width, l, 0, width)
    if cap is not None and shape.dim > cap:
        raise CapExceeded("ambient dimension %d exceeds the cap %d"
                          % (shape.dim, cap))
    c0 = cutoff if cutoff is not None else k + l + 1
    first = _embed(kind, n, r, k, l, c0, shape)
    if saturate:
        if _embed(kind, n, r, k, l, c0 + 1, shape) != first:
            raise CancellationFailure("degree cutoff %d is not saturated" % c0)
    return first


def _embed(kind, n, r, k, l, cutoff, shape: TensorShape) -> Subspace:
    _, groups = _lie_symbol_data(kind, n, r, k, l, cutoff)
    out_rows: List[Vec] = []
    for rows in groups.values():
        indexed, n_low, high = _group_split(rows, l)
        ech = echelon(indexed)
        for piv, row in ech.items():
            if piv < n_low:
                continue
            vec: Vec = {}
            for local, c in row.items():
                _, exp, vp = high[local - n_low]
                vec[shape.index(shape.sym_pos(exp), 0, vp)] = Fraction(c)
            out_rows.append(vec)
    return Subspace.from_rows(shape, out_rows)
