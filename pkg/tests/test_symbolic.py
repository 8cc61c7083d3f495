"""Polynomial boundary complex: delta calculus, cohomology, prolongation."""

import random
from fractions import Fraction

import pytest

from spencer.errors import (MissingGrade, NotASubcomplex, ZeroVector,
                            DegreeUnderflow)
from spencer.exactla import TensorShape, Subspace, contains
from spencer.symbolic import (
    delta_map, restrict_delta, prolong, SymbolicSystem,
    spencer_H, cell_dim, spencer_table,
    char_fiber, annihilator, noncharacteristic_obstruction,
    strongly_noncharacteristic,
)


def lower_mono(mono, i):
    out = list(mono)
    out[i] -= 1
    return tuple(out)


def partial(shape, vec, i):
    """d/dx_i on a flat vector of shape, landing one symmetric degree down."""
    lower = TensorShape(shape.base_dim, shape.sym_degree - 1, shape.ext_degree,
                        shape.value_dim, shape.ext_dim)
    out = {}
    for flat, c in vec.items():
        s, w, v = shape.unpack(flat)
        mono = shape.sym_list()[s]
        if mono[i] == 0:
            continue
        tgt = lower.index(lower.sym_pos(lower_mono(mono, i)), w, v)
        out[tgt] = out.get(tgt, Fraction(0)) + Fraction(mono[i]) * Fraction(c)
    return {k: v for k, v in out.items() if v}


def so_subspace(n):
    shp = TensorShape(n, 1, 0, n)
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            rows.append({shp.index(i, 0, j): Fraction(1),
                         shp.index(j, 0, i): Fraction(-1)})
    return Subspace.from_rows(shp, rows)


def random_subspace(rng, shape, count):
    rows = []
    for _ in range(count):
        row = {}
        for j in range(shape.dim):
            if rng.random() < 0.4:
                row[j] = Fraction(rng.randint(-4, 4))
        rows.append(row)
    return Subspace.from_rows(shape, rows)


# ---------------------------------------------------------------- delta

def test_delta_squares_to_zero():
    for n in (1, 2, 3):
        for d in (2, 3, 4):
            for e in range(0, n - 1):
                for w in (1, 2):
                    shp = TensorShape(n, d, e, w)
                    mid = TensorShape(n, d - 1, e + 1, w)
                    dd = delta_map(shp).compose(delta_map(mid))
                    assert all(not row for row in dd.rows), (n, d, e, w)


def test_delta_explicit_first_degree():
    dm = delta_map(TensorShape(2, 1, 0, 1))
    assert dm.rows == ({0: Fraction(1)}, {1: Fraction(1)})


def test_delta_carries_monomial_multiplicity():
    # first entry of S^2 in two variables is the square of the first variable
    dm = delta_map(TensorShape(2, 2, 0, 1))
    assert dm.rows[0] == {0: Fraction(2)}


def test_delta_injective_on_zero_forms():
    for n in (1, 2, 3):
        for d in (1, 2, 3, 4):
            shp = TensorShape(n, d, 0, 1)
            dm = delta_map(shp)
            from spencer.exactla import kernel
            assert kernel(dm).dim == 0


def test_full_symbol_rows_are_acyclic():
    # quick version; the acceptance suite runs the wider sweep
    for m in (1, 2, 3):
        for w in (1, 2):
            sysm = SymbolicSystem(m, w, {}, fill="full")
            for i in range(1, 5):
                for j in range(0, m + 1):
                    assert spencer_H(sysm, i, j) == 0, (m, w, i, j)


def test_constants_survive_at_corner():
    sysm = SymbolicSystem(2, 1, {}, fill="full")
    assert spencer_H(sysm, 0, 0) == 1


def test_restricted_delta_matches_full_on_full_flag():
    m = 3
    tau = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    shp = TensorShape(m, 2, 1, 1)
    full = delta_map(shp)
    rest = restrict_delta(tau, shp)
    for j in range(shp.dim):
        vec = {j: Fraction(1)}
        assert rest.apply(vec) == full.apply(vec)


# ---------------------------------------------------------------- cohomology

def test_orthogonal_symbols_have_curvature_cell():
    for n in (2, 3, 4):
        sysm = SymbolicSystem(n, n, {1: so_subspace(n)})
        assert sysm.dim(1) == n * (n - 1) // 2
        assert sysm.dim(2) == 0
        assert spencer_H(sysm, 1, 2) == n * n * (n * n - 1) // 12
        assert spencer_H(sysm, 1, 1) == 0


def test_euler_characteristic_per_antidiagonal():
    systems = [
        SymbolicSystem(3, 3, {1: so_subspace(3)}),
        SymbolicSystem(2, 1, {}, fill="full"),
    ]
    for sysm in systems:
        m = sysm.base_dim
        for total in range(1, 5):
            chi_cells = 0
            chi_h = 0
            for j in range(0, m + 1):
                i = total - j
                if i < 0:
                    continue
                chi_cells += (-1) ** j * cell_dim(sysm, i, j)
                chi_h += (-1) ** j * spencer_H(sysm, i, j)
            assert chi_cells == chi_h, (sysm.value_dim, total)


def test_spencer_table_jsonable_layout():
    tab = spencer_table(SymbolicSystem(2, 1, {}), range(0, 3), range(0, 3))
    data = tab.to_jsonable()
    assert data["source"] == "spencer"
    assert data["cells"]["0,0"] == 1
    assert all(v == 0 for key, v in data["cells"].items() if key != "0,0")


# ---------------------------------------------------------------- systems

def test_system_grade_zero_defaults_to_full():
    sysm = SymbolicSystem(3, 3, {1: so_subspace(3)})
    assert sysm.dim(0) == 3


def test_gap_in_grades_raises():
    zero1 = Subspace.zero(TensorShape(2, 1, 0, 1))
    zero3 = Subspace.zero(TensorShape(2, 3, 0, 1))
    with pytest.raises(MissingGrade):
        SymbolicSystem(2, 1, {1: zero1, 3: zero3}).grade(2)


def test_non_subcomplex_grades_rejected():
    zero1 = Subspace.zero(TensorShape(2, 1, 0, 1))
    full2 = Subspace.full(TensorShape(2, 2, 0, 1))
    with pytest.raises(NotASubcomplex):
        SymbolicSystem(2, 1, {1: zero1, 2: full2})


def test_negative_degree_raises():
    sysm = SymbolicSystem(2, 1, {}, fill="full")
    with pytest.raises(DegreeUnderflow):
        sysm.grade(-1)


# ---------------------------------------------------------------- prolong

def test_prolong_of_full_is_full():
    for n in (1, 2, 3):
        for d in (1, 2):
            for w in (1, 2):
                g = Subspace.full(TensorShape(n, d, 0, w))
                assert prolong(g).is_full


def test_prolong_rows_differentiate_back_into_source():
    rng = random.Random(43)
    for trial in range(15):
        n = rng.randint(1, 3)
        w = rng.randint(1, 2)
        d = rng.randint(1, 2)
        shp = TensorShape(n, d, 0, w)
        g = random_subspace(rng, shp, rng.randint(0, shp.dim))
        pg = prolong(g)
        for row in pg.rows:
            for i in range(n):
                assert g.contains_vector(partial(pg.ambient, row, i))


def test_prolong_is_maximal_with_that_property():
    rng = random.Random(47)
    for trial in range(10):
        n = rng.randint(1, 3)
        shp = TensorShape(n, 1, 0, 2)
        g = random_subspace(rng, shp, rng.randint(0, shp.dim))
        pg = prolong(g)
        up = TensorShape(n, 2, 0, 2)
        # no basis vector outside the prolongation differentiates into g
        for j in range(up.dim):
            vec = {j: Fraction(1)}
            if pg.contains_vector(vec):
                continue
            assert any(not g.contains_vector(partial(up, vec, i))
                       for i in range(n))


def test_prolong_monotone_under_inclusion():
    rng = random.Random(53)
    for trial in range(10):
        shp = TensorShape(2, 1, 0, 2)
        b = random_subspace(rng, shp, 3)
        a = Subspace.from_rows(shp, b.rows[:rng.randint(0, b.dim)])
        assert contains(prolong(b), prolong(a))


def test_prolong_of_rotations_vanishes():
    for n in (2, 3, 4):
        assert prolong(so_subspace(n)).dim == 0


# ---------------------------------------------------------------- characteristics

def symplectic_grade_one():
    # span of Hamiltonian quadratics in two variables, i.e. sl(2) fields
    shp = TensorShape(2, 1, 0, 2)
    rows = [
        {shp.index(0, 0, 0): Fraction(1), shp.index(1, 0, 1): Fraction(-1)},
        {shp.index(1, 0, 0): Fraction(1)},
        {shp.index(0, 0, 1): Fraction(1)},
    ]
    return Subspace.from_rows(shp, rows)


def test_char_fiber_of_plane_symplectic_is_a_line():
    g1 = symplectic_grade_one()
    assert char_fiber([1, 0], g1).dim == 1
    assert char_fiber([0, 1], g1).dim == 1
    assert char_fiber([2, 3], g1).dim == 1


def test_char_fiber_rejects_zero_covector():
    with pytest.raises(ZeroVector):
        char_fiber([0, 0], symplectic_grade_one())


def test_char_fiber_of_full_symbols_is_everything():
    g1 = Subspace.full(TensorShape(3, 1, 0, 3))
    assert char_fiber([1, 1, 0], g1).dim == 3


def test_annihilator_dimension():
    ann = annihilator([[1, 0, 0], [0, 1, 0]], 3)
    assert ann.dim == 1
    assert ann.contains_vector({2: Fraction(1)})


def test_strong_noncharacteristicity_detects_bad_flags():
    from spencer.catalog import parse_pseudogroup, symbol, stratum_tau
    cx = parse_pseudogroup("complex:nc=2")
    g1 = symbol(cx, 1)
    good = stratum_tau(cx, "totally-real")
    bad = stratum_tau(cx, "j-invariant-line")
    assert strongly_noncharacteristic(good, g1)
    assert noncharacteristic_obstruction(good, g1).dim == 0
    assert not strongly_noncharacteristic(bad, g1)
    assert noncharacteristic_obstruction(bad, g1).dim == 4
