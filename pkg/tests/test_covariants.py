"""Flag restriction calculus: stationary subspaces, obstruction spaces,
row cohomology, and the restriction comparison maps."""

import pytest

from spencer.errors import EquationNotInvariant
from spencer.exactla import TensorShape, Subspace, kernel
from spencer.symbolic import SymbolicSystem, spencer_H, strongly_noncharacteristic
from spencer.covariants import (
    FlagContext, restriction_map, restriction_kernel, stationary_subspace,
    covariants, ORDER_ONE_CAVEAT,
    stationary_row_cohomology, restricted_spencer_H, stationary_tau_cohomology,
    covariant_cohomology, acyclicity_window,
    restriction_isomorphism_check, transversality_scan,
)
from spencer.catalog import parse_pseudogroup, symbol, system, stratum_tau


def axis_flag(m, n):
    return FlagContext(m, [[1 if j == i else 0 for j in range(m)]
                           for i in range(n)])


# ---------------------------------------------------------------- restriction

def test_restriction_kernel_dimensions():
    assert restriction_kernel(axis_flag(2, 1), 1).dim == 3
    assert restriction_kernel(axis_flag(3, 2), 2).dim == 15


def test_restriction_kernel_is_kernel_of_restriction_map():
    for m in (2, 3, 4):
        for n in range(1, m):
            ctx = axis_flag(m, n)
            for l in (1, 2, 3):
                assert kernel(restriction_map(ctx, l)) == restriction_kernel(ctx, l)


def test_restriction_map_surjective_on_full_source():
    from spencer.exactla import image
    for m in (2, 3):
        for n in range(1, m):
            ctx = axis_flag(m, n)
            for l in (1, 2):
                assert image(restriction_map(ctx, l)).is_full


def test_oblique_flag_matches_axis_flag_dimensions():
    # restriction theory only sees the flag up to linear equivalence
    straight = axis_flag(3, 1)
    slanted = FlagContext(3, [[1, 2, -1]])
    for l in (1, 2, 3):
        assert (restriction_kernel(straight, l).dim
                == restriction_kernel(slanted, l).dim)


# ---------------------------------------------------------------- reports

def test_full_source_reports_over_a_line():
    ctx = axis_flag(2, 1)
    expected = {1: (4, 3), 2: (6, 5), 3: (8, 7)}
    for l, (dim_g, dim_stat) in expected.items():
        rep = covariants(ctx, Subspace.full(TensorShape(2, l, 0, 2)))
        assert rep.dim_g == dim_g
        assert rep.dim_stationary == dim_stat
        assert rep.dim_O == 0
        assert rep.transversal


def test_order_one_reports_carry_caveat():
    ctx = axis_flag(2, 1)
    rep1 = covariants(ctx, Subspace.full(TensorShape(2, 1, 0, 2)))
    rep2 = covariants(ctx, Subspace.full(TensorShape(2, 2, 0, 2)))
    assert rep1.caveat == ORDER_ONE_CAVEAT
    assert rep2.caveat is None


def test_report_jsonable_fields():
    ctx = axis_flag(2, 1)
    data = covariants(ctx, Subspace.full(TensorShape(2, 2, 0, 2))).to_jsonable()
    for field in ("l", "dim_g", "dim_h", "dim_stationary",
                  "dim_lambda_image", "dim_O", "transversal",
                  "dim_necessary_ok"):
        assert field in data


def test_equation_must_contain_restricted_source():
    ctx = axis_flag(2, 1)
    g = Subspace.full(TensorShape(2, 1, 0, 2))
    h = Subspace.zero(TensorShape(1, 1, 0, 1))
    with pytest.raises(EquationNotInvariant):
        covariants(ctx, g, h)


# ---------------------------------------------------------------- catalog obstructions

def test_rotation_obstruction_rows():
    expected = {
        (2, 1): [0, 1, 1, 1],
        (3, 1): [0, 2, 2, 2],
        (3, 2): [0, 3, 4, 5],
    }
    for (m, n), row in expected.items():
        spec = parse_pseudogroup("isometry:n=%d" % m)
        ctx = axis_flag(m, n)
        got = [covariants(ctx, symbol(spec, l)).dim_O for l in (1, 2, 3, 4)]
        assert got == row


def test_complex_structure_obstructions():
    cx = parse_pseudogroup("complex:nc=2")
    real = FlagContext(4, stratum_tau(cx, "totally-real"))
    jline = FlagContext(4, stratum_tau(cx, "j-invariant-line"))
    assert [covariants(real, symbol(cx, l)).dim_O for l in (1, 2, 3)] == [0, 0, 0]
    assert [covariants(jline, symbol(cx, l)).dim_O for l in (1, 2)] == [2, 4]


def test_symplectic_strata_obstructions():
    sp4 = parse_pseudogroup("symplectic:2n=4")
    lag = FlagContext(4, stratum_tau(sp4, "lagrangian"))
    nondeg = FlagContext(4, stratum_tau(sp4, "omega-nondegenerate"))
    assert [covariants(lag, symbol(sp4, l)).dim_O for l in (1, 2)] == [1, 2]
    assert [covariants(nondeg, symbol(sp4, l)).dim_O for l in (1, 2)] == [0, 0]


def test_contact_strata_obstructions():
    c3 = parse_pseudogroup("contact:dim=3")
    trans = FlagContext(3, stratum_tau(c3, "transversal-to-contact-plane"))
    inside = FlagContext(3, stratum_tau(c3, "inside-contact-plane"))
    assert [covariants(trans, symbol(c3, l)).dim_O for l in (1, 2, 3)] == [0, 0, 0]
    assert [covariants(inside, symbol(c3, l)).dim_O for l in (1, 2)] == [1, 1]


# ---------------------------------------------------------------- row cohomology

def test_full_source_row_cohomology_vanishes():
    gsys = system(parse_pseudogroup("general:m=3"), 5)
    for n in (1, 2):
        ctx = axis_flag(3, n)
        for l in (1, 2, 3, 4):
            for s in range(0, min(n, l) + 1):
                assert covariant_cohomology(ctx, gsys, None, l, s) == 0


def test_stationary_row_cohomology_vanishes_above_order():
    cx = parse_pseudogroup("complex:nc=2")
    ctx = FlagContext(4, stratum_tau(cx, "totally-real"))
    gsys = system(cx, 6)
    for a in (1, 2, 3):
        assert stationary_row_cohomology(ctx, gsys, a, 0) == 0
        assert stationary_row_cohomology(ctx, gsys, a + 1, 1) == 0


def test_acyclicity_window_full_source():
    gsys = system(parse_pseudogroup("general:m=3"), 5)
    assert acyclicity_window(gsys, 1, 4, 3) == 3


def test_quotient_cohomology_matches_stationary_shift():
    # two-step comparison under machine-checked vanishing hypotheses
    cases = []
    g3 = system(parse_pseudogroup("general:m=3"), 6)
    cases.append((axis_flag(3, 1), g3, 3, 1))
    cx = parse_pseudogroup("complex:nc=2")
    cases.append((FlagContext(4, stratum_tau(cx, "totally-real")),
                  system(cx, 6), 3, 1))
    for ctx, gsys, l, s in cases:
        full_h = SymbolicSystem(ctx.m, gsys.value_dim, {}, fill="full")
        assert spencer_H(gsys, l - s - 1, s + 1) == 0
        assert spencer_H(gsys, l - s - 2, s + 2) == 0
        assert restricted_spencer_H(ctx, full_h, l, s) == 0
        assert spencer_H(full_h, l - s - 1, s + 1) == 0
        lhs = covariant_cohomology(ctx, gsys, None, l, s)
        rhs = stationary_row_cohomology(ctx, gsys, l, s + 2)
        assert lhs == rhs


# ---------------------------------------------------------------- comparison map

def test_restriction_isomorphism_on_totally_real_flag():
    cx = parse_pseudogroup("complex:nc=2")
    ctx = FlagContext(4, stratum_tau(cx, "totally-real"))
    gsys = system(cx, 6)
    assert strongly_noncharacteristic(ctx.tau, symbol(cx, 1))
    for (l, s) in ((3, 1), (4, 1), (4, 2)):
        res = restriction_isomorphism_check(ctx, gsys, l, s, 1)
        assert res.applicable
        assert res.lhs == res.rhs


def test_restriction_isomorphism_on_planar_rotations():
    iso2 = parse_pseudogroup("isometry:n=2")
    ctx = axis_flag(2, 1)
    gsys = system(iso2, 6)
    assert strongly_noncharacteristic(ctx.tau, symbol(iso2, 1))
    for l in (2, 3, 4):
        res = restriction_isomorphism_check(ctx, gsys, l, 0, 1)
        assert res.applicable
        assert res.lhs == res.rhs
        assert res.window == 1


def test_characteristic_flag_is_reported_not_applicable():
    gsys = system(parse_pseudogroup("general:m=3"), 5)
    res = restriction_isomorphism_check(axis_flag(3, 1), gsys, 3, 1, 1)
    assert not res.strongly_noncharacteristic
    assert not res.applicable


# ---------------------------------------------------------------- scan

def test_transversality_scan_planar_hamiltonian():
    sp2 = parse_pseudogroup("symplectic:2n=2")
    gsys = system(sp2, 4)
    ctx = axis_flag(2, 1)
    entries = transversality_scan(ctx, gsys, None, 3)
    assert [e.report.l for e in entries] == [1, 2, 3]
    for e in entries:
        assert e.report.transversal
        assert e.report.dim_O == 0
        assert e.stationary_tau_H2_zero
        assert e.restricted_H1_zero
    flat = entries[0].to_jsonable()
    assert flat["l"] == 1
    assert flat["stationary_tau_H2_zero"] is True
