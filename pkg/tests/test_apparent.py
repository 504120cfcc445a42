"""Tests for the apparent map on the elliptic side: coefficient matrices,
the projective-linear family, the symmetrized pair, the exact fiber count,
and the injectivity witness."""

import pytest

from parconn import apparent as ap
from parconn import involution as inv
from parconn.apparent import ResampleRequest, SymPair
from parconn.connections import NonGenericError
from parconn.family import AppClass, app_infty, family
from parconn.involution import P_PI
from parconn.rat import as_rat
from parconn.sampling import random_assignment

from conftest import rq


@pytest.fixture(scope="module")
def params(standard_point):
    return {k: standard_point[k] for k in ("lam", "t", "nu")}


@pytest.fixture(scope="module")
def u_std(standard_point):
    return (standard_point["ul"], standard_point["ut"])


def _num(matrix):
    return [[matrix[i, j].eval_rat({}) for j in range(matrix.ncols)]
            for i in range(matrix.nrows)]


# ----------------------------------------------------------------------
# Coefficient matrices
# ----------------------------------------------------------------------

def test_coefficient_matrix_anchors(u_std, params, ref_values):
    mats = ap.coefficient_matrices(u_std, params)
    assert _num(mats.n_infty) == rq(ref_values["n_inf_standard"])
    assert _num(mats.n_psi) == rq(ref_values["n_sig_standard"])


def test_coefficient_matrices_reproduce_app_maps(u_std, params):
    """N . (1, c1, c2) must equal the apparent coefficients of family(u, c)
    at a c that took no part in the extraction."""
    c = (as_rat("3/2"), as_rat("-2"))
    mats = ap.coefficient_matrices(u_std, params)
    vec = [as_rat(1), c[0], c[1]]
    sys = family(u_std, c).subst(params)
    direct = [v.eval_rat({}) for v in app_infty(sys).coeffs]
    linear = mats.n_infty.eval_rat({})
    got = [sum((linear[i][j] * vec[j] for j in range(3)), as_rat(0))
           for i in range(3)]
    assert got == direct


def test_symbolic_matrices_have_constant_denominators():
    mats = ap.coefficient_matrices()
    for matrix in (mats.n_infty, mats.n_psi):
        for i in range(3):
            for j in range(3):
                assert matrix[i, j].den.is_constant()


# ----------------------------------------------------------------------
# The projective-linear family M(u)
# ----------------------------------------------------------------------

def test_m_matrix_normalized_anchor(u_std, params, ref_values):
    m = ap.m_matrix(u_std, params)
    pivot = m[0, 0].eval_rat({})
    values = [[m[i, j].eval_rat({}) / pivot for j in range(3)]
              for i in range(3)]
    assert values == rq(ref_values["m_matrix_standard_normalized"])


def test_m_matrix_involution_projective(params):
    """M(psi u) . M(u) is a scalar matrix: the family inverts itself over
    the deck involution."""
    u = (as_rat(3), as_rat("5/2"))
    ub = inv.ubar_t(u, params)
    prod = ap.m_matrix((u[0], ub), params) * ap.m_matrix(u, params)
    pivot = prod[0, 0].eval_rat({})
    assert pivot != 0
    for i in range(3):
        for j in range(3):
            if i == j:
                assert prod[i, j].eval_rat({}) == pivot
            else:
                assert prod[i, j].is_zero()


def test_m_matrix_degenerates_on_pi_conic(params):
    on_pi = (as_rat(5), as_rat(-15))
    assert P_PI.eval_rat({"ul": 5, "ut": -15, "lam": 2, "t": 3}) == 0
    mats = ap.coefficient_matrices(on_pi, params)
    raw = mats.n_psi * mats.n_infty.adjugate()
    assert raw.det().is_zero()
    # off the conic the determinant is nonzero
    mats2 = ap.coefficient_matrices((as_rat(5), as_rat(7)), params)
    raw2 = mats2.n_psi * mats2.n_infty.adjugate()
    assert not raw2.det().is_zero()


# ----------------------------------------------------------------------
# The symmetrized pair
# ----------------------------------------------------------------------

def test_sym_pair_equality_is_unordered():
    a = AppClass.make([1, 2, 3])
    b = AppClass.make([4, 5, 6])
    assert SymPair(a, b) == SymPair(b, a)
    assert SymPair(a, b) == SymPair(AppClass.make([2, 4, 6]), b)
    assert SymPair(a, b) != SymPair(a, AppClass.make([4, 5, 7]))


def test_app_c_invariant_under_full_involution(u_std, params, standard_point):
    c = (standard_point["c1"], standard_point["c2"])
    tmat = inv.t_psi_paper(u_std, params)
    cp = tuple(v.eval_rat({}) for v in inv.transport_coeffs(tmat, c))
    psi_u = inv.psi_bun(u_std, params)
    assert ap.app_c(u_std, c, params) == ap.app_c(psi_u, cp, params)
    scrambled = ap.app_c(u_std, (as_rat(9), as_rat(-3)), params)
    assert not (ap.app_c(u_std, c, params) == scrambled)


# ----------------------------------------------------------------------
# Fiber count
# ----------------------------------------------------------------------

def test_fiber_count_frozen_pipeline(params, ref_values):
    """The full elimination for the frozen (a, s) reproduces every staged
    degree of the oracle run."""
    a = AppClass.make([3, -1, 2])
    s = AppClass.make([1, 4, -2])
    report = ap.fiber_count_report(a, s, params)
    assert list(report.cross_degrees) == rq(ref_values[
        "fiber_cross_equation_degrees"])
    assert report.eliminant_degree == rq(ref_values["fiber_eliminant_degree"])
    assert report.squarefree_degree == rq(
        ref_values["fiber_squarefree_degree"])
    assert report.count == rq(ref_values["fiber_count"])
    assert report.spurious_removed == rq(ref_values[
        "fiber_spurious_eliminant_roots"])
    assert ap.fiber_count(a, s, params) == 12


def test_fiber_count_random_pairs(params):
    for seed in (3, 4):
        a, s = ap.random_app_pair(seed)
        assert ap.fiber_count(a, s, params) == 12


def test_fiber_count_second_specialization():
    params = {"lam": as_rat(3), "t": as_rat(5), "nu": as_rat("1/7")}
    a, s = ap.random_app_pair(11)
    assert ap.fiber_count(a, s, params) == 12


def test_fiber_count_requires_numeric_params():
    a, s = ap.random_app_pair(1)
    with pytest.raises(ValueError):
        ap.fiber_count(a, s, {"lam": as_rat(2), "t": as_rat(3)})


def test_fiber_count_trials_driver(params):
    reports = ap.fiber_count_trials(2, 21, params)
    assert len(reports) == 2
    assert all(r.count == 12 for r in reports)


# ----------------------------------------------------------------------
# Injectivity witness
# ----------------------------------------------------------------------

def test_injectivity_witness_passes(params):
    assert ap.injectivity_witness(10, 5, params)


def test_witness_cross_product_nonzero_at_anchor(params):
    """The quantity the witness tests: M(u)^2 a is not proportional to a
    for a concrete generic class at the standard point."""
    u = (as_rat(5), as_rat(7))
    m = ap.m_matrix(u, params)
    twice = (m * m).eval_rat({})
    a = [as_rat(3), as_rat(-1), as_rat(2)]
    w = [sum((twice[i][j] * a[j] for j in range(3)), as_rat(0))
         for i in range(3)]
    cross = (w[0] * a[1] - w[1] * a[0],
             w[0] * a[2] - w[2] * a[0],
             w[1] * a[2] - w[2] * a[1])
    assert any(v != 0 for v in cross)
