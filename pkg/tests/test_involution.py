"""Tests for the coordinate form of the self-correspondence: the 2:1 bundle
chart, the fiberwise coefficient transport, the equivariant base change, the
symplectic factor, the Lagrangian section, the fixed locus, and the local
quotient-singularity model."""

import pytest

from parconn import involution as inv
from parconn.connections import NonGenericError
from parconn.involution import (ALPHA, DELTA, P_LAMBDA, P_PI, P_SIGMA, Q_POLY,
                                U_T_INFINITY)
from parconn.linalg import MatrixRF
from parconn.poly import ExactDivisionError, var
from parconn.rat import as_rat
from parconn.ratfunc import RatFunc, as_ratfunc
from parconn.sampling import random_assignment, seed_stream

from conftest import rq


@pytest.fixture(scope="module")
def params(standard_point):
    return {k: standard_point[k] for k in ("lam", "t", "nu")}


@pytest.fixture(scope="module")
def u_std(standard_point):
    return (standard_point["ul"], standard_point["ut"])


@pytest.fixture(scope="module")
def c_std(standard_point):
    return (standard_point["c1"], standard_point["c2"])


def _num(matrix):
    return [[matrix[i, j].eval_rat({}) for j in range(matrix.ncols)]
            for i in range(matrix.nrows)]


# ----------------------------------------------------------------------
# Special polynomials
# ----------------------------------------------------------------------

def test_special_polynomial_identities():
    # p_pi^2 = delta + p_lambda p_sigma ties the three curves together
    assert P_PI * P_PI == DELTA + P_LAMBDA * P_SIGMA
    # the sigma polynomial has u_t-leading coefficient p_lambda
    lead = P_SIGMA.coeffs_in("ut")[2]
    assert lead == P_LAMBDA
    # delta involves only the lambda-side coordinate
    assert "ut" not in DELTA.variables()


def test_delta_factorization():
    t, lam, ul = var("t"), var("lam"), var("ul")
    assert DELTA == t * (t - 1) * (t - lam) * ul * (ul - 1) * (ul - lam)
    assert ALPHA == 2 * ul * (ul - 1) * (ul - lam)


# ----------------------------------------------------------------------
# Bundle chart and deck involution
# ----------------------------------------------------------------------

def test_chart_anchor_values(u_std, params, ref_values):
    assert inv.z_coord(u_std, params).eval_rat({}) == rq(ref_values["z_standard"])
    assert inv.w_coord(u_std, params).eval_rat({}) == rq(ref_values["w_standard"])
    assert inv.ubar_t(u_std, params) == rq(ref_values["ubar_standard"])


def test_chart_guards_non_generic(params):
    with pytest.raises(NonGenericError):
        inv.z_coord((params["lam"], as_rat(7)), params)
    # a point on the pi-conic: its involution image is at u_t infinity
    on_pi = (as_rat(5), as_rat(-15))
    assert P_PI.eval_rat({"ul": 5, "ut": -15, "lam": 2, "t": 3}) == 0
    assert inv.ubar_t(on_pi, params) is U_T_INFINITY
    with pytest.raises(NonGenericError):
        inv.w_coord(on_pi, params)


def test_deck_involution_is_involutive(u_std, params):
    ub = inv.ubar_t(u_std, params)
    assert inv.ubar_t((u_std[0], ub), params) == u_std[1]


def test_deck_involution_symbolic():
    # ubar(ul, ubar(ul, ut)) == ut as rational functions
    ut = RatFunc.from_var("ut")
    ub = inv.ubar_t()
    again = ub.subst({"ut": ub})
    assert again == ut


def test_chart_identities_symbolic():
    ids = inv.invariant_identities()
    assert ids == {name: True for name in ids}


def test_psi_bun_swaps_fiber(u_std, params):
    ul, ut = inv.psi_bun(u_std, params)
    assert ul == u_std[0]
    # both fiber points map to the same chart values
    z1, w1 = inv.phi_bun(u_std, params)
    z2, w2 = inv.phi_bun((ul, ut), params)
    assert z1.eval_rat({}) == z2.eval_rat({})
    assert w1.eval_rat({}) == w2.eval_rat({})


# ----------------------------------------------------------------------
# Coefficient transport
# ----------------------------------------------------------------------

def test_transport_anchor(u_std, params, ref_values):
    tmat = inv.t_psi_paper(u_std, params)
    assert _num(tmat) == rq(ref_values["t_matrix_standard"])
    assert tmat[1, 1].eval_rat({}) == rq(ref_values["t11_over_delta_standard"])


def test_transport_shape_symbolic():
    tmat = inv.t_psi_paper()
    assert tmat[0, 0] == RatFunc.one()
    assert tmat[0, 1].is_zero() and tmat[0, 2].is_zero()
    assert tmat[1, 2].is_zero()
    assert tmat[2, 2] == RatFunc.one()


def test_transport_involution_symbolic_specialized(params):
    tmat = inv.t_psi_paper(None, params)
    tpsi = inv.t_at_psi(None, params)
    assert tmat * tpsi == MatrixRF.identity(3)


def test_transport_involution_fully_symbolic():
    tmat = inv.t_psi_paper()
    tpsi = inv.t_at_psi()
    assert tmat * tpsi == MatrixRF.identity(3)


def test_derived_transport_matches_closed_form_numeric(u_std, params):
    derived = inv.t_psi_derived(u_std, params)
    closed = inv.t_psi_paper(u_std, params)
    assert _num(derived) == _num(closed)


def test_derived_transport_rejects_pi_points(params):
    with pytest.raises(NonGenericError):
        inv.t_psi_derived((as_rat(5), as_rat(-15)), params)


def test_transport_coeffs_affine_action(u_std, c_std, params):
    tmat = inv.t_psi_paper(u_std, params)
    c1p, c2p = inv.transport_coeffs(tmat, c_std)
    expected1 = tmat[1, 0] + tmat[1, 1] * as_ratfunc(c_std[0])
    assert c1p == expected1


# ----------------------------------------------------------------------
# Base change
# ----------------------------------------------------------------------

def test_b_matrix_anchor_and_product_identity(u_std, params, ref_values):
    bmat = inv.b_matrix(u_std, params, check=True)
    assert _num(bmat) == rq(ref_values["b_matrix_standard"])


def test_b_inverse_roundtrip(u_std, params):
    bmat = inv.b_matrix(u_std, params, check=False)
    binv = inv.b_inverse(u_std, params)
    assert bmat * binv == MatrixRF.identity(3)


def test_b_closed_form_equals_resolvent_symbolic():
    # B agrees with 2 (Id + T(psi u))^{-1} as rational functions
    bmat = inv.b_matrix(None, None, check=True)
    assert bmat[0, 0] == RatFunc.one()


def test_det_b_polynomial_identity():
    bmat = inv.b_matrix(None, None, check=False)
    lhs = bmat.det() * as_ratfunc(P_LAMBDA * P_SIGMA)
    assert lhs == as_ratfunc(2 * P_PI * P_PI)


def test_j_matrix_anchor(u_std, params, ref_values):
    assert _num(inv.j_matrix(u_std, params)) == rq(ref_values["j_matrix_standard"])


def test_c_matrix_anchor(u_std, params, ref_values):
    assert _num(inv.c_matrix(u_std, params)) == rq(ref_values["c_matrix_standard"])


def test_c_inverse_anchor_and_roundtrip(u_std, params, ref_values):
    cinv = inv.c_inverse(u_std, params)
    assert _num(cinv) == rq(ref_values["c_inverse_standard"])
    cmat = inv.c_matrix(u_std, params)
    assert cmat * cinv == MatrixRF.identity(3)


def test_c_matrix_invariant_under_deck_involution(params):
    # C is built from psi-invariant data, so substituting ubar for u_t
    # leaves it unchanged.
    cmat = inv.c_matrix(None, params)
    swapped = cmat.subst({"ut": inv.ubar_t().subst(params)})
    assert swapped == cmat


def test_j_inverse_regular_across_lambda_line(params):
    """C^{-1} B has no pole along the lambda-line although B does.

    With parameters specialized, compare multiplicity of the p_lambda
    factor in numerator and denominator of every entry.
    """
    plam = P_LAMBDA.subst_rat(params)

    def mult(poly):
        count = 0
        while True:
            try:
                poly = poly.exact_div(plam)
                count += 1
            except ExactDivisionError:
                return count

    jinv = inv.j_inverse(None, params)
    for i in range(3):
        for j in range(3):
            entry = jinv[i, j]
            if entry.num.is_zero():
                continue
            assert mult(entry.den) <= mult(entry.num), (i, j)
    # contrast: B itself does carry a p_lambda pole
    bmat = inv.b_matrix(None, params, check=False)
    assert any(mult(bmat[i, j].den) > mult(bmat[i, j].num)
               for i in range(3) for j in range(3)
               if not bmat[i, j].num.is_zero())


# ----------------------------------------------------------------------
# Full coordinate map and equivariance
# ----------------------------------------------------------------------

def test_phi_full_anchor(u_std, c_std, params, ref_values):
    z, w, k1, k2 = inv.phi_full(u_std, c_std, params)
    assert [z, w] == [rq(ref_values["z_standard"]), rq(ref_values["w_standard"])]
    assert [k1, k2] == rq(ref_values["kappa_standard"])


def test_phi_full_equivariance_random(params):
    guard = [P_PI, P_SIGMA, P_LAMBDA, var("ul") - var("lam")]
    base = dict(params)
    for seed in seed_stream(101, 5):
        draw = random_assignment(seed, ("ul", "ut", "c1", "c2"),
                                 avoid_polys=guard, distinct=False,
                                 base=base, bound=60)
        u = (draw["ul"], draw["ut"])
        c = (draw["c1"], draw["c2"])
        tmat = inv.t_psi_paper(u, params)
        cp = tuple(v.eval_rat({}) for v in inv.transport_coeffs(tmat, c))
        psi_u = inv.psi_bun(u, params)
        assert inv.phi_full(psi_u, cp, params) == inv.phi_full(u, c, params)


def test_equivariant_section_anchor(u_std, params, ref_values):
    c0 = inv.equivariant_section_coeffs(u_std, params)
    assert [v.eval_rat({}) for v in c0] == rq(ref_values["c0_standard"])


# ----------------------------------------------------------------------
# Symplectic factor and Lagrangian section
# ----------------------------------------------------------------------

def test_symplectic_target_form():
    form = inv.symplectic_target()
    assert form.coefficient("c1", "ut") == as_ratfunc(2)
    assert form.coefficient("c2", "ul") == as_ratfunc(2)
    assert form.coefficient("c1", "c2").is_zero()


@pytest.mark.parametrize("triple", [("2", "3", "1/5"),
                                    ("3", "5", "1/7"),
                                    ("-2", "1/2", "2/3")])
def test_symplectic_factor_at_specializations(triple):
    lam, t, nu = (as_rat(v) for v in triple)
    assert inv.verify_symplectic_factor({"lam": lam, "t": t, "nu": nu})


def test_lagrangian_closedness(ref_values):
    report = inv.verify_lagrangian()
    assert report["difference_vanishes"]
    # The mixed partial derivatives agree; their sum does not vanish, as
    # the frozen numeric values of the two partials show.
    assert not report["sum_vanishes"]
    partials = rq(ref_values["lagrangian_partials_standard"])
    assert partials[0] == partials[1]
    assert partials[0] + partials[1] != 0


# ----------------------------------------------------------------------
# Fixed locus
# ----------------------------------------------------------------------

def test_fixed_locus_membership(params):
    report = inv.fixed_locus(params)
    assert report["rows_in_sigma_ideal"]
    assert report["opposite_sign_rejected"]
    assert report["generic_c1_rejected"]


def test_fixed_locus_c1_anchor(u_std, params, ref_values):
    assert inv.fixed_locus_c1(u_std, params) == \
        rq(ref_values["fixed_locus_c1_standard"])


def test_fixed_point_is_actually_fixed(params):
    """On the sigma-curve, transporting (1, c1*, c2) returns the same
    coefficients, checked at an exact point of the curve."""
    lam, t = params["lam"], params["t"]
    # solve p_sigma(ul, ut) = 0 for ut at ul = 4: pick a rational root
    ul_val = None
    ut_val = None
    from parconn.connections import _rat_sqrt
    for cand_ul in range(2, 60):
        if as_rat(cand_ul) in (as_rat(0), as_rat(1), lam):
            continue
        sig = P_SIGMA.subst_rat({"lam": lam, "t": t, "ul": cand_ul})
        parts = sig.coeffs_in("ut")
        a = parts.get(2, None)
        b = parts.get(1, None)
        c = parts.get(0, None)
        if a is None:
            continue
        av = a.constant_value()
        bv = b.constant_value() if b is not None else as_rat(0)
        cv = c.constant_value() if c is not None else as_rat(0)
        disc = bv * bv - 4 * av * cv
        root = _rat_sqrt(disc) if disc >= 0 else None
        if root is None:
            continue
        cand_ut = (-bv + root) / (2 * av)
        point = {"lam": lam, "t": t, "ul": as_rat(cand_ul), "ut": cand_ut}
        if P_PI.eval_rat(point) == 0 or DELTA.eval_rat(point) == 0:
            continue
        ut_val = cand_ut
        ul_val = as_rat(cand_ul)
        break
    assert ut_val is not None, "no rational point found on the sigma curve"
    u = (ul_val, ut_val)
    assert P_SIGMA.eval_rat({"lam": lam, "t": t, "ul": ul_val,
                             "ut": ut_val}) == 0
    c1_star = inv.fixed_locus_c1(u, params)
    c2 = as_rat("4/7")
    tmat = inv.t_psi_paper(u, params)
    ub = inv.ubar_t(u, params)
    assert ub == ut_val  # the point is its own involution image
    image = inv.transport_coeffs(tmat, (c1_star, c2))
    assert image[0].eval_rat({}) == c1_star
    assert image[1].eval_rat({}) == c2


# ----------------------------------------------------------------------
# Local model and genericity guard
# ----------------------------------------------------------------------

def test_local_model():
    assert inv.verify_local_model()


def test_genericity_guard_flags(params):
    clean = inv.genericity_guard((as_rat(5), as_rat(7)),
                                 lam=params["lam"], t=params["t"])
    assert not any(clean.values())
    on_pi = inv.genericity_guard((as_rat(5), as_rat(-15)),
                                 lam=params["lam"], t=params["t"])
    assert on_pi["on_pi"]
    special = inv.genericity_guard((params["lam"], as_rat(7)),
                                   lam=params["lam"], t=params["t"])
    assert special["u_lambda_special"]
