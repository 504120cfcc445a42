"""The bundle involution and the coordinate transport to the elliptic chart.

This module covers the chart-level geometry living over the bundle
coordinates (u_lam, u_t):

  * the special polynomials cutting out the distinguished curves: the conic
    exchanged with the line at infinity (``p_pi``), the fixed locus of the
    involution (``p_sigma``), the line over z = t (``p_lambda``), and the
    discriminant product ``delta``;
  * the bundle coordinates (z, w) and the fiber involution
    psi: (u_lam, u_t) -> (u_lam, ubar_t), which swaps the two preimages of
    (z, w);
  * the transport matrix acting on (1, c_1, c_2): a transcribed closed form
    (``t_psi_paper``) and an independent re-derivation from tangency
    classes (``t_psi_derived``);
  * the change of basis ``b_matrix`` to the involution-equivariant frame,
    the Jacobian change ``j_matrix``, the canonical frame ``c_matrix`` and
    its inverse, and the full coordinate map ``phi_full``;
  * verification routines: the symplectic factor 2, the Lagrangian property
    of the equivariant section, the fixed locus, and the local model of the
    quotient singularities.

Transport convention (pinned by an independent derivation and a numeric
forward check): the matrix returned by ``t_psi_paper(u)`` carries the Higgs
coordinates of a connection written in the frame at u to the coordinates of
the same connection written in the frame at psi(u).  Consequently
``t_psi_paper(u) * t_psi_paper(psi u) = Id`` and the full map satisfies
``phi_full(psi u, t_psi_paper(u) . (1, c)) = phi_full(u, c)``.

Sign conventions worth pinning (each is certified by the test suite):

  * the equivariant-section coefficients are the first column of
    B^{-1} = (Id + T(u_lam, ubar_t))/2; in closed form
    c_1^0 = -nu p_lambda / p_pi;
  * the section u -> (u, c^0(u)) is Lagrangian for dc_1 ^ du_t +
    dc_2 ^ du_lam, which reads d(c_1^0)/d(u_lam) - d(c_2^0)/d(u_t) = 0;
    the orthogonal combination with a plus sign does NOT vanish;
  * the fixed locus uses c_1^* = T_10/(2 delta) = -nu p_pi p_lambda /
    delta: this is the unique value whose transport rows land in the ideal
    of the fixed conic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .connections import NonGenericError
from .forms import TwoForm, wedge_d
from .linalg import MatrixRF, prem
from .poly import MPoly, var
from .rat import as_rat
from .ratfunc import RatFunc, as_ratfunc

_UL = var("ul")
_UT = var("ut")
_LAM = var("lam")
_T = var("t")
_NU = var("nu")
_HALF = as_rat("1/2")

# ----------------------------------------------------------------------
# Special polynomials
# ----------------------------------------------------------------------

#: Conic exchanged by the involution with the line u_t = infinity; also the
#: common denominator of w and ubar_t.
P_PI: MPoly = (_T * _LAM * _UT - _T * _LAM * _UL - _T * _UT * _UL
               + _LAM * _UT * _UL - _LAM * _UT + _T * _UL)

#: Fixed locus of the involution: zero set of u_t - ubar_t (numerator).
P_SIGMA: MPoly = (_T * _LAM * _UT ** 2 - 2 * _T * _LAM * _UT * _UL
                  - _T * _UT ** 2 * _UL + _LAM * _UT ** 2 * _UL
                  + _T ** 2 * _UL ** 2 - _LAM * _UT ** 2 - _T ** 2 * _UL
                  + _T * _LAM * _UL + 2 * _T * _UT * _UL - _T * _UL ** 2)

#: Line over z = t (denominator curve of the elliptic chart).
P_LAMBDA: MPoly = _LAM * _UL - _T * _UL + _LAM * _T - _LAM

#: delta = t(t-1)(t-lam) u_lam (u_lam-1)(u_lam-lam); the shared denominator
#: of the transport matrix.  Depends on u_lam only, never on u_t.
DELTA: MPoly = (_T * (_T - 1) * (_T - _LAM)
                * _UL * (_UL - 1) * (_UL - _LAM))

#: alpha = 2 u_lam (u_lam-1)(u_lam-lam); a denominator factor of B.
ALPHA: MPoly = 2 * _UL * (_UL - 1) * (_UL - _LAM)

#: The numerator factor shared by w and ubar_t.
Q_POLY: MPoly = (_LAM * _UT - _T * _UL + _T - _LAM - _UT + _UL)


@dataclass(frozen=True)
class SpecialPolys:
    """The four distinguished-curve polynomials."""

    p_pi: MPoly
    p_sigma: MPoly
    p_lambda: MPoly
    delta: MPoly


def special_polys() -> SpecialPolys:
    return SpecialPolys(P_PI, P_SIGMA, P_LAMBDA, DELTA)


# ----------------------------------------------------------------------
# Bundle coordinates and the fiber involution
# ----------------------------------------------------------------------

class _UtInfinity:
    """Sentinel: the involution image lies on the line u_t = infinity."""

    def __repr__(self):  # pragma: no cover - debugging aid
        return "U_T_INFINITY"


U_T_INFINITY = _UtInfinity()

#: ubar_t as a symbolic rational function (defined off the conic p_pi = 0).
UBAR_RF = RatFunc(_T * _UL * Q_POLY, P_PI)

_Z_RF = RatFunc(_LAM * (_UL - 1), _UL - _LAM)
_W_RF = RatFunc(_LAM * _UT * Q_POLY, P_PI)


def _maybe_subst(value, subs: Optional[Dict[str, object]]):
    return value if not subs else value.subst(subs)


def _u_subs(u) -> Dict[str, object]:
    if u is None:
        return {}
    ul, ut = u
    return {"ul": ul, "ut": ut}


def _guard_nonzero(poly: MPoly, subs: Dict[str, object], name: str) -> None:
    """Raise NonGenericError when a substitution kills ``poly``."""
    if as_ratfunc(poly).subst(subs).is_zero():
        raise NonGenericError(f"non-generic input: {name} vanishes")


def z_coord(u=None, params=None) -> RatFunc:
    """z = lam (u_lam - 1)/(u_lam - lam)."""
    subs = {**_u_subs(u), **(params or {})}
    if subs:
        _guard_nonzero(_UL - _LAM, subs, "u_lam - lam")
    return _maybe_subst(_Z_RF, subs)


def w_coord(u=None, params=None) -> RatFunc:
    """w = lam u_t (lam u_t - t u_lam + t - lam - u_t + u_lam) / p_pi."""
    subs = {**_u_subs(u), **(params or {})}
    if subs:
        _guard_nonzero(P_PI, subs, "p_pi")
    return _maybe_subst(_W_RF, subs)


def phi_bun(u=None, params=None) -> Tuple[RatFunc, RatFunc]:
    """The 2:1 bundle-chart map (u_lam, u_t) -> (z, w)."""
    subs = {**_u_subs(u), **(params or {})}
    if subs:
        _guard_nonzero(_UL - _LAM, subs, "u_lam - lam")
        _guard_nonzero(P_PI, subs, "p_pi")
    return _maybe_subst(_Z_RF, subs), _maybe_subst(_W_RF, subs)


def _fold_const(value: RatFunc):
    """Collapse a constant rational function to a plain rational."""
    if value.num.is_constant() and value.den.is_constant():
        return value.eval_rat({})
    return value


def ubar_t(u=None, params=None):
    """The involution image of u_t; U_T_INFINITY when p_pi vanishes.

    Returns a plain rational for fully numeric input, else a rational
    function in the remaining symbols.
    """
    subs = {**_u_subs(u), **(params or {})}
    if subs:
        denominator = as_ratfunc(P_PI).subst(subs)
        if denominator.is_zero():
            return U_T_INFINITY
    return _fold_const(_maybe_subst(UBAR_RF, subs))


def psi_bun(u=None, params=None):
    """(u_lam, u_t) -> (u_lam, ubar_t): the deck involution of phi_bun."""
    ul, _ = _u_pair_local(u)
    if params:
        ul = ul.subst(params)
    return _fold_const(ul), ubar_t(u, params)


def _u_pair_local(u) -> Tuple[RatFunc, RatFunc]:
    if u is None:
        return RatFunc.from_var("ul"), RatFunc.from_var("ut")
    ul, ut = u
    return as_ratfunc(ul), as_ratfunc(ut)


def invariant_identities() -> Dict[str, bool]:
    """Symbolic checks tying (z, w) to the symmetric functions of the fiber.

    The fiber of phi_bun over (z, w) is {u_t, ubar_t}; its sum and product,
    and w itself, are rational in (z, w).
    """
    ut = RatFunc.from_var("ut")
    ul = RatFunc.from_var("ul")
    lam = RatFunc.from_var("lam")
    t = RatFunc.from_var("t")
    z, w, ub = _Z_RF, _W_RF, UBAR_RF
    return {
        "w_times_t_ul_equals_lam_ut_ubar": w * t * ul == lam * ut * ub,
        "fiber_sum": ut + ub == (z * w + (z - w) * t - lam) / (z - lam),
        "fiber_product": ut * ub == w * t * (z - 1) / (z - lam),
        "u_lam_from_z": ul == lam * (z - 1) / (z - lam),
    }


# ----------------------------------------------------------------------
# Transport of Higgs coordinates across the involution
# ----------------------------------------------------------------------

#: Numerators of the transport-matrix entries (shared denominator delta).
_T10: MPoly = -2 * _NU * P_PI * P_LAMBDA
_T11: MPoly = -P_PI ** 2
_T20: MPoly = (_NU * _T * (_T - 1)
               * (2 * _LAM ** 2 * _UT - 2 * _T * _LAM * _UL
                  + _T * _UL ** 2 - _LAM * _UL ** 2 + _T * _LAM
                  - _LAM ** 2 - 2 * _LAM * _UT + 2 * _LAM * _UL))
_T21: MPoly = (-_T * (_T - 1)
               * (-_LAM ** 2 * _UT ** 2 + 2 * _T * _LAM * _UT * _UL
                  - _T * _LAM * _UL ** 2 - _T * _UT * _UL ** 2
                  + _LAM * _UT * _UL ** 2 - _T * _LAM * _UT
                  + _LAM ** 2 * _UT + _LAM * _UT ** 2
                  - 2 * _LAM * _UT * _UL + _T * _UL ** 2))


def t_psi_paper(u=None, params=None) -> MatrixRF:
    """The transport matrix in closed form (entries over delta)."""
    mat = MatrixRF([
        [1, 0, 0],
        [RatFunc(_T10, DELTA), RatFunc(_T11, DELTA), 0],
        [RatFunc(_T20, DELTA), RatFunc(_T21, DELTA), 1],
    ])
    subs = {**_u_subs(u), **(params or {})}
    if subs:
        _guard_nonzero(DELTA, subs, "delta")
        mat = mat.subst(subs)
    return mat


def t_at_psi(u=None, params=None) -> MatrixRF:
    """The closed-form transport evaluated at (u_lam, ubar_t)."""
    mat = t_psi_paper().subst({"ut": UBAR_RF})
    subs = {**_u_subs(u), **(params or {})}
    if subs:
        _guard_nonzero(DELTA, subs, "delta")
        _guard_nonzero(P_PI, subs, "p_pi")
        mat = mat.subst(subs)
    return mat


def transport_coeffs(tmat: MatrixRF, c) -> Tuple[RatFunc, RatFunc]:
    """Apply the affine action of a transport matrix to (c_1, c_2)."""
    c1, c2 = (as_ratfunc(v) for v in c)
    image = tmat.apply([RatFunc.one(), c1, c2])
    if not (image[0] == RatFunc.one()):
        raise ValueError("transport matrix does not fix the affine row")
    return image[1], image[2]


def _normalized_action(product: MatrixRF) -> MatrixRF:
    """Scale a projective-linear action so it is affine on (1, c_1, c_2)."""
    pivot = product[0, 0]
    if pivot.is_zero():
        raise NonGenericError("transport system is singular at this point")
    if not (product[0, 1].is_zero() and product[0, 2].is_zero()):
        raise NonGenericError("transport action is not affine in c")
    rows = [[product[i, j] / pivot for j in range(3)] for i in range(3)]
    return MatrixRF(rows)


def _cleared_psi_image(entries, dmax: int, params=None):
    """Substitute ut -> ubar_t into polynomial matrix entries and clear the
    common denominator: returns entries of p_pi^dmax * M(u_lam, ubar_t).

    When the entries already have parameters specialized, the clearing
    polynomials must be specialized the same way.
    """
    ubar_num = _T * _UL * Q_POLY
    den_base = P_PI
    if params:
        subs = {k: as_rat(v) for k, v in params.items()}
        ubar_num = ubar_num.subst_rat(subs)
        den_base = den_base.subst_rat(subs)
    num_pows = [MPoly.const(1)]
    den_pows = [MPoly.const(1)]
    for _ in range(dmax):
        num_pows.append(num_pows[-1] * ubar_num)
        den_pows.append(den_pows[-1] * den_base)
    out = []
    for row in entries:
        new_row = []
        for poly in row:
            parts = poly.coeffs_in("ut")
            acc = MPoly.zero()
            for k, coeff in parts.items():
                acc = acc + coeff * num_pows[k] * den_pows[dmax - k]
            new_row.append(RatFunc(acc))
        out.append(new_row)
    return out


def _polynomial_entries(mat: MatrixRF):
    """Entries as MPoly (allowing constant denominators), else ValueError."""
    rows = []
    for i in range(mat.nrows):
        row = []
        for j in range(mat.ncols):
            entry = mat[i, j]
            if not entry.den.is_constant():
                raise ValueError("expected polynomial matrix entries")
            scale = 1 / entry.den.constant_value()
            row.append(entry.num * MPoly.const(scale))
        rows.append(row)
    return rows


def t_psi_derived(u=None, params=None) -> MatrixRF:
    """Transport re-derived from the two tangency classes.

    Solves the linear system  N_psi(psi u) . (1, c'_1, c'_2) = rho .
    N_infty(u) . (1, c_1, c_2)  for (rho, c'_1, c'_2) and assembles the
    affine action on (1, c_1, c_2).  Nothing here consults the closed form,
    so agreement with ``t_psi_paper`` is an independent consistency check.
    """
    from .apparent import coefficient_matrices
    if u is not None:
        ul, ut = _u_pair_local(u)
        ub = ubar_t(u, params)
        if ub is U_T_INFINITY:
            raise NonGenericError(
                "transport undefined: psi sends this point to u_t = infinity")
        mats_u = coefficient_matrices(u, params)
        mats_psi = coefficient_matrices((ul, ub), params)
        product = mats_psi.n_psi.adjugate() * mats_u.n_infty
        return _normalized_action(product)
    mats = coefficient_matrices(None, params)
    n_psi = _polynomial_entries(mats.n_psi)
    dmax = max(p.degree_in("ut") for row in n_psi for p in row)
    cleared = MatrixRF(_cleared_psi_image(n_psi, dmax, params))
    product = cleared.adjugate() * mats.n_infty
    return _normalized_action(product)


# ----------------------------------------------------------------------
# Base change to the equivariant frame
# ----------------------------------------------------------------------

#: Numerators of the B-matrix entries (denominators built from p_sigma,
#: p_lambda and alpha).
_B10: MPoly = 2 * _NU * P_PI
_B11: MPoly = 2 * P_PI ** 2
_B20: MPoly = -_NU * (
    -2 * _T * _LAM ** 2 * _UT ** 2 * _UL
    + 3 * _T * _LAM * _UT ** 2 * _UL ** 2
    + 2 * _T ** 2 * _LAM * _UL ** 3
    - 2 * _T * _LAM * _UT * _UL ** 3
    - _T * _UT ** 2 * _UL ** 3
    + _LAM * _UT ** 2 * _UL ** 3
    - _T ** 2 * _UL ** 4
    + _T * _LAM ** 2 * _UT ** 2
    + 2 * _T * _LAM ** 2 * _UT * _UL
    - _T * _LAM * _UT ** 2 * _UL
    + _LAM ** 2 * _UT ** 2 * _UL
    - 3 * _T ** 2 * _LAM * _UL ** 2
    - 3 * _LAM * _UT ** 2 * _UL ** 2
    + _T ** 2 * _UL ** 3
    - _T * _LAM * _UL ** 3
    + 2 * _T * _UT * _UL ** 3
    + _T * _UL ** 4
    - _LAM ** 2 * _UT ** 2
    + _T ** 2 * _LAM * _UL
    - _T * _LAM ** 2 * _UL
    - 2 * _T * _LAM * _UT * _UL
    + 2 * _LAM * _UT ** 2 * _UL
    + 3 * _T * _LAM * _UL ** 2
    - 2 * _T * _UL ** 3)
_B21: MPoly = (-_T * (_T - 1)
               * (_LAM ** 2 * _UT ** 2 - 2 * _T * _LAM * _UT * _UL
                  + _T * _LAM * _UL ** 2 + _T * _UT * _UL ** 2
                  - _LAM * _UT * _UL ** 2 + _T * _LAM * _UT
                  - _LAM ** 2 * _UT - _LAM * _UT ** 2
                  + 2 * _LAM * _UT * _UL - _T * _UL ** 2))


def b_matrix(u=None, params=None, check: bool = True) -> MatrixRF:
    """Base change from the equivariant frame to the (c_1, c_2) frame.

    Returns the closed form; with ``check`` it also certifies
    B . (Id + T(u_lam, ubar_t)) = 2 Id, i.e. that the closed form agrees
    with the derived expression 2 (Id + T(u_lam, ubar_t))^{-1}.
    """
    mat = MatrixRF([
        [1, 0, 0],
        [RatFunc(_B10, P_SIGMA), RatFunc(_B11, P_LAMBDA * P_SIGMA), 0],
        [RatFunc(_B20, ALPHA * P_SIGMA),
         RatFunc(_B21, P_LAMBDA * P_SIGMA), 1],
    ])
    subs = {**_u_subs(u), **(params or {})}
    if subs:
        _guard_nonzero(P_SIGMA, subs, "p_sigma")
        _guard_nonzero(P_LAMBDA, subs, "p_lambda")
        _guard_nonzero(ALPHA, subs, "alpha")
        mat = mat.subst(subs)
    if check:
        doubled = MatrixRF.identity(3) + t_at_psi(u, params)
        if not (mat * doubled == MatrixRF.identity(3) * as_ratfunc(2)):
            raise AssertionError(
                "closed-form B disagrees with 2 (Id + T(u_lam, ubar_t))^{-1}")
    return mat


def b_inverse(u=None, params=None) -> MatrixRF:
    """B^{-1} = (Id + T(u_lam, ubar_t)) / 2."""
    return (MatrixRF.identity(3) + t_at_psi(u, params)) * as_rat("1/2")


def equivariant_section_coeffs(u=None, params=None) -> Tuple[RatFunc, RatFunc]:
    """(c_1^0, c_2^0): Higgs coordinates of the equivariant section.

    This is the first column of B^{-1}; in closed form
    c_1^0 = -nu p_lambda / p_pi and c_2^0 = T_20(u_lam, ubar_t) / (2 delta).
    """
    c1 = RatFunc(-_NU * P_LAMBDA, P_PI)
    c2 = RatFunc(_T20, DELTA).subst({"ut": UBAR_RF}) * _HALF
    subs = {**_u_subs(u), **(params or {})}
    if subs:
        _guard_nonzero(P_PI, subs, "p_pi")
        _guard_nonzero(DELTA, subs, "delta")
        c1, c2 = c1.subst(subs), c2.subst(subs)
    return c1, c2


# ----------------------------------------------------------------------
# Jacobian and canonical base changes; the full coordinate map
# ----------------------------------------------------------------------

def j_matrix(u=None, params=None) -> MatrixRF:
    """First column of B^{-1} next to half the transposed Jacobian of (z, w)."""
    c1, c2 = equivariant_section_coeffs()
    mat = MatrixRF([
        [1, 0, 0],
        [c1, _Z_RF.derivative("ut") * _HALF, _W_RF.derivative("ut") * _HALF],
        [c2, _Z_RF.derivative("ul") * _HALF, _W_RF.derivative("ul") * _HALF],
    ])
    subs = {**_u_subs(u), **(params or {})}
    if subs:
        _guard_nonzero(P_PI, subs, "p_pi")
        _guard_nonzero(DELTA, subs, "delta")
        mat = mat.subst(subs)
    return mat


def c_matrix(u=None, params=None) -> MatrixRF:
    """The canonical base change C = B . J (entries invariant under psi)."""
    mat = b_matrix(check=False) * j_matrix()
    subs = {**_u_subs(u), **(params or {})}
    if subs:
        mat = mat.subst(subs)
    return mat


def c_inverse(u=None, params=None) -> MatrixRF:
    """C^{-1} written through (z, w):

        [[1, 0, 0], [0, K11, K12], [0, K21, 0]]

    with K11 = (w t - w lam - t lam + lam)/(z - lam)^2, K21 = (z - t)/
    (z - lam) and K12 = 2 lam (1 - lam)/(z - lam)^2.
    """
    lam, t = RatFunc.from_var("lam"), RatFunc.from_var("t")
    z, w = _Z_RF, _W_RF
    k11 = (w * t - w * lam - t * lam + lam) / ((z - lam) ** 2)
    k21 = (z - t) / (z - lam)
    k12 = 2 * lam * (1 - lam) / ((z - lam) ** 2)
    mat = MatrixRF([[1, 0, 0], [0, k11, k12], [0, k21, 0]])
    subs = {**_u_subs(u), **(params or {})}
    if subs:
        _guard_nonzero(P_LAMBDA, subs, "p_lambda")
        mat = mat.subst(subs)
    return mat


def j_inverse(u=None, params=None) -> MatrixRF:
    """J^{-1} = C^{-1} B; its entries have no pole along p_lambda = 0."""
    mat = c_inverse() * b_matrix(check=False)
    subs = {**_u_subs(u), **(params or {})}
    if subs:
        mat = mat.subst(subs)
    return mat


def phi_full(u=None, c=None, params=None):
    """The full coordinate map (u, c) -> (z, w, kappa_1, kappa_2)."""
    if c is None:
        c = (RatFunc.from_var("c1"), RatFunc.from_var("c2"))
    c1, c2 = (as_ratfunc(v) for v in c)
    subs = {**_u_subs(u), **(params or {})}
    z = _maybe_subst(_Z_RF, subs)
    w = _maybe_subst(_W_RF, subs)
    jinv = j_inverse(u, params)
    if subs:
        c1, c2 = _maybe_subst(c1, subs), _maybe_subst(c2, subs)
    image = jinv.apply([RatFunc.one(), c1, c2])
    if not (image[0] == RatFunc.one()):
        raise AssertionError("J^{-1} does not fix the affine row")
    return z, w, image[1], image[2]


# ----------------------------------------------------------------------
# Verification routines
# ----------------------------------------------------------------------

U_COORDS = ("ul", "ut", "c1", "c2")


def symplectic_target() -> TwoForm:
    """2 (dc_1 ^ du_t + dc_2 ^ du_lam) in the (ul, ut, c1, c2) chart."""
    return TwoForm.from_terms(U_COORDS, [
        (2, "c1", "ut"),
        (2, "c2", "ul"),
    ])


def symplectic_pullback(params=None) -> TwoForm:
    """Pullback of dkappa_1 ^ dz + dkappa_2 ^ dw under phi_full."""
    z, w, k1, k2 = phi_full(params=params)
    return wedge_d(k1, z, U_COORDS) + wedge_d(k2, w, U_COORDS)


def verify_symplectic_factor(params=None) -> bool:
    """The full map multiplies the symplectic form by exactly 2."""
    return symplectic_pullback(params) == symplectic_target()


def verify_lagrangian() -> Dict[str, bool]:
    """Divergence identities for the equivariant-section coefficients.

    The section u -> (u, c^0(u)) is Lagrangian for dc_1 ^ du_t + dc_2 ^
    du_lam if and only if the du_lam ^ du_t coefficient of its pullback,
    d(c_1^0)/d(u_lam) - d(c_2^0)/d(u_t), vanishes.  The report also records
    the companion sum, which does not vanish; tests pin both outcomes.
    """
    c1, c2 = equivariant_section_coeffs()
    d1 = c1.derivative("ul")
    d2 = c2.derivative("ut")
    return {
        "difference_vanishes": (d1 - d2).is_zero() or d1 == d2,
        "sum_vanishes": (d1 + d2).is_zero() or d1 == -d2,
    }


def fixed_locus(params=None) -> Dict[str, bool]:
    """Membership of the transport-fixed rows in the ideal of the fixed conic.

    With c_1^* = -nu p_pi p_lambda / delta and c_2 a free symbol, every
    numerator entry of (T(u_lam, ubar_t) - Id) . (1, c_1^*, c_2) has zero
    pseudo-remainder by p_sigma with respect to u_t.  The report also
    records two rejections: the opposite sign for c_1^* and a generic c_1.
    """
    subs = dict(params or {})

    def rows_vanish(c1_value: RatFunc) -> bool:
        tmat = t_at_psi(params=subs or None)
        delta_m = tmat - MatrixRF.identity(3)
        c2 = RatFunc.from_var("c2")
        image = delta_m.apply([RatFunc.one(), c1_value, c2])
        sigma = P_SIGMA.subst_rat(subs) if subs else P_SIGMA
        for entry in image:
            if entry.is_zero():
                continue
            remainder, _ = prem(entry.num, sigma, "ut")
            if not remainder.is_zero():
                return False
        return True

    c1_star = RatFunc(-_NU * P_PI * P_LAMBDA, DELTA)
    c1_opp = -c1_star
    c1_generic = RatFunc.from_var("c1")
    if subs:
        c1_star = c1_star.subst(subs)
        c1_opp = c1_opp.subst(subs)
    return {
        "rows_in_sigma_ideal": rows_vanish(c1_star),
        "opposite_sign_rejected": not rows_vanish(c1_opp),
        "generic_c1_rejected": not rows_vanish(c1_generic),
    }


def fixed_locus_c1(u=None, params=None) -> RatFunc:
    """The distinguished first Higgs coordinate on the fixed locus."""
    value = RatFunc(-_NU * P_PI * P_LAMBDA, DELTA)
    subs = {**_u_subs(u), **(params or {})}
    if subs:
        _guard_nonzero(DELTA, subs, "delta")
        value = value.subst(subs)
    return value


def verify_local_model() -> bool:
    """The quotient-singularity chart (y_1, .., y_4) -> (y_1 y_2, y_1^2,
    y_2^2, y_3, y_4) satisfies x_0^2 = x_1 x_2, is invariant under the
    (y_1, y_2) sign flip, and pulls dx_1 ^ dx_2/(4 x_0) + dx_3 ^ dx_4 back
    to dy_1 ^ dy_2 + dy_3 ^ dy_4."""
    y = [var(f"y{i}") for i in range(1, 5)]
    image = {
        "x0": y[0] * y[1],
        "x1": y[0] ** 2,
        "x2": y[1] ** 2,
        "x3": y[2],
        "x4": y[3],
    }
    if not (image["x0"] ** 2 - image["x1"] * image["x2"]).is_zero():
        return False
    flipped = {"y1": -RatFunc.from_var("y1"), "y2": -RatFunc.from_var("y2")}
    for name, poly in image.items():
        if not (as_ratfunc(poly).subst(flipped) == as_ratfunc(poly)):
            return False
    x_coords = ("x0", "x1", "x2", "x3", "x4")
    y_coords = ("y1", "y2", "y3", "y4")
    quarter_x0 = RatFunc.one() / (4 * RatFunc.from_var("x0"))
    ambient = TwoForm.from_terms(x_coords, [(quarter_x0, "x1", "x2"),
                                            (1, "x3", "x4")])
    mapping = {k: as_ratfunc(v) for k, v in image.items()}
    pulled = ambient.pullback(mapping, y_coords)
    expected = TwoForm.from_terms(y_coords, [(1, "y1", "y2"), (1, "y3", "y4")])
    return pulled == expected


def genericity_guard(u, lam=None, t=None) -> Dict[str, bool]:
    """Flags marking membership in the excluded loci (True = violated)."""
    ul_v, ut_v = _u_pair_local(u)
    lam_v = RatFunc.from_var("lam") if lam is None else as_ratfunc(lam)
    t_v = RatFunc.from_var("t") if t is None else as_ratfunc(t)
    subs = {"ul": ul_v, "ut": ut_v, "lam": lam_v, "t": t_v}

    def vanishes(poly: MPoly) -> bool:
        return as_ratfunc(poly).subst(subs).is_zero()

    return {
        "u_lambda_special": any(ul_v == v for v in
                                (RatFunc.zero(), RatFunc.one(), lam_v)),
        "u_t_special": any(ut_v == v for v in
                           (RatFunc.zero(), RatFunc.one(), lam_v, t_v)),
        "on_pi": vanishes(P_PI),
        "on_sigma": vanishes(P_SIGMA),
        "on_lambda": vanishes(P_LAMBDA),
    }
