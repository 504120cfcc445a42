"""The apparent map on the elliptic side: the projective-linear family
a -> s between tangency classes, the symmetrized pair map, the exact
12-point fiber count, and the generic-injectivity witness.

Both tangency classes of a family member are affine in (1, c_1, c_2); the
3x3 coefficient matrices N_infty(u), N_psi(u) extracted here realize the
two apparent maps as matrix products.  Eliminating c gives the
projective-linear family M(u) sending the infinity-class of a connection to
its section-class; fibers of the symmetrized map are counted by exact
elimination: two cross-product equations in (u_lam, u_t), a resultant in
u_t, square-free reduction, and exact filtering of spurious roots by
gcd arithmetic (no floating point anywhere).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .connections import NonGenericError
from .family import AppClass, app_infty, app_psi, family
from .involution import P_LAMBDA, P_PI, P_SIGMA
from .linalg import (MatrixRF, bareiss_det, resultant, subresultant_prs,
                     upoly_gcd, upoly_squarefree, upoly_strip_factor)
from .poly import MPoly, var
from .rat import as_rat
from .ratfunc import RatFunc, as_ratfunc
from .sampling import random_assignment, seed_stream


class ResampleRequest(RuntimeError):
    """The chosen (a, s) pair is non-generic; the caller should redraw."""


# ----------------------------------------------------------------------
# Coefficient matrices of the two apparent maps
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class AppCoeffMatrices:
    """N_infty and N_psi: (1, c_1, c_2) -> coefficient triples."""

    n_infty: MatrixRF
    n_psi: MatrixRF


@functools.cache
def _symbolic_matrices() -> AppCoeffMatrices:
    """The coefficient matrices with everything symbolic (built once)."""
    columns_inf: List[Sequence[RatFunc]] = []
    columns_psi: List[Sequence[RatFunc]] = []
    base_inf = base_psi = None
    for c in ((0, 0), (1, 0), (0, 1)):
        sys = family(c=c)
        triple_inf = app_infty(sys).coeffs
        triple_psi = app_psi(sys).coeffs
        if base_inf is None:
            base_inf, base_psi = triple_inf, triple_psi
            columns_inf.append(triple_inf)
            columns_psi.append(triple_psi)
        else:
            columns_inf.append([a - b for a, b in zip(triple_inf, base_inf)])
            columns_psi.append([a - b for a, b in zip(triple_psi, base_psi)])
    n_infty = MatrixRF([[columns_inf[j][i] for j in range(3)]
                        for i in range(3)])
    n_psi = MatrixRF([[columns_psi[j][i] for j in range(3)]
                      for i in range(3)])
    return AppCoeffMatrices(n_infty, n_psi)


def coefficient_matrices(u=None, params=None) -> AppCoeffMatrices:
    """Columns extracted by evaluating the apparent maps at the three
    Higgs-coordinate basis points (0,0), (1,0), (0,1) and differencing."""
    mats = _symbolic_matrices()
    subs = {}
    if u is not None:
        ul, ut = u
        subs.update({"ul": ul, "ut": ut})
    if params:
        subs.update(params)
    if not subs:
        return mats
    return AppCoeffMatrices(mats.n_infty.subst(subs), mats.n_psi.subst(subs))


def m_matrix(u=None, params=None) -> MatrixRF:
    """The projective-linear family M(u) = N_psi(u) . N_infty(u)^{-1}.

    Realized through the adjugate, so the returned matrix differs from the
    literal inverse product by the scalar det N_infty(u); as a map between
    projective coefficient classes this is the same transformation.
    """
    mats = coefficient_matrices(u, params)
    if u is not None:
        det = mats.n_infty.det()
        if det.is_zero():
            raise NonGenericError(
                "non-generic input: N_infty is singular at this point")
    return mats.n_psi * mats.n_infty.adjugate()


# ----------------------------------------------------------------------
# The symmetrized pair map
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class SymPair:
    """Unordered pair of apparent classes; comparison ignores order."""

    first: AppClass
    second: AppClass

    def matches(self, other: "SymPair") -> bool:
        return ((self.first.proportional_to(other.first)
                 and self.second.proportional_to(other.second))
                or (self.first.proportional_to(other.second)
                    and self.second.proportional_to(other.first)))

    def __eq__(self, other):
        if not isinstance(other, SymPair):
            return NotImplemented
        return self.matches(other)

    __hash__ = None


def app_c(u=None, c=None, params=None) -> SymPair:
    """The unordered pair {infinity-class, section-class} of family(u, c)."""
    sys = family(u, c)
    if params:
        sys = sys.subst(params)
    return SymPair(app_infty(sys), app_psi(sys, u))


# ----------------------------------------------------------------------
# Exact fiber count
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class FiberCountReport:
    """Outcome of the exact elimination pipeline for one (a, s) pair."""

    count: int
    eliminant_degree: int
    squarefree_degree: int
    spurious_removed: int
    cross_degrees: Tuple[int, int]


def _as_const_poly(value) -> MPoly:
    rf = as_ratfunc(value)
    if not rf.den.is_constant():
        raise ValueError("expected a rational constant")
    return rf.num * MPoly.const(1 / rf.den.constant_value())


@functools.cache
def _guard_polys_symbolic() -> Tuple[MPoly, ...]:
    """Polynomials cutting the loci excluded from genuine fiber points."""
    ul, ut = var("ul"), var("ut")
    lam, t = var("lam"), var("t")
    mats = _symbolic_matrices()
    det_inf = bareiss_det([[_as_const_poly(mats.n_infty[i, j])
                            for j in range(3)] for i in range(3)])
    det_psi = bareiss_det([[_as_const_poly(mats.n_psi[i, j])
                            for j in range(3)] for i in range(3)])
    return (ul, ul - 1, ul - lam, ut, ut - 1, ut - lam, ut - t,
            P_PI, P_SIGMA, P_LAMBDA,
        det_inf.primitive_part(), det_psi.primitive_part())


@functools.cache
def _m_product_polys() -> Tuple[Tuple[MPoly, ...], ...]:
    """N_psi . adj(N_infty) as exact polynomials, computed once."""
    mats = _symbolic_matrices()
    adj = mats.n_infty.adjugate()
    rows = []
    for i in range(3):
        row = []
        for j in range(3):
            acc = MPoly.zero()
            for k in range(3):
                acc = acc + (_as_const_poly(mats.n_psi[i, k])
                             * _as_const_poly(adj[k, j]))
            row.append(acc)
        rows.append(tuple(row))
    return tuple(rows)


def _clear_ut(poly: MPoly, beta_num: MPoly, beta_den: MPoly,
              dmax: int) -> MPoly:
    """poly with ut -> beta_num/beta_den, cleared by beta_den^dmax."""
    parts = poly.coeffs_in("ut")
    acc = MPoly.zero()
    num_pow = MPoly.const(1)
    pows = {0: MPoly.const(1)}
    for k in range(1, dmax + 1):
        pows[k] = pows[k - 1] * beta_den
    for k, coeff in parts.items():
        term = coeff * pows[dmax - k]
        for _ in range(k):
            term = term * beta_num
        acc = acc + term
    return acc


def fiber_count_report(a: AppClass, s: AppClass, params: Dict[str, object]
                       ) -> FiberCountReport:
    """Count the solutions u of  s ~ M(u) . a  by exact elimination.

    Pipeline: the proportionality gives two cross-product equations
    E_1, E_2 in (u_lam, u_t); the resultant in u_t yields a univariate
    eliminant in u_lam; its square-free part counts distinct complex
    candidates; a candidate is genuine when the unique matching u_t (read
    off the degree-1 subresultant) satisfies both equations and avoids all
    guard loci.  Every step is exact rational arithmetic, so the count is
    certified, not floated.
    """
    for key in ("lam", "t", "nu"):
        if key not in params:
            raise ValueError(f"fiber_count needs numeric parameter {key!r}")
    subs = {k: as_rat(v) for k, v in params.items()}

    # W = M . a with M = N_psi adj(N_infty), as exact polynomials in (ul, ut)
    a_vec = [_as_const_poly(v) for v in a.coeffs]
    s_vec = [_as_const_poly(v) for v in s.coeffs]
    symbolic = _m_product_polys()
    prod = [[symbolic[i][j].subst_rat(subs) for j in range(3)]
            for i in range(3)]
    w_vec = []
    for i in range(3):
        acc = MPoly.zero()
        for j in range(3):
            acc = acc + prod[i][j] * a_vec[j]
        w_vec.append(acc)

    e1 = (w_vec[0] * s_vec[1] - w_vec[1] * s_vec[0]).primitive_part()
    e2 = (w_vec[0] * s_vec[2] - w_vec[2] * s_vec[0]).primitive_part()
    if e1.is_zero() or e2.is_zero():
        raise ResampleRequest("a cross-product equation vanished identically")
    cross_degrees = (e1.total_degree(), e2.total_degree())

    eliminant = resultant(e1, e2, "ut")
    if eliminant.is_zero():
        raise ResampleRequest("the eliminant vanished identically")
    eliminant_degree = eliminant.degree_in("ul")
    squarefree = upoly_squarefree(eliminant, "ul")
    squarefree_degree = squarefree.degree_in("ul")
    if squarefree_degree < eliminant_degree:
        raise ResampleRequest(
            "the eliminant has a repeated root: (a, s) lies on the branch "
            "locus where two fiber points collide")

    # The degree-1 member of the subresultant chain pins u_t over each root.
    chain = subresultant_prs(e1, e2, "ut")
    linear = None
    for member in chain:
        if member.degree_in("ut") == 1:
            linear = member
            break
    if linear is None:
        raise ResampleRequest("no degree-1 subresultant; fiber not simple")
    parts = linear.coeffs_in("ut")
    beta_den = parts.get(1, MPoly.zero())
    beta_num = -parts.get(0, MPoly.zero())
    shared = upoly_gcd(squarefree, beta_den, "ul")
    if shared.degree_in("ul") > 0:
        raise ResampleRequest("u_t is ambiguous over an eliminant root")

    def back_substituted(poly: MPoly) -> MPoly:
        d = poly.degree_in("ut")
        return _clear_ut(poly, beta_num, beta_den, d)

    survivors = squarefree
    for equation in (e1, e2):
        image = back_substituted(equation)
        if not image.is_zero():
            survivors = upoly_gcd(survivors, image, "ul")
    for guard in _guard_polys_symbolic():
        guard_s = guard.subst_rat(subs)
        image = back_substituted(guard_s)
        if image.is_zero():
            raise ResampleRequest("a guard locus contains the whole fiber")
        if image.degree_in("ul") > 0 and survivors.degree_in("ul") > 0:
            survivors = upoly_strip_factor(survivors, image, "ul")
    count = survivors.degree_in("ul")
    return FiberCountReport(
        count=count,
        eliminant_degree=eliminant_degree,
        squarefree_degree=squarefree_degree,
        spurious_removed=squarefree_degree - count,
        cross_degrees=cross_degrees,
    )


def fiber_count(a: AppClass, s: AppClass, params: Dict[str, object],
                seed: Optional[int] = None) -> int:
    """The number of genuine fiber points (see ``fiber_count_report``).

    ``seed`` is accepted for drivers that redraw (a, s) on a
    ResampleRequest; the count itself is deterministic in (a, s, params).
    """
    del seed
    return fiber_count_report(a, s, params).count


def random_app_pair(seed: int) -> Tuple[AppClass, AppClass]:
    """A random rational (a, s) pair of apparent classes, bounded small."""
    draws = random_assignment(seed, ("a0", "a1", "a2", "s0", "s1", "s2"),
                              distinct=False, bound=40)
    a = AppClass.make([draws["a0"], draws["a1"], draws["a2"]])
    s = AppClass.make([draws["s0"], draws["s1"], draws["s2"]])
    return a, s


def fiber_count_trials(trials: int, seed: int,
                       params: Dict[str, object]) -> List[FiberCountReport]:
    """Run the fiber count on ``trials`` random (a, s) pairs."""
    reports = []
    for child in seed_stream(seed, trials):
        for attempt in range(8):
            a, s = random_app_pair(child + attempt)
            try:
                reports.append(fiber_count_report(a, s, params))
                break
            except ResampleRequest:
                continue
        else:
            raise ResampleRequest(
                f"no generic (a, s) found for child seed {child}")
    return reports


# ----------------------------------------------------------------------
# Generic injectivity
# ----------------------------------------------------------------------

def injectivity_witness(samples: int, seed: int,
                        params: Optional[Dict[str, object]] = None) -> bool:
    """No sampled tangency class is an eigenvector of M(u)^2.

    For each sampled generic (u, c) the class a = app_infty(family(u, c))
    must not satisfy M(u)^2 a ~ a; the witness is the nonvanishing of the
    cross product, evaluated exactly.
    """
    params = dict(params or {"lam": as_rat(2), "t": as_rat(3),
                             "nu": as_rat("1/5")})
    lam, t = as_rat(params["lam"]), as_rat(params["t"])
    avoid = {"ul": (0, 1, lam), "ut": (0, 1, lam, t)}
    guard_polys = [P_PI, P_SIGMA, P_LAMBDA]
    base = {k: as_rat(v) for k, v in params.items()}
    for child in seed_stream(seed, samples):
        point = random_assignment(child, ("ul", "ut", "c1", "c2"),
                                  avoid_values=avoid,
                                  avoid_polys=guard_polys,
                                  distinct=False, base=base, bound=50)
        u = (point["ul"], point["ut"])
        c = (point["c1"], point["c2"])
        sys = family(u, c).subst(base)
        a = [v.eval_rat({}) for v in app_infty(sys).coeffs]
        mat = m_matrix(u, base)
        twice = mat * mat
        image = twice.eval_rat({})
        w = [sum((image[i][j] * a[j] for j in range(3)), as_rat(0))
             for i in range(3)]
        cross = (w[0] * a[1] - w[1] * a[0],
                 w[0] * a[2] - w[2] * a[0],
                 w[1] * a[2] - w[2] * a[1])
        if all(v == 0 for v in cross):
            return False
    return True
