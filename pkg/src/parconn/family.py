"""Universal family of rank-2 logarithmic connections on the five-punctured
line, plus the marked section and the two apparent maps.

The family lives on the trivial bundle over the x-line with simple poles at
D = {0, 1, lam, t, infty}.  A member is

    family(u, c) = nabla0(u) + c_1 theta1(u) + c_2 theta2(u),

where u = (u_lam, u_t) locates the parabolic directions over lam and t and
c = (c_1, c_2) are the Higgs coordinates.  All residue tables are explicit
2x2 matrices (transcribed below); everything downstream — the apparent maps,
the coordinate changes, the fiber counts — is derived from these tables by
exact arithmetic.

Chart conventions:
  * parabolic directions use the (zeta, 1) convention of ``connections``;
    the flag over infinity is the constant direction (1, 0);
  * the standard flag is (0,1), (1,1), (u_lam,1), (u_t,1), (1,0) over
    0, 1, lam, t, infty, with residue eigenvalues (1/4, 1/4, 1/4, nu, 1/4)
    on those directions, independent of c;
  * ``app_infty`` composes with the degree shift diag(1, x) — an elementary
    transformation centered at x = 0 — so that the tangency divisor of
    nabla0 is exactly {lam, t}; this pins the normalization.

Apparent classes are projective coefficient triples [a_0 : a_1 : a_2] of a
quadratic a_2 x^2 + a_1 x + a_0; proportionality is decided by exact cross
products, never by division.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

from .connections import (
    INFINITY_KEY,
    Direction,
    FuchsianSystem,
    HiggsField,
    ParabolicData,
    SpectralData,
    eigenvalue_on_direction,
)
from .linalg import MatrixRF
from .poly import ExactDivisionError, MPoly
from .rat import as_rat
from .ratfunc import RatFunc, as_ratfunc


class DegenerateConnectionError(ValueError):
    """An apparent class collapsed to the identically-zero quadratic."""


# ----------------------------------------------------------------------
# Pole keys and symbolic coordinates
# ----------------------------------------------------------------------

POLE_ZERO = "0"
POLE_ONE = "1"
POLE_LAM = "lam"
POLE_T = "t"
FINITE_POLES: Tuple[str, ...] = (POLE_ZERO, POLE_ONE, POLE_LAM, POLE_T)

_QUARTER = as_rat("1/4")


def pole_locations() -> Dict[str, RatFunc]:
    """The four finite pole positions 0, 1, lam, t (lam, t symbolic)."""
    return {
        POLE_ZERO: RatFunc.zero(),
        POLE_ONE: RatFunc.one(),
        POLE_LAM: RatFunc.from_var("lam"),
        POLE_T: RatFunc.from_var("t"),
    }


def _u_pair(u) -> Tuple[RatFunc, RatFunc]:
    """Coerce ``u`` to a (u_lam, u_t) pair; None means fully symbolic."""
    if u is None:
        return RatFunc.from_var("ul"), RatFunc.from_var("ut")
    ul, ut = u
    return as_ratfunc(ul), as_ratfunc(ut)


def _c_pair(c) -> Tuple[RatFunc, RatFunc]:
    if c is None:
        return RatFunc.from_var("c1"), RatFunc.from_var("c2")
    c1, c2 = c
    return as_ratfunc(c1), as_ratfunc(c2)


@dataclass(frozen=True)
class FamilyPoint:
    """A member of the family: bundle parameter u and Higgs coordinates c."""

    u: Tuple[RatFunc, RatFunc]
    c: Tuple[RatFunc, RatFunc]

    @staticmethod
    def make(u=None, c=None) -> "FamilyPoint":
        return FamilyPoint(_u_pair(u), _c_pair(c))

    def connection(self) -> FuchsianSystem:
        return family(self.u, self.c)

    def genericity(self) -> Dict[str, bool]:
        """Guard flags for numeric u (True marks a violated guard)."""
        from .involution import genericity_guard
        return genericity_guard(self.u)


# ----------------------------------------------------------------------
# Residue tables
# ----------------------------------------------------------------------

def nabla0(u=None) -> FuchsianSystem:
    """The base connection of the family (tangency divisor {lam, t})."""
    ul, ut = _u_pair(u)
    nu = RatFunc.from_var("nu")
    residues = {
        POLE_ZERO: MatrixRF([[-1, 0], [-2 - 4 * nu, 1]]) * _QUARTER,
        POLE_ONE: MatrixRF([[1 + 4 * nu, -4 * nu],
                            [2 + 4 * nu, -1 - 4 * nu]]) * _QUARTER,
        POLE_LAM: MatrixRF([[-1, 2 * ul], [0, 1]]) * _QUARTER,
        POLE_T: MatrixRF([[-1, 2 * ut], [0, 1]]) * nu,
    }
    return FuchsianSystem(residues, pole_locations())


def theta1(u=None) -> HiggsField:
    """The Higgs field dual to du_t (coefficient c_1; poles 0, 1, t)."""
    _, ut = _u_pair(u)
    locations = pole_locations()
    residues = {
        POLE_ZERO: MatrixRF([[0, 0], [1 - ut, 0]]),
        POLE_ONE: MatrixRF([[ut, -ut], [ut, -ut]]),
        POLE_T: MatrixRF([[-ut, ut * ut], [-1, ut]]),
    }
    keep = {k: locations[k] for k in residues}
    return HiggsField(residues, keep)


def theta2(u=None) -> HiggsField:
    """The Higgs field dual to du_lam (coefficient c_2; poles 0, 1, lam)."""
    ul, _ = _u_pair(u)
    locations = pole_locations()
    residues = {
        POLE_ZERO: MatrixRF([[0, 0], [1 - ul, 0]]),
        POLE_ONE: MatrixRF([[ul, -ul], [ul, -ul]]),
        POLE_LAM: MatrixRF([[-ul, ul * ul], [-1, ul]]),
    }
    keep = {k: locations[k] for k in residues}
    return HiggsField(residues, keep)


def family(u=None, c=None) -> FuchsianSystem:
    """nabla0(u) + c_1 theta1(u) + c_2 theta2(u), residue-wise."""
    c1, c2 = _c_pair(c)
    return nabla0(u).add(theta1(u), 1, c1).add(theta2(u), 1, c2)


def standard_parabolic(u=None) -> ParabolicData:
    """The flag (0,1), (1,1), (u_lam,1), (u_t,1), (1,0) over D."""
    ul, ut = _u_pair(u)
    return ParabolicData({
        POLE_ZERO: Direction(RatFunc.zero()),
        POLE_ONE: Direction(RatFunc.one()),
        POLE_LAM: Direction(ul),
        POLE_T: Direction(ut),
        INFINITY_KEY: Direction.infinite(),
    })


def standard_spectral() -> SpectralData:
    """Eigenvalue pairs (nu_plus, nu_minus): 1/4 everywhere except nu at t."""
    quarter = as_ratfunc(_QUARTER)
    nu = RatFunc.from_var("nu")
    return SpectralData({
        POLE_ZERO: (quarter, -quarter),
        POLE_ONE: (quarter, -quarter),
        POLE_LAM: (quarter, -quarter),
        POLE_T: (nu, -nu),
        INFINITY_KEY: (quarter, -quarter),
    })


def flag_eigenvalues(sys: FuchsianSystem, parab: ParabolicData) -> Dict[str, RatFunc]:
    """Scalar action of each residue on its parabolic direction."""
    out = {}
    for key in sys.poles:
        out[key] = eigenvalue_on_direction(sys.residue_at(key), parab.at(key))
    return out


# ----------------------------------------------------------------------
# The marked section
# ----------------------------------------------------------------------

def sigma_psi(u=None, lam=None) -> RatFunc:
    """The section x -> u_lam (1-lam) x / ((u_lam-lam) x - lam (u_lam-1)).

    Passes through the parabolic points over 0, 1 and lam (values 0, 1 and
    u_lam respectively).
    """
    num, den = sigma_psi_vector(u, lam)
    return as_ratfunc(num) / as_ratfunc(den)


def sigma_psi_vector(u=None, lam=None) -> Tuple[RatFunc, RatFunc]:
    """The section as a (zeta, 1)-convention vector (numerator, denominator).

    Working with the vector avoids dividing by the denominator, which keeps
    ``app_psi`` polynomial until the final structural division.  ``lam``
    defaults to the symbolic pole position and must match the system the
    section is paired with.
    """
    ul, _ = _u_pair(u)
    x = RatFunc.from_var("x")
    lam = RatFunc.from_var("lam") if lam is None else as_ratfunc(lam)
    num = ul * (1 - lam) * x
    den = (ul - lam) * x - lam * (ul - 1)
    return num, den


# ----------------------------------------------------------------------
# Apparent classes
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class AppClass:
    """Projective coefficient triple [a_0 : a_1 : a_2] of a quadratic."""

    coeffs: Tuple[RatFunc, RatFunc, RatFunc]

    def __post_init__(self):
        if len(self.coeffs) != 3:
            raise ValueError("apparent class needs exactly three coefficients")
        if all(a.is_zero() for a in self.coeffs):
            raise DegenerateConnectionError(
                "apparent class is identically zero")

    @staticmethod
    def make(triple: Sequence) -> "AppClass":
        a0, a1, a2 = (as_ratfunc(v) for v in triple)
        return AppClass((a0, a1, a2))

    def proportional_to(self, other: "AppClass") -> bool:
        """Projective equality via the three 2x2 cross products."""
        a, b = self.coeffs, other.coeffs
        for i in range(3):
            for j in range(i + 1, 3):
                if not (a[i] * b[j] == a[j] * b[i]):
                    return False
        return True

    def subst(self, mapping) -> "AppClass":
        return AppClass(tuple(v.subst(mapping) for v in self.coeffs))

    def eval_rat(self, assignment) -> Tuple:
        return tuple(v.eval_rat(assignment) for v in self.coeffs)

    def to_str(self) -> str:
        return "[" + " : ".join(v.to_str() for v in self.coeffs) + "]"


def _x_free(rf: RatFunc) -> bool:
    return rf.den.degree_in("x") == 0


def _triple_from_poly(numerator: RatFunc, max_degree: int) -> Tuple[RatFunc, ...]:
    """Coefficients [a_0, ..., a_{max_degree}] of an x-polynomial RatFunc.

    The denominator must be x-free; degrees above ``max_degree`` must carry
    identically-zero coefficients (asserted).
    """
    if not _x_free(numerator):
        raise ValueError("numerator is not polynomial in x")
    by_degree = numerator.num.coeffs_in("x")
    coeffs = []
    for d in range(max_degree + 1):
        part = by_degree.get(d, MPoly.zero())
        coeffs.append(RatFunc(part, numerator.den))
    for d, part in by_degree.items():
        if d > max_degree and not part.is_zero():
            raise AssertionError(
                f"unexpected degree-{d} coefficient {part.to_str()}")
    return tuple(coeffs)


def _require_family_chart(sys: FuchsianSystem) -> None:
    if set(sys.residues) != set(FINITE_POLES):
        raise ValueError(
            "apparent maps expect the five-pole chart with finite poles "
            f"{FINITE_POLES}, got {tuple(sys.residues)}")


def app_infty(sys: FuchsianSystem) -> AppClass:
    """Tangency class with the infinity section, after the diag(1, x) shift.

    Returns the numerator of x * A_21(x) over the cleared denominator
    (x-1)(x-lam)(x-t) as a projective triple.  The would-be cubic
    coefficient vanishes identically; this is asserted, not assumed.
    """
    _require_family_chart(sys)
    x = RatFunc.from_var("x")
    keys = list(sys.residues)
    numerator = RatFunc.zero()
    for key in keys:
        term = sys.residue_at(key)[1, 0]
        for other in keys:
            if other != key:
                term = term * (x - sys.locations[other])
        numerator = numerator + term
    triple = _triple_from_poly(numerator, 3)
    if not triple[3].is_zero():
        raise AssertionError("cubic coefficient of the tangency class "
                             "did not cancel")
    return AppClass(triple[:3])


#: x (x-1) (x-lam): the structural factor of the sigma_psi tangency
#: numerator, accounting for the three forced intersections of the section
#: with the parabolic points over 0, 1 and lam.  Determined once
#: symbolically; the exact division below re-certifies it on every call.
_STRUCTURAL_FACTOR_POLES = (POLE_ZERO, POLE_ONE, POLE_LAM)


def app_psi(sys: FuchsianSystem, u=None) -> AppClass:
    """Tangency class of the connection's foliation with the marked section.

    With v(x) the section vector and w = P v' + sum_p A_p v prod_{q != p}
    (x - q) (the polynomial form of P (v' + A v), P the full pole product),
    the tangency numerator is det(v, w).  It is exactly divisible by the
    structural factor x (x-1) (x-lam); the quotient is the quadratic class.
    """
    _require_family_chart(sys)
    x = RatFunc.from_var("x")
    v1, v2 = sigma_psi_vector(u, lam=sys.locations[POLE_LAM])
    keys = list(sys.residues)
    pole_product = RatFunc.one()
    for key in keys:
        pole_product = pole_product * (x - sys.locations[key])
    w1 = v1.derivative("x") * pole_product
    w2 = v2.derivative("x") * pole_product
    for key in keys:
        image = sys.residue_at(key).apply([v1, v2])
        clear = RatFunc.one()
        for other in keys:
            if other != key:
                clear = clear * (x - sys.locations[other])
        w1 = w1 + image[0] * clear
        w2 = w2 + image[1] * clear
    numerator = v1 * w2 - v2 * w1
    if not _x_free(numerator):
        raise ValueError("tangency numerator is not polynomial in x")
    lam_loc = sys.locations[POLE_LAM]
    if not lam_loc.den.is_constant():
        raise ValueError("pole position lam must be polynomial")
    lam_mp = lam_loc.num * MPoly.const(1 / lam_loc.den.constant_value())
    x_mp = MPoly.var("x")
    structural = x_mp * (x_mp - MPoly.const(1)) * (x_mp - lam_mp)
    try:
        quotient = numerator.num.exact_div(structural)
    except ExactDivisionError as exc:
        raise ValueError(
            "tangency numerator lacks the structural factor x(x-1)(x-lam); "
            "the system is not in the marked-section chart") from exc
    triple = _triple_from_poly(RatFunc(quotient, numerator.den), 2)
    return AppClass(triple)
