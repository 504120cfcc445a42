"""Rational functions as numerator/denominator pairs of sparse polynomials.

No multivariate gcd is ever computed: a RatFunc is not reduced to lowest
terms.  Equality is decided by cross-multiplication, which is exact and cheap
compared to simplification.  The only normalization is content-based: the
denominator is scaled to a primitive integer polynomial with positive leading
coefficient (graded lex), and the numerator absorbs the scalar.  This makes
the representation produced by a fixed computation deterministic, which is
what the canonical serialization and golden files rely on.
"""

from __future__ import annotations

from typing import Dict, Tuple

from .poly import MPoly, const as poly_const
from .rat import Rat, as_rat


class RatFunc:
    """Quotient of two polynomials, denominator nonzero."""

    __slots__ = ("num", "den")

    def __init__(self, num: MPoly, den: MPoly = None, _trusted: bool = False):
        if den is None:
            den = _ONE_POLY
        if _trusted:
            self.num = num
            self.den = den
            return
        if not isinstance(num, MPoly) or not isinstance(den, MPoly):
            raise TypeError("RatFunc expects MPoly numerator and denominator")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num = num
            self.den = _ONE_POLY
            return
        c = den.content()
        if c == 1:
            self.num = num
            self.den = den
        else:
            inv = 1 / c
            self.num = num * inv
            self.den = den * inv

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @staticmethod
    def from_const(value) -> "RatFunc":
        return RatFunc(MPoly.const(value))

    @staticmethod
    def from_var(name: str) -> "RatFunc":
        return RatFunc(MPoly.var(name))

    @staticmethod
    def zero() -> "RatFunc":
        return _RF_ZERO

    @staticmethod
    def one() -> "RatFunc":
        return _RF_ONE

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den == _ONE_POLY

    def __eq__(self, other) -> bool:
        other = as_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        # Cross-multiplication; no simplification needed.
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        raise TypeError("RatFunc is unhashable (equality is cross-multiplicative)")

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    def __add__(self, other) -> "RatFunc":
        other = as_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den,
                       self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den, _trusted=True)

    def __sub__(self, other) -> "RatFunc":
        other = as_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "RatFunc":
        other = as_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "RatFunc":
        other = as_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFunc":
        other = as_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RatFunc":
        other = as_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int) -> "RatFunc":
        if not isinstance(n, int):
            raise ValueError("RatFunc power requires an integer")
        if n < 0:
            return (_RF_ONE / self) ** (-n)
        return RatFunc(self.num ** n, self.den ** n)

    # ------------------------------------------------------------------
    # Calculus and substitution
    # ------------------------------------------------------------------

    def derivative(self, name: str) -> "RatFunc":
        """Quotient rule; denominator squares, no cancellation attempted."""
        dn = self.num.derivative(name)
        dd = self.den.derivative(name)
        if dd.is_zero():
            return RatFunc(dn, self.den)
        return RatFunc(dn * self.den - self.num * dd, self.den * self.den)

    def subst(self, mapping: Dict[str, object]) -> "RatFunc":
        """Substitute rationals and/or rational functions for variables."""
        rat_map = {}
        rf_map = {}
        for name, value in mapping.items():
            if isinstance(value, RatFunc):
                if value.is_polynomial() and value.num.is_constant():
                    rat_map[name] = value.num.constant_value()
                else:
                    rf_map[name] = value
            elif isinstance(value, MPoly):
                if value.is_constant():
                    rat_map[name] = value.constant_value()
                else:
                    rf_map[name] = RatFunc(value)
            else:
                rat_map[name] = as_rat(value)
        num, den = self.num, self.den
        if rat_map:
            num = num.subst_rat(rat_map)
            den = den.subst_rat(rat_map)
        if den.is_zero():
            raise ZeroDivisionError("denominator vanishes under substitution")
        if not rf_map:
            return RatFunc(num, den)
        new_num = subst_poly(num, rf_map)
        new_den = subst_poly(den, rf_map)
        return new_num / new_den

    def eval_rat(self, assignment: Dict[str, object]) -> "Rat":
        """Exact evaluation at rational values.

        Raises ZeroDivisionError when the denominator vanishes (including the
        indeterminate 0/0 case, which can occur because representatives are
        never reduced).
        """
        den_val = self.den.eval_rat(assignment)
        if den_val == 0:
            raise ZeroDivisionError("denominator vanishes at the given point")
        return self.num.eval_rat(assignment) / den_val

    # ------------------------------------------------------------------
    # Serialization
    # ------------------------------------------------------------------

    def to_str(self) -> str:
        if self.den == _ONE_POLY:
            return self.num.to_str()
        return f"({self.num.to_str()}) / ({self.den.to_str()})"

    def __repr__(self) -> str:
        return f"RatFunc({self.to_str()})"


def as_ratfunc(value) -> "RatFunc":
    if isinstance(value, RatFunc):
        return value
    if isinstance(value, MPoly):
        return RatFunc(value)
    if isinstance(value, (int, str)) or hasattr(value, "denominator"):
        return RatFunc(MPoly.const(value))
    return NotImplemented


def subst_poly(poly: MPoly, mapping: Dict[str, "RatFunc"]) -> "RatFunc":
    """Substitute rational functions into a polynomial.

    Expands over a single common denominator: with f_i = p_i/q_i substituted
    for variable i of degree d_i, the result is
    ``sum(term_coeff * prod p_i^{e_i} * prod q_i^{d_i - e_i}) / prod q_i^{d_i}``.
    Powers are cached; only one RatFunc is materialized.
    """
    if not mapping:
        return RatFunc(poly)
    if poly.is_zero():
        return _RF_ZERO
    from .poly import VAR_INDEX

    items = []
    for name, rf in mapping.items():
        if not isinstance(rf, RatFunc):
            rf = as_ratfunc(rf)
        items.append((VAR_INDEX[name], name, rf))

    degs = {idx: poly.degree_in(name) for idx, name, _ in items}
    num_pows: Dict[Tuple[int, int], MPoly] = {}
    den_pows: Dict[Tuple[int, int], MPoly] = {}

    def cached_pow(cache, idx, base, e):
        key = (idx, e)
        v = cache.get(key)
        if v is None:
            v = base ** e
            cache[key] = v
        return v

    total = MPoly.zero()
    for exp, coeff in poly.coeffs.items():
        rest = list(exp)
        term = MPoly.const(coeff)
        for idx, _, rf in items:
            e = exp[idx]
            rest[idx] = 0
            d = degs[idx]
            if e:
                term = term * cached_pow(num_pows, idx, rf.num, e)
            if d - e:
                term = term * cached_pow(den_pows, idx, rf.den, d - e)
        term = term * MPoly({tuple(rest): as_rat(1)})
        total = total + term

    denom = MPoly.const(1)
    for idx, _, rf in items:
        if degs[idx]:
            denom = denom * cached_pow(den_pows, idx, rf.den, degs[idx])
    return RatFunc(total, denom)


_ONE_POLY = poly_const(1)
_RF_ZERO = RatFunc(MPoly.zero(), _ONE_POLY, _trusted=True)
_RF_ONE = RatFunc(_ONE_POLY, _ONE_POLY, _trusted=True)
