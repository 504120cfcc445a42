"""Sparse multivariate polynomials over the rationals.

A polynomial is a dict mapping exponent tuples to nonzero rational
coefficients.  Every exponent tuple has one slot per variable of the fixed
universe ``VARS``; unused variables simply carry exponent 0, so any two
polynomials live in the same ring and can be combined directly.

Monomial order is graded lexicographic: terms compare first by total degree,
ties broken by the exponent tuple in the documented variable order.  All
canonical output (leading terms, serialization) follows this order, so equal
polynomials always have identical canonical forms.

The zero polynomial is the empty dict.  Zero coefficients are never stored.
"""

from __future__ import annotations

from math import gcd
from typing import Dict, Iterable, Iterator, Tuple

from .rat import RAT_ONE, RAT_ZERO, Rat, as_rat, rat_den, rat_num, rat_str

# Fixed variable universe.  The order below is the canonical one used for
# graded-lex tie-breaking and for serialization.
VARS: Tuple[str, ...] = (
    "x", "zeta", "ul", "ut", "c1", "c2", "lam", "t", "nu",
    "z", "w", "k1", "k2",
    "y1", "y2", "y3", "y4",
    "x0", "x1", "x2", "x3", "x4",
)
NVARS = len(VARS)
VAR_INDEX: Dict[str, int] = {name: i for i, name in enumerate(VARS)}

Exponent = Tuple[int, ...]
_ZERO_EXP: Exponent = (0,) * NVARS


class ExactDivisionError(ArithmeticError):
    """Raised when an exact polynomial division leaves a remainder."""


def _term_key(exp: Exponent):
    """Graded-lex sort key for a monomial (higher key = later in the order)."""
    return (sum(exp), exp)


class MPoly:
    """Immutable sparse polynomial.  Do not mutate ``coeffs`` after creation."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Dict[Exponent, "Rat"], _trusted: bool = False):
        if _trusted:
            self.coeffs = coeffs
        else:
            clean = {}
            for exp, c in coeffs.items():
                c = as_rat(c)
                if c != 0:
                    clean[exp] = c
            self.coeffs = clean

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @staticmethod
    def zero() -> "MPoly":
        return _MP_ZERO

    @staticmethod
    def const(value) -> "MPoly":
        c = as_rat(value)
        if c == 0:
            return _MP_ZERO
        return MPoly({_ZERO_EXP: c}, _trusted=True)

    @staticmethod
    def var(name: str) -> "MPoly":
        idx = VAR_INDEX[name]
        exp = [0] * NVARS
        exp[idx] = 1
        return MPoly({tuple(exp): RAT_ONE}, _trusted=True)

    @staticmethod
    def monomial(coeff, exps: Dict[str, int]) -> "MPoly":
        """Build ``coeff * prod(var^e)`` from a name->exponent mapping."""
        c = as_rat(coeff)
        if c == 0:
            return _MP_ZERO
        exp = [0] * NVARS
        for name, e in exps.items():
            if e < 0:
                raise ValueError("negative exponent in monomial")
            exp[VAR_INDEX[name]] = e
        return MPoly({tuple(exp): c}, _trusted=True)

    # ------------------------------------------------------------------
    # Basic queries
    # ------------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, MPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, str)) or hasattr(other, "denominator"):
            return self.coeffs == MPoly.const(other).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def num_terms(self) -> int:
        return len(self.coeffs)

    def total_degree(self) -> int:
        """Total degree; 0 for the zero polynomial."""
        if not self.coeffs:
            return 0
        return max(sum(e) for e in self.coeffs)

    def degree_in(self, name: str) -> int:
        """Degree in a single variable; 0 for the zero polynomial."""
        idx = VAR_INDEX[name]
        if not self.coeffs:
            return 0
        return max(e[idx] for e in self.coeffs)

    def variables(self) -> Tuple[str, ...]:
        """Names of variables that actually occur, in canonical order."""
        used = [False] * NVARS
        for e in self.coeffs:
            for i, p in enumerate(e):
                if p:
                    used[i] = True
        return tuple(VARS[i] for i in range(NVARS) if used[i])

    def leading_term(self) -> Tuple[Exponent, "Rat"]:
        """Leading (exponent, coefficient) in graded-lex order."""
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading term")
        exp = max(self.coeffs, key=_term_key)
        return exp, self.coeffs[exp]

    def constant_value(self) -> "Rat":
        """The rational value of a constant polynomial."""
        if not self.coeffs:
            return RAT_ZERO
        if len(self.coeffs) == 1 and _ZERO_EXP in self.coeffs:
            return self.coeffs[_ZERO_EXP]
        raise ValueError("polynomial is not constant")

    def is_constant(self) -> bool:
        return not self.coeffs or (len(self.coeffs) == 1 and _ZERO_EXP in self.coeffs)

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    def __add__(self, other) -> "MPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.coeffs:
            return other
        if not other.coeffs:
            return self
        out = dict(self.coeffs)
        for exp, c in other.coeffs.items():
            v = out.get(exp)
            if v is None:
                out[exp] = c
            else:
                v = v + c
                if v == 0:
                    del out[exp]
                else:
                    out[exp] = v
        return MPoly(out, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        return MPoly({e: -c for e, c in self.coeffs.items()}, _trusted=True)

    def __sub__(self, other) -> "MPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "MPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "MPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return _MP_ZERO
        # Scalar shortcut: multiplying by a constant is common and cheap.
        if len(b) == 1 and _ZERO_EXP in b:
            c = b[_ZERO_EXP]
            return MPoly({e: v * c for e, v in a.items()}, _trusted=True)
        if len(a) == 1 and _ZERO_EXP in a:
            c = a[_ZERO_EXP]
            return MPoly({e: v * c for e, v in b.items()}, _trusted=True)
        if len(a) < len(b):
            a, b = b, a
        out: Dict[Exponent, Rat] = {}
        get = out.get
        iadd = int.__add__
        for eb, cb in b.items():
            for ea, ca in a.items():
                k = tuple(map(iadd, ea, eb))
                v = get(k)
                if v is None:
                    out[k] = ca * cb
                else:
                    out[k] = v + ca * cb
        return MPoly({e: c for e, c in out.items() if c != 0}, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial power requires a nonnegative integer")
        result = _MP_ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # ------------------------------------------------------------------
    # Calculus and substitution
    # ------------------------------------------------------------------

    def derivative(self, name: str) -> "MPoly":
        """Partial derivative with respect to one variable."""
        idx = VAR_INDEX[name]
        out: Dict[Exponent, Rat] = {}
        for exp, c in self.coeffs.items():
            p = exp[idx]
            if p == 0:
                continue
            new = list(exp)
            new[idx] = p - 1
            out[tuple(new)] = c * p
        return MPoly(out, _trusted=True)

    def subst_rat(self, assignment: Dict[str, object]) -> "MPoly":
        """Substitute rational values for a subset of variables.

        Unassigned variables remain symbolic.  Powers of each value are cached
        since specialization of large polynomials is a hot path.
        """
        if not assignment:
            return self
        subs = {VAR_INDEX[name]: as_rat(v) for name, v in assignment.items()}
        powers: Dict[Tuple[int, int], Rat] = {}
        out: Dict[Exponent, Rat] = {}
        for exp, c in self.coeffs.items():
            factor = c
            new = list(exp)
            for idx, val in subs.items():
                p = exp[idx]
                if p == 0:
                    continue
                key = (idx, p)
                vp = powers.get(key)
                if vp is None:
                    vp = val ** p
                    powers[key] = vp
                factor = factor * vp
                new[idx] = 0
            if factor == 0:
                continue
            k = tuple(new)
            v = out.get(k)
            if v is None:
                out[k] = factor
            else:
                v = v + factor
                if v == 0:
                    del out[k]
                else:
                    out[k] = v
        return MPoly(out, _trusted=True)

    def eval_rat(self, assignment: Dict[str, object]) -> "Rat":
        """Fully evaluate at rational values (every occurring variable assigned)."""
        result = self.subst_rat(assignment)
        return result.constant_value()

    # ------------------------------------------------------------------
    # Univariate views
    # ------------------------------------------------------------------

    def coeffs_in(self, name: str) -> Dict[int, "MPoly"]:
        """View as a univariate polynomial in ``name``: degree -> coefficient.

        Coefficients are polynomials in the remaining variables.  Only nonzero
        coefficients appear.
        """
        idx = VAR_INDEX[name]
        buckets: Dict[int, Dict[Exponent, Rat]] = {}
        for exp, c in self.coeffs.items():
            p = exp[idx]
            new = list(exp)
            new[idx] = 0
            buckets.setdefault(p, {})[tuple(new)] = c
        return {p: MPoly(d, _trusted=True) for p, d in sorted(buckets.items())}

    # ------------------------------------------------------------------
    # Content and exact division
    # ------------------------------------------------------------------

    def content(self) -> "Rat":
        """Signed rational content.

        ``self = content * primitive`` where the primitive part has coprime
        integer coefficients and positive leading coefficient (graded lex).
        The content of the zero polynomial is 0.
        """
        if not self.coeffs:
            return RAT_ZERO
        num_gcd = 0
        den_lcm = 1
        for c in self.coeffs.values():
            num_gcd = gcd(num_gcd, abs(rat_num(c)))
            d = rat_den(c)
            den_lcm = den_lcm // gcd(den_lcm, d) * d
        _, lead = self.leading_term()
        sign = 1 if lead > 0 else -1
        return Rat(sign * num_gcd, den_lcm)

    def primitive_part(self) -> "MPoly":
        if not self.coeffs:
            return _MP_ZERO
        c = self.content()
        inv = 1 / c
        return MPoly({e: v * inv for e, v in self.coeffs.items()}, _trusted=True)

    def exact_div(self, divisor: "MPoly") -> "MPoly":
        """Exact division; raises ExactDivisionError if it does not divide."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return _MP_ZERO
        d_exp, d_coeff = divisor.leading_term()
        rem = dict(self.coeffs)
        quot: Dict[Exponent, Rat] = {}
        isub = int.__sub__
        while rem:
            r_exp = max(rem, key=_term_key)
            q_exp = tuple(map(isub, r_exp, d_exp))
            if any(p < 0 for p in q_exp):
                raise ExactDivisionError("leading term not divisible")
            q_coeff = rem[r_exp] / d_coeff
            quot[q_exp] = q_coeff
            # rem -= q_term * divisor
            iadd = int.__add__
            for e, c in divisor.coeffs.items():
                k = tuple(map(iadd, q_exp, e))
                v = rem.get(k)
                if v is None:
                    rem[k] = -q_coeff * c
                else:
                    v = v - q_coeff * c
                    if v == 0:
                        del rem[k]
                    else:
                        rem[k] = v
        return MPoly(quot, _trusted=True)

    def divides(self, other: "MPoly") -> bool:
        """True iff ``self`` divides ``other`` exactly."""
        try:
            other.exact_div(self)
            return True
        except ExactDivisionError:
            return False

    # ------------------------------------------------------------------
    # Canonical serialization
    # ------------------------------------------------------------------

    def sorted_terms(self) -> Iterator[Tuple[Exponent, "Rat"]]:
        """Terms in descending graded-lex order."""
        for exp in sorted(self.coeffs, key=_term_key, reverse=True):
            yield exp, self.coeffs[exp]

    def to_str(self) -> str:
        """Canonical text form; equal polynomials serialize identically."""
        if not self.coeffs:
            return "0"
        parts = []
        for exp, c in self.sorted_terms():
            factors = []
            for i, p in enumerate(exp):
                if p == 1:
                    factors.append(VARS[i])
                elif p > 1:
                    factors.append(f"{VARS[i]}^{p}")
            mono = "*".join(factors)
            if not mono:
                body = rat_str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{rat_str(abs(c))}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"MPoly({self.to_str()})"


def _coerce(value) -> "MPoly":
    if isinstance(value, MPoly):
        return value
    if isinstance(value, int) or hasattr(value, "denominator"):
        return MPoly.const(value)
    return NotImplemented


_MP_ZERO = MPoly({}, _trusted=True)
_MP_ONE = MPoly({_ZERO_EXP: RAT_ONE}, _trusted=True)


def var(name: str) -> MPoly:
    """Shorthand for ``MPoly.var``."""
    return MPoly.var(name)


def const(value) -> MPoly:
    """Shorthand for ``MPoly.const``."""
    return MPoly.const(value)


def poly_sum(items: Iterable[MPoly]) -> MPoly:
    total = _MP_ZERO
    for item in items:
        total = total + item
    return total


def poly_prod(items: Iterable[MPoly]) -> MPoly:
    total = _MP_ONE
    for item in items:
        total = total * item
    return total
