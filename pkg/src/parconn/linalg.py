"""Small exact linear algebra and elimination tools.

Two matrix flavors are used:

* ``MatrixRF`` — dense matrices with rational-function entries, for the 2x2
  connection matrices and the 3x3 coefficient-change matrices.  Inverses go
  through the adjugate, so everything stays exact.
* plain ``list[list[MPoly]]`` rows — for fraction-free elimination.  The
  Bareiss algorithm keeps every intermediate entry polynomial (all divisions
  are exact), which is how resultants of multivariate polynomials are
  computed here: as Bareiss determinants of Sylvester matrices.

Pseudo-division and subresultant remainder sequences complete the toolkit
needed for eliminating a variable from a polynomial system and carrying a
root of the eliminant back to the companion coordinate.
"""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

from .poly import ExactDivisionError, MPoly, const as poly_const
from .rat import Rat, as_rat
from .ratfunc import RatFunc, as_ratfunc

Row = List[RatFunc]


class MatrixRF:
    """Dense matrix over the rational-function field."""

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence]):
        self.rows = [[as_ratfunc(v) for v in row] for row in rows]
        width = {len(r) for r in self.rows}
        if len(width) > 1:
            raise ValueError("ragged matrix")

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @staticmethod
    def identity(n: int) -> "MatrixRF":
        return MatrixRF([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def zeros(nrows: int, ncols: int) -> "MatrixRF":
        return MatrixRF([[0] * ncols for _ in range(nrows)])

    # ------------------------------------------------------------------
    # Shape and access
    # ------------------------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, key: Tuple[int, int]) -> RatFunc:
        i, j = key
        return self.rows[i][j]

    def entries(self):
        for row in self.rows:
            for v in row:
                yield v

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    def __add__(self, other: "MatrixRF") -> "MatrixRF":
        return MatrixRF([[a + b for a, b in zip(ra, rb)]
                         for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other: "MatrixRF") -> "MatrixRF":
        return MatrixRF([[a - b for a, b in zip(ra, rb)]
                         for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self) -> "MatrixRF":
        return MatrixRF([[-a for a in row] for row in self.rows])

    def __mul__(self, other):
        if isinstance(other, MatrixRF):
            if self.ncols != other.nrows:
                raise ValueError("shape mismatch in matrix product")
            cols = list(zip(*other.rows))
            return MatrixRF([[_dot(row, col) for col in cols] for row in self.rows])
        scale = as_ratfunc(other)
        if scale is NotImplemented:
            return NotImplemented
        return MatrixRF([[a * scale for a in row] for row in self.rows])

    def __rmul__(self, other):
        scale = as_ratfunc(other)
        if scale is NotImplemented:
            return NotImplemented
        return MatrixRF([[scale * a for a in row] for row in self.rows])

    def apply(self, vector: Sequence) -> List[RatFunc]:
        vec = [as_ratfunc(v) for v in vector]
        if self.ncols != len(vec):
            raise ValueError("shape mismatch in matrix-vector product")
        return [_dot(row, vec) for row in self.rows]

    def transpose(self) -> "MatrixRF":
        return MatrixRF([list(col) for col in zip(*self.rows)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixRF):
            return NotImplemented
        if self.nrows != other.nrows or self.ncols != other.ncols:
            return False
        return all(a == b for a, b in zip(self.entries(), other.entries()))

    __hash__ = None

    # ------------------------------------------------------------------
    # Determinant, adjugate, inverse (sizes 1..3 suffice here)
    # ------------------------------------------------------------------

    def trace(self) -> RatFunc:
        return sum((self.rows[i][i] for i in range(self.nrows)), RatFunc.zero())

    def det(self) -> RatFunc:
        n = self.nrows
        if n != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        r = self.rows
        if n == 1:
            return r[0][0]
        if n == 2:
            return r[0][0] * r[1][1] - r[0][1] * r[1][0]
        if n == 3:
            return (r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
                    - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
                    + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]))
        raise ValueError("determinant implemented for sizes 1..3 only")

    def adjugate(self) -> "MatrixRF":
        n = self.nrows
        if n != self.ncols:
            raise ValueError("adjugate of a non-square matrix")
        r = self.rows
        if n == 1:
            return MatrixRF([[1]])
        if n == 2:
            return MatrixRF([[r[1][1], -r[0][1]], [-r[1][0], r[0][0]]])
        if n == 3:
            def minor(i, j):
                sub = [[r[a][b] for b in range(3) if b != j]
                       for a in range(3) if a != i]
                return sub[0][0] * sub[1][1] - sub[0][1] * sub[1][0]
            sign = [[1, -1, 1], [-1, 1, -1], [1, -1, 1]]
            # adj = transpose of the cofactor matrix
            return MatrixRF([[sign[j][i] * minor(j, i) for j in range(3)]
                             for i in range(3)])
        raise ValueError("adjugate implemented for sizes 1..3 only")

    def inverse(self) -> "MatrixRF":
        d = self.det()
        if d.is_zero():
            raise ZeroDivisionError("matrix is singular")
        inv_d = RatFunc.one() / d
        return self.adjugate() * inv_d

    # ------------------------------------------------------------------
    # Entrywise operations
    # ------------------------------------------------------------------

    def map(self, fn) -> "MatrixRF":
        return MatrixRF([[fn(v) for v in row] for row in self.rows])

    def subst(self, mapping: Dict[str, object]) -> "MatrixRF":
        return self.map(lambda v: v.subst(mapping))

    def eval_rat(self, assignment: Dict[str, object]) -> List[List["Rat"]]:
        return [[v.eval_rat(assignment) for v in row] for row in self.rows]

    def __repr__(self) -> str:
        body = ",\n ".join("[" + ", ".join(v.to_str() for v in row) + "]"
                           for row in self.rows)
        return f"MatrixRF(\n {body})"


def _dot(row: Sequence[RatFunc], col: Sequence[RatFunc]) -> RatFunc:
    total = RatFunc.zero()
    for a, b in zip(row, col):
        total = total + a * b
    return total


# ----------------------------------------------------------------------
# Fraction-free elimination over polynomial entries
# ----------------------------------------------------------------------

def bareiss_det(rows: Sequence[Sequence[MPoly]]) -> MPoly:
    """Determinant of a square polynomial matrix by the Bareiss algorithm.

    Fraction-free: every division is exact by construction, so intermediate
    entries stay polynomial and no rational-function arithmetic is needed.
    Row swaps (for zero pivots) only flip the sign.
    """
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("Bareiss determinant needs a square matrix")
    if n == 0:
        return poly_const(1)
    m = [list(r) for r in rows]
    sign = 1
    prev = poly_const(1)
    for k in range(n - 1):
        if m[k][k].is_zero():
            pivot_row = next((i for i in range(k + 1, n) if not m[i][k].is_zero()),
                             None)
            if pivot_row is None:
                return MPoly.zero()
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * pivot - m[i][k] * m[k][j]
                m[i][j] = num.exact_div(prev)
            m[i][k] = MPoly.zero()
        prev = pivot
    result = m[n - 1][n - 1]
    return result if sign > 0 else -result


def sylvester_matrix(p: MPoly, q: MPoly, var: str) -> List[List[MPoly]]:
    """Sylvester matrix of p and q with respect to one variable."""
    dp = p.degree_in(var)
    dq = q.degree_in(var)
    if p.is_zero() or q.is_zero():
        raise ValueError("Sylvester matrix of a zero polynomial")
    pc = p.coeffs_in(var)
    qc = q.coeffs_in(var)
    n = dp + dq
    zero = MPoly.zero()
    rows = []
    for shift in range(dq):
        row = [zero] * n
        for d, c in pc.items():
            row[shift + dp - d] = c
        rows.append(row)
    for shift in range(dp):
        row = [zero] * n
        for d, c in qc.items():
            row[shift + dq - d] = c
        rows.append(row)
    return rows


def resultant(p: MPoly, q: MPoly, var: str) -> MPoly:
    """Resultant of p and q in one variable, as a Bareiss determinant."""
    dp = p.degree_in(var)
    dq = q.degree_in(var)
    if p.is_zero() or q.is_zero():
        return MPoly.zero()
    if dp == 0 and dq == 0:
        return poly_const(1)
    if dp == 0:
        return p ** dq
    if dq == 0:
        return q ** dp
    return bareiss_det(sylvester_matrix(p, q, var))


# ----------------------------------------------------------------------
# Pseudo-division and remainder sequences
# ----------------------------------------------------------------------

def prem(p: MPoly, q: MPoly, var: str) -> Tuple[MPoly, int]:
    """Pseudo-remainder of p by q in one variable.

    Returns ``(r, e)`` with ``lc(q)^e * p = s*q + r``, ``deg_var(r) < deg_var(q)``
    and ``e = max(deg_var(p) - deg_var(q) + 1, 0)``.  The multiplier is applied
    in full so the identity holds with exactly that exponent.
    """
    if q.is_zero():
        raise ZeroDivisionError("pseudo-division by zero")
    dp = p.degree_in(var)
    dq = q.degree_in(var)
    e = max(dp - dq + 1, 0)
    if p.is_zero() or dp < dq:
        return p, e
    lc_q = q.coeffs_in(var)[dq]
    if dq == 0:
        # q is free of var: lc(q)^e * p = (lc(q)^(e-1) * p) * q + 0
        return MPoly.zero(), e
    r = p
    steps = 0
    xvar = MPoly.var(var)
    while not r.is_zero():
        dr = r.degree_in(var)
        if dr < dq:
            break
        lr = r.coeffs_in(var)[dr]
        r = lc_q * r - lr * (xvar ** (dr - dq)) * q
        steps += 1
    if steps < e:
        r = (lc_q ** (e - steps)) * r
    return r, e


def subresultant_prs(p: MPoly, q: MPoly, var: str) -> List[MPoly]:
    """Subresultant pseudo-remainder sequence of p and q in one variable.

    Returns ``[p, q, r2, ..., rk]`` ending at the last nonzero remainder.
    All interior divisions are exact (they raise if the recurrence is ever
    violated, making the routine self-checking).
    """
    if p.degree_in(var) < q.degree_in(var):
        p, q = q, p
    seq = [p, q]
    if q.is_zero():
        return seq[:1] if p.is_zero() else seq
    f, g = p, q
    delta = f.degree_in(var) - g.degree_in(var)
    beta = poly_const((-1) ** (delta + 1))
    psi = poly_const(-1)
    while True:
        r, _ = prem(f, g, var)
        if r.is_zero():
            break
        r = r.exact_div(beta)
        seq.append(r)
        lc_g = g.coeffs_in(var)[g.degree_in(var)]
        if delta > 0:
            psi = ((-lc_g) ** delta).exact_div(psi ** (delta - 1))
        elif delta == 0:
            # psi unchanged when the degree drop is zero
            pass
        f, g = g, r
        delta = f.degree_in(var) - g.degree_in(var)
        beta = (-lc_g) * (psi ** delta)
    return seq


def primitive_prs(p: MPoly, q: MPoly, var: str) -> List[MPoly]:
    """Primitive pseudo-remainder sequence (each remainder made primitive)."""
    if p.degree_in(var) < q.degree_in(var):
        p, q = q, p
    seq = [p, q]
    f, g = p, q
    while True:
        r, _ = prem(f, g, var)
        if r.is_zero():
            break
        r = r.primitive_part()
        seq.append(r)
        f, g = g, r
    return seq


def upoly_gcd(p: MPoly, q: MPoly, var: str) -> MPoly:
    """Primitive gcd of two univariate polynomials over the rationals.

    Both inputs must involve no variable other than ``var``.  Returns the
    primitive (integer, positive leading coefficient) generator, 1 for
    coprime inputs.
    """
    for poly in (p, q):
        extra = [v for v in poly.variables() if v != var]
        if extra:
            raise ValueError(f"upoly_gcd: unexpected variables {extra}")
    if p.is_zero():
        return q.primitive_part()
    if q.is_zero():
        return p.primitive_part()
    seq = primitive_prs(p.primitive_part(), q.primitive_part(), var)
    last = seq[-1]
    if last.degree_in(var) == 0:
        return poly_const(1)
    return last.primitive_part()


def upoly_squarefree(p: MPoly, var: str) -> MPoly:
    """Squarefree part of a univariate polynomial (primitive normalization).

    The result has the same roots as ``p``, each with multiplicity one, so
    its degree counts distinct roots over the complex numbers.
    """
    if p.is_zero():
        raise ValueError("squarefree part of the zero polynomial")
    prim = p.primitive_part()
    if prim.degree_in(var) == 0:
        return poly_const(1)
    g = upoly_gcd(prim, prim.derivative(var), var)
    if g.degree_in(var) == 0:
        return prim
    return prim.exact_div(g).primitive_part()


def upoly_strip_factor(p: MPoly, exclude: MPoly, var: str) -> MPoly:
    """Remove from squarefree ``p`` every root shared with ``exclude``.

    Divides out ``gcd(p, exclude)`` repeatedly until the two are coprime.
    """
    if exclude.is_zero():
        raise ValueError("cannot strip roots of the zero polynomial")
    out = p
    while True:
        g = upoly_gcd(out, exclude, var)
        if g.degree_in(var) == 0:
            return out
        out = out.exact_div(g).primitive_part()
