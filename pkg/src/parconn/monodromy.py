"""Floating-point representation varieties and the two-to-one descent between them.

Two shapes of representation are modelled, both with values in SL(2, C)
realized as complex double-precision matrices:

* quintuples ``(M0, M1, Mt, Mlam, Minf)`` whose ordered product is the
  identity, with ``tr = 0`` at every member except ``Mt`` and
  ``tr Mt = 2 cos(2 pi nu)``;
* quadruples ``(A, B, C1, C2)`` obeying the relation ``A B = C1 B A C2``
  with ``tr C1 = tr C2 = 2 cos(2 pi nu)``.

``phi_top`` maps quintuples to quadruples through fixed products of the
factors.  ``psi_top`` flips the signs of the four trace-zero members of a
quintuple; the sign flips cancel pairwise inside every product used by
``phi_top``, so ``phi_top(psi_top(r))`` equals ``phi_top(r)`` exactly, bit
for bit.  ``descend`` inverts ``phi_top``: it solves the intertwining
conditions ``M^-1 A M = A^-1``, ``M^-1 B M = B^-1``, ``M^-1 C1 M = C2`` for
a single matrix ``M`` (a 12x4 homogeneous linear system in the entries of
``M``), normalizes ``det M = 1``, checks ``M^2 = -I``, and assembles the
quintuple ``(-A M, A B C2^-1 M, C1, -B M, M)``.  The two preimages of a
quadruple are ``descend(rho)`` and ``psi_top(descend(rho))``; they are
non-conjugate away from the all-diagonal (dihedral) branch locus.

Everything in this module is numerical with explicit tolerances; the
exact-arithmetic modules of this package never import it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

__all__ = [
    "RESIDUAL_TOL",
    "ROUND_TRIP_TOL",
    "NULLSPACE_TOL",
    "SQUARE_TOL",
    "CONSTRUCTION_TOL",
    "MonodromyError",
    "InvariantViolation",
    "DescentError",
    "SL2Numeric",
    "RepP1",
    "RepC",
    "target_trace",
    "commutator_defect",
    "phi_top",
    "psi_top",
    "descend_matrix",
    "descend",
    "random_sl2",
    "random_rep_c",
    "random_rep_p1",
    "trace_coords",
    "p1_trace_coords",
    "dihedral_rep_p1",
    "dihedral_rep_c",
    "trial_rng",
]

# Default tolerances.  Residual-type checks (determinants, defining
# relations, traces) use RESIDUAL_TOL; composite round trips through
# several operations use the looser ROUND_TRIP_TOL.  NULLSPACE_TOL decides
# when a singular value of the descent system counts as zero, SQUARE_TOL
# bounds the defect of M^2 = -I, and CONSTRUCTION_TOL bounds the residuals
# of the constrained random generator, which are exact up to roundoff.
RESIDUAL_TOL = 1e-10
ROUND_TRIP_TOL = 1e-9
NULLSPACE_TOL = 1e-8
SQUARE_TOL = 1e-10
CONSTRUCTION_TOL = 1e-12

# An element of the descent nullspace counts as invertible when its
# determinant (for a unit-norm entry vector) exceeds this bound.
_INVERTIBLE_TOL = 1e-6

_EYE = np.eye(2, dtype=complex)

MatrixLike = Union["SL2Numeric", np.ndarray, Sequence[Sequence[complex]]]


class MonodromyError(Exception):
    """Base class for the errors raised by this module."""


class InvariantViolation(MonodromyError):
    """A representation container fails one of its defining invariants."""


class DescentError(MonodromyError):
    """The descent system has no usable solution."""


def _as_matrix(value: MatrixLike) -> np.ndarray:
    if isinstance(value, SL2Numeric):
        return value.mat
    mat = np.array(value, dtype=complex)
    if mat.shape != (2, 2):
        raise InvariantViolation(f"expected a 2x2 matrix, got shape {mat.shape}")
    return mat


def _det(mat: np.ndarray) -> complex:
    return mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]


def _inv(mat: np.ndarray) -> np.ndarray:
    """Inverse through the adjugate; exact sign handling for 2x2 input."""
    det = _det(mat)
    if det == 0:
        raise ZeroDivisionError("matrix is singular")
    adj = np.array(
        [[mat[1, 1], -mat[0, 1]], [-mat[1, 0], mat[0, 0]]], dtype=complex
    )
    if det == 1:
        return adj
    return adj / det


def _max_abs(mat: np.ndarray) -> float:
    return float(np.max(np.abs(mat)))


def target_trace(nu) -> float:
    """The common trace ``2 cos(2 pi nu)`` imposed at the marked member."""
    return 2.0 * math.cos(2.0 * math.pi * float(nu))


def _check_nu(nu) -> float:
    value = float(nu)
    doubled = 2.0 * value
    if abs(doubled - round(doubled)) < 1e-9:
        raise InvariantViolation(
            f"2*nu = {doubled} is (numerically) an integer; "
            "the constrained generators need 2*nu outside the integers"
        )
    return value


@dataclass(frozen=True, eq=False)
class SL2Numeric:
    """A 2x2 complex matrix with unit determinant up to tolerance ``tol``."""

    entries: np.ndarray
    tol: float = RESIDUAL_TOL

    def __post_init__(self) -> None:
        mat = np.array(self.entries, dtype=complex)
        if mat.shape != (2, 2):
            raise InvariantViolation(
                f"expected a 2x2 matrix, got shape {mat.shape}"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)
        defect = abs(_det(mat) - 1.0)
        if not defect <= self.tol:
            raise InvariantViolation(
                f"determinant defect {defect:.3e} exceeds tolerance {self.tol:.3e}"
            )

    @property
    def mat(self) -> np.ndarray:
        return self.entries

    @property
    def trace(self) -> complex:
        return self.entries[0, 0] + self.entries[1, 1]

    @property
    def det(self) -> complex:
        return _det(self.entries)


def _wrap(value: MatrixLike, tol: float) -> SL2Numeric:
    if isinstance(value, SL2Numeric):
        return value
    return SL2Numeric(_as_matrix(value), tol)


@dataclass(frozen=True, eq=False)
class RepP1:
    """A quintuple ``(M0, M1, Mt, Mlam, Minf)`` of SL(2, C) matrices.

    Invariants (checked by :meth:`validate`): the ordered product
    ``M0 M1 Mt Mlam Minf`` is the identity; ``M0, M1, Mlam, Minf`` are
    trace-free; ``tr Mt = 2 cos(2 pi nu)``.
    """

    m0: SL2Numeric
    m1: SL2Numeric
    mt: SL2Numeric
    mlam: SL2Numeric
    minf: SL2Numeric
    nu: float
    tol: float = RESIDUAL_TOL

    def __post_init__(self) -> None:
        for name in ("m0", "m1", "mt", "mlam", "minf"):
            object.__setattr__(self, name, _wrap(getattr(self, name), self.tol))
        object.__setattr__(self, "nu", float(self.nu))

    def matrices(self) -> Tuple[np.ndarray, ...]:
        return (self.m0.mat, self.m1.mat, self.mt.mat, self.mlam.mat, self.minf.mat)

    def residuals(self) -> dict:
        m0, m1, mt, mlam, minf = self.matrices()
        product = m0 @ m1 @ mt @ mlam @ minf
        tau = target_trace(self.nu)
        return {
            "product": _max_abs(product - _EYE),
            "trace_m0": abs(m0[0, 0] + m0[1, 1]),
            "trace_m1": abs(m1[0, 0] + m1[1, 1]),
            "trace_mlam": abs(mlam[0, 0] + mlam[1, 1]),
            "trace_minf": abs(minf[0, 0] + minf[1, 1]),
            "trace_mt": abs(mt[0, 0] + mt[1, 1] - tau),
        }

    def validate(self, tol: float | None = None) -> "RepP1":
        bound = self.tol if tol is None else tol
        bad = {k: v for k, v in self.residuals().items() if not v <= bound}
        if bad:
            raise InvariantViolation(
                f"quintuple invariants violated beyond {bound:.3e}: {bad}"
            )
        return self


@dataclass(frozen=True, eq=False)
class RepC:
    """A quadruple ``(A, B, C1, C2)`` of SL(2, C) matrices.

    Invariants (checked by :meth:`validate`): the relation
    ``A B = C1 B A C2`` and ``tr C1 = tr C2 = 2 cos(2 pi nu)``.
    """

    a: SL2Numeric
    b: SL2Numeric
    c1: SL2Numeric
    c2: SL2Numeric
    nu: float
    tol: float = RESIDUAL_TOL

    def __post_init__(self) -> None:
        for name in ("a", "b", "c1", "c2"):
            object.__setattr__(self, name, _wrap(getattr(self, name), self.tol))
        object.__setattr__(self, "nu", float(self.nu))

    def matrices(self) -> Tuple[np.ndarray, ...]:
        return (self.a.mat, self.b.mat, self.c1.mat, self.c2.mat)

    def residuals(self) -> dict:
        a, b, c1, c2 = self.matrices()
        tau = target_trace(self.nu)
        return {
            "relation": _max_abs(a @ b - c1 @ b @ a @ c2),
            "trace_c1": abs(c1[0, 0] + c1[1, 1] - tau),
            "trace_c2": abs(c2[0, 0] + c2[1, 1] - tau),
        }

    def validate(self, tol: float | None = None) -> "RepC":
        bound = self.tol if tol is None else tol
        bad = {k: v for k, v in self.residuals().items() if not v <= bound}
        if bad:
            raise InvariantViolation(
                f"quadruple invariants violated beyond {bound:.3e}: {bad}"
            )
        return self


def commutator_defect(rho: RepC) -> float:
    """``|tr(A B A^-1 B^-1) - 2|``; zero exactly when A and B share an eigenvector."""
    a, b = rho.a.mat, rho.b.mat
    comm = a @ b @ _inv(a) @ _inv(b)
    return abs(comm[0, 0] + comm[1, 1] - 2.0)


def phi_top(r: RepP1, tol: float | None = None) -> RepC:
    """Map a quintuple to the quadruple of its distinguished products.

    ``(A, B, C1, C2) = (M1 Mt Mlam, Mlam Minf, Mt, Minf Mt Minf^-1)``.
    The input invariants are validated first and a violation raises
    :class:`InvariantViolation`.
    """
    r.validate(tol)
    m0, m1, mt, mlam, minf = r.matrices()
    a = m1 @ mt @ mlam
    b = mlam @ minf
    c1 = mt
    c2 = minf @ mt @ _inv(minf)
    return RepC(a, b, c1, c2, nu=r.nu, tol=r.tol)


def psi_top(r: RepP1) -> RepP1:
    """Flip the signs of the four trace-free members of a quintuple.

    This is an involution, it preserves every quintuple invariant (the
    product sees an even number of sign flips), and it leaves ``phi_top``
    unchanged bit for bit because each product used there contains exactly
    two flipped factors.
    """
    m0, m1, mt, mlam, minf = r.matrices()
    return RepP1(-m0, -m1, mt, -mlam, -minf, nu=r.nu, tol=r.tol)


def _descent_system(rho: RepC) -> np.ndarray:
    """Stack ``A M = M A^-1``, ``B M = M B^-1``, ``C1 M = M C2`` row-wise.

    Each condition ``X M - M Y = 0`` is linear in the four entries of ``M``
    (row-major vectorization): ``(kron(X, I) - kron(I, Y^T)) vec(M) = 0``.
    """
    a, b, c1, c2 = rho.matrices()
    blocks = []
    for x, y in ((a, _inv(a)), (b, _inv(b)), (c1, c2)):
        blocks.append(np.kron(x, _EYE) - np.kron(_EYE, y.T))
    return np.vstack(blocks)


def _normalize_sign(mat: np.ndarray) -> np.ndarray:
    """Resolve the sign ambiguity of a det-1 solution.

    The solution of the descent system is unique up to sign.  The sign is
    fixed so that the largest-magnitude entry has positive real part
    (positive imaginary part when its real part vanishes).
    """
    flat = mat.reshape(-1)
    lead = flat[int(np.argmax(np.abs(flat)))]
    if lead.real < 0 or (lead.real == 0 and lead.imag < 0):
        return -mat
    return mat


def descend_matrix(
    rho: RepC,
    nullspace_tol: float = NULLSPACE_TOL,
    square_tol: float = SQUARE_TOL,
) -> np.ndarray:
    """Solve the three intertwining conditions for the matrix ``M``.

    The conditions ``M^-1 A M = A^-1``, ``M^-1 B M = B^-1`` and
    ``M^-1 C1 M = C2`` form a homogeneous 12x4 linear system in the entries
    of ``M``; its nullspace is computed by singular value decomposition.
    A singular value below ``nullspace_tol`` (relative to the largest, with
    a floor of 1) counts as zero.

    * Nullspace dimension 1 (the generic, irreducible case): the solution
      is unique up to scale.
    * Nullspace dimension 2 or more happens exactly when A and B share an
      eigenvector (checked through :func:`commutator_defect`).  On the
      all-diagonal branch locus every invertible nullspace element yields
      conjugate descents, so one with a well-conditioned determinant is
      selected; when the nullspace contains no invertible element the
      representation is reducible without a descent and
      :class:`DescentError` is raised.

    The selected solution is scaled to ``det M = 1``, its sign is fixed by
    :func:`_normalize_sign`, and ``M^2 = -I`` is verified within
    ``square_tol``; a violation raises :class:`DescentError`.
    """
    rho.validate()
    system = _descent_system(rho)
    _, sing, vh = np.linalg.svd(system)
    # system = U S V^H, so the right singular vectors are the conjugated
    # rows of vh; the last one spans the nullspace when sing[-1] vanishes.
    right = vh.conj()
    scale = max(1.0, float(sing[0]))
    null_dim = int(np.sum(sing < nullspace_tol * scale))

    if null_dim == 0:
        raise DescentError(
            "no descent: the conjugacy system has no nullspace "
            f"(smallest singular value {sing[-1]:.3e})"
        )
    if null_dim == 1:
        candidate = right[-1].reshape(2, 2)
        if abs(_det(candidate)) < _INVERTIBLE_TOL:
            raise DescentError(
                "no descent: reducible (the intertwiner is singular, "
                f"|det| = {abs(_det(candidate)):.3e})"
            )
    else:
        # Branch-locus salvage: every vector of the nullspace solves the
        # conditions, so search a small deterministic set of unit
        # combinations for one with an invertible reshaping.
        basis = [right[-(i + 1)] for i in range(null_dim)]
        candidates = list(basis)
        inv_sqrt2 = 1.0 / math.sqrt(2.0)
        for i in range(len(basis)):
            for j in range(i + 1, len(basis)):
                for phase in (1.0, -1.0, 1.0j, -1.0j):
                    candidates.append((basis[i] + phase * basis[j]) * inv_sqrt2)
        best = max(candidates, key=lambda v: abs(_det(v.reshape(2, 2))))
        candidate = best.reshape(2, 2)
        if abs(_det(candidate)) < _INVERTIBLE_TOL:
            raise DescentError(
                "no descent: reducible (nullspace dimension "
                f"{null_dim} with no invertible element)"
            )

    det = _det(candidate)
    m = _normalize_sign(candidate / cmath.sqrt(det))
    square_defect = _max_abs(m @ m + _EYE)
    if not square_defect <= square_tol:
        raise DescentError(
            f"descent failed numerically: M^2 + I has defect {square_defect:.3e}"
        )
    return m


def descend(
    rho: RepC,
    nullspace_tol: float = NULLSPACE_TOL,
    square_tol: float = SQUARE_TOL,
) -> RepP1:
    """Reconstruct a quintuple from a quadruple.

    With ``M`` from :func:`descend_matrix`, the quintuple is
    ``(M0, M1, Mt, Mlam, Minf) = (-A M, A B C2^-1 M, C1, -B M, M)``.
    ``psi_top(descend(rho))`` is the other preimage (it corresponds to the
    opposite sign of ``M``).
    """
    m = descend_matrix(rho, nullspace_tol=nullspace_tol, square_tol=square_tol)
    a, b, c1, c2 = rho.matrices()
    result = RepP1(
        -(a @ m),
        a @ b @ _inv(c2) @ m,
        c1,
        -(b @ m),
        m,
        nu=rho.nu,
        tol=rho.tol,
    )
    return result.validate(ROUND_TRIP_TOL)


def trial_rng(master_seed: int, trial_index: int | None = None) -> np.random.Generator:
    """Deterministic random generator for (master seed, trial index) pairs."""
    if trial_index is None:
        return np.random.default_rng(int(master_seed))
    return np.random.default_rng((int(master_seed), int(trial_index)))


def random_sl2(rng: np.random.Generator) -> np.ndarray:
    """A random SL(2, C) matrix with entries of moderate size."""
    while True:
        mat = rng.normal(size=(2, 2)) + 1.0j * rng.normal(size=(2, 2))
        det = _det(mat)
        if abs(det) > 0.1:
            return mat / cmath.sqrt(det)


def random_rep_c(seed, nu, max_attempts: int = 100) -> RepC:
    """A random quadruple satisfying all its invariants by construction.

    Draw ``A, B`` at random in SL(2, C) and set ``K = A B (B A)^-1``.  The
    matrix ``C1 = [[x1, x2], [x3, x4]]`` must satisfy the two linear trace
    conditions ``tr C1 = tau`` and ``tr(C1^-1 K) = tau`` (``tau = 2 cos(2
    pi nu)``; the second is linear because ``C1^-1`` is the adjugate once
    ``det C1 = 1``) together with the quadric ``det C1 = 1``.  Here ``x1``
    is drawn at random, ``x4 = tau - x1``, and eliminating ``x2`` through
    the second trace condition turns ``det C1 = 1`` into a quadratic
    equation for ``x3``, solved in closed form.  Finally
    ``C2 = (B A)^-1 C1^-1 A B``, which makes the defining relation an
    algebraic identity and gives ``tr C2 = tr(C1^-1 K)`` by cyclicity.

    Degenerate draws (rank-deficient trace system, near-parabolic ``K``,
    ill-conditioned solutions, or a reducible pair) trigger a redraw;
    ``DescentError`` is raised when ``max_attempts`` redraws all fail.
    ``2 nu`` must not be an integer.
    """
    _check_nu(nu)
    tau = target_trace(nu)
    rng = trial_rng(seed) if isinstance(seed, (int, np.integer)) else np.random.default_rng(seed)

    for _ in range(max_attempts):
        a = random_sl2(rng)
        b = random_sl2(rng)
        comm = a @ b @ _inv(a) @ _inv(b)
        if abs(comm[0, 0] + comm[1, 1] - 2.0) < 1e-6:
            continue
        ba = b @ a
        k = a @ b @ _inv(ba)
        if abs(k[1, 0]) < 1e-8:
            continue

        x1 = rng.normal() + 1.0j * rng.normal()
        x4 = tau - x1
        # With x3 = r and det C1 = 1, the second trace condition reads
        # x4*K00 - x2*K10 - r*K01 + x1*K11 = tau, i.e. x2 = (c - r*K01)/K10.
        c = x4 * k[0, 0] + x1 * k[1, 1] - tau
        # det C1 = x1*x4 - x2*x3 = 1 becomes a quadratic in r:
        #   K01*r^2 - c*r + (x1*x4 - 1)*K10 = 0.
        lead = k[0, 1]
        const = (x1 * x4 - 1.0) * k[1, 0]
        if abs(lead) > 1e-10:
            disc = c * c - 4.0 * lead * const
            r = (c + cmath.sqrt(disc)) / (2.0 * lead)
        elif abs(c) > 1e-10:
            r = const / c
        else:
            continue
        if abs(r) > 1e4:
            continue
        x3 = r
        x2 = (c - r * k[0, 1]) / k[1, 0]
        c1 = np.array([[x1, x2], [x3, x4]], dtype=complex)
        det_c1 = _det(c1)
        if abs(det_c1 - 1.0) > 1e-8:
            continue
        c1 = c1 / cmath.sqrt(det_c1)
        c2 = _inv(ba) @ _inv(c1) @ a @ b
        if max(_max_abs(c1), _max_abs(c2)) > 1e3:
            continue

        candidate = RepC(a, b, c1, c2, nu=nu, tol=CONSTRUCTION_TOL)
        if max(candidate.residuals().values()) <= CONSTRUCTION_TOL:
            return candidate

    raise DescentError(
        f"random quadruple generation failed after {max_attempts} attempts"
    )


def random_rep_p1(seed, nu, max_attempts: int = 100) -> RepP1:
    """``descend(random_rep_c(seed, nu))``; all quintuple invariants hold."""
    return descend(random_rep_c(seed, nu, max_attempts=max_attempts))


_TRACE_WORDS = ("A", "B", "C1", "C2", "AB", "AC1", "BC1", "ABC1", "[A,B]")


def trace_coords(rho: RepC) -> np.ndarray:
    """Conjugation-invariant fingerprint of a quadruple.

    Traces of the fixed word list ``A, B, C1, C2, AB, AC1, BC1, ABC1,
    [A,B]`` (the commutator ``A B A^-1 B^-1``), in this order.  The last
    coordinate equals 2 exactly on the reducible locus.
    """
    a, b, c1, c2 = rho.matrices()
    comm = a @ b @ _inv(a) @ _inv(b)
    words = (a, b, c1, c2, a @ b, a @ c1, b @ c1, a @ b @ c1, comm)
    return np.array([w[0, 0] + w[1, 1] for w in words], dtype=complex)


def p1_trace_coords(r: RepP1) -> np.ndarray:
    """Conjugation-invariant fingerprint of a quintuple.

    Traces of the ten ordered pairwise products ``M_i M_j`` (indices in the
    order 0, 1, t, lam, inf, with i < j) followed by the triple product
    ``M0 M1 Mt``.  Individual traces carry no information here (they are
    pinned by the invariants), but pairwise traces separate the two
    preimages of a quadruple away from the branch locus.
    """
    mats = r.matrices()
    values = []
    for i in range(5):
        for j in range(i + 1, 5):
            prod = mats[i] @ mats[j]
            values.append(prod[0, 0] + prod[1, 1])
    triple = mats[0] @ mats[1] @ mats[2]
    values.append(triple[0, 0] + triple[1, 1])
    return np.array(values, dtype=complex)


def dihedral_rep_p1(a0: complex, a_lam: complex, nu, tol: float = RESIDUAL_TOL) -> RepP1:
    """The anti-diagonal quintuple with parameters ``(a0, a_lam)``.

    ``M_i = [[0, a_i], [-1/a_i, 0]]`` for the trace-free members with
    ``a_inf = 1`` and ``a_1 = a0 a_t a_lam``, and ``Mt = diag(a_t, 1/a_t)``
    with ``a_t = exp(2 pi i nu)``.  The product identity holds by the
    choice of ``a_1``.  Its image under :func:`phi_top` is the diagonal
    quadruple of :func:`dihedral_rep_c`.
    """
    a0 = complex(a0)
    a_lam = complex(a_lam)
    if a0 == 0 or a_lam == 0:
        raise InvariantViolation("dihedral parameters must be nonzero")
    a_t = cmath.exp(2.0j * math.pi * float(nu))
    a_one = a0 * a_t * a_lam

    def anti(value: complex) -> np.ndarray:
        return np.array([[0.0, value], [-1.0 / value, 0.0]], dtype=complex)

    mt = np.array([[a_t, 0.0], [0.0, 1.0 / a_t]], dtype=complex)
    return RepP1(anti(a0), anti(a_one), mt, anti(a_lam), anti(1.0), nu=nu, tol=tol)


def dihedral_rep_c(a0: complex, a_lam: complex, nu, tol: float = RESIDUAL_TOL) -> RepC:
    """The diagonal quadruple matching ``phi_top(dihedral_rep_p1(...))``.

    ``A = diag(-a0, -1/a0)``, ``B = diag(-a_lam, -1/a_lam)``,
    ``C1 = diag(a_t, 1/a_t)`` and ``C2 = diag(1/a_t, a_t)`` with
    ``a_t = exp(2 pi i nu)``.
    """
    a0 = complex(a0)
    a_lam = complex(a_lam)
    if a0 == 0 or a_lam == 0:
        raise InvariantViolation("dihedral parameters must be nonzero")
    a_t = cmath.exp(2.0j * math.pi * float(nu))

    def diag(p: complex, q: complex) -> np.ndarray:
        return np.array([[p, 0.0], [0.0, q]], dtype=complex)

    return RepC(
        diag(-a0, -1.0 / a0),
        diag(-a_lam, -1.0 / a_lam),
        diag(a_t, 1.0 / a_t),
        diag(1.0 / a_t, a_t),
        nu=nu,
        tol=tol,
    )
