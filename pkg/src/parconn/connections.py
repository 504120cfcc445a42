"""Rank-2 trace-free logarithmic connections on the line, with parabolic
structures, spectral data, Higgs fields, twists, and elementary
transformations.

A system is stored through its residue matrices at the finite poles; the
residue at infinity, when infinity is a pole and no explicit matrix has been
provided, is the negated sum of the finite residues, which makes the Fuchs
relation structural for degree-0 systems.

Projective directions on a fiber use the (zeta, 1) convention: the value
``zeta`` stands for the column vector (zeta, 1), and the infinite value for
(1, 0).  This is the unique convention under which the explicit residue
matrices of the universal family act on their parabolic directions by the
expected eigenvalues; the invariant suite asserts exactly that.

Elementary transformations are realized as honest meromorphic gauge
transformations, so the spectral bookkeeping can be re-verified from the
gauged residues instead of being trusted.  In the frame where the parabolic
direction is (0,1), the adapted frame change is diag(x - p, 1) acting by
``g^{-1} A g + g^{-1} g'``; compatibility (the direction is a residue
eigenvector) is what keeps the transformed poles simple.  After a
transformation the frame is meromorphic at infinity, so the transformed
system no longer carries an infinity residue; the degree shift is returned
alongside.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Tuple

from .linalg import MatrixRF, prem
from .poly import MPoly
from .rat import Rat, as_rat, rat_den, rat_num
from .ratfunc import RatFunc, as_ratfunc


class PoleError(ValueError):
    """Raised when an operation names a point that is not a pole."""


class EigendataError(ArithmeticError):
    """Raised when eigenvalues are not expressible in the coefficient field."""


class NonGenericError(ValueError):
    """Raised when an input violates a genericity precondition."""


INFINITY_KEY = "infty"


# ----------------------------------------------------------------------
# Projective directions
# ----------------------------------------------------------------------

class Direction:
    """A point of the projective fiber: zeta <-> (zeta, 1), infinite <-> (1, 0)."""

    __slots__ = ("zeta",)

    def __init__(self, zeta: Optional[object]):
        self.zeta = None if zeta is None else as_ratfunc(zeta)

    @property
    def is_infinite(self) -> bool:
        return self.zeta is None

    @staticmethod
    def infinite() -> "Direction":
        return Direction(None)

    @staticmethod
    def from_vector(v1, v2) -> "Direction":
        v1 = as_ratfunc(v1)
        v2 = as_ratfunc(v2)
        if v2.is_zero():
            if v1.is_zero():
                raise ValueError("zero vector has no direction")
            return Direction(None)
        return Direction(v1 / v2)

    def vector(self) -> Tuple[RatFunc, RatFunc]:
        if self.is_infinite:
            return RatFunc.one(), RatFunc.zero()
        return self.zeta, RatFunc.one()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Direction):
            return NotImplemented
        if self.is_infinite or other.is_infinite:
            return self.is_infinite and other.is_infinite
        return self.zeta == other.zeta

    __hash__ = None

    def subst(self, mapping) -> "Direction":
        if self.is_infinite:
            return self
        return Direction(self.zeta.subst(mapping))

    def __repr__(self) -> str:
        return "Direction(inf)" if self.is_infinite else f"Direction({self.zeta.to_str()})"


@dataclass
class ParabolicData:
    """One direction per pole key."""

    directions: Dict[str, Direction]

    def at(self, pole: str) -> Direction:
        if pole not in self.directions:
            raise PoleError(f"no parabolic direction at pole {pole!r}")
        return self.directions[pole]

    def subst(self, mapping) -> "ParabolicData":
        return ParabolicData(
            {k: d.subst(mapping) for k, d in self.directions.items()})


@dataclass
class SpectralData:
    """Ordered eigenvalue pair (nu_plus, nu_minus) per pole key."""

    pairs: Dict[str, Tuple[RatFunc, RatFunc]]

    def at(self, pole: str) -> Tuple[RatFunc, RatFunc]:
        if pole not in self.pairs:
            raise PoleError(f"no spectral data at pole {pole!r}")
        return self.pairs[pole]


# ----------------------------------------------------------------------
# Fuchsian systems
# ----------------------------------------------------------------------

AUTO_INFINITY = "auto"


@dataclass
class FuchsianSystem:
    """d + sum A_p dx/(x - p) with 2x2 residues over the rational-function field.

    ``infinity`` is one of: AUTO_INFINITY (infinity is a pole, residue is the
    negated finite sum), an explicit MatrixRF (pinned residue), or None
    (infinity is not a pole / not representable in this frame).
    ``trace_free`` records whether the sl2 normalization is in force; twists
    suspend it.
    """

    residues: Dict[str, MatrixRF]
    locations: Dict[str, RatFunc]
    infinity: object = AUTO_INFINITY
    trace_free: bool = True

    def __post_init__(self):
        if set(self.residues) != set(self.locations):
            raise ValueError("residues and locations must share pole keys")
        for key, mat in self.residues.items():
            if mat.nrows != 2 or mat.ncols != 2:
                raise ValueError(f"residue at {key!r} is not 2x2")
        self.locations = {k: as_ratfunc(v) for k, v in self.locations.items()}
        if self.trace_free:
            for key, mat in self.residues.items():
                if not mat.trace().is_zero():
                    raise ValueError(f"residue at {key!r} has nonzero trace")

    # ------------------------------------------------------------------

    @property
    def finite_poles(self) -> Tuple[str, ...]:
        return tuple(self.residues)

    @property
    def poles(self) -> Tuple[str, ...]:
        if self.infinity is None:
            return self.finite_poles
        return self.finite_poles + (INFINITY_KEY,)

    def residue_at(self, pole: str) -> MatrixRF:
        if pole == INFINITY_KEY:
            if self.infinity is None:
                raise PoleError("infinity is not a pole of this system")
            if self.infinity is AUTO_INFINITY:
                total = MatrixRF.zeros(2, 2)
                for mat in self.residues.values():
                    total = total + mat
                return -total
            return self.infinity
        if pole not in self.residues:
            raise PoleError(f"{pole!r} is not a pole of this system")
        return self.residues[pole]

    def total_matrix(self) -> MatrixRF:
        """A(x) = sum A_p/(x - p) over the finite poles."""
        x = RatFunc.from_var("x")
        total = MatrixRF.zeros(2, 2)
        for key, mat in self.residues.items():
            total = total + mat * (RatFunc.one() / (x - self.locations[key]))
        return total

    def add(self, other: "FuchsianSystem",
            scale1=1, scale2=1) -> "FuchsianSystem":
        """Residue-wise linear combination; pole sets are merged."""
        s1 = as_ratfunc(scale1)
        s2 = as_ratfunc(scale2)
        keys = list(dict.fromkeys(list(self.residues) + list(other.residues)))
        zero = MatrixRF.zeros(2, 2)
        residues = {}
        locations = {}
        for key in keys:
            a = self.residues.get(key, zero)
            b = other.residues.get(key, zero)
            residues[key] = a * s1 + b * s2
            loc_a = self.locations.get(key)
            loc_b = other.locations.get(key)
            if loc_a is not None and loc_b is not None and not (loc_a == loc_b):
                raise ValueError(f"pole {key!r} sits at different locations")
            locations[key] = loc_a if loc_a is not None else loc_b
        if self.infinity is AUTO_INFINITY and other.infinity is AUTO_INFINITY:
            infinity = AUTO_INFINITY
        elif self.infinity is None and other.infinity is None:
            infinity = None
        else:
            infinity = self.residue_at(INFINITY_KEY) * s1 + \
                other.residue_at(INFINITY_KEY) * s2
        trace_free = self.trace_free and other.trace_free
        return FuchsianSystem(residues, locations, infinity, trace_free)

    def subst(self, mapping) -> "FuchsianSystem":
        residues = {k: m.subst(mapping) for k, m in self.residues.items()}
        locations = {k: v.subst(mapping) for k, v in self.locations.items()}
        infinity = self.infinity
        if isinstance(infinity, MatrixRF):
            infinity = infinity.subst(mapping)
        return FuchsianSystem(residues, locations, infinity, self.trace_free)

    def serialize(self) -> str:
        """Canonical text form, stable across runs, for golden files."""
        lines = []
        for key in sorted(self.residues):
            mat = self.residues[key]
            lines.append(f"pole {key} at {self.locations[key].to_str()}:")
            for row in mat.rows:
                lines.append("  [" + ", ".join(v.to_str() for v in row) + "]")
        if self.infinity is AUTO_INFINITY:
            lines.append("pole infty: negated finite sum")
        elif isinstance(self.infinity, MatrixRF):
            lines.append("pole infty:")
            for row in self.infinity.rows:
                lines.append("  [" + ", ".join(v.to_str() for v in row) + "]")
        return "\n".join(lines) + "\n"


class HiggsField(FuchsianSystem):
    """Same residue-table shape as FuchsianSystem, interpreted linearly.

    The defining constraints (nilpotent residues, null spaces along the
    parabolic directions) are verified by ``check_higgs``.
    """

    def check_higgs(self, parab: ParabolicData) -> bool:
        zero = MatrixRF.zeros(2, 2)
        keys = list(self.finite_poles)
        if INFINITY_KEY in parab.directions:
            keys.append(INFINITY_KEY)
        for key in keys:
            mat = self.residue_at(key)
            if not (mat * mat == zero):
                return False
            v1, v2 = parab.at(key).vector()
            image = mat.apply([v1, v2])
            if not (image[0].is_zero() and image[1].is_zero()):
                return False
        return True


# ----------------------------------------------------------------------
# Spectral analysis
# ----------------------------------------------------------------------

def _rat_sqrt(q: "Rat") -> Optional["Rat"]:
    """Exact square root of a nonnegative rational, or None."""
    from math import isqrt
    num, den = rat_num(q), rat_den(q)
    if num < 0:
        return None
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return as_rat(rn) / rd
    return None


def _canonical_signed(e: RatFunc) -> RatFunc:
    """Of e and -e, return the one whose numerator has positive leading
    coefficient (graded lex); the zero function is returned as is."""
    if e.is_zero():
        return e
    _, lead = e.num.leading_term()
    return e if lead > 0 else -e


def eigendata(mat: MatrixRF):
    """Eigenvalues and eigendirections of a trace-free 2x2 matrix.

    Returns ``(nu_plus, nu_minus, dirs)`` with ``nu_minus = -nu_plus`` and
    ``dirs`` the matching pair of directions.  ``nu_plus`` is the
    representative with positive leading numerator coefficient.  For a
    nilpotent matrix the pair is (0, 0) and both slots carry the null
    direction (None for the zero matrix).  Raises EigendataError when the
    eigenvalues do not lie in the coefficient field.
    """
    if not mat.trace().is_zero():
        raise ValueError("eigendata requires a trace-free matrix")
    a, b = mat[0, 0], mat[0, 1]
    c, d = mat[1, 0], mat[1, 1]
    det = mat.det()
    if det.is_zero():
        if all(v.is_zero() for v in mat.entries()):
            return RatFunc.zero(), RatFunc.zero(), (None, None)
        null = _kernel_direction(mat)
        return RatFunc.zero(), RatFunc.zero(), (null, null)
    if b.is_zero() or c.is_zero():
        e = _canonical_signed(a)
    else:
        neg_det = -det
        value = None
        if neg_det.is_polynomial() and neg_det.num.is_constant():
            value = _rat_sqrt(neg_det.num.constant_value())
        if value is None:
            raise EigendataError(
                "irrational eigendata: -det is not a recognized square")
        e = RatFunc.from_const(value)
    dirs = (_eigen_direction(mat, e), _eigen_direction(mat, -e))
    return e, -e, dirs


def _kernel_direction(mat: MatrixRF) -> Direction:
    a, b = mat[0, 0], mat[0, 1]
    c, d = mat[1, 0], mat[1, 1]
    if not (b.is_zero() and a.is_zero()):
        return Direction.from_vector(b, -a)
    return Direction.from_vector(d, -c)


def _eigen_direction(mat: MatrixRF, e: RatFunc) -> Direction:
    a, b = mat[0, 0], mat[0, 1]
    c, d = mat[1, 0], mat[1, 1]
    v1, v2 = b, e - a
    if v1.is_zero() and v2.is_zero():
        v1, v2 = e - d, c
    if v1.is_zero() and v2.is_zero():
        raise EigendataError("eigendirection degenerates")
    return Direction.from_vector(v1, v2)


def eigenvalue_on_direction(mat: MatrixRF, direction: Direction) -> RatFunc:
    """The scalar by which ``mat`` acts on ``direction``.

    Raises NonGenericError if the direction is not an eigenvector (exact
    proportionality test).
    """
    v1, v2 = direction.vector()
    w1, w2 = mat.apply([v1, v2])
    # proportionality: w ∥ v  <=>  w1 v2 - w2 v1 = 0
    if not (w1 * v2 - w2 * v1).is_zero():
        raise NonGenericError("direction is not an eigenvector")
    if not v2.is_zero():
        return w2 / v2
    return w1 / v1


# ----------------------------------------------------------------------
# Fuchs relation and parabolic degree
# ----------------------------------------------------------------------

def check_fuchs(sys: FuchsianSystem, deg_e: int) -> bool:
    """Fuchs relation: sum of residue traces over all poles plus deg E is 0."""
    total = RatFunc.zero()
    for pole in sys.poles:
        total = total + sys.residue_at(pole).trace()
    return (total + as_ratfunc(deg_e)).is_zero()


def parabolic_degree(deg_e: int, deg_l: int, weights: Iterable,
                     member: Iterable[bool]):
    """Weighted degree of a sub-line-bundle L inside a parabolic rank-2 bundle.

    ``member[i]`` marks whether the i-th parabolic direction lies in L;
    directions inside L count with weight -w_i, the others with +w_i.
    """
    weights = [as_rat(w) for w in weights]
    member = list(member)
    if len(weights) != len(member):
        raise ValueError("weights and membership lists differ in length")
    for w in weights:
        if w < 0 or w > 1:
            raise ValueError("parabolic weights must lie in [0, 1]")
    total = as_rat(deg_e) - 2 * as_rat(deg_l)
    for w, inside in zip(weights, member):
        total = total - w if inside else total + w
    return total


# ----------------------------------------------------------------------
# Twists and elementary transformations
# ----------------------------------------------------------------------

def twist(sys: FuchsianSystem, spec: SpectralData,
          residues: Dict[str, object]) -> Tuple[FuchsianSystem, SpectralData]:
    """Add theta_p * Id to the residue at each listed pole.

    Spectral data shifts by (nu+, nu-) -> (nu+ + theta, nu- + theta).  The
    result loses the trace-free normalization whenever some theta is nonzero.
    """
    thetas = {k: as_ratfunc(v) for k, v in residues.items()}
    for key in thetas:
        if key != INFINITY_KEY and key not in sys.residues:
            raise PoleError(f"twist at {key!r}: not a pole")
    new_residues = dict(sys.residues)
    infinity = sys.infinity
    ident = MatrixRF.identity(2)
    for key, theta in thetas.items():
        if key == INFINITY_KEY:
            infinity = sys.residue_at(INFINITY_KEY) + ident * theta
        else:
            new_residues[key] = new_residues[key] + ident * theta
    all_zero = all(th.is_zero() for th in thetas.values())
    new_pairs = dict(spec.pairs)
    for key, theta in thetas.items():
        if key in new_pairs:
            plus, minus = new_pairs[key]
            new_pairs[key] = (plus + theta, minus + theta)
    new_sys = FuchsianSystem(new_residues, dict(sys.locations), infinity,
                             trace_free=sys.trace_free and all_zero)
    return new_sys, SpectralData(new_pairs)


def _adapting_matrix(direction: Direction) -> MatrixRF:
    """G with G.(direction vector) proportional to (0, 1)."""
    if direction.is_infinite:
        return MatrixRF([[0, 1], [1, 0]])
    return MatrixRF([[1, -direction.zeta], [0, 1]])


def _assert_no_x_poles(mat: MatrixRF) -> None:
    """Exact check that every entry is polynomial in x (no finite x-pole)."""
    for entry in mat.entries():
        den = entry.den
        if den.degree_in("x") == 0:
            continue
        r, _ = prem(entry.num, den, "x")
        if not r.is_zero():
            raise ArithmeticError(
                "gauge transformation left an unexpected pole in x")


def elementary_transform(sys: FuchsianSystem, parab: ParabolicData,
                         spec: SpectralData, pole: str, sign: int):
    """Elementary transformation at a finite pole along its parabolic line.

    Returns ``(system, parabolic, spectral, deg_shift)``.  The negative
    transformation gauges by ``G^{-1} diag(x-p, 1) G`` (G adapts the
    direction to (0,1)); eigenvalues at the pole change by
    (nu+, nu-) -> (nu- + 1, nu+) and the bundle degree drops by one.  The
    positive transformation is the negative one composed with a twist by -1
    at the pole: (nu+, nu-) -> (nu-, nu+ - 1), degree shift +1.

    All residues of the result are produced in closed form and re-verified
    against the directly gauged connection matrix (exact pole bookkeeping).
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if pole == INFINITY_KEY or pole not in sys.residues:
        raise PoleError(f"elementary transformation needs a finite pole, got {pole!r}")
    direction = parab.at(pole)

    g_adapt = _adapting_matrix(direction)
    g_inv = g_adapt.inverse()
    p_loc = sys.locations[pole]

    # Conjugate every residue into the adapted frame.
    conj = {key: g_adapt * mat * g_inv for key, mat in sys.residues.items()}
    b_p = conj[pole]
    if not b_p[0, 1].is_zero():
        raise NonGenericError(
            "parabolic direction is not an eigenvector of the residue; "
            "elementary transformation undefined")

    # In the adapted frame, with s = x - p and D = diag(s, 1):
    #   D^{-1} B D + D^{-1} D' = [[B11 + 1/s, B12/s], [B21*s, B22]].
    # Residue at p: [[Bp11 + 1, H12(p)], [0, Bp22]] with H the finite part.
    h12_at_p = RatFunc.zero()
    for key, mat in conj.items():
        if key == pole:
            continue
        h12_at_p = h12_at_p + mat[0, 1] / (p_loc - sys.locations[key])
    res_p_adapted = MatrixRF([[b_p[0, 0] + 1, h12_at_p],
                              [RatFunc.zero(), b_p[1, 1]]])

    x = RatFunc.from_var("x")
    s = x - p_loc

    def d_conj(mat: MatrixRF, s_val: RatFunc) -> MatrixRF:
        return MatrixRF([[mat[0, 0], mat[0, 1] / s_val],
                         [mat[1, 0] * s_val, mat[1, 1]]])

    new_residues = {}
    for key, mat in conj.items():
        if key == pole:
            adapted = res_p_adapted
        else:
            adapted = d_conj(mat, sys.locations[key] - p_loc)
        new_residues[key] = g_inv * adapted * g_adapt

    # Independent verification: gauge the full connection matrix directly and
    # check that subtracting the claimed polar parts leaves no x-pole.
    gauge = g_inv * MatrixRF([[s, 0], [0, 1]]) * g_adapt
    gauge_prime = g_inv * MatrixRF([[1, 0], [0, 0]]) * g_adapt
    direct = gauge.inverse() * sys.total_matrix() * gauge + \
        gauge.inverse() * gauge_prime
    polar = MatrixRF.zeros(2, 2)
    for key, mat in new_residues.items():
        polar = polar + mat * (RatFunc.one() / (x - sys.locations[key]))
    _assert_no_x_poles(direct - polar)

    # The transformation shifts the residue trace at the pole by +1, so the
    # result never satisfies the trace-free normalization.
    new_sys = FuchsianSystem(new_residues, dict(sys.locations), infinity=None,
                             trace_free=False)

    # Directions transform by g(q)^{-1} at the other poles; at p the new
    # direction is the (nu- + 1)-eigendirection, which is (1,0) in the
    # adapted frame, i.e. the class of G^{-1}(1,0).
    new_dirs = {}
    for key, dirn in parab.directions.items():
        if key == pole:
            vec = g_inv.apply([1, 0])
            new_dirs[key] = Direction.from_vector(vec[0], vec[1])
        elif key in sys.locations:
            q_loc = sys.locations[key]
            g_at_q = g_inv * MatrixRF([[q_loc - p_loc, 0], [0, 1]]) * g_adapt
            v1, v2 = dirn.vector()
            vec = g_at_q.inverse().apply([v1, v2])
            new_dirs[key] = Direction.from_vector(vec[0], vec[1])
        # The transformed frame is meromorphic at infinity, so a direction
        # there has no well-defined transform and is dropped.
    new_parab = ParabolicData(new_dirs)

    plus, minus = spec.at(pole)
    new_pairs = dict(spec.pairs)
    new_pairs[pole] = (minus + 1, plus)
    new_spec = SpectralData(new_pairs)

    if sign < 0:
        return new_sys, new_parab, new_spec, -1

    # Positive transformation: compose with the twist by -1 at the pole.
    twisted_sys, twisted_spec = twist(new_sys, new_spec, {pole: -1})
    return twisted_sys, new_parab, twisted_spec, +1
