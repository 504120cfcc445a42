"""Tests for the residue-matrix model of logarithmic connections:
pole bookkeeping, parabolic directions, eigendata, the Fuchs relation,
twists, and elementary transformations."""

import pytest

from parconn.connections import (AUTO_INFINITY, Direction, EigendataError,
                                 FuchsianSystem, INFINITY_KEY, NonGenericError,
                                 ParabolicData, PoleError, SpectralData,
                                 check_fuchs, eigendata,
                                 eigenvalue_on_direction, elementary_transform,
                                 parabolic_degree, twist)
from parconn.linalg import MatrixRF
from parconn.rat import as_rat
from parconn.ratfunc import RatFunc, as_ratfunc


def _simple_system():
    """Trace-free system with poles at 0 and 1 and auto-balanced infinity."""
    a0 = MatrixRF([[as_ratfunc("1/2"), 1], [0, as_ratfunc("-1/2")]])
    a1 = MatrixRF([[as_ratfunc("1/4"), 0], [1, as_ratfunc("-1/4")]])
    return FuchsianSystem({"0": a0, "1": a1}, {"0": 0, "1": 1})


# ----------------------------------------------------------------------
# Directions
# ----------------------------------------------------------------------

def test_direction_normalization():
    assert Direction(2) == Direction.from_vector(4, 2)
    assert Direction.infinite() == Direction.from_vector(3, 0)
    assert Direction(2) != Direction(3)
    assert not (Direction(2) == Direction.infinite())


def test_direction_zero_vector_rejected():
    with pytest.raises(ValueError):
        Direction.from_vector(0, 0)


def test_direction_vector_roundtrip():
    v1, v2 = Direction("5/3").vector()
    assert v1 / v2 == as_ratfunc("5/3")


# ----------------------------------------------------------------------
# FuchsianSystem
# ----------------------------------------------------------------------

def test_auto_infinity_balances_residues():
    sys = _simple_system()
    res_inf = sys.residue_at(INFINITY_KEY)
    total = sys.residue_at("0") + sys.residue_at("1") + res_inf
    assert total == MatrixRF.zeros(2, 2)


def test_explicit_infinity_respected():
    a0 = MatrixRF([[1, 0], [0, -1]])
    inf = MatrixRF([[-1, 0], [0, 1]])
    sys = FuchsianSystem({"0": a0}, {"0": 0}, infinity=inf)
    assert sys.residue_at(INFINITY_KEY) == inf


def test_no_infinity_means_no_residue_there():
    a0 = MatrixRF([[1, 0], [0, -1]])
    sys = FuchsianSystem({"0": a0}, {"0": 0}, infinity=None)
    with pytest.raises(PoleError):
        sys.residue_at(INFINITY_KEY)
    assert sys.poles == ("0",)


def test_unknown_pole_raises():
    sys = _simple_system()
    with pytest.raises(PoleError):
        sys.residue_at("nowhere")


def test_trace_free_flag_enforced():
    bad = MatrixRF([[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        FuchsianSystem({"0": bad}, {"0": 0})
    # allowed when the normalization is waived
    FuchsianSystem({"0": bad}, {"0": 0}, trace_free=False)


def test_total_matrix_has_simple_poles_only():
    sys = _simple_system()
    mat = sys.total_matrix()
    x = RatFunc.from_var("x")
    cleared = mat * (x * (x - 1))
    # fractions stay unreduced, so test divisibility instead of degrees
    for entry in cleared.entries():
        assert entry.den.divides(entry.num)


def test_add_is_linear_in_scales():
    sys = _simple_system()
    doubled = sys.add(sys, 1, 1)
    assert doubled.residue_at("0") == sys.residue_at("0") * 2


def test_serialize_stable_and_substituted():
    sys = _simple_system()
    assert sys.serialize() == sys.serialize()
    again = sys.subst({})
    assert again.serialize() == sys.serialize()


# ----------------------------------------------------------------------
# Eigendata
# ----------------------------------------------------------------------

def test_eigendata_diagonalizable():
    mat = MatrixRF([[as_ratfunc("1/2"), 1], [0, as_ratfunc("-1/2")]])
    plus, minus, dirs = eigendata(mat)
    assert plus == as_ratfunc("1/2") and minus == as_ratfunc("-1/2")
    assert eigenvalue_on_direction(mat, dirs[0]) == plus
    assert eigenvalue_on_direction(mat, dirs[1]) == minus


def test_eigendata_nilpotent():
    mat = MatrixRF([[0, 0], [1, 0]])
    plus, minus, dirs = eigendata(mat)
    assert plus.is_zero() and minus.is_zero()
    assert dirs[0] == Direction(0)


def test_eigendata_requires_trace_free():
    with pytest.raises(ValueError):
        eigendata(MatrixRF([[1, 0], [0, 2]]))


def test_eigendata_irrational_rejected():
    # eigenvalues +-sqrt(2)
    mat = MatrixRF([[1, 1], [1, -1]])
    with pytest.raises(EigendataError):
        eigendata(mat)


def test_eigenvalue_on_non_eigenvector_rejected():
    mat = MatrixRF([[as_ratfunc("1/2"), 1], [0, as_ratfunc("-1/2")]])
    with pytest.raises(NonGenericError):
        eigenvalue_on_direction(mat, Direction(5))


# ----------------------------------------------------------------------
# Fuchs relation and parabolic degree
# ----------------------------------------------------------------------

def test_check_fuchs_trace_free_bundle():
    sys = _simple_system()
    assert check_fuchs(sys, 0)
    assert not check_fuchs(sys, 1)


def test_parabolic_degree_weighted_count():
    # deg E - 2 deg L + sum of signed weights
    val = parabolic_degree(-1, -1, ["1/2", "1/2", "1/2"],
                           [True, False, False])
    assert val == as_rat(-1) + 2 + as_rat("1/2")
    with pytest.raises(ValueError):
        parabolic_degree(0, 0, [2], [True])


# ----------------------------------------------------------------------
# Twist
# ----------------------------------------------------------------------

def test_twist_shifts_spectrum_and_residue():
    sys = _simple_system()
    spec = SpectralData({"0": (as_ratfunc("1/2"), as_ratfunc("-1/2"))})
    twisted, new_spec = twist(sys, spec, {"0": "1/2"})
    assert twisted.residue_at("0")[0, 0] == as_ratfunc(1)
    assert new_spec.at("0") == (as_ratfunc(1), as_ratfunc(0))
    assert not twisted.trace_free


def test_twist_at_unknown_pole_rejected():
    sys = _simple_system()
    with pytest.raises(PoleError):
        twist(sys, SpectralData({}), {"q": 1})


def test_twist_at_infinity_shifts_auto_residue():
    sys = _simple_system()
    before = sys.residue_at(INFINITY_KEY)
    twisted, _ = twist(sys, SpectralData({}), {INFINITY_KEY: 1})
    after = twisted.residue_at(INFINITY_KEY)
    assert after == before + MatrixRF.identity(2)


# ----------------------------------------------------------------------
# Elementary transformations
# ----------------------------------------------------------------------

def _eigen_setup():
    sys = _simple_system()
    plus0, _, dirs0 = eigendata(sys.residue_at("0"))
    plus1, _, dirs1 = eigendata(sys.residue_at("1"))
    parab = ParabolicData({"0": dirs0[0], "1": dirs1[0]})
    spec = SpectralData({"0": (plus0, -plus0), "1": (plus1, -plus1)})
    return sys, parab, spec


def test_elementary_negative_shifts_eigenvalues():
    sys, parab, spec = _eigen_setup()
    new_sys, new_parab, new_spec, shift = elementary_transform(
        sys, parab, spec, "0", -1)
    assert shift == -1
    plus, minus = new_spec.at("0")
    assert (plus, minus) == (as_ratfunc("1/2"), as_ratfunc("1/2"))
    # the other pole keeps its spectrum
    assert new_spec.at("1") == spec.at("1")
    # new parabolic direction is an eigendirection for nu- + 1
    got = eigenvalue_on_direction(new_sys.residue_at("0"),
                                  new_parab.at("0"))
    assert got == plus


def test_elementary_positive_composes_twist():
    sys, parab, spec = _eigen_setup()
    new_sys, _, new_spec, shift = elementary_transform(
        sys, parab, spec, "0", +1)
    assert shift == +1
    plus, minus = new_spec.at("0")
    assert (plus, minus) == (as_ratfunc("-1/2"), as_ratfunc("-1/2"))
    # Fuchs relation: deg shifts by +1 relative to the start
    assert check_fuchs(new_sys, 1)


def test_elementary_degree_bookkeeping_negative():
    sys, parab, spec = _eigen_setup()
    new_sys, _, _, _ = elementary_transform(sys, parab, spec, "0", -1)
    assert check_fuchs(new_sys, -1)


def test_elementary_requires_eigen_direction():
    sys, parab, spec = _eigen_setup()
    bad = ParabolicData({"0": Direction(7), "1": parab.at("1")})
    with pytest.raises(NonGenericError):
        elementary_transform(sys, bad, spec, "0", -1)


def test_elementary_rejects_infinity_and_bad_sign():
    sys, parab, spec = _eigen_setup()
    with pytest.raises(PoleError):
        elementary_transform(sys, parab, spec, INFINITY_KEY, -1)
    with pytest.raises(ValueError):
        elementary_transform(sys, parab, spec, "0", 2)


def test_elementary_covers_both_adapting_paths():
    """Pole "0" carries the infinite direction (swap adapting matrix),
    pole "1" a finite one (shear adapting matrix); both must work."""
    sys, parab, spec = _eigen_setup()
    assert parab.at("0") == Direction.infinite()
    assert not parab.at("1").is_infinite
    new_sys, _, new_spec, _ = elementary_transform(sys, parab, spec, "1", -1)
    plus1 = spec.at("1")[0]
    assert new_spec.at("1") == (-plus1 + 1, plus1)
    assert check_fuchs(new_sys, -1)
