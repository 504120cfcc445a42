"""Exact differential 2-forms in finitely many coordinates.

A 2-form is stored as a table of rational-function coefficients indexed by
ordered coordinate pairs (i, j) with i < j, relative to an explicit tuple of
coordinate names.  Only constructions actually needed downstream are
provided: linear combinations, ``df ^ dg`` wedges, and pullback along a map
given coordinate-wise by rational functions.
"""

from __future__ import annotations

from typing import Dict, Sequence, Tuple

from .ratfunc import RatFunc, as_ratfunc

PairKey = Tuple[int, int]


class TwoForm:
    """A 2-form ``sum c_ij d(coords[i]) ^ d(coords[j])`` with i < j."""

    __slots__ = ("coords", "coeffs")

    def __init__(self, coords: Sequence[str], coeffs: Dict[PairKey, RatFunc] = None):
        self.coords: Tuple[str, ...] = tuple(coords)
        table: Dict[PairKey, RatFunc] = {}
        if coeffs:
            for (i, j), c in coeffs.items():
                c = as_ratfunc(c)
                if i == j:
                    if not c.is_zero():
                        raise ValueError("d(x) ^ d(x) must have zero coefficient")
                    continue
                if i > j:
                    i, j, c = j, i, -c
                if not (0 <= i < j < len(self.coords)):
                    raise ValueError("coordinate index out of range")
                prev = table.get((i, j))
                c = c if prev is None else prev + c
                if c.is_zero():
                    table.pop((i, j), None)
                else:
                    table[(i, j)] = c
        self.coeffs = table

    # ------------------------------------------------------------------

    @staticmethod
    def zero(coords: Sequence[str]) -> "TwoForm":
        return TwoForm(coords)

    @staticmethod
    def from_terms(coords: Sequence[str], terms) -> "TwoForm":
        """Build from an iterable of ``(coeff, name_i, name_j)`` triples."""
        coords = tuple(coords)
        index = {name: k for k, name in enumerate(coords)}
        table: Dict[PairKey, RatFunc] = {}
        for coeff, a, b in terms:
            if a not in index or b not in index:
                raise ValueError(
                    f"term d({a})^d({b}) uses a name outside {coords}")
            key = (index[a], index[b])
            prev = table.get(key)
            coeff = as_ratfunc(coeff)
            table[key] = coeff if prev is None else prev + coeff
        return TwoForm(coords, table)

    # ------------------------------------------------------------------

    def coefficient(self, a: str, b: str) -> RatFunc:
        """Coefficient of ``d(a) ^ d(b)`` (antisymmetric in the arguments)."""
        i = self.coords.index(a)
        j = self.coords.index(b)
        if i == j:
            return RatFunc.zero()
        if i < j:
            return self.coeffs.get((i, j), RatFunc.zero())
        return -self.coeffs.get((j, i), RatFunc.zero())

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, TwoForm):
            return NotImplemented
        if self.coords != other.coords:
            return False
        keys = set(self.coeffs) | set(other.coeffs)
        zero = RatFunc.zero()
        return all(self.coeffs.get(k, zero) == other.coeffs.get(k, zero)
                   for k in keys)

    __hash__ = None

    # ------------------------------------------------------------------

    def __add__(self, other: "TwoForm") -> "TwoForm":
        if self.coords != other.coords:
            raise ValueError("2-forms live in different coordinates")
        table = dict(self.coeffs)
        for k, c in other.coeffs.items():
            prev = table.get(k)
            table[k] = c if prev is None else prev + c
        return TwoForm(self.coords, table)

    def __sub__(self, other: "TwoForm") -> "TwoForm":
        return self + (-other)

    def __neg__(self) -> "TwoForm":
        return TwoForm(self.coords, {k: -c for k, c in self.coeffs.items()})

    def scale(self, factor) -> "TwoForm":
        factor = as_ratfunc(factor)
        return TwoForm(self.coords, {k: factor * c for k, c in self.coeffs.items()})

    # ------------------------------------------------------------------

    def pullback(self, mapping: Dict[str, RatFunc],
                 source_coords: Sequence[str]) -> "TwoForm":
        """Pull back along the map whose components are ``mapping``.

        ``mapping`` sends each of this form's coordinate names to a rational
        function of the source coordinates.  The result is expressed in
        ``source_coords``:  ``sum c_ij(f) df_i ^ df_j`` expanded via partial
        derivatives of the components.
        """
        source_coords = tuple(source_coords)
        comps = {name: as_ratfunc(mapping[name]) for name in self.coords}
        partials = {name: [comps[name].derivative(s) for s in source_coords]
                    for name in self.coords}
        n = len(source_coords)
        table: Dict[PairKey, RatFunc] = {}
        for (i, j), c in self.coeffs.items():
            c_pulled = c.subst(dict(mapping))
            fi = partials[self.coords[i]]
            fj = partials[self.coords[j]]
            for a in range(n):
                for b in range(a + 1, n):
                    jac = fi[a] * fj[b] - fi[b] * fj[a]
                    if jac.is_zero():
                        continue
                    term = c_pulled * jac
                    prev = table.get((a, b))
                    term = term if prev is None else prev + term
                    if term.is_zero():
                        table.pop((a, b), None)
                    else:
                        table[(a, b)] = term
        return TwoForm(source_coords, table)


def wedge_d(f: RatFunc, g: RatFunc, coords: Sequence[str]) -> TwoForm:
    """The wedge ``df ^ dg`` expressed in the given coordinates."""
    coords = tuple(coords)
    df = [as_ratfunc(f).derivative(s) for s in coords]
    dg = [as_ratfunc(g).derivative(s) for s in coords]
    table: Dict[PairKey, RatFunc] = {}
    for a in range(len(coords)):
        for b in range(a + 1, len(coords)):
            c = df[a] * dg[b] - df[b] * dg[a]
            if not c.is_zero():
                table[(a, b)] = c
    return TwoForm(coords, table)
