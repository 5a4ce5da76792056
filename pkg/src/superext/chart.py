"""Coordinate charts with adjoined radical atoms.

A chart fixes the variable universe for all exact arithmetic: n coordinate
names plus any number of radical atoms r with r**2 equal to a polynomial in
the coordinates.  The variable order (coordinates first, atoms after, each
in declaration order) is part of the chart identity because canonical forms
depend on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Tuple

Monomial = Tuple[int, ...]
PolyTerms = Mapping[Monomial, Fraction]


def _valid_ident(name: str) -> bool:
    return name.isidentifier()


@dataclass(frozen=True)
class RadicalAtom:
    """An adjoined square root: atom**2 == radicand.

    The radicand is stored as a sparse polynomial over the chart coordinates
    only (exponent tuples of length dim); it must not be a perfect square,
    otherwise zero-testing in the extended ring breaks down.
    """

    name: str
    radicand: Tuple[Tuple[Monomial, Fraction], ...]

    @staticmethod
    def make(name: str, radicand: PolyTerms) -> "RadicalAtom":
        items = tuple(sorted((tuple(m), Fraction(c)) for m, c in radicand.items() if c != 0))
        if not items:
            raise ValueError(f"radical atom {name!r} has zero radicand")
        return RadicalAtom(name, items)

    def radicand_terms(self) -> dict:
        return {m: c for m, c in self.radicand}


class Chart:
    """Immutable chart: dimension, coordinate names, radical atoms."""

    __slots__ = ("dim", "coord_names", "atoms", "_var_index", "__weakref__")

    def __init__(self, coord_names, atoms=()):
        coord_names = tuple(coord_names)
        atoms = tuple(atoms)
        if len(coord_names) < 2:
            raise ValueError("chart needs dimension >= 2")
        names = list(coord_names) + [a.name for a in atoms]
        if len(set(names)) != len(names):
            raise ValueError("coordinate and atom names must be pairwise distinct")
        for nm in names:
            if not _valid_ident(nm):
                raise ValueError(f"bad identifier: {nm!r}")
        for a in atoms:
            for mono, _ in a.radicand:
                if len(mono) != len(coord_names):
                    raise ValueError(f"radicand of {a.name!r} must use coordinates only")
        object.__setattr__(self, "dim", len(coord_names))
        object.__setattr__(self, "coord_names", coord_names)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "_var_index", {nm: i for i, nm in enumerate(names)})

    def __setattr__(self, *a):  # pragma: no cover - guard
        raise AttributeError("Chart is immutable")

    # -- variable bookkeeping -------------------------------------------------

    @property
    def nvars(self) -> int:
        return self.dim + len(self.atoms)

    @property
    def var_names(self) -> tuple:
        return self.coord_names + tuple(a.name for a in self.atoms)

    def var_index(self, name: str) -> int:
        try:
            return self._var_index[name]
        except KeyError:
            raise KeyError(f"{name!r} is not a variable of this chart") from None

    def is_coord(self, name: str) -> bool:
        return name in self.coord_names

    def atom_index(self, name: str):
        """Index of an atom variable within the full variable tuple, or None."""
        i = self._var_index.get(name)
        if i is not None and i >= self.dim:
            return i
        return None

    def with_atom(self, atom: RadicalAtom) -> "Chart":
        """A new chart extending this one by one more radical atom."""
        return Chart(self.coord_names, self.atoms + (atom,))

    def find_atom_for(self, radicand_terms: PolyTerms):
        """Return the declared atom whose radicand equals the given terms, if any."""
        wanted = tuple(sorted((tuple(m), Fraction(c)) for m, c in radicand_terms.items() if c != 0))
        for a in self.atoms:
            if a.radicand == wanted:
                return a
        return None

    # -- equality / hashing ----------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, Chart)
                and self.coord_names == other.coord_names
                and self.atoms == other.atoms)

    def __hash__(self):
        return hash((self.coord_names, self.atoms))

    def __repr__(self):
        at = ", ".join(a.name for a in self.atoms)
        return f"Chart({', '.join(self.coord_names)}{'; ' + at if at else ''})"
