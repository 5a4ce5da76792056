"""Shipped example systems, one description document per name."""

from __future__ import annotations

from .errors import UnknownCheck

OSCILLATOR = """\
# Affine potentials on Euclidean 3-space; extendable to the isotropic
# oscillator (the quadratic direction appears as the complementary fit).
chart
  dim 3
  coords x y z
end

metric identity

potentials
  1
  x
  y
  z
end

killing
  1, 0, 0
  0, 0, 0
  0, 0, 0
end

killing
  0, 0, 0
  0, 1, 0
  0, 0, 0
end

killing
  0, 0, 0
  0, 0, 0
  0, 0, 1
end

killing
  0, 1/2, 0
  1/2, 0, 0
  0, 0, 0
end

analysis
  base 1, 1, 1
  grid 3x3x3
  spacing 1/4
  witness 0
  candidate quadratic = x^2 + y^2 + z^2
end
"""

GENERIC_I_RESTRICTED = """\
# Inverse-square potentials on Euclidean 3-space: the three-parameter
# restriction of the generic system [I]; extendable.
chart
  dim 3
  coords x y z
end

metric identity

potentials
  1
  1/x^2
  1/y^2
  1/z^2
end

killing
  y^2, -x*y, 0
  -x*y, x^2, 0
  0, 0, 0
end

killing
  1, 0, 0
  0, 0, 0
  0, 0, 0
end

analysis
  base 1, 1, 1
  grid 3x3x3
  spacing 1/4
  witness -3*ln(x*y*z)
  candidate quadratic = x^2 + y^2 + z^2
end
"""

KEPLER_COULOMB = """\
# Generalised Kepler-Coulomb family: two inverse squares plus 1/r.
# Non-extendable: the obstruction tensor is nonzero.
chart
  dim 3
  coords x y z
  atom r = x^2 + y^2 + z^2
end

metric identity

potentials
  1
  1/x^2
  1/y^2
  1/r
end

killing
  y^2, -x*y, 0
  -x*y, x^2, 0
  0, 0, 0
end

analysis
  base 1, 1, 1
  grid 3x3x3
  spacing 1/4
  witness 3*ln(z^2/(x*y))
end
"""

FIXTURES = {
    "oscillator": OSCILLATOR,
    "generic-I-restricted": GENERIC_I_RESTRICTED,
    "kepler-coulomb": KEPLER_COULOMB,
}


def fixture_names():
    return sorted(FIXTURES.keys())


def fixture_text(name: str) -> str:
    try:
        return FIXTURES[name]
    except KeyError:
        raise UnknownCheck(
            f"unknown fixture {name!r}; available: {', '.join(fixture_names())}") from None
