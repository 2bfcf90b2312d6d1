"""Exact arithmetic toolkit around rank-2 dimension groups and CM curve data.

Subpackages by theme:

- quadfield: exact elements a + b*sqrt(D) of a quadratic field, fundamental
  units, and the distinguished generator omega of the ring of integers.
- contfrac: periodic continued fractions of quadratic irrationals.
- bratteli: layered matrix-algebra diagrams, dimension groups, and the
  stationary rank-2 real embedding.
- groupalg: representation-degree profiles, cyclic profinite towers, and the
  restricted-product descriptor.
- elliptic: point counts over F_p and small extensions, Frobenius data, local
  zeta factors, the CM curve table, and norm-form trace computation.
- lfunction: partial Euler products and the motivic/automorphic comparisons.
- coherence: finitely generated subgroups of R and the containment checks.
- cli: command-line surface over all of the above.
"""

from kzero.quadfield import QuadElement, FundamentalUnitResult, omega_of, fundamental_unit
from kzero.contfrac import PeriodicCF, Convergent, expand, convergents
from kzero.coherence import RealModule, TraceCohomology

__all__ = [
    "QuadElement",
    "FundamentalUnitResult",
    "omega_of",
    "fundamental_unit",
    "PeriodicCF",
    "Convergent",
    "expand",
    "convergents",
    "RealModule",
    "TraceCohomology",
]
