"""schurkit: exact computation in the representation theory of Schur algebras.

Constructs Schur algebras, divided/symmetric/exterior power modules, Weyl and
Schur modules, standard and costandard objects, Cauchy filtrations, and
machine-checks the highest-weight structure and Ringel self-duality of the
category over Z, Q and prime fields.
"""

from .rings import GF, QQ, RingSpec, ZZ

__all__ = ["RingSpec", "ZZ", "QQ", "GF"]
__version__ = "0.1.0"
