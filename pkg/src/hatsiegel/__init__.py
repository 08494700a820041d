"""Computations on the special Siegel half-space Ĥ₂, its automorphism group
Ĝ and line bundles on the abelian surfaces C²/L_Ω."""

from .halfspace import HatPoint
from .group import GHatElement, Sl2Pair
from .numeric import DomainError, NumericError, Tolerance
from .polarization import FormKind, RiemannFormSpec

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "FormKind",
    "GHatElement",
    "HatPoint",
    "NumericError",
    "RiemannFormSpec",
    "Sl2Pair",
    "Tolerance",
    "__version__",
]
