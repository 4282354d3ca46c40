"""multiform: exact computer algebra for multivalued formal group laws."""

from .poly import (
    QQ,
    ZZ,
    CoefficientRing,
    MonomialOrder,
    Polynomial,
    PolyRing,
    Variable,
    Zmod,
)

__all__ = [
    "CoefficientRing",
    "MonomialOrder",
    "Polynomial",
    "PolyRing",
    "Variable",
    "ZZ",
    "QQ",
    "Zmod",
]
