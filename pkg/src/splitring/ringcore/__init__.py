"""Exact arithmetic in the split tower ring."""

from .element import (
    ONE,
    ZERO,
    Element,
    Indet,
    Kind,
    add,
    coefficients_in,
    grade_decompose,
    grades,
    max_terms,
    mul,
    power,
    rank,
    reassemble,
    set_max_terms,
    spread,
)
from .laurent import (
    LaurentElement,
    divide,
    divides,
    from_laurent,
    is_member,
    laurent_divide,
    to_laurent,
    try_divide,
    valuation,
)
from .text import canonical_encode, parse_element, parse_indet, parse_laurent

__all__ = [
    "ONE",
    "ZERO",
    "Element",
    "Indet",
    "Kind",
    "LaurentElement",
    "add",
    "canonical_encode",
    "coefficients_in",
    "divide",
    "divides",
    "from_laurent",
    "grade_decompose",
    "grades",
    "is_member",
    "laurent_divide",
    "max_terms",
    "mul",
    "parse_element",
    "parse_indet",
    "parse_laurent",
    "power",
    "rank",
    "reassemble",
    "set_max_terms",
    "spread",
    "to_laurent",
    "try_divide",
    "valuation",
]
