"""Exact noncommutative algebra for braided phase spaces and the q-Legendre transformation."""

from .qcoeff import Context, QPoly, qp_mul, qp_specialize
from .algebra import (
    BraidWeight, Element, Gen, elem_mul, format_element, gen_weight,
    normal_form, parse_element, substitute, swap_factor,
)

__all__ = [
    "Context", "QPoly", "qp_mul", "qp_specialize",
    "BraidWeight", "Element", "Gen", "elem_mul", "format_element", "gen_weight",
    "normal_form", "parse_element", "substitute", "swap_factor",
]
