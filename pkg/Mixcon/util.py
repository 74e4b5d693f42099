# Copyright(C) 2024 by Mixcon developers.

# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU Affero General Public License as
# published by the Free Software Foundation, either version 3 of the
# License, or (at your option) any later version.
#
# This program is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
# Affero General Public License for more details.
#
# You should have received a copy of the GNU Affero General Public
# License along with this program.  If not, see
# <http://www.gnu.org/licenses/agpl.html>.


"""Misc util routines"""

import math
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union
from Mixcon.constants import INFINITY_TEXT
from Mixcon.exceptions import DocumentError

Ratio = Union[Fraction, float]  # float only ever holds math.inf


def parse_fraction(value: Any) -> Fraction:
    """Exact rational from "p/q", a decimal string, an int or a Fraction.

    Decimal strings are read digit for digit, so "0.1" is exactly 1/10.
    Binary floats are refused since they are already rounded.
    """
    if isinstance(value, bool):
        raise DocumentError(f"not a number: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        raise DocumentError(f"inexact float {value!r}; write it as a string")
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as error:
            raise DocumentError(f"not a fraction: {value!r}") from error
    raise DocumentError(f"not a number: {value!r}")


def format_fraction(value: Fraction) -> str:
    """Render as "p/q"; integers keep the denominator 1."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def format_ratio(value: Ratio) -> str:
    """format_fraction that also accepts infinity"""
    if value == math.inf:
        return INFINITY_TEXT
    return format_fraction(value)  # type: ignore[arg-type]


def ratio(cost: Fraction, alternative: Fraction) -> Ratio:
    """cost / alternative with 0/0 = 1 and x/0 = inf for x > 0"""
    if alternative == 0:
        return Fraction(1) if cost == 0 else math.inf
    return cost / alternative


def order_index(items: Iterable[str]) -> Dict[str, int]:
    """Map each item to its position"""
    return {item: pos for pos, item in enumerate(items)}


def sort_key(resources: Iterable[str], index: Dict[str, int]) -> Tuple[int, ...]:
    """Lexicographic key of a resource set under a ground order"""
    return tuple(sorted(index[r] for r in resources))


def ordered(resources: Iterable[str], index: Dict[str, int]) -> List[str]:
    """Resources of a set in ground order"""
    return sorted(resources, key=index.__getitem__)


def chunked(seq: Sequence[Any], size: int) -> List[Sequence[Any]]:
    """Split seq into consecutive slices of at most size items"""
    size = max(1, size)
    return [seq[pos : pos + size] for pos in range(0, len(seq), size)]
