# Copyright(C) 2024 by Mixcon developers.

"""test_util.py: test Mixcon utility functions"""

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

import math
from fractions import Fraction

import pytest

from Mixcon import util
from Mixcon.enumeration import Enumeration
from Mixcon.exceptions import DocumentError, EnumException


def test_parse_fraction_slash() -> None:
    """test_parse_fraction_slash"""
    assert util.parse_fraction("3/4") == Fraction(3, 4)


def test_parse_fraction_decimal_is_exact() -> None:
    """test_parse_fraction_decimal_is_exact"""
    assert util.parse_fraction("0.1") == Fraction(1, 10)


def test_parse_fraction_int() -> None:
    """test_parse_fraction_int"""
    assert util.parse_fraction(7) == 7


def test_parse_fraction_refuses_float() -> None:
    """test_parse_fraction_refuses_float"""
    with pytest.raises(DocumentError):
        util.parse_fraction(0.5)


def test_parse_fraction_refuses_bool() -> None:
    """test_parse_fraction_refuses_bool"""
    with pytest.raises(DocumentError):
        util.parse_fraction(True)


def test_parse_fraction_garbage() -> None:
    """test_parse_fraction_garbage"""
    with pytest.raises(DocumentError):
        util.parse_fraction("1/0")
    with pytest.raises(DocumentError):
        util.parse_fraction("half")


def test_format_fraction() -> None:
    """test_format_fraction"""
    assert util.format_fraction(Fraction(28, 15)) == "28/15"
    assert util.format_fraction(3) == "3/1"


def test_format_ratio_inf() -> None:
    """test_format_ratio_inf"""
    assert util.format_ratio(math.inf) == "inf"
    assert util.format_ratio(Fraction(3)) == "3/1"


def test_ratio_zero_cases() -> None:
    """0/0 is 1, positive/0 is infinite"""
    assert util.ratio(Fraction(0), Fraction(0)) == 1
    assert util.ratio(Fraction(2), Fraction(0)) == math.inf
    assert util.ratio(Fraction(3), Fraction(2)) == Fraction(3, 2)


def test_sort_key_and_ordered() -> None:
    """test_sort_key_and_ordered"""
    index = util.order_index(["c", "a", "b"])
    assert util.sort_key({"a", "c"}, index) == (0, 1)
    assert util.ordered({"b", "c", "a"}, index) == ["c", "a", "b"]


def test_chunked() -> None:
    """test_chunked"""
    assert util.chunked([1, 2, 3, 4, 5], 2) == [[1, 2], [3, 4], [5]]
    assert util.chunked([1, 2], 0) == [[1], [2]]


def test_enumeration_parse_accepts_dashes() -> None:
    """test_enumeration_parse_accepts_dashes"""
    kinds = Enumeration("colour", ["dark_red", ("blue", 7)])
    assert kinds.parse("dark-red") == kinds.dark_red == 0
    assert kinds.whatis(7) == "blue"
    assert 7 in kinds
    with pytest.raises(EnumException):
        kinds.parse("green")
