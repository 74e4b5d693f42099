# Copyright(C) 2024 by Mixcon developers.

"""conftest.py: pytest session-scoped objects"""

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

import pytest
from pytest import fixture

from Mixcon import gadgets
from Mixcon.game import Game


def pytest_addoption(parser) -> None:
    """--runslow enables the full sweeps"""
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run slow sweeps"
    )


def pytest_collection_modifyitems(config, items) -> None:
    """Skip tests marked slow unless --runslow is given"""
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@fixture(scope="session")
def two_player_game() -> Game:
    """Two alpha 1/2 players on uniform matroids, no equilibrium"""
    return gadgets.build_thm2()


@fixture(scope="session")
def four_state_game() -> Game:
    """The two-strategy restriction of two_player_game"""
    return gadgets.build_thm2(restricted=True)


@fixture(scope="session")
def cycle_game() -> Game:
    """Three-player singleton game whose best responses cycle"""
    return gadgets.build_thm5()


@fixture(scope="session")
def ten_player_game() -> Game:
    """Every state leaves some player a factor 3 improvement"""
    return gadgets.build_thm7()
