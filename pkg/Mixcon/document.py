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

"""Game documents (JSON) and state strings.

A game document looks like

    {"name": "...",
     "resources": {"r1": {"latency": {"kind": "linear", "a": "1/1", "b": "0/1"},
                          "bottleneck": {"kind": "table", "values": ["0/1", "3/1"]}}},
     "players": [{"alpha": "1/2", "strategies": [["r1"], ["r2", "r3"]]},
                 {"alpha": "0.25", "matroid": {"kind": "uniform",
                                               "ground": ["r1", "r2"], "rank": 1}}]}

Numbers are written as "p/q" strings; decimals and integers are read
exactly.  A state string has one token per player: the index of an
explicit strategy, or the resources of a basis joined by '+'.
"""

import csv
import json
from fractions import Fraction
from typing import Any, Dict, List

from Mixcon.constants import EXCHANGE_CAP, STRATEGY_SEP
from Mixcon.exceptions import DocumentError
from Mixcon.game import (
    CostFunction,
    Game,
    Player,
    Resource,
    State,
    StrategySpace,
    check_state,
)
from Mixcon.matroid import Matroid
from Mixcon.typing import (
    CostDocument,
    CostKind,
    GameDocument,
    MatroidDocument,
    MatroidKind,
    PlayerDocument,
)
from Mixcon.util import format_fraction, parse_fraction


def _field(doc: Dict[str, Any], key: str, where: str) -> Any:
    if not isinstance(doc, dict):
        raise DocumentError(f"{where}: expected an object")
    if key not in doc:
        raise DocumentError(f"{where}: missing '{key}'")
    return doc[key]


class _Object(dict):
    """JSON object that keeps repeated keys in repeated"""

    def __init__(self, pairs):
        super().__init__()
        self.repeated: List[Any] = []
        for key, value in pairs:
            if key in self:
                self.repeated.append((key, value))
            else:
                self[key] = value


def _list(value: Any, where: str) -> List[Any]:
    if not isinstance(value, list):
        raise DocumentError(f"{where}: expected a list")
    return value


def _cost_from_doc(doc: CostDocument, where: str) -> CostFunction:
    kind = _field(doc, "kind", where)  # type: ignore[arg-type]
    if kind == "linear":
        return CostFunction.linear(
            parse_fraction(doc.get("a", 0)), parse_fraction(doc.get("b", 0))
        )
    if kind == "table":
        values = _list(_field(doc, "values", where), where)  # type: ignore[arg-type]
        return CostFunction.table(parse_fraction(v) for v in values)
    raise DocumentError(f"{where}: unknown cost kind {kind!r}")


def _cost_to_doc(func: CostFunction) -> CostDocument:
    if func.kind == CostKind.linear:
        return {
            "kind": "linear",
            "a": format_fraction(func.a),
            "b": format_fraction(func.b),
        }
    return {"kind": "table", "values": [format_fraction(v) for v in func.values]}


def _matroid_from_doc(doc: MatroidDocument, where: str, exchange_cap: int) -> Matroid:
    kind = _field(doc, "kind", where)  # type: ignore[arg-type]
    try:
        if kind == "uniform":
            return Matroid.uniform(
                _list(_field(doc, "ground", where), where),  # type: ignore[arg-type]
                int(_field(doc, "rank", where)),  # type: ignore[arg-type]
            )
        if kind == "partition":
            return Matroid.partition(
                _list(_field(doc, "blocks", where), where),  # type: ignore[arg-type]
                _list(_field(doc, "ranks", where), where),  # type: ignore[arg-type]
            )
        if kind == "graphic":
            edges = _list(_field(doc, "edges", where), where)  # type: ignore[arg-type]
            if any(not isinstance(e, list) or len(e) != 3 for e in edges):
                raise DocumentError(f"{where}: edges are [id, u, v] triples")
            return Matroid.graphic(edges)
        if kind == "explicit_bases":
            return Matroid.explicit_bases(
                _list(_field(doc, "bases", where), where),  # type: ignore[arg-type]
                doc.get("ground"),
                exchange_cap,
            )
    except (TypeError, ValueError) as error:
        raise DocumentError(f"{where}: {error}") from error
    raise DocumentError(f"{where}: unknown matroid kind {kind!r}")


def _matroid_to_doc(m: Matroid) -> MatroidDocument:
    kind = MatroidKind.whatis(m.kind)
    if m.kind == MatroidKind.uniform:
        return {"kind": kind, "ground": list(m.ground), "rank": m.k}
    if m.kind == MatroidKind.partition:
        return {
            "kind": kind,
            "blocks": [list(b) for b in m.blocks],
            "ranks": list(m.ranks),
        }
    if m.kind == MatroidKind.graphic:
        return {"kind": kind, "edges": [list(e) for e in m.edges]}
    return {"kind": kind, "ground": list(m.ground), "bases": [list(b) for b in m.bases]}


def _player_from_doc(doc: PlayerDocument, where: str, exchange_cap: int) -> Player:
    alpha = parse_fraction(_field(doc, "alpha", where))  # type: ignore[arg-type]
    if "strategies" in doc and "matroid" in doc:
        raise DocumentError(f"{where}: give either 'strategies' or 'matroid'")
    if "matroid" in doc:
        space = StrategySpace.of_matroid(
            _matroid_from_doc(doc["matroid"], where + ".matroid", exchange_cap)
        )
    else:
        listed = _list(_field(doc, "strategies", where), where)  # type: ignore[arg-type]
        for pos, strategy in enumerate(listed):
            _list(strategy, f"{where}.strategies[{pos}]")
        space = StrategySpace.explicit(listed)
    return Player(alpha, space)


def _player_to_doc(player: Player) -> PlayerDocument:
    doc: PlayerDocument = {"alpha": format_fraction(player.alpha)}
    if player.space.matroid is not None:
        doc["matroid"] = _matroid_to_doc(player.space.matroid)
    else:
        doc["strategies"] = [list(s) for s in player.space.listed]
    return doc


def game_from_doc(doc: GameDocument, exchange_cap: int = EXCHANGE_CAP) -> Game:
    """Build a Game; structure errors raise DocumentError, content is left to validate().

    Listed matroid bases on more than exchange_cap elements are not
    checked for the exchange property.
    """
    resources_doc = _field(doc, "resources", "game")  # type: ignore[arg-type]
    if not isinstance(resources_doc, dict):
        raise DocumentError("game: 'resources' must map ids to cost functions")
    resources = []
    # repeated ids become extra resources, which validate() reports
    pairs = list(resources_doc.items()) + getattr(resources_doc, "repeated", [])
    for rid, rdoc in pairs:
        where = f"resource {rid}"
        resources.append(
            Resource(
                rid,
                _cost_from_doc(_field(rdoc, "latency", where), where + ".latency"),
                _cost_from_doc(
                    _field(rdoc, "bottleneck", where), where + ".bottleneck"
                ),
            )
        )
    players = [
        _player_from_doc(pdoc, f"player {pos + 1}", exchange_cap)
        for pos, pdoc in enumerate(_list(_field(doc, "players", "game"), "players"))  # type: ignore[arg-type]
    ]
    return Game(
        tuple(players),
        tuple(resources),
        str(doc.get("name", "")),
        bool(doc.get("singleton", False)),
    )


def game_to_doc(game: Game) -> GameDocument:
    """The document form of game"""
    doc: GameDocument = {}
    if game.name:
        doc["name"] = game.name
    if game.singleton_declared:
        doc["singleton"] = True
    doc["resources"] = {
        res.id: {
            "latency": _cost_to_doc(res.latency),
            "bottleneck": _cost_to_doc(res.bottleneck),
        }
        for res in game.resources
    }
    doc["players"] = [_player_to_doc(p) for p in game.players]
    return doc


def loads(text: str, exchange_cap: int = EXCHANGE_CAP) -> Game:
    """Parse a game document"""
    try:
        doc = json.loads(text, parse_float=Fraction, object_pairs_hook=_Object)
    except json.JSONDecodeError as error:
        raise DocumentError(f"not JSON: {error}") from error
    return game_from_doc(doc, exchange_cap)


def dump_game(game: Game) -> str:
    """Serialize deterministically"""
    return json.dumps(game_to_doc(game), indent=1) + "\n"


def load_game(path: str, exchange_cap: int = EXCHANGE_CAP) -> Game:
    """Read a game document from a file"""
    with open(path, encoding="UTF-8") as fp:
        return loads(fp.read(), exchange_cap)


def save_game(game: Game, path: str) -> None:
    """Write a game document to a file"""
    with open(path, "w", encoding="UTF-8") as fp:
        fp.write(dump_game(game))


def parse_state(game: Game, text: str) -> State:
    """State from its comma separated form.

    Raises:
        DocumentError: wrong token count or an unreadable token.
        InvalidState: a strategy not in the player's space.
    """
    rows = list(csv.reader([text.strip()], skipinitialspace=True))
    tokens = rows[0] if rows else []
    if len(tokens) != game.n:
        raise DocumentError(f"state has {len(tokens)} entries for {game.n} players")
    choices = []
    for pos, (player, token) in enumerate(zip(game.players, tokens)):
        token = token.strip()
        if player.space.matroid is None:
            try:
                index = int(token)
            except ValueError:
                raise DocumentError(
                    f"player {pos + 1}: expected a strategy index, got {token!r}"
                ) from None
            strategies = player.space.strategies
            if not 0 <= index < len(strategies):
                raise DocumentError(
                    f"player {pos + 1}: index {index} outside 0..{len(strategies) - 1}"
                )
            choices.append(strategies[index])
        else:
            choices.append(frozenset(t.strip() for t in token.split(STRATEGY_SEP)))
    state = State(tuple(choices))
    check_state(game, state)
    return state


def format_state(game: Game, state: State) -> str:
    """Comma separated form; '+' joined tokens are quoted"""
    out: List[str] = []
    for token in state.tokens(game):
        out.append(f'"{token}"' if STRATEGY_SEP in token else token)
    return ",".join(out)
