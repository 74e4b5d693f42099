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

"""Configuration from command-line options and NAME=VALUE files"""

import json
import os
from json.decoder import JSONDecodeError
from typing import Any, Dict, List, Optional, Set, Tuple

_DECODER = json.JSONDecoder()


class Args:
    """Attribute and call access to a configuration dict"""

    def __init__(self, conf: Dict[str, Any]):
        self.__dict__.update(conf)

    def __call__(self, var: str) -> Any:
        return self.__dict__[var]


def looks_like_json(val: str) -> bool:
    """Values starting like a JSON document are decoded"""
    return val[:1] in ('"', "[", "{") or val in ("true", "false", "null")


def looks_like_number(val: str) -> bool:
    """Integers are decoded so that caps and seeds arrive as ints"""
    return val.lstrip("-").isdigit()


def decode_value(val: str) -> Any:
    """Turn a command-line value into its Python form"""
    if looks_like_json(val) or looks_like_number(val):
        return json.loads(val)
    return val


def parse_argv(
    argv: List[str],
    conf: Dict[str, Any],
    config_name: str = "config",
    strict: bool = False,
) -> Tuple[Args, List[str]]:
    """Consume leading --NAME VALUE options that name known settings.

    "--name=value" and "--name value" are the same, "--name+=value"
    appends to a list, and a bare "--name" stores True.  Parsing stops
    at "--", at the first word not starting with "--" (the command) or at
    an option that is not a setting, which is left for the command.

    Returns:
        The settings and the unconsumed arguments.
    """
    arg_dict = dict(conf)
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg == "--":
            i += 1
            break
        if arg[:2] != "--":
            break

        fwd = 1
        split = arg[2:].split("=", 1)
        adding = False
        val: Any
        if len(split) == 1:
            var = split[0]
            if i + 1 < len(argv) and argv[i + 1][:2] != "--":
                fwd = 2
                val = argv[i + 1]
            else:
                val = True
        else:
            var, val = split
            if var[-1:] == "+":
                var = var[:-1]
                adding = True

        if isinstance(val, str):
            val = decode_value(val)

        var = var.replace("-", "_")
        if var == config_name:
            _include(set(), val, arg_dict, config_name, strict)
        elif var not in conf:
            break
        elif adding:
            add(arg_dict, var, val)
        else:
            arg_dict[var] = val
        i += fwd

    return Args(arg_dict), argv[i:]


def include(
    filename: str,
    conf: Optional[Dict[str, Any]] = None,
    config_name: str = "config",
    strict: bool = False,
) -> Dict[str, Any]:
    """Merge a configuration file into conf and return it"""
    if conf is None:
        conf = {}
    _include(set(), filename, conf, config_name, strict)
    return conf


def _include(
    seen: Set[str], filename: str, conf: Dict[str, Any], config_name: str, strict: bool
) -> None:
    if filename in seen:
        raise ValueError("Config file recursion: " + filename)

    with open(filename, encoding="UTF-8") as fp:
        text = fp.read()
    try:
        entries = read(text)
    except SyntaxError as error:
        error.filename = filename
        raise

    for var, val, additive in entries:
        var = var.replace("-", "_")
        if var == config_name:
            _include(
                seen | {filename},
                os.path.join(os.path.dirname(filename), val),
                conf,
                config_name,
                strict,
            )
        elif var not in conf:
            if strict:
                raise ValueError(f"Unknown parameter `{var}' in {filename}")
        elif additive and conf[var] is not None:
            add(conf, var, val)
        else:
            conf[var] = val


def read(text: str) -> List[Tuple[str, Any, bool]]:
    """
    Read name-value pairs and return them as a list of triples
    (name, value, additive) where "additive" is true if "+=" occurred
    between name and value.

    "NAME=VALUE" and "NAME VALUE" are equivalent.  Blank lines and lines
    starting with '#' are skipped.  Values starting with '"', '[' or '{'
    are JSON and may span lines; integers, true, false and null are
    decoded; anything else is a one-line string.  A line with just
    "NAME" stores True.
    """
    entries: List[Tuple[str, Any, bool]] = []
    pos = 0
    lineno = 1
    while pos < len(text):
        end = text.find("\n", pos)
        if end < 0:
            end = len(text)
        line = text[pos:end].strip()
        if not line or line.startswith("#"):
            pos = end + 1
            lineno += 1
            continue

        name = line
        rest = ""
        for cut, char in enumerate(line):
            if char in " \t=+":
                name, rest = line[:cut], line[cut:].lstrip(" \t")
                break

        additive = False
        if rest.startswith("+="):
            additive, rest = True, rest[2:]
        elif rest.startswith("+"):
            raise SyntaxError("'+' without '='", (None, lineno, 0, line))
        elif rest.startswith("="):
            rest = rest[1:]
        rest = rest.lstrip(" \t")

        if not rest:
            entries.append((name, True, additive))
            pos = end + 1
            lineno += 1
            continue

        if rest[:1] in ('"', "[", "{"):
            start = text.index(rest[0], pos)
            try:
                value, stop = _DECODER.raw_decode(text, start)
            except JSONDecodeError as error:
                raise SyntaxError(
                    error.msg, (None, error.lineno, error.colno, line)
                ) from error
            entries.append((name, value, additive))
            lineno += text.count("\n", pos, stop)
            pos = stop
            continue

        entries.append((name, _scalar(rest), additive))
        pos = end + 1
        lineno += 1

    return entries


def _scalar(value: str) -> Any:
    if value in ("true", "false", "null"):
        return json.loads(value)
    if looks_like_number(value):
        return int(value)
    return value


def add(conf: Dict[str, Any], var: str, val: Any) -> None:
    """Append val to the setting, turning scalars into lists"""
    if var not in conf or conf[var] is None:
        conf[var] = val
        return

    if isinstance(val, dict) and isinstance(conf[var], dict):
        conf[var].update(val)
        return

    if not isinstance(conf[var], list):
        conf[var] = [conf[var]]
    if isinstance(val, list):
        conf[var] += val
    else:
        conf[var].append(val)
