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

"""Command line: validate, solve, dynamics, certify, approx and gadget"""

import getopt
import logging
import sys
from logging import config as logging_config
from random import Random
from typing import Any, Dict, List, Optional, Tuple

from Mixcon import document, dynamics, equilibrium, gadgets, readconf
from Mixcon.constants import CONFIG_DEFAULTS
from Mixcon.exceptions import (
    CapExceeded,
    DocumentError,
    EnumException,
    IntractableBestResponse,
    InvalidGame,
    InvalidState,
    MixconError,
    NotApplicable,
    ReductionError,
    SolverError,
)
from Mixcon.game import Game, State, random_state, validate
from Mixcon.typing import (
    ExitCode,
    MoveRule,
    PotentialKind,
    SchedulerKind,
    SolveMethod,
    Verdict,
)
from Mixcon.util import parse_fraction

log = logging.getLogger(__name__)

RULE_ALIASES = {
    "better": MoveRule.better_response,
    "best": MoveRule.best_response,
    "lazy": MoveRule.lazy_best_response,
}

SCHED_ALIASES = {"rr": "round_robin", "maxgain": "max_gain"}

VERDICT_EXIT = {
    Verdict.converged: ExitCode.ok,
    Verdict.cycle: ExitCode.cycle,
    Verdict.step_cap: ExitCode.step_cap,
}

USAGE = """Usage: mixcon [--config FILE] [--SETTING VALUE]... COMMAND [ARGS]

Options:

  --help                Show this help message and exit.
  --config FILE         Configuration file of NAME=VALUE lines.
  --enum-cap N          Largest state product enumerated (default 10^7).
  --basis-cap N         Largest matroid ground set expanded (default 16).
  --dominance-cap N     Opponent profiles examined per player when pruning.
  --exchange-cap N      Largest listed matroid checked for basis exchange.
  --workers N           Processes for enumeration and sweeps.
  --debug               Log at DEBUG level.

Commands:

  validate FILE         Print rule violations; exit 1 if there are any,
                        else print the derived flags.  The commands
                        below refuse a game with violations.

  solve FILE [--method auto|enumerate|singleton|pure-pref|monotone]
             [--workers N]
                        Find a pure equilibrium.  Exit 0 found,
                        2 none exists, 3 inconclusive.

  dynamics FILE --start STATE|random [--rule better|best|lazy]
             [--sched rr|random|maxgain] [--seed N] [--max-steps N]
                        Print the trace.  Exit 0 converged, 4 cycle,
                        5 step cap.

  certify FILE --state STATE [--beta P/Q] [--squared]
                        Exit 0 if STATE is a beta-approximate
                        equilibrium, else 1.  --squared compares
                        beta against the square of the factor.

  approx FILE --potential mixed|square|sum|rank|matroid [--start STATE]
                        Approximate equilibrium with the guaranteed
                        factor of the route.

  gadget thm2|thm2-restricted|thm4a|thm4b|thm5|thm7 [-o FILE]
  gadget is-reduction --graph EDGELIST -k K [-o FILE]
                        Write a built game document.

STATE is one comma separated token per player: a strategy index, or
matroid resources joined by '+'."""


class CmdLine:
    """Command Line interface"""

    def __init__(self, argv: List[str], conf: Optional[Dict[str, Any]] = None):
        self.argv = argv
        if conf is None:
            self.conf = {}
        else:
            self.conf = conf.copy()

    def usage(self) -> str:
        """usage"""
        return "Sorry, no help is available."

    def init(self) -> Tuple[Optional[readconf.Args], List[str]]:
        """Settings and the remaining arguments; (None, []) after --help"""
        self.conf.update(CONFIG_DEFAULTS)

        args, argv = readconf.parse_argv(self.argv, self.conf, strict=False)
        if not argv or argv[0] in ("-h", "--help"):
            print(self.usage())
            return None, []

        logging.basicConfig(
            stream=sys.stderr,
            level=logging.DEBUG if args.debug else logging.INFO,
            format="%(levelname)s: %(name)s: %(message)s",
        )
        if args.logging is not None:
            logging_config.dictConfig(args.logging)
        return args, argv


def _options(argv: List[str], short: str, long: List[str]) -> Tuple[Dict[str, str], List[str]]:
    opts, rest = getopt.gnu_getopt(argv, short, long)
    return {opt.lstrip("-"): arg for opt, arg in opts}, rest


def _one_file(args, rest: List[str]) -> Game:
    if len(rest) != 1:
        raise getopt.GetoptError("expected exactly one game file")
    return document.load_game(rest[0], args.exchange_cap)


def _valid_file(args, rest: List[str]) -> Game:
    game = _one_file(args, rest)
    problems = validate(game)
    if problems:
        raise InvalidGame(problems)
    return game


def _start(game: Game, text: Optional[str], seed: int, basis_cap: int) -> State:
    if text is None:
        raise getopt.GetoptError("--start is required")
    if text == "random":
        return random_state(game, Random(seed), basis_cap)
    return document.parse_state(game, text)


def cmd_validate(args, argv: List[str]) -> int:
    _, rest = _options(argv, "", [])
    game = _one_file(args, rest)
    problems = validate(game)
    for problem in problems:
        print(problem)
    if problems:
        return ExitCode.fail
    print(f"ok: {game.n} players, {game.m} resources")
    flags = game.flags()
    print(" ".join(f"{name}={str(flags[name]).lower()}" for name in flags))
    return ExitCode.ok


def cmd_solve(args, argv: List[str]) -> int:
    opts, rest = _options(argv, "", ["method=", "workers="])
    game = _valid_file(args, rest)
    method = SolveMethod.parse(opts.get("method", "auto"))
    workers = int(opts.get("workers", args.workers))
    try:
        result = equilibrium.solve(
            game,
            method,
            cap=args.enum_cap,
            dominance_cap=args.dominance_cap,
            workers=workers,
            basis_cap=args.basis_cap,
            chunk_size=args.chunk_size,
        )
    except (CapExceeded, IntractableBestResponse, SolverError) as error:
        print(f"inconclusive: {error}")
        return ExitCode.inconclusive
    if result.state is None:
        print(f"no pure Nash equilibrium ({result.route})")
        return ExitCode.no_equilibrium
    print(f"route={result.route}")
    print(f"state={document.format_state(game, result.state)}")
    print(result.certificate.line(game))  # type: ignore[union-attr]
    return ExitCode.ok


def cmd_dynamics(args, argv: List[str]) -> int:
    opts, rest = _options(
        argv, "", ["start=", "rule=", "sched=", "seed=", "max-steps="]
    )
    game = _valid_file(args, rest)
    seed = int(opts.get("seed", args.seed))
    start = _start(game, opts.get("start"), seed, args.basis_cap)

    rule = None
    if "rule" in opts:
        rule = RULE_ALIASES.get(opts["rule"])
        if rule is None:
            rule = MoveRule.parse(opts["rule"])
    sched_name = opts.get("sched", "rr")
    kind = SchedulerKind.parse(SCHED_ALIASES.get(sched_name, sched_name))
    scheduler = dynamics.Scheduler(kind, seed)

    trace = dynamics.run_dynamics(
        game,
        start,
        rule,
        scheduler,
        int(opts.get("max-steps", args.max_steps)),
        args.basis_cap,
    )
    for line in trace.lines(game):
        print(line)
    return VERDICT_EXIT[trace.verdict]


def cmd_certify(args, argv: List[str]) -> int:
    opts, rest = _options(argv, "", ["state=", "beta=", "squared"])
    game = _valid_file(args, rest)
    if "state" not in opts:
        raise getopt.GetoptError("--state is required")
    state = document.parse_state(game, opts["state"])
    beta = parse_fraction(opts.get("beta", "1"))
    certificate = equilibrium.certify(
        game, state, beta, "squared" in opts, args.basis_cap
    )
    print(certificate.line(game))
    return ExitCode.ok if certificate.passed else ExitCode.fail


def cmd_approx(args, argv: List[str]) -> int:
    opts, rest = _options(argv, "", ["potential=", "start="])
    game = _valid_file(args, rest)
    kind = PotentialKind.parse(opts.get("potential", "matroid"))
    start = None
    if "start" in opts:
        start = _start(game, opts["start"], args.seed, args.basis_cap)
    certificate = equilibrium.approx_solve(
        game,
        kind,
        start,
        max_steps=args.approx_max_steps,
        basis_cap=args.basis_cap,
        budget=args.probe_budget,
        bfs_cap=args.bfs_cap,
        enum_cap=args.enum_cap,
    )
    print(f"state={document.format_state(game, certificate.state)}")
    print(certificate.line(game))
    print(f"steps={certificate.steps}")
    return ExitCode.ok


def cmd_gadget(args, argv: List[str]) -> int:
    opts, rest = _options(argv, "o:k:", ["graph="])
    if len(rest) != 1:
        raise getopt.GetoptError("expected one gadget name")
    name = rest[0]
    if name == "is-reduction":
        if "graph" not in opts or "k" not in opts:
            raise getopt.GetoptError("is-reduction needs --graph and -k")
        with open(opts["graph"], encoding="UTF-8") as fp:
            instance = gadgets.GraphInstance.from_edgelist(fp, int(opts["k"]))
        game = gadgets.build_is_reduction(instance)
    elif name in gadgets.BUILDERS:
        game = gadgets.BUILDERS[name]()
    else:
        raise getopt.GetoptError(
            f"unknown gadget {name!r}; expected is-reduction or "
            + ", ".join(gadgets.BUILDERS)
        )
    if "o" in opts:
        document.save_game(game, opts["o"])
        log.info("wrote %s to %s", game.name, opts["o"])
    else:
        sys.stdout.write(document.dump_game(game))
    return ExitCode.ok


COMMANDS = {
    "validate": cmd_validate,
    "solve": cmd_solve,
    "dynamics": cmd_dynamics,
    "certify": cmd_certify,
    "approx": cmd_approx,
    "gadget": cmd_gadget,
}


def main(argv: List[str]) -> int:
    """main"""
    cmdline = CmdLine(argv)
    cmdline.usage = lambda: USAGE  # type: ignore[method-assign]

    args, argv = cmdline.init()
    if args is None:
        return ExitCode.ok

    command = argv.pop(0)
    handler = COMMANDS.get(command)
    if handler is None:
        print(f"Unknown command: {command}\n\n{cmdline.usage()}")
        return ExitCode.fail
    try:
        return handler(args, argv)
    except getopt.GetoptError as error:
        print(f"{error.msg}\n\n{cmdline.usage()}")
        return ExitCode.fail
    except InvalidGame as error:
        print(f"error: {error}")
        for problem in error.violations:
            print(problem)
        return ExitCode.fail
    except (
        DocumentError,
        EnumException,
        InvalidState,
        NotApplicable,
        ReductionError,
    ) as error:
        print(f"error: {error}")
        return ExitCode.fail
    except OSError as error:
        print(f"error: {error}")
        return ExitCode.fail
    except MixconError as error:
        log.error("%s failed: %s", command, error)
        return ExitCode.fail


def main_entry() -> None:
    """Console script"""
    try:
        sys.exit(main(sys.argv[1:]))
    except KeyboardInterrupt:
        print("\rInterrupted!", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main_entry()
