"""``stayset`` command line.

Exit codes: 0 success, 1 a check or verdict failed, 2 bad usage or input.
"""
from __future__ import annotations

import argparse
import csv
import sys
from fractions import Fraction
from pathlib import Path

from . import reproduce
from .chain import memory_payoff, safety_payoff
from .game import (GameFormatError, ProfileMismatchError, build_game_G, format_rational,
                   parse_game, parse_memory_profile, parse_profile, parse_rational, validate_game)
from .response import (NonexistenceCheckError, best_response, check_epsilon_nash, check_memory_nash,
                       grid_scan, memory_best_response, min_exploitability, nonexistence_check_G)
from .simulate import simulate

BUILTIN = {"builtin:G": build_game_G}


class InputError(Exception):
    pass


def fmt(x, exact: bool = True) -> str:
    if isinstance(x, Fraction) and exact:
        return format_rational(x)
    return f"{float(x):.17g}"


def load_game(ref: str, check: bool = True):
    if ref in BUILTIN:
        spec = BUILTIN[ref]()
    else:
        try:
            spec = parse_game(Path(ref).read_text(encoding="utf-8"))
        except OSError as exc:
            raise InputError(f"cannot read game file: {exc}") from None
    if check:
        bad = validate_game(spec)
        if bad:
            raise InputError("invalid game:\n  " + "\n  ".join(map(str, bad)))
    return spec


def load_profile(spec, args):
    """Either a memory profile (``--memory``) or a stationary one (``--profile``)."""
    if getattr(args, "memory", None):
        try:
            text = Path(args.memory).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read memory file: {exc}") from None
        return parse_memory_profile(spec, text)
    if args.profile is None:
        raise InputError("a --profile (or --memory) is required")
    return parse_profile(spec, args.profile)


def _is_memory(profile) -> bool:
    return hasattr(profile, "memories")


def _strategy(strategy: dict) -> str:
    def name(s):
        return f"{s[0]}@{s[1]}" if isinstance(s, tuple) else s
    return ",".join(f"{name(s)}:{a}" for s, a in strategy.items())


def cmd_validate(args) -> int:
    spec = load_game(args.game, check=False)
    bad = validate_game(spec)
    for v in bad:
        print(v)
    print("valid" if not bad else f"{len(bad)} violation(s)")
    return 1 if bad else 0


def cmd_eval(args) -> int:
    spec = load_game(args.game)
    prof = load_profile(spec, args)
    exact = not args.float
    u = memory_payoff(spec, prof, exact) if _is_memory(prof) else safety_payoff(spec, prof, exact)
    for i in range(1, spec.players + 1):
        for j in spec.states:
            print(f"u[{i},{j}] = {fmt(u.u(i, j), exact)}")
    return 0


def cmd_best_response(args) -> int:
    spec = load_game(args.game)
    prof = load_profile(spec, args)
    exact = not args.float
    fn = memory_best_response if _is_memory(prof) else best_response
    r = fn(spec, prof, args.player, exact)
    print(f"player {r.player}: value {fmt(r.value, exact)}")
    print(f"strategy {_strategy(r.strategy)}")
    print(f"indifferent {'yes' if r.indifferent else 'no'}")
    return 0


def cmd_check(args) -> int:
    spec = load_game(args.game)
    prof = load_profile(spec, args)
    exact = not args.float
    eps = parse_rational(args.epsilon, "--epsilon")
    fn = check_memory_nash if _is_memory(prof) else check_epsilon_nash
    cert = fn(spec, prof, eps, exact)
    print(f"profile {cert.description}")
    for i in cert.values:
        print(f"player {i}: value {fmt(cert.values[i], exact)}, best response {fmt(cert.best_values[i], exact)}"
              f" ({_strategy(cert.responses[i].strategy)}), gain {fmt(cert.gains[i], exact)}")
    print(f"epsilon {fmt(cert.epsilon, exact)}: {cert.verdict}")
    return 0 if cert.is_epsilon_nash else 1


def cmd_nonexistence(args) -> int:
    spec = load_game(args.game)
    try:
        claims = nonexistence_check_G(spec, args.resolution)
    except NonexistenceCheckError as exc:
        claims = exc.transcript
    for c in claims:
        print(f"{'PASS' if c.passed else 'FAIL'} ({c.key}) {c.statement}")
        for line in c.evidence:
            print(f"    {line}")
    if not all(c.passed for c in claims):
        return 1
    rows = grid_scan(spec, args.resolution, workers=args.threads)
    low, where = min_exploitability(rows)
    print(f"grid 1/{args.resolution}: min exploitability {fmt(low)} at "
          + ", ".join(f"({fmt(a)}, {fmt(b)})" for a, b in where))
    return 0 if low > 0 else 1


def cmd_scan(args) -> int:
    spec = load_game(args.game)
    rows = grid_scan(spec, args.resolution, exact=not args.float, workers=args.threads)
    exact_out = args.exact and not args.float
    cols = ("p1", "p2", "u11", "u21", "exploitability")
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\r\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([fmt(getattr(r, c), exact_out) for c in cols])
    finally:
        if args.out:
            out.close()
    if args.out:
        low, where = min_exploitability(rows)
        print(f"wrote {len(rows)} rows to {args.out}; min exploitability {fmt(low, not args.float)}")
    return 0


def cmd_simulate(args) -> int:
    spec = load_game(args.game)
    prof = load_profile(spec, args)
    rep = simulate(spec, prof, args.samples, args.horizon, args.seed, workers=args.threads)
    print(f"samples {rep.samples}, horizon {rep.horizon}, seed {rep.seed}, truncated {rep.truncated_count}")
    for i, (w, f, se) in enumerate(zip(rep.wins, rep.frequency, rep.stderr), start=1):
        print(f"player {i}: wins {w}, frequency {f:.17g}, stderr {se:.17g}")
    return 0


def cmd_paper(args) -> int:
    sections = [args.section] if args.section else list(reproduce.SECTIONS)
    results = reproduce.run_sections(sections)
    for sec, name, passed, detail in results:
        print(f"{'PASS' if passed else 'FAIL'} [{sec} {reproduce.SECTIONS[sec]}] {name}: {detail}")
    failed = sum(not r[2] for r in results)
    print(f"{len(results) - failed}/{len(results)} claims reproduced")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stayset", description="Analyse turn-based stay-in-a-set games.")
    sub = ap.add_subparsers(dest="command", required=True)

    def game_cmd(name, fn, help_, profile=False, memory=False):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--game", default="builtin:G", help="game JSON file or builtin:G (default)")
        if profile:
            p.add_argument("--profile", help='stationary profile, e.g. "1:q=1;2:q=1/4"')
        if memory:
            p.add_argument("--memory", help="memory-profile JSON file")
        p.set_defaults(func=fn)
        return p

    game_cmd("validate", cmd_validate, "report invariant violations")
    p = game_cmd("eval", cmd_eval, "exact payoffs u[i,j]", profile=True, memory=True)
    p.add_argument("--float", action="store_true", help="64-bit float mode")
    p = game_cmd("best-response", cmd_best_response, "best pure reply of one player", profile=True, memory=True)
    p.add_argument("--player", type=int, required=True)
    p.add_argument("--float", action="store_true")
    p = game_cmd("check", cmd_check, "epsilon-Nash certificate", profile=True, memory=True)
    p.add_argument("--epsilon", default="0", help="p/q (default 0)")
    p.add_argument("--float", action="store_true")
    p = game_cmd("nonexistence-g", cmd_nonexistence, "replay the no-stationary-equilibrium argument for G")
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--threads", type=int, default=None, help="worker processes (default: all cores)")
    p = game_cmd("scan", cmd_scan, "payoff/exploitability grid as CSV")
    p.add_argument("--resolution", type=int, required=True)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--exact", action="store_true", help="write p/q strings instead of decimals")
    p.add_argument("--float", action="store_true")
    p.add_argument("--threads", type=int, default=None)
    p = game_cmd("simulate", cmd_simulate, "seeded Monte Carlo play", profile=True, memory=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("paper", help="reproduce every quantitative claim about G")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--all", action="store_true", help="all sections (default)")
    g.add_argument("--section", choices=sorted(reproduce.SECTIONS))
    p.set_defaults(func=cmd_paper)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, GameFormatError, ProfileMismatchError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
