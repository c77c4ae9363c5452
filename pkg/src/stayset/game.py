"""Turn-based stochastic games with per-player safety objectives.

Players are numbered from 1.  Probabilities are :class:`fractions.Fraction`
throughout; nothing in this module ever rounds.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

Rational = Fraction


class GameFormatError(ValueError):
    """Malformed game, profile or memory text (syntax or structure)."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


class ProfileMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.location}: {self.message}"


@dataclass(frozen=True, eq=True)
class GameSpec:
    """A finite turn-based game.

    ``controller[s]`` is a player index or ``None`` for an uncontrolled
    (pass-through or absorbing) state.  ``law`` is keyed by ``(state, action)``
    for controlled states and ``(state, None)`` for uncontrolled ones.
    """

    players: int
    states: tuple
    initial: str
    controller: Mapping[str, Optional[int]]
    actions: Mapping[str, tuple]
    law: Mapping[tuple, Mapping[str, Fraction]]
    safe_sets: tuple

    __hash__ = None  # mappings inside; equality only

    def controlled_states(self, player: Optional[int] = None) -> list:
        return [s for s in self.states
                if self.controller.get(s) is not None
                and (player is None or self.controller[s] == player)]

    def is_absorbing(self, state: str) -> bool:
        if self.controller.get(state) is not None:
            return False
        return dict(self.law.get((state, None), {})) == {state: Fraction(1)}

    def unsafe(self, player: int) -> frozenset:
        return frozenset(self.states) - self.safe_sets[player - 1]

    def replace_law(self, key: tuple, dist: Mapping[str, Fraction]) -> "GameSpec":
        law = dict(self.law)
        law[key] = dict(dist)
        return GameSpec(self.players, self.states, self.initial, self.controller,
                        self.actions, law, self.safe_sets)

    def with_initial(self, initial: str) -> "GameSpec":
        return GameSpec(self.players, self.states, initial, self.controller,
                        self.actions, self.law, self.safe_sets)


@dataclass(frozen=True)
class StationaryProfile:
    """Per controlled state, a distribution over that state's actions."""

    choice: Mapping[str, Mapping[str, Fraction]]

    __hash__ = None

    def __getitem__(self, state: str) -> Mapping[str, Fraction]:
        return self.choice[state]


@dataclass(frozen=True)
class MemoryProfile:
    """Public finite-memory profile.

    ``update[(m, t)]`` is the memory after entering game state ``t`` while in
    memory ``m``; ``behavior[m]`` is the stationary profile played in ``m``.
    """

    memories: tuple
    start: str
    update: Mapping[tuple, str]
    behavior: Mapping[str, StationaryProfile]

    __hash__ = None

    @classmethod
    def constant(cls, profile: StationaryProfile, spec: GameSpec, name: str = "m") -> "MemoryProfile":
        return cls((name,), name, {(name, s): name for s in spec.states}, {name: profile})


@dataclass(frozen=True)
class PayoffMatrix:
    """``entries[(i, j)]``: payoff of player ``i`` when play starts in ``j``."""

    entries: Mapping[tuple, Fraction]

    __hash__ = None

    def __getitem__(self, key: tuple):
        return self.entries[key]

    def u(self, player: int, state: str):
        return self.entries[(player, state)]


# -- validation ---------------------------------------------------------------

def _fmt(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def validate_game(spec: GameSpec) -> list:
    """Return every invariant violation of ``spec``; an empty list means valid."""
    out = []
    states = list(spec.states)
    known = set(states)
    if spec.players < 1:
        out.append(Violation("players", f"player count {spec.players} < 1"))
    if len(known) != len(states):
        dups = sorted({s for s in states if states.count(s) > 1})
        out.append(Violation("states", f"duplicate states {dups}"))
    if spec.initial not in known:
        out.append(Violation("initial", f"unknown initial state {spec.initial!r}"))

    for s in states:
        if s not in spec.controller:
            out.append(Violation(f"controller[{s}]", "state has no controller entry"))
            continue
        c = spec.controller[s]
        if c is not None and not (isinstance(c, int) and 1 <= c <= spec.players):
            out.append(Violation(f"controller[{s}]", f"invalid player {c!r}"))
    for s in spec.controller:
        if s not in known:
            out.append(Violation(f"controller[{s}]", "unknown state"))

    expected_keys = []
    for s in states:
        c = spec.controller.get(s)
        acts = spec.actions.get(s)
        if c is None:
            if acts:
                out.append(Violation(f"actions[{s}]", "uncontrolled state declares actions"))
            expected_keys.append((s, None))
            continue
        if not acts:
            out.append(Violation(f"actions[{s}]", "controlled state has no actions"))
            continue
        if len(set(acts)) != len(acts):
            out.append(Violation(f"actions[{s}]", "duplicate action names"))
        for a in acts:
            if "." in a:
                out.append(Violation(f"actions[{s}]", f"action name {a!r} contains '.'"))
            expected_keys.append((s, a))
    for s in spec.actions:
        if s not in known:
            out.append(Violation(f"actions[{s}]", "unknown state"))

    for key in expected_keys:
        if key not in spec.law:
            out.append(Violation(f"law[{_key_name(key)}]", "missing distribution"))
    for key, dist in spec.law.items():
        loc = f"law[{_key_name(key)}]"
        if key not in expected_keys:
            out.append(Violation(loc, "no such state/action"))
            continue
        total = Fraction(0)
        for t, p in dist.items():
            if t not in known:
                out.append(Violation(loc, f"unknown successor {t!r}"))
            if not isinstance(p, Fraction):
                out.append(Violation(loc, f"probability {p!r} is not a rational"))
                continue
            if p < 0 or p > 1:
                out.append(Violation(loc, f"probability {_fmt(p)} for {t!r} out of [0,1]"))
            total += p
        if total != 1:
            out.append(Violation(loc, f"distribution sums to {_fmt(total)} ≠ 1"))

    if len(spec.safe_sets) != spec.players:
        out.append(Violation("safe_sets", f"{len(spec.safe_sets)} safe sets for {spec.players} players"))
    for i, g in enumerate(spec.safe_sets, start=1):
        extra = sorted(set(g) - known)
        if extra:
            out.append(Violation(f"safe_sets[{i}]", f"unknown states {extra}"))
    return out


def validate_profile(spec: GameSpec, profile: StationaryProfile) -> list:
    out = []
    controlled = spec.controlled_states()
    for s in controlled:
        if s not in profile.choice:
            out.append(Violation(f"profile[{s}]", "missing distribution"))
            continue
        dist = profile.choice[s]
        acts = spec.actions[s]
        total = Fraction(0)
        for a, p in dist.items():
            if a not in acts:
                out.append(Violation(f"profile[{s}]", f"unknown action {a!r}"))
            if p < 0 or p > 1:
                out.append(Violation(f"profile[{s}]", f"probability {_fmt(Fraction(p))} out of [0,1]"))
            total += p
        if total != 1:
            out.append(Violation(f"profile[{s}]", f"distribution sums to {_fmt(Fraction(total))} ≠ 1"))
    for s in profile.choice:
        if s not in controlled:
            out.append(Violation(f"profile[{s}]", "not a controlled state"))
    return out


def validate_memory_profile(spec: GameSpec, mp: MemoryProfile) -> list:
    out = []
    mems = set(mp.memories)
    if mp.start not in mems:
        out.append(Violation("start", f"unknown memory {mp.start!r}"))
    for m in mp.memories:
        for s in spec.states:
            nxt = mp.update.get((m, s))
            if nxt is None:
                out.append(Violation(f"update[{m},{s}]", "missing"))
            elif nxt not in mems:
                out.append(Violation(f"update[{m},{s}]", f"unknown memory {nxt!r}"))
        if m not in mp.behavior:
            out.append(Violation(f"behavior[{m}]", "missing"))
        else:
            out.extend(Violation(f"behavior[{m}].{v.location}", v.message)
                       for v in validate_profile(spec, mp.behavior[m]))
    return out


def _key_name(key: tuple) -> str:
    s, a = key
    return s if a is None else f"{s}.{a}"


# -- the counterexample game --------------------------------------------------

def build_game_G() -> GameSpec:
    """The two-player quitting game with no stationary Nash equilibrium.

    Quitting succeeds with probability 3/4.  Player 1's quit ends in W with
    1/2 and L with 1/4; Player 2's quit ends in W with 1/4 and L with 1/2.
    Player 2's continue risks a visit to L2, which only Player 2 considers
    unsafe.
    """
    q = Fraction
    law = {
        ("1", "c"): {"2": q(1)},
        ("1", "q"): {"W": q(1, 2), "L": q(1, 4), "2": q(1, 4)},
        ("2", "c"): {"1": q(3, 4), "L2": q(1, 4)},
        ("2", "q"): {"W": q(1, 4), "L": q(1, 2), "1": q(1, 4)},
        ("W", None): {"W": q(1)},
        ("L", None): {"L": q(1)},
        ("L2", None): {"1": q(1)},
    }
    return GameSpec(
        players=2,
        states=("1", "2", "W", "L", "L2"),
        initial="1",
        controller={"1": 1, "2": 2, "W": None, "L": None, "L2": None},
        actions={"1": ("c", "q"), "2": ("c", "q")},
        law=law,
        safe_sets=(frozenset({"1", "2", "W", "L2"}), frozenset({"1", "2", "W"})),
    )


def build_modified_game(variant: str) -> GameSpec:
    """G with L2 made terminal for Player 1.

    ``"continue-at-L2"`` pays Player 1 the value 1 on entering L2, and
    ``"quit-at-L2"`` pays 3/5, realised as a coin into W or L.
    """
    g = build_game_G()
    if variant == "continue-at-L2":
        dist = {"W": Fraction(1)}
    elif variant == "quit-at-L2":
        dist = {"W": Fraction(3, 5), "L": Fraction(2, 5)}
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return g.replace_law(("L2", None), dist)


def g_profile(p1, p2) -> StationaryProfile:
    """Profile of G where player i quits with probability ``p_i``."""
    p1, p2 = Fraction(p1), Fraction(p2)
    return StationaryProfile({"1": {"c": 1 - p1, "q": p1}, "2": {"c": 1 - p2, "q": p2}})


def g_memory_profile(before: tuple, after: tuple) -> MemoryProfile:
    """Switch from ``before`` to ``after`` (each a ``(p1, p2)`` pair) on entering L2."""
    g = build_game_G()
    update = {(m, s): m for m in ("before", "after") for s in g.states}
    update[("before", "L2")] = "after"
    return MemoryProfile(("before", "after"), "before", update,
                         {"before": g_profile(*before), "after": g_profile(*after)})


# -- text formats -------------------------------------------------------------

_PROB = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text: str, where: str = "") -> Fraction:
    m = _PROB.match(text) if isinstance(text, str) else None
    if not m:
        raise GameFormatError(f"{where}: bad probability {text!r}, expected 'p/q' or 'p'")
    num, den = int(m.group(1)), int(m.group(2) or 1)
    if den == 0:
        raise GameFormatError(f"{where}: zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None


def _expect(cond: bool, message: str):
    if not cond:
        raise GameFormatError(message)


_GAME_FIELDS = {"players", "states", "initial", "controller", "actions", "law", "safe_sets"}


def parse_game(text: str) -> GameSpec:
    """Parse the JSON game format.

    Structural problems raise :class:`GameFormatError`; semantic ones (sums,
    ranges, membership) are left for :func:`validate_game`.
    """
    doc = _loads(text)
    _expect(isinstance(doc, dict), "top level must be an object")
    unknown = set(doc) - _GAME_FIELDS
    _expect(not unknown, f"unknown fields {sorted(unknown)}")
    missing = {"players", "states", "initial", "controller", "law", "safe_sets"} - set(doc)
    _expect(not missing, f"missing fields {sorted(missing)}")

    players = doc["players"]
    _expect(isinstance(players, int) and not isinstance(players, bool), "players must be an integer")
    states = doc["states"]
    _expect(isinstance(states, list) and all(isinstance(s, str) for s in states),
            "states must be an array of strings")
    _expect(isinstance(doc["initial"], str), "initial must be a string")

    _expect(isinstance(doc["controller"], dict), "controller must be an object")
    controller = {}
    for s, c in doc["controller"].items():
        if c == "none":
            controller[s] = None
        else:
            _expect(isinstance(c, int) and not isinstance(c, bool),
                    f"controller[{s}] must be a player index or \"none\"")
            controller[s] = c

    raw_actions = doc.get("actions", {})
    _expect(isinstance(raw_actions, dict), "actions must be an object")
    actions = {}
    for s, acts in raw_actions.items():
        _expect(isinstance(acts, list) and all(isinstance(a, str) for a in acts),
                f"actions[{s}] must be an array of strings")
        actions[s] = tuple(acts)

    _expect(isinstance(doc["law"], dict), "law must be an object")
    law = {}
    state_set = set(states)
    for key, dist in doc["law"].items():
        if key in state_set:
            lk = (key, None)
        else:
            s, dot, a = key.rpartition(".")
            _expect(bool(dot), f"law key {key!r} is neither a state nor 'state.action'")
            lk = (s, a)
        _expect(isinstance(dist, dict), f"law[{key}] must be an object")
        law[lk] = {t: parse_rational(p, f"law[{key}][{t}]") for t, p in dist.items()}

    safe = doc["safe_sets"]
    _expect(isinstance(safe, list) and all(isinstance(g, list) for g in safe),
            "safe_sets must be an array of arrays")
    return GameSpec(players, tuple(states), doc["initial"], controller, actions, law,
                    tuple(frozenset(g) for g in safe))


def serialize_game(spec: GameSpec) -> str:
    order = {s: k for k, s in enumerate(spec.states)}
    law = {}
    for key, dist in spec.law.items():
        law[_key_name(key)] = {t: str(p) for t, p in dist.items()}
    doc = {
        "players": spec.players,
        "states": list(spec.states),
        "initial": spec.initial,
        "controller": {s: ("none" if spec.controller[s] is None else spec.controller[s])
                       for s in spec.controller},
        "actions": {s: list(a) for s, a in spec.actions.items()},
        "law": law,
        "safe_sets": [sorted(g, key=lambda s: (order.get(s, len(order)), s)) for g in spec.safe_sets],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _complete(spec: GameSpec, state: str, given: dict, where: str) -> dict:
    acts = spec.actions.get(state)
    _expect(bool(acts), f"{where}: {state!r} is not a controlled state")
    for a in given:
        _expect(a in acts, f"{where}: unknown action {a!r} at state {state!r}")
    dist = {a: given.get(a, Fraction(0)) for a in acts}
    rest = 1 - sum(given.values(), Fraction(0))
    if acts[0] not in given:
        dist[acts[0]] = rest
    return dist


def parse_profile(spec: GameSpec, text: str) -> StationaryProfile:
    """Parse ``"1:q=1;2:q=1/4"``.

    Unmentioned mass at a state goes to its first declared action; states
    not mentioned at all play their first action.
    """
    given = {s: {} for s in spec.controlled_states()}
    for part in filter(None, (p.strip() for p in text.split(";"))):
        m = re.match(r"^([^:]+):([^=]+)=(.+)$", part)
        _expect(m is not None, f"profile entry {part!r} is not 'state:action=prob'")
        s, a, p = (g.strip() for g in m.groups())
        _expect(s in given, f"profile: {s!r} is not a controlled state")
        given[s][a] = parse_rational(p, f"profile[{s}.{a}]")
    return StationaryProfile({s: _complete(spec, s, d, "profile") for s, d in given.items()})


def profile_from_object(spec: GameSpec, obj, where: str = "profile") -> StationaryProfile:
    _expect(isinstance(obj, dict), f"{where} must be an object")
    given = {s: {} for s in spec.controlled_states()}
    for s, dist in obj.items():
        _expect(s in given, f"{where}: {s!r} is not a controlled state")
        _expect(isinstance(dist, dict), f"{where}[{s}] must be an object")
        given[s] = {a: parse_rational(p, f"{where}[{s}][{a}]") for a, p in dist.items()}
    return StationaryProfile({s: _complete(spec, s, d, where) for s, d in given.items()})


def parse_memory_profile(spec: GameSpec, text: str) -> MemoryProfile:
    doc = _loads(text)
    _expect(isinstance(doc, dict), "memory profile must be an object")
    unknown = set(doc) - {"memories", "start", "update", "behavior"}
    _expect(not unknown, f"unknown fields {sorted(unknown)}")
    mems = doc.get("memories")
    _expect(isinstance(mems, list) and mems and all(isinstance(m, str) for m in mems),
            "memories must be a nonempty array of strings")
    start = doc.get("start", mems[0])
    _expect(isinstance(start, str), "start must be a string")
    update = {(m, s): m for m in mems for s in spec.states}
    for key, nxt in doc.get("update", {}).items():
        m, comma, s = key.partition(",")
        _expect(bool(comma) and isinstance(nxt, str), f"update key {key!r} must be 'memory,state'")
        update[(m.strip(), s.strip())] = nxt
    beh = doc.get("behavior")
    _expect(isinstance(beh, dict), "behavior must be an object")
    behavior = {m: profile_from_object(spec, obj, f"behavior[{m}]") for m, obj in beh.items()}
    return MemoryProfile(tuple(mems), start, update, behavior)


def serialize_memory_profile(mp: MemoryProfile) -> str:
    doc = {
        "memories": list(mp.memories),
        "start": mp.start,
        "update": {f"{m},{s}": n for (m, s), n in mp.update.items() if n != m},
        "behavior": {m: {s: {a: str(p) for a, p in d.items()} for s, d in prof.choice.items()}
                     for m, prof in mp.behavior.items()},
    }
    return json.dumps(doc, indent=2) + "\n"
