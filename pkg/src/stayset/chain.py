"""Exact evaluation of stationary and finite-memory profiles.

A profile turns the game into a Markov chain; safety payoffs are one minus
the probability of ever reaching a player's unsafe states.  Reach
probabilities come from an exact linear solve after the states that cannot
reach the target have been pinned to zero by graph search.  That graph step
is what makes ``u11`` jump to 1 at ``(0, 0)`` in G: no limits are taken.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

import numpy as np

from .game import (GameSpec, MemoryProfile, PayoffMatrix, ProfileMismatchError,
                   StationaryProfile, validate_memory_profile, validate_profile)
from .linalg import solve

FLOAT_TOL = 1e-12


class MassLeakError(ValueError):
    """An excursion can be absorbed outside win, lose and the origin."""


@dataclass(frozen=True)
class MarkovChain:
    states: tuple
    rows: Mapping[Hashable, Mapping[Hashable, Fraction]]

    __hash__ = None

    def row(self, state) -> Mapping:
        return self.rows[state]

    def successors(self, state) -> list:
        return [t for t, p in self.rows[state].items() if p > 0]


@dataclass(frozen=True)
class FirstPassageSplit:
    win: Fraction
    lose: Fraction
    return_: Fraction


def _mix(spec: GameSpec, state: str, dist: Mapping[str, Fraction]) -> dict:
    row = {}
    for a, w in dist.items():
        if w == 0:
            continue
        for t, p in spec.law[(state, a)].items():
            row[t] = row.get(t, 0) + w * p
    return row


def _game_row(spec: GameSpec, state: str, profile: StationaryProfile) -> dict:
    if spec.controller[state] is None:
        return dict(spec.law[(state, None)])
    return _mix(spec, state, profile.choice[state])


def induced_chain(spec: GameSpec, profile: StationaryProfile) -> MarkovChain:
    """Mix each controlled state's action rows by the profile's weights."""
    bad = validate_profile(spec, profile)
    if bad:
        raise ProfileMismatchError("; ".join(map(str, bad)))
    return MarkovChain(spec.states, {s: _game_row(spec, s, profile) for s in spec.states})


def product_chain(spec: GameSpec, mp: MemoryProfile) -> MarkovChain:
    """Chain on ``(state, memory)`` pairs; memory updates on every entered state."""
    bad = validate_memory_profile(spec, mp)
    if bad:
        raise ProfileMismatchError("; ".join(map(str, bad)))
    labels = tuple((s, m) for m in mp.memories for s in spec.states)
    rows = {}
    for s, m in labels:
        row = {}
        for t, p in _game_row(spec, s, mp.behavior[m]).items():
            key = (t, mp.update[(m, t)])
            row[key] = row.get(key, 0) + p
        rows[(s, m)] = row
    return MarkovChain(labels, rows)


def can_reach(chain: MarkovChain, target: Iterable) -> set:
    """States with a positive-probability path into ``target``."""
    pred = {s: [] for s in chain.states}
    for s in chain.states:
        for t in chain.successors(s):
            pred[t].append(s)
    seen = set(target)
    queue = deque(seen)
    while queue:
        t = queue.popleft()
        for s in pred[t]:
            if s not in seen:
                seen.add(s)
                queue.append(s)
    return seen


def reach_probability(chain: MarkovChain, target: Iterable, exact: bool = True) -> dict:
    """P(eventually hit ``target`` | start in s) for every state s."""
    target = set(target)
    unknown_states = set(target) - set(chain.states)
    if unknown_states:
        raise ValueError(f"target states not in chain: {sorted(map(str, unknown_states))}")
    live = can_reach(chain, target)
    one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
    value = {s: (one if s in target else zero) for s in chain.states}
    free = [s for s in chain.states if s in live and s not in target]
    if not free:
        return value
    index = {s: k for k, s in enumerate(free)}
    a, b = [], []
    for s in free:
        row = {index[s]: Fraction(1)}
        rhs = Fraction(0)
        for t, p in chain.rows[s].items():
            if t in target:
                rhs += p
            elif t in index:
                row[index[t]] = row.get(index[t], 0) - p
        a.append(row)
        b.append(rhs)
    if exact:
        x = solve(a, b)
    else:
        dense = np.zeros((len(free), len(free)))
        for i, row in enumerate(a):
            for j, v in row.items():
                dense[i, j] = float(v)
        x = np.linalg.solve(dense, np.array([float(v) for v in b])).tolist()
    for s, v in zip(free, x):
        value[s] = v
    return value


def safety_values(chain: MarkovChain, unsafe: Iterable, exact: bool = True) -> dict:
    """P(never visit ``unsafe``) from every state; zero on ``unsafe`` itself."""
    reach = reach_probability(chain, unsafe, exact)
    return {s: 1 - r for s, r in reach.items()}


def safety_payoff(spec: GameSpec, profile: StationaryProfile, exact: bool = True) -> PayoffMatrix:
    """All ``u[i, j]`` for the stationary ``profile``."""
    chain = induced_chain(spec, profile)
    entries = {}
    for i in range(1, spec.players + 1):
        vals = safety_values(chain, spec.unsafe(i), exact)
        for j in spec.states:
            entries[(i, j)] = vals[j]
    return PayoffMatrix(entries)


def memory_payoff(spec: GameSpec, mp: MemoryProfile, exact: bool = True) -> PayoffMatrix:
    """``u[i, j]`` for play started at ``(j, start memory)`` of the product chain."""
    chain = product_chain(spec, mp)
    entries = {}
    for i in range(1, spec.players + 1):
        bad = spec.unsafe(i)
        vals = safety_values(chain, [x for x in chain.states if x[0] in bad], exact)
        for j in spec.states:
            entries[(i, j)] = vals[(j, mp.start)]
    return PayoffMatrix(entries)


def first_passage_split(chain: MarkovChain, origin, win_set: Iterable, lose_set: Iterable) -> FirstPassageSplit:
    """Split one excursion from ``origin`` into win, loss and return.

    Raises :class:`MassLeakError` when part of the excursion's mass is
    absorbed somewhere other than the three outcomes.
    """
    win, lose = set(win_set), set(lose_set)
    if win & lose:
        raise ValueError("win and lose sets overlap")
    if origin in win or origin in lose:
        raise ValueError("origin must lie outside the win and lose sets")
    # Re-entering the origin is an outcome: route it to a fresh absorbing copy.
    home = ("__return__", origin)
    stop = win | lose
    rows = {}
    for s in chain.states:
        if s in stop:
            rows[s] = {s: Fraction(1)}
            continue
        src = chain.rows[s]
        rows[s] = {(home if t == origin else t): p for t, p in src.items()}
    rows[home] = {home: Fraction(1)}
    cut = MarkovChain(tuple(chain.states) + (home,), rows)
    p_win = reach_probability(cut, win) if win else {}
    p_lose = reach_probability(cut, lose) if lose else {}
    p_ret = reach_probability(cut, [home])

    def excursion(vals):
        return sum((p * vals.get(t, 0) for t, p in rows[origin].items()), Fraction(0))

    split = FirstPassageSplit(excursion(p_win), excursion(p_lose), excursion(p_ret))
    total = split.win + split.lose + split.return_
    if total != 1:
        raise MassLeakError(f"excursion from {origin!r} leaks mass {1 - total}")
    return split
