"""Best responses, exploitability and (epsilon-)Nash certificates.

Fixing every other player turns the game into an MDP for the deviator.
Maximising the safety probability is minimising the probability of reaching
the unsafe states, which we solve by strategy improvement with exact policy
evaluation.  States from which the deviator can avoid its unsafe set surely
are found first by a greatest-fixpoint computation; after that every policy
reaches the unsafe set or that sure-safe region almost surely, so strategy
improvement terminates at the optimum.
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping, Optional

from . import closed_form as cf
from .chain import (FLOAT_TOL, MarkovChain, _game_row, first_passage_split, induced_chain,
                    memory_payoff, reach_probability, safety_payoff)
from .game import (GameSpec, MemoryProfile, ProfileMismatchError, StationaryProfile,
                   build_game_G, g_profile, validate_memory_profile, validate_profile)


@dataclass
class BestResponseResult:
    player: int
    value: Fraction
    strategy: dict
    indifferent: bool


@dataclass
class EquilibriumCertificate:
    description: str
    epsilon: Fraction
    values: dict
    best_values: dict
    gains: dict
    responses: dict = field(repr=False)

    @property
    def verdict(self) -> str:
        return "epsilon-nash" if self.is_epsilon_nash else "not-epsilon-nash"

    @property
    def is_epsilon_nash(self) -> bool:
        return all(g <= self.epsilon for g in self.gains.values())

    @property
    def exploitability(self):
        return max(self.gains.values())


@dataclass
class _Mdp:
    states: tuple
    fixed: dict      # state -> row
    choices: dict    # state -> [(action, row)], declaration order
    initial: Hashable
    bad: frozenset

    def chain(self, policy: Mapping) -> MarkovChain:
        rows = {}
        for s in self.states:
            if s in self.bad:
                rows[s] = {s: Fraction(1)}
            elif s in self.choices:
                rows[s] = dict(self.choices[s])[policy[s]]
            else:
                rows[s] = self.fixed[s]
        return MarkovChain(self.states, rows)


def _stationary_mdp(spec: GameSpec, profile: StationaryProfile, player: int) -> _Mdp:
    fixed, choices = {}, {}
    for s in spec.states:
        if spec.controller[s] == player:
            choices[s] = [(a, dict(spec.law[(s, a)])) for a in spec.actions[s]]
        else:
            fixed[s] = _game_row(spec, s, profile)
    return _Mdp(spec.states, fixed, choices, spec.initial, spec.unsafe(player))


def _memory_mdp(spec: GameSpec, mp: MemoryProfile, player: int) -> _Mdp:
    def lift(m, row):
        out = {}
        for t, p in row.items():
            key = (t, mp.update[(m, t)])
            out[key] = out.get(key, 0) + p
        return out

    labels = tuple((s, m) for m in mp.memories for s in spec.states)
    fixed, choices = {}, {}
    for s, m in labels:
        if spec.controller[s] == player:
            choices[(s, m)] = [(a, lift(m, spec.law[(s, a)])) for a in spec.actions[s]]
        else:
            fixed[(s, m)] = lift(m, _game_row(spec, s, mp.behavior[m]))
    bad = spec.unsafe(player)
    return _Mdp(labels, fixed, choices, (spec.initial, mp.start),
                frozenset(x for x in labels if x[0] in bad))


def _sure_safe(mdp: _Mdp) -> set:
    """Greatest set avoiding ``bad`` that the deviator can stay inside forever."""
    keep = {s for s in mdp.states if s not in mdp.bad}
    changed = True
    while changed:
        changed = False
        for s in list(keep):
            if s in mdp.choices:
                ok = any(all(t in keep for t, p in row.items() if p > 0) for _, row in mdp.choices[s])
            else:
                ok = all(t in keep for t, p in mdp.fixed[s].items() if p > 0)
            if not ok:
                keep.discard(s)
                changed = True
    return keep


def _q(row, x):
    return sum((p * x[t] for t, p in row.items()), 0)


def _solve(mdp: _Mdp, exact: bool = True):
    """Minimal reach probabilities of ``bad`` plus the chosen pure policy."""
    safe = _sure_safe(mdp)
    decide = [s for s in mdp.states if s in mdp.choices and s not in mdp.bad]
    policy = {}
    for s in mdp.choices:
        acts = mdp.choices[s]
        policy[s] = acts[0][0]
        if s in safe:
            policy[s] = next(a for a, row in acts if all(t in safe for t, p in row.items() if p > 0))
    tol = 0 if exact else FLOAT_TOL
    while True:
        x = reach_probability(mdp.chain(policy), mdp.bad, exact)
        changed = False
        for s in decide:
            if s in safe:
                continue
            qs = [(a, _q(row, x)) for a, row in mdp.choices[s]]
            best = min(q for _, q in qs)
            if best < x[s] - tol:
                policy[s] = next(a for a, q in qs if q <= best + tol)
                changed = True
        if not changed:
            break

    # Canonical optimal policy: first value-preserving action at every state.
    keeps = {}
    for s in decide:
        keeps[s] = [a for a, row in mdp.choices[s] if abs(_q(row, x) - x[s]) <= tol]
        policy[s] = keeps[s][0]
    return x, policy, keeps


def _reachable(chain: MarkovChain, start) -> set:
    seen, stack = {start}, [start]
    while stack:
        s = stack.pop()
        for t in chain.successors(s):
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


def _best_response_mdp(mdp: _Mdp, player: int, exact: bool) -> BestResponseResult:
    x, policy, keeps = _solve(mdp, exact)
    chain = mdp.chain(policy)
    x = reach_probability(chain, mdp.bad, exact)
    seen = _reachable(chain, mdp.initial)
    indifferent = any(len(keeps[s]) > 1 for s in keeps if s in seen)
    return BestResponseResult(player, 1 - x[mdp.initial], dict(policy), indifferent)


def best_response(spec: GameSpec, profile: StationaryProfile, player: int,
                  exact: bool = True) -> BestResponseResult:
    """Best pure stationary reply of ``player`` measured from the initial state.

    Among optimal replies the one picking, at every state, its first
    value-preserving action in declaration order is returned;
    ``indifferent`` is set when another optimal reply differs from it on a
    state the returned reply visits before the player has left its safe set.
    """
    bad = validate_profile(spec, profile)
    if bad:
        raise ProfileMismatchError("; ".join(map(str, bad)))
    _check_player(spec, player)
    return _best_response_mdp(_stationary_mdp(spec, profile, player), player, exact)


def memory_best_response(spec: GameSpec, mp: MemoryProfile, player: int,
                         exact: bool = True) -> BestResponseResult:
    """Best reply on the product game; the deviator may condition on memory."""
    bad = validate_memory_profile(spec, mp)
    if bad:
        raise ProfileMismatchError("; ".join(map(str, bad)))
    _check_player(spec, player)
    return _best_response_mdp(_memory_mdp(spec, mp, player), player, exact)


def _check_player(spec: GameSpec, player: int):
    if not 1 <= player <= spec.players:
        raise ValueError(f"player {player} not in 1..{spec.players}")


def _pure_deviation(spec: GameSpec, profile: StationaryProfile, player: int, pick: Mapping) -> StationaryProfile:
    choice = dict(profile.choice)
    for s, a in pick.items():
        choice[s] = {b: Fraction(int(b == a)) for b in spec.actions[s]}
    return StationaryProfile(choice)


def enumerate_pure_responses(spec: GameSpec, profile: StationaryProfile, player: int) -> list:
    """Every pure stationary strategy of ``player`` with its exact value.

    Lexicographic order by state, then action declaration order.  Evaluated
    on the original game through :func:`safety_payoff`, independently of the
    strategy-improvement solver.
    """
    own = spec.controlled_states(player)
    out = []
    for combo in itertools.product(*(spec.actions[s] for s in own)):
        pick = dict(zip(own, combo))
        u = safety_payoff(spec, _pure_deviation(spec, profile, player, pick))
        out.append((pick, u.u(player, spec.initial)))
    return out


def enumerate_memory_responses(spec: GameSpec, mp: MemoryProfile, player: int) -> list:
    own = [(s, m) for m in mp.memories for s in spec.controlled_states(player)]
    out = []
    for combo in itertools.product(*(spec.actions[s] for s, _ in own)):
        pick = dict(zip(own, combo))
        behavior = {m: _pure_deviation(spec, prof, player,
                                       {s: a for (s, mm), a in pick.items() if mm == m})
                    for m, prof in mp.behavior.items()}
        dev = MemoryProfile(mp.memories, mp.start, mp.update, behavior)
        out.append((pick, memory_payoff(spec, dev).u(player, spec.initial)))
    return out


def brute_force_best_response(spec: GameSpec, profile: StationaryProfile, player: int) -> BestResponseResult:
    """Lexicographically first maximiser over all pure stationary strategies."""
    table = enumerate_pure_responses(spec, profile, player)
    best = max(v for _, v in table)
    winners = [pick for pick, v in table if v == best]
    return BestResponseResult(player, best, winners[0], len(winners) > 1)


def _certificate(description, epsilon, values, responses) -> EquilibriumCertificate:
    best = {i: r.value for i, r in responses.items()}
    gains = {i: best[i] - values[i] for i in responses}
    return EquilibriumCertificate(description, epsilon, values, best, gains, responses)


def check_epsilon_nash(spec: GameSpec, profile: StationaryProfile, epsilon,
                       exact: bool = True) -> EquilibriumCertificate:
    epsilon = Fraction(epsilon) if exact else float(epsilon)
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    u = safety_payoff(spec, profile, exact)
    players = range(1, spec.players + 1)
    values = {i: u.u(i, spec.initial) for i in players}
    responses = {i: best_response(spec, profile, i, exact) for i in players}
    return _certificate(describe_profile(profile), epsilon, values, responses)


def check_memory_nash(spec: GameSpec, mp: MemoryProfile, epsilon,
                      exact: bool = True) -> EquilibriumCertificate:
    epsilon = Fraction(epsilon) if exact else float(epsilon)
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    u = memory_payoff(spec, mp, exact)
    players = range(1, spec.players + 1)
    values = {i: u.u(i, spec.initial) for i in players}
    responses = {i: memory_best_response(spec, mp, i, exact) for i in players}
    desc = "; ".join(f"[{m}] {describe_profile(mp.behavior[m])}" for m in mp.memories)
    return _certificate(desc, epsilon, values, responses)


def exploitability(spec: GameSpec, profile: StationaryProfile, exact: bool = True):
    return check_epsilon_nash(spec, profile, 0, exact).exploitability


def describe_profile(profile: StationaryProfile) -> str:
    return "; ".join(f"{s}:" + ",".join(f"{a}={p}" for a, p in d.items())
                     for s, d in profile.choice.items())


# -- grid scans ---------------------------------------------------------------

@dataclass(frozen=True)
class GridRow:
    p1: Fraction
    p2: Fraction
    u11: object
    u21: object
    exploitability: object


def _scan_states(spec: GameSpec) -> list:
    if spec.players != 2:
        raise ValueError("grid scans need a two-player game")
    out = []
    for i in (1, 2):
        own = spec.controlled_states(i)
        if len(own) != 1 or len(spec.actions[own[0]]) != 2:
            raise ValueError(f"player {i} must control exactly one two-action state")
        out.append(own[0])
    return out


def scan_profile(spec: GameSpec, p1, p2) -> StationaryProfile:
    """Player i puts weight ``p_i`` on the second action of its state (quit, in G)."""
    choice = {}
    for s, p in zip(_scan_states(spec), (p1, p2)):
        a, b = spec.actions[s]
        choice[s] = {a: 1 - p, b: p}
    return StationaryProfile(choice)


def _scan_point(args) -> GridRow:
    spec, p1, p2, exact = args
    prof = scan_profile(spec, p1, p2)
    cert = check_epsilon_nash(spec, prof, 0, exact)
    return GridRow(p1, p2, cert.values[1], cert.values[2], cert.exploitability)


def grid_scan(spec: GameSpec, resolution: int, exact: bool = True, workers: Optional[int] = 1) -> list:
    """Rows over ``{k/n}^2``, ``p1`` outer and ``p2`` inner, both ascending.

    ``workers`` > 1 (or ``None`` for all cores) spreads points over processes;
    the rows are identical either way.
    """
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    _scan_states(spec)
    n = resolution
    grid = [Fraction(k, n) for k in range(n + 1)]
    jobs = [(spec, a, b, exact) for a in grid for b in grid]
    workers = workers or os.cpu_count() or 1
    if workers == 1:
        return [_scan_point(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_scan_point, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def min_exploitability(rows: list) -> tuple:
    """Smallest exploitability on a scan and the points attaining it."""
    low = min(r.exploitability for r in rows)
    return low, [(r.p1, r.p2) for r in rows if r.exploitability == low]


# -- replaying the non-existence argument for G -------------------------------

@dataclass
class Claim:
    key: str
    statement: str
    passed: bool
    evidence: list


class NonexistenceCheckError(AssertionError):
    def __init__(self, claim: Claim, transcript: list):
        self.claim = claim
        self.transcript = transcript
        super().__init__(f"claim ({claim.key}) failed: {claim.statement}; " + "; ".join(claim.evidence))


def _claim(key, statement, checks):
    evidence, passed = [], True
    for ok, text in checks:
        if not ok:
            passed = False
            evidence.append("FAILED " + text)
            break
        evidence.append(text)
    return Claim(key, statement, passed, evidence)


def _pure(result: BestResponseResult, state: str) -> str:
    return result.strategy[state]


def nonexistence_check_G(spec: Optional[GameSpec] = None, resolution: int = 64) -> list:
    """Replay the case analysis showing G has no stationary Nash equilibrium.

    Statements over a continuum of ``p`` rest on the closed-form sign
    functions; each step also checks, with exact arithmetic on the
    ``{k/resolution}`` grid, that the engine agrees with those closed forms
    on ``spec`` and produces the claimed best replies.  Raises
    :class:`NonexistenceCheckError` at the first failing claim.
    """
    spec = spec or build_game_G()
    n = resolution
    grid = [Fraction(k, n) for k in range(n + 1)]
    positive = grid[1:]
    transcript = []

    def record(claim):
        transcript.append(claim)
        if not claim.passed:
            raise NonexistenceCheckError(claim, transcript)

    def payoffs(p1, p2):
        u = safety_payoff(spec, g_profile(p1, p2))
        return u.u(1, "1"), u.u(2, "1")

    def br(p1, p2, player):
        return best_response(spec, g_profile(p1, p2), player)

    # (a) p2 = 0, p1 > 0: Player 1 does strictly better with p1 = 0.
    def step_a():
        yield cf.sign_du11_dp1(0) == 0 and cf.u11_closed(1, 0) == Fraction(2, 3), \
            "closed form: u11(p1, 0) is constant 2/3 for p1 > 0, while u11(0, 0) = 1"
        for p1 in positive:
            u11, _ = payoffs(p1, 0)
            r = br(p1, 0, 1)
            if not (u11 == cf.u11_closed(p1, 0) and r.value == 1 and _pure(r, "1") == "c"
                    and not r.indifferent and r.value > u11):
                yield False, f"engine at p1={p1}, p2=0: u11={u11}, best reply {r.strategy} value {r.value}"
                return
        yield True, f"engine: at all {len(positive)} grid points p1 > 0 the unique best reply is c with value 1 > 2/3"

    record(_claim("a", "if p2 = 0 and p1 > 0, Player 1 gains by switching to p1 = 0", step_a()))

    # (b) (0, 0): Player 2 gains 1/3 by quitting.
    def step_b():
        _, u21 = payoffs(0, 0)
        r = br(0, 0, 2)
        yield u21 == 0, f"engine: u21(0, 0) = {u21}"
        yield (r.value == cf.u21_closed(0, 1) == Fraction(1, 3) and _pure(r, "2") == "q"), \
            f"engine: best reply of Player 2 is {r.strategy} with value {r.value}"
        yield r.value - u21 == Fraction(1, 3), f"gain {r.value - u21}"

    record(_claim("b", "at (0, 0), Player 2 gains 1/3 by deviating to p2 = 1", step_b()))

    # (c) p2 > 0: Player 1's unique best reply is p1 = 1.
    def step_c():
        yield all(cf.sign_du11_dp1(p2) == 1 for p2 in positive), \
            "closed form: sgn(du11/dp1) = sgn(48 p2) = +1 for every p2 > 0"
        for p2 in positive:
            for p1 in grid:
                u11, _ = payoffs(p1, p2)
                if u11 != cf.u11_closed(p1, p2):
                    yield False, f"engine u11({p1}, {p2}) = {u11} differs from the closed form"
                    return
            r = br(0, p2, 1)
            if not (_pure(r, "1") == "q" and not r.indifferent and r.value == cf.best_reply_value_1(p2)):
                yield False, f"engine best reply at p2={p2}: {r.strategy} value {r.value}"
                return
        yield True, f"engine matches the closed form on the {n + 1}x{n} grid and replies q uniquely"

    record(_claim("c", "for p2 > 0, Player 1's unique best reply is p1 = 1", step_c()))

    # (d) p1 = 1: Player 2's unique best reply is p2 = 0.
    def step_d():
        win, lose = {"W"}, {"L", "L2"}
        quit_ = first_passage_split(induced_chain(spec, g_profile(1, 1)), "2", win, lose)
        cont = first_passage_split(induced_chain(spec, g_profile(1, 0)), "2", win, lose)
        yield (quit_.win == cont.win and quit_.lose > cont.lose and quit_.return_ < cont.return_), \
            (f"excursions from state 2: quit (win, lose, return) = ({quit_.win}, {quit_.lose}, {quit_.return_}),"
             f" continue = ({cont.win}, {cont.lose}, {cont.return_})")
        yield cf.sign_du21_dp2(1) == -1, "closed form: sgn(du21/dp2) at p1 = 1 is -1"
        for p2 in grid:
            _, u21 = payoffs(1, p2)
            if u21 != cf.u21_closed(1, p2):
                yield False, f"engine u21(1, {p2}) = {u21} differs from the closed form"
                return
        r = br(1, 0, 2)
        yield (_pure(r, "2") == "c" and not r.indifferent and r.value == Fraction(8, 13)), \
            f"engine: unique best reply {r.strategy} with value {r.value}"

    record(_claim("d", "at p1 = 1, Player 2's unique best reply is p2 = 0", step_d()))
    return transcript
