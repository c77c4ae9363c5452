"""Random small valid games for property tests."""
import random
from fractions import Fraction

from hypothesis import strategies as st

from stayset.game import GameSpec, StationaryProfile


def _dist(rng, states, max_support=3):
    k = rng.randint(1, min(max_support, len(states)))
    succ = rng.sample(states, k)
    w = [rng.randint(1, 4) for _ in succ]
    tot = sum(w)
    return {t: Fraction(x, tot) for t, x in zip(succ, w)}


def random_game(rng: random.Random, n_states=None, players=None) -> GameSpec:
    n = n_states or rng.randint(2, 8)
    players = players or rng.randint(1, 3)
    states = tuple(f"s{k}" for k in range(n))
    controller, actions, law = {}, {}, {}
    for s in states:
        c = rng.choice([None] + list(range(1, players + 1)) * 2)
        controller[s] = c
        if c is None:
            law[(s, None)] = _dist(rng, list(states))
        else:
            acts = tuple("abc"[: rng.randint(1, 3)])
            actions[s] = acts
            for a in acts:
                law[(s, a)] = _dist(rng, list(states))
    safe = tuple(frozenset(s for s in states if rng.random() < 0.7) for _ in range(players))
    return GameSpec(players, states, rng.choice(states), controller, actions, law, safe)


def random_profile(rng: random.Random, spec: GameSpec, pure_bias=0.3) -> StationaryProfile:
    choice = {}
    for s in spec.controlled_states():
        acts = spec.actions[s]
        if rng.random() < pure_bias:
            pick = rng.choice(acts)
            choice[s] = {a: Fraction(int(a == pick)) for a in acts}
        else:
            w = [rng.randint(0, 3) for _ in acts]
            if not any(w):
                w[0] = 1
            choice[s] = {a: Fraction(x, sum(w)) for a, x in zip(acts, w)}
    return StationaryProfile(choice)


games = st.builds(random_game, st.randoms(use_true_random=False))


@st.composite
def games_with_profiles(draw):
    rng = draw(st.randoms(use_true_random=False))
    spec = random_game(rng)
    return spec, random_profile(rng, spec)


rationals01 = st.builds(lambda d, k: Fraction(k % (d + 1), d),
                        st.integers(1, 200), st.integers(0, 10_000))
