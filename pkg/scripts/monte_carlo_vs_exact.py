"""Compare simulated win frequencies with exact payoffs on a few profiles."""
import argparse
from dataclasses import dataclass
from fractions import Fraction

from stayset.chain import memory_payoff, safety_payoff
from stayset.game import build_game_G, g_memory_profile, g_profile
from stayset.simulate import simulate


@dataclass
class Config:
    samples: int = 100_000
    horizon: int = 10_000
    seed: int = 1
    workers: int | None = None


def cases():
    h = Fraction(1, 2)
    yield "(0, 0)", g_profile(0, 0)
    yield "(1, 1)", g_profile(1, 1)
    yield "(4/7, 1/4)", g_profile(Fraction(4, 7), Fraction(1, 4))
    yield "(1, 0)", g_profile(1, 0)
    yield "(1/2, 1/2)", g_profile(h, h)
    yield "memory A", g_memory_profile((Fraction(4, 7), Fraction(1, 4)), (0, 0))
    yield "memory B", g_memory_profile((1, 0), (1, 1))


def run(cfg: Config):
    g = build_game_G()
    print(f"{'profile':12} {'player':>6} {'exact':>10} {'simulated':>10} {'z':>7}")
    for name, prof in cases():
        exact = memory_payoff(g, prof) if hasattr(prof, "memories") else safety_payoff(g, prof)
        rep = simulate(g, prof, cfg.samples, cfg.horizon, cfg.seed, workers=cfg.workers)
        for i in (1, 2):
            v = float(exact.u(i, g.initial))
            f, se = rep.frequency[i - 1], rep.stderr[i - 1]
            z = (f - v) / se if se > 0 else 0.0
            print(f"{name:12} {i:>6} {v:10.5f} {f:10.5f} {z:7.2f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=Config.samples)
    ap.add_argument("--horizon", type=int, default=Config.horizon)
    ap.add_argument("--seed", type=int, default=Config.seed)
    ap.add_argument("--workers", type=int, default=None)
    run(Config(**vars(ap.parse_args())))
