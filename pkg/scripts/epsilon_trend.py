"""How fast the deviation gains of three near-equilibrium profiles vanish.

For each eps the profiles are (1, eps), (4/7 - eps, eps) and (4/7 + eps, eps).
The table lists both players' exact gains and the ratio to the previous eps.
"""
import argparse
from dataclasses import dataclass, field
from fractions import Fraction

from stayset.closed_form import THRESHOLD
from stayset.game import build_game_G, g_profile
from stayset.response import check_epsilon_nash


@dataclass
class Config:
    decades: list = field(default_factory=lambda: [1, 2, 3, 4, 5])


def profiles(eps):
    return {"sigma1": (Fraction(1), eps),
            "sigma2": (THRESHOLD - eps, eps),
            "sigma3": (THRESHOLD + eps, eps)}


def run(cfg: Config):
    g = build_game_G()
    eps_list = [Fraction(1, 10**d) for d in cfg.decades]
    print(f"{'profile':8} {'eps':>8} {'gain1':>12} {'ratio1':>8} {'gain2':>12} {'ratio2':>8}")
    for name in ("sigma1", "sigma2", "sigma3"):
        prev = None
        for eps in eps_list:
            cert = check_epsilon_nash(g, g_profile(*profiles(eps)[name]), eps)
            gains = (cert.gains[1], cert.gains[2])
            ratios = ["" if prev is None or not gains[k] else f"{float(prev[k] / gains[k]):8.3f}"
                      for k in range(2)]
            print(f"{name:8} {str(eps):>8} {float(gains[0]):12.4e} {ratios[0]:>8} "
                  f"{float(gains[1]):12.4e} {ratios[1]:>8}")
            prev = gains


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--decades", type=int, nargs="+", default=Config().decades)
    run(Config(**vars(ap.parse_args())))
