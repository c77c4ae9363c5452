"""Exploitability over the (p1, p2) square of the built-in game.

Writes a CSV of the grid and prints where the minimum sits.

    python scripts/exploitability_landscape.py --resolution 64 --out landscape.csv
"""
import argparse
import csv
from dataclasses import dataclass

from stayset.game import build_game_G, format_rational
from stayset.response import grid_scan, min_exploitability


@dataclass
class Config:
    resolution: int = 64
    out: str = "landscape.csv"
    workers: int | None = None


def run(cfg: Config):
    rows = grid_scan(build_game_G(), cfg.resolution, workers=cfg.workers)
    with open(cfg.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["p1", "p2", "exploitability"])
        for r in rows:
            w.writerow([float(r.p1), float(r.p2), float(r.exploitability)])
    low, where = min_exploitability(rows)
    print(f"{len(rows)} grid points written to {cfg.out}")
    print(f"minimum exploitability {format_rational(low)} (~{float(low):.3e}) at "
          + ", ".join(f"({format_rational(a)}, {format_rational(b)})" for a, b in where))
    worst = max(rows, key=lambda r: r.exploitability)
    print(f"maximum exploitability {format_rational(worst.exploitability)} at "
          f"({format_rational(worst.p1)}, {format_rational(worst.p2)})")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolution", type=int, default=Config.resolution)
    ap.add_argument("--out", default=Config.out)
    ap.add_argument("--workers", type=int, default=None)
    run(Config(**vars(ap.parse_args())))
