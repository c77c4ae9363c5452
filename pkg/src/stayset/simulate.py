"""Seeded Monte Carlo play of stationary and memory profiles.

Randomness comes from Philox4x64-10 (Salmon et al., "Parallel random numbers:
as easy as 1, 2, 3", SC'11), a counter-based generator: the uniform used by
trajectory ``i`` at step ``t`` is a pure function of ``(seed, i, t)``.  The
block function is evaluated vectorised over all live trajectories, which
keeps results bit-identical no matter how trajectories are split across
workers.  It matches ``numpy.random.Philox`` block for block.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .chain import can_reach, product_chain
from .game import GameSpec, MemoryProfile, StationaryProfile

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_LO = np.uint64(0xFFFFFFFF)
_32 = np.uint64(32)


def _mulhilo(a: np.uint64, b: np.ndarray):
    a_lo, a_hi = a & _LO, a >> _32
    b_lo, b_hi = b & _LO, b >> _32
    p0 = a_lo * b_lo
    p1 = a_lo * b_hi
    p2 = a_hi * b_lo
    p3 = a_hi * b_hi
    mid = (p0 >> _32) + (p1 & _LO) + (p2 & _LO)
    hi = p3 + (p1 >> _32) + (p2 >> _32) + (mid >> _32)
    return hi, a * b


def philox4x64(counter: np.ndarray, key) -> np.ndarray:
    """Philox4x64-10 block function.

    ``counter`` has shape ``(n, 4)`` of uint64; ``key`` is two 64-bit ints.
    Returns ``(n, 4)`` uint64 outputs.
    """
    with np.errstate(over="ignore"):
        x0, x1, x2, x3 = (counter[:, j].astype(np.uint64) for j in range(4))
        k0, k1 = np.uint64(key[0]), np.uint64(key[1])
        for r in range(10):
            if r:
                k0, k1 = k0 + _W0, k1 + _W1
            hi0, lo0 = _mulhilo(_M0, x0)
            hi1, lo1 = _mulhilo(_M1, x2)
            x0, x1, x2, x3 = hi1 ^ x1 ^ k0, lo1, hi0 ^ x3 ^ k1, lo0
    return np.stack([x0, x1, x2, x3], axis=1)


def uniforms(seed: int, trajectories: np.ndarray, step: int) -> np.ndarray:
    """One double in [0, 1) per trajectory index for the given step."""
    ctr = np.zeros((len(trajectories), 4), dtype=np.uint64)
    ctr[:, 0] = trajectories.astype(np.uint64)
    ctr[:, 1] = np.uint64(step)
    out = philox4x64(ctr, (seed & (2**64 - 1), 0))[:, 0]
    return (out >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


@dataclass(frozen=True)
class SimReport:
    samples: int
    horizon: int
    seed: int
    wins: tuple            # per player, plays that never left the safe set
    truncated_count: int   # plays whose outcome was still open at the horizon

    @property
    def frequency(self) -> tuple:
        return tuple(w / self.samples for w in self.wins)

    @property
    def stderr(self) -> tuple:
        return tuple(math.sqrt(f * (1 - f) / self.samples) for f in self.frequency)


@dataclass
class _Compiled:
    cum: np.ndarray          # (N, N) cumulative transition rows
    bad: np.ndarray          # (players, N) state outside G_i
    settled: np.ndarray      # (players, N) G_i exit no longer reachable
    start: int


def _compile(spec: GameSpec, profile: Union[StationaryProfile, MemoryProfile]) -> _Compiled:
    mp = profile if isinstance(profile, MemoryProfile) else MemoryProfile.constant(profile, spec)
    chain = product_chain(spec, mp)
    index = {s: k for k, s in enumerate(chain.states)}
    n = len(index)
    cum = np.zeros((n, n))
    for s, k in index.items():
        acc, last = Fraction(0), None
        row = chain.rows[s]
        for t in chain.states:
            p = row.get(t, 0)
            acc += p
            cum[k, index[t]] = float(acc)
            if p > 0:
                last = index[t]
        cum[k, last:] = 2.0  # absorbs float rounding at the top of the row
    bad = np.zeros((spec.players, n), dtype=bool)
    settled = np.zeros((spec.players, n), dtype=bool)
    for i in range(spec.players):
        unsafe = [x for x in chain.states if x[0] not in spec.safe_sets[i]]
        live = can_reach(chain, unsafe)
        for x, k in index.items():
            bad[i, k] = x[0] not in spec.safe_sets[i]
            settled[i, k] = x not in live
    return _Compiled(cum, bad, settled, index[(spec.initial, mp.start)])


def _run(compiled: _Compiled, first: int, count: int, horizon: int, seed: int):
    idx = np.arange(first, first + count, dtype=np.int64)
    state = np.full(count, compiled.start, dtype=np.int64)
    lost = compiled.bad[:, state].copy()
    done = np.all(lost | compiled.settled[:, state], axis=0)
    for t in range(horizon):
        live = np.flatnonzero(~done)
        if live.size == 0:
            break
        u = uniforms(seed, idx[live], t)
        nxt = (compiled.cum[state[live]] <= u[:, None]).sum(axis=1)
        state[live] = nxt
        lost[:, live] |= compiled.bad[:, nxt]
        done[live] = np.all(lost[:, live] | compiled.settled[:, nxt], axis=0)
    wins = (~lost).sum(axis=1)
    return [int(w) for w in wins], int((~done).sum())


def _job(args):
    return _run(*args)


def simulate(spec: GameSpec, profile: Union[StationaryProfile, MemoryProfile], samples: int,
             horizon: int, seed: int, workers: Optional[int] = 1, chunk: int = 50_000) -> SimReport:
    """Play ``samples`` trajectories of at most ``horizon`` steps from the initial state.

    A player wins a play iff no visited state lies outside its safe set.  A
    play stops early once every player has either lost or can no longer
    reach an unsafe state, which never changes the outcome; plays still open
    at the horizon count as safe and are reported in ``truncated_count``.
    """
    if samples < 1 or horizon < 1:
        raise ValueError("samples and horizon must be >= 1")
    compiled = _compile(spec, profile)
    jobs = [(compiled, a, min(chunk, samples - a), horizon, seed) for a in range(0, samples, chunk)]
    workers = workers or os.cpu_count() or 1
    if workers == 1 or len(jobs) == 1:
        parts = [_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_job, jobs))
    wins = [sum(p[0][i] for p in parts) for i in range(spec.players)]
    return SimReport(samples, horizon, seed, tuple(wins), sum(p[1] for p in parts))
