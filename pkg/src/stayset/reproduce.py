"""End-to-end reproduction of every quantitative claim about G.

Each section is a list of named checks; ``run_sections`` evaluates them and
returns ``(section, name, passed, detail)`` tuples for the CLI to print.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable

from . import closed_form as cf
from .chain import first_passage_split, induced_chain, safety_payoff
from .game import build_game_G, build_modified_game, g_memory_profile, g_profile
from .response import (NonexistenceCheckError, best_response, check_epsilon_nash,
                       check_memory_nash, grid_scan, min_exploitability, nonexistence_check_G)

F = Fraction
SECTIONS = {
    "2.1": "no stationary Nash equilibrium",
    "2.2": "payoffs, derivative signs and best replies",
    "2.3": "equilibria with one bit of shared memory",
    "2.4": "stationary epsilon-Nash equilibria",
}

EQ_A = ((F(4, 7), F(1, 4)), (0, 0))
EQ_B = ((1, 0), (1, 1))
EPSILONS = (F(1, 10), F(1, 100), F(1, 1000))


def sigmas(eps: Fraction) -> dict:
    return {"sigma1": (F(1), eps),
            "sigma2": (cf.THRESHOLD - eps, eps),
            "sigma3": (cf.THRESHOLD + eps, eps)}


def _u(p1, p2):
    u = safety_payoff(build_game_G(), g_profile(p1, p2))
    return u.u(1, "1"), u.u(2, "1")


def _rational_points(count: int, seed: int, denominators=(2, 3, 5, 7, 12, 64, 97, 1000)) -> list:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        d1, d2 = rng.choice(denominators), rng.choice(denominators)
        out.append((F(rng.randint(0, d1), d1), F(rng.randint(0, d2), d2)))
    return out


# -- 2.1 ----------------------------------------------------------------------

def _first_passage():
    g = build_game_G()
    win, lose = {"W"}, {"L", "L2"}
    q = first_passage_split(induced_chain(g, g_profile(1, 1)), "2", win, lose)
    c = first_passage_split(induced_chain(g, g_profile(1, 0)), "2", win, lose)
    ok = ((q.win, q.lose, q.return_) == (F(6, 16), F(9, 16), F(1, 16))
          and (c.win, c.lose, c.return_) == (F(6, 16), F(7, 16), F(3, 16)))
    return ok, f"quit ({q.win}, {q.lose}, {q.return_}); continue ({c.win}, {c.lose}, {c.return_})"


def _case_analysis():
    try:
        claims = nonexistence_check_G()
    except NonexistenceCheckError as exc:
        return False, str(exc)
    return True, "; ".join(f"({c.key}) {c.statement}" for c in claims)


def _grid_positive():
    rows = grid_scan(build_game_G(), 64)
    low, where = min_exploitability(rows)
    return low > 0, f"min exploitability on the 65x65 grid = {low} at {[(str(a), str(b)) for a, b in where]}"


# -- 2.2 ----------------------------------------------------------------------

def _corners():
    checks = [_u(0, 0) == (1, 0)]
    checks += [_u(p1, 0)[0] == F(2, 3) for p1 in (F(1, 64), F(1, 4), F(1, 2), 1)]
    checks += [_u(0, p2)[0] == F(1, 3) for p2 in (F(1, 64), F(1, 4), 1)]
    return all(checks), "u11(0,0)=1, u21(0,0)=0, u11(p1,0)=2/3, u11(0,p2)=1/3"


def _closed_forms():
    pts = [(F(a, 16), F(b, 16)) for a in range(17) for b in range(17)] + _rational_points(200, 7)
    bad = [(p1, p2) for p1, p2 in pts
           if _u(p1, p2) != (cf.u11_closed(p1, p2), cf.u21_closed(p1, p2))
           or cf.u11_closed(p1, p2) != cf.u11_closed_alt(p1, p2)
           or cf.u21_closed(p1, p2) != cf.u21_closed_alt(p1, p2)]
    return not bad, f"{len(pts)} points, {len(bad)} mismatches"


def _signs():
    ok = (all(cf.sign_du11_dp1(F(k, 8)) == 1 for k in range(1, 9))
          and cf.sign_du21_dp2(cf.THRESHOLD) == 0
          and all(cf.sign_du21_dp2(F(k, 14)) == (1 if F(k, 14) < cf.THRESHOLD else -1)
                  for k in range(15) if k != 8))
    return ok, "sgn(48 p2) = +1 for p2 > 0; sgn((4-3p1)(4-7p1)) switches at p1 = 4/7"


def _best_replies():
    g = build_game_G()
    details = []
    r = best_response(g, g_profile(F(1, 2), 0), 1)
    ok = r.strategy == {"1": "c"} and r.value == 1
    for p2 in (F(1, 64), F(1, 4), F(1, 2), F(1)):
        r = best_response(g, g_profile(0, p2), 1)
        ok &= r.strategy == {"1": "q"} and r.value == (8 + F(p2)) / (12 + 3 * F(p2))
    for p1 in (0, F(1, 4), F(1, 2)):
        r = best_response(g, g_profile(p1, 0), 2)
        ok &= r.strategy == {"2": "q"} and r.value == (4 + 5 * F(p1)) / (12 + 3 * F(p1))
    for p1 in (F(5, 8), F(3, 4), 1):
        r = best_response(g, g_profile(p1, 0), 2)
        ok &= r.strategy == {"2": "c"} and r.value == 8 * F(p1) / (4 + 9 * F(p1))
    r = best_response(g, g_profile(cf.THRESHOLD, 0), 2)
    ok &= r.value == F(1, 2) and r.indifferent
    details.append("BR1: c iff p2 = 0; BR2: q below 4/7, c above, indifferent at 4/7 with value 1/2")
    return ok, "; ".join(details)


# -- 2.3 ----------------------------------------------------------------------

def _memory_equilibria():
    g = build_game_G()
    a = check_memory_nash(g, g_memory_profile(*EQ_A), 0)
    b = check_memory_nash(g, g_memory_profile(*EQ_B), 0)
    ok = (a.is_epsilon_nash and b.is_epsilon_nash
          and (a.values[1], a.values[2]) == (F(2, 3), F(1, 2))
          and (b.values[1], b.values[2]) == (F(43, 65), F(8, 13))
          and all(v == 0 for v in (*a.gains.values(), *b.gains.values())))
    return ok, (f"A: values ({a.values[1]}, {a.values[2]}), gains {list(map(str, a.gains.values()))}; "
                f"B: values ({b.values[1]}, {b.values[2]}), gains {list(map(str, b.gains.values()))}")


def _after_l2_replies():
    g = build_game_G()
    cont = best_response(g, g_profile(0, 0), 1)
    quit_ = best_response(g, g_profile(0, 1), 1)
    ok = cont.value == 1 and cont.strategy == {"1": "c"} and quit_.value == F(3, 5) and quit_.strategy == {"1": "q"}
    return ok, f"against p2=0 Player 1 gets {cont.value}; against p2=1 Player 1 gets {quit_.value}"


def _modified_games():
    pts = _rational_points(50, 11)
    bad = 0
    for variant in cf.VARIANTS:
        g = build_modified_game(variant)
        for p1, p2 in pts:
            if safety_payoff(g, g_profile(p1, p2)).u(1, "1") != cf.modified_u11_closed(variant, p1, p2):
                bad += 1
    return bad == 0, f"2 variants x {len(pts)} points, {bad} mismatches"


def _modified_signs():
    h = F(1, 1024)
    bad = 0
    for variant in cf.VARIANTS:
        for k in range(20):
            p2 = F(k, 20)
            x = F(1, 2)
            diff = cf.modified_u11_closed(variant, x + h, p2) - cf.modified_u11_closed(variant, x, p2)
            bad += cf.sgn(diff) != cf.sign_modified_du11_dp1(variant, p2)
    return bad == 0, "sgn(64 p2 - 16) and sgn(1120 p2 + 80) agree with exact finite differences"


# -- 2.4 ----------------------------------------------------------------------

def _eps_certificates():
    g = build_game_G()
    lines, ok = [], True
    for eps in EPSILONS:
        for name, (p1, p2) in sigmas(eps).items():
            cert = check_epsilon_nash(g, g_profile(p1, p2), eps)
            ok &= cert.is_epsilon_nash
            lines.append(f"{name}@{eps}: exploitability {float(cert.exploitability):.3g}")
    return ok, "; ".join(lines)


def _eps_patterns():
    g = build_game_G()
    ok = True
    for eps in EPSILONS:
        certs = {n: check_epsilon_nash(g, g_profile(*p), eps) for n, p in sigmas(eps).items()}
        ok &= certs["sigma1"].gains[1] == 0
        ok &= all(c.responses[1].strategy == {"1": "q"} for c in certs.values())
        ok &= certs["sigma1"].responses[2].strategy == {"2": "c"}
        ok &= certs["sigma3"].responses[2].strategy == {"2": "c"}
        ok &= certs["sigma2"].responses[2].strategy == {"2": "q"}
        ok &= all(gain >= 0 for c in certs.values() for gain in c.gains.values())
    return ok, "Player 1 gain 0 in sigma1; BR1 = q everywhere; BR2 = c for sigma1, sigma3 and q for sigma2"


def _no_eps_nash_with_p2_zero():
    g = build_game_G()
    lows = [check_epsilon_nash(g, g_profile(F(k, 16), 0), 0).exploitability for k in range(17)]
    return min(lows) == F(1, 3), f"exploitability on p2 = 0 is at least {min(lows)}"


CHECKS: dict = {
    "2.1": [("first-passage split from state 2", _first_passage),
            ("case analysis (a)-(d)", _case_analysis),
            ("exploitability positive on the 1/64 grid", _grid_positive)],
    "2.2": [("corner and boundary values", _corners),
            ("closed forms equal the exact evaluator", _closed_forms),
            ("derivative signs", _signs),
            ("best-reply map", _best_replies)],
    "2.3": [("replies after L2", _after_l2_replies),
            ("memory equilibria A and B", _memory_equilibria),
            ("modified-game closed forms", _modified_games),
            ("modified-game derivative signs", _modified_signs)],
    "2.4": [("sigma1..sigma3 are epsilon-Nash", _eps_certificates),
            ("distance-from-best-reply patterns", _eps_patterns),
            ("p2 = 0 is never 1/3-Nash", _no_eps_nash_with_p2_zero)],
}


def run_sections(sections: Iterable[str] = tuple(SECTIONS)) -> list:
    out = []
    for sec in sections:
        for name, fn in CHECKS[sec]:
            passed, detail = fn()
            out.append((sec, name, bool(passed), detail))
    return out
