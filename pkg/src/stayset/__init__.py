"""Exact analysis of turn-based stochastic games with safety objectives."""
from .chain import (FirstPassageSplit, MarkovChain, MassLeakError, first_passage_split,
                    induced_chain, memory_payoff, product_chain, reach_probability, safety_payoff)
from .game import (GameFormatError, GameSpec, MemoryProfile, PayoffMatrix, ProfileMismatchError,
                   StationaryProfile, Violation, build_game_G, build_modified_game, g_memory_profile,
                   g_profile, parse_game, parse_memory_profile, parse_profile, serialize_game,
                   serialize_memory_profile, validate_game)
from .response import (BestResponseResult, EquilibriumCertificate, best_response,
                       brute_force_best_response, check_epsilon_nash, check_memory_nash,
                       exploitability, grid_scan, memory_best_response, nonexistence_check_G)
from .simulate import SimReport, simulate

__version__ = "0.1.0"
