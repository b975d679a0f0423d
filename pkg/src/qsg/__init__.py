"""Quantitative sabotage games: exact solvers, reductions and brute-force oracles."""
from .core import (
    CapExceeded,
    CostKind,
    CostSpec,
    Distribution,
    DistributionSpace,
    ExtendedQsg,
    Lasso,
    Qsg,
    enumerate_distributions,
    evaluate_lasso,
    redistributions,
    require_valid,
    validate,
)
from .docs import DocumentError, parse_abf, parse_game, parse_threshold, serialize_abf, serialize_game
from .encoder import WeightedGame, encode, encode_safety
from .generate import corpus, generate_random
from .oracle import has_feedback_arc_set, oracle_discounted, oracle_static, oracle_value
from .reductions import AbfInstance, abf_to_espr, espr_to_spr, solve_abf, spr_to_limsup, swap_cost
from .solvers import (
    SolveResult,
    attractor,
    solve,
    solve_buchi,
    solve_cobuchi,
    solve_espr,
    solve_spr,
    threshold,
    value_discounted,
    value_mean_payoff,
    value_qualitative,
)
from .static import (
    StaticResult,
    fas_to_qsg,
    one_player_value,
    reachable_edges,
    scc_cycle_edges,
    static_threshold,
    static_value,
    static_value_closed_form,
)
