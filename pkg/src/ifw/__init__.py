"""Independence-friendly logic over finite structures."""

from .errors import (
    BSSPresent,
    CapExceeded,
    IFError,
    IncompleteStrategy,
    InvalidPair,
    MissingRelation,
    NotKM,
    NotPrenex,
    NotWinning,
    ParseError,
    TupleOutOfRange,
    UnboundVariable,
    VerificationFailed,
)
from .syntax import (
    And,
    EqAtom,
    IrregularFormula,
    NegAtom,
    NotSentence,
    Or,
    Pair,
    Quant,
    RelAtom,
    check_regular,
    find_pairs,
    pair_by_vars,
    parse_formula,
    parse_prefix,
    print_formula,
    remove_independence,
)
from .model import Structure, enumerate_structures, format_model, parse_model
from .game import ABELARD, ELOISE, Game, Player, PureStrategy, build_game, enumerate_strategies, play_out
from .semantics import (
    TruthValue,
    has_winning_strategy,
    is_winning,
    skolem_oracle_truth,
    strategy_transfer,
    truth_value,
)
from .equilibrium import GameValue, payoff_matrix, sentence_value, solve_zero_sum
from .analysis import (
    BreakStatus,
    NoBSS,
    analyze,
    build_witness,
    classify,
    detect_break_status,
    detect_bss,
    equivalence_check,
    relevance,
    simplify_slashes,
    translate_km,
)

__version__ = "0.1.0"
