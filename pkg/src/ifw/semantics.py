"""Truth in the semantic game, an independent Skolem-function oracle, and the
strategy transfer that turns a winning strategy for ``phi^{y<-x}`` into one
for ``phi`` when no broken signalling sequence ends in the pair."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from .errors import BSSPresent, CapExceeded, IncompleteStrategy, NotWinning
from .game import (
    ABELARD,
    ELOISE,
    Game,
    InfoClassKey,
    Player,
    PureStrategy,
    build_game,
    strategy_keys,
)
from .model import Structure
from .syntax import (
    EXISTS,
    And,
    EqAtom,
    NegAtom,
    Or,
    Pair,
    RelAtom,
    quantifier_chain,
    quantifier_prefix,
    relations,
    remove_independence,
    require_regular,
    validate_pair,
)

DEFAULT_SEARCH_BUDGET = 10**7


class TruthValue(str, Enum):
    TRUE = "TRUE"
    FALSE = "FALSE"
    UNDETERMINED = "UNDETERMINED"


@dataclass(frozen=True)
class WinningWitness:
    player: Player
    strategy: PureStrategy


@dataclass(frozen=True)
class Verdict:
    value: TruthValue
    witness: Optional[WinningWitness]


def _advance(g, node, s, move, rest):
    if node.slot is not None:
        s = s[: node.slot] + (move,) + s[node.slot + 1 :]
        return ((g.nodes[node.children[0]], s), rest)
    return ((g.nodes[node.children[move]], s), rest)


def _search(g: Game, player: Player, budget: int):
    """Depth-first search for a uniform winning strategy of ``player``.

    Open obligations (positions every one of whose continuations must be won)
    are kept as a linked list.  A move is fixed for an information class the
    first time one of its histories is met; a lost terminal position
    backtracks to the most recent class that still has untried moves.
    Returns the fixed moves, or ``None``.
    """
    commit = {}
    choices = []  # (node, assignment, rest, key, remaining moves)
    goals = ((g.root, g.initial), None)
    domain = tuple(g.structure.domain)
    steps = 0
    while True:
        if goals is None:
            return commit
        steps += 1
        if steps > budget:
            raise CapExceeded("search steps", steps, budget)
        (node, s), rest = goals
        if node.kind == "leaf":
            if g.leaf_test(node)(s) == (player is ELOISE):
                goals = rest
                continue
        elif node.dp.player is not player:
            if node.slot is not None:
                child = g.nodes[node.children[0]]
                slot = node.slot
                for c in reversed(domain):
                    rest = ((child, s[:slot] + (c,) + s[slot + 1 :]), rest)
                goals = rest
            else:
                goals = (
                    (g.nodes[node.children[0]], s),
                    ((g.nodes[node.children[1]], s), rest),
                )
            continue
        else:
            key = g.key(node, s)
            move = commit.get(key)
            if move is None:
                options = g.moves(node.dp)
                move = options[0]
                commit[key] = move
                choices.append((node, s, rest, key, iter(options[1:])))
            goals = _advance(g, node, s, move, rest)
            continue
        # the current terminal position is lost: backtrack
        while choices:
            node, s, rest, key, remaining = choices[-1]
            move = next(remaining, None)
            if move is None:
                choices.pop()
                del commit[key]
                continue
            commit[key] = move
            goals = _advance(g, node, s, move, rest)
            break
        else:
            return None


def _complete(g, player, moves):
    """Extend a partial strategy to every information class (first move where unset)."""
    keys, options = strategy_keys(g, player)
    return PureStrategy(player, {k: moves.get(k, opts[0]) for k, opts in zip(keys, options)})


def has_winning_strategy(g: Game, player: Player, budget: int = DEFAULT_SEARCH_BUDGET):
    """Return ``(found, witness)`` where ``witness`` is a :class:`WinningWitness` or ``None``."""
    moves = _search(g, player, budget)
    if moves is None:
        return False, None
    return True, WinningWitness(player, _complete(g, player, moves))


def decide(f, M: Structure, budget: int = DEFAULT_SEARCH_BUDGET) -> Verdict:
    g = build_game(f, M)
    won, w = has_winning_strategy(g, ELOISE, budget)
    if won:
        return Verdict(TruthValue.TRUE, w)
    won, w = has_winning_strategy(g, ABELARD, budget)
    if won:
        return Verdict(TruthValue.FALSE, w)
    return Verdict(TruthValue.UNDETERMINED, None)


def truth_value(f, M: Structure, witness: bool = False, budget: int = DEFAULT_SEARCH_BUDGET):
    """TRUE / FALSE / UNDETERMINED; with ``witness=True`` a :class:`Verdict`."""
    v = decide(f, M, budget)
    return v if witness else v.value


def is_winning(g: Game, strategy: PureStrategy) -> bool:
    """Does ``strategy`` win against every play of the opponent?"""
    player = strategy.player
    moves = strategy.moves
    domain = tuple(g.structure.domain)

    def go(node, s):
        if node.kind == "leaf":
            return g.leaf_test(node)(s) == (player is ELOISE)
        if node.dp.player is player:
            key = g.key(node, s)
            if key not in moves:
                raise IncompleteStrategy(f"no move for {key}")
            (child, s2), _ = _advance(g, node, s, moves[key], None)
            return go(child, s2)
        options = domain if node.slot is not None else (0, 1)
        return all(go(*_advance(g, node, s, m, None)[0]) for m in options)

    return go(g.root, g.initial)


# ---------------------------------------------------------------------------
# Skolem oracle (deliberately naive and independent of the game machinery)


def _classical(f, s, M):
    if isinstance(f, NegAtom):
        return not _classical(f.inner, s, M)
    if isinstance(f, EqAtom):
        return s[f.left] == s[f.right]
    if isinstance(f, RelAtom):
        return tuple(s[v] for v in f.args) in M.relations[f.name][1]
    if isinstance(f, And):
        return _classical(f.lhs, s, M) and _classical(f.rhs, s, M)
    if isinstance(f, Or):
        return _classical(f.lhs, s, M) or _classical(f.rhs, s, M)
    raise TypeError(f"not quantifier free: {f!r}")


def skolem_oracle_truth(f, M: Structure, cap: int = 2**22) -> bool:
    """Truth of a prenex sentence as existence of Skolem functions.

    Each existential variable gets a function of the earlier variables not in
    its slash set; the sentence is true iff some choice of functions makes
    the matrix true under every assignment to the universal variables.
    """
    require_regular(f)
    prefix, matrix = quantifier_prefix(f, prenex=True)
    M.check_signature(relations(f))
    n = M.size
    seen = []
    plan = []  # (var, None) for universals, (var, args) for existentials
    for e in prefix:
        if e.kind == EXISTS:
            plan.append((e.var, tuple(v for v in seen if v not in e.slash)))
        else:
            plan.append((e.var, None))
        seen.append(e.var)
    universals = [v for v, args in plan if args is None]
    table_sizes = [n ** len(args) for _, args in plan if args is not None]
    count = 1
    for size in table_sizes:
        count *= n**size
    if count > cap:
        raise CapExceeded("Skolem function tuples", count, cap)

    for tables in itertools.product(*(itertools.product(range(n), repeat=k) for k in table_sizes)):
        if all(
            _classical(matrix, _skolem_assignment(plan, tables, choice, n), M)
            for choice in itertools.product(range(n), repeat=len(universals))
        ):
            return True
    return False


def _skolem_assignment(plan, tables, choice, n):
    s = {}
    u = iter(choice)
    t = iter(tables)
    for var, args in plan:
        if args is None:
            s[var] = next(u)
        else:
            index = 0
            for a in args:
                index = index * n + s[a]
            s[var] = next(t)[index]
    return s


# ---------------------------------------------------------------------------
# Strategy transfer


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    """Application of the strategy function of the existential at ``path``."""

    path: tuple
    var: str
    args: tuple


SubstitutionTerm = Union[Var, App]


def transfer_term(g: Game, p: Pair) -> SubstitutionTerm:
    """The functional expression for ``x`` built only from what ``y`` may see.

    Hidden existential variables are replaced by their strategy functions
    until only visible variables remain.  Meeting a hidden universal variable
    means a broken signalling sequence ends in the pair.
    """
    f = g.formula
    x, y = validate_pair(f, p)
    chain = {q.var: path for path, q in quantifier_chain(f, p.y_path)}
    points = {dp.path: dp for dp in g.decision_points}

    def expand(var, trail):
        if var not in y.slash:
            return Var(var)
        if var not in chain:
            raise BSSPresent(f"{y.var} hides the unquantified variable {var}")
        dp = points[chain[var]]
        if dp.player is not ELOISE:
            seq = ", ".join(reversed((var,) + trail))
            raise BSSPresent(f"broken signalling sequence ({seq}, {y.var})")
        args = tuple(expand(v, (var,) + trail) for v in dp.visible_vars)
        return App(dp.path, var, args)

    return expand(x.var, ())


def eval_term(t, env, sigma: PureStrategy):
    if isinstance(t, Var):
        return env[t.name]
    key = InfoClassKey(t.path, tuple(eval_term(a, env, sigma) for a in t.args))
    try:
        return sigma.moves[key]
    except KeyError:
        raise IncompleteStrategy(f"no move for {key}") from None


def strategy_transfer(sigma: PureStrategy, p: Pair, g: Game, check: bool = True) -> PureStrategy:
    """Eloise strategy for ``g`` (the game of ``phi``) built from ``sigma``,
    a strategy for the game of ``phi^{y<-x}``."""
    f = g.formula
    x, y = validate_pair(f, p)
    term = transfer_term(g, p)
    g_removed = Game(remove_independence(f, p), g.structure, g.assignment)
    if check and not is_winning(g_removed, sigma):
        raise NotWinning("input strategy does not win the game with the declaration removed")
    y_point = next(dp for dp in g.decision_points if dp.path == p.y_path)
    y_point_removed = next(dp for dp in g_removed.decision_points if dp.path == p.y_path)
    moves = {k: m for k, m in sigma.moves.items() if k.path != p.y_path}
    for key in g.info_classes(y_point):
        env = dict(zip(y_point.visible_vars, key.values))
        env[x.var] = eval_term(term, env, sigma)
        removed_key = InfoClassKey(p.y_path, tuple(env[v] for v in y_point_removed.visible_vars))
        try:
            moves[key] = sigma.moves[removed_key]
        except KeyError:
            raise IncompleteStrategy(f"no move for {removed_key}") from None
    out = PureStrategy(ELOISE, moves)
    if check and not is_winning(g, out):
        raise NotWinning("transferred strategy does not win; this is a bug")
    return out
