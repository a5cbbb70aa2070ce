"""The semantic game of imperfect information for an IF formula on a structure.

The game tree is never built.  A :class:`Game` holds one decision point per
quantifier and connective occurrence; histories at an occurrence are
identified by their assignment, and an information class is the occurrence
plus the values of the variables the mover is allowed to see.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from math import prod
from typing import Iterator, Mapping, NamedTuple

from .errors import CapExceeded, IncompleteStrategy, UnboundVariable
from .model import Structure
from .syntax import (
    ATOMS,
    EXISTS,
    And,
    EqAtom,
    Formula,
    NegAtom,
    NotSentence,
    Or,
    Quant,
    RelAtom,
    free_variables,
    is_quantifier_free,
    relations,
    require_regular,
)

DEFAULT_STRATEGY_CAP = 2**20

LEFT, RIGHT = 0, 1
ELEMENT, BRANCH = "ELEMENT", "BRANCH"


class Player(str, Enum):
    ELOISE = "ELOISE"
    ABELARD = "ABELARD"

    @property
    def opponent(self):
        return Player.ABELARD if self is Player.ELOISE else Player.ELOISE


ELOISE = Player.ELOISE
ABELARD = Player.ABELARD


@dataclass(frozen=True)
class DecisionPoint:
    path: tuple
    player: Player
    scope_vars: tuple
    hidden_vars: frozenset
    move_kind: str
    node: Formula = field(compare=False, repr=False)

    @property
    def visible_vars(self):
        return tuple(v for v in self.scope_vars if v not in self.hidden_vars)


class InfoClassKey(NamedTuple):
    """Decision-point path plus the values of its visible variables, in the
    order of :attr:`DecisionPoint.visible_vars`."""

    path: tuple
    values: tuple


@dataclass(frozen=True)
class PureStrategy:
    player: Player
    moves: Mapping[InfoClassKey, int]

    def __getitem__(self, key):
        return self.moves[key]


@dataclass(frozen=True)
class Play:
    moves: tuple  # ((path, move), ...)
    atom: Formula
    assignment: Mapping[str, int]
    eloise_utility: int

    @property
    def abelard_utility(self):
        return 1 - self.eloise_utility

    def utility(self, player):
        return self.eloise_utility if player is ELOISE else self.abelard_utility


class _Node:
    __slots__ = ("path", "kind", "children", "slot", "visible", "dp", "formula", "test")

    def __init__(self, path, kind, formula):
        self.path = path
        self.kind = kind  # 'E', 'A', 'or', 'and', 'leaf'
        self.formula = formula
        self.children = ()
        self.slot = None
        self.visible = ()
        self.dp = None
        self.test = None


def _compile_qf(f, slots, M):
    """Classical evaluator ``assignment_tuple -> bool`` for a quantifier-free formula."""
    if isinstance(f, NegAtom):
        inner = _compile_qf(f.inner, slots, M)
        return lambda s: not inner(s)
    if isinstance(f, EqAtom):
        a, b = slots[f.left], slots[f.right]
        return lambda s: s[a] == s[b]
    if isinstance(f, RelAtom):
        idx = tuple(slots[v] for v in f.args)
        table = M.relations[f.name][1]
        return lambda s: tuple(s[i] for i in idx) in table
    lhs = _compile_qf(f.lhs, slots, M)
    rhs = _compile_qf(f.rhs, slots, M)
    if isinstance(f, And):
        return lambda s: lhs(s) and rhs(s)
    return lambda s: lhs(s) or rhs(s)


class Game:
    """``G(formula, assignment, structure)``.

    With ``collapse_matrix=True`` every maximal quantifier-free subformula is
    treated as a terminal position whose outcome is its classical truth value.
    Those subgames have perfect information, so truth values and equilibrium
    values are unchanged, but the strategy sets shrink.
    """

    def __init__(self, formula, structure: Structure, assignment=None, collapse_matrix=False):
        self.formula = formula
        self.structure = structure
        self.assignment = dict(assignment or {})
        self.collapse_matrix = collapse_matrix
        fixed = sorted(self.assignment)
        self.slots = {v: i for i, v in enumerate(fixed)}
        self.nodes = {}
        self.decision_points = []
        self._compile(formula, (), tuple(fixed))
        self.initial = tuple(self.assignment.get(v) for v in self.slots)
        self.root = self.nodes[()]

    def _slot(self, var):
        if var not in self.slots:
            self.slots[var] = len(self.slots)
        return self.slots[var]

    def _compile(self, f, path, scope):
        if isinstance(f, ATOMS) or (self.collapse_matrix and is_quantifier_free(f)):
            # the evaluator is compiled lazily, once every slot is allocated
            self.nodes[path] = _Node(path, "leaf", f)
            return
        if isinstance(f, Quant):
            node = _Node(path, f.kind, f)
            node.slot = self._slot(f.var)
            player = ELOISE if f.kind == EXISTS else ABELARD
            dp = DecisionPoint(path, player, scope, f.slash, ELEMENT, f)
            node.children = (path + (0,),)
            self.nodes[path] = node
            node.dp = dp
            self.decision_points.append(dp)
            self._compile(f.body, path + (0,), scope + (f.var,))
        else:
            node = _Node(path, "or" if isinstance(f, Or) else "and", f)
            player = ELOISE if isinstance(f, Or) else ABELARD
            dp = DecisionPoint(path, player, scope, frozenset(), BRANCH, f)
            node.children = (path + (0,), path + (1,))
            self.nodes[path] = node
            node.dp = dp
            self.decision_points.append(dp)
            self._compile(f.lhs, path + (0,), scope)
            self._compile(f.rhs, path + (1,), scope)
        node.visible = tuple(self.slots[v] for v in dp.visible_vars)

    def leaf_test(self, node):
        if node.test is None:
            node.test = _compile_qf(node.formula, self.slots, self.structure)
        return node.test

    def key(self, node, s):
        return InfoClassKey(node.path, tuple(s[i] for i in node.visible))

    def moves(self, dp):
        if dp.move_kind == BRANCH:
            return (LEFT, RIGHT)
        return tuple(self.structure.domain)

    def points(self, player):
        return [dp for dp in self.decision_points if dp.player is player]

    def info_classes(self, dp) -> list:
        """Every information class at ``dp`` that some history reaches."""
        ranges = []
        for v in dp.visible_vars:
            if v in self.assignment:
                ranges.append((self.assignment[v],))
            else:
                ranges.append(tuple(self.structure.domain))
        return [InfoClassKey(dp.path, vals) for vals in itertools.product(*ranges)]

    def to_tuple(self, s: Mapping[str, int]):
        out = [None] * len(self.slots)
        for v, c in s.items():
            if v in self.slots:
                out[self.slots[v]] = c
        return tuple(out)

    def to_dict(self, s):
        return {v: s[i] for v, i in self.slots.items() if s[i] is not None}


def build_game(f: Formula, M: Structure, assignment=None, collapse_matrix=False) -> Game:
    assignment = dict(assignment or {})
    require_regular(f, sentence=False)
    missing = free_variables(f) - set(assignment)
    if missing:
        raise NotSentence("free variables without a value: " + ",".join(sorted(missing)))
    M.check_signature(relations(f))
    return Game(f, M, assignment, collapse_matrix)


def visible_assignment(g: Game, d: DecisionPoint, s: Mapping[str, int]) -> dict:
    out = {}
    for v in d.scope_vars:
        if v not in s:
            raise UnboundVariable(f"variable {v} is in scope at {list(d.path)} but unassigned")
        if v not in d.hidden_vars:
            out[v] = s[v]
    return out


def strategy_count(g: Game, player: Player) -> int:
    return prod(len(g.moves(dp)) ** len(g.info_classes(dp)) for dp in g.points(player))


def strategy_keys(g: Game, player: Player):
    keys, options = [], []
    for dp in g.points(player):
        for k in g.info_classes(dp):
            keys.append(k)
            options.append(g.moves(dp))
    return keys, options


def enumerate_strategies(g: Game, player: Player, cap: int = DEFAULT_STRATEGY_CAP) -> Iterator[PureStrategy]:
    """All uniform pure strategies of ``player``, in lexicographic order of
    moves over the information classes (decision points in formula order)."""
    count = strategy_count(g, player)
    if count > cap:
        raise CapExceeded(f"{player.value} strategy count", count, cap)
    keys, options = strategy_keys(g, player)
    return (PureStrategy(player, dict(zip(keys, choice))) for choice in itertools.product(*options))


def play_out(g: Game, sigma: PureStrategy, tau: PureStrategy) -> Play:
    strategies = {ELOISE: sigma, ABELARD: tau}
    for p, st in strategies.items():
        if st.player is not p:
            raise ValueError(f"expected a strategy for {p.value}")
    node = g.root
    s = g.initial
    history = []
    while node.kind != "leaf":
        dp = node.dp
        key = g.key(node, s)
        try:
            move = strategies[dp.player].moves[key]
        except KeyError:
            raise IncompleteStrategy(f"{dp.player.value} has no move for {key}") from None
        history.append((node.path, move))
        if node.slot is not None:
            s = s[: node.slot] + (move,) + s[node.slot + 1 :]
            node = g.nodes[node.children[0]]
        else:
            node = g.nodes[node.children[move]]
    win = g.leaf_test(node)(s)
    return Play(tuple(history), node.formula, g.to_dict(s), int(win))
