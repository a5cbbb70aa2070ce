"""Equilibrium semantics: the normal form of the semantic game and its exact value."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import CapExceeded, VerificationFailed
from .game import (
    ABELARD,
    DEFAULT_STRATEGY_CAP,
    ELOISE,
    Game,
    PureStrategy,
    build_game,
    enumerate_strategies,
    play_out,
    strategy_count,
    strategy_keys,
)
from .model import Structure
from .syntax import And, EqAtom, NegAtom, Or, RelAtom


@dataclass(frozen=True)
class PayoffMatrix:
    """Eloise's payoffs; rows are her pure strategies, columns Abelard's."""

    rows: tuple
    cols: tuple
    entries: tuple  # tuple of tuples of Fraction

    @property
    def shape(self):
        return len(self.entries), len(self.entries[0]) if self.entries else 0


@dataclass(frozen=True)
class MixedStrategy:
    weights: tuple  # Fractions, aligned with the matrix rows or columns

    def __post_init__(self):
        nonzero = [w for w in self.weights if w]
        if any(w < 0 for w in nonzero) or sum(nonzero) != 1:
            raise ValueError("weights must be non-negative and sum to 1")

    @property
    def support(self):
        return tuple(i for i, w in enumerate(self.weights) if w)


@dataclass(frozen=True)
class GameValue:
    value: Fraction
    eloise: MixedStrategy
    abelard: MixedStrategy


def format_value(v) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def payoff_matrix(g: Game, cap: int = DEFAULT_STRATEGY_CAP) -> PayoffMatrix:
    rows = tuple(enumerate_strategies(g, ELOISE, cap))
    cols = tuple(enumerate_strategies(g, ABELARD, cap))
    if _is_chain(g):
        table = _chain_entries(g).tolist()
        entries = tuple(tuple(Fraction(a) for a in row) for row in table)
    else:
        entries = tuple(
            tuple(Fraction(play_out(g, sigma, tau).eloise_utility) for tau in cols) for sigma in rows
        )
    return PayoffMatrix(rows, cols, entries)


def _is_chain(g):
    """True when every decision point is a quantifier (a prenex game)."""
    return all(node.kind == "leaf" or node.slot is not None for node in g.nodes.values())


@lru_cache(maxsize=64)
def _table_array(count, width, n):
    """Row ``r`` holds the base-``n`` digits of ``r`` (most significant first),
    matching the lexicographic order of :func:`enumerate_strategies`."""
    r = np.arange(count, dtype=np.int64)[:, None]
    powers = n ** np.arange(width - 1, -1, -1, dtype=np.int64)
    out = (r // powers) % n
    out.setflags(write=False)
    return out


def _qf_array(f, values, M):
    if isinstance(f, NegAtom):
        return ~_qf_array(f.inner, values, M)
    if isinstance(f, EqAtom):
        return values[f.left] == values[f.right]
    if isinstance(f, RelAtom):
        table = np.zeros((M.size,) * len(f.args), dtype=bool)
        for t in M.relations[f.name][1]:
            table[t] = True
        return table[tuple(values[v] for v in f.args)]
    lhs, rhs = _qf_array(f.lhs, values, M), _qf_array(f.rhs, values, M)
    return lhs & rhs if isinstance(f, And) else lhs | rhs


def _chain_entries(g):
    """Eloise's payoff for every pair of pure strategies of a prenex game,
    computed for all pairs at once."""
    n = g.structure.size
    arrays, offsets = {}, {}
    for player in (ELOISE, ABELARD):
        keys, _ = strategy_keys(g, player)
        arrays[player] = _table_array(strategy_count(g, player), len(keys), n)
        pos = 0
        for dp in g.points(player):
            offsets[dp.path] = pos
            pos += len(g.info_classes(dp))
    R, C = len(arrays[ELOISE]), len(arrays[ABELARD])
    values = {v: np.full((R, C), c, dtype=np.int64) for v, c in g.assignment.items()}
    pick = {ELOISE: np.arange(R)[:, None], ABELARD: np.arange(C)[None, :]}
    node = g.root
    while node.kind != "leaf":
        dp = node.dp
        index = np.zeros((R, C), dtype=np.int64)
        for v in dp.visible_vars:
            # fixed free variables have a single class value
            index = index * (1 if v in g.assignment else n) + (0 if v in g.assignment else values[v])
        values[dp.node.var] = arrays[dp.player][pick[dp.player], offsets[dp.path] + index]
        node = g.nodes[node.children[0]]
    return _qf_array(node.formula, values, g.structure).astype(np.int64)


def expected_utility(entries, mu: Sequence, nu: Sequence) -> Fraction:
    return sum(
        (mu[i] * nu[j] * a for i, row in enumerate(entries) if mu[i] for j, a in enumerate(row) if nu[j]),
        Fraction(0),
    )


def _simplex_max(A, b, c):
    """Maximise ``c.x`` subject to ``A x <= b``, ``x >= 0`` with ``b >= 0``.

    Dense tableau over Fractions, slack basis to start, Bland's rule for both
    the entering and the leaving variable.  Returns ``(optimum, x, duals)``.
    The problem must be bounded.
    """
    m, k = len(A), len(c)
    width = k + m
    tab = [list(map(Fraction, A[i])) + [Fraction(int(i == j)) for j in range(m)] + [Fraction(b[i])] for i in range(m)]
    reduced = [Fraction(v) for v in c] + [Fraction(0)] * m
    objective = Fraction(0)
    basis = list(range(k, k + m))
    while True:
        enter = next((j for j in range(width) if reduced[j] > 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            raise ValueError("unbounded linear program")
        prow = tab[leave]
        piv = prow[enter]
        if piv != 1:
            prow[:] = [v / piv for v in prow]
        for i in range(m):
            if i != leave:
                f = tab[i][enter]
                if f:
                    row = tab[i]
                    tab[i] = [v - f * p for v, p in zip(row, prow)]
        f = reduced[enter]
        reduced = [r - f * p for r, p in zip(reduced, prow[:-1])]
        objective += f * prow[-1]
        basis[leave] = enter
    x = [Fraction(0)] * k
    for i, var in enumerate(basis):
        if var < k:
            x[var] = tab[i][-1]
    duals = [-reduced[k + i] for i in range(m)]
    return objective, x, duals


def _maximin(entries):
    """Value and optimal mixes of the zero-sum game where the row player
    receives ``entries[i][j]``.

    With every entry shifted to be positive, maximising ``sum(q)`` subject to
    ``B q <= 1`` gives the column mix ``q / sum(q)``, the row mix from the
    duals and the value ``1 / sum(q)`` (minus the shift).
    """
    m, k = len(entries), len(entries[0])
    shift = 1 - min(min(row) for row in entries)
    shifted = [[a + shift for a in row] for row in entries]
    total, q, y = _simplex_max(shifted, [1] * m, [1] * k)
    mu = tuple(v / total for v in y)
    nu = tuple(v / total for v in q)
    return 1 / total - shift, mu, nu


def solve_zero_sum(matrix) -> GameValue:
    """Exact value and an equilibrium of the zero-sum game (Eloise maximises).

    Duplicate and weakly dominated rows and columns are removed first (an
    equilibrium of the reduced game is one of the full game); a pure saddle
    point is returned directly, otherwise the reduced game goes to the simplex
    with the player having fewer strategies indexing the constraints.  The
    result is checked against the full matrix.
    """
    entries = matrix.entries if isinstance(matrix, PayoffMatrix) else matrix
    if not len(entries) or not len(entries[0]):
        raise ValueError("empty payoff matrix")
    # copies of a strategy are interchangeable; weight goes to the first copy
    if isinstance(entries, np.ndarray):
        urows = _first_copies([r.tobytes() for r in entries])
        ucols = _first_copies([c.tobytes() for c in entries[urows].T])
        shape = entries.shape
        entries = entries[np.ix_(urows, ucols)].tolist()
    else:
        shape = (len(entries), len(entries[0]))
        urows = _first_copies([tuple(row) for row in entries])
        ucols = _first_copies([tuple(entries[i][j] for i in urows) for j in range(shape[1])])
        entries = [[entries[i][j] for j in ucols] for i in urows]
    A = np.array([[Fraction(a) for a in row] for row in entries], dtype=object)
    rows, cols = _reduce(A)
    sub = A[np.ix_(rows, cols)]
    lower = max(min(r) for r in sub)
    upper = min(max(c) for c in sub.T)
    if lower == upper:
        i = next(i for i, r in enumerate(sub) if min(r) == lower)
        j = next(j for j, c in enumerate(sub.T) if max(c) == upper)
        value, mu, nu = lower, _unit(len(rows), i), _unit(len(cols), j)
    else:
        value, mu, nu = _solve(sub.tolist())
    mu_u = [Fraction(0)] * len(urows)
    for i, w in zip(rows, mu):
        mu_u[i] = w
    nu_u = [Fraction(0)] * len(ucols)
    for j, w in zip(cols, nu):
        nu_u[j] = w
    # every distinct pure strategy is a possible deviation
    _check_equilibrium(A.tolist(), value, mu_u, nu_u)
    full_mu = [Fraction(0)] * shape[0]
    for i, w in zip(urows, mu_u):
        full_mu[i] = w
    full_nu = [Fraction(0)] * shape[1]
    for j, w in zip(ucols, nu_u):
        full_nu[j] = w
    return GameValue(value, MixedStrategy(tuple(full_mu)), MixedStrategy(tuple(full_nu)))


def _first_copies(items):
    seen = {}
    for i, item in enumerate(items):
        seen.setdefault(item, i)
    return sorted(seen.values())


def _unit(size, i):
    return tuple(Fraction(int(j == i)) for j in range(size))


def _undominated(M):
    """Indices of rows of ``M`` not weakly dominated by (or equal to) an
    earlier surviving row; a row equal to a later one keeps the first copy."""
    keep = []
    for i in range(M.shape[0]):
        if any((M[r] >= M[i]).all() for r in keep):
            continue
        keep = [r for r in keep if not (M[i] >= M[r]).all()]
        keep.append(i)
    return sorted(keep)


def _reduce(A):
    rows = list(range(A.shape[0]))
    cols = list(range(A.shape[1]))
    while True:
        sub = A[np.ix_(rows, cols)]
        new_rows = [rows[i] for i in _undominated(sub)]
        # Abelard minimises: his column dominates when it is pointwise smaller
        sub = A[np.ix_(new_rows, cols)]
        new_cols = [cols[j] for j in _undominated(-sub.T)]
        if new_rows == rows and new_cols == cols:
            return rows, cols
        rows, cols = new_rows, new_cols


def _solve(entries):
    m, k = len(entries), len(entries[0])
    if m <= k:
        return _maximin(entries)
    flipped = [[-entries[i][j] for i in range(m)] for j in range(k)]
    v, nu, mu = _maximin(flipped)
    return -v, mu, nu


def _check_equilibrium(entries, value, mu, nu):
    if expected_utility(entries, mu, nu) != value:
        raise VerificationFailed("expected utility of the profile differs from the value")
    k = len(entries[0])
    for j in range(k):
        if sum(mu[i] * row[j] for i, row in enumerate(entries) if mu[i]) < value:
            raise VerificationFailed(f"Abelard gains by deviating to column {j}")
    for i, row in enumerate(entries):
        if sum(nu[j] * a for j, a in enumerate(row) if nu[j]) > value:
            raise VerificationFailed(f"Eloise gains by deviating to row {i}")


def sentence_value(f, M: Structure, cap: int = DEFAULT_STRATEGY_CAP, collapse_matrix: bool = False) -> GameValue:
    """``v(f, M)``.  ``collapse_matrix`` solves the smaller game in which
    quantifier-free subformulas are scored classically (same value)."""
    g = build_game(f, M, collapse_matrix=collapse_matrix)
    if _is_chain(g):
        for player in (ELOISE, ABELARD):
            count = strategy_count(g, player)
            if count > cap:
                raise CapExceeded(f"{player.value} strategy count", count, cap)
        return solve_zero_sum(_chain_entries(g))
    return solve_zero_sum(payoff_matrix(g, cap))
