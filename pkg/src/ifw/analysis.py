"""Static analysis of declarations of independence between same-kind quantifiers.

The central test is the search for a *broken signalling sequence* ending in a
pair ``(x, y)`` with ``x`` in the slash set of ``y``: a universal head ``v_k``
followed by existentials ``v_{k-1} ... v_1``, each seeing its predecessor,
with ``v_1`` seen by ``x`` and every ``v_i`` hidden from ``y``.  Such a
sequence exists exactly when removing ``x`` from the slash set of ``y`` can
change the truth value of some sentence with the same prefix (or tree).

Every function here also handles the dual I∀∀ pairs by exchanging the roles of
the two quantifier kinds.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .errors import IFError, NotKM, VerificationFailed
from .model import Structure, enumerate_structures
from .semantics import TruthValue, has_winning_strategy, truth_value
from .game import ABELARD, ELOISE, build_game
from .syntax import (
    EXISTS,
    FORALL,
    And,
    EqAtom,
    NegAtom,
    Or,
    Pair,
    PrefixEntry,
    Quant,
    ancestors,
    children,
    find_pairs,
    is_quantifier_free,
    prefix_formula,
    print_formula,
    quantifier_chain,
    quantifier_prefix,
    relations,
    remove_independence,
    replace_at,
    require_regular,
    subformula_at,
    validate_pair,
    walk,
    with_matrix,
)


class NoBSS(IFError):
    code = "NO_BSS"


class BreakStatus(str, Enum):
    BREAKS_KM = "BREAKS_KM"
    WEAKLY_BREAKS_KM = "WEAKLY_BREAKS_KM"
    NEITHER = "NEITHER"


class Outcome(str, Enum):
    RELEVANT = "RELEVANT"
    IRRELEVANT = "IRRELEVANT"


def _dual(kind):
    return FORALL if kind == EXISTS else EXISTS


def as_formula(f_or_prefix):
    """Accept a formula or a bare prefix (sequence of :class:`PrefixEntry`)."""
    if isinstance(f_or_prefix, (tuple, list)):
        return prefix_formula(tuple(PrefixEntry(*e) for e in f_or_prefix))
    return f_or_prefix


def prefix_pair(prefix, y_var, x_var, kind=EXISTS):
    """The pair of a bare prefix declaring ``y_var`` independent of ``x_var``."""
    names = [e[1] for e in prefix]
    return Pair((0,) * names.index(x_var), (0,) * names.index(y_var), kind)


@dataclass(frozen=True)
class ChainEntry:
    path: tuple
    kind: str
    var: str
    slash: frozenset

    def __str__(self):
        slash = "/{" + ",".join(sorted(self.slash)) + "}" if self.slash else ""
        return f"{self.kind} {self.var}{slash}"


def _chain(f, p):
    return [ChainEntry(path, q.kind, q.var, q.slash) for path, q in quantifier_chain(f, p.y_path)]


@dataclass(frozen=True)
class BrokenSignallingSequence:
    """Entries ``(v_k, v_{k-1}, ..., v_1, x, y)`` in superordination order."""

    entries: tuple

    @property
    def k(self):
        return len(self.entries) - 2

    @property
    def head(self):
        return self.entries[0]

    def __str__(self):
        return "[" + ", ".join(map(str, self.entries)) + "]"


@dataclass(frozen=True)
class RelevanceVerdict:
    pair: Pair
    outcome: Outcome
    bss: Optional[BrokenSignallingSequence]
    break_status: BreakStatus

    @property
    def relevant(self):
        return self.outcome is Outcome.RELEVANT


def find_iee_pairs(f):
    return find_pairs(as_formula(f), EXISTS)


def find_iaa_pairs(f):
    return find_pairs(as_formula(f), FORALL)


def detect_break_status(f, p: Pair) -> BreakStatus:
    f = as_formula(f)
    x, y = validate_pair(f, p)
    chain = _chain(f, p)
    ix = next(i for i, e in enumerate(chain) if e.path == p.x_path)
    hidden = [e for e in chain[:ix] if e.var in y.slash and e.var not in x.slash]
    if any(e.kind == _dual(p.kind) for e in hidden):
        return BreakStatus.BREAKS_KM
    if hidden:
        return BreakStatus.WEAKLY_BREAKS_KM
    return BreakStatus.NEITHER


def detect_bss(f, p: Pair) -> Optional[BrokenSignallingSequence]:
    """Shortest broken signalling sequence ending in ``p`` (leftmost head among
    the shortest), or ``None``.

    Breadth-first over the quantifiers above ``x``: level ``i`` holds the
    candidates for ``v_i``, i.e. quantifiers hidden from ``y`` and visible to
    the level ``i-1`` element.  A dual-kind candidate closes a sequence; a
    same-kind candidate is extended further up.
    """
    f = as_formula(f)
    x, y = validate_pair(f, p)
    chain = _chain(f, p)
    ix = next(i for i, e in enumerate(chain) if e.path == p.x_path)
    parent = {}
    seen = set()
    frontier = [ix]
    while frontier:
        heads, nxt = [], []
        for cur in frontier:
            for i in range(cur):
                e = chain[i]
                if i in seen or e.var not in y.slash or e.var in chain[cur].slash:
                    continue
                seen.add(i)
                parent[i] = cur
                (heads if e.kind == _dual(p.kind) else nxt).append(i)
        if heads:
            i = min(heads)
            seq = [chain[i]]
            while i != ix:
                i = parent[i]
                seq.append(chain[i])
            seq.append(chain[-1])
            return BrokenSignallingSequence(tuple(seq))
        frontier = sorted(nxt)
    return None


def relevance(f, p: Pair) -> RelevanceVerdict:
    f = as_formula(f)
    bss = detect_bss(f, p)
    return RelevanceVerdict(
        p,
        Outcome.RELEVANT if bss else Outcome.IRRELEVANT,
        bss,
        detect_break_status(f, p),
    )


def analyze(f):
    """Relevance verdicts for every I∃∃ pair followed by every I∀∀ pair."""
    f = as_formula(f)
    return [relevance(f, p) for p in find_pairs(f, EXISTS) + find_pairs(f, FORALL)]


def format_verdict(f, v: RelevanceVerdict) -> str:
    f = as_formula(f)
    x = subformula_at(f, v.pair.x_path).var
    y = subformula_at(f, v.pair.y_path).var
    head = f"PAIR {x}<{y} : {v.outcome.value}"
    if v.bss:
        head += f" k={v.bss.k} chain={v.bss}"
    return head + f" status={v.break_status.value}"


# ---------------------------------------------------------------------------
# Witnesses


@dataclass(frozen=True)
class WitnessPackage:
    sentence: object
    removed: object
    model: Structure
    removed_verdict: TruthValue
    verdict: TruthValue
    fresh_var: str
    slash_set: frozenset
    bss: BrokenSignallingSequence


def _fresh(used, stem):
    if stem not in used:
        used.add(stem)
        return stem
    i = 1
    while f"{stem}{i}" in used:
        i += 1
    used.add(f"{stem}{i}")
    return f"{stem}{i}"


def _holes(f, path=()):
    """Paths of the maximal quantifier-free subformulas."""
    if is_quantifier_free(f):
        return [path]
    return [h for i, c in enumerate(children(f)) for h in _holes(c, path + (i,))]


def _conj(atoms):
    out = atoms[0]
    for a in atoms[1:]:
        out = And(out, a)
    return out


def witness_sentence(f, p: Pair, bss: BrokenSignallingSequence):
    """Fill the holes of the tree of ``f`` so that ``p`` becomes decisive.

    The branch through ``y`` (leftmost below ``y``) receives
    ``(E w/W)(v_k=y & x_1=w & ... & x_n=w)`` where the ``x_i`` are the other
    existentials of the branch; holes on other branches receive a
    contradiction under a disjunction and a validity under a conjunction.
    """
    f = as_formula(f)
    holes = _holes(f)
    main = next(h for h in holes if h[: len(p.y_path)] == p.y_path)
    branch = [n for _, n in ancestors(f, main) if isinstance(n, Quant)]
    used = {n.var for _, n in walk(f) if isinstance(n, Quant)}
    used |= {v for _, n in walk(f) if isinstance(n, Quant) for v in n.slash}
    slash_set = frozenset(q.var for q in branch) | frozenset(v for q in branch for v in q.slash)
    w = _fresh(used, "w")
    in_bss = {e.path for e in bss.entries[1:]}
    remaining = [
        q.var
        for path, q in ancestors(f, main)
        if isinstance(q, Quant) and q.kind == EXISTS and path not in in_bss
    ]
    atoms = [EqAtom(bss.head.var, bss.entries[-1].var)] + [EqAtom(v, w) for v in remaining]
    out = f
    for h in holes:
        if h == main:
            out = replace_at(out, h, Quant(EXISTS, w, slash_set, _conj(atoms)))
            continue
        split = 0
        while h[split] == main[split]:
            split += 1
        fork = subformula_at(f, h[:split])
        u = _fresh(used, "u")
        if isinstance(fork, Or):
            out = replace_at(out, h, Quant(EXISTS, u, frozenset(), NegAtom(EqAtom(u, u))))
        else:
            out = replace_at(out, h, Quant(EXISTS, u, frozenset(), EqAtom(u, u)))
    return out, w, slash_set


def build_witness(f, p: Pair, bss: Optional[BrokenSignallingSequence] = None) -> WitnessPackage:
    """A sentence beginning with the prefix/tree of ``f`` on which removing the
    declaration ``p`` turns a non-true sentence into a true one, checked on the
    two-element structure."""
    f = as_formula(f)
    require_regular(f)
    if p.kind != EXISTS:
        raise NoBSS("witnesses are built for I∃∃ declarations only")
    if bss is None:
        bss = detect_bss(f, p)
    if bss is None:
        raise NoBSS("no broken signalling sequence ends in this pair")
    phi, w, slash_set = witness_sentence(f, p, bss)
    removed = remove_independence(phi, p)
    model = Structure(2)
    tv_removed = truth_value(removed, model)
    tv = truth_value(phi, model)
    if tv_removed is not TruthValue.TRUE or tv is TruthValue.TRUE:
        raise VerificationFailed(
            f"witness {print_formula(phi)}: removed={tv_removed.value}, original={tv.value}"
        )
    return WitnessPackage(phi, removed, model, tv_removed, tv, w, slash_set, bss)


# ---------------------------------------------------------------------------
# Simplification


def _depth_order(f, pairs):
    return sorted(pairs, key=lambda p: (-len(p.y_path), -len(p.x_path), p.kind != EXISTS, p.y_path, p.x_path))


def simplify_slashes(f):
    """Remove irrelevant I∃∃ and I∀∀ declarations one at a time (deepest
    first), re-analysing after each removal, until all that remain are
    relevant.  Each step preserves strong equivalence."""
    f = as_formula(f)
    require_regular(f, sentence=False)
    while True:
        pairs = _depth_order(f, find_pairs(f, EXISTS) + find_pairs(f, FORALL))
        step = next((p for p in pairs if detect_bss(f, p) is None), None)
        if step is None:
            return f
        f = remove_independence(f, step)


# ---------------------------------------------------------------------------
# Fragments


@dataclass(frozen=True)
class FragmentReport:
    eloise_action_recall: bool
    abelard_action_recall: bool
    eloise_km: bool
    abelard_km: bool
    violations: tuple

    @property
    def perfect_recall(self):
        return all(
            (self.eloise_action_recall, self.abelard_action_recall, self.eloise_km, self.abelard_km)
        )


def _km_violations(f, kind):
    who = "ELOISE" if kind == EXISTS else "ABELARD"
    connective = Or if kind == EXISTS else And
    out = []
    for zpath, z in walk(f):
        if not (isinstance(z, Quant) and z.kind == kind):
            continue
        above = ancestors(f, zpath)
        for i, (_, w) in enumerate(above):
            if isinstance(w, Quant) and w.kind == kind:
                for _, v in above[:i]:
                    if isinstance(v, Quant) and v.var in z.slash and v.var not in w.slash:
                        out.append(
                            f"{who} KM: {v.var} is visible at {w.kind} {w.var} "
                            f"but hidden at {z.kind} {z.var}"
                        )
            if isinstance(w, connective):
                sym = "|" if connective is Or else "&"
                for _, v in above[:i]:
                    if isinstance(v, Quant) and v.var in z.slash:
                        out.append(
                            f"{who} KM: {z.kind} {z.var} hides {v.var}, quantified above a '{sym}' over it"
                        )
    return out


def classify(f) -> FragmentReport:
    """Action recall and (generalised) knowledge memory for both players."""
    f = as_formula(f)
    e_pairs, a_pairs = find_pairs(f, EXISTS), find_pairs(f, FORALL)
    e_km, a_km = _km_violations(f, EXISTS), _km_violations(f, FORALL)
    violations = []
    for p in e_pairs + a_pairs:
        who = "ELOISE" if p.kind == EXISTS else "ABELARD"
        x = subformula_at(f, p.x_path).var
        y = subformula_at(f, p.y_path).var
        violations.append(f"{who} AR: {y} is independent of {x}")
    violations += e_km + a_km
    return FragmentReport(not e_pairs, not a_pairs, not e_km, not a_km, tuple(violations))


# ---------------------------------------------------------------------------
# Translation of the knowledge-memory fragment


def translate_km(f, mode: str = "truth", verify: Optional[int] = None, cap: int = 10**5):
    """First-order sentence truth equivalent (``mode="truth"``) or falsity
    equivalent (``mode="falsity"``) to the prenex KM sentence ``f``.

    With ``verify=n`` the result is checked against ``f`` on every structure
    of size at most ``n``.
    """
    if mode not in ("truth", "falsity"):
        raise ValueError("mode must be 'truth' or 'falsity'")
    require_regular(f)
    prefix, matrix = quantifier_prefix(f, prenex=True)
    own = EXISTS if mode == "truth" else FORALL
    report = classify(f)
    if not (report.eloise_km if own == EXISTS else report.abelard_km):
        raise NotKM("; ".join(v for v in report.violations if "KM" in v))

    # the opponent's slash sets do not affect this player's winning strategies
    g = with_matrix(
        [PrefixEntry(e.kind, e.var, e.slash if e.kind == own else frozenset()) for e in prefix], matrix
    )
    while True:
        pairs = _depth_order(g, find_pairs(g, own))
        if not pairs:
            break
        bss = detect_bss(g, pairs[0])
        if bss is not None:
            raise NotKM(f"broken signalling sequence {bss}")
        g = remove_independence(g, pairs[0])

    prefix, matrix = quantifier_prefix(g)
    deps = {}
    seen = []
    for e in prefix:
        if e.kind == own:
            deps[e.var] = [v for v in seen if v not in e.slash]
        else:
            seen.append(e.var)
    out = []
    emitted = set()
    for e in prefix:
        if e.kind != own:
            continue
        if any(v not in deps[e.var] for v in emitted):
            raise NotKM(f"dependency sets are not nested at {e.var}")
        for v in deps[e.var]:
            if v not in emitted:
                out.append(PrefixEntry(_dual(own), v, frozenset()))
                emitted.add(v)
        out.append(PrefixEntry(own, e.var, frozenset()))
    out += [PrefixEntry(_dual(own), v, frozenset()) for v in seen if v not in emitted]
    result = with_matrix(out, matrix)
    if verify:
        check = equivalence_check(f, result, verify, cap, mode=mode)
        if not check.equivalent:
            raise VerificationFailed(f"translation differs on {check.counterexample}")
    return result


# ---------------------------------------------------------------------------
# Equivalence checking


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    checked: int
    counterexample: Optional[Structure] = None
    verdicts: Optional[tuple] = None


def _verdict(f, M, mode):
    if mode == "truth":
        return TruthValue.TRUE if has_winning_strategy(build_game(f, M), ELOISE)[0] else None
    if mode == "falsity":
        return TruthValue.FALSE if has_winning_strategy(build_game(f, M), ABELARD)[0] else None
    return truth_value(f, M)


def equivalence_check(f, g, max_size: int = 3, cap: int = 10**5, mode: str = "strong") -> EquivalenceResult:
    """Compare ``f`` and ``g`` on every structure up to ``max_size`` over their
    joint signature.  ``mode`` is ``"strong"`` (the full trichotomy),
    ``"truth"`` or ``"falsity"``.  Stops at the first divergence."""
    if mode not in ("strong", "truth", "falsity"):
        raise ValueError("mode must be 'strong', 'truth' or 'falsity'")
    require_regular(f)
    require_regular(g)
    sig = dict(relations(f))
    for name, arity in relations(g).items():
        if sig.setdefault(name, arity) != arity:
            raise ValueError(f"relation {name} has different arities in the two sentences")
    checked = 0
    for M in enumerate_structures(sig, max_size, cap):
        checked += 1
        a, b = _verdict(f, M, mode), _verdict(g, M, mode)
        if a != b:
            return EquivalenceResult(False, checked, M, (a, b))
    return EquivalenceResult(True, checked)
