"""Finite relational structures, atom evaluation and structure enumeration."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .errors import CapExceeded, MissingRelation, ParseError, TupleOutOfRange, UnboundVariable
from .syntax import EqAtom, NegAtom, RelAtom

Signature = Mapping[str, int]


@dataclass(frozen=True)
class Structure:
    """A finite structure with domain ``{0, ..., size-1}``.

    ``relations`` maps a relation symbol to ``(arity, frozenset_of_tuples)``.
    Equality is built in and never listed.
    """

    size: int
    relations: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("domain must be non-empty")
        rels = {}
        for name, (arity, tuples) in sorted(self.relations.items()):
            tuples = frozenset(tuple(t) for t in tuples)
            for t in tuples:
                if len(t) != arity:
                    raise ValueError(f"tuple {t} of {name} has wrong arity")
                if any(not 0 <= e < self.size for e in t):
                    raise TupleOutOfRange(f"tuple {t} of {name} outside domain 0..{self.size - 1}")
            rels[name] = (arity, tuples)
        object.__setattr__(self, "relations", rels)

    def __hash__(self):
        return hash((self.size, tuple(sorted(self.relations.items()))))

    def __eq__(self, other):
        return (
            isinstance(other, Structure)
            and self.size == other.size
            and self.relations == other.relations
        )

    @property
    def domain(self):
        return range(self.size)

    @property
    def signature(self):
        return {name: arity for name, (arity, _) in self.relations.items()}

    def holds(self, name, args):
        try:
            return tuple(args) in self.relations[name][1]
        except KeyError:
            raise MissingRelation(f"structure does not interpret {name}") from None

    def check_signature(self, sig):
        for name, arity in sig.items():
            if name not in self.relations:
                raise MissingRelation(f"structure does not interpret {name}")
            if self.relations[name][0] != arity:
                raise MissingRelation(
                    f"{name} has arity {self.relations[name][0]} in the structure, {arity} in the formula"
                )


def evaluate_atom(a, s: Mapping[str, int], M: Structure) -> bool:
    negated = isinstance(a, NegAtom)
    inner = a.inner if negated else a
    try:
        if isinstance(inner, EqAtom):
            value = s[inner.left] == s[inner.right]
        elif isinstance(inner, RelAtom):
            value = M.holds(inner.name, [s[v] for v in inner.args])
        else:
            raise TypeError(f"not an atom: {a!r}")
    except KeyError as e:
        raise UnboundVariable(f"variable {e.args[0]} is unassigned") from None
    return value != negated


# ---------------------------------------------------------------------------
# Model file format

_MODEL_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<word>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[{}(),]))")


def _model_tokens(text):
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.lstrip().startswith("#"):
            continue
        pos = 0
        while pos < len(line):
            if line[pos:].strip() == "":
                break
            m = _MODEL_TOKEN.match(line, pos)
            if m is None or m.end() == pos:
                raise ParseError(f"unexpected character {line[pos:].strip()[0]!r}", lineno, pos + 1)
            kind = m.lastgroup
            value = m.group(kind)
            out.append((kind, value, lineno, m.start(kind) + 1))
            pos = m.end()
    return out


def parse_model(text: str) -> Structure:
    toks = _model_tokens(text)
    i = 0

    def fail(msg, expected=()):
        if i < len(toks):
            _, _, line, col = toks[i]
        else:
            line, col = (toks[-1][2], toks[-1][3]) if toks else (1, 1)
            msg += " (end of input)"
        raise ParseError(msg, line, col, expected)

    def take(kind, value=None):
        nonlocal i
        if i >= len(toks) or toks[i][0] != kind or (value is not None and toks[i][1] != value):
            fail("unexpected token", [repr(value) if value else kind])
        i += 1
        return toks[i - 1][1]

    take("word", "domain")
    size = int(take("int"))
    if size < 1:
        i -= 1
        fail("domain size must be positive")
    rels = {}
    while i < len(toks):
        take("word", "relation")
        name = take("word")
        if not name[0].isupper():
            i -= 1
            fail("relation symbols start with an uppercase letter")
        if name in rels:
            i -= 1
            fail(f"relation {name} declared twice")
        arity = int(take("int"))
        take("punct", "{")
        tuples = set()
        while not (i < len(toks) and toks[i][:2] == ("punct", "}")):
            take("punct", "(")
            t = []
            if not (i < len(toks) and toks[i][:2] == ("punct", ")")):
                t.append(int(take("int")))
                while i < len(toks) and toks[i][:2] == ("punct", ","):
                    i += 1
                    t.append(int(take("int")))
            take("punct", ")")
            if len(t) != arity:
                i -= 1
                fail(f"tuple of length {len(t)} in relation {name} of arity {arity}")
            if any(e >= size for e in t):
                raise TupleOutOfRange(f"tuple {tuple(t)} of {name} outside domain 0..{size - 1}")
            tuples.add(tuple(t))
        take("punct", "}")
        rels[name] = (arity, frozenset(tuples))
    return Structure(size, rels)


def format_model(M: Structure) -> str:
    lines = [f"domain {M.size}"]
    for name, (arity, tuples) in sorted(M.relations.items()):
        body = " ".join("(" + ",".join(map(str, t)) + ")" for t in sorted(tuples))
        lines.append(f"relation {name} {arity} {{ {body} }}" if body else f"relation {name} {arity} {{ }}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Enumeration


def count_structures(sig: Signature, max_size: int) -> int:
    total = 0
    for n in range(1, max_size + 1):
        per = 1
        for arity in sig.values():
            per *= 2 ** (n**arity)
        total += per
    return total


def enumerate_structures(sig: Signature, max_size: int, cap: int = 10**5) -> Iterator[Structure]:
    """All structures over ``sig`` with domain size ``1..max_size``.

    Order: size ascending, then the relations (by name) read as bitmaps over
    their lexicographically ordered tuple spaces, first relation most
    significant.  The cap is checked before anything is yielded.
    """
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    total = count_structures(sig, max_size)
    if total > cap:
        raise CapExceeded("structure count", total, cap)
    names = sorted(sig)
    return _structures(sig, names, max_size)


def _structures(sig, names, max_size):
    for n in range(1, max_size + 1):
        spaces = [list(itertools.product(range(n), repeat=sig[name])) for name in names]
        for bitmaps in itertools.product(*(range(2 ** len(sp)) for sp in spaces)):
            rels = {}
            for name, space, bits in zip(names, spaces, bitmaps):
                rels[name] = (sig[name], frozenset(t for k, t in enumerate(space) if bits >> k & 1))
            yield Structure(n, rels)
