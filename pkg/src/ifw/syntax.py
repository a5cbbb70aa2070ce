"""IF formulas: AST, parser, printer and the structural helpers built on them.

Formulas are kept in negation normal form by construction: the only negation
node is :class:`NegAtom`.  Positions inside a formula are addressed by
*node paths*, tuples of child indices from the root (a quantifier has the one
child ``0``; a connective has ``0`` for the left and ``1`` for the right operand).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Union

from .errors import IFError, InvalidPair, NotPrenex, ParseError

EXISTS = "E"
FORALL = "A"


@dataclass(frozen=True)
class RelAtom:
    name: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class EqAtom:
    left: str
    right: str


@dataclass(frozen=True)
class NegAtom:
    inner: Union[RelAtom, EqAtom]


@dataclass(frozen=True)
class And:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Or:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Quant:
    kind: str
    var: str
    slash: frozenset
    body: "Formula"

    def __post_init__(self):
        if self.kind not in (EXISTS, FORALL):
            raise ValueError(f"bad quantifier kind {self.kind!r}")
        if not isinstance(self.slash, frozenset):
            object.__setattr__(self, "slash", frozenset(self.slash))


Formula = Union[RelAtom, EqAtom, NegAtom, And, Or, Quant]
ATOMS = (RelAtom, EqAtom, NegAtom)


class PrefixEntry(NamedTuple):
    kind: str
    var: str
    slash: frozenset


@dataclass(frozen=True)
class Pair:
    """A declaration of independence of the quantifier at ``y_path`` from the
    (same-kind) quantifier at ``x_path``.  ``kind`` is ``E`` for I∃∃ pairs and
    ``A`` for their I∀∀ duals."""

    x_path: tuple
    y_path: tuple
    kind: str = EXISTS


class IrregularFormula(IFError):
    code = "IRREGULAR"


class NotSentence(IFError):
    code = "NOT_SENTENCE"


def exists(var, body, slash=()):
    return Quant(EXISTS, var, frozenset(slash), body)


def forall(var, body, slash=()):
    return Quant(FORALL, var, frozenset(slash), body)


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<lower>[a-z][A-Za-z0-9_]*)
  | (?P<upper>[A-Z][A-Za-z0-9_]*)
  | (?P<punct>[/{},()=~&|])
    """,
    re.VERBOSE,
)


class _Token(NamedTuple):
    kind: str  # 'var', 'rel', 'kw', 'punct', 'eof'
    text: str
    line: int
    col: int


def _tokenize(text):
    tokens = []
    pos = 0
    line, col = 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        chunk = m.group()
        if m.lastgroup == "lower":
            tokens.append(_Token("var", chunk, line, col))
        elif m.lastgroup == "upper":
            kind = "kw" if chunk in (EXISTS, FORALL) else "rel"
            tokens.append(_Token(kind, chunk, line, col))
        elif m.lastgroup == "punct":
            tokens.append(_Token("punct", chunk, line, col))
        for ch in chunk:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def fail(self, expected):
        t = self.tok
        found = repr(t.text) if t.kind != "eof" else "end of input"
        raise ParseError(f"unexpected {found}", t.line, t.col, expected)

    def accept(self, text):
        if self.tok.kind == "punct" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            self.fail([repr(text)])

    def var(self):
        if self.tok.kind != "var":
            self.fail(["variable"])
        name = self.tok.text
        self.i += 1
        return name

    def formula(self):
        if self.tok.kind == "kw":
            return self.quant()
        return self.disj()

    def quant_head(self):
        kind = self.tok.text
        self.i += 1
        var = self.var()
        slash = []
        if self.accept("/"):
            self.expect("{")
            if not self.accept("}"):
                slash.append(self.var())
                while self.accept(","):
                    slash.append(self.var())
                self.expect("}")
        return kind, var, frozenset(slash)

    def quant(self):
        kind, var, slash = self.quant_head()
        return Quant(kind, var, slash, self.formula())

    def disj(self):
        f = self.conj()
        while self.accept("|"):
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unit()
        while self.accept("&"):
            f = And(f, self.unit())
        return f

    def unit(self):
        t = self.tok
        if t.kind == "kw":
            # quantifier scope is maximal, so a quantified operand runs to
            # the end of the enclosing group
            return self.quant()
        if self.accept("~"):
            if self.accept("("):
                a = self.atom()
                self.expect(")")
                return NegAtom(a)
            return NegAtom(self.atom())
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        return self.atom()

    def atom(self):
        t = self.tok
        if t.kind == "var":
            left = self.var()
            self.expect("=")
            return EqAtom(left, self.var())
        if t.kind == "rel":
            self.i += 1
            self.expect("(")
            args = [self.var()]
            while self.accept(","):
                args.append(self.var())
            self.expect(")")
            return RelAtom(t.text, tuple(args))
        self.fail(["variable", "relation symbol", "'('", "'~'", "'A'", "'E'"])

    def end(self):
        if self.tok.kind != "eof":
            self.fail(["end of input", "'&'", "'|'"])


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.end()
    return f


def parse_prefix(text: str) -> tuple[PrefixEntry, ...]:
    """Parse a bare quantifier prefix such as ``"A x E y E z/{x,y}"``."""
    p = _Parser(text)
    entries = []
    while p.tok.kind == "kw":
        entries.append(PrefixEntry(*p.quant_head()))
    if not entries:
        p.fail(["'A'", "'E'"])
    p.end()
    return tuple(entries)


# ---------------------------------------------------------------------------
# Printing


def _slash_text(slash):
    if not slash:
        return ""
    return "/{" + ",".join(sorted(slash)) + "}"


def print_formula(f: Formula) -> str:
    if isinstance(f, EqAtom):
        return f"{f.left}={f.right}"
    if isinstance(f, RelAtom):
        return f"{f.name}({','.join(f.args)})"
    if isinstance(f, NegAtom):
        return "~" + print_formula(f.inner)
    if isinstance(f, (And, Or)):
        op = " & " if isinstance(f, And) else " | "
        left = print_formula(f.lhs)
        if isinstance(f.lhs, Quant):
            left = f"({left})"
        return "(" + left + op + print_formula(f.rhs) + ")"
    body = print_formula(f.body)
    if isinstance(f.body, EqAtom) or (isinstance(f.body, NegAtom) and isinstance(f.body.inner, EqAtom)):
        body = f"({body})"
    return f"{f.kind} {f.var}{_slash_text(f.slash)} {body}"


def print_prefix(prefix) -> str:
    return " ".join(f"{e.kind} {e.var}{_slash_text(e.slash)}" for e in prefix)


# ---------------------------------------------------------------------------
# Structure


def children(f):
    if isinstance(f, Quant):
        return (f.body,)
    if isinstance(f, (And, Or)):
        return (f.lhs, f.rhs)
    return ()


def walk(f, path=()) -> Iterator[tuple[tuple, Formula]]:
    """Preorder traversal yielding ``(path, node)``; atoms are leaves."""
    yield path, f
    for i, c in enumerate(children(f)):
        yield from walk(c, path + (i,))


def subformula_at(f, path):
    for i in path:
        kids = children(f)
        if i >= len(kids):
            raise InvalidPair(f"path {path} does not address a node")
        f = kids[i]
    return f


def replace_at(f, path, new):
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(f, Quant) and i == 0:
        return Quant(f.kind, f.var, f.slash, replace_at(f.body, rest, new))
    if isinstance(f, (And, Or)) and i in (0, 1):
        lhs = replace_at(f.lhs, rest, new) if i == 0 else f.lhs
        rhs = replace_at(f.rhs, rest, new) if i == 1 else f.rhs
        return type(f)(lhs, rhs)
    raise InvalidPair(f"path {path} does not address a node")


def ancestors(f, path):
    """Nodes strictly above ``path``, root first, as ``(path, node)``."""
    out = []
    node = f
    for depth, i in enumerate(path):
        out.append((path[:depth], node))
        node = children(node)[i]
    return out


def quantifier_chain(f, path):
    """The quantifiers on the branch from the root down to and including
    ``path`` (the node at ``path`` is included if it is a quantifier)."""
    chain = [(p, n) for p, n in ancestors(f, path) if isinstance(n, Quant)]
    node = subformula_at(f, path)
    if isinstance(node, Quant):
        chain.append((path, node))
    return chain


def atom_vars(a):
    if isinstance(a, NegAtom):
        a = a.inner
    if isinstance(a, EqAtom):
        return (a.left, a.right)
    return a.args


def free_variables(f: Formula) -> frozenset:
    if isinstance(f, ATOMS):
        return frozenset(atom_vars(f))
    if isinstance(f, (And, Or)):
        return free_variables(f.lhs) | free_variables(f.rhs)
    return (free_variables(f.body) - {f.var}) | f.slash


def relations(f):
    """Map relation symbol -> arity for every relation atom in ``f``."""
    out = {}
    for _, node in walk(f):
        a = node.inner if isinstance(node, NegAtom) else node
        if isinstance(a, RelAtom):
            if out.setdefault(a.name, len(a.args)) != len(a.args):
                raise IrregularFormula(f"relation {a.name} used with two arities")
    return out


def is_quantifier_free(f):
    return not any(isinstance(n, Quant) for _, n in walk(f))


class RegularityReport(NamedTuple):
    violations: tuple

    @property
    def ok(self):
        return not self.violations


def check_regular(f: Formula) -> RegularityReport:
    violations = []

    def visit(node, path, bound):
        if isinstance(node, Quant):
            for x in sorted(node.slash - set(bound)):
                violations.append(
                    f"clause 1: {node.kind} {node.var} at {list(path)} slashes {x}, "
                    "which is not quantified above it"
                )
            if node.var in bound:
                violations.append(
                    f"clause 2: {node.kind} {node.var} at {list(path)} is below "
                    f"another quantification of {node.var}"
                )
            visit(node.body, path + (0,), bound + (node.var,))
        else:
            for i, c in enumerate(children(node)):
                visit(c, path + (i,), bound)

    visit(f, (), ())
    return RegularityReport(tuple(violations))


def require_regular(f, sentence=True):
    report = check_regular(f)
    if not report.ok:
        raise IrregularFormula("; ".join(report.violations))
    if sentence:
        fv = free_variables(f)
        if fv:
            raise NotSentence("free variables " + ",".join(sorted(fv)))
    return f


def quantifier_prefix(f: Formula, prenex: bool = False):
    """Split ``f`` into its maximal leading quantifier chain and the rest.

    With ``prenex=True`` the remainder must be quantifier free, otherwise
    :class:`NotPrenex` is raised.
    """
    entries = []
    while isinstance(f, Quant):
        entries.append(PrefixEntry(f.kind, f.var, f.slash))
        f = f.body
    if prenex and not is_quantifier_free(f):
        raise NotPrenex("a quantifier occurs below a connective")
    return tuple(entries), f


def with_matrix(prefix, matrix):
    for e in reversed(prefix):
        matrix = Quant(e.kind, e.var, frozenset(e.slash), matrix)
    return matrix


def prefix_formula(prefix):
    """A sentence with the given prefix and a trivial matrix, used where an
    operation needs a formula but only the prefix matters."""
    last = prefix[-1].var
    return with_matrix(prefix, EqAtom(last, last))


def find_pairs(f, kind=EXISTS):
    """All pairs (x, y) of ``kind`` quantifiers with x above y and var(x) in slash(y)."""
    out = []
    for ypath, y in walk(f):
        if not (isinstance(y, Quant) and y.kind == kind and y.slash):
            continue
        for xpath, x in ancestors(f, ypath):
            if isinstance(x, Quant) and x.kind == kind and x.var in y.slash:
                out.append(Pair(xpath, ypath, kind))
    return out


def validate_pair(f, p: Pair):
    try:
        x = subformula_at(f, p.x_path)
        y = subformula_at(f, p.y_path)
    except InvalidPair:
        raise InvalidPair(f"pair {p} does not address nodes of the formula") from None
    if not (isinstance(x, Quant) and isinstance(y, Quant)):
        raise InvalidPair("pair does not address two quantifiers")
    if x.kind != p.kind or y.kind != p.kind:
        kind = "existential" if p.kind == EXISTS else "universal"
        raise InvalidPair(f"pair does not address two {kind} quantifiers")
    if not (len(p.x_path) < len(p.y_path) and p.y_path[: len(p.x_path)] == p.x_path):
        raise InvalidPair("x is not superordinated to y")
    if x.var not in y.slash:
        raise InvalidPair(f"{x.var} is not in the slash set of {y.var}")
    return x, y


def remove_independence(f: Formula, p: Pair) -> Formula:
    x, y = validate_pair(f, p)
    return replace_at(f, p.y_path, Quant(y.kind, y.var, y.slash - {x.var}, y.body))


def pair_by_vars(f, y_var, x_var):
    """Locate the pair declaring ``y_var`` independent of ``x_var``."""
    found = [
        p
        for kind in (EXISTS, FORALL)
        for p in find_pairs(f, kind)
        if subformula_at(f, p.y_path).var == y_var and subformula_at(f, p.x_path).var == x_var
    ]
    if not found:
        raise InvalidPair(f"no I∃∃ or I∀∀ declaration of {y_var} independent of {x_var}")
    if len(found) > 1:
        raise InvalidPair(f"declaration {y_var},{x_var} is ambiguous")
    return found[0]
