"""Generators shared by the property tests and the acceptance script."""

import itertools
import random

from ifw.syntax import EXISTS, FORALL, And, EqAtom, NegAtom, Or, PrefixEntry, find_pairs, with_matrix

VARS = ("a", "b", "c", "d")


def all_prefixes(max_len=4):
    """Every regular prefix over the first ``max_len`` variables, with every slash pattern."""
    out = []
    for n in range(1, max_len + 1):
        names = VARS[:n]
        for kinds in itertools.product((EXISTS, FORALL), repeat=n):
            slash_options = [
                [frozenset(c) for r in range(i + 1) for c in itertools.combinations(names[:i], r)]
                for i in range(n)
            ]
            for slashes in itertools.product(*slash_options):
                out.append(tuple(PrefixEntry(k, v, s) for k, v, s in zip(kinds, names, slashes)))
    return out


def random_matrix(rng, names, atoms=3):
    """A random quantifier-free equality formula over ``names``."""
    lits = []
    for _ in range(rng.randint(1, atoms)):
        a = EqAtom(rng.choice(names), rng.choice(names))
        lits.append(NegAtom(a) if rng.random() < 0.35 else a)
    f = lits[0]
    for lit in lits[1:]:
        f = And(f, lit) if rng.random() < 0.5 else Or(f, lit)
    return f


def matrices(names, count, seed):
    rng = random.Random(seed)
    return [random_matrix(rng, names) for _ in range(count)]


def sentence(prefix, matrix):
    return with_matrix(prefix, matrix)


def pairs_of(prefix):
    f = with_matrix(prefix, EqAtom(prefix[0].var, prefix[0].var))
    return find_pairs(f, EXISTS) + find_pairs(f, FORALL)
