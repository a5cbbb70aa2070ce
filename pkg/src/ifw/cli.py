"""``ifw``: command-line front end.

Every subcommand prints ``key: value`` lines; truth, value and relevance
reports start with ``verdict:``.  Exit codes: 0 success, 1 usage, 2 parse or
input error, 3 cap exceeded, 4 not applicable.
"""

from __future__ import annotations

import argparse
import sys

from .analysis import (
    NoBSS,
    analyze,
    build_witness,
    classify,
    equivalence_check,
    format_verdict,
    relevance,
    simplify_slashes,
    translate_km,
)
from .equilibrium import format_value, sentence_value
from .errors import CapExceeded, IFError, ParseError, TupleOutOfRange
from .game import DEFAULT_STRATEGY_CAP
from .model import Structure, format_model, parse_model
from .semantics import truth_value
from .syntax import IrregularFormula, NotSentence, pair_by_vars, parse_formula, print_formula, require_regular

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_CAP, EXIT_NA = 0, 1, 2, 3, 4

_INPUT_ERRORS = (ParseError, IrregularFormula, NotSentence, TupleOutOfRange)


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _formula(text):
    f = parse_formula(text)
    require_regular(f)
    return f


def _structure(args):
    if args.model and args.domain is not None:
        raise UsageError("give either -m or -n, not both")
    if args.model:
        try:
            with open(args.model, encoding="utf-8") as fh:
                return parse_model(fh.read())
        except OSError as e:
            raise UsageError(f"cannot read model: {e.strerror}") from None
    if args.domain is not None:
        if args.domain < 1:
            raise UsageError("domain size must be positive")
        return Structure(args.domain)
    raise UsageError("a model is required (-m FILE or -n SIZE)")


def _pair(f, text):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise UsageError("--pair expects 'y,x' (y independent of x)")
    return pair_by_vars(f, parts[0], parts[1])


def cmd_truth(args, out):
    f = _formula(args.formula)
    M = _structure(args)
    out.append(f"verdict: {truth_value(f, M).value}")
    out.append(f"domain: {M.size}")


def cmd_value(args, out):
    f = _formula(args.formula)
    M = _structure(args)
    gv = sentence_value(f, M, cap=args.cap, collapse_matrix=True)
    out.append(f"verdict: {format_value(gv.value)}")
    out.append(f"domain: {M.size}")


def cmd_analyze(args, out):
    f = _formula(args.formula)
    verdicts = [relevance(f, _pair(f, args.pair))] if args.pair else analyze(f)
    if not verdicts:
        out.append("verdict: NO_DECLARATIONS")
        return
    overall = "RELEVANT" if any(v.relevant for v in verdicts) else "IRRELEVANT"
    out.append(f"verdict: {overall}")
    out.extend(format_verdict(f, v) for v in verdicts)


def cmd_witness(args, out):
    f = _formula(args.formula)
    if args.pair:
        p = _pair(f, args.pair)
    else:
        p = next((v.pair for v in analyze(f) if v.relevant and v.pair.kind == "E"), None)
        if p is None:
            raise NoBSS("no relevant I∃∃ declaration")
    w = build_witness(f, p)
    out.append("verdict: WITNESS")
    out.append(f"witness: {print_formula(w.sentence)}")
    out.append(f"removed: {print_formula(w.removed)}")
    out.append(f"bss: {w.bss}")
    out.append("model:")
    out.extend(format_model(w.model).splitlines())
    out.append(f"phi_removed: {w.removed_verdict.value}")
    out.append(f"phi: {w.verdict.value}")
    out.append(f"domain: {w.model.size}")


def cmd_simplify(args, out):
    out.append(print_formula(simplify_slashes(_formula(args.formula))))


def cmd_classify(args, out):
    r = classify(_formula(args.formula))
    yes = {True: "yes", False: "no"}
    out.append(f"eloise_action_recall: {yes[r.eloise_action_recall]}")
    out.append(f"abelard_action_recall: {yes[r.abelard_action_recall]}")
    out.append(f"eloise_knowledge_memory: {yes[r.eloise_km]}")
    out.append(f"abelard_knowledge_memory: {yes[r.abelard_km]}")
    out.append(f"perfect_recall: {yes[r.perfect_recall]}")
    out.extend(f"violation: {v}" for v in r.violations)


def cmd_translate(args, out):
    mode = args.mode or "truth"
    if mode not in ("truth", "falsity"):
        raise UsageError("translate --mode must be truth or falsity")
    f = _formula(args.formula)
    out.append(print_formula(translate_km(f, mode, verify=args.verify, cap=args.structure_cap)))


def cmd_equiv(args, out):
    mode = args.mode or "strong"
    if mode not in ("strong", "truth", "falsity"):
        raise UsageError("equiv --mode must be strong, truth or falsity")
    if not args.other:
        raise UsageError("equiv needs a second formula (-g)")
    f, g = _formula(args.formula), _formula(args.other)
    r = equivalence_check(f, g, args.max_size, args.structure_cap, mode)
    out.append(f"verdict: {'EQUIVALENT' if r.equivalent else 'NOT_EQUIVALENT'}")
    out.append(f"mode: {mode}")
    out.append(f"checked: {r.checked}")
    if not r.equivalent:
        missing = {"truth": "NOT_TRUE", "falsity": "NOT_FALSE"}.get(mode)
        a, b = (v.value if v else missing for v in r.verdicts)
        out.append(f"f: {a}")
        out.append(f"g: {b}")
        out.append("counterexample:")
        out.extend(format_model(r.counterexample).splitlines())


COMMANDS = {
    "truth": (cmd_truth, "trichotomy verdict on a model"),
    "value": (cmd_value, "exact equilibrium value on a model"),
    "analyze": (cmd_analyze, "relevance of each declaration of independence"),
    "witness": (cmd_witness, "sentence and model on which a declaration matters"),
    "simplify": (cmd_simplify, "drop every irrelevant declaration"),
    "classify": (cmd_classify, "action recall and knowledge memory report"),
    "translate": (cmd_translate, "first-order translation of a KM sentence"),
    "equiv": (cmd_equiv, "compare two sentences on all small structures"),
}


def build_parser():
    parser = _ArgumentParser(prog="ifw", description="Independence-friendly logic toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-f", "--formula", required=True)
        p.add_argument("-g", "--other")
        p.add_argument("-m", "--model")
        p.add_argument("-n", "--domain", type=int, help="pure-equality structure of this size")
        p.add_argument("--mode")
        p.add_argument("--pair", help="'y,x': the declaration of y's independence from x")
        p.add_argument("--cap", type=int, default=DEFAULT_STRATEGY_CAP, help="strategy cap")
        p.add_argument("--structure-cap", type=int, default=10**5)
        p.add_argument("--max-size", type=int, default=3)
        p.add_argument("--verify", type=int, help="check the translation up to this size")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    out = []
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command][0](args, out)
    except UsageError as e:
        print(f"error: USAGE: {e}", file=stderr)
        return EXIT_USAGE
    except _INPUT_ERRORS as e:
        print(f"error: {e}", file=stderr)
        return EXIT_PARSE
    except CapExceeded as e:
        print(f"error: {e}", file=stderr)
        return EXIT_CAP
    except IFError as e:
        print(f"error: {e}", file=stderr)
        return EXIT_NA
    for line in out:
        print(line, file=stdout)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
