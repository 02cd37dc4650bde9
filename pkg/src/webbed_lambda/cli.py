"""Command-line entry point.

Exit status: 0 on success (including Unknown verdicts), 1 when a validation
fails, 2 on usage errors or unreadable input.
"""

import argparse
import sys

from . import dsl
from .interp import DEFAULT_DEPTH, DEFAULT_WIDTH

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _load(path):
    try:
        return dsl.load(path)
    except OSError as e:
        raise UsageError("cannot read %s: %s" % (path, e.strerror)) from None
    except dsl.RoundTripMismatch:
        raise
    except ValueError as e:
        raise UsageError("%s: %s" % (path, e)) from None


def _load_web(path):
    from .webs import IWeb
    obj = _load(path)
    if not isinstance(obj, IWeb):
        raise UsageError("%s does not define a web" % path)
    return obj


def _term(text):
    from .lambda_syntax import ParseError, is_closed, parse
    try:
        t = parse(text)
    except ParseError as e:
        raise UsageError("term %r: %s" % (text, e)) from None
    if not is_closed(t):
        raise UsageError("term %r is not closed" % text)
    return t


def _positive(text):
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


class _Out:
    """Collects report lines for stdout or an --out file."""

    def __init__(self):
        self.lines = []

    def __call__(self, line):
        self.lines.append(line)


# ---------------------------------------------------------------------------
# Commands

def cmd_check_is(args, out):
    from .kernel_is import check_is_axioms
    from .webs import IWeb, slice_system
    obj = _load(args.web)
    ok = True
    if isinstance(obj, IWeb):
        rep = check_is_axioms(slice_system(obj, args.level), max_size=args.max_size)
        for line in rep.lines():
            out(line)
        ok = rep.ok
        mo = obj.validate(level=args.level, max_size=min(args.max_size, 2))
        for line in mo.lines():
            out(line)
        ok = ok and mo.ok
    elif getattr(obj, "universe", None) is not None:
        rep = check_is_axioms(obj, max_size=args.max_size)
        for line in rep.lines():
            out(line)
        ok = rep.ok
    else:
        raise UsageError("%s is not a system or web" % args.web)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_interp(args, out):
    from .interp import interpret
    from .tokens import show, sorted_tokens
    web = _load_web(args.web)
    for t in sorted_tokens(interpret(_term(args.term), web, args.depth, args.width)):
        out(show(t))
    return EXIT_OK


def cmd_separate(args, out):
    from .interp import separate
    web = _load_web(args.web)
    v = separate(_term(args.M), _term(args.N), web, args.depth, args.width,
                 args.fuel)
    out(v.line())
    return EXIT_OK


def cmd_complete(args, out):
    from .completion import (
        Completion, StageCapExceeded, check_clause2_closure, validate_step,
    )
    A1, A2 = _load_web(args.left), _load_web(args.right)
    try:
        comp = Completion(A1, A2, args.level)
        if args.stages > comp.hard_cap:
            raise StageCapExceeded("%d stages requested, cap %d"
                                   % (args.stages, comp.hard_cap))
    except StageCapExceeded as e:
        raise UsageError(str(e)) from None
    ok = True
    for n in range(args.stages):
        if args.skip_validation:
            break
        rep = validate_step(comp, n, max_ante=args.max_ante, seed=args.seed)
        for line in rep.lines():
            out(line)
        ok = ok and rep.ok
        if n == 0:
            w, count = check_clause2_closure(comp, 0, max_ante=args.max_ante)
            out("STAGE1 CLAUSE2-CLOSED %s checked=%d%s" % (
                "PASS" if w is None else "FAIL", count,
                "" if w is None else " witness=%s" % w))
            ok = ok and w is None
    omega = comp.omega_web()
    omega.stages = args.stages
    if args.out:
        _write(args.out, dsl.completion_lines(omega, args.stages, args.max_ante))
        dsl.load(args.out)  # reload recomputes every table and compares
        out("WROTE %s" % args.out)
    return EXIT_OK if ok else EXIT_FAIL


def _write(path, lines):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_transport(args, out):
    from .completion import OmegaWeb, TransportViolation, transport_check
    from .interp import interpret
    from .tokens import show, sorted_tokens
    omega = _load(args.omega)
    if not isinstance(omega, OmegaWeb):
        raise UsageError("%s is not a completion file" % args.omega)
    M = _term(args.term)
    sides = (1, 2) if args.side is None else (args.side,)
    ok = True
    for gamma in sorted_tokens(interpret(M, omega, args.depth, args.width)):
        for i in sides:
            try:
                f = transport_check(omega, M, gamma, i, fuel=args.depth,
                                    max_fuel=args.depth + 2, width=args.width)
                out("TRANSPORT %d %s -> %s YES fuel=%d" % (
                    i, show(gamma), show(omega.psi(i, gamma)), f))
            except (TransportViolation, ValueError) as e:
                ok = False
                out("TRANSPORT %d %s FAIL %s" % (i, show(gamma), e))
    return EXIT_OK if ok else EXIT_FAIL


def _ultra(args):
    from .ultra import IndexOutOfRange, principal_ultrafilter, ultraproduct_web
    webs = [_load_web(p) for p in args.webs]
    try:
        U = principal_ultrafilter(range(1, len(webs) + 1), args.principal)
    except IndexOutOfRange as e:
        raise UsageError(str(e)) from None
    return ultraproduct_web(webs, U)


def cmd_ultra(args, out):
    from .ultra import collapse_check
    P = _ultra(args)
    rep = collapse_check(P, level=args.level)
    counts = " ".join("%s=%d" % kv for kv in sorted(rep.checked.items()))
    out("COLLAPSE %s %s%s" % ("PASS" if rep.ok else "FAIL", counts,
                              "" if rep.ok else " witness=%s" % rep.witness))
    if args.out:
        dsl.dump(P, args.out)
        out("WROTE %s" % args.out)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_los(args, out):
    from .ultra import los_equation_check
    P = _ultra(args)
    v = los_equation_check(_term(args.M), _term(args.N), P, P.U, args.depth,
                           args.width)
    out(v.line())
    return EXIT_OK if v.agree else EXIT_FAIL


def cmd_horn(args, out):
    from .fo_axioms import RelStructure, TooLarge, check_horn_axioms, encode
    from .webs import IWeb, slice_system
    obj = _load(args.web)
    if isinstance(obj, RelStructure):
        S = obj
    else:
        sys_ = slice_system(obj, args.level) if isinstance(obj, IWeb) else obj
        try:
            S = encode(sys_, args.cap)
        except TooLarge as e:
            raise UsageError(str(e)) from None
    rep = check_horn_axioms(S)
    for line in rep.lines():
        out(line)
    if args.out:
        dsl.dump(S, args.out)
        out("WROTE %s" % args.out)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_corpus(args, out):
    from .corpus import MAX_CORPUS, corpus
    from .lambda_syntax import show
    if args.size > MAX_CORPUS:
        raise UsageError("size capped at %d" % MAX_CORPUS)
    for p in corpus(args.seed, args.size, args.term_size):
        out("%s\t%s\t%s" % (p.label, show(p.left), show(p.right)))
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="webbed-lambda",
                                description="Webbed models of the untyped lambda calculus.")
    sub = p.add_subparsers(dest="command", required=True)

    def fuel(sp):
        sp.add_argument("--depth", type=_positive, default=DEFAULT_DEPTH)
        sp.add_argument("--width", type=_positive, default=DEFAULT_WIDTH)

    s = sub.add_parser("check-is", help="check the information system axioms")
    s.add_argument("--web", required=True)
    s.add_argument("--level", type=_positive, default=1)
    s.add_argument("--max-size", type=_positive, default=3)
    s.set_defaults(fn=cmd_check_is)

    s = sub.add_parser("interp", help="approximate the denotation of a term")
    s.add_argument("--web", required=True)
    s.add_argument("--term", required=True)
    fuel(s)
    s.set_defaults(fn=cmd_interp)

    s = sub.add_parser("separate", help="look for a token separating two terms")
    s.add_argument("--web", required=True)
    s.add_argument("-M", required=True)
    s.add_argument("-N", required=True)
    s.add_argument("--fuel", type=_positive, default=None)
    fuel(s)
    s.set_defaults(fn=cmd_separate)

    s = sub.add_parser("complete", help="complete the product of two webs")
    s.add_argument("--left", required=True)
    s.add_argument("--right", required=True)
    s.add_argument("--stages", type=_positive, default=2)
    s.add_argument("--level", type=_positive, default=0)
    s.add_argument("--max-ante", type=_positive, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--skip-validation", action="store_true")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_complete)

    s = sub.add_parser("transport", help="push limit tokens to a factor")
    s.add_argument("--omega", required=True)
    s.add_argument("--term", required=True)
    s.add_argument("--side", type=int, choices=(1, 2), default=None)
    s.add_argument("--depth", type=_positive, default=3)
    s.add_argument("--width", type=_positive, default=DEFAULT_WIDTH)
    s.set_defaults(fn=cmd_transport)

    s = sub.add_parser("ultra", help="principal ultraproduct of webs")
    s.add_argument("--webs", nargs="+", required=True)
    s.add_argument("--principal", type=int, required=True)
    s.add_argument("--level", type=_positive, default=2)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_ultra)

    s = sub.add_parser("los", help="compare an equation in the ultraproduct and the factor")
    s.add_argument("--webs", nargs="+", required=True)
    s.add_argument("--principal", type=int, required=True)
    s.add_argument("-M", required=True)
    s.add_argument("-N", required=True)
    fuel(s)
    s.set_defaults(fn=cmd_los)

    s = sub.add_parser("horn", help="check the Horn axioms on an encoded system")
    s.add_argument("--web", required=True)
    s.add_argument("--cap", type=_positive, default=3)
    s.add_argument("--level", type=_positive, default=0)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_horn)

    s = sub.add_parser("corpus", help="generate labelled term pairs")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--size", type=_positive, default=10)
    s.add_argument("--term-size", type=_positive, default=8)
    s.set_defaults(fn=cmd_corpus)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    out = _Out()
    try:
        code = args.fn(args, out)
    except UsageError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except dsl.RoundTripMismatch as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_FAIL
    sys.stdout.write("".join(line + "\n" for line in out.lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
