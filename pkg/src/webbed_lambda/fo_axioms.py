"""Finite information systems as relational structures.

C_n(x1..xn) holds when {x1..xn} is consistent and R_{n+1}(x1..xn, y) when
{x1..xn} is consistent and entails y. Tuples are read as sets, so repeated
arguments are allowed. Arities are bounded by a cap: C_n for 1 <= n <= cap
and R_{n+1} for 0 <= n <= cap.

The seven Horn axioms are checked exhaustively up to the cap.
"""

from dataclasses import dataclass, field
from itertools import permutations, product as iproduct

from .kernel_is import AxiomReport, AxiomResult, FiniteSystem
from .tokens import Seq, show, sorted_tokens

DEFAULT_CAP = 3
MAX_TUPLES = 2 * 10 ** 6


class TooLarge(ValueError):
    pass


@dataclass
class RelStructure:
    carrier: tuple
    nu: object
    C: dict = field(default_factory=dict)
    R: dict = field(default_factory=dict)
    cap: int = DEFAULT_CAP

    def c(self, *xs):
        return tuple(xs) in self.C.get(len(xs), ())

    def r(self, *xs):
        return tuple(xs) in self.R.get(len(xs), ())

    def copy(self):
        return RelStructure(self.carrier, self.nu,
                            {n: set(v) for n, v in self.C.items()},
                            {n: set(v) for n, v in self.R.items()}, self.cap)

    def lines(self):
        out = ["carrier %s" % " ".join(show(t) for t in self.carrier),
               "nu %s" % show(self.nu), "cap %d" % self.cap]
        for name, rel in (("C", self.C), ("R", self.R)):
            for n in sorted(rel):
                for tup in sorted(rel[n], key=lambda t: [x.key() for x in t]):
                    out.append("rel %s%d (%s)" % (name, n,
                                                  ",".join(show(x) for x in tup)))
        return out


def encode(sys, cap=DEFAULT_CAP):
    if sys.universe is None:
        raise TooLarge("encoding needs a finite system")
    carrier = tuple(sorted_tokens(sys.universe))
    if len(carrier) ** (cap + 1) > MAX_TUPLES:
        raise TooLarge("%d tokens at cap %d" % (len(carrier), cap))
    C, R = {}, {}
    con = {}

    def is_con(t):
        s = frozenset(t)
        if s not in con:
            con[s] = sys.con(s)
        return con[s]

    for n in range(1, cap + 1):
        C[n] = {t for t in iproduct(carrier, repeat=n) if is_con(t)}
    for n in range(0, cap + 1):
        R[n + 1] = {t + (b,) for t in iproduct(carrier, repeat=n) if is_con(t)
                    for b in carrier if sys.entails(frozenset(t), b)}
    return RelStructure(carrier, sys.nu, C, R, cap)


def decode(S):
    """A finite system answering con/entails on sets of at most cap tokens."""
    def con(a):
        if not a:
            return True
        return S.c(*sorted_tokens(a))

    def entails(a, b):
        return S.r(*(sorted_tokens(a) + [b]))

    return FiniteSystem(S.carrier, con, entails, S.nu, name="decoded")


def _tup(xs):
    return "(%s)" % ",".join(show(x) for x in xs)


def check_horn_axioms(S):
    """Axioms (1)-(7), each evaluated over every tuple up to the cap."""
    cap = S.cap
    car = S.carrier
    report = AxiomReport(prefix="HORN")

    def ax1():
        for x in car:
            if not S.c(x):
                return _tup([x])
        return None

    def ax2():
        for n in range(1, cap + 1):
            for xs in S.C.get(n, ()):
                for k in range(1, n + 1):
                    for idx in iproduct(range(n), repeat=k):
                        ys = tuple(xs[i] for i in idx)
                        if not S.c(*ys):
                            return "%s->%s" % (_tup(xs), _tup(ys))
        return None

    def ax3():
        for n in range(1, cap):
            for t in S.R.get(n + 1, ()):
                if not S.c(*t):
                    return _tup(t)
        return None

    def ax4():
        for n in range(1, cap + 1):
            for t in S.R.get(n + 1, ()):
                xs, b = t[:-1], t[-1]
                for p in permutations(xs):
                    if not S.r(*(p + (b,))):
                        return "%s->%s" % (_tup(t), _tup(p + (b,)))
        return None

    def ax5():
        for n in range(1, cap + 1):
            for xs in iproduct(car, repeat=n):
                B = [b for b in car if S.r(*(xs + (b,)))]
                for k in range(1, cap + 1):
                    for t in S.R.get(k + 1, ()):
                        bs, g = t[:-1], t[-1]
                        if all(b in B for b in bs) and not S.r(*(xs + (g,))):
                            return "%s;%s" % (_tup(xs), _tup(t))
        return None

    def ax6():
        for n in range(1, cap + 1):
            for xs in S.C.get(n, ()):
                for x in xs:
                    if not S.r(*(xs + (x,))):
                        return _tup(xs + (x,))
        return None

    def ax7():
        return None if S.r(S.nu) else _tup([S.nu])

    for i, fn in enumerate((ax1, ax2, ax3, ax4, ax5, ax6, ax7), start=1):
        w = fn()
        report.results.append(AxiomResult(str(i), w is None, w or ""))
    return report


def ultraproduct_structure(structs, U):
    """Quotient of the product of structures by a principal ultrafilter.

    Classes are represented by sequences whose non-principal components are
    the factors' nu; relations hold when U-many components satisfy them.
    """
    j = U.position
    caps = {S.cap for S in structs}
    if len(caps) != 1:
        raise ValueError("structures must share the arity cap")
    cap = caps.pop()
    nus = [S.nu for S in structs]

    def rep(x):
        return Seq(tuple(x if k == j else nus[k] for k in range(len(structs))))

    carrier = tuple(rep(x) for x in structs[j].carrier)

    def holds(kind, tup):
        good = set()
        for k, (i, S) in enumerate(zip(U.index, structs)):
            comps = tuple(t.items[k] for t in tup)
            if (S.c if kind == "C" else S.r)(*comps):
                good.add(i)
        return U.contains(good)

    C = {n: {t for t in iproduct(carrier, repeat=n) if holds("C", t)}
         for n in range(1, cap + 1)}
    R = {n + 1: {t for t in iproduct(carrier, repeat=n + 1) if holds("R", t)}
         for n in range(0, cap + 1)}
    return RelStructure(carrier, rep(structs[j].nu), C, R, cap)


def isomorphic_by(S, T, f):
    """Whether the map f on carriers is an isomorphism of S onto T."""
    if sorted_tokens(f(x) for x in S.carrier) != sorted_tokens(T.carrier):
        return False
    if f(S.nu) != T.nu:
        return False
    for rel_s, rel_t in ((S.C, T.C), (S.R, T.R)):
        if set(rel_s) != set(rel_t):
            return False
        for n in rel_s:
            if {tuple(f(x) for x in t) for t in rel_s[n]} != set(rel_t[n]):
                return False
    return True


def horn_ultraproduct_check(structs, U):
    P = ultraproduct_structure(structs, U)
    return P, check_horn_axioms(P)
