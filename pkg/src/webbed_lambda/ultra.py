"""Ultrafilters on finite index sets and ultraproducts of i-webs.

On a finite index set every ultrafilter is principal, so only principal
ultrafilters are built. Ultraproduct tokens are Seq tokens; con, entailment
and phi are evaluated on arbitrary sequences by asking the ultrafilter
whether the set of indices where the factor relation holds is large.
Class representatives put each non-principal component at that factor's nu.
"""

from dataclasses import dataclass, field
from itertools import combinations, product as iproduct

from .kernel_is import EMPTY, InfoSys
from .tokens import Seq, show, show_set, sorted_tokens
from .webs import IWeb, subsets


class IndexOutOfRange(ValueError):
    pass


class EmptyFamily(ValueError):
    pass


class CertificateFailed(AssertionError):
    pass


class WebMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# Ultrafilters

@dataclass(frozen=True)
class Ultrafilter:
    index: tuple
    principal: object

    def contains(self, X):
        return self.principal in X

    @property
    def position(self):
        return self.index.index(self.principal)


def principal_ultrafilter(index, j):
    index = tuple(index)
    if not index:
        raise EmptyFamily("empty index set")
    if j not in index:
        raise IndexOutOfRange("%r not in %r" % (j, index))
    return Ultrafilter(index, j)


def all_ultrafilters(index):
    """Every ultrafilter on a small finite set, found by brute force.

    Returns the families (as frozensets of frozensets) that are proper,
    upward closed, closed under intersection and contain X or its complement
    for every subset X.
    """
    index = tuple(index)
    whole = frozenset(index)
    subs = [frozenset(c) for k in range(len(index) + 1)
            for c in combinations(index, k)]
    out = []
    for mask in range(1 << len(subs)):
        fam = frozenset(s for i, s in enumerate(subs) if mask >> i & 1)
        if EMPTY in fam or whole not in fam:
            continue
        if any((x & y) not in fam for x in fam for y in fam):
            continue
        if any(y not in fam for x in fam for y in subs if x <= y):
            continue
        if any((s in fam) == ((whole - s) in fam) for s in subs):
            continue
        out.append(fam)
    return out


# ---------------------------------------------------------------------------
# Ultraproduct webs

class UltraSystem(InfoSys):
    def __init__(self, factors, U):
        self.factors = factors
        self.U = U
        self.j = U.position
        self.nu = Seq(tuple(f.nu for f in factors))
        self.name = "prod/U"

    def canonical(self, t):
        items = tuple(x if k == self.j else f.nu
                      for k, (x, f) in enumerate(zip(t.items, self.factors)))
        return Seq(items)

    def lift(self, x):
        return Seq(tuple(x if k == self.j else f.nu
                         for k, f in enumerate(self.factors)))

    def large(self, pred):
        return self.U.contains({i for k, i in enumerate(self.U.index) if pred(k)})

    def con(self, a):
        return self.large(lambda k: self.factors[k].sys.con(
            frozenset(t.items[k] for t in a)))

    def entails(self, a, alpha):
        return self.large(lambda k: self.factors[k].sys.entails(
            frozenset(t.items[k] for t in a), alpha.items[k]))

    def enumerate(self, level):
        return frozenset(self.lift(x)
                         for x in self.factors[self.j].sys.enumerate(level))

    def has_token(self, t):
        return (isinstance(t, Seq) and len(t.items) == len(self.factors)
                and self.large(lambda k: self.factors[k].sys.has_token(t.items[k])))


class UltraWeb(IWeb):
    def __init__(self, factors, U):
        factors = tuple(factors)
        if not factors:
            raise EmptyFamily("no factors")
        if len(U.index) != len(factors):
            raise WebMismatch("ultrafilter index does not match the family")
        self.factors = factors
        self.U = U
        self.sys = UltraSystem(factors, U)
        self.j = self.sys.j
        self.name = "ultra(%s)@%s" % (",".join(f.name for f in factors),
                                      U.principal)

    @property
    def flat(self):
        return self.factors[self.j].flat

    @property
    def free_sensible(self):
        # inherited from the principal factor through the collapse map
        return getattr(self.factors[self.j], "free_sensible", False)

    def phi(self, a, alpha):
        vals = []
        for k, f in enumerate(self.factors):
            v = f.phi(frozenset(t.items[k] for t in a), alpha.items[k])
            vals.append(f.nu if v is None else v)
        return self.sys.canonical(Seq(tuple(vals)))

    def preimages(self, gamma):
        lift = self.sys.lift
        fj = self.factors[self.j]
        return [(frozenset(lift(x) for x in b), lift(beta))
                for b, beta in fj.preimages(gamma.items[self.j])]

    def base_tokens(self):
        return [self.sys.lift(x) for x in self.factors[self.j].base_tokens()]

    def app_candidates(self, tokens):
        fj = self.factors[self.j]
        cands = fj.app_candidates(frozenset(t.items[self.j] for t in tokens))
        return frozenset(self.sys.lift(x) for x in cands)

    def collapse(self, t):
        return t.items[self.j]


def ultraproduct_web(factors, U):
    return UltraWeb(factors, U)


@dataclass
class CollapseReport:
    ok: bool
    checked: dict = field(default_factory=dict)
    witness: str = ""


def collapse_check(P, level=2, max_size=3):
    """Check that t -> t(j) is an isomorphism of P onto factor j.

    Tokens of the given level, consistent sets of up to ``max_size`` tokens
    for con and entailment, antecedents of up to two tokens for phi.
    """
    fj = P.factors[P.j]
    toks = sorted_tokens(P.sys.enumerate(level))
    ftoks = fj.sys.enumerate(level)
    images = [P.collapse(t) for t in toks]
    counts = {}
    if len(set(images)) != len(images) or set(images) != set(ftoks):
        return CollapseReport(False, counts, "not a bijection at level %d" % level)
    counts["tokens"] = len(toks)
    if P.collapse(P.sys.nu) != fj.nu:
        return CollapseReport(False, counts, "nu")
    sets = list(subsets(toks, max_size))
    for a in sets:
        ca = frozenset(P.collapse(t) for t in a)
        if P.sys.con(a) != fj.sys.con(ca):
            return CollapseReport(False, counts, "con %s" % show_set(a))
        for t in toks:
            if P.sys.entails(a, t) != fj.sys.entails(ca, P.collapse(t)):
                return CollapseReport(False, counts,
                                      "entails %s %s" % (show_set(a), show(t)))
    counts["sets"] = len(sets)
    n_phi = 0
    for a in subsets(toks, 2):
        if not P.sys.con(a):
            continue
        ca = frozenset(P.collapse(t) for t in a)
        for t in toks:
            n_phi += 1
            if P.collapse(P.phi(a, t)) != fj.phi(ca, P.collapse(t)):
                return CollapseReport(False, counts,
                                      "phi %s %s" % (show_set(a), show(t)))
    counts["phi"] = n_phi
    return CollapseReport(True, counts)


def seq_variants(P, t, pool_level=1):
    """Sequences in the class of t, varying the non-principal components."""
    choices = []
    for k, f in enumerate(P.factors):
        if k == P.j:
            choices.append([t.items[k]])
        else:
            choices.append(sorted_tokens(f.sys.enumerate(pool_level)))
    return [Seq(c) for c in iproduct(*choices)]


# ---------------------------------------------------------------------------
# Embedding of the product of the models

def embed_point(xs, P):
    """The image of the class of a family of points.

    ``xs`` holds one generator set (or PointApprox) per factor. Returns the
    generator set of the image point in P; membership of a sequence alpha is
    then ``embedded_member``.
    """
    from .interp import PointApprox
    gens = []
    for x, f in zip(xs, P.factors):
        g = x.generators if isinstance(x, PointApprox) else frozenset(x)
        if isinstance(x, PointApprox) and x.web is not f:
            raise WebMismatch("component point of another web")
        gens.append(sorted_tokens(g | {f.nu}))
    out = frozenset(P.sys.canonical(Seq(c)) for c in iproduct(*gens))
    return PointApprox(P, out - {P.sys.nu})


def embedded_member(xs, P, alpha):
    """alpha is in the image iff U-many components lie in the factor points."""
    from .interp import PointApprox
    return P.sys.large(lambda k: P.factors[k].sys.entails(
        xs[k].generators if isinstance(xs[k], PointApprox) else frozenset(xs[k]),
        alpha.items[k]))


def apply_family(xs, ys, factors):
    """Componentwise application of two families of generator sets."""
    from .interp import apply_generators
    return tuple(apply_generators(f, x, y) for f, x, y in zip(factors, xs, ys))


# ---------------------------------------------------------------------------
# Equations

@dataclass
class LosVerdict:
    agree: bool
    ultra: object
    factor: object

    def line(self):
        return "LOS %s ultra=%s factor=%s" % (
            "AGREE" if self.agree else "DISAGREE", self.ultra.line(),
            self.factor.line())


def los_equation_check(M, N, factors, U, depth=4, width=2):
    from .interp import separate
    P = factors if isinstance(factors, UltraWeb) else UltraWeb(factors, U)
    vu = separate(M, N, P, depth, width)
    vj = separate(M, N, P.factors[P.j], depth, width)
    agree = vu.kind == vj.kind and vu.side == vj.side and (
        vu.witness is None and vj.witness is None
        or vu.witness is not None and P.collapse(vu.witness) == vj.witness)
    return LosVerdict(agree, vu, vj)


# ---------------------------------------------------------------------------
# Filter bases over finite sets of equations

class FilterBase:
    """The sets K_e = {J finite : e in J}, represented by membership."""

    def __init__(self, equations):
        self.equations = tuple(equations)

    def member(self, e, J):
        return e in J

    def witness(self, es):
        return frozenset(es)

    def certify(self, max_size=None):
        """Every finite subfamily has its union in the intersection."""
        es = self.equations
        top = len(es) if max_size is None else max_size
        for k in range(1, top + 1):
            for sub in combinations(es, k):
                J = self.witness(sub)
                if not all(self.member(e, J) for e in sub):
                    return False, sub
        return True, None


def fip_filter_base(equations):
    return FilterBase(equations)


@dataclass
class CompactnessCertificate:
    web: object
    index: tuple
    verdicts: dict


def satisfies(web, M, N, depth=4, width=2, oracle_fuel=200):
    """No separation found, and the beta oracle does not contradict."""
    from .interp import separate
    from .lambda_syntax import beta_equal
    v = separate(M, N, web, depth, width)
    return v.kind == "UNKNOWN" and beta_equal(M, N, oracle_fuel) is not False, v


def compactness_demo(equations, model_for, depth=4, width=2):
    """One web satisfying every equation, from models of the finite subsets.

    The family is indexed by the subsets of ``equations``; the ultrafilter
    is principal at the full set.
    """
    eqs = tuple(equations)
    index = tuple(frozenset(c) for k in range(len(eqs) + 1)
                  for c in combinations(eqs, k))
    factors = []
    for J in index:
        w = model_for(J)
        for (M, N) in J:
            ok, v = satisfies(w, M, N, depth, width)
            if not ok:
                raise CertificateFailed("model for a subset fails: %s" % v.line())
        factors.append(w)
    U = principal_ultrafilter(index, frozenset(eqs))
    P = UltraWeb(factors, U)
    verdicts = {}
    for (M, N) in eqs:
        ok, v = satisfies(P, M, N, depth, width)
        if not ok:
            raise CertificateFailed("ultraproduct separates: %s" % v.line())
        verdicts[(M, N)] = v
    return CompactnessCertificate(P, index, verdicts)
