"""Information systems, points, and the maps between them.

An information system is queried, never materialized: ``con`` decides
consistency of a finite set, ``entails`` decides ``a |- alpha``, and
``enumerate(level)`` lists a finite, level-monotone slice of the tokens.
Finite systems additionally expose their whole token set as ``universe``.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
import enum

from .tokens import NU, Arrow, Pair, Token, show, show_set, sorted_tokens

EMPTY = frozenset()

DEFAULT_SET_SIZE = 3
DEFAULT_MAX_SETS = 1 << 16
DEFAULT_SUBSET_CAP = 16


class BudgetExceeded(RuntimeError):
    pass


class InconsistentSet(ValueError):
    pass


class NotBMorphism(ValueError):
    pass


class Tri(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    def __bool__(self):
        return self is Tri.YES


# ---------------------------------------------------------------------------
# Systems

class InfoSys:
    """Base class. Subclasses override ``con``, ``entails``, ``enumerate``."""

    nu = NU
    finite = False
    universe = None
    name = "sys"

    def con(self, a):
        raise NotImplementedError

    def entails(self, a, alpha):
        raise NotImplementedError

    def enumerate(self, level):
        raise NotImplementedError

    def has_token(self, t):
        """Membership in the token set; finite systems answer exactly."""
        if self.universe is not None:
            return t in self.universe
        raise NotImplementedError

    def entails_all(self, a, b):
        return all(self.entails(a, beta) for beta in b)

    def entailed(self, a, tokens):
        return frozenset(t for t in tokens if self.entails(a, t))

    def __repr__(self):
        return "<%s %s>" % (type(self).__name__, self.name)


class FiniteSystem(InfoSys):
    """A finite system given by explicit predicates over a fixed universe."""

    finite = True

    def __init__(self, tokens, con, entails, nu=NU, name="finite"):
        self.universe = frozenset(tokens)
        self.nu = nu
        self._con = con
        self._entails = entails
        self.name = name

    def con(self, a):
        return bool(self._con(frozenset(a)))

    def entails(self, a, alpha):
        return bool(self._entails(frozenset(a), alpha))

    def enumerate(self, level):
        return self.universe


def flat_system(atoms, name=None):
    """Atoms plus nu; every finite set consistent; a |- x iff x in a or x = nu."""
    from .tokens import Atom
    toks = [t if isinstance(t, Token) else Atom(str(t)) for t in atoms]
    return FiniteSystem(
        [NU] + toks,
        con=lambda a: True,
        entails=lambda a, x: x is NU or x in a,
        name=name or "flat(%s)" % ",".join(show(t) for t in toks))


class TableSystem(FiniteSystem):
    """Finite system from maximal consistent sets and generating entailments.

    ``maximal`` lists consistent sets; Con is their downward closure (or every
    subset when ``maximal`` is None). nu is added to every listed set. ``rules`` is a list of (premises, token);
    entailment is the least relation containing the rules that is reflexive,
    monotone, transitive and has the empty set entailing nu.
    """

    def __init__(self, tokens, nu=NU, maximal=None, rules=(), name="table"):
        self.maximal = None if maximal is None else \
            [frozenset(m) | {nu} for m in maximal] + [frozenset([nu])]
        self.rules = [(frozenset(p), c) for p, c in rules]
        super().__init__(tokens, self._con_table, self._entails_table, nu, name)

    def _con_table(self, a):
        if not a <= self.universe:
            return False
        if self.maximal is None:
            return True
        return any(a <= m for m in self.maximal)

    @lru_cache(maxsize=None)
    def _saturate(self, a):
        out = set(a) | {self.nu}
        changed = True
        while changed:
            changed = False
            for prem, concl in self.rules:
                if concl not in out and prem <= out:
                    out.add(concl)
                    changed = True
        return frozenset(out)

    def _entails_table(self, a, alpha):
        return alpha in self._saturate(a)


class TerminalSystem(FiniteSystem):
    def __init__(self):
        super().__init__([NU], lambda a: True, lambda a, x: x is NU,
                         name="terminal")


def terminal():
    return TerminalSystem()


# ---------------------------------------------------------------------------
# Product

def inl(alpha, B):
    return Pair(alpha, B.nu)


def inr(A, beta):
    return Pair(A.nu, beta)


def fst(a):
    return frozenset(t.left for t in a)


def snd(a):
    return frozenset(t.right for t in a)


class ProductSystem(InfoSys):
    def __init__(self, A, B):
        self.A, self.B = A, B
        self.nu = Pair(A.nu, B.nu)
        self.finite = A.finite and B.finite
        self.name = "(%s & %s)" % (A.name, B.name)
        if self.finite:
            self.universe = frozenset(
                [Pair(x, B.nu) for x in A.universe]
                + [Pair(A.nu, y) for y in B.universe])

    def has_token(self, t):
        if not isinstance(t, Pair):
            return False
        if t.right == self.B.nu:
            return self.A.has_token(t.left)
        return t.left == self.A.nu and self.B.has_token(t.right)

    def con(self, a):
        return self.A.con(fst(a)) and self.B.con(snd(a))

    def entails(self, a, alpha):
        return (self.A.entails(fst(a), alpha.left)
                and self.B.entails(snd(a), alpha.right))

    def enumerate(self, level):
        if self.universe is not None:
            return self.universe
        return frozenset(
            [Pair(x, self.B.nu) for x in self.A.enumerate(level)]
            + [Pair(self.A.nu, y) for y in self.B.enumerate(level)])


def product(A, B):
    return ProductSystem(A, B)


# ---------------------------------------------------------------------------
# Exponential

class ExponentialSystem(InfoSys):
    """Tokens Arrow(a, beta) with a consistent in A and beta a token of B.

    Consistency of k tokens inspects all 2^k sub-families; a query with more
    than ``subset_cap`` tokens raises BudgetExceeded.
    """

    def __init__(self, A, B, subset_cap=DEFAULT_SUBSET_CAP):
        self.A, self.B = A, B
        self.nu = Arrow(EMPTY, B.nu)
        self.subset_cap = subset_cap
        self.finite = A.finite and B.finite
        self.name = "(%s => %s)" % (A.name, B.name)
        self._con_memo = {}

    def has_token(self, t):
        return (isinstance(t, Arrow) and self.B.has_token(t.succ)
                and all(self.A.has_token(x) for x in t.ante)
                and self.A.con(t.ante))

    def con(self, X):
        X = frozenset(X)
        if len(X) > self.subset_cap:
            raise BudgetExceeded(
                "exponential con on %d tokens exceeds cap %d"
                % (len(X), self.subset_cap))
        return self._con(X)

    def _con(self, X):
        hit = self._con_memo.get(X)
        if hit is not None:
            return hit
        # every proper sub-family is covered by the recursive calls
        ok = all(self._con(X - {t}) for t in X) if len(X) > 1 else True
        if ok:
            union = frozenset().union(*(t.ante for t in X)) if X else EMPTY
            if self.A.con(union):
                ok = self.B.con(frozenset(t.succ for t in X))
        self._con_memo[X] = ok
        return ok

    def entails(self, X, target):
        c, gamma = target.ante, target.succ
        got = frozenset(t.succ for t in X if self.A.entails_all(c, t.ante))
        return self.B.entails(got, gamma)

    def enumerate(self, level):
        """Arrow(a, beta): a consistent, |a| <= level, drawn from A's level."""
        toks = sorted_tokens(self.A.enumerate(level))
        antes = [frozenset(c) for k in range(level + 1)
                 for c in combinations(toks, k)]
        antes = [a for a in antes if self.A.con(a)]
        succs = self.B.enumerate(level)
        return frozenset(Arrow(a, b) for a in antes for b in succs)


def exponential(A, B, subset_cap=DEFAULT_SUBSET_CAP):
    return ExponentialSystem(A, B, subset_cap)


class RestrictedSystem(FiniteSystem):
    """The restriction of a system to a finite set of its tokens."""

    def __init__(self, base, tokens, name=None):
        tokens = frozenset(tokens) | {base.nu}
        super().__init__(tokens, base.con, base.entails, base.nu,
                         name or "%s|%d" % (base.name, len(tokens)))
        self.base = base


def restrict(sys, tokens):
    return RestrictedSystem(sys, tokens)


# ---------------------------------------------------------------------------
# Points

class Point:
    """The closure of a finite consistent generator set.

    Membership is decided by entailment from the generators; the extension
    is materialized only on finite systems.
    """

    __slots__ = ("sys", "generators")

    def __init__(self, sys, generators):
        self.sys = sys
        self.generators = frozenset(generators)

    def __contains__(self, t):
        return self.sys.entails(self.generators, t)

    def membership(self, t):
        return Tri.YES if t in self else Tri.NO

    def extension(self):
        if self.sys.universe is None:
            raise BudgetExceeded("extension of a point of an infinite system")
        return self.sys.entailed(self.generators, self.sys.universe)

    def within(self, tokens):
        return self.sys.entailed(self.generators, tokens)

    def leq(self, other):
        return self.sys.entails_all(other.generators, self.generators)

    def same(self, other):
        return self.leq(other) and other.leq(self)

    def __repr__(self):
        return "Point(%s)" % show_set(self.generators)


def closure(sys, a):
    a = frozenset(a)
    if not sys.con(a):
        raise InconsistentSet(show_set(a))
    return Point(sys, a)


def all_points(sys):
    """Every point of a finite system, each with its extension as generators."""
    toks = sorted_tokens(sys.universe)
    seen = {}
    for k in range(len(toks) + 1):
        for c in combinations(toks, k):
            a = frozenset(c)
            if sys.con(a):
                ext = sys.entailed(a, toks)
                seen.setdefault(ext, Point(sys, ext))
    return list(seen.values())


# ---------------------------------------------------------------------------
# Reports

@dataclass
class AxiomResult:
    name: str
    passed: bool
    witness: str = ""

    def line(self, prefix="AXIOM"):
        if self.passed:
            return "%s %s PASS" % (prefix, self.name)
        return "%s %s FAIL witness=%s" % (prefix, self.name, self.witness)


@dataclass
class AxiomReport:
    results: list = field(default_factory=list)
    prefix: str = "AXIOM"
    exhaustive: bool = True

    @property
    def ok(self):
        return all(r.passed for r in self.results)

    def __getitem__(self, name):
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def failed(self):
        return [r.name for r in self.results if not r.passed]

    def lines(self):
        return [r.line(self.prefix) for r in self.results]

    def __str__(self):
        return "\n".join(self.lines())


def _first(items):
    for x in items:
        return x
    return None


# ---------------------------------------------------------------------------
# Candidate sets

def candidate_sets(tokens, exhaustive, max_size=DEFAULT_SET_SIZE,
                   max_sets=DEFAULT_MAX_SETS):
    toks = sorted_tokens(tokens)
    top = len(toks) if exhaustive else min(max_size, len(toks))
    total, n_k = 0, 1
    for k in range(top + 1):
        total += n_k
        n_k = n_k * (len(toks) - k) // (k + 1)
    if total > max_sets:
        raise BudgetExceeded(
            "%d candidate sets over %d tokens exceed cap %d"
            % (total, len(toks), max_sets))
    return [frozenset(c) for k in range(top + 1)
            for c in combinations(toks, k)]


class _Universe:
    """Bitmask view of a finite family of candidate sets."""

    def __init__(self, sys, tokens, sets):
        self.sys = sys
        self.toks = sorted_tokens(tokens)
        self.index = {t: i for i, t in enumerate(self.toks)}
        self.sets = sets
        self.mask = {a: self.to_mask(a) for a in sets}
        self.by_mask = {m: a for a, m in self.mask.items()}
        self.con = {}
        for a in sets:
            try:
                self.con[a] = sys.con(a)
            except BudgetExceeded:
                self.con[a] = None
        self.ent = {}
        for a in sets:
            if self.con[a]:
                self.ent[a] = self.to_mask(sys.entailed(a, self.toks))

    def to_mask(self, a):
        m = 0
        for t in a:
            m |= 1 << self.index[t]
        return m

    def from_mask(self, m):
        return frozenset(self.toks[i] for i in range(len(self.toks)) if m >> i & 1)


def _submasks(m):
    s = m
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & m


def check_is_axioms(sys, level=0, max_size=DEFAULT_SET_SIZE,
                    max_sets=DEFAULT_MAX_SETS, exhaustive=None, family=None):
    """Check Con's shape and (I1)-(I4) on a token slice.

    Finite systems are checked over every subset of their universe; other
    systems over all sets of at most ``max_size`` tokens of ``enumerate(level)``.
    An explicit ``family`` of sets replaces the generated one.
    """
    if exhaustive is None:
        exhaustive = sys.universe is not None and family is None
    tokens = sys.universe if (exhaustive and sys.universe is not None) \
        else sys.enumerate(level)
    if family is not None:
        sets = list(family)
        tokens = frozenset(tokens).union(*sets)
    else:
        sets = candidate_sets(tokens, exhaustive, max_size, max_sets)
    u = _Universe(sys, tokens, sets)
    report = AxiomReport(exhaustive=exhaustive)

    bad = _first(t for t in u.toks if not sys.con(frozenset([t])))
    if bad is None and not sys.con(EMPTY):
        bad = "{}"
    if bad is None:
        bad = _first(
            "%s>%s" % (show_set(a), show_set(a - {t}))
            for a in sets if u.con[a] for t in a if u.con.get(a - {t}) is False)
    report.results.append(AxiomResult(
        "CON", bad is None, "" if bad is None else
        (bad if isinstance(bad, str) else show_set({bad}))))

    def i1():
        for a in sets:
            if not u.con[a]:
                continue
            extra = u.from_mask(u.ent[a])
            whole = a | extra
            if exhaustive:
                try:
                    if not sys.con(whole):
                        return "%s|-%s" % (show_set(a), show_set(extra))
                except BudgetExceeded:
                    pass
                continue
            for k in range(1, max_size + 1):
                for b in combinations(sorted_tokens(extra - a), k):
                    try:
                        if not sys.con(a | frozenset(b)):
                            return "%s|-%s" % (show_set(a), show_set(b))
                    except BudgetExceeded:
                        pass
        return None

    def i2():
        for a in sets:
            if u.con[a]:
                for t in a:
                    if not sys.entails(a, t):
                        return "%s|/-%s" % (show_set(a), show(t))
        return None

    def i3():
        # the check only depends on the closure mask, so each is done once
        closed = set()
        for a in sets:
            if not u.con[a]:
                continue
            ea = u.ent[a]
            if ea in closed:
                continue
            for m in _submasks(ea):
                b = u.by_mask.get(m)
                if b is None or not u.con.get(b):
                    continue
                extra = u.ent[b] & ~ea
                if extra:
                    g = u.from_mask(extra)
                    return "%s|-%s|-%s" % (show_set(a), show_set(b),
                                           show(min(g)))
            closed.add(ea)
        return None

    def i4():
        return None if sys.entails(EMPTY, sys.nu) else "{}|/-%s" % show(sys.nu)

    for name, fn in (("I1", i1), ("I2", i2), ("I3", i3), ("I4", i4)):
        w = fn()
        report.results.append(AxiomResult(name, w is None, w or ""))
    return report


# ---------------------------------------------------------------------------
# Approximable relations

class ApproxRelation:
    """A relation between Con_A and B, given by a decision procedure."""

    def __init__(self, source, target, relates, name="R"):
        self.source = source
        self.target = target
        self._relates = relates
        self.name = name

    def query(self, a, beta):
        r = self._relates(frozenset(a), beta)
        if isinstance(r, Tri):
            return r
        return Tri.YES if r else Tri.NO

    def relates(self, a, beta):
        return self.query(a, beta) is Tri.YES

    def image(self, a, tokens):
        return frozenset(b for b in tokens if self.relates(a, b))

    def table(self, level=0, max_size=DEFAULT_SET_SIZE):
        src = _slice(self.source, level)
        tgt = _slice(self.target, level)
        exhaustive = self.source.universe is not None
        out = set()
        for a in candidate_sets(src, exhaustive, max_size):
            if self.source.con(a):
                for b in tgt:
                    if self.relates(a, b):
                        out.add((a, b))
        return frozenset(out)


def _slice(sys, level):
    return sys.universe if sys.universe is not None else sys.enumerate(level)


def identity_relation(A):
    return ApproxRelation(A, A, A.entails, name="id")


def empty_relation(A, B):
    return ApproxRelation(A, B, lambda a, b: False, name="empty")


def compose_approximable(R, S, level=0, max_size=DEFAULT_SET_SIZE):
    """S o R: (a, gamma) related iff some consistent b has a R b and b S gamma.

    The witness b ranges over the R-image of a. On an infinite middle system
    the search is bounded by ``level``/``max_size`` and a miss is UNKNOWN.
    """
    B = R.target
    finite = B.universe is not None

    def relates(a, gamma):
        img = R.image(a, _slice(B, level))
        pool = sorted_tokens(img)
        top = len(pool) if finite else min(max_size, len(pool))
        for k in range(top + 1):
            for c in combinations(pool, k):
                b = frozenset(c)
                if B.con(b) and S.relates(b, gamma):
                    return Tri.YES
        return Tri.NO if finite else Tri.UNKNOWN

    return ApproxRelation(R.source, S.target, relates,
                          name="%s.%s" % (S.name, R.name))


def check_approximable(R, level=0, max_size=DEFAULT_SET_SIZE,
                       max_sets=DEFAULT_MAX_SETS):
    A, B = R.source, R.target
    exA = A.universe is not None
    exB = B.universe is not None
    src = _slice(A, level)
    tgt = _slice(B, level)
    a_sets = [a for a in candidate_sets(src, exA, max_size, max_sets) if A.con(a)]
    report = AxiomReport()

    images = {a: R.image(a, tgt) for a in a_sets}

    def ar1():
        for a in a_sets:
            img = images[a]
            if exB:
                if not B.con(img):
                    return "%s R %s" % (show_set(a), show_set(img))
            else:
                for k in range(1, max_size + 1):
                    for b in combinations(sorted_tokens(img), k):
                        if not B.con(frozenset(b)):
                            return "%s R %s" % (show_set(a), show_set(b))
        return None

    b_sets = candidate_sets(tgt, exB, max_size, max_sets)
    b_ent = {b: B.entailed(b, tgt) for b in b_sets if B.con(b)}

    def ar2():
        for a2 in a_sets:
            for a in a_sets:
                if not A.entails_all(a2, a):
                    continue
                img = images[a]
                for b, eb in b_ent.items():
                    if b <= img:
                        missing = eb - images[a2]
                        if missing:
                            return "%s|-%s R %s|-%s" % (
                                show_set(a2), show_set(a), show_set(b),
                                show(min(missing)))
        return None

    for name, fn in (("AR1", ar1), ("AR2", ar2)):
        w = fn()
        report.results.append(AxiomResult(name, w is None, w or ""))
    return report


# ---------------------------------------------------------------------------
# Token maps

class TokenMap:
    """A (possibly partial) function between the token sets of two systems."""

    def __init__(self, source, target, fn, domain=None, name="f"):
        self.source = source
        self.target = target
        self.fn = fn
        self.domain = domain
        self.name = name

    def defined(self, t):
        return self.domain is None or self.domain(t)

    def __call__(self, t):
        if not self.defined(t):
            raise KeyError(show(t))
        return self.fn(t)

    def image(self, a):
        return frozenset(self.fn(t) for t in a if self.defined(t))


def identity_map(A):
    return TokenMap(A, A, lambda t: t, name="id")


MORPHISM_KINDS = ("Mo", "bMo", "fMo")


def check_morphism(f, kind="Mo", level=0, max_size=DEFAULT_SET_SIZE,
                   max_sets=DEFAULT_MAX_SETS, tokens=None):
    """Check (Mo), and (bMo) or (fMo) as asked, on the defined part of f."""
    if kind not in MORPHISM_KINDS:
        raise ValueError(kind)
    A, B = f.source, f.target
    if tokens is None:
        tokens = _slice(A, level)
    exhaustive = A.universe is not None and len(tokens) <= 12
    toks = frozenset(t for t in tokens if f.defined(t))
    sets = candidate_sets(toks, exhaustive, max_size, max_sets)
    con = {a: A.con(a) for a in sets}
    report = AxiomReport()
    ordered = sorted_tokens(toks)
    img = {t: f(t) for t in ordered}

    def image(a):
        return frozenset(img[t] for t in a)

    def mo():
        for a in sets:
            if con[a] != B.con(image(a)):
                return "%s con=%s image=%s" % (show_set(a), con[a],
                                               show_set(image(a)))
        return None

    def bmo():
        for a in sets:
            if not con[a]:
                continue
            fa = image(a)
            for t in ordered:
                if B.entails(fa, img[t]) and not A.entails(a, t):
                    return "%s|/-%s" % (show_set(a), show(t))
        return None

    def fmo():
        for a in sets:
            if not con[a]:
                continue
            fa = image(a)
            for t in ordered:
                if A.entails(a, t) and not B.entails(fa, img[t]):
                    return "%s|-%s" % (show_set(a), show(t))
        return None

    checks = [("Mo", mo)]
    if kind == "bMo":
        checks.append(("bMo", bmo))
    elif kind == "fMo":
        checks.append(("fMo", fmo))
    for name, fn in checks:
        w = fn()
        report.results.append(AxiomResult(name, w is None, w or ""))
    return report


def retraction_pair(f, validate=True):
    """The pair (f_lower, f_upper) on points induced by a b-morphism.

    f_upper(x) is the closure of the image of x; f_lower(y) is the closure of
    the preimage of y. Preimages are computed over the source universe, so the
    source must be finite.
    """
    if validate:
        rep = check_morphism(f, "bMo")
        if not rep.ok:
            raise NotBMorphism(str(rep))
    A, B = f.source, f.target
    if A.universe is None:
        raise BudgetExceeded("retraction pair needs a finite source")
    dom = [t for t in A.universe if f.defined(t)]

    def upper(x):
        return Point(B, f.image(_members(x, A)))

    def lower(y):
        return Point(A, frozenset(t for t in dom if f(t) in y))

    return lower, upper


def _members(x, sys):
    if sys.universe is not None:
        return x.extension()
    return x.generators
