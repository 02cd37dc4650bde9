"""i-webs: an information system together with a b-morphism phi from its
exponential back into itself.

Every web here keeps nu inert: phi(a, nu) = nu, and nu is dropped from
antecedents before phi is applied. Free webs represent a pair (a, alpha)
that is not interpreted by a user table by the Arrow token itself.
"""

from functools import lru_cache
from itertools import combinations, combinations_with_replacement, product as iproduct
import threading

from .kernel_is import (
    EMPTY, InfoSys, TokenMap, check_morphism, exponential, terminal,
)
from .tokens import NU, Arrow, Atom, Meet, Token, show, show_set, sorted_tokens


class NotInjective(ValueError):
    pass


class CoherenceViolation(ValueError):
    pass


class ConditionFailed(ValueError):
    def __init__(self, condition, witness):
        super().__init__("condition (%s) failed: %s" % (condition, witness))
        self.condition = condition
        self.witness = witness


class StarViolated(ValueError):
    def __init__(self, witness):
        super().__init__("(*) violated: %s" % witness)
        self.witness = witness


def _atom(x):
    return x if isinstance(x, Token) else Atom(str(x))


def subsets(tokens, max_size=None):
    toks = sorted_tokens(tokens)
    top = len(toks) if max_size is None else min(max_size, len(toks))
    for k in range(top + 1):
        for c in combinations(toks, k):
            yield frozenset(c)


# ---------------------------------------------------------------------------
# Base class

class IWeb:
    """An information system with a (possibly partial) phi.

    Subclasses provide ``sys``, ``phi`` and ``preimages``. ``base_tokens``
    are the non-nu tokens offered to the abstraction clause of the
    interpreter; ``flat`` marks webs whose entailment is membership.
    """

    flat = False
    name = "web"

    def phi(self, a, alpha):
        raise NotImplementedError

    def in_domain(self, a, alpha):
        return self.phi(a, alpha) is not None

    def preimages(self, gamma):
        """Pairs (a, alpha), alpha != nu, with phi(a, alpha) = gamma."""
        raise NotImplementedError

    def base_tokens(self):
        return ()

    def app_candidates(self, tokens):
        """Tokens entailed by ``tokens`` whose preimages drive application."""
        return tokens

    @property
    def nu(self):
        return self.sys.nu

    def exponential(self, subset_cap=16):
        return exponential(self.sys, self.sys, subset_cap)

    def phi_map(self):
        return TokenMap(self.exponential(), self.sys,
                        lambda t: self.phi(t.ante, t.succ),
                        domain=lambda t: self.in_domain(t.ante, t.succ),
                        name="phi")

    def validate(self, level=1, max_size=2, tokens=None):
        """(Mo) and (bMo) for phi on a slice of the exponential."""
        f = self.phi_map()
        if tokens is None:
            tokens = f.source.enumerate(level)
        return check_morphism(f, "bMo", max_size=max_size, tokens=tokens)

    def __repr__(self):
        return "<%s %s>" % (type(self).__name__, self.name)


def normalize_ante(a, nu):
    return frozenset(a) - {nu}


def _inj_table(inj):
    return {(normalize_ante((_atom(x) for x in a), NU), _atom(al)): _atom(v)
            for (a, al), v in (inj or {}).items()}


# ---------------------------------------------------------------------------
# Graph webs (total pairs) and their free completion

class FreeTokenSystem(InfoSys):
    """Shared level machinery for free webs: level n adds formal pairs built
    from level n-1. Levels are cached under a lock."""

    def __init__(self, atoms, name):
        self.atoms = tuple(sorted_tokens(atoms))
        self.name = name
        self._levels = [frozenset(self.atoms) | {NU}]
        self._lock = threading.Lock()

    def formal_ok(self, a, alpha):
        return True

    def ante_ok(self, a):
        return True

    def enumerate(self, level):
        if level < len(self._levels):
            return self._levels[level]
        with self._lock:
            while len(self._levels) <= level:
                prev = self._levels[-1]
                body = [t for t in prev if t is not NU]
                new = set(prev)
                for a in subsets(body):
                    if not self.ante_ok(a):
                        continue
                    for alpha in body:
                        if self.formal_ok(a, alpha):
                            new.add(Arrow(a, alpha))
                self._levels.append(frozenset(new))
        return self._levels[level]

    def has_token(self, t):
        if t is NU:
            return True
        if isinstance(t, Arrow):
            return (t.succ is not NU and NU not in t.ante
                    and self.has_token(t.succ)
                    and all(self.has_token(x) for x in t.ante)
                    and self.ante_ok(t.ante) and self.formal_ok(t.ante, t.succ))
        return t in self.atoms


class GraphSystem(FreeTokenSystem):
    """Flat system: every finite set is consistent, a |- x iff x in a."""

    def __init__(self, atoms, inj, name):
        self.inj = inj
        super().__init__(atoms, name)

    def formal_ok(self, a, alpha):
        return (a, alpha) not in self.inj

    def con(self, a):
        return True

    def entails(self, a, alpha):
        return alpha is NU or alpha in a


class GraphWeb(IWeb):
    flat = True

    def __init__(self, atoms, inj=None, name=None):
        atoms = [_atom(x) for x in atoms]
        inj = _inj_table(inj)
        seen = {}
        for key, v in inj.items():
            if v not in atoms:
                raise NotInjective("image %s is not an atom" % show(v))
            if v in seen:
                raise NotInjective("%s and %s both map to %s" % (
                    _pair_str(seen[v]), _pair_str(key), show(v)))
            seen[v] = key
        self.inj = inj
        self.inverse = seen
        self.name = name or "graph(%s)" % ",".join(show(t) for t in atoms)
        self.sys = GraphSystem(atoms, inj, self.name)

    @property
    def atoms(self):
        return self.sys.atoms

    def phi(self, a, alpha):
        if alpha is NU:
            return NU
        a = normalize_ante(a, NU)
        hit = self.inj.get((a, alpha))
        return hit if hit is not None else Arrow(a, alpha)

    def preimages(self, gamma):
        if isinstance(gamma, Arrow):
            return [(gamma.ante, gamma.succ)]
        hit = self.inverse.get(gamma)
        return [hit] if hit is not None else []

    def base_tokens(self):
        return self.sys.atoms

    @property
    def free_sensible(self):
        """No atom is the image of phi."""
        return not self.inj


def _pair_str(p):
    return "(%s,%s)" % (show_set(p[0]), show(p[1]))


def graph_web(atoms, inj=None, name=None):
    return GraphWeb(atoms, inj, name)


# ---------------------------------------------------------------------------
# Preordered sets with coherence

class PcSystem(FreeTokenSystem):
    """pc-set over user atoms, extended freely to formal pairs.

    On formal pairs the order and coherence are the ones forced by reading
    the pc-web conditions as definitions; atoms and formal pairs are
    coherent and incomparable; nu is coherent with all and below only nu.
    With ``pair_order="discrete"`` distinct formal pairs are incomparable,
    the least order meeting condition (2).
    """

    def __init__(self, atoms, order, coh, inj, name, pair_order="free"):
        if pair_order not in ("free", "discrete"):
            raise ValueError("pair_order must be 'free' or 'discrete'")
        self.pair_order = pair_order
        self.order = frozenset(order)
        self.coh = frozenset(coh)
        self.inj = inj
        super().__init__(atoms, name)

    def formal_ok(self, a, alpha):
        return (a, alpha) not in self.inj

    def ante_ok(self, a):
        return self.con(a)

    @lru_cache(maxsize=None)
    def leq(self, x, y):
        if x == y:
            return True
        if x is NU or y is NU:
            return False
        if isinstance(x, Arrow) and isinstance(y, Arrow):
            if self.pair_order == "discrete":
                return False
            return self.leq(x.succ, y.succ) and all(
                any(self.leq(g, d) for d in x.ante) for g in y.ante)
        if isinstance(x, Arrow) or isinstance(y, Arrow):
            return False
        return (x, y) in self.order

    @lru_cache(maxsize=None)
    def coherent(self, x, y):
        if x == y or x is NU or y is NU:
            return True
        if isinstance(x, Arrow) and isinstance(y, Arrow):
            return (not self.con(x.ante | y.ante)) or self.coherent(x.succ, y.succ)
        if isinstance(x, Arrow) or isinstance(y, Arrow):
            return True
        return (x, y) in self.coh

    def con(self, a):
        toks = sorted_tokens(a)
        return all(self.coherent(x, y) for x, y in combinations(toks, 2))

    def entails(self, a, alpha):
        return alpha is NU or self._entails(frozenset(a), alpha)

    @lru_cache(maxsize=1 << 18)
    def _entails(self, a, alpha):
        return any(self.leq(alpha, b) for b in a)


def _closure_order(atoms, pairs):
    order = {(x, x) for x in atoms} | set(pairs)
    changed = True
    while changed:
        changed = False
        for (x, y), (y2, z) in iproduct(list(order), list(order)):
            if y == y2 and (x, z) not in order:
                order.add((x, z))
                changed = True
    return order


class PcsWeb(IWeb):
    """pc-web over a finite pc-set; Krivine webs have full coherence.

    ``inj`` optionally sends some pairs to atoms; every other pair is formal.
    Conditions (1) and (2) are validated on a bounded slice at construction.
    """

    def __init__(self, atoms, order=(), coh=None, inj=None, name=None,
                 check_level=1, check_size=2, pair_order="free"):
        atoms = [_atom(x) for x in atoms]
        order = _closure_order(atoms, [(_atom(x), _atom(y)) for x, y in order])
        if coh is None:
            coh = {(x, y) for x in atoms for y in atoms}
        else:
            coh = {(_atom(x), _atom(y)) for x, y in coh}
            coh |= {(y, x) for x, y in coh} | {(x, x) for x in atoms}
        for (x, y) in order:
            for z in atoms:
                if (y, z) in coh and (x, z) not in coh:
                    raise CoherenceViolation(
                        "%s<=%s and %s~%s but not %s~%s" % (
                            show(x), show(y), show(y), show(z), show(x), show(z)))
        inj = _inj_table(inj)
        self.inj = inj
        self.name = name or "pcs(%s)" % ",".join(show(t) for t in atoms)
        self.sys = PcSystem(atoms, order, coh, inj, self.name, pair_order)
        self.krivine = len(coh) == len(atoms) ** 2
        self.flat = (len(order) == len(atoms) and self.krivine
                     and pair_order == "discrete")
        if inj:
            self.check_conditions(check_level, check_size)

    def phi(self, a, alpha):
        if alpha is NU:
            return NU
        a = normalize_ante(a, NU)
        hit = self.inj.get((a, alpha))
        return hit if hit is not None else Arrow(a, alpha)

    def preimages(self, gamma):
        if isinstance(gamma, Arrow):
            return [(gamma.ante, gamma.succ)]
        return [k for k, v in self.inj.items() if v == gamma]

    def base_tokens(self):
        return self.sys.atoms

    def check_conditions(self, level=1, max_size=2):
        """Conditions (1) and (2) over pairs from the given slice."""
        s = self.sys
        toks = [t for t in s.enumerate(level) if t is not NU]
        pairs = [(a, al) for a in subsets(toks, max_size) if s.con(a)
                 for al in toks]
        for (a, al), (b, be) in iproduct(pairs, pairs):
            x, y = self.phi(a, al), self.phi(b, be)
            lhs = s.coherent(x, y)
            rhs = (not s.con(a | b)) or s.coherent(al, be)
            if lhs != rhs:
                raise ConditionFailed(1, "%s ~ %s is %s" % (show(x), show(y), lhs))
            if s.leq(x, y):
                if not (s.leq(al, be) and all(any(s.leq(g, d) for d in a)
                                               for g in b)):
                    raise ConditionFailed(2, "%s <= %s" % (show(x), show(y)))


def pcs_web(atoms, order=(), coh=None, inj=None, name=None, pair_order="free"):
    return PcsWeb(atoms, order, coh, inj, name, pair_order=pair_order)


def krivine_web(atoms, order=(), inj=None, name=None, pair_order="free"):
    return PcsWeb(atoms, order, None, inj, name, pair_order=pair_order)


# ---------------------------------------------------------------------------
# Extended abstract type structures

class EATS:
    """A meet-semilattice with top ``omega`` and a binary arrow."""

    omega = NU

    def meet(self, s, t):
        raise NotImplementedError

    def arrow(self, s, t):
        raise NotImplementedError

    def leq(self, s, t):
        return self.meet(s, t) == s

    def meet_all(self, items):
        out = self.omega
        for x in sorted_tokens(items):
            out = self.meet(out, x)
        return out

    def enumerate(self, level):
        raise NotImplementedError

    def generators(self):
        return ()

    def arrow_preimages(self, gamma):
        raise NotImplementedError


class TableEATS(EATS):
    """A finite EATS given by meet and arrow tables over named elements."""

    def __init__(self, elements, omega, meet, arrow, name="eats"):
        self.elements = tuple(_atom(x) for x in elements)
        self.omega = _atom(omega)
        self.meet_table = {(_atom(x), _atom(y)): _atom(v)
                           for (x, y), v in meet.items()}
        self.arrow_table = {(_atom(x), _atom(y)): _atom(v)
                            for (x, y), v in arrow.items()}
        self.name = name
        self._check_semilattice()

    def _check_semilattice(self):
        E = self.elements
        for x, y in iproduct(E, E):
            if (x, y) not in self.meet_table or (x, y) not in self.arrow_table:
                raise ValueError("incomplete table at (%s,%s)" % (x, y))
        m = self.meet
        for x in E:
            if m(x, x) != x or m(x, self.omega) != x:
                raise ValueError("not a semilattice with top at %s" % x)
            for y in E:
                if m(x, y) != m(y, x):
                    raise ValueError("meet not commutative at %s,%s" % (x, y))
                for z in E:
                    if m(m(x, y), z) != m(x, m(y, z)):
                        raise ValueError("meet not associative")

    def meet(self, s, t):
        return self.meet_table[(s, t)]

    def arrow(self, s, t):
        return self.arrow_table[(s, t)]

    def enumerate(self, level):
        return frozenset(self.elements)

    def arrow_preimages(self, gamma):
        return [(s, t) for (s, t), v in sorted(self.arrow_table.items())
                if v == gamma and t != self.omega]


class FreeEATS(EATS):
    """The free EATS over primitive types.

    Elements are finite sets of basic types, read as their meet; a basic type
    is a primitive or ``Arrow(m, g)`` with m a finite set of basic types.
    Meet is union, omega is the empty set, s <= t iff s contains t, and
    s -> t = {s => g : g in t}. This structure satisfies (*).
    """

    def __init__(self, primitives, meet_width=2, name=None):
        self.primitives = tuple(sorted_tokens(_atom(p) for p in primitives))
        self.meet_width = meet_width
        self.name = name or "free(%s)" % ",".join(show(p) for p in self.primitives)
        self._basic = [frozenset(self.primitives)]
        self._lock = threading.Lock()

    @staticmethod
    def parts(t):
        if t is NU:
            return EMPTY
        if isinstance(t, Meet):
            return t.items
        return frozenset([t])

    @staticmethod
    def norm(parts):
        parts = frozenset(parts)
        if not parts:
            return NU
        if len(parts) == 1:
            return next(iter(parts))
        return Meet(parts)

    def meet(self, s, t):
        return self.norm(self.parts(s) | self.parts(t))

    def meet_all(self, items):
        return self.norm(frozenset().union(*(self.parts(x) for x in items)))

    def leq(self, s, t):
        return self.parts(t) <= self.parts(s)

    def arrow(self, s, t):
        m = self.parts(s)
        return self.norm(Arrow(m, g) for g in self.parts(t))

    def basic(self, level):
        with self._lock:
            while len(self._basic) <= level:
                prev = self._basic[-1]
                new = set(prev)
                for m in subsets(prev, len(self._basic)):
                    for g in prev:
                        new.add(Arrow(m, g))
                self._basic.append(frozenset(new))
        return self._basic[level]

    def enumerate(self, level):
        b = self.basic(level)
        return frozenset(self.norm(s) for s in subsets(b, self.meet_width))

    def generators(self):
        return self.primitives

    def arrow_preimages(self, gamma):
        ps = self.parts(gamma)
        if not ps or not all(isinstance(p, Arrow) for p in ps):
            return []
        antes = {p.ante for p in ps}
        if len(antes) != 1:
            return []
        m = antes.pop()
        return [(self.norm(m), self.norm(p.succ for p in ps))]


def check_eats_star(e, bound=2, level=1):
    """Check (*) for every family of at most ``bound`` arrows.

    Returns None on success, else a witness string.
    """
    E = sorted_tokens(e.enumerate(level))
    pairs = list(iproduct(E, E))
    arrows = {(s, t): e.arrow(s, t) for s, t in pairs}
    for n in range(bound + 1):
        for fam in combinations_with_replacement(pairs, n):
            lhs = e.meet_all([arrows[p] for p in fam])
            for (g, d) in pairs:
                if not e.leq(lhs, arrows[(g, d)]):
                    continue
                chosen = [b for (a, b) in fam if e.leq(g, a)]
                if not e.leq(e.meet_all(chosen), d):
                    return "%s <= %s->%s but %s !<= %s" % (
                        "&".join("%s->%s" % (show(a), show(b)) for a, b in fam)
                        or "omega", show(g), show(d),
                        show(e.meet_all(chosen)), show(d))
    return None


class FilterSystem(InfoSys):
    def __init__(self, e):
        self.e = e
        self.nu = e.omega
        self.name = "filter(%s)" % getattr(e, "name", "eats")
        if isinstance(e, TableEATS):
            self.finite = True
            self.universe = frozenset(e.elements)

    def con(self, a):
        return True

    def entails(self, a, alpha):
        return self.e.leq(self.e.meet_all(a), alpha)

    def enumerate(self, level):
        return self.e.enumerate(level)

    def has_token(self, t):
        if self.universe is not None:
            return t in self.universe
        return True


class FilterWeb(IWeb):
    def __init__(self, e):
        self.e = e
        self.sys = FilterSystem(e)
        self.name = self.sys.name

    def phi(self, a, alpha):
        return self.e.arrow(self.e.meet_all(a), alpha)

    def preimages(self, gamma):
        out = []
        for s, t in self.e.arrow_preimages(gamma):
            a = EMPTY if s == self.e.omega else frozenset([s])
            out.append((a, t))
        return out

    def base_tokens(self):
        return self.e.generators()

    def app_candidates(self, tokens):
        if isinstance(self.e, FreeEATS):
            parts = set(tokens)
            for t in tokens:
                parts |= FreeEATS.parts(t)
            for t in list(parts):
                # meets of arrows sharing an antecedent
                if isinstance(t, Arrow):
                    same = [p for p in parts
                            if isinstance(p, Arrow) and p.ante == t.ante]
                    if len(same) > 1:
                        parts.add(Meet(frozenset(same)))
            return frozenset(parts)
        return tokens


def filter_web(e, bound=2, level=1):
    w = check_eats_star(e, bound, level)
    if w is not None:
        raise StarViolated(w)
    return FilterWeb(e)


def one_point_eats():
    w = Atom("w")
    return TableEATS([w], w, {(w, w): w}, {(w, w): w}, name="one")


# ---------------------------------------------------------------------------
# The trivial web

class TrivialWeb(IWeb):
    """The one-token web: phi is constantly nu."""

    flat = True

    def __init__(self):
        self.sys = terminal()
        self.name = "trivial"

    def phi(self, a, alpha):
        return NU

    def preimages(self, gamma):
        return []


def trivial_web():
    return TrivialWeb()


# ---------------------------------------------------------------------------
# Exhaustive checks on slices

def slice_system(web, level):
    """The restriction of a web's system to one enumeration level."""
    from .kernel_is import restrict
    return restrict(web.sys, web.sys.enumerate(level))
