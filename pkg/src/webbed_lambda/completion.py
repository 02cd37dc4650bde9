"""Completion of the partial product of two i-webs.

Stage 0 is a finite slice of the product of two webs: the product tokens
built from each web's tokens at a chosen enumeration level, with the
three-case phi kept only where its value stays inside the slice. Stage n+1
adds every pair (a, alpha) over stage n on which phi is still undefined as a
new formal token, and phi sends such a pair to that token.

All stages are answered by one object. A formal token Arrow(a, alpha) lives
at stage 1 + the largest stage of its components, so membership, Con,
entailment, phi and the projections psi can be resolved per query.
"""

from collections import defaultdict
from itertools import combinations, product as iproduct
import os
import random

from .kernel_is import (
    EMPTY, AxiomReport, AxiomResult, BudgetExceeded, InfoSys, check_is_axioms,
    exponential, product, restrict, candidate_sets,
)
from .tokens import Arrow, Pair, show, show_set, sorted_tokens
from .webs import IWeb, subsets

DEFAULT_STAGES = 3
DEFAULT_HARD_CAP = 8
EXHAUSTIVE_LIMIT = 10 ** 4
STAGE_CAP_ENV = "WEBBED_LAMBDA_STAGE_CAP"


class StageCapExceeded(RuntimeError):
    pass


class ValidationFailed(AssertionError):
    def __init__(self, stage, condition, witness):
        super().__init__("stage %s: %s failed: %s" % (stage, condition, witness))
        self.stage = stage
        self.condition = condition
        self.witness = witness


class TransportViolation(AssertionError):
    pass


class NotAToken(ValueError):
    pass


def hard_cap_from_env(default=DEFAULT_HARD_CAP):
    raw = os.environ.get(STAGE_CAP_ENV)
    if raw is None:
        return default
    cap = int(raw)
    if cap < 1:
        raise ValueError("%s must be positive" % STAGE_CAP_ENV)
    return cap


# ---------------------------------------------------------------------------
# The partial product

def product_phi(A1, A2, a, alpha):
    """The three-case phi of the product web; None outside the cases."""
    nu1, nu2 = A1.nu, A2.nu
    nu = Pair(nu1, nu2)
    if a <= {nu} and alpha == nu:
        return nu
    toks = a | {alpha}
    if all(t.left == nu1 for t in toks):
        return Pair(nu1, A2.phi(frozenset(t.right for t in a), alpha.right))
    if all(t.right == nu2 for t in toks):
        return Pair(A1.phi(frozenset(t.left for t in a), alpha.left), nu2)
    return None


class Completion:
    """Every stage of the completion of a truncated partial product."""

    def __init__(self, A1, A2, level=0, hard_cap=None):
        self.webs = (A1, A2)
        self.level = level
        self.hard_cap = hard_cap_from_env() if hard_cap is None else hard_cap
        self.nu = Pair(A1.nu, A2.nu)
        self.prod = product(A1.sys, A2.sys)
        nu1, nu2 = A1.nu, A2.nu
        self.base = frozenset(
            [Pair(x, nu2) for x in A1.sys.enumerate(level)]
            + [Pair(nu1, y) for y in A2.sys.enumerate(level)])
        self.base_sorted = sorted_tokens(self.base)
        self.phi0 = {}
        self.phi0_inverse = defaultdict(list)
        for a in subsets(self.base):
            if not self.prod.con(a):
                continue
            for alpha in self.base_sorted:
                v = product_phi(A1, A2, a, alpha)
                if v is not None and v in self.base:
                    self.phi0[(a, alpha)] = v
                    if alpha != self.nu:
                        self.phi0_inverse[v].append((a, alpha))
        self._stage = {}
        self._con = {}
        self._exp = {}

    # -- tokens and stages ------------------------------------------------

    def stage(self, t):
        """Least stage containing t; NotAToken if t is in no stage."""
        hit = self._stage.get(t)
        if hit is not None:
            return hit
        if t in self.base:
            s = 0
        elif isinstance(t, Arrow):
            comps = list(t.ante) + [t.succ]
            m = max(self.stage(x) for x in comps)
            if m == 0 and (t.ante, t.succ) in self.phi0:
                raise NotAToken(show(t))
            if not self.con_at(m, t.ante):
                raise NotAToken(show(t))
            s = m + 1
        else:
            raise NotAToken(show(t))
        if s > self.hard_cap:
            raise StageCapExceeded("%s needs stage %d > cap %d"
                                   % (show(t), s, self.hard_cap))
        self._stage[t] = s
        return s

    def has_token(self, t, n=None):
        try:
            s = self.stage(t)
        except NotAToken:
            return False
        return n is None or s <= n

    def set_stage(self, x):
        return max((self.stage(t) for t in x), default=0)

    def stage_tokens(self, n, max_ante=None):
        """Tokens of stage <= n; antecedents of new tokens capped by size."""
        if n == 0:
            return frozenset(self.base)
        prev = self.stage_tokens(n - 1, max_ante)
        new = set(prev)
        prev_sorted = sorted_tokens(prev)
        for a in subsets(prev_sorted, max_ante):
            if not self.con_at(n - 1, a):
                continue
            for alpha in prev_sorted:
                t = Arrow(a, alpha)
                if t in prev or (n == 1 and (a, alpha) in self.phi0):
                    continue
                if self.set_stage(a | {alpha}) == n - 1:
                    new.add(t)
        return frozenset(new)

    # -- Con -------------------------------------------------------------

    def con(self, x):
        x = frozenset(x)
        return self.con_at(self.set_stage(x), x)

    def con_at(self, n, x):
        """Consistency of x in stage n (False if x leaves the stage)."""
        x = frozenset(x)
        key = (n, x)
        hit = self._con.get(key)
        if hit is not None:
            return hit
        if any(not self.has_token(t, n) for t in x):
            out = False
        elif n == 0:
            out = self.prod.con(x)
        elif self.set_stage(x) < n:
            out = self.con_at(n - 1, x)
        else:
            out = self.clause1(n, x) or self.clause2(n, x)
        self._con[key] = out
        return out

    def exp_con(self, n, X):
        """Consistency of a family of formal pairs in stage n => stage n."""
        return self.exponential_at(n).con(X)

    def exponential_at(self, n):
        e = self._exp.get(n)
        if e is None:
            e = self._exp[n] = exponential(StageSystem(self, n), StageSystem(self, n))
        return e

    def clause1(self, n, x):
        old = frozenset(t for t in x if self.stage(t) < n)
        new = x - old
        if not self.con_at(n - 1, old) or not self.exp_con(n - 1, new):
            return False
        return all(self.webs[i].sys.con(self.psi_set(i + 1, x)) for i in (0, 1))

    def clause2(self, n, x, max_combos=4096):
        """Search X in Con(S_{n-1} => S_{n-1}) covering x."""
        old = [t for t in sorted_tokens(x) if self.stage(t) < n]
        new = frozenset(t for t in x if self.stage(t) == n)
        options = []
        for t in old:
            if self.entails(EMPTY, t):
                continue
            opts = self.covering_pairs(n - 1, t)
            if not opts:
                return False
            options.append(opts)
        for k, combo in enumerate(iproduct(*options)):
            if k >= max_combos:
                break
            X = new | frozenset(Arrow(a, al) for a, al in combo)
            if self.exp_con(n - 1, X):
                return True
        return False

    def covering_pairs(self, n, t):
        """Pairs in dom(phi at stage n) whose image entails t."""
        out = []
        if isinstance(t, Arrow):
            out.append((t.ante, t.succ))
        else:
            for s in self.base_sorted:
                if s == t or self.prod.entails(frozenset([s]), t):
                    out.extend(self.phi0_inverse.get(s, ()))
        return [p for p in out if self.phi_at(n, *p) is not None]

    # -- entailment, phi, psi ----------------------------------------------

    def entails(self, a, alpha):
        if alpha in a:
            return True
        if alpha not in self.base:
            return False
        return self.prod.entails(frozenset(t for t in a if t in self.base), alpha)

    def phi(self, a, alpha):
        """phi of the limit web: defined on every consistent antecedent."""
        a = frozenset(a)
        v = self.phi0.get((a, alpha))
        if v is not None:
            return v
        return Arrow(a, alpha)

    def phi_at(self, n, a, alpha):
        a = frozenset(a)
        v = self.phi0.get((a, alpha))
        if v is not None:
            return v
        if n >= 1 and self.set_stage(a | {alpha}) <= n - 1 \
                and self.con_at(n - 1, a):
            return Arrow(a, alpha)
        return None

    def psi(self, i, t):
        A = self.webs[i - 1]
        if t in self.base:
            return t.left if i == 1 else t.right
        if isinstance(t, Arrow) and self.has_token(t):
            return A.phi(self.psi_set(i, t.ante), self.psi(i, t.succ))
        raise NotAToken(show(t))

    def psi_set(self, i, a):
        return frozenset(self.psi(i, t) for t in a)

    def omega_web(self):
        return OmegaWeb(self)

    def stage_web(self, n):
        return StageWeb(self, n)


class StageSystem(InfoSys):
    """The information system of one stage."""

    def __init__(self, comp, n, max_ante=None):
        self.comp = comp
        self.n = n
        self.nu = comp.nu
        self.max_ante = max_ante
        self.name = "S%d" % n

    def con(self, x):
        return self.comp.con_at(self.n, x)

    def entails(self, a, alpha):
        return self.comp.entails(a, alpha)

    def has_token(self, t):
        return self.comp.has_token(t, self.n)

    def enumerate(self, level):
        return self.comp.stage_tokens(self.n, self.max_ante)


class OmegaSystem(InfoSys):
    def __init__(self, comp, max_ante=1):
        self.comp = comp
        self.nu = comp.nu
        self.max_ante = max_ante
        self.name = "S_omega"

    def con(self, x):
        return self.comp.con(x)

    def entails(self, a, alpha):
        return self.comp.entails(a, alpha)

    def has_token(self, t):
        return self.comp.has_token(t)

    def enumerate(self, level):
        return self.comp.stage_tokens(level, self.max_ante)


class OmegaWeb(IWeb):
    """The limit web, total on consistent antecedents."""

    def __init__(self, comp):
        self.comp = comp
        self.sys = OmegaSystem(comp)
        self.name = "S_omega"

    def phi(self, a, alpha):
        return self.comp.phi(a, alpha)

    def preimages(self, gamma):
        if isinstance(gamma, Arrow):
            if self.comp.has_token(gamma):
                return [(gamma.ante, gamma.succ)]
            return []
        return list(self.comp.phi0_inverse.get(gamma, ()))

    def base_tokens(self):
        return [t for t in self.comp.base_sorted if t != self.comp.nu]

    def psi(self, i, t):
        return self.comp.psi(i, t)


class StageWeb(IWeb):
    """Stage n as a partial i-web."""

    def __init__(self, comp, n, max_ante=None):
        self.comp = comp
        self.n = n
        self.sys = StageSystem(comp, n, max_ante)
        self.name = "S%d" % n

    def phi(self, a, alpha):
        return self.comp.phi_at(self.n, a, alpha)


def partial_product(A1, A2, level=0):
    """Stage 0 with its two projections."""
    comp = Completion(A1, A2, level)
    return comp.stage_web(0), (lambda t: comp.psi(1, t)), (lambda t: comp.psi(2, t))


def complete(A1, A2, max_stage=DEFAULT_STAGES, level=0, validate=False,
             max_ante=1, hard_cap=None):
    """The completion of A1 & A2, its stages checked up to ``max_stage``."""
    if max_stage < 1:
        raise ValueError("max_stage must be at least 1")
    comp = Completion(A1, A2, level, hard_cap)
    if max_stage > comp.hard_cap:
        raise StageCapExceeded("%d stages requested, cap %d"
                               % (max_stage, comp.hard_cap))
    if validate:
        for n in range(max_stage):
            rep = validate_step(comp, n, max_ante=max_ante)
            if not rep.ok:
                bad = rep[rep.failed()[0]]
                raise ValidationFailed(n + 1, bad.name, bad.witness)
    omega = comp.omega_web()
    omega.stages = max_stage
    return omega


# ---------------------------------------------------------------------------
# Stage validation

def _family(tokens, new, rng, max_size=3, sample=3000):
    """Candidate sets over a stage slice.

    Every set of at most ``max_size`` tokens when that family has at most
    EXHAUSTIVE_LIMIT members; otherwise every set of at most two tokens of
    the older stages plus a seeded sample of mixed sets.
    """
    toks = sorted_tokens(tokens)
    try:
        return candidate_sets(toks, False, max_size, EXHAUSTIVE_LIMIT), True
    except BudgetExceeded:
        pass
    old = [t for t in toks if t not in new]
    fam = set(candidate_sets(old, False, 2, 10 ** 6))
    while len(fam) < len(old) ** 2 // 2 + sample:
        k = rng.randint(1, max_size)
        fam.add(frozenset(rng.sample(toks, min(k, len(toks)))))
    return sorted(fam, key=lambda s: (len(s), sorted(t.key() for t in s))), False


def validate_step(comp, n, max_ante=1, seed=0, max_size=3):
    """Check the stage n -> n+1 step on a finite slice.

    The slice of stage n+1 is all of it when stage n's Con is small, else
    new tokens with antecedents of at most ``max_ante`` tokens.
    """
    rng = random.Random(seed)
    A = comp.webs
    cap = None if n == 0 else max_ante
    Tn = comp.stage_tokens(n, cap)
    T1 = comp.stage_tokens(n + 1, cap)
    new = T1 - Tn
    fam, exhaustive = _family(T1, new, rng, max_size)
    report = AxiomReport(prefix="STAGE%d" % (n + 1), exhaustive=exhaustive)

    def add(name, witness):
        report.results.append(AxiomResult(name, witness is None, witness or ""))

    # (i) information system and extension
    sys1 = restrict(StageSystem(comp, n + 1), T1)
    rep = check_is_axioms(sys1, exhaustive=False, max_size=max_size,
                          family=fam)
    for r in rep.results:
        add("IS-" + r.name, None if r.passed else r.witness)

    def ext_con():
        for x in fam:
            if x <= Tn and comp.con_at(n, x) != comp.con_at(n + 1, x):
                return show_set(x)
        return None
    add("EXT-CON", ext_con())

    def ext_tokens():
        bad = [t for t in Tn if not comp.has_token(t, n + 1)]
        return show_set(bad) if bad else None
    add("EXT-TOKENS", ext_tokens())

    # (ii) phi at stage n+1 on pairs over stage n
    pairs = [(a, al) for a in subsets(sorted_tokens(Tn), max_ante if n else None)
             if comp.con_at(n, a) for al in sorted_tokens(Tn)]

    def phi_total():
        for a, al in pairs:
            if comp.phi_at(n + 1, a, al) is None:
                return "(%s,%s)" % (show_set(a), show(al))
        return None
    add("PHI-TOTAL", phi_total())

    def phi_ext():
        for a, al in pairs:
            old = comp.phi_at(n, a, al)
            v = comp.phi_at(n + 1, a, al)
            if old is not None and old != v:
                return "(%s,%s)" % (show_set(a), show(al))
            if old is None and v != Arrow(a, al):
                return "(%s,%s) not formal" % (show_set(a), show(al))
        return None
    add("PHI-FORMAL", phi_ext())

    arrows = [Arrow(a, al) for a, al in pairs]
    xs = _pair_families(arrows, rng)
    e = comp.exponential_at(n)

    def phi_image(X):
        return frozenset(comp.phi_at(n + 1, t.ante, t.succ) for t in X)

    def phi_mo():
        for X in xs:
            if e.con(X) != comp.con_at(n + 1, phi_image(X)):
                return show_set(X)
        return None
    add("PHI-MO", phi_mo())

    def phi_bmo():
        for X in xs:
            if not e.con(X):
                continue
            img = phi_image(X)
            for t in arrows:
                v = comp.phi_at(n + 1, t.ante, t.succ)
                if comp.entails(img, v) and not e.entails(X, t):
                    return "%s|-%s" % (show_set(X), show(t))
        return None
    add("PHI-BMO", phi_bmo())

    # (iii) psi
    for i in (1, 2):
        Ai = A[i - 1]
        def ext(i=i, Ai=Ai):
            for t in sorted_tokens(T1):
                if t in comp.base:
                    want = t.left if i == 1 else t.right
                elif t in new:
                    want = Ai.phi(comp.psi_set(i, t.ante), comp.psi(i, t.succ))
                else:
                    continue
                if comp.psi(i, t) != want:
                    return show(t)
            return None

        def mo(i=i, Ai=Ai):
            for x in fam:
                c = comp.con_at(n + 1, x)
                if c and not Ai.sys.con(comp.psi_set(i, x)):
                    return show_set(x)
            return None

        def fmo(i=i, Ai=Ai):
            for x in fam:
                if not comp.con_at(n + 1, x):
                    continue
                px = comp.psi_set(i, x)
                for t in sorted_tokens(T1):
                    if comp.entails(x, t) and not Ai.sys.entails(px, comp.psi(i, t)):
                        return "%s|-%s" % (show_set(x), show(t))
            return None

        def imo(i=i, Ai=Ai):
            for a, al in pairs:
                v = comp.phi_at(n + 1, a, al)
                if comp.psi(i, v) != Ai.phi(comp.psi_set(i, a), comp.psi(i, al)):
                    return "(%s,%s)" % (show_set(a), show(al))
            return None

        add("PSI%d-EXT" % i, ext())
        add("PSI%d-MO" % i, mo())
        add("PSI%d-FMO" % i, fmo())
        add("PSI%d-IMO" % i, imo())
    return report


def _pair_families(arrows, rng, max_size=2, sample=2000):
    fam = set()
    for k in range(max_size + 1):
        for c in combinations(arrows, k):
            fam.add(frozenset(c))
            if len(fam) > sample:
                break
    for _ in range(sample // 4):
        fam.add(frozenset(rng.sample(arrows, min(3, len(arrows)))))
    return sorted(fam, key=lambda s: (len(s), sorted(t.key() for t in s)))


def check_clause2_closure(comp, n, max_size=4, max_ante=1):
    """(X minus dom) with phi of (X within dom) is consistent at stage n+1."""
    Tn = comp.stage_tokens(n, None if n == 0 else max_ante)
    pairs = [Arrow(a, al) for a in subsets(sorted_tokens(Tn), max_ante if n else None)
             if comp.con_at(n, a) for al in sorted_tokens(Tn)]
    e = comp.exponential_at(n)
    count = 0
    for k in range(max_size + 1):
        for X in combinations(pairs, k):
            X = frozenset(X)
            if not e.con(X):
                continue
            img = frozenset(comp.phi_at(n + 1, t.ante, t.succ) for t in X)
            count += 1
            if not comp.con_at(n + 1, img):
                return show_set(X), count
    return None, count


# ---------------------------------------------------------------------------
# Transport

def transport_check(omega, M, gamma, which, fuel=4, max_fuel=None, width=2):
    """Fuel at which psi(gamma) is found in M's denotation in the factor.

    gamma must be found in M's denotation in the limit web first.
    """
    from .interp import token_in_interp
    from .kernel_is import Tri
    if max_fuel is None:
        max_fuel = fuel + 2
    if token_in_interp(gamma, M, omega, fuel, width) is not Tri.YES:
        raise ValueError("%s not found in the limit web at fuel %d"
                         % (show(gamma), fuel))
    target = omega.comp.psi(which, gamma)
    A = omega.comp.webs[which - 1]
    for f in range(max_fuel + 1):
        if token_in_interp(target, M, A, f, width) is Tri.YES:
            return f
    raise TransportViolation("%s maps to %s, not found within fuel %d"
                             % (show(gamma), show(target), max_fuel))
