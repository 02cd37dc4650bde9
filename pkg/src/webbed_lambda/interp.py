"""Fuel-bounded interpretation of lambda terms in the model of a web.

``interpret`` computes a finite under-approximation of the point denoted by
a closed term: a set of tokens whose closure lies inside the denotation.
Depth bounds the recursion (every Var, App and Abs costs one unit) and
width bounds the antecedent sets tried by the abstraction clause.

``token_in_interp`` answers membership goal-first, running a small
Krivine machine over closures; it answers YES or UNKNOWN, never NO.
"""

from dataclasses import dataclass
from itertools import combinations

from .kernel_is import EMPTY, Tri
from .lambda_syntax import Abs, App, free_vars, head_cycles
from .tokens import sorted_tokens

DEFAULT_DEPTH = 4
DEFAULT_WIDTH = 2
ESCALATION = 2
ESCALATION_SLACK = 6


class OpenTerm(ValueError):
    pass


class WebMismatch(ValueError):
    pass


@dataclass(frozen=True)
class PointApprox:
    """A point of a web known through a finite set of its generators."""

    web: object
    generators: frozenset

    def membership(self, gamma):
        if self.web.sys.entails(self.generators, gamma):
            return Tri.YES
        return Tri.UNKNOWN

    def __contains__(self, gamma):
        return self.membership(gamma) is Tri.YES


@dataclass(frozen=True, eq=False)
class Closure:
    term: object
    env: tuple


def _lookup(env, name):
    for n, v in env:
        if n == name:
            return v
    raise OpenTerm(name)


def _bind(env, name, value):
    return ((name, value),) + env


def _env_from(env):
    if env is None:
        return ()
    if isinstance(env, dict):
        return tuple(env.items())
    return tuple(env)


def _gens(v):
    return v.generators if isinstance(v, PointApprox) else v


# ---------------------------------------------------------------------------
# Application on generator sets

def apply_generators(web, fun, arg):
    """Generators of fun . arg from generators of both points.

    beta is produced when some (a', beta) has phi(a', beta) entailed by
    ``fun`` (through the web's candidates) and ``arg`` entails a'.
    """
    sys = web.sys
    out = set()
    for g in web.app_candidates(fun):
        for a, beta in web.preimages(g):
            if beta != sys.nu and sys.entails_all(arg, a):
                out.add(beta)
    return frozenset(out)


def apply_points(u, z, fuel=None):
    if u.web is not z.web:
        raise WebMismatch("points of different webs")
    return PointApprox(u.web, apply_generators(u.web, u.generators, z.generators))


# ---------------------------------------------------------------------------
# Approximants

class _Arg:
    """A pending argument: a term with the environment it was written in."""

    __slots__ = ("term", "env", "_hash")

    def __init__(self, term, env):
        self.term = term
        self.env = env
        self._hash = hash((id(term), env))

    def __eq__(self, other):
        return (isinstance(other, _Arg) and self.term is other.term
                and self.env == other.env)

    def __hash__(self):
        return self._hash


class _Approximator:
    """Approximants of a term applied to a stack of pending arguments.

    Application pushes its argument unevaluated. An abstraction facing a
    pending argument binds its variable to it, so each occurrence of the
    variable is approximated in its own context, as a substituted copy
    would be; this is sound because the model validates beta. A variable
    bound to a finite set applies it to the pending arguments with the
    application clause. An abstraction with nothing pending tries every
    consistent antecedent of at most ``width`` tokens drawn from the web's
    atoms (and from one enumeration level when ``pool_level`` is given).
    """

    def __init__(self, web, width, pool_level=None):
        self.web = web
        self.width = width
        self.memo = {}
        self.fv = {}
        base = set(web.base_tokens())
        if pool_level is not None:
            base.update(web.sys.enumerate(pool_level))
        self.cands = self.subsets(base)

    def subsets(self, pool):
        """Consistent subsets of pool with at most width elements."""
        pool = sorted_tokens(set(pool) - {self.web.nu})
        out = []
        for k in range(min(self.width, len(pool)) + 1):
            for c in combinations(pool, k):
                a = frozenset(c)
                if self.web.sys.con(a):
                    out.append(a)
        return out

    def free(self, t):
        k = id(t)
        hit = self.fv.get(k)
        if hit is None:
            hit = self.fv[k] = (t, free_vars(t))
        return hit[1]

    def run(self, t, env, d, args=()):
        if d <= 0:
            return EMPTY
        names = self.free(t)
        key = (id(t), tuple((n, v) for n, v in env if n in names), d, args)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        out = self._run(t, env, d, args)
        self.memo[key] = out
        return out

    def _run(self, t, env, d, args):
        web = self.web
        if isinstance(t, App):
            return self.run(t.fun, env, d - 1, (_Arg(t.arg, env),) + args)
        if isinstance(t, Abs):
            if args:
                return self.run(t.body, _bind(env, t.name, args[0]), d - 1,
                                args[1:])
            out = set()
            for a in self.cands:
                for alpha in self.run(t.body, _bind(env, t.name, a), d - 1):
                    g = web.phi(a, alpha)
                    if g is not None and g != web.nu:
                        out.add(g)
            return frozenset(out)
        v = _lookup(env, t.name)
        if isinstance(v, _Arg):
            return self.run(v.term, v.env, d - 1, args)
        for arg in args:
            if not v:
                break
            v = apply_generators(web, v, self.run(arg.term, arg.env, d - 1))
        return v


def _resolve_env(web, env, depth, width):
    """Replace closures in an environment by their approximants."""
    out = []
    for n, v in env:
        if isinstance(v, Closure):
            v = interpret(v.term, web, depth, width, env=v.env)
        out.append((n, frozenset(_gens(v))))
    return tuple(out)


def interpret(t, web, depth=DEFAULT_DEPTH, width=DEFAULT_WIDTH, env=None,
              pool_level=None):
    """Finite generator set of an approximant of the denotation of t.

    Abstractions try antecedents built from the web's atoms and from tokens
    the surrounding application supplies. ``pool_level`` adds every token of
    that enumeration level to the candidates, which lets closed combinators
    such as S produce tokens without being applied.
    """
    env = _env_from(env)
    bound = {n for n, _ in env}
    missing = free_vars(t) - bound
    if missing:
        raise OpenTerm(", ".join(sorted(missing)))
    env = _resolve_env(web, env, max(depth - 1, 0), width)
    return _Approximator(web, width, pool_level).run(t, env, depth)


def interpret_point(t, web, depth=DEFAULT_DEPTH, width=DEFAULT_WIDTH, env=None,
                    pool_level=None):
    return PointApprox(web, interpret(t, web, depth, width, env, pool_level))


# ---------------------------------------------------------------------------
# Goal-directed membership

class _Machine:
    def __init__(self, web, width):
        self.web = web
        self.width = width
        self.memo = {}

    def mem(self, gamma, t, env, stack, fuel):
        if fuel <= 0:
            return False
        if self.web.sys.entails(EMPTY, gamma):
            return True
        key = (gamma, id(t), env, stack, fuel)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.memo[key] = False
        out = self._mem(gamma, t, env, stack, fuel)
        self.memo[key] = out
        return out

    def _mem(self, gamma, t, env, stack, fuel):
        web = self.web
        sys = web.sys
        if isinstance(t, App):
            return self.mem(gamma, t.fun, env, (Closure(t.arg, env),) + stack,
                            fuel - 1)
        if isinstance(t, Abs):
            if stack:
                return self.mem(gamma, t.body, _bind(env, t.name, stack[0]),
                                stack[1:], fuel - 1)
            for c, delta in web.preimages(gamma):
                if not sys.con(c):
                    continue
                point = PointApprox(web, frozenset(c))
                if self.mem(delta, t.body, _bind(env, t.name, point), (),
                            fuel - 1):
                    return True
            return self.fallback(gamma, t, env, fuel)
        v = _lookup(env, t.name)
        if isinstance(v, Closure):
            return self.mem(gamma, v.term, v.env, stack, fuel)
        gens = _gens(v)
        for c in stack:
            gens = self.apply_to_closure(gens, c, fuel - 1)
        return sys.entails(gens, gamma)

    def apply_to_closure(self, gens, c, fuel):
        web = self.web
        out = set()
        for g in web.app_candidates(gens):
            for a, beta in web.preimages(g):
                if beta == web.sys.nu or beta in out:
                    continue
                if all(self.mem(x, c.term, c.env, (), fuel) for x in a):
                    out.add(beta)
        return frozenset(out)

    def fallback(self, gamma, t, env, fuel):
        env = _resolve_env(self.web, env, fuel - 1, self.width)
        s = _Approximator(self.web, self.width).run(t, env, fuel)
        return self.web.sys.entails(s, gamma)


def token_in_interp(gamma, t, web, fuel=DEFAULT_DEPTH, width=DEFAULT_WIDTH,
                    env=None):
    """YES if gamma is found in the denotation of t within fuel, else UNKNOWN."""
    env = _env_from(env)
    missing = free_vars(t) - {n for n, _ in env}
    if missing:
        raise OpenTerm(", ".join(sorted(missing)))
    env = tuple((n, v if isinstance(v, (Closure, PointApprox))
                 else PointApprox(web, frozenset(v))) for n, v in env)
    found = _Machine(web, width).mem(gamma, t, env, (), fuel)
    return Tri.YES if found else Tri.UNKNOWN


def escalated(fuel):
    return ESCALATION * fuel + ESCALATION_SLACK


# ---------------------------------------------------------------------------
# Separation

@dataclass(frozen=True)
class Verdict:
    kind: str
    witness: object = None
    side: str = None

    def line(self):
        if self.kind == "UNKNOWN":
            return "UNKNOWN"
        return "%s %s %s" % (self.kind, self.witness, self.side)


def Separated(witness, side):
    return Verdict("SEPARATED", witness, side)


def CandidateWitness(witness, side):
    return Verdict("CANDIDATE", witness, side)


UNKNOWN_VERDICT = Verdict("UNKNOWN")


def certified_empty(t, web, depth=DEFAULT_DEPTH, width=None):
    """Certify that t denotes the bottom point.

    Only for flat graph webs with no atom in the image of phi. Requires the
    approximants at depths depth-1 and depth to be empty at a width raised
    to cover every atom, and head reduction of t to run into a cycle.
    """
    if not getattr(web, "free_sensible", False):
        return False
    width = max(width or 0, len(tuple(web.base_tokens())))
    if depth < 1:
        return False
    if interpret(t, web, depth - 1, width) or interpret(t, web, depth, width):
        return False
    return head_cycles(t) is True


def separate(M, N, web, depth=DEFAULT_DEPTH, width=DEFAULT_WIDTH, fuel=None):
    """Look for a token in one side's approximant that the other side lacks."""
    if fuel is None:
        fuel = escalated(depth)
    sides = (("LEFT", M, N), ("RIGHT", N, M))
    approx = {id(M): interpret(M, web, depth, width),
              id(N): interpret(N, web, depth, width)}
    for side, X, Y in sides:
        sy = approx[id(Y)]
        for gamma in sorted_tokens(approx[id(X)]):
            if web.sys.entails(sy, gamma):
                continue
            if token_in_interp(gamma, Y, web, fuel, width) is Tri.YES:
                continue
            if certified_empty(Y, web, depth, width):
                return Separated(gamma, side)
            return CandidateWitness(gamma, side)
    return UNKNOWN_VERDICT
