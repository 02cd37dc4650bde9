"""Untyped lambda terms: syntax, parsing, printing and beta reduction.

Terms are immutable trees of Var, Abs and App. Alpha-equivalence and
reduction go through a de Bruijn form, so no reduction ever captures.
"""

from dataclasses import dataclass
import re


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return show(self)


@dataclass(frozen=True)
class Abs:
    name: str
    body: object

    def __str__(self):
        return show(self)


@dataclass(frozen=True)
class App:
    fun: object
    arg: object

    def __str__(self):
        return show(self)


class ParseError(ValueError):
    def __init__(self, msg, pos):
        super().__init__("%s at position %d" % (msg, pos))
        self.pos = pos


class NoNormalForm(RuntimeError):
    pass


class IndicesNotIncreasing(ValueError):
    pass


def apps(f, *args):
    for x in args:
        f = App(f, x)
    return f


def lams(names, body):
    for n in reversed(names):
        body = Abs(n, body)
    return body


# ---------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(r"\s*(?:(?P<lam>\\|λ)|(?P<dot>\.)|(?P<lp>\()|(?P<rp>\))"
                    r"|(?P<name>[A-Za-z_][A-Za-z0-9_']*))")


def _lex(text):
    pos, out = 0, []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            out.append(("end", "", pos))
            return out
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError("unexpected character %r" % text[pos], pos)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()


class _Parser:
    def __init__(self, text):
        self.toks = _lex(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind):
        t = self.toks[self.i]
        if t[0] != kind:
            raise ParseError("expected %s, found %r" % (kind, t[1] or "end"), t[2])
        self.i += 1
        return t

    def term(self):
        if self.peek()[0] == "lam":
            self.take("lam")
            names = [self.take("name")[1]]
            while self.peek()[0] == "name":
                names.append(self.take("name")[1])
            self.take("dot")
            return lams(names, self.term())
        f = self.atom()
        while self.peek()[0] in ("name", "lp", "lam"):
            if self.peek()[0] == "lam":
                f = App(f, self.term())
            else:
                f = App(f, self.atom())
        return f

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "lp":
            self.take("lp")
            t = self.term()
            self.take("rp")
            return t
        if kind == "name":
            self.take("name")
            return CONSTANTS[val]() if val in CONSTANTS else Var(val)
        raise ParseError("expected a term, found %r" % (val or "end"), pos)


def parse(text):
    p = _Parser(text)
    t = p.term()
    p.take("end")
    return t


# ---------------------------------------------------------------------------
# Printing

def show(t):
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Abs):
        names = []
        while isinstance(t, Abs):
            names.append(t.name)
            t = t.body
        return "\\%s.%s" % (" ".join(names), show(t))
    f = show(t.fun)
    if isinstance(t.fun, Abs):
        f = "(%s)" % f
    x = show(t.arg)
    if isinstance(t.arg, (Abs, App)):
        x = "(%s)" % x
    return "%s %s" % (f, x)


# ---------------------------------------------------------------------------
# Variables

def free_vars(t):
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, Abs):
        return free_vars(t.body) - {t.name}
    return free_vars(t.fun) | free_vars(t.arg)


def is_closed(t):
    return not free_vars(t)


def term_size(t):
    if isinstance(t, Var):
        return 1
    if isinstance(t, Abs):
        return 1 + term_size(t.body)
    return 1 + term_size(t.fun) + term_size(t.arg)


# ---------------------------------------------------------------------------
# de Bruijn form: ("v", i) bound, ("f", name) free, ("l", hint, body),
# ("a", fun, arg)

def to_db(t, ctx=()):
    if isinstance(t, Var):
        for i, n in enumerate(reversed(ctx)):
            if n == t.name:
                return ("v", i)
        return ("f", t.name)
    if isinstance(t, Abs):
        return ("l", t.name, to_db(t.body, ctx + (t.name,)))
    return ("a", to_db(t.fun, ctx), to_db(t.arg, ctx))


def _strip(d):
    """Drop binder hints so structural equality is alpha-equivalence."""
    tag = d[0]
    if tag == "l":
        return ("l", _strip(d[2]))
    if tag == "a":
        return ("a", _strip(d[1]), _strip(d[2]))
    return d


def canonical(t):
    return _strip(to_db(t))


def alpha_eq(s, t):
    return canonical(s) == canonical(t)


def _db_free(d, out):
    tag = d[0]
    if tag == "f":
        out.add(d[1])
    elif tag == "l":
        _db_free(d[2], out)
    elif tag == "a":
        _db_free(d[1], out)
        _db_free(d[2], out)
    return out


def from_db(d, ctx=(), avoid=None):
    if avoid is None:
        avoid = _db_free(d, set())
    tag = d[0]
    if tag == "v":
        return Var(ctx[-1 - d[1]])
    if tag == "f":
        return Var(d[1])
    if tag == "l":
        name = d[1]
        while name in avoid or name in ctx:
            name += "'"
        return Abs(name, from_db(d[2], ctx + (name,), avoid))
    return App(from_db(d[1], ctx, avoid), from_db(d[2], ctx, avoid))


def _shift(d, by, cutoff=0):
    tag = d[0]
    if tag == "v":
        return ("v", d[1] + by) if d[1] >= cutoff else d
    if tag == "f":
        return d
    if tag == "l":
        return ("l", d[1], _shift(d[2], by, cutoff + 1))
    return ("a", _shift(d[1], by, cutoff), _shift(d[2], by, cutoff))


def _subst(d, j, s):
    tag = d[0]
    if tag == "v":
        return s if d[1] == j else d
    if tag == "f":
        return d
    if tag == "l":
        return ("l", d[1], _subst(d[2], j + 1, _shift(s, 1)))
    return ("a", _subst(d[1], j, s), _subst(d[2], j, s))


def _contract(redex):
    body, arg = redex[1][2], redex[2]
    return _shift(_subst(body, 0, _shift(arg, 1)), -1)


def _db_size(d):
    tag = d[0]
    if tag == "l":
        return 1 + _db_size(d[2])
    if tag == "a":
        return 1 + _db_size(d[1]) + _db_size(d[2])
    return 1


def _step(d):
    """One leftmost-outermost step, or None at normal form."""
    tag = d[0]
    if tag == "a":
        if d[1][0] == "l":
            return _contract(d)
        f = _step(d[1])
        if f is not None:
            return ("a", f, d[2])
        x = _step(d[2])
        if x is not None:
            return ("a", d[1], x)
        return None
    if tag == "l":
        b = _step(d[2])
        return None if b is None else ("l", d[1], b)
    return None


def _head_step(d):
    """One head-reduction step, or None at head normal form."""
    if d[0] == "l":
        b = _head_step(d[2])
        return None if b is None else ("l", d[1], b)
    if d[0] == "a":
        if d[1][0] == "l":
            return _contract(d)
        f = _head_step(d[1])
        return None if f is None else ("a", f, d[2])
    return None


def beta_step(t):
    """One leftmost-outermost beta step; None if t is normal."""
    d = _step(to_db(t))
    return None if d is None else from_db(d)


def beta_normalize(t, fuel=1000, max_size=20000):
    """Normal form by leftmost-outermost reduction within ``fuel`` steps."""
    d = to_db(t)
    for _ in range(fuel + 1):
        nxt = _step(d)
        if nxt is None:
            return from_db(d)
        if _db_size(nxt) > max_size:
            raise NoNormalForm("term grew beyond %d nodes" % max_size)
        d = nxt
    raise NoNormalForm("no normal form within %d steps" % fuel)


def beta_equal(s, t, fuel=1000):
    """True/False when both normalize within fuel, None otherwise."""
    try:
        return alpha_eq(beta_normalize(s, fuel), beta_normalize(t, fuel))
    except NoNormalForm:
        return None


def head_cycles(t, fuel=100):
    """Whether head reduction of t revisits a term.

    True on a detected cycle, False on reaching head normal form, None if
    neither happens within ``fuel`` steps.
    """
    d = to_db(t)
    seen = {_strip(d)}
    for _ in range(fuel):
        d = _head_step(d)
        if d is None:
            return False
        k = _strip(d)
        if k in seen:
            return True
        seen.add(k)
    return None


# ---------------------------------------------------------------------------
# Combinators

def I():
    return Abs("x", Var("x"))


def K():
    return lams(["x", "y"], Var("x"))


def S():
    return lams(["x", "y", "z"],
                App(App(Var("x"), Var("z")), App(Var("y"), Var("z"))))


def Omega():
    w = Abs("x", App(Var("x"), Var("x")))
    return App(w, w)


CONSTANTS = {"I": I, "K": K, "S": S, "Omega": Omega}


def projection(n):
    """The n-ary projection onto the last argument."""
    if n < 1:
        raise ValueError("projection needs n >= 1")
    names = ["x%d" % i for i in range(1, n + 1)]
    return lams(names, Var(names[-1]))


PADDING_READINGS = ("literal", "corrected", "discarding")


def easy_padding(indices, terms, reading="discarding"):
    """The term Z with Z applied to the n_i-th projection reducing to N_i.

    ``terms`` maps each index to its closed term. Readings:

    literal      Z_{m+1} = Z_m I...I N_{n_m}
    corrected    Z_{m+1} = Z_m I...I N_{n_{m+1}}
    discarding   as corrected, with each N_i wrapped in as many dummy
                 abstractions as there are arguments after it
    """
    if reading not in PADDING_READINGS:
        raise ValueError(reading)
    indices = list(indices)
    if not indices or any(a >= b for a, b in zip(indices, indices[1:])) \
            or indices[0] < 1:
        raise IndicesNotIncreasing(indices)
    if isinstance(terms, dict):
        terms = [terms[n] for n in indices]
    terms = list(terms)
    last = indices[-1]

    def arg(m):
        if reading == "literal":
            n = indices[max(m - 1, 0)]
            t = terms[max(m - 1, 0)]
        else:
            n, t = indices[m], terms[m]
        if reading == "discarding":
            used = free_vars(t)
            dummies = []
            k = 0
            while len(dummies) < last - n:
                z = "z%d" % k
                k += 1
                if z not in used:
                    dummies.append(z)
            t = lams(dummies, t)
        return t

    z = Var("y")
    prev = 0
    for m, n in enumerate(indices):
        z = apps(z, *([I()] * (n - prev - 1)))
        z = App(z, arg(m))
        prev = n
    return Abs("y", z)
