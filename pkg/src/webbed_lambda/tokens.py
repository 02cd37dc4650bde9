"""Tokens of webs and their canonical text syntax.

Every web in this package draws its tokens from five shapes:

    Atom(name)            user atoms of a web
    NU                    the distinguished token entailed by the empty set
    Pair(left, right)     tokens of a product system, one side is always nu
    Arrow(ante, succ)     exponential tokens and formal pairs of free webs
    Seq(items)            representatives of ultraproduct classes
    Meet(items)           finite meets of basic types in a free type structure

Tokens are totally ordered by a structural key (shape first, then the
fields recursively), so a consistent set can always be printed and compared
in one canonical order.

Text syntax::

    nu | name | (t,t) | <{t,...}->t> | [t|t|...] | (t&t&...)
"""

from dataclasses import dataclass, field
from functools import total_ordering
import re


@total_ordering
class Token:
    __slots__ = ()

    def key(self):
        raise NotImplementedError

    def __lt__(self, other):
        if not isinstance(other, Token):
            return NotImplemented
        return self.key() < other.key()

    def __str__(self):
        return show(self)


@dataclass(frozen=True, eq=True)
class Atom(Token):
    name: str

    def key(self):
        return (0, self.name)


class _Nu(Token):
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def key(self):
        return (1,)

    def __repr__(self):
        return "NU"

    def __reduce__(self):
        return (_Nu, ())


NU = _Nu()


@dataclass(frozen=True, eq=True)
class Pair(Token):
    left: Token
    right: Token
    _key: tuple = field(default=None, compare=False, repr=False, hash=False)
    _hash: int = field(default=None, compare=False, repr=False, hash=False)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(('Pair', (self.left, self.right)))
            object.__setattr__(self, "_hash", h)
        return h

    def key(self):
        k = self._key
        if k is None:
            k = (2, self.left.key(), self.right.key())
            object.__setattr__(self, "_key", k)
        return k


@dataclass(frozen=True, eq=True)
class Arrow(Token):
    ante: frozenset
    succ: Token
    _key: tuple = field(default=None, compare=False, repr=False, hash=False)
    _hash: int = field(default=None, compare=False, repr=False, hash=False)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(('Arrow', (self.ante, self.succ)))
            object.__setattr__(self, "_hash", h)
        return h

    def __post_init__(self):
        if not isinstance(self.ante, frozenset):
            object.__setattr__(self, "ante", frozenset(self.ante))

    def key(self):
        k = self._key
        if k is None:
            k = (3, conset_key(self.ante), self.succ.key())
            object.__setattr__(self, "_key", k)
        return k


@dataclass(frozen=True, eq=True)
class Seq(Token):
    items: tuple
    _key: tuple = field(default=None, compare=False, repr=False, hash=False)
    _hash: int = field(default=None, compare=False, repr=False, hash=False)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(('Seq', self.items))
            object.__setattr__(self, "_hash", h)
        return h

    def key(self):
        k = self._key
        if k is None:
            k = (4, tuple(t.key() for t in self.items))
            object.__setattr__(self, "_key", k)
        return k


@dataclass(frozen=True, eq=True)
class Meet(Token):
    items: frozenset
    _key: tuple = field(default=None, compare=False, repr=False, hash=False)
    _hash: int = field(default=None, compare=False, repr=False, hash=False)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(('Meet', self.items))
            object.__setattr__(self, "_hash", h)
        return h

    def __post_init__(self):
        if not isinstance(self.items, frozenset):
            object.__setattr__(self, "items", frozenset(self.items))

    def key(self):
        k = self._key
        if k is None:
            k = (5, conset_key(self.items))
            object.__setattr__(self, "_key", k)
        return k


def conset_key(a):
    return tuple(sorted(t.key() for t in a))


def sorted_tokens(a):
    return sorted(a, key=lambda t: t.key())


def depth(t):
    """Nesting depth of Arrow constructors inside a token."""
    if isinstance(t, Arrow):
        return 1 + max([depth(t.succ)] + [depth(x) for x in t.ante])
    if isinstance(t, Pair):
        return max(depth(t.left), depth(t.right))
    if isinstance(t, (Seq, Meet)):
        return max((depth(x) for x in t.items), default=0)
    return 0


def size(t):
    if isinstance(t, Arrow):
        return 1 + size(t.succ) + sum(size(x) for x in t.ante)
    if isinstance(t, Pair):
        return 1 + size(t.left) + size(t.right)
    if isinstance(t, (Seq, Meet)):
        return 1 + sum(size(x) for x in t.items)
    return 1


# ---------------------------------------------------------------------------
# Printing and parsing

def show(t):
    if t is NU:
        return "nu"
    if isinstance(t, Atom):
        return t.name
    if isinstance(t, Pair):
        return "(%s,%s)" % (show(t.left), show(t.right))
    if isinstance(t, Arrow):
        return "<%s->%s>" % (show_set(t.ante), show(t.succ))
    if isinstance(t, Seq):
        return "[%s]" % "|".join(show(x) for x in t.items)
    if isinstance(t, Meet):
        return "(%s)" % "&".join(show(x) for x in sorted_tokens(t.items))
    raise TypeError("not a token: %r" % (t,))


def show_set(a):
    return "{%s}" % ",".join(show(t) for t in sorted_tokens(a))


_NAME = re.compile(r"[A-Za-z0-9_']+")


class TokenSyntaxError(ValueError):
    pass


class _Reader:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, s):
        self.skip()
        if not self.text.startswith(s, self.pos):
            raise TokenSyntaxError(
                "expected %r at %d in %r" % (s, self.pos, self.text))
        self.pos += len(s)

    def token(self):
        c = self.peek()
        if c == "<":
            self.expect("<")
            ante = self.conset()
            self.expect("->")
            succ = self.token()
            self.expect(">")
            return Arrow(ante, succ)
        if c == "(":
            self.expect("(")
            left = self.token()
            if self.peek() == "&":
                items = [left]
                while self.peek() == "&":
                    self.expect("&")
                    items.append(self.token())
                self.expect(")")
                return Meet(frozenset(items))
            self.expect(",")
            right = self.token()
            self.expect(")")
            return Pair(left, right)
        if c == "[":
            self.expect("[")
            items = [self.token()]
            while self.peek() == "|":
                self.expect("|")
                items.append(self.token())
            self.expect("]")
            return Seq(tuple(items))
        m = _NAME.match(self.text, self.pos)
        if not m:
            raise TokenSyntaxError(
                "bad token at %d in %r" % (self.pos, self.text))
        self.pos = m.end()
        name = m.group()
        return NU if name == "nu" else Atom(name)

    def conset(self):
        self.expect("{")
        items = []
        if self.peek() != "}":
            items.append(self.token())
            while self.peek() == ",":
                self.expect(",")
                items.append(self.token())
        self.expect("}")
        return frozenset(items)

    def done(self):
        self.skip()
        if self.pos != len(self.text):
            raise TokenSyntaxError(
                "trailing input at %d in %r" % (self.pos, self.text))


def parse_token(text):
    r = _Reader(text)
    t = r.token()
    r.done()
    return t


def parse_set(text):
    r = _Reader(text)
    a = r.conset()
    r.done()
    return a
