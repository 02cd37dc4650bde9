"""Seeded generation of closed lambda terms and beta-related term pairs."""

from dataclasses import dataclass
import random

from .lambda_syntax import (
    Abs, App, Var, I, K, S, NoNormalForm, alpha_eq, beta_normalize,
    from_db, parse, to_db, _contract, free_vars,
)

EQUAL = "EQUAL"
UNLABELED = "UNLABELED"
ORACLE_FUEL = 200
MAX_CORPUS = 10 ** 4


@dataclass(frozen=True)
class TermPair:
    left: object
    right: object
    label: str


def random_term(rng, size=8, scope=(), names="xyzuvw"):
    """A random term with about ``size`` nodes over the variables in scope."""
    if size <= 1 or (scope and rng.random() < 0.15):
        if scope and rng.random() < 0.7:
            return Var(rng.choice(scope))
        return rng.choice((I, K, S))()
    r = rng.random()
    if r < 0.4 or not scope:
        n = names[len(scope) % len(names)]
        if n in scope:
            n = "%s%d" % (n, len(scope))
        return Abs(n, random_term(rng, size - 1, scope + (n,), names))
    split = rng.randint(1, size - 2) if size > 2 else 1
    return App(random_term(rng, split, scope, names),
               random_term(rng, size - 1 - split, scope, names))


def random_closed_term(rng, size=8):
    t = random_term(rng, size)
    assert not free_vars(t)
    return t


def _redexes(d, path=()):
    tag = d[0]
    if tag == "a":
        if d[1][0] == "l":
            yield path
        yield from _redexes(d[1], path + (1,))
        yield from _redexes(d[2], path + (2,))
    elif tag == "l":
        yield from _redexes(d[2], path + (2,))


def _at(d, path):
    for i in path:
        d = d[i]
    return d


def _replace(d, path, new):
    if not path:
        return new
    i = path[0]
    parts = list(d)
    parts[i] = _replace(d[i], path[1:], new)
    return tuple(parts)


def random_reduct(rng, t, steps=1):
    """Contract ``steps`` randomly chosen redexes (fewer if t gets normal)."""
    d = to_db(t)
    for _ in range(steps):
        spots = list(_redexes(d))
        if not spots:
            break
        p = rng.choice(spots)
        d = _replace(d, p, _contract(_at(d, p)))
    return from_db(d)


def random_expansion(rng, t):
    """A beta-expansion of t: wrap a random subterm in I or in K _ R."""
    d = to_db(t)
    spots = [()]
    stack = [((), d)]
    while stack:
        p, x = stack.pop()
        if x[0] == "l":
            spots.append(p + (2,))
            stack.append((p + (2,), x[2]))
        elif x[0] == "a":
            for i in (1, 2):
                spots.append(p + (i,))
                stack.append((p + (i,), x[i]))
    p = rng.choice(spots)
    sub = _at(d, p)
    if rng.random() < 0.5:
        new = ("a", to_db(I()), sub)
    else:
        junk = to_db(random_closed_term(rng, 3))
        new = ("a", ("a", to_db(K()), sub), junk)
    return from_db(_replace(d, p, new))


def oracle_label(m, n, fuel=ORACLE_FUEL):
    try:
        same = alpha_eq(beta_normalize(m, fuel), beta_normalize(n, fuel))
    except NoNormalForm:
        return UNLABELED
    return EQUAL if same else UNLABELED


def corpus(seed, size, term_size=8):
    """Deterministic list of beta-related pairs with oracle labels."""
    if size > MAX_CORPUS:
        raise ValueError("corpus size capped at %d" % MAX_CORPUS)
    rng = random.Random(seed)
    out = [TermPair(parse("(\\x.x) K"), K(), EQUAL)][:size]
    while len(out) < size:
        m = random_closed_term(rng, rng.randint(3, term_size))
        if rng.random() < 0.5:
            n = random_reduct(rng, m, rng.randint(1, 3))
        else:
            n = random_expansion(rng, m)
        out.append(TermPair(m, n, oracle_label(m, n)))
    return out


def equal_pairs(seed, count, term_size=8):
    """The first ``count`` EQUAL pairs of the seeded stream."""
    rng = random.Random(seed)
    out = []
    for p in corpus(seed, 1):
        out.append(p)
    while len(out) < count:
        m = random_closed_term(rng, rng.randint(3, term_size))
        n = random_reduct(rng, m, rng.randint(1, 3)) if rng.random() < 0.5 \
            else random_expansion(rng, m)
        if oracle_label(m, n) == EQUAL:
            out.append(TermPair(m, n, EQUAL))
    return out


def corpus_terms(seed, count, term_size=8):
    rng = random.Random(seed)
    return [random_closed_term(rng, rng.randint(3, term_size))
            for _ in range(count)]
