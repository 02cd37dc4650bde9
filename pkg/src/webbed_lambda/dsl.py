"""Line-oriented text format for systems, webs, structures and completions.

One declaration per line; ``#`` starts a comment. A file without a header
line is a finite information system::

    atoms p q r
    con {p,q} {r}
    entails {p,q} |- r

Web files start with ``web KIND`` (graph, pc, krivine, eats, trivial,
ultra); structures with ``structure``; completions with ``completion``.
Nested webs (ultraproduct factors, completion inputs) sit between
``begin NAME`` and ``end`` lines.
"""

import re
from itertools import combinations

from .kernel_is import TableSystem
from .tokens import (
    NU, Arrow, Atom, Meet, Pair, Seq, parse_set, parse_token, show, show_set,
    sorted_tokens,
)


class DslError(ValueError):
    def __init__(self, msg, line=None):
        super().__init__(msg if line is None else "line %d: %s" % (line, msg))
        self.line = line


class RoundTripMismatch(ValueError):
    pass


_SET_RE = re.compile(r"\{[^{}]*(?:\{[^{}]*\}[^{}]*)*\}")


def _lines(text):
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((no, line))
    return out


def _rename(t, nu_name):
    """Map the file's name for nu onto the distinguished token."""
    if nu_name is None or nu_name == "nu":
        return t
    if isinstance(t, Atom):
        return NU if t.name == nu_name else t
    if isinstance(t, Pair):
        return Pair(_rename(t.left, nu_name), _rename(t.right, nu_name))
    if isinstance(t, Arrow):
        return Arrow(frozenset(_rename(x, nu_name) for x in t.ante),
                     _rename(t.succ, nu_name))
    if isinstance(t, Seq):
        return Seq(tuple(_rename(x, nu_name) for x in t.items))
    if isinstance(t, Meet):
        return Meet(frozenset(_rename(x, nu_name) for x in t.items))
    return t


def _tok(text, no, nu_name=None):
    try:
        return _rename(parse_token(text.strip()), nu_name)
    except ValueError as e:
        raise DslError(str(e), no) from None


def _set(text, no, nu_name=None):
    try:
        return frozenset(_rename(x, nu_name) for x in parse_set(text.strip()))
    except ValueError as e:
        raise DslError(str(e), no) from None


def _sets(text, no, nu_name=None):
    found = _SET_RE.findall(text)
    if "".join(found).replace(" ", "") != text.replace(" ", ""):
        raise DslError("expected a list of sets: %r" % text, no)
    return [_set(s, no, nu_name) for s in found]


def _split_blocks(lines):
    """Separate top-level lines from begin/end blocks (which may nest)."""
    top, blocks = [], []
    depth, name, body = 0, None, []
    for no, line in lines:
        word = line.split()[0]
        if word == "begin":
            if depth == 0:
                parts = line.split()
                if len(parts) != 2:
                    raise DslError("begin needs one name", no)
                name, body = parts[1], []
            else:
                body.append((no, line))
            depth += 1
        elif word == "end":
            depth -= 1
            if depth < 0:
                raise DslError("end without begin", no)
            if depth == 0:
                blocks.append((name, body))
            else:
                body.append((no, line))
        elif depth:
            body.append((no, line))
        else:
            top.append((no, line))
    if depth:
        raise DslError("unterminated begin block")
    return top, blocks


# ---------------------------------------------------------------------------
# Loading

def loads(text):
    lines = _lines(text)
    if not lines:
        raise DslError("empty file")
    return _load(lines)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def _load(lines):
    no, head = lines[0]
    word = head.split()
    if word[0] == "web":
        if len(word) != 2:
            raise DslError("web needs a kind", no)
        fn = _WEB_LOADERS.get(word[1])
        if fn is None:
            raise DslError("unknown web kind %r" % word[1], no)
        return fn(lines[1:])
    if word[0] == "structure":
        return _load_structure(lines[1:])
    if word[0] == "completion":
        return _load_completion(lines[1:])
    if word[0] == "system":
        lines = lines[1:]
    return _load_system(lines)


def _load_system(lines):
    atoms, nu_name, maximal, rules = [], None, None, []
    for no, line in lines:
        key, _, rest = line.partition(" ")
        if key == "nu":
            nu_name = rest.strip()
    for no, line in lines:
        key, _, rest = line.partition(" ")
        if key == "atoms":
            atoms += [_tok(x, no, nu_name) for x in rest.split()]
        elif key == "nu":
            continue
        elif key == "con":
            if rest.strip() == "all":
                maximal = None
            else:
                maximal = (maximal or []) + _sets(rest, no, nu_name)
        elif key == "entails":
            if "|-" not in rest:
                raise DslError("entails needs |-", no)
            lhs, rhs = rest.split("|-", 1)
            rules.append((_set(lhs, no, nu_name), _tok(rhs, no, nu_name)))
        else:
            raise DslError("unknown declaration %r" % key, no)
    atoms = [a for a in atoms if a is not NU]
    universe = set(atoms) | {NU}
    for prem, concl in rules:
        for t in prem | {concl}:
            if t not in universe:
                raise DslError("entailment mentions unknown token %s" % show(t))
    if maximal is not None:
        for m in maximal:
            for t in m:
                if t not in universe:
                    raise DslError("con mentions unknown token %s" % show(t))
    return TableSystem(sorted_tokens(universe), NU, maximal, rules,
                       name="table(%s)" % ",".join(show(a) for a in atoms))


def _parse_inj(rest, no):
    if "->" not in rest:
        raise DslError("inj needs ->", no)
    lhs, rhs = rest.rsplit("->", 1)
    lhs = lhs.strip()
    if not (lhs.startswith("(") and lhs.endswith(")")):
        raise DslError("inj needs ({..},tok)", no)
    inner = lhs[1:-1]
    close = inner.find("}")
    if close < 0 or "," not in inner[close:]:
        raise DslError("inj needs ({..},tok)", no)
    a = _set(inner[:close + 1], no)
    alpha = _tok(inner[close + 1:].strip().lstrip(","), no)
    return (a, alpha), _tok(rhs, no)


def _load_graph(lines):
    from .webs import graph_web
    atoms, inj = [], {}
    for no, line in lines:
        words = line.split()
        if words[:2] == ["pair", "atoms"]:
            atoms += [_tok(x, no) for x in words[2:]]
        elif words[0] == "atoms":
            atoms += [_tok(x, no) for x in words[1:]]
        elif words[0] == "inj":
            k, v = _parse_inj(line[3:], no)
            inj[k] = v
        else:
            raise DslError("unknown graph declaration %r" % words[0], no)
    if not atoms:
        raise DslError("graph web needs atoms")
    return graph_web(atoms, inj)


def _load_pc(lines, krivine=False):
    from .webs import pcs_web, krivine_web
    atoms, order, coh, inj, pairs = [], [], None, {}, "free"
    for no, line in lines:
        words = line.split()
        if words[0] == "pairs" and len(words) == 2 and words[1] in ("free", "discrete"):
            pairs = words[1]
        elif words[0] == "atoms":
            atoms += [_tok(x, no) for x in words[1:]]
        elif words[:2] == ["pc", "order"] or words[0] == "order":
            body = line.split("order", 1)[1]
            for item in body.split():
                if "<=" not in item:
                    raise DslError("order needs x<=y", no)
                x, y = item.split("<=", 1)
                order.append((_tok(x, no), _tok(y, no)))
        elif words[0] == "coh":
            coh = coh or []
            for item in words[1:]:
                if "~" not in item:
                    raise DslError("coh needs x~y", no)
                x, y = item.split("~", 1)
                coh.append((_tok(x, no), _tok(y, no)))
        elif words[0] == "inj":
            k, v = _parse_inj(line[3:], no)
            inj[k] = v
        else:
            raise DslError("unknown pc declaration %r" % words[0], no)
    if not atoms:
        raise DslError("pc web needs atoms")
    if krivine:
        if coh is not None:
            raise DslError("Krivine webs are fully coherent; drop coh lines")
        return krivine_web(atoms, order, inj, pair_order=pairs)
    return pcs_web(atoms, order, coh if coh is not None else [], inj,
                   pair_order=pairs)


def _load_eats(lines):
    from .webs import FreeEATS, TableEATS, filter_web
    elements, omega, meet, arrow, free = [], None, {}, {}, None
    for no, line in lines:
        words = line.split()
        if words[:2] == ["eats", "free"]:
            free = [_tok(x, no) for x in words[2:]]
        elif words[:2] == ["eats", "table"]:
            continue
        elif words[0] == "elements":
            elements += [_tok(x, no) for x in words[1:]]
        elif words[0] == "omega":
            omega = _tok(words[1], no)
        elif words[0] in ("meet", "arrow"):
            if len(words) != 5 or words[3] != "->":
                raise DslError("expected '%s x y -> z'" % words[0], no)
            key = (_tok(words[1], no), _tok(words[2], no))
            (meet if words[0] == "meet" else arrow)[key] = _tok(words[4], no)
        else:
            raise DslError("unknown eats declaration %r" % words[0], no)
    if free is not None:
        return filter_web(FreeEATS(free))
    if omega is None or not elements:
        raise DslError("eats table needs elements and omega")
    for x in elements:
        meet.setdefault((x, x), x)
        meet.setdefault((x, omega), x)
        meet.setdefault((omega, x), x)
    for (x, y), v in list(meet.items()):
        meet.setdefault((y, x), v)
    try:
        e = TableEATS(elements, omega, meet, arrow)
    except ValueError as err:
        raise DslError(str(err)) from None
    return filter_web(e)


def _load_trivial(lines):
    from .webs import trivial_web
    if lines:
        raise DslError("trivial web takes no declarations", lines[0][0])
    return trivial_web()


def _load_ultra(lines):
    from .ultra import principal_ultrafilter, ultraproduct_web
    top, blocks = _split_blocks(lines)
    principal = None
    for no, line in top:
        words = line.split()
        if words[0] == "principal" and len(words) == 2:
            principal = int(words[1])
        else:
            raise DslError("unknown ultra declaration %r" % words[0], no)
    factors = [_load(body) for name, body in blocks if name == "factor"]
    if principal is None or not factors:
        raise DslError("ultra needs factors and a principal index")
    U = principal_ultrafilter(range(1, len(factors) + 1), principal)
    return ultraproduct_web(factors, U)


def _load_structure(lines):
    from .fo_axioms import RelStructure
    carrier, nu, cap, C, R = None, NU, None, {}, {}
    for no, line in lines:
        key, _, rest = line.partition(" ")
        if key == "carrier":
            carrier = tuple(_tok(x, no) for x in rest.split())
        elif key == "nu":
            nu = _tok(rest, no)
        elif key == "cap":
            cap = int(rest)
        elif key == "rel":
            m = re.fullmatch(r"([CR])(\d+)\s*\((.*)\)", rest.strip())
            if not m:
                raise DslError("expected 'rel Cn (..)' or 'rel Rn (..)'", no)
            n = int(m.group(2))
            body = m.group(3).strip()
            tup = tuple(_tok(x, no) for x in _split_top(body)) if body else ()
            if len(tup) != n:
                raise DslError("arity %d but %d arguments" % (n, len(tup)), no)
            (C if m.group(1) == "C" else R).setdefault(n, set()).add(tup)
        else:
            raise DslError("unknown structure declaration %r" % key, no)
    if carrier is None or cap is None:
        raise DslError("structure needs carrier and cap")
    for n in range(1, cap + 1):
        C.setdefault(n, set())
    for n in range(1, cap + 2):
        R.setdefault(n, set())
    return RelStructure(carrier, nu, C, R, cap)


def _split_top(body):
    """Split on commas that are not nested inside brackets."""
    parts, level, cur = [], 0, []
    for ch in body:
        if ch in "({[<":
            level += 1
        elif ch in ")}]>":
            level -= 1
        if ch == "," and level == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


_WEB_LOADERS = {
    "graph": _load_graph,
    "pc": _load_pc,
    "krivine": lambda lines: _load_pc(lines, krivine=True),
    "eats": _load_eats,
    "trivial": _load_trivial,
    "ultra": _load_ultra,
}


# ---------------------------------------------------------------------------
# Dumping

def dumps(obj):
    return "\n".join(dump_lines(obj)) + "\n"


def dump(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def dump_lines(obj):
    from .completion import OmegaWeb
    from .fo_axioms import RelStructure
    from .ultra import UltraWeb
    from .webs import FilterWeb, GraphWeb, PcsWeb, TrivialWeb
    if isinstance(obj, RelStructure):
        return ["structure"] + obj.lines()
    if isinstance(obj, GraphWeb):
        out = ["web graph", "atoms " + " ".join(show(a) for a in obj.atoms)]
        return out + _inj_lines(obj.inj)
    if isinstance(obj, PcsWeb):
        return _pc_lines(obj)
    if isinstance(obj, FilterWeb):
        return _eats_lines(obj.e)
    if isinstance(obj, TrivialWeb):
        return ["web trivial"]
    if isinstance(obj, UltraWeb):
        out = ["web ultra", "principal %s" % obj.U.principal]
        for f in obj.factors:
            out += ["begin factor"] + dump_lines(f) + ["end"]
        return out
    if isinstance(obj, OmegaWeb):
        return completion_lines(obj)
    if getattr(obj, "universe", None) is not None:
        return _system_lines(obj)
    raise TypeError("no text form for %r" % type(obj).__name__)


def _inj_lines(inj):
    rows = sorted(inj.items(), key=lambda kv: (kv[0][1].key(), show_set(kv[0][0])))
    return ["inj (%s,%s) -> %s" % (show_set(a), show(al), show(v))
            for (a, al), v in rows]


def _pc_lines(w):
    s = w.sys
    atoms = s.atoms
    out = ["web krivine" if w.krivine else "web pc",
           "atoms " + " ".join(show(a) for a in atoms)]
    order = [(x, y) for x in atoms for y in atoms
             if x != y and (x, y) in s.order]
    if order:
        out.append("order " + " ".join("%s<=%s" % (show(x), show(y))
                                       for x, y in order))
    if not w.krivine:
        coh = [(x, y) for x, y in combinations(atoms, 2) if (x, y) in s.coh]
        out.append("coh " + " ".join("%s~%s" % (show(x), show(y))
                                     for x, y in coh))
    if s.pair_order != "free":
        out.append("pairs " + s.pair_order)
    return out + _inj_lines(w.inj)


def _eats_lines(e):
    from .webs import FreeEATS
    if isinstance(e, FreeEATS):
        return ["web eats", "eats free " + " ".join(show(p) for p in e.primitives)]
    out = ["web eats", "eats table",
           "elements " + " ".join(show(x) for x in e.elements),
           "omega " + show(e.omega)]
    for x in e.elements:
        for y in e.elements:
            out.append("meet %s %s -> %s" % (show(x), show(y), show(e.meet(x, y))))
    for x in e.elements:
        for y in e.elements:
            out.append("arrow %s %s -> %s" % (show(x), show(y), show(e.arrow(x, y))))
    return out


def _system_lines(sys):
    """Text form of a small finite system: maximal consistent sets and every
    entailment that is not reflexive."""
    toks = sorted_tokens(sys.universe - {sys.nu})
    if len(toks) > 12:
        raise TypeError("system too large to list (%d tokens)" % len(toks))
    out = ["atoms " + " ".join(show(t) for t in toks)]
    if sys.nu is not NU:
        out.append("nu " + show(sys.nu))
    cons = [frozenset(c) for k in range(len(toks) + 1)
            for c in combinations(toks, k) if sys.con(frozenset(c))]
    if len(cons) == 1 << len(toks):
        out.append("con all")
    else:
        maximal = [c for c in cons if not any(c < d for d in cons)]
        out.append("con " + " ".join(show_set(m) for m in maximal))
    for a in cons:
        for b in toks:
            if b not in a and sys.entails(a, b):
                out.append("entails %s |- %s" % (show_set(a), show(b)))
    return out


# ---------------------------------------------------------------------------
# Completions

def completion_lines(omega, stages=None, max_ante=1):
    """Inputs, then a stage-indexed token table and the relations on it.

    Con and entailment are listed on sets of at most two tokens from the
    stages below the last, phi on singleton antecedents over those tokens,
    psi on every listed token.
    """
    comp = omega.comp
    stages = getattr(omega, "stages", 2) if stages is None else stages
    out = ["completion", "level %d" % comp.level, "stages %d" % stages,
           "max_ante %d" % max_ante]
    for name, w in zip(("left", "right"), comp.webs):
        out += ["begin %s" % name] + dump_lines(w) + ["end"]
    out += _completion_tables(comp, stages, max_ante)
    return out


def _completion_tables(comp, stages, max_ante):
    out = []
    toks = sorted_tokens(comp.stage_tokens(stages, max_ante))
    for t in toks:
        out.append("token %d %s" % (comp.stage(t), show(t)))
    for (a, al), v in sorted(comp.phi0.items(),
                             key=lambda kv: (show_set(kv[0][0]), show(kv[0][1]))):
        out.append("phi0 %s %s -> %s" % (show_set(a), show(al), show(v)))
    inner = [t for t in toks if comp.stage(t) < stages]
    for x, y in combinations(inner, 2):
        a = frozenset([x, y])
        out.append("con %s %s" % (show_set(a), "yes" if comp.con(a) else "no"))
    for x in inner:
        for y in inner:
            if x != y and comp.entails(frozenset([x]), y):
                out.append("entails %s |- %s" % (show_set([x]), show(y)))
    for x in inner:
        for y in inner:
            a = frozenset([x])
            if comp.con(a):
                out.append("phi %s %s -> %s" % (show_set(a), show(y),
                                               show(comp.phi(a, y))))
    for t in toks:
        out.append("psi %s -> %s %s" % (show(t), show(comp.psi(1, t)),
                                        show(comp.psi(2, t))))
    return out


def _load_completion(lines):
    from .completion import complete
    top, blocks = _split_blocks(lines)
    params = {}
    tables = []
    for no, line in top:
        key = line.split()[0]
        if key in ("level", "stages", "max_ante"):
            params[key] = int(line.split()[1])
        else:
            tables.append(line)
    webs = dict((name, _load(body)) for name, body in blocks)
    if set(webs) != {"left", "right"} or set(params) != {"level", "stages",
                                                          "max_ante"}:
        raise DslError("completion needs level, stages, max_ante, left, right")
    omega = complete(webs["left"], webs["right"], params["stages"],
                     level=params["level"], max_ante=params["max_ante"])
    omega.stages = params["stages"]
    fresh = _completion_tables(omega.comp, params["stages"], params["max_ante"])
    if fresh != tables:
        diff = next((i for i, (x, y) in enumerate(zip(fresh, tables)) if x != y),
                    min(len(fresh), len(tables)))
        got = tables[diff] if diff < len(tables) else "<missing>"
        want = fresh[diff] if diff < len(fresh) else "<extra>"
        raise RoundTripMismatch("recorded %r, recomputed %r" % (got, want))
    return omega
