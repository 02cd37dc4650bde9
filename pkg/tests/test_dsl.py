import pytest

from webbed_lambda.completion import complete
from webbed_lambda.dsl import DslError, RoundTripMismatch, dump, dumps, load, loads
from webbed_lambda.fo_axioms import encode
from webbed_lambda.kernel_is import flat_system
from webbed_lambda.tokens import NU, Arrow, Atom
from webbed_lambda.ultra import UltraWeb, principal_ultrafilter
from webbed_lambda.webs import (
    FreeEATS, TableEATS, filter_web, graph_web, krivine_web, pcs_web, trivial_web,
)

P, Q, R = Atom("p"), Atom("q"), Atom("r")


def same_slice(a, b, level=1):
    """Two webs agree on tokens, con and phi over a level slice."""
    ta, tb = a.sys.enumerate(level), b.sys.enumerate(level)
    assert ta == tb
    toks = sorted(ta, key=lambda t: t.key())
    for x in toks:
        for y in toks:
            s = frozenset([x, y])
            assert a.sys.con(s) == b.sys.con(s)
            assert a.sys.entails(frozenset([x]), y) == b.sys.entails(frozenset([x]), y)
            if a.sys.con(frozenset([x])):
                assert a.phi(frozenset([x]), y) == b.phi(frozenset([x]), y)


def webs():
    w = Atom("w")
    table = TableEATS([w], w, {(w, w): w}, {(w, w): w})
    return {
        "graph": graph_web(["0"]),
        "graph_inj": graph_web(["x"], inj={(("x",), "x"): "x"}),
        "pc": pcs_web(["p", "q", "r"], order=[("p", "q")], coh=[("p", "q")]),
        "pc_discrete": pcs_web(["p"], pair_order="discrete"),
        "krivine": krivine_web(["p", "q"], order=[("p", "q")]),
        "eats_free": filter_web(FreeEATS(["p"])),
        "eats_table": filter_web(table),
        "trivial": trivial_web(),
        "ultra": UltraWeb((graph_web(["0"]), graph_web(["1"])),
                          principal_ultrafilter((1, 2), 2)),
    }


@pytest.mark.parametrize("kind", sorted(webs()))
def test_web_round_trip(kind):
    w = webs()[kind]
    text = dumps(w)
    back = loads(text)
    assert dumps(back) == text
    same_slice(w, back)


def test_system_round_trip():
    text = "atoms p q r\ncon {p,q} {r}\nentails {p} |- q\n"
    s = loads(text)
    assert s.con(frozenset([P, Q])) and not s.con(frozenset([P, R]))
    assert s.entails(frozenset([P]), Q)
    assert not s.entails(frozenset([Q]), P)
    assert loads(dumps(s)).con(frozenset([Q, R])) is False
    assert dumps(loads(dumps(s))) == dumps(s)


def test_system_with_named_nu():
    s = loads("system\natoms p bot\nnu bot\ncon all\n")
    assert s.universe == {P, NU}
    assert s.entails(frozenset(), NU)


def test_flat_system_dump():
    text = dumps(flat_system(["p", "q"]))
    assert "con all" in text
    back = loads(text)
    assert back.con(frozenset([P, Q]))


def test_structure_round_trip():
    S = encode(flat_system(["p"]))
    back = loads(dumps(S))
    assert back.lines() == S.lines()


def test_file_io(tmp_path):
    path = tmp_path / "g.web"
    dump(graph_web(["0"]), path)
    assert dumps(load(path)) == dumps(graph_web(["0"]))


def test_comments_and_blank_lines():
    w = loads("# a web\n\nweb graph   # header\natoms 0\n")
    assert w.sys.has_token(Arrow(frozenset([Atom("0")]), Atom("0")))


@pytest.mark.parametrize("text,line", [
    ("", None),
    ("web\n", 1),
    ("web bogus\n", 1),
    ("web graph\nfoo 1\n", 2),
    ("web graph\n", None),
    ("atoms p\nentails {p} q\n", 2),
    ("atoms p\nentails {p} |- z\n", None),
    ("atoms p\ncon {z}\n", None),
    ("atoms p\nfrobnicate\n", 2),
    ("web graph\natoms 0\ninj {0} -> 0\n", 3),
    ("web trivial\natoms p\n", 2),
    ("web krivine\natoms p q\ncoh p~q\n", None),
    ("web pc\natoms p\norder p\n", 3),
    ("web ultra\nbegin factor\nweb graph\natoms 0\nend\n", None),
    ("web ultra\nprincipal 1\nbegin factor\nweb graph\natoms 0\n", None),
    ("web ultra\nend\n", 2),
    ("structure\ncarrier nu p\ncap 1\nrel C2 (p)\n", 4),
    ("structure\ncarrier nu p\n", None),
])
def test_errors(text, line):
    with pytest.raises(DslError) as err:
        loads(text)
    assert err.value.line == line


# ---------------------------------------------------------------------------
# Completions

@pytest.fixture(scope="module")
def omega_text():
    return dumps(complete(graph_web(["0"]), graph_web(["0"]), 1))


def test_completion_round_trip(omega_text):
    om = loads(omega_text)
    assert dumps(om) == omega_text
    assert om.stages == 1


def test_completion_tamper_detected(omega_text):
    lines = omega_text.splitlines()
    idx = next(i for i, l in enumerate(lines) if l.startswith("con "))
    flipped = lines[idx].replace(" yes", " no") if lines[idx].endswith("yes") \
        else lines[idx].replace(" no", " yes")
    tampered = "\n".join(lines[:idx] + [flipped] + lines[idx + 1:])
    with pytest.raises(RoundTripMismatch):
        loads(tampered)


def test_completion_missing_line_detected(omega_text):
    lines = omega_text.splitlines()
    with pytest.raises(RoundTripMismatch):
        loads("\n".join(lines[:-1]))


def test_completion_needs_parameters():
    with pytest.raises(DslError):
        loads("completion\nlevel 0\n")
