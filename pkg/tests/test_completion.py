from itertools import combinations, product

import pytest

from webbed_lambda.completion import (
    STAGE_CAP_ENV, Completion, NotAToken, StageCapExceeded, check_clause2_closure,
    complete, hard_cap_from_env, partial_product, product_phi, transport_check,
    validate_step,
)
from webbed_lambda.interp import apply_generators, interpret, separate, token_in_interp
from webbed_lambda.kernel_is import Tri
from webbed_lambda.lambda_syntax import I, K, Omega, S
from webbed_lambda.tokens import NU, Arrow, Atom, Pair
from webbed_lambda.webs import graph_web, subsets

ZERO = Atom("0")
NN = Pair(NU, NU)
L0 = Pair(ZERO, NU)
R0 = Pair(NU, ZERO)


@pytest.fixture(scope="module")
def comp():
    return Completion(graph_web(["0"]), graph_web(["0"]), 0)


@pytest.fixture(scope="module")
def omega():
    return complete(graph_web(["0"]), graph_web(["0"]), 2)


def s_clause_tokens(web, pool):
    """Tokens phi(a, phi(b, phi(c, d))) with d in (a.c).(b.c), singletons from pool."""
    out = set()
    for x, y, z in product(pool, repeat=3):
        a, b, c = frozenset([x]), frozenset([y]), frozenset([z])
        ac = apply_generators(web, a, c)
        bc = apply_generators(web, b, c)
        for d in apply_generators(web, ac, bc):
            out.add(web.phi(a, web.phi(b, web.phi(c, d))))
    return out


# ---------------------------------------------------------------------------
# The partial product

def test_product_phi_cases():
    A = graph_web(["0"])
    assert product_phi(A, A, frozenset([NN]), NN) == NN
    assert product_phi(A, A, frozenset(), NN) == NN
    assert product_phi(A, A, frozenset([R0]), R0) == Pair(NU, Arrow(frozenset([ZERO]), ZERO))
    assert product_phi(A, A, frozenset([L0]), NN) == NN
    assert product_phi(A, A, frozenset([L0, R0]), R0) is None


def test_partial_product_projections():
    web, fst, snd = partial_product(graph_web(["0"]), graph_web(["0"]))
    assert fst(L0) == ZERO and snd(L0) == NU
    assert web.sys.con(frozenset([L0, R0]))
    assert web.phi(frozenset([L0, R0]), L0) is None


def test_stage_zero(comp):
    assert comp.stage_tokens(0) == {L0, R0, NN}


def test_stage_one_count_matches_direct_enumeration(comp):
    s0 = [L0, R0, NN]
    pairs = [(frozenset(c), al) for k in range(4) for c in combinations(s0, k)
             for al in s0]

    def in_dom(a, al):
        # phi stays inside stage 0 only when it returns (nu, nu)
        if al != NN:
            return False
        toks = a | {al}
        return all(t.left == NU for t in toks) or all(t.right == NU for t in toks)

    outside = [p for p in pairs if not in_dom(*p)]
    assert len(s0) + len(outside) == 21
    assert len(comp.stage_tokens(1)) == 21


def test_stage_counts_with_singleton_antecedents(comp):
    assert [len(comp.stage_tokens(n, 1)) for n in range(3)] == [3, 11, 131]


def test_stage_resolution(comp):
    t = Arrow(frozenset([L0]), R0)
    assert comp.stage(t) == 1
    assert comp.stage(Arrow(frozenset([t]), L0)) == 2
    with pytest.raises(NotAToken):
        comp.stage(Arrow(frozenset(), NN))  # phi already defined there
    with pytest.raises(NotAToken):
        comp.stage(Atom("0"))


def test_step_zero_validates(comp):
    rep = validate_step(comp, 0)
    assert rep.ok, rep.lines()
    assert rep.exhaustive


def test_clause2_closure_stage_one(comp):
    witness, checked = check_clause2_closure(comp, 0)
    assert witness is None
    assert checked > 100


def test_phi_identity_on_formal_pairs(comp):
    for a in subsets(sorted(comp.base, key=lambda t: t.key())):
        for al in comp.base:
            if (a, al) not in comp.phi0:
                assert comp.phi_at(1, a, al) == Arrow(a, al)
                assert comp.phi_at(0, a, al) is None


def test_psi_extension(comp):
    A1, A2 = comp.webs
    for t in comp.stage_tokens(1) - comp.base:
        b, beta = t.ante, t.succ
        assert comp.psi(1, t) == A1.phi(frozenset(x.left for x in b), beta.left)
        assert comp.psi(2, t) == A2.phi(frozenset(x.right for x in b), beta.right)


def test_con_restricts_along_stages(comp):
    for x in subsets(sorted(comp.base, key=lambda t: t.key())):
        assert comp.con_at(0, x) == comp.con_at(1, x) == comp.con_at(2, x)


def test_omega_phi_is_total(omega):
    comp = omega.comp
    for t in comp.stage_tokens(1, 1):
        for a in ([], [t]):
            assert omega.phi(frozenset(a), t) is not None


# ---------------------------------------------------------------------------
# Stage cap

def test_stage_cap_from_env(monkeypatch):
    monkeypatch.setenv(STAGE_CAP_ENV, "1")
    assert hard_cap_from_env() == 1
    with pytest.raises(StageCapExceeded):
        complete(graph_web(["0"]), graph_web(["0"]), 2)
    comp = Completion(graph_web(["0"]), graph_web(["0"]))
    deep = Arrow(frozenset([Arrow(frozenset([L0]), R0)]), L0)
    with pytest.raises(StageCapExceeded):
        comp.stage(deep)


def test_stage_cap_env_rejects_zero(monkeypatch):
    monkeypatch.setenv(STAGE_CAP_ENV, "0")
    with pytest.raises(ValueError):
        hard_cap_from_env()


def test_complete_needs_a_stage():
    with pytest.raises(ValueError):
        complete(graph_web(["0"]), graph_web(["0"]), 0)


def test_complete_with_validation():
    om = complete(graph_web(["0"]), graph_web(["0"]), 1, validate=True)
    assert om.stages == 1


# ---------------------------------------------------------------------------
# Transport

@pytest.mark.parametrize("term", [I(), K()], ids=["I", "K"])
def test_transport_of_found_tokens(omega, term):
    toks = interpret(term, omega, 3, 2)
    assert toks
    for gamma in toks:
        for i in (1, 2):
            assert transport_check(omega, term, gamma, i, fuel=3, max_fuel=5) <= 5


def test_transport_of_s_clause_tokens(omega):
    base = [L0, R0]
    arrows = [Arrow(frozenset([u]), v) for u in base for v in base]
    curried = [Arrow(frozenset([u]), Arrow(frozenset([v]), w))
               for u in base for v in base for w in base]
    toks = s_clause_tokens(omega, base + arrows + curried)
    assert len(toks) == 8
    for gamma in toks:
        assert token_in_interp(gamma, S(), omega, 9) is Tri.YES
        for i in (1, 2):
            transport_check(omega, S(), gamma, i, fuel=9, max_fuel=11)


def test_transport_needs_a_found_token(omega):
    with pytest.raises(ValueError):
        transport_check(omega, I(), L0, 1)


def test_separation_witness_lifts():
    A1 = graph_web(["0"])
    om = complete(A1, graph_web(["0"]), 2, level=1)
    v = separate(I(), Omega(), A1, 4, 2)
    gamma = Pair(v.witness, NU)
    assert gamma in interpret(I(), om, 2, 1)
    assert transport_check(om, I(), gamma, 1, fuel=2) <= 4
    assert om.psi(1, gamma) == v.witness
