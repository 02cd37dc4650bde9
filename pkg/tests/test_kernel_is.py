from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from webbed_lambda.kernel_is import (
    ApproxRelation, BudgetExceeded, FiniteSystem, InconsistentSet, NotBMorphism,
    TableSystem, TokenMap, Tri, all_points, check_approximable, check_is_axioms,
    check_morphism, closure, compose_approximable, empty_relation, exponential,
    flat_system, identity_map, identity_relation, product, restrict,
    retraction_pair, terminal,
)
from webbed_lambda.tokens import NU, Arrow, Atom, Pair, sorted_tokens

from mutants import drop_reflexive, drop_unit, inconsistent_singleton

p, q, r = Atom("p"), Atom("q"), Atom("r")


def fs(*xs):
    return frozenset(xs)


# -- axioms -----------------------------------------------------------------

def test_flat_system_passes_every_axiom(f3):
    rep = check_is_axioms(f3)
    assert rep.ok and rep.exhaustive
    assert [r.name for r in rep.results] == ["CON", "I1", "I2", "I3", "I4"]


def test_dropping_unit_fails_only_i4(f3):
    rep = check_is_axioms(drop_unit(f3))
    assert rep.failed() == ["I4"]
    assert rep["I4"].witness == "{}|/-nu"


def test_con_without_singletons_fails():
    sys = FiniteSystem([NU, p], con=lambda a: not a, entails=lambda a, x: x is NU)
    assert "CON" in check_is_axioms(sys).failed()


def test_report_lines(f3):
    lines = check_is_axioms(drop_unit(f3)).lines()
    assert lines[0] == "AXIOM CON PASS"
    assert lines[-1] == "AXIOM I4 FAIL witness={}|/-nu"


def test_reflexivity_mutation_caught(f3):
    m, t = drop_reflexive(f3, seed=3)
    assert "I2" in check_is_axioms(m).failed()


def test_singleton_mutation_caught(f3):
    m, t = inconsistent_singleton(f3, seed=5)
    assert "CON" in check_is_axioms(m).failed()


def test_transitivity_failure_found():
    sys = FiniteSystem([NU, p, q, r], con=lambda a: True,
                       entails=lambda a, x: x is NU or x in a
                       or (x == q and p in a) or (x == r and q in a))
    assert check_is_axioms(sys).failed() == ["I3"]


def test_entailing_an_inconsistent_extension_fails_i1():
    sys = TableSystem([NU, p, q, r], maximal=[fs(p, q), fs(r)],
                      rules=[(fs(p, q), r)])
    assert "I1" in check_is_axioms(sys).failed()


def test_budget_exceeded_on_huge_family():
    sys = flat_system(["a%d" % i for i in range(20)])
    with pytest.raises(BudgetExceeded):
        check_is_axioms(sys, max_sets=1000)


# -- closure and points -----------------------------------------------------

def test_closure_of_atom(f3):
    x = closure(f3, {p})
    assert x.extension() == fs(p, NU)
    assert [t in x for t in (p, q, NU)] == [True, False, True]


def test_closure_of_empty_contains_nu(f3):
    assert NU in closure(f3, ())
    assert closure(terminal(), ()).extension() == fs(NU)


def test_closure_rejects_inconsistent():
    sys = TableSystem([NU, p, q], maximal=[fs(p), fs(q)])
    with pytest.raises(InconsistentSet):
        closure(sys, {p, q})


def test_closure_idempotent_and_monotone(f3):
    toks = sorted_tokens(f3.universe)
    sets = [fs(*c) for k in range(4) for c in combinations(toks, k)]
    for a in sets:
        x = closure(f3, a)
        again = closure(f3, x.extension())
        assert again.extension() == x.extension()
        assert a <= x.extension()
        for b in sets:
            if a <= b:
                assert x.extension() <= closure(f3, b).extension()


def test_points_of_flat_system(f3):
    # the points are the subsets containing nu: {nu}, {p,nu}, {q,nu}, {p,q,nu}
    assert len(all_points(f3)) == 4


# -- product, exponential, terminal -------------------------------------------

def test_product_nu_and_tokens(f3):
    P = product(f3, f3)
    assert P.nu == Pair(NU, NU)
    assert len(P.universe) == 5
    assert check_is_axioms(P).ok


def test_product_con_componentwise(f3):
    P = product(f3, f3)
    assert P.con({Pair(p, NU), Pair(NU, q)})
    T = TableSystem([NU, p, q], maximal=[fs(p), fs(q)])
    P2 = product(T, f3)
    assert not P2.con({Pair(p, NU), Pair(q, NU)})
    assert P2.con({Pair(p, NU), Pair(NU, q)})


def test_terminal_product_single_token():
    P = product(terminal(), terminal())
    assert P.universe == fs(Pair(NU, NU))
    assert check_is_axioms(terminal()).ok


def test_exponential_nu_and_rules(f3):
    E = exponential(f3, f3)
    assert E.nu == Arrow(frozenset(), NU)
    assert E.entails({Arrow(fs(p), q)}, Arrow(fs(p, NU), q))
    assert E.con({Arrow(fs(p), p), Arrow(fs(p), q)})
    assert not E.entails({Arrow(fs(p), q)}, Arrow(fs(q), q))


def test_exponential_inconsistency_from_target():
    T = TableSystem([NU, p, q], maximal=[fs(p), fs(q)])
    E = exponential(T, T)
    assert not E.con({Arrow(fs(p), p), Arrow(fs(p), q)})
    # antecedents that are jointly inconsistent never fire together
    assert E.con({Arrow(fs(p), p), Arrow(fs(q), q)})


def test_exponential_level_one_exhaustive(f3):
    E = exponential(flat_system(["p"]), flat_system(["p"]))
    toks = E.enumerate(1)
    assert check_is_axioms(restrict(E, toks)).ok


def test_exponential_subset_cap(f3):
    E = exponential(f3, f3, subset_cap=2)
    big = {Arrow(fs(p), p), Arrow(fs(q), q), Arrow(fs(), NU)}
    with pytest.raises(BudgetExceeded):
        E.con(big)


# -- approximable relations ---------------------------------------------------

def test_identity_relation_is_approximable(f3):
    assert check_approximable(identity_relation(f3)).ok


def test_composition_with_identity(f3):
    idr = identity_relation(f3)
    S = ApproxRelation(f3, f3, lambda a, b: b is NU or (b == q and p in a))
    assert check_approximable(S).ok
    assert compose_approximable(idr, S).table() == S.table()
    assert compose_approximable(S, idr).table() == S.table()
    assert compose_approximable(idr, idr).table() == idr.table()


def test_empty_relation_composition(f3):
    # a R {} holds vacuously, so the composite keeps exactly what {} entails
    e = empty_relation(f3, f3)
    comp = compose_approximable(e, identity_relation(f3)).table()
    assert comp and all(g is NU for _, g in comp)
    assert check_approximable(e).failed() == ["AR2"]


def test_relation_to_inconsistent_set_fails_ar1(f3):
    T = TableSystem([NU, p, q], maximal=[fs(p), fs(q)])
    R = ApproxRelation(f3, T, lambda a, b: b in (p, q, NU))
    assert check_approximable(R).failed()[0] == "AR1"


def test_composition_unknown_on_infinite_middle(g1, f3):
    # the middle system is infinite; a miss is reported as UNKNOWN
    R = ApproxRelation(f3, g1.sys, lambda a, b: b is NU)
    S = ApproxRelation(g1.sys, f3, lambda b, c: c == p and any(
        isinstance(t, Arrow) for t in b))
    assert compose_approximable(R, S).query(fs(), p) is Tri.UNKNOWN


# -- morphisms and retraction pairs ---------------------------------------------

def test_identity_map_is_every_morphism(f3):
    for kind in ("Mo", "bMo", "fMo"):
        assert check_morphism(identity_map(f3), kind).ok


def test_first_projection_is_forward(f3):
    P = product(f3, f3)
    f = TokenMap(P, f3, lambda t: t.left)
    assert check_morphism(f, "fMo").ok


def test_collapsing_map_fails_mo():
    T = TableSystem([NU, p, q], maximal=[fs(p), fs(q)])
    f = TokenMap(T, T, lambda t: p if t == q else t)
    assert check_morphism(f, "Mo").failed() == ["Mo"]


def test_retraction_pair_of_left_injection(f3):
    P = product(f3, f3)
    f = TokenMap(f3, P, lambda t: Pair(t, NU))
    lower, upper = retraction_pair(f)
    x = closure(f3, {p})
    assert lower(upper(x)).extension() == fs(p, NU)


def test_retraction_pair_needs_b_morphism(f3):
    P = product(f3, f3)
    f = TokenMap(P, f3, lambda t: t.left)
    with pytest.raises(NotBMorphism):
        retraction_pair(f)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from(["a", "b", "c", "d"]), min_size=1, max_size=4,
                unique=True),
       st.data())
def test_closure_union_of_finite_parts(atoms, data):
    sys = flat_system(atoms)
    toks = sorted_tokens(sys.universe)
    x = fs(*data.draw(st.lists(st.sampled_from(toks), unique=True)))
    whole = closure(sys, x).extension()
    parts = set()
    for k in range(len(x) + 1):
        for c in combinations(sorted_tokens(x), k):
            parts |= closure(sys, c).extension()
    assert whole == parts
