import random
from itertools import combinations

import pytest

from webbed_lambda.corpus import corpus, corpus_terms
from webbed_lambda.interp import PointApprox, apply_points, interpret
from webbed_lambda.lambda_syntax import I, K, Omega, S, parse
from webbed_lambda.tokens import NU, Arrow, Atom, Seq, sorted_tokens
from webbed_lambda.ultra import (
    CertificateFailed, EmptyFamily, IndexOutOfRange, UltraWeb, WebMismatch,
    all_ultrafilters, apply_family, collapse_check, compactness_demo,
    embed_point, embedded_member, fip_filter_base, los_equation_check,
    principal_ultrafilter, satisfies, seq_variants,
)
from webbed_lambda.webs import FreeEATS, filter_web, graph_web, one_point_eats

INDEX = (1, 2)


def factors():
    # a free graph web and a non-free one (x = x -> x at level 1)
    return (graph_web(["0"]), graph_web(["x"], inj={(("x",), "x"): "x"}))


@pytest.fixture(scope="module", params=[1, 2], ids=["j1", "j2"])
def ultra(request):
    return UltraWeb(factors(), principal_ultrafilter(INDEX, request.param))


def points(f):
    toks = sorted_tokens(t for t in f.sys.enumerate(1) if t != f.nu)
    return [frozenset(c) for k in range(3) for c in combinations(toks, k)]


# ---------------------------------------------------------------------------
# Ultrafilters

def test_all_ultrafilters_on_three_points_are_principal():
    fams = all_ultrafilters((1, 2, 3))
    assert len(fams) == 3
    for fam in fams:
        (gen,) = [s for s in fam if len(s) == 1]
        assert all(gen <= s for s in fam)


def test_principal_membership():
    U = principal_ultrafilter((1, 2, 3), 2)
    assert U.contains({2, 3})
    assert not U.contains({1, 3})
    assert not U.contains(set())
    assert U.position == 1


def test_principal_errors():
    with pytest.raises(IndexOutOfRange):
        principal_ultrafilter((1, 2), 5)
    with pytest.raises(EmptyFamily):
        principal_ultrafilter((), 1)
    with pytest.raises(EmptyFamily):
        UltraWeb((), principal_ultrafilter((1,), 1))
    with pytest.raises(WebMismatch):
        UltraWeb(factors(), principal_ultrafilter((1, 2, 3), 1))


# ---------------------------------------------------------------------------
# Collapse onto the principal factor

def test_collapse_is_isomorphism(ultra):
    rep = collapse_check(ultra, level=2)
    assert rep.ok, rep.witness
    assert rep.checked["tokens"] == len(ultra.factors[ultra.j].sys.enumerate(2))


def test_collapse_counts_for_free_factor():
    P = UltraWeb(factors(), principal_ultrafilter(INDEX, 1))
    rep = collapse_check(P, level=2)
    assert rep.checked == {"tokens": 26, "sets": 2952, "phi": 9152}


def test_relations_ignore_non_principal_components(ultra):
    toks = sorted_tokens(ultra.sys.enumerate(1))
    for t in toks:
        for v in seq_variants(ultra, t):
            assert ultra.sys.canonical(v) == t
            for u in toks:
                assert ultra.sys.entails(frozenset([v]), u) == \
                    ultra.sys.entails(frozenset([t]), u)
                assert ultra.sys.con(frozenset([v, u])) == \
                    ultra.sys.con(frozenset([t, u]))
                assert ultra.phi(frozenset([v]), u) == ultra.phi(frozenset([t]), u)


def test_single_factor_family():
    g = graph_web(["0"])
    P = UltraWeb((g,), principal_ultrafilter(("a",), "a"))
    assert collapse_check(P, level=2).ok
    assert {P.collapse(t) for t in interpret(I(), P, 2, 1)} == \
        set(interpret(I(), g, 2, 1))


# ---------------------------------------------------------------------------
# Equations transfer between the ultraproduct and the principal factor

def test_los_on_corpus_pairs(ultra):
    for p in corpus(0, 50):
        v = los_equation_check(p.left, p.right, ultra, ultra.U)
        assert v.agree, v.line()


def test_los_on_random_pairs(ultra):
    terms = corpus_terms(21, 100, 6)
    rng = random.Random(0)
    kinds = set()
    for _ in range(50):
        m, n = rng.sample(terms, 2)
        v = los_equation_check(m, n, ultra, ultra.U)
        assert v.agree, v.line()
        kinds.add(v.ultra.kind)
    assert "CANDIDATE" in kinds


def test_los_identity_omega():
    f = factors()
    v1 = los_equation_check(I(), Omega(), f, principal_ultrafilter(INDEX, 1))
    assert v1.agree and v1.ultra.line() == "SEPARATED [<{0}->0>|nu] LEFT"
    v2 = los_equation_check(I(), Omega(), f, principal_ultrafilter(INDEX, 2))
    assert v2.agree and v2.ultra.line() == "CANDIDATE [nu|x] LEFT"


# ---------------------------------------------------------------------------
# Embedding of the product of the models

def test_embedding_injective(ultra):
    f1, f2 = ultra.factors
    seen = {}
    for x in points(f1):
        for y in points(f2):
            img = embed_point((x, y), ultra).generators
            # equal images only when the principal components agree
            key = (x, y)[ultra.j]
            assert seen.setdefault(img, key) == key


def test_embedding_membership_matches_entailment(ultra):
    f1, f2 = ultra.factors
    toks = sorted_tokens(ultra.sys.enumerate(1))
    for x in points(f1)[:8]:
        for y in points(f2)[:8]:
            img = embed_point((x, y), ultra)
            for alpha in toks:
                assert embedded_member((x, y), ultra, alpha) == \
                    ultra.sys.entails(img.generators, alpha)


def test_embedding_preserves_application(ultra):
    fs = ultra.factors
    pts = [(x, y) for x in points(fs[0]) for y in points(fs[1])]
    sample = pts[::7]
    bad = 0
    for xs in sample:
        for ys in sample:
            lhs = embed_point(apply_family(xs, ys, fs), ultra).generators
            rhs = apply_points(embed_point(xs, ultra), embed_point(ys, ultra))
            bad += lhs != rhs.generators
    assert bad == 0


@pytest.mark.parametrize("name,depth,width,pool", [("K", 4, 2, None),
                                                   ("S", 6, 1, 2)])
def test_embedding_preserves_combinators(ultra, name, depth, width, pool):
    term = {"K": K(), "S": S()}[name]
    comps = tuple(interpret(term, f, depth, width, pool_level=pool)
                  for f in ultra.factors)
    img = embed_point(comps, ultra).generators
    assert img
    assert img == interpret(term, ultra, depth, width, pool_level=pool)


def test_embed_point_rejects_foreign_point(ultra):
    other = PointApprox(graph_web(["0"]), frozenset())
    with pytest.raises(WebMismatch):
        embed_point((other, frozenset()), ultra)


def test_embedded_nu_is_always_present(ultra):
    img = embed_point((frozenset(), frozenset()), ultra)
    assert img.generators == frozenset()
    assert NU not in img.generators
    assert embedded_member((frozenset(), frozenset()), ultra, ultra.sys.nu)


# ---------------------------------------------------------------------------
# Filter bases and compactness

def test_filter_base_has_finite_intersections():
    eqs = [(parse("I"), parse("S K K")), (parse("K I"), parse("\\x y.y")),
           (parse("I I"), parse("I"))]
    base = fip_filter_base(eqs)
    assert base.certify() == (True, None)
    J = base.witness(eqs[:2])
    assert base.member(eqs[0], J) and not base.member(eqs[2], J)


def test_compactness_demo():
    eqs = [(parse("S K K"), I()), (parse("K I"), parse("\\x y.y"))]
    cert = compactness_demo(eqs, lambda J: graph_web(["0"]), depth=4)
    assert len(cert.index) == 4
    assert set(cert.verdicts) == set(eqs)
    assert all(v.kind == "UNKNOWN" for v in cert.verdicts.values())


def test_compactness_demo_empty_set():
    cert = compactness_demo([], lambda J: graph_web(["0"]))
    assert cert.index == (frozenset(),)
    assert cert.verdicts == {}


def test_compactness_demo_rejects_bad_models():
    with pytest.raises(CertificateFailed):
        compactness_demo([(I(), Omega())], lambda J: graph_web(["0"]))


def test_satisfies():
    g = graph_web(["0"])
    assert satisfies(g, parse("S K K"), I())[0]
    assert not satisfies(g, I(), Omega())[0]
    assert not satisfies(g, K(), parse("K I"))[0]


def test_seq_tokens_shape(ultra):
    t = ultra.sys.lift(Atom("0") if ultra.j == 0 else Atom("x"))
    assert isinstance(t, Seq) and len(t.items) == 2
    assert ultra.collapse(t) in (Atom("0"), Atom("x"))
    assert not isinstance(ultra.collapse(t), Arrow)


# ---------------------------------------------------------------------------
# The general embedding on filter webs

@pytest.mark.parametrize("j", [1, 2])
def test_embedding_on_smallest_filter_webs(j):
    fs = (filter_web(one_point_eats()), filter_web(FreeEATS(["p"])))
    P = UltraWeb(fs, principal_ultrafilter(INDEX, j))
    assert collapse_check(P, level=1).ok

    def pts(f):
        return [x for x in points(f) if f.sys.con(x)]

    toks = sorted_tokens(P.sys.enumerate(1))
    fam = [(x, y) for x in pts(fs[0]) for y in pts(fs[1])]
    assert len(fam) == 22
    for xs in fam:
        img = embed_point(xs, P)
        for alpha in toks:
            assert embedded_member(xs, P, alpha) == \
                P.sys.entails(img.generators, alpha)
    for term in (I(), K()):
        img = embed_point(tuple(interpret(term, f, 4, 2) for f in fs), P)
        ref = interpret(term, P, 4, 2)
        # the same point: each generator set entails the other
        assert all(P.sys.entails(img.generators, t) for t in ref)
        assert all(P.sys.entails(ref, t) for t in img.generators)
