import random
from itertools import permutations, product as iproduct

import pytest

from webbed_lambda.fo_axioms import (
    TooLarge, check_horn_axioms, decode, encode, horn_ultraproduct_check,
    isomorphic_by, ultraproduct_structure,
)
from webbed_lambda.kernel_is import (
    exponential, flat_system, product, restrict, terminal,
)
from webbed_lambda.tokens import NU, Atom
from webbed_lambda.ultra import principal_ultrafilter
from webbed_lambda.webs import graph_web

P, Q = Atom("p"), Atom("q")


def naive_failures(S):
    """Evaluate the seven Horn axioms by brute force over all tuples."""
    car, cap = S.carrier, S.cap
    tuples = [t for n in range(cap + 1) for t in iproduct(car, repeat=n)]
    bad = set()
    if not all(S.c(x) for x in car):
        bad.add("1")
    for xs in tuples:
        if not xs or not S.c(*xs):
            continue
        for ys in tuples:
            if ys and set(ys) <= set(xs) and not S.c(*ys):
                bad.add("2")
        if any(not S.r(*xs, x) for x in xs):
            bad.add("6")
    for xs in tuples:
        for b in car:
            if not S.r(*xs, b):
                continue
            if 1 <= len(xs) < cap and not S.c(*xs, b):
                bad.add("3")
            if any(not S.r(*p, b) for p in permutations(xs)):
                bad.add("4")
    for xs in tuples:
        if not xs:
            continue
        got = {b for b in car if S.r(*xs, b)}
        for bs in tuples:
            if bs and set(bs) <= got:
                for g in car:
                    if S.r(*bs, g) and not S.r(*xs, g):
                        bad.add("5")
    if not S.r(S.nu):
        bad.add("7")
    return bad


def test_flat_system_encoding_passes(f3):
    S = encode(f3)
    rep = check_horn_axioms(S)
    assert rep.ok, rep.lines()
    assert all(S.c(x) for x in S.carrier)
    assert S.r(NU)
    assert S.r(P, NU)
    assert not S.r(P, Q)


def test_drop_consistency_of_pair_with_nu(f3):
    S = encode(f3)
    S.C[2] -= {(P, NU), (NU, P)}
    assert check_horn_axioms(S).failed() == ["2", "3"]


def test_drop_symmetric_entailment(f3):
    S = encode(f3)
    S.R[3].discard((Q, P, P))
    assert check_horn_axioms(S).failed() == ["4", "6"]


def test_drop_nu_axiom(f3):
    S = encode(f3)
    S.R[1].discard((NU,))
    assert check_horn_axioms(S).failed() == ["7"]


def test_witness_lines(f3):
    S = encode(f3)
    S.R[1].discard((NU,))
    assert check_horn_axioms(S)["7"].line("HORN") == "HORN 7 FAIL witness=(nu)"


@pytest.mark.parametrize("j", [1, 2])
def test_ultraproduct_of_structures(f3, j):
    structs = [encode(f3), encode(terminal())]
    U = principal_ultrafilter((1, 2), j)
    prod, rep = horn_ultraproduct_check(structs, U)
    assert rep.ok
    k = U.position
    assert isomorphic_by(prod, structs[k], lambda s: s.items[k])
    assert prod.nu.items == (NU, NU)


def test_isomorphism_detects_a_change(f3):
    structs = [encode(f3), encode(terminal())]
    prod = ultraproduct_structure(structs, principal_ultrafilter((1, 2), 1))
    other = structs[0].copy()
    other.R[2].discard((P, P))
    assert not isomorphic_by(prod, other, lambda s: s.items[0])


def test_ultraproduct_needs_common_cap(f3):
    with pytest.raises(ValueError):
        ultraproduct_structure([encode(f3, 2), encode(f3, 3)],
                               principal_ultrafilter((1, 2), 1))


def test_decode_round_trip(f3):
    S = encode(f3)
    back = decode(S)
    for a in [set(), {P}, {P, Q}, {NU, P, Q}]:
        assert back.con(frozenset(a)) == f3.con(frozenset(a))
        for b in S.carrier:
            assert back.entails(frozenset(a), b) == f3.entails(frozenset(a), b)
    assert encode(back).lines() == S.lines()


@pytest.mark.parametrize("name", ["product", "exponential", "graph"])
def test_slices_satisfy_axioms(name):
    A = flat_system(["p"])
    sys = {
        "product": lambda: product(A, flat_system(["q"])),
        "exponential": lambda: restrict(exponential(A, A),
                                        exponential(A, A).enumerate(1)),
        "graph": lambda: restrict(graph_web(["0"]).sys,
                                  graph_web(["0"]).sys.enumerate(1)),
    }[name]()
    assert check_horn_axioms(encode(sys)).ok


def test_encoding_size_limit():
    with pytest.raises(TooLarge):
        encode(graph_web(["0"]).sys)
    big = flat_system([str(i) for i in range(60)])
    with pytest.raises(TooLarge):
        encode(big)


def test_checker_matches_naive_evaluation():
    rng = random.Random(17)
    base = encode(flat_system(["p", "q"]))
    seen = set()
    for _ in range(100):
        S = base.copy()
        for _ in range(rng.randint(0, 3)):
            kind = rng.choice("CR")
            rel = S.C if kind == "C" else S.R
            n = rng.choice(sorted(rel))
            tup = tuple(rng.choice(S.carrier) for _ in range(n))
            rel[n] ^= {tup}
        got = set(check_horn_axioms(S).failed())
        assert got == naive_failures(S)
        seen |= got
    assert len(seen) >= 4


def test_failing_factor_decides_at_principal_index(f3):
    bad = encode(f3)
    bad.R[1].discard((NU,))
    good = encode(terminal())
    for j, expect in ((1, ["7"]), (2, [])):
        _, rep = horn_ultraproduct_check([bad, good],
                                         principal_ultrafilter((1, 2), j))
        assert rep.failed() == expect
