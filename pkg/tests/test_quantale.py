import copy

import pytest
from hypothesis import given, settings, strategies as st

from gquantale.errors import GQError, ArgumentsOutOfDomain, NotAssociative, NotLattice, NotUnionClosed, UnitFail
from gquantale.fixtures import load_fixture
from gquantale.groupoid import group_groupoid
from gquantale.quantale import (
    check_inverse_monoid,
    check_inverse_quantal_frame,
    check_Qe_frame,
    check_quantale_laws,
    check_SG,
    check_SGF,
    conjugate,
    distributive_bruteforce,
    distributivity_binary,
    distributivity_exhaustive,
    frame_quantale,
    from_subset_family,
    is_distributive,
    partial_units,
    powerset_quantale,
    prime_elements_of_Qe,
    quantale_from_json,
    quantale_report,
    validate_quantale,
)
from gquantale.search import search

CHAIN2 = {"n": 2, "leq": [[0, 1]], "product": [[0, 0], [0, 1]], "involution": [0, 1], "unit": 1}
ONE = {"n": 1, "leq": [], "product": [[0]], "involution": [0], "unit": 0}


def z2_powerset():
    return powerset_quantale(group_groupoid(["e", "s"], [[0, 1], [1, 0]], 0))


def test_trivial_quantales():
    for data in (ONE, CHAIN2):
        q = validate_quantale(data)
        assert check_SG(q) and check_SGF(q)
        assert check_inverse_monoid(q)
    q = validate_quantale(CHAIN2)
    assert prime_elements_of_Qe(q) == (0,)


def test_associativity_witness():
    # x*x = top, top*top = x on the chain 0 < e < x < top breaks associativity
    data = {
        "n": 4,
        "leq": [[0, 1], [1, 2], [2, 3]],
        "product": [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 3], [0, 3, 3, 2]],
        "involution": [0, 1, 2, 3],
        "unit": 1,
    }
    q = quantale_from_json(data)
    report = quantale_report(q)
    assert not report["associativity"]
    a, b, c = report["associativity"].witness
    assert q.mul(q.mul(a, b), c) != q.mul(a, q.mul(b, c))
    with pytest.raises(NotAssociative):
        validate_quantale(q)


def test_unit_failure():
    data = dict(CHAIN2, unit=0)
    with pytest.raises(UnitFail):
        validate_quantale(data)


def test_not_a_lattice():
    with pytest.raises(NotLattice):
        quantale_from_json({"n": 3, "leq": [], "product": [[0] * 3] * 3, "involution": [0, 1, 2], "unit": 0})


def test_powerset_of_groupoid_is_valid():
    g = load_fixture("etale").groupoid
    q = powerset_quantale(g)
    assert q.n == 2 ** g.m
    assert all(quantale_report(q).values())
    assert check_SG(q)


def test_powerset_of_z2():
    q = z2_powerset()
    pu = partial_units(q)
    assert sorted(bin(q.masks[a]).count("1") for a in pu.partial_units) == [0, 1, 1]
    sgf = check_SGF(q)
    assert sgf.sgf1 and sgf.sgf2
    assert sgf.sgf3  # derived by exhaustion over the subsets of Z2


def test_frame_quantale():
    for name in ("etale", "non_etale"):
        space = load_fixture(name).space
        q = frame_quantale(space)
        assert all(quantale_report(q).values())
        assert len(q.partial_units) == q.n
        assert check_SG(q) and check_SGF(q) and check_Qe_frame(q)
        assert check_inverse_quantal_frame(q)
        assert len(prime_elements_of_Qe(q)) == 3


def test_union_closure_required():
    fx = load_fixture("non_etale")
    with pytest.raises(NotUnionClosed):
        from_subset_family(fx.groupoid, fx.listed_members)


def test_conjugate_domain():
    q = validate_quantale(CHAIN2)
    assert conjugate(q, 1, 1) == 1
    with pytest.raises(ArgumentsOutOfDomain):
        conjugate(frame_quantale(load_fixture("etale").space), 99, 0)


def test_small_non_SG_model_has_witness():
    result = search(3)
    bad = result.smallest(lambda m: not m.profile["SG"])
    assert bad is not None and bad.quantale.n == 3
    verdict = check_SG(bad.quantale)
    q = bad.quantale
    a = verdict.witness
    assert not q.leq(a, q.mul(q.mul(a, q.star(a)), a))


def test_distributivity_oracles_on_small_models():
    for m in search(4).models:
        q = m.quantale
        assert bool(is_distributive(q)) == distributive_bruteforce(q)
        assert distributivity_binary(q) == distributivity_exhaustive(q)


def test_laws_on_fixture_quantales(example):
    _, _, gq = example
    q = gq.quantale
    assert all(check_quantale_laws(q).values())
    assert check_Qe_frame(q) and check_inverse_monoid(q)


@st.composite
def chains(draw):
    # frames on chains with meet as product
    n = draw(st.integers(1, 6))
    return {
        "n": n,
        "leq": [[i, i + 1] for i in range(n - 1)],
        "product": [[min(a, b) for b in range(n)] for a in range(n)],
        "involution": list(range(n)),
        "unit": n - 1,
    }


@settings(max_examples=30, deadline=None)
@given(chains())
def test_chain_frames(data):
    q = validate_quantale(data)
    assert check_SGF(q)
    assert check_inverse_quantal_frame(q)
    assert len(prime_elements_of_Qe(q)) == q.n - 1


def test_every_single_corruption_is_rejected(non_etale):
    q = non_etale[2].quantale
    data = q.to_json()
    for a in range(q.n):
        for b in range(q.n):
            bad = copy.deepcopy(data)
            bad["product"][a][b] = (data["product"][a][b] + 1) % q.n
            try:
                corrupted = quantale_from_json(bad)
            except GQError:
                continue
            report = quantale_report(corrupted)
            assert not all(report.values()) or not check_SGF(corrupted), (a, b)
