import pytest

from gquantale.errors import SelectionBaseError, SizeBudgetExceeded
from gquantale.fixtures import load_fixture
from gquantale.gq import (
    build_gq,
    canonical_base_from_action,
    check_recovery,
    check_selection_base,
    is_topological_base,
    naive_union_closure,
    sb3_exhaustive,
    union_closure,
    unit_base,
    validate_selection_base,
)
from gquantale.groupoid import unit_groupoid
from gquantale.iso import quantale_isomorphic
from gquantale.quantale import frame_quantale


def test_fixture_bases_pass_every_axiom(example):
    fx, base, _ = example
    report = check_selection_base(fx.groupoid, fx.listed_members, verify=True)
    assert all(report.values())
    assert report == base.axiom_report


def test_removing_a_unit_image_fails_SB2():
    fx = load_fixture("non_etale")
    drop = fx.listed_member("id", "P2")
    assert fx.groupoid.names(drop) == ["(p1,p1)"]
    family = [s for s in fx.listed_members if s != drop]
    report = check_selection_base(fx.groupoid, family)
    assert not report["SB2"]
    assert report["SB2"].witness == ["p1"]
    with pytest.raises(SelectionBaseError) as info:
        validate_selection_base(fx.groupoid, family)
    assert "SB2" in dict(info.value.violations)


def test_sb3_reduction_agrees_with_enumeration(example):
    fx, _, _ = example
    members = fx.listed_members
    assert len(set(members)) <= 12
    assert bool(check_selection_base(fx.groupoid, members)["SB3"]) == sb3_exhaustive(fx.groupoid, members)
    for drop in set(members):
        rest = [s for s in members if s != drop]
        assert bool(check_selection_base(fx.groupoid, rest)["SB3"]) == sb3_exhaustive(fx.groupoid, rest)


def test_canonical_base_is_the_listing(example):
    fx, _, _ = example
    assert set(canonical_base_from_action(fx.action, fx.groupoid)) == set(fx.listed_members)


def test_sizes(etale, non_etale):
    assert etale[2].quantale.n == 17
    assert non_etale[2].quantale.n == 23


def test_union_closure_matches_naive(example):
    fx, base, gq = example
    assert set(gq.quantale.masks) == naive_union_closure(fx.groupoid, base.members)


def test_union_closure_budget():
    fx = load_fixture("non_etale")
    with pytest.raises(SizeBudgetExceeded):
        union_closure(fx.listed_members, budget=10)


def test_recovery(example):
    fx, base, gq = example
    assert all(check_recovery(gq, strict=True).values())
    q = gq.quantale
    assert len(q.below_e) == 5
    # the distinct listed members are exactly the partial units
    assert {q.masks[f] for f in q.partial_units} == set(base.members)


def test_partial_unit_counts(etale, non_etale):
    # the etale listing names H and H-phi separately, but both are the arrow (p0,p0)
    assert len(etale[2].quantale.partial_units) == 8
    assert len(non_etale[2].quantale.partial_units) == 9


def test_topological_base(etale, non_etale):
    assert is_topological_base(etale[1])
    verdict = is_topological_base(non_etale[1])
    assert not verdict
    assert verdict.witness["arrow"] == "(p0,p0)"


def test_unit_space_base_gives_the_frame():
    space = load_fixture("non_etale").space
    g = unit_groupoid(space)
    gq = build_gq(validate_selection_base(g, unit_base(g)))
    assert gq.quantale.n == len(space.opens)
    assert quantale_isomorphic(gq.quantale, frame_quantale(space))
    assert all(check_recovery(gq).values())
    assert is_topological_base(gq.base)
