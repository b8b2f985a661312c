import pytest

from gquantale.errors import AxiomViolation, InvalidAction, NotEquivalence
from gquantale.fixtures import load_fixture
from gquantale.groupoid import (
    action_from_named,
    action_groupoid,
    check_groupoid_laws,
    enumerate_bisection_images,
    from_equivalence_relation,
    group_groupoid,
    is_bisection_image,
    is_SP,
    lift_involution,
    lift_product,
    orbit_relation,
    orbit_relation_groupoid,
    unit_groupoid,
    validate_groupoid,
)
from gquantale.iso import groupoid_isomorphic
from gquantale.topology import validate_space

Z2 = {"elements": ["id", "phi"], "mult": [["id", "phi"], ["phi", "id"]], "identity": "id"}
SWAP = {"phi": {"p0": "p0", "p1": "p2", "p2": "p1"}}


def test_fixture_groupoids_have_five_arrows():
    for name in ("etale", "non_etale"):
        g = load_fixture(name).groupoid
        assert g.m == 5 and len(g.space.points) == 3
        assert all(check_groupoid_laws(g).values())


def test_orbit_relation_matches_fixture():
    for name in ("etale", "non_etale"):
        fx = load_fixture(name)
        g = orbit_relation_groupoid(action_from_named(fx.space, Z2, SWAP))
        assert g.arrows == fx.groupoid.arrows


def test_action_groupoid_of_swap():
    fx = load_fixture("etale")
    g = action_groupoid(action_from_named(fx.space, Z2, SWAP))
    assert g.m == 6 and len(g.space.points) == 3
    assert all(check_groupoid_laws(g).values())


def test_trivial_action():
    fx = load_fixture("non_etale")
    trivial = {"elements": ["id"], "mult": [["id"]], "identity": "id"}
    action = action_from_named(fx.space, trivial, {})
    assert orbit_relation(action) == [(p, p) for p in fx.space.points]
    assert groupoid_isomorphic(action_groupoid(action), unit_groupoid(fx.space))


def test_bad_action():
    fx = load_fixture("etale")
    with pytest.raises(InvalidAction):
        action_from_named(fx.space, Z2, {"id": {"p0": "p1", "p1": "p0", "p2": "p2"}, **SWAP})


def test_identity_relation_is_units_only():
    s = load_fixture("etale").space
    g = from_equivalence_relation(s, [(p, p) for p in s.points])
    assert g.full == g.units


def test_missing_symmetric_pair():
    s = load_fixture("non_etale").space
    rel = [("p0", "p0"), ("p1", "p1"), ("p2", "p2"), ("p1", "p2")]
    with pytest.raises(NotEquivalence):
        from_equivalence_relation(s, rel)


def test_trivial_group_groupoid():
    g = group_groupoid(["e"], [[0]], 0)
    assert g.m == 1


def test_corrupt_inverse_is_G5():
    g = load_fixture("etale").groupoid
    inverse = list(g.inverse)
    x = g.arrow_index("(p1,p2)")
    inverse[x] = x
    with pytest.raises(AxiomViolation) as info:
        validate_groupoid(g.space, g.arrows, g.d, g.r, g.u, g.product, inverse)
    assert info.value.axiom == "G5"


def test_bisection_images():
    fx = load_fixture("etale")
    g = fx.groupoid
    verdict = is_bisection_image(g, g.mask(["(p0,p0)"]))
    assert verdict and verdict.witness.domain == fx.space.mask(["p0"])
    assert is_bisection_image(g, g.units).witness.domain == fx.space.full
    g2 = load_fixture("non_etale").groupoid
    assert not is_bisection_image(g2, g2.mask(["(p0,p0)"]))


def test_enumerated_images_are_the_listing():
    for name, count in (("etale", 8), ("non_etale", 9)):
        fx = load_fixture(name)
        images = enumerate_bisection_images(fx.groupoid)
        assert len(images) == count
        assert {b.carrier for b in images} == set(fx.listed_members)
        assert is_SP(fx.groupoid, images)


def test_identities_do_not_cover():
    g = load_fixture("non_etale").groupoid
    assert not is_SP(g, [g.units])


def test_lifted_operations():
    fx = load_fixture("etale")
    g = fx.groupoid
    phi = fx.listed_member("phi", "G0")
    assert lift_product(g, phi, phi) == g.units
    assert lift_product(g, phi, 0) == 0
    assert lift_involution(g, phi) == phi
    u, v = fx.open_names["P1"], fx.open_names["P2"]
    assert lift_product(g, g.unit_image(u), g.unit_image(v)) == g.unit_image(u & v)


def test_unit_groupoid_of_sierpinski():
    s = validate_space(["a", "b"], [[], ["a"], ["a", "b"]])
    g = unit_groupoid(s)
    assert len(enumerate_bisection_images(g)) == 3
