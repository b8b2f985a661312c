import pytest

from gquantale.errors import NoTransport
from gquantale.fixtures import load_fixture
from gquantale.gq import build_gq, unit_base, validate_selection_base
from gquantale.groupoid import unit_groupoid
from gquantale.incidence import (
    alpha,
    check_alpha_theorem,
    check_etale_lemma,
    check_incidence_laws,
    check_spatial,
    class_index,
    class_obstruction,
    incidence_classes,
    incidence_pairs,
    incident,
    primes_of_Qe,
    reconstruct_groupoid,
    roundtrip,
    roundtrip_groupoid,
    roundtrip_quantale,
    transport,
)
from gquantale.iso import groupoid_isomorphic
from gquantale.quantale import frame_quantale, validate_quantale
from gquantale.topology import space_from_masks

ONE = {"n": 1, "leq": [], "product": [[0]], "involution": [0], "unit": 0}


def _named(fx, q):
    m = fx.listed_member
    phi = q.index_of(m("phi", "G0"))
    unit = q.index_of(m("id", "G0"))
    primes = {k: q.index_of(m("id", k)) for k in ("P0", "P1", "P2")}
    return phi, unit, primes


def test_non_etale_primes(non_etale):
    fx, _, gq = non_etale
    q = gq.quantale
    _, _, P = _named(fx, q)
    assert sorted(primes_of_Qe(q)) == sorted(P.values())
    assert sorted(fx.space.names(fx.groupoid.d_image(q.masks[p])) for p in P.values()) == [
        ["p1"],
        ["p1", "p2"],
        ["p2"],
    ]


def test_etale_primes_include_empty(etale):
    fx, _, gq = etale
    q = gq.quantale
    assert q.bottom in primes_of_Qe(q)
    assert len(primes_of_Qe(q)) == 3


def test_non_etale_incidence(non_etale):
    fx, _, gq = non_etale
    q = gq.quantale
    phi, unit, P = _named(fx, q)
    assert incident(q, P["P0"], phi, unit)
    assert not incident(q, P["P1"], phi, unit)
    assert transport(q, P["P1"], phi) == P["P2"]
    assert transport(q, P["P0"], phi) == P["P0"]
    assert not q.leq(phi, class_obstruction(q, P["P1"], phi))
    assert bin(alpha(q, phi)).count("1") == 3


def test_transport_requires_a_pair(non_etale):
    fx, _, gq = non_etale
    q = gq.quantale
    _, _, P = _named(fx, q)
    with pytest.raises(NoTransport):
        transport(q, P["P1"], q.bottom)


def test_class_counts(example):
    _, _, gq = example
    q = gq.quantale
    classes = incidence_classes(q)
    assert len(classes) == 5
    assert sum(len(c.members) for c in classes) == len(incidence_pairs(q))


def test_reconstruction_matches_original(example):
    fx, _, gq = example
    rec = reconstruct_groupoid(gq.quantale)
    assert rec.groupoid.m == 5 and len(rec.groupoid.space.points) == 3
    iso = groupoid_isomorphic(fx.groupoid, rec.groupoid)
    assert iso and iso.verify(fx.groupoid, rec.groupoid)


def test_spatial_and_alpha(example):
    _, _, gq = example
    q = gq.quantale
    report = check_spatial(q)
    assert report.spq1 and report.spq2
    assert all(check_alpha_theorem(q, strict=True).values())
    assert all(v.ok is not False for v in check_incidence_laws(q).values())


def test_etale_lemma(etale, non_etale):
    assert check_etale_lemma(etale[2].quantale).ok is True
    skipped = check_etale_lemma(non_etale[2].quantale)
    assert skipped.ok is None


def test_round_trips(example):
    fx, base, gq = example
    rq = roundtrip_quantale(gq.quantale)
    assert rq["iso"].verify(rq["gq"].quantale, gq.quantale)
    rg = roundtrip_groupoid(fx.groupoid, base)
    assert rg["iso"].verify(fx.groupoid, rg["reconstructed"].groupoid)


def test_frame_quantale_classes_are_points():
    space = load_fixture("etale").space
    q = frame_quantale(space)
    classes = incidence_classes(q)
    assert len(classes) == len(primes_of_Qe(q)) == 3
    assert {class_index(q, p, q.unit) for p in primes_of_Qe(q)} == set(range(3))
    rec = reconstruct_groupoid(q)
    assert rec.groupoid.full == rec.groupoid.units
    assert groupoid_isomorphic(rec.groupoid, unit_groupoid(space))
    assert check_spatial(q)
    assert all(check_alpha_theorem(q).values())
    assert check_etale_lemma(q).ok is True


def test_one_element_quantale_is_vacuously_spatial():
    q = validate_quantale(ONE)
    assert check_spatial(q)
    assert primes_of_Qe(q) == ()


def test_unit_space_round_trip():
    space = space_from_masks(["a", "b"], [0, 1, 3])
    g = unit_groupoid(space)
    base = validate_selection_base(g, unit_base(g))
    assert roundtrip(g, base)["groupoid"]["iso"]
    both = roundtrip(build_gq(base))
    assert both["quantale"]["iso"] and both["groupoid"]["iso"]
