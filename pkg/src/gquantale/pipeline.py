"""End-to-end runs shared by the CLI and the acceptance tests."""

from __future__ import annotations

from .errors import GQError
from .fixtures import Fixture
from .gq import (
    GroupoidQuantale,
    build_gq,
    canonical_base_from_action,
    check_recovery,
    is_topological_base,
    naive_union_closure,
    validate_selection_base,
)
from .groupoid import enumerate_bisection_images, check_groupoid_laws, groupoid_violations, is_SP
from .incidence import (
    check_alpha_theorem,
    check_etale_lemma,
    check_incidence_laws,
    check_spatial,
    incidence_classes,
    incidence_pairs,
    primes_of_Qe,
    reconstruct_groupoid,
    roundtrip_groupoid,
    roundtrip_quantale,
)
from .quantale import (
    FiniteQuantale,
    check_inverse_monoid,
    check_inverse_quantal_frame,
    check_Qe_frame,
    check_quantale_laws,
    check_SG,
    check_SGF,
    distributive_bruteforce,
    is_distributive,
    quantale_report,
)
from .topology import (
    FiniteSpace,
    _locally_closed_bruteforce,
    is_sober,
    is_T0,
    is_T1,
    is_union_of_locally_closed,
    prime_opens,
)


def space_summary(space: FiniteSpace, verify: bool = False) -> dict:
    sober = is_sober(space)
    out = {
        "points": len(space.points),
        "opens": len(space.opens),
        "sober": sober,
        "T0": is_T0(space),
        "T1": is_T1(space),
    }
    if sober:
        out["prime_opens"] = {space.points[p.point]: space.names(p.carrier) for p in prime_opens(space)}
    if verify:
        out["oracle_locally_closed"] = all(
            is_union_of_locally_closed(space, s) == _locally_closed_bruteforce(space, s) for s in range(1 << len(space.points))
        )
    return out


def quantale_summary(q: FiniteQuantale, verify: bool = False) -> tuple[dict, bool]:
    """Axiom report and classification; the bool says whether the axioms all hold."""
    axioms = quantale_report(q)
    valid = all(axioms.values())
    out: dict = {"elements": q.n, "axioms": axioms}
    if not valid:
        return out, False
    sgf = check_SGF(q)
    out.update(
        {
            "partial_units": len(q.partial_units),
            "unit_downset": len(q.below_e),
            "SG": check_SG(q),
            "SGF": {"sgf1": sgf.sgf1, "sgf2": sgf.sgf2, "sgf3": sgf.sgf3, "witnesses": sgf.witnesses},
            "distributive": is_distributive(q),
            "inverse_quantal_frame": check_inverse_quantal_frame(q),
        }
    )
    if out["SG"]:
        out["Qe_frame"] = check_Qe_frame(q)
        out["inverse_monoid"] = check_inverse_monoid(q)
    if sgf:
        out["primes"] = len(primes_of_Qe(q))
        try:
            spatial = check_spatial(q)
            out["SPQ"] = {"spq1": spatial.spq1, "spq2": spatial.spq2, "witnesses": spatial.witnesses, "empty_index": list(spatial.empty_index)}
        except GQError as exc:
            out["SPQ"] = {"error": str(exc)}
    if verify:
        from .quantale import distributivity_binary, distributivity_exhaustive

        out["oracle_distributive"] = bool(is_distributive(q)) == distributive_bruteforce(q)
        if q.n <= 12:
            out["oracle_complete_distributivity"] = distributivity_binary(q) == distributivity_exhaustive(q)
    return out, True


def gq_summary(gq: GroupoidQuantale, verify: bool = False) -> dict:
    q = gq.quantale
    summary, _ = quantale_summary(q, verify)
    summary["recovery"] = check_recovery(gq)
    summary["topological_base"] = is_topological_base(gq.base)
    summary["etale_lemma"] = check_etale_lemma(q)
    summary["etale_classification"] = (
        "inverse quantal frame" if summary["inverse_quantal_frame"] else "not an inverse quantal frame"
    )
    if verify and gq.groupoid.m <= 16:
        summary["oracle_union_closure"] = set(q.masks) == naive_union_closure(gq.groupoid, gq.base.members)
    return summary


def theorem_checks(gq: GroupoidQuantale) -> dict[str, bool]:
    """The checks that must hold for every groupoid quantale."""
    q = gq.quantale
    summary = gq_summary(gq)
    spq = summary.get("SPQ", {})
    return {
        "axioms": all(summary["axioms"].values()),
        "SGF": all(summary["SGF"][k] for k in ("sgf1", "sgf2", "sgf3")),
        "SPQ": bool(spq.get("spq1")) and bool(spq.get("spq2")),
        "recovery": all(summary["recovery"].values()),
        "Qe_frame": bool(summary.get("Qe_frame")),
        "inverse_monoid": bool(summary.get("inverse_monoid")),
        "quantale_laws": all(check_quantale_laws(q).values()),
    }


def reconstruct_summary(q: FiniteQuantale) -> dict:
    rec = reconstruct_groupoid(q)
    g = rec.groupoid
    return {
        "primes": len(rec.primes),
        "pairs": len(incidence_pairs(q)),
        "classes": len(incidence_classes(q)),
        "units": len(g.space.points),
        "arrows": g.m,
        "groupoid": g.to_json(),
        "alpha_embedding": all(check_alpha_theorem(q, rec).values()),
        "incidence_laws": {k: v for k, v in check_incidence_laws(q, rec).items()},
    }


def run_roundtrips(gq: GroupoidQuantale) -> dict:
    out = {}
    try:
        qr = roundtrip_quantale(gq.quantale)
        out["quantale_iso"] = True
        out["quantale_certificate"] = list(qr["iso"].mapping)
    except GQError as exc:
        out["quantale_iso"] = False
        out["quantale_error"] = str(exc)
    try:
        gr = roundtrip_groupoid(gq.groupoid, gq.base)
        out["groupoid_iso"] = True
        out["groupoid_certificate"] = gr["iso"].to_json()
    except GQError as exc:
        out["groupoid_iso"] = False
        out["groupoid_error"] = str(exc)
    return out


def run_fixture(fx: Fixture, verify: bool = False) -> dict:
    """Every derived fact about a fixture, computed from scratch."""
    g = fx.groupoid
    space = fx.space
    facts: dict = {}
    facts["space"] = space_summary(space, verify)
    facts["groupoid_valid"] = not groupoid_violations(g)
    facts["groupoid_laws"] = all(check_groupoid_laws(g).values())
    images = enumerate_bisection_images(g)
    facts["bisection_images"] = len(images)
    facts["SP"] = is_SP(g, images)
    listed = fx.listed_members
    facts["listing_entries"] = len(listed)
    facts["listed_distinct"] = len(set(listed))
    facts["listing_is_all_images"] = set(listed) == {b.carrier for b in images}
    canonical = canonical_base_from_action(fx.action, g)
    facts["canonical_base_matches_listing"] = set(canonical) == set(listed)
    base = validate_selection_base(g, listed, verify=verify)
    gq = build_gq(base)
    q = gq.quantale
    facts["selection_base"] = base.axiom_report
    facts["gq"] = gq_summary(gq, verify)
    facts["prime_elements"] = sorted(g.d_image(q.masks[p]) for p in primes_of_Qe(q))
    facts["reconstruct"] = reconstruct_summary(q)
    facts["roundtrip"] = run_roundtrips(gq)
    return facts


def golden_view(facts: dict, fx: Fixture) -> dict:
    """The subset of facts frozen in the fixture file."""
    space = fx.space
    gqs = facts["gq"]
    return {
        "sober": bool(facts["space"]["sober"]),
        "T1": facts["space"]["T1"],
        "prime_opens": facts["space"].get("prime_opens"),
        "bisection_images": facts["bisection_images"],
        "listed_distinct": facts["listed_distinct"],
        "gq_size": gqs["elements"],
        "partial_units": gqs["partial_units"],
        "unit_downset": gqs["unit_downset"],
        "primes": [space.names(m) for m in facts["prime_elements"]],
        "distributive": bool(gqs["distributive"]),
        "inverse_quantal_frame": bool(gqs["inverse_quantal_frame"]),
        "topological_base": bool(gqs["topological_base"]),
        "etale_lemma": gqs["etale_lemma"].ok,
        "classes": facts["reconstruct"]["classes"],
        "reconstructed_units": facts["reconstruct"]["units"],
        "roundtrip": {
            "quantale_iso": facts["roundtrip"]["quantale_iso"],
            "groupoid_iso": facts["roundtrip"]["groupoid_iso"],
        },
    }


def golden_drift(fx: Fixture, facts: dict) -> dict:
    view = golden_view(facts, fx)
    return {k: {"expected": fx.expected.get(k), "actual": v} for k, v in view.items() if fx.expected.get(k) != v}
