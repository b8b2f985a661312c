"""Acceptance criteria 1-6, each reported as one pass/fail line.

Every criterion collects all of its sub-checks before asserting, so the
summary line names each failing item with the value actually observed.
"""

import copy
import json
import random
import time
from pathlib import Path

from gquantale.errors import GQError, NotSober
from gquantale.fixtures import load_fixture
from gquantale.gq import (
    build_gq,
    check_recovery,
    check_selection_base,
    is_topological_base,
    sb3_exhaustive,
    validate_selection_base,
)
from gquantale.groupoid import groupoid_violations
from gquantale.incidence import (
    check_alpha_theorem,
    check_etale_lemma,
    check_incidence_laws,
    check_spatial,
    incident,
    primes_of_Qe,
    reconstruct_groupoid,
    roundtrip_groupoid,
    roundtrip_quantale,
)
from gquantale.quantale import (
    check_inverse_quantal_frame,
    check_quantale_laws,
    check_SG,
    check_SGF,
    distributivity_binary,
    distributivity_exhaustive,
    is_distributive,
    quantale_from_json,
    quantale_report,
    validate_quantale,
)
from gquantale.search import search
from gquantale.topology import _locally_closed_bruteforce, is_sober, is_T1, is_union_of_locally_closed, prime_opens, validate_space

from tests.instances import random_instance

RESULTS: dict[int, str] = {}
GOLDEN = Path(__file__).parent / "golden" / "search_n4.json"


class Checks:
    def __init__(self, number: int):
        self.number = number
        self.failed: list[str] = []

    def check(self, name: str, ok, observed=None):
        if not ok:
            self.failed.append(name if observed is None else f"{name} (observed {observed})")

    def finish(self, summary: str):
        status = "PASS" if not self.failed else "FAIL"
        detail = summary if not self.failed else "; ".join(self.failed)
        RESULTS[self.number] = f"criterion {self.number}: {status} - {detail}"
        print(RESULTS[self.number])
        assert not self.failed, RESULTS[self.number]


def _fresh(name):
    # bypass the fixture cache so timings include parsing and validation
    return load_fixture.__wrapped__(name)


def _end_to_end(name):
    fx = _fresh(name)
    base = validate_selection_base(fx.groupoid, fx.listed_members)
    gq = build_gq(base)
    q = gq.quantale
    return fx, base, gq, q


def _prime_open_sets(fx):
    return sorted(sorted(fx.space.names(p.carrier)) for p in prime_opens(fx.space))


def _quantale_checks(c, gq):
    q = gq.quantale
    report = quantale_report(q)
    c.check("quantale axioms", all(report.values()), [k for k, v in report.items() if not v])
    c.check("SG", check_SG(q))
    sgf = check_SGF(q)
    c.check("SGF1-3", sgf, sgf.witnesses)
    spatial = check_spatial(q)
    c.check("SPQ1-2", spatial, spatial.witnesses)


def test_criterion_1_etale_fixture():
    c = Checks(1)
    start = time.perf_counter()
    fx, base, gq, q = _end_to_end("etale")
    space = fx.space
    c.check("space sober", is_sober(space))
    c.check("space not T1", not is_T1(space))
    c.check("prime opens", _prime_open_sets(fx) == [[], ["p0", "p1"], ["p0", "p2"]], _prime_open_sets(fx))
    c.check("|S| = 9 recovered as I(Q)", len(q.partial_units) == 9, len(q.partial_units))
    _quantale_checks(c, gq)
    c.check("inverse quantal frame", check_inverse_quantal_frame(q))
    c.check("topological base", is_topological_base(base))
    c.check("etale lemma", check_etale_lemma(q).ok is True)
    rq = roundtrip_quantale(q)
    c.check("quantale round trip", rq["iso"].verify(rq["gq"].quantale, q))
    rg = roundtrip_groupoid(fx.groupoid, base)
    c.check("groupoid round trip", rg["iso"].verify(fx.groupoid, rg["reconstructed"].groupoid))
    rec = reconstruct_groupoid(q)
    c.check("5 arrows, 3 units", (rec.groupoid.m, len(rec.groupoid.space.points)) == (5, 3))
    elapsed = time.perf_counter() - start
    c.check("under 1 s", elapsed < 1.0, f"{elapsed:.3f} s")
    c.finish(f"all checks hold in {elapsed:.3f} s")


def test_criterion_2_non_etale_fixture():
    c = Checks(2)
    start = time.perf_counter()
    fx, base, gq, q = _end_to_end("non_etale")
    g = fx.groupoid
    primes = sorted(sorted(fx.space.names(g.d_image(q.masks[p]))) for p in primes_of_Qe(q))
    c.check("primes", primes == [["p1"], ["p1", "p2"], ["p2"]], primes)
    c.check("|S| = 9", len(q.partial_units) == 9, len(q.partial_units))
    _quantale_checks(c, gq)
    c.check("not distributive", not is_distributive(q))
    top = is_topological_base(base)
    c.check("not a topological base", not top)
    c.check("witness arrow (p0,p0)", top.witness and top.witness["arrow"] == "(p0,p0)", top.witness)
    rq = roundtrip_quantale(q)
    c.check("quantale round trip", rq["iso"].verify(rq["gq"].quantale, q))
    rg = roundtrip_groupoid(g, base)
    c.check("groupoid round trip", rg["iso"].verify(g, rg["reconstructed"].groupoid))
    m = fx.listed_member
    phi, unit = q.index_of(m("phi", "G0")), q.index_of(m("id", "G0"))
    p0, p1 = q.index_of(m("id", "P0")), q.index_of(m("id", "P1"))
    c.check("incident(P0, phi, E)", incident(q, p0, phi, unit))
    c.check("not incident(P1, phi, E)", not incident(q, p1, phi, unit))
    elapsed = time.perf_counter() - start
    c.check("under 1 s", elapsed < 1.0, f"{elapsed:.3f} s")
    c.finish(f"all checks hold in {elapsed:.3f} s")


def test_criterion_3_random_theorem_regression():
    c = Checks(3)
    count = 200
    start = time.perf_counter()
    groups = set()
    for seed in range(count):
        inst = random_instance(random.Random(seed))
        groups.add(inst.label.split()[0])
        q = inst.gq.quantale
        tag = f"seed {seed} ({inst.label})"
        c.check(f"{tag}: SGF", check_SGF(q))
        c.check(f"{tag}: SPQ1-2", check_spatial(q))
        c.check(f"{tag}: recovery", all(check_recovery(inst.gq).values()))
        laws = check_quantale_laws(q)
        c.check(f"{tag}: quantale laws", all(laws.values()), [k for k, v in laws.items() if not v])
        rec = reconstruct_groupoid(q)
        c.check(f"{tag}: reconstructed groupoid axioms", not groupoid_violations(rec.groupoid))
        inc = check_incidence_laws(q, rec)
        c.check(f"{tag}: incidence laws", all(v.ok is not False for v in inc.values()))
        alpha = check_alpha_theorem(q, rec)
        c.check(f"{tag}: alpha clauses", all(alpha.values()), [k for k, v in alpha.items() if not v])
    elapsed = time.perf_counter() - start
    c.check("all three groups drawn", groups == {"Z2", "Z3", "S3"}, sorted(groups))
    c.check("under 60 s", elapsed < 60, f"{elapsed:.1f} s")
    c.finish(f"{count} instances in {elapsed:.1f} s")


def test_criterion_4_oracles():
    c = Checks(4)
    subsets = 0
    for name in ("etale", "non_etale"):
        space = load_fixture(name).space
        for s in range(1 << len(space.points)):
            subsets += 1
            c.check(f"locally closed {name} {s}", is_union_of_locally_closed(space, s) == _locally_closed_bruteforce(space, s))
    result = search(5)
    c.check("search n <= 5 complete", result.complete)
    for i, m in enumerate(result.models):
        ok = distributivity_binary(m.quantale) == distributivity_exhaustive(m.quantale)
        c.check(f"distributivity model {i} (n={m.quantale.n})", ok)
    families = 0
    for name in ("etale", "non_etale"):
        fx = load_fixture(name)
        members = list(set(fx.listed_members))
        for drop in [None, *members]:
            family = [s for s in members if s != drop]
            if len(family) > 12:
                continue
            families += 1
            reduced = bool(check_selection_base(fx.groupoid, family)["SB3"])
            c.check(f"SB3 {name} without {drop}", reduced == sb3_exhaustive(fx.groupoid, family))
    c.finish(f"{subsets} subsets, {len(result.models)} quantales, {families} families agree")


def test_criterion_5_negative_detection():
    c = Checks(5)
    fx, base, gq, q = _end_to_end("non_etale")
    data = q.to_json()
    phi = q.index_of(fx.listed_member("phi", "G0"))
    bad = copy.deepcopy(data)
    bad["product"][phi][phi] = phi
    witness = None
    try:
        corrupted = quantale_from_json(bad)
        validate_quantale(corrupted)
        sgf = check_SGF(corrupted)
        if not sgf:
            witness = sgf.witnesses
    except GQError as exc:
        witness = getattr(exc, "violations", None) or str(exc)
    c.check("corrupted product table rejected with witness", witness)
    drop = fx.listed_member("id", "P2")
    report = check_selection_base(fx.groupoid, [s for s in base.members if s != drop])
    c.check("removing u[{p1}] fails SB2", not report["SB2"] and report["SB2"].witness == ["p1"], report["SB2"])
    indiscrete = validate_space(["a", "b"], [[], ["a", "b"]])
    c.check("indiscrete space not sober", not is_sober(indiscrete))
    try:
        prime_opens(indiscrete)
        c.check("indiscrete space raises NotSober", False)
    except NotSober:
        pass
    c.finish(f"corruption witness {json.dumps(witness[0] if isinstance(witness, list) else witness, default=str)}; SB2 and sobriety failures detected")


def test_criterion_6_search():
    c = Checks(6)
    start = time.perf_counter()
    result = search(4)
    elapsed = time.perf_counter() - start
    c.check("complete", result.complete)
    c.check("under 10 minutes", elapsed < 600, f"{elapsed:.1f} s")
    golden = json.loads(GOLDEN.read_text())
    c.check("classification matches golden", result.table() == golden["classification"])
    c.check("minimal models match golden", json.loads(json.dumps(result.minimal_models())) == golden["minimal_models"])
    again = search(4)
    c.check("rerun identical", again.table() == result.table())
    sg = [m for m in result.models if m.profile["SG"]]
    for i, m in enumerate(sg):
        c.check(f"SG model {i} satisfies Q_e frame, domain criterion, inverse monoid", all(m.sg_checks.values()), m.sg_checks)
    c.finish(f"{len(result.models)} models, {len(sg)} SG, in {elapsed:.2f} s")
