"""Incidence, transport and the groupoid reconstructed from an SGF-quantale.

Pairs ``(p, f)`` range over primes ``p`` of the downset of e and partial units
``f`` with ``d(f) = ff*`` not below ``p``. Everything here is decided by
exhaustive search; per-quantale intermediate results are cached weakly.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from typing import NamedTuple

from .bits import Verdict, iter_bits
from .errors import NoTransport, NonUniqueTransport, NotEquivalence, RoundTripFailure, TheoremViolation
from .gq import (
    DEFAULT_BUDGET,
    GroupoidQuantale,
    SelectionBase,
    build_gq,
    check_selection_base,
)
from .groupoid import FiniteGroupoid, validate_groupoid, UNDEFINED
from .quantale import FiniteQuantale, check_inverse_quantal_frame, prime_elements_of_Qe
from .topology import space_from_masks


class IncidencePair(NamedTuple):
    p: int
    f: int


@dataclass(frozen=True)
class IncidenceClass:
    representative: IncidencePair
    members: tuple[IncidencePair, ...]


class _Analysis:
    def __init__(self, q: FiniteQuantale):
        self.q = q
        self.primes = prime_elements_of_Qe(q)
        self.units = q.partial_units
        self.qe = q.below_e
        self._incident: dict[tuple[int, int, int], bool] = {}
        self._transport: dict[tuple[int, int], int] = {}
        self.classes: list[IncidenceClass] | None = None
        self.class_of: dict[IncidencePair, int] = {}
        self.obstructions: list[int] | None = None
        self.alpha: list[int] | None = None

    def pairs_at(self, p: int) -> list[int]:
        q = self.q
        return [f for f in self.units if not q.leq(q.d(f), p)]


_CACHE: "weakref.WeakKeyDictionary[FiniteQuantale, _Analysis]" = weakref.WeakKeyDictionary()


def _analysis(q: FiniteQuantale) -> _Analysis:
    a = _CACHE.get(q)
    if a is None:
        a = _Analysis(q)
        _CACHE[q] = a
    return a


def primes_of_Qe(q: FiniteQuantale) -> tuple[int, ...]:
    return _analysis(q).primes


def incidence_pairs(q: FiniteQuantale) -> list[IncidencePair]:
    an = _analysis(q)
    return [IncidencePair(p, f) for p in an.primes for f in an.pairs_at(p)]


def incident(q: FiniteQuantale, p: int, f: int, g: int) -> bool:
    """Some ``h <= d(f) ^ d(g)`` in the downset of e with ``h`` not below ``p`` and ``hf <= pf v g``."""
    an = _analysis(q)
    key = (p, f, g)
    hit = an._incident.get(key)
    if hit is None:
        bound = q.meet(q.d(f), q.d(g))
        rhs = q.join(q.mul(p, f), g)
        hit = any(
            q.leq(h, bound) and not q.leq(h, p) and q.leq(q.mul(h, f), rhs)
            for h in an.qe
        )
        an._incident[key] = hit
    return hit


def _relation_rows(q: FiniteQuantale, p: int, fs: list[int]) -> list[int]:
    return [sum(1 << j for j, g in enumerate(fs) if incident(q, p, f, g)) for f in fs]


def incidence_classes(q: FiniteQuantale) -> list[IncidenceClass]:
    """Partition of the incidence pairs; the relation is checked to be an equivalence."""
    an = _analysis(q)
    if an.classes is not None:
        return an.classes
    classes: list[IncidenceClass] = []
    for p in an.primes:
        fs = an.pairs_at(p)
        rows = _relation_rows(q, p, fs)
        for i, row in enumerate(rows):
            if not row >> i & 1:
                raise NotEquivalence("incidence is not reflexive", [("reflexive", (p, fs[i]))])
            for j in iter_bits(row):
                if not rows[j] >> i & 1:
                    raise NotEquivalence("incidence is not symmetric", [("symmetric", (p, fs[i], fs[j]))])
                if rows[j] & ~row:
                    k = next(iter_bits(rows[j] & ~row))
                    raise NotEquivalence("incidence is not transitive", [("transitive", (p, fs[i], fs[j], fs[k]))])
        seen = 0
        for i, row in enumerate(rows):
            if seen >> i & 1:
                continue
            seen |= row
            members = tuple(IncidencePair(p, fs[j]) for j in iter_bits(row))
            classes.append(IncidenceClass(members[0], members))
    classes.sort(key=lambda c: c.representative)
    an.classes = classes
    an.class_of = {m: k for k, c in enumerate(classes) for m in c.members}
    return classes


def class_index(q: FiniteQuantale, p: int, f: int) -> int:
    incidence_classes(q)
    return _analysis(q).class_of[IncidencePair(p, f)]


def transport(q: FiniteQuantale, p: int, f: int) -> int:
    """The prime ``f[p]``: unique ``q'`` with ``r(f)`` not below it and ``pf = fq'``."""
    an = _analysis(q)
    hit = an._transport.get((p, f))
    if hit is None:
        rf = q.r(f)
        pf = q.mul(p, f)
        found = [c for c in an.primes if not q.leq(rf, c) and q.mul(f, c) == pf]
        if not found:
            raise NoTransport(f"no transport of prime {p} along {f}")
        if len(found) > 1:
            raise NonUniqueTransport(f"transport of prime {p} along {f} is not unique: {found}")
        hit = found[0]
        an._transport[(p, f)] = hit
    return hit


@dataclass(frozen=True, eq=False)
class ReconstructedGroupoid:
    groupoid: FiniteGroupoid
    quantale: FiniteQuantale
    primes: tuple[int, ...]
    classes: tuple[IncidenceClass, ...]

    def point_of(self, prime: int) -> int:
        return self.primes.index(prime)


def _unit_opens(q: FiniteQuantale, primes: tuple[int, ...]) -> set[int]:
    return {sum(1 << i for i, p in enumerate(primes) if not q.leq(h, p)) for h in q.below_e}


def reconstruct_groupoid(q: FiniteQuantale) -> ReconstructedGroupoid:
    """Units are the primes with opens ``{p : h not below p}``; arrows are incidence classes."""
    an = _analysis(q)
    primes = an.primes
    classes = incidence_classes(q)
    pidx = {p: i for i, p in enumerate(primes)}
    space = space_from_masks([f"q{p}" for p in primes], _unit_opens(q, primes))
    m = len(classes)
    d = [pidx[c.representative.p] for c in classes]
    r = [pidx[transport(q, *c.representative)] for c in classes]
    u = [class_index(q, p, q.unit) for p in primes]
    inverse = []
    for c in classes:
        p, f = c.representative
        inverse.append(class_index(q, transport(q, p, f), q.star(f)))
    table = [[UNDEFINED] * m for _ in range(m)]
    by_source: dict[int, list[int]] = {}
    for k, c in enumerate(classes):
        by_source.setdefault(c.representative.p, []).append(k)
    for a, c in enumerate(classes):
        p, f = c.representative
        fp = transport(q, p, f)
        for b in by_source.get(fp, []):
            g = classes[b].representative.f
            table[a][b] = class_index(q, p, q.mul(f, g))
    names = [f"[q{c.representative.p},{c.representative.f}]" for c in classes]
    groupoid = validate_groupoid(space, names, d, r, u, table, inverse)
    return ReconstructedGroupoid(groupoid, q, primes, tuple(classes))


def class_obstruction(q: FiniteQuantale, p: int, f: int) -> int:
    """Join of the partial units g with ``d(g) <= p`` or g not incident to f at p."""
    return q.join_all(g for g in q.partial_units if q.leq(q.d(g), p) or not incident(q, p, g, f))


def _obstructions(q: FiniteQuantale) -> list[int]:
    an = _analysis(q)
    if an.obstructions is None:
        an.obstructions = [class_obstruction(q, *c.representative) for c in incidence_classes(q)]
    return an.obstructions


@dataclass(frozen=True)
class SpatialReport:
    spq1: bool
    spq2: bool
    witnesses: dict = field(default_factory=dict)
    empty_index: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.spq1 and self.spq2


def check_spatial(q: FiniteQuantale) -> SpatialReport:
    """SPQ1 over all pairs; SPQ2 over all elements, the empty meet taken as top and flagged."""
    witnesses = {}
    for pair in incidence_pairs(q):
        if q.leq(pair.f, class_obstruction(q, *pair)):
            witnesses["spq1"] = pair
            break
    obstructions = sorted(set(_obstructions(q)))
    empty = []
    for a in q.elements:
        above = [i for i in obstructions if q.leq(a, i)]
        if not above:
            empty.append(a)
        if q.meet_all(above) != a:
            witnesses.setdefault("spq2", a)
    return SpatialReport("spq1" not in witnesses, "spq2" not in witnesses, witnesses, tuple(empty))


def alpha(q: FiniteQuantale, a: int) -> int:
    """The classes ``[p,f]`` with ``a`` not below ``I_[p,f]``, as a bitmask over class indices."""
    an = _analysis(q)
    if an.alpha is None:
        obs = _obstructions(q)
        an.alpha = [sum(1 << k for k, i in enumerate(obs) if not q.leq(x, i)) for x in q.elements]
    return an.alpha[a]


def check_alpha_theorem(q: FiniteQuantale, rec: ReconstructedGroupoid | None = None, strict: bool = False) -> dict[str, Verdict]:
    """The five clauses of the embedding theorem.

    Joins are checked against every join-irreducible and products on partial
    units; both suffice once alpha preserves joins, since the lifted product
    distributes over unions and partial units join-generate.
    """
    rec = rec or reconstruct_groupoid(q)
    g = rec.groupoid
    els = q.elements
    jis = q.join_irreducibles
    out: dict[str, Verdict] = {}

    def first(gen):
        for w in gen:
            return Verdict(False, w)
        return Verdict(True)

    out["joins"] = first(
        (a, j) for a in els for j in jis if alpha(q, q.join(a, j)) != alpha(q, a) | alpha(q, j)
    )
    if out["joins"] and alpha(q, q.bottom) != 0:
        out["joins"] = Verdict(False, (q.bottom,))
    out["order_embedding"] = first(
        (j, a) for a in els for j in jis if alpha(q, j) & ~alpha(q, a) == 0 and not q.leq(j, a)
    )
    factors = q.partial_units
    out["product"] = first(
        (a, b)
        for a in factors
        for b in factors
        if alpha(q, q.mul(a, b)) != g.mul_sets(alpha(q, a), alpha(q, b))
    )
    out["involution"] = first(a for a in els if alpha(q, q.star(a)) != g.inv_set(alpha(q, a)))
    if alpha(q, q.top) != g.full:
        out["units"] = Verdict(False, ("top", q.top))
    elif alpha(q, q.unit) != g.units:
        out["units"] = Verdict(False, ("unit", q.unit))
    else:
        out["units"] = Verdict(True)
    if strict:
        for item, verdict in out.items():
            if not verdict:
                raise TheoremViolation(item, verdict.witness)
    return out


def alpha_base(q: FiniteQuantale) -> tuple[int, ...]:
    return tuple(sorted({alpha(q, f) for f in q.partial_units}))


def roundtrip_quantale(q: FiniteQuantale, budget: int = DEFAULT_BUDGET) -> dict:
    from .iso import quantale_isomorphic

    try:
        rec = reconstruct_groupoid(q)
    except Exception as exc:
        raise RoundTripFailure("quantale", "reconstruct", str(exc)) from exc
    family = alpha_base(q)
    report = check_selection_base(rec.groupoid, family)
    if not all(report.values()):
        raise RoundTripFailure("quantale", "selection_base", {k: v.witness for k, v in report.items() if not v})
    gq = build_gq(SelectionBase(rec.groupoid, tuple(sorted(set(family))), report), budget)
    iso = quantale_isomorphic(gq.quantale, q)
    if not iso:
        raise RoundTripFailure("quantale", "isomorphism", iso.reason)
    return {"reconstructed": rec, "gq": gq, "iso": iso}


def roundtrip_groupoid(groupoid: FiniteGroupoid, base: SelectionBase, budget: int = DEFAULT_BUDGET) -> dict:
    from .iso import groupoid_isomorphic

    gq = build_gq(base, budget)
    try:
        rec = reconstruct_groupoid(gq.quantale)
    except Exception as exc:
        raise RoundTripFailure("groupoid", "reconstruct", str(exc)) from exc
    iso = groupoid_isomorphic(groupoid, rec.groupoid)
    if not iso:
        raise RoundTripFailure("groupoid", "isomorphism", iso.reason)
    return {"gq": gq, "reconstructed": rec, "iso": iso}


def roundtrip(obj, base: SelectionBase | None = None, budget: int = DEFAULT_BUDGET) -> dict:
    """Dispatch on a quantale, a built groupoid quantale, or a groupoid with its base."""
    if isinstance(obj, GroupoidQuantale):
        return {
            "quantale": roundtrip_quantale(obj.quantale, budget),
            "groupoid": roundtrip_groupoid(obj.groupoid, obj.base, budget),
        }
    if isinstance(obj, FiniteGroupoid):
        if base is None:
            raise TypeError("a groupoid round trip needs a selection base")
        return {"groupoid": roundtrip_groupoid(obj, base, budget)}
    return {"quantale": roundtrip_quantale(obj, budget)}


def check_etale_lemma(q: FiniteQuantale) -> Verdict:
    """Incident f, g at p agree on some ``k <= d(f) ^ d(g)`` not below p.

    Skipped (``ok is None``) unless the quantale is an inverse quantal frame.
    """
    if not check_inverse_quantal_frame(q):
        return Verdict(None, "not an inverse quantal frame")
    an = _analysis(q)
    for p in an.primes:
        fs = an.pairs_at(p)
        for f in fs:
            for g in fs:
                if f == g or not incident(q, p, f, g):
                    continue
                bound = q.meet(q.d(f), q.d(g))
                if not any(
                    q.leq(k, bound) and not q.leq(k, p) and q.mul(k, f) == q.mul(k, g) for k in an.qe
                ):
                    return Verdict(False, (p, f, g))
    return Verdict(True)


def check_incidence_laws(q: FiniteQuantale, rec: ReconstructedGroupoid | None = None) -> dict[str, Verdict]:
    """Consequences of the SGF axioms for incidence and transport, checked exhaustively."""
    an = _analysis(q)
    qe = an.qe
    s, m = q.star, q.mul
    out: dict[str, Verdict] = {}
    pairs = incidence_pairs(q)
    pair_set = set(pairs)

    def first(gen):
        for w in gen:
            return Verdict(False, w)
        return Verdict(True)

    def conj(h, f):
        return m(m(s(f), h), f)

    def tr(p, f):
        return transport(q, p, f)

    out["transport_keeps_nonbelow"] = first(
        (p, f, h) for p, f in pairs for h in qe if not q.leq(h, p) and q.leq(conj(h, f), tr(p, f))
    )
    out["restriction_stays_incident"] = first(
        (p, f, h)
        for p, f in pairs
        for h in qe
        if not q.leq(h, p) and (q.leq(q.d(m(h, f)), p) or q.leq(q.r(m(h, f)), tr(p, f)))
    )
    out["incident_same_target"] = first(
        (p, f, g) for p, f in pairs for g in an.pairs_at(p) if incident(q, p, f, g) and tr(p, f) != tr(p, g)
    )
    out["inverse_pair"] = first(
        (p, f)
        for p, f in pairs
        if (tr(p, f), s(f)) not in pair_set or tr(tr(p, f), s(f)) != p
    )
    out["transport_composes"] = first(
        (p, f, g)
        for p, f in pairs
        for g in an.pairs_at(tr(p, f))
        if (p, m(f, g)) not in pair_set or tr(p, m(f, g)) != tr(tr(p, f), g)
    )
    out["domain_incident_to_unit"] = first(
        (p, f)
        for p, f in pairs
        if not incident(q, p, m(f, s(f)), q.unit) or not incident(q, tr(p, f), m(s(f), f), q.unit)
    )

    # products and inverses respect incidence classes
    incidence_classes(q)
    cls = an.class_of

    def product_bad():
        for c in an.classes:
            p = c.representative.p
            target = tr(*c.representative)
            targets = [k for k in an.classes if k.representative.p == target]
            for k in targets:
                images = {cls[(p, m(f, g))] for _, f in c.members for _, g in k.members}
                if len(images) != 1:
                    yield (c.representative, k.representative)

    out["product_respects_incidence"] = first(product_bad())
    out["inverse_respects_incidence"] = first(
        (p, f, g)
        for p, f in pairs
        for g in an.pairs_at(p)
        if incident(q, p, f, g) != incident(q, tr(p, f), s(f), s(g))
    )
    out["incident_upward"] = first(
        (p, f, g, g2)
        for p, f in pairs
        for g in an.pairs_at(p)
        if incident(q, p, f, g)
        for g2 in an.pairs_at(p)
        if q.leq(g, g2) and not incident(q, p, f, g2)
    )
    obstructions = {pair: class_obstruction(q, *pair) for pair in pairs}
    out["obstruction_membership"] = first(
        (p, f, g)
        for p, f in pairs
        for g in an.units
        if q.leq(g, obstructions[(p, f)]) != (q.leq(q.d(g), p) or not incident(q, p, g, f))
    )
    out["obstruction_class_invariant"] = first(
        (c.representative, pair) for c in an.classes for pair in c.members if obstructions[pair] != obstructions[c.representative]
    )
    out["prime_below_obstruction"] = first((p, f) for p, f in pairs if not q.leq(p, obstructions[(p, f)]))

    spatial = check_spatial(q)
    if spatial:
        out["Qe_spatial"] = first(
            # the empty meet inside the downset of e is e itself
            h for h in qe if q.meet(q.unit, q.meet_all(p for p in an.primes if q.leq(h, p))) != h
        )
    else:
        out["Qe_spatial"] = Verdict(None, "quantale is not spatial")

    rec = rec or reconstruct_groupoid(q)
    g = rec.groupoid
    pidx = {p: i for i, p in enumerate(an.primes)}

    def alpha_shape():
        for f in an.units:
            expected = 0
            for p in an.primes:
                if not q.leq(q.d(f), p):
                    expected |= 1 << cls[(p, f)]
            if alpha(q, f) != expected:
                yield f

    out["alpha_of_partial_unit"] = first(alpha_shape())
    out["alpha_monotone"] = first(
        (f, h) for f in an.units for h in an.units if q.leq(f, h) and alpha(q, f) & ~alpha(q, h)
    )
    base_report = check_selection_base(g, alpha_base(q))
    out["alpha_selection_base"] = first(k for k, v in base_report.items() if not v)
    out["unit_opens_match"] = Verdict(
        set(g.space.opens) == _unit_opens(q, an.primes) and len(pidx) == len(g.space.points)
    )
    return out
