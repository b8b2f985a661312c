"""Selection bases and the groupoid quantale they generate."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .bits import Verdict, canonical_key, iter_bits
from .errors import SelectionBaseError, SizeBudgetExceeded, RecoveryFailure
from .groupoid import FiniteGroupoid, GroupAction, is_bisection_image, orbit_relation_groupoid
from .quantale import SubsetQuantale, prime_elements_of_Qe
from .topology import is_union_of_locally_closed

DEFAULT_BUDGET = 1 << 20


@dataclass(frozen=True, eq=False)
class SelectionBase:
    groupoid: FiniteGroupoid
    members: tuple[int, ...]
    axiom_report: dict

    def names(self) -> list[list[str]]:
        return [self.groupoid.names(s) for s in self.members]


def compatible(g: FiniteGroupoid, s: int, t: int) -> bool:
    e = g.units
    return g.mul_sets(s, g.inv_set(t)) & ~e == 0 and g.mul_sets(g.inv_set(s), t) & ~e == 0


def agreement_set(g: FiniteGroupoid, s: int, t: int) -> int:
    """Points where the two local bisections are both defined and equal."""
    return g.d_image(s & t)


def check_selection_base(groupoid: FiniteGroupoid, family: Iterable[int], verify: bool = False) -> dict[str, Verdict]:
    """Per-axiom verdicts for SB1-SB5, plus ``bisections`` for the precondition.

    With ``verify`` the SB3 verdict is cross-checked against subfamily
    enumeration (when the family is small) and SB4 against the brute-force
    locally-closed test.
    """
    g = groupoid
    members = sorted(set(family), key=canonical_key)
    present = set(members)
    space = g.space
    report: dict[str, Verdict] = {}

    bad = next((s for s in members if not is_bisection_image(g, s)), None)
    report["bisections"] = Verdict(bad is None, None if bad is None else g.names(bad))

    report["SB1"] = Verdict(True)
    if g.units not in present:
        report["SB1"] = Verdict(False, ("unit", g.names(g.units)))
    else:
        for s in members:
            if g.inv_set(s) not in present:
                report["SB1"] = Verdict(False, ("inverse", g.names(s)))
                break
        else:
            for s in members:
                hit = next((t for t in members if g.mul_sets(s, t) not in present), None)
                if hit is not None:
                    report["SB1"] = Verdict(False, ("product", g.names(s), g.names(hit)))
                    break

    missing = next((u for u in space.opens if g.unit_image(u) not in present), None)
    report["SB2"] = Verdict(missing is None, None if missing is None else space.names(missing))

    report["SB3"] = Verdict(True)
    if 0 not in present:
        report["SB3"] = Verdict(False, ("empty", []))
    else:
        for s, t in combinations(members, 2):
            if s | t not in present and compatible(g, s, t):
                report["SB3"] = Verdict(False, (g.names(s), g.names(t)))
                break
    if verify and len(members) <= 12:
        if bool(report["SB3"]) != sb3_exhaustive(g, members):
            raise AssertionError("SB3 binary reduction disagrees with subfamily enumeration")

    report["SB4"] = Verdict(True)
    for s, t in combinations(members, 2):
        agree = agreement_set(g, s, t)
        if not is_union_of_locally_closed(space, agree, verify=verify):
            report["SB4"] = Verdict(False, (g.names(s), g.names(t), space.names(agree)))
            break

    covered = 0
    for s in members:
        covered |= s
    report["SB5"] = Verdict(covered == g.full, None if covered == g.full else g.names(g.full & ~covered))
    return report


def sb3_exhaustive(groupoid: FiniteGroupoid, family: Iterable[int]) -> bool:
    """SB3 by enumerating every pairwise compatible subfamily."""
    g = groupoid
    members = sorted(set(family), key=canonical_key)
    present = set(members)
    k = len(members)
    compat = [0] * k
    for i in range(k):
        for j in range(k):
            if compatible(g, members[i], members[j]):
                compat[i] |= 1 << j
    for sub in range(1 << k):
        union = 0
        ok = True
        for i in iter_bits(sub):
            if sub & ~compat[i]:
                ok = False
                break
            union |= members[i]
        if ok and union not in present:
            return False
    return True


def validate_selection_base(groupoid: FiniteGroupoid, family: Iterable[int], verify: bool = False) -> SelectionBase:
    members = tuple(sorted(set(family), key=canonical_key))
    report = check_selection_base(groupoid, members, verify=verify)
    failed = [k for k, v in report.items() if not v]
    if failed:
        raise SelectionBaseError(f"selection base fails {', '.join(failed)}", report)
    return SelectionBase(groupoid, members, report)


def _close_family(g: FiniteGroupoid, seeds: Iterable[int]) -> set[int]:
    """Closure under lifted product, involution and compatible binary unions."""
    family = set(seeds)
    frontier = list(family)
    while frontier:
        new = []
        current = list(family)
        for s in frontier:
            candidates = [g.inv_set(s)]
            for t in current:
                candidates.append(g.mul_sets(s, t))
                candidates.append(g.mul_sets(t, s))
                if compatible(g, s, t):
                    candidates.append(s | t)
            for c in candidates:
                if c not in family:
                    family.add(c)
                    new.append(c)
                    current.append(c)
        frontier = new
    return family


def canonical_base_from_action(action: GroupAction, relation_groupoid: FiniteGroupoid | None = None) -> tuple[int, ...]:
    """Graphs of ``x -> (x, g.x)`` over every open, closed up to a selection base.

    Gluing compatible pieces gives the locally constant assignments of group
    elements; the result is validated before it is returned.
    """
    g = relation_groupoid if relation_groupoid is not None else orbit_relation_groupoid(action)
    space = action.space
    pts = space.points
    seeds = set()
    for k in range(len(action.elements)):
        for u in space.opens:
            seeds.add(g.mask(f"({pts[x]},{pts[action.act[k][x]]})" for x in iter_bits(u)))
    family = _close_family(g, seeds)
    return validate_selection_base(g, family).members


def unit_base(groupoid: FiniteGroupoid) -> tuple[int, ...]:
    return tuple(sorted({groupoid.unit_image(u) for u in groupoid.space.opens}, key=canonical_key))


@dataclass(frozen=True, eq=False)
class GroupoidQuantale:
    quantale: SubsetQuantale
    base: SelectionBase

    @property
    def groupoid(self) -> FiniteGroupoid:
        return self.base.groupoid


def union_closure(members: Iterable[int], budget: int = DEFAULT_BUDGET) -> set[int]:
    members = list(members)
    elements = {0}
    frontier = [0]
    while frontier:
        new = []
        for x in frontier:
            for s in members:
                y = x | s
                if y not in elements:
                    elements.add(y)
                    new.append(y)
                    if len(elements) > budget:
                        raise SizeBudgetExceeded(f"union closure exceeds {budget} elements")
        frontier = new
    return elements


def naive_union_closure(groupoid: FiniteGroupoid, members: Iterable[int]) -> set[int]:
    """All arrow subsets that are the union of the members they contain."""
    members = list(members)
    out = set()
    for a in range(1 << groupoid.m):
        acc = 0
        for s in members:
            if s & ~a == 0:
                acc |= s
        if acc == a:
            out.add(a)
    return out


def build_gq(base: SelectionBase, budget: int = DEFAULT_BUDGET) -> GroupoidQuantale:
    elements = union_closure(base.members, budget)
    q = SubsetQuantale(base.groupoid, elements, [s for s in base.members if s])
    return GroupoidQuantale(q, base)


def check_recovery(gq: GroupoidQuantale, strict: bool = False) -> dict[str, Verdict]:
    """Partial units are the base, the downset of E is u[opens], primes are u[complement of closures]."""
    q = gq.quantale
    g = gq.groupoid
    space = g.space
    report = {}
    units = {q.masks[i] for i in q.partial_units}
    base = set(gq.base.members)
    report["partial_units"] = Verdict(units == base, None if units == base else sorted(units ^ base))
    below = {q.masks[i] for i in q.below_e}
    opens = {g.unit_image(u) for u in space.opens}
    report["unit_downset"] = Verdict(below == opens, None if below == opens else sorted(below ^ opens))
    primes = {q.masks[i] for i in prime_elements_of_Qe(q)}
    expected = {g.unit_image(space.full & ~space.closure_mask(i)) for i in range(len(space.points))}
    report["primes"] = Verdict(primes == expected, None if primes == expected else sorted(primes ^ expected))
    if strict:
        for which, verdict in report.items():
            if not verdict:
                raise RecoveryFailure(which, verdict.witness)
    return report


def is_topological_base(base: SelectionBase) -> Verdict:
    """Every point of a pairwise intersection lies in a member inside the intersection."""
    g = base.groupoid
    members = base.members
    for s, t in combinations(members, 2):
        inter = s & t
        if not inter:
            continue
        covered = 0
        for m in members:
            if m & ~inter == 0:
                covered |= m
        if covered != inter:
            x = next(iter_bits(inter & ~covered))
            return Verdict(False, {"pair": (g.names(s), g.names(t)), "arrow": g.arrows[x]})
    return Verdict(True)
