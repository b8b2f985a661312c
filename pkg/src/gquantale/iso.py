"""Isomorphism search with self-verifying certificates.

Quantale maps are determined by their values on join-irreducibles, so the
search assigns those first (pruned by invariant signatures, order, involution
and products) and extends by joins. Groupoid maps pick a homeomorphism of the
unit spaces first, then extend fibrewise over arrows.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import permutations
from typing import Any, Sequence

from .bits import iter_bits, mask_of
from .errors import BudgetExceeded
from .groupoid import FiniteGroupoid
from .quantale import FiniteQuantale
from .topology import FiniteSpace

DEFAULT_BUDGET = 2_000_000


@dataclass(frozen=True)
class NotIsomorphic:
    """Falsy outcome carrying the invariant that separates the two structures."""

    invariant: str
    values: tuple[Any, Any]

    def __bool__(self) -> bool:
        return False

    @property
    def reason(self) -> str:
        return f"{self.invariant} differs: {self.values[0]!r} vs {self.values[1]!r}"


@dataclass(frozen=True)
class QuantaleIso:
    mapping: tuple[int, ...]

    def verify(self, q1: FiniteQuantale, q2: FiniteQuantale) -> bool:
        return _verify_quantale_map(q1, q2, self.mapping)

    def to_json(self) -> list[int]:
        return list(self.mapping)


@dataclass(frozen=True)
class GroupoidIso:
    phi0: tuple[int, ...]
    phi1: tuple[int, ...]

    def verify(self, g1: FiniteGroupoid, g2: FiniteGroupoid) -> bool:
        return _verify_groupoid_map(g1, g2, self.phi0, self.phi1)

    def to_json(self) -> dict:
        return {"phi0": list(self.phi0), "phi1": list(self.phi1)}


# -- quantales ---------------------------------------------------------------


def _signature(q: FiniteQuantale, a: int) -> tuple:
    up = sum(1 for b in q.elements if q.leq(a, b))
    down = sum(1 for b in q.elements if q.leq(b, a))
    return (
        a == q.unit,
        up,
        down,
        a in q.partial_unit_set,
        a in q.below_e_set,
        q.mul(a, a) == a,
        q.star(a) == a,
        q.leq(q.r(a), q.unit),
    )


def _quantale_invariants(q: FiniteQuantale) -> dict[str, Any]:
    return {
        "size": q.n,
        "unit downset size": len(q.below_e),
        "partial unit count": len(q.partial_units),
        "join-irreducible count": len(q.join_irreducibles),
        "element signatures": tuple(sorted(Counter(_signature(q, a) for a in q.elements).items())),
    }


def _verify_quantale_map(q1: FiniteQuantale, q2: FiniteQuantale, phi: Sequence[int]) -> bool:
    if q1.n != q2.n or len(phi) != q1.n or sorted(phi) != list(range(q2.n)):
        return False
    if phi[q1.unit] != q2.unit:
        return False
    for a in q1.elements:
        for b in q1.elements:
            if q1.leq(a, b) != q2.leq(phi[a], phi[b]):
                return False
    # an order isomorphism preserves joins, so products and the involution
    # need only be checked on join-irreducibles
    jis = q1.join_irreducibles
    for a in jis:
        if phi[q1.star(a)] != q2.star(phi[a]):
            return False
        for b in jis:
            if phi[q1.mul(a, b)] != q2.mul(phi[a], phi[b]):
                return False
    return True


def quantale_isomorphic(
    q1: FiniteQuantale,
    q2: FiniteQuantale,
    budget: int = DEFAULT_BUDGET,
    hint: Sequence[int] | None = None,
) -> QuantaleIso | NotIsomorphic:
    if hint is not None and _verify_quantale_map(q1, q2, hint):
        return QuantaleIso(tuple(hint))
    inv1, inv2 = _quantale_invariants(q1), _quantale_invariants(q2)
    for key in inv1:
        if inv1[key] != inv2[key]:
            return NotIsomorphic(key, (inv1[key], inv2[key]))

    jis1 = list(q1.join_irreducibles)
    jis2 = list(q2.join_irreducibles)
    sig1 = {a: _signature(q1, a) for a in jis1}
    sig2 = {b: _signature(q2, b) for b in jis2}
    rarity = Counter(sig1.values())
    # low elements first so that products become checkable early
    jis1.sort(key=lambda a: (sig1[a][2], rarity[sig1[a]], a))
    below1 = {a: [j for j in q1.join_irreducibles if q1.leq(j, a)] for a in q1.elements}
    star1 = {a: q1.star(a) for a in jis1}

    assigned: dict[int, int] = {}
    used: set[int] = set()
    nodes = 0

    def image(x: int) -> int | None:
        acc = q2.bottom
        for j in below1[x]:
            v = assigned.get(j)
            if v is None:
                return None
            acc = q2.join(acc, v)
        return acc

    def consistent(a: int, b: int) -> bool:
        for c, d in assigned.items():
            if q1.leq(a, c) != q2.leq(b, d) or q1.leq(c, a) != q2.leq(d, b):
                return False
        sa = star1[a]
        if sa == a and q2.star(b) != b:
            return False
        if sa in assigned and assigned[sa] != q2.star(b):
            return False
        assigned[a] = b
        ok = True
        for c, d in list(assigned.items()):
            for x, y in ((a, c), (c, a)):
                img = image(q1.mul(x, y))
                if img is not None and img != q2.mul(assigned[x], assigned[y]):
                    ok = False
                    break
            if not ok:
                break
        del assigned[a]
        return ok

    def search(i: int) -> tuple[int, ...] | None:
        nonlocal nodes
        if i == len(jis1):
            phi = tuple(image(x) for x in q1.elements)
            return phi if _verify_quantale_map(q1, q2, phi) else None
        a = jis1[i]
        for b in jis2:
            if b in used or sig2[b] != sig1[a]:
                continue
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"quantale isomorphism search exceeded {budget} nodes")
            if not consistent(a, b):
                continue
            assigned[a] = b
            used.add(b)
            found = search(i + 1)
            if found is not None:
                return found
            del assigned[a]
            used.discard(b)
        return None

    phi = search(0)
    if phi is None:
        return NotIsomorphic("exhaustive search", ("no isomorphism", "no isomorphism"))
    return QuantaleIso(phi)


# -- posets and spaces ---------------------------------------------------------


def poset_isomorphic(leq1: Sequence[Sequence[bool]], leq2: Sequence[Sequence[bool]]) -> tuple[int, ...] | None:
    """Exhaustive order-isomorphism search between two small posets."""
    n = len(leq1)
    if n != len(leq2):
        return None
    for perm in permutations(range(n)):
        if all(leq1[a][b] == leq2[perm[a]][perm[b]] for a in range(n) for b in range(n)):
            return perm
    return None


def open_lattice(space: FiniteSpace) -> list[list[bool]]:
    return [[a & ~b == 0 for b in space.opens] for a in space.opens]


def _lattice_profile(space: FiniteSpace) -> tuple:
    opens = space.opens
    return tuple(
        sorted((sum(1 for b in opens if b & ~a == 0), sum(1 for b in opens if a & ~b == 0)) for a in opens)
    )


def _homeomorphisms(s1: FiniteSpace, s2: FiniteSpace):
    n = len(s1.points)
    spec1 = [s1.closure_mask(i) for i in range(n)]
    spec2 = [s2.closure_mask(i) for i in range(n)]
    sig1 = [(spec1[i].bit_count(), s1.minimal_open(i).bit_count()) for i in range(n)]
    sig2 = [(spec2[i].bit_count(), s2.minimal_open(i).bit_count()) for i in range(n)]
    opens2 = s2.open_set
    phi = [-1] * n
    used = [False] * n

    def rec(i):
        if i == n:
            if all(mask_of(phi[x] for x in iter_bits(u)) in opens2 for u in s1.opens):
                yield tuple(phi)
            return
        for j in range(n):
            if used[j] or sig1[i] != sig2[j]:
                continue
            ok = all(
                bool(spec1[i] >> k & 1) == bool(spec2[j] >> phi[k] & 1)
                and bool(spec1[k] >> i & 1) == bool(spec2[phi[k]] >> j & 1)
                for k in range(i)
            )
            if not ok:
                continue
            phi[i] = j
            used[j] = True
            yield from rec(i + 1)
            used[j] = False
            phi[i] = -1

    yield from rec(0)


# -- groupoids -----------------------------------------------------------------


def _groupoid_invariants(g: FiniteGroupoid) -> dict[str, Any]:
    npts = len(g.space.points)
    fibers = Counter(
        (len(g.d_fibers[p]), len(g.by_ends.get((p, p), [])), g.space.closure_mask(p).bit_count()) for p in range(npts)
    )
    return {
        "unit count": npts,
        "arrow count": g.m,
        "open count": len(g.space.opens),
        "open-set lattice shape": _lattice_profile(g.space),
        "arrow fiber profile": tuple(sorted(fibers.items())),
    }


def _verify_groupoid_map(g1: FiniteGroupoid, g2: FiniteGroupoid, phi0, phi1) -> bool:
    n = len(g1.space.points)
    if len(g2.space.points) != n or g1.m != g2.m:
        return False
    if sorted(phi0) != list(range(n)) or sorted(phi1) != list(range(g2.m)):
        return False
    images = {mask_of(phi0[x] for x in iter_bits(u)) for u in g1.space.opens}
    if images != set(g2.space.opens):
        return False
    for x in range(g1.m):
        y = phi1[x]
        if g2.d[y] != phi0[g1.d[x]] or g2.r[y] != phi0[g1.r[x]]:
            return False
        if phi1[g1.inverse[x]] != g2.inverse[y]:
            return False
        for z in g1.d_fibers[g1.r[x]]:
            if phi1[g1.product[x][z]] != g2.product[y][phi1[z]]:
                return False
    return all(phi1[g1.u[p]] == g2.u[phi0[p]] for p in range(n))


def _extend_arrows(g1: FiniteGroupoid, g2: FiniteGroupoid, phi0, budget, counter):
    order = sorted(range(g1.m), key=lambda x: (g1.d[x], g1.r[x], x))
    phi1 = [-1] * g1.m
    used = [False] * g2.m

    def consistent(x, y):
        for z in g1.d_fibers[g1.r[x]]:
            w = phi1[z]
            if w >= 0 and phi1[g1.product[x][z]] >= 0 and phi1[g1.product[x][z]] != g2.product[y][w]:
                return False
        xi = g1.inverse[x]
        if phi1[xi] >= 0 and g2.inverse[y] != phi1[xi]:
            return False
        if xi == x and g2.inverse[y] != y:
            return False
        return True

    def rec(i):
        if i == len(order):
            return tuple(phi1) if _verify_groupoid_map(g1, g2, phi0, phi1) else None
        x = order[i]
        for y in g2.by_ends.get((phi0[g1.d[x]], phi0[g1.r[x]]), []):
            if used[y]:
                continue
            counter[0] += 1
            if counter[0] > budget:
                raise BudgetExceeded(f"groupoid isomorphism search exceeded {budget} nodes")
            if not consistent(x, y):
                continue
            phi1[x] = y
            used[y] = True
            found = rec(i + 1)
            if found is not None:
                return found
            phi1[x] = -1
            used[y] = False
        return None

    return rec(0)


def groupoid_isomorphic(g1: FiniteGroupoid, g2: FiniteGroupoid, budget: int = DEFAULT_BUDGET) -> GroupoidIso | NotIsomorphic:
    inv1, inv2 = _groupoid_invariants(g1), _groupoid_invariants(g2)
    for key in inv1:
        if inv1[key] != inv2[key]:
            return NotIsomorphic(key, (inv1[key], inv2[key]))
    counter = [0]
    for phi0 in _homeomorphisms(g1.space, g2.space):
        phi1 = _extend_arrows(g1, g2, phi0, budget, counter)
        if phi1 is not None:
            return GroupoidIso(phi0, phi1)
    return NotIsomorphic("exhaustive search", ("no isomorphism", "no isomorphism"))
