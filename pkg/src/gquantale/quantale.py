"""Finite unital involutive quantales.

Elements are indices ``0..n-1``. :class:`FiniteQuantale` holds dense tables;
:class:`SubsetQuantale` is a union-closed family of arrow subsets of a
groupoid with the lifted product and involution, evaluated lazily on
bitmasks so that large families never need an ``n x n`` table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .bits import Verdict, canonical_key, iter_bits
from .errors import (
    ArgumentsOutOfDomain,
    DistributivityFail,
    InvalidQuantale,
    InvolutionFail,
    NotAssociative,
    NotLattice,
    NotOperationClosed,
    NotUnionClosed,
    UnitFail,
)
from .groupoid import FiniteGroupoid
from .topology import FiniteSpace


class FiniteQuantale:
    """A finite lattice with product, involution and unit given by tables."""

    def __init__(self, leq, product, involution, unit: int, labels: Sequence[str] | None = None):
        n = len(leq)
        self.n = n
        self._leq = tuple(tuple(bool(v) for v in row) for row in leq)
        self._product = tuple(tuple(row) for row in product)
        self._star = tuple(involution)
        self.unit = unit
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(n))
        if len(self._product) != n or any(len(row) != n for row in self._product):
            raise InvalidQuantale("product table is not n x n", [("shape", n)])
        if len(self._star) != n or not 0 <= unit < n:
            raise InvalidQuantale("involution or unit out of range", [("shape", n)])
        for table in (self._product, (self._star,)):
            for row in table:
                if any(not 0 <= v < n for v in row):
                    raise InvalidQuantale("table entry out of range", [("range", row)])
        self._up = [sum(1 << j for j in range(n) if self._leq[i][j]) for i in range(n)]
        self._down = [sum(1 << j for j in range(n) if self._leq[j][i]) for i in range(n)]
        self._join = [[self._bound(self._up[a] & self._up[b], self._up, (a, b), "join") for b in range(n)] for a in range(n)]
        self._meet = [[self._bound(self._down[a] & self._down[b], self._down, (a, b), "meet") for b in range(n)] for a in range(n)]
        bottoms = [i for i in range(n) if self._up[i] == (1 << n) - 1]
        tops = [i for i in range(n) if self._down[i] == (1 << n) - 1]
        if len(bottoms) != 1 or len(tops) != 1:
            raise NotLattice("no bottom or top", [("bounds", (bottoms, tops))])
        self.bottom = bottoms[0]
        self.top = tops[0]

    @staticmethod
    def _bound(candidates: int, cone, pair, kind) -> int:
        for c in iter_bits(candidates):
            if candidates & ~cone[c] == 0:
                return c
        raise NotLattice(f"no {kind} for {pair}", [(kind, pair)])

    # primitive operations
    def leq(self, a: int, b: int) -> bool:
        return self._leq[a][b]

    def join(self, a: int, b: int) -> int:
        return self._join[a][b]

    def meet(self, a: int, b: int) -> int:
        return self._meet[a][b]

    def mul(self, a: int, b: int) -> int:
        return self._product[a][b]

    def star(self, a: int) -> int:
        return self._star[a]

    # derived
    @property
    def elements(self) -> range:
        return range(self.n)

    def join_all(self, items: Iterable[int]) -> int:
        acc = self.bottom
        for x in items:
            acc = self.join(acc, x)
        return acc

    def meet_all(self, items: Iterable[int]) -> int:
        acc = self.top
        for x in items:
            acc = self.meet(acc, x)
        return acc

    def d(self, f: int) -> int:
        return self.mul(f, self.star(f))

    def r(self, f: int) -> int:
        return self.mul(self.star(f), f)

    @cached_property
    def below_e(self) -> tuple[int, ...]:
        return tuple(a for a in self.elements if self.leq(a, self.unit))

    @cached_property
    def functional(self) -> tuple[int, ...]:
        return tuple(a for a in self.elements if self.leq(self.r(a), self.unit))

    @cached_property
    def partial_units(self) -> tuple[int, ...]:
        e = self.unit
        return tuple(a for a in self.functional if self.leq(self.d(a), e))

    @cached_property
    def partial_unit_set(self) -> frozenset[int]:
        return frozenset(self.partial_units)

    @cached_property
    def below_e_set(self) -> frozenset[int]:
        return frozenset(self.below_e)

    @cached_property
    def join_irreducibles(self) -> tuple[int, ...]:
        out = []
        for a in self.elements:
            if a == self.bottom:
                continue
            below = self.join_all(b for b in self.elements if b != a and self.leq(b, a))
            if below != a:
                out.append(a)
        return tuple(out)

    def leq_matrix(self) -> list[list[bool]]:
        return [[self.leq(a, b) for b in self.elements] for a in self.elements]

    def product_table(self) -> list[list[int]]:
        return [[self.mul(a, b) for b in self.elements] for a in self.elements]

    def involution_table(self) -> list[int]:
        return [self.star(a) for a in self.elements]

    def to_table(self) -> "FiniteQuantale":
        return FiniteQuantale(self.leq_matrix(), self.product_table(), self.involution_table(), self.unit, self.labels)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "leq": [[a, b] for a in self.elements for b in self.elements if a != b and self.leq(a, b)],
            "product": self.product_table(),
            "involution": self.involution_table(),
            "unit": self.unit,
        }


class SubsetQuantale(FiniteQuantale):
    """Union-closed family of arrow subsets with lifted product and involution.

    ``masks`` must be closed under unions; ``generators`` must join-generate it
    (meets are computed as the union of generators inside the intersection).
    """

    def __init__(self, groupoid: FiniteGroupoid, masks: Iterable[int], generators: Iterable[int] | None = None):
        self.groupoid = groupoid
        self.masks = tuple(sorted(set(masks), key=canonical_key))
        self.pos = {m: i for i, m in enumerate(self.masks)}
        self.n = len(self.masks)
        if 0 not in self.pos:
            raise NotUnionClosed("family lacks the empty union", [("empty", 0)])
        if groupoid.units not in self.pos:
            raise NotOperationClosed("family lacks the unit E", [("unit", groupoid.units)])
        self.bottom = 0
        self.top = self.n - 1
        self.unit = self.pos[groupoid.units]
        self.generators = tuple(sorted(set(generators), key=canonical_key)) if generators is not None else self.masks
        self._mul_cache: dict[tuple[int, int], int] = {}
        self._meet_cache: dict[tuple[int, int], int] = {}
        self._star_cache: dict[int, int] = {}

    @cached_property
    def labels(self) -> tuple[str, ...]:
        return tuple("{" + ",".join(self.groupoid.names(m)) + "}" for m in self.masks)

    def index_of(self, mask: int) -> int:
        try:
            return self.pos[mask]
        except KeyError:
            raise NotOperationClosed(f"{self.groupoid.names(mask)} is not in the family", [("missing", mask)]) from None

    def leq(self, a: int, b: int) -> bool:
        return self.masks[a] & ~self.masks[b] == 0

    def join(self, a: int, b: int) -> int:
        return self.index_of(self.masks[a] | self.masks[b])

    def meet(self, a: int, b: int) -> int:
        key = (a, b) if a <= b else (b, a)
        hit = self._meet_cache.get(key)
        if hit is None:
            inter = self.masks[a] & self.masks[b]
            if inter in self.pos:
                hit = self.pos[inter]
            else:
                acc = 0
                for g in self.generators:
                    if g & ~inter == 0:
                        acc |= g
                hit = self.index_of(acc)
            self._meet_cache[key] = hit
        return hit

    def mul(self, a: int, b: int) -> int:
        key = (a, b)
        hit = self._mul_cache.get(key)
        if hit is None:
            hit = self.index_of(self.groupoid.mul_sets(self.masks[a], self.masks[b]))
            self._mul_cache[key] = hit
        return hit

    def star(self, a: int) -> int:
        hit = self._star_cache.get(a)
        if hit is None:
            hit = self.index_of(self.groupoid.inv_set(self.masks[a]))
            self._star_cache[a] = hit
        return hit

    def join_all(self, items: Iterable[int]) -> int:
        acc = 0
        for x in items:
            acc |= self.masks[x]
        return self.index_of(acc)

    @cached_property
    def join_irreducibles(self) -> tuple[int, ...]:
        out = []
        for i, m in enumerate(self.masks):
            if not m:
                continue
            below = 0
            for g in self.generators:
                if g != m and g & ~m == 0:
                    below |= g
            if below != m:
                out.append(i)
        return tuple(out)


# -- construction ----------------------------------------------------------------


def _order_closure(n: int, pairs: Iterable[Sequence[int]]) -> list[list[bool]]:
    leq = [[i == j for j in range(n)] for i in range(n)]
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise NotLattice("order pair out of range", [("range", (a, b))])
        leq[a][b] = True
    for k in range(n):
        for i in range(n):
            if leq[i][k]:
                row_k = leq[k]
                row_i = leq[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    for i in range(n):
        for j in range(i + 1, n):
            if leq[i][j] and leq[j][i]:
                raise NotLattice("order is not antisymmetric", [("antisymmetry", (i, j))])
    return leq


def quantale_from_json(data: Mapping) -> FiniteQuantale:
    n = int(data["n"])
    if "leq_matrix" in data:
        leq = [[bool(v) for v in row] for row in data["leq_matrix"]]
        if len(leq) != n or any(len(row) != n for row in leq):
            raise NotLattice("order matrix is not n x n", [("shape", n)])
        leq = _order_closure(n, [(i, j) for i in range(n) for j in range(n) if leq[i][j]])
    else:
        leq = _order_closure(n, data.get("leq", []))
    return FiniteQuantale(leq, data["product"], data["involution"], int(data["unit"]), data.get("labels"))


def quantale_report(q: FiniteQuantale) -> dict[str, Verdict]:
    """Per-axiom verdicts; witnesses are the lowest-index failing tuples.

    Distributivity is checked on binary joins and the zero law, which on a
    finite lattice is equivalent to distributivity over all joins.
    """
    els = q.elements
    out: dict[str, Verdict] = {}

    def first(gen):
        for w in gen:
            return Verdict(False, w)
        return Verdict(True)

    out["associativity"] = first(
        (a, b, c) for a in els for b in els for c in els if q.mul(q.mul(a, b), c) != q.mul(a, q.mul(b, c))
    )
    out["D1"] = first(
        (c, a, b) for c in els for a in els for b in els if a < b and q.mul(c, q.join(a, b)) != q.join(q.mul(c, a), q.mul(c, b))
    )
    out["D2"] = first(
        (c, a, b) for c in els for a in els for b in els if a < b and q.mul(q.join(a, b), c) != q.join(q.mul(a, c), q.mul(b, c))
    )
    out["zero"] = first(c for c in els if q.mul(c, q.bottom) != q.bottom or q.mul(q.bottom, c) != q.bottom)
    out["U"] = first(a for a in els if q.mul(q.unit, a) != a or q.mul(a, q.unit) != a)
    out["I1"] = first(a for a in els if q.star(q.star(a)) != a)
    out["I2"] = first((a, b) for a in els for b in els if q.star(q.mul(a, b)) != q.mul(q.star(b), q.star(a)))
    out["I3"] = first(
        (a, b) for a in els for b in els if a < b and q.star(q.join(a, b)) != q.join(q.star(a), q.star(b))
    )
    if out["I3"] and q.star(q.bottom) != q.bottom:
        out["I3"] = Verdict(False, (q.bottom,))
    return out


_AXIOM_ERRORS = {
    "associativity": NotAssociative,
    "D1": DistributivityFail,
    "D2": DistributivityFail,
    "zero": DistributivityFail,
    "U": UnitFail,
    "I1": InvolutionFail,
    "I2": InvolutionFail,
    "I3": InvolutionFail,
}


def validate_quantale(data) -> FiniteQuantale:
    """Check every unital involutive quantale axiom; raise on the first failure."""
    q = data if isinstance(data, FiniteQuantale) else quantale_from_json(data)
    report = quantale_report(q)
    failed = [(k, v.witness) for k, v in report.items() if not v]
    if failed:
        axiom = failed[0][0]
        err = _AXIOM_ERRORS[axiom]
        side = {"D1": "left", "D2": "right"}.get(axiom)
        exc = err(f"axiom {axiom} fails at {failed[0][1]}", failed)
        exc.side = side
        raise exc
    return q


def distributivity_exhaustive(q: FiniteQuantale) -> bool:
    """Product distributes over the join of every subset, in both coordinates."""
    n = q.n
    for subset in range(1 << n):
        members = list(iter_bits(subset))
        j = q.join_all(members)
        for c in q.elements:
            if q.mul(c, j) != q.join_all(q.mul(c, x) for x in members):
                return False
            if q.mul(j, c) != q.join_all(q.mul(x, c) for x in members):
                return False
    return True


def distributivity_binary(q: FiniteQuantale) -> bool:
    report = quantale_report(q)
    return bool(report["D1"]) and bool(report["D2"]) and bool(report["zero"])


def from_subset_family(groupoid: FiniteGroupoid, family: Iterable[int], generators: Iterable[int] | None = None) -> SubsetQuantale:
    """Quantale of a union-closed family of arrow subsets, ordered by inclusion."""
    masks = sorted(set(family), key=canonical_key)
    present = set(masks)
    if 0 not in present:
        raise NotUnionClosed("family lacks the empty set", [("empty", 0)])
    for a, b in combinations(masks, 2):
        if a | b not in present:
            raise NotUnionClosed("family is not closed under unions", [("union", (a, b))])
    q = SubsetQuantale(groupoid, masks, generators)
    g = groupoid
    gens = [q.masks[i] for i in q.join_irreducibles]
    for a in gens:
        if g.inv_set(a) not in present:
            raise NotOperationClosed("family is not closed under involution", [("involution", a)])
        for b in gens:
            if g.mul_sets(a, b) not in present:
                raise NotOperationClosed("family is not closed under product", [("product", (a, b))])
    return q


def powerset_quantale(groupoid: FiniteGroupoid) -> SubsetQuantale:
    singletons = [1 << x for x in range(groupoid.m)]
    return SubsetQuantale(groupoid, range(1 << groupoid.m), singletons)


def frame_quantale(space: FiniteSpace) -> FiniteQuantale:
    """The frame of opens as a quantale: product is meet, trivial involution, unit the top."""
    opens = space.opens
    pos = {u: i for i, u in enumerate(opens)}
    n = len(opens)
    leq = [[a & ~b == 0 for b in opens] for a in opens]
    product = [[pos[a & b] for b in opens] for a in opens]
    return FiniteQuantale(leq, product, list(range(n)), pos[space.full], ["{" + ",".join(space.names(u)) + "}" for u in opens])


# -- partial units and axioms -------------------------------------------------------


@dataclass(frozen=True)
class PartialUnitSet:
    partial_units: tuple[int, ...]
    functional: tuple[int, ...]
    below_e: tuple[int, ...]


def partial_units(q: FiniteQuantale) -> PartialUnitSet:
    return PartialUnitSet(q.partial_units, q.functional, q.below_e)


def check_SG(q: FiniteQuantale) -> Verdict:
    for a in q.elements:
        if not q.leq(a, q.mul(q.mul(a, q.star(a)), a)):
            return Verdict(False, a)
    return Verdict(True)


@dataclass(frozen=True)
class SGFReport:
    sgf1: bool
    sgf2: bool
    sgf3: bool
    witnesses: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.sgf1 and self.sgf2 and self.sgf3


def _sgf1_witness(q: FiniteQuantale):
    units = q.partial_units
    for a in q.elements:
        if q.join_all(f for f in units if q.leq(f, a)) != a:
            return a
    return None


def check_SGF(q: FiniteQuantale) -> SGFReport:
    witnesses = {}
    w1 = _sgf1_witness(q)
    if w1 is not None:
        witnesses["sgf1"] = w1
    units = q.partial_units
    for f in units:
        if q.mul(q.mul(f, q.star(f)), f) != f:
            witnesses["sgf2"] = f
            break
    one = q.top
    found = None
    for h in q.below_e:
        h1 = q.mul(h, one)
        for f in units:
            hf = q.mul(h, f)
            for g in units:
                if q.leq(f, q.join(h1, g)) and not q.leq(f, q.join(hf, g)):
                    found = (f, g, h)
                    break
            if found:
                break
        if found:
            break
    if found:
        witnesses["sgf3"] = found
    return SGFReport("sgf1" not in witnesses, "sgf2" not in witnesses, "sgf3" not in witnesses, witnesses)


def check_Qe_frame(q: FiniteQuantale) -> Verdict:
    """On the downset of e the involution is trivial and the product is the meet."""
    qe = q.below_e
    for h in qe:
        if q.star(h) != h:
            return Verdict(False, ("involution", h))
    for h in qe:
        for k in qe:
            if q.mul(h, k) != q.meet(h, k):
                return Verdict(False, ("product", h, k))
    for h, k, l in ((h, k, l) for h in qe for k in qe for l in qe):
        if q.meet(h, q.join(k, l)) != q.join(q.meet(h, k), q.meet(h, l)):
            return Verdict(False, ("distributive", h, k, l))
    return Verdict(True)


def check_inverse_monoid(q: FiniteQuantale) -> Verdict:
    """Partial units form an inverse monoid with idempotents exactly the downset of e."""
    units = q.partial_units
    unit_set = q.partial_unit_set
    if q.unit not in unit_set:
        return Verdict(False, ("unit", q.unit))
    for f in units:
        if q.star(f) not in unit_set:
            return Verdict(False, ("involution", f))
        for g in units:
            if q.mul(f, g) not in unit_set:
                return Verdict(False, ("product", f, g))
    for f in units:
        for g in units:
            fg = q.mul(f, g)
            is_inverse = q.mul(fg, f) == f and q.mul(q.mul(g, f), g) == g
            if is_inverse != (g == q.star(f)):
                return Verdict(False, ("inverse", f, g))
    idempotents = {f for f in units if q.mul(f, f) == f}
    if idempotents != set(q.below_e):
        return Verdict(False, ("idempotents", tuple(sorted(idempotents ^ set(q.below_e)))))
    for a in idempotents:
        for b in idempotents:
            if q.mul(a, b) != q.mul(b, a):
                return Verdict(False, ("commute", a, b))
    # natural order: f <= g iff f = gh for some idempotent h
    for f in units:
        for g in units:
            natural = any(q.mul(g, h) == f for h in q.below_e)
            if natural != q.leq(f, g):
                return Verdict(False, ("natural_order", f, g))
    return Verdict(True)


def conjugate(q: FiniteQuantale, h: int, f: int) -> int:
    """``f* h f``, the action of a partial unit on the downset of e."""
    if h not in q.below_e_set or f not in q.partial_unit_set:
        raise ArgumentsOutOfDomain(f"conjugate needs h <= e and f a partial unit, got {h}, {f}")
    return q.mul(q.mul(q.star(f), h), f)


def is_distributive(q: FiniteQuantale) -> Verdict:
    """A finite lattice is distributive iff every join-irreducible is join-prime."""
    for j in q.join_irreducibles:
        rest = q.join_all(a for a in q.elements if not q.leq(j, a))
        if q.leq(j, rest):
            return Verdict(False, j)
    return Verdict(True)


def distributive_bruteforce(q: FiniteQuantale) -> bool:
    els = q.elements
    return all(
        q.meet(a, q.join(b, c)) == q.join(q.meet(a, b), q.meet(a, c))
        for a in els
        for b in els
        for c in els
    )


def support_candidate(q: FiniteQuantale, a: int) -> int:
    return q.join_all(q.d(f) for f in q.partial_units if q.leq(f, a))


def check_inverse_quantal_frame(q: FiniteQuantale) -> Verdict:
    """Distributive, join-generated by partial units, and supported by the candidate support."""
    dist = is_distributive(q)
    if not dist:
        return Verdict(False, {"distributive": dist.witness})
    w1 = _sgf1_witness(q)
    if w1 is not None:
        return Verdict(False, {"sgf1": w1})
    supp = [support_candidate(q, a) for a in q.elements]
    for a in q.elements:
        if not q.leq(supp[a], q.mul(a, q.star(a))):
            return Verdict(False, {"support_below_aa*": a})
        if not q.leq(a, q.mul(supp[a], a)):
            return Verdict(False, {"a_below_support_a": a})
    if supp[q.bottom] != q.bottom:
        return Verdict(False, {"support_joins": (q.bottom,)})
    for a in q.elements:
        for b in q.elements:
            if a < b and supp[q.join(a, b)] != q.join(supp[a], supp[b]):
                return Verdict(False, {"support_joins": (a, b)})
    return Verdict(True)


def prime_elements_of_Qe(q: FiniteQuantale) -> tuple[int, ...]:
    qe = q.below_e
    out = []
    for p in qe:
        if p == q.unit:
            continue
        prime = True
        for h in qe:
            if q.leq(h, p):
                continue
            for k in qe:
                if not q.leq(k, p) and q.leq(q.meet(h, k), p):
                    prime = False
                    break
            if not prime:
                break
        if prime:
            out.append(p)
    return tuple(out)


def check_quantale_laws(q: FiniteQuantale) -> dict[str, Verdict]:
    """Identities that hold in every SG-quantale (resp. SGF-quantale), checked exhaustively."""
    units = q.partial_units
    qe = q.below_e
    s = q.star
    m = q.mul
    out: dict[str, Verdict] = {}

    def first(gen):
        for w in gen:
            return Verdict(False, w)
        return Verdict(True)

    def conj(h, f):
        return m(m(s(f), h), f)

    out["functional_equal_iff_same_domain"] = first(
        (f, g)
        for f in q.functional
        for g in q.functional
        if f != g and q.leq(f, g) and q.d(f) == q.d(g)
    )
    out["action_composes"] = first(
        (h, f, g) for h in qe for f in units for g in units if conj(conj(h, f), g) != conj(h, m(f, g))
    )
    out["conjugate_stays_below_e"] = first((h, f) for h in qe for f in units if not q.leq(conj(h, f), q.unit))
    out["h_f_commutation"] = first(
        (h, f)
        for h in qe
        for f in units
        if m(h, f) != m(f, conj(h, f)) or m(s(f), h) != m(conj(h, f), s(f))
    )
    out["h_below_domain_recovered"] = first(
        (h, f) for h in qe for f in units if q.leq(h, q.d(f)) and h != m(m(f, conj(h, f)), s(f))
    )
    out["domain_of_restriction"] = first(
        (h, f) for h in qe for f in units if q.d(m(h, f)) != q.meet(h, q.d(f)) or q.r(m(f, h)) != q.meet(q.r(f), h)
    )
    out["domain_monotone"] = first(
        (f, g) for f in units for g in units if q.leq(f, g) and not (q.leq(q.d(f), q.d(g)) and q.leq(q.r(f), q.r(g)))
    )
    out["domain_of_product"] = first(
        (f, g)
        for f in units
        for g in units
        if q.d(m(f, g)) != conj(q.d(g), s(f)) or q.r(m(f, g)) != conj(q.r(f), g)
    )
    out["range_is_conjugate_domain"] = first(
        f for f in units if q.r(f) != conj(q.d(f), f) or q.d(f) != conj(q.r(f), s(f))
    )

    def transport_iso(f):
        dom = [h for h in qe if q.leq(h, q.d(f))]
        cod = {k for k in qe if q.leq(k, q.r(f))}
        image = [conj(h, f) for h in dom]
        if set(image) != cod or len(set(image)) != len(dom):
            return False
        for h in dom:
            if conj(conj(h, f), s(f)) != h:
                return False
            for k in dom:
                if q.leq(h, k) != q.leq(conj(h, f), conj(k, f)):
                    return False
        return True

    out["transport_is_order_iso"] = first(f for f in units if not transport_iso(f))
    return out
