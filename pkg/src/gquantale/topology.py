"""Finite topological spaces.

Point subsets are bitmasks over the ordered point list; bit ``i`` stands for
``points[i]``. Opens are stored sorted by (size, mask), so the empty set comes
first and the whole space last.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

from .bits import Verdict, canonical_key, iter_bits, mask_of
from .errors import (
    MissingEmptyOrTop,
    NotClosedUnderIntersection,
    NotClosedUnderUnion,
    NotSober,
    UnknownPoint,
)


@dataclass(frozen=True, eq=False)
class FiniteSpace:
    points: tuple[str, ...]
    opens: tuple[int, ...]

    def __eq__(self, other):
        return (
            isinstance(other, FiniteSpace)
            and self.points == other.points
            and self.opens == other.opens
        )

    def __hash__(self):
        return hash((self.points, self.opens))

    @property
    def full(self) -> int:
        return (1 << len(self.points)) - 1

    @cached_property
    def index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def open_set(self) -> frozenset[int]:
        return frozenset(self.opens)

    @cached_property
    def closed_sets(self) -> tuple[int, ...]:
        return tuple(sorted((self.full & ~u for u in self.opens), key=canonical_key))

    @cached_property
    def closed_set(self) -> frozenset[int]:
        return frozenset(self.closed_sets)

    def point_index(self, point: str | int) -> int:
        if isinstance(point, int) and 0 <= point < len(self.points):
            return point
        try:
            return self.index[point]
        except KeyError:
            raise UnknownPoint(point) from None

    def mask(self, names: Iterable[str]) -> int:
        return mask_of(self.point_index(p) for p in names)

    def names(self, mask: int) -> list[str]:
        return [self.points[i] for i in iter_bits(mask)]

    def is_open(self, mask: int) -> bool:
        return mask in self.open_set

    def is_closed(self, mask: int) -> bool:
        return mask in self.closed_set

    @cached_property
    def _closures(self) -> tuple[int, ...]:
        out = []
        for i in range(len(self.points)):
            avoiding = 0
            for u in self.opens:
                if not u >> i & 1:
                    avoiding |= u
            out.append(self.full & ~avoiding)
        return tuple(out)

    @cached_property
    def _minimal_opens(self) -> tuple[int, ...]:
        out = []
        for i in range(len(self.points)):
            m = self.full
            for u in self.opens:
                if u >> i & 1:
                    m &= u
            out.append(m)
        return tuple(out)

    def closure_mask(self, i: int) -> int:
        return self._closures[i]

    def minimal_open(self, i: int) -> int:
        """Smallest open set containing point ``i``."""
        return self._minimal_opens[i]

    def to_json(self) -> dict:
        return {"points": list(self.points), "opens": [self.names(u) for u in self.opens]}


class ClosedSet(NamedTuple):
    carrier: int


class PrimeOpen(NamedTuple):
    point: int
    carrier: int


def _check_opens(n: int, opens: set[int]) -> list[tuple[str, object]]:
    full = (1 << n) - 1
    violations: list[tuple[str, object]] = []
    for required in (0, full):
        if required not in opens:
            violations.append(("MissingEmptyOrTop", required))
    ordered = sorted(opens, key=canonical_key)
    for a, b in combinations(ordered, 2):
        if a | b not in opens:
            violations.append(("NotClosedUnderUnion", (a, b)))
            break
    for a, b in combinations(ordered, 2):
        if a & b not in opens:
            violations.append(("NotClosedUnderIntersection", (a, b)))
            break
    return violations


_SPACE_ERRORS = {
    "MissingEmptyOrTop": MissingEmptyOrTop,
    "NotClosedUnderUnion": NotClosedUnderUnion,
    "NotClosedUnderIntersection": NotClosedUnderIntersection,
}


def space_from_masks(points: Sequence[str], opens: Iterable[int]) -> FiniteSpace:
    points = tuple(points)
    if len(set(points)) != len(points):
        raise ValueError(f"duplicate point names in {points!r}")
    opens = set(opens)
    full = (1 << len(points)) - 1
    stray = [u for u in opens if u & ~full]
    if stray:
        raise UnknownPoint(stray[0])
    violations = _check_opens(len(points), opens)
    if violations:
        kind = violations[0][0]
        raise _SPACE_ERRORS[kind](f"not a topology: {kind}", violations)
    return FiniteSpace(points, tuple(sorted(opens, key=canonical_key)))


def validate_space(points: Sequence[str], opens: Iterable[Iterable[str]]) -> FiniteSpace:
    """Build a space from point names and open sets given as name lists."""
    points = tuple(points)
    index = {p: i for i, p in enumerate(points)}
    masks = []
    for u in opens:
        try:
            masks.append(mask_of(index[p] for p in u))
        except KeyError as exc:
            raise UnknownPoint(exc.args[0]) from None
    return space_from_masks(points, masks)


def closure(space: FiniteSpace, point: str | int) -> ClosedSet:
    return ClosedSet(space.closure_mask(space.point_index(point)))


def irreducible_closed_sets(space: FiniteSpace) -> list[ClosedSet]:
    closed = space.closed_sets
    out = []
    for c in closed:
        if not c:
            continue
        irreducible = True
        for k1 in closed:
            if not irreducible:
                break
            if c & ~k1 == 0:
                continue
            for k2 in closed:
                if c & ~(k1 | k2) == 0 and c & ~k2 != 0:
                    irreducible = False
                    break
        if irreducible:
            out.append(ClosedSet(c))
    return out


def is_sober(space: FiniteSpace) -> Verdict:
    """Every irreducible closed set is the closure of exactly one point.

    The witness is ``("not_a_closure", C)`` or ``("shared_closure", C, points)``.
    """
    generators: dict[int, list[int]] = {}
    for i in range(len(space.points)):
        generators.setdefault(space.closure_mask(i), []).append(i)
    for (c,) in irreducible_closed_sets(space):
        pts = generators.get(c, [])
        if not pts:
            return Verdict(False, ("not_a_closure", c))
        if len(pts) > 1:
            return Verdict(False, ("shared_closure", c, tuple(pts)))
    return Verdict(True)


def is_T0(space: FiniteSpace) -> bool:
    closures = [space.closure_mask(i) for i in range(len(space.points))]
    return len(set(closures)) == len(closures)


def is_T1(space: FiniteSpace) -> bool:
    return all(space.closure_mask(i) == 1 << i for i in range(len(space.points)))


def prime_opens(space: FiniteSpace) -> list[PrimeOpen]:
    """Complements of the irreducible closed sets, tagged with their generic point."""
    verdict = is_sober(space)
    if not verdict:
        raise NotSober("space is not sober", [("sober", verdict.witness)])
    return [
        PrimeOpen(i, space.full & ~space.closure_mask(i)) for i in range(len(space.points))
    ]


def is_prime_open(space: FiniteSpace, u: int) -> bool:
    """Lattice-theoretic primality of ``u`` in the frame of opens."""
    if u == space.full or not space.is_open(u):
        return False
    for h in space.opens:
        if h & ~u == 0:
            continue
        for k in space.opens:
            if k & ~u and (h & k) & ~u == 0:
                return False
    return True


def is_union_of_locally_closed(space: FiniteSpace, subset: int, verify: bool = False) -> bool:
    """Decide whether ``subset`` is a union of sets of the form open ∩ closed.

    Each point ``y`` needs its minimal open neighbourhood intersected with its
    closure to stay inside ``subset``; with ``verify`` the brute-force search
    over (open, closed) pairs is run as well and must agree.
    """
    fast = all(
        (space.minimal_open(y) & space.closure_mask(y)) & ~subset == 0
        for y in iter_bits(subset)
    )
    if verify:
        slow = _locally_closed_bruteforce(space, subset)
        if slow != fast:
            raise AssertionError(f"locally-closed fast path disagrees on {subset:#b}")
    return fast


def _locally_closed_bruteforce(space: FiniteSpace, subset: int) -> bool:
    pieces = [
        u & c
        for u in space.opens
        for c in space.closed_sets
        if (u & c) & ~subset == 0
    ]
    covered = 0
    for piece in pieces:
        covered |= piece
    return covered == subset


def specialization_leq(space: FiniteSpace, i: int, j: int) -> bool:
    """``i`` lies in the closure of ``j``."""
    return bool(space.closure_mask(j) >> i & 1)


def downset_space(points: Sequence[str], below: dict[str, Iterable[str]]) -> FiniteSpace:
    """Space whose opens are the down-sets of the order generated by ``below``."""
    points = tuple(points)
    idx = {p: k for k, p in enumerate(points)}
    down = [1 << k for k in range(len(points))]
    for p, qs in below.items():
        for q in qs:
            down[idx[p]] |= 1 << idx[q]
    changed = True
    while changed:
        changed = False
        for k in range(len(points)):
            acc = down[k]
            for j in iter_bits(down[k]):
                acc |= down[j]
            if acc != down[k]:
                down[k] = acc
                changed = True
    opens = {0}
    frontier = [0]
    while frontier:
        u = frontier.pop()
        for k in range(len(points)):
            v = u | down[k]
            if v not in opens:
                opens.add(v)
                frontier.append(v)
    return space_from_masks(points, opens)
