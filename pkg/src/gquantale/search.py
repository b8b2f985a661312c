"""Enumeration of small unital involutive quantales up to isomorphism.

Lattices are enumerated first (up to relabelling), then order-automorphic
involutions, then the unit, then products on pairs of join-irreducibles;
every such table extends uniquely by joins, and the extension is kept only
if it passes every quantale axiom.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations, product as cartesian

from .errors import BudgetExceeded, GQError
from .quantale import (
    FiniteQuantale,
    check_inverse_monoid,
    check_Qe_frame,
    check_quantale_laws,
    check_SG,
    check_SGF,
    is_distributive,
    quantale_report,
)

PROFILE_KEYS = ("SG", "SGF1", "SGF2", "SGF3", "SPQ1", "SPQ2", "distributive")


def _closure(n: int, rel: set[tuple[int, int]]) -> list[list[bool]] | None:
    leq = [[i == j for j in range(n)] for i in range(n)]
    for a, b in rel:
        leq[a][b] = True
    for k in range(n):
        for i in range(n):
            if leq[i][k]:
                for j in range(n):
                    if leq[k][j]:
                        leq[i][j] = True
    for i in range(n):
        for j in range(i + 1, n):
            if leq[i][j] and leq[j][i]:
                return None
    return leq


def _is_lattice(leq: list[list[bool]]) -> bool:
    n = len(leq)
    for a in range(n):
        for b in range(n):
            ups = [c for c in range(n) if leq[a][c] and leq[b][c]]
            if not any(all(leq[c][d] for d in ups) for c in ups):
                return False
    return True


def _encode(leq, perm) -> tuple:
    n = len(leq)
    inv = [0] * n
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(leq[inv[i]][inv[j]] for i in range(n) for j in range(n))


def enumerate_lattices(n: int) -> list[list[list[bool]]]:
    """Lattices on ``0..n-1`` with 0 the bottom and n-1 the top, one per iso class."""
    if n == 1:
        return [[[True]]]
    middle = list(range(1, n - 1))
    pairs = [(a, b) for a in middle for b in middle if a != b]
    seen: set[tuple] = set()
    out = []
    for bits in range(1 << len(pairs)):
        rel = {pairs[i] for i in range(len(pairs)) if bits >> i & 1}
        rel |= {(0, x) for x in range(n)} | {(x, n - 1) for x in range(n)}
        leq = _closure(n, rel)
        if leq is None or not _is_lattice(leq):
            continue
        # compare only the transitive closure's own bits so each order appears once
        if any((a, b) not in rel and leq[a][b] for a, b in pairs):
            continue
        key = min(_encode(leq, [0, *p, n - 1]) for p in permutations(middle))
        if key in seen:
            continue
        seen.add(key)
        out.append(leq)
    out.sort(key=lambda m: tuple(v for row in m for v in row))
    return out


def _join_table(leq):
    n = len(leq)
    table = [[0] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            ups = [c for c in range(n) if leq[a][c] and leq[b][c]]
            table[a][b] = next(c for c in ups if all(leq[c][d] for d in ups))
    return table


def _involutions(leq) -> list[tuple[int, ...]]:
    n = len(leq)
    out = []
    for perm in permutations(range(n)):
        if any(perm[perm[i]] != i for i in range(n)):
            continue
        if all(leq[a][b] == leq[perm[a]][perm[b]] for a in range(n) for b in range(n)):
            out.append(perm)
    return out


@dataclass
class Model:
    quantale: FiniteQuantale
    profile: dict
    sg_checks: dict

    def profile_key(self) -> tuple:
        return tuple(self.profile[k] for k in PROFILE_KEYS)

    def to_json(self) -> dict:
        return {"n": self.quantale.n, "profile": self.profile, "table": self.quantale.to_json()}


def classify(q: FiniteQuantale) -> tuple[dict, dict]:
    from .incidence import check_spatial

    sg = bool(check_SG(q))
    sgf = check_SGF(q)
    profile = {
        "SG": sg,
        "SGF1": sgf.sgf1,
        "SGF2": sgf.sgf2,
        "SGF3": sgf.sgf3,
        "SPQ1": None,
        "SPQ2": None,
        "distributive": bool(is_distributive(q)),
    }
    if sgf:
        try:
            spatial = check_spatial(q)
            profile["SPQ1"], profile["SPQ2"] = spatial.spq1, spatial.spq2
        except GQError:
            profile["SPQ1"] = profile["SPQ2"] = False
    sg_checks = {}
    if sg:
        laws = check_quantale_laws(q)
        sg_checks = {
            "Qe_frame": bool(check_Qe_frame(q)),
            "functional_criterion": bool(laws["functional_equal_iff_same_domain"]),
            "inverse_monoid": bool(check_inverse_monoid(q)),
        }
    return profile, sg_checks


def _products(leq, join, sigma, e, budget_left):
    """Yield full product tables for one (lattice, involution, unit) triple."""
    n = len(leq)
    jis = [a for a in range(1, n) if join_irreducible(leq, join, a)]
    below = [[j for j in jis if leq[j][a]] for a in range(n)]
    cells = [(j, k) for j in jis for k in jis]
    fixed: dict[tuple[int, int], int] = {}
    if e in jis:
        for k in jis:
            fixed[(e, k)] = k
            fixed[(k, e)] = k
    free = [c for c in cells if c not in fixed]
    val = dict(fixed)
    count = 0

    def ok(c, v):
        j, k = c
        for (j2, k2), w in val.items():
            if leq[j2][j] and leq[k2][k] and not leq[w][v]:
                return False
            if leq[j][j2] and leq[k][k2] and not leq[v][w]:
                return False
        mirror = (sigma[k], sigma[j])
        if mirror == c:
            return sigma[v] == v
        if mirror in val and val[mirror] != sigma[v]:
            return False
        return True

    def extend():
        table = [[0] * n for _ in range(n)]
        for a in range(n):
            for b in range(n):
                acc = 0
                for j in below[a]:
                    for k in below[b]:
                        acc = join[acc][val[(j, k)]]
                table[a][b] = acc
        return table

    for c, v in fixed.items():
        if not ok(c, v):
            return
    # fixed cells were checked against each other above; now search the rest

    def rec(i):
        nonlocal count
        if i == len(free):
            count += 1
            if count > budget_left[0]:
                raise BudgetExceeded("search budget exhausted")
            yield extend()
            return
        c = free[i]
        for v in range(n):
            if ok(c, v):
                val[c] = v
                yield from rec(i + 1)
                del val[c]

    try:
        yield from rec(0)
    finally:
        budget_left[0] -= count


def join_irreducible(leq, join, a) -> bool:
    n = len(leq)
    acc = 0
    for b in range(n):
        if b != a and leq[b][a]:
            acc = join[acc][b]
    return acc != a


def _search_lattice(args) -> tuple[list[dict], int, bool]:
    leq, budget = args
    from .iso import _quantale_invariants, quantale_isomorphic

    n = len(leq)
    join = _join_table(leq)
    budget_left = [budget]
    found: list[FiniteQuantale] = []
    buckets: dict[str, list[FiniteQuantale]] = {}
    complete = True
    try:
        for sigma in _involutions(leq):
            for e in range(n):
                if n > 1 and e == 0:
                    continue
                for table in _products(leq, join, sigma, e, budget_left):
                    try:
                        q = FiniteQuantale(leq, table, list(sigma), e)
                    except GQError:
                        continue
                    if not all(quantale_report(q).values()):
                        continue
                    key = repr(_quantale_invariants(q))
                    bucket = buckets.setdefault(key, [])
                    if any(quantale_isomorphic(q, other) for other in bucket):
                        continue
                    bucket.append(q)
                    found.append(q)
    except BudgetExceeded:
        complete = False
    return [q.to_json() for q in found], budget - budget_left[0], complete


@dataclass
class SearchResult:
    models: list[Model]
    examined: int
    complete: bool
    by_size: dict = field(default_factory=dict)

    def table(self) -> list[dict]:
        """Counts per (size, profile), in a stable order."""
        rows: dict[tuple, int] = {}
        for m in self.models:
            key = (m.quantale.n, m.profile_key())
            rows[key] = rows.get(key, 0) + 1
        return [
            {"n": n, **dict(zip(PROFILE_KEYS, prof)), "count": c}
            for (n, prof), c in sorted(rows.items(), key=lambda kv: (kv[0][0], repr(kv[0][1])))
        ]

    def minimal_models(self) -> dict[str, dict]:
        """First model found for each profile, smallest size first."""
        out: dict[str, dict] = {}
        for m in self.models:
            key = ",".join(f"{k}={m.profile[k]}" for k in PROFILE_KEYS)
            out.setdefault(key, m.to_json())
        return out

    def smallest(self, predicate) -> Model | None:
        return next((m for m in self.models if predicate(m)), None)


def search(max_size: int = 4, budget: int = 10_000_000, threads: int = 1) -> SearchResult:
    from .quantale import quantale_from_json

    models: list[Model] = []
    examined = 0
    complete = True
    by_size = {}
    remaining = budget
    for n in range(1, max_size + 1):
        lattices = enumerate_lattices(n)
        jobs = [(leq, remaining) for leq in lattices]
        if threads > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(_search_lattice, jobs))
        else:
            results = []
            for job in jobs:
                res = _search_lattice((job[0], remaining))
                results.append(res)
                remaining -= res[1]
                if not res[2]:
                    break
        count = 0
        for tables, used, done in results:
            if threads > 1:
                remaining -= used
            examined += used
            complete = complete and done
            for data in tables:
                q = quantale_from_json(data)
                profile, sg_checks = classify(q)
                models.append(Model(q, profile, sg_checks))
                count += 1
        by_size[n] = count
        if not complete or remaining <= 0:
            complete = complete and remaining > 0
            break
    return SearchResult(models, examined, complete, by_size)
