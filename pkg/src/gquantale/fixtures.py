"""The two worked examples shipped as JSON under ``data/``."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cache
from importlib import resources

from .bits import iter_bits
from .groupoid import FiniteGroupoid, GroupAction, action_from_named, from_equivalence_relation
from .topology import FiniteSpace, validate_space

FIXTURE_NAMES = ("etale", "non_etale")


@dataclass(frozen=True, eq=False)
class Fixture:
    name: str
    aliases: tuple[str, ...]
    title: str
    space: FiniteSpace
    action: GroupAction
    groupoid: FiniteGroupoid
    open_names: dict[str, int]
    prime_names: dict[str, str]
    listing: tuple[tuple[str, str], ...]
    expected: dict

    def listed_member(self, element: str, open_name: str) -> int:
        """Arrow mask of the graph of ``element`` restricted to a named open."""
        g = self.groupoid
        k = self.action.elements.index(element)
        pts = self.space.points
        u = self.open_names[open_name]
        return g.mask(f"({pts[x]},{pts[self.action.act[k][x]]})" for x in iter_bits(u))

    @property
    def listed_members(self) -> list[int]:
        return [self.listed_member(el, u) for el, u in self.listing]

    def prime_mask(self, name: str) -> int:
        return self.open_names[name]


def resolve_name(name: str) -> str:
    for fx in FIXTURE_NAMES:
        if name == fx or name in _raw(fx)["aliases"]:
            return fx
    raise KeyError(f"unknown fixture {name!r}")


@cache
def _raw(name: str) -> dict:
    text = resources.files("gquantale.data").joinpath(f"{name}.json").read_text()
    return json.loads(text)


@cache
def load_fixture(name: str) -> Fixture:
    data = _raw(resolve_name(name))
    space = validate_space(data["space"]["points"], data["space"]["opens"])
    action = action_from_named(space, data["group"], data["action"])
    groupoid = from_equivalence_relation(space, data["relation"])
    return Fixture(
        name=data["name"],
        aliases=tuple(data["aliases"]),
        title=data["title"],
        space=space,
        action=action,
        groupoid=groupoid,
        open_names={k: space.mask(v) for k, v in data["open_names"].items()},
        prime_names=dict(data["prime_names"]),
        listing=tuple(tuple(x) for x in data["base_listing"]),
        expected=dict(data.get("expected", {})),
    )


def all_fixtures() -> list[Fixture]:
    return [load_fixture(n) for n in FIXTURE_NAMES]
