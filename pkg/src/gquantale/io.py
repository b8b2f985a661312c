"""JSON input parsing and report serialization."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Mapping

from .bits import Verdict
from .errors import ParseError
from .fixtures import load_fixture, resolve_name
from .groupoid import (
    FiniteGroupoid,
    GroupAction,
    action_from_named,
    action_groupoid,
    from_equivalence_relation,
    groupoid_from_named,
    orbit_relation_groupoid,
)
from .quantale import FiniteQuantale, quantale_from_json
from .topology import FiniteSpace, validate_space


def load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON at line {exc.lineno}: {exc.msg}") from None


def digest(data: Any) -> str:
    blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _require(data: Mapping, key: str, where: str):
    if not isinstance(data, Mapping) or key not in data:
        raise ParseError(f"{where}: missing key {key!r}")
    return data[key]


def parse_space(data: Mapping) -> FiniteSpace:
    points = _require(data, "points", "space")
    opens = _require(data, "opens", "space")
    if not isinstance(points, list) or not isinstance(opens, list):
        raise ParseError("space: points and opens must be lists")
    return validate_space(points, opens)


def parse_action(data: Mapping) -> GroupAction:
    space = parse_space(_require(data, "space", "action"))
    return action_from_named(space, _require(data, "group", "action"), _require(data, "action", "action"))


def parse_groupoid(data: Mapping | str) -> tuple[FiniteGroupoid, GroupAction | None]:
    """A fixture name, a relation, a group action, or explicit structure maps."""
    if isinstance(data, str):
        fx = load_fixture(_fixture_name(data))
        return fx.groupoid, fx.action
    if not isinstance(data, Mapping):
        raise ParseError("groupoid: expected an object or a fixture name")
    if "fixture" in data:
        fx = load_fixture(_fixture_name(data["fixture"]))
        return fx.groupoid, fx.action
    space = parse_space(_require(data, "space", "groupoid"))
    if "relation" in data:
        return from_equivalence_relation(space, data["relation"]), None
    if "action" in data:
        action = action_from_named(space, _require(data, "group", "groupoid"), data["action"])
        if data.get("kind", "orbit") == "action":
            return action_groupoid(action), action
        return orbit_relation_groupoid(action), action
    keys = ("arrows", "d", "r", "u", "product", "inverse")
    for k in keys:
        _require(data, k, "groupoid")
    try:
        return (
            groupoid_from_named(space, data["arrows"], data["d"], data["r"], data["u"], data["product"], data["inverse"]),
            None,
        )
    except KeyError as exc:
        raise ParseError(f"groupoid: unknown identifier {exc.args[0]!r}") from None


def _fixture_name(name: str) -> str:
    try:
        return resolve_name(str(name))
    except KeyError as exc:
        raise ParseError(str(exc.args[0])) from None


def parse_quantale(data: Mapping) -> FiniteQuantale:
    for k in ("n", "product", "involution", "unit"):
        _require(data, k, "quantale")
    try:
        return quantale_from_json(data)
    except (TypeError, ValueError, IndexError) as exc:
        raise ParseError(f"quantale: {exc}") from None


def parse_base(data: Mapping) -> tuple[FiniteGroupoid, GroupAction | None, Any]:
    """Returns the groupoid, its action if known, and either arrow masks or ``"canonical"``/``"listing"``."""
    if "fixture" in data and "groupoid" not in data:
        fx = load_fixture(_fixture_name(data["fixture"]))
        selector = data.get("base", "listing")
        return fx.groupoid, fx.action, _selector(fx.groupoid, selector, fx)
    if "action" in data and "groupoid" not in data:
        action = parse_action(data["action"])
        return orbit_relation_groupoid(action), action, _selector(None, data.get("base", "canonical"), None)
    groupoid, action = parse_groupoid(_require(data, "groupoid", "base input"))
    fx = None
    ref = data["groupoid"]
    if isinstance(ref, str) or (isinstance(ref, Mapping) and "fixture" in ref):
        fx = load_fixture(_fixture_name(ref if isinstance(ref, str) else ref["fixture"]))
    return groupoid, action, _selector(groupoid, _require(data, "base", "base input"), fx)


def _selector(groupoid, selector, fx):
    if selector in ("canonical", "listing"):
        if selector == "listing" and fx is None:
            raise ParseError("base 'listing' is only available for fixtures")
        return selector if selector == "canonical" else fx.listed_members
    if not isinstance(selector, list):
        raise ParseError("base must be a list of arrow lists, 'canonical' or 'listing'")
    try:
        return [groupoid.mask(member) for member in selector]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"base: unknown arrow {exc.args[0] if exc.args else exc!r}") from None


def detect_kind(data: Any) -> str:
    if isinstance(data, Mapping):
        if "product" in data and "n" in data:
            return "quantale"
        if "base" in data or "fixture" in data:
            return "base"
        if "points" in data:
            return "space"
        if "space" in data:
            return "groupoid"
    raise ParseError("cannot tell what kind of structure this input describes")


def jsonable(obj: Any) -> Any:
    if isinstance(obj, Verdict):
        out = {"ok": obj.ok}
        if obj.witness is not None:
            out["witness"] = jsonable(obj.witness)
        return out
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(asdict(obj))
    if isinstance(obj, Mapping):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [jsonable(v) for v in obj]
        return sorted(items, key=repr) if isinstance(obj, (set, frozenset)) else items
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return repr(obj)


def render(report: Mapping, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(jsonable(report), indent=2, sort_keys=True)
    lines: list[str] = []

    def walk(prefix: str, value: Any):
        if isinstance(value, Mapping):
            for k in sorted(value, key=str):
                walk(f"{prefix}.{k}" if prefix else str(k), value[k])
        else:
            lines.append(f"{prefix}: {json.dumps(value, sort_keys=True)}")

    walk("", jsonable(report))
    return "\n".join(lines)
