"""System states: the specification format that drives repair."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Iterable, Mapping, Optional, Union

MISSING_RESOURCE = "<missing-resource>"
MISSING_ATTRIBUTE = "<missing-attribute>"


class StateFormatError(ValueError):
    pass


def split_id(rid: str) -> tuple[str, str]:
    """Split ``type:identifier`` at the first colon."""
    ctype, sep, ident = rid.partition(":")
    if not sep or not ctype or not ident:
        raise StateFormatError(f"malformed resource id {rid!r}; expected '<type>:<identifier>'")
    return ctype, ident


@dataclass(frozen=True)
class ResourceState:
    id: str
    attributes: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        split_id(self.id)
        object.__setattr__(self, "attributes", MappingProxyType(dict(self.attributes)))

    @property
    def type(self) -> str:
        return split_id(self.id)[0]

    @property
    def identifier(self) -> str:
        return split_id(self.id)[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ResourceState):
            return NotImplemented
        return self.id == other.id and dict(self.attributes) == dict(other.attributes)

    def __hash__(self) -> int:
        return hash((self.id, frozenset(self.attributes.items())))

    def __repr__(self) -> str:
        return f"ResourceState({self.id!r}, {dict(self.attributes)!r})"

    def to_json(self) -> dict[str, Any]:
        return {"id": self.id, "attributes": dict(self.attributes)}


@dataclass(frozen=True)
class SystemState:
    resources: tuple[ResourceState, ...] = ()

    def __post_init__(self) -> None:
        resources = tuple(self.resources)
        object.__setattr__(self, "resources", resources)
        seen: set[str] = set()
        for res in resources:
            if res.id in seen:
                raise StateFormatError(f"duplicate resource id {res.id!r}")
            seen.add(res.id)

    def get(self, rid: str) -> Optional[ResourceState]:
        for res in self.resources:
            if res.id == rid:
                return res
        return None

    def __iter__(self):
        return iter(self.resources)

    def __len__(self) -> int:
        return len(self.resources)

    def to_json(self) -> list[dict[str, Any]]:
        return [r.to_json() for r in self.resources]

    def dumps(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_json(), indent=indent, ensure_ascii=False)

    def key(self) -> tuple:
        """Order-insensitive identity, for deduplication."""
        return tuple(sorted((r.id, tuple(sorted(r.attributes.items()))) for r in self.resources))


def state_from_json(data: Any) -> SystemState:
    if not isinstance(data, list):
        raise StateFormatError("a state must be a JSON array of resources")
    out = []
    for i, entry in enumerate(data):
        if not isinstance(entry, dict) or set(entry) - {"id", "attributes"} or "id" not in entry:
            raise StateFormatError(f"entry {i}: expected an object with 'id' and 'attributes'")
        rid = entry["id"]
        attrs = entry.get("attributes", {})
        if not isinstance(rid, str):
            raise StateFormatError(f"entry {i}: id must be a string")
        if not isinstance(attrs, dict):
            raise StateFormatError(f"entry {i}: attributes must be an object")
        for k, v in attrs.items():
            if not isinstance(v, str):
                raise StateFormatError(f"entry {i}: attribute {k!r} of {rid!r} must be a string, got {type(v).__name__}")
        out.append(ResourceState(rid, attrs))
    return SystemState(tuple(out))


def parse_state(text: str) -> SystemState:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"invalid JSON: {exc}") from None
    return state_from_json(data)


def make_state(entries: Union[Mapping[str, Mapping[str, str]], Iterable[tuple[str, Mapping[str, str]]]]) -> SystemState:
    items = entries.items() if isinstance(entries, Mapping) else entries
    return SystemState(tuple(ResourceState(rid, attrs) for rid, attrs in items))


def satisfies(actual: SystemState, desired: SystemState) -> bool:
    """Subset semantics: every desired resource/attribute is matched by ``actual``."""
    index = {r.id: r.attributes for r in actual.resources}
    for want in desired.resources:
        have = index.get(want.id)
        if have is None:
            return False
        for k, v in want.attributes.items():
            if have.get(k) != v:
                return False
    return True


def diff(actual: SystemState, desired: SystemState) -> list[tuple[str, Optional[str], Optional[str], str]]:
    """Mismatches as ``(id, attribute, expected, found)`` in desired order.

    ``found`` is :data:`MISSING_RESOURCE` / :data:`MISSING_ATTRIBUTE` when
    there is nothing to compare; a missing resource is reported once with
    ``attribute`` and ``expected`` set to None.
    """
    index = {r.id: r.attributes for r in actual.resources}
    out: list[tuple[str, Optional[str], Optional[str], str]] = []
    for want in desired.resources:
        have = index.get(want.id)
        if have is None:
            out.append((want.id, None, None, MISSING_RESOURCE))
            continue
        for k, v in want.attributes.items():
            if k not in have:
                out.append((want.id, k, v, MISSING_ATTRIBUTE))
            elif have[k] != v:
                out.append((want.id, k, v, have[k]))
    return out
