"""Physical building description: rooms, appliance inventory, base load.

Building files are YAML with a top-level appliance catalog and a list of
room blocks that reference catalog ids:

    base_load_watts: 5000
    max_occupants: 213
    defaults:
      light_watts_on: 60
      computer_watts: {off: 0, standby: 25, on: 400}
    lights: [L001, L002, ...]
    light_overrides:            # optional, per-id wattage overrides
      L001: {watts_on: 80}
    computers: [K001, ...]
    computer_overrides:
      K001: {watts_standby: 30}
    rooms:
      - id: office-1
        kind: private_office    # private_office | shared_office | corridor |
                                # kitchen | toilet | lab | other_facility
        desk_capacity: 1
        lights: [L001]
        computers: [K001]

Every catalog id must be referenced by exactly one room. Corridors,
toilets and kitchens must have desk_capacity 0. A model is immutable
once loaded.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ParseError, ValidationError

DEFAULT_LIGHT_WATTS = 60
DEFAULT_COMPUTER_WATTS = (0, 25, 400)  # off, standby, on


class RoomKind(str, enum.Enum):
    PRIVATE_OFFICE = "private_office"
    SHARED_OFFICE = "shared_office"
    CORRIDOR = "corridor"
    KITCHEN = "kitchen"
    TOILET = "toilet"
    LAB = "lab"
    OTHER_FACILITY = "other_facility"


# Kinds that occupants visit from the corridor but never office in.
FACILITY_KINDS = frozenset(
    {RoomKind.KITCHEN, RoomKind.TOILET, RoomKind.LAB, RoomKind.OTHER_FACILITY}
)

# Kinds that must not carry desks.
_DESKLESS_KINDS = frozenset({RoomKind.CORRIDOR, RoomKind.TOILET, RoomKind.KITCHEN})


@dataclass(frozen=True)
class LightSpec:
    id: str
    room_id: str
    watts_on: float = DEFAULT_LIGHT_WATTS


@dataclass(frozen=True)
class ComputerSpec:
    id: str
    room_id: str
    watts_off: float = 0.0
    watts_standby: float = 25.0
    watts_on: float = 400.0


@dataclass(frozen=True)
class Room:
    id: str
    kind: RoomKind
    desk_capacity: int
    light_ids: tuple[str, ...] = ()
    computer_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class BuildingModel:
    rooms: tuple[Room, ...]
    lights: dict[str, LightSpec]
    computers: dict[str, ComputerSpec]
    base_load_watts: float
    max_occupants: int

    def room(self, room_id: str) -> Room:
        return self._rooms_by_id[room_id]

    @property
    def _rooms_by_id(self) -> dict[str, Room]:
        return {r.id: r for r in self.rooms}

    def desk_rooms(self) -> tuple[Room, ...]:
        """Rooms occupants can be assigned to, in file order."""
        return tuple(r for r in self.rooms if r.desk_capacity > 0)

    def facility_rooms(self) -> tuple[Room, ...]:
        return tuple(r for r in self.rooms if r.kind in FACILITY_KINDS)

    def corridor_rooms(self) -> tuple[Room, ...]:
        return tuple(r for r in self.rooms if r.kind is RoomKind.CORRIDOR)

    def total_desk_capacity(self) -> int:
        return sum(r.desk_capacity for r in self.rooms)

    def max_flexible_watts(self) -> float:
        """Upper bound of flexible draw: every light and computer full on."""
        return sum(s.watts_on for s in self.lights.values()) + sum(
            s.watts_on for s in self.computers.values()
        )


def load_building(text: str, source: str = "<string>") -> BuildingModel:
    """Parse and validate a building description.

    Raises ParseError on malformed YAML (with line context) and
    ValidationError listing every dangling reference, duplicate id, or
    constraint violation found.
    """
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{source}:{mark.line + 1}" if mark is not None else source
        raise ParseError(f"{where}: not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError(f"{source}: building file must be a mapping")
    return _build_model(raw, source)


def load_building_file(path: str | Path) -> BuildingModel:
    path = Path(path)
    return load_building(path.read_text(encoding="utf-8"), source=str(path))


def _build_model(raw: dict, source: str) -> BuildingModel:
    problems: list[str] = []

    def _num(key: str, minimum: float | None = None):
        value = raw.get(key)
        if value is None:
            problems.append(f"missing required field '{key}'")
            return 0
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            problems.append(f"field '{key}' must be a number, got {value!r}")
            return 0
        if minimum is not None and value < minimum:
            problems.append(f"field '{key}' must be >= {minimum}, got {value}")
        return value

    base_load_watts = _num("base_load_watts", minimum=0)
    max_occupants = _num("max_occupants", minimum=0)

    defaults = raw.get("defaults") or {}
    light_default = defaults.get("light_watts_on", DEFAULT_LIGHT_WATTS)
    cw = defaults.get("computer_watts") or {}
    computer_default = (
        cw.get("off", DEFAULT_COMPUTER_WATTS[0]),
        cw.get("standby", DEFAULT_COMPUTER_WATTS[1]),
        cw.get("on", DEFAULT_COMPUTER_WATTS[2]),
    )

    light_ids = list(raw.get("lights") or [])
    computer_ids = list(raw.get("computers") or [])
    light_overrides = raw.get("light_overrides") or {}
    computer_overrides = raw.get("computer_overrides") or {}

    for catalog, name in ((light_ids, "lights"), (computer_ids, "computers")):
        seen: set[str] = set()
        for appliance_id in catalog:
            if appliance_id in seen:
                problems.append(f"duplicate id '{appliance_id}' in {name} catalog")
            seen.add(appliance_id)
    for appliance_id in light_overrides:
        if appliance_id not in light_ids:
            problems.append(f"light_overrides names unknown light '{appliance_id}'")
    for appliance_id in computer_overrides:
        if appliance_id not in computer_ids:
            problems.append(
                f"computer_overrides names unknown computer '{appliance_id}'"
            )

    rooms: list[Room] = []
    room_ids: set[str] = set()
    light_owner: dict[str, str] = {}
    computer_owner: dict[str, str] = {}
    for i, block in enumerate(raw.get("rooms") or []):
        if not isinstance(block, dict):
            problems.append(f"rooms[{i}] is not a mapping")
            continue
        room_id = str(block.get("id", f"rooms[{i}]"))
        if "id" not in block:
            problems.append(f"rooms[{i}] missing 'id'")
        if room_id in room_ids:
            problems.append(f"duplicate room id '{room_id}'")
        room_ids.add(room_id)

        kind_text = block.get("kind")
        try:
            kind = RoomKind(kind_text)
        except ValueError:
            problems.append(f"room '{room_id}' has unknown kind {kind_text!r}")
            kind = RoomKind.OTHER_FACILITY

        desk_capacity = block.get("desk_capacity", 0)
        if not isinstance(desk_capacity, int) or desk_capacity < 0:
            problems.append(
                f"room '{room_id}' desk_capacity must be a non-negative integer"
            )
            desk_capacity = 0
        if kind in _DESKLESS_KINDS and desk_capacity != 0:
            problems.append(
                f"room '{room_id}' ({kind.value}) must have desk_capacity 0"
            )

        room_lights = tuple(str(x) for x in block.get("lights") or ())
        room_computers = tuple(str(x) for x in block.get("computers") or ())
        for lid in room_lights:
            if lid not in light_ids:
                problems.append(
                    f"room '{room_id}' references undeclared light '{lid}'"
                )
            elif lid in light_owner:
                problems.append(
                    f"light '{lid}' referenced by both "
                    f"'{light_owner[lid]}' and '{room_id}'"
                )
            else:
                light_owner[lid] = room_id
        for cid in room_computers:
            if cid not in computer_ids:
                problems.append(
                    f"room '{room_id}' references undeclared computer '{cid}'"
                )
            elif cid in computer_owner:
                problems.append(
                    f"computer '{cid}' referenced by both "
                    f"'{computer_owner[cid]}' and '{room_id}'"
                )
            else:
                computer_owner[cid] = room_id

        rooms.append(Room(room_id, kind, desk_capacity, room_lights, room_computers))

    for lid in light_ids:
        if lid not in light_owner:
            problems.append(f"light '{lid}' is not placed in any room")
    for cid in computer_ids:
        if cid not in computer_owner:
            problems.append(f"computer '{cid}' is not placed in any room")

    if problems:
        raise ValidationError([f"{source}: {p}" for p in problems])

    lights = {
        lid: LightSpec(
            id=lid,
            room_id=light_owner[lid],
            watts_on=light_overrides.get(lid, {}).get("watts_on", light_default),
        )
        for lid in light_ids
    }
    computers = {
        cid: ComputerSpec(
            id=cid,
            room_id=computer_owner[cid],
            watts_off=computer_overrides.get(cid, {}).get(
                "watts_off", computer_default[0]
            ),
            watts_standby=computer_overrides.get(cid, {}).get(
                "watts_standby", computer_default[1]
            ),
            watts_on=computer_overrides.get(cid, {}).get(
                "watts_on", computer_default[2]
            ),
        )
        for cid in computer_ids
    }
    return BuildingModel(
        rooms=tuple(rooms),
        lights=lights,
        computers=computers,
        base_load_watts=base_load_watts,
        max_occupants=max_occupants,
    )


def serialize_building(model: BuildingModel) -> str:
    """Render a model back to the building file format.

    Loading the output yields a model equal to the input.
    """
    doc = {
        "base_load_watts": model.base_load_watts,
        "max_occupants": model.max_occupants,
        "defaults": {
            "light_watts_on": DEFAULT_LIGHT_WATTS,
            "computer_watts": {
                "off": DEFAULT_COMPUTER_WATTS[0],
                "standby": DEFAULT_COMPUTER_WATTS[1],
                "on": DEFAULT_COMPUTER_WATTS[2],
            },
        },
        "lights": list(model.lights),
        "computers": list(model.computers),
        "rooms": [
            {
                "id": r.id,
                "kind": r.kind.value,
                "desk_capacity": r.desk_capacity,
                "lights": list(r.light_ids),
                "computers": list(r.computer_ids),
            }
            for r in model.rooms
        ],
    }
    light_overrides = {
        s.id: {"watts_on": s.watts_on}
        for s in model.lights.values()
        if s.watts_on != DEFAULT_LIGHT_WATTS
    }
    computer_overrides = {}
    for s in model.computers.values():
        entry = {}
        if s.watts_off != DEFAULT_COMPUTER_WATTS[0]:
            entry["watts_off"] = s.watts_off
        if s.watts_standby != DEFAULT_COMPUTER_WATTS[1]:
            entry["watts_standby"] = s.watts_standby
        if s.watts_on != DEFAULT_COMPUTER_WATTS[2]:
            entry["watts_on"] = s.watts_on
        if entry:
            computer_overrides[s.id] = entry
    if light_overrides:
        doc["light_overrides"] = light_overrides
    if computer_overrides:
        doc["computer_overrides"] = computer_overrides
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


def building_summary(model: BuildingModel) -> dict:
    """Exact inventory counts, grouped per appliance class and room kind."""
    by_kind_rooms: dict[str, int] = {}
    by_kind_lights: dict[str, int] = {}
    by_kind_computers: dict[str, int] = {}
    by_kind_desks: dict[str, int] = {}
    for room in model.rooms:
        kind = room.kind.value
        by_kind_rooms[kind] = by_kind_rooms.get(kind, 0) + 1
        by_kind_lights[kind] = by_kind_lights.get(kind, 0) + len(room.light_ids)
        by_kind_computers[kind] = by_kind_computers.get(kind, 0) + len(
            room.computer_ids
        )
        by_kind_desks[kind] = by_kind_desks.get(kind, 0) + room.desk_capacity
    return {
        "rooms": len(model.rooms),
        "lights": len(model.lights),
        "computers": len(model.computers),
        "desks": model.total_desk_capacity(),
        "max_occupants": model.max_occupants,
        "base_load_watts": model.base_load_watts,
        "rooms_by_kind": dict(sorted(by_kind_rooms.items())),
        "lights_by_kind": dict(sorted(by_kind_lights.items())),
        "computers_by_kind": dict(sorted(by_kind_computers.items())),
        "desks_by_kind": dict(sorted(by_kind_desks.items())),
    }
