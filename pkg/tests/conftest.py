import random

import pytest

from officesim import (
    BuildingModel,
    LightingPolicy,
    Scenario,
    load_building,
    parse_scenario,
)
from officesim import reference_scenario_path


def make_building_text(
    n_private: int = 2,
    n_shared: int = 1,
    shared_desks: int = 3,
    corridor_lights: int = 4,
    facility_rooms: int = 1,
    base_load_watts: float = 1000,
) -> str:
    """Small building in the file format, for fast test scenarios."""
    lights: list[str] = []
    computers: list[str] = []
    rooms = []

    def take_lights(n):
        start = len(lights)
        ids = [f"L{start + i:03d}" for i in range(n)]
        lights.extend(ids)
        return ids

    def take_computers(n):
        start = len(computers)
        ids = [f"K{start + i:03d}" for i in range(n)]
        computers.extend(ids)
        return ids

    rooms.append(("hall", "corridor", 0, take_lights(corridor_lights), []))
    for i in range(facility_rooms):
        rooms.append((f"kitchen-{i}", "kitchen", 0, take_lights(2), []))
    for i in range(n_private):
        rooms.append(
            (f"office-p{i}", "private_office", 1, take_lights(1), take_computers(1))
        )
    for i in range(n_shared):
        rooms.append(
            (
                f"office-s{i}",
                "shared_office",
                shared_desks,
                take_lights(2),
                take_computers(shared_desks),
            )
        )

    lines = [
        f"base_load_watts: {base_load_watts}",
        f"max_occupants: {sum(r[2] for r in rooms)}",
        "lights: [" + ", ".join(lights) + "]",
        "computers: [" + ", ".join(computers) + "]",
        "rooms:",
    ]
    for rid, kind, desks, ls, cs in rooms:
        lines.append(f"  - id: {rid}")
        lines.append(f"    kind: {kind}")
        lines.append(f"    desk_capacity: {desks}")
        lines.append("    lights: [" + ", ".join(ls) + "]")
        if cs:
            lines.append("    computers: [" + ", ".join(cs) + "]")
    return "\n".join(lines) + "\n"


def make_small_building(**kwargs) -> BuildingModel:
    return load_building(make_building_text(**kwargs))


def make_small_scenario(
    population_size: int = 4,
    horizon_days: int = 2,
    policy: LightingPolicy | None = None,
    seed: int = 7,
    **scenario_kwargs,
) -> Scenario:
    return Scenario(
        building=make_small_building(),
        population_size=population_size,
        policy=policy or LightingPolicy.automated(),
        horizon_days=horizon_days,
        master_seed=seed,
        replications=2,
        **scenario_kwargs,
    )


@pytest.fixture(scope="session")
def reference_scenario() -> Scenario:
    return parse_scenario(reference_scenario_path())


@pytest.fixture
def rng() -> random.Random:
    return random.Random(12345)


class ScriptedRandom:
    """random.Random stand-in returning queued values, for driving the
    occupant state machine down chosen branches."""

    def __init__(self, values=(), ints=()):
        self.values = list(values)  # consumed by random()
        self.ints = list(ints)  # consumed by randint / randrange

    def random(self) -> float:
        return self.values.pop(0) if self.values else 1.0

    def randint(self, a, b) -> int:
        if self.ints:
            value = self.ints.pop(0)
            assert a <= value <= b, f"scripted int {value} outside [{a}, {b}]"
            return value
        return a

    def randrange(self, *args) -> int:
        if self.ints:
            return self.ints.pop(0)
        return args[0] if len(args) > 1 else 0
