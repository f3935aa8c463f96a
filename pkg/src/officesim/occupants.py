"""Occupant agents: stereotype sampling, daily schedules, and the
minute-stepped behavioral state machine that emits appliance events.

An agent cycles through four states: out of the building, in the
corridor, in its own office (working with or without its computer), or
in a facility room (toilet / kitchen / lab). All randomness flows
through the caller-supplied ``random.Random`` so runs are reproducible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .building import BuildingModel
from .errors import CapacityError, ValidationError

MINUTES_PER_DAY = 1440
CORRIDOR_TRANSIT_MINUTES = 2
COMPUTER_SWITCH_ON_MINUTES = 2
LATEST_LEAVE_MINUTE = 23 * 60  # flexible workers are gone by 23:00

# Computer power mirror kept by the owning agent (ints for speed).
POWER_OFF = 0
POWER_STANDBY = 1
POWER_ON = 2


class ScheduleClass(enum.Enum):
    EARLY_BIRD = "early_bird"
    TIMETABLE_COMPLIER = "timetable_complier"
    FLEXIBLE_WORKER = "flexible_worker"


# Arrival windows [start, end) in minutes of day.
ARRIVAL_WINDOWS = {
    ScheduleClass.EARLY_BIRD: (5 * 60, 9 * 60),
    ScheduleClass.TIMETABLE_COMPLIER: (9 * 60, 10 * 60),
    ScheduleClass.FLEXIBLE_WORKER: (10 * 60, 13 * 60),
}

# Fixed leave window for the two timetable-bound classes.
FIXED_LEAVE_WINDOW = (17 * 60, 18 * 60)


class Stereotype(enum.Enum):
    ENVIRONMENT_CHAMPION = "environment_champion"
    ENERGY_SAVER = "energy_saver"
    REGULAR_USER = "regular_user"
    BIG_USER = "big_user"


@dataclass(frozen=True)
class StereotypeParams:
    awareness_low: float
    awareness_high: float
    p_switch_off: float
    p_email: float


STEREOTYPE_PARAMS = {
    Stereotype.ENVIRONMENT_CHAMPION: StereotypeParams(95, 100, 0.95, 0.9),
    Stereotype.ENERGY_SAVER: StereotypeParams(70, 94, 0.7, 0.6),
    Stereotype.REGULAR_USER: StereotypeParams(30, 69, 0.4, 0.2),
    Stereotype.BIG_USER: StereotypeParams(0, 29, 0.2, 0.05),
}

DEFAULT_SCHEDULE_MIX = {
    ScheduleClass.EARLY_BIRD: 0.08,
    ScheduleClass.TIMETABLE_COMPLIER: 0.53,
    ScheduleClass.FLEXIBLE_WORKER: 0.39,
}

DEFAULT_AWARENESS_MIX = {
    Stereotype.ENVIRONMENT_CHAMPION: 0.01,
    Stereotype.ENERGY_SAVER: 0.08,
    Stereotype.REGULAR_USER: 0.31,
    Stereotype.BIG_USER: 0.60,
}


def awareness_to_switch_off_prob(awareness: float) -> float:
    """Band map from awareness to switch-off probability.

    Piecewise constant and monotone non-decreasing over [0, 100].
    """
    if not 0.0 <= awareness <= 100.0:
        raise ValueError(f"awareness must be in [0, 100], got {awareness}")
    if awareness >= 95.0:
        return 0.95
    if awareness >= 70.0:
        return 0.7
    if awareness >= 30.0:
        return 0.4
    return 0.2


@dataclass(frozen=True)
class PopulationMix:
    schedule: dict[ScheduleClass, float] = field(
        default_factory=lambda: dict(DEFAULT_SCHEDULE_MIX)
    )
    awareness: dict[Stereotype, float] = field(
        default_factory=lambda: dict(DEFAULT_AWARENESS_MIX)
    )

    def validate(self) -> None:
        problems = []
        for name, dist, keys in (
            ("schedule_mix", self.schedule, tuple(ScheduleClass)),
            ("awareness_mix", self.awareness, tuple(Stereotype)),
        ):
            for key in dist:
                if key not in keys:
                    problems.append(f"{name} has unknown entry {key!r}")
            for key, p in dist.items():
                if not 0.0 <= p <= 1.0:
                    problems.append(f"{name}[{key.value}] = {p} outside [0, 1]")
            total = sum(dist.values())
            if abs(total - 1.0) > 1e-9:
                problems.append(f"{name} fractions sum to {total}, expected 1")
        if problems:
            raise ValidationError(problems)


@dataclass(frozen=True)
class BehaviorParams:
    """Scenario-level behavioral constants. All hazards are per minute."""

    leave_hazard_per_minute: float = 0.01
    temporary_leave_fraction: float = 0.7
    temporary_leave_min: int = 5
    temporary_leave_max: int = 19
    long_leave_min: int = 20
    long_leave_max: int = 90
    other_room_hazard_per_minute: float = 0.005
    other_room_dwell_min: int = 1
    other_room_dwell_max: int = 10
    computer_standby_prob_per_minute: float = 0.05
    computer_off_threshold: float = 50.0
    computer_off_floor_prob: float = 0.05
    weekend_presence_prob: float = 0.02

    def validate(self) -> None:
        problems = []
        for name in (
            "leave_hazard_per_minute",
            "temporary_leave_fraction",
            "other_room_hazard_per_minute",
            "computer_standby_prob_per_minute",
            "computer_off_floor_prob",
            "weekend_presence_prob",
        ):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                problems.append(f"behavior.{name} = {value} outside [0, 1]")
        if not 0.0 <= self.computer_off_threshold <= 100.0:
            problems.append(
                f"behavior.computer_off_threshold = "
                f"{self.computer_off_threshold} outside [0, 100]"
            )
        if not 0 < self.temporary_leave_min <= self.temporary_leave_max < 20:
            problems.append("temporary leave bounds must satisfy 0 < min <= max < 20")
        if not 20 <= self.long_leave_min <= self.long_leave_max:
            problems.append("long leave bounds must satisfy 20 <= min <= max")
        if not 1 <= self.other_room_dwell_min <= self.other_room_dwell_max:
            problems.append("other-room dwell bounds must satisfy 1 <= min <= max")
        if problems:
            raise ValidationError(problems)


def computer_switch_off_prob(awareness: float, params: BehaviorParams) -> float:
    """Probability of powering the computer down on a long leave.

    Above the scenario threshold the band map applies; below it the
    agent rarely bothers (floor probability).
    """
    if awareness >= params.computer_off_threshold:
        return awareness_to_switch_off_prob(awareness)
    return params.computer_off_floor_prob


class AgentState(enum.Enum):
    OUT_OF_SCHOOL = "out_of_school"
    IN_CORRIDOR = "in_corridor"
    IN_OWN_OFFICE = "in_own_office"
    IN_OTHER_ROOMS = "in_other_rooms"


class OfficeActivity(enum.Enum):
    WITH_COMPUTER = "working_with_computer"
    WITHOUT_COMPUTER = "working_without_computer"


class CorridorMode(enum.Enum):
    ENTERING = "entering"        # walk from the entrance to the office
    TEMP_BREAK = "temp_break"    # short absence, no switch-off behavior
    LONG_BREAK = "long_break"    # >= 20 min absence, switch-offs considered
    EXITING = "exiting"          # walk out of the building


class LeaveKind(enum.Enum):
    STAY = "stay"
    TEMPORARY = "temporary"
    LONG = "long"


@dataclass(frozen=True, slots=True)
class LeaveDecision:
    kind: LeaveKind
    duration: int = 0  # minutes away; meaningful for TEMPORARY only


class EventKind(enum.Enum):
    ENTER_BUILDING = "enter_building"
    ENTER_OWN_OFFICE = "enter_own_office"
    SWITCH_COMPUTER_ON = "switch_computer_on"
    COMPUTER_TO_STANDBY = "computer_to_standby"
    SWITCH_COMPUTER_OFF = "switch_computer_off"
    LEAVE_OFFICE_TEMPORARY = "leave_office_temporary"
    LEAVE_OFFICE_LONG = "leave_office_long"
    ENTER_OTHER_ROOM = "enter_other_room"
    EXIT_OTHER_ROOM = "exit_other_room"
    LEAVE_BUILDING = "leave_building"
    MANUAL_LIGHTS_ON = "manual_lights_on"
    MANUAL_LIGHTS_OFF = "manual_lights_off"


@dataclass(frozen=True, slots=True)
class OccupantEvent:
    kind: EventKind
    minute: int
    agent_id: int
    room_id: str | None = None


@dataclass(slots=True, eq=False)
class OccupantAgent:
    """One electricity user. Identity fields are fixed for the whole
    run; the remaining fields are the current machine state.

    Compared by identity: an agent belongs to exactly one replication.
    """

    id: int
    schedule_class: ScheduleClass
    stereotype: Stereotype
    awareness: float
    office_room_id: str
    computer_id: str | None = None

    state: AgentState = AgentState.OUT_OF_SCHOOL
    office_activity: OfficeActivity = OfficeActivity.WITHOUT_COMPUTER
    corridor_mode: CorridorMode | None = None
    timer: int = 0
    break_timer: int = 0
    visiting_room_id: str | None = None
    today_schedule: tuple[int, int] | None = None
    computer_power: int = POWER_OFF


@dataclass(frozen=True)
class BehaviorContext:
    """Static per-run context shared by every agent step."""

    params: BehaviorParams
    facility_room_ids: tuple[str, ...]


def sample_population(
    n: int, mix: PopulationMix, building: BuildingModel, rng
) -> list[OccupantAgent]:
    """Create ``n`` agents with sampled stereotypes and desk assignments.

    Desks are filled round-robin over the building's desk rooms in file
    order; an agent owns a computer while its room still has unclaimed
    ones. Raises CapacityError if ``n`` exceeds total desk capacity.
    """
    if n < 0:
        raise ValidationError(f"population size must be >= 0, got {n}")
    mix.validate()
    capacity = building.total_desk_capacity()
    if n > capacity:
        raise CapacityError(
            f"population size {n} exceeds total desk capacity {capacity}"
        )

    schedule_classes = tuple(ScheduleClass)
    schedule_weights = [mix.schedule.get(c, 0.0) for c in schedule_classes]
    stereotypes = tuple(Stereotype)
    stereotype_weights = [mix.awareness.get(s, 0.0) for s in stereotypes]

    desk_rooms = building.desk_rooms()
    assigned = {room.id: 0 for room in desk_rooms}

    def seats() -> tuple[str, str | None]:
        # Round-robin over desk rooms; repeated passes fill deeper desks.
        while True:
            progress = False
            for room in desk_rooms:
                taken = assigned[room.id]
                if taken < room.desk_capacity:
                    assigned[room.id] = taken + 1
                    computer = (
                        room.computer_ids[taken]
                        if taken < len(room.computer_ids)
                        else None
                    )
                    progress = True
                    yield room.id, computer
            if not progress:
                return

    seat_iter = seats()
    agents: list[OccupantAgent] = []
    for agent_id in range(n):
        schedule_class = _categorical(schedule_classes, schedule_weights, rng)
        stereotype = _categorical(stereotypes, stereotype_weights, rng)
        band = STEREOTYPE_PARAMS[stereotype]
        awareness = rng.uniform(band.awareness_low, band.awareness_high)
        room_id, computer_id = next(seat_iter)
        agents.append(
            OccupantAgent(
                id=agent_id,
                schedule_class=schedule_class,
                stereotype=stereotype,
                awareness=awareness,
                office_room_id=room_id,
                computer_id=computer_id,
            )
        )
    return agents


def _categorical(values, weights, rng):
    u = rng.random()
    acc = 0.0
    for value, w in zip(values, weights):
        acc += w
        if u < acc:
            return value
    return values[-1]


def sample_daily_schedule(
    agent: OccupantAgent, day_of_week: int, rng, params: BehaviorParams
) -> tuple[int, int] | None:
    """Arrival/leave minutes-of-day for one day, or None if absent.

    Weekdays (day_of_week 0-4) the agent always shows up; Saturday and
    Sunday only with a small probability. Leave is strictly after
    arrival.
    """
    if day_of_week >= 5 and rng.random() >= params.weekend_presence_prob:
        return None
    lo, hi = ARRIVAL_WINDOWS[agent.schedule_class]
    arrival = rng.randrange(lo, hi)
    if agent.schedule_class is ScheduleClass.FLEXIBLE_WORKER:
        leave = rng.randint(arrival + 1, LATEST_LEAVE_MINUTE)
    else:
        leave = rng.randrange(*FIXED_LEAVE_WINDOW)
    return arrival, leave


def decide_leave(
    agent: OccupantAgent, minutes_remaining_today: int, rng, params: BehaviorParams
) -> LeaveDecision:
    """Per-minute office-leaving decision.

    A constant hazard triggers a leave; close to the end of the day only
    long leaves are offered so a temporary break always ends before the
    agent's leave time. With no time remaining the departure is forced.
    """
    if minutes_remaining_today <= 0:
        return LeaveDecision(LeaveKind.LONG)
    if rng.random() >= params.leave_hazard_per_minute:
        return LeaveDecision(LeaveKind.STAY)
    if minutes_remaining_today <= params.temporary_leave_max:
        return LeaveDecision(LeaveKind.LONG)
    if rng.random() < params.temporary_leave_fraction:
        duration = rng.randint(params.temporary_leave_min, params.temporary_leave_max)
        return LeaveDecision(LeaveKind.TEMPORARY, duration)
    return LeaveDecision(LeaveKind.LONG)


def step_occupant(
    agent: OccupantAgent,
    minute: int,
    minute_of_day: int,
    ctx: BehaviorContext,
    rng,
) -> list[OccupantEvent]:
    """Advance one agent by one minute, returning the events it emits.

    Requires today's schedule to have been sampled already (None means
    absent all day). Light switching is not decided here; the engine
    derives manual light events from entry/exit events and the active
    policy.
    """
    events: list[OccupantEvent] = []
    schedule = agent.today_schedule
    state = agent.state

    if state is AgentState.OUT_OF_SCHOOL:
        if schedule is not None and minute_of_day == schedule[0]:
            agent.state = AgentState.IN_CORRIDOR
            agent.corridor_mode = CorridorMode.ENTERING
            agent.timer = CORRIDOR_TRANSIT_MINUTES
            events.append(OccupantEvent(EventKind.ENTER_BUILDING, minute, agent.id))
        return events

    if schedule is None:
        raise RuntimeError(f"agent {agent.id} is active without a schedule")
    leave_minute = schedule[1]
    params = ctx.params

    if state is AgentState.IN_CORRIDOR:
        mode = agent.corridor_mode
        if mode is CorridorMode.EXITING:
            agent.timer -= 1
            if agent.timer <= 0:
                agent.state = AgentState.OUT_OF_SCHOOL
                agent.corridor_mode = None
                events.append(
                    OccupantEvent(EventKind.LEAVE_BUILDING, minute, agent.id)
                )
            return events
        if mode is CorridorMode.ENTERING:
            agent.timer -= 1
            if agent.timer <= 0:
                if minute_of_day >= leave_minute:
                    # Day ended before the office was reached; head out.
                    agent.corridor_mode = CorridorMode.EXITING
                    agent.timer = CORRIDOR_TRANSIT_MINUTES
                else:
                    _enter_office(agent, minute, events)
            return events
        if mode is CorridorMode.TEMP_BREAK:
            agent.timer -= 1
            if agent.timer <= 0:
                _enter_office(agent, minute, events)
            return events
        # LONG_BREAK: idle in the corridor, occasionally using facilities.
        if minute_of_day >= leave_minute:
            agent.corridor_mode = CorridorMode.EXITING
            agent.timer = CORRIDOR_TRANSIT_MINUTES
            return events
        agent.timer -= 1
        if agent.timer <= 0:
            _enter_office(agent, minute, events)
            return events
        if ctx.facility_room_ids and (
            rng.random() < params.other_room_hazard_per_minute
        ):
            room_id = ctx.facility_room_ids[rng.randrange(len(ctx.facility_room_ids))]
            agent.break_timer = agent.timer  # resumes after the visit
            agent.state = AgentState.IN_OTHER_ROOMS
            agent.visiting_room_id = room_id
            agent.timer = rng.randint(
                params.other_room_dwell_min, params.other_room_dwell_max
            )
            events.append(
                OccupantEvent(EventKind.ENTER_OTHER_ROOM, minute, agent.id, room_id)
            )
        return events

    if state is AgentState.IN_OTHER_ROOMS:
        agent.timer -= 1
        if agent.timer <= 0:
            events.append(
                OccupantEvent(
                    EventKind.EXIT_OTHER_ROOM, minute, agent.id, agent.visiting_room_id
                )
            )
            agent.visiting_room_id = None
            agent.state = AgentState.IN_CORRIDOR
            agent.corridor_mode = CorridorMode.LONG_BREAK
            agent.timer = agent.break_timer
        return events

    # IN_OWN_OFFICE
    if minute_of_day >= leave_minute:
        _leave_office_long(agent, minute, events, rng, params)
        agent.corridor_mode = CorridorMode.EXITING
        agent.timer = CORRIDOR_TRANSIT_MINUTES
        return events

    decision = decide_leave(agent, leave_minute - minute_of_day, rng, params)
    if decision.kind is LeaveKind.TEMPORARY:
        agent.state = AgentState.IN_CORRIDOR
        agent.corridor_mode = CorridorMode.TEMP_BREAK
        agent.timer = decision.duration
        events.append(
            OccupantEvent(
                EventKind.LEAVE_OFFICE_TEMPORARY,
                minute,
                agent.id,
                agent.office_room_id,
            )
        )
        return events
    if decision.kind is LeaveKind.LONG:
        duration = rng.randint(params.long_leave_min, params.long_leave_max)
        _leave_office_long(agent, minute, events, rng, params)
        if minute_of_day + duration >= leave_minute:
            # Break would outlast the working day: this is the departure.
            agent.corridor_mode = CorridorMode.EXITING
            agent.timer = CORRIDOR_TRANSIT_MINUTES
        else:
            agent.corridor_mode = CorridorMode.LONG_BREAK
            agent.timer = duration
        return events

    # Staying put: computer session dynamics.
    if agent.computer_id is not None:
        if agent.office_activity is OfficeActivity.WITH_COMPUTER:
            if rng.random() < params.computer_standby_prob_per_minute:
                agent.computer_power = POWER_STANDBY
                agent.office_activity = OfficeActivity.WITHOUT_COMPUTER
                agent.timer = COMPUTER_SWITCH_ON_MINUTES
                events.append(
                    OccupantEvent(EventKind.COMPUTER_TO_STANDBY, minute, agent.id)
                )
        else:
            agent.timer -= 1
            if agent.timer <= 0:
                agent.computer_power = POWER_ON
                agent.office_activity = OfficeActivity.WITH_COMPUTER
                events.append(
                    OccupantEvent(EventKind.SWITCH_COMPUTER_ON, minute, agent.id)
                )
    return events


def _enter_office(agent: OccupantAgent, minute: int, events: list) -> None:
    agent.state = AgentState.IN_OWN_OFFICE
    agent.corridor_mode = None
    events.append(
        OccupantEvent(
            EventKind.ENTER_OWN_OFFICE, minute, agent.id, agent.office_room_id
        )
    )
    if agent.computer_id is not None and agent.computer_power == POWER_ON:
        # Machine kept running during the absence; resume right away.
        agent.office_activity = OfficeActivity.WITH_COMPUTER
    else:
        agent.office_activity = OfficeActivity.WITHOUT_COMPUTER
        agent.timer = COMPUTER_SWITCH_ON_MINUTES


def _leave_office_long(
    agent: OccupantAgent, minute: int, events: list, rng, params: BehaviorParams
) -> None:
    """Long leave out of the office: consider killing the computer, then go."""
    if agent.computer_id is not None and agent.computer_power != POWER_OFF:
        if rng.random() < computer_switch_off_prob(agent.awareness, params):
            agent.computer_power = POWER_OFF
            events.append(
                OccupantEvent(EventKind.SWITCH_COMPUTER_OFF, minute, agent.id)
            )
    agent.state = AgentState.IN_CORRIDOR
    events.append(
        OccupantEvent(
            EventKind.LEAVE_OFFICE_LONG, minute, agent.id, agent.office_room_id
        )
    )
