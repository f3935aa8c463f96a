"""Scenario file parsing, window presets, CSV/report emission, and the
run manifest.

Scenario files are YAML and reference a building file by path (relative
paths are resolved against the scenario file's directory):

    building: reference_building.yaml
    seed: 20100904
    horizon_days: 7
    start_day_of_week: 0          # 0 = Monday
    replications: 20
    lighting_policy: automated    # automated | staff_controlled
    automated_off_delay_minutes: 20
    population:
      size: 200
      schedule_mix:  {early_bird: 0.08, timetable_complier: 0.53,
                      flexible_worker: 0.39}
      awareness_mix: {environment_champion: 0.01, energy_saver: 0.08,
                      regular_user: 0.31, big_user: 0.60}
    social:
      contact_rate: 1.0
      awareness_delta: 1.0
      small_world_k: 4
      small_world_beta: 0.1
    behavior:
      leave_hazard_per_minute: 0.01
      temporary_leave_fraction: 0.7
      temporary_leave_min: 5
      temporary_leave_max: 19
      long_leave_min: 20
      long_leave_max: 90
      other_room_hazard_per_minute: 0.005
      other_room_dwell_min: 1
      other_room_dwell_max: 10
      computer_standby_prob_per_minute: 0.05
      computer_off_threshold: 50
      computer_off_floor_prob: 0.05
      weekend_presence_prob: 0.02

`building`, `horizon_days` and `population.size` are required; every
other field falls back to the defaults shown by `serialize_scenario`.
All emitted files are deterministic for a given result: fixed float
formatting, LF line endings, sorted JSON keys, no timestamps.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .accounting import EnergyLedger, category_proportions_masked, half_hour_bins
from .appliances import LightingPolicy, PolicyKind
from .building import load_building_file, serialize_building
from .engine import ExperimentResult, PolicyComparison, Scenario
from .errors import ParseError, ValidationError
from .occupants import (
    MINUTES_PER_DAY,
    BehaviorParams,
    PopulationMix,
    ScheduleClass,
    Stereotype,
)

WINDOW_PRESETS = ("all", "weekday-day", "night", "weekend", "night-weekend")

# ISO weekday labels, index 0 = Monday (matching start_day_of_week).
DAY_NAMES = (
    "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday",
)

_BEHAVIOR_FIELDS = tuple(BehaviorParams.__dataclass_fields__)
_SOCIAL_FIELDS = ("contact_rate", "awareness_delta", "small_world_k", "small_world_beta")
_TOP_LEVEL_FIELDS = frozenset(
    {
        "building",
        "seed",
        "horizon_days",
        "start_day_of_week",
        "replications",
        "lighting_policy",
        "automated_off_delay_minutes",
        "population",
        "social",
        "behavior",
    }
)


def parse_scenario(path: str | Path) -> Scenario:
    """Load and validate a scenario file, applying documented defaults."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read scenario file {path}: {exc}") from exc
    return parse_scenario_text(text, base_dir=path.parent, source=str(path))


def parse_scenario_text(
    text: str, base_dir: str | Path = ".", source: str = "<string>"
) -> Scenario:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{source}:{mark.line + 1}" if mark is not None else source
        raise ParseError(f"{where}: not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError(f"{source}: scenario file must be a mapping")

    problems: list[str] = []
    unknown = set(raw) - _TOP_LEVEL_FIELDS
    for key in sorted(unknown):
        problems.append(f"unknown field '{key}'")

    building_ref = raw.get("building")
    if building_ref is None:
        problems.append("missing required field 'building'")
    horizon_days = raw.get("horizon_days")
    if horizon_days is None:
        problems.append("missing required field 'horizon_days'")

    population = raw.get("population") or {}
    size = population.get("size")
    if size is None:
        problems.append("missing required field 'population.size'")

    if problems:
        raise ValidationError([f"{source}: {p}" for p in problems])

    building_path = Path(base_dir) / str(building_ref)
    building = load_building_file(building_path)

    mix = PopulationMix(
        schedule=_parse_mix(
            population.get("schedule_mix"), ScheduleClass, "population.schedule_mix",
            problems,
        ),
        awareness=_parse_mix(
            population.get("awareness_mix"), Stereotype, "population.awareness_mix",
            problems,
        ),
    )

    policy_name = raw.get("lighting_policy", PolicyKind.AUTOMATED.value)
    try:
        policy_kind = PolicyKind(policy_name)
    except ValueError:
        problems.append(
            f"lighting_policy must be one of "
            f"{[k.value for k in PolicyKind]}, got {policy_name!r}"
        )
        policy_kind = PolicyKind.AUTOMATED
    off_delay = raw.get("automated_off_delay_minutes", 20)
    policy = LightingPolicy(policy_kind, off_delay)

    behavior_raw = raw.get("behavior") or {}
    for key in sorted(set(behavior_raw) - set(_BEHAVIOR_FIELDS)):
        problems.append(f"unknown field 'behavior.{key}'")
    behavior = BehaviorParams(
        **{k: v for k, v in behavior_raw.items() if k in _BEHAVIOR_FIELDS}
    )

    social = raw.get("social") or {}
    for key in sorted(set(social) - set(_SOCIAL_FIELDS)):
        problems.append(f"unknown field 'social.{key}'")

    if problems:
        raise ValidationError([f"{source}: {p}" for p in problems])

    scenario = Scenario(
        building=building,
        population_size=int(size),
        mix=mix,
        policy=policy,
        contact_rate=float(social.get("contact_rate", 1.0)),
        awareness_delta=float(social.get("awareness_delta", 1.0)),
        small_world_k=int(social.get("small_world_k", 4)),
        small_world_beta=float(social.get("small_world_beta", 0.1)),
        behavior=behavior,
        horizon_days=int(horizon_days),
        start_day_of_week=int(raw.get("start_day_of_week", 0)),
        replications=int(raw.get("replications", 20)),
        master_seed=int(raw.get("seed", 1)),
        building_path=str(building_path.resolve()),
    )
    try:
        scenario.validate()
    except ValidationError as exc:
        raise ValidationError([f"{source}: {p}" for p in exc.problems]) from exc
    return scenario


def _parse_mix(section, enum_cls, where, problems):
    if section is None:
        return dict(
            PopulationMix().schedule
            if enum_cls is ScheduleClass
            else PopulationMix().awareness
        )
    out = {}
    valid = {member.value: member for member in enum_cls}
    for key, value in section.items():
        member = valid.get(str(key))
        if member is None:
            problems.append(f"{where} has unknown entry '{key}'")
            continue
        out[member] = float(value)
    for member in enum_cls:
        out.setdefault(member, 0.0)
    return out


def serialize_scenario(scenario: Scenario) -> str:
    """Render a scenario back to the file format (building by path)."""
    doc = {
        "building": scenario.building_path or "building.yaml",
        "seed": scenario.master_seed,
        "horizon_days": scenario.horizon_days,
        "start_day_of_week": scenario.start_day_of_week,
        "replications": scenario.replications,
        "lighting_policy": scenario.policy.kind.value,
        "automated_off_delay_minutes": scenario.policy.off_delay_minutes,
        "population": {
            "size": scenario.population_size,
            "schedule_mix": {
                c.value: scenario.mix.schedule.get(c, 0.0) for c in ScheduleClass
            },
            "awareness_mix": {
                s.value: scenario.mix.awareness.get(s, 0.0) for s in Stereotype
            },
        },
        "social": {
            "contact_rate": scenario.contact_rate,
            "awareness_delta": scenario.awareness_delta,
            "small_world_k": scenario.small_world_k,
            "small_world_beta": scenario.small_world_beta,
        },
        "behavior": asdict(scenario.behavior),
    }
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


def scenario_fingerprint(scenario: Scenario) -> str:
    """Content hash covering the scenario and its building."""
    payload = serialize_scenario(scenario) + serialize_building(scenario.building)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def window_mask(
    preset: str, horizon_days: int, start_day_of_week: int = 0
) -> np.ndarray:
    """Boolean minute mask for a named analysis window.

    weekday-day: Mon-Fri 09:00-17:00; night: 19:00-07:00 every day;
    weekend: all of Saturday and Sunday; night-weekend: their union.
    """
    if preset not in WINDOW_PRESETS:
        raise ValidationError(
            f"unknown window '{preset}'; expected one of {WINDOW_PRESETS}"
        )
    n = horizon_days * MINUTES_PER_DAY
    minutes = np.arange(n)
    minute_of_day = minutes % MINUTES_PER_DAY
    day_of_week = (start_day_of_week + minutes // MINUTES_PER_DAY) % 7
    weekend = day_of_week >= 5
    night = (minute_of_day >= 19 * 60) | (minute_of_day < 7 * 60)
    if preset == "all":
        return np.ones(n, dtype=bool)
    if preset == "weekday-day":
        return (
            ~weekend & (minute_of_day >= 9 * 60) & (minute_of_day < 17 * 60)
        )
    if preset == "night":
        return night
    if preset == "weekend":
        return weekend
    return night | weekend


@dataclass(frozen=True)
class RunManifest:
    artifact_version: str
    command: str
    scenario_path: str | None
    scenario_sha256: str
    master_seed: int
    replications: int
    horizon_days: int
    start_day: str
    outputs: tuple[dict, ...]  # {"path": relative, "sha256": ..., "bytes": ...}


def _fmt_watts(value: float) -> str:
    return f"{value:.10g}"


def _fmt_float(value: float) -> str:
    return f"{value:.6f}"


def _write_bytes_atomic(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _minute_csv_bytes(ledger: EnergyLedger, fmt) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["minute", "base_w", "lights_w", "computers_w", "total_w"])
    base, lights, computers = ledger.base_w, ledger.lights_w, ledger.computers_w
    total = ledger.total_w
    for m in range(len(ledger)):
        writer.writerow(
            [m, fmt(base[m]), fmt(lights[m]), fmt(computers[m]), fmt(total[m])]
        )
    return buf.getvalue().encode("utf-8")


def _half_hourly_csv_bytes(ledger: EnergyLedger) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["bin_start", "base_kwh", "lights_kwh", "computers_kwh", "total_kwh"]
    )
    for b in half_hour_bins(ledger):
        writer.writerow(
            [
                b.start_minute,
                f"{b.base_kwh:.9f}",
                f"{b.lights_kwh:.9f}",
                f"{b.computers_kwh:.9f}",
                f"{b.total_kwh:.9f}",
            ]
        )
    return buf.getvalue().encode("utf-8")


def _proportions_payload(
    ledger: EnergyLedger, preset: str, horizon_days: int, start_dow: int
) -> dict:
    mask = window_mask(preset, horizon_days, start_dow)
    base, lights, computers = category_proportions_masked(ledger, mask)
    minutes = int(mask.sum())
    return {
        "window": preset,
        "window_minutes": minutes,
        "horizon_days": horizon_days,
        "start_day": DAY_NAMES[start_dow],
        "fractions": {"base": base, "lights": lights, "computers": computers},
        "kwh": {
            "base": float(ledger.base_w[mask].sum()) / 60.0 / 1000.0,
            "lights": float(ledger.lights_w[mask].sum()) / 60.0 / 1000.0,
            "computers": float(ledger.computers_w[mask].sum()) / 60.0 / 1000.0,
        },
    }


def _json_bytes(payload) -> bytes:
    return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode("utf-8")


def _mean_ledger(result: ExperimentResult) -> EnergyLedger:
    return EnergyLedger(
        result.mean_base_w, result.mean_lights_w, result.mean_computers_w
    )


def emit_experiment(
    result: ExperimentResult,
    out_dir: str | Path,
    command: str = "simulate",
    window: str = "all",
    scenario_path: str | None = None,
) -> list[Path]:
    """Write the standard file set for one experiment run.

    Produces a mean minute series, mean half-hourly series, a category
    proportion report, one minute series per replication, and the run
    manifest. Byte-identical for identical results.
    """
    out = Path(out_dir)
    (out / "reps").mkdir(parents=True, exist_ok=True)
    scenario = result.scenario
    written: list[tuple[Path, bytes]] = []

    mean_ledger = _mean_ledger(result)
    written.append((out / "minutes_mean.csv", _minute_csv_bytes(mean_ledger, _fmt_float)))
    written.append((out / "half_hourly_mean.csv", _half_hourly_csv_bytes(mean_ledger)))
    written.append(
        (
            out / "proportions.json",
            _json_bytes(
                _proportions_payload(
                    mean_ledger,
                    window,
                    scenario.horizon_days,
                    scenario.start_day_of_week,
                )
            ),
        )
    )
    for i, rep in enumerate(result.replications):
        written.append(
            (
                out / "reps" / f"rep_{i:03d}_minutes.csv",
                _minute_csv_bytes(rep.ledger, _fmt_watts),
            )
        )

    for path, data in written:
        _write_bytes_atomic(path, data)
    _emit_manifest(out, [p for p, _ in written], result, command, scenario_path)
    return [p for p, _ in written] + [out / "manifest.json"]


def emit_comparison(
    comparison: PolicyComparison,
    out_dir: str | Path,
    scenario_path: str | None = None,
) -> list[Path]:
    """Write the policy-comparison report plus per-policy mean series."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    automated = comparison.automated
    staff = comparison.staff_controlled
    payload = {
        "policies": {
            "automated": _experiment_payload(automated),
            "staff_controlled": _experiment_payload(staff),
        },
        "paired_diff_kwh": [float(x) for x in comparison.paired_diff_kwh],
        "mean_diff_kwh": comparison.mean_diff_kwh,
        "paired_se_kwh": comparison.paired_se_kwh,
        "lower_consumption_policy": comparison.lower_policy.value,
    }
    written = [
        (out / "comparison.json", _json_bytes(payload)),
        (
            out / "automated_minutes_mean.csv",
            _minute_csv_bytes(_mean_ledger(automated), _fmt_float),
        ),
        (
            out / "staff_controlled_minutes_mean.csv",
            _minute_csv_bytes(_mean_ledger(staff), _fmt_float),
        ),
    ]
    for path, data in written:
        _write_bytes_atomic(path, data)
    _emit_manifest(
        out, [p for p, _ in written], automated, "compare", scenario_path
    )
    return [p for p, _ in written] + [out / "manifest.json"]


def _experiment_payload(result: ExperimentResult) -> dict:
    return {
        "mean_total_kwh": result.mean_total_kwh,
        "std_total_kwh": result.std_total_kwh,
        "total_kwh_per_rep": [float(x) for x in result.total_kwh_per_rep],
        "category_kwh_mean": result.category_kwh_mean,
        "category_kwh_std": result.category_kwh_std,
        "mean_final_awareness": result.mean_final_awareness(),
        "replications": len(result.replications),
    }


def _emit_manifest(
    out: Path,
    paths: list[Path],
    result: ExperimentResult,
    command: str,
    scenario_path: str | None,
) -> None:
    scenario = result.scenario
    outputs = tuple(
        {
            "path": str(p.relative_to(out)),
            "sha256": hashlib.sha256(p.read_bytes()).hexdigest(),
            "bytes": p.stat().st_size,
        }
        for p in sorted(paths)
    )
    manifest = RunManifest(
        artifact_version=__version__,
        command=command,
        scenario_path=scenario_path,
        scenario_sha256=scenario_fingerprint(scenario),
        master_seed=result.master_seed,
        replications=len(result.replications),
        horizon_days=scenario.horizon_days,
        start_day=DAY_NAMES[scenario.start_day_of_week],
        outputs=outputs,
    )
    _write_bytes_atomic(out / "manifest.json", _json_bytes(asdict(manifest)))
