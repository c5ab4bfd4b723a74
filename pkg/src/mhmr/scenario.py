"""Declarative scenario scripting and execution.

A scenario script fixes the team topology, workspace, parameters and a
timeline of condition events; running it advances a fixed-step clock,
fires an allocation cycle every cycle period and (in full-sim mode) steps
the patrolling robots in between.  Identical scripts produce identical
records, byte for byte.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from .allocation import propose_allocation
from .errors import ConfigurationError, NoCapableAgentError
from .geometry import GlobalWorkspace, partition_from_workload
from .metrics import ScriptedTrace, StressTrace, load_stress_trace, stress_to_condition
from .patrol import (
    PatrolParams,
    RobotKinematicState,
    able_velocity,
    assign_region,
    commanded_velocity,
    required_velocity,
    step_robot,
    system_patrol_time,
)
from .team import ConditionSnapshot, TeamTopology, WorkloadVector
from .transition import (
    TransitionParams,
    compute_q_f,
    step_transition,
    transition_coefficient,
)

SCHEMA_VERSION = 1

#: Total transition error below this, sustained, declares convergence.
CONVERGENCE_EPS = 1e-3
#: Number of consecutive converged cycles required.
CONVERGENCE_STREAK = 5
#: A share this small with a zero proposal snaps to exactly zero.
ZERO_SNAP = 1e-12

VALID_METRICS = ("operator_condition", "robot_condition", "performance")
VALID_MODES = ("full-sim", "allocation-only")


# ---------------------------------------------------------------------------
# Script model


@dataclass(frozen=True)
class Event:
    """One timeline entry: at ``time_s`` the target agent's metric starts
    following the given profile (step, ramp, or trace file)."""

    time_s: float
    target_kind: str  # "robot" | "operator"
    target_id: int
    metric: str
    profile: dict[str, Any]

    def __post_init__(self):
        if self.target_kind not in ("robot", "operator"):
            raise ConfigurationError(f"unknown event target kind {self.target_kind!r}")
        if self.metric not in VALID_METRICS:
            raise ConfigurationError(f"unknown event metric {self.metric!r}")
        kind = self.profile.get("type")
        if kind not in ("step", "ramp", "trace", "stress_trace"):
            raise ConfigurationError(f"unknown event profile type {kind!r}")
        if kind in ("step", "ramp"):
            value = float(self.profile["value"])
            if not (0.0 <= value <= 1.0):
                raise ConfigurationError(
                    f"event value {value} outside [0, 1] for {self.target_kind} {self.target_id}"
                )
        if kind == "ramp" and float(self.profile.get("duration", 0.0)) <= 0.0:
            raise ConfigurationError("ramp profile needs a positive duration")


@dataclass(frozen=True)
class ScenarioParams:
    K: float = 0.5
    tau: float = 0.5
    tau_star: float = 65.0
    v_max: float = 0.8
    psi: float = 0.1
    window: int = 30
    sim_dt: float = 0.05
    lap_tolerance: float = 10.0


@dataclass(frozen=True)
class ScenarioScript:
    """Everything needed to reproduce one run."""

    name: str
    topology: dict[str, Any]
    workspace: GlobalWorkspace
    params: ScenarioParams
    events: tuple[Event, ...]
    duration_s: float
    mode: str = "full-sim"
    placement: Any = "center"
    allocation_enabled: bool = True
    record_trajectory: bool = False
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.mode not in VALID_MODES:
            raise ConfigurationError(f"unknown mode {self.mode!r}")
        if self.duration_s <= 0:
            raise ConfigurationError("duration must be positive")

    def build_topology(self) -> TeamTopology:
        return build_topology(self.topology)

    def validate(self) -> None:
        """Cross-check events against the topology; raise naming offenders."""
        topology = self.build_topology()
        robots = set(topology.robot_ids)
        operators = set(topology.operator_ids)
        for ev in self.events:
            if not (0.0 <= ev.time_s <= self.duration_s):
                raise ConfigurationError(
                    f"event at {ev.time_s}s outside run duration {self.duration_s}s"
                )
            if ev.target_kind == "robot":
                if ev.target_id not in robots:
                    raise ConfigurationError(
                        f"event targets nonexistent robot {ev.target_id}"
                    )
                if ev.metric == "operator_condition":
                    raise ConfigurationError(
                        f"operator_condition event cannot target robot {ev.target_id}"
                    )
            else:
                if ev.target_id not in operators:
                    raise ConfigurationError(
                        f"event targets nonexistent operator {ev.target_id}"
                    )
                if ev.metric != "operator_condition":
                    raise ConfigurationError(
                        f"{ev.metric} event cannot target operator {ev.target_id}"
                    )
        if isinstance(self.placement, (list, tuple)) and len(self.placement) != topology.m:
            raise ConfigurationError(
                f"{len(self.placement)} explicit positions for {topology.m} robots"
            )

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "name": self.name,
            "topology": copy.deepcopy(self.topology),
            "workspace": {
                "origin": list(self.workspace.origin),
                "width": self.workspace.width,
                "height": self.workspace.height,
                "safety_gap": self.workspace.safety_gap,
            },
            "params": {
                "K": self.params.K,
                "tau": self.params.tau,
                "tau_star": self.params.tau_star,
                "v_max": self.params.v_max,
                "psi": self.params.psi,
                "window": self.params.window,
                "sim_dt": self.params.sim_dt,
                "lap_tolerance": self.params.lap_tolerance,
            },
            "placement": copy.deepcopy(self.placement),
            "events": [
                {
                    "time_s": ev.time_s,
                    "target": f"{ev.target_kind}:{ev.target_id}",
                    "metric": ev.metric,
                    "profile": copy.deepcopy(ev.profile),
                }
                for ev in self.events
            ],
            "duration_s": self.duration_s,
            "mode": self.mode,
            "allocation_enabled": self.allocation_enabled,
            "record_trajectory": self.record_trajectory,
        }

    @staticmethod
    def from_dict(data: dict[str, Any]) -> "ScenarioScript":
        try:
            version = int(data.get("schema_version", SCHEMA_VERSION))
            if version != SCHEMA_VERSION:
                raise ConfigurationError(f"unsupported schema_version {version}")
            events = []
            for raw in data.get("events", []):
                kind, _, ident = str(raw["target"]).partition(":")
                events.append(
                    Event(
                        time_s=float(raw["time_s"]),
                        target_kind=kind,
                        target_id=int(ident),
                        metric=str(raw["metric"]),
                        profile=dict(raw["profile"]),
                    )
                )
            ws = data["workspace"]
            params = ScenarioParams(**data.get("params", {}))
            return ScenarioScript(
                name=str(data.get("name", "unnamed")),
                topology=dict(data["topology"]),
                workspace=GlobalWorkspace(
                    origin=tuple(ws.get("origin", (0.0, 0.0))),
                    width=float(ws["width"]),
                    height=float(ws["height"]),
                    safety_gap=float(ws.get("safety_gap", 0.0)),
                ),
                params=params,
                events=tuple(events),
                duration_s=float(data["duration_s"]),
                mode=str(data.get("mode", "full-sim")),
                placement=data.get("placement", "center"),
                allocation_enabled=bool(data.get("allocation_enabled", True)),
                record_trajectory=bool(data.get("record_trajectory", False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed scenario script: {exc}") from exc

    @staticmethod
    def from_json(path: str | Path) -> "ScenarioScript":
        with open(path) as fh:
            return ScenarioScript.from_dict(json.load(fh))

    def to_json(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def build_topology(spec: dict[str, Any]) -> TeamTopology:
    """Topology from a script spec.

    Either a pattern (``alternating``: odd-indexed robots human-operated,
    one dedicated operator each, sharing the robot's index; ``none``: all
    autonomous) or explicit ``edges`` with operator count ``h``.
    """
    m = int(spec["m"])
    if m < 1:
        raise ConfigurationError("topology needs at least one robot")
    robot_ids = tuple(range(1, m + 1))
    if "edges" in spec:
        edges = [(int(r), int(o)) for r, o in spec["edges"]]
        if "h" in spec:
            operator_ids = tuple(range(1, int(spec["h"]) + 1))
        else:
            operator_ids = tuple(sorted({o for _, o in edges}))
        return TeamTopology.build(robot_ids, operator_ids, edges)
    pattern = spec.get("pattern", "none")
    if pattern == "alternating":
        edges = [(i, i) for i in robot_ids if i % 2 == 1]
        operator_ids = tuple(i for i in robot_ids if i % 2 == 1)
        return TeamTopology.build(robot_ids, operator_ids, edges)
    if pattern == "none":
        return TeamTopology.build(robot_ids)
    raise ConfigurationError(f"unknown topology pattern {pattern!r}")


# ---------------------------------------------------------------------------
# Metric timelines


class _Timeline:
    """Evaluates one agent metric over time from its ordered events."""

    def __init__(self, events: Sequence[Event], base_dir: Optional[Path], window: int):
        self.events = sorted(events, key=lambda e: e.time_s)
        self.window = window
        self._traces: dict[int, StressTrace | ScriptedTrace] = {}
        for i, ev in enumerate(self.events):
            kind = ev.profile["type"]
            if kind in ("trace", "stress_trace"):
                path = Path(ev.profile["path"])
                if base_dir is not None and not path.is_absolute():
                    path = base_dir / path
                self._traces[i] = load_stress_trace(path)

    def value_at(self, t: float) -> float:
        value = 1.0
        for i, ev in enumerate(self.events):
            if t < ev.time_s:
                break
            kind = ev.profile["type"]
            if kind == "step":
                value = float(ev.profile["value"])
            elif kind == "ramp":
                target = float(ev.profile["value"])
                duration = float(ev.profile["duration"])
                frac = min(1.0, (t - ev.time_s) / duration)
                value = value + (target - value) * frac
            else:
                trace = self._traces[i]
                offset = t - ev.time_s
                if isinstance(trace, StressTrace):
                    lo, hi = trace.span
                    clamped = min(max(offset, lo), hi)
                    value = stress_to_condition(trace, self.window, clamped)
                else:
                    value = trace.value_at(offset)
        return value


# ---------------------------------------------------------------------------
# Run records


@dataclass(frozen=True)
class CycleRow:
    cycle: int
    time_s: float
    sigma: tuple[float, ...]
    sigma_proposed: tuple[float, ...]
    q_f: float
    K_e: float
    kappa: tuple[float, ...]
    v: tuple[float, ...]
    transition_error: float
    note: str = ""


@dataclass(frozen=True)
class LapRow:
    robot_id: int
    lap: int
    lap_time_s: float
    transitional: bool


@dataclass(frozen=True)
class TrajectoryRow:
    time_s: float
    robot_id: int
    x: float
    y: float
    v: float


@dataclass
class RunRecord:
    """Everything a run produced, writable as a results directory."""

    script: ScenarioScript
    robot_ids: tuple[int, ...]
    cycles: list[CycleRow] = field(default_factory=list)
    laps: list[LapRow] = field(default_factory=list)
    trajectory: list[TrajectoryRow] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)

    def write(self, outdir: str | Path) -> Path:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        fmt = _fmt
        with open(outdir / "cycles.csv", "w", newline="") as fh:
            sigma_cols = [f"sigma_r{r}" for r in self.robot_ids]
            prop_cols = [f"sigma_prop_r{r}" for r in self.robot_ids]
            kappa_cols = [f"kappa_r{r}" for r in self.robot_ids]
            v_cols = [f"v_r{r}" for r in self.robot_ids]
            fh.write(
                ",".join(
                    ["cycle", "time_s"]
                    + sigma_cols
                    + prop_cols
                    + ["q_f", "K_e"]
                    + kappa_cols
                    + v_cols
                    + ["transition_error", "note"]
                )
                + "\n"
            )
            for row in self.cycles:
                cells = (
                    [str(row.cycle), fmt(row.time_s)]
                    + [fmt(s) for s in row.sigma]
                    + [fmt(s) for s in row.sigma_proposed]
                    + [fmt(row.q_f), fmt(row.K_e)]
                    + [fmt(k) for k in row.kappa]
                    + [fmt(v) for v in row.v]
                    + [fmt(row.transition_error), row.note]
                )
                fh.write(",".join(cells) + "\n")
        with open(outdir / "laps.csv", "w", newline="") as fh:
            fh.write("robot,lap,lap_time_s,transitional\n")
            for lap in self.laps:
                fh.write(
                    f"{lap.robot_id},{lap.lap},{fmt(lap.lap_time_s)},"
                    f"{int(lap.transitional)}\n"
                )
        if self.trajectory:
            with open(outdir / "trajectory.csv", "w", newline="") as fh:
                fh.write("time_s,robot,x,y,v\n")
                for tr in self.trajectory:
                    fh.write(
                        f"{fmt(tr.time_s)},{tr.robot_id},{fmt(tr.x)},"
                        f"{fmt(tr.y)},{fmt(tr.v)}\n"
                    )
        with open(outdir / "summary.json", "w") as fh:
            json.dump(self.summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return outdir


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(float(x), ".12g")


# ---------------------------------------------------------------------------
# Topology edits


@dataclass(frozen=True)
class TopologyEdit:
    """A mid-run team change: add/remove a robot or an operator edge."""

    kind: str  # "add_robot" | "remove_robot" | "add_edge" | "remove_edge"
    robot_id: int
    operator_ids: tuple[int, ...] = ()
    position: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if self.kind not in ("add_robot", "remove_robot", "add_edge", "remove_edge"):
            raise ConfigurationError(f"unknown topology edit {self.kind!r}")


# ---------------------------------------------------------------------------
# Runner


class ScenarioRunner:
    """Single-threaded executor for one scenario script.

    ``run()`` drives the whole script; ``run_until()`` plus
    ``apply_topology_edit()`` support mid-run team changes.
    """

    def __init__(self, script: ScenarioScript, base_dir: Optional[Path] = None):
        script.validate()
        self.script = script
        self.topology = script.build_topology()
        self.workspace = script.workspace
        self.params = script.params
        self.transition_params = TransitionParams(K=script.params.K, tau=script.params.tau)
        self.patrol_params = PatrolParams(
            v_max=script.params.v_max,
            tau_star=script.params.tau_star,
            lap_tolerance=script.params.lap_tolerance,
            sim_dt=script.params.sim_dt,
        )
        self._timelines: dict[tuple[str, int, str], _Timeline] = {}
        grouped: dict[tuple[str, int, str], list[Event]] = {}
        for ev in script.events:
            grouped.setdefault((ev.target_kind, ev.target_id, ev.metric), []).append(ev)
        for key, events in grouped.items():
            self._timelines[key] = _Timeline(events, base_dir, script.params.window)

        self.sigma = np.full(self.topology.m, 1.0 / self.topology.m)
        self.sigma_proposed = self.sigma.copy()
        self.cycle_index = 0
        self.step_index = 0
        self.dt = script.params.sim_dt
        self.n_steps = int(round(script.duration_s / self.dt))
        self.cycle_every = max(1, int(round(script.params.tau / self.dt)))
        self.forced_failed: set[int] = set()
        self.disconnected: set[int] = set()

        self.positions = self._initial_positions()
        self.robots: list[RobotKinematicState] = []
        if script.mode == "full-sim":
            partition = partition_from_workload(self.workspace, self._sigma_vector())
            for i, rid in enumerate(self.topology.robot_ids):
                state = RobotKinematicState(position=self.positions[i])
                assign_region(state, partition.regions[i])
                self.robots.append(state)

        self.record = RunRecord(script=script, robot_ids=self.topology.robot_ids)
        self._streak = 0
        self._convergence_time: Optional[float] = None
        self._initial_error: Optional[float] = None
        self._allocation_errors = 0
        self._traj_every = max(1, int(round(0.5 / self.dt)))

    # -- helpers ------------------------------------------------------------

    def _sigma_vector(self) -> WorkloadVector:
        return WorkloadVector(self.sigma, timestamp=self.cycle_index)

    def _initial_positions(self) -> list[np.ndarray]:
        placement = self.script.placement
        if isinstance(placement, (list, tuple)):
            return [np.asarray(p, dtype=float) for p in placement]
        partition = partition_from_workload(
            self.workspace, WorkloadVector.uniform(self.topology.m)
        )
        positions = []
        for region in partition.regions:
            if placement == "center":
                positions.append(np.asarray(region.center))
            elif placement == "left":
                positions.append(
                    np.array([region.x + 0.1 * region.width, region.center[1]])
                )
            elif placement == "perimeter":
                positions.append(np.array([region.x, region.y]))
            else:
                raise ConfigurationError(f"unknown placement {placement!r}")
        return positions

    def _metric(self, kind: str, ident: int, metric: str, t: float) -> float:
        timeline = self._timelines.get((kind, ident, metric))
        return timeline.value_at(t) if timeline is not None else 1.0

    def snapshot_at(self, t: float) -> ConditionSnapshot:
        robot_condition = {}
        for rid in self.topology.robot_ids:
            if rid in self.forced_failed or rid in self.disconnected:
                robot_condition[rid] = 0.0
            else:
                robot_condition[rid] = self._metric("robot", rid, "robot_condition", t)
        return ConditionSnapshot(
            robot_condition=robot_condition,
            operator_condition={
                oid: self._metric("operator", oid, "operator_condition", t)
                for oid in self.topology.operator_ids
            },
            robot_performance={
                rid: self._metric("robot", rid, "performance", t)
                for rid in self.topology.robot_ids
            },
            timestamp=self.cycle_index,
        )

    def _current_positions(self) -> list[np.ndarray]:
        if self.robots:
            return [r.position for r in self.robots]
        return self.positions

    def _kappas(self, snapshot: ConditionSnapshot) -> list[float]:
        kappas = []
        for rid in self.topology.robot_ids:
            v_able = able_velocity(snapshot, self.topology, rid, 1.0)
            kappas.append(0.0 if rid in self.forced_failed else v_able)
        return kappas

    # -- core loop ----------------------------------------------------------

    def _allocation_cycle(self, t: float) -> None:
        snapshot = self.snapshot_at(t)
        kappa = self._kappas(snapshot)
        note = ""
        q_f = float("nan")
        K_e = 0.0
        if self.script.allocation_enabled:
            try:
                proposed = propose_allocation(self.topology, snapshot)
                self.sigma_proposed = np.asarray(proposed.shares).copy()
                if self._initial_error is None:
                    self._initial_error = float(
                        math.fsum(np.abs(self.sigma - self.sigma_proposed).tolist())
                    )
                preview = partition_from_workload(self.workspace, proposed)
                failed = {
                    i for i, s in enumerate(self.sigma_proposed) if s == 0.0
                }
                q_f = compute_q_f(self._current_positions(), preview, failed)
                K_e = transition_coefficient(q_f, self.params.K)
                updated = step_transition(self._sigma_vector(), proposed, K_e)
                sigma = np.asarray(updated.shares).copy()
                # A vanishing share of a fully failed robot snaps to exact
                # zero; survivors are renormalized to keep the total at one.
                snap = (self.sigma_proposed == 0.0) & (sigma < ZERO_SNAP) & (sigma > 0.0)
                if np.any(snap):
                    sigma[snap] = 0.0
                    sigma /= math.fsum(sigma.tolist())
                self.sigma = sigma
            except NoCapableAgentError as exc:
                note = str(exc)
                self._allocation_errors += 1
        error = float(math.fsum(np.abs(self.sigma - self.sigma_proposed).tolist()))
        if self.script.allocation_enabled and not note:
            if error < CONVERGENCE_EPS:
                self._streak += 1
                if self._streak == CONVERGENCE_STREAK and self._convergence_time is None:
                    self._convergence_time = t - (CONVERGENCE_STREAK - 1) * self.params.tau
            else:
                self._streak = 0
                self._convergence_time = None

        velocities = [0.0] * self.topology.m
        if self.robots:
            partition = partition_from_workload(self.workspace, self._sigma_vector())
            for i, state in enumerate(self.robots):
                assign_region(state, partition.regions[i])
            velocities = self._velocities(snapshot)

        self.record.cycles.append(
            CycleRow(
                cycle=self.cycle_index,
                time_s=t,
                sigma=tuple(self.sigma.tolist()),
                sigma_proposed=tuple(self.sigma_proposed.tolist()),
                q_f=q_f,
                K_e=K_e,
                kappa=tuple(kappa),
                v=tuple(velocities),
                transition_error=error,
                note=note,
            )
        )
        self.cycle_index += 1

    def _velocities(self, snapshot: ConditionSnapshot) -> list[float]:
        velocities = []
        for i, rid in enumerate(self.topology.robot_ids):
            if rid in self.forced_failed:
                velocities.append(0.0)
                continue
            v_able = able_velocity(snapshot, self.topology, rid, self.params.v_max)
            v_req = required_velocity(
                self.robots[i].region, self.params.tau_star, self.params.v_max
            )
            velocities.append(commanded_velocity(v_able, v_req))
        return velocities

    def _step_robots(self, t: float) -> None:
        snapshot = self.snapshot_at(t)
        velocities = self._velocities(snapshot)
        for i, state in enumerate(self.robots):
            step_robot(state, velocities[i], self.dt)
        if self.script.record_trajectory and self.step_index % self._traj_every == 0:
            for i, rid in enumerate(self.topology.robot_ids):
                state = self.robots[i]
                self.record.trajectory.append(
                    TrajectoryRow(
                        time_s=t,
                        robot_id=rid,
                        x=float(state.position[0]),
                        y=float(state.position[1]),
                        v=velocities[i],
                    )
                )

    def run_until(self, t_stop: float) -> None:
        """Advance the clock up to (and including) ``t_stop``."""
        stop_step = min(self.n_steps, int(round(t_stop / self.dt)))
        while self.step_index <= stop_step:
            t = self.step_index * self.dt
            if self.step_index % self.cycle_every == 0:
                self._allocation_cycle(t)
            if self.step_index < self.n_steps and self.robots:
                self._step_robots(t)
            self.step_index += 1

    def run(self) -> RunRecord:
        self.run_until(self.script.duration_s)
        self._finalize()
        return self.record

    # -- dynamic topology ---------------------------------------------------

    def apply_topology_edit(self, edit: TopologyEdit) -> TeamTopology:
        """Apply a team change between cycles; takes effect next cycle.

        An added robot enters with zero workload and transitions in; a
        removed robot is treated as failed and its share reallocated; an
        operator edge removal that leaves a human-operated robot without
        any operator marks that robot failed until reconnected.
        """
        t = self.topology
        if edit.kind == "add_robot":
            if edit.robot_id in t.robot_ids:
                raise ConfigurationError(f"robot {edit.robot_id} already exists")
            new_ops = tuple(o for o in edit.operator_ids if o not in t.operator_ids)
            self.topology = TeamTopology.build(
                t.robot_ids + (edit.robot_id,),
                t.operator_ids + new_ops,
                set(t.edges) | {(edit.robot_id, o) for o in edit.operator_ids},
            )
            self.sigma = np.append(self.sigma, 0.0)
            self.sigma_proposed = np.append(self.sigma_proposed, 0.0)
            pos = np.asarray(
                edit.position
                if edit.position is not None
                else self.workspace.bounds.center,
                dtype=float,
            )
            self.positions.append(pos)
            if self.robots:
                self.robots.append(RobotKinematicState(position=pos))
            self.record.robot_ids = self.topology.robot_ids
        elif edit.kind == "remove_robot":
            if edit.robot_id not in t.robot_ids:
                raise ConfigurationError(f"robot {edit.robot_id} does not exist")
            self.forced_failed.add(edit.robot_id)
        elif edit.kind == "remove_edge":
            removed = {(edit.robot_id, o) for o in edit.operator_ids}
            if not removed <= t.edges:
                raise ConfigurationError(
                    f"edge(s) {sorted(removed)} not present in topology"
                )
            self.topology = TeamTopology.build(
                t.robot_ids, t.operator_ids, t.edges - removed
            )
            was_operated = bool(t.operators_of(edit.robot_id))
            if was_operated and not self.topology.operators_of(edit.robot_id):
                # Disconnected teleoperation is a failure, not autonomy.
                self.disconnected.add(edit.robot_id)
        elif edit.kind == "add_edge":
            new_ops = tuple(o for o in edit.operator_ids if o not in t.operator_ids)
            self.topology = TeamTopology.build(
                t.robot_ids,
                t.operator_ids + new_ops,
                set(t.edges) | {(edit.robot_id, o) for o in edit.operator_ids},
            )
            if self.topology.operators_of(edit.robot_id):
                self.disconnected.discard(edit.robot_id)
        return self.topology

    # -- summary ------------------------------------------------------------

    def _finalize(self) -> None:
        active = [s > 0.0 for s in self.sigma]
        lap_times = []
        lap_flags = []
        for i, rid in enumerate(self.topology.robot_ids):
            if self.robots:
                state = self.robots[i]
                times, flags = state.lap_times, state.lap_transitional
            else:
                times, flags = [], []
            lap_times.append(times)
            lap_flags.append(flags)
            for lap, (lt, flag) in enumerate(zip(times, flags)):
                self.record.laps.append(
                    LapRow(robot_id=rid, lap=lap, lap_time_s=lt, transitional=flag)
                )
        t_l_series = []
        lap = 0
        while True:
            t_l = system_patrol_time(lap, lap_times, active)
            if t_l is None:
                break
            t_l_series.append([lap, float(t_l)])
            lap += 1
        self.record.summary = {
            "name": self.script.name,
            "m": self.topology.m,
            "mode": self.script.mode,
            "allocation_enabled": self.script.allocation_enabled,
            "duration_s": self.script.duration_s,
            "num_cycles": self.cycle_index,
            "converged": self._convergence_time is not None,
            "convergence_time_s": self._convergence_time,
            "total_initial_error": self._initial_error,
            "final_transition_error": self.record.cycles[-1].transition_error
            if self.record.cycles
            else None,
            "final_sigma": [float(s) for s in self.sigma],
            "final_sigma_proposed": [float(s) for s in self.sigma_proposed],
            "allocation_errors": self._allocation_errors,
            "t_l_series": t_l_series,
            "max_t_l": max((v for _, v in t_l_series), default=None),
        }


def run_scenario(
    script: ScenarioScript, base_dir: Optional[Path] = None
) -> RunRecord:
    """Execute a script start to finish and return its record."""
    return ScenarioRunner(script, base_dir=base_dir).run()


# ---------------------------------------------------------------------------
# Sweeps


SWEEP_AXES = ("K", "m")


def sweep_scripts(
    base: ScenarioScript, axis: str, values: Sequence[float]
) -> list[ScenarioScript]:
    """Script variants for a sweep: one per value, everything else shared."""
    if axis not in SWEEP_AXES:
        raise ConfigurationError(f"unknown sweep axis {axis!r}; use one of {SWEEP_AXES}")
    if not values:
        raise ConfigurationError("sweep needs at least one value")
    scripts = []
    for value in values:
        if axis == "K":
            if value <= 0:
                raise ConfigurationError(f"K must be positive, got {value}")
            scripts.append(
                replace(
                    base,
                    name=f"{base.name}_K{_fmt(value)}",
                    params=replace(base.params, K=float(value)),
                )
            )
        else:
            m = int(value)
            if m < 1:
                raise ConfigurationError(f"m must be at least 1, got {value}")
            if "edges" in base.topology:
                raise ConfigurationError(
                    "m sweep requires a pattern-based topology, not explicit edges"
                )
            topology = dict(base.topology)
            topology["m"] = m
            scripts.append(replace(base, name=f"{base.name}_m{m}", topology=topology))
    return scripts


def sweep(
    base: ScenarioScript, axis: str, values: Sequence[float]
) -> list[RunRecord]:
    """One run per value along the given axis, everything else shared."""
    return [run_scenario(script) for script in sweep_scripts(base, axis, values)]


def sweep_summary_rows(axis: str, values: Sequence[float], records: Sequence[RunRecord]):
    rows = []
    for value, record in zip(values, records):
        rows.append(
            {
                axis: value,
                "converged": record.summary["converged"],
                "convergence_time_s": record.summary["convergence_time_s"],
                "total_initial_error": record.summary["total_initial_error"],
                "final_transition_error": record.summary["final_transition_error"],
            }
        )
    return rows


# ---------------------------------------------------------------------------
# Bundled scripts


def builtin_script(name: str) -> ScenarioScript:
    """Bundled validation scenarios s1..s4.

    Event times and magnitudes for s1 are representative defaults (the
    qualitative shapes matter: a drastic drop, a permanent drop, and a
    dip-then-slow-recovery); s3/s4 use the documented deteriorated-team
    conditions with all events at t=0.
    """
    try:
        return ScenarioScript.from_dict(copy.deepcopy(_BUILTIN_SCRIPTS[name.lower()]))
    except KeyError:
        raise ConfigurationError(
            f"unknown demo scenario {name!r}; expected one of {sorted(_BUILTIN_SCRIPTS)}"
        ) from None


def _event(time_s, target, metric, profile):
    return {"time_s": time_s, "target": target, "metric": metric, "profile": profile}


_S1_BASE = {
    "schema_version": SCHEMA_VERSION,
    "topology": {"m": 3, "h": 2, "edges": [[1, 1], [2, 2]]},
    "workspace": {"origin": [0.0, 0.0], "width": 30.0, "height": 12.0, "safety_gap": 0.5},
    "params": {"K": 0.5, "tau": 0.5, "tau_star": 65.0, "v_max": 0.8, "sim_dt": 0.05},
    "placement": "perimeter",
    "mode": "full-sim",
}

_BUILTIN_SCRIPTS: dict[str, dict[str, Any]] = {
    "s1": {
        **copy.deepcopy(_S1_BASE),
        "name": "s1",
        "duration_s": 700.0,
        "events": [
            _event(150.0, "operator:1", "operator_condition", {"type": "step", "value": 0.5}),
            _event(350.0, "robot:3", "robot_condition", {"type": "step", "value": 0.7}),
            _event(540.0, "operator:1", "operator_condition", {"type": "step", "value": 0.4}),
            _event(
                560.0,
                "operator:1",
                "operator_condition",
                {"type": "ramp", "value": 1.0, "duration": 70.0},
            ),
        ],
    },
    "s2": {
        **copy.deepcopy(_S1_BASE),
        "name": "s2",
        "duration_s": 450.0,
        "events": [
            _event(200.0, "robot:3", "robot_condition", {"type": "step", "value": 0.0}),
        ],
    },
    "s3": {
        "schema_version": SCHEMA_VERSION,
        "name": "s3",
        "topology": {"m": 10, "pattern": "alternating"},
        "workspace": {"origin": [0.0, 0.0], "width": 20.0, "height": 5.0, "safety_gap": 0.01},
        "params": {"K": 5.0, "tau": 0.5, "tau_star": 65.0, "v_max": 0.8, "sim_dt": 0.05},
        "placement": "center",
        "mode": "allocation-only",
        "duration_s": 120.0,
        "events": [
            _event(0.0, "operator:3", "operator_condition", {"type": "step", "value": 0.8}),
            _event(0.0, "robot:3", "robot_condition", {"type": "step", "value": 0.6}),
            _event(0.0, "operator:5", "operator_condition", {"type": "step", "value": 0.8}),
            _event(0.0, "robot:8", "robot_condition", {"type": "step", "value": 0.75}),
        ],
    },
}

_BUILTIN_SCRIPTS["s4"] = {
    **copy.deepcopy(_BUILTIN_SCRIPTS["s3"]),
    "name": "s4",
    "placement": "left",
    "events": [
        _event(0.0, "operator:3", "operator_condition", {"type": "step", "value": 0.8}),
        _event(0.0, "robot:3", "robot_condition", {"type": "step", "value": 0.0}),
        _event(0.0, "operator:5", "operator_condition", {"type": "step", "value": 0.8}),
        _event(0.0, "robot:8", "robot_condition", {"type": "step", "value": 0.75}),
    ],
}

BUILTIN_SCRIPT_NAMES = tuple(sorted(_BUILTIN_SCRIPTS))
