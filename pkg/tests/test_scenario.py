import copy
import json
import math

import numpy as np
import pytest

from mhmr.errors import ConfigurationError
from mhmr.scenario import (
    BUILTIN_SCRIPT_NAMES,
    Event,
    ScenarioRunner,
    ScenarioScript,
    TopologyEdit,
    build_topology,
    builtin_script,
    run_scenario,
    sweep,
    sweep_scripts,
    sweep_summary_rows,
)


def allocation_only_script(
    name="unit", m=4, duration_s=60.0, events=(), K=5.0, placement="center", **params
):
    return ScenarioScript.from_dict(
        {
            "name": name,
            "topology": {"m": m, "pattern": "none"},
            "workspace": {"origin": [0.0, 0.0], "width": 20.0, "height": 5.0},
            "params": {"K": K, "tau": 0.5, **params},
            "placement": placement,
            "mode": "allocation-only",
            "duration_s": duration_s,
            "events": list(events),
        }
    )


def step_event(time_s, target, metric, value):
    return {
        "time_s": time_s,
        "target": target,
        "metric": metric,
        "profile": {"type": "step", "value": value},
    }


class TestBuildTopology:
    def test_alternating_pattern(self):
        team = build_topology({"m": 10, "pattern": "alternating"})
        assert team.m == 10 and team.h == 5
        assert team.operators_of(3) == (3,)
        assert team.is_autonomous(8)

    def test_explicit_edges(self):
        team = build_topology({"m": 3, "h": 2, "edges": [[1, 1], [2, 2]]})
        assert team.operators_of(1) == (1,)
        assert team.is_autonomous(3)

    def test_rejects_unknown_pattern(self):
        with pytest.raises(ConfigurationError):
            build_topology({"m": 3, "pattern": "ring"})


class TestValidation:
    def test_nonexistent_robot_named(self):
        script = allocation_only_script(
            events=[step_event(1.0, "robot:99", "robot_condition", 0.5)]
        )
        with pytest.raises(ConfigurationError, match="robot 99"):
            script.validate()

    def test_operator_metric_on_robot_rejected(self):
        script = allocation_only_script(
            events=[step_event(1.0, "robot:1", "operator_condition", 0.5)]
        )
        with pytest.raises(ConfigurationError):
            script.validate()

    def test_event_after_duration_rejected(self):
        script = allocation_only_script(
            duration_s=10.0, events=[step_event(20.0, "robot:1", "robot_condition", 0.5)]
        )
        with pytest.raises(ConfigurationError):
            script.validate()

    def test_out_of_range_event_value_rejected(self):
        with pytest.raises(ConfigurationError):
            allocation_only_script(
                events=[step_event(1.0, "robot:1", "robot_condition", 1.5)]
            )

    def test_placement_length_mismatch(self):
        script = allocation_only_script(m=3)
        script = ScenarioScript.from_dict({**script.to_dict(), "placement": [[0, 0]]})
        with pytest.raises(ConfigurationError):
            script.validate()


class TestSerialization:
    @pytest.mark.parametrize("name", BUILTIN_SCRIPT_NAMES)
    def test_json_round_trip(self, name, tmp_path):
        script = builtin_script(name)
        path = tmp_path / f"{name}.json"
        script.to_json(path)
        loaded = ScenarioScript.from_json(path)
        assert loaded.to_dict() == script.to_dict()

    def test_malformed_dict_rejected(self):
        with pytest.raises(ConfigurationError):
            ScenarioScript.from_dict({"name": "x"})

    def test_wrong_schema_version_rejected(self):
        data = builtin_script("s3").to_dict()
        data["schema_version"] = 99
        with pytest.raises(ConfigurationError):
            ScenarioScript.from_dict(data)

    def test_unknown_builtin(self):
        with pytest.raises(ConfigurationError):
            builtin_script("s9")


class TestRunBasics:
    def test_no_events_stays_uniform(self):
        record = run_scenario(allocation_only_script(duration_s=10.0))
        for row in record.cycles:
            assert row.sigma == pytest.approx((0.25,) * 4, abs=1e-15)
        assert record.summary["converged"] is True
        assert record.summary["total_initial_error"] == 0.0

    def test_shares_always_sum_to_one(self):
        script = builtin_script("s3")
        record = run_scenario(script)
        for row in record.cycles:
            assert abs(math.fsum(row.sigma) - 1.0) <= 1e-9

    def test_event_causality(self):
        script = allocation_only_script(
            duration_s=30.0,
            events=[step_event(15.0, "robot:2", "robot_condition", 0.5)],
        )
        record = run_scenario(script)
        for row in record.cycles:
            if row.time_s < 15.0:
                assert row.sigma_proposed == pytest.approx((0.25,) * 4, abs=1e-15)
            if row.time_s >= 15.0:
                assert row.sigma_proposed[1] < 0.25
        assert record.cycles[-1].sigma[1] < 0.25

    def test_replay_is_byte_identical(self, tmp_path):
        script = builtin_script("s3")
        a = run_scenario(script).write(tmp_path / "a")
        b = run_scenario(script).write(tmp_path / "b")
        assert (a / "cycles.csv").read_bytes() == (b / "cycles.csv").read_bytes()
        assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()

    def test_allocation_disabled_freezes_shares(self):
        script = builtin_script("s3")
        script = ScenarioScript.from_dict(
            {**script.to_dict(), "allocation_enabled": False}
        )
        record = run_scenario(script)
        assert record.cycles[-1].sigma == pytest.approx((0.1,) * 10, abs=1e-15)


class TestDeterioratedTeamEquilibria:
    """The m=10 team with operators 3/5 at 0.8, robot 3 at 0.6 (or failed)
    and robot 8 at 0.75 must settle at the closed-form shares."""

    def test_deteriorated_equilibrium(self):
        record = run_scenario(builtin_script("s3"))
        final = record.summary["final_sigma"]
        assert final[2] == pytest.approx(0.054036, abs=1e-6)
        assert final[4] == pytest.approx(0.084056, abs=1e-6)
        assert final[7] == pytest.approx(0.073878, abs=1e-6)
        for i in (0, 1, 3, 5, 6, 8, 9):
            assert final[i] == pytest.approx(0.112576, abs=1e-6)
        assert record.summary["converged"] is True

    def test_failed_robot_share_is_exact_zero(self):
        record = run_scenario(builtin_script("s4"))
        final = record.summary["final_sigma"]
        assert final[2] == 0.0
        assert final[4] == pytest.approx(0.088858, abs=1e-6)
        assert final[7] == pytest.approx(0.078098, abs=1e-6)
        for i in (0, 1, 3, 5, 6, 8, 9):
            assert final[i] == pytest.approx(0.119006, abs=1e-6)
        assert abs(math.fsum(final) - 1.0) <= 1e-9


class TestFullSim:
    def test_short_patrol_run_records_laps(self):
        data = builtin_script("s1").to_dict()
        data["duration_s"] = 150.0
        data["events"] = []
        record = run_scenario(ScenarioScript.from_dict(data))
        assert record.laps, "expected completed laps in 150 s"
        assert all(lap.lap_time_s > 0 for lap in record.laps)
        assert record.summary["max_t_l"] is not None
        # Healthy team on 30x12 with gaps: each strip's lap fits the 65 s
        # threshold plus tolerance.
        assert record.summary["max_t_l"] <= 65.0 + 10.0

    def test_trajectory_recording(self):
        data = builtin_script("s1").to_dict()
        data["duration_s"] = 20.0
        data["events"] = []
        data["record_trajectory"] = True
        record = run_scenario(ScenarioScript.from_dict(data))
        assert record.trajectory
        times = {tr.time_s for tr in record.trajectory}
        # Decimated to twice a second, not every integration step.
        assert len(times) <= 41


class TestDynamicTopology:
    def test_add_robot_transitions_to_uniform(self):
        # m=4 -> 5 keeps every stationary robot clear of the proposed strip
        # boundaries, so the transition is not frozen by q_f = 0.
        script = allocation_only_script(m=4, duration_s=60.0)
        runner = ScenarioRunner(script)
        runner.run_until(10.0)
        runner.apply_topology_edit(
            TopologyEdit(kind="add_robot", robot_id=5, position=(18.0, 2.5))
        )
        record = runner.run()
        final = record.summary["final_sigma"]
        assert len(final) == 5
        np.testing.assert_allclose(final, 0.2, atol=1e-3)

    def test_remove_robot_reallocates_to_survivors(self):
        script = allocation_only_script(m=3, duration_s=120.0)
        runner = ScenarioRunner(script)
        runner.run_until(10.0)
        runner.apply_topology_edit(TopologyEdit(kind="remove_robot", robot_id=2))
        record = runner.run()
        final = record.summary["final_sigma"]
        assert final[1] == 0.0
        assert final[0] == pytest.approx(0.5, abs=1e-6)
        assert final[2] == pytest.approx(0.5, abs=1e-6)

    def test_disconnect_and_reconnect_operator(self):
        script = ScenarioScript.from_dict(
            {
                "name": "edge",
                "topology": {"m": 2, "h": 1, "edges": [[1, 1]]},
                "workspace": {"origin": [0.0, 0.0], "width": 20.0, "height": 5.0},
                "params": {"K": 5.0, "tau": 0.5},
                "placement": "center",
                "mode": "allocation-only",
                "duration_s": 90.0,
                "events": [],
            }
        )
        runner = ScenarioRunner(script)
        runner.run_until(5.0)
        runner.apply_topology_edit(
            TopologyEdit(kind="remove_edge", robot_id=1, operator_ids=(1,))
        )
        runner.run_until(40.0)
        # Disconnected teleoperation is a failure: the share drains away.
        assert runner.sigma[0] < 1e-6
        runner.apply_topology_edit(
            TopologyEdit(kind="add_edge", robot_id=1, operator_ids=(1,))
        )
        record = runner.run()
        final = record.summary["final_sigma"]
        np.testing.assert_allclose(final, 0.5, atol=1e-3)

    def test_add_existing_robot_rejected(self):
        runner = ScenarioRunner(allocation_only_script(m=3))
        with pytest.raises(ConfigurationError):
            runner.apply_topology_edit(TopologyEdit(kind="add_robot", robot_id=2))

    def test_remove_missing_edge_rejected(self):
        runner = ScenarioRunner(allocation_only_script(m=3))
        with pytest.raises(ConfigurationError):
            runner.apply_topology_edit(
                TopologyEdit(kind="remove_edge", robot_id=1, operator_ids=(7,))
            )


class TestTimelines:
    def test_ramp_profile_interpolates(self):
        script = allocation_only_script(
            duration_s=40.0,
            events=[
                step_event(0.0, "robot:1", "robot_condition", 0.4),
                {
                    "time_s": 10.0,
                    "target": "robot:1",
                    "metric": "robot_condition",
                    "profile": {"type": "ramp", "value": 1.0, "duration": 20.0},
                },
            ],
        )
        runner = ScenarioRunner(script)
        assert runner.snapshot_at(5.0).robot_condition[1] == pytest.approx(0.4)
        assert runner.snapshot_at(20.0).robot_condition[1] == pytest.approx(0.7)
        assert runner.snapshot_at(35.0).robot_condition[1] == pytest.approx(1.0)

    def test_stress_trace_event_drives_operator(self, tmp_path):
        trace = tmp_path / "op.csv"
        rows = ["time_s,stress"] + [f"{i},{1 if i < 30 else 0}" for i in range(60)]
        trace.write_text("\n".join(rows) + "\n")
        script = ScenarioScript.from_dict(
            {
                "name": "stress",
                "topology": {"m": 2, "h": 1, "edges": [[1, 1]]},
                "workspace": {"origin": [0.0, 0.0], "width": 20.0, "height": 5.0},
                "params": {"K": 5.0, "tau": 0.5, "window": 30},
                "placement": "center",
                "mode": "allocation-only",
                "duration_s": 60.0,
                "events": [
                    {
                        "time_s": 0.0,
                        "target": "operator:1",
                        "metric": "operator_condition",
                        "profile": {"type": "stress_trace", "path": "op.csv"},
                    }
                ],
            }
        )
        runner = ScenarioRunner(script, base_dir=tmp_path)
        assert runner.snapshot_at(29.0).operator_condition[1] == 0.0
        assert runner.snapshot_at(59.0).operator_condition[1] == 1.0


class TestSweeps:
    def test_singleton_sweep_matches_run(self):
        base = builtin_script("s3")
        [record] = sweep(base, "K", [5.0])
        direct = run_scenario(base)
        assert record.summary["final_sigma"] == direct.summary["final_sigma"]
        assert record.summary["convergence_time_s"] == direct.summary["convergence_time_s"]

    def test_k_sweep_names_and_params(self):
        scripts = sweep_scripts(builtin_script("s3"), "K", [1.0, 5.0])
        assert [s.params.K for s in scripts] == [1.0, 5.0]
        assert len({s.name for s in scripts}) == 2

    def test_m_sweep_scales_team(self):
        scripts = sweep_scripts(builtin_script("s3"), "m", [4, 20])
        assert [s.build_topology().m for s in scripts] == [4, 20]

    def test_m_sweep_rejects_explicit_edges(self):
        with pytest.raises(ConfigurationError):
            sweep_scripts(builtin_script("s1"), "m", [4])

    def test_unknown_axis(self):
        with pytest.raises(ConfigurationError):
            sweep_scripts(builtin_script("s3"), "tau", [1.0])

    def test_summary_rows(self):
        base = builtin_script("s3")
        records = sweep(base, "K", [1.0, 5.0])
        rows = sweep_summary_rows("K", [1.0, 5.0], records)
        assert [r["K"] for r in rows] == [1.0, 5.0]
        assert all(r["converged"] for r in rows)
        # Larger K converges faster on the same disturbance.
        assert rows[1]["convergence_time_s"] < rows[0]["convergence_time_s"]


class TestRunRecordFiles:
    def test_written_files_parse(self, tmp_path):
        record = run_scenario(builtin_script("s4"))
        out = record.write(tmp_path / "out")
        header = (out / "cycles.csv").read_text().splitlines()[0].split(",")
        assert "sigma_r3" in header and "q_f" in header and "K_e" in header
        summary = json.loads((out / "summary.json").read_text())
        assert summary["final_sigma"][2] == 0.0
        assert summary["m"] == 10
