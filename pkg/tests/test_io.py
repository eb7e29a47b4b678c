import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arsim.io import (ScenarioError, TraceFormatError, dump_trace, parse_scenario, parse_trace,
                      render_trace_text, scenario_from_dict, scenario_to_dict, trace_to_dict)
from arsim.model import Mode, Topology
from arsim.simulator import Injection, Scenario, run


def doc(**over):
    d = {"topology": {"n": 3, "edges": [[0, 1], [1, 2]]}, "mode": "unbounded",
         "init": "legitimate", "seed": 1, "max_steps": 50}
    d.update(over)
    return d


class TestScenarioParsing:
    def test_minimal(self):
        sc = scenario_from_dict(doc())
        assert sc.topology == Topology.line(3) and sc.mode == Mode("unbounded", 3)
        assert sc.injections == () and sc.scheduler == "uniform"

    def test_flat_shorthand(self):
        d = doc()
        topo = d.pop("topology")
        assert scenario_from_dict(dict(d, **topo)).topology == Topology.line(3)
        with pytest.raises(ScenarioError, match="not both"):
            scenario_from_dict(dict(doc(), n=3))

    @pytest.mark.parametrize("over,msg", [
        ({"topology": {"n": 2, "edges": [[0, 2]]}}, "topology"),
        ({"mode": "modular"}, "mode"),
        ({"colour": "red"}, "colour"),
        ({"seed": -1}, "seed"),
        ({"gd": "lenient"}, "gd"),
        ({"injections": [{"step": 1, "kind": "corrupt", "pid": 0, "field": "otsn", "value": 3}]},
         r"injections\[0\].*fault model"),
        ({"injections": [{"step": 1, "kind": "ae", "pid": 0, "when": 3}]}, "when"),
        ({"init": {"explicit": [{"pid": 0}]}}, "1 processes"),
    ])
    def test_rejections(self, over, msg):
        with pytest.raises(ScenarioError, match=msg):
            scenario_from_dict(doc(**over))

    def test_json_error_position(self):
        with pytest.raises(ScenarioError, match="line 2"):
            parse_scenario('{"mode":\n ]')

    def test_bounded_otsn_corruption_allowed(self):
        sc = scenario_from_dict(doc(mode="bounded", injections=[
            {"step": 1, "kind": "corrupt", "pid": 0, "field": "otsn", "value": 3}]))
        assert sc.injections[0].value == 3

    def test_explicit_init_defaults(self):
        procs = [{"pid": j, "parent": max(j - 1, 0), "leader": 0, "dist": j, "status": "STABLE",
                  "sn": 0, "otsn": 0, "ctsn": 0, "res": 1} for j in range(3)]
        sc = scenario_from_dict(doc(init={"explicit": procs}))
        assert all(p.alive and not p.pending_ae for p in sc.init)

    def test_round_trip(self):
        sc = scenario_from_dict(doc(mode="bounded", gd="printed", authorize="on_s2",
                                    injections=[{"step": 4, "kind": "ae", "pid": 2}]))
        again = scenario_from_dict(json.loads(json.dumps(scenario_to_dict(sc))))
        assert again == sc and not again.mode.strict_gd


def _scenario(seed, n=4, steps=150):
    inj = (Injection(3, "ae", n - 1), Injection(20, "failstop", 1), Injection(40, "revive", 1))
    return Scenario(Topology.line(n), Mode("bounded", n), init="random", seed=seed,
                    max_steps=steps, injections=inj, authorize="on_s2")


class TestTraceFormat:
    def test_round_trip_is_a_fixpoint(self):
        text = dump_trace(run(_scenario(3)))
        assert dump_trace(parse_trace(text)) == text

    @settings(max_examples=15)
    @given(st.integers(0, 2 ** 63))
    def test_round_trip_preserves_records(self, seed):
        tr = run(_scenario(seed, steps=90))
        back = parse_trace(dump_trace(tr))
        assert back.records == tr.records and back.scenario == tr.scenario

    def test_tampered_snapshot(self):
        d = trace_to_dict(run(_scenario(5)))
        d["records"][64]["snapshot"][0]["otsn"] = (d["records"][64]["snapshot"][0]["otsn"] + 1) % 17
        with pytest.raises(TraceFormatError, match="snapshot"):
            parse_trace(json.dumps(d))

    def test_steps_must_increase(self):
        d = trace_to_dict(run(_scenario(5, steps=5)))
        d["records"][2]["step"] = 1
        with pytest.raises(TraceFormatError, match="increase"):
            parse_trace(json.dumps(d))

    def test_wrong_format(self):
        with pytest.raises(TraceFormatError):
            parse_trace('{"format": "other"}')

    def test_text_view_markers(self):
        sc = Scenario(Topology(1, frozenset()), Mode("unbounded", 1), authorize="on_s2",
                      injections=(Injection(0, "ae", 0),), max_steps=10)
        text = render_trace_text(trace_to_dict(run(sc)))
        assert "[entered S2]" in text and "[entered S1, restore complete]" not in text
        assert text.rstrip().splitlines()[-2:] == ["# entered S2 at step(s) 3",
                                                   "# entered S1 at step(s) 0, 6"]
