"""Simulated NFV orchestrator: lifecycle, timing, seeded determinism."""

import re

import pytest

from sliceoss.canon import canonical_dumps
from sliceoss.errors import AlreadyTerminal, DuplicateNsd, UnknownInstance, UnknownNsd
from sliceoss.nfvo import InstanceState, NfvoSimulator, SimConfig


def sim_with_nsd(**config) -> tuple[NfvoSimulator, str]:
    sim = NfvoSimulator(SimConfig(**config))
    nsd = sim.onboard_nsd(name="probe_ns", version="1.0", vendor="lab")
    return sim, nsd.id


class TestDescriptors:
    def test_ids_are_sequential_strings(self):
        sim = NfvoSimulator()
        first = sim.onboard_nsd(name="a")
        second = sim.onboard_nsd(name="b")
        assert (first.id, second.id) == ("1", "2")
        assert first.onboarding_status == "ONBOARDED"

    def test_same_name_and_version_is_rejected(self):
        sim = NfvoSimulator()
        sim.onboard_nsd(name="a", version="1.0")
        with pytest.raises(DuplicateNsd):
            sim.onboard_nsd(name="a", version="1.0")
        sim.onboard_nsd(name="a", version="2.0")

    def test_find_and_get(self):
        sim, nsd_id = sim_with_nsd()
        assert sim.find_nsd("probe_ns").id == nsd_id
        assert sim.find_nsd("probe_ns", "9.9") is None
        with pytest.raises(UnknownNsd):
            sim.get_nsd("42")


class TestLifecycle:
    def test_request_requires_a_known_descriptor(self):
        sim = NfvoSimulator()
        with pytest.raises(UnknownNsd):
            sim.request_instantiation("1", "ns", "vim-1")

    def test_instantiation_walks_requested_instantiating_running(self):
        sim, nsd_id = sim_with_nsd(instantiation_delay_ticks=2)
        deploy_id = sim.request_instantiation(nsd_id, "ns-1", "vim-1", {"k": "v"})
        assert sim.get_instance(deploy_id).state is InstanceState.REQUESTED
        assert sim.tick() == []
        assert sim.get_instance(deploy_id).state is InstanceState.INSTANTIATING
        resolutions = sim.tick()
        assert sim.get_instance(deploy_id).state is InstanceState.RUNNING
        assert len(resolutions) == 1
        event = resolutions[0]
        assert event["success"] is True
        assert event["params"] == {"k": "v"}
        assert event["info"]["nsName"] == "ns-1"
        assert re.fullmatch(r"10\.\d+\.\d+\.\d+", event["info"]["mgmtIp"])

    def test_zero_delay_resolves_on_first_tick(self):
        sim, nsd_id = sim_with_nsd(instantiation_delay_ticks=0)
        sim.request_instantiation(nsd_id, "ns", "vim-1")
        assert len(sim.tick()) == 1

    def test_certain_failure(self):
        sim, nsd_id = sim_with_nsd(failure_probability=1.0)
        deploy_id = sim.request_instantiation(nsd_id, "ns", "vim-1")
        events = sim.tick(5)
        assert sim.get_instance(deploy_id).state is InstanceState.FAILED
        assert events[0]["success"] is False
        assert "error" in events[0]["info"]

    def test_terminate_and_terminal_guards(self):
        sim, nsd_id = sim_with_nsd()
        deploy_id = sim.request_instantiation(nsd_id, "ns", "vim-1")
        sim.tick(5)
        sim.terminate(deploy_id)
        assert sim.get_instance(deploy_id).state is InstanceState.TERMINATED
        with pytest.raises(AlreadyTerminal):
            sim.terminate(deploy_id)
        with pytest.raises(UnknownInstance):
            sim.get_instance("ghost")

    def test_find_instance_by_param(self):
        sim, nsd_id = sim_with_nsd()
        deploy_id = sim.request_instantiation(nsd_id, "ns", "vim-1", {"serviceId": "s9"})
        assert sim.find_instance_by_param("serviceId", "s9").deploy_id == deploy_id
        assert sim.find_instance_by_param("serviceId", "nope") is None


def run_scenario(seed: int) -> NfvoSimulator:
    sim = NfvoSimulator(SimConfig(random_seed=seed, failure_probability=0.35))
    nsd = sim.onboard_nsd(name="a", version="1.0")
    other = sim.onboard_nsd(name="b", version="1.0")
    sim.request_instantiation(nsd.id, "ns-1", "vim-1", {"i": "1"})
    sim.tick(1)
    sim.request_instantiation(other.id, "ns-2", "vim-2", {"i": "2"})
    sim.tick(4)
    sim.request_instantiation(nsd.id, "ns-3", "vim-1", {"i": "3"})
    sim.tick(3)
    return sim


class TestDeterminism:
    def test_same_seed_gives_byte_identical_event_logs(self):
        log_a = canonical_dumps(run_scenario(7).event_log)
        log_b = canonical_dumps(run_scenario(7).event_log)
        assert log_a == log_b

    def test_different_seeds_diverge(self):
        log_a = canonical_dumps(run_scenario(7).event_log)
        log_b = canonical_dumps(run_scenario(8).event_log)
        assert log_a != log_b

    def test_deploy_ids_come_from_the_seeded_generator(self):
        sim_a, nsd_a = sim_with_nsd()
        sim_b, nsd_b = sim_with_nsd()
        id_a = sim_a.request_instantiation(nsd_a, "ns", "vim-1")
        id_b = sim_b.request_instantiation(nsd_b, "ns", "vim-1")
        assert id_a == id_b

    def test_state_round_trip_continues_identically(self):
        source = NfvoSimulator(SimConfig(random_seed=11, failure_probability=0.5))
        nsd = source.onboard_nsd(name="a")
        source.request_instantiation(nsd.id, "ns-1", "vim-1")
        source.tick(1)
        source.request_instantiation(nsd.id, "ns-2", "vim-1")

        clone = NfvoSimulator()
        clone.load_state(source.to_state())
        assert canonical_dumps(clone.to_state()) == canonical_dumps(source.to_state())

        outcome_source = [e["success"] for e in source.tick(6)]
        outcome_clone = [e["success"] for e in clone.tick(6)]
        assert outcome_source == outcome_clone
        assert canonical_dumps(source.event_log) == canonical_dumps(clone.event_log)
