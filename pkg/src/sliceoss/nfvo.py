"""Deterministic NFV orchestrator simulator.

Stands in for the northbound interface of a real orchestrator: descriptor
onboarding plus a four-operation lifecycle surface.  Time is a logical tick
counter and all randomness comes from one seeded generator, so a given
config and call sequence always produces the identical event log.
"""

from __future__ import annotations

import logging
import random
import uuid
from dataclasses import dataclass, field
import enum

from .errors import AlreadyTerminal, DuplicateNsd, UnknownInstance, UnknownNsd

logger = logging.getLogger(__name__)


@dataclass
class SimConfig:
    instantiation_delay_ticks: int = 2
    failure_probability: float = 0.0
    random_seed: int = 42

    def to_dict(self) -> dict:
        return {
            "instantiationDelayTicks": self.instantiation_delay_ticks,
            "failureProbability": self.failure_probability,
            "randomSeed": self.random_seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        return cls(
            instantiation_delay_ticks=int(data.get("instantiationDelayTicks", 2)),
            failure_probability=float(data.get("failureProbability", 0.0)),
            random_seed=int(data.get("randomSeed", 42)),
        )


class InstanceState(str, enum.Enum):
    REQUESTED = "REQUESTED"
    INSTANTIATING = "INSTANTIATING"
    RUNNING = "RUNNING"
    FAILED = "FAILED"
    TERMINATED = "TERMINATED"


RESOLVED_STATES = frozenset(
    {InstanceState.RUNNING, InstanceState.FAILED, InstanceState.TERMINATED}
)


@dataclass
class NsDescriptor:
    id: str
    name: str
    version: str = "1.0"
    onboarding_status: str = "ONBOARDED"
    package_location: str = ""
    packaging_format: str = ""
    vendor: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "version": self.version,
            "onboardingStatus": self.onboarding_status,
            "packageLocation": self.package_location,
            "packagingFormat": self.packaging_format,
            "vendor": self.vendor,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NsDescriptor":
        return cls(
            id=data["id"],
            name=data["name"],
            version=data.get("version", "1.0"),
            onboarding_status=data.get("onboardingStatus", "ONBOARDED"),
            package_location=data.get("packageLocation", ""),
            packaging_format=data.get("packagingFormat", ""),
            vendor=data.get("vendor", ""),
        )


@dataclass
class NsInstance:
    deploy_id: str
    nsd_id: str
    ns_name: str
    vim_id: str
    state: InstanceState = InstanceState.REQUESTED
    requested_at_tick: int = 0
    resolved_at_tick: int | None = None
    info: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "deployId": self.deploy_id,
            "nsdId": self.nsd_id,
            "nsName": self.ns_name,
            "vimId": self.vim_id,
            "state": self.state.value,
            "requestedAtTick": self.requested_at_tick,
            "resolvedAtTick": self.resolved_at_tick,
            "info": dict(self.info),
            "params": dict(self.params),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NsInstance":
        return cls(
            deploy_id=data["deployId"],
            nsd_id=data["nsdId"],
            ns_name=data["nsName"],
            vim_id=data["vimId"],
            state=InstanceState(data.get("state", "REQUESTED")),
            requested_at_tick=int(data.get("requestedAtTick", 0)),
            resolved_at_tick=data.get("resolvedAtTick"),
            info=dict(data.get("info", {})),
            params=dict(data.get("params", {})),
        )


class NfvoSimulator:
    """Simulated orchestrator with logical time and seeded randomness."""

    def __init__(self, config: SimConfig | None = None):
        self.config = config or SimConfig()
        self._rng = random.Random(self.config.random_seed)
        self.tick_now = 0
        self._nsd_counter = 0
        self._nsds: dict[str, NsDescriptor] = {}
        self._instances: dict[str, NsInstance] = {}
        # Creation order drives per-tick processing order, which keeps runs
        # with the same call sequence identical.
        self._instance_order: list[str] = []
        self.event_log: list[dict] = []

    # -- descriptors ---------------------------------------------------------

    def onboard_nsd(
        self,
        name: str,
        version: str = "1.0",
        package_location: str = "",
        packaging_format: str = "",
        vendor: str = "",
    ) -> NsDescriptor:
        for nsd in self._nsds.values():
            if nsd.name == name and nsd.version == version:
                raise DuplicateNsd(f"descriptor {name!r} version {version} already onboarded")
        self._nsd_counter += 1
        nsd = NsDescriptor(
            id=str(self._nsd_counter),
            name=name,
            version=version,
            onboarding_status="ONBOARDED",
            package_location=package_location,
            packaging_format=packaging_format,
            vendor=vendor,
        )
        self._nsds[nsd.id] = nsd
        self._log("NSD_ONBOARDED", {"nsdId": nsd.id, "name": name, "version": version})
        return nsd

    def get_nsd(self, nsd_id: str) -> NsDescriptor:
        nsd = self._nsds.get(nsd_id)
        if nsd is None:
            raise UnknownNsd(f"no descriptor {nsd_id!r}")
        return nsd

    def find_nsd(self, name: str, version: str | None = None) -> NsDescriptor | None:
        for nsd in self._nsds.values():
            if nsd.name == name and (version is None or nsd.version == version):
                return nsd
        return None

    def list_nsds(self) -> list[NsDescriptor]:
        return sorted(self._nsds.values(), key=lambda n: int(n.id))

    # -- lifecycle -------------------------------------------------------------

    def request_instantiation(
        self, nsd_id: str, ns_name: str, vim_id: str, params: dict | None = None
    ) -> str:
        self.get_nsd(nsd_id)
        deploy_id = str(uuid.UUID(int=self._rng.getrandbits(128), version=4))
        instance = NsInstance(
            deploy_id=deploy_id,
            nsd_id=nsd_id,
            ns_name=ns_name,
            vim_id=vim_id,
            state=InstanceState.REQUESTED,
            requested_at_tick=self.tick_now,
            params=dict(params or {}),
        )
        self._instances[deploy_id] = instance
        self._instance_order.append(deploy_id)
        self._log(
            "INSTANTIATION_REQUESTED",
            {"deployId": deploy_id, "nsdId": nsd_id, "nsName": ns_name, "vimId": vim_id},
        )
        return deploy_id

    def get_instance(self, deploy_id: str) -> NsInstance:
        instance = self._instances.get(deploy_id)
        if instance is None:
            raise UnknownInstance(f"no instance {deploy_id!r}")
        return instance

    def find_instance_by_param(self, key: str, value: str) -> NsInstance | None:
        for deploy_id in self._instance_order:
            instance = self._instances[deploy_id]
            if instance.params.get(key) == value:
                return instance
        return None

    def list_instances(self) -> list[NsInstance]:
        return [self._instances[d] for d in self._instance_order]

    def terminate(self, deploy_id: str) -> NsInstance:
        instance = self.get_instance(deploy_id)
        if instance.state in (InstanceState.TERMINATED, InstanceState.FAILED):
            raise AlreadyTerminal(f"instance {deploy_id} is already {instance.state.value}")
        instance.state = InstanceState.TERMINATED
        instance.resolved_at_tick = self.tick_now
        self._log("TERMINATED", {"deployId": deploy_id})
        return instance

    def tick(self, ticks: int = 1) -> list[dict]:
        """Advance logical time; returns the resolution events that fired.

        Each pending request becomes INSTANTIATING on the next tick and
        resolves once its configured delay has elapsed: one draw from the
        seeded generator decides failure, so probability 0 always succeeds
        and probability 1 always fails.
        """
        resolutions: list[dict] = []
        for _ in range(max(0, ticks)):
            self.tick_now += 1
            for deploy_id in list(self._instance_order):
                instance = self._instances[deploy_id]
                if instance.state is InstanceState.REQUESTED:
                    instance.state = InstanceState.INSTANTIATING
                    self._log("INSTANTIATING", {"deployId": deploy_id})
                if (
                    instance.state is InstanceState.INSTANTIATING
                    and self.tick_now
                    >= instance.requested_at_tick + self.config.instantiation_delay_ticks
                ):
                    failed = self._rng.random() < self.config.failure_probability
                    if failed:
                        instance.state = InstanceState.FAILED
                        instance.info = {"error": "instantiation failed"}
                    else:
                        instance.state = InstanceState.RUNNING
                        instance.info = {
                            "deployId": deploy_id,
                            "mgmtIp": self._synthetic_ip(),
                            "nsName": instance.ns_name,
                        }
                    instance.resolved_at_tick = self.tick_now
                    event = {
                        "deployId": deploy_id,
                        "success": not failed,
                        "state": instance.state.value,
                        "info": dict(instance.info),
                        "params": dict(instance.params),
                    }
                    self._log("RESOLVED", event)
                    resolutions.append(event)
                    logger.info(
                        "nfvo-sim resolved deploy=%s state=%s tick=%d",
                        deploy_id,
                        instance.state.value,
                        self.tick_now,
                    )
        return resolutions

    def _synthetic_ip(self) -> str:
        return "10.{}.{}.{}".format(
            self._rng.randint(0, 254), self._rng.randint(0, 254), self._rng.randint(1, 254)
        )

    def _log(self, kind: str, payload: dict) -> None:
        self.event_log.append({"tick": self.tick_now, "kind": kind, "payload": payload})

    # -- persistence -------------------------------------------------------

    def to_state(self) -> dict:
        version, internal, gauss = self._rng.getstate()
        return {
            "config": self.config.to_dict(),
            "tickNow": self.tick_now,
            "nsdCounter": self._nsd_counter,
            "nsds": [n.to_dict() for n in self.list_nsds()],
            "instances": [i.to_dict() for i in self.list_instances()],
            "rngState": [version, list(internal), gauss],
            "eventLog": list(self.event_log),
        }

    def load_state(self, state: dict) -> None:
        self.config = SimConfig.from_dict(state["config"])
        self.tick_now = int(state["tickNow"])
        self._nsd_counter = int(state["nsdCounter"])
        self._nsds = {n["id"]: NsDescriptor.from_dict(n) for n in state["nsds"]}
        self._instances = {}
        self._instance_order = []
        for raw in state["instances"]:
            instance = NsInstance.from_dict(raw)
            self._instances[instance.deploy_id] = instance
            self._instance_order.append(instance.deploy_id)
        version, internal, gauss = state["rngState"]
        self._rng.setstate((version, tuple(internal), gauss))
        self.event_log = list(state["eventLog"])

