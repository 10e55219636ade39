"""Application facade: wires store, bus, catalog, inventory, orchestrator,
NFV simulator, and federation into one crash-consistent unit.

Write path.  Every mutation runs under one lock: mutate the in-memory
aggregates, publish the resulting events, then drain the bus.  Draining
delivers the batch, writes a full-state snapshot, and only then acknowledges
the events in the log.  An effect is therefore either inside the snapshot or
its causing event is still unacknowledged and will be redelivered on the
next start, where the projector (always the first subscriber) re-applies the
payload before any business handler runs.
"""

from __future__ import annotations

import logging
import os
import threading
import uuid
from dataclasses import dataclass, field

from .bus import Event, EventBus
from .canon import format_ts, now_utc
from .catalog import Catalog, Category
from .domain import (
    CharacteristicValue,
    CharacteristicValueEntry,
    LifecycleStatus,
    ORDER_TERMINAL_STATES,
    Service,
    ServiceOrder,
    ServiceSpecCharacteristic,
    ServiceSpecification,
    ServiceState,
    SpecType,
    ValueType,
)
from .errors import UnknownNsd, UnknownService
from .federation import ClientFactory, FederationManager
from .gst import build_gst_specification, derive_nest, load_default_template
from .inventory import Inventory
from .nfvo import NfvoSimulator, SimConfig
from .orchestrator import Notifier, Orchestrator
from .store import EventStore

logger = logging.getLogger(__name__)

CRASH_ENV = "SLICEOSS_CRASH_AFTER_TOPIC"

DEFAULT_TOKENS = {
    "provider-token": {"user": "admin", "role": "provider"},
    "customer-token": {"user": "alice", "role": "customer"},
    "partner-token": {"user": "partner", "role": "customer"},
}

NEST_NAME = "eMBB 5G Slice"
RADIO_SPEC_NAME = "Radio Access Configuration"
CORE_SPEC_NAME = "Core Network Onboarding"
RFS_SPEC_NAME = "cirros_2vm_ns"


@dataclass
class AppConfig:
    data_dir: str | None = None
    self_name: str = "local"
    default_vim_id: str = "vim-1"
    tokens: dict = field(default_factory=lambda: {k: dict(v) for k, v in DEFAULT_TOKENS.items()})
    sim: SimConfig = field(default_factory=SimConfig)
    crash_after_topic: str | None = None

    def __post_init__(self):
        if self.crash_after_topic is None:
            self.crash_after_topic = os.environ.get(CRASH_ENV) or None


class SliceOss:
    """One running instance; all public methods are thread-safe."""

    def __init__(self, config: AppConfig | None = None, client_factory: ClientFactory | None = None):
        self.config = config or AppConfig()
        self.lock = threading.RLock()
        self.store = EventStore(self.config.data_dir)
        self.bus = EventBus(self.store, crash_after_topic=self.config.crash_after_topic)
        self.catalog = Catalog()
        self.inventory = Inventory()
        self.sim = NfvoSimulator(self.config.sim)
        self.notifier = Notifier()
        self.orchestrator = Orchestrator(
            self.catalog,
            self.inventory,
            publish=self.bus.publish,
            notifier=self.notifier,
            default_vim_id=self.config.default_vim_id,
        )
        self.federation = FederationManager(self.catalog, self.inventory, client_factory)
        self.orchestrator.remote_dispatch = self.federation.place_remote_order

        self.catalog.set_listener(self._on_catalog_change)
        self.inventory.set_listener(self._on_inventory_change)

        # The projector must see every event before business handlers do.
        for topic in (
            "ORDER.CREATED",
            "ORDER.STATE.CHANGED",
            "SERVICE.CREATED",
            "SERVICE.STATE.CHANGED",
            "CATALOG.CHANGED",
        ):
            self.bus.subscribe(topic, self._project, name="projector")
        self.bus.subscribe(
            "ORDER.CREATED", self.orchestrator.handle_order_created, name="fulfillment"
        )
        self.bus.subscribe("NFV.DEPLOY.REQUEST", self._handle_deploy_request, name="nfvo-adapter")
        self.bus.subscribe(
            "NFV.DEPLOY.RESULT", self.orchestrator.handle_deploy_result, name="deploy-results"
        )
        self.bus.subscribe(
            "SERVICE.STATE.CHANGED",
            self.orchestrator.handle_service_state_changed,
            name="aggregation",
        )
        self.bus.set_post_batch_hook(lambda _events: self.store.write_snapshot(self.snapshot_state()))

    # -- event production ------------------------------------------------------

    def _on_catalog_change(self, kind: str, obj) -> None:
        correlation = getattr(obj, "id", "")
        self.bus.publish("CATALOG.CHANGED", {kind: obj.to_dict()}, correlation)

    def _on_inventory_change(self, kind: str, service: Service, previous: str | None, note: str | None) -> None:
        if kind == "created":
            self.bus.publish("SERVICE.CREATED", {"service": service.to_dict()}, service.order_id)
        else:
            self.bus.publish(
                "SERVICE.STATE.CHANGED",
                {"service": service.to_dict(), "previousState": previous, "note": note},
                service.order_id,
            )

    # -- projector ---------------------------------------------------------------

    def _project(self, event: Event) -> None:
        """Fold an event payload into the aggregates, idempotently.

        During live operation the mutation already happened and these are
        no-ops; after a restart they rebuild whatever the last snapshot is
        missing.  Staleness guard: a state-change payload is applied only
        when the stored state equals the payload's previous state, so
        redelivered history can never roll a fresher snapshot back.
        """
        payload = event.payload
        if event.topic == "ORDER.CREATED":
            order = ServiceOrder.from_dict(payload["order"])
            if order.id not in self.orchestrator.orders:
                self.orchestrator.orders[order.id] = order
        elif event.topic == "ORDER.STATE.CHANGED":
            order = ServiceOrder.from_dict(payload["order"])
            stored = self.orchestrator.orders.get(order.id)
            if stored is None:
                self.orchestrator.orders[order.id] = order
            elif stored.state.value == payload.get("previousState"):
                self.orchestrator.orders[order.id] = order
        elif event.topic == "SERVICE.CREATED":
            service = Service.from_dict(payload["service"])
            try:
                self.inventory.get(service.id)
            except UnknownService:
                self.inventory.apply_service(service)
        elif event.topic == "SERVICE.STATE.CHANGED":
            service = Service.from_dict(payload["service"])
            try:
                stored = self.inventory.get(service.id)
            except UnknownService:
                self.inventory.apply_service(service)
                return
            if stored.state.value == payload.get("previousState"):
                self.inventory.apply_service(
                    service, previous=payload.get("previousState"), note=payload.get("note")
                )
        elif event.topic == "CATALOG.CHANGED":
            if "specification" in payload:
                self.catalog.apply_specification(
                    ServiceSpecification.from_dict(payload["specification"])
                )
            elif "category" in payload:
                self.catalog.apply_category(Category.from_dict(payload["category"]))

    # -- NFV adapter --------------------------------------------------------------

    def _handle_deploy_request(self, event: Event) -> None:
        payload = event.payload
        service_id = payload["params"]["serviceId"]
        try:
            self.inventory.get(service_id)
        except UnknownService:
            logger.warning("deployment request for unknown service %s ignored", service_id)
            return
        existing = self.sim.find_instance_by_param("serviceId", service_id)
        if existing is not None:
            self.orchestrator.register_deployment(existing.deploy_id, service_id)
            return
        try:
            deploy_id = self.sim.request_instantiation(
                payload["nsdId"],
                payload["nsName"],
                payload["vimId"],
                dict(payload["params"]),
            )
        except UnknownNsd as exc:
            self.inventory.update_state(
                service_id, ServiceState.INACTIVE, note=str(exc), error=True
            )
            return
        self.orchestrator.register_deployment(deploy_id, service_id)

    # -- commit helpers --------------------------------------------------------------

    def _commit(self) -> int:
        """Drain pending events; guarantee a snapshot lands either way."""
        count = self.bus.drain()
        if count == 0:
            self.save_snapshot()
        return count

    def drain(self) -> int:
        with self.lock:
            return self._commit()

    def tick(self, ticks: int = 1) -> list[dict]:
        """Advance simulator time and feed resolutions back into fulfillment."""
        with self.lock:
            resolutions = self.sim.tick(ticks)
            for resolution in resolutions:
                self.bus.publish(
                    "NFV.DEPLOY.RESULT",
                    {
                        "deployId": resolution["deployId"],
                        "success": resolution["success"],
                        "state": resolution["state"],
                        "info": resolution["info"],
                        "params": resolution["params"],
                    },
                    resolution["params"].get("orderId", ""),
                )
            self._commit()
            return resolutions

    # -- snapshot and restore ----------------------------------------------------------

    def snapshot_state(self) -> dict:
        return {
            "savedAt": format_ts(now_utc()),
            "catalog": {
                "specifications": [s.to_dict() for s in self.catalog.all_specs()],
                "categories": [c.to_dict() for c in self.catalog.categories()],
            },
            "inventory": {
                "services": [s.to_dict() for s in self.inventory.all_services()],
                "history": self.inventory.dump_history(),
            },
            "orchestrator": self.orchestrator.to_state(),
            "federation": self.federation.to_state(),
            "nfvo": self.sim.to_state(),
        }

    def save_snapshot(self) -> None:
        self.store.write_snapshot(self.snapshot_state())

    def restore(self) -> int:
        """Load the snapshot, replay unacknowledged events, square tasks.

        Unacknowledged events are first folded through the projector in log
        order, so the aggregates hold the freshest known state before any
        business handler runs; the events are then redelivered normally,
        where the projector pass is a no-op and the handlers re-run their
        idempotent side effects.  Returns the number of redelivered events.
        """
        with self.lock:
            snapshot = self.store.read_snapshot()
            if snapshot:
                for raw in snapshot["catalog"]["specifications"]:
                    self.catalog.apply_specification(ServiceSpecification.from_dict(raw))
                for raw in snapshot["catalog"]["categories"]:
                    self.catalog.apply_category(Category.from_dict(raw))
                self.inventory.load(
                    [Service.from_dict(s) for s in snapshot["inventory"]["services"]],
                    snapshot["inventory"]["history"],
                )
                self.orchestrator.load_state(snapshot["orchestrator"])
                self.federation.load_state(snapshot["federation"])
                self.sim.load_state(snapshot["nfvo"])
            unacked = [Event.from_dict(raw) for raw in self.store.unacked_events()]
            for event in unacked:
                self._project(event)
            for event in unacked:
                self.bus.enqueue(event)
            redelivered = len(unacked)
            self.bus.drain()
            self.orchestrator.reconcile_tasks()
            self.save_snapshot()
            if snapshot or redelivered:
                logger.info(
                    "restore complete snapshot=%s redelivered=%d", bool(snapshot), redelivered
                )
            return redelivered

    def close(self) -> None:
        self.federation.close()
        self.store.close()

    # -- guarded mutations -------------------------------------------------------------

    def accept_order(self, ordered_by: str, item_requests: list[dict]) -> dict:
        """Accept an order; the returned dict is the acknowledgment snapshot,
        captured before fulfillment starts."""
        with self.lock:
            order = self.orchestrator.accept_order(ordered_by, item_requests)
            acknowledged = order.to_dict()
            self._commit()
            return acknowledged

    def upsert_specification(self, spec: ServiceSpecification) -> ServiceSpecification:
        with self.lock:
            result = self.catalog.upsert_specification(spec)
            self._commit()
            return result

    def link_bundle(self, parent_id: str, child_ids: list[str]) -> ServiceSpecification:
        with self.lock:
            result = self.catalog.link_bundle(parent_id, child_ids)
            self._commit()
            return result

    def upsert_category(self, category: Category) -> Category:
        with self.lock:
            result = self.catalog.upsert_category(category)
            self._commit()
            return result

    def complete_manual_task(self, task_id: str, resolution: ServiceState, note: str | None = None):
        with self.lock:
            task = self.orchestrator.complete_manual_task(task_id, resolution, note)
            self._commit()
            return task

    def update_service_state(
        self, service_id: str, target: ServiceState, note: str | None = None
    ) -> Service:
        with self.lock:
            service = self.inventory.update_state(service_id, target, note=note)
            self._commit()
            return service

    def onboard_nsd(self, **kwargs):
        with self.lock:
            nsd = self.sim.onboard_nsd(**kwargs)
            self._commit()
            return nsd

    def request_instantiation(self, nsd_id: str, ns_name: str, vim_id: str, params: dict | None = None) -> str:
        with self.lock:
            deploy_id = self.sim.request_instantiation(nsd_id, ns_name, vim_id, params)
            self._commit()
            return deploy_id

    def terminate_instance(self, deploy_id: str):
        with self.lock:
            instance = self.sim.terminate(deploy_id)
            self._commit()
            return instance

    def register_partner(self, name: str, endpoint_url: str, auth_token: str, partner_id: str | None = None):
        with self.lock:
            partner = self.federation.register_partner(name, endpoint_url, auth_token, partner_id)
            self._commit()
            return partner

    def import_partner_catalog(self, partner_id: str):
        with self.lock:
            imported = self.federation.import_specifications(partner_id)
            self._commit()
            return imported

    def sync_federation(self) -> int:
        with self.lock:
            self.federation.retry_pending_dispatch(self.federation.place_remote_order)
            changes = self.federation.sync_remote_status()
            self._commit()
            return changes

    # -- seed and demo --------------------------------------------------------------------

    def seed(self) -> dict:
        """Install the starter catalog: template, derived slice bundle, parts.

        Safe to run repeatedly; existing records are left untouched.
        """
        with self.lock:
            template = load_default_template()
            gst = self.catalog.get_by_name("GST")
            if gst is None:
                gst = self.catalog.upsert_specification(build_gst_specification(template))

            radio = self.catalog.get_by_name(RADIO_SPEC_NAME)
            if radio is None:
                radio = self.catalog.upsert_specification(
                    ServiceSpecification(
                        id=str(uuid.uuid4()),
                        name=RADIO_SPEC_NAME,
                        version="1.0",
                        description="Radio coverage arrangements handled by the provider's field team.",
                        spec_type=SpecType.CFS,
                        lifecycle_status=LifecycleStatus.ACTIVE,
                        characteristics=[
                            _text_characteristic(
                                "Coverage Area",
                                "Geographic area the radio access must cover.",
                                default="campus",
                                configurable=True,
                            )
                        ],
                    )
                )
            core = self.catalog.get_by_name(CORE_SPEC_NAME)
            if core is None:
                core = self.catalog.upsert_specification(
                    ServiceSpecification(
                        id=str(uuid.uuid4()),
                        name=CORE_SPEC_NAME,
                        version="1.0",
                        description="Operator checklist for attaching the slice to the core network.",
                        spec_type=SpecType.CFS,
                        lifecycle_status=LifecycleStatus.ACTIVE,
                        characteristics=[
                            _text_characteristic(
                                "Handover Checklist",
                                "Procedure the operations team signs off.",
                                default="standard attach procedure",
                            )
                        ],
                    )
                )

            nsd = self.sim.find_nsd(RFS_SPEC_NAME, "1.0")
            if nsd is None:
                nsd = self.sim.onboard_nsd(
                    name=RFS_SPEC_NAME,
                    version="1.0",
                    package_location="https://osm-download.etsi.org/ftp/osm-packages/cirros_2vm_ns.tar.gz",
                    packaging_format="OSM",
                    vendor="OSM",
                )
            rfs = self.catalog.get_by_name(RFS_SPEC_NAME)
            if rfs is None:
                rfs = self.catalog.upsert_specification(
                    ServiceSpecification(
                        id=str(uuid.uuid4()),
                        name=RFS_SPEC_NAME,
                        version="1.0",
                        description="Two-VM network service deployed through the NFV orchestrator.",
                        spec_type=SpecType.RFS,
                        lifecycle_status=LifecycleStatus.ACTIVE,
                        characteristics=[
                            _text_characteristic("NSDID", "Descriptor id at the NFV orchestrator.", default=nsd.id),
                            _text_characteristic("OnBoardingStatus", "Descriptor packaging state.", default="ONBOARDED"),
                            _text_characteristic("PackagingFormat", "Descriptor packaging format.", default="OSM"),
                            _text_characteristic("Vendor", "Descriptor vendor.", default="OSM"),
                            _text_characteristic(
                                "PackageLocation",
                                "Where the descriptor package came from.",
                                default="https://osm-download.etsi.org/ftp/osm-packages/cirros_2vm_ns.tar.gz",
                            ),
                        ],
                    )
                )

            nest = self.catalog.get_by_name(NEST_NAME)
            if nest is None:
                nest = derive_nest(
                    gst,
                    NEST_NAME,
                    {
                        "Slice service type": CharacteristicValue(value="1", alias="eMBB"),
                        "Maximum number of UEs": CharacteristicValue(value="1000"),
                    },
                )
                nest = self.catalog.upsert_specification(nest)
                self.catalog.link_bundle(nest.id, [radio.id, core.id, rfs.id])

            if not any(c.name == "Network Slices" for c in self.catalog.categories()):
                self.catalog.upsert_category(
                    Category(
                        id="cat-network-slices",
                        name="Network Slices",
                        description="Orderable slice bundles.",
                        spec_ids=[nest.id],
                    )
                )
            if not any(c.name == "Templates" for c in self.catalog.categories()):
                self.catalog.upsert_category(
                    Category(
                        id="cat-templates",
                        name="Templates",
                        description="Master templates slices are derived from.",
                        spec_ids=[gst.id],
                    )
                )
            self._commit()
            summary = {
                "gstSpecId": gst.id,
                "nestSpecId": nest.id,
                "radioSpecId": radio.id,
                "coreSpecId": core.id,
                "rfsSpecId": rfs.id,
                "nsdId": nsd.id,
            }
            logger.info("seed complete %s", summary)
            return summary

    def demo(self) -> dict:
        """End-to-end walkthrough: order the slice bundle, let the NFV leg
        deploy, resolve the manual legs, and report the final picture.

        Resumable: an unfinished demo order is picked up instead of starting
        another, so interrupting and rerunning converges on one result.
        """
        seeded = self.seed()
        with self.lock:
            order = None
            for candidate in self.orchestrator.list_orders(ordered_by="demo"):
                if candidate.state not in ORDER_TERMINAL_STATES:
                    order = candidate
            if order is None:
                acknowledged = self.orchestrator.accept_order(
                    "demo",
                    [
                        {
                            "specId": seeded["nestSpecId"],
                            "requestedValues": {"Slice service type": {"value": "1", "alias": "eMBB"}},
                        }
                    ],
                )
                self._commit()
                order = self.orchestrator.get_order(acknowledged.id)
        # Give the simulator enough ticks to resolve the deployment.
        for _ in range(self.sim.config.instantiation_delay_ticks + 2):
            if not any(
                b.status == "REQUESTED"
                for b in self.orchestrator.bindings.values()
                if b.order_id == order.id
            ):
                break
            self.tick(1)
        with self.lock:
            open_tasks = self.orchestrator.list_tasks(order_id=order.id, status="OPEN")
        resolved = []
        for task in open_tasks:
            self.complete_manual_task(task.id, ServiceState.ACTIVE, note="demo walkthrough")
            resolved.append(task.id)
        with self.lock:
            order = self.orchestrator.get_order(order.id)
            services = [
                {
                    "name": s.name,
                    "category": s.category.value,
                    "startMode": int(s.start_mode),
                    "state": s.state.value,
                }
                for s in self.inventory.query(order_id=order.id)
            ]
            deployments = [
                {"deployId": i.deploy_id, "state": i.state.value, "nsName": i.ns_name}
                for i in self.sim.list_instances()
            ]
            return {
                "orderId": order.id,
                "orderState": order.state.value,
                "services": services,
                "tasksResolved": resolved,
                "deployments": deployments,
            }


def _text_characteristic(
    name: str, description: str, default: str | None = None, configurable: bool = False
) -> ServiceSpecCharacteristic:
    values = []
    if default is not None:
        values.append(
            CharacteristicValueEntry(
                value=CharacteristicValue(value=default), is_default=True
            )
        )
    return ServiceSpecCharacteristic(
        name=name,
        description=description,
        value_type=ValueType.TEXT,
        configurable=configurable,
        min_cardinality=0,
        max_cardinality=1,
        values=values,
    )
