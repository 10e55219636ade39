"""Order fulfillment: decomposition into services, dispatch, aggregation.

An accepted order is decomposed into a tree of inventory services, one per
specification occurrence.  Leaves are then dispatched: resource-facing
services with a descriptor id go to the NFV orchestrator, customer-facing
leaves become manual provider tasks, and imported specifications are
forwarded to their origin partner.  Every leaf resolution triggers a
re-aggregation that rolls the leaf states up into interior services, order
items, and finally the order state itself.
"""

from __future__ import annotations

import logging
import uuid
from dataclasses import dataclass, field
from typing import Callable

from .canon import canonical_dumps, format_ts, now_utc
from .catalog import Catalog
from .domain import (
    CharacteristicValue,
    OrderEvent,
    OrderItem,
    OrderState,
    ORDER_TERMINAL_STATES,
    Service,
    ServiceCategory,
    ServiceOrder,
    ServiceSpecification,
    ServiceState,
    SpecType,
    StartMode,
    order_transition,
    service_transition_allowed,
)
from .errors import (
    BadRequest,
    InvalidResolution,
    NotOrderable,
    TaskNotOpen,
    UnknownDeployment,
    UnknownOrder,
    UnknownTask,
    ValueViolation,
)
from .gst import validate_value
from .inventory import Inventory

logger = logging.getLogger(__name__)

NSDID_KEY = "NSDID"


class Notifier:
    """Stakeholder notification hook; the default writes structured logs."""

    def notify(self, kind: str, subject: dict) -> None:
        logger.info("notify kind=%s subject=%s", kind, canonical_dumps(subject))


class TaskStatus:
    OPEN = "OPEN"
    RESOLVED = "RESOLVED"


@dataclass
class ManualTask:
    id: str
    order_id: str
    service_id: str
    service_name: str
    spec_id: str
    status: str = TaskStatus.OPEN
    created_at: str = ""
    resolved_at: str | None = None
    resolution: str | None = None
    note: str | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "orderId": self.order_id,
            "serviceId": self.service_id,
            "serviceName": self.service_name,
            "specId": self.spec_id,
            "status": self.status,
            "createdAt": self.created_at,
            "resolvedAt": self.resolved_at,
            "resolution": self.resolution,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ManualTask":
        return cls(
            id=data["id"],
            order_id=data["orderId"],
            service_id=data["serviceId"],
            service_name=data["serviceName"],
            spec_id=data["specId"],
            status=data.get("status", TaskStatus.OPEN),
            created_at=data.get("createdAt", ""),
            resolved_at=data.get("resolvedAt"),
            resolution=data.get("resolution"),
            note=data.get("note"),
        )


@dataclass
class DeploymentBinding:
    service_id: str
    order_id: str
    nsd_id: str
    ns_name: str
    vim_id: str
    deploy_id: str | None = None
    status: str = "REQUESTED"

    def to_dict(self) -> dict:
        return {
            "serviceId": self.service_id,
            "orderId": self.order_id,
            "nsdId": self.nsd_id,
            "nsName": self.ns_name,
            "vimId": self.vim_id,
            "deployId": self.deploy_id,
            "status": self.status,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DeploymentBinding":
        return cls(
            service_id=data["serviceId"],
            order_id=data["orderId"],
            nsd_id=data["nsdId"],
            ns_name=data["nsName"],
            vim_id=data["vimId"],
            deploy_id=data.get("deployId"),
            status=data.get("status", "REQUESTED"),
        )


# Leaf resolutions feeding the aggregation.
_PENDING = "pending"
_ACTIVE = "active"
_CLOSED = "closed"
_FAILED = "failed"


def _leaf_resolution(service: Service) -> str:
    if service.state is ServiceState.ACTIVE:
        return _ACTIVE
    if service.state is ServiceState.TERMINATED:
        return _CLOSED
    if service.state is ServiceState.INACTIVE and service.error_note:
        return _FAILED
    return _PENDING


def compute_outcome(leaves: list[Service]) -> OrderState:
    """Pure roll-up of leaf service states into an order state.

    A failed leaf fails the order.  All leaves resolved with at least one
    running means completion; resolved with nothing running stays PARTIAL
    (everything was closed by provider choice).  A mix of running and
    pending leaves is PARTIAL; nothing resolved keeps the order going.
    """
    resolutions = [_leaf_resolution(s) for s in leaves]
    if _FAILED in resolutions:
        return OrderState.FAILED
    any_active = _ACTIVE in resolutions
    if resolutions and all(r in (_ACTIVE, _CLOSED) for r in resolutions):
        return OrderState.COMPLETED if any_active else OrderState.PARTIAL
    if any_active:
        return OrderState.PARTIAL
    return OrderState.IN_PROGRESS


class Orchestrator:
    def __init__(
        self,
        catalog: Catalog,
        inventory: Inventory,
        publish: Callable[[str, dict, str], object],
        notifier: Notifier | None = None,
        default_vim_id: str = "vim-1",
    ):
        self.catalog = catalog
        self.inventory = inventory
        self._publish = publish
        self.notifier = notifier or Notifier()
        self.default_vim_id = default_vim_id
        self.orders: dict[str, ServiceOrder] = {}
        self.tasks: dict[str, ManualTask] = {}
        self.bindings: dict[str, DeploymentBinding] = {}
        self.deploy_index: dict[str, str] = {}
        # Injected by the federation module; takes (service, spec).
        self.remote_dispatch: Callable[[Service, ServiceSpecification], None] | None = None

    # -- order intake --------------------------------------------------------

    def accept_order(self, ordered_by: str, item_requests: list[dict]) -> ServiceOrder:
        """Validate and store a new order, then announce it on the bus.

        Each request is ``{"specId": ..., "requestedValues": {name: value}}``.
        Requested values may target any configurable characteristic of the
        referenced specification or of its bundle descendants.
        """
        if not item_requests:
            raise BadRequest("an order needs at least one item")
        items: list[OrderItem] = []
        for request in item_requests:
            spec = self.catalog.get(request["specId"])
            if spec.spec_type is not SpecType.CFS:
                raise NotOrderable(f"{spec.name!r} is resource-facing and cannot be ordered")
            if spec.lifecycle_status.value != "ACTIVE":
                raise NotOrderable(
                    f"{spec.name!r} is {spec.lifecycle_status.value} and cannot be ordered"
                )
            configurable = self._configurable_characteristics(spec)
            requested: dict[str, CharacteristicValue] = {}
            for name, raw in request.get("requestedValues", {}).items():
                value = (
                    raw
                    if isinstance(raw, CharacteristicValue)
                    else CharacteristicValue.from_dict(raw)
                    if isinstance(raw, dict)
                    else CharacteristicValue(value=str(raw))
                )
                char = configurable.get(name)
                if char is None:
                    raise ValueViolation(
                        f"{name!r} is not a configurable characteristic of {spec.name!r}"
                    )
                violations = validate_value(char, value.value)
                if violations:
                    raise ValueViolation(
                        f"value {value.value!r} rejected for {name!r}: "
                        + "; ".join(v.message for v in violations)
                    )
                requested[name] = value
            items.append(
                OrderItem(item_id=str(uuid.uuid4()), spec_id=spec.id, requested_values=requested)
            )
        order = ServiceOrder(
            id=str(uuid.uuid4()),
            ordered_by=ordered_by,
            order_date=format_ts(now_utc()),
            state=OrderState.ACKNOWLEDGED,
            items=items,
        )
        self.orders[order.id] = order
        self.notifier.notify("order-created", {"orderId": order.id, "orderedBy": ordered_by})
        self._publish("ORDER.CREATED", {"order": order.to_dict()}, order.id)
        logger.info("order accepted id=%s by=%s items=%d", order.id, ordered_by, len(items))
        return order

    def _configurable_characteristics(self, spec: ServiceSpecification) -> dict:
        """Configurable characteristics of a spec and its bundle descendants."""
        found: dict = {}
        visited: set[str] = set()
        stack = [spec]
        while stack:
            current = stack.pop()
            if current.id in visited:
                continue
            visited.add(current.id)
            for char in current.characteristics:
                if char.configurable and char.name not in found:
                    found[char.name] = char
            if current.origin is None:
                stack.extend(self.catalog.children(current.id))
        return found

    def get_order(self, order_id: str) -> ServiceOrder:
        order = self.orders.get(order_id)
        if order is None:
            raise UnknownOrder(f"no order {order_id!r}")
        return order

    def list_orders(self, ordered_by: str | None = None) -> list[ServiceOrder]:
        orders = list(self.orders.values())
        if ordered_by is not None:
            orders = [o for o in orders if o.ordered_by == ordered_by]
        return sorted(orders, key=lambda o: (o.order_date, o.id))

    # -- fulfillment ---------------------------------------------------------

    def handle_order_created(self, event) -> None:
        data = event.payload["order"]
        order = self.orders.get(data["id"])
        if order is None:
            order = ServiceOrder.from_dict(data)
            self.orders[order.id] = order
        if order.state is OrderState.ACKNOWLEDGED:
            self._transition(order, OrderEvent.BEGIN_FULFILLMENT)
        if order.state in ORDER_TERMINAL_STATES:
            return
        self.decompose(order)
        self.dispatch(order)
        self.aggregate(order.id)

    def handle_service_state_changed(self, event) -> None:
        order_id = event.payload["service"]["orderId"]
        if order_id in self.orders and self.orders[order_id].state not in ORDER_TERMINAL_STATES:
            self.aggregate(order_id)

    def handle_deploy_result(self, event) -> None:
        payload = event.payload
        self.on_deployment_result(
            payload["deployId"],
            bool(payload["success"]),
            dict(payload.get("info", {})),
            params=dict(payload.get("params", {})),
        )

    def decompose(self, order: ServiceOrder) -> list[Service]:
        """Create one service per specification occurrence in the order.

        Re-entrant: services already created for a plan position are reused,
        so redelivery of the order event never duplicates the tree.
        """
        existing = {s.plan_path: s for s in self.inventory.query(order_id=order.id)}
        created: list[Service] = []
        walk: list[Service] = []
        for item in order.items:
            spec = self.catalog.get(item.spec_id)
            self._expand(order, item, spec, item.item_id, None, existing, created, walk)
        for service in walk:
            if service.id not in order.supporting_service_refs:
                order.supporting_service_refs.append(service.id)
        return created

    def _expand(
        self,
        order: ServiceOrder,
        item: OrderItem,
        spec: ServiceSpecification,
        path: str,
        parent: Service | None,
        existing: dict[str, Service],
        created: list[Service],
        walk: list[Service],
    ) -> Service:
        children = [] if spec.origin is not None else self.catalog.children(spec.id)
        service = existing.get(path)
        if service is None:
            category, start_mode = self._classify(spec, parent, bool(children))
            characteristics = self._initial_characteristics(spec, item)
            service = self.inventory.create_service(
                name=spec.name,
                spec_id=spec.id,
                order_id=order.id,
                category=category,
                start_mode=start_mode,
                characteristics=characteristics,
                plan_path=path,
            )
            existing[path] = service
            created.append(service)
        walk.append(service)
        if parent is not None:
            if spec.spec_type is SpecType.RFS:
                self.inventory.add_supporting_refs(parent.id, resource_refs=[service.id])
            else:
                self.inventory.add_supporting_refs(parent.id, service_refs=[service.id])
        for index, child in enumerate(children):
            self._expand(order, item, child, f"{path}.{index}", service, existing, created, walk)
        return service

    @staticmethod
    def _classify(
        spec: ServiceSpecification, parent: Service | None, has_children: bool
    ) -> tuple[ServiceCategory, StartMode]:
        if parent is None:
            # The item's root node: automatic when orchestration can do the
            # work (children to expand or a partner to forward to), manual
            # when a bare customer-facing spec needs provider hands.
            if has_children or spec.origin is not None:
                return ServiceCategory.TOP, StartMode.AUTOMATIC
            return ServiceCategory.TOP, StartMode.MANUAL_PROVIDER
        if spec.spec_type is SpecType.RFS:
            return ServiceCategory.RFS, StartMode.AUTOMATIC
        if spec.origin is not None:
            return ServiceCategory.CFS_LEAF, StartMode.AUTOMATIC
        if has_children:
            return ServiceCategory.CFS_BUNDLE, StartMode.MANUAL_PROVIDER
        return ServiceCategory.CFS_LEAF, StartMode.MANUAL_PROVIDER

    @staticmethod
    def _initial_characteristics(
        spec: ServiceSpecification, item: OrderItem
    ) -> dict[str, CharacteristicValue]:
        values: dict[str, CharacteristicValue] = {}
        for char in spec.characteristics:
            default = char.default_entry()
            if default is not None:
                values[char.name] = CharacteristicValue(
                    value=default.value.value, alias=default.value.alias
                )
        for name, requested in item.requested_values.items():
            for char in spec.characteristics:
                if char.name == name and char.configurable:
                    values[name] = CharacteristicValue(
                        value=requested.value, alias=requested.alias
                    )
        return values

    def dispatch(self, order: ServiceOrder) -> None:
        """Hand every unresolved leaf to its fulfillment branch."""
        services = self.inventory.query(order_id=order.id)
        for service in services:
            if service.state is not ServiceState.RESERVED:
                continue
            if service.supporting_service_refs or service.supporting_resource_refs:
                continue  # interior node, fulfilled by its children
            spec = self.catalog.get(service.spec_id)
            if spec.origin is not None:
                if self.remote_dispatch is not None:
                    self.remote_dispatch(service, spec)
                continue
            if service.category is ServiceCategory.RFS:
                self._dispatch_rfs(order, service)
            else:
                self._ensure_task(service)

    def _dispatch_rfs(self, order: ServiceOrder, service: Service) -> None:
        if service.id in self.bindings:
            return
        nsd_id = self._nsd_id_of(service)
        if nsd_id is None:
            self.inventory.update_state(
                service.id,
                ServiceState.ACTIVE,
                note="no network service descriptor attached; activated directly",
            )
            return
        binding = DeploymentBinding(
            service_id=service.id,
            order_id=order.id,
            nsd_id=nsd_id,
            ns_name=f"{service.name}-{service.id[:8]}",
            vim_id=self.default_vim_id,
        )
        self.bindings[service.id] = binding
        self._publish(
            "NFV.DEPLOY.REQUEST",
            {
                "serviceId": service.id,
                "orderId": order.id,
                "nsdId": binding.nsd_id,
                "nsName": binding.ns_name,
                "vimId": binding.vim_id,
                "params": {"serviceId": service.id, "orderId": order.id},
            },
            order.id,
        )
        logger.info(
            "deployment requested order=%s service=%s nsd=%s", order.id, service.id, nsd_id
        )

    @staticmethod
    def _nsd_id_of(service: Service) -> str | None:
        for key, value in service.characteristics.items():
            if key == NSDID_KEY or key.endswith(f": {NSDID_KEY}"):
                return value.value
        return None

    # -- manual tasks ----------------------------------------------------------

    def _task_for_service(self, service_id: str) -> ManualTask | None:
        for task in self.tasks.values():
            if task.service_id == service_id:
                return task
        return None

    def _ensure_task(self, service: Service) -> ManualTask:
        task = self._task_for_service(service.id)
        if task is not None:
            return task
        task = ManualTask(
            id=str(uuid.uuid4()),
            order_id=service.order_id,
            service_id=service.id,
            service_name=service.name,
            spec_id=service.spec_id,
            status=TaskStatus.OPEN,
            created_at=format_ts(now_utc()),
        )
        self.tasks[task.id] = task
        self.notifier.notify(
            "manual-task-opened",
            {"taskId": task.id, "orderId": task.order_id, "serviceId": task.service_id},
        )
        logger.info("manual task opened task=%s service=%s", task.id, service.id)
        return task

    def create_manual_task(self, service_id: str, note: str | None = None) -> ManualTask:
        service = self.inventory.get(service_id)
        task = self._ensure_task(service)
        if note and not task.note:
            task.note = note
        return task

    def get_task(self, task_id: str) -> ManualTask:
        task = self.tasks.get(task_id)
        if task is None:
            raise UnknownTask(f"no manual task {task_id!r}")
        return task

    def list_tasks(
        self, order_id: str | None = None, status: str | None = None
    ) -> list[ManualTask]:
        tasks = list(self.tasks.values())
        if order_id is not None:
            tasks = [t for t in tasks if t.order_id == order_id]
        if status is not None:
            tasks = [t for t in tasks if t.status == status]
        return sorted(tasks, key=lambda t: (t.created_at, t.id))

    def complete_manual_task(
        self, task_id: str, resolution: ServiceState, note: str | None = None
    ) -> ManualTask:
        """Resolve a task by activating or terminating its service.

        Any other target state keeps the task open, so the only way through
        is an explicit provider decision.
        """
        task = self.get_task(task_id)
        if task.status != TaskStatus.OPEN:
            raise TaskNotOpen(f"task {task_id} is already {task.status}")
        if resolution not in (ServiceState.ACTIVE, ServiceState.TERMINATED):
            raise InvalidResolution(
                f"a manual task resolves to ACTIVE or TERMINATED, not {resolution.value}"
            )
        service = self.inventory.get(task.service_id)
        if service.state is not resolution:
            self.inventory.update_state(
                service.id, resolution, note=note or f"manual resolution to {resolution.value}"
            )
        task.status = TaskStatus.RESOLVED
        task.resolved_at = format_ts(now_utc())
        task.resolution = resolution.value
        if note:
            task.note = note
        self.notifier.notify(
            "manual-task-resolved",
            {"taskId": task.id, "serviceId": task.service_id, "resolution": resolution.value},
        )
        return task

    # -- deployment results ------------------------------------------------------

    def register_deployment(self, deploy_id: str, service_id: str) -> None:
        binding = self.bindings.get(service_id)
        if binding is not None:
            binding.deploy_id = deploy_id
        self.deploy_index[deploy_id] = service_id

    def on_deployment_result(
        self, deploy_id: str, success: bool, info: dict, params: dict | None = None
    ) -> None:
        service_id = self.deploy_index.get(deploy_id) or (params or {}).get("serviceId")
        if service_id is None:
            raise UnknownDeployment(f"no pending deployment {deploy_id!r}")
        service = self.inventory.get(service_id)
        binding = self.bindings.get(service_id)
        if binding is not None:
            binding.deploy_id = deploy_id
            binding.status = "RESOLVED"
            self.deploy_index[deploy_id] = service_id
        if service.state is not ServiceState.RESERVED:
            return  # duplicate result; first one won
        if success:
            for key in ("deployId", "mgmtIp", "nsName"):
                if key in info:
                    self.inventory.set_characteristic(
                        service.id, key, CharacteristicValue(value=str(info[key]))
                    )
            self.inventory.update_state(service.id, ServiceState.ACTIVE, note="deployment running")
        else:
            self.inventory.update_state(
                service.id,
                ServiceState.INACTIVE,
                note=str(info.get("error", "deployment failed")),
                error=True,
            )

    # -- aggregation -----------------------------------------------------------

    def aggregate(self, order_id: str) -> OrderState:
        """Roll leaf states up through the tree and onto the order."""
        order = self.get_order(order_id)
        if order.state in ORDER_TERMINAL_STATES:
            return order.state
        services = self.inventory.query(order_id=order_id)
        by_id = {s.id: s for s in services}
        self._update_interior_nodes(services, by_id)
        all_leaves: list[Service] = []
        for item in order.items:
            leaves = [
                s
                for s in services
                if self._is_in_item(s, item) and not self._children_of(s, by_id)
            ]
            item.state = compute_outcome(leaves)
            all_leaves.extend(leaves)
        outcome = compute_outcome(all_leaves)
        self._apply_order_outcome(order, outcome)
        return order.state

    @staticmethod
    def _is_in_item(service: Service, item: OrderItem) -> bool:
        return service.plan_path == item.item_id or service.plan_path.startswith(
            item.item_id + "."
        )

    @staticmethod
    def _children_of(service: Service, by_id: dict[str, Service]) -> list[Service]:
        refs = service.supporting_service_refs + service.supporting_resource_refs
        return [by_id[r] for r in refs if r in by_id]

    def _update_interior_nodes(self, services: list[Service], by_id: dict[str, Service]) -> None:
        # Deepest first so parents see their children's fresh states.
        for service in sorted(services, key=lambda s: s.plan_path.count("."), reverse=True):
            children = self._children_of(service, by_id)
            if not children:
                continue
            resolutions = [_leaf_resolution(c) for c in children]
            target: ServiceState | None = None
            note = None
            error = False
            if _FAILED in resolutions:
                target = ServiceState.INACTIVE
                note = "failure in supporting services"
                error = True
            elif all(r in (_ACTIVE, _CLOSED) for r in resolutions) and _ACTIVE in resolutions:
                target = ServiceState.ACTIVE
                note = "all supporting services resolved"
            if (
                target is not None
                and service.state is not target
                and service_transition_allowed(service.state, target)
            ):
                self.inventory.update_state(service.id, target, note=note, error=error)

    def _apply_order_outcome(self, order: ServiceOrder, outcome: OrderState) -> None:
        if outcome == order.state:
            return
        if order.state is OrderState.PARTIAL:
            self._transition(order, OrderEvent.MANUAL_RESOLUTION)
        if order.state is not OrderState.IN_PROGRESS:
            return
        if outcome is OrderState.COMPLETED:
            self._transition(order, OrderEvent.ALL_ACTIVE)
        elif outcome is OrderState.PARTIAL:
            self._transition(order, OrderEvent.SOME_ACTIVE)
        elif outcome is OrderState.FAILED:
            self._transition(order, OrderEvent.ERROR)

    def _transition(self, order: ServiceOrder, event: OrderEvent) -> None:
        previous = order.state
        order.state = order_transition(order.state, event)
        self.notifier.notify(
            "order-state-changed",
            {"orderId": order.id, "from": previous.value, "to": order.state.value},
        )
        self._publish(
            "ORDER.STATE.CHANGED",
            {"order": order.to_dict(), "previousState": previous.value, "event": event.value},
            order.id,
        )
        logger.info("order %s %s -> %s", order.id, previous.value, order.state.value)

    # -- persistence ---------------------------------------------------------

    def to_state(self) -> dict:
        return {
            "orders": [o.to_dict() for o in self.list_orders()],
            "tasks": [t.to_dict() for t in self.list_tasks()],
            "bindings": [b.to_dict() for b in self.bindings.values()],
        }

    def load_state(self, state: dict) -> None:
        self.orders = {o["id"]: ServiceOrder.from_dict(o) for o in state.get("orders", [])}
        self.tasks = {t["id"]: ManualTask.from_dict(t) for t in state.get("tasks", [])}
        self.bindings = {}
        self.deploy_index = {}
        for raw in state.get("bindings", []):
            binding = DeploymentBinding.from_dict(raw)
            self.bindings[binding.service_id] = binding
            if binding.deploy_id:
                self.deploy_index[binding.deploy_id] = binding.service_id

    def reconcile_tasks(self) -> None:
        """Square tasks with service states after a restore.

        Tasks whose service already left RESERVED are closed; manual leaf
        services of live orders that lost their task get a fresh one.
        """
        for task in self.tasks.values():
            if task.status != TaskStatus.OPEN:
                continue
            service = self.inventory.get(task.service_id)
            if service.state is not ServiceState.RESERVED:
                task.status = TaskStatus.RESOLVED
                task.resolved_at = format_ts(now_utc())
                task.resolution = service.state.value
                task.note = task.note or "reconciled after restart"
        for order in self.orders.values():
            if order.state in ORDER_TERMINAL_STATES:
                continue
            for service in self.inventory.query(order_id=order.id):
                if (
                    service.state is ServiceState.RESERVED
                    and service.start_mode is StartMode.MANUAL_PROVIDER
                    and not service.supporting_service_refs
                    and not service.supporting_resource_refs
                    and self.catalog.get(service.spec_id).origin is None
                    and self._task_for_service(service.id) is None
                ):
                    self._ensure_task(service)
