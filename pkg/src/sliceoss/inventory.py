"""Service inventory: the record of every service an order produced.

Each service carries its own state-change history; the stored state is
always the fold of that history, which the tests replay independently.
"""

from __future__ import annotations

import logging
import uuid
from typing import Callable

from .canon import format_ts, now_utc
from .domain import (
    CharacteristicValue,
    Service,
    ServiceCategory,
    ServiceState,
    StartMode,
    assert_service_transition,
)
from .errors import UnknownService

logger = logging.getLogger(__name__)

# Called with ("created", service, None, None) or
# ("state", service, previous_state_value, note) after each mutation.
ServiceListener = Callable[[str, Service, str | None, str | None], None]


class Inventory:
    def __init__(self, listener: ServiceListener | None = None):
        self._services: dict[str, Service] = {}
        self._history: dict[str, list[dict]] = {}
        self._listener = listener

    def set_listener(self, listener: ServiceListener) -> None:
        self._listener = listener

    def _notify(self, kind: str, service: Service, previous: str | None, note: str | None) -> None:
        if self._listener:
            self._listener(kind, service, previous, note)

    def create_service(
        self,
        name: str,
        spec_id: str,
        order_id: str,
        category: ServiceCategory,
        start_mode: StartMode,
        characteristics: dict[str, CharacteristicValue] | None = None,
        plan_path: str = "",
        service_id: str | None = None,
    ) -> Service:
        service = Service(
            id=service_id or str(uuid.uuid4()),
            name=name,
            spec_id=spec_id,
            order_id=order_id,
            category=category,
            start_mode=start_mode,
            state=ServiceState.RESERVED,
            characteristics=dict(characteristics or {}),
            plan_path=plan_path,
        )
        self._services[service.id] = service
        self._history[service.id] = []
        self._notify("created", service, None, None)
        logger.info(
            "inventory create service=%s name=%r category=%s", service.id, name, category.value
        )
        return service

    def get(self, service_id: str) -> Service:
        service = self._services.get(service_id)
        if service is None:
            raise UnknownService(f"no service {service_id!r}")
        return service

    def update_state(
        self,
        service_id: str,
        target: ServiceState,
        note: str | None = None,
        error: bool = False,
    ) -> Service:
        """Move a service to ``target`` if the transition table allows it."""
        service = self.get(service_id)
        assert_service_transition(service.state, target)
        previous = service.state
        service.state = target
        if error:
            service.error_note = note
        elif target is ServiceState.ACTIVE:
            service.error_note = None
        self._history[service.id].append(
            {
                "at": format_ts(now_utc()),
                "from": previous.value,
                "to": target.value,
                "note": note,
            }
        )
        self._notify("state", service, previous.value, note)
        logger.info(
            "inventory state service=%s %s -> %s note=%r",
            service_id,
            previous.value,
            target.value,
            note,
        )
        return service

    def set_characteristic(self, service_id: str, name: str, value: CharacteristicValue) -> Service:
        service = self.get(service_id)
        service.characteristics[name] = value
        return service

    def add_supporting_refs(
        self,
        service_id: str,
        service_refs: list[str] | None = None,
        resource_refs: list[str] | None = None,
    ) -> Service:
        service = self.get(service_id)
        for ref in service_refs or []:
            if ref not in service.supporting_service_refs:
                service.supporting_service_refs.append(ref)
        for ref in resource_refs or []:
            if ref not in service.supporting_resource_refs:
                service.supporting_resource_refs.append(ref)
        return service

    def query(
        self,
        order_id: str | None = None,
        order_ids: set[str] | None = None,
        state: ServiceState | None = None,
        category: ServiceCategory | None = None,
    ) -> list[Service]:
        services = list(self._services.values())
        if order_id is not None:
            services = [s for s in services if s.order_id == order_id]
        if order_ids is not None:
            services = [s for s in services if s.order_id in order_ids]
        if state is not None:
            services = [s for s in services if s.state is state]
        if category is not None:
            services = [s for s in services if s.category is category]
        return sorted(services, key=lambda s: (s.order_id, s.plan_path, s.id))

    def history(self, service_id: str) -> list[dict]:
        self.get(service_id)
        return list(self._history.get(service_id, []))

    def replay_state(self, service_id: str) -> ServiceState:
        """Fold the recorded history from RESERVED; must equal the stored state."""
        state = ServiceState.RESERVED
        for step in self._history.get(service_id, []):
            assert_service_transition(state, ServiceState(step["to"]))
            state = ServiceState(step["to"])
        return state

    # -- restore paths -----------------------------------------------------

    def apply_service(self, service: Service, previous: str | None = None, note: str | None = None) -> None:
        """Replay path: upsert the record and extend history without
        revalidating or notifying."""
        known = self._services.get(service.id)
        self._services[service.id] = service
        if service.id not in self._history:
            self._history[service.id] = []
        if known is not None and previous is not None and known.state.value != service.state.value:
            self._history[service.id].append(
                {
                    "at": format_ts(now_utc()),
                    "from": previous,
                    "to": service.state.value,
                    "note": note,
                }
            )

    def load(self, services: list[Service], history: dict[str, list[dict]]) -> None:
        self._services = {s.id: s for s in services}
        self._history = {k: list(v) for k, v in history.items()}

    def dump_history(self) -> dict[str, list[dict]]:
        return {k: list(v) for k, v in self._history.items()}

    def all_services(self) -> list[Service]:
        return sorted(self._services.values(), key=lambda s: (s.order_id, s.plan_path, s.id))
