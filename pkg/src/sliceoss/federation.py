"""Cross-instance federation: partner registry, spec import, remote orders.

A partner is another running instance reachable over HTTP.  Its public
customer-facing specifications can be imported into the local catalog as
origin-tagged copies; ordering such a copy forwards a one-item order to the
partner, and periodic synchronization folds the remote progress back into
the local service that represents it.
"""

from __future__ import annotations

import logging
import uuid
from dataclasses import dataclass
from typing import Callable

import httpx

from .canon import format_ts, now_utc
from .catalog import Catalog
from .domain import (
    CharacteristicValue,
    LifecycleStatus,
    Organization,
    OrganizationRole,
    Service,
    ServiceSpecification,
    ServiceState,
    SpecOrigin,
    service_transition_allowed,
)
from .errors import DuplicatePartner, PartnerUnreachable, UnknownPartner
from .inventory import Inventory

logger = logging.getLogger(__name__)

CATALOG_PATH = "/tmf-api/serviceCatalogManagement/v4/serviceSpecification"
ORDER_PATH = "/tmf-api/serviceOrdering/v4/serviceOrder"
INVENTORY_PATH = "/tmf-api/serviceInventory/v4/service"

ClientFactory = Callable[[Organization], httpx.Client]


def default_client_factory(partner: Organization) -> httpx.Client:
    return httpx.Client(
        base_url=partner.endpoint_url,
        headers={"Authorization": f"Bearer {partner.auth_token}"},
        timeout=10.0,
    )


@dataclass
class RemoteBinding:
    """Links a local service to the order fulfilling it at a partner."""

    local_service_id: str
    partner_id: str
    remote_order_id: str
    remote_service_id: str | None = None
    last_sync_at: str | None = None

    def to_dict(self) -> dict:
        return {
            "localServiceId": self.local_service_id,
            "partnerId": self.partner_id,
            "remoteOrderId": self.remote_order_id,
            "remoteServiceId": self.remote_service_id,
            "lastSyncAt": self.last_sync_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RemoteBinding":
        return cls(
            local_service_id=data["localServiceId"],
            partner_id=data["partnerId"],
            remote_order_id=data["remoteOrderId"],
            remote_service_id=data.get("remoteServiceId"),
            last_sync_at=data.get("lastSyncAt"),
        )


class FederationManager:
    def __init__(
        self,
        catalog: Catalog,
        inventory: Inventory,
        client_factory: ClientFactory | None = None,
    ):
        self.catalog = catalog
        self.inventory = inventory
        self._client_factory = client_factory or default_client_factory
        self.partners: dict[str, Organization] = {}
        self.bindings: dict[str, RemoteBinding] = {}
        self._clients: dict[str, httpx.Client] = {}

    # -- partner registry ------------------------------------------------------

    def register_partner(
        self,
        name: str,
        endpoint_url: str,
        auth_token: str,
        partner_id: str | None = None,
    ) -> Organization:
        for partner in self.partners.values():
            if partner.name == name:
                raise DuplicatePartner(f"partner {name!r} is already registered")
        partner = Organization(
            id=partner_id or str(uuid.uuid4()),
            name=name,
            role=OrganizationRole.PARTNER,
            endpoint_url=endpoint_url.rstrip("/"),
            auth_token=auth_token,
        )
        self.partners[partner.id] = partner
        self.probe(partner.id)
        logger.info("partner registered id=%s name=%s reachable=%s",
                    partner.id, name, partner.reachable)
        return partner

    def get_partner(self, partner_id: str) -> Organization:
        partner = self.partners.get(partner_id)
        if partner is None:
            raise UnknownPartner(f"no partner {partner_id!r}")
        return partner

    def list_partners(self) -> list[Organization]:
        return sorted(self.partners.values(), key=lambda p: (p.name, p.id))

    def _client(self, partner: Organization) -> httpx.Client:
        client = self._clients.get(partner.id)
        if client is None:
            client = self._client_factory(partner)
            self._clients[partner.id] = client
        return client

    def probe(self, partner_id: str) -> bool:
        """Check partner reachability against its public catalog."""
        partner = self.get_partner(partner_id)
        try:
            response = self._client(partner).get(CATALOG_PATH)
            partner.reachable = response.status_code == 200
        except httpx.HTTPError as exc:
            logger.warning("partner %s unreachable: %s", partner.name, exc)
            partner.reachable = False
        partner.last_probe_at = format_ts(now_utc())
        return partner.reachable

    # -- catalog import --------------------------------------------------------

    def import_specifications(self, partner_id: str) -> list[ServiceSpecification]:
        """Copy the partner's public specifications into the local catalog.

        Copies keep a stable local identity across repeated imports: an
        already imported spec is updated in place, never duplicated.  The
        partner's internal structure stays behind its own border, so the
        relationship list is dropped from the copy.
        """
        partner = self.get_partner(partner_id)
        try:
            response = self._client(partner).get(CATALOG_PATH)
            response.raise_for_status()
        except httpx.HTTPError as exc:
            partner.reachable = False
            partner.last_probe_at = format_ts(now_utc())
            raise PartnerUnreachable(f"catalog fetch from {partner.name!r} failed: {exc}")
        partner.reachable = True
        partner.last_probe_at = format_ts(now_utc())
        imported: list[ServiceSpecification] = []
        for raw in response.json():
            remote = ServiceSpecification.from_dict(raw)
            existing = self.catalog.find_by_origin(partner.id, remote.id)
            local = ServiceSpecification(
                id=existing.id if existing is not None else str(uuid.uuid4()),
                name=f"{remote.name} @ {partner.name}",
                version=remote.version,
                description=remote.description,
                spec_type=remote.spec_type,
                is_bundle=remote.is_bundle,
                lifecycle_status=LifecycleStatus.ACTIVE,
                characteristics=remote.characteristics,
                related_specs=[],
                origin=SpecOrigin(partner_id=partner.id, remote_spec_id=remote.id),
            )
            imported.append(self.catalog.upsert_specification(local))
        logger.info("imported %d specifications from %s", len(imported), partner.name)
        return imported

    # -- remote ordering -------------------------------------------------------

    def place_remote_order(self, service: Service, spec: ServiceSpecification) -> None:
        """Forward a local service backed by an imported spec to its origin.

        Invoked by the fulfillment dispatcher; safe to call repeatedly since
        an existing binding short-circuits.  A partner rejection parks the
        service INACTIVE with the reason; an unreachable partner leaves it
        RESERVED for the next synchronization pass to retry.
        """
        if service.id in self.bindings:
            return
        if spec.origin is None:
            return
        partner = self.get_partner(spec.origin.partner_id)
        configurable = {c.name for c in spec.characteristics if c.configurable}
        values = {
            name: {"value": cv.value, "alias": cv.alias}
            for name, cv in service.characteristics.items()
            if name in configurable
        }
        payload = {
            "orderItem": [
                {"specId": spec.origin.remote_spec_id, "requestedValues": values}
            ]
        }
        try:
            response = self._client(partner).post(ORDER_PATH, json=payload)
        except httpx.HTTPError as exc:
            logger.warning("remote order to %s failed: %s", partner.name, exc)
            partner.reachable = False
            return
        if response.status_code not in (200, 201):
            detail = response.text[:200]
            self.inventory.update_state(
                service.id,
                ServiceState.INACTIVE,
                note=f"partner {partner.name} rejected the order: {detail}",
                error=True,
            )
            return
        remote_order = response.json()
        self.bindings[service.id] = RemoteBinding(
            local_service_id=service.id,
            partner_id=partner.id,
            remote_order_id=remote_order["id"],
            last_sync_at=format_ts(now_utc()),
        )
        logger.info(
            "remote order placed service=%s partner=%s remoteOrder=%s",
            service.id, partner.name, remote_order["id"],
        )

    def retry_pending_dispatch(self, dispatch: Callable[[Service, ServiceSpecification], None]) -> None:
        """Re-run remote dispatch for origin services still waiting."""
        for service in self.inventory.all_services():
            if service.state is not ServiceState.RESERVED:
                continue
            if service.id in self.bindings:
                continue
            spec = self.catalog.get(service.spec_id)
            if spec.origin is not None:
                dispatch(service, spec)

    # -- synchronization -------------------------------------------------------

    def sync_remote_status(self) -> int:
        """Poll partners for remote order progress; returns changed services."""
        changes = 0
        for binding in list(self.bindings.values()):
            partner = self.partners.get(binding.partner_id)
            if partner is None:
                continue
            try:
                order_resp = self._client(partner).get(
                    f"{ORDER_PATH}/{binding.remote_order_id}"
                )
            except httpx.HTTPError as exc:
                logger.warning("sync with %s failed: %s", partner.name, exc)
                partner.reachable = False
                continue
            partner.reachable = True
            binding.last_sync_at = format_ts(now_utc())
            if order_resp.status_code != 200:
                continue
            remote_order = order_resp.json()
            target, note, error = self._map_remote_progress(partner, binding, remote_order)
            if target is None:
                continue
            local = self.inventory.get(binding.local_service_id)
            if local.state is target:
                continue
            if not service_transition_allowed(local.state, target):
                continue
            self.inventory.update_state(local.id, target, note=note, error=error)
            changes += 1
        return changes

    def _map_remote_progress(
        self, partner: Organization, binding: RemoteBinding, remote_order: dict
    ) -> tuple[ServiceState | None, str | None, bool]:
        state = remote_order.get("state")
        if state == "FAILED":
            return (
                ServiceState.INACTIVE,
                f"remote order {binding.remote_order_id} at {partner.name} failed",
                True,
            )
        if state != "COMPLETED":
            return None, None, False
        remote_service_state = self._remote_top_state(partner, binding)
        if remote_service_state == "TERMINATED":
            return (
                ServiceState.TERMINATED,
                f"remote service at {partner.name} terminated",
                False,
            )
        return (
            ServiceState.ACTIVE,
            f"remote order {binding.remote_order_id} at {partner.name} completed",
            False,
        )

    def _remote_top_state(self, partner: Organization, binding: RemoteBinding) -> str | None:
        try:
            response = self._client(partner).get(
                INVENTORY_PATH,
                params={"orderId": binding.remote_order_id, "category": "TOP"},
            )
        except httpx.HTTPError:
            return None
        if response.status_code != 200:
            return None
        services = response.json()
        if not services:
            return None
        binding.remote_service_id = services[0]["id"]
        return services[0].get("state")

    # -- persistence -----------------------------------------------------------

    def to_state(self) -> dict:
        return {
            "partners": [p.to_dict() for p in self.list_partners()],
            "bindings": [
                b.to_dict()
                for b in sorted(self.bindings.values(), key=lambda b: b.local_service_id)
            ],
        }

    def load_state(self, state: dict) -> None:
        self.partners = {
            p["id"]: Organization.from_dict(p) for p in state.get("partners", [])
        }
        self.bindings = {}
        for raw in state.get("bindings", []):
            binding = RemoteBinding.from_dict(raw)
            self.bindings[binding.local_service_id] = binding

    def close(self) -> None:
        for client in self._clients.values():
            client.close()
        self._clients.clear()
