"""Core domain types: catalog specifications, orders, inventory services.

All types serialize through ``to_dict``/``from_dict`` with fixed wire names
(camelCase, every field always present, absent optionals as null) so the
canonical JSON encoding of any domain object is stable and round-trips
byte-identically.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

from .errors import IllegalTransition, InvalidValueType


class ValueType(str, enum.Enum):
    """Typed value domains a characteristic may carry."""

    INTEGER = "INTEGER"
    SMALLINT = "SMALLINT"
    LONGINT = "LONGINT"
    FLOAT = "FLOAT"
    BINARY = "BINARY"
    ARRAY = "ARRAY"
    SET = "SET"
    BOOLEAN = "BOOLEAN"
    TEXT = "TEXT"
    LONGTEXT = "LONGTEXT"
    ENUM = "ENUM"
    TIMESTAMP = "TIMESTAMP"


def parse_value_type(token: str) -> ValueType:
    """Parse a value-type token; anything outside the closed set is an error."""
    try:
        return ValueType(token)
    except ValueError:
        raise InvalidValueType(f"unknown value type {token!r}") from None


class SpecType(str, enum.Enum):
    CFS = "CFS"
    RFS = "RFS"


class LifecycleStatus(str, enum.Enum):
    IN_DESIGN = "IN_DESIGN"
    ACTIVE = "ACTIVE"
    RETIRED = "RETIRED"


class RelationshipType(str, enum.Enum):
    DEPENDENCY = "dependency"
    TAG = "tag"


class Presence(str, enum.Enum):
    MANDATORY = "MANDATORY"
    OPTIONAL = "OPTIONAL"
    CONDITIONAL = "CONDITIONAL"


class OrderState(str, enum.Enum):
    ACKNOWLEDGED = "ACKNOWLEDGED"
    IN_PROGRESS = "IN_PROGRESS"
    COMPLETED = "COMPLETED"
    PARTIAL = "PARTIAL"
    FAILED = "FAILED"


class OrderEvent(str, enum.Enum):
    ACKNOWLEDGE = "acknowledge"
    BEGIN_FULFILLMENT = "begin_fulfillment"
    ALL_ACTIVE = "all_active"
    SOME_ACTIVE = "some_active"
    ERROR = "error"
    MANUAL_RESOLUTION = "manual_resolution"


class ServiceState(str, enum.Enum):
    RESERVED = "RESERVED"
    ACTIVE = "ACTIVE"
    INACTIVE = "INACTIVE"
    TERMINATED = "TERMINATED"


class StartMode(enum.IntEnum):
    """How a service is activated; numeric values are the wire encoding."""

    AUTOMATIC = 1
    MANUAL_PROVIDER = 3


def parse_start_mode(value: int) -> StartMode:
    try:
        return StartMode(value)
    except ValueError:
        raise IllegalTransition(f"unsupported start mode {value!r}") from None


class ServiceCategory(str, enum.Enum):
    """Position of a service in a fulfillment tree."""

    TOP = "TOP"
    CFS_LEAF = "CFS_LEAF"
    CFS_BUNDLE = "CFS_BUNDLE"
    RFS = "RFS"


# ---------------------------------------------------------------------------
# State machines.
#
# Orders: terminal states are COMPLETED and FAILED.  PARTIAL re-enters
# IN_PROGRESS on manual resolution and is then re-evaluated.  ACKNOWLEDGE is
# the creation event: orders are born ACKNOWLEDGED, so it is never a legal
# transition out of an existing state.
# ---------------------------------------------------------------------------

ORDER_TRANSITIONS: dict[tuple[OrderState, OrderEvent], OrderState] = {
    (OrderState.ACKNOWLEDGED, OrderEvent.BEGIN_FULFILLMENT): OrderState.IN_PROGRESS,
    (OrderState.IN_PROGRESS, OrderEvent.ALL_ACTIVE): OrderState.COMPLETED,
    (OrderState.IN_PROGRESS, OrderEvent.SOME_ACTIVE): OrderState.PARTIAL,
    (OrderState.IN_PROGRESS, OrderEvent.ERROR): OrderState.FAILED,
    (OrderState.PARTIAL, OrderEvent.MANUAL_RESOLUTION): OrderState.IN_PROGRESS,
}

ORDER_TERMINAL_STATES = frozenset({OrderState.COMPLETED, OrderState.FAILED})


def order_transition(current: OrderState, event: OrderEvent) -> OrderState:
    """Next order state for ``event``, or IllegalTransition."""
    nxt = ORDER_TRANSITIONS.get((current, event))
    if nxt is None:
        raise IllegalTransition(f"order cannot take {event.value!r} from {current.value}")
    return nxt


# Services: RESERVED is the entry state, TERMINATED is absorbing, and no
# state may transition to itself.
SERVICE_TRANSITIONS: dict[ServiceState, frozenset[ServiceState]] = {
    ServiceState.RESERVED: frozenset(
        {ServiceState.ACTIVE, ServiceState.INACTIVE, ServiceState.TERMINATED}
    ),
    ServiceState.ACTIVE: frozenset({ServiceState.INACTIVE, ServiceState.TERMINATED}),
    ServiceState.INACTIVE: frozenset({ServiceState.ACTIVE, ServiceState.TERMINATED}),
    ServiceState.TERMINATED: frozenset(),
}


def service_transition_allowed(current: ServiceState, target: ServiceState) -> bool:
    return target in SERVICE_TRANSITIONS[current]


def assert_service_transition(current: ServiceState, target: ServiceState) -> None:
    if not service_transition_allowed(current, target):
        raise IllegalTransition(
            f"service cannot move from {current.value} to {target.value}"
        )


# ---------------------------------------------------------------------------
# Catalog types.
# ---------------------------------------------------------------------------


@dataclass
class CharacteristicValue:
    """A concrete value with an optional display alias."""

    value: str
    alias: str | None = None

    def to_dict(self) -> dict:
        return {"value": self.value, "alias": self.alias}

    @classmethod
    def from_dict(cls, data: dict) -> "CharacteristicValue":
        return cls(value=data["value"], alias=data.get("alias"))


@dataclass
class CharacteristicValueEntry:
    """One row of a characteristic's value list."""

    value: CharacteristicValue
    unit_of_measure: str | None = None
    is_default: bool = False

    def to_dict(self) -> dict:
        return {
            "value": self.value.to_dict(),
            "unitOfMeasure": self.unit_of_measure,
            "isDefault": self.is_default,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CharacteristicValueEntry":
        return cls(
            value=CharacteristicValue.from_dict(data["value"]),
            unit_of_measure=data.get("unitOfMeasure"),
            is_default=bool(data.get("isDefault", False)),
        )


@dataclass
class CharRelationship:
    """Link from a characteristic to another characteristic or a tag."""

    name: str
    relationship_type: RelationshipType
    role: str

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "relationshipType": self.relationship_type.value,
            "role": self.role,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CharRelationship":
        return cls(
            name=data["name"],
            relationship_type=RelationshipType(data["relationshipType"]),
            role=data["role"],
        )


@dataclass
class ServiceSpecCharacteristic:
    name: str
    value_type: ValueType
    description: str = ""
    element_value_type: ValueType | None = None
    configurable: bool = False
    min_cardinality: int = 0
    max_cardinality: int = 1
    is_unique: bool = True
    extensible: bool | None = None
    regex: str | None = None
    values: list[CharacteristicValueEntry] = field(default_factory=list)
    relationships: list[CharRelationship] = field(default_factory=list)

    def default_entry(self) -> CharacteristicValueEntry | None:
        for entry in self.values:
            if entry.is_default:
                return entry
        return None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "valueType": self.value_type.value,
            "elementValueType": (
                self.element_value_type.value if self.element_value_type else None
            ),
            "configurable": self.configurable,
            "minCardinality": self.min_cardinality,
            "maxCardinality": self.max_cardinality,
            "isUnique": self.is_unique,
            "extensible": self.extensible,
            "regex": self.regex,
            "serviceSpecCharacteristicValue": [e.to_dict() for e in self.values],
            "serviceSpecCharRelationship": [r.to_dict() for r in self.relationships],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ServiceSpecCharacteristic":
        element = data.get("elementValueType")
        return cls(
            name=data["name"],
            description=data.get("description", ""),
            value_type=parse_value_type(data["valueType"]),
            element_value_type=parse_value_type(element) if element else None,
            configurable=bool(data.get("configurable", False)),
            min_cardinality=int(data.get("minCardinality", 0)),
            max_cardinality=int(data.get("maxCardinality", 1)),
            is_unique=bool(data.get("isUnique", True)),
            extensible=data.get("extensible"),
            regex=data.get("regex"),
            values=[
                CharacteristicValueEntry.from_dict(e)
                for e in data.get("serviceSpecCharacteristicValue", [])
            ],
            relationships=[
                CharRelationship.from_dict(r)
                for r in data.get("serviceSpecCharRelationship", [])
            ],
        )


@dataclass
class SpecRelationship:
    """Edge from a bundle specification to a member specification."""

    spec_id: str
    relationship_type: str = "dependency"

    def to_dict(self) -> dict:
        return {"specId": self.spec_id, "relationshipType": self.relationship_type}

    @classmethod
    def from_dict(cls, data: dict) -> "SpecRelationship":
        return cls(
            spec_id=data["specId"],
            relationship_type=data.get("relationshipType", "dependency"),
        )


@dataclass
class SpecOrigin:
    """Provenance ref for a specification imported from a federation partner."""

    partner_id: str
    remote_spec_id: str

    def to_dict(self) -> dict:
        return {"partnerId": self.partner_id, "remoteSpecId": self.remote_spec_id}

    @classmethod
    def from_dict(cls, data: dict) -> "SpecOrigin":
        return cls(partner_id=data["partnerId"], remote_spec_id=data["remoteSpecId"])


@dataclass
class ServiceSpecification:
    id: str
    name: str
    version: str = "1.0"
    description: str = ""
    spec_type: SpecType = SpecType.CFS
    is_bundle: bool = False
    lifecycle_status: LifecycleStatus = LifecycleStatus.IN_DESIGN
    characteristics: list[ServiceSpecCharacteristic] = field(default_factory=list)
    related_specs: list[SpecRelationship] = field(default_factory=list)
    origin: SpecOrigin | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "version": self.version,
            "description": self.description,
            "specType": self.spec_type.value,
            "isBundle": self.is_bundle,
            "lifecycleStatus": self.lifecycle_status.value,
            "serviceSpecCharacteristic": [c.to_dict() for c in self.characteristics],
            "serviceSpecRelationship": [r.to_dict() for r in self.related_specs],
            "origin": self.origin.to_dict() if self.origin else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ServiceSpecification":
        origin = data.get("origin")
        return cls(
            id=data["id"],
            name=data["name"],
            version=data.get("version", "1.0"),
            description=data.get("description", ""),
            spec_type=SpecType(data.get("specType", "CFS")),
            is_bundle=bool(data.get("isBundle", False)),
            lifecycle_status=LifecycleStatus(data.get("lifecycleStatus", "IN_DESIGN")),
            characteristics=[
                ServiceSpecCharacteristic.from_dict(c)
                for c in data.get("serviceSpecCharacteristic", [])
            ],
            related_specs=[
                SpecRelationship.from_dict(r)
                for r in data.get("serviceSpecRelationship", [])
            ],
            origin=SpecOrigin.from_dict(origin) if origin else None,
        )


def characteristic_by_name(
    spec: ServiceSpecification, name: str
) -> ServiceSpecCharacteristic | None:
    """Exact-name lookup; characteristic names are unique within a spec."""
    for char in spec.characteristics:
        if char.name == name:
            return char
    return None


# ---------------------------------------------------------------------------
# Ordering types.
# ---------------------------------------------------------------------------


@dataclass
class OrderNote:
    at: str
    text: str

    def to_dict(self) -> dict:
        return {"at": self.at, "text": self.text}

    @classmethod
    def from_dict(cls, data: dict) -> "OrderNote":
        return cls(at=data["at"], text=data["text"])


@dataclass
class OrderItem:
    item_id: str
    spec_id: str
    requested_values: dict[str, CharacteristicValue] = field(default_factory=dict)
    state: OrderState = OrderState.ACKNOWLEDGED

    def to_dict(self) -> dict:
        return {
            "itemId": self.item_id,
            "specId": self.spec_id,
            "requestedValues": {
                k: v.to_dict() for k, v in self.requested_values.items()
            },
            "state": self.state.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OrderItem":
        return cls(
            item_id=data["itemId"],
            spec_id=data["specId"],
            requested_values={
                k: CharacteristicValue.from_dict(v)
                for k, v in data.get("requestedValues", {}).items()
            },
            state=OrderState(data.get("state", "ACKNOWLEDGED")),
        )


@dataclass
class ServiceOrder:
    id: str
    ordered_by: str
    order_date: str
    state: OrderState = OrderState.ACKNOWLEDGED
    items: list[OrderItem] = field(default_factory=list)
    supporting_service_refs: list[str] = field(default_factory=list)
    notes: list[OrderNote] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "orderedBy": self.ordered_by,
            "orderDate": self.order_date,
            "state": self.state.value,
            "items": [i.to_dict() for i in self.items],
            "supportingServiceRefs": list(self.supporting_service_refs),
            "notes": [n.to_dict() for n in self.notes],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ServiceOrder":
        return cls(
            id=data["id"],
            ordered_by=data["orderedBy"],
            order_date=data["orderDate"],
            state=OrderState(data.get("state", "ACKNOWLEDGED")),
            items=[OrderItem.from_dict(i) for i in data.get("items", [])],
            supporting_service_refs=list(data.get("supportingServiceRefs", [])),
            notes=[OrderNote.from_dict(n) for n in data.get("notes", [])],
        )


# ---------------------------------------------------------------------------
# Inventory types.
# ---------------------------------------------------------------------------


@dataclass
class Service:
    id: str
    name: str
    spec_id: str
    order_id: str
    category: ServiceCategory
    start_mode: StartMode
    state: ServiceState = ServiceState.RESERVED
    characteristics: dict[str, CharacteristicValue] = field(default_factory=dict)
    supporting_service_refs: list[str] = field(default_factory=list)
    supporting_resource_refs: list[str] = field(default_factory=list)
    error_note: str | None = None
    # Position of this service in its order's fulfillment tree; used to make
    # re-decomposition idempotent and to rebuild the tree after a restart.
    plan_path: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "specId": self.spec_id,
            "orderId": self.order_id,
            "category": self.category.value,
            "startMode": int(self.start_mode),
            "state": self.state.value,
            "characteristics": {
                k: v.to_dict() for k, v in self.characteristics.items()
            },
            "supportingServiceRefs": list(self.supporting_service_refs),
            "supportingResourceRefs": list(self.supporting_resource_refs),
            "errorNote": self.error_note,
            "planPath": self.plan_path,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Service":
        return cls(
            id=data["id"],
            name=data["name"],
            spec_id=data["specId"],
            order_id=data["orderId"],
            category=ServiceCategory(data["category"]),
            start_mode=parse_start_mode(int(data["startMode"])),
            state=ServiceState(data.get("state", "RESERVED")),
            characteristics={
                k: CharacteristicValue.from_dict(v)
                for k, v in data.get("characteristics", {}).items()
            },
            supporting_service_refs=list(data.get("supportingServiceRefs", [])),
            supporting_resource_refs=list(data.get("supportingResourceRefs", [])),
            error_note=data.get("errorNote"),
            plan_path=data.get("planPath", ""),
        )


# ---------------------------------------------------------------------------
# Party types.
# ---------------------------------------------------------------------------


class OrganizationRole(str, enum.Enum):
    SELF = "SELF"
    PARTNER = "PARTNER"


@dataclass
class Organization:
    id: str
    name: str
    role: OrganizationRole
    endpoint_url: str = ""
    auth_token: str = ""
    reachable: bool | None = None
    last_probe_at: str | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "role": self.role.value,
            "endpointUrl": self.endpoint_url,
            "authToken": self.auth_token,
            "reachable": self.reachable,
            "lastProbeAt": self.last_probe_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Organization":
        return cls(
            id=data["id"],
            name=data["name"],
            role=OrganizationRole(data["role"]),
            endpoint_url=data.get("endpointUrl", ""),
            auth_token=data.get("authToken", ""),
            reachable=data.get("reachable"),
            last_probe_at=data.get("lastProbeAt"),
        )


def parse_domain(kind: str, data: dict) -> Any:
    """Parse a serialized domain object by kind name; used by the store."""
    parsers = {
        "specification": ServiceSpecification.from_dict,
        "order": ServiceOrder.from_dict,
        "service": Service.from_dict,
        "organization": Organization.from_dict,
    }
    return parsers[kind](data)
