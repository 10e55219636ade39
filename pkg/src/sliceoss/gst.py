"""Transformation of a slice-template attribute catalog into a service spec.

A template (version plus a flat list of typed attributes) becomes one
``ServiceSpecification`` named ``GST``: one characteristic per top-level
attribute, plus one characteristic per composite part named
``"<parent>: <part>"`` so every dependency relationship resolves to an
existing characteristic.  Customer-facing copies with values filled in
(NESTs) are derived from that specification, never rebuilt from scratch.
"""

from __future__ import annotations

import base64
import json
import re
import uuid
from dataclasses import dataclass, field

from .canon import parse_ts
from .domain import (
    CharacteristicValue,
    CharacteristicValueEntry,
    CharRelationship,
    LifecycleStatus,
    Presence,
    RelationshipType,
    ServiceSpecCharacteristic,
    ServiceSpecification,
    SpecType,
    ValueType,
    characteristic_by_name,
    parse_value_type,
)
from .errors import (
    DuplicateAttributeName,
    MalformedTemplate,
    UnknownCharacteristic,
    UnresolvedPart,
    ValueViolation,
)

CONDITION_PREFIX = "Conditional: "

_INT_RANGES = {
    ValueType.SMALLINT: (-(2**15), 2**15 - 1),
    ValueType.INTEGER: (-(2**31), 2**31 - 1),
    ValueType.LONGINT: (-(2**63), 2**63 - 1),
}

_INT_RE = re.compile(r"^[+-]?\d+$")
_FLOAT_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


@dataclass
class GstAttribute:
    """One attribute of the slice template."""

    name: str
    value_type: ValueType
    description: str = ""
    presence: Presence = Presence.OPTIONAL
    configurable: bool = False
    element_value_type: ValueType | None = None
    unit_of_measure: str | None = None
    parts: list[str] = field(default_factory=list)
    tags: list[str] = field(default_factory=list)
    condition_note: str | None = None
    allowed_values: list[CharacteristicValue] = field(default_factory=list)
    is_unique: bool = True
    extensible: bool | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "GstAttribute":
        element = data.get("elementValueType")
        return cls(
            name=data["name"],
            description=data.get("description", ""),
            presence=Presence(data.get("presence", "OPTIONAL")),
            configurable=bool(data.get("configurable", False)),
            value_type=parse_value_type(data["valueType"]),
            element_value_type=parse_value_type(element) if element else None,
            unit_of_measure=data.get("unitOfMeasure"),
            parts=list(data.get("parts", [])),
            tags=list(data.get("tags", [])),
            condition_note=data.get("conditionNote"),
            allowed_values=[
                CharacteristicValue.from_dict(v) for v in data.get("allowedValues", [])
            ],
            is_unique=bool(data.get("isUnique", True)),
            extensible=data.get("extensible"),
        )


@dataclass
class GstTemplate:
    version: str
    attributes: list[GstAttribute]

    def attribute(self, name: str) -> GstAttribute | None:
        for attr in self.attributes:
            if attr.name == name:
                return attr
        return None


def parse_template(data: dict) -> GstTemplate:
    """Parse and validate a raw template document."""
    attributes = [GstAttribute.from_dict(a) for a in data.get("attributes", [])]
    seen: set[str] = set()
    for attr in attributes:
        if attr.name in seen:
            raise DuplicateAttributeName(f"attribute {attr.name!r} declared twice")
        seen.add(attr.name)
        if attr.presence is Presence.CONDITIONAL and not attr.condition_note:
            raise MalformedTemplate(
                f"attribute {attr.name!r} is CONDITIONAL but has no condition note"
            )
        if attr.value_type in (ValueType.SET, ValueType.ARRAY) and not attr.element_value_type:
            raise MalformedTemplate(
                f"attribute {attr.name!r} is {attr.value_type.value} without an element type"
            )
    return GstTemplate(version=str(data.get("version", "1.0")), attributes=attributes)


def load_default_template() -> GstTemplate:
    """Load the attribute catalog shipped with the package."""
    from importlib import resources

    raw = resources.files("sliceoss.fixtures").joinpath("gst_attributes.json").read_text("utf-8")
    return parse_template(json.loads(raw))


def transform_attribute(attr: GstAttribute) -> ServiceSpecCharacteristic:
    """Map one template attribute onto a service-spec characteristic.

    Cardinality encodes presence: MANDATORY becomes minCardinality 1,
    everything else 0; maxCardinality is always 1.  A CONDITIONAL presence
    note lands in the regex field with a fixed prefix.  Composite parts turn
    into dependency relationships and tags into tag relationships.
    """
    relationships = [
        CharRelationship(name=tag, relationship_type=RelationshipType.TAG, role="tag")
        for tag in attr.tags
    ]
    relationships += [
        CharRelationship(
            name=f"{attr.name}: {part}",
            relationship_type=RelationshipType.DEPENDENCY,
            role=part,
        )
        for part in attr.parts
    ]
    values = [
        CharacteristicValueEntry(
            value=CharacteristicValue(value=v.value, alias=v.alias),
            unit_of_measure=attr.unit_of_measure,
            is_default=False,
        )
        for v in attr.allowed_values
    ]
    if not values and attr.unit_of_measure:
        # No enumerated values: keep one empty entry so the unit is not lost.
        values = [
            CharacteristicValueEntry(
                value=CharacteristicValue(value=""),
                unit_of_measure=attr.unit_of_measure,
                is_default=False,
            )
        ]
    regex = None
    if attr.presence is Presence.CONDITIONAL:
        regex = CONDITION_PREFIX + (attr.condition_note or "")
    return ServiceSpecCharacteristic(
        name=attr.name,
        description=attr.description,
        value_type=attr.value_type,
        element_value_type=attr.element_value_type,
        configurable=attr.configurable,
        min_cardinality=1 if attr.presence is Presence.MANDATORY else 0,
        max_cardinality=1,
        is_unique=attr.is_unique,
        extensible=attr.extensible,
        regex=regex,
        values=values,
        relationships=relationships,
    )


def _force_set_of_integer(char: ServiceSpecCharacteristic) -> None:
    char.value_type = ValueType.SET
    char.element_value_type = ValueType.INTEGER


def _force_float(char: ServiceSpecCharacteristic) -> None:
    char.value_type = ValueType.FLOAT
    char.element_value_type = None


def _force_unit_bps(char: ServiceSpecCharacteristic) -> None:
    if not char.values:
        char.values = [
            CharacteristicValueEntry(value=CharacteristicValue(value=""))
        ]
    for entry in char.values:
        entry.unit_of_measure = "bps"


# Template fields that the upstream document gets wrong for service modelling;
# corrected on the derived characteristics, never by editing the template.
TEMPLATE_OVERRIDES = {
    "Area of Service: Region specification": _force_set_of_integer,
    "Slice quality of service parameters: Packet Error Rate": _force_float,
    "Uplink throughput per network slice: Guaranteed uplink throughput": _force_unit_bps,
}


def build_gst_specification(template: GstTemplate) -> ServiceSpecification:
    """Build the full GST specification from a parsed template.

    Deterministic: the same template always yields the identical spec,
    including the id, so repeated builds upsert cleanly.
    """
    by_name = {attr.name: attr for attr in template.attributes}
    part_names: set[str] = set()
    for attr in template.attributes:
        for part in attr.parts:
            if part not in by_name:
                raise UnresolvedPart(
                    f"attribute {attr.name!r} references unknown part {part!r}"
                )
            part_names.add(part)

    characteristics: list[ServiceSpecCharacteristic] = []
    names_seen: set[str] = set()
    for attr in template.attributes:
        if attr.name in part_names:
            continue  # emitted under its parent with a prefixed name
        characteristics.append(transform_attribute(attr))
        for part in attr.parts:
            prefixed = transform_attribute(by_name[part])
            prefixed.name = f"{attr.name}: {part}"
            characteristics.append(prefixed)
    for char in characteristics:
        if char.name in names_seen:
            raise DuplicateAttributeName(f"characteristic {char.name!r} emitted twice")
        names_seen.add(char.name)
        override = TEMPLATE_OVERRIDES.get(char.name)
        if override:
            override(char)

    return ServiceSpecification(
        id=f"gst-{template.version}",
        name="GST",
        version=template.version,
        description=f"Generic slice template, version {template.version}",
        spec_type=SpecType.CFS,
        is_bundle=False,
        lifecycle_status=LifecycleStatus.IN_DESIGN,
        characteristics=characteristics,
    )


def derive_nest(
    gst_spec: ServiceSpecification,
    nest_name: str,
    assignments: dict[str, CharacteristicValue],
) -> ServiceSpecification:
    """Clone the GST spec into a NEST with selected values pinned as defaults.

    Assigned values become the single default entry of their characteristic;
    everything else is carried over untouched.  The clone gets a fresh id and
    starts out ACTIVE so it can be offered and ordered.
    """
    nest = ServiceSpecification.from_dict(gst_spec.to_dict())
    nest.id = str(uuid.uuid4())
    nest.name = nest_name
    nest.description = f"{nest_name} (derived from {gst_spec.name} {gst_spec.version})"
    nest.lifecycle_status = LifecycleStatus.ACTIVE
    for name, assigned in assignments.items():
        char = characteristic_by_name(nest, name)
        if char is None:
            raise UnknownCharacteristic(f"no characteristic named {name!r}")
        violations = validate_value(char, assigned.value)
        if violations:
            raise ValueViolation(
                f"value {assigned.value!r} invalid for {name!r}: "
                + "; ".join(v.message for v in violations)
            )
        unit = char.values[0].unit_of_measure if char.values else None
        for entry in char.values:
            entry.is_default = False
        matched = False
        for entry in char.values:
            if entry.value.value == assigned.value:
                entry.is_default = True
                if assigned.alias is not None:
                    entry.value.alias = assigned.alias
                matched = True
                break
        if not matched:
            char.values.append(
                CharacteristicValueEntry(
                    value=CharacteristicValue(value=assigned.value, alias=assigned.alias),
                    unit_of_measure=unit,
                    is_default=True,
                )
            )
    return nest


@dataclass
class Violation:
    code: str
    message: str

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message}


def _scalar_violation(
    value_type: ValueType,
    text: str,
    allowed: list[CharacteristicValue] | None = None,
) -> Violation | None:
    if value_type in _INT_RANGES:
        if not _INT_RE.match(text):
            return Violation("TypeMismatch", f"{text!r} is not a base-10 integer")
        low, high = _INT_RANGES[value_type]
        if not low <= int(text) <= high:
            return Violation(
                "TypeMismatch", f"{text!r} is out of range for {value_type.value}"
            )
        return None
    if value_type is ValueType.FLOAT:
        if not _FLOAT_RE.match(text):
            return Violation("TypeMismatch", f"{text!r} is not a decimal number")
        return None
    if value_type is ValueType.BOOLEAN:
        if text not in ("true", "false"):
            return Violation("TypeMismatch", f"{text!r} is not 'true' or 'false'")
        return None
    if value_type is ValueType.ENUM:
        if allowed is not None and text not in [v.value for v in allowed]:
            return Violation("ValueNotAllowed", f"{text!r} is not an allowed value")
        return None
    if value_type is ValueType.TIMESTAMP:
        try:
            parsed = parse_ts(text)
        except ValueError:
            return Violation("TypeMismatch", f"{text!r} is not an RFC 3339 timestamp")
        if parsed.tzinfo is None or "T" not in text.upper():
            return Violation("TypeMismatch", f"{text!r} lacks a date-time with offset")
        return None
    if value_type is ValueType.BINARY:
        try:
            base64.b64decode(text, validate=True)
        except Exception:
            return Violation("TypeMismatch", f"{text!r} is not base64 data")
        return None
    # TEXT and LONGTEXT accept anything.
    return None


def validate_value(
    char: ServiceSpecCharacteristic, value: str
) -> list[Violation]:
    """Check one candidate value against a characteristic's typing rules.

    Collections are encoded as a JSON array in the value text; each element
    is validated against the declared element type.  Returns an empty list
    when the value is acceptable.
    """
    allowed = [entry.value for entry in char.values if entry.value.value != ""]
    if char.value_type in (ValueType.SET, ValueType.ARRAY):
        try:
            elements = json.loads(value)
        except json.JSONDecodeError:
            return [Violation("TypeMismatch", f"{value!r} is not a JSON array")]
        if not isinstance(elements, list):
            return [Violation("TypeMismatch", f"{value!r} is not a JSON array")]
        element_type = char.element_value_type or ValueType.TEXT
        violations = []
        for element in elements:
            if isinstance(element, (dict, list)):
                violations.append(
                    Violation("TypeMismatch", f"{element!r} is not a scalar element")
                )
                continue
            if isinstance(element, bool):
                text = "true" if element else "false"
            else:
                text = str(element)
            found = _scalar_violation(element_type, text, allowed)
            if found:
                violations.append(found)
        if char.value_type is ValueType.SET and len(elements) != len(
            {json.dumps(e) for e in elements}
        ):
            violations.append(Violation("ValueNotAllowed", "set elements must be unique"))
        return violations
    found = _scalar_violation(char.value_type, value, allowed)
    return [found] if found else []
