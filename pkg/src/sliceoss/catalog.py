"""Service catalog: specifications, bundles, categories, public exposure."""

from __future__ import annotations

import logging
import uuid
from dataclasses import dataclass, field
from typing import Callable

from .canon import canonical_dumps
from .domain import (
    LifecycleStatus,
    ServiceSpecification,
    SpecRelationship,
    SpecType,
)
from .errors import CycleDetected, DuplicateName, UnknownCategory, UnknownSpec

logger = logging.getLogger(__name__)

# Called after each committed mutation with ("specification"|"category", obj).
ChangeListener = Callable[[str, object], None]


@dataclass
class Category:
    id: str
    name: str
    description: str = ""
    spec_ids: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "description": self.description,
            "specIds": list(self.spec_ids),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Category":
        return cls(
            id=data["id"],
            name=data["name"],
            description=data.get("description", ""),
            spec_ids=list(data.get("specIds", [])),
        )


def bump_version(version: str) -> str:
    """Monotonic bump: increment the trailing numeric segment."""
    parts = version.split(".")
    if parts and parts[-1].isdigit():
        parts[-1] = str(int(parts[-1]) + 1)
        return ".".join(parts)
    return version + ".1"


class Catalog:
    """In-memory specification store with bundle links and categories."""

    def __init__(self, listener: ChangeListener | None = None):
        self._specs: dict[str, ServiceSpecification] = {}
        self._categories: dict[str, Category] = {}
        self._listener = listener

    def set_listener(self, listener: ChangeListener) -> None:
        self._listener = listener

    def _notify(self, kind: str, obj: object) -> None:
        if self._listener:
            self._listener(kind, obj)

    # -- specifications ----------------------------------------------------

    def upsert_specification(self, spec: ServiceSpecification) -> ServiceSpecification:
        """Insert or update; identical re-upserts are no-ops, updates bump
        the version when the caller did not bump it themselves."""
        incoming = ServiceSpecification.from_dict(spec.to_dict())
        if not incoming.id:
            incoming.id = str(uuid.uuid4())
        current = self._specs.get(incoming.id)
        if current is not None and canonical_dumps(current.to_dict()) == canonical_dumps(
            incoming.to_dict()
        ):
            return current
        for other in self._specs.values():
            if (
                other.id != incoming.id
                and other.name == incoming.name
                and other.version == incoming.version
            ):
                raise DuplicateName(
                    f"{incoming.name!r} version {incoming.version} already exists"
                )
        if current is not None and current.version == incoming.version:
            incoming.version = bump_version(current.version)
        self._specs[incoming.id] = incoming
        self._notify("specification", incoming)
        logger.info("catalog upsert spec=%s name=%r version=%s", incoming.id, incoming.name, incoming.version)
        return incoming

    def apply_specification(self, spec: ServiceSpecification) -> None:
        """Replay/restore path: store verbatim, no bump, no notification."""
        self._specs[spec.id] = spec

    def get(self, spec_id: str) -> ServiceSpecification:
        spec = self._specs.get(spec_id)
        if spec is None:
            raise UnknownSpec(f"no specification {spec_id!r}")
        return spec

    def get_by_name(self, name: str) -> ServiceSpecification | None:
        for spec in self._specs.values():
            if spec.name == name:
                return spec
        return None

    def find_by_origin(self, partner_id: str, remote_spec_id: str) -> ServiceSpecification | None:
        for spec in self._specs.values():
            if (
                spec.origin
                and spec.origin.partner_id == partner_id
                and spec.origin.remote_spec_id == remote_spec_id
            ):
                return spec
        return None

    def link_bundle(self, parent_id: str, child_ids: list[str]) -> ServiceSpecification:
        """Declare ``parent`` a bundle of ``child_ids``; rejects cycles.

        An empty child list turns the bundle flag off again.
        """
        parent = self.get(parent_id)
        for child_id in child_ids:
            self.get(child_id)
        previous = parent.related_specs
        parent.related_specs = [SpecRelationship(spec_id=c) for c in child_ids]
        parent.is_bundle = bool(child_ids)
        if self._has_cycle(parent_id):
            parent.related_specs = previous
            parent.is_bundle = bool(previous)
            raise CycleDetected(f"linking {child_ids} under {parent_id} creates a cycle")
        self._notify("specification", parent)
        return parent

    def _has_cycle(self, start: str) -> bool:
        seen: set[str] = set()
        stack = [(start, iter(self._children_ids(start)))]
        path = {start}
        while stack:
            node, children = stack[-1]
            advanced = False
            for child in children:
                if child in path:
                    return True
                if child not in seen:
                    path.add(child)
                    stack.append((child, iter(self._children_ids(child))))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                path.discard(node)
                seen.add(node)
        return False

    def _children_ids(self, spec_id: str) -> list[str]:
        spec = self._specs.get(spec_id)
        if spec is None:
            return []
        return [r.spec_id for r in spec.related_specs if r.relationship_type == "dependency"]

    def children(self, spec_id: str) -> list[ServiceSpecification]:
        return [self.get(c) for c in self._children_ids(spec_id)]

    def query(
        self,
        spec_type: SpecType | None = None,
        category_id: str | None = None,
        public_only: bool = False,
    ) -> list[ServiceSpecification]:
        """Filtered listing in stable (name, version, id) order.

        The public view is what anonymous customers see: ACTIVE
        customer-facing specifications only, never an RFS.
        """
        specs = list(self._specs.values())
        if public_only:
            specs = [
                s
                for s in specs
                if s.spec_type is SpecType.CFS
                and s.lifecycle_status is LifecycleStatus.ACTIVE
            ]
        if spec_type is not None:
            specs = [s for s in specs if s.spec_type is spec_type]
        if category_id is not None:
            category = self._categories.get(category_id)
            if category is None:
                raise UnknownCategory(f"no category {category_id!r}")
            member_ids = set(category.spec_ids)
            specs = [s for s in specs if s.id in member_ids]
        return sorted(specs, key=lambda s: (s.name, s.version, s.id))

    def all_specs(self) -> list[ServiceSpecification]:
        return sorted(self._specs.values(), key=lambda s: (s.name, s.version, s.id))

    # -- categories --------------------------------------------------------

    def upsert_category(self, category: Category) -> Category:
        if not category.id:
            category.id = str(uuid.uuid4())
        for spec_id in category.spec_ids:
            self.get(spec_id)
        self._categories[category.id] = category
        self._notify("category", category)
        return category

    def apply_category(self, category: Category) -> None:
        self._categories[category.id] = category

    def categories(self) -> list[Category]:
        return sorted(self._categories.values(), key=lambda c: (c.name, c.id))

    def get_category(self, category_id: str) -> Category:
        category = self._categories.get(category_id)
        if category is None:
            raise UnknownCategory(f"no category {category_id!r}")
        return category
