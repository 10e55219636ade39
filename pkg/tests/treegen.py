"""Random specification-tree builder shared by fulfillment tests.

Grows an acyclic bundle tree in a catalog and exposes the counts an
independent walk predicts, so decomposition results can be checked against
an oracle that never touches the code under test.
"""

from __future__ import annotations

import random
import uuid
from dataclasses import dataclass, field

from sliceoss.catalog import Catalog
from sliceoss.domain import (
    CharacteristicValue,
    CharacteristicValueEntry,
    LifecycleStatus,
    ServiceSpecCharacteristic,
    ServiceSpecification,
    SpecType,
    ValueType,
)


@dataclass
class Node:
    spec_id: str
    spec_type: str
    children: list["Node"] = field(default_factory=list)

    def count_nodes(self) -> int:
        return 1 + sum(child.count_nodes() for child in self.children)

    def count_manual_leaves(self) -> int:
        if not self.children:
            return 1 if self.spec_type == "CFS" else 0
        return sum(child.count_manual_leaves() for child in self.children)

    def count_rfs_leaves(self) -> int:
        if not self.children:
            return 1 if self.spec_type == "RFS" else 0
        return sum(child.count_rfs_leaves() for child in self.children)


def expected_outcome(root: Node) -> str:
    """Order state right after decomposition and automatic dispatch.

    Resource-facing leaves carry no descriptor id here, so they activate
    immediately; customer-facing leaves wait for a provider task.
    """
    manual = root.count_manual_leaves()
    rfs = root.count_rfs_leaves()
    if manual == 0:
        return "COMPLETED"
    if rfs > 0:
        return "PARTIAL"
    return "IN_PROGRESS"


def grow_tree(
    catalog: Catalog,
    rng: random.Random,
    max_depth: int = 4,
    max_fanout: int = 3,
) -> Node:
    """Create one random orderable tree; returns its shape."""

    def make(depth: int, force_cfs: bool = False) -> Node:
        fanout = 0 if depth >= max_depth else rng.randint(0, max_fanout)
        if fanout > 0 or force_cfs:
            spec_type = SpecType.CFS
        else:
            spec_type = SpecType.CFS if rng.random() < 0.5 else SpecType.RFS
        children = [make(depth + 1) for _ in range(fanout)]
        label = uuid.UUID(int=rng.getrandbits(128), version=4).hex[:10]
        spec = catalog.upsert_specification(
            ServiceSpecification(
                id="",
                name=f"{spec_type.value.lower()}-{label}",
                version="1.0",
                spec_type=spec_type,
                lifecycle_status=LifecycleStatus.ACTIVE,
                characteristics=[
                    ServiceSpecCharacteristic(
                        name="Label",
                        value_type=ValueType.TEXT,
                        configurable=False,
                        values=[
                            CharacteristicValueEntry(
                                value=CharacteristicValue(value=label), is_default=True
                            )
                        ],
                    )
                ],
            )
        )
        if children:
            catalog.link_bundle(spec.id, [child.spec_id for child in children])
        return Node(spec.id, spec_type.value, children)

    return make(0, force_cfs=True)
