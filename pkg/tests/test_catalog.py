"""Catalog behavior: upserts, versioning, bundles, cycles, visibility."""

import pytest

from sliceoss.catalog import Catalog, Category, bump_version
from sliceoss.domain import (
    LifecycleStatus,
    ServiceSpecification,
    SpecOrigin,
    SpecType,
)
from sliceoss.errors import CycleDetected, DuplicateName, UnknownCategory, UnknownSpec


def make_spec(name: str, spec_type: SpecType = SpecType.CFS, **kwargs) -> ServiceSpecification:
    defaults = dict(
        id="",
        name=name,
        version="1.0",
        description="",
        spec_type=spec_type,
        lifecycle_status=LifecycleStatus.ACTIVE,
    )
    defaults.update(kwargs)
    return ServiceSpecification(**defaults)


class TestBumpVersion:
    def test_increments_trailing_numeric_segment(self):
        assert bump_version("1.0") == "1.1"
        assert bump_version("2.9") == "2.10"
        assert bump_version("3") == "4"

    def test_non_numeric_tail_gets_a_new_segment(self):
        assert bump_version("v1") == "v1.1"
        assert bump_version("") == ".1"


class TestUpsert:
    def test_assigns_an_id_when_missing(self):
        catalog = Catalog()
        stored = catalog.upsert_specification(make_spec("Alpha"))
        assert stored.id
        assert catalog.get(stored.id).name == "Alpha"

    def test_identical_reupsert_is_a_noop(self):
        events = []
        catalog = Catalog(listener=lambda kind, obj: events.append((kind, obj.id)))
        stored = catalog.upsert_specification(make_spec("Alpha"))
        again = catalog.upsert_specification(stored)
        assert again.version == stored.version
        assert events == [("specification", stored.id)]

    def test_update_without_version_bump_gets_bumped(self):
        catalog = Catalog()
        stored = catalog.upsert_specification(make_spec("Alpha"))
        changed = ServiceSpecification.from_dict(stored.to_dict())
        changed.description = "now with text"
        updated = catalog.upsert_specification(changed)
        assert updated.version == "1.1"

    def test_update_with_explicit_version_is_kept(self):
        catalog = Catalog()
        stored = catalog.upsert_specification(make_spec("Alpha"))
        changed = ServiceSpecification.from_dict(stored.to_dict())
        changed.description = "now with text"
        changed.version = "7.0"
        assert catalog.upsert_specification(changed).version == "7.0"

    def test_same_name_and_version_under_another_id_is_rejected(self):
        catalog = Catalog()
        catalog.upsert_specification(make_spec("Alpha"))
        with pytest.raises(DuplicateName):
            catalog.upsert_specification(make_spec("Alpha"))

    def test_unknown_spec_raises(self):
        with pytest.raises(UnknownSpec):
            Catalog().get("nope")

    def test_find_by_origin(self):
        catalog = Catalog()
        local = make_spec("Imported")
        local.origin = SpecOrigin(partner_id="p1", remote_spec_id="r1")
        stored = catalog.upsert_specification(local)
        assert catalog.find_by_origin("p1", "r1").id == stored.id
        assert catalog.find_by_origin("p1", "other") is None


class TestBundles:
    def _three(self, catalog):
        a = catalog.upsert_specification(make_spec("A"))
        b = catalog.upsert_specification(make_spec("B"))
        c = catalog.upsert_specification(make_spec("C", spec_type=SpecType.RFS))
        return a, b, c

    def test_link_sets_flag_and_ordered_children(self):
        catalog = Catalog()
        a, b, c = self._three(catalog)
        linked = catalog.link_bundle(a.id, [b.id, c.id])
        assert linked.is_bundle is True
        assert [s.id for s in catalog.children(a.id)] == [b.id, c.id]

    def test_empty_link_clears_the_bundle_flag(self):
        catalog = Catalog()
        a, b, _ = self._three(catalog)
        catalog.link_bundle(a.id, [b.id])
        cleared = catalog.link_bundle(a.id, [])
        assert cleared.is_bundle is False
        assert catalog.children(a.id) == []

    def test_direct_cycle_is_rejected_and_rolled_back(self):
        catalog = Catalog()
        a, b, _ = self._three(catalog)
        catalog.link_bundle(a.id, [b.id])
        with pytest.raises(CycleDetected):
            catalog.link_bundle(b.id, [a.id])
        assert catalog.children(b.id) == []
        assert catalog.get(b.id).is_bundle is False

    def test_self_cycle_is_rejected(self):
        catalog = Catalog()
        a, _, _ = self._three(catalog)
        with pytest.raises(CycleDetected):
            catalog.link_bundle(a.id, [a.id])

    def test_deep_cycle_is_rejected(self):
        catalog = Catalog()
        a, b, _ = self._three(catalog)
        d = catalog.upsert_specification(make_spec("D"))
        catalog.link_bundle(a.id, [b.id])
        catalog.link_bundle(b.id, [d.id])
        with pytest.raises(CycleDetected):
            catalog.link_bundle(d.id, [a.id])

    def test_linking_unknown_child_raises(self):
        catalog = Catalog()
        a, _, _ = self._three(catalog)
        with pytest.raises(UnknownSpec):
            catalog.link_bundle(a.id, ["ghost"])


class TestQuery:
    def test_public_view_hides_rfs_and_unpublished(self):
        catalog = Catalog()
        cfs = catalog.upsert_specification(make_spec("Public"))
        catalog.upsert_specification(make_spec("Machine", spec_type=SpecType.RFS))
        catalog.upsert_specification(
            make_spec("Draft", lifecycle_status=LifecycleStatus.IN_DESIGN)
        )
        assert [s.id for s in catalog.query(public_only=True)] == [cfs.id]

    def test_spec_type_filter(self):
        catalog = Catalog()
        catalog.upsert_specification(make_spec("Public"))
        rfs = catalog.upsert_specification(make_spec("Machine", spec_type=SpecType.RFS))
        assert [s.id for s in catalog.query(spec_type=SpecType.RFS)] == [rfs.id]

    def test_category_filter_and_unknown_category(self):
        catalog = Catalog()
        a = catalog.upsert_specification(make_spec("A"))
        catalog.upsert_specification(make_spec("B"))
        catalog.upsert_category(Category(id="c1", name="Slices", spec_ids=[a.id]))
        assert [s.id for s in catalog.query(category_id="c1")] == [a.id]
        with pytest.raises(UnknownCategory):
            catalog.query(category_id="ghost")

    def test_listing_is_sorted_by_name(self):
        catalog = Catalog()
        catalog.upsert_specification(make_spec("Zeta"))
        catalog.upsert_specification(make_spec("Alpha"))
        assert [s.name for s in catalog.all_specs()] == ["Alpha", "Zeta"]


class TestCategories:
    def test_category_members_must_exist(self):
        catalog = Catalog()
        with pytest.raises(UnknownSpec):
            catalog.upsert_category(Category(id="c1", name="Slices", spec_ids=["ghost"]))

    def test_listener_fires_for_categories(self):
        events = []
        catalog = Catalog(listener=lambda kind, obj: events.append(kind))
        catalog.upsert_category(Category(id="c1", name="Slices"))
        assert events == ["category"]

    def test_apply_paths_do_not_notify(self):
        events = []
        catalog = Catalog(listener=lambda kind, obj: events.append(kind))
        catalog.apply_specification(make_spec("Quiet", id="q1"))
        catalog.apply_category(Category(id="c1", name="Quiet"))
        assert events == []
        assert catalog.get("q1").name == "Quiet"
