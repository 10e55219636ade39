"""Domain types: enums, state machines, serialization round-trips."""

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from sliceoss import domain
from sliceoss.canon import canonical_dumps, canonical_loads
from sliceoss.domain import (
    ORDER_TRANSITIONS,
    SERVICE_TRANSITIONS,
    CharacteristicValue,
    CharacteristicValueEntry,
    CharRelationship,
    OrderEvent,
    OrderItem,
    OrderState,
    Organization,
    OrganizationRole,
    RelationshipType,
    Service,
    ServiceCategory,
    ServiceOrder,
    ServiceSpecCharacteristic,
    ServiceSpecification,
    ServiceState,
    SpecRelationship,
    StartMode,
    ValueType,
    characteristic_by_name,
    order_transition,
    parse_start_mode,
    parse_value_type,
    service_transition_allowed,
)
from sliceoss.errors import IllegalTransition, InvalidValueType

VALUE_TYPE_TOKENS = [
    "INTEGER", "SMALLINT", "LONGINT", "FLOAT", "BINARY", "ARRAY",
    "SET", "BOOLEAN", "TEXT", "LONGTEXT", "ENUM", "TIMESTAMP",
]


class TestValueType:
    def test_exactly_twelve_members(self):
        assert sorted(t.value for t in ValueType) == sorted(VALUE_TYPE_TOKENS)
        assert len(ValueType) == 12

    @pytest.mark.parametrize("token", VALUE_TYPE_TOKENS)
    def test_parses_every_token(self, token):
        assert parse_value_type(token).value == token

    @pytest.mark.parametrize("token", ["integer", "Integer", "STRING", "", "SET ", "INT"])
    def test_rejects_everything_else(self, token):
        with pytest.raises(InvalidValueType):
            parse_value_type(token)

    @given(st.text(max_size=20))
    def test_parser_is_total(self, token):
        if token in VALUE_TYPE_TOKENS:
            assert parse_value_type(token).value == token
        else:
            with pytest.raises(InvalidValueType):
                parse_value_type(token)


class TestStartMode:
    def test_wire_values(self):
        assert int(StartMode.AUTOMATIC) == 1
        assert int(StartMode.MANUAL_PROVIDER) == 3

    @pytest.mark.parametrize("bad", [0, 2, 4, -1])
    def test_rejects_unknown_modes(self, bad):
        with pytest.raises(IllegalTransition):
            parse_start_mode(bad)


class TestOrderStateMachine:
    def test_defined_transitions(self):
        assert order_transition(OrderState.ACKNOWLEDGED, OrderEvent.BEGIN_FULFILLMENT) is OrderState.IN_PROGRESS
        assert order_transition(OrderState.IN_PROGRESS, OrderEvent.ALL_ACTIVE) is OrderState.COMPLETED
        assert order_transition(OrderState.IN_PROGRESS, OrderEvent.SOME_ACTIVE) is OrderState.PARTIAL
        assert order_transition(OrderState.IN_PROGRESS, OrderEvent.ERROR) is OrderState.FAILED
        assert order_transition(OrderState.PARTIAL, OrderEvent.MANUAL_RESOLUTION) is OrderState.IN_PROGRESS

    def test_table_is_closed(self):
        # Every (state, event) pair resolves to exactly one state or an error.
        for state, event in itertools.product(OrderState, OrderEvent):
            if (state, event) in ORDER_TRANSITIONS:
                assert isinstance(order_transition(state, event), OrderState)
            else:
                with pytest.raises(IllegalTransition):
                    order_transition(state, event)

    def test_terminal_states_have_no_exits(self):
        for state in (OrderState.COMPLETED, OrderState.FAILED):
            for event in OrderEvent:
                with pytest.raises(IllegalTransition):
                    order_transition(state, event)

    def test_random_sequences_never_reach_illegal_state(self):
        rng = random.Random(20817)
        events = list(OrderEvent)
        for _ in range(2000):
            state = OrderState.ACKNOWLEDGED
            for _ in range(rng.randint(1, 8)):
                event = rng.choice(events)
                try:
                    state = order_transition(state, event)
                except IllegalTransition:
                    pass
                assert isinstance(state, OrderState)


class TestServiceStateMachine:
    def test_reachability_table(self):
        t = SERVICE_TRANSITIONS
        assert t[ServiceState.RESERVED] == {ServiceState.ACTIVE, ServiceState.INACTIVE, ServiceState.TERMINATED}
        assert t[ServiceState.ACTIVE] == {ServiceState.INACTIVE, ServiceState.TERMINATED}
        assert t[ServiceState.INACTIVE] == {ServiceState.ACTIVE, ServiceState.TERMINATED}
        assert t[ServiceState.TERMINATED] == frozenset()

    def test_no_self_transitions(self):
        for state in ServiceState:
            assert not service_transition_allowed(state, state)

    def test_terminated_is_absorbing(self):
        for target in ServiceState:
            assert not service_transition_allowed(ServiceState.TERMINATED, target)

    def test_random_sequences_never_reach_illegal_state(self):
        rng = random.Random(41917)
        targets = list(ServiceState)
        for _ in range(2000):
            state = ServiceState.RESERVED
            for _ in range(rng.randint(1, 8)):
                target = rng.choice(targets)
                if service_transition_allowed(state, target):
                    state = target
                assert isinstance(state, ServiceState)


def sample_spec() -> ServiceSpecification:
    return ServiceSpecification(
        id="spec-1",
        name="Edge Slice",
        version="1.0",
        description="test spec",
        spec_type=domain.SpecType.CFS,
        is_bundle=True,
        lifecycle_status=domain.LifecycleStatus.ACTIVE,
        characteristics=[
            ServiceSpecCharacteristic(
                name="Maximum number of UEs",
                value_type=ValueType.LONGINT,
                configurable=True,
                min_cardinality=1,
                values=[
                    CharacteristicValueEntry(
                        value=CharacteristicValue("100", alias="small"),
                        unit_of_measure=None,
                        is_default=True,
                    )
                ],
                relationships=[
                    CharRelationship("Scalability Attribute", RelationshipType.TAG, "tag")
                ],
            )
        ],
        related_specs=[SpecRelationship("spec-2")],
    )


class TestSerializationRoundTrip:
    def test_specification_round_trip_is_byte_identical(self):
        spec = sample_spec()
        first = canonical_dumps(spec.to_dict())
        reparsed = ServiceSpecification.from_dict(canonical_loads(first))
        assert canonical_dumps(reparsed.to_dict()) == first

    def test_order_round_trip_is_byte_identical(self):
        order = ServiceOrder(
            id="order-1",
            ordered_by="alice",
            order_date="2026-01-05T10:00:00Z",
            state=OrderState.PARTIAL,
            items=[
                OrderItem(
                    item_id="item-1",
                    spec_id="spec-1",
                    requested_values={"Maximum number of UEs": CharacteristicValue("500")},
                    state=OrderState.PARTIAL,
                )
            ],
            supporting_service_refs=["svc-1", "svc-2"],
            notes=[domain.OrderNote(at="2026-01-05T10:00:01Z", text="created")],
        )
        first = canonical_dumps(order.to_dict())
        assert canonical_dumps(ServiceOrder.from_dict(canonical_loads(first)).to_dict()) == first

    def test_service_round_trip_is_byte_identical(self):
        service = Service(
            id="svc-1",
            name="Edge Slice",
            spec_id="spec-1",
            order_id="order-1",
            category=ServiceCategory.RFS,
            start_mode=StartMode.AUTOMATIC,
            state=ServiceState.ACTIVE,
            characteristics={"cirros_2vm_ns: NSDID": CharacteristicValue("5", alias="id")},
            supporting_resource_refs=["res-1"],
            error_note=None,
            plan_path="item-1.0",
        )
        first = canonical_dumps(service.to_dict())
        assert canonical_dumps(Service.from_dict(canonical_loads(first)).to_dict()) == first

    def test_organization_round_trip_is_byte_identical(self):
        org = Organization(
            id="org-1",
            name="partner-b",
            role=OrganizationRole.PARTNER,
            endpoint_url="http://partner-b.example",
            auth_token="token-b",
            reachable=True,
            last_probe_at="2026-01-05T10:00:00Z",
        )
        first = canonical_dumps(org.to_dict())
        assert canonical_dumps(Organization.from_dict(canonical_loads(first)).to_dict()) == first

    @given(
        st.lists(
            st.tuples(
                st.text(min_size=1, max_size=12),
                st.sampled_from(list(ValueType)),
                st.booleans(),
                st.integers(min_value=0, max_value=1),
            ),
            max_size=6,
        )
    )
    def test_randomized_specs_round_trip(self, rows):
        chars = [
            ServiceSpecCharacteristic(
                name=f"{i}-{name}",
                value_type=vtype,
                element_value_type=ValueType.TEXT if vtype in (ValueType.SET, ValueType.ARRAY) else None,
                configurable=conf,
                min_cardinality=minc,
            )
            for i, (name, vtype, conf, minc) in enumerate(rows)
        ]
        spec = ServiceSpecification(id="s", name="n", characteristics=chars)
        first = canonical_dumps(spec.to_dict())
        assert canonical_dumps(ServiceSpecification.from_dict(canonical_loads(first)).to_dict()) == first


class TestCharacteristicLookup:
    def test_finds_exact_name(self):
        spec = sample_spec()
        found = characteristic_by_name(spec, "Maximum number of UEs")
        assert found is not None and found.value_type is ValueType.LONGINT

    def test_misses_are_none(self):
        assert characteristic_by_name(sample_spec(), "maximum number of ues") is None
        assert characteristic_by_name(sample_spec(), "Nope") is None
