"""Tests for instances, mappings, component tracking, and cost accounting."""

import pytest

from repart.errors import InputError, InvariantViolation
from repart.model import (
    ComponentPartition,
    CostLedger,
    Instance,
    Mapping,
    Request,
    component_size_census,
    validate_request,
)
from repart.rng import SplitMix64


def test_instance_node_count():
    assert Instance(3, 4).n == 12
    assert Instance(1, 2).n == 2


@pytest.mark.parametrize("k,l", [(0, 2), (-1, 3), (2, 1), (2, 0)])
def test_instance_rejects_bad_shape(k, l):
    with pytest.raises(InputError):
        Instance(k, l)


def test_request_rejects_self_loop():
    with pytest.raises(InputError):
        Request(2, 2)


def test_request_rejects_negative_node():
    with pytest.raises(InputError):
        Request(-1, 2)


def test_validate_request_checks_range():
    inst = Instance(2, 2)
    validate_request(inst, Request(3, 0))
    with pytest.raises(InputError):
        validate_request(inst, Request(0, 4))


def test_default_mapping_fills_clusters_in_blocks():
    assert Mapping.default(Instance(3, 2)).as_list() == [0, 0, 0, 1, 1, 1]
    assert Mapping.default(Instance(1, 3)).as_list() == [0, 1, 2]


def test_mapping_requires_exactly_k_per_cluster():
    inst = Instance(2, 2)
    with pytest.raises(InputError):
        Mapping(inst, [0, 0, 0, 1])
    with pytest.raises(InputError):
        Mapping(inst, [0, 0, 2, 2])


def test_mapping_move_is_unchecked_until_validated():
    m = Mapping.default(Instance(2, 2))
    m.move(0, 1)
    assert not m.is_valid()
    m.move(3, 0)
    assert m.is_valid()
    assert m.as_list() == [1, 0, 1, 0]


def test_mapping_copy_is_independent():
    m = Mapping.default(Instance(2, 2))
    c = m.copy()
    c.move(0, 1)
    assert m.as_list() == [0, 0, 1, 1]
    assert m != c


def test_mapping_nodes_in():
    m = Mapping(Instance(2, 2), [1, 0, 0, 1])
    assert m.nodes_in(0) == [1, 2]
    assert m.nodes_in(1) == [0, 3]
    assert m.cluster_of(3) == 1


def test_merge_two_singletons():
    p = ComponentPartition(4)
    out = p.merge(0, 1)
    assert out.merged
    assert out.size == 2


def test_merge_already_joined_pair():
    p = ComponentPartition(4)
    p.merge(0, 1)
    out = p.merge(1, 0)
    assert not out.merged
    assert out.size == 2


def test_merge_of_two_groups_reports_combined_size():
    p = ComponentPartition(6)
    p.merge(0, 1)
    p.merge(2, 3)
    p.merge(3, 4)
    out = p.merge(1, 4)
    assert out.merged
    assert out.size == 5


def test_union_keeps_larger_root():
    p = ComponentPartition(5)
    p.merge(2, 3)
    p.merge(3, 0)
    # {2,3} outweighs {0}, so the established root survives
    assert p.find(0) == 2


def test_union_size_tie_prefers_smaller_root():
    p = ComponentPartition(4)
    p.merge(1, 0)
    assert p.find(1) == 0


def test_merge_order_is_irrelevant_to_final_components():
    rng = SplitMix64(11)
    for _ in range(60):
        n = rng.randint(2, 10)
        pairs = []
        for _ in range(8):
            u, v = rng.below(n), rng.below(n)
            if u != v:
                pairs.append((u, v))
        a = ComponentPartition(n)
        b = ComponentPartition(n)
        for u, v in pairs:
            a.merge(u, v)
        for u, v in reversed(pairs):
            b.merge(u, v)
        assert a.canonical() == b.canonical()


def test_components_listing_sizes_and_reset():
    p = ComponentPartition(4)
    p.merge(0, 2)
    assert sorted(tuple(m) for m in p.components().values()) == [(0, 2), (1,), (3,)]
    assert p.sizes() == [2, 1, 1]
    assert p.size_of(2) == 2
    p.reset()
    assert p.component_count == 4
    assert p.sizes() == [1, 1, 1, 1]


def test_partition_copy_is_independent():
    p = ComponentPartition(4)
    p.merge(0, 1)
    q = p.copy()
    q.merge(2, 3)
    assert p.component_count == 3
    assert q.component_count == 2


def test_census_groups_component_sizes_by_cluster():
    inst = Instance(2, 3)
    m = Mapping.default(inst)
    p = ComponentPartition(inst.n)
    p.merge(4, 5)
    census = component_size_census(p, m)
    assert census.per_cluster == ((1, 1), (1, 1), (2,))
    assert census.spanning is None


def test_census_reports_single_spanning_component():
    inst = Instance(2, 2)
    m = Mapping.default(inst)
    p = ComponentPartition(inst.n)
    p.merge(1, 2)
    census = component_size_census(p, m)
    assert census.per_cluster == ((1,), (1,))
    assert census.spanning is not None
    assert census.spanning.size == 2
    assert census.spanning.clusters == (0, 1)
    assert census.spanning.nodes == (1, 2)


def test_census_with_full_cluster_components():
    inst = Instance(2, 2)
    m = Mapping.default(inst)
    p = ComponentPartition(inst.n)
    p.merge(0, 1)
    p.merge(2, 3)
    census = component_size_census(p, m)
    assert census.per_cluster == ((2,), (2,))
    assert census.spanning is None


def test_census_rejects_two_spanning_components():
    inst = Instance(2, 3)
    m = Mapping.default(inst)
    p = ComponentPartition(inst.n)
    p.merge(1, 2)
    p.merge(3, 4)
    with pytest.raises(InvariantViolation):
        component_size_census(p, m)


def test_census_rejects_component_across_three_clusters():
    inst = Instance(2, 3)
    m = Mapping.default(inst)
    p = ComponentPartition(inst.n)
    p.merge(0, 2)
    p.merge(2, 4)
    with pytest.raises(InvariantViolation):
        component_size_census(p, m)


def test_ledger_accumulates_per_phase_rows():
    led = CostLedger()
    led.charge_communication()
    led.charge_migration(2)
    led.record_remap(2)
    led.begin_phase(1)
    led.charge_communication()
    assert led.communication == 2
    assert led.migration == 2
    assert led.total == 4
    assert [r.phase for r in led.rows] == [0, 1]
    first = led.rows[0]
    assert first.communication == 1
    assert first.migration == 2
    assert first.remap_events == 1
    assert first.max_affected == 2
    assert first.cost == 3


def test_ledger_rejects_out_of_order_phase():
    led = CostLedger()
    with pytest.raises(InvariantViolation):
        led.begin_phase(2)


def test_ledger_rejects_negative_charges():
    led = CostLedger()
    with pytest.raises(InvariantViolation):
        led.charge_communication(-1)
    with pytest.raises(InvariantViolation):
        led.charge_migration(-1)
