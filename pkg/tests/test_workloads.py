"""Tests for workload generation, adaptive adversaries, and file round-trips."""

import json

import pytest

from repart.engine import Engine, StepTag
from repart.errors import InputError
from repart.model import Instance, Mapping
from repart.workloads import (
    KINDS,
    generate_workload,
    load_workload,
    save_workload,
)


def test_uniform_random_is_deterministic_per_seed():
    inst = Instance(3, 3)
    a = generate_workload("uniform-random", inst, 50, 42)
    b = generate_workload("uniform-random", inst, 50, 42)
    c = generate_workload("uniform-random", inst, 50, 43)
    assert a.requests == b.requests
    assert a.requests != c.requests
    assert a.is_static


def test_uniform_random_requests_are_normalized_pairs():
    inst = Instance(2, 4)
    wl = generate_workload("uniform-random", inst, 200, 7)
    for req in wl.requests:
        assert 0 <= req.u < req.v < inst.n


def test_adaptive_kinds_are_not_static():
    inst = Instance(2, 2)
    for kind in ("merge-chain", "split-probe"):
        wl = generate_workload(kind, inst, 10, 0)
        assert not wl.is_static
        assert wl.requests is None


def test_generate_workload_rejects_bad_arguments():
    inst = Instance(2, 2)
    with pytest.raises(InputError):
        generate_workload("zipf", inst, 10, 0)
    with pytest.raises(InputError):
        generate_workload("uniform-random", inst, -1, 0)
    with pytest.raises(InputError):
        generate_workload("uniform-random", inst, 10, "seed")


def test_split_probe_always_requests_a_split_pair():
    inst = Instance(2, 2)
    wl = generate_workload("split-probe", inst, 15, 0)
    eng = Engine(inst)
    gen = wl.make_generator()
    for _ in range(wl.length):
        req = gen.next(eng.mapping)
        assert req is not None
        assert req.u == 0  # lowest-id convention pins the first endpoint
        assert eng.mapping.cluster_of(req.u) != eng.mapping.cluster_of(req.v)
        out = eng.serve(req)
        assert out.tag in (StepTag.PAID_REMAP, StepTag.PHASE_RESET)
        assert out.communication == 1


def test_merge_chain_resets_within_n_requests():
    inst = Instance(2, 2)
    wl = generate_workload("merge-chain", inst, inst.n, 0)
    eng = Engine(inst)
    gen = wl.make_generator()
    for _ in range(wl.length):
        req = gen.next(eng.mapping)
        assert req is not None
        eng.serve(req)
    assert eng.completed_phases


def test_merge_chain_mirror_tracks_engine_components():
    for k, l in ((2, 2), (2, 3), (3, 2)):
        inst = Instance(k, l)
        wl = generate_workload("merge-chain", inst, 20, 0)
        eng = Engine(inst)
        gen = wl.make_generator()
        for _ in range(wl.length):
            req = gen.next(eng.mapping)
            if req is None:
                break
            eng.serve(req)
            assert gen.partition.canonical() == eng.partition.canonical()


def test_workload_roundtrip(tmp_path):
    inst = Instance(2, 3)
    wl = generate_workload("uniform-random", inst, 25, 99)
    path = tmp_path / "wl.json"
    save_workload(wl, path)
    back = load_workload(path)
    assert back.instance == inst
    assert back.requests == wl.requests
    assert back.initial is None


def test_workload_roundtrip_with_initial_mapping(tmp_path):
    inst = Instance(2, 2)
    payload = {"k": 2, "l": 2, "initial": [0, 1, 0, 1], "requests": [[0, 2], [1, 3]]}
    path = tmp_path / "wl.json"
    path.write_text(json.dumps(payload))
    wl = load_workload(path)
    assert wl.initial == Mapping(inst, [0, 1, 0, 1])
    assert [(r.u, r.v) for r in wl.requests] == [(0, 2), (1, 3)]


def test_save_workload_refuses_adaptive(tmp_path):
    wl = generate_workload("split-probe", Instance(2, 2), 5, 0)
    with pytest.raises(InputError):
        save_workload(wl, tmp_path / "x.json")


@pytest.mark.parametrize(
    "payload",
    [
        "not json",
        json.dumps([1, 2, 3]),
        json.dumps({"l": 2, "requests": []}),
        json.dumps({"k": "two", "l": 2, "requests": []}),
        json.dumps({"k": 2, "l": 2}),
        json.dumps({"k": 2, "l": 2, "requests": [[0]]}),
        json.dumps({"k": 2, "l": 2, "requests": [[0, "a"]]}),
        json.dumps({"k": 2, "l": 2, "requests": [[0, 9]]}),
        json.dumps({"k": 2, "l": 2, "requests": [[1, 1]]}),
        json.dumps({"k": 2, "l": 2, "requests": [], "initial": [0, 0, 0, 1]}),
        json.dumps({"k": 2, "l": 2, "requests": [], "initial": [0, 0]}),
    ],
)
def test_load_workload_rejects_malformed_files(tmp_path, payload):
    path = tmp_path / "bad.json"
    path.write_text(payload)
    with pytest.raises(InputError):
        load_workload(path)


def test_load_workload_missing_file(tmp_path):
    with pytest.raises(InputError):
        load_workload(tmp_path / "absent.json")


def test_kind_list_is_stable():
    assert KINDS == ("uniform-random", "merge-chain", "split-probe")
