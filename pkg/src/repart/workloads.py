"""Request workloads: file-backed lists and adaptive generators.

Static workloads are JSON files, replayable byte-identically:

    {"k": 2, "l": 2, "initial": [0, 0, 1, 1], "requests": [[0, 2], ...]}

"initial" is optional and defaults to nodes 0..k-1 in cluster 0 and so
on. Adaptive generators see only the current mapping each step, mirror
any engine bookkeeping they need on their own, and are deterministic
given (seed, algorithm).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

from .engine import feasibility_exists
from .errors import InputError
from .model import ComponentPartition, Instance, Mapping, Request, validate_request
from .rng import SplitMix64

KINDS = ("uniform-random", "merge-chain", "split-probe")


@dataclass(frozen=True)
class Workload:
    instance: Instance
    kind: str
    length: int
    seed: int | None
    requests: tuple | None
    initial: Mapping | None
    generator_factory: object = None

    @property
    def is_static(self) -> bool:
        return self.requests is not None

    def make_generator(self):
        if self.is_static:
            return _StaticFeed(self.requests)
        return self.generator_factory(self.instance)


class _StaticFeed:
    def __init__(self, requests):
        self._iter = iter(requests)

    def next(self, mapping):
        return next(self._iter, None)


class _SplitProbeGenerator:
    """Always requests the lexicographically first currently split pair."""

    def __init__(self, instance: Instance):
        self.instance = instance

    def next(self, mapping):
        cluster0 = mapping.cluster_of(0)
        for v in range(1, self.instance.n):
            if mapping.cluster_of(v) != cluster0:
                return Request(0, v)
        return None


class _MergeChainGenerator:
    """Forces merges between the largest cross-cluster components.

    Keeps its own component partition in lockstep with the engine:
    every emitted request joins two distinct components in different
    clusters, so the engine's reaction (merge, or reset-and-reprocess
    when the merge cannot be hosted) is fully predictable from sizes.
    Feasible merges are preferred, largest combined size first; once
    none is feasible the largest infeasible pair forces a phase reset.
    """

    def __init__(self, instance: Instance):
        self.instance = instance
        self.partition = ComponentPartition(instance.n)

    def next(self, mapping):
        comps = [
            (members[0], len(members), mapping.cluster_of(members[0]))
            for members in self.partition.components().values()
        ]
        best = None
        for (m1, s1, c1), (m2, s2, c2) in combinations(comps, 2):
            if c1 == c2:
                continue
            others = [s for m, s, _ in comps if m not in (m1, m2)]
            feasible = feasibility_exists(others + [s1 + s2], self.instance)
            u, v = min(m1, m2), max(m1, m2)
            key = (0 if feasible else 1, -(s1 + s2), u, v)
            if best is None or key < best[0]:
                best = (key, u, v)
        if best is None:
            return None
        _, u, v = best
        self._mirror(u, v)
        return Request(u, v)

    def _mirror(self, u: int, v: int) -> None:
        part = self.partition
        merged = part.size_of(u) + part.size_of(v)
        ru, rv = part.find(u), part.find(v)
        sizes = [
            len(members)
            for root, members in part.components().items()
            if root not in (ru, rv)
        ]
        if feasibility_exists(sizes + [merged], self.instance):
            part.merge(u, v)
        else:
            part.reset()
            if self.instance.k >= 2:
                part.merge(u, v)


def _uniform_requests(instance: Instance, length: int, seed: int) -> tuple:
    rng = SplitMix64(seed)
    n = instance.n
    out = []
    for _ in range(length):
        i = rng.below(n)
        j = rng.below(n - 1)
        if j >= i:
            j += 1
        out.append(Request(min(i, j), max(i, j)))
    return tuple(out)


def generate_workload(kind: str, instance: Instance, length: int, seed: int) -> Workload:
    if kind not in KINDS:
        raise InputError(f"unknown workload kind {kind!r}, expected one of {KINDS}")
    if length < 0:
        raise InputError(f"workload length must be nonnegative, got {length}")
    if not isinstance(seed, int):
        raise InputError(f"seed must be an integer, got {type(seed).__name__}")
    if kind == "uniform-random":
        return Workload(
            instance=instance,
            kind=kind,
            length=length,
            seed=seed,
            requests=_uniform_requests(instance, length, seed),
            initial=None,
        )
    factory = _MergeChainGenerator if kind == "merge-chain" else _SplitProbeGenerator
    return Workload(
        instance=instance,
        kind=kind,
        length=length,
        seed=seed,
        requests=None,
        initial=None,
        generator_factory=factory,
    )


def load_workload(path) -> Workload:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read workload file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"workload file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("workload file must hold a JSON object")
    for key in ("k", "l"):
        if not isinstance(data.get(key), int):
            raise InputError(f"workload field {key!r} must be an integer")
    instance = Instance(data["k"], data["l"])
    raw = data.get("requests")
    if not isinstance(raw, list):
        raise InputError("workload field 'requests' must be a list of pairs")
    requests = []
    for entry in raw:
        if not (
            isinstance(entry, list)
            and len(entry) == 2
            and all(isinstance(x, int) for x in entry)
        ):
            raise InputError(f"malformed request entry {entry!r}")
        r = Request(entry[0], entry[1])
        validate_request(instance, r)
        requests.append(r)
    initial = None
    if data.get("initial") is not None:
        if not isinstance(data["initial"], list):
            raise InputError("workload field 'initial' must be a list of cluster ids")
        initial = Mapping(instance, data["initial"])
    return Workload(
        instance=instance,
        kind="static",
        length=len(requests),
        seed=None,
        requests=tuple(requests),
        initial=initial,
    )


def save_workload(workload: Workload, path) -> None:
    if not workload.is_static:
        raise InputError("only static workloads can be written to a file")
    data = {
        "k": workload.instance.k,
        "l": workload.instance.l,
        "requests": [[r.u, r.v] for r in workload.requests],
    }
    if workload.initial is not None:
        data["initial"] = workload.initial.as_list()
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
