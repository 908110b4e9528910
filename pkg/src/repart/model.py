"""Problem instance, node-to-cluster mapping, communication components,
and exact cost accounting.

An instance has n = k * l nodes, l clusters, exactly k nodes per cluster.
Components are the connected components of the requests seen so far in
the current phase; between requests every component lives entirely
inside one cluster.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass, field

from .errors import InputError, InvariantViolation


@dataclass(frozen=True)
class Instance:
    """k nodes per cluster, l clusters."""

    k: int
    l: int

    def __post_init__(self):
        if self.k < 1:
            raise InputError(f"nodes per cluster must be >= 1, got {self.k}")
        if self.l < 2:
            raise InputError(f"cluster count must be >= 2, got {self.l}")

    @property
    def n(self) -> int:
        return self.k * self.l


@dataclass(frozen=True)
class Request:
    """One pairwise communication request between two distinct nodes."""

    u: int
    v: int

    def __post_init__(self):
        if self.u == self.v:
            raise InputError(f"request endpoints must differ, got ({self.u}, {self.v})")
        if self.u < 0 or self.v < 0:
            raise InputError(f"node ids must be nonnegative, got ({self.u}, {self.v})")


def validate_request(instance: Instance, request: Request) -> None:
    if request.u >= instance.n or request.v >= instance.n:
        raise InputError(
            f"request ({request.u}, {request.v}) out of range for n={instance.n}"
        )


class Mapping:
    """Assignment of nodes to clusters with exactly k nodes per cluster.

    move() performs a single unchecked reassignment; callers applying a
    batch of moves re-validate with is_valid() afterwards.
    """

    __slots__ = ("instance", "_assign")

    def __init__(self, instance: Instance, assignment):
        assign = list(assignment)
        if len(assign) != instance.n:
            raise InputError(
                f"mapping length {len(assign)} != n={instance.n}"
            )
        counts = [0] * instance.l
        for node, cluster in enumerate(assign):
            if not isinstance(cluster, int) or not 0 <= cluster < instance.l:
                raise InputError(f"node {node} mapped to invalid cluster {cluster!r}")
            counts[cluster] += 1
        if any(c != instance.k for c in counts):
            raise InputError(f"cluster sizes {counts} != {instance.k} everywhere")
        self.instance = instance
        self._assign = assign

    @classmethod
    def default(cls, instance: Instance) -> "Mapping":
        # node i starts in cluster i // k
        return cls(instance, [i // instance.k for i in range(instance.n)])

    def cluster_of(self, node: int) -> int:
        return self._assign[node]

    def nodes_in(self, cluster: int) -> list:
        return [i for i, c in enumerate(self._assign) if c == cluster]

    def move(self, node: int, cluster: int) -> None:
        self._assign[node] = cluster

    def as_list(self) -> list:
        return list(self._assign)

    def copy(self) -> "Mapping":
        return Mapping(self.instance, self._assign)

    def is_valid(self) -> bool:
        counts = [0] * self.instance.l
        for cluster in self._assign:
            if not 0 <= cluster < self.instance.l:
                return False
            counts[cluster] += 1
        return all(c == self.instance.k for c in counts)

    def __eq__(self, other):
        return isinstance(other, Mapping) and self._assign == other._assign

    def __repr__(self):
        return f"Mapping({self._assign})"


MergeOutcome = namedtuple("MergeOutcome", ["merged", "size"])


class ComponentPartition:
    """Union-find over nodes with deterministic root choice.

    Union by size; the larger component keeps its root, ties go to the
    smaller root id. Path compression does not change roots, so the
    partition evolution is reproducible.
    """

    def __init__(self, n: int):
        if n < 1:
            raise InputError(f"need at least one node, got {n}")
        self.n = n
        self._parent = list(range(n))
        self._size = [1] * n

    def reset(self) -> None:
        self._parent = list(range(self.n))
        self._size = [1] * self.n

    def find(self, u: int) -> int:
        if not 0 <= u < self.n:
            raise InputError(f"node id {u} out of range for n={self.n}")
        root = u
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[u] != root:
            self._parent[u], u = root, self._parent[u]
        return root

    def merge(self, u: int, v: int) -> MergeOutcome:
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return MergeOutcome(False, self._size[ru])
        sa, sb = self._size[ru], self._size[rv]
        if sa > sb or (sa == sb and ru < rv):
            keep, gone = ru, rv
        else:
            keep, gone = rv, ru
        self._parent[gone] = keep
        self._size[keep] = sa + sb
        return MergeOutcome(True, sa + sb)

    def size_of(self, u: int) -> int:
        return self._size[self.find(u)]

    @property
    def component_count(self) -> int:
        return sum(1 for i in range(self.n) if self._parent[i] == i)

    def components(self) -> dict:
        """root -> sorted member list, roots in ascending order."""
        out: dict = {}
        for node in range(self.n):
            out.setdefault(self.find(node), []).append(node)
        return dict(sorted(out.items()))

    def sizes(self) -> list:
        return sorted((len(m) for m in self.components().values()), reverse=True)

    def canonical(self) -> frozenset:
        return frozenset(frozenset(m) for m in self.components().values())

    def copy(self) -> "ComponentPartition":
        other = ComponentPartition(self.n)
        other._parent = list(self._parent)
        other._size = list(self._size)
        return other


@dataclass(frozen=True)
class SpanningComponent:
    root: int
    size: int
    clusters: tuple
    nodes: tuple


@dataclass(frozen=True)
class Census:
    """Per-cluster multisets of resident component sizes.

    A single component spanning exactly two clusters (mid-remap state)
    is excluded from the per-cluster lists and reported separately; its
    size plus the per-cluster sums add up to n.
    """

    per_cluster: tuple
    spanning: SpanningComponent | None


def component_size_census(partition: ComponentPartition, mapping: Mapping) -> Census:
    instance = mapping.instance
    per_cluster = [[] for _ in range(instance.l)]
    spanning = None
    for root, members in partition.components().items():
        clusters = sorted({mapping.cluster_of(m) for m in members})
        if len(clusters) == 1:
            per_cluster[clusters[0]].append(len(members))
        elif len(clusters) == 2:
            if spanning is not None:
                raise InvariantViolation(
                    f"two spanning components ({spanning.root} and {root})"
                )
            spanning = SpanningComponent(
                root, len(members), tuple(clusters), tuple(members)
            )
        else:
            raise InvariantViolation(
                f"component {root} spans {len(clusters)} clusters: {clusters}"
            )
    total = sum(sum(sizes) for sizes in per_cluster)
    if spanning is not None:
        total += spanning.size
    if total != instance.n:
        raise InvariantViolation(f"census sizes sum to {total}, expected {instance.n}")
    return Census(
        tuple(tuple(sorted(sizes, reverse=True)) for sizes in per_cluster),
        spanning,
    )


@dataclass
class PhaseRow:
    phase: int
    communication: int = 0
    migration: int = 0
    remap_events: int = 0
    max_affected: int = 0

    @property
    def cost(self) -> int:
        return self.communication + self.migration


class CostLedger:
    """Exact per-phase cost accounting; totals are sums over rows."""

    def __init__(self):
        self.rows = [PhaseRow(0)]

    @property
    def current(self) -> PhaseRow:
        return self.rows[-1]

    def begin_phase(self, phase: int) -> None:
        if phase != len(self.rows):
            raise InvariantViolation(
                f"phase {phase} opened out of order (have {len(self.rows)} rows)"
            )
        self.rows.append(PhaseRow(phase))

    def charge_communication(self, amount: int = 1) -> None:
        if amount < 0:
            raise InvariantViolation("negative communication charge")
        self.current.communication += amount

    def charge_migration(self, moved_nodes: int) -> None:
        if moved_nodes < 0:
            raise InvariantViolation("negative migration charge")
        self.current.migration += moved_nodes

    def record_remap(self, affected: int) -> None:
        row = self.current
        row.remap_events += 1
        row.max_affected = max(row.max_affected, affected)

    @property
    def communication(self) -> int:
        return sum(r.communication for r in self.rows)

    @property
    def migration(self) -> int:
        return sum(r.migration for r in self.rows)

    @property
    def total(self) -> int:
        return self.communication + self.migration
