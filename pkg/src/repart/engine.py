"""Online engine: phases, component maintenance, minimal remapping.

The engine owns a mapping of n = l*k nodes into l clusters of exactly k
and a partition of nodes into components grown by requests. Between
requests every component lies inside one cluster. Serving (u, v):

* same component: free, nothing changes;
* different components, same cluster: merge, no cost;
* different clusters: pay 1 communication, merge, then either remap
  nodes so the merged component is co-located again (paying 1 per moved
  node) or, when no valid mapping can host the merged component family,
  reset all components to singletons and reprocess the request in the
  fresh phase (communication is not charged twice).

Remapping minimizes the number of clusters whose content changes. The
target census is found by scanning the Graver basis of the event's
configuration matrix for the cheapest applicable move; an iterative
deepening search over raw census vectors stands in above the basis size
guard. comp-any skips minimization and takes any valid target.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum

from .configs import (
    DEFAULT_SEARCH_BUDGET,
    brute_force_min_target,
    build_state,
    config_matrix,
    config_space,
    counts_from_sizes,
    demand_packable,
    is_valid_target,
    pseudo_configuration,
    revlex_key,
    solve_any_target,
)
from .errors import InputError, InvariantViolation
from .graver import GRAVER_K_GUARD, graver_basis_for
from .model import (
    ComponentPartition,
    CostLedger,
    Instance,
    Mapping,
    Request,
    component_size_census,
    validate_request,
)

ALGORITHMS = ("comp-min", "comp-any")


class StepTag(Enum):
    """Serve-case taxonomy.

    PAID_INTRA_COMPONENT_MERGE is declared for completeness but never
    emitted: endpoints of one component always share a cluster while
    the component invariant holds, which makes the case unreachable.
    """

    FREE = "free"
    PAID_INTRA_COMPONENT_MERGE = "paid-intra-component-merge"
    PAID_MERGE_SAME_CLUSTER = "paid-merge-same-cluster"
    PAID_REMAP = "paid-remap"
    PHASE_RESET = "phase-reset"


def feasibility_exists(component_sizes, instance: Instance) -> bool:
    """Can this component-size multiset be mapped validly at all?

    True iff no component exceeds k and the sizes pack into l bins of
    exactly k. Depends only on sizes, not on current placement.
    """
    sizes = list(component_sizes)
    if sum(sizes) != instance.n:
        raise InputError(
            f"component sizes sum to {sum(sizes)}, expected n={instance.n}"
        )
    if any(s < 1 for s in sizes):
        raise InputError("component sizes must be positive")
    if max(sizes) > instance.k:
        return False
    demand = [0] * instance.k
    for s in sizes:
        demand[s - 1] += 1
    return demand_packable(tuple(demand), instance.k)


def graver_candidates(basis, x) -> list:
    """Basis elements applicable at state x that resolve the pseudo."""
    pi = len(x) - 1
    return [
        g
        for g in basis
        if g[pi] == 1 and all(gi <= xi for gi, xi in zip(g, x))
    ]


def graver_min_move(basis, x):
    """Cheapest applicable basis move, or None.

    Minimizes the one-norm; ties go to the reverse-lexicographically
    smallest element.
    """
    cands = graver_candidates(basis, x)
    if not cands:
        return None
    return min(cands, key=lambda g: (sum(abs(c) for c in g), revlex_key(g)))


@dataclass(frozen=True)
class RemapPlan:
    pseudo: tuple
    x: tuple
    y: tuple
    g: tuple | None
    distance: int
    affected: tuple
    placement: tuple
    moves: tuple

    @property
    def affected_count(self) -> int:
        return len(self.affected)


@dataclass(frozen=True)
class RemapRecord:
    """Snapshot of one remap event, kept for after-the-fact auditing."""

    phase: int
    request: Request
    pseudo: tuple
    x: tuple
    u: tuple
    y: tuple
    distance: int
    affected: tuple
    moves: tuple
    mapping_before: tuple
    components: tuple


@dataclass(frozen=True)
class StepOutcome:
    tag: StepTag
    request: Request
    phase: int
    communication: int = 0
    plan: RemapPlan | None = None
    reprocess: "StepOutcome | None" = None

    @property
    def migration(self) -> int:
        own = 0 if self.plan is None else len(self.plan.moves)
        inner = 0 if self.reprocess is None else self.reprocess.migration
        return own + inner


class Engine:
    """One online run over a fixed instance; single-threaded."""

    def __init__(
        self,
        instance: Instance,
        initial: Mapping | None = None,
        algorithm: str = "comp-min",
        node_budget: int = DEFAULT_SEARCH_BUDGET,
    ):
        if algorithm not in ALGORITHMS:
            raise InputError(
                f"unknown algorithm {algorithm!r}, expected one of {ALGORITHMS}"
            )
        if initial is not None and initial.instance != instance:
            raise InputError("initial mapping built for a different instance")
        self.instance = instance
        self.algorithm = algorithm
        self.node_budget = node_budget
        self.mapping = initial.copy() if initial is not None else Mapping.default(instance)
        self.partition = ComponentPartition(instance.n)
        self.ledger = CostLedger()
        self.phase = 0
        self.completed_phases: list = []
        self._phase_start = 0
        self.requests_served = 0
        self.event_log: list = []
        self.remap_records: list = []
        self.affected_histogram: Counter = Counter()
        self.pseudos_used: set = set()
        self.f_obs = 0

    def phase_ranges(self) -> list:
        """Completed phase request-index ranges plus the open phase.

        A reset's triggering request belongs to both the phase it ended
        and the phase it started (it is reprocessed in the new one), so
        consecutive ranges overlap by one index.
        """
        return self.completed_phases + [(self._phase_start, self.requests_served)]

    def serve(self, request: Request) -> StepOutcome:
        validate_request(self.instance, request)
        index = self.requests_served
        outcome = self._serve_case(request, index, reprocessed=False)
        self.requests_served = index + 1
        self._check_invariants()
        return outcome

    def serve_all(self, requests) -> list:
        return [self.serve(r) for r in requests]

    # -- serve internals -------------------------------------------------

    def _serve_case(self, request: Request, index: int, reprocessed: bool):
        u, v = request.u, request.v
        if self.partition.find(u) == self.partition.find(v):
            return self._emit(StepTag.FREE, request, comm=0)
        cu = self.mapping.cluster_of(u)
        cv = self.mapping.cluster_of(v)
        if cu == cv:
            self.partition.merge(u, v)
            return self._emit(StepTag.PAID_MERGE_SAME_CLUSTER, request, comm=0)

        comm = 0 if reprocessed else 1
        if comm:
            self.ledger.charge_communication(1)
        merged_size = self.partition.size_of(u) + self.partition.size_of(v)
        sizes = self._sizes_after_merge(u, v, merged_size)
        if not feasibility_exists(sizes, self.instance):
            if reprocessed:
                # second failure in a row (k=1 only): drop the merge and
                # leave the fresh phase as singletons
                return None
            return self._reset_and_reprocess(request, index)

        self.partition.merge(u, v)
        plan = self._build_plan()
        self._apply_plan(plan, request)
        return self._emit(StepTag.PAID_REMAP, request, comm=comm, plan=plan)

    def _sizes_after_merge(self, u: int, v: int, merged_size: int) -> list:
        ru, rv = self.partition.find(u), self.partition.find(v)
        sizes = [
            len(members)
            for root, members in self.partition.components().items()
            if root not in (ru, rv)
        ]
        sizes.append(merged_size)
        return sizes

    def _reset_and_reprocess(self, request: Request, index: int) -> StepOutcome:
        old_phase = self.phase
        self.completed_phases.append((self._phase_start, index + 1))
        self.partition.reset()
        self.phase += 1
        self.ledger.begin_phase(self.phase)
        self._phase_start = index
        self._log(old_phase, request, StepTag.PHASE_RESET, comm=1, plan=None)
        inner = self._serve_case(request, index, reprocessed=True)
        return StepOutcome(
            tag=StepTag.PHASE_RESET,
            request=request,
            phase=old_phase,
            communication=1,
            plan=None,
            reprocess=inner,
        )

    def _emit(self, tag: StepTag, request: Request, comm: int, plan=None):
        self._log(self.phase, request, tag, comm, plan)
        return StepOutcome(
            tag=tag, request=request, phase=self.phase, communication=comm, plan=plan
        )

    def _log(self, phase: int, request: Request, tag: StepTag, comm: int, plan):
        self.event_log.append(
            {
                "phase": phase,
                "request": [request.u, request.v],
                "outcome": tag.value,
                "comm": comm,
                "moves": 0 if plan is None else len(plan.moves),
                "affected": 0 if plan is None else len(plan.affected),
                "g_norm": None if plan is None else plan.distance,
            }
        )

    # -- remap planning --------------------------------------------------

    def _build_plan(self) -> RemapPlan:
        instance = self.instance
        k = instance.k
        census = component_size_census(self.partition, self.mapping)
        span = census.spanning
        if span is None:
            raise InvariantViolation("remap planning without a spanning component")
        ca, cb = span.clusters
        pseudo = pseudo_configuration(
            census.per_cluster[ca], census.per_cluster[cb], span.size, k
        )
        space = config_space(k)
        others = [
            census.per_cluster[j] for j in range(instance.l) if j not in (ca, cb)
        ]
        x, u = build_state(others, pseudo, space)
        matrix = config_matrix(k, pseudo)

        g = None
        if self.algorithm == "comp-any":
            y = solve_any_target(matrix, u)
            if y is None:
                raise InvariantViolation("feasible event lost its valid target")
        elif k <= GRAVER_K_GUARD:
            basis = graver_basis_for(k, pseudo)
            g = graver_min_move(basis, x)
            if g is None:
                raise InvariantViolation(
                    "feasible event with no applicable basis move"
                )
            y = tuple(a - b for a, b in zip(x, g))
        else:
            found = brute_force_min_target(x, matrix, u, self.node_budget)
            if found is None:
                raise InvariantViolation("feasible event lost its valid target")
            y = found[0]
        if not is_valid_target(y, matrix, u):
            raise InvariantViolation(f"planned target {y} is not valid")
        distance = sum(abs(a - b) for a, b in zip(x, y))
        affected, placement, moves = self._realize(census, span, x, y, space)
        if len(affected) != (distance + 1) // 2:
            raise InvariantViolation(
                f"{len(affected)} affected clusters, expected {(distance + 1) // 2}"
            )
        return RemapPlan(
            pseudo=pseudo,
            x=x,
            y=y,
            g=g,
            distance=distance,
            affected=tuple(affected),
            placement=tuple(sorted(placement.items())),
            moves=tuple(moves),
        )

    def _realize(self, census, span, x, y, space):
        """Concrete moves for target census y.

        Keeps min(x_c, y_c) lowest-id clusters per configuration
        untouched; the two merge participants are always affected. Each
        affected cluster greedily takes the remaining target
        configuration under which it retains the largest total size of
        whole components; everything unretained is pooled and placed
        into leftover capacity, larger components first.
        """
        instance = self.instance
        k = instance.k
        ca, cb = span.clusters
        n_real = len(space.configurations)

        cfg_of = {}
        for j in range(instance.l):
            if j in (ca, cb):
                continue
            cfg_of[j] = space.index_of(counts_from_sizes(census.per_cluster[j], k))
        quota = {c: min(x[c], y[c]) for c in range(n_real)}
        kept = set()
        for j in sorted(cfg_of):
            if quota[cfg_of[j]] > 0:
                quota[cfg_of[j]] -= 1
                kept.add(j)
        affected = sorted((set(cfg_of) - kept) | {ca, cb})
        slots = []
        for c in range(n_real):
            slots.extend([c] * (y[c] - min(x[c], y[c])))
        if len(slots) != len(affected):
            raise InvariantViolation(
                f"{len(slots)} open slots for {len(affected)} affected clusters"
            )

        # pool: whole components living in affected clusters, plus the
        # spanning component (a retention candidate in both participants)
        members_of = self.partition.components()
        pool = {}
        by_cluster = {j: [] for j in affected}
        for root, members in members_of.items():
            if root == span.root:
                continue
            home = self.mapping.cluster_of(members[0])
            if home in by_cluster:
                pool[root] = (len(members), tuple(members))
                by_cluster[home].append(root)
        pool[span.root] = (span.size, span.nodes)

        placed = {}
        capacity = {}
        remaining = list(slots)
        for j in affected:
            scores = []
            candidates = list(by_cluster[j])
            if span.root not in placed and j in (ca, cb):
                candidates.append(span.root)
            resident = Counter(pool[r][0] for r in candidates)
            best_at, best_score = 0, -1
            for at, c in enumerate(remaining):
                cfg = space.configurations[c]
                score = sum(
                    s * min(resident[s], cfg[s - 1]) for s in range(1, k + 1)
                )
                if score > best_score:
                    best_at, best_score = at, score
            chosen = remaining.pop(best_at)
            cfg = space.configurations[chosen]
            capacity[j] = [0] + list(cfg)  # capacity[s] for sizes 1..k
            # retain the candidates with the most nodes already here
            def here(root):
                size, nodes = pool[root]
                return sum(1 for nd in nodes if self.mapping.cluster_of(nd) == j)

            for root in sorted(candidates, key=lambda r: (-here(r), r)):
                size = pool[root][0]
                if capacity[j][size] > 0:
                    capacity[j][size] -= 1
                    placed[root] = j

        leftovers = [r for r in pool if r not in placed]
        leftovers.sort(key=lambda r: (-pool[r][0], r))
        for root in leftovers:
            size = pool[root][0]
            target = next((j for j in affected if capacity[j][size] > 0), None)
            if target is None:
                raise InvariantViolation(
                    f"no capacity left for a size-{size} component"
                )
            capacity[target][size] -= 1
            placed[root] = target

        moves = []
        for root, target in placed.items():
            for node in pool[root][1]:
                if self.mapping.cluster_of(node) != target:
                    moves.append((node, target))
        moves.sort()
        return affected, placed, moves

    def _apply_plan(self, plan: RemapPlan, request: Request) -> None:
        record = RemapRecord(
            phase=self.phase,
            request=request,
            pseudo=plan.pseudo,
            x=plan.x,
            u=config_matrix(self.instance.k, plan.pseudo).mat_vec(plan.x),
            y=plan.y,
            distance=plan.distance,
            affected=plan.affected,
            moves=plan.moves,
            mapping_before=tuple(self.mapping.as_list()),
            components=tuple(
                tuple(m) for m in self.partition.components().values()
            ),
        )
        for node, cluster in plan.moves:
            self.mapping.move(node, cluster)
        self.ledger.charge_migration(len(plan.moves))
        self.ledger.record_remap(len(plan.affected))
        self.remap_records.append(record)
        self.affected_histogram[len(plan.affected)] += 1
        self.pseudos_used.add(plan.pseudo)
        self.f_obs = max(self.f_obs, len(plan.affected))

    def _check_invariants(self) -> None:
        if not self.mapping.is_valid():
            raise InvariantViolation("mapping lost the exactly-k-per-cluster shape")
        census = component_size_census(self.partition, self.mapping)
        if census.spanning is not None:
            raise InvariantViolation(
                f"component {census.spanning.root} spans clusters between requests"
            )
