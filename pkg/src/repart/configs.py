"""Cluster-configuration algebra.

A configuration of a cluster is the count vector c = (c_1, ..., c_k)
where c_i components of size i live in the cluster; a real cluster has
node demand nd(c) = sum_i i*c_i = k. During a remapping event the two
merge participants are treated as one virtual cluster of capacity 2k
(the "pseudo" configuration). The per-event matrix A has k rows and one
column per configuration, pseudo column last; censuses x, demands
u = A*x, and target censuses y (y >= 0, A*y = u, pseudo entry 0) are all
exact integer vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import InputError, InvariantViolation, ResourceLimitError

MAX_ENUMERATION_K = 12
DEFAULT_SEARCH_BUDGET = 5_000_000


def nd(counts) -> int:
    """Node demand of a count vector: sum of size * multiplicity."""
    return sum((i + 1) * c for i, c in enumerate(counts))


def revlex_key(vec):
    """Sort key realizing the fixed reverse-lexicographic (descending) order."""
    return tuple(-c for c in vec)


def _count_vectors(total, length):
    # all nonnegative vectors c with sum_i (i+1)*c_i == total
    out = []
    counts = [0] * length

    def rec(size, remaining):
        if size == 0:
            if remaining == 0:
                out.append(tuple(counts))
            return
        for c in range(remaining // size + 1):
            counts[size - 1] = c
            rec(size - 1, remaining - size * c)
        counts[size - 1] = 0

    rec(length, total)
    return out


def _check_k(k):
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    if k > MAX_ENUMERATION_K:
        raise ResourceLimitError(
            f"k={k} exceeds the enumeration guard ({MAX_ENUMERATION_K})"
        )


@lru_cache(maxsize=None)
def enumerate_configurations(k: int) -> tuple:
    """All configurations with nd == k, in reverse-lexicographic order."""
    _check_k(k)
    return tuple(sorted(_count_vectors(k, k), key=revlex_key))


@lru_cache(maxsize=None)
def pseudo_configurations(k: int) -> tuple:
    """All candidate pseudo configurations: length-k vectors with nd == 2k."""
    _check_k(k)
    return tuple(sorted(_count_vectors(2 * k, k), key=revlex_key))


@dataclass(frozen=True)
class ConfigSpace:
    k: int
    configurations: tuple
    _index: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {c: i for i, c in enumerate(self.configurations)}
        )

    def index_of(self, counts) -> int:
        try:
            return self._index[tuple(counts)]
        except KeyError:
            raise InvariantViolation(
                f"{tuple(counts)} is not a configuration for k={self.k}"
            ) from None


@lru_cache(maxsize=None)
def config_space(k: int) -> ConfigSpace:
    return ConfigSpace(k, enumerate_configurations(k))


def counts_from_sizes(sizes, k: int) -> tuple:
    """Component-size multiset -> count vector of length k."""
    counts = [0] * k
    for s in sizes:
        if not 1 <= s <= k:
            raise InputError(f"component size {s} outside 1..{k}")
        counts[s - 1] += 1
    return tuple(counts)


@dataclass(frozen=True)
class ConfigMatrix:
    """k rows, q columns; column j is the j-th configuration, pseudo last."""

    k: int
    columns: tuple

    @property
    def q(self) -> int:
        return len(self.columns)

    @property
    def pseudo_index(self) -> int:
        return self.q - 1

    @property
    def pseudo(self) -> tuple:
        return self.columns[-1]

    def row(self, i: int) -> tuple:
        return tuple(col[i] for col in self.columns)

    def rows(self) -> tuple:
        return tuple(self.row(i) for i in range(self.k))

    def mat_vec(self, vec) -> tuple:
        if len(vec) != self.q:
            raise InputError(f"vector length {len(vec)} != q={self.q}")
        out = [0] * self.k
        for coeff, col in zip(vec, self.columns):
            if coeff:
                for i in range(self.k):
                    out[i] += coeff * col[i]
        return tuple(out)


@lru_cache(maxsize=None)
def config_matrix(k: int, pseudo) -> ConfigMatrix:
    pseudo = tuple(pseudo)
    if len(pseudo) != k or any(c < 0 for c in pseudo):
        raise InputError(f"pseudo configuration {pseudo} malformed for k={k}")
    if nd(pseudo) != 2 * k:
        raise InputError(
            f"pseudo configuration {pseudo} has nd={nd(pseudo)}, expected {2 * k}"
        )
    return ConfigMatrix(k, enumerate_configurations(k) + (pseudo,))


def pseudo_configuration(residual_a, residual_b, merged_size: int, k: int) -> tuple:
    """Count vector of the virtual double-capacity cluster at a merge.

    residual_a/residual_b are the component sizes left in the two merge
    participants once the merging components are taken out; merged_size
    is the size of the freshly merged component.
    """
    if merged_size < 1:
        raise InputError(f"merged component size must be positive, got {merged_size}")
    if merged_size > k:
        raise InputError(
            f"merged component of size {merged_size} exceeds cluster capacity {k}"
        )
    counts = list(counts_from_sizes(list(residual_a) + list(residual_b), k))
    counts[merged_size - 1] += 1
    if nd(counts) != 2 * k:
        raise InvariantViolation(
            f"pseudo configuration {tuple(counts)} has nd={nd(counts)}, expected {2 * k}"
        )
    return tuple(counts)


def build_state(censuses, pseudo, space: ConfigSpace):
    """Census of the non-participant clusters + pseudo -> (x, u).

    x counts clusters per configuration with the pseudo coordinate set
    to one; u = A*x is the total component demand by size.
    """
    k = space.k
    q = len(space.configurations) + 1
    x = [0] * q
    for sizes in censuses:
        if sum(sizes) != k:
            raise InvariantViolation(f"cluster census {sizes} does not sum to k={k}")
        x[space.index_of(counts_from_sizes(sizes, k))] += 1
    x[-1] = 1
    matrix = config_matrix(k, tuple(pseudo))
    return tuple(x), matrix.mat_vec(x)


def is_valid_target(y, matrix: ConfigMatrix, u) -> bool:
    if len(y) != matrix.q:
        raise InputError(f"target length {len(y)} != q={matrix.q}")
    if any(c < 0 for c in y) or y[matrix.pseudo_index] != 0:
        return False
    return matrix.mat_vec(y) == tuple(u)


def _pack_counts(u, columns):
    # greedy-free exact cover: express u as a nonnegative integer
    # combination of columns, DFS over the largest size still uncovered
    if any(c < 0 for c in u):
        return None
    fail = set()

    def rec(rem):
        live = [i for i, r in enumerate(rem) if r > 0]
        if not live:
            return ()
        if rem in fail:
            return None
        s = live[-1]
        for j, col in enumerate(columns):
            if col[s] == 0:
                continue
            if any(c > r for c, r in zip(col, rem)):
                continue
            sub = rec(tuple(r - c for r, c in zip(rem, col)))
            if sub is not None:
                return (j,) + sub
        fail.add(rem)
        return None

    picks = rec(tuple(u))
    if picks is None:
        return None
    y = [0] * len(columns)
    for j in picks:
        y[j] += 1
    return tuple(y)


def solve_any_target(matrix: ConfigMatrix, u):
    """Some valid target census for demand u, or None if none exists.

    Deterministic: first solution found scanning configurations in their
    fixed order, largest uncovered component size first.
    """
    counts = _pack_counts(tuple(u), matrix.columns[: matrix.pseudo_index])
    if counts is None:
        return None
    return counts + (0,)


def demand_packable(u, k: int) -> bool:
    """True iff demand u is coverable by real cluster configurations."""
    return _pack_counts(tuple(u), enumerate_configurations(k)) is not None


def brute_force_min_target(x, matrix: ConfigMatrix, u, node_budget=DEFAULT_SEARCH_BUDGET):
    """Minimum-distance valid target by iterative deepening, or None.

    Searches w = x - y with pseudo coordinate 1, positive part <= x and
    A*w = 0, at exact L1 norm d = 3, 5, 7, ... Returns (y, d); ties at
    the minimal d resolve to the reverse-lexicographically smallest y.
    """
    q = matrix.q
    pi = matrix.pseudo_index
    x = tuple(x)
    if len(x) != q:
        raise InputError(f"state length {len(x)} != q={q}")
    if x[pi] != 1:
        raise InputError("state must have pseudo coordinate exactly 1")
    if matrix.mat_vec(x) != tuple(u):
        raise InputError("state x and demand u disagree (u must equal A*x)")
    any_y = solve_any_target(matrix, u)
    if any_y is None:
        return None
    cap = sum(abs(a - b) for a, b in zip(x, any_y))
    cols = matrix.columns
    k = matrix.k
    # suffix_max[j][i]: largest row-i entry among columns j..q-2
    suffix_max = [[0] * k for _ in range(q)]
    for j in range(pi - 1, -1, -1):
        for i in range(k):
            suffix_max[j][i] = max(suffix_max[j + 1][i], cols[j][i])
    budget = [node_budget]

    def search(d):
        sols = []
        w = [0] * q
        w[pi] = 1

        def rec(j, rem, partial):
            budget[0] -= 1
            if budget[0] < 0:
                raise ResourceLimitError(
                    f"brute-force target search exceeded {node_budget} nodes"
                )
            if j == pi:
                if rem == 0 and all(p == 0 for p in partial):
                    sols.append(tuple(w))
                return
            limit = suffix_max[j]
            for i in range(k):
                if abs(partial[i]) > rem * limit[i]:
                    return
            col = cols[j]
            hi = min(rem, x[j])
            for wj in range(-rem, hi + 1):
                w[j] = wj
                if wj:
                    nxt = tuple(p + wj * c for p, c in zip(partial, col))
                else:
                    nxt = partial
                rec(j + 1, rem - abs(wj), nxt)
            w[j] = 0

        rec(0, d - 1, cols[pi])
        return sols

    for d in range(3, cap + 1, 2):
        sols = search(d)
        if sols:
            ys = [tuple(a - b for a, b in zip(x, w)) for w in sols]
            return min(ys, key=revlex_key), d
    raise InvariantViolation("deepening passed the known-feasible distance cap")
