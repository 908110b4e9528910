"""Tests for configuration enumeration, state vectors, and target search.

Expected counts come from the independent recursive partition counter in
repart.verify, which was written before this module and frozen here.
"""

import pytest

from repart.configs import (
    brute_force_min_target,
    build_state,
    config_matrix,
    config_space,
    counts_from_sizes,
    demand_packable,
    enumerate_configurations,
    is_valid_target,
    nd,
    pseudo_configuration,
    pseudo_configurations,
    solve_any_target,
)
from repart.errors import InputError, InvariantViolation, ResourceLimitError
from repart.verify import partition_count, random_remap_states

# Frozen from the oracle: partition_count(k) for k = 1..10.
PARTITION_COUNTS = [1, 2, 3, 5, 7, 11, 15, 22, 30, 42]


def test_configuration_counts_match_partition_oracle():
    for k in range(1, 11):
        got = len(enumerate_configurations(k))
        assert got == partition_count(k)
        assert got == PARTITION_COUNTS[k - 1]


def test_configurations_k1_and_k2():
    assert enumerate_configurations(1) == ((1,),)
    assert enumerate_configurations(2) == ((2, 0), (0, 1))
    assert len(enumerate_configurations(4)) == 5


def test_every_configuration_demands_exactly_k():
    for k in range(1, 8):
        for c in enumerate_configurations(k):
            assert nd(c) == k
        for p in pseudo_configurations(k):
            assert nd(p) == 2 * k


def test_nd_examples():
    assert nd((2, 0)) == 2
    assert nd((0, 0, 1)) == 3
    assert nd((2, 1)) == 4


def test_counts_from_sizes():
    assert counts_from_sizes([1, 1, 2], 2) == (2, 1)
    assert counts_from_sizes([3], 3) == (0, 0, 1)
    assert counts_from_sizes([], 2) == (0, 0)


def test_pseudo_configuration_from_residuals():
    # two clusters of singletons, one singleton from each merged into a pair
    assert pseudo_configuration((1,), (1,), 2, 2) == (2, 1)
    assert pseudo_configuration((1, 1), (1,), 3, 3) == (3, 0, 1)


def test_pseudo_configuration_rejects_oversized_merge():
    with pytest.raises(InputError):
        pseudo_configuration((), (), 4, 2)


def test_config_matrix_layout():
    matrix = config_matrix(2, (2, 1))
    assert matrix.q == 3
    assert matrix.pseudo_index == 2
    assert matrix.rows() == ((2, 0, 2), (0, 1, 1))
    assert matrix.mat_vec((0, 1, 1)) == (2, 2)


def test_config_matrix_rejects_non_pseudo_column():
    with pytest.raises(InputError):
        config_matrix(2, (2, 0))


# Worked states used below: E1 is k=2, l=3 with one untouched cluster
# holding a size-2 component; E2 is k=2, l=2 with no untouched cluster.
E1_MATRIX = config_matrix(2, (2, 1))
E1_X = (0, 1, 1)
E1_U = (2, 2)
E2_X = (0, 0, 1)
E2_U = (2, 1)


def test_build_state_with_untouched_cluster():
    space = config_space(2)
    x, u = build_state([[2]], (2, 1), space)
    assert x == E1_X
    assert u == E1_U


def test_build_state_no_untouched_clusters():
    space = config_space(2)
    x, u = build_state([], (2, 1), space)
    assert x == E2_X
    assert u == E2_U


def test_build_state_demand_totals_lk():
    space = config_space(3)
    x, u = build_state([[3], [1, 1, 1]], (2, 2, 0), space)
    clusters = sum(x) + 1
    assert x[-1] == 1
    assert nd(u) == clusters * 3


def test_build_state_rejects_unknown_census():
    space = config_space(2)
    with pytest.raises(InvariantViolation):
        build_state([[1]], (2, 1), space)


def test_is_valid_target_examples():
    assert is_valid_target((1, 2, 0), E1_MATRIX, E1_U)
    assert not is_valid_target((0, 2, 0), E1_MATRIX, E1_U)
    # nonzero pseudo coordinate disqualifies even when demand matches
    assert E1_MATRIX.mat_vec((0, 1, 1)) == E1_U
    assert not is_valid_target((0, 1, 1), E1_MATRIX, E1_U)


def test_solve_any_target_unique_solution():
    assert solve_any_target(E1_MATRIX, E1_U) == (1, 2, 0)


def test_solve_any_target_infeasible_demand():
    matrix = config_matrix(3, pseudo_configurations(3)[0])
    # three size-2 components cannot fill two capacity-3 clusters
    assert solve_any_target(matrix, (0, 3, 0)) is None


def test_solve_any_target_scaled_column():
    matrix = config_matrix(3, pseudo_configurations(3)[0])
    for c in enumerate_configurations(3):
        u = tuple(4 * entry for entry in c)
        y = solve_any_target(matrix, u)
        assert y is not None
        assert is_valid_target(y, matrix, u)


def test_demand_packable():
    assert demand_packable((2, 2), 2)
    assert not demand_packable((0, 3, 0), 3)


def test_brute_force_min_target_worked_states():
    assert brute_force_min_target(E1_X, E1_MATRIX, E1_U) == ((1, 2, 0), 3)
    assert brute_force_min_target(E2_X, E1_MATRIX, E2_U) == ((1, 1, 0), 3)


def test_brute_force_min_target_infeasible():
    matrix = config_matrix(3, (0, 3, 0))
    x = (0, 0, 0, 1)
    u = matrix.mat_vec(x)
    assert u == (0, 3, 0)
    assert demand_packable(u, 3) is False
    assert brute_force_min_target(x, matrix, u) is None


def test_brute_force_min_target_checks_state():
    with pytest.raises(InputError):
        brute_force_min_target((0, 1, 0), E1_MATRIX, E1_U)
    with pytest.raises(InputError):
        brute_force_min_target(E1_X, E1_MATRIX, (9, 9))


def test_brute_force_min_target_budget_guard():
    with pytest.raises(ResourceLimitError):
        brute_force_min_target(E1_X, E1_MATRIX, E1_U, node_budget=1)


def test_targets_have_norm_l_and_odd_distance():
    """‖y‖₁ = cluster count and ‖x − y‖₁ is odd and at least 3."""
    for k in range(1, 5):
        for pseudo, x, u in random_remap_states(k, l_max=6, count=40, seed=97 + k):
            matrix = config_matrix(k, pseudo)
            l = sum(x) + 1
            found = brute_force_min_target(x, matrix, u)
            if found is None:
                assert solve_any_target(matrix, u) is None
                continue
            y, d = found
            assert sum(y) == l
            assert d == sum(abs(a - b) for a, b in zip(x, y))
            assert d % 2 == 1
            assert d >= 3
            any_y = solve_any_target(matrix, u)
            assert any_y is not None
            assert sum(any_y) == l
