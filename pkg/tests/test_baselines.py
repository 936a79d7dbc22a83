from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given

from reachidx.baselines import (
    CapacityError,
    ReachMatrix,
    bfs_query,
    build_matrix,
    matrix_query,
    reachability_rho,
)
from reachidx.graph import DiGraph

from conftest import brute_reach_sets, dags, diamond, path_graph


def test_matrix_diamond_queries():
    mx = build_matrix(diamond())
    assert matrix_query(mx, 0, 3)
    assert matrix_query(mx, 0, 1) and matrix_query(mx, 0, 2)
    assert not matrix_query(mx, 1, 2)
    assert not matrix_query(mx, 3, 0)
    assert matrix_query(mx, 2, 2)  # reflexive


def test_matrix_count_positive_excludes_diagonal():
    assert build_matrix(diamond()).count_positive() == 5
    assert build_matrix(path_graph(4)).count_positive() == 6
    assert build_matrix(DiGraph.from_edges(3, [])).count_positive() == 0


def test_rho_frozen_values():
    assert reachability_rho(build_matrix(diamond())) == pytest.approx(5 / 12)
    assert reachability_rho(build_matrix(path_graph(4))) == pytest.approx(0.5)
    assert reachability_rho(build_matrix(DiGraph.from_edges(2, []))) == 0.0


def test_rho_rejects_single_vertex():
    with pytest.raises(ValueError):
        reachability_rho(build_matrix(DiGraph.from_edges(1, [])))


def test_capacity_cap_enforced():
    g = path_graph(64)
    with pytest.raises(CapacityError):
        build_matrix(g, cap_bytes=64)  # needs 64*64 bits = 512 bytes
    build_matrix(g, cap_bytes=512)


def test_to_dense_matches_query():
    mx = build_matrix(diamond())
    d = mx.to_dense()
    assert d.dtype == np.bool_
    assert d.shape == (4, 4)
    for s in range(4):
        for t in range(4):
            assert d[s, t] == matrix_query(mx, s, t)


@given(dags(max_n=14))
def test_matrix_matches_brute_closure(g):
    reach = brute_reach_sets(g)
    mx = build_matrix(g)
    for s in range(g.n):
        for t in range(g.n):
            assert matrix_query(mx, s, t) == (t in reach[s] or s == t)


@given(dags(max_n=14))
def test_bfs_matches_matrix(g):
    mx = build_matrix(g)
    for s in range(g.n):
        for t in range(g.n):
            assert bfs_query(g, s, t) == matrix_query(mx, s, t)


@given(dags(max_n=14, min_n=2))
def test_rho_at_most_half_on_dags(g):
    assert reachability_rho(build_matrix(g)) <= 0.5 + 1e-12


@given(dags(max_n=12))
def test_count_positive_definition(g):
    mx = build_matrix(g)
    total = sum(
        1 for s in range(g.n) for t in range(g.n) if s != t and matrix_query(mx, s, t)
    )
    assert mx.count_positive() == total


def test_reach_matrix_direct_construction():
    # row bit t of rows[s] encodes s -> t; diagonal always set by build
    mx = ReachMatrix(2, [0b11, 0b10])
    assert mx.query(0, 1) and not mx.query(1, 0)
