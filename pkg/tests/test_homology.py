import itertools

import pytest
from hypothesis import given, settings, strategies as st

from cyclepair.corpus import bouquet, cycle, theta, wedge_cycles
from cyclepair.homology import (boundary_matrix, concyclicity, coords_of_chain,
                                cycle_basis, cyclic_orientation,
                                edge_functional, inner_product, jacobian,
                                simple_cycle_subgraphs,
                                two_isomorphism_from_edge_bijection)
from cyclepair.multigraph import (HasBridge, Multigraph, contract, delete,
                                  is_bridgeless, is_connected, relabel)
from cyclepair.truncated_algebra import vertex_join_parts
from cyclepair import _intmat


def brute_force_spanning_trees(g):
    """Oracle: count spanning trees by exhaustive edge-subset enumeration."""
    n = g.vertex_count
    if n == 1:
        return 1
    count = 0
    for subset in itertools.combinations(range(g.edge_count), n - 1):
        if is_connected(Multigraph(n, tuple(g.edges[e] for e in subset))):
            count += 1
    return count


def test_boundary_of_loop_is_zero():
    assert boundary_matrix(Multigraph(1, ((0, 0),))) == [[0]]


def test_boundary_of_single_edge():
    mat = boundary_matrix(Multigraph(2, ((0, 1),)))
    assert [row[0] for row in mat] == [-1, 1]


def test_boundary_columns_sum_to_zero(c3):
    mat = boundary_matrix(c3)
    for e in range(3):
        col = [row[e] for row in mat]
        assert sorted(col) == [-1, 0, 1] and sum(col) == 0


def test_cycle_basis_c3(c3):
    cb = cycle_basis(c3)
    assert cb.genus == 1 and cb.gram == ((3,),)


def test_cycle_basis_theta(theta3):
    cb = cycle_basis(theta3)
    # deterministic BFS output; equals the spec's [[2,-1],[-1,2]] up to a
    # basis sign flip (derived by expanding the fundamental cycles by hand)
    assert cb.gram == ((2, 1), (1, 2))
    assert cb.basis == ((-1, 1, 0), (-1, 0, 1))


def test_cycle_basis_fig8(fig8):
    assert cycle_basis(fig8).gram == ((1, 0), (0, 1))


def test_basis_lies_in_boundary_kernel(small_corpus):
    for g in small_corpus:
        bmat = boundary_matrix(g)
        for chain in cycle_basis(g).basis:
            assert all(sum(r[e] * chain[e] for e in range(g.edge_count)) == 0
                       for r in bmat)
        assert cycle_basis(g).genus == g.edge_count - g.vertex_count + 1


def test_inner_product_edges():
    assert inner_product((1, 0, 0), (1, 0, 0)) == 1
    assert inner_product((1, 0, 0), (0, 1, 0)) == 0
    assert inner_product((1, -1, 0), (0, 1, -1)) == -1


def test_inner_product_length_mismatch():
    with pytest.raises(Exception):
        inner_product((1, 0), (1, 0, 0))


def test_concyclicity_c3_single_class(c3):
    parts = concyclicity(c3)
    assert parts.classes == ((0, 1, 2),)


def test_concyclicity_theta_singletons(theta3):
    parts = concyclicity(theta3)
    assert parts.classes == ((0,), (1,), (2,))
    assert len(set(parts.functionals)) == 3


def test_concyclicity_wedge_two_classes(c3_wedge_c4):
    parts = concyclicity(c3_wedge_c4)
    assert tuple(sorted(map(len, parts.classes))) == (3, 4)


def test_concyclicity_rejects_bridge():
    # two digons joined by a bridge edge
    g = Multigraph(4, ((0, 1), (1, 0), (1, 2), (2, 3), (3, 2)))
    assert not is_bridgeless(g)
    with pytest.raises(HasBridge):
        concyclicity(g)


def test_class_functionals_primitive(small_corpus):
    import math
    for g in small_corpus:
        if g.edge_count == 0:
            continue
        for f in concyclicity(g).functionals:
            assert math.gcd(*f) == 1 if len(f) > 1 else abs(f[0]) == 1


def test_cyclic_orientation_alternating_c3():
    g = Multigraph(3, ((0, 1), (2, 1), (2, 0)))
    oriented, signs = cyclic_orientation(g)
    assert signs.count(-1) == 2
    cb = cycle_basis(oriented)
    f = [edge_functional(cb, e) for e in range(3)]
    assert f[0] == f[1] == f[2]


def test_cyclic_orientation_idempotent(small_corpus):
    for g in small_corpus:
        _, signs = cyclic_orientation(g)
        assert all(s == 1 for s in signs)  # corpus fixture is pre-oriented


def test_cyclic_orientation_fig8_identity(fig8):
    _, signs = cyclic_orientation(fig8)
    assert signs == (1, 1)


def test_class_members_share_functional_after_orientation(small_corpus):
    for g in small_corpus:
        if g.edge_count == 0:
            continue
        cb = cycle_basis(g)
        for cls in concyclicity(g).classes:
            fs = {edge_functional(cb, e) for e in cls}
            assert len(fs) == 1


def test_jacobian_examples(c3, theta3, fig8):
    assert jacobian(cycle_basis(c3)) == (3,)
    assert jacobian(cycle_basis(theta3)) == (3,)
    assert jacobian(cycle_basis(fig8)) == ()


def test_jacobian_order_equals_tree_count(small_corpus):
    for g in small_corpus:
        cb = cycle_basis(g)
        det = _intmat.mat_det([list(r) for r in cb.gram])
        assert det == brute_force_spanning_trees(g)
        order = 1
        for f in jacobian(cb):
            order *= f
        assert order == det


def test_two_isomorphism_identity(theta3):
    mat = two_isomorphism_from_edge_bijection(theta3, theta3, (0, 1, 2))
    assert mat == ((1, 0), (0, 1))


def test_two_isomorphism_theta_permuted(theta3):
    mat = two_isomorphism_from_edge_bijection(theta3, theta3, (1, 0, 2))
    assert mat is not None
    m = [list(r) for r in mat]
    gram = [list(r) for r in cycle_basis(theta3).gram]
    assert _intmat.mat_mul(_intmat.transpose(m), _intmat.mat_mul(gram, m)) == gram


def test_two_isomorphism_any_c4_bijection(c4):
    # any bijection of a single concyclicity class preserves the class sum
    for perm in itertools.permutations(range(4)):
        assert two_isomorphism_from_edge_bijection(c4, c4, perm) is not None


def test_representing_map_independence(c3_wedge_c4):
    """Different bijections representing the same class bijection induce the
    same isometry."""
    g = c3_wedge_c4
    parts = concyclicity(g)
    mats = set()
    for p1 in itertools.permutations(parts.classes[0]):
        phi = list(range(g.edge_count))
        for src, dst in zip(parts.classes[0], p1):
            phi[src] = dst
        mat = two_isomorphism_from_edge_bijection(g, g, tuple(phi))
        assert mat is not None
        mats.add(mat)
    assert len(mats) == 1


def test_simple_cycles_found(c3, theta3):
    assert len(simple_cycle_subgraphs(c3)) == 1
    assert len(simple_cycle_subgraphs(theta3)) == 3


def test_coords_of_chain_roundtrip(small_corpus):
    for g in small_corpus[:10]:
        cb = cycle_basis(g)
        for chain in cb.basis:
            assert coords_of_chain(cb, chain) is not None
        if g.edge_count and cb.genus:
            nontree = [e for e in range(g.edge_count) if e not in cb.tree_edges]
            bad = [0] * g.edge_count
            bad[nontree[0]] = 1  # a bare non-tree edge is not a cycle...
            if tuple(bad) not in cb.basis:  # ...unless it is a loop
                assert coords_of_chain(cb, bad) is None
