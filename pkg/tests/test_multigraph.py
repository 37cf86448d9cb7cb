import random

import pytest
from hypothesis import given, settings, strategies as st

from cyclepair.corpus import bouquet, cycle, theta, wedge_cycles
from cyclepair.homology import cycle_basis, two_isomorphism_from_edge_bijection
from cyclepair.multigraph import (GraphError, Multigraph, NotConnected,
                                  NotCyclic, PointedGraph, apply_two_move,
                                  contract, delete, enumerate_two_move_orbit,
                                  is_bridgeless, is_connected, isomorphic,
                                  move_sign_vector, relabel, two_moves,
                                  vertex_join)


def test_bridgeless_cycle():
    assert is_bridgeless(cycle(3))


def test_bridgeless_single_edge_is_bridge():
    assert not is_bridgeless(Multigraph(2, ((0, 1),)))


def test_bridgeless_theta_by_deletion_oracle():
    g = theta(3)
    # oracle: deleting any single edge must keep the graph connected
    for e in range(g.edge_count):
        assert is_connected(delete(g, {e}))
    assert is_bridgeless(g)


def test_bridgeless_rejects_disconnected():
    with pytest.raises(NotConnected):
        is_bridgeless(Multigraph(2, ()))


def test_loop_is_never_a_bridge():
    g = Multigraph(2, ((0, 1), (0, 1), (0, 0)))
    assert is_bridgeless(g)


def test_contract_theta_to_loop():
    g, vmap, emap = contract(theta(3), {1})
    assert g.vertex_count == 1 and g.edges == ((0, 0),)
    assert emap == {1: 0}


def test_contract_all_is_identity():
    g = wedge_cycles(3, 4)
    out, vmap, emap = contract(g, set(range(g.edge_count)))
    assert out == g
    assert vmap == tuple(range(g.vertex_count))
    assert emap == {e: e for e in range(g.edge_count)}


def test_contract_c4_two_adjacent_edges_gives_c2():
    out, _, _ = contract(cycle(4), {0, 1})
    assert isomorphic(out, theta(2)) is not None


def test_delete_examples():
    assert isomorphic(delete(theta(3), {0}), theta(2)) is not None
    g = wedge_cycles(3, 3)
    assert delete(g, set()) == g
    path = delete(cycle(3), {0})
    assert path.edge_count == 2 and is_connected(path)


def test_vertex_join_counts():
    fig8 = vertex_join(cycle(1), cycle(1), 0, 0)
    assert fig8.vertex_count == 1 and fig8.edge_count == 2
    j = vertex_join(cycle(3), cycle(4), 1, 2)
    assert j.vertex_count == 6 and j.edge_count == 7
    j22 = vertex_join(cycle(2), cycle(2), 0, 0)
    assert j22.vertex_count == 3 and j22.edge_count == 4
    assert is_bridgeless(j) and cycle_basis(j).genus == 2


def test_vertex_join_rejects_non_cycles():
    with pytest.raises(NotCyclic):
        vertex_join(theta(3), cycle(3), 0, 0)


def test_isomorphic_finds_relabeling(c3):
    other, iso = relabel(c3, (1, 2, 0), (2, 0, 1))
    found = isomorphic(c3, other)
    assert found is not None


def test_isomorphic_distinguishes_sizes(c3, c4):
    assert isomorphic(c3, c4) is None


def test_pointed_isomorphic_respects_basepoint(c3_wedge_c4):
    g = c3_wedge_c4
    join = PointedGraph(g, 0)
    off = PointedGraph(g, 1)
    assert isomorphic(join, off) is None
    assert isomorphic(off, PointedGraph(g, 2)) is not None


def test_isomorphic_is_reflexive_and_symmetric(small_corpus):
    rng = random.Random(3)
    for g in small_corpus[:10]:
        assert isomorphic(g, g) is not None
        vperm = list(range(g.vertex_count))
        rng.shuffle(vperm)
        other, _ = relabel(g, vperm)
        fwd = isomorphic(g, other)
        back = isomorphic(other, g)
        assert fwd is not None and back is not None
        # composing the two vertex maps gives a permutation of g
        comp = [back.vertex_map[fwd.vertex_map[v]] for v in range(g.vertex_count)]
        assert sorted(comp) == list(range(g.vertex_count))


@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_contract_delete_commute_on_disjoint_sets(small_corpus, data):
    from cyclepair.multigraph import delete_with_map
    g = data.draw(st.sampled_from([x for x in small_corpus if x.edge_count >= 3]))
    edges = list(range(g.edge_count))
    contract_away = data.draw(st.sets(st.sampled_from(edges), max_size=2))
    rest = sorted(set(edges) - contract_away)
    remove = data.draw(st.sets(st.sampled_from(rest), max_size=1)) if rest else set()
    keep = sorted(set(edges) - contract_away - remove)
    # delete first, then contract
    d1, emap1 = delete_with_map(g, remove)
    a, _, _ = contract(d1, {emap1[e] for e in keep})
    # contract first, then delete
    c1, _, emap2 = contract(g, set(keep) | set(remove))
    b = delete(c1, {emap2[e] for e in remove})
    # same vertex/edge structure up to the oracle (components may reorder)
    assert sorted(tuple(sorted(e)) for e in a.edges) \
        == sorted(tuple(sorted(e)) for e in b.edges) \
        or (a.vertex_count == b.vertex_count and isomorphic_loose(a, b))


def isomorphic_loose(a, b):
    # deletion may disconnect; compare componentwise edge multisets
    from cyclepair.selftest import _deletion_components
    ca = sorted(sorted(tuple(sorted(e)) for e in c.edges)
                for c in _deletion_components(a, set()))
    cb = sorted(sorted(tuple(sorted(e)) for e in c.edges)
                for c in _deletion_components(b, set()))
    return ca == cb


def test_two_move_orbit_of_c3_is_trivial(c3):
    orbit = enumerate_two_move_orbit(c3, 3)
    assert len(orbit) == 1


def test_two_move_orbit_of_wedge_is_single_class():
    g = wedge_cycles(3, 4)
    orbit = enumerate_two_move_orbit(g, 2)
    assert len(orbit) == 1  # every re-wedging is isomorphic


def test_two_move_orbit_members_stay_bridgeless(small_corpus):
    for g in small_corpus[:8]:
        if g.edge_count == 0:
            continue
        base_genus = cycle_basis(g).genus
        for member in enumerate_two_move_orbit(g, 2):
            assert is_bridgeless(member)
            assert member.edge_count == g.edge_count
            assert cycle_basis(member).genus == base_genus


def test_twist_orbit_can_be_nontrivial():
    # two triangles sharing two vertices through parallel edges: the twist
    # re-glues one triangle upside down and changes the pointed structure
    g = Multigraph(4, ((0, 1), (1, 2), (2, 0), (0, 3), (3, 1)))
    moves = two_moves(g)
    twists = [m for m in moves if m.kind == "whitney-twist"]
    assert twists, "expected at least one Whitney twist"
    for move in twists:
        out = apply_two_move(g, move)
        assert is_bridgeless(out)
        signs = move_sign_vector(g, move)
        # the signed identity bijection transports homology exactly
        assert two_isomorphism_from_edge_bijection(g, out, tuple(range(5)), signs) is not None


def test_move_induced_map_preserves_homology(small_corpus):
    for g in small_corpus[:10]:
        if g.edge_count < 2:
            continue
        for move in two_moves(g)[:6]:
            out = apply_two_move(g, move)
            signs = move_sign_vector(g, move)
            mat = two_isomorphism_from_edge_bijection(
                g, out, tuple(range(g.edge_count)), signs)
            assert mat is not None


def test_json_roundtrip(c3_wedge_c4):
    obj = c3_wedge_c4.to_json(basepoint=2)
    back = Multigraph.from_json(obj)
    assert isinstance(back, PointedGraph)
    assert back.graph == c3_wedge_c4 and back.basepoint == 2
