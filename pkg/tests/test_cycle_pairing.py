import random
from fractions import Fraction

import pytest

from cyclepair.homology import cycle_basis
from cyclepair.multigraph import PointedGraph
from cyclepair.truncated_algebra import EdgeWord, elem_one, generators, loop_to_pi1
from cyclepair.cycle_pairing import (K_MAX, TensorWord, check_antipode,
                                     check_conjugation, check_coproduct,
                                     check_iterated_coproduct, check_shuffle,
                                     check_symmetrization, compositions,
                                     integrate_element, integrate_word,
                                     integrate_word_combinatorial,
                                     pairing_tensor)
from cyclepair import _intmat
from tests.conftest import random_loop_at


def c3_loop():
    return EdgeWord(((0, 1), (1, 1), (2, 1)))


def test_unit_tensor_pairs_to_one(c3):
    cb = cycle_basis(c3)
    assert integrate_word(c3_loop(), (), cb) == 1
    assert integrate_word(EdgeWord(((0, -1),)), (), cb) == 1


def test_c3_degree_one_value(c3):
    cb = cycle_basis(c3)
    assert integrate_word(c3_loop(), ((1,),), cb) == 3


def test_c3_degree_two_value(c3):
    cb = cycle_basis(c3)
    om = (1,)
    assert integrate_word(c3_loop(), (om, om), cb) == Fraction(9, 2)
    # weights over the six elements of Delta(2,3): 1/2,1,1,1/2,1,1/2
    assert sorted(compositions(2, 3)) == [(0, 0, 2), (0, 1, 1), (0, 2, 0),
                                          (1, 0, 1), (1, 1, 0), (2, 0, 0)]


def test_k_max_enforced(c3):
    cb = cycle_basis(c3)
    with pytest.raises(Exception):
        integrate_word(c3_loop(), tuple((1,) for _ in range(K_MAX + 1)), cb)


def test_two_implementations_agree_randomized(pointed_corpus):
    rng = random.Random(23)
    pgs = [pg for pg in pointed_corpus if pg.graph.edge_count][:40]
    for _ in range(120):
        pg = rng.choice(pgs)
        cb = cycle_basis(pg.graph)
        w = random_loop_at(rng, pg, rng.randint(1, 6))
        om = tuple(tuple(rng.randint(-2, 2) for _ in range(cb.genus))
                   for _ in range(rng.randint(0, 4)))
        assert integrate_word(w, om, cb) == integrate_word_combinatorial(w, om, cb)


def test_element_pairing_matches_spec_values(c3):
    pg = PointedGraph(c3, 0)
    cb = cycle_basis(c3)
    gens = generators(pg)
    om = (1,)
    gamma = loop_to_pi1(gens.loops[0], gens)
    j_elem = gamma - elem_one(1)
    assert integrate_element(j_elem, (om, om), cb, gens) == Fraction(9, 2)
    assert integrate_element(j_elem, (om,), cb, gens) == 3
    assert integrate_element(j_elem, (), cb, gens) == 0
    # nilpotence r=2 > k=1: J^2 pairs to zero against degree-1 tensors
    from cyclepair.truncated_algebra import multiply
    sq = multiply(j_elem, j_elem)
    assert integrate_element(sq, (om,), cb, gens) == 0
    assert integrate_element(sq, (om, om), cb, gens) == 9


def test_element_pairing_free_basis(c3):
    cb = cycle_basis(c3)
    from cyclepair.truncated_algebra import word2_expand
    x = word2_expand(c3_loop(), 3)
    om = (1,)
    val = integrate_element(x - elem_one(3), (om, om), cb)
    assert val == Fraction(9, 2)


def test_check_shuffle_c3(c3):
    cb = cycle_basis(c3)
    om = (1,)
    assert check_shuffle(c3_loop(), (om,), (om,), cb)
    # 9 = 9/2 + 9/2
    assert integrate_word(c3_loop(), (om,), cb) ** 2 == Fraction(9)


def test_check_antipode_k1(c3):
    cb = cycle_basis(c3)
    om = (1,)
    assert integrate_word(c3_loop().inverse(), (om,), cb) \
        == -integrate_word(c3_loop(), (om,), cb)
    assert check_antipode(c3_loop(), (om, om), cb)


def test_check_symmetrization_c3(c3):
    cb = cycle_basis(c3)
    om = (1,)
    assert check_symmetrization(c3_loop(), (om, om), cb)
    assert 2 * Fraction(9, 2) == 9


def test_conjugation_fig8(fig8):
    pg = PointedGraph(fig8, 0)
    cb = cycle_basis(fig8)
    a = EdgeWord(((0, 1),))
    b = EdgeWord(((1, 1),))
    conj = b.concat(a).concat(b.inverse())
    assert integrate_word(conj, ((1, 0), (0, 1)), cb) == -1
    assert check_conjugation(a, b, (1, 0), (0, 1), cb)
    # beta empty and alpha = beta are trivial cases
    assert check_conjugation(a, EdgeWord(()), (1, 0), (0, 1), cb)
    assert check_conjugation(a, a, (1, 0), (0, 1), cb)


def test_iterated_coproduct_fig8(fig8):
    cb = cycle_basis(fig8)
    a = EdgeWord(((0, 1),))
    b = EdgeWord(((1, 1),))
    assert check_iterated_coproduct((a, b), ((1, 0), (0, 1)), cb)
    assert integrate_word(a.concat(b), ((1, 0), (0, 1)), cb) == 1


def test_well_definedness_of_pairing(pointed_corpus):
    rng = random.Random(17)
    pgs = [pg for pg in pointed_corpus if pg.graph.edge_count][:30]
    for _ in range(60):
        pg = rng.choice(pgs)
        cb = cycle_basis(pg.graph)
        w = random_loop_at(rng, pg, rng.randint(1, 5))
        om = tuple(tuple(rng.randint(-2, 2) for _ in range(cb.genus))
                   for _ in range(rng.randint(0, 3)))
        base = integrate_word(w, om, cb)
        letters = list(w.letters)
        e = rng.randrange(pg.graph.edge_count)
        pos = rng.randint(0, len(letters))
        letters[pos:pos] = [(e, 1), (e, -1)]
        assert integrate_word(EdgeWord(tuple(letters)), om, cb) == base


def test_pairing_tensor_c3(c3):
    pt = pairing_tensor(PointedGraph(c3, 0))
    assert pt.matrix() == [[Fraction(3), Fraction(9, 2)],
                           [Fraction(0), Fraction(9)]]


def test_pairing_tensor_fig8_blocks(fig8):
    pt = pairing_tensor(PointedGraph(fig8, 0))
    mat = pt.matrix()
    assert len(mat) == 6
    assert [row[:2] for row in mat[:2]] == [[1, 0], [0, 1]]
    # degree-2 rows never pair with degree-1 tensors
    assert all(mat[r][c] == 0 for r in range(2, 6) for c in range(2))


def test_pairing_tensor_invertible_and_transports(pointed_corpus):
    for pg in pointed_corpus[:25]:
        mat = pairing_tensor(pg).matrix()
        if not mat:
            continue
        inv = _intmat.mat_inverse(mat)
        size = len(mat)
        # inverse transports any functional vector to an element exactly
        func = [Fraction(i + 1) for i in range(size)]
        elem = _intmat.mat_vec(_intmat.transpose(inv), func)
        back = _intmat.mat_vec(_intmat.transpose(mat), elem)
        assert back == func


def test_gram_block_is_degree_one_square(pointed_corpus):
    for pg in pointed_corpus[:25]:
        pt = pairing_tensor(pg)
        g = pt.genus
        mat = pt.matrix()
        for i in range(g):
            for a in range(g):
                assert mat[i][a] == pt.gram[i][a]


def test_basepoint_change_is_conjugation(c3_wedge_c4):
    """Re-rooting a generator changes deg-2 pairings by the conjugation
    correction exactly."""
    g = c3_wedge_c4
    cb = cycle_basis(g)
    pg0 = PointedGraph(g, 0)
    gens0 = generators(pg0)
    from cyclepair.homology import tree_path
    path = EdgeWord(tuple(tree_path(g, cb.parents, 1, 0)))
    om1 = (1, 0)
    om2 = (0, 1)
    for loop in gens0.loops:
        rerooted = path.concat(loop).concat(path.inverse())
        lhs = integrate_word(rerooted, (om1, om2), cb)
        corr = (integrate_word(path, (om1,), cb) * integrate_word(loop, (om2,), cb)
                - integrate_word(loop, (om1,), cb) * integrate_word(path, (om2,), cb))
        assert lhs == integrate_word(loop, (om1, om2), cb) + corr


def test_tensor_word_container():
    tw = TensorWord(((1, 0), (0, 1)))
    assert len(tw) == 2
