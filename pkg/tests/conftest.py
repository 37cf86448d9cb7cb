import random

import pytest

from cyclepair.corpus import bouquet, corpus, cycle, theta, wedge_cycles
from cyclepair.homology import cyclic_orientation
from cyclepair.multigraph import Multigraph, PointedGraph


@pytest.fixture(scope="session")
def c3():
    return cycle(3)


@pytest.fixture(scope="session")
def c4():
    return cycle(4)


@pytest.fixture(scope="session")
def theta3():
    return theta(3)


@pytest.fixture(scope="session")
def fig8():
    return bouquet(2)


@pytest.fixture(scope="session")
def c3_wedge_c4():
    g, _ = cyclic_orientation(wedge_cycles(3, 4))
    return g


@pytest.fixture(scope="session")
def small_corpus():
    """Corpus graphs with <= 4 edges, cyclically oriented."""
    return [cyclic_orientation(g)[0] for g in corpus(4)]


@pytest.fixture(scope="session")
def full_corpus():
    """The committed <= 5 edge corpus, cyclically oriented."""
    return [cyclic_orientation(g)[0] for g in corpus(5)]


@pytest.fixture(scope="session")
def pointed_corpus(full_corpus):
    return [PointedGraph(g, v) for g in full_corpus for v in range(g.vertex_count)]


def random_loop_at(rng: random.Random, pg: PointedGraph, length: int):
    from cyclepair.selftest import random_loop
    return random_loop(rng, pg, length)
