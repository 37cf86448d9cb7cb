"""Named small graphs and the committed corpus of all connected bridgeless
multigraphs with at most five edges (up to isomorphism).

The corpus fixture is generated once by exhaustive enumeration plus oracle
dedup (scripts/generate_corpus.py) and shipped as data/corpus_5.json; loading
falls back to regeneration if the fixture is missing.
"""

import itertools
import json
from functools import lru_cache
from importlib import resources

from .multigraph import Multigraph, is_bridgeless, is_connected, vertex_join


def cycle(n: int) -> Multigraph:
    """C_n, consistently oriented; C_1 is a single loop."""
    if n == 1:
        return Multigraph(1, ((0, 0),))
    return Multigraph(n, tuple((i, (i + 1) % n) for i in range(n)))


def bouquet(k: int) -> Multigraph:
    return Multigraph(1, tuple((0, 0) for _ in range(k)))


def theta(k: int) -> Multigraph:
    """Two vertices joined by k parallel edges."""
    return Multigraph(2, tuple((0, 1) for _ in range(k)))


def wedge_cycles(a: int, b: int) -> Multigraph:
    """C_a and C_b joined at vertex 0 of each."""
    return vertex_join(cycle(a), cycle(b), 0, 0)


def figure_eight() -> Multigraph:
    return bouquet(2)


def _canonical_key(g: Multigraph):
    """Minimal edge multiset over all vertex relabelings (orientation-free)."""
    n = g.vertex_count
    best = None
    for perm in itertools.permutations(range(n)):
        key = tuple(sorted(tuple(sorted((perm[t], perm[h]))) for t, h in g.edges))
        if best is None or key < best:
            best = key
    return (n, best)


def enumerate_corpus(max_edges: int = 5):
    """All connected bridgeless multigraphs with <= max_edges, up to iso.

    Includes the edgeless single vertex (m = 0, genus 0). Deterministic order:
    by (edge count, vertex count, canonical key).
    """
    seen = {}
    for m in range(0, max_edges + 1):
        max_n = max(1, m)
        for n in range(1, max_n + 1):
            pairs = [(i, j) for i in range(n) for j in range(i, n)]
            for combo in itertools.combinations_with_replacement(pairs, m):
                g = Multigraph(n, tuple(combo))
                if not is_connected(g):
                    continue
                if not is_bridgeless(g):
                    continue
                key = _canonical_key(g)
                if key not in seen:
                    seen[key] = g
    graphs = sorted(seen.items(),
                    key=lambda kv: (kv[1].edge_count, kv[1].vertex_count, kv[0]))
    return [g for _, g in graphs]


@lru_cache(maxsize=None)
def corpus(max_edges: int = 5):
    """The committed corpus (loaded from the fixture when available)."""
    if max_edges == 5:
        try:
            data = resources.files("cyclepair").joinpath("data/corpus_5.json")
            obj = json.loads(data.read_text())
            return tuple(Multigraph(item["vertices"], tuple(tuple(e) for e in item["edges"]))
                         for item in obj["graphs"])
        except (FileNotFoundError, ModuleNotFoundError):
            pass
    return tuple(enumerate_corpus(max_edges))
