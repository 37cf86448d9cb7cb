"""Integer chain/cycle lattices of a multigraph: boundary map, deterministic
fundamental-cycle basis, inner product, concyclicity classes, cyclic
orientations, Jacobian.

Conventions fixed here and consumed by every later module:
  * spanning tree = BFS from vertex 0, ties broken by lowest edge id;
  * fundamental cycle of a non-tree edge e carries coefficient +1 on e;
  * class functionals are length-g vectors in cycle-basis coordinates,
    sign-normalized so the first nonzero coordinate is positive;
  * cyclic orientation flips each edge whose functional disagrees with the
    normalized class functional, and reports the sign vector.
"""

from dataclasses import dataclass
from functools import lru_cache

from . import _intmat
from .multigraph import (GraphError, HasBridge, Multigraph, NotConnected,
                         _components)


@dataclass(frozen=True)
class CycleBasis:
    basis: tuple          # g chains, each a length-m tuple
    gram: tuple           # g x g
    tree_edges: tuple     # edge ids of the BFS tree
    parents: tuple        # per vertex: (parent vertex, edge id) or None for root

    @property
    def genus(self):
        return len(self.basis)

    @property
    def edge_count(self):
        return len(self.basis[0]) if self.basis else None


def boundary_matrix(g: Multigraph):
    """n x m matrix; column e is indicator(head) - indicator(tail)."""
    mat = [[0] * g.edge_count for _ in range(g.vertex_count)]
    for e, (t, h) in enumerate(g.edges):
        mat[h][e] += 1
        mat[t][e] -= 1
    return mat


def inner_product(a, b):
    if len(a) != len(b):
        raise GraphError("chain length mismatch")
    return sum(x * y for x, y in zip(a, b))


def _bfs_tree(g: Multigraph):
    """Deterministic spanning tree: BFS from vertex 0, ties by edge id."""
    parents = [None] * g.vertex_count
    seen = [False] * g.vertex_count
    seen[0] = True
    queue = [0]
    tree = []
    while queue:
        v = queue.pop(0)
        for e in g.incident(v):
            t, h = g.edges[e]
            w = h if t == v else t
            if not seen[w]:
                seen[w] = True
                parents[w] = (v, e)
                tree.append(e)
                queue.append(w)
    if not all(seen):
        raise NotConnected("cycle basis needs a connected graph")
    return tuple(parents), tuple(sorted(tree))


def tree_path(g: Multigraph, parents, a, b):
    """Signed-letter walk a -> b through the tree: list of (edge, sign)."""
    def to_root(v):
        out = []
        while parents[v] is not None:
            p, e = parents[v]
            out.append((v, p, e))
            v = p
        return out

    up_a, up_b = to_root(a), to_root(b)
    ancestors_a = {a: 0}
    v = a
    for i, (_, p, _) in enumerate(up_a):
        ancestors_a[p] = i + 1
        v = p
    # find first common ancestor along b's path to root
    v = b
    cut_b = 0
    while v not in ancestors_a:
        _, p, _ = up_b[cut_b]
        v = p
        cut_b += 1
    lca = v
    cut_a = ancestors_a[lca]
    walk = []
    for frm, to, e in up_a[:cut_a]:
        t, h = g.edges[e]
        walk.append((e, 1 if (t, h) == (frm, to) else -1))
    for frm, to, e in reversed(up_b[:cut_b]):
        t, h = g.edges[e]
        walk.append((e, 1 if (t, h) == (to, frm) else -1))
    return walk


@lru_cache(maxsize=None)
def cycle_basis(g: Multigraph) -> CycleBasis:
    """Fundamental cycles of the non-tree edges, in increasing edge id order."""
    parents, tree = _bfs_tree(g)
    tree_set = set(tree)
    basis = []
    for e, (t, h) in enumerate(g.edges):
        if e in tree_set:
            continue
        chain = [0] * g.edge_count
        chain[e] = 1
        for f, s in tree_path(g, parents, h, t):
            chain[f] += s
        basis.append(tuple(chain))
    gram = tuple(tuple(inner_product(a, b) for b in basis) for a in basis)
    return CycleBasis(tuple(basis), gram, tree, parents)


def nontree_edges(cb: CycleBasis):
    tree = set(cb.tree_edges)
    m = cb.edge_count or 0
    return [e for e in range(m) if e not in tree]


def chain_of_coords(cb: CycleBasis, coords):
    """Chain vector of an H1 element given in cycle-basis coordinates."""
    m = cb.edge_count or 0
    out = [0] * m
    for c, b in zip(coords, cb.basis):
        if c:
            for e in range(m):
                out[e] += c * b[e]
    return out


def coords_of_chain(cb: CycleBasis, chain):
    """Cycle-basis coordinates of a chain, or None if it is not in H1.

    Each non-tree edge lies only in its own fundamental cycle, so the
    coordinates can be read off directly; membership is then verified.
    """
    coords = [chain[e] for e in nontree_edges(cb)]
    if chain_of_coords(cb, coords) != list(chain):
        return None
    return coords


def edge_functional(cb: CycleBasis, e):
    """e*|_{H1} in cycle-basis coordinates: i-th entry is <b_i, e>."""
    return tuple(b[e] for b in cb.basis)


def _normalize_sign(vec):
    for x in vec:
        if x > 0:
            return tuple(vec), 1
        if x < 0:
            return tuple(-y for y in vec), -1
    return tuple(vec), 1


@dataclass(frozen=True)
class ConcyclicityPartition:
    classes: tuple        # tuple of sorted edge-id tuples, ordered by min edge
    functionals: tuple    # per class, normalized length-g functional
    class_of_edge: tuple  # edge id -> class index

    def class_index(self, e):
        return self.class_of_edge[e]


def concyclicity(g: Multigraph, cb: CycleBasis = None) -> ConcyclicityPartition:
    """Group edges by e*|_{H1} up to sign; bridges (zero functional) -> error."""
    cb = cb or cycle_basis(g)
    groups = {}
    for e in range(g.edge_count):
        f = edge_functional(cb, e)
        if not any(f):
            raise HasBridge(f"edge {e} lies in no cycle")
        key, _ = _normalize_sign(f)
        groups.setdefault(key, []).append(e)
    ordered = sorted(groups.items(), key=lambda kv: min(kv[1]))
    classes = tuple(tuple(sorted(es)) for _, es in ordered)
    functionals = tuple(key for key, _ in ordered)
    class_of = [None] * g.edge_count
    for i, es in enumerate(classes):
        for e in es:
            class_of[e] = i
    return ConcyclicityPartition(classes, functionals, tuple(class_of))


def cyclic_orientation(g: Multigraph):
    """Reorient so every edge functional equals its normalized class functional.

    Returns (reoriented graph, sign vector); sign -1 marks a flipped edge.
    """
    cb = cycle_basis(g)
    signs = []
    for e in range(g.edge_count):
        f = edge_functional(cb, e)
        if not any(f):
            raise HasBridge(f"edge {e} lies in no cycle")
        _, s = _normalize_sign(f)
        signs.append(s)
    flipped = [e for e, s in enumerate(signs) if s < 0]
    return g.reverse_edges(flipped), tuple(signs)


def is_cyclically_oriented(g: Multigraph) -> bool:
    _, signs = cyclic_orientation(g)
    return all(s == 1 for s in signs)


def jacobian(cb: CycleBasis):
    """Invariant factors of coker(gram: H1 -> H1*), 1s suppressed."""
    if not cb.basis:
        return ()
    factors = _intmat.invariant_factors([list(r) for r in cb.gram])
    return tuple(f for f in factors if f != 1)


def two_isomorphism_from_edge_bijection(g, g2, phi, signs=None):
    """Matrix of C1(phi)|_{H1} if C1(phi) maps H1 onto H1', else None.

    phi is an edge bijection (old id -> new id); optional per-edge signs allow
    orientation-reversing transport (used for Whitney twists).
    """
    if g.edge_count != g2.edge_count:
        return None
    cba, cbb = cycle_basis(g), cycle_basis(g2)
    if cba.genus != cbb.genus:
        return None
    signs = signs or tuple([1] * g.edge_count)
    cols = []
    for b in cba.basis:
        image = [0] * g2.edge_count
        for e, c in enumerate(b):
            if c:
                image[phi[e]] += signs[e] * c
        coords = coords_of_chain(cbb, image)
        if coords is None:
            return None
        cols.append(coords)
    mat = [[cols[j][i] for j in range(len(cols))] for i in range(cbb.genus)]
    if cba.genus and abs(_intmat.mat_det(mat)) != 1:
        return None
    return tuple(tuple(row) for row in mat)


def simple_cycle_subgraphs(g: Multigraph):
    """All cyclic subgraphs, each as a +-1 chain (deterministic traversal).

    Brute force over edge subsets; desk scale only.
    """
    from itertools import combinations
    out = []
    for size in range(1, g.edge_count + 1):
        for subset in combinations(range(g.edge_count), size):
            chain = _cycle_chain(g, subset)
            if chain is not None:
                out.append(chain)
    return out


def _cycle_chain(g, subset):
    """If `subset` induces a cyclic subgraph, its traversal chain, else None."""
    deg = {}
    for e in subset:
        t, h = g.edges[e]
        deg[t] = deg.get(t, 0) + 1
        deg[h] = deg.get(h, 0) + 1
    if any(d != 2 for d in deg.values()):
        return None
    verts = sorted(deg)
    # connectivity of the induced subgraph
    idx = {v: i for i, v in enumerate(verts)}
    k, _ = _components(len(verts), [(idx[g.edges[e][0]], idx[g.edges[e][1]]) for e in subset])
    if k != 1:
        return None
    chain = [0] * g.edge_count
    start = verts[0]
    v = start
    used = set()
    while True:
        e = min(x for x in subset if x not in used and v in g.edges[x])
        t, h = g.edges[e]
        used.add(e)
        if t == h:
            chain[e] = 1
            break
        chain[e] = 1 if t == v else -1
        v = h if t == v else t
        if v == start:
            break
    if len(used) != len(subset):
        return None  # pragma: no cover - degree-2 + connected excludes this
    return tuple(chain)
