"""Abelian Torelli layer: enumerate isometries between cycle lattices and
turn an isometry into the unique bijection of concyclicity classes.

Isometries are integer matrices M with M^T G' M = G and |det M| = 1 (lattice
isomorphisms; norm-preserving embeddings with larger determinant are not
returned). Enumeration is norm-constrained backtracking over target vectors,
complete at desk scale (g <= ~6), no reduction theory needed.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import _intmat
from .homology import (ConcyclicityPartition, coords_of_chain, cycle_basis,
                       simple_cycle_subgraphs)
from .multigraph import GraphError, Multigraph


class RankMismatch(GraphError):
    pass


@dataclass(frozen=True)
class Isometry:
    matrix: tuple  # columns are images of the source basis in the target basis

    def __post_init__(self):
        object.__setattr__(self, "matrix",
                           tuple(tuple(int(x) for x in row) for row in self.matrix))

    @property
    def genus(self):
        return len(self.matrix)

    def inverse_matrix(self):
        inv = _intmat.mat_inverse([list(r) for r in self.matrix])
        return tuple(tuple(int(x) for x in row) for row in inv)

    def apply(self, coords):
        return tuple(sum(self.matrix[i][j] * coords[j] for j in range(len(coords)))
                     for i in range(len(self.matrix)))


@dataclass(frozen=True)
class IsometrySearch:
    isometries: tuple
    truncated: bool


def _vectors_of_norm(gram, gram_inv_diag, n):
    """All integer vectors x with x^T G x = n, lexicographic order."""
    g = len(gram)
    if g == 0:
        return []
    bounds = []
    for i in range(g):
        q = n * gram_inv_diag[i]
        bounds.append(_intmat.isqrt_floor(int(q)))  # floor(sqrt(floor(q)))
    out = []
    for cand in itertools.product(*[range(-b, b + 1) for b in bounds]):
        norm = sum(cand[i] * gram[i][j] * cand[j] for i in range(g) for j in range(g))
        if norm == n:
            out.append(cand)
    return out


def enumerate_isometries(gram, gram2, limit: int = 10000) -> IsometrySearch:
    """All integer M with M^T G2 M = G1 and |det M| = 1, up to `limit`."""
    g = len(gram)
    if g != len(gram2):
        raise RankMismatch(f"gram ranks {g} and {len(gram2)} differ")
    if g == 0:
        return IsometrySearch((Isometry(()),), False)
    det1 = _intmat.mat_det([list(r) for r in gram])
    det2 = _intmat.mat_det([list(r) for r in gram2])
    if det1 != det2:
        return IsometrySearch((), False)
    inv2 = _intmat.mat_inverse([list(r) for r in gram2])
    inv_diag = [inv2[i][i] for i in range(g)]
    norm_cache = {}

    def candidates(n):
        if n not in norm_cache:
            norm_cache[n] = _vectors_of_norm(gram2, inv_diag, n)
        return norm_cache[n]

    found = []
    truncated = [False]
    cols = []
    gcols = []  # G2 * col, for fast inner products

    def backtrack(i):
        if truncated[0]:
            return
        if i == g:
            mat = tuple(tuple(cols[j][r] for j in range(g)) for r in range(g))
            found.append(Isometry(mat))
            if len(found) >= limit:
                truncated[0] = True
            return
        for cand in candidates(gram[i][i]):
            ok = True
            for j in range(i):
                if sum(gcols[j][t] * cand[t] for t in range(g)) != gram[i][j]:
                    ok = False
                    break
            if not ok:
                continue
            cols.append(cand)
            gcols.append([sum(gram2[r][t] * cand[t] for t in range(g)) for r in range(g)])
            backtrack(i + 1)
            cols.pop()
            gcols.pop()

    backtrack(0)
    kept = tuple(m for m in found
                 if abs(_intmat.mat_det([list(r) for r in m.matrix])) == 1)
    return IsometrySearch(kept, truncated[0])


@dataclass(frozen=True)
class ClassBijection:
    pairs: tuple  # (source class index, target class index, sign)

    def target_of(self, src):
        for s, t, sign in self.pairs:
            if s == src:
                return t, sign
        raise KeyError(src)

    def sign_vector(self, parts: ConcyclicityPartition):
        """Per-edge sign of phi on the source graph's edges."""
        sign_of_class = {s: sign for s, _, sign in self.pairs}
        return tuple(sign_of_class[parts.class_of_edge[e]]
                     for e in range(len(parts.class_of_edge)))


def class_bijection_from_isometry(phi: Isometry, parts: ConcyclicityPartition,
                                  parts2: ConcyclicityPartition) -> Optional[ClassBijection]:
    """The unique class bijection with psi(C*) = +-C'* and #C = #C', if any.

    psi is the dual of phi^{-1}; failure to match every class means phi does
    not come from a 2-isomorphism and the candidate is silently filtered.
    """
    if len(parts.classes) != len(parts2.classes):
        return None
    minv = phi.inverse_matrix()
    by_functional = {}
    for t, f in enumerate(parts2.functionals):
        by_functional.setdefault(f, []).append(t)
    pairs = []
    used = set()
    for s, f in enumerate(parts.functionals):
        image = tuple(sum(f[j] * minv[j][i] for j in range(len(f)))
                      for i in range(len(minv)))
        neg = tuple(-x for x in image)
        hits = [(t, 1) for t in by_functional.get(image, ())]
        hits += [(t, -1) for t in by_functional.get(neg, ()) if image != neg]
        hits = [(t, sign) for t, sign in hits
                if len(parts2.classes[t]) == len(parts.classes[s])]
        if len(hits) != 1 or hits[0][0] in used:
            return None
        t, sign = hits[0]
        used.add(t)
        pairs.append((s, t, sign))
    return ClassBijection(tuple(pairs))


def simple_cycle_check(phi: Isometry, g: Multigraph, g2: Multigraph) -> bool:
    """Every simple cycle of g maps to a simple cycle of g2 under phi."""
    cb, cb2 = cycle_basis(g), cycle_basis(g2)
    for chain in simple_cycle_subgraphs(g):
        coords = coords_of_chain(cb, chain)
        if coords is None:  # pragma: no cover - cyclic subgraphs are cycles
            continue
        image = phi.apply(coords)
        out = [0] * (cb2.edge_count or 0)
        for c, b in zip(image, cb2.basis):
            if c:
                for e in range(len(out)):
                    out[e] += c * b[e]
        if any(x not in (-1, 0, 1) for x in out):
            return False
    return True


# ---------------------------------------------------------------------------
# two cycles through a concyclicity class

@dataclass(frozen=True)
class TwoCycles:
    first: tuple       # edge ids of Delta^1
    second: tuple      # edge ids of Delta^2
    degenerate: bool   # Delta^1 == Delta^2 (class is a full cycle on its own)


def _two_edge_disjoint_paths(g: Multigraph, allowed, x, y):
    """Two edge-disjoint x->y paths inside `allowed` edges (Menger via
    unit-capacity max flow; undirected edges become opposite arc pairs)."""
    if x == y:
        return [], []
    flow = {}  # (edge, dir) -> 0/1, dir +1 means tail->head

    def residual_neighbors(v):
        for e in allowed:
            t, h = g.edges[e]
            if t == h:
                continue
            if t == v and flow.get((e, 1), 0) == 0 and flow.get((e, -1), 0) == 0:
                yield (e, 1, h)
            if h == v and flow.get((e, -1), 0) == 0 and flow.get((e, 1), 0) == 0:
                yield (e, -1, t)
            # cancelling arcs
            if h == v and flow.get((e, 1), 0) == 1:
                yield (e, -1, t)
            if t == v and flow.get((e, -1), 0) == 1:
                yield (e, 1, h)

    def augment():
        prev = {x: None}
        queue = [x]
        while queue:
            v = queue.pop(0)
            if v == y:
                break
            for e, d, w in residual_neighbors(v):
                if w not in prev:
                    prev[w] = (v, e, d)
                    queue.append(w)
        if y not in prev:
            return False
        v = y
        while prev[v] is not None:
            u, e, d = prev[v]
            if flow.get((e, -d), 0) == 1:
                flow[(e, -d)] = 0
            else:
                flow[(e, d)] = 1
            v = u
        return True

    for _ in range(2):
        if not augment():
            raise GraphError("Menger failed: deletion is not bridgeless (bug)")

    # decompose the flow into two edge-disjoint paths
    arcs = {}
    for (e, d), v in flow.items():
        if v:
            t, h = g.edges[e]
            frm, to = (t, h) if d == 1 else (h, t)
            arcs.setdefault(frm, []).append((e, to))
    paths = []
    for _ in range(2):
        path = []
        v = x
        while v != y:
            e, w = arcs[v].pop()
            path.append(e)
            v = w
        paths.append(path)
    return paths[0], paths[1]


def concyclic_two_cycles(g: Multigraph, class_edges) -> TwoCycles:
    """Two cyclic subgraphs whose edge intersection is exactly the class.

    The class enters and leaves each component of the deletion at two
    attachment vertices; two edge-disjoint connecting paths per component
    (Menger) complete the class to two cycles. If every component degenerates
    to a single attachment vertex the class is itself a full cycle and is
    returned twice, flagged.
    """
    cls = sorted(class_edges)
    rest = [e for e in range(g.edge_count) if e not in set(cls)]
    from .multigraph import _components
    _, comp = _components(g.vertex_count, [g.edges[e] for e in rest])
    slots = {}
    for e in cls:
        for v in g.edges[e]:
            slots.setdefault(comp[v], []).append(v)
    if any(len(vs) != 2 for vs in slots.values()):
        raise GraphError("not a concyclicity class")
    extra1, extra2 = [], []
    for c, (x, y) in sorted(slots.items()):
        allowed = [e for e in rest if comp[g.edges[e][0]] == c]
        p1, p2 = _two_edge_disjoint_paths(g, allowed, x, y)
        extra1.extend(p1)
        extra2.extend(p2)
    first = tuple(sorted(cls + extra1))
    second = tuple(sorted(cls + extra2))
    return TwoCycles(first, second, degenerate=(first == second))
