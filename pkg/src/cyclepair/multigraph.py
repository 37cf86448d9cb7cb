"""Multigraph data model: loops and parallel edges, orientations, contraction,
deletion, 2-moves, and a brute-force isomorphism oracle for desk-scale work.

Edge ids are list positions (0..m-1), stable under reorientation. Loops add 2
to a vertex's degree and are never bridges. Values are immutable; every
operation returns fresh objects.
"""

import itertools
import json
from dataclasses import dataclass
from typing import Optional


class GraphError(Exception):
    pass


class NotConnected(GraphError):
    pass


class HasBridge(GraphError):
    pass


class NotCyclic(GraphError):
    pass


@dataclass(frozen=True)
class Multigraph:
    vertex_count: int
    edges: tuple  # tuple of (tail, head)

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(t), int(h)) for t, h in self.edges))
        for t, h in self.edges:
            if not (0 <= t < self.vertex_count and 0 <= h < self.vertex_count):
                raise GraphError("edge endpoint out of range")

    @property
    def edge_count(self):
        return len(self.edges)

    def degree(self, v):
        return sum((t == v) + (h == v) for t, h in self.edges)

    def incident(self, v):
        """Edge ids touching v (loops once)."""
        return [e for e, (t, h) in enumerate(self.edges) if t == v or h == v]

    def is_loop(self, e):
        t, h = self.edges[e]
        return t == h

    def reverse_edges(self, which):
        """Flip the orientation of the given edge ids."""
        which = set(which)
        return Multigraph(self.vertex_count, tuple(
            (h, t) if e in which else (t, h) for e, (t, h) in enumerate(self.edges)))

    def to_json(self, basepoint=None):
        obj = {"vertices": self.vertex_count, "edges": [list(e) for e in self.edges]}
        if basepoint is not None:
            obj["basepoint"] = basepoint
        return obj

    @staticmethod
    def from_json(obj):
        g = Multigraph(obj["vertices"], tuple(tuple(e) for e in obj["edges"]))
        if "basepoint" in obj and obj["basepoint"] is not None:
            return PointedGraph(g, obj["basepoint"])
        return g


@dataclass(frozen=True)
class PointedGraph:
    graph: Multigraph
    basepoint: int

    def __post_init__(self):
        if not (0 <= self.basepoint < self.graph.vertex_count):
            raise GraphError("basepoint out of range")

    def to_json(self):
        return self.graph.to_json(self.basepoint)


def load_graph(path_or_obj):
    if isinstance(path_or_obj, dict):
        return Multigraph.from_json(path_or_obj)
    with open(path_or_obj) as fh:
        return Multigraph.from_json(json.load(fh))


# ---------------------------------------------------------------------------
# connectivity / bridges

def _components(n, adjacency_pairs):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t, h in adjacency_pairs:
        rt, rh = find(t), find(h)
        if rt != rh:
            parent[rt] = rh
    roots = {}
    comp = []
    for v in range(n):
        r = find(v)
        if r not in roots:
            roots[r] = len(roots)
        comp.append(roots[r])
    return len(roots), comp


def is_connected(g: Multigraph) -> bool:
    if g.vertex_count == 0:
        return False
    k, _ = _components(g.vertex_count, g.edges)
    return k == 1


def is_bridgeless(g: Multigraph) -> bool:
    """True iff no single edge deletion disconnects g. Loops are never bridges."""
    if not is_connected(g):
        raise NotConnected("is_bridgeless needs a connected graph")
    for e, (t, h) in enumerate(g.edges):
        if t == h:
            continue
        rest = [pair for i, pair in enumerate(g.edges) if i != e]
        k, _ = _components(g.vertex_count, rest)
        if k != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# contraction / deletion

def contract(g: Multigraph, keep):
    """Contract all edges outside `keep`; returns (graph, vertex_map, edge_map).

    The result has edge set `keep` (renumbered in increasing id order); a kept
    loop survives as a loop, and loops created by contraction are preserved.
    """
    keep = set(keep)
    contracted = [g.edges[e] for e in range(g.edge_count) if e not in keep]
    _, comp = _components(g.vertex_count, contracted)
    # renumber components by first occurrence (ascending old vertex id)
    order = {}
    for v in range(g.vertex_count):
        if comp[v] not in order:
            order[comp[v]] = len(order)
    vmap = tuple(order[comp[v]] for v in range(g.vertex_count))
    kept = sorted(keep)
    emap = {old: new for new, old in enumerate(kept)}
    new_edges = tuple((vmap[g.edges[e][0]], vmap[g.edges[e][1]]) for e in kept)
    return Multigraph(len(order), new_edges), vmap, emap


def delete(g: Multigraph, remove) -> Multigraph:
    """Remove edges, keep all vertices. Result may be disconnected."""
    remove = set(remove)
    return Multigraph(g.vertex_count, tuple(
        pair for e, pair in enumerate(g.edges) if e not in remove))


def delete_with_map(g: Multigraph, remove):
    remove = set(remove)
    kept = [e for e in range(g.edge_count) if e not in remove]
    emap = {old: new for new, old in enumerate(kept)}
    return Multigraph(g.vertex_count, tuple(g.edges[e] for e in kept)), emap


def is_cycle_graph(g: Multigraph) -> bool:
    """Connected and every vertex of degree exactly 2 (single loop counts)."""
    if g.edge_count == 0:
        return False
    return is_connected(g) and all(g.degree(v) == 2 for v in range(g.vertex_count))


def vertex_join(a: Multigraph, b: Multigraph, ua: int, ub: int) -> Multigraph:
    """Glue two cycle graphs at one vertex (ua of a identified with ub of b)."""
    if not is_cycle_graph(a) or not is_cycle_graph(b):
        raise NotCyclic("vertex_join needs two cycle graphs")
    # a keeps its ids; b's vertices other than ub are appended
    bmap = {}
    nxt = a.vertex_count
    for v in range(b.vertex_count):
        if v == ub:
            bmap[v] = ua
        else:
            bmap[v] = nxt
            nxt += 1
    edges = list(a.edges) + [(bmap[t], bmap[h]) for t, h in b.edges]
    return Multigraph(nxt, tuple(edges))


# ---------------------------------------------------------------------------
# isomorphism oracle

@dataclass(frozen=True)
class GraphIsomorphism:
    vertex_map: tuple
    edge_map: tuple
    edge_signs: tuple  # +1 if orientation preserved, -1 if reversed; loops +1


def _degree_profile(g):
    loops = [0] * g.vertex_count
    for t, h in g.edges:
        if t == h:
            loops[t] += 1
    return [(g.degree(v), loops[v]) for v in range(g.vertex_count)]


def _match_edges(a, b, vmap):
    """Edge bijection under a vertex bijection, or None. Deterministic."""
    groups_a = {}
    for e, (t, h) in enumerate(a.edges):
        key = tuple(sorted((vmap[t], vmap[h])))
        groups_a.setdefault(key, []).append(e)
    groups_b = {}
    for e, (t, h) in enumerate(b.edges):
        groups_b.setdefault(tuple(sorted((t, h))), []).append(e)
    if set(groups_a) != set(groups_b):
        return None
    emap = [None] * a.edge_count
    signs = [1] * a.edge_count
    for key, ea in groups_a.items():
        eb = groups_b[key]
        if len(ea) != len(eb):
            return None
        for x, y in zip(sorted(ea), sorted(eb)):
            emap[x] = y
            t, h = a.edges[x]
            if (vmap[t], vmap[h]) == b.edges[y]:
                signs[x] = 1
            elif (vmap[h], vmap[t]) == b.edges[y]:
                signs[x] = -1 if vmap[t] != vmap[h] else 1
            else:  # pragma: no cover - grouping guarantees a match
                return None
    return tuple(emap), tuple(signs)


def isomorphic(a, b) -> Optional[GraphIsomorphism]:
    """Brute-force isomorphism search (desk scale, <= ~10 edges recommended).

    Accepts Multigraph or PointedGraph pairs; pointed mode pins the basepoint.
    Orientation is ignored (reversals allowed; induced signs are reported).
    """
    base = None
    if isinstance(a, PointedGraph):
        if not isinstance(b, PointedGraph):
            raise GraphError("cannot mix pointed and unpointed inputs")
        base = (a.basepoint, b.basepoint)
        a, b = a.graph, b.graph
    if a.vertex_count != b.vertex_count or a.edge_count != b.edge_count:
        return None
    prof_a, prof_b = _degree_profile(a), _degree_profile(b)
    if sorted(prof_a) != sorted(prof_b):
        return None
    n = a.vertex_count
    verts = list(range(n))
    if base is not None and prof_a[base[0]] != prof_b[base[1]]:
        return None
    for perm in itertools.permutations(verts):
        if base is not None and perm[base[0]] != base[1]:
            continue
        if any(prof_a[v] != prof_b[perm[v]] for v in verts):
            continue
        matched = _match_edges(a, b, perm)
        if matched is not None:
            return GraphIsomorphism(tuple(perm), matched[0], matched[1])
    return None


def relabel(g: Multigraph, vperm, eperm=None, flips=None):
    """Apply a relabeling (vertex permutation, edge permutation, edge flips).

    vperm[v] = new id of vertex v; eperm[e] = new id of edge e. Returns the
    relabeled graph; the corresponding GraphIsomorphism is (vperm, eperm, signs).
    """
    n, m = g.vertex_count, g.edge_count
    eperm = tuple(eperm) if eperm is not None else tuple(range(m))
    flips = set(flips or ())
    new_edges = [None] * m
    signs = [1] * m
    for e, (t, h) in enumerate(g.edges):
        tt, hh = vperm[t], vperm[h]
        if e in flips and tt != hh:
            tt, hh = hh, tt
            signs[e] = -1
        elif e in flips:
            signs[e] = -1  # loop flip: invisible in (t,h) but tracked
        new_edges[eperm[e]] = (tt, hh)
    return Multigraph(n, tuple(new_edges)), GraphIsomorphism(tuple(vperm), eperm, tuple(signs))


# ---------------------------------------------------------------------------
# 2-moves

@dataclass(frozen=True)
class TwoMove:
    kind: str          # "vertex-cleaving" | "whitney-twist"
    vertices: tuple    # (u,) or (u, w)
    side: tuple        # edge ids moved
    target: Optional[int] = None  # cleaving: vertex the piece is re-glued to


def _attachment_pieces(g, u):
    """Pieces hanging off u: components of g - u (with their u-edges), plus
    each loop at u on its own."""
    others = [v for v in range(g.vertex_count) if v != u]
    idx = {v: i for i, v in enumerate(others)}
    sub = [(idx[t], idx[h]) for t, h in g.edges if t != u and h != u and t != h]
    if others:
        _, comp = _components(len(others), sub)
    else:
        comp = []
    pieces = {}
    for e, (t, h) in enumerate(g.edges):
        if t == u and h == u:
            pieces.setdefault(("loop", e), []).append(e)
        elif t == u or h == u:
            v = h if t == u else t
            pieces.setdefault(("comp", comp[idx[v]]), []).append(e)
        else:
            pieces.setdefault(("comp", comp[idx[t]]), []).append(e)
    return list(pieces.values())


def _piece_vertices(g, edge_ids, exclude):
    vs = set()
    for e in edge_ids:
        vs.update(g.edges[e])
    return vs - set(exclude)


def two_moves(g: Multigraph):
    """All single-piece 2-moves available on g (deterministic order)."""
    moves = []
    for u in range(g.vertex_count):
        pieces = _attachment_pieces(g, u)
        if len(pieces) < 2:
            continue
        for piece in pieces:
            side = tuple(sorted(piece))
            side_verts = _piece_vertices(g, side, (u,))
            rest_verts = (set(range(g.vertex_count)) - side_verts) - {u}
            for w in sorted(rest_verts):
                moves.append(TwoMove("vertex-cleaving", (u,), side, w))
            # symmetric: re-glue the rest's copy of u onto a piece vertex
            for w in sorted(side_verts):
                rest = tuple(sorted(set(range(g.edge_count)) - set(side)))
                moves.append(TwoMove("vertex-cleaving", (u,), rest, w))
    for u, w in itertools.combinations(range(g.vertex_count), 2):
        # components of g - {u,w} attached to both ends, plus direct u-w edges
        others = [v for v in range(g.vertex_count) if v not in (u, w)]
        idx = {v: i for i, v in enumerate(others)}
        sub = [(idx[t], idx[h]) for t, h in g.edges
               if t not in (u, w) and h not in (u, w)]
        _, comp = _components(len(others), sub) if others else (0, [])
        groups = {}
        for e, (t, h) in enumerate(g.edges):
            ends = {t, h}
            if ends == {u, w}:
                groups.setdefault(("direct", e), []).append(e)
            elif ends & {u, w} and ends - {u, w}:
                v = next(iter(ends - {u, w}))
                groups.setdefault(("comp", comp[idx[v]]), []).append(e)
            elif not ends & {u, w}:
                groups.setdefault(("comp", comp[idx[t]]), []).append(e)
        for key, piece in groups.items():
            touches_u = any(u in g.edges[e] for e in piece)
            touches_w = any(w in g.edges[e] for e in piece)
            if not (touches_u and touches_w):
                continue  # 1-attached: that is a cleaving piece
            if len(groups) < 2:
                continue  # twisting the whole graph is a relabeling
            moves.append(TwoMove("whitney-twist", (u, w), tuple(sorted(piece))))
    return moves


def apply_two_move(g: Multigraph, move: TwoMove) -> Multigraph:
    edges = list(g.edges)
    if move.kind == "vertex-cleaving":
        (u,), w = move.vertices, move.target
        for e in move.side:
            t, h = edges[e]
            edges[e] = (w if t == u else t, w if h == u else h)
    elif move.kind == "whitney-twist":
        u, w = move.vertices
        swap = {u: w, w: u}
        for e in move.side:
            t, h = edges[e]
            edges[e] = (swap.get(t, t), swap.get(h, h))
    else:
        raise GraphError(f"unknown move kind {move.kind!r}")
    return Multigraph(g.vertex_count, tuple(edges))


def move_sign_vector(g: Multigraph, move: TwoMove):
    """Per-edge signs of the homology-preserving map induced by a 2-move.

    The edge bijection of a move is the identity on ids; a twist traverses the
    moved side backwards, so its edges pick up -1.
    """
    if move.kind == "whitney-twist":
        side = set(move.side)
        return tuple(-1 if e in side else 1 for e in range(g.edge_count))
    return tuple([1] * g.edge_count)


def enumerate_two_move_orbit(g: Multigraph, budget: int):
    """All graphs reachable by <= budget 2-moves, deduplicated by isomorphism."""
    seen = [g]
    frontier = [g]
    for _ in range(budget):
        nxt = []
        for cur in frontier:
            for move in two_moves(cur):
                cand = apply_two_move(cur, move)
                if not is_connected(cand):
                    continue  # pragma: no cover - moves preserve connectivity
                if all(isomorphic(cand, old) is None for old in seen):
                    seen.append(cand)
                    nxt.append(cand)
        if not nxt:
            break
        frontier = nxt
    return seen
