"""Constructive unipotent Torelli engine.

Decision strategy: enumerate homology isometries, build for each the unique
pairing-preserving rational map between the truncated loop algebras, keep the
integral ones, and reconstruct an edge bijection per concyclicity class by
aligning cyclic orders through contractions. Integrality of the canonical
rational map is equivalent to the existence of an integral algebra
isomorphism: an integral map is one, and any integral isomorphism inducing the
same homology isometry coincides with the canonical map by uniqueness.

Orientation-reversing isometries (class sign -1) are handled by sign-twisted
walks on the target side; the certificate records the per-edge signs.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from . import _intmat
from .homology import concyclicity, cycle_basis, cyclic_orientation
from .multigraph import (GraphError, Multigraph, PointedGraph, contract,
                         is_bridgeless, isomorphic)
from .truncated_algebra import (EdgeWord, TruncatedElement, elem_one,
                                free_expansion, generators, loop_to_pi1,
                                multiply, signed_substitution, walk_cycle,
                                walk_path, word2_expand)
from .cycle_pairing import pairing_tensor
from .torelli import (ClassBijection, Isometry, class_bijection_from_isometry,
                      enumerate_isometries)


class NotInduced(GraphError):
    pass


class NotCyclicOrder(GraphError):
    pass


# ---------------------------------------------------------------------------
# the canonical rational map

@dataclass(frozen=True)
class CanonicalPhi:
    """The unique pairing-preserving rational algebra map inducing an isometry.

    Stored blockwise; phi(gamma_i - 1) = sum_j M[j][i] (gamma'_j - 1)
    + sum_{jk} corrections[i][j][k] (gamma'_j - 1)(gamma'_k - 1), the constant
    component is the identity and products map through M tensor M.
    """
    source: PointedGraph
    target: PointedGraph
    isometry: Isometry
    corrections: tuple  # per source generator, a g x g matrix of Fractions

    @property
    def genus(self):
        return self.isometry.genus

    def is_integral(self) -> bool:
        """Maps the integral lattice isomorphically onto the target lattice.

        The isometry block is integer unimodular by construction, and the
        inverse's only other block is -(M (x) M)^-1 X M^-1, integral whenever
        the corrections are; so integrality of the corrections decides.
        """
        return all(x.denominator == 1 for mat in self.corrections
                   for row in mat for x in row)

    def apply(self, x: TruncatedElement) -> TruncatedElement:
        g = self.genus
        if x.dim != g:
            raise GraphError("basis mismatch")
        m = self.isometry.matrix
        deg1 = tuple(sum(m[i][j] * x.deg1[j] for j in range(g)) for i in range(g))
        deg2 = [[0] * g for _ in range(g)]
        for i in range(g):
            if x.deg1[i]:
                ci = self.corrections[i]
                for j in range(g):
                    row = ci[j]
                    for k in range(g):
                        if row[k]:
                            deg2[j][k] += x.deg1[i] * row[k]
        # products transform multiplicatively: D -> M D M^T
        for j in range(g):
            for k in range(g):
                acc = 0
                for a in range(g):
                    if m[j][a]:
                        for b in range(g):
                            if x.deg2[a][b]:
                                acc += m[j][a] * x.deg2[a][b] * m[k][b]
                deg2[j][k] += acc
        deg2 = tuple(tuple(int(v) if isinstance(v, Fraction) and v.denominator == 1
                           else v for v in row) for row in deg2)
        return TruncatedElement(x.c0, deg1, deg2)

    def full_matrix(self):
        """(1 + g + g^2)^2 matrix on (1, deg1, deg2 row-major) coordinates."""
        g = self.genus
        size = 1 + g + g * g
        out = [[Fraction(0)] * size for _ in range(size)]
        out[0][0] = Fraction(1)
        m = self.isometry.matrix
        for i in range(g):
            for j in range(g):
                out[1 + i][1 + j] = Fraction(m[i][j])
        for i in range(g):
            col = 1 + i
            for j in range(g):
                for k in range(g):
                    out[1 + g + j * g + k][col] = Fraction(self.corrections[i][j][k])
        for a in range(g):
            for b in range(g):
                col = 1 + g + a * g + b
                for j in range(g):
                    for k in range(g):
                        out[1 + g + j * g + k][col] = Fraction(m[j][a] * m[k][b])
        return out


@lru_cache(maxsize=None)
def _doubled_w(tensor):
    """2*W as integer g x (g x g) blocks (degree-2 pairings have denominator 2)."""
    g = tensor.genus
    out = []
    for i in range(g):
        block = [[0] * g for _ in range(g)]
        for a in range(g):
            for b in range(g):
                v = 2 * tensor.w[i][a * g + b]
                if v.denominator != 1:  # pragma: no cover - k=2 weights are 1 or 1/2
                    raise GraphError("unexpected pairing denominator")
                block[a][b] = int(v)
        out.append(tuple(tuple(row) for row in block))
    return tuple(out)


def canonical_phi(pgA: PointedGraph, pgB: PointedGraph, phi1: Isometry) -> CanonicalPhi:
    """Solve for the unique rational map with int_{phi x} (psi omega) = int_x omega.

    Blockwise: with N = G'M, the correction of generator i satisfies
    N^T Y_i N = W_i - sum_j M[j][i] M^T W'_j M (degree-2 pairing transport).
    Solved over Z with the adjugate: Y_i = adj(N)^T (2 R_i) adj(N) / (2 det^2),
    so integrality is one divisibility test per entry.
    """
    ta, tb = pairing_tensor(pgA), pairing_tensor(pgB)
    g = ta.genus
    if phi1.genus != g or tb.genus != g:
        raise GraphError("isometry rank does not match the graphs")
    m = [list(r) for r in phi1.matrix]
    mt = _intmat.transpose(m)
    gram_b = [list(r) for r in tb.gram]
    n_mat = _intmat.mat_mul(gram_b, m)
    det = _intmat.det_int(n_mat)
    if det == 0:
        raise GraphError("singular pairing transport (bug)")
    adj = _intmat.adjugate_int(n_mat)
    adj_t = _intmat.transpose(adj)
    den = 2 * det * det
    w2a = _doubled_w(ta)
    w2b = _doubled_w(tb)
    tilde = [_intmat.mat_mul(mt, _intmat.mat_mul([list(r) for r in w2b[j]], m))
             for j in range(g)]
    corrections = []
    for i in range(g):
        r2 = [list(row) for row in w2a[i]]
        for j in range(g):
            c = m[j][i]
            if c:
                tj = tilde[j]
                for a in range(g):
                    for b in range(g):
                        r2[a][b] -= c * tj[a][b]
        numer = _intmat.mat_mul(adj_t, _intmat.mat_mul(r2, adj))
        block = []
        for row in numer:
            out_row = []
            for x in row:
                q, r = divmod(x, den)
                out_row.append(q if r == 0 else Fraction(x, den))
            block.append(tuple(out_row))
        corrections.append(tuple(block))
    return CanonicalPhi(pgA, pgB, phi1, tuple(corrections))


def is_integral(phi: CanonicalPhi) -> bool:
    return phi.is_integral()


# ---------------------------------------------------------------------------
# cyclic order recovery

def recover_cyclic_order(pg: PointedGraph, x: TruncatedElement):
    """Edge enumeration of a cycle graph from the deg2 pattern of word_2.

    The positively oriented generator expands with a strictly upper-triangular
    all-ones deg2 block in traversal order; the order is read off row sums and
    then verified exactly.
    """
    d = pg.graph.edge_count
    if x.dim != d:
        raise GraphError("element does not live on the graph's edges")
    counts = [(sum(1 for v in x.deg2[e] if v == 1), e) for e in range(d)]
    order = [e for _, e in sorted(counts, key=lambda p: (-p[0], p[1]))]
    pos = {e: i for i, e in enumerate(order)}
    for e in range(d):
        for f in range(d):
            expected = 1 if pos[e] < pos[f] else 0
            if x.deg2[e][f] != expected:
                raise NotCyclicOrder("deg2 pattern is not a strict linear order")
    return tuple(order)


# ---------------------------------------------------------------------------
# contraction plumbing

@lru_cache(maxsize=None)
def _contraction(pg: PointedGraph, kept: tuple):
    """Contract to Gamma(kept): pointed contraction, maps, generator images."""
    cg, vmap, emap = contract(pg.graph, kept)
    cpg = PointedGraph(cg, vmap[pg.basepoint])
    gens = generators(pg)
    cgens = generators(cpg)
    kept_set = set(kept)
    images = []
    for w in gens.loops:
        letters = tuple((emap[e], s) for e, s in w.letters if e in kept_set)
        images.append(loop_to_pi1(EdgeWord(letters), cgens))
    return cpg, vmap, emap, cgens, tuple(images)


def _push(y: TruncatedElement, images, dim_out: int) -> TruncatedElement:
    """Apply the algebra map sending generator i to images[i] (group-likes)."""
    out_deg1 = [0] * dim_out
    out_deg2 = [[0] * dim_out for _ in range(dim_out)]
    units = [TruncatedElement(im.c0 - 1, im.deg1, im.deg2) for im in images]
    for i, c in enumerate(y.deg1):
        if c:
            u = units[i]
            for a in range(dim_out):
                out_deg1[a] += c * u.deg1[a]
                for b in range(dim_out):
                    out_deg2[a][b] += c * u.deg2[a][b]
    for i in range(y.dim):
        for j in range(y.dim):
            c = y.deg2[i][j]
            if c:
                prod = multiply(units[i], units[j])
                for a in range(dim_out):
                    for b in range(dim_out):
                        out_deg2[a][b] += c * prod.deg2[a][b]
    norm = lambda v: int(v) if isinstance(v, Fraction) and v.denominator == 1 else v
    return TruncatedElement(norm(y.c0),
                            tuple(norm(v) for v in out_deg1),
                            tuple(tuple(norm(v) for v in row) for row in out_deg2))


def _rest_path(g: Multigraph, rest_edges, a, b):
    """Shortest walk a -> b through non-class edges (BFS, ties by edge id)."""
    if a == b:
        return ()
    prev = {a: None}
    queue = [a]
    edges = sorted(rest_edges)
    while queue and b not in prev:
        v = queue.pop(0)
        for e in edges:
            t, h = g.edges[e]
            for frm, to, s in ((t, h, 1), (h, t, -1)):
                if frm == v and to not in prev:
                    prev[to] = (v, e, s)
                    queue.append(to)
    if b not in prev:
        raise GraphError("no path inside the contracted component (bug)")
    letters = []
    v = b
    while prev[v] is not None:
        u, e, s = prev[v]
        letters.append((e, s))
        v = u
    return tuple(reversed(letters))


def _lift_contracted_loop(pg: PointedGraph, kept: tuple, word: EdgeWord) -> EdgeWord:
    """Lift a loop word of Gamma(kept) at v(kept) to a loop of Gamma at v.

    Interleaves the (original) class letters with rest-edge paths; the rest
    letters die under the contraction, so the lift contracts to `word`.
    """
    g = pg.graph
    emap_inv = {new: old for new, old in zip(range(len(kept)), sorted(kept))}
    rest = [e for e in range(g.edge_count) if e not in set(kept)]
    letters = []
    cur = pg.basepoint
    for ce, s in word.letters:
        e = emap_inv[ce]
        t, h = g.edges[e]
        start, end = (t, h) if s == 1 else (h, t)
        letters.extend(_rest_path(g, rest, cur, start))
        letters.append((e, s))
        cur = end
    letters.extend(_rest_path(g, rest, cur, pg.basepoint))
    return EdgeWord(tuple(letters))


def _join_minimal_generator(g, own_edges, other_edges, v, u, dir_own, dir_other):
    """One minimal generator of a vertex join: path to u inside the other
    cycle when needed, around the own cycle, and back."""
    own_verts = set()
    for e in own_edges:
        own_verts.update(g.edges[e])
    if v in own_verts or v == u:
        return walk_cycle(g, own_edges, v, dir_own), 0
    path = walk_path(g, other_edges, v, u, dir_other)
    eye = walk_cycle(g, own_edges, u, dir_own)
    return path.concat(eye).concat(path.inverse()), len(path)


# ---------------------------------------------------------------------------
# reconstruction

@dataclass(frozen=True)
class ReconstructionCertificate:
    edge_map: tuple          # source edge id -> target edge id
    edge_signs: tuple        # +1 orientation kept, -1 reversed
    vertex_map: tuple        # source vertex -> target vertex (basepoint-compatible)
    class_pairs: tuple       # (source class idx, target class idx, sign)
    cyclic_orders: tuple     # per class: (source order, target order)
    join_constants: tuple    # per class pair: ((cC, cD) source, (c'C, c'D) target)
    residual_zero: bool      # word_2 diagram commutes exactly

    def sort_key(self):
        # +1 signs sort before -1: the identity certificate is the minimum
        return (self.edge_map, tuple(0 if s == 1 else 1 for s in self.edge_signs),
                self.vertex_map)


def _class_alignment(phi: CanonicalPhi, bij: ClassBijection):
    """Per-class edge alignment (cheap part of reconstruct); raises NotInduced."""
    pgA, pgB = phi.source, phi.target
    partsA = concyclicity(pgA.graph)
    partsB = concyclicity(pgB.graph)
    gensA = generators(pgA)
    edge_map = [None] * pgA.graph.edge_count
    edge_signs = [1] * pgA.graph.edge_count
    orders = []
    for s, t, sign in bij.pairs:
        keptA = partsA.classes[s]
        keptB = partsB.classes[t]
        cpgA, _, emapA, cgensA, imagesA = _contraction(pgA, keptA)
        cpgB, _, emapB, cgensB, imagesB = _contraction(pgB, keptB)
        src_walk = walk_cycle(cpgA.graph, range(len(keptA)), cpgA.basepoint, 1)
        tgt_walk = walk_cycle(cpgB.graph, range(len(keptB)), cpgB.basepoint, sign)
        lift = _lift_contracted_loop(pgA, keptA, src_walk)
        alpha = loop_to_pi1(lift, gensA)
        y = _push(phi.apply(TruncatedElement(alpha.c0 - 1, alpha.deg1, alpha.deg2)),
                  imagesB, cgensB.count)
        expected = loop_to_pi1(tgt_walk, cgensB)
        expected = TruncatedElement(expected.c0 - 1, expected.deg1, expected.deg2)
        if y != expected:
            raise NotInduced(f"class pair ({s},{t}): contracted generator mismatch")
        inv_a = {new: old for new, old in enumerate(sorted(keptA))}
        inv_b = {new: old for new, old in enumerate(sorted(keptB))}
        src_order = tuple(inv_a[e] for e, _ in src_walk.letters)
        tgt_order = tuple(inv_b[e] for e, _ in tgt_walk.letters)
        for a, b in zip(src_order, tgt_order):
            edge_map[a] = b
            edge_signs[a] = sign
        orders.append((src_order, tgt_order))
    return tuple(edge_map), tuple(edge_signs), tuple(orders)


def _vertex_map_from_edges(pgA, pgB, edge_map, edge_signs):
    vmap = [None] * pgA.graph.vertex_count
    vmap[pgA.basepoint] = pgB.basepoint
    for e, (t, h) in enumerate(pgA.graph.edges):
        tt, hh = pgB.graph.edges[edge_map[e]]
        if edge_signs[e] < 0:
            tt, hh = hh, tt
        for src, dst in ((t, tt), (h, hh)):
            if vmap[src] is None:
                vmap[src] = dst
            elif vmap[src] != dst:
                raise NotInduced("edge bijection induces no vertex map")
    if None in vmap or sorted(vmap) != list(range(pgB.graph.vertex_count)):
        raise NotInduced("vertex map is not a bijection")
    return tuple(vmap)


def reconstruct(pgA: PointedGraph, pgB: PointedGraph,
                phi: CanonicalPhi) -> ReconstructionCertificate:
    """Edge-bijection certificate of an integral pairing-preserving map.

    Aligns cyclic orders class by class through contractions, runs the
    vertex-join constant checks on every class pair, verifies the word_2
    diagram on all generators, and confirms the result is a pointed graph
    isomorphism. Any failure raises NotInduced (unreachable for integral phi
    unless there is a bug; this is the built-in bug detector).
    """
    if not phi.is_integral():
        raise GraphError("reconstruct requires an integral canonical map")
    pgA, pgB = phi.source, phi.target
    partsA = concyclicity(pgA.graph)
    partsB = concyclicity(pgB.graph)
    bij = class_bijection_from_isometry(phi.isometry, partsA, partsB)
    if bij is None:
        raise NotInduced("isometry admits no class bijection")
    edge_map, edge_signs, orders = _class_alignment(phi, bij)

    gensA = generators(pgA)
    # vertex-join checks on every pair of classes
    join_constants = []
    sign_of = {s: sign for s, _, sign in bij.pairs}
    for (s1, t1, sg1), (s2, t2, sg2) in itertools.combinations(bij.pairs, 2):
        keptA = tuple(sorted(partsA.classes[s1] + partsA.classes[s2]))
        keptB = tuple(sorted(partsB.classes[t1] + partsB.classes[t2]))
        cpgA, vmapA, emapA, cgensA, _ = _contraction(pgA, keptA)
        cpgB, vmapB, emapB, cgensB, imagesB = _contraction(pgB, keptB)
        ca = [tuple(emapA[e] for e in partsA.classes[s1]),
              tuple(emapA[e] for e in partsA.classes[s2])]
        cb2 = [tuple(emapB[e] for e in partsB.classes[t1]),
               tuple(emapB[e] for e in partsB.classes[t2])]
        uA = _join_vertex(cpgA.graph, ca[0], ca[1])
        uB = _join_vertex(cpgB.graph, cb2[0], cb2[1])
        src_consts, tgt_consts = [], []
        for own in (0, 1):
            other = 1 - own
            wA, cA = _join_minimal_generator(cpgA.graph, ca[own], ca[other],
                                             cpgA.basepoint, uA, 1, 1)
            sgn = (sg1, sg2)
            wB, cB = _join_minimal_generator(cpgB.graph, cb2[own], cb2[other],
                                             cpgB.basepoint, uB,
                                             sgn[own], sgn[other])
            lift = _lift_contracted_loop(pgA, keptA, wA)
            alpha = loop_to_pi1(lift, gensA)
            y = _push(phi.apply(TruncatedElement(alpha.c0 - 1, alpha.deg1, alpha.deg2)),
                      imagesB, cgensB.count)
            expected = loop_to_pi1(wB, cgensB)
            expected = TruncatedElement(expected.c0 - 1, expected.deg1, expected.deg2)
            if y != expected:
                raise NotInduced(
                    f"class pair ({s1},{s2}): vertex-join generator mismatch")
            src_consts.append(cA)
            tgt_consts.append(cB)
        if src_consts != tgt_consts:
            raise NotInduced(f"class pair ({s1},{s2}): path constants differ")
        join_constants.append((tuple(src_consts), tuple(tgt_consts)))

    # word_2 diagram on all generators: ZF(Phi) o word_2 = word_2 o phi
    gensB = generators(pgB)
    m = pgA.graph.edge_count
    residual_zero = True
    for i, w in enumerate(gensA.loops):
        lhs = signed_substitution(word2_expand(w, m), edge_map, edge_signs)
        xi = loop_to_pi1(w, gensA)
        img = phi.apply(TruncatedElement(xi.c0 - 1, xi.deg1, xi.deg2))
        rhs = free_expansion(
            TruncatedElement(img.c0 + 1, img.deg1,
                             tuple(tuple(int(v) for v in row) for row in img.deg2)),
            gensB, m)
        if lhs != rhs:
            raise NotInduced(f"word_2 diagram fails on generator {i}")

    vertex_map = _vertex_map_from_edges(pgA, pgB, edge_map, edge_signs)
    if vertex_map[pgA.basepoint] != pgB.basepoint:
        raise NotInduced("vertex map moves the basepoint")  # pragma: no cover
    if isomorphic(pgA, pgB) is None:  # oracle cross-check
        raise NotInduced("oracle disagrees: graphs are not pointed-isomorphic")
    return ReconstructionCertificate(edge_map, edge_signs, vertex_map,
                                     bij.pairs, orders, tuple(join_constants),
                                     residual_zero)


def _join_vertex(g, cls1, cls2):
    v1 = set()
    for e in cls1:
        v1.update(g.edges[e])
    v2 = set()
    for e in cls2:
        v2.update(g.edges[e])
    shared = v1 & v2
    if len(shared) != 1:
        raise NotInduced("pair contraction is not a vertex join (bug)")
    return next(iter(shared))


# ---------------------------------------------------------------------------
# decision procedure

def _validate(pg: PointedGraph):
    if not is_bridgeless(pg.graph):
        raise GraphError("graph has a bridge")


def decide_pointed_isomorphism(pgA: PointedGraph, pgB: PointedGraph,
                               isometry_limit: int = 10000,
                               jobs: int = 1) -> Optional[ReconstructionCertificate]:
    """Certificate of pointed isomorphism, or None.

    Soundness: reconstruct verifies everything. Completeness: a pointed
    isomorphism induces an integral pairing-preserving map whose isometry is
    enumerated. With several integral candidates the lexicographically
    smallest certificate wins, for determinism.

    Inputs are reoriented cyclically first; the certificate's edge signs are
    composed back so they refer to the orientations as passed in.
    """
    _validate(pgA)
    _validate(pgB)
    oa, sa = cyclic_orientation(pgA.graph)
    ob, sb = cyclic_orientation(pgB.graph)
    if any(s < 0 for s in sa + sb):
        cert = decide_pointed_isomorphism(PointedGraph(oa, pgA.basepoint),
                                          PointedGraph(ob, pgB.basepoint),
                                          isometry_limit, jobs)
        if cert is None:
            return None
        signs = tuple(sa[e] * cert.edge_signs[e] * sb[cert.edge_map[e]]
                      for e in range(len(cert.edge_map)))
        return ReconstructionCertificate(cert.edge_map, signs, cert.vertex_map,
                                         cert.class_pairs, cert.cyclic_orders,
                                         cert.join_constants, cert.residual_zero)
    a, b = pgA.graph, pgB.graph
    if (a.vertex_count != b.vertex_count or a.edge_count != b.edge_count):
        return None
    cba, cbb = cycle_basis(a), cycle_basis(b)
    if cba.genus != cbb.genus:
        return None
    if cba.genus == 0:
        return ReconstructionCertificate((), (), (0,), (), (), (), True)
    partsA, partsB = concyclicity(a), concyclicity(b)
    search = enumerate_isometries(cba.gram, cbb.gram, limit=isometry_limit)

    def candidate(iso):
        bij = class_bijection_from_isometry(iso, partsA, partsB)
        if bij is None:
            return None
        phi = canonical_phi(pgA, pgB, iso)
        if not phi.is_integral():
            return None
        edge_map, edge_signs, _ = _class_alignment(phi, bij)
        key = (edge_map, tuple(0 if s == 1 else 1 for s in edge_signs))
        return key, phi

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(candidate, search.isometries))
    else:
        results = [candidate(iso) for iso in search.isometries]
    results = [r for r in results if r is not None]
    if not results:
        return None
    results.sort(key=lambda r: r[0])
    return reconstruct(pgA, pgB, results[0][1])


def joint_contraction_injectivity(pg: PointedGraph) -> bool:
    """Full column rank of the stacked pairwise-class contraction maps."""
    g = pg.graph
    gens = generators(pg)
    gnum = gens.count
    if gnum == 0:
        return True
    parts = concyclicity(g)
    pairs = list(itertools.combinations(range(len(parts.classes)), 2))
    if not pairs:
        pairs = [(0,)]  # single class: the contraction is Gamma itself
    rows = []
    for pair in pairs:
        kept = tuple(sorted(sum((parts.classes[i] for i in pair), ())))
        _, _, _, cgens, images = _contraction(pg, kept)
        gc = cgens.count
        basis_elems = []
        units = [TruncatedElement(im.c0 - 1, im.deg1, im.deg2) for im in images]
        for i in range(gnum):
            basis_elems.append(units[i])
        for i in range(gnum):
            for j in range(gnum):
                basis_elems.append(multiply(units[i], units[j]))
        cols = [el.coords()[1:] for el in basis_elems]  # drop constant coord
        block = [[cols[c][r] for c in range(len(cols))]
                 for r in range(gc + gc * gc)]
        rows.extend(block)
    return _intmat.mat_rank(rows) == gnum + gnum * gnum
