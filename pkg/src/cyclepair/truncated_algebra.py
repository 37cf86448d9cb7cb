"""Elements and arithmetic of ZF/I^3 and Z pi_1/J^3.

An element is stored as (c0, deg1, deg2) for
    c0*1 + sum_i deg1[i]*(x_i - 1) + sum_{ij} deg2[i][j]*(x_i - 1)(x_j - 1)
with x_i either the edge generators of the free group on edges (dim = m) or a
fixed system of fundamental loops (dim = g). Everything stays over Z: inverse
letters expand through (x^-1 - 1) = (x - 1)^2 - (x - 1), never logarithms.
"""

from dataclasses import dataclass
from functools import lru_cache

from .homology import _cycle_chain, concyclicity, cycle_basis, nontree_edges, tree_path
from .multigraph import GraphError, Multigraph, NotCyclic, PointedGraph


@dataclass(frozen=True)
class EdgeWord:
    letters: tuple  # ((edge id, sign), ...), sign in {+1, -1}

    def __post_init__(self):
        object.__setattr__(self, "letters",
                           tuple((int(e), int(s)) for e, s in self.letters))
        if any(s not in (1, -1) for _, s in self.letters):
            raise GraphError("letter signs must be +-1")

    def __len__(self):
        return len(self.letters)

    def concat(self, other):
        return EdgeWord(self.letters + other.letters)

    def inverse(self):
        return EdgeWord(tuple((e, -s) for e, s in reversed(self.letters)))

    def power(self, k):
        base = self if k >= 0 else self.inverse()
        return EdgeWord(base.letters * abs(k))


def letter_endpoints(g: Multigraph, letter):
    e, s = letter
    t, h = g.edges[e]
    return (t, h) if s == 1 else (h, t)


def word_endpoints(g: Multigraph, w: EdgeWord):
    """(start, end) of w as a walk, or None if consecutive letters mismatch."""
    if not w.letters:
        return None
    start, cur = None, None
    for letter in w.letters:
        a, b = letter_endpoints(g, letter)
        if start is None:
            start = a
        elif a != cur:
            return None
        cur = b
    return (start, cur)


def is_loop_at(g: Multigraph, w: EdgeWord, v: int) -> bool:
    if not w.letters:
        return True
    ends = word_endpoints(g, w)
    return ends is not None and ends == (v, v)


def chain_of_word(w: EdgeWord, m: int):
    out = [0] * m
    for e, s in w.letters:
        out[e] += s
    return out


def reduce_word(w: EdgeWord) -> EdgeWord:
    """Free reduction: cancel adjacent e e^-1 pairs."""
    stack = []
    for letter in w.letters:
        if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
            stack.pop()
        else:
            stack.append(letter)
    return EdgeWord(tuple(stack))


# ---------------------------------------------------------------------------
# truncated elements

@dataclass(frozen=True)
class TruncatedElement:
    c0: int
    deg1: tuple
    deg2: tuple  # tuple of tuples

    @property
    def dim(self):
        return len(self.deg1)

    def __add__(self, other):
        self._check(other)
        return TruncatedElement(
            self.c0 + other.c0,
            tuple(a + b for a, b in zip(self.deg1, other.deg1)),
            tuple(tuple(a + b for a, b in zip(ra, rb))
                  for ra, rb in zip(self.deg2, other.deg2)))

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, k):
        return TruncatedElement(
            k * self.c0,
            tuple(k * x for x in self.deg1),
            tuple(tuple(k * x for x in row) for row in self.deg2))

    def _check(self, other):
        if self.dim != other.dim:
            raise GraphError("basis mismatch")

    def coords(self):
        """Flat (1 + d + d^2) coordinate vector: (c0, deg1, deg2 row-major)."""
        out = [self.c0]
        out.extend(self.deg1)
        for row in self.deg2:
            out.extend(row)
        return out


def elem_zero(dim):
    return TruncatedElement(0, tuple([0] * dim), tuple(tuple([0] * dim) for _ in range(dim)))


def elem_one(dim):
    z = elem_zero(dim)
    return TruncatedElement(1, z.deg1, z.deg2)


def elem_from_coords(vec, dim):
    c0 = vec[0]
    deg1 = tuple(vec[1:1 + dim])
    deg2 = tuple(tuple(vec[1 + dim + i * dim: 1 + dim + (i + 1) * dim])
                 for i in range(dim))
    return TruncatedElement(c0, deg1, deg2)


def generator_element(i, dim, sign=1):
    """Image of x_i^sign in the truncated algebra."""
    deg1 = [0] * dim
    deg2 = [[0] * dim for _ in range(dim)]
    if sign == 1:
        deg1[i] = 1
    else:
        deg1[i] = -1
        deg2[i][i] = 1
    return TruncatedElement(1, tuple(deg1), tuple(tuple(r) for r in deg2))


def multiply(a: TruncatedElement, b: TruncatedElement) -> TruncatedElement:
    """Truncated product; deg2 picks up deg1(a) (x) deg1(b)."""
    a._check(b)
    dim = a.dim
    deg1 = tuple(a.c0 * y + b.c0 * x for x, y in zip(a.deg1, b.deg1))
    deg2 = tuple(tuple(a.c0 * b.deg2[i][j] + b.c0 * a.deg2[i][j]
                       + a.deg1[i] * b.deg1[j]
                       for j in range(dim)) for i in range(dim))
    return TruncatedElement(a.c0 * b.c0, deg1, deg2)


def word2_expand(w: EdgeWord, dim: int) -> TruncatedElement:
    """Product over letters of (1 + (e-1)) resp. (1 - (e-1) + (e-1)^2)."""
    out = elem_one(dim)
    for e, s in w.letters:
        out = multiply(out, generator_element(e, dim, s))
    return out


def reduce_check(w: EdgeWord, w_reduced: EdgeWord, dim: int) -> bool:
    return word2_expand(w, dim) == word2_expand(w_reduced, dim)


def antipode_expand(x: TruncatedElement) -> TruncatedElement:
    """Representation of gamma^-1 from that of a group-like gamma.

    Uses (g^-1 - 1) = (g - 1)(g - 1) - (g - 1) in RG/J^3.
    """
    if x.c0 != 1:
        raise GraphError("antipode_expand expects a group-like element (c0 = 1)")
    dim = x.dim
    deg1 = tuple(-v for v in x.deg1)
    deg2 = tuple(tuple(x.deg1[i] * x.deg1[j] - x.deg2[i][j] for j in range(dim))
                 for i in range(dim))
    return TruncatedElement(1, deg1, deg2)


def homology_class(x: TruncatedElement):
    """Projection J/J^3 -> J/J^2 in the generator basis (the deg1 vector)."""
    return tuple(x.deg1)


# ---------------------------------------------------------------------------
# fundamental-loop generators

@dataclass(frozen=True)
class Generators:
    loops: tuple        # EdgeWords, loops at the basepoint
    nontree: tuple      # for spanning-tree generators: non-tree edge of each loop
    kind: str = "spanning-tree"

    @property
    def count(self):
        return len(self.loops)


@lru_cache(maxsize=None)
def generators(pg: PointedGraph) -> Generators:
    """Fundamental loops of the deterministic spanning tree, rooted at the
    basepoint: tree path to the tail, the non-tree edge, tree path back."""
    g, v = pg.graph, pg.basepoint
    cb = cycle_basis(g)
    loops = []
    nt = nontree_edges(cb)
    for e in nt:
        t, h = g.edges[e]
        word = (tuple(tree_path(g, cb.parents, v, t))
                + ((e, 1),)
                + tuple(tree_path(g, cb.parents, h, v)))
        loops.append(reduce_word(EdgeWord(word)))
    return Generators(tuple(loops), tuple(nt))


def loop_to_pi1(w: EdgeWord, gens: Generators, g: Multigraph = None,
                basepoint: int = None) -> TruncatedElement:
    """Rewrite a basepoint loop in the fundamental generators, then expand.

    The tree-contraction retraction deletes tree letters; what remains is the
    word in the generators (each fundamental loop contains exactly its own
    non-tree edge).
    """
    if g is not None and basepoint is not None and not is_loop_at(g, w, basepoint):
        raise GraphError("word is not a loop at the basepoint")
    index = {e: i for i, e in enumerate(gens.nontree)}
    letters = tuple((index[e], s) for e, s in w.letters if e in index)
    return word2_expand(EdgeWord(letters), gens.count)


def free_expansion(x: TruncatedElement, gens: Generators, m: int) -> TruncatedElement:
    """word_2 at the algebra level: substitute each generator's edge word."""
    images = [word2_expand(w, m) for w in gens.loops]
    d = [im.deg1 for im in images]
    out = elem_one(m).scale(x.c0)
    deg1 = list(out.deg1)
    deg2 = [list(row) for row in out.deg2]
    for i, c in enumerate(x.deg1):
        if c:
            for e in range(m):
                deg1[e] += c * d[i][e]
            for e in range(m):
                row = images[i].deg2[e]
                for f in range(m):
                    deg2[e][f] += c * row[f]
    for i in range(x.dim):
        for j in range(x.dim):
            c = x.deg2[i][j]
            if c:
                for e in range(m):
                    if d[i][e]:
                        for f in range(m):
                            deg2[e][f] += c * d[i][e] * d[j][f]
    return TruncatedElement(x.c0, tuple(deg1), tuple(tuple(r) for r in deg2))


def signed_substitution(x: TruncatedElement, phi, signs) -> TruncatedElement:
    """ZF(Phi) on I/I^3 for a signed edge bijection (e -> Phi(e)^{signs[e]})."""
    m = x.dim
    deg1 = [0] * m
    deg2 = [[0] * m for _ in range(m)]
    for e in range(m):
        deg1[phi[e]] += signs[e] * x.deg1[e]
        if signs[e] < 0 and x.deg1[e]:
            deg2[phi[e]][phi[e]] += x.deg1[e]
    for e in range(m):
        for f in range(m):
            if x.deg2[e][f]:
                deg2[phi[e]][phi[f]] += signs[e] * signs[f] * x.deg2[e][f]
    return TruncatedElement(x.c0, tuple(deg1), tuple(tuple(r) for r in deg2))


# ---------------------------------------------------------------------------
# cycle walks and vertex joins

def walk_cycle(g: Multigraph, class_edges, start, direction=1) -> EdgeWord:
    """Full traversal of a cyclically oriented cycle (sub)graph from `start`.

    direction +1 follows the orientation, -1 runs against it.
    """
    edges = set(class_edges)
    letters = []
    v = start
    while True:
        if direction == 1:
            cand = [e for e in edges if g.edges[e][0] == v]
        else:
            cand = [e for e in edges if g.edges[e][1] == v]
        cand = [e for e in cand if (e, direction) not in letters]
        if len(cand) != 1:
            raise NotCyclic("not a consistently oriented cycle")
        e = cand[0]
        letters.append((e, direction))
        t, h = g.edges[e]
        v = h if direction == 1 else t
        if v == start and len(letters) == len(edges):
            break
        if len(letters) > len(edges):
            raise NotCyclic("walk does not close up")
    return EdgeWord(tuple(letters))


def walk_path(g: Multigraph, class_edges, start, stop, direction=1) -> EdgeWord:
    """Orientation-compatible simple path start -> stop inside one cycle."""
    edges = set(class_edges)
    letters = []
    v = start
    while v != stop:
        if direction == 1:
            cand = [e for e in edges if g.edges[e][0] == v]
        else:
            cand = [e for e in edges if g.edges[e][1] == v]
        if len(cand) != 1:
            raise NotCyclic("not a consistently oriented cycle")
        e = cand[0]
        letters.append((e, direction))
        t, h = g.edges[e]
        v = h if direction == 1 else t
        if len(letters) > len(edges):
            raise NotCyclic("path does not reach the target")
    return EdgeWord(tuple(letters))


def vertex_join_parts(g: Multigraph):
    """(edges of Delta^1, edges of Delta^2, join vertex) or None.

    Delta^1 is the class containing edge 0. Requires exactly two concyclicity
    classes, each a cycle subgraph, sharing exactly one vertex.
    """
    try:
        parts = concyclicity(g)
    except GraphError:
        return None
    if len(parts.classes) != 2:
        return None
    c1, c2 = parts.classes
    verts = []
    for cls in (c1, c2):
        if _cycle_chain(g, cls) is None:
            return None
        vs = set()
        for e in cls:
            vs.update(g.edges[e])
        verts.append(vs)
    shared = verts[0] & verts[1]
    if len(shared) != 1 or verts[0] | verts[1] != set(range(g.vertex_count)):
        return None
    return c1, c2, next(iter(shared))


def minimal_generators(pg: PointedGraph, directions=(1, 1)):
    """Minimal generators of a vertex join and their path constants (c1, c2).

    gamma_i: shortest orientation-compatible path from the basepoint to the
    join vertex, once around Delta^i, back along the same path. c_i counts the
    path edges; c_i = 0 iff the basepoint lies in Delta^i. `directions` twists
    the sense of each cycle (used when transporting orientation-reversing
    isometries).
    """
    g, v = pg.graph, pg.basepoint
    parts = vertex_join_parts(g)
    if parts is None:
        raise NotCyclic("graph is not a vertex join of two cycles")
    c1, c2, u = parts
    classes = (c1, c2)
    loops = []
    consts = []
    for i, cls in enumerate(classes):
        other = classes[1 - i]
        in_own = any(v in g.edges[e] for e in cls) or v == u
        eye_start = u if not in_own else v
        eye = walk_cycle(g, cls, eye_start, directions[i])
        if in_own:
            loops.append(eye)
            consts.append(0)
        else:
            path = walk_path(g, other, v, u, directions[1 - i])
            loops.append(path.concat(eye).concat(path.inverse()))
            consts.append(len(path))
    return (Generators(tuple(loops), (), kind="minimal"), tuple(consts))
